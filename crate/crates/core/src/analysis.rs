//! Transmission sweeps, suppression bands and resonance peaks.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::QuantumGraph;
use crate::solver::{assemble_bond_system, BondSystem, ScatteringResult};

pub const DEFAULT_FLOOR: f64 = 0.01;
pub const DEFAULT_MIN_HEIGHT: f64 = 0.99;
pub const FULL_TRANSMISSION: f64 = 0.999;
pub const DEFAULT_RESOLUTION: f64 = 1e-4;
/// Location accuracy of refined centers and half-height crossings.
pub const REFINE_TOL: f64 = 1e-9;
const GRID_SYMMETRY_TOL: f64 = 1e-9;

/// Solver results on a uniform grid, with the system kept for refinement.
#[derive(Clone, Debug)]
pub struct Sweep {
    system: Arc<BondSystem>,
    results: Vec<ScatteringResult>,
    resolution: f64,
}

impl Sweep {
    pub fn system(&self) -> &BondSystem {
        &self.system
    }

    pub fn results(&self) -> &[ScatteringResult] {
        &self.results
    }

    pub fn kl(&self) -> Vec<f64> {
        self.results.iter().map(|r| r.kl).collect()
    }

    pub fn transmission(&self) -> Vec<f64> {
        self.results.iter().map(|r| r.transmission()).collect()
    }

    /// Grid spacing.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.results.len()
    }

    pub fn is_empty(&self) -> bool {
        self.results.is_empty()
    }

    fn t2(&self, kl: f64) -> Result<f64> {
        Ok(self.system.scatter_with_limit(kl)?.transmission())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Band {
    pub low: f64,
    pub high: f64,
}

impl Band {
    pub fn width(&self) -> f64 {
        self.high - self.low
    }

    pub fn contains(&self, kl: f64) -> bool {
        self.low <= kl && kl <= self.high
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakReport {
    pub center: f64,
    pub height: f64,
    /// Full width at half maximum of `|T|²`.
    pub fwhm: f64,
    pub band: Band,
    pub full_transmission: bool,
}

/// Uniform grid with exact endpoints.
pub fn uniform_grid(kl_min: f64, kl_max: f64, samples: usize) -> Result<Vec<f64>> {
    if !(kl_min.is_finite() && kl_max.is_finite()) {
        return Err(Error::InvalidSweep("kl range must be finite".into()));
    }
    if kl_min <= 0.0 {
        return Err(Error::InvalidSweep(format!("kl-min must be positive, got {kl_min}")));
    }
    if kl_max <= kl_min {
        return Err(Error::InvalidSweep(format!(
            "kl-max ({kl_max}) must exceed kl-min ({kl_min})"
        )));
    }
    if samples < 2 {
        return Err(Error::InvalidSweep(format!("samples must be at least 2, got {samples}")));
    }
    let step = (kl_max - kl_min) / (samples - 1) as f64;
    Ok((0..samples)
        .map(|j| if j + 1 == samples { kl_max } else { kl_min + step * j as f64 })
        .collect())
}

/// Grid `pi ± x` with `x` uniform on `[0, half_width]`, mirrored so pairs
/// are exactly symmetric; `pairs` points lie on each side of pi.
pub fn symmetric_grid(half_width: f64, pairs: usize) -> Result<Vec<f64>> {
    if !(half_width > 0.0 && half_width < PI) {
        return Err(Error::InvalidSweep(format!(
            "half width must lie in (0, pi), got {half_width}"
        )));
    }
    if pairs < 1 {
        return Err(Error::InvalidSweep("need at least one pair".into()));
    }
    let offsets: Vec<f64> = (1..=pairs)
        .map(|j| half_width * j as f64 / pairs as f64)
        .collect();
    let mut grid: Vec<f64> = offsets.iter().rev().map(|x| PI - x).collect();
    grid.extend(offsets.iter().map(|x| PI + x));
    Ok(grid)
}

pub fn sweep_transmission(graph: &QuantumGraph, kl_min: f64, kl_max: f64, samples: usize) -> Result<Sweep> {
    let grid = uniform_grid(kl_min, kl_max, samples)?;
    sweep_grid(Arc::new(assemble_bond_system(graph)?), grid)
}

/// Sweep with spacing at most `resolution`.
pub fn sweep_with_resolution(graph: &QuantumGraph, kl_min: f64, kl_max: f64, resolution: f64) -> Result<Sweep> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidSweep(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    let samples = ((kl_max - kl_min) / resolution).ceil().max(1.0) as usize + 1;
    sweep_transmission(graph, kl_min, kl_max, samples)
}

/// Evaluates an increasing grid in parallel; singular points go through the
/// limit policy.
pub fn sweep_grid(system: Arc<BondSystem>, grid: Vec<f64>) -> Result<Sweep> {
    if grid.len() < 2 {
        return Err(Error::InvalidSweep("grid needs at least two points".into()));
    }
    if grid[0] <= 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSweep(
            "grid must be positive and strictly increasing".into(),
        ));
    }
    let results = grid
        .par_iter()
        .map(|&kl| system.scatter_with_limit(kl))
        .collect::<Result<Vec<_>>>()?;
    let resolution = grid
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max);
    Ok(Sweep {
        system,
        results,
        resolution,
    })
}

/// Largest `| |T(pi+x)|² - |T(pi-x)|² |` over mirrored grid pairs.
pub fn check_reflection_symmetry(sweep: &Sweep) -> Result<f64> {
    let r = sweep.results();
    let n = r.len();
    let mut worst = 0.0f64;
    for i in 0..n / 2 {
        let (a, b) = (r[i], r[n - 1 - i]);
        let offset = a.kl + b.kl - 2.0 * PI;
        if offset.abs() > GRID_SYMMETRY_TOL {
            return Err(Error::AsymmetricGrid { index: i, offset });
        }
        worst = worst.max((a.transmission() - b.transmission()).abs());
    }
    if n % 2 == 1 {
        let offset = r[n / 2].kl - PI;
        if offset.abs() > GRID_SYMMETRY_TOL {
            return Err(Error::AsymmetricGrid { index: n / 2, offset });
        }
    }
    Ok(worst)
}

/// Runs of grid points with `|T|² < floor`, then gaps are closed smallest
/// first whenever a gap is narrower than the wider of its two neighbors.
/// The gaps that survive a merge are where the peaks live.
pub fn detect_suppression_bands(sweep: &Sweep, floor: f64) -> Vec<Band> {
    let kl = sweep.kl();
    let t2 = sweep.transmission();
    let mut bands: Vec<Band> = Vec::new();
    let mut start: Option<usize> = None;
    for i in 0..=t2.len() {
        let below = i < t2.len() && t2[i] < floor;
        match (below, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                bands.push(Band {
                    low: kl[s],
                    high: kl[i - 1],
                });
                start = None;
            }
            _ => {}
        }
    }
    loop {
        let candidate = (0..bands.len().saturating_sub(1))
            .map(|i| (i, bands[i + 1].low - bands[i].high))
            .filter(|&(i, gap)| gap < bands[i].width().max(bands[i + 1].width()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match candidate {
            Some((i, _)) => {
                bands[i].high = bands[i + 1].high;
                bands.remove(i + 1);
            }
            None => break,
        }
    }
    bands
}

pub fn detect_peaks(sweep: &Sweep, min_height: f64) -> Result<Vec<PeakReport>> {
    detect_peaks_with_floor(sweep, DEFAULT_FLOOR, min_height)
}

/// Local maxima strictly inside suppression bands, refined on the solver.
pub fn detect_peaks_with_floor(sweep: &Sweep, floor: f64, min_height: f64) -> Result<Vec<PeakReport>> {
    let bands = detect_suppression_bands(sweep, floor);
    let kl = sweep.kl();
    let t2 = sweep.transmission();
    let mut peaks = Vec::new();
    for i in 1..t2.len().saturating_sub(1) {
        if !(t2[i] > t2[i - 1] && t2[i] >= t2[i + 1] && t2[i] >= floor) {
            continue;
        }
        let Some(band) = bands.iter().find(|b| b.low < kl[i] && kl[i] < b.high) else {
            continue;
        };
        let (center, height) = golden_max(|x| sweep.t2(x), kl[i - 1], kl[i + 1])?;
        if height < min_height {
            continue;
        }
        let fwhm = half_height_crossing(sweep, &kl, &t2, i, center, height, 1)?
            - half_height_crossing(sweep, &kl, &t2, i, center, height, -1)?;
        peaks.push(PeakReport {
            center,
            height,
            fwhm,
            band: *band,
            full_transmission: height >= FULL_TRANSMISSION,
        });
    }
    Ok(peaks)
}

/// Golden-section maximization on `[a, b]` down to [`REFINE_TOL`].
fn golden_max<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > REFINE_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Half-height crossing on one side (`dir` = ±1) of the peak at grid index
/// `i`: walk the grid to the first point below half height, then bisect.
fn half_height_crossing(
    sweep: &Sweep,
    kl: &[f64],
    t2: &[f64],
    i: usize,
    center: f64,
    height: f64,
    dir: isize,
) -> Result<f64> {
    let half = 0.5 * height;
    let mut j = i as isize;
    loop {
        let next = j + dir;
        if next < 0 || next as usize >= kl.len() {
            return Ok(kl[j as usize]);
        }
        j = next;
        if t2[j as usize] < half {
            break;
        }
    }
    let (mut inside, mut outside) = (kl[(j - dir) as usize], kl[j as usize]);
    if (inside - center) * dir as f64 <= 0.0 {
        inside = center;
    }
    while (outside - inside).abs() > REFINE_TOL {
        let mid = 0.5 * (inside + outside);
        if sweep.t2(mid)? >= half {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(0.5 * (inside + outside))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compose::{compose_series, SeriesSpec, CANONICAL_GLUE};
    use crate::graph::{make_cycle_graph, BoundaryCondition, Edge, Vertex};

    fn c3c3() -> QuantumGraph {
        compose_series(&SeriesSpec::cycles(&[3, 3], CANONICAL_GLUE)).unwrap()
    }

    fn pass_through() -> QuantumGraph {
        let v = |id| Vertex {
            id,
            bc: BoundaryCondition::NeumannKirchhoff,
        };
        QuantumGraph::new(
            vec![v(1), v(2)],
            vec![Edge {
                from: 1,
                to: 2,
                length: 1.0,
            }],
            vec![1, 2],
        )
    }

    #[test]
    fn grids() {
        let g = uniform_grid(1.0, 2.0, 11).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[10], 2.0);
        assert!(uniform_grid(0.0, 1.0, 10).is_err());
        assert!(uniform_grid(1.0, 1.0, 10).is_err());
        assert!(uniform_grid(1.0, 2.0, 1).is_err());
        let s = symmetric_grid(3.0, 5).unwrap();
        assert_eq!(s.len(), 10);
        for i in 0..5 {
            assert!((s[i] + s[9 - i] - 2.0 * PI).abs() < 1e-15);
        }
    }

    #[test]
    fn c3_sweep_values() {
        let sweep = sweep_transmission(&make_cycle_graph(3, 1.0).unwrap(), 0.01, 2.0 * PI - 0.01, 1001).unwrap();
        assert!(check_reflection_symmetry(&sweep).unwrap() < 1e-10);
        let kl = sweep.kl();
        let j = kl
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - PI / 2.0).abs().total_cmp(&(b.1 - PI / 2.0).abs()))
            .unwrap()
            .0;
        assert!((sweep.transmission()[j] - 0.5).abs() < 5e-3);
    }

    #[test]
    fn c4_grid_near_pi_and_half_pi() {
        // pi is a removable point of the C4 amplitude with |T|² = 1 there; the
        // transmission zero sits at pi/2.
        let sweep = sweep_transmission(&make_cycle_graph(4, 1.0).unwrap(), 0.5, 2.0 * PI - 0.5, 1001).unwrap();
        let t2 = sweep.transmission();
        let kl = sweep.kl();
        let nearest = |x: f64| {
            (0..kl.len())
                .min_by(|&a, &b| (kl[a] - x).abs().total_cmp(&(kl[b] - x).abs()))
                .unwrap()
        };
        assert!(t2[nearest(PI)] > 1.0 - 1e-5, "{}", t2[nearest(PI)]);
        assert!(t2[nearest(PI / 2.0)] < 1e-3);
    }

    #[test]
    fn asymmetric_grid_rejected() {
        let sys = Arc::new(assemble_bond_system(&make_cycle_graph(3, 1.0).unwrap()).unwrap());
        let sweep = sweep_grid(sys, vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            check_reflection_symmetry(&sweep),
            Err(Error::AsymmetricGrid { .. })
        ));
    }

    #[test]
    fn pass_through_has_no_bands() {
        let sweep = sweep_transmission(&pass_through(), 0.01, 6.0, 500).unwrap();
        assert!(detect_suppression_bands(&sweep, DEFAULT_FLOOR).is_empty());
        assert!(detect_peaks(&sweep, DEFAULT_MIN_HEIGHT).unwrap().is_empty());
    }

    #[test]
    fn merge_rule_on_synthetic_data() {
        let sys = Arc::new(assemble_bond_system(&pass_through()).unwrap());
        // Zeros at kl 2..=5, 7..=10 and 29: the first gap closes, the second
        // is wider than both neighbors and stays open.
        let kl: Vec<f64> = (1..=30).map(f64::from).collect();
        let t2 = kl.iter().map(|&k| -> f64 {
            if (2.0..=5.0).contains(&k) || (7.0..=10.0).contains(&k) || k == 29.0 {
                0.0
            } else {
                1.0
            }
        });
        let results = kl
            .iter()
            .zip(t2)
            .map(|(&kl, v)| ScatteringResult {
                kl,
                t: crate::Complex64::new(v.sqrt(), 0.0),
                r: crate::Complex64::new((1.0 - v).sqrt(), 0.0),
            })
            .collect();
        let sweep = Sweep {
            system: sys,
            results,
            resolution: 1.0,
        };
        let bands = detect_suppression_bands(&sweep, 0.5);
        assert_eq!(
            bands,
            vec![Band { low: 2.0, high: 10.0 }, Band { low: 29.0, high: 29.0 }]
        );
    }

    #[test]
    fn c3c3_peak_properties() {
        let g = c3c3();
        let sweep = sweep_with_resolution(&g, 0.01, 2.0 * PI - 0.01, 2e-4).unwrap();
        let peaks = detect_peaks(&sweep, DEFAULT_MIN_HEIGHT).unwrap();
        assert_eq!(peaks.len(), 2, "{peaks:?}");
        for p in &peaks {
            assert!(p.band.contains(p.center));
            assert!(p.fwhm < p.band.width());
            assert!(p.full_transmission);
            let again = assemble_bond_system(&g).unwrap().scatter(p.center).unwrap();
            assert!(again.transmission() >= FULL_TRANSMISSION);
        }
        assert!((peaks[0].center + peaks[1].center - 2.0 * PI).abs() < 1e-6);
        assert!((peaks[0].fwhm - peaks[1].fwhm).abs() < 1e-6);

        let fine = sweep_with_resolution(&g, 0.01, 2.0 * PI - 0.01, 1e-4).unwrap();
        let refined = detect_peaks(&fine, DEFAULT_MIN_HEIGHT).unwrap();
        assert_eq!(refined.len(), 2);
        for (a, b) in peaks.iter().zip(&refined) {
            assert!((a.center - b.center).abs() < 1e-6);
        }
    }

    #[test]
    fn lower_floor_bands_nest() {
        let g = compose_series(&SeriesSpec::cycles(&[3, 4, 3], CANONICAL_GLUE)).unwrap();
        let sweep = sweep_with_resolution(&g, 0.01, 2.0 * PI - 0.01, 5e-4).unwrap();
        let outer = detect_suppression_bands(&sweep, 0.01);
        assert!(!outer.is_empty());
        for floor in [1e-3, 1e-4, 1e-6] {
            for band in detect_suppression_bands(&sweep, floor) {
                assert!(
                    outer.iter().any(|o| o.low <= band.low && band.high <= o.high),
                    "{band:?} at floor {floor}"
                );
            }
        }
    }

    #[test]
    fn c3c4c3_suppression_band_is_wider_than_c3c3() {
        let widest = |g: &QuantumGraph| {
            let sweep = sweep_with_resolution(g, 0.01, 2.0 * PI - 0.01, 5e-4).unwrap();
            detect_suppression_bands(&sweep, DEFAULT_FLOOR)
                .iter()
                .filter(|b| b.contains(PI))
                .map(Band::width)
                .fold(0.0, f64::max)
        };
        let g343 = compose_series(&SeriesSpec::cycles(&[3, 4, 3], CANONICAL_GLUE)).unwrap();
        let (a, b) = (widest(&c3c3()), widest(&g343));
        assert!(a > 0.0);
        assert!(b > a, "{b} vs {a}");
    }
}
