//! Directed-bond scattering solver.
//!
//! Every internal edge `e` carries two bonds: `2e` runs tail to head and
//! `2e + 1` runs head to tail. With `a_b` the amplitude leaving the origin of
//! bond `b` and `φ_b = exp(i kl L_b)` its propagation phase, the stationary
//! state satisfies
//!
//! ```text
//! a = S Φ a + a_in,        t = t_direct + Σ_b τ_b φ_b a_b
//! ```
//!
//! where `S` collects vertex amplitudes from arriving to departing bonds,
//! `a_in` is the injection from the entrance lead and `τ` extracts the
//! amplitude scattered into the exit lead. Reflection uses the same system
//! with the entrance lead as the output channel.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::closed_forms::{Family, RationalAmplitude};
use crate::error::{Error, Result};
use crate::graph::{End, Port, QuantumGraph};
use crate::limit::{richardson_limit, LIMIT_OFFSET};
use crate::poly::Poly;

/// Smallest LU pivot accepted before the system is declared singular.
pub const SINGULAR_PIVOT: f64 = 1e-11;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Global two-port amplitudes at one real wavenumber.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatteringResult {
    pub kl: f64,
    pub t: Complex64,
    pub r: Complex64,
}

impl ScatteringResult {
    /// `|t|²`
    pub fn transmission(&self) -> f64 {
        self.t.norm_sqr()
    }

    /// `|r|²`
    pub fn reflection(&self) -> f64 {
        self.r.norm_sqr()
    }
}

#[derive(Clone, Debug)]
pub struct BondSystem {
    coupling: DMatrix<Complex64>,
    lengths: Vec<f64>,
    injection: DVector<Complex64>,
    transmit: DVector<Complex64>,
    reflect: DVector<Complex64>,
    direct_transmit: Complex64,
    direct_reflect: Complex64,
}

/// Bond leaving through `port` (which must be an edge port).
fn departing_bond(edge: usize, end: End) -> usize {
    match end {
        End::Tail => 2 * edge,
        End::Head => 2 * edge + 1,
    }
}

fn arriving_bond(edge: usize, end: End) -> usize {
    match end {
        End::Head => 2 * edge,
        End::Tail => 2 * edge + 1,
    }
}

pub fn assemble_bond_system(graph: &QuantumGraph) -> Result<BondSystem> {
    graph.ensure_valid()?;
    if graph.leads().len() != 2 {
        return Err(Error::NotTwoPort(graph.leads().len()));
    }
    let bonds = 2 * graph.edges().len();
    let mut coupling = DMatrix::zeros(bonds, bonds);
    let mut injection = DVector::zeros(bonds);
    let mut transmit = DVector::zeros(bonds);
    let mut reflect = DVector::zeros(bonds);
    let (mut direct_transmit, mut direct_reflect) = (ZERO, ZERO);

    for v in graph.vertices() {
        let ports = graph.ports(v.id);
        let sigma = graph.vertex_scattering(v.id)?;
        for (i, &into) in ports.iter().enumerate() {
            for (o, &out) in ports.iter().enumerate() {
                let amp = sigma.amplitude(o, i);
                match (into, out) {
                    (Port::Edge { edge: ei, end: ni }, Port::Edge { edge: eo, end: no }) => {
                        coupling[(departing_bond(eo, no), arriving_bond(ei, ni))] += amp;
                    }
                    (Port::Lead(0), Port::Edge { edge, end }) => {
                        injection[departing_bond(edge, end)] += amp;
                    }
                    (Port::Edge { edge, end }, Port::Lead(1)) => {
                        transmit[arriving_bond(edge, end)] += amp;
                    }
                    (Port::Edge { edge, end }, Port::Lead(0)) => {
                        reflect[arriving_bond(edge, end)] += amp;
                    }
                    (Port::Lead(0), Port::Lead(1)) => direct_transmit += amp,
                    (Port::Lead(0), Port::Lead(0)) => direct_reflect += amp,
                    // waves entering through the exit lead are not driven
                    _ => {}
                }
            }
        }
    }

    let lengths = graph
        .edges()
        .iter()
        .flat_map(|e| [e.length, e.length])
        .collect();
    Ok(BondSystem {
        coupling,
        lengths,
        injection,
        transmit,
        reflect,
        direct_transmit,
        direct_reflect,
    })
}

impl BondSystem {
    pub fn bond_count(&self) -> usize {
        self.lengths.len()
    }

    /// Bond-to-bond vertex amplitudes, entry `(departing, arriving)`.
    pub fn coupling(&self) -> &DMatrix<Complex64> {
        &self.coupling
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn injection(&self) -> &DVector<Complex64> {
        &self.injection
    }

    pub fn transmit_row(&self) -> &DVector<Complex64> {
        &self.transmit
    }

    pub fn reflect_row(&self) -> &DVector<Complex64> {
        &self.reflect
    }

    pub fn direct_transmit(&self) -> Complex64 {
        self.direct_transmit
    }

    pub fn direct_reflect(&self) -> Complex64 {
        self.direct_reflect
    }

    fn phases(&self, kl: Complex64) -> Vec<Complex64> {
        let i = Complex64::new(0.0, 1.0);
        self.lengths.iter().map(|&l| (i * kl * l).exp()).collect()
    }

    /// `I - S Φ`
    fn system_matrix(&self, phases: &[Complex64]) -> DMatrix<Complex64> {
        let n = self.bond_count();
        DMatrix::from_fn(n, n, |i, j| {
            let id = if i == j { ONE } else { ZERO };
            id - self.coupling[(i, j)] * phases[j]
        })
    }

    /// Solves for `(t, r)` at a possibly complex wavenumber. Fails with
    /// [`Error::Singular`] on a bound state in the continuum.
    pub fn solve(&self, kl: Complex64) -> Result<(Complex64, Complex64)> {
        let modulus = (-kl.im).exp();
        if modulus > 1.0 + 1e-9 {
            return Err(Error::OutsideUnitDisk { modulus });
        }
        if self.bond_count() == 0 {
            return Ok((self.direct_transmit, self.direct_reflect));
        }
        let phases = self.phases(kl);
        let lu = self.system_matrix(&phases).lu();
        let u = lu.u();
        let min_pivot = (0..u.nrows()).map(|i| u[(i, i)].norm()).fold(f64::INFINITY, f64::min);
        if min_pivot < SINGULAR_PIVOT {
            return Err(Error::Singular { kl: kl.re });
        }
        let a = lu
            .solve(&self.injection)
            .ok_or(Error::Singular { kl: kl.re })?;
        let mut t = self.direct_transmit;
        let mut r = self.direct_reflect;
        for b in 0..self.bond_count() {
            let arriving = phases[b] * a[b];
            t += self.transmit[b] * arriving;
            r += self.reflect[b] * arriving;
        }
        Ok((t, r))
    }

    /// Real-wavenumber solve without the limit policy.
    pub fn scatter(&self, kl: f64) -> Result<ScatteringResult> {
        if kl == 0.0 {
            return Err(Error::NonPositiveWavenumber(kl));
        }
        let (t, r) = self.solve(Complex64::new(kl, 0.0))?;
        Ok(ScatteringResult { kl, t, r })
    }

    /// Like [`Self::scatter`], but resolves singular points through the
    /// symmetric-offset Richardson limit.
    pub fn scatter_with_limit(&self, kl: f64) -> Result<ScatteringResult> {
        match self.scatter(kl) {
            Err(Error::Singular { .. }) => {
                let [t, r] = richardson_limit(kl, LIMIT_OFFSET, |x| {
                    let s = self.scatter(x)?;
                    Ok([s.t, s.r])
                })
                .map_err(|_| Error::UnresolvedSingularity { kl })?;
                Ok(ScatteringResult { kl, t, r })
            }
            other => other,
        }
    }

    /// Transmission and reflection as rational functions of `z = e^{i kl}`.
    ///
    /// The denominator is `det(I - S Φ(z))`; the numerators follow from the
    /// bordered determinant `v^T adj(A) u = -det([[A, u], [v^T, 0]])`. All three
    /// are polynomials of degree at most the total bond length, recovered
    /// by an inverse DFT of samples on the unit circle.
    pub fn generating_functions(
        &self,
        step_lengths: &[usize],
    ) -> Result<(RationalAmplitude, RationalAmplitude)> {
        assert_eq!(step_lengths.len() * 2, self.bond_count());
        let bond_steps: Vec<usize> = step_lengths.iter().flat_map(|&l| [l, l]).collect();
        let degree: usize = bond_steps.iter().sum();
        let samples = degree + 1;
        let n = self.bond_count();

        let mut den_vals = Vec::with_capacity(samples);
        let mut t_vals = Vec::with_capacity(samples);
        let mut r_vals = Vec::with_capacity(samples);
        for j in 0..samples {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / samples as f64;
            let z = Complex64::from_polar(1.0, theta);
            let phases: Vec<Complex64> = bond_steps.iter().map(|&l| z.powu(l as u32)).collect();
            let a = self.system_matrix(&phases);
            let det = a.clone().determinant();
            // v^T adj(A) u = -det([[A, u], [v^T, 0]]) with v = row ∘ phases
            let bordered = |row: &DVector<Complex64>| {
                let m = DMatrix::from_fn(n + 1, n + 1, |i, k| match (i < n, k < n) {
                    (true, true) => a[(i, k)],
                    (true, false) => self.injection[i],
                    (false, true) => row[k] * phases[k],
                    (false, false) => ZERO,
                });
                -m.determinant()
            };
            den_vals.push(det);
            t_vals.push(self.direct_transmit * det + bordered(&self.transmit));
            r_vals.push(self.direct_reflect * det + bordered(&self.reflect));
        }
        let den = inverse_dft(&den_vals);
        let num_t = inverse_dft(&t_vals);
        let num_r = inverse_dft(&r_vals);
        Ok((
            RationalAmplitude::new(num_t, den.clone(), Family::Graph),
            RationalAmplitude::new(num_r, den, Family::Graph),
        ))
    }
}

fn inverse_dft(values: &[Complex64]) -> Poly {
    let n = values.len();
    let coeffs = (0..n)
        .map(|k| {
            let sum: Complex64 = values
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    let angle = -2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64;
                    v * Complex64::from_polar(1.0, angle)
                })
                .sum();
            sum / n as f64
        })
        .collect();
    Poly::new(coeffs).trimmed(1e-14)
}

/// Transmission and reflection generating functions of a graph whose edge
/// lengths are whole multiples of the base length, with bound-state factors
/// cancelled (see [`RationalAmplitude::without_unit_circle_factors`]).
/// Without the cancellation the Taylor recurrence amplifies rounding
/// polynomially in the order through the repeated unit-circle roots.
pub fn graph_amplitudes(graph: &QuantumGraph) -> Result<(RationalAmplitude, RationalAmplitude)> {
    let steps = graph.integral_lengths()?;
    let (t, r) = assemble_bond_system(graph)?.generating_functions(&steps)?;
    Ok((t.without_unit_circle_factors(), r.without_unit_circle_factors()))
}

/// Solves the graph at real `kl` (no limit policy).
pub fn scattering_matrix(graph: &QuantumGraph, kl: f64) -> Result<ScatteringResult> {
    assemble_bond_system(graph)?.scatter(kl)
}

/// Green's function between lead coordinates `x_i` (entrance) and `x_f`
/// (exit) in units `ħ = m = ℓ = 1`: `T(k) / (i k) · e^{i k (x_i + x_f)}`.
pub fn green_function_value(graph: &QuantumGraph, x_i: f64, x_f: f64, kl: f64) -> Result<Complex64> {
    if kl.is_nan() || kl <= 0.0 {
        return Err(Error::NonPositiveWavenumber(kl));
    }
    for x in [x_i, x_f] {
        if x.is_nan() || x < 0.0 {
            return Err(Error::NegativeLeadCoordinate(x));
        }
    }
    let t = assemble_bond_system(graph)?.scatter_with_limit(kl)?.t;
    let i = Complex64::new(0.0, 1.0);
    Ok(t / (i * kl) * (i * kl * (x_i + x_f)).exp())
}
