//! Analytic transmission amplitudes as rational functions of `z = e^{i kl}`.
//!
//! Only `|T|²` is observable: the general-cycle form and the symmetric
//! C3/C4 forms differ by a global sign under NK parameters.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{unitarity_defect, UNITARITY_TOL};
use crate::poly::Poly;

/// Threshold below which numerator and denominator count as vanishing.
pub const VANISHING: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NkCycle {
    C3,
    C4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    SymmetricC3,
    SymmetricC4,
    CycleNk(usize),
    /// Commonly quoted, erroneous reduced NK forms; audit only.
    PrintedNk(NkCycle),
    /// Reduced NK forms re-derived from the bond solver.
    ReducedNk(NkCycle),
    /// Extracted numerically from a graph.
    Graph,
}

/// Symmetric vertex parameters: `(r, t)` for the two lead vertices (3x3 with
/// constant diagonal and off-diagonal), `(rp, tp)` for the remaining ones (2x2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetricParams {
    pub r: Complex64,
    pub t: Complex64,
    pub rp: Complex64,
    pub tp: Complex64,
}

impl SymmetricParams {
    pub fn neumann_kirchhoff() -> Self {
        Self {
            r: Complex64::new(-1.0 / 3.0, 0.0),
            t: Complex64::new(2.0 / 3.0, 0.0),
            rp: Complex64::new(0.0, 0.0),
            tp: Complex64::new(1.0, 0.0),
        }
    }

    /// Worst unitarity defect over the 3x3 and 2x2 vertex matrices.
    pub fn unitarity_defect(&self) -> f64 {
        let three = nalgebra::DMatrix::from_fn(3, 3, |i, j| if i == j { self.r } else { self.t });
        let two = nalgebra::DMatrix::from_fn(2, 2, |i, j| if i == j { self.rp } else { self.tp });
        unitarity_defect(&three).max(unitarity_defect(&two))
    }

    fn check(&self) -> Result<()> {
        let deviation = self.unitarity_defect();
        if deviation > UNITARITY_TOL {
            Err(Error::NonUnitaryParameters { deviation })
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalAmplitude {
    numerator: Poly,
    denominator: Poly,
    family: Family,
    params: Option<SymmetricParams>,
}

impl RationalAmplitude {
    pub fn new(numerator: Poly, denominator: Poly, family: Family) -> Self {
        Self {
            numerator,
            denominator,
            family,
            params: None,
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    pub fn denominator(&self) -> &Poly {
        &self.denominator
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> Option<&SymmetricParams> {
        self.params.as_ref()
    }

    /// Raw `num(z) / den(z)`.
    pub fn eval_z(&self, z: Complex64) -> Complex64 {
        self.numerator.eval(z) / self.denominator.eval(z)
    }

    /// `dT/dz` at `z`.
    pub fn derivative_z(&self, z: Complex64) -> Complex64 {
        let (n, d) = (self.numerator.eval(z), self.denominator.eval(z));
        let (dn, dd) = (
            self.numerator.derivative().eval(z),
            self.denominator.derivative().eval(z),
        );
        (dn * d - n * dd) / (d * d)
    }

    /// Divides out factors `(z - ρ)^j` shared by numerator and denominator
    /// with `ρ` on the unit circle.
    ///
    /// Amplitudes rebuilt from samples carry bound-state roots whose exact
    /// cancellation is spoiled by rounding: a k-fold root splits into a
    /// cluster a few 1e-6 wide. Left in place, the near-miss pole-zero pairs
    /// add a slowly decaying spurious term to the Taylor series. Each
    /// cluster is replaced by its center, found by Newton's method on the
    /// (k-1)-th derivative where the root is simple.
    pub fn without_unit_circle_factors(&self) -> Self {
        let den_roots: Vec<Complex64> = self
            .denominator
            .roots()
            .into_iter()
            .filter(|r| (r.norm() - 1.0).abs() <= UNIT_CIRCLE_BAND)
            .collect();
        let num_roots = self.numerator.roots();
        let mut num = self.numerator.clone();
        let mut den = self.denominator.clone();
        for cluster in clusters(&den_roots, COMMON_ROOT_TOL) {
            let k = cluster.len();
            let guess = cluster.iter().sum::<Complex64>() / k as f64;
            let shared = num_roots
                .iter()
                .filter(|a| (*a - guess).norm() < COMMON_ROOT_TOL)
                .count()
                .min(k);
            if shared == 0 {
                continue;
            }
            let center = refine_multiple_root(&self.denominator, guess, k);
            let center = center / center.norm();
            for _ in 0..shared {
                num = num.deflate(center);
                den = den.deflate(center);
            }
        }
        Self {
            numerator: num,
            denominator: den,
            ..self.clone()
        }
    }
}

/// Groups points whose chain distance stays below `tol`.
fn clusters(points: &[Complex64], tol: f64) -> Vec<Vec<Complex64>> {
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for &p in points {
        let hits: Vec<usize> = (0..groups.len())
            .filter(|&g| groups[g].iter().any(|q| (q - p).norm() < tol))
            .collect();
        let mut merged = vec![p];
        for &g in hits.iter().rev() {
            merged.extend(groups.swap_remove(g));
        }
        groups.push(merged);
    }
    groups
}

fn refine_multiple_root(p: &Poly, guess: Complex64, multiplicity: usize) -> Complex64 {
    let mut f = p.clone();
    for _ in 1..multiplicity {
        f = f.derivative();
    }
    let df = f.derivative();
    let mut x = guess;
    for _ in 0..50 {
        let step = f.eval(x) / df.eval(x);
        if !step.is_finite() {
            break;
        }
        x -= step;
        if step.norm() < 1e-16 {
            break;
        }
    }
    x
}

/// Distance from the unit circle within which a denominator root counts as a
/// bound state rather than a resonance.
const UNIT_CIRCLE_BAND: f64 = 1e-4;
/// Largest numerator-denominator root separation treated as one factor.
const COMMON_ROOT_TOL: f64 = 1e-3;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn z_pow(power: usize) -> Poly {
    Poly::monomial(c(1.0), power)
}

/// `1 - a z^power`
fn one_minus(a: Complex64, power: usize) -> Poly {
    &Poly::constant(c(1.0)) - &Poly::monomial(a, power)
}

/// Triangle with leads on vertices 1 and 2 and symmetric parameters
/// `r1 = r2 = r`, `t1 = t2 = t`, `r3 = rp`, `t3 = tp`.
pub fn symmetric_c3_amplitude(p: SymmetricParams) -> Result<RationalAmplitude> {
    p.check()?;
    let SymmetricParams { r, t, rp, tp } = p;
    let rm = r - t;
    let braces = &(&(&one_minus(rm * rm, 2) * &Poly::monomial(tp, 1))
        + &one_minus(rp * rm, 2).pow(2))
        - &Poly::monomial(rm * rm * tp * tp, 4);
    let numerator = &Poly::monomial(t * t, 1) * &braces;

    let quartic = r * (r * rp * (2.0 * r + rp) - 2.0 * rp * t * t - r * tp * tp);
    let sextic = rm * rm * (r + t) * (r + t) * (rp - tp) * (rp + tp);
    let denominator = Poly::new(vec![
        c(1.0),
        c(0.0),
        -r * (r + 2.0 * rp),
        -2.0 * t * t * tp,
        quartic,
        c(0.0),
        -sextic,
    ]);
    Ok(RationalAmplitude {
        numerator,
        denominator,
        family: Family::SymmetricC3,
        params: Some(p),
    })
}

/// Square with leads on vertices 1 and 2 and symmetric parameters
/// `r1 = r2 = r`, `t1 = t2 = t`, `r3 = r4 = rp`, `t3 = t4 = tp`.
pub fn symmetric_c4_amplitude(p: SymmetricParams) -> Result<RationalAmplitude> {
    p.check()?;
    let SymmetricParams { r, t, rp, tp } = p;
    let numerator = &(&(&Poly::monomial(t * t, 1) * &one_minus((r - t) * (rp - tp), 2))
        * &one_minus((r - t) * (rp + tp), 2))
        * &one_minus((rp - tp) * (rp + tp), 2);

    let quartic = 2.0 * (r * rp * (r * r + r * rp + rp * rp - t * t) - (r * rp + t * t) * tp * tp);
    let inner = -r * rp * (r + rp) + rp * t * t + r * tp * tp;
    let octic = (r * r - t * t) * (r * r - t * t) * (rp * rp - tp * tp) * (rp * rp - tp * tp);
    let denominator = Poly::new(vec![
        c(1.0),
        c(0.0),
        -(r + rp) * (r + rp),
        c(0.0),
        quartic,
        c(0.0),
        -inner * inner,
        c(0.0),
        octic,
    ]);
    Ok(RationalAmplitude {
        numerator,
        denominator,
        family: Family::SymmetricC4,
        params: Some(p),
    })
}

/// NK cycle on `n` vertices with leads on adjacent vertices:
/// `4 (z^n - 1)(z + z^{n-1}) / (9 - z^2 - z^{2(n-1)} - 8 z^n + z^{2n})`.
pub fn cycle_nk_amplitude(n: usize) -> Result<RationalAmplitude> {
    if n < 3 {
        return Err(Error::CycleTooSmall(n));
    }
    let numerator =
        (&(&z_pow(n) - &Poly::constant(c(1.0))) * &(&z_pow(1) + &z_pow(n - 1))).scale(c(4.0));
    let mut den = vec![c(0.0); 2 * n + 1];
    den[0] += 9.0;
    den[2] -= 1.0;
    den[2 * (n - 1)] -= 1.0;
    den[n] -= 8.0;
    den[2 * n] += 1.0;
    Ok(RationalAmplitude::new(
        numerator,
        Poly::new(den),
        Family::CycleNk(n),
    ))
}

/// Commonly quoted NK-reduced C3/C4 forms. These are kept for the
/// audit only: the printed C3 form gives `|T|² = 32/388` at `z = i` and the
/// printed C4 form exceeds unit transmission there.
pub fn printed_nk_amplitude(cycle: NkCycle) -> RationalAmplitude {
    let (num, den) = match cycle {
        NkCycle::C3 => (
            &z_pow(1) * &Poly::from_real(&[4.0, 8.0, 8.0, 4.0]),
            Poly::from_real(&[9.0, -9.0, -8.0, 0.0, 1.0, 1.0]),
        ),
        NkCycle::C4 => (
            &z_pow(1) * &Poly::from_real(&[1.0, 0.0, -1.0]).pow(2).scale(c(4.0)),
            Poly::from_real(&[9.0, 8.0, 0.0, 0.0, 0.0, 0.0, -1.0]),
        ),
    };
    RationalAmplitude::new(num, den, Family::PrintedNk(cycle))
}

/// NK-reduced C3/C4 forms after cancelling the common `(z^2 - 1)` (C4) and
/// `(z - 1)` (C3) factors of the general cycle form, signed so that the
/// one-step coefficient is `+t²`:
///
/// ```text
/// T_C3 = 4z (1 + 2z + 2z² + z³) / (9 + 9z + 8z² - z⁴ - z⁵)
/// T_C4 = 4z (1 + z²)² / (9 + 8z² - z⁶)
/// ```
pub fn reduced_nk_amplitude(cycle: NkCycle) -> RationalAmplitude {
    let (num, den) = match cycle {
        NkCycle::C3 => (
            &z_pow(1) * &Poly::from_real(&[4.0, 8.0, 8.0, 4.0]),
            Poly::from_real(&[9.0, 9.0, 8.0, 0.0, -1.0, -1.0]),
        ),
        NkCycle::C4 => (
            &z_pow(1) * &Poly::from_real(&[1.0, 0.0, 1.0]).pow(2).scale(c(4.0)),
            Poly::from_real(&[9.0, 0.0, 8.0, 0.0, 0.0, 0.0, -1.0]),
        ),
    };
    RationalAmplitude::new(num, den, Family::ReducedNk(cycle))
}

/// Evaluates `T` at `z = e^{i kl}`. Where numerator and denominator both
/// vanish the common factor `(z - z0)` is divided out of both and the
/// quotient is evaluated; a lone vanishing denominator is a pole.
pub fn eval_amplitude(amp: &RationalAmplitude, kl: f64) -> Result<Complex64> {
    let z = Complex64::from_polar(1.0, kl);
    let (mut num, mut den) = (amp.numerator.clone(), amp.denominator.clone());
    loop {
        let (n, d) = (num.eval(z), den.eval(z));
        if d.norm() >= VANISHING {
            return Ok(n / d);
        }
        if n.norm() >= VANISHING || den.degree() == 0 {
            return Err(Error::Pole { kl });
        }
        num = num.deflate(z);
        den = den.deflate(z);
    }
}

/// Outcome of checking the printed NK-reduced forms against the re-derived ones.
#[derive(Clone, Copy, Debug)]
pub struct TypoAudit {
    pub cycle: NkCycle,
    /// `|T|²` of the printed form at `z = i`.
    pub printed_at_i: f64,
    /// `|T|²` of the re-derived form at `z = i`.
    pub reduced_at_i: f64,
    /// Largest `|T|²` of the printed form over the unit circle.
    pub printed_max: f64,
    /// Largest `|T|²` of the re-derived form over the unit circle.
    pub reduced_max: f64,
}

impl TypoAudit {
    /// The printed form breaks flux conservation somewhere on the circle.
    pub fn printed_violates_unitarity(&self) -> bool {
        self.printed_max > 1.0 + 1e-9
    }
}

pub fn audit_printed_form(cycle: NkCycle, samples: usize) -> TypoAudit {
    let printed = printed_nk_amplitude(cycle);
    let reduced = reduced_nk_amplitude(cycle);
    let i = Complex64::new(0.0, 1.0);
    let max_on_circle = |amp: &RationalAmplitude| {
        (0..samples)
            .map(|j| {
                let kl = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / samples as f64;
                amp.eval_z(Complex64::from_polar(1.0, kl)).norm_sqr()
            })
            .fold(0.0, f64::max)
    };
    TypoAudit {
        cycle,
        printed_at_i: printed.eval_z(i).norm_sqr(),
        reduced_at_i: reduced.eval_z(i).norm_sqr(),
        printed_max: max_on_circle(&printed),
        reduced_max: max_on_circle(&reduced),
    }
}
