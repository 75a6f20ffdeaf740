//! Quantum-walk statistics from the transmission generating function.
//!
//! With `T(z) = Σ c_m z^m`, the probability of reaching the exit lead in
//! exactly `m` steps is `P(m) = |c_m|²`, the exit probability is
//! `P_out = Σ P(m)` and the conditional hitting time is
//! `h = Σ m P(m) / P_out`. Coefficients come either from the rational
//! amplitude by linear recurrence or from iterating the bond map directly.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::closed_forms::RationalAmplitude;
use crate::error::{Error, Result};
use crate::graph::QuantumGraph;
use crate::solver::assemble_bond_system;

/// Default tolerance on the hitting time.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Truncated coefficients `c_0..=c_M` with estimates of the neglected mass.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkSeries {
    coefficients: Vec<Complex64>,
    /// Estimated per-step contraction of `|c_m|`.
    decay: f64,
    tail: f64,
    moment_tail: f64,
}

impl WalkSeries {
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Truncation order `M`.
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    /// Estimate of `Σ_{m>M} |c_m|²`.
    pub fn tail_bound(&self) -> f64 {
        self.tail
    }

    /// Estimate of `Σ_{m>M} m |c_m|²`.
    pub fn moment_tail_bound(&self) -> f64 {
        self.moment_tail
    }

    /// Partial sum `Σ_{m≤M} c_m z^m`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Largest coefficient difference after aligning the global sign on the
    /// first coefficient of appreciable size.
    pub fn max_difference_up_to_sign(&self, other: &WalkSeries) -> f64 {
        let pivot = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .find(|(a, b)| a.norm() > 1e-6 && b.norm() > 1e-6);
        let sign = match pivot {
            Some((a, b)) if (a + b).norm() < (a - b).norm() => -1.0,
            _ => 1.0,
        };
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| (a - b * sign).norm())
            .fold(0.0, f64::max)
    }

    /// Error estimate of the hitting time computed from this truncation.
    pub fn hitting_time_error(&self) -> f64 {
        let (p_out, moment) = self.sums();
        if p_out <= 0.0 {
            return f64::INFINITY;
        }
        self.moment_tail / p_out + (moment / p_out) * self.tail / p_out
    }

    fn sums(&self) -> (f64, f64) {
        self.coefficients
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(p, m), (k, c)| {
                let pk = c.norm_sqr();
                (p + pk, m + k as f64 * pk)
            })
    }
}

/// `Σ_{m>M} x^m` and `Σ_{m>M} m x^m`.
fn geometric_tails(x: f64, order: usize) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0);
    }
    if x >= 1.0 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let m = order as f64;
    let lead = x.powf(m + 1.0);
    (
        lead / (1.0 - x),
        lead * ((m + 1.0) - m * x) / ((1.0 - x) * (1.0 - x)),
    )
}

fn recurrence(amp: &RationalAmplitude, count: usize) -> Vec<Complex64> {
    let num = amp.numerator();
    let den = amp.denominator().coeffs();
    let d0 = den[0];
    let mut c = Vec::with_capacity(count);
    for m in 0..count {
        let mut s = num.coeff(m);
        for j in 1..den.len().min(m + 1) {
            s -= den[j] * c[m - j];
        }
        c.push(s / d0);
    }
    c
}

/// Taylor coefficients of `amp` about `z = 0` up to `max_order`.
///
/// The tail estimate takes its rate from the smallest denominator root
/// outside the unit circle; roots on or inside it are common factors with
/// the numerator (bound states), since an open graph is analytic in `|z| < 1`.
pub fn taylor_coefficients(amp: &RationalAmplitude, max_order: usize) -> Result<WalkSeries> {
    let den = amp.denominator();
    if den.is_zero() || den.coeff(0).norm() <= 1e-14 * den.l1_norm() {
        return Err(Error::ZeroConstantTerm);
    }
    let coefficients = recurrence(amp, max_order + 1);

    if den.degree() == 0 {
        // polynomial amplitude: the tail is known exactly
        let extra = recurrence(amp, amp.numerator().degree().max(max_order) + 1);
        let (tail, moment_tail) = extra
            .iter()
            .enumerate()
            .skip(max_order + 1)
            .fold((0.0, 0.0), |(t, m), (k, c)| {
                (t + c.norm_sqr(), m + k as f64 * c.norm_sqr())
            });
        return Ok(WalkSeries {
            coefficients,
            decay: 0.0,
            tail,
            moment_tail,
        });
    }

    let radius = den
        .roots()
        .into_iter()
        .map(|r| r.norm())
        .filter(|&r| r > 1.0 + 1e-6)
        .fold(f64::INFINITY, f64::min);
    let decay = if radius.is_finite() { 1.0 / radius } else { 0.0 };

    // Amplitude of the geometric envelope, fitted over a window that does
    // not depend on the requested order so the bound is monotone in it.
    let window = 256.max(16 * den.degree()).max(amp.numerator().degree() + 1);
    let scale = if decay > 0.0 {
        recurrence(amp, window)
            .iter()
            .enumerate()
            .map(|(m, c)| c.norm() * radius.powi(m as i32))
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    let (t, mt) = geometric_tails(decay * decay, max_order);
    Ok(WalkSeries {
        coefficients,
        decay,
        tail: scale * scale * t,
        moment_tail: scale * scale * mt,
    })
}

/// Step-resolved amplitudes from iterating the bond map.
#[derive(Clone, Debug)]
pub struct PathSums {
    pub transmission: WalkSeries,
    pub reflection: WalkSeries,
    /// Probability still inside the graph after each step.
    pub remaining: Vec<f64>,
}

/// Propagates the injected wave bond by bond: amplitudes launched on a bond
/// of length `L` arrive `L` steps later, scatter at the vertex, and either
/// leave through a lead (recorded at that step) or are relaunched.
pub fn power_iteration(graph: &QuantumGraph, max_order: usize) -> Result<PathSums> {
    let system = assemble_bond_system(graph)?;
    let steps: Vec<usize> = graph
        .integral_lengths()?
        .into_iter()
        .flat_map(|l| [l, l])
        .collect();
    let bonds = system.bond_count();
    let horizon = steps.iter().copied().max().unwrap_or(0) + 1;
    let mut in_flight = vec![vec![ZERO; bonds]; horizon];

    let mut t = vec![system.direct_transmit()];
    let mut r = vec![system.direct_reflect()];
    let mut remaining: Vec<f64> = Vec::with_capacity(max_order + 1);
    let launch = |in_flight: &mut [Vec<Complex64>], now: usize, amps: &[Complex64]| {
        for (b, &a) in amps.iter().enumerate() {
            if a != ZERO {
                in_flight[(now + steps[b]) % horizon][b] += a;
            }
        }
    };
    let injection: Vec<Complex64> = system.injection().iter().copied().collect();
    launch(&mut in_flight, 0, &injection);
    remaining.push(injection.iter().map(|a| a.norm_sqr()).sum());

    let coupling = system.coupling();
    let mut departing = vec![ZERO; bonds];
    for m in 1..=max_order {
        let arriving = std::mem::replace(&mut in_flight[m % horizon], vec![ZERO; bonds]);
        let (mut tm, mut rm) = (ZERO, ZERO);
        for ((a, ct), cr) in arriving.iter().zip(system.transmit_row().iter()).zip(system.reflect_row().iter()) {
            tm += ct * a;
            rm += cr * a;
        }
        t.push(tm);
        r.push(rm);
        for (i, d) in departing.iter_mut().enumerate() {
            *d = (0..bonds).map(|j| coupling[(i, j)] * arriving[j]).sum();
        }
        launch(&mut in_flight, m, &departing);
        remaining.push(
            in_flight
                .iter()
                .flat_map(|slot| slot.iter())
                .map(|a| a.norm_sqr())
                .sum(),
        );
    }

    // Remaining probability bounds everything still to come out of either
    // lead; its recent decay rate extrapolates the first moment.
    let rest = remaining[max_order];
    let window = (max_order / 4).max(1).min(max_order);
    let earlier = remaining[max_order - window];
    let rate = if window > 0 && earlier > 0.0 && rest > 0.0 {
        (rest / earlier).powf(1.0 / window as f64)
    } else {
        0.0
    };
    let moment_tail = if rest == 0.0 {
        0.0
    } else if rate < 1.0 {
        rest * ((max_order as f64 + 1.0) + rate / (1.0 - rate))
    } else {
        f64::INFINITY
    };
    let series = |coefficients: Vec<Complex64>| WalkSeries {
        coefficients,
        decay: rate.sqrt(),
        tail: rest,
        moment_tail,
    };
    Ok(PathSums {
        transmission: series(t),
        reflection: series(r),
        remaining,
    })
}

pub fn coefficients_via_power_iteration(graph: &QuantumGraph, max_order: usize) -> Result<WalkSeries> {
    Ok(power_iteration(graph, max_order)?.transmission)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkStats {
    /// `P(m)` for `m = 0..=M`; empty when computed by quadrature.
    pub p_of_m: Vec<f64>,
    pub p_out: f64,
    pub hitting_time: f64,
}

pub fn walk_stats(series: &WalkSeries, tolerance: f64) -> Result<WalkStats> {
    let (p_out, moment) = series.sums();
    if p_out <= 0.0 {
        return Err(Error::NoTransmission);
    }
    let estimate = series.hitting_time_error().max(series.tail_bound());
    if estimate.is_nan() || estimate > tolerance {
        return Err(Error::InsufficientOrder {
            order: series.order(),
            estimate,
            tolerance,
        });
    }
    Ok(WalkStats {
        p_of_m: series.coefficients.iter().map(|c| c.norm_sqr()).collect(),
        p_out,
        hitting_time: moment / p_out,
    })
}

/// Doubles the truncation order until the tail estimate is below a tenth of
/// `tolerance`, then evaluates [`walk_stats`].
pub fn hitting_time_series(amp: &RationalAmplitude, tolerance: f64) -> Result<(WalkSeries, WalkStats)> {
    let mut order = 64;
    loop {
        let series = taylor_coefficients(amp, order)?;
        let estimate = series.hitting_time_error().max(series.tail_bound());
        if estimate < tolerance / 10.0 {
            let stats = walk_stats(&series, tolerance)?;
            return Ok((series, stats));
        }
        if order >= 1 << 22 {
            return Err(Error::InsufficientOrder {
                order,
                estimate,
                tolerance,
            });
        }
        order *= 2;
    }
}

/// `P_out` and `h` from Parseval's identity on the unit circle,
///
/// ```text
/// Σ |c_m|²   = (1/2π) ∮ |T|² dθ
/// Σ m |c_m|² = (1/2π) ∮ Re[conj(T) z T'] dθ
/// ```
///
/// using the periodic trapezoid rule on a half-shifted grid, doubled until
/// both sums settle to machine precision.
pub fn walk_stats_by_quadrature(amp: &RationalAmplitude) -> Result<WalkStats> {
    let num = amp.numerator();
    for root in amp.denominator().roots() {
        if (root.norm() - 1.0).abs() < 1e-9 {
            let scale: f64 = num.coeffs().iter().map(|c| c.norm()).sum();
            if num.eval(root).norm() > 1e-8 * scale {
                return Err(Error::Pole { kl: root.arg() });
            }
        }
    }

    let integrate = |n: usize| {
        let (mut p, mut m) = (0.0, 0.0);
        for j in 0..n {
            let z = Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / n as f64);
            let t = amp.eval_z(z);
            p += t.norm_sqr();
            m += (t.conj() * z * amp.derivative_z(z)).re;
        }
        (p / n as f64, m / n as f64)
    };

    let mut n = 256;
    let mut prev = integrate(n);
    let mut change = f64::INFINITY;
    while n < 1 << 22 {
        n *= 2;
        let next = integrate(n);
        change = (next.0 - prev.0).abs().max((next.1 - prev.1).abs());
        prev = next;
        if change <= 1e-14 * (1.0 + prev.1.abs()) {
            let (p_out, moment) = prev;
            if p_out <= 0.0 {
                return Err(Error::NoTransmission);
            }
            return Ok(WalkStats {
                p_of_m: Vec::new(),
                p_out,
                hitting_time: moment / p_out,
            });
        }
    }
    Err(Error::QuadratureDiverged { change })
}
