//! Evaluation through removable singularities by symmetric offsets and
//! Richardson extrapolation.

use num_complex::Complex64;

use crate::error::Result;

/// Offset used on each side of a singular wavenumber.
pub const LIMIT_OFFSET: f64 = 1e-9;

/// Estimates `lim f(x)` as `x -> kl` from the symmetric means
/// `g(h) = (f(kl+h) + f(kl-h)) / 2` at `h` and `2h`, eliminating the
/// `h^2` term: `(4 g(h) - g(2h)) / 3`.
pub fn richardson_limit<const N: usize, F>(kl: f64, offset: f64, f: F) -> Result<[Complex64; N]>
where
    F: Fn(f64) -> Result<[Complex64; N]>,
{
    let mean = |h: f64| -> Result<[Complex64; N]> {
        let (a, b) = (f(kl + h)?, f(kl - h)?);
        Ok(std::array::from_fn(|i| (a[i] + b[i]) * 0.5))
    };
    let (g1, g2) = (mean(offset)?, mean(2.0 * offset)?);
    Ok(std::array::from_fn(|i| (g1[i] * 4.0 - g2[i]) / 3.0))
}
