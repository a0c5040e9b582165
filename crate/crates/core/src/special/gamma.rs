//! Complex log-Gamma and digamma on the cut plane.
//!
//! Both use their asymptotic series once `|z| ≥ 15` with `Re z ≥ 0`, and
//! the upward recurrence `Γ(z+1) = zΓ(z)` to get there. Summing principal
//! logarithms along the recurrence yields the principal branch of `log Γ`,
//! continuous away from the negative real axis.

use num_complex::Complex64;

use super::bernoulli::BernoulliTable;
use crate::error::{Error, Result};

const ASYMPTOTIC_RADIUS: f64 = 15.0;
const SERIES_TERMS: usize = 16;
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

fn check_pole(z: Complex64) -> Result<()> {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::Pole(z));
    }
    Ok(())
}

/// Number of unit shifts needed before the asymptotic series is accurate.
fn shifts_needed(z: Complex64) -> usize {
    let mut n = 0usize;
    if z.re < 0.0 {
        n = (-z.re).ceil() as usize;
    }
    let re = z.re + n as f64;
    let deficit = ASYMPTOTIC_RADIUS * ASYMPTOTIC_RADIUS - z.im * z.im;
    if deficit > 0.0 {
        let need = deficit.sqrt() - re;
        if need > 0.0 {
            n += need.ceil() as usize;
        }
    }
    n
}

/// Principal branch of `log Γ(z)`.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    let n = shifts_needed(z);
    let mut shift = Complex64::new(0.0, 0.0);
    for k in 0..n {
        shift += (z + k as f64).ln();
    }
    let w = z + n as f64;
    let table = BernoulliTable::get();
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut term = inv;
    let mut series = Complex64::new(0.0, 0.0);
    for k in 1..=SERIES_TERMS {
        series += term * table.stirling_weight(k);
        term *= inv2;
    }
    Ok((w - 0.5) * w.ln() - w + HALF_LN_TWO_PI + series - shift)
}

/// `ψ(z) = Γ′(z)/Γ(z)`.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    let n = shifts_needed(z);
    let mut shift = Complex64::new(0.0, 0.0);
    for k in 0..n {
        shift += (z + k as f64).inv();
    }
    let w = z + n as f64;
    let table = BernoulliTable::get();
    let inv2 = (w * w).inv();
    let mut term = inv2;
    let mut series = Complex64::new(0.0, 0.0);
    for k in 1..=SERIES_TERMS {
        series += term * (table.b2k(k) / (2 * k) as f64);
        term *= inv2;
    }
    Ok(w.ln() - 0.5 * w.inv() - series - shift)
}
