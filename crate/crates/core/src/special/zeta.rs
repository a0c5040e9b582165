//! Riemann and Hurwitz zeta functions and their `s`-derivatives by
//! Euler–Maclaurin summation:
//!
//! ```text
//! ζ(s, a) = Σ_{n<N} (n+a)^{-s} + x^{1-s}/(s-1) + x^{-s}/2
//!         + Σ_{k=1}^{M} B_{2k}/(2k)! · s(s+1)…(s+2k-2) · x^{-s-2k+1},   x = N + a
//! ```
//!
//! Derivatives differentiate every piece term by term.

use num_complex::Complex64;

use super::bernoulli::BernoulliTable;
use super::gamma::{digamma, log_gamma};
use super::params::EvalParams;
use super::phase::pow_neg;
use crate::error::{Error, Result};

type C = Complex64;

/// Pieces of one Euler–Maclaurin evaluation at a fixed shift `a`.
#[derive(Clone, Copy, Debug)]
struct EmParts {
    /// `Σ_{n<N} (n+a)^{-s}` and its derivative.
    sum: C,
    sum_d: C,
    /// Boundary half-term plus Bernoulli tail, and derivative.
    corr: C,
    corr_d: C,
    ln_x: f64,
    /// `x^{1-s}`.
    x_pow: C,
}

fn em_parts(s: C, a: f64, p: &EvalParams) -> EmParts {
    let n_terms = p.em_terms as usize;
    let mut sum = C::new(0.0, 0.0);
    let mut sum_d = C::new(0.0, 0.0);
    for n in 0..n_terms {
        let (term, l) = pow_neg(s, n as f64 + a);
        sum += term;
        sum_d -= term * l;
    }
    let x = n_terms as f64 + a;
    let (xs, ln_x) = pow_neg(s, x);

    let table = BernoulliTable::get();
    let mut corr = xs * 0.5;
    let mut corr_d = -xs * (0.5 * ln_x);
    // poch = s(s+1)…(s+2k-2), pw = x^{-s-2k+1}
    let mut poch = s;
    let mut poch_d = C::new(1.0, 0.0);
    let mut pw = xs / x;
    let inv_x2 = 1.0 / (x * x);
    for k in 1..=p.em_corrections as usize {
        let w = table.em_weight(k);
        corr += poch * pw * w;
        corr_d += (poch_d - poch * ln_x) * pw * w;
        let f1 = s + (2 * k - 1) as f64;
        let f2 = s + (2 * k) as f64;
        poch_d = poch_d * f1 * f2 + poch * (f1 + f2);
        poch = poch * f1 * f2;
        pw *= inv_x2;
    }
    EmParts {
        sum,
        sum_d,
        corr,
        corr_d,
        ln_x,
        x_pow: xs * x,
    }
}

fn check_shift(a: f64) -> Result<()> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::Domain(format!("Hurwitz shift a = {a} outside (0, 1]")));
    }
    Ok(())
}

fn check_pole(s: C) -> Result<()> {
    if s == C::new(1.0, 0.0) {
        return Err(Error::Pole(s));
    }
    Ok(())
}

/// Hurwitz zeta `ζ(s, a) = Σ_{n≥0} (n+a)^{-s}`, `a ∈ (0, 1]`.
pub fn hurwitz_zeta(s: C, a: f64, p: &EvalParams) -> Result<C> {
    check_shift(a)?;
    check_pole(s)?;
    p.validate(s)?;
    let e = em_parts(s, a, p);
    Ok(e.sum + e.corr + e.x_pow / (s - 1.0))
}

/// `∂ζ(s, a)/∂s`.
pub fn hurwitz_zeta_deriv(s: C, a: f64, p: &EvalParams) -> Result<C> {
    check_shift(a)?;
    check_pole(s)?;
    p.validate(s)?;
    let e = em_parts(s, a, p);
    let inv = (s - 1.0).inv();
    Ok(e.sum_d + e.corr_d - e.x_pow * inv * (e.ln_x + inv))
}

/// Left of this height, `Re s < 0` goes through the functional equation:
/// the direct sum there cancels down from `N^{1−σ}` to `|ζ|`, while the
/// reflection factor still has an accurate phase.
const REFLECT_MAX_T: f64 = 100.0;

fn reflects(s: C) -> bool {
    s.re < 0.0 && s.im.abs() <= REFLECT_MAX_T
}

/// `χ(s) = 2^s π^{s−1} sin(πs/2) Γ(1−s)` and `χ′(s)`.
fn reflection_factor(s: C) -> Result<(C, C)> {
    let pi = std::f64::consts::PI;
    let w = s * (pi / 2.0);
    let (sin, cos) = (w.sin(), w.cos());
    let u = 1.0 - s;
    let base = (s * std::f64::consts::LN_2 + (s - 1.0) * pi.ln() + log_gamma(u)?).exp();
    let dlog = std::f64::consts::LN_2 + pi.ln() - digamma(u)?;
    Ok((base * sin, base * (dlog * sin + cos * (pi / 2.0))))
}

pub fn riemann_zeta(s: C, p: &EvalParams) -> Result<C> {
    if reflects(s) {
        p.validate(s)?;
        let (chi, _) = reflection_factor(s)?;
        return Ok(chi * hurwitz_zeta(1.0 - s, 1.0, p)?);
    }
    hurwitz_zeta(s, 1.0, p)
}

pub fn riemann_zeta_deriv(s: C, p: &EvalParams) -> Result<C> {
    if reflects(s) {
        p.validate(s)?;
        let (chi, chi_d) = reflection_factor(s)?;
        let u = 1.0 - s;
        return Ok(chi_d * hurwitz_zeta(u, 1.0, p)? - chi * hurwitz_zeta_deriv(u, 1.0, p)?);
    }
    hurwitz_zeta_deriv(s, 1.0, p)
}

/// `(s-1)ζ(s)` and its derivative, free of the pole at `s = 1`.
pub(crate) fn zeta_regular(s: C, p: &EvalParams) -> Result<(C, C)> {
    p.validate(s)?;
    let e = em_parts(s, 1.0, p);
    let body = e.sum + e.corr;
    let value = (s - 1.0) * body + e.x_pow;
    let deriv = body + (s - 1.0) * (e.sum_d + e.corr_d) - e.x_pow * e.ln_x;
    Ok((value, deriv))
}

/// `(e^z - 1)/z` and its derivative.
fn phi(z: C) -> (C, C) {
    if z.norm() <= 1.0 {
        // Σ z^k/(k+1)!  and  Σ k z^{k-1}/(k+1)!
        let mut value = C::new(0.0, 0.0);
        let mut deriv = C::new(0.0, 0.0);
        let mut zk = C::new(1.0, 0.0); // z^k
        let mut zk1 = C::new(0.0, 0.0); // z^{k-1}
        let mut fact = 1.0; // (k+1)!
        for k in 0..28 {
            fact *= (k + 1) as f64;
            value += zk / fact;
            if k > 0 {
                deriv += zk1 * (k as f64 / fact);
            }
            zk1 = zk;
            zk *= z;
        }
        (value, deriv)
    } else {
        let ez = z.exp();
        let inv = z.inv();
        ((ez - 1.0) * inv, (z * ez - ez + 1.0) * inv * inv)
    }
}

/// `D(s) = ζ(s, 1/4) − ζ(s, 3/4)` and `D′(s)`, with the two poles at `s = 1`
/// cancelled analytically. `D(s) = 4^s L(s, χ₄)`.
pub(crate) fn chi4_difference(s: C, p: &EvalParams) -> Result<(C, C)> {
    p.validate(s)?;
    let lo = em_parts(s, 0.25, p);
    let hi = em_parts(s, 0.75, p);
    // (x1^{1-s} − x2^{1-s})/(s−1) = −x2^{u} c φ(uc), u = 1−s, c = ln(x1/x2)
    let x2 = f64::from(p.em_terms) + 0.75;
    let c = (-0.5 / x2).ln_1p();
    let u = 1.0 - s;
    let (ph, ph_d) = phi(u * c);
    let x2u = hi.x_pow;
    let integral = -x2u * c * ph;
    let integral_d = x2u * c * (ph * hi.ln_x + ph_d * c);
    let value = (lo.sum - hi.sum) + (lo.corr - hi.corr) + integral;
    let deriv = (lo.sum_d - hi.sum_d) + (lo.corr_d - hi.corr_d) + integral_d;
    Ok((value, deriv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn rel(a: C, b: C) -> f64 {
        (a - b).norm() / b.norm()
    }

    fn params(s: C) -> EvalParams {
        EvalParams::for_point(s)
    }

    const CATALAN: f64 = 0.915_965_594_177_219_0;

    #[test]
    fn basel_and_continuation() {
        let s = c(2.0, 0.0);
        assert!((riemann_zeta(s, &params(s)).unwrap() - PI * PI / 6.0).norm() < 1e-15);
        let s = c(0.0, 0.0);
        assert!((riemann_zeta(s, &params(s)).unwrap() - c(-0.5, 0.0)).norm() < 1e-15);
        // ζ(−1) = −1/12
        let s = c(-1.0, 0.0);
        assert!((riemann_zeta(s, &params(s)).unwrap() + 1.0 / 12.0).norm() < 1e-12 / 12.0);
    }

    #[test]
    fn left_half_plane() {
        // 30-digit oracle values
        let s = c(-1.0, 0.0);
        let d = riemann_zeta_deriv(s, &params(s)).unwrap();
        assert!((d.re + 0.165_421_143_700_450_93).abs() < 1e-15 && d.im == 0.0);
        let s = c(-2.0, 0.0);
        assert!(riemann_zeta(s, &params(s)).unwrap().norm() < 1e-16);
        let s = c(-0.5, 3.0);
        let want = c(0.352_913_879_819_287_25, 0.012_124_954_416_036_982);
        assert!(rel(riemann_zeta(s, &params(s)).unwrap(), want) < 1e-14);
        let s = c(-1.5, 99.5);
        let want = c(52.820_708_842_716_262, 279.955_011_801_856_75);
        let reflected = riemann_zeta(s, &params(s)).unwrap();
        assert!(rel(reflected, want) < 1e-12);
        // direct sum on the other side of the handover
        let direct = hurwitz_zeta(s, 1.0, &params(s)).unwrap();
        assert!(rel(direct, want) < 1e-12);
    }

    #[test]
    fn first_zero() {
        let s = c(0.5, 14.134_725_141_734_694);
        assert!(riemann_zeta(s, &params(s)).unwrap().norm() < 1e-10);
    }

    #[test]
    fn derivative_known_value() {
        let s = c(0.0, 0.0);
        let d = riemann_zeta_deriv(s, &params(s)).unwrap();
        assert!((d.re + 0.5 * (2.0 * PI).ln()).abs() < 1e-14 && d.im.abs() < 1e-15);
    }

    #[test]
    fn hurwitz_identities() {
        let s = c(3.0, 0.0);
        let p = params(s);
        assert!(rel(hurwitz_zeta(s, 1.0, &p).unwrap(), riemann_zeta(s, &p).unwrap()) < 1e-12);

        let s = c(2.0, 0.0);
        let p = params(s);
        let diff = hurwitz_zeta(s, 0.25, &p).unwrap() - hurwitz_zeta(s, 0.75, &p).unwrap();
        assert!((diff.re - 16.0 * CATALAN).abs() < 1e-10 * 16.0 * CATALAN);

        let s = c(2.5, 0.0);
        let p = params(s);
        let lhs = hurwitz_zeta(s, 0.5, &p).unwrap();
        let rhs = riemann_zeta(s, &p).unwrap() * (2f64.powf(2.5) - 1.0);
        assert!(rel(lhs, rhs) < 1e-12);
    }

    #[test]
    fn derivative_identity_at_unit_shift() {
        let s = c(2.0, 0.0);
        let p = params(s);
        let a = hurwitz_zeta_deriv(s, 1.0, &p).unwrap();
        let b = riemann_zeta_deriv(s, &p).unwrap();
        assert!(rel(a, b) < 1e-10);
    }

    #[test]
    fn errors() {
        let s = c(1.0, 0.0);
        let p = params(s);
        assert_eq!(riemann_zeta(s, &p), Err(Error::Pole(s)));
        assert_eq!(hurwitz_zeta_deriv(s, 0.5, &p), Err(Error::Pole(s)));
        let s = c(2.0, 0.0);
        assert!(matches!(hurwitz_zeta(s, 0.0, &params(s)), Err(Error::Domain(_))));
        assert!(matches!(hurwitz_zeta(s, 1.5, &params(s)), Err(Error::Domain(_))));
        let s = c(0.5, 5000.0);
        let short = EvalParams {
            em_terms: 100,
            ..params(s)
        };
        assert!(matches!(riemann_zeta(s, &short), Err(Error::Parameter(_))));
    }

    #[test]
    fn regular_forms_agree_away_from_pole() {
        let s = c(0.7, 3.0);
        let p = params(s);
        let (r, rd) = zeta_regular(s, &p).unwrap();
        let z = riemann_zeta(s, &p).unwrap();
        let zd = riemann_zeta_deriv(s, &p).unwrap();
        assert!(rel(r, (s - 1.0) * z) < 1e-13);
        assert!(rel(rd, z + (s - 1.0) * zd) < 1e-13);

        let (d, dd) = chi4_difference(s, &p).unwrap();
        let want = hurwitz_zeta(s, 0.25, &p).unwrap() - hurwitz_zeta(s, 0.75, &p).unwrap();
        let want_d =
            hurwitz_zeta_deriv(s, 0.25, &p).unwrap() - hurwitz_zeta_deriv(s, 0.75, &p).unwrap();
        assert!(rel(d, want) < 1e-12);
        assert!(rel(dd, want_d) < 1e-12);
    }

    #[test]
    fn pole_free_forms_at_one() {
        let s = c(1.0, 0.0);
        let p = params(s);
        let (r, rd) = zeta_regular(s, &p).unwrap();
        assert!((r - 1.0).norm() < 1e-15);
        // d/ds (s−1)ζ(s) at 1 is Euler's constant
        assert!((rd.re - 0.577_215_664_901_532_9).abs() < 1e-14);
        // D(1) = L(1, χ₄)·4 = π
        let (d, _) = chi4_difference(s, &p).unwrap();
        assert!((d - PI).norm() < 1e-14);
    }

    #[test]
    fn phi_series_matches_closed_form() {
        for &z in &[c(0.9, 0.3), c(-0.2, 0.97), c(0.6, 0.0)] {
            let (v, d) = phi(z);
            assert!(rel(v, (z.exp() - 1.0) / z) < 1e-14);
            let h = 1e-5;
            let fd = (phi(z + h).0 - phi(z - h).0) / (2.0 * h);
            assert!(rel(d, fd) < 1e-9);
        }
        let (v, d) = phi(c(1e-8, 0.0));
        assert!((v - (1.0 + 0.5e-8)).norm() < 1e-16);
        assert!((d - 0.5).norm() < 1e-8);
    }
}
