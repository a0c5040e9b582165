//! Complex numbers with a wide binary exponent.
//!
//! A [`ScaledComplex`] stores `(re + i·im) · 2^exp` with the larger mantissa
//! component normalized into `[1, 2)`. Values such as `ξ′(ρ)ξ(1+ρ)` near
//! `10⁻⁶⁹`, or `ξ(1/2 + it)` at heights where `e^{-πt/4}` leaves the binary64
//! range, keep full relative precision and a trustworthy sign.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul, Neg};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Additions ignore an operand this many binary orders below the other.
const SWALLOW_GAP: i64 = 60;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledComplex {
    re: f64,
    im: f64,
    exp: i32,
}

/// Splits a finite nonzero `x` into `(m, e)` with `|m| ∈ [1, 2)` and `x = m·2^e`.
fn frexp(x: f64) -> (f64, i32) {
    debug_assert!(x.is_finite() && x != 0.0);
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    if biased == 0 {
        // subnormal: lift into the normal range first
        let (m, e) = frexp(x * f64::from_bits(0x43f0_0000_0000_0000)); // 2^64
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & !(0x7ff << 52)) | (0x3ff << 52));
    (m, biased - 1023)
}

/// `x · 2^k`, splitting the scale so intermediate powers stay representable.
pub(crate) fn ldexp(mut x: f64, mut k: i64) -> f64 {
    while k > 1000 {
        x *= f64::from_bits(((1000 + 1023) as u64) << 52);
        k -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while k < -1000 {
        x *= f64::from_bits(((-1000 + 1023) as u64) << 52);
        k += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * f64::from_bits(((k + 1023) as u64) << 52)
}

impl ScaledComplex {
    pub const ZERO: Self = Self {
        re: 0.0,
        im: 0.0,
        exp: 0,
    };

    pub const ONE: Self = Self {
        re: 1.0,
        im: 0.0,
        exp: 0,
    };

    /// Builds the normalized value of `(re + i·im) · 2^exp`.
    pub fn from_parts(re: f64, im: f64, exp: i64) -> Result<Self> {
        if !(re.is_finite() && im.is_finite()) {
            return Err(Error::Domain(format!("non-finite mantissa ({re}, {im})")));
        }
        if re == 0.0 && im == 0.0 {
            return Ok(Self::ZERO);
        }
        let (_, e) = frexp(re.abs().max(im.abs()));
        let shift = -i64::from(e);
        let exp = exp + i64::from(e);
        let exp = i32::try_from(exp)
            .map_err(|_| Error::Range(format!("binary exponent {exp} out of range")))?;
        Ok(Self {
            re: ldexp(re, shift),
            im: ldexp(im, shift),
            exp,
        })
    }

    pub fn from_complex(re: f64, im: f64) -> Result<Self> {
        Self::from_parts(re, im, 0)
    }

    pub fn from_c64(z: Complex64) -> Result<Self> {
        Self::from_parts(z.re, z.im, 0)
    }

    /// `exp(z)` without forming `e^{Re z}` in binary64.
    pub fn from_log(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Domain(format!("non-finite logarithm {z}")));
        }
        let k = (z.re / std::f64::consts::LN_2).floor();
        if k.abs() > f64::from(i32::MAX) {
            return Err(Error::Range(format!("exp({z}) out of range")));
        }
        let frac = z.re - k * std::f64::consts::LN_2;
        let r = frac.exp();
        let (sin, cos) = z.im.sin_cos();
        Self::from_parts(r * cos, r * sin, k as i64)
    }

    pub fn mantissa(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn exponent(&self) -> i32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    pub fn conj(&self) -> Self {
        Self {
            im: -self.im,
            ..*self
        }
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.is_zero() || rhs.is_zero() {
            return Ok(Self::ZERO);
        }
        let m = self.mantissa() * rhs.mantissa();
        Self::from_parts(m.re, m.im, i64::from(self.exp) + i64::from(rhs.exp))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        if self.is_zero() {
            return Ok(Self::ZERO);
        }
        let m = self.mantissa() / rhs.mantissa();
        Self::from_parts(m.re, m.im, i64::from(self.exp) - i64::from(rhs.exp))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::ONE.checked_div(self)
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Ok(*self);
        }
        if self.is_zero() {
            return Ok(*rhs);
        }
        let (hi, lo) = if self.exp >= rhs.exp {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let gap = i64::from(hi.exp) - i64::from(lo.exp);
        if gap > SWALLOW_GAP {
            return Ok(*hi);
        }
        let re = hi.re + ldexp(lo.re, -gap);
        let im = hi.im + ldexp(lo.im, -gap);
        Self::from_parts(re, im, i64::from(hi.exp))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        self.checked_add(&-*rhs)
    }

    /// Multiplies by an ordinary binary64 complex number.
    pub fn mul_c64(&self, z: Complex64) -> Result<Self> {
        self.checked_mul(&Self::from_c64(z)?)
    }

    /// Sign of the real part.
    pub fn re_sign(&self) -> i8 {
        match self.re.partial_cmp(&0.0) {
            Some(Ordering::Greater) => 1,
            Some(Ordering::Less) => -1,
            _ => 0,
        }
    }

    pub fn log10_abs(&self) -> Result<f64> {
        if self.is_zero() {
            return Err(Error::Domain("log10 of zero".into()));
        }
        Ok(self.re.hypot(self.im).log10() + f64::from(self.exp) * std::f64::consts::LOG10_2)
    }

    /// `ln |value|`.
    pub fn ln_abs(&self) -> Result<f64> {
        if self.is_zero() {
            return Err(Error::Domain("log of zero".into()));
        }
        Ok(self.re.hypot(self.im).ln() + f64::from(self.exp) * std::f64::consts::LN_2)
    }

    /// The value as binary64 when it is representable without underflow or
    /// overflow.
    pub fn to_c64(&self) -> Option<Complex64> {
        if self.is_zero() {
            return Some(Complex64::new(0.0, 0.0));
        }
        if !(-1021..=1023).contains(&self.exp) {
            return None;
        }
        let k = i64::from(self.exp);
        Some(Complex64::new(ldexp(self.re, k), ldexp(self.im, k)))
    }

    /// Real part folded to binary64, saturating to `±MIN_POSITIVE` or `±MAX`
    /// when it leaves the range; the sign is always preserved.
    pub fn re_clamped(&self) -> f64 {
        if self.re == 0.0 {
            return 0.0;
        }
        let v = ldexp(self.re, i64::from(self.exp));
        if v.is_infinite() {
            f64::MAX.copysign(self.re)
        } else if v.abs() < f64::MIN_POSITIVE {
            f64::MIN_POSITIVE.copysign(self.re)
        } else {
            v
        }
    }

    pub fn re_decimal(&self) -> Option<Decimal> {
        Decimal::from_binary(self.re, self.exp)
    }

    pub fn im_decimal(&self) -> Option<Decimal> {
        Decimal::from_binary(self.im, self.exp)
    }
}

impl Mul for ScaledComplex {
    type Output = ScaledComplex;

    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("ScaledComplex exponent overflow")
    }
}

impl Div for ScaledComplex {
    type Output = ScaledComplex;

    fn div(self, rhs: Self) -> Self {
        self.checked_div(&rhs).expect("ScaledComplex division failed")
    }
}

impl Neg for ScaledComplex {
    type Output = ScaledComplex;

    fn neg(self) -> Self {
        Self {
            re: -self.re,
            im: -self.im,
            exp: self.exp,
        }
    }
}

/// A real number as `mantissa · 10^exp10` with `|mantissa| ∈ [1, 10)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decimal {
    pub mantissa: f64,
    pub exp10: i64,
}

impl Decimal {
    /// Decimal form of `m · 2^exp`; `None` for zero.
    pub fn from_binary(m: f64, exp: i32) -> Option<Self> {
        if m == 0.0 {
            return None;
        }
        if (-1000..=1000).contains(&exp) {
            let x = ldexp(m, i64::from(exp));
            if x.is_normal() {
                return Some(Self::from_f64(x));
            }
        }
        let l = m.abs().log10() + f64::from(exp) * std::f64::consts::LOG10_2;
        let exp10 = l.floor();
        let mut mantissa = 10f64.powf(l - exp10);
        let mut exp10 = exp10 as i64;
        if mantissa >= 10.0 {
            mantissa /= 10.0;
            exp10 += 1;
        }
        Some(Self {
            mantissa: mantissa.copysign(m),
            exp10,
        })
    }

    /// Exact decimal split of a normal binary64 value via its shortest
    /// round-trip representation.
    pub fn from_f64(x: f64) -> Self {
        let s = format!("{x:e}");
        let (m, e) = s.split_once('e').expect("exponent in {:e} output");
        Self {
            mantissa: m.parse().expect("mantissa"),
            exp10: e.parse().expect("exponent"),
        }
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = f.precision().unwrap_or(15);
        write!(f, "{:.*}e{}", prec, self.mantissa, self.exp10)
    }
}

impl fmt::Display for ScaledComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = f.precision().unwrap_or(15);
        let part = |d: Option<Decimal>| match d {
            Some(d) => format!("{d:.prec$}"),
            None => "0".to_string(),
        };
        let im = self.im_decimal();
        let sign = if im.is_some_and(|d| d.mantissa < 0.0) {
            "-"
        } else {
            "+"
        };
        let im_abs = im.map(|d| Decimal {
            mantissa: d.mantissa.abs(),
            ..d
        });
        write!(f, "{} {} {}i", part(self.re_decimal()), sign, part(im_abs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sc(re: f64, im: f64, exp: i64) -> ScaledComplex {
        ScaledComplex::from_parts(re, im, exp).unwrap()
    }

    fn rel_err(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn from_complex_normalizes() {
        let one = ScaledComplex::from_complex(1.0, 0.0).unwrap();
        assert_eq!((one.mantissa(), one.exponent()), (Complex64::new(1.0, 0.0), 0));
        assert_eq!(ScaledComplex::from_complex(0.0, 0.0).unwrap(), ScaledComplex::ZERO);
        // the larger component lands in [1, 2)
        let z = ScaledComplex::from_complex(3.0, -4.0).unwrap();
        assert_eq!(z.mantissa(), Complex64::new(0.75, -1.0));
        assert_eq!(z.exponent(), 2);
        assert!(ScaledComplex::from_complex(f64::NAN, 0.0).is_err());
        assert!(ScaledComplex::from_complex(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn subnormal_inputs() {
        let tiny = f64::from_bits(1); // 2^-1074
        let z = ScaledComplex::from_complex(tiny, 0.0).unwrap();
        assert_eq!(z.mantissa().re, 1.0);
        assert_eq!(z.exponent(), -1074);
    }

    #[test]
    fn mul_examples() {
        let a = sc(1.0, 0.0, 0);
        let b = sc(1.0, 0.0, 10);
        assert_eq!(a * b, sc(1.0, 0.0, 10));
        let p = sc(1.0, 1.0, -200) * sc(1.0, -1.0, -200);
        assert_eq!(p.mantissa(), Complex64::new(1.0, 0.0));
        assert_eq!(p.exponent(), -399);
    }

    #[test]
    fn mul_exponent_overflow_is_range_error() {
        let big = sc(1.0, 0.0, i64::from(i32::MAX) - 1);
        assert!(matches!(big.checked_mul(&big), Err(Error::Range(_))));
    }

    #[test]
    fn add_examples() {
        let x = sc(1.25, -0.5, 7);
        assert_eq!(x.checked_add(&ScaledComplex::ZERO).unwrap(), x);
        let one = sc(1.0, 0.0, 0);
        assert_eq!(one.checked_add(&one).unwrap(), sc(1.0, 0.0, 1));
        assert_eq!(one.checked_add(&sc(1.0, 0.0, -100)).unwrap(), one);
        assert_eq!(sc(1.0, 0.0, -100).checked_add(&one).unwrap(), one);
    }

    #[test]
    fn re_sign_examples() {
        assert_eq!(sc(1.0, 5.0, -300).re_sign(), 1);
        assert_eq!(sc(0.0, 1.0, 0).re_sign(), 0);
        assert_eq!(sc(-1.0, 1.0, 0).re_sign(), -1);
    }

    #[test]
    fn log10_examples() {
        assert_eq!(sc(1.0, 0.0, 0).log10_abs().unwrap(), 0.0);
        let v = sc(1.0, 0.0, 10).log10_abs().unwrap();
        assert!((v - 10.0 * 2f64.log10()).abs() < 1e-12);
        assert!(ScaledComplex::ZERO.log10_abs().is_err());
        // magnitude of the kernel product at the 34th zeta zero
        let k = ScaledComplex::from_complex(-5.389100507182945e-69, 0.0).unwrap();
        assert!((k.log10_abs().unwrap() - (-68.268_483_5)).abs() < 1e-6);
    }

    #[test]
    fn from_log_matches_exp() {
        let z = Complex64::new(-3.7, 2.1);
        let v = ScaledComplex::from_log(z).unwrap().to_c64().unwrap();
        assert!(rel_err(v, z.exp()) < 1e-15);
        let deep = ScaledComplex::from_log(Complex64::new(-6844.0, 0.0)).unwrap();
        assert!((deep.ln_abs().unwrap() + 6844.0).abs() < 1e-12);
        assert!(deep.to_c64().is_none());
        assert!(deep.re_clamped() > 0.0);
    }

    #[test]
    fn decimal_forms() {
        let d = Decimal::from_f64(-5.389100507182945e-69);
        assert_eq!(d.mantissa, -5.389100507182945);
        assert_eq!(d.exp10, -69);
        // 2^-10000 = 5.0124...e-3011
        let d = Decimal::from_binary(1.0, -10000).unwrap();
        assert_eq!(d.exp10, -3011);
        assert!((d.mantissa - 5.012_372_749_206_452).abs() < 1e-9);
        assert!(Decimal::from_binary(0.0, 5).is_none());
    }

    #[test]
    fn display_is_scientific() {
        let z = ScaledComplex::from_complex(-5.389100507182945e-69, 2.5e-70).unwrap();
        assert_eq!(format!("{z:.6}"), "-5.389101e-69 + 2.500000e-70i");
    }

    fn operand() -> impl Strategy<Value = ScaledComplex> {
        (1.0f64..2.0, -2.0f64..2.0, any::<bool>(), -500i64..500).prop_map(|(a, b, swap, e)| {
            let (re, im) = if swap { (b, a) } else { (a, b) };
            sc(re, im, e)
        })
    }

    fn as_c64(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    proptest! {
        #[test]
        fn mul_commutes_and_associates(a in operand(), b in operand(), c in operand()) {
            let ab = a * b;
            let ba = b * a;
            prop_assert_eq!(ab.exponent(), ba.exponent());
            prop_assert!(rel_err(ab.mantissa(), ba.mantissa()) < 2f64.powi(-46));
            let l = (a * b) * c;
            let r = a * (b * c);
            let shift = i64::from(l.exponent()) - i64::from(r.exponent());
            let rm = r.mantissa() * ldexp(1.0, -shift);
            prop_assert!(rel_err(l.mantissa(), rm) < 2f64.powi(-46));
        }

        #[test]
        fn matches_binary64(x in -1e100f64..1e100, y in -1e100f64..1e100,
                            u in -1e100f64..1e100, v in -1e100f64..1e100) {
            prop_assume!(as_c64(x, y).norm() > 1e-100 && as_c64(u, v).norm() > 1e-100);
            let a = ScaledComplex::from_complex(x, y).unwrap();
            let b = ScaledComplex::from_complex(u, v).unwrap();
            let prod = (a * b).to_c64().unwrap();
            prop_assert!(rel_err(prod, as_c64(x, y) * as_c64(u, v)) < 2f64.powi(-48));
            let exact = as_c64(x, y) + as_c64(u, v);
            prop_assume!(exact.norm() > 1e-6 * as_c64(x, y).norm().max(as_c64(u, v).norm()));
            let sum = a.checked_add(&b).unwrap().to_c64().unwrap();
            let tol = 2f64.powi(-48) * as_c64(x, y).norm().max(as_c64(u, v).norm());
            prop_assert!((sum - exact).norm() <= tol);
        }

        #[test]
        fn norm_square_is_positive(a in operand()) {
            prop_assert_eq!((a * a.conj()).re_sign(), 1);
        }

        #[test]
        fn normalize_idempotent_and_round_trips(a in operand()) {
            let again = ScaledComplex::from_parts(a.mantissa().re, a.mantissa().im,
                                                  i64::from(a.exponent())).unwrap();
            prop_assert_eq!(again, a);
            let m = a.mantissa();
            prop_assert!((1.0..2.0).contains(&m.re.abs().max(m.im.abs())));
            // denormalize to binary64 then renormalize
            let shifted = sc(m.re * 8.0, m.im * 8.0, i64::from(a.exponent()) - 3);
            prop_assert!(rel_err(shifted.mantissa(), m) <= 2f64.powi(-50));
            prop_assert_eq!(shifted.exponent(), a.exponent());
        }
    }
}
