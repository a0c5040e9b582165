//! `x^{-s}` with the phase `t·ln x` carried in double-double precision.
//!
//! At `t ≈ 10⁴` one ulp of `ln x` moves the phase of `x^{-s}` by about
//! `10⁻¹¹`; the Euler–Maclaurin sums add thousands of such terms.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;

const LN2_LO: f64 = 2.319_046_813_846_299_6e-17;
const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;
const SERIES_TERMS: usize = 23;

#[derive(Clone, Copy, Debug, PartialEq)]
struct Dd(f64, f64);

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd(s, (a - (s - bb)) + (b - bb))
}

fn fast_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd(s, b - (s - a))
}

impl Dd {
    fn add(self, o: Dd) -> Dd {
        let Dd(s, e) = two_sum(self.0, o.0);
        fast_two_sum(s, e + self.1 + o.1)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.0 * o.0;
        let e = self.0.mul_add(o.0, -p);
        fast_two_sum(p, e + self.0 * o.1 + self.1 * o.0)
    }

    fn mul_f64(self, b: f64) -> Dd {
        let p = self.0 * b;
        let e = self.0.mul_add(b, -p);
        fast_two_sum(p, e + self.1 * b)
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.0 / o.0;
        let r = self.add(o.mul_f64(-q1));
        let q2 = r.0 / o.0;
        let r = r.add(o.mul_f64(-q2));
        let q3 = r.0 / o.0;
        fast_two_sum(q1, q2).add(Dd(q3, 0.0))
    }
}

/// `1/(2j+1)` for the atanh series.
fn odd_reciprocals() -> &'static [Dd; SERIES_TERMS] {
    static TABLE: OnceLock<[Dd; SERIES_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        std::array::from_fn(|j| Dd(1.0, 0.0).div(Dd((2 * j + 1) as f64, 0.0)))
    })
}

/// `ln x` as an unevaluated sum `hi + lo`, for finite `x > 0`.
pub(crate) fn ln_dd(x: f64) -> (f64, f64) {
    debug_assert!(x > 0.0 && x.is_finite());
    let bits_exp = ((x.to_bits() >> 52) & 0x7ff) as i64;
    // subnormals never reach here: x ≥ 1/4 in every caller
    let mut k = bits_exp - 1022;
    let mut m = f64::from_bits((x.to_bits() & !(0x7ff << 52)) | (1022 << 52));
    if m < FRAC_1_SQRT_2 {
        m *= 2.0;
        k -= 1;
    }
    // ln m = 2 atanh(u), u = (m − 1)/(m + 1), |u| < 0.172
    let u = Dd(m - 1.0, 0.0).div(two_sum(m, 1.0));
    let u2 = u.mul(u);
    let table = odd_reciprocals();
    let mut acc = table[SERIES_TERMS - 1];
    for j in (0..SERIES_TERMS - 1).rev() {
        acc = acc.mul(u2).add(table[j]);
    }
    let ln_m = acc.mul(u).mul_f64(2.0);
    let kf = k as f64;
    let ln2k = Dd(std::f64::consts::LN_2, LN2_LO).mul_f64(kf);
    let r = ln2k.add(ln_m);
    (r.0, r.1)
}

/// `(x^{-s}, ln x)` with the oscillating phase reduced modulo `2π` before
/// rounding.
pub(crate) fn pow_neg(s: Complex64, x: f64) -> (Complex64, f64) {
    let (hi, lo) = ln_dd(x);
    let modulus = (-s.re * hi).exp();
    // −t·ln x, reduced
    let p = -s.im * hi;
    let e = (-s.im).mul_add(hi, -p) - s.im * lo;
    let k = (p / TAU).round();
    let r = (-k).mul_add(TAU, p) + (e - k * TAU_LO);
    let (sin, cos) = r.sin_cos();
    (Complex64::new(modulus * cos, modulus * sin), hi)
}
