use dbz_core::completed::{debranges_e, epsilon_chi4, xi, xi4, xi4_deriv, xi_deriv};
use dbz_core::special::{
    digamma, hurwitz_zeta, hurwitz_zeta_deriv, log_gamma, riemann_zeta, riemann_zeta_deriv, EvalParams,
};
use dbz_core::{CompletedFunction, LFunctionKind, Positivity, ScaledComplex, ZeroFinder};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn f64c(z: ScaledComplex) -> Complex64 {
    z.to_c64().expect("value within binary64 range")
}

/// |a − b| / |b| in extended range.
fn scaled_rel(a: ScaledComplex, b: ScaledComplex) -> f64 {
    let diff = a.checked_sub(&b).unwrap();
    if diff.is_zero() {
        return 0.0;
    }
    (diff.ln_abs().unwrap() - b.ln_abs().unwrap()).exp()
}

fn p(s: Complex64) -> EvalParams {
    EvalParams::for_point(s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn xi_functional_equation(re in -2.0f64..3.0, im in 0.0f64..50.0) {
        let s = c(re, im);
        let d = scaled_rel(xi(1.0 - s).unwrap(), xi(s).unwrap());
        prop_assert!(d < 1e-9, "s = {s}: {d:e}");
    }

    #[test]
    fn xi4_functional_equation(re in -2.0f64..3.0, im in 0.0f64..50.0) {
        let s = c(re, im);
        let eps = epsilon_chi4().unwrap();
        let rhs = xi4(s).unwrap().mul_c64(eps).unwrap();
        let d = scaled_rel(xi4(1.0 - s).unwrap(), rhs);
        prop_assert!(d < 1e-8, "s = {s}: {d:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn conjugation_symmetry(re in -1.0f64..3.0, im in 0.5f64..60.0) {
        let s = c(re, im);
        let z = riemann_zeta(s, &p(s)).unwrap();
        prop_assert!(rel(riemann_zeta(s.conj(), &p(s)).unwrap(), z.conj()) < 1e-12);
        let h = hurwitz_zeta(s, 0.25, &p(s)).unwrap();
        prop_assert!(rel(hurwitz_zeta(s.conj(), 0.25, &p(s)).unwrap(), h.conj()) < 1e-12);
        let lg = log_gamma(s).unwrap();
        prop_assert!(rel(log_gamma(s.conj()).unwrap(), lg.conj()) < 1e-12);
        let dg = digamma(s).unwrap();
        prop_assert!(rel(digamma(s.conj()).unwrap(), dg.conj()) < 1e-12);
        for kind in LFunctionKind::ALL {
            let f = CompletedFunction::new(kind);
            let d = scaled_rel(f.value(s.conj()).unwrap(), f.value(s).unwrap().conj());
            prop_assert!(d < 1e-12, "{kind} at {s}: {d:e}");
        }
    }

    #[test]
    fn derivatives_match_central_differences(re in -1.0f64..3.0, im in 1.0f64..30.0) {
        let s = c(re, im);
        let h = 1e-5;
        let fd = |f: &dyn Fn(Complex64) -> Complex64| (f(s + h) - f(s - h)) / (2.0 * h);
        let zeta = |z: Complex64| riemann_zeta(z, &p(s)).unwrap();
        prop_assert!(rel(fd(&zeta), riemann_zeta_deriv(s, &p(s)).unwrap()) < 1e-8);
        let hz = |z: Complex64| hurwitz_zeta(z, 0.75, &p(s)).unwrap();
        prop_assert!(rel(fd(&hz), hurwitz_zeta_deriv(s, 0.75, &p(s)).unwrap()) < 1e-8);
        let lg = |z: Complex64| log_gamma(z).unwrap();
        prop_assert!(rel(fd(&lg), digamma(s).unwrap()) < 1e-8);
        // completed functions: 1e-7, as in the acceptance property suite
        let x = |z: Complex64| f64c(xi(z).unwrap());
        prop_assert!(rel(fd(&x), f64c(xi_deriv(s).unwrap())) < 1e-7);
        let x4 = |z: Complex64| f64c(xi4(z).unwrap());
        prop_assert!(rel(fd(&x4), f64c(xi4_deriv(s).unwrap())) < 1e-7);
    }
}

#[test]
fn euler_maclaurin_converges_on_doubling() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut points: Vec<Complex64> = (0..40)
        .map(|_| c(rng.gen_range(-1.0..3.0), rng.gen_range(0.0..1e4)))
        .collect();
    points.extend([c(0.5, 8714.2), c(2.0, 1e4), c(-1.0, 0.0), c(3.0, 0.0)]);
    for s in points {
        let base = p(s);
        let doubled = EvalParams {
            em_terms: 2 * base.em_terms,
            ..base
        };
        let a = riemann_zeta(s, &base).unwrap();
        let b = riemann_zeta(s, &doubled).unwrap();
        assert!(rel(a, b) < base.target_rel_tol, "s = {s}: {:e}", rel(a, b));
    }
}

#[test]
fn dirichlet_series_brackets_zeta() {
    let n = 100_000u32;
    for s in [c(2.5, 0.0), c(2.5, 10.0), c(3.0, 100.0), c(4.0, -7.0), c(2.75, 1000.0)] {
        let partial: Complex64 = (1..=n).rev().map(|k| (-s * (k as f64).ln()).exp()).sum();
        let tail_bound = (n as f64).powf(1.0 - s.re) / (s.re - 1.0);
        let z = riemann_zeta(s, &p(s)).unwrap();
        // summation rounding is a few ulps of ζ
        let rounding = 1e-14 * z.norm();
        assert!((z - partial).norm() <= tail_bound + rounding, "s = {s}");
    }
}

#[test]
fn critical_line_is_real() {
    let u = ZeroFinder::new(LFunctionKind::Chi4).unwrap().phase();
    // conjugation symmetry plus the functional equation force ε = conj(u)²
    assert!(rel(u.conj() * u.conj(), epsilon_chi4().unwrap()) < 1e-9);
    for k in 0..=240 {
        let t = k as f64 * 0.5 + 0.01;
        let v = f64c(xi(c(0.5, t)).unwrap());
        assert!(v.im.abs() <= 1e-10 * v.norm(), "xi at t = {t}");
        let w = f64c(xi4(c(0.5, t)).unwrap()) / u;
        assert!(w.im.abs() <= 1e-10 * w.norm(), "xi4 at t = {t}");
    }
}

#[test]
fn structure_function_modulus_increases_with_y() {
    for kind in LFunctionKind::ALL {
        for x in [0.0, 1.0, -1.0, 5.0, -5.0] {
            let mut prev = f64::NEG_INFINITY;
            for k in 1..=50 {
                let y = k as f64 * 0.1;
                let m = debranges_e(c(x, y), kind).unwrap().ln_abs().unwrap();
                assert!(m > prev, "{kind} x = {x} y = {y}");
                prev = m;
            }
        }
    }
}

#[test]
fn zero_free_right_of_one() {
    for kind in LFunctionKind::ALL {
        let f = CompletedFunction::new(kind);
        for re in [1.001, 1.01, 1.1, 1.5, 2.0, 3.0] {
            for k in 0..=100 {
                let s = c(re, k as f64 * 3.0);
                assert!(!f.value(s).unwrap().is_zero(), "{kind} at {s}");
            }
        }
    }
}

#[test]
fn zeros_reverify_and_count() {
    let f = ZeroFinder::new(LFunctionKind::Zeta).unwrap();
    assert_eq!(f.zeros_in_range(0.0, 100.0).unwrap().len(), 29);
    for kind in LFunctionKind::ALL {
        let f = ZeroFinder::new(kind).unwrap();
        let func = CompletedFunction::new(kind);
        for z in f.zeros(40).unwrap() {
            let a = f.critical_line_value(z.ordinate - 1e-8).unwrap();
            let b = f.critical_line_value(z.ordinate + 1e-8).unwrap();
            assert!((a < 0.0) != (b < 0.0), "{kind} #{}", z.index);
            assert!(z.residual <= 1e-9 && z.bracket_width <= 1e-10);
            let up = func.value(c(0.5, z.ordinate)).unwrap();
            let down = func.value(c(0.5, -z.ordinate)).unwrap();
            let (lu, ld) = (up.ln_abs().unwrap(), down.ln_abs().unwrap());
            assert!((lu - ld).abs() < 1e-9, "{kind} #{}", z.index);
        }
    }
}

#[test]
fn herglotz_orientations_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = Positivity::new(LFunctionKind::Zeta);
    let mut ts: Vec<f64> = (0..50).map(|_| rng.gen_range(1.0..500.0)).collect();
    ts.push(282.0);
    for t in ts {
        let g = p.herglotz_ratio(t).unwrap();
        let inv = xi(c(2.0, t)).unwrap().checked_div(&xi(c(1.0, t)).unwrap()).unwrap();
        assert_eq!(g < 0.0, inv.re_sign() < 0, "t = {t}");
    }
}

#[test]
fn kernel_verdict_is_stable() {
    for (kind, n) in [(LFunctionKind::Zeta, 34), (LFunctionKind::Chi4, 30), (LFunctionKind::Zeta, 1)] {
        let f = ZeroFinder::new(kind).unwrap();
        let p = Positivity::new(kind);
        let z = f.nth_zero(n).unwrap();
        let base = p.kernel_positivity(&z).unwrap().value;
        for dt in [-1e-10, 1e-10] {
            let mut moved = z;
            moved.ordinate += dt;
            let v = p.kernel_positivity(&moved).unwrap().value;
            let (a, b) = (ScaledComplex::from_parts(v.mantissa().re, 0.0, v.exponent() as i64).unwrap(),
                          ScaledComplex::from_parts(base.mantissa().re, 0.0, base.exponent() as i64).unwrap());
            assert!(scaled_rel(a, b) < 1e-6, "{kind} #{n}");
        }
    }
}

#[test]
fn gram_single_point_matches_kernel() {
    for kind in LFunctionKind::ALL {
        let p = Positivity::new(kind);
        for w in [c(0.0, 1.0), c(3.0, 0.5), c(-282.0, 0.1), c(40.0, 2.0)] {
            let m = p.gram_check(&[w]).unwrap().matrix[0][0];
            let k = p.kernel(w, w + Complex64::i()).unwrap();
            let two_re_k = ScaledComplex::from_parts(2.0 * k.mantissa().re, 0.0, k.exponent() as i64).unwrap();
            assert!(scaled_rel(m, two_re_k) < 1e-10, "{kind} {w}");
        }
    }
}

#[test]
fn gram_matrices_are_hermitian() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for kind in LFunctionKind::ALL {
        let pts: Vec<Complex64> = (0..8)
            .map(|_| c(rng.gen_range(-50.0..50.0), rng.gen_range(0.05..3.0)))
            .collect();
        let rep = Positivity::new(kind).gram_check(&pts).unwrap();
        for a in 0..pts.len() {
            assert_eq!(rep.matrix[a][a].mantissa().im, 0.0);
            for b in 0..pts.len() {
                assert_eq!(rep.matrix[a][b], rep.matrix[b][a].conj());
            }
        }
    }
}

#[test]
fn scans_are_deterministic() {
    let p = Positivity::new(LFunctionKind::Zeta);
    let a = p.scan_herglotz(281.95, 282.15, 0.002).unwrap();
    let b = p.scan_herglotz(281.95, 282.15, 0.002).unwrap();
    assert_eq!(a.rows.len(), b.rows.len());
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!((x.t.to_bits(), x.g.to_bits()), (y.t.to_bits(), y.g.to_bits()));
    }
    assert_eq!(a.negative, b.negative);
}

#[test]
fn quadrature_reproduces_kernel() {
    for kind in LFunctionKind::ALL {
        let p = Positivity::new(kind);
        for (w0, w) in [(c(0.0, 1.0), c(0.0, 1.0)), (c(0.0, 1.0), c(1.0, 2.0)), (c(0.0, 0.5), c(0.0, 3.0))] {
            let d = p.reproducing_quadrature_check(w0, w).unwrap();
            assert!(d < 1e-6, "{kind} {w0} {w}: {d:e}");
        }
    }
}
