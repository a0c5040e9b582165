//! De Branges positivity functionals: the kernel sign at zeros, the
//! Herglotz ratio, interval scans, the Gram-matrix probe, and a quadrature
//! check of the reproducing property.

pub mod jacobi;
pub mod quadrature;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::completed::{CompletedFunction, LFunctionKind};
use crate::error::{Error, Result};
use crate::scaled::ScaledComplex;
use crate::special::EvalConfig;
use crate::zeros::{ZeroFinder, ZeroRecord, RESIDUAL_TOL};

/// Kernel verdicts report `−f′(ρ)f(1+ρ)`; the positive factor `1/2π` of the
/// kernel is left out.
pub const KERNEL_NOTE: &str = "value = -f'(rho) f(1+rho); positive factor 1/(2 pi) omitted";

/// Half-width of the sign-change recheck around a zero ordinate.
const SIGN_RECHECK: f64 = 1e-8;
/// Scan run endpoints are refined to this width.
const RUN_ENDPOINT_TOL: f64 = 1e-6;
/// Largest Gram matrix order.
pub const MAX_GRAM_ORDER: usize = 64;
/// Relative threshold separating indefiniteness from round-off.
pub const GRAM_NEGATIVITY_TOL: f64 = 1e-12;
/// Required relative defect of the reproducing-kernel quadrature.
pub const QUADRATURE_DEFECT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelVerdict {
    pub kind: LFunctionKind,
    pub zero: ZeroRecord,
    pub value: ScaledComplex,
    pub real_sign: i8,
    pub violates: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow {
    pub t: f64,
    pub g: f64,
    pub kind: LFunctionKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HerglotzScan {
    pub kind: LFunctionKind,
    pub rows: Vec<ScanRow>,
    /// Maximal runs with `g < 0`; interior endpoints refined to `10⁻⁶`,
    /// runs reaching the scan boundary end there.
    pub negative: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GramReport {
    pub kind: LFunctionKind,
    pub points: Vec<Complex64>,
    /// Exactly Hermitian.
    pub matrix: Vec<Vec<ScaledComplex>>,
    /// The true matrix is `normalized · 2^scale_exp2`.
    pub scale_exp2: i32,
    pub normalized: Vec<Vec<Complex64>>,
    /// Smallest eigenvalue of `normalized`.
    pub min_eigenvalue: f64,
    /// Largest entry modulus of `normalized`.
    pub norm_max: f64,
    pub violates: bool,
}

pub const SCAN_HEADER: &str = "t,g";

impl HerglotzScan {
    /// `t,g` rows with 17 significant digits, then one
    /// `# negative: [a,b]` line per run.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{SCAN_HEADER}\n");
        for r in &self.rows {
            out.push_str(&format!("{:.16e},{:.16e}\n", r.t, r.g));
        }
        for (a, b) in &self.negative {
            out.push_str(&format!("# negative: [{:.16e},{:.16e}]\n", a, b));
        }
        out
    }

    pub fn parse_csv(text: &str, kind: LFunctionKind) -> Result<Self> {
        let bad = |n: usize| Error::Domain(format!("scan CSV line {}: malformed", n + 1));
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == SCAN_HEADER => {}
            _ => return Err(bad(0)),
        }
        let mut rows = Vec::new();
        let mut negative = Vec::new();
        for (n, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# negative:") {
                let inner = rest.trim().strip_prefix('[').and_then(|r| r.strip_suffix(']'));
                let (a, b) = inner.and_then(|r| r.split_once(',')).ok_or_else(|| bad(n))?;
                negative.push((
                    a.trim().parse().map_err(|_| bad(n))?,
                    b.trim().parse().map_err(|_| bad(n))?,
                ));
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let (t, g) = line.split_once(',').ok_or_else(|| bad(n))?;
            rows.push(ScanRow {
                t: t.parse().map_err(|_| bad(n))?,
                g: g.parse().map_err(|_| bad(n))?,
                kind,
            });
        }
        Ok(Self { kind, rows, negative })
    }
}

/// Positivity probes for one completed function.
#[derive(Clone, Debug)]
pub struct Positivity {
    func: CompletedFunction,
}

impl Positivity {
    pub fn new(kind: LFunctionKind) -> Self {
        Self::with_config(kind, EvalConfig::default())
    }

    pub fn with_config(kind: LFunctionKind, config: EvalConfig) -> Self {
        Self {
            func: CompletedFunction::with_config(kind, config),
        }
    }

    pub fn kind(&self) -> LFunctionKind {
        self.func.kind()
    }

    pub fn function(&self) -> &CompletedFunction {
        &self.func
    }

    /// Sign of `Re{−f′(ρ)f(1+ρ)}` at a refined zero.
    pub fn kernel_positivity(&self, zero: &ZeroRecord) -> Result<KernelVerdict> {
        if zero.kind != self.kind() {
            return Err(Error::Domain(format!(
                "{} zero passed to a {} check",
                zero.kind,
                self.kind()
            )));
        }
        if !(zero.residual <= RESIDUAL_TOL) {
            return Err(Error::Consistency(format!(
                "zero residual {:e} above {RESIDUAL_TOL:e}",
                zero.residual
            )));
        }
        let finder = ZeroFinder::with_config(self.kind(), *self.func.config())?;
        let below = finder.normalized_value(zero.ordinate - SIGN_RECHECK)?;
        let above = finder.normalized_value(zero.ordinate + SIGN_RECHECK)?;
        if (below < 0.0) == (above < 0.0) {
            return Err(Error::Consistency(format!(
                "no sign change within {SIGN_RECHECK:e} of t = {}",
                zero.ordinate
            )));
        }
        let rho = zero.rho();
        let value = (-self.func.deriv(rho)?).checked_mul(&self.func.value(rho + 1.0)?)?;
        let real_sign = value.re_sign();
        Ok(KernelVerdict {
            kind: self.kind(),
            zero: *zero,
            value,
            real_sign,
            violates: real_sign < 0,
        })
    }

    /// Kernel verdicts at the first `count` zeros.
    pub fn kernel_sweep(&self, finder: &ZeroFinder, count: usize) -> Result<Vec<KernelVerdict>> {
        let zeros = finder.zeros(count)?;
        zeros.par_iter().map(|z| self.kernel_positivity(z)).collect()
    }

    /// `g(t) = Re{f(1+it)/f(2+it)}`.
    pub fn herglotz_ratio(&self, t: f64) -> Result<f64> {
        let num = self.func.value(Complex64::new(1.0, t))?;
        let den = self.func.value(Complex64::new(2.0, t))?;
        Ok(num.checked_div(&den)?.re_clamped())
    }

    /// `g` on `t_lo, t_lo + step, …` up to `t_hi`, with its negative runs.
    pub fn scan_herglotz(&self, t_lo: f64, t_hi: f64, step: f64) -> Result<HerglotzScan> {
        if !(t_lo >= 0.0 && t_lo < t_hi && step > 0.0 && step.is_finite()) {
            return Err(Error::Domain(format!(
                "bad scan [{t_lo}, {t_hi}] with step {step}"
            )));
        }
        let n = ((t_hi - t_lo) / step + 1e-9).floor() as usize;
        let ts: Vec<f64> = (0..=n).map(|k| t_lo + k as f64 * step).collect();
        let rows: Vec<ScanRow> = ts
            .par_iter()
            .map(|&t| {
                Ok(ScanRow {
                    t,
                    g: self.herglotz_ratio(t)?,
                    kind: self.kind(),
                })
            })
            .collect::<Result<_>>()?;
        let mut negative = Vec::new();
        let mut k = 0;
        while k < rows.len() {
            if rows[k].g >= 0.0 {
                k += 1;
                continue;
            }
            let start = k;
            while k < rows.len() && rows[k].g < 0.0 {
                k += 1;
            }
            let lo = if start == 0 {
                rows[0].t
            } else {
                self.sign_boundary(rows[start - 1].t, rows[start].t)?
            };
            let hi = if k == rows.len() {
                rows[k - 1].t
            } else {
                self.sign_boundary(rows[k - 1].t, rows[k].t)?
            };
            negative.push((lo, hi));
        }
        Ok(HerglotzScan {
            kind: self.kind(),
            rows,
            negative,
        })
    }

    /// Bisects a sign change of `g` on `[a, b]`.
    fn sign_boundary(&self, mut a: f64, mut b: f64) -> Result<f64> {
        let neg_a = self.herglotz_ratio(a)? < 0.0;
        while b - a > RUN_ENDPOINT_TOL {
            let m = 0.5 * (a + b);
            if (self.herglotz_ratio(m)? < 0.0) == neg_a {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(0.5 * (a + b))
    }

    /// `W(z) = 1/f(1 − iz)`.
    pub fn w_function(&self, z: Complex64) -> Result<ScaledComplex> {
        self.func.structure_e(z)?.recip()
    }

    /// `K(w, z) = W(z)·conj(W(w)) / (2πi(conj(w) − z))`.
    pub fn kernel(&self, w: Complex64, z: Complex64) -> Result<ScaledComplex> {
        kernel_from(self.w_function(w)?, self.w_function(z)?, w, z)
    }

    /// `M[α][β] = K(w_α, w_β + i) + K(w_α + i, w_β)` and its smallest
    /// eigenvalue.
    pub fn gram_check(&self, points: &[Complex64]) -> Result<GramReport> {
        let r = points.len();
        if r == 0 || r > MAX_GRAM_ORDER {
            return Err(Error::Domain(format!(
                "Gram order {r} outside 1..={MAX_GRAM_ORDER}"
            )));
        }
        for (i, w) in points.iter().enumerate() {
            if !(w.im > 0.0) || !w.re.is_finite() || !w.im.is_finite() {
                return Err(Error::Domain(format!("point {w} not in the upper half-plane")));
            }
            if points[..i].contains(w) {
                return Err(Error::Domain(format!("coincident point {w}")));
            }
        }
        let i = Complex64::i();
        let ws: Vec<(ScaledComplex, ScaledComplex)> = points
            .par_iter()
            .map(|&w| Ok((self.w_function(w)?, self.w_function(w + i)?)))
            .collect::<Result<_>>()?;
        let mut matrix = vec![vec![ScaledComplex::ZERO; r]; r];
        for a in 0..r {
            for b in a..r {
                let (wa, wa_i) = ws[a];
                let (wb, wb_i) = ws[b];
                let entry = kernel_from(wa, wb_i, points[a], points[b] + i)?
                    .checked_add(&kernel_from(wa_i, wb, points[a] + i, points[b])?)?;
                if a == b {
                    let re = ScaledComplex::from_parts(entry.mantissa().re, 0.0, entry.exponent() as i64)?;
                    matrix[a][a] = re;
                } else {
                    matrix[a][b] = entry;
                    matrix[b][a] = entry.conj();
                }
            }
        }
        let scale_exp2 = matrix
            .iter()
            .flatten()
            .filter(|z| !z.is_zero())
            .map(|z| z.exponent())
            .max()
            .unwrap_or(0);
        let normalized: Vec<Vec<Complex64>> = matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|z| {
                        let shift = z.exponent() as i64 - scale_exp2 as i64;
                        let m = z.mantissa();
                        Complex64::new(crate::scaled::ldexp(m.re, shift), crate::scaled::ldexp(m.im, shift))
                    })
                    .collect()
            })
            .collect();
        let norm_max = normalized.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        let min_eigenvalue = jacobi::hermitian_eigenvalues(&normalized)[0];
        Ok(GramReport {
            kind: self.kind(),
            points: points.to_vec(),
            matrix,
            scale_exp2,
            normalized,
            min_eigenvalue,
            norm_max,
            violates: min_eigenvalue < -GRAM_NEGATIVITY_TOL * norm_max,
        })
    }

    /// Relative defect of `∫ K(w₀,x)·conj(K(w,x))/|W(x)|² dx = K(w₀,w)` over
    /// the real line.
    ///
    /// The integrand is evaluated on `[−X, X]` through the kernels; beyond
    /// `X` it equals `c/((w̄₀−x)(w−x))` with `c = conj(W(w₀))W(w)/4π²`,
    /// whose tails are added in closed form.
    pub fn reproducing_quadrature_check(&self, w0: Complex64, w: Complex64) -> Result<f64> {
        if !(w0.im > 0.0 && w.im > 0.0) {
            return Err(Error::Domain("both points need Im > 0".into()));
        }
        let ww0 = self.w_function(w0)?;
        let ww = self.w_function(w)?;
        let target = kernel_from(ww0, ww, w0, w)?;
        // the oracle sets the scale; everything below is relative to it
        let c = ww0
            .conj()
            .checked_mul(&ww)?
            .checked_div(&target)?
            .to_c64()
            .ok_or_else(|| Error::Numerical("tail coefficient out of range".into()))?
            / (4.0 * PI * PI);
        let x_max = 100.0f64.max(10.0 * w0.norm().max(w.norm()));
        let a = w0.conj();
        let b = w;
        let tail = c * (((a + x_max) / (b + x_max)).ln() - ((a - x_max) / (b - x_max)).ln()) / (a - b);
        let integrand = |x: f64| -> Result<Complex64> {
            let z = Complex64::new(x, 0.0);
            let wx = self.w_function(z)?;
            let k0 = kernel_from(ww0, wx, w0, z)?;
            let k1 = kernel_from(ww, wx, w, z)?;
            let abs2 = wx.checked_mul(&wx.conj())?;
            k0.checked_mul(&k1.conj())?
                .checked_div(&abs2)?
                .checked_div(&target)?
                .to_c64()
                .ok_or_else(|| Error::Numerical(format!("integrand out of range at x = {x}")))
        };
        // a few panels keep the peaks near Re w₀ and Re w resolved
        let mut cuts = vec![-x_max, w0.re.clamp(-x_max, x_max), w.re.clamp(-x_max, x_max), x_max];
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut total = tail;
        for pair in cuts.windows(2) {
            if pair[1] > pair[0] {
                total += quadrature::integrate(integrand, pair[0], pair[1], 1e-10)?;
            }
        }
        Ok((total - 1.0).norm())
    }
}

fn kernel_from(
    w_at_w: ScaledComplex,
    w_at_z: ScaledComplex,
    w: Complex64,
    z: Complex64,
) -> Result<ScaledComplex> {
    let denom = 2.0 * PI * Complex64::i() * (w.conj() - z);
    if denom == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain(format!("kernel denominator vanishes at w = {w}, z = {z}")));
    }
    w_at_z.checked_mul(&w_at_w.conj())?.mul_c64(1.0 / denom)
}

pub fn kernel_positivity(zero: &ZeroRecord) -> Result<KernelVerdict> {
    Positivity::new(zero.kind).kernel_positivity(zero)
}

pub fn herglotz_ratio(t: f64, kind: LFunctionKind) -> Result<f64> {
    Positivity::new(kind).herglotz_ratio(t)
}

pub fn scan_herglotz(t_lo: f64, t_hi: f64, step: f64, kind: LFunctionKind) -> Result<HerglotzScan> {
    Positivity::new(kind).scan_herglotz(t_lo, t_hi, step)
}

pub fn gram_check(points: &[Complex64], kind: LFunctionKind) -> Result<GramReport> {
    Positivity::new(kind).gram_check(points)
}

pub fn reproducing_quadrature_check(w0: Complex64, w: Complex64, kind: LFunctionKind) -> Result<f64> {
    Positivity::new(kind).reproducing_quadrature_check(w0, w)
}
