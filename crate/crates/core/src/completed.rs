//! The completed functions
//!
//! ```text
//! ξ(s)     = s(s−1) π^{−s/2} Γ(s/2) ζ(s)
//! ξ(s, χ₄) = (4π)^{−s/2} Γ((s+1)/2) (ζ(s, 1/4) − ζ(s, 3/4))
//! ```
//!
//! and the structure function `E(z) = ξ(1 − iz)`.
//!
//! Each value is assembled as `exp(log prefactor) · core` where the core is
//! an ordinary binary64 quantity of moderate size. For ξ the removable
//! singularities are absorbed algebraically (`sΓ(s/2) = 2Γ(s/2 + 1)` and a
//! pole-free `(s−1)ζ(s)`), so `ξ(0) = ξ(1) = 1` come out directly. Near the
//! trivial zeros, where the Gamma factor has a pole, and to the left of
//! `Re s = −2` the functional equation is used instead.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scaled::ScaledComplex;
use crate::special::{chi4_difference, digamma, log_gamma, zeta_regular, EvalConfig};

type C = Complex64;

const LN_PI: f64 = 1.144_729_885_849_400_2;
const LN_4PI: f64 = 2.531_024_246_969_290_7;

/// Distance from a Gamma-factor pole inside which the functional equation
/// is used.
const POLE_GUARD: f64 = 1e-3;

/// Which completed function: ξ(s) or ξ(s, χ₄).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LFunctionKind {
    Zeta,
    Chi4,
}

impl LFunctionKind {
    pub const ALL: [LFunctionKind; 2] = [LFunctionKind::Zeta, LFunctionKind::Chi4];

    pub fn as_str(&self) -> &'static str {
        match self {
            LFunctionKind::Zeta => "zeta",
            LFunctionKind::Chi4 => "chi4",
        }
    }
}

impl fmt::Display for LFunctionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LFunctionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "zeta" => Ok(LFunctionKind::Zeta),
            "chi4" => Ok(LFunctionKind::Chi4),
            other => Err(Error::Domain(format!("unknown kind '{other}' (zeta|chi4)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompletedValue {
    pub value: ScaledComplex,
    pub kind: LFunctionKind,
    pub point: C,
}

/// `f(s) = exp(log_prefactor) · core` together with
/// `f′(s) = exp(log_prefactor) · (d_log_prefactor · core + core_deriv)`.
#[derive(Clone, Copy, Debug)]
pub struct Factored {
    pub log_prefactor: C,
    pub d_log_prefactor: C,
    pub core: C,
    pub core_deriv: C,
}

impl Factored {
    pub fn value(&self) -> Result<ScaledComplex> {
        ScaledComplex::from_log(self.log_prefactor)?.mul_c64(self.core)
    }

    pub fn deriv(&self) -> Result<ScaledComplex> {
        let inner = self.d_log_prefactor * self.core + self.core_deriv;
        ScaledComplex::from_log(self.log_prefactor)?.mul_c64(inner)
    }

    /// The same function at `1 − s` scaled by `c`: `g(s) = c·f(1 − s)`.
    fn reflected(self, c: C) -> Self {
        Self {
            log_prefactor: self.log_prefactor,
            d_log_prefactor: -self.d_log_prefactor,
            core: self.core * c,
            core_deriv: -self.core_deriv * c,
        }
    }
}

/// A completed function bound to an evaluation configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompletedFunction {
    kind: LFunctionKind,
    config: EvalConfig,
}

impl CompletedFunction {
    pub fn new(kind: LFunctionKind) -> Self {
        Self::with_config(kind, EvalConfig::default())
    }

    pub fn with_config(kind: LFunctionKind, config: EvalConfig) -> Self {
        Self { kind, config }
    }

    pub fn kind(&self) -> LFunctionKind {
        self.kind
    }

    pub fn config(&self) -> &EvalConfig {
        &self.config
    }

    fn needs_reflection(&self, s: C) -> bool {
        if s.re < -2.0 {
            return true;
        }
        // poles of Γ(s/2 + 1) at −2, −4, …; of Γ((s+1)/2) at −1, −3, …
        let first_pole = match self.kind {
            LFunctionKind::Zeta => -2.0,
            LFunctionKind::Chi4 => -1.0,
        };
        let mut p = first_pole;
        while p >= s.re - 1.0 {
            if (s - p).norm() < POLE_GUARD {
                return true;
            }
            p -= 2.0;
        }
        false
    }

    fn direct(&self, s: C) -> Result<Factored> {
        let p = self.config.params_for(s);
        match self.kind {
            LFunctionKind::Zeta => {
                let g = s * 0.5 + 1.0;
                let (core, core_deriv) = zeta_regular(s, &p)?;
                Ok(Factored {
                    log_prefactor: std::f64::consts::LN_2 + log_gamma(g)? - s * (0.5 * LN_PI),
                    d_log_prefactor: 0.5 * digamma(g)? - 0.5 * LN_PI,
                    core,
                    core_deriv,
                })
            }
            LFunctionKind::Chi4 => {
                let g = (s + 1.0) * 0.5;
                let (core, core_deriv) = chi4_difference(s, &p)?;
                Ok(Factored {
                    log_prefactor: log_gamma(g)? - s * (0.5 * LN_4PI),
                    d_log_prefactor: 0.5 * digamma(g)? - 0.5 * LN_4PI,
                    core,
                    core_deriv,
                })
            }
        }
    }

    pub fn factored(&self, s: C) -> Result<Factored> {
        if !(s.re.is_finite() && s.im.is_finite()) {
            return Err(Error::Domain(format!("non-finite argument {s}")));
        }
        if self.needs_reflection(s) {
            let root = match self.kind {
                LFunctionKind::Zeta => C::new(1.0, 0.0),
                LFunctionKind::Chi4 => epsilon_chi4()?,
            };
            return Ok(self.direct(1.0 - s)?.reflected(root));
        }
        self.direct(s)
    }

    pub fn value(&self, s: C) -> Result<ScaledComplex> {
        self.factored(s)?.value()
    }

    pub fn deriv(&self, s: C) -> Result<ScaledComplex> {
        self.factored(s)?.deriv()
    }

    pub fn evaluate(&self, s: C) -> Result<CompletedValue> {
        Ok(CompletedValue {
            value: self.value(s)?,
            kind: self.kind,
            point: s,
        })
    }

    /// `E(z) = f(1 − iz)`.
    pub fn structure_e(&self, z: C) -> Result<ScaledComplex> {
        self.value(1.0 - C::i() * z)
    }
}

pub fn xi(s: C) -> Result<ScaledComplex> {
    CompletedFunction::new(LFunctionKind::Zeta).value(s)
}

pub fn xi_deriv(s: C) -> Result<ScaledComplex> {
    CompletedFunction::new(LFunctionKind::Zeta).deriv(s)
}

pub fn xi4(s: C) -> Result<ScaledComplex> {
    CompletedFunction::new(LFunctionKind::Chi4).value(s)
}

pub fn xi4_deriv(s: C) -> Result<ScaledComplex> {
    CompletedFunction::new(LFunctionKind::Chi4).deriv(s)
}

/// de Branges structure function `E(z) = ξ(1 − iz)` (or the χ₄ analogue).
pub fn debranges_e(z: C, kind: LFunctionKind) -> Result<ScaledComplex> {
    CompletedFunction::new(kind).structure_e(z)
}

const EPSILON_REFERENCE_POINTS: [C; 3] = [
    C { re: 2.0, im: 0.5 },
    C { re: 3.0, im: 1.0 },
    C { re: 2.5, im: 3.0 },
];

/// Root number measured at one reference point: `ξ(1−s₀, χ₄)/ξ(s₀, χ₄)`.
pub fn epsilon_chi4_at(s0: C) -> Result<C> {
    let f = CompletedFunction::new(LFunctionKind::Chi4);
    // 1 − s₀ stays away from the Gamma poles for the reference points used
    let num = f.direct(1.0 - s0)?.value()?;
    let den = f.direct(s0)?.value()?;
    num.checked_div(&den)?
        .to_c64()
        .ok_or_else(|| Error::Numerical(format!("root number at {s0} not representable")))
}

/// The root number ε(χ₄) in `ξ(1−s, χ₄) = ε ξ(s, χ₄)`, measured numerically
/// once per process.
pub fn epsilon_chi4() -> Result<C> {
    static EPSILON: OnceLock<Result<C>> = OnceLock::new();
    EPSILON
        .get_or_init(|| {
            let mut last = Error::Numerical("no reference point".into());
            for s0 in EPSILON_REFERENCE_POINTS {
                match epsilon_chi4_at(s0) {
                    Ok(eps) if (eps.norm() - 1.0).abs() < 1e-9 => return Ok(eps),
                    Ok(eps) => {
                        last = Error::Numerical(format!("|ε| = {} at {s0}", eps.norm()));
                    }
                    Err(e) => last = e,
                }
            }
            Err(last)
        })
        .clone()
}
