use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler–Maclaurin controls: direct-sum length `em_terms`, number of
/// Bernoulli corrections `em_corrections`, and the relative accuracy the
/// defaults are chosen for.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalParams {
    pub em_terms: u32,
    pub em_corrections: u32,
    pub target_rel_tol: f64,
}

pub const DEFAULT_CORRECTIONS: u32 = 15;
pub const DEFAULT_TOL: f64 = 1e-12;

/// Smallest direct-sum length accepted for a point with imaginary part `t`.
pub fn minimum_terms(t: f64) -> u32 {
    (1.3 * t.abs() / std::f64::consts::TAU).ceil() as u32 + 10
}

impl EvalParams {
    /// Default parameters for evaluating at `s`.
    ///
    /// The Bernoulli tail shrinks geometrically with ratio
    /// `r = |s + 2M + 1| / (2πN)`, so `N` is raised until `r^{2M}` drops
    /// below the tolerance, never going under `1.3|t|/2π + 20`. Left of
    /// `Re s = 1` the tail also carries `N^{1−σ}/|s−1|` against the size of
    /// ζ, which costs a further factor of that weight to the power `1/2M`.
    pub fn for_point(s: Complex64) -> Self {
        Self::with_controls(s, DEFAULT_CORRECTIONS, DEFAULT_TOL)
    }

    pub fn with_controls(s: Complex64, em_corrections: u32, target_rel_tol: f64) -> Self {
        let floor = minimum_terms(s.im) + 10;
        let ratio = target_rel_tol.powf(1.0 / (2.0 * f64::from(em_corrections)));
        let reach = (s + f64::from(2 * em_corrections + 1)).norm();
        let n0 = reach / (std::f64::consts::TAU * ratio);
        let weight = n0.powf(1.0 - s.re) / (s - 1.0).norm().max(1.0);
        let tail = (n0 * weight.max(1.0).powf(1.0 / (2.0 * f64::from(em_corrections)))).ceil() as u32;
        Self {
            em_terms: floor.max(tail),
            em_corrections,
            target_rel_tol,
        }
    }

    /// Checks the ranges and that `em_terms` is long enough for `s`.
    pub fn validate(&self, s: Complex64) -> Result<()> {
        if !(5..=30).contains(&self.em_corrections) {
            return Err(Error::Parameter(format!(
                "em_corrections = {} outside [5, 30]",
                self.em_corrections
            )));
        }
        if !(1e-14..=1e-6).contains(&self.target_rel_tol) {
            return Err(Error::Parameter(format!(
                "target_rel_tol = {:e} outside [1e-14, 1e-6]",
                self.target_rel_tol
            )));
        }
        let need = minimum_terms(s.im);
        if self.em_terms < need {
            return Err(Error::Parameter(format!(
                "em_terms = {} too small for |Im s| = {}, need at least {need}",
                self.em_terms,
                s.im.abs()
            )));
        }
        Ok(())
    }
}

/// How a caller picks [`EvalParams`] for each evaluation point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalConfig {
    /// Fixed direct-sum length; `None` selects it per point.
    pub em_terms: Option<u32>,
    pub em_corrections: u32,
    pub target_rel_tol: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            em_terms: None,
            em_corrections: DEFAULT_CORRECTIONS,
            target_rel_tol: DEFAULT_TOL,
        }
    }
}

impl EvalConfig {
    pub fn params_for(&self, s: Complex64) -> EvalParams {
        let auto = EvalParams::with_controls(s, self.em_corrections, self.target_rel_tol);
        match self.em_terms {
            Some(n) => EvalParams { em_terms: n, ..auto },
            None => auto,
        }
    }

    /// Short text form recorded alongside cached zero tables.
    pub fn summary(&self) -> String {
        let terms = self
            .em_terms
            .map_or_else(|| "auto".to_string(), |n| n.to_string());
        format!(
            "em_terms={terms};em_corrections={};tol={:e}",
            self.em_corrections, self.target_rel_tol
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_satisfy_validation() {
        for t in [0.0, 14.1, 282.0, 8714.2, 1e4] {
            let s = Complex64::new(0.5, t);
            let p = EvalParams::for_point(s);
            p.validate(s).unwrap();
            assert!(p.em_terms >= minimum_terms(t) + 10);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let s = Complex64::new(0.5, 1000.0);
        let mut p = EvalParams::for_point(s);
        p.em_terms = 50;
        assert!(matches!(p.validate(s), Err(Error::Parameter(_))));
        let mut p = EvalParams::for_point(s);
        p.em_corrections = 40;
        assert!(p.validate(s).is_err());
        let mut p = EvalParams::for_point(s);
        p.target_rel_tol = 1e-3;
        assert!(p.validate(s).is_err());
    }

    #[test]
    fn fixed_terms_override() {
        let cfg = EvalConfig {
            em_terms: Some(77),
            ..EvalConfig::default()
        };
        assert_eq!(cfg.params_for(Complex64::new(2.0, 0.0)).em_terms, 77);
        assert_eq!(cfg.summary(), "em_terms=77;em_corrections=15;tol=1e-12");
    }
}
