//! Critical-line zeros of ξ and ξ(·, χ₄).
//!
//! On the critical line both functions are a fixed unimodular phase times a
//! real function of `t`. Zeros are bracketed by sign changes of that real
//! function on a uniform grid and refined with Brent's method.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::completed::{CompletedFunction, LFunctionKind};
use crate::error::{Error, Result};
use crate::special::EvalConfig;

/// Grid spacing for zero enumeration.
pub const SCAN_STEP: f64 = 0.05;
/// Enumeration gives up above this height.
pub const SCAN_CEILING: f64 = 1e4;
/// Target width of a refined bracket.
pub const BRACKET_TOL: f64 = 1e-10;
/// Largest accepted residual, in units of the bracket-endpoint scale.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Allowed imaginary drift of the phase-corrected value, relative.
const PHASE_DRIFT_TOL: f64 = 1e-8;
/// Grid cells evaluated per parallel batch during enumeration.
const CHUNK_CELLS: u64 = 400;

pub const TABLE_HEADER: &str = "kind,index,ordinate,residual,bracket_width";
pub const CACHE_ENV: &str = "DBZ_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroRecord {
    pub kind: LFunctionKind,
    /// 1-based, by increasing ordinate.
    pub index: u32,
    /// `t` in `ρ = 1/2 + it`.
    pub ordinate: f64,
    /// `|Ξ(ordinate)|` divided by the larger endpoint magnitude of the
    /// initial bracket.
    pub residual: f64,
    pub bracket_width: f64,
}

impl ZeroRecord {
    pub fn rho(&self) -> Complex64 {
        Complex64::new(0.5, self.ordinate)
    }
}

/// Formats `x` with `digits` significant digits, positional when that is
/// reasonable.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-3..15).contains(&mag) {
        let decimals = (digits as i32 - 1 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{:.*e}", digits - 1, x)
    }
}

/// Persisted list of the first zeros of one kind.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroTable {
    pub kind: LFunctionKind,
    pub records: Vec<ZeroRecord>,
    pub generated_with: String,
}

impl ZeroTable {
    pub fn new(kind: LFunctionKind, generated_with: impl Into<String>) -> Self {
        Self {
            kind,
            records: Vec::new(),
            generated_with: generated_with.into(),
        }
    }

    /// Records must be strictly increasing with consecutive indices from 1
    /// and gaps above `10⁻³`.
    pub fn validate(&self) -> Result<()> {
        for (i, r) in self.records.iter().enumerate() {
            if r.kind != self.kind || r.index as usize != i + 1 || !(r.ordinate > 0.0) {
                return Err(Error::Cache(format!("bad record #{}", i + 1)));
            }
            if i > 0 && r.ordinate - self.records[i - 1].ordinate <= 1e-3 {
                return Err(Error::Cache(format!(
                    "zeros {} and {} closer than 1e-3",
                    i,
                    i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# generated_with: {}", self.generated_with).unwrap();
        writeln!(out, "{TABLE_HEADER}").unwrap();
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{:e},{:e}",
                r.kind,
                r.index,
                format_significant(r.ordinate, 18),
                r.residual,
                r.bracket_width
            )
            .unwrap();
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut generated_with = String::new();
        let mut kind = None;
        let mut records = Vec::new();
        let mut seen_header = false;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(g) = rest.trim().strip_prefix("generated_with:") {
                    generated_with = g.trim().to_string();
                }
                continue;
            }
            if !seen_header {
                if line != TABLE_HEADER {
                    return Err(Error::Cache(format!("unexpected header '{line}'")));
                }
                seen_header = true;
                continue;
            }
            let bad = |what: &str| Error::Cache(format!("line {}: bad {what}", lineno + 1));
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(bad("field count"));
            }
            let record = ZeroRecord {
                kind: fields[0].parse().map_err(|_| bad("kind"))?,
                index: fields[1].parse().map_err(|_| bad("index"))?,
                ordinate: fields[2].parse().map_err(|_| bad("ordinate"))?,
                residual: fields[3].parse().map_err(|_| bad("residual"))?,
                bracket_width: fields[4].parse().map_err(|_| bad("bracket_width"))?,
            };
            kind.get_or_insert(record.kind);
            records.push(record);
        }
        if !seen_header {
            return Err(Error::Cache("missing header".into()));
        }
        let kind = kind.ok_or_else(|| Error::Cache("empty table".into()))?;
        let table = Self {
            kind,
            records,
            generated_with,
        };
        table.validate()?;
        Ok(table)
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("csv.tmp");
        fs::write(&tmp, self.to_csv()).map_err(|e| Error::Cache(e.to_string()))?;
        fs::rename(&tmp, path).map_err(|e| Error::Cache(e.to_string()))
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Cache(e.to_string()))?;
        Self::parse_csv(&text)
    }
}

/// On-disk zero tables, one file per kind.
#[derive(Clone, Debug)]
pub struct ZeroCache {
    dir: PathBuf,
}

fn cache_writer() -> &'static Mutex<()> {
    static WRITER: OnceLock<Mutex<()>> = OnceLock::new();
    WRITER.get_or_init(|| Mutex::new(()))
}

impl ZeroCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// `$DBZ_CACHE_DIR`, else the platform cache directory.
    pub fn from_env() -> Option<Self> {
        match std::env::var_os(CACHE_ENV) {
            Some(dir) if !dir.is_empty() => Some(Self::new(dir)),
            _ => dirs::cache_dir().map(|d| Self::new(d.join("dbz"))),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, kind: LFunctionKind) -> PathBuf {
        self.dir.join(format!("zeros-{kind}.csv"))
    }

    /// The cached table, if present, readable, and produced with
    /// `generated_with`.
    pub fn load(&self, kind: LFunctionKind, generated_with: &str) -> Option<ZeroTable> {
        let table = ZeroTable::read_from(&self.path_for(kind)).ok()?;
        (table.kind == kind && table.generated_with == generated_with).then_some(table)
    }

    pub fn store(&self, table: &ZeroTable) -> Result<()> {
        let _guard = cache_writer().lock().unwrap_or_else(|e| e.into_inner());
        fs::create_dir_all(&self.dir).map_err(|e| Error::Cache(e.to_string()))?;
        let path = self.path_for(table.kind);
        // never replace a longer table produced with the same settings
        if let Ok(existing) = ZeroTable::read_from(&path) {
            if existing.generated_with == table.generated_with
                && existing.records.len() >= table.records.len()
            {
                return Ok(());
            }
        }
        table.write_to(&path)
    }
}

/// Locates critical-line zeros for one kind.
#[derive(Clone, Debug)]
pub struct ZeroFinder {
    func: CompletedFunction,
    phase: Complex64,
    cache: Option<ZeroCache>,
}

/// Phase `u` with `ξ₄(1/2 + it) ∈ u·ℝ`, read off at `t = 2`.
fn chi4_phase() -> Result<Complex64> {
    static PHASE: OnceLock<Result<Complex64>> = OnceLock::new();
    PHASE
        .get_or_init(|| {
            let f = CompletedFunction::new(LFunctionKind::Chi4).factored(Complex64::new(0.5, 2.0))?;
            let w = Complex64::from_polar(1.0, f.log_prefactor.im) * f.core;
            Ok(w / w.norm())
        })
        .clone()
}

struct Brent {
    root: f64,
    value: f64,
    width: f64,
    /// Opposite-sign end of the final bracket.
    other: (f64, f64),
}

/// Brent's method on a sign-change bracket; stops once the bracket is at
/// most `xtol` wide.
fn brent<F>(mut f: F, a: f64, b: f64, fa: f64, fb: f64, xtol: f64) -> Result<Brent>
where
    F: FnMut(f64) -> Result<f64>,
{
    if fa == 0.0 {
        return Ok(Brent { root: a, value: 0.0, width: 0.0, other: (a, 0.0) });
    }
    if fb == 0.0 {
        return Ok(Brent { root: b, value: 0.0, width: 0.0, other: (b, 0.0) });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Refinement(format!("no sign change on [{a}, {b}]")));
    }
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.25 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            let width = if fb == 0.0 { 0.0 } else { (c - b).abs() };
            return Ok(Brent { root: b, value: fb, width, other: (c, fc) });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b)?;
    }
    Err(Error::Refinement(format!("Brent did not converge near {b}")))
}

impl ZeroFinder {
    pub fn new(kind: LFunctionKind) -> Result<Self> {
        Self::with_config(kind, EvalConfig::default())
    }

    pub fn with_config(kind: LFunctionKind, config: EvalConfig) -> Result<Self> {
        let phase = match kind {
            LFunctionKind::Zeta => Complex64::new(1.0, 0.0),
            LFunctionKind::Chi4 => chi4_phase()?,
        };
        Ok(Self {
            func: CompletedFunction::with_config(kind, config),
            phase,
            cache: None,
        })
    }

    pub fn with_cache(mut self, cache: Option<ZeroCache>) -> Self {
        self.cache = cache;
        self
    }

    pub fn kind(&self) -> LFunctionKind {
        self.func.kind()
    }

    pub fn function(&self) -> &CompletedFunction {
        &self.func
    }

    /// The unimodular phase `u` with `ξ(1/2 + it) = r(t)·u`.
    pub fn phase(&self) -> Complex64 {
        self.phase
    }

    pub fn generated_with(&self) -> String {
        format!("{};step={SCAN_STEP}", self.func.config().summary())
    }

    /// `(ln|prefactor|, w)` with `ξ(1/2+it) = e^{ln|prefactor|} · w · u`
    /// and `w` real up to rounding.
    fn line_parts(&self, t: f64) -> Result<(f64, f64)> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("ordinate t = {t} must be nonnegative")));
        }
        let f = self.func.factored(Complex64::new(0.5, t))?;
        let w = Complex64::from_polar(1.0, f.log_prefactor.im) * f.core / self.phase;
        // the core carries a factor (s - 1) for zeta
        let floor = match self.kind() {
            LFunctionKind::Zeta => t.max(1.0),
            LFunctionKind::Chi4 => 1.0,
        };
        if w.im.abs() > PHASE_DRIFT_TOL * w.norm().max(floor) {
            return Err(Error::Consistency(format!(
                "critical-line value at t = {t} has imaginary part {:e} against {:e}",
                w.im,
                w.norm()
            )));
        }
        Ok((f.log_prefactor.re, w.re))
    }

    /// `r(t)` with `ξ(1/2 + it) = r(t)·u`, folded into binary64
    /// (saturating, sign preserved).
    pub fn critical_line_value(&self, t: f64) -> Result<f64> {
        let (log_scale, w) = self.line_parts(t)?;
        let v = crate::scaled::ScaledComplex::from_log(Complex64::new(log_scale, 0.0))?
            .mul_c64(Complex64::new(w, 0.0))?;
        Ok(v.re_clamped())
    }

    /// `r(t)` divided by the positive factor `|prefactor|`; same sign as
    /// `r(t)` and of moderate size at every height.
    pub fn normalized_value(&self, t: f64) -> Result<f64> {
        Ok(self.line_parts(t)?.1)
    }

    fn values_on(&self, grid: &[f64]) -> Result<Vec<f64>> {
        grid.par_iter().map(|&t| self.normalized_value(t)).collect()
    }

    /// Sign-change brackets of `r(t)` on the grid `t_lo, t_lo + step, …, t_hi`.
    pub fn bracket_zeros(&self, t_lo: f64, t_hi: f64, step: f64) -> Result<Vec<(f64, f64)>> {
        if !(t_lo >= 0.0 && t_lo < t_hi && step > 0.0) {
            return Err(Error::Domain(format!(
                "bad scan range [{t_lo}, {t_hi}] with step {step}"
            )));
        }
        let cells = ((t_hi - t_lo) / step - 1e-9).ceil() as u64;
        let grid: Vec<f64> = (0..=cells)
            .map(|k| (t_lo + k as f64 * step).min(t_hi))
            .collect();
        let values = self.values_on(&grid)?;
        Ok(sign_changes(&grid, &values)
            .into_iter()
            .map(|(i, _, _)| (grid[i], grid[i + 1]))
            .collect())
    }

    /// Refines a sign-change bracket to width at most `10⁻¹⁰`.
    pub fn refine_zero(&self, bracket: (f64, f64), index: u32) -> Result<ZeroRecord> {
        let (a, b) = bracket;
        let fa = self.normalized_value(a)?;
        let fb = self.normalized_value(b)?;
        self.refine_with_values(a, b, fa, fb, index)
    }

    fn refine_with_values(&self, a: f64, b: f64, fa: f64, fb: f64, index: u32) -> Result<ZeroRecord> {
        if (fa < 0.0) == (fb < 0.0) && fa != 0.0 && fb != 0.0 {
            return Err(Error::Refinement(format!("lost bracket [{a}, {b}]")));
        }
        let scale = fa.abs().max(fb.abs());
        let mut res = brent(|t| self.normalized_value(t), a, b, fa, fb, BRACKET_TOL)?;
        // a zero close to a grid point leaves a small endpoint scale; keep
        // shrinking until the residual bound holds as well
        for xtol in [1e-12, 1e-14, 0.0] {
            if res.value.abs() <= RESIDUAL_TOL * scale || res.width == 0.0 {
                break;
            }
            let (c, fc) = res.other;
            let width = res.width;
            res = brent(|t| self.normalized_value(t), res.root, c, res.value, fc, xtol)?;
            res.width = res.width.min(width);
        }
        Ok(ZeroRecord {
            kind: self.kind(),
            index,
            ordinate: res.root,
            residual: if scale > 0.0 { res.value.abs() / scale } else { 0.0 },
            bracket_width: res.width,
        })
    }

    /// Appends zeros, scanning the canonical grid `k·SCAN_STEP` upward from
    /// the last known zero, until `done(records, scanned_to)` holds.
    fn extend<F>(&self, table: &mut ZeroTable, done: F) -> Result<()>
    where
        F: Fn(&[ZeroRecord], f64) -> bool,
    {
        let last = table.records.last().map(|r| r.ordinate);
        let mut cell = last.map_or(0, |t| (t / SCAN_STEP).floor() as u64);
        let mut scanned_to = last.unwrap_or(0.0);
        while !done(&table.records, scanned_to) {
            if scanned_to > SCAN_CEILING {
                return Err(Error::Range(format!(
                    "zero scan passed the ceiling t = {SCAN_CEILING}"
                )));
            }
            let grid: Vec<f64> = (cell..=cell + CHUNK_CELLS)
                .map(|k| k as f64 * SCAN_STEP)
                .collect();
            let values = self.values_on(&grid)?;
            let fresh: Vec<(f64, f64, f64, f64)> = sign_changes(&grid, &values)
                .into_iter()
                .map(|(i, fa, fb)| (grid[i], grid[i + 1], fa, fb))
                .filter(|&(a, _, _, _)| last.is_none_or(|t| a > t))
                .filter(|&(a, _, _, _)| table.records.last().is_none_or(|r| a > r.ordinate))
                .collect();
            let refined: Vec<ZeroRecord> = fresh
                .par_iter()
                .map(|&(a, b, fa, fb)| self.refine_with_values(a, b, fa, fb, 0))
                .collect::<Result<_>>()?;
            for mut r in refined {
                r.index = table.records.len() as u32 + 1;
                table.records.push(r);
            }
            cell += CHUNK_CELLS;
            scanned_to = *grid.last().unwrap();
        }
        Ok(())
    }

    fn table_until<F>(&self, done: F) -> Result<ZeroTable>
    where
        F: Fn(&[ZeroRecord], f64) -> bool,
    {
        let generated_with = self.generated_with();
        let mut table = self
            .cache
            .as_ref()
            .and_then(|c| c.load(self.kind(), &generated_with))
            .unwrap_or_else(|| ZeroTable::new(self.kind(), generated_with));
        let before = table.records.len();
        self.extend(&mut table, done)?;
        if table.records.len() > before {
            if let Some(cache) = &self.cache {
                // an unwritable cache only costs a recomputation next time
                let _ = cache.store(&table);
            }
        }
        Ok(table)
    }

    /// The first `count` zeros.
    pub fn zeros(&self, count: usize) -> Result<Vec<ZeroRecord>> {
        let mut table = self.table_until(|r, _| r.len() >= count)?;
        table.records.truncate(count);
        Ok(table.records)
    }

    pub fn nth_zero(&self, n: u32) -> Result<ZeroRecord> {
        if n == 0 {
            return Err(Error::Domain("zero index starts at 1".into()));
        }
        Ok(*self.zeros(n as usize)?.last().expect("n ≥ 1 zeros"))
    }

    /// All zeros with ordinate in `[t_lo, t_hi]`, indexed from the bottom.
    pub fn zeros_in_range(&self, t_lo: f64, t_hi: f64) -> Result<Vec<ZeroRecord>> {
        if !(t_lo >= 0.0 && t_lo <= t_hi) {
            return Err(Error::Domain(format!("bad range [{t_lo}, {t_hi}]")));
        }
        if t_hi > SCAN_CEILING {
            return Err(Error::Range(format!("t = {t_hi} above {SCAN_CEILING}")));
        }
        let table = self.table_until(|r, scanned| {
            scanned >= t_hi || r.last().is_some_and(|z| z.ordinate > t_hi)
        })?;
        Ok(table
            .records
            .into_iter()
            .filter(|r| r.ordinate >= t_lo && r.ordinate <= t_hi)
            .collect())
    }

    /// The zero closest to `t`, which must lie within `0.1` of it.
    pub fn zero_near(&self, t: f64) -> Result<ZeroRecord> {
        let found = self.zeros_in_range(0.0, t + 1.0)?;
        found
            .into_iter()
            .filter(|r| (r.ordinate - t).abs() <= 0.1)
            .min_by(|a, b| (a.ordinate - t).abs().total_cmp(&(b.ordinate - t).abs()))
            .ok_or_else(|| Error::Domain(format!("no {} zero within 0.1 of t = {t}", self.kind())))
    }
}

/// Indices `i` where `values[i]` and `values[i+1]` differ in sign (zero
/// counts as positive), with the two values.
fn sign_changes(_grid: &[f64], values: &[f64]) -> Vec<(usize, f64, f64)> {
    values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0] < 0.0) != (w[1] < 0.0))
        .map(|(i, w)| (i, w[0], w[1]))
        .collect()
}
