//! `dbz`: evaluation, zeros, and positivity probes from the command line.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::value::RawValue;

use dbz_core::positivity::KERNEL_NOTE;
use dbz_core::special::{EvalConfig, DEFAULT_CORRECTIONS};
use dbz_core::zeros::{format_significant, ZeroCache, ZeroFinder, ZeroRecord, ZeroTable};
use dbz_core::{Decimal, Error, LFunctionKind, Positivity, ScaledComplex};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ARGUMENT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "dbz", version, about = "Completed zeta / L(s, χ₄) numerics and de Branges positivity probes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output format [default: text, csv for scan]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the output here instead of standard output
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Exit with status 4 when a positivity violation is found
    #[arg(long, global = true)]
    pub assert_nonnegative: bool,
    /// Euler–Maclaurin direct-sum length, or "auto" to choose per point
    #[arg(long, global = true, default_value = "auto", value_parser = parse_auto_u32)]
    pub em_terms: Auto,
    /// Number of Bernoulli correction terms (5..=30)
    #[arg(long, global = true, default_value_t = DEFAULT_CORRECTIONS)]
    pub em_corrections: u32,
    /// Target relative tolerance (1e-14..=1e-6)
    #[arg(long, global = true, default_value = "1e-12")]
    pub tol: f64,
    /// Worker threads, or "auto" for one per processor
    #[arg(long, global = true, default_value = "auto", value_parser = parse_auto_u32)]
    pub jobs: Auto,
    /// Neither read nor write the zero-table cache
    #[arg(long, global = true)]
    pub no_cache: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Auto(pub Option<u32>);

fn parse_auto_u32(s: &str) -> Result<Auto, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Auto(None));
    }
    match s.parse::<u32>() {
        Ok(n) if n > 0 => Ok(Auto(Some(n))),
        _ => Err(format!("expected a positive integer or 'auto', got '{s}'")),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Zeta,
    Chi4,
}

impl From<Kind> for LFunctionKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Zeta => LFunctionKind::Zeta,
            Kind::Chi4 => LFunctionKind::Chi4,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the completed function at s
    Eval {
        #[arg(long, value_enum, default_value = "zeta")]
        kind: Kind,
        /// Point as RE,IM
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        s: Complex64,
    },
    /// List critical-line zeros
    #[command(group = clap::ArgGroup::new("which").required(true))]
    Zeros {
        #[arg(long, value_enum, default_value = "zeta")]
        kind: Kind,
        /// The first N zeros
        #[arg(long, group = "which")]
        count: Option<u32>,
        /// All zeros with ordinate in LO,HI
        #[arg(long, group = "which", value_parser = parse_pair)]
        range: Option<(f64, f64)>,
    },
    /// Sign of Re{-f'(rho) f(1+rho)} at a zero
    #[command(group = clap::ArgGroup::new("zero").required(true))]
    KernelCheck {
        #[arg(long, value_enum, default_value = "zeta")]
        kind: Kind,
        /// 1-based zero index
        #[arg(long, group = "zero")]
        zero_index: Option<u32>,
        /// Use the zero nearest to this ordinate
        #[arg(long, group = "zero")]
        ordinate: Option<f64>,
    },
    /// g(t) = Re{f(1+it)/f(2+it)}
    Herglotz {
        #[arg(long, value_enum, default_value = "zeta")]
        kind: Kind,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Tabulate g on a grid and report negative runs
    Scan {
        #[arg(long, value_enum, default_value = "zeta")]
        kind: Kind,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 0.002)]
        step: f64,
        /// Also write a gnuplot script to OUTPUT.gp (needs --output)
        #[arg(long)]
        emit_plot_script: bool,
    },
    /// Smallest eigenvalue of the kernel Gram matrix
    Gram {
        #[arg(long, value_enum, default_value = "zeta")]
        kind: Kind,
        /// Points as "re,im;re,im;..."
        #[arg(long, allow_hyphen_values = true, value_parser = parse_points)]
        points: Points,
    },
    /// Recompute the four reference counterexample values
    Repro,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Points(pub Vec<Complex64>);

pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two comma-separated numbers, got '{s}'"))?;
    let num = |x: &str| {
        x.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("'{}' is not a finite number", x.trim()))
    };
    Ok((num(a)?, num(b)?))
}

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    parse_pair(s).map(|(re, im)| Complex64::new(re, im))
}

pub fn parse_points(s: &str) -> Result<Points, String> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(parse_complex)
        .collect::<Result<Vec<_>, _>>()
        .map(Points)
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Emitted {
    pub body: String,
    pub violation: bool,
    pub extra_files: Vec<(PathBuf, String)>,
    /// Reported after the output is written.
    pub failure: Option<Failure>,
}

/// A failed run: exit status and one-line reason.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub reason: String,
}

impl Failure {
    fn argument(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_ARGUMENT,
            reason: format!("argument: {}", msg.into()),
        }
    }

    /// One line, for the error stream.
    pub fn line(&self) -> String {
        format!("error: {}", self.reason.replace(['\n', '\r'], " "))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Parameter(_) | Error::Pole(_) => EXIT_ARGUMENT,
            _ => EXIT_NUMERICAL,
        };
        let category = match e {
            Error::Domain(_) | Error::Parameter(_) | Error::Pole(_) => "argument",
            _ => "numerical",
        };
        Self {
            code,
            reason: format!("{category}: {e}"),
        }
    }
}

type Out = Result<Emitted, Failure>;

struct Ctx {
    config: EvalConfig,
    format: Format,
    cache: Option<ZeroCache>,
}

impl Ctx {
    fn finder(&self, kind: LFunctionKind) -> Result<ZeroFinder, Failure> {
        Ok(ZeroFinder::with_config(kind, self.config)?.with_cache(self.cache.clone()))
    }

    fn positivity(&self, kind: LFunctionKind) -> Positivity {
        Positivity::with_config(kind, self.config)
    }
}

fn validate_global(g: &GlobalArgs) -> Result<EvalConfig, Failure> {
    if !(5..=30).contains(&g.em_corrections) {
        return Err(Failure::argument(format!(
            "--em-corrections {} outside 5..=30",
            g.em_corrections
        )));
    }
    if !(1e-14..=1e-6).contains(&g.tol) {
        return Err(Failure::argument(format!("--tol {:e} outside [1e-14, 1e-6]", g.tol)));
    }
    Ok(EvalConfig {
        em_terms: g.em_terms.0,
        em_corrections: g.em_corrections,
        target_rel_tol: g.tol,
    })
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Out {
    let config = validate_global(&cli.global)?;
    let format = cli.global.format.unwrap_or(match cli.command {
        Command::Scan { .. } => Format::Csv,
        _ => Format::Text,
    });
    let cache = if cli.global.no_cache {
        None
    } else {
        ZeroCache::from_env()
    };
    let ctx = Ctx {
        config,
        format,
        cache,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.global.jobs.0 {
        pool = pool.num_threads(n as usize);
    }
    let pool = pool
        .build()
        .map_err(|e| Failure::argument(format!("--jobs: {e}")))?;
    pool.install(|| dispatch(&ctx, cli))
}

fn dispatch(ctx: &Ctx, cli: &Cli) -> Out {
    match &cli.command {
        Command::Eval { kind, s } => eval(ctx, (*kind).into(), *s),
        Command::Zeros { kind, count, range } => zeros(ctx, (*kind).into(), *count, *range),
        Command::KernelCheck {
            kind,
            zero_index,
            ordinate,
        } => kernel_check(ctx, (*kind).into(), *zero_index, *ordinate),
        Command::Herglotz { kind, t } => herglotz(ctx, (*kind).into(), *t),
        Command::Scan {
            kind,
            from,
            to,
            step,
            emit_plot_script,
        } => scan(ctx, (*kind).into(), *from, *to, *step, *emit_plot_script, cli.global.output.as_ref()),
        Command::Gram { kind, points } => gram(ctx, (*kind).into(), &points.0),
        Command::Repro => repro(ctx),
    }
}

fn raw(text: String) -> Box<RawValue> {
    RawValue::from_string(text).expect("number literal")
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn decimal_parts(d: Option<Decimal>) -> (f64, i64) {
    d.map_or((0.0, 0), |d| (d.mantissa, d.exp10))
}

fn decimal_text(d: Option<Decimal>) -> String {
    d.map_or_else(|| "0".to_string(), |d| format!("{d:.15}"))
}

fn eval(ctx: &Ctx, kind: LFunctionKind, s: Complex64) -> Out {
    let func = dbz_core::CompletedFunction::with_config(kind, ctx.config);
    let v = func.value(s)?;
    let (re_m, re_e) = decimal_parts(v.re_decimal());
    let (im_m, im_e) = decimal_parts(v.im_decimal());
    let body = match ctx.format {
        Format::Text => format!("kind={kind} s={},{} value={v}\n", s.re, s.im),
        Format::Csv => format!(
            "kind,s_re,s_im,re,im\n{kind},{},{},{},{}\n",
            s.re,
            s.im,
            decimal_text(v.re_decimal()),
            decimal_text(v.im_decimal())
        ),
        Format::Json => {
            #[derive(Serialize)]
            struct J {
                kind: &'static str,
                s: [f64; 2],
                re_mantissa: f64,
                re_exp10: i64,
                im_mantissa: f64,
                im_exp10: i64,
            }
            json(&J {
                kind: kind.as_str(),
                s: [s.re, s.im],
                re_mantissa: re_m,
                re_exp10: re_e,
                im_mantissa: im_m,
                im_exp10: im_e,
            })
        }
    };
    Ok(Emitted {
        body,
        ..Default::default()
    })
}

#[derive(Serialize)]
struct ZeroJson {
    kind: &'static str,
    index: u32,
    ordinate: Box<RawValue>,
    residual: f64,
}

fn zeros(ctx: &Ctx, kind: LFunctionKind, count: Option<u32>, range: Option<(f64, f64)>) -> Out {
    let finder = ctx.finder(kind)?;
    let records = match (count, range) {
        (Some(0), _) => return Err(Failure::argument("--count must be at least 1")),
        (Some(n), _) => finder.zeros(n as usize)?,
        (None, Some((lo, hi))) => finder.zeros_in_range(lo, hi)?,
        (None, None) => return Err(Failure::argument("one of --count or --range is required")),
    };
    let body = match ctx.format {
        Format::Text => {
            let mut s = String::new();
            for r in &records {
                writeln!(
                    s,
                    "{kind} #{} t={} residual={:e} width={:e}",
                    r.index,
                    format_significant(r.ordinate, 18),
                    r.residual,
                    r.bracket_width
                )
                .unwrap();
            }
            s
        }
        Format::Csv => ZeroTable {
            kind,
            records: records.clone(),
            generated_with: finder.generated_with(),
        }
        .to_csv(),
        Format::Json => json(
            &records
                .iter()
                .map(|r| ZeroJson {
                    kind: kind.as_str(),
                    index: r.index,
                    ordinate: raw(format_significant(r.ordinate, 18)),
                    residual: r.residual,
                })
                .collect::<Vec<_>>(),
        ),
    };
    Ok(Emitted {
        body,
        ..Default::default()
    })
}

fn verdict(violates: bool) -> &'static str {
    if violates {
        "VIOLATED"
    } else {
        "SATISFIED"
    }
}

fn kernel_check(ctx: &Ctx, kind: LFunctionKind, index: Option<u32>, ordinate: Option<f64>) -> Out {
    let finder = ctx.finder(kind)?;
    let zero: ZeroRecord = match (index, ordinate) {
        (Some(n), _) => finder.nth_zero(n)?,
        (None, Some(t)) => finder.zero_near(t)?,
        (None, None) => return Err(Failure::argument("one of --zero-index or --ordinate is required")),
    };
    let v = ctx.positivity(kind).kernel_positivity(&zero)?;
    let re = v.value.re_decimal();
    let (m, e) = decimal_parts(re);
    let ord = format_significant(zero.ordinate, 18);
    let body = match ctx.format {
        Format::Text => format!(
            "kind={kind} zero={} ordinate={ord} re_value={} sign={} verdict={}\nnote: {KERNEL_NOTE}\n",
            zero.index,
            decimal_text(re),
            v.real_sign,
            verdict(v.violates)
        ),
        Format::Csv => format!(
            "kind,index,ordinate,re_value_mantissa,re_value_exp10,sign,verdict\n{kind},{},{ord},{m},{e},{},{}\n",
            zero.index,
            v.real_sign,
            verdict(v.violates)
        ),
        Format::Json => {
            #[derive(Serialize)]
            struct J {
                kind: &'static str,
                index: u32,
                ordinate: Box<RawValue>,
                re_value_mantissa: f64,
                re_value_exp10: i64,
                sign: i8,
                verdict: &'static str,
            }
            json(&J {
                kind: kind.as_str(),
                index: zero.index,
                ordinate: raw(ord.clone()),
                re_value_mantissa: m,
                re_value_exp10: e,
                sign: v.real_sign,
                verdict: verdict(v.violates),
            })
        }
    };
    Ok(Emitted {
        body,
        violation: v.violates,
        ..Default::default()
    })
}

fn herglotz(ctx: &Ctx, kind: LFunctionKind, t: f64) -> Out {
    let g = ctx.positivity(kind).herglotz_ratio(t)?;
    let body = match ctx.format {
        Format::Text => format!("kind={kind} t={t} g={g:e} verdict={}\n", verdict(g < 0.0)),
        Format::Csv => format!("t,g\n{t:.16e},{g:.16e}\n"),
        Format::Json => {
            #[derive(Serialize)]
            struct J {
                kind: &'static str,
                t: f64,
                g: f64,
            }
            json(&J {
                kind: kind.as_str(),
                t,
                g,
            })
        }
    };
    Ok(Emitted {
        body,
        violation: g < 0.0,
        ..Default::default()
    })
}

/// Gnuplot script plotting a scan CSV written to `data`.
pub fn plot_script(kind: LFunctionKind, data: &std::path::Path, from: f64, to: f64) -> String {
    let name = data.file_name().map_or_else(|| data.display().to_string(), |n| n.to_string_lossy().into_owned());
    format!(
        "set datafile separator ','\n\
         set datafile commentschars '#'\n\
         set key autotitle columnhead\n\
         set key off\n\
         set xrange [{from}:{to}]\n\
         set xlabel 't'\n\
         set ylabel 'g(t)'\n\
         set title '{kind}: Re f(1+it)/f(2+it)'\n\
         set xzeroaxis\n\
         set terminal pngcairo size 900,600\n\
         set output '{name}.png'\n\
         plot '{name}' using 1:2 with lines\n"
    )
}

fn scan(
    ctx: &Ctx,
    kind: LFunctionKind,
    from: f64,
    to: f64,
    step: f64,
    emit_plot_script: bool,
    output: Option<&PathBuf>,
) -> Out {
    if emit_plot_script && output.is_none() {
        return Err(Failure::argument("--emit-plot-script needs --output"));
    }
    let s = ctx.positivity(kind).scan_herglotz(from, to, step)?;
    let body = match ctx.format {
        Format::Csv => s.to_csv(),
        Format::Text => {
            let mut out = String::new();
            for r in &s.rows {
                writeln!(out, "t={:.16e} g={:.16e}", r.t, r.g).unwrap();
            }
            for (a, b) in &s.negative {
                writeln!(out, "negative: [{a:.16e}, {b:.16e}]").unwrap();
            }
            out
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                t: f64,
                g: f64,
            }
            #[derive(Serialize)]
            struct J {
                kind: &'static str,
                rows: Vec<Row>,
                negative: Vec<[f64; 2]>,
            }
            json(&J {
                kind: kind.as_str(),
                rows: s.rows.iter().map(|r| Row { t: r.t, g: r.g }).collect(),
                negative: s.negative.iter().map(|&(a, b)| [a, b]).collect(),
            })
        }
    };
    let mut extra_files = Vec::new();
    if let (true, Some(path)) = (emit_plot_script, output) {
        let mut gp = path.clone().into_os_string();
        gp.push(".gp");
        extra_files.push((PathBuf::from(gp), plot_script(kind, path, from, to)));
    }
    Ok(Emitted {
        body,
        violation: !s.negative.is_empty(),
        extra_files,
        failure: None,
    })
}

fn gram(ctx: &Ctx, kind: LFunctionKind, points: &[Complex64]) -> Out {
    let rep = ctx.positivity(kind).gram_check(points)?;
    let min_abs = Decimal::from_binary(rep.min_eigenvalue, rep.scale_exp2);
    let body = match ctx.format {
        Format::Text => {
            let mut out = format!(
                "kind={kind} order={} min_eigenvalue={} normalized_min_eigenvalue={:e} norm_max={:e} scale=2^{} verdict={}\n",
                points.len(),
                decimal_text(min_abs),
                rep.min_eigenvalue,
                rep.norm_max,
                rep.scale_exp2,
                verdict(rep.violates)
            );
            for (a, row) in rep.matrix.iter().enumerate() {
                for (b, z) in row.iter().enumerate() {
                    writeln!(out, "M[{a}][{b}] = {z}").unwrap();
                }
            }
            out
        }
        Format::Csv => format!(
            "kind,order,min_eigenvalue,normalized_min_eigenvalue,norm_max,scale_exp2,verdict\n{kind},{},{},{:e},{:e},{},{}\n",
            points.len(),
            decimal_text(min_abs),
            rep.min_eigenvalue,
            rep.norm_max,
            rep.scale_exp2,
            verdict(rep.violates)
        ),
        Format::Json => {
            #[derive(Serialize)]
            struct J {
                kind: &'static str,
                points: Vec<[f64; 2]>,
                min_eigenvalue_mantissa: f64,
                min_eigenvalue_exp10: i64,
                normalized_min_eigenvalue: f64,
                norm_max: f64,
                scale_exp2: i32,
                verdict: &'static str,
            }
            let (m, e) = decimal_parts(min_abs);
            json(&J {
                kind: kind.as_str(),
                points: points.iter().map(|z| [z.re, z.im]).collect(),
                min_eigenvalue_mantissa: m,
                min_eigenvalue_exp10: e,
                normalized_min_eigenvalue: rep.min_eigenvalue,
                norm_max: rep.norm_max,
                scale_exp2: rep.scale_exp2,
                verdict: verdict(rep.violates),
            })
        }
    };
    Ok(Emitted {
        body,
        violation: rep.violates,
        ..Default::default()
    })
}

/// How a reproduced value is compared with its reference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tolerance {
    Relative(f64),
    Absolute(f64),
}

/// One reproduced quantity.
#[derive(Clone, Debug, PartialEq)]
pub struct ReproLine {
    pub label: &'static str,
    pub computed: Decimal,
    pub reference: Decimal,
    /// Measured the way `tolerance` is.
    pub deviation: f64,
    pub rel_deviation: f64,
    pub tolerance: Tolerance,
    pub ok: bool,
}

pub const CHI4_REFERENCE_ZERO: f64 = 67.636_920_863_546_068_4;

fn to_decimal(v: ScaledComplex) -> Result<Decimal, Failure> {
    v.re_decimal().ok_or_else(|| Failure {
        code: EXIT_NUMERICAL,
        reason: "numerical: vanishing real part".into(),
    })
}

fn compare(label: &'static str, computed: Decimal, reference: Decimal, tolerance: Tolerance) -> ReproLine {
    let c = computed.mantissa * 10f64.powi((computed.exp10 - reference.exp10) as i32);
    let r = reference.mantissa;
    let rel_deviation = ((c - r) / r).abs();
    let deviation = match tolerance {
        Tolerance::Relative(_) => rel_deviation,
        Tolerance::Absolute(_) => ((c - r) * 10f64.powi(reference.exp10 as i32)).abs(),
    };
    let bound = match tolerance {
        Tolerance::Relative(b) | Tolerance::Absolute(b) => b,
    };
    ReproLine {
        label,
        computed,
        reference,
        deviation,
        rel_deviation,
        tolerance,
        ok: deviation <= bound,
    }
}

/// The four reference counterexample quantities, recomputed.
pub fn repro_lines(config: &EvalConfig, cache: Option<ZeroCache>) -> Result<Vec<ReproLine>, Failure> {
    let zeta = LFunctionKind::Zeta;
    let chi4 = LFunctionKind::Chi4;
    let zfind = ZeroFinder::with_config(zeta, *config)?.with_cache(cache.clone());
    let cfind = ZeroFinder::with_config(chi4, *config)?.with_cache(cache);
    let zpos = Positivity::with_config(zeta, *config);
    let cpos = Positivity::with_config(chi4, *config);

    let k34 = zpos.kernel_positivity(&zfind.nth_zero(34)?)?;
    let g282 = zpos.herglotz_ratio(282.0)?;
    let k4 = cpos.kernel_positivity(&cfind.zero_near(CHI4_REFERENCE_ZERO)?)?;
    let g4 = cpos.herglotz_ratio(8714.2)?;

    let d = |m: f64, e: i64| Decimal { mantissa: m, exp10: e };
    Ok(vec![
        compare(
            "zeta kernel Re{-xi'(rho_34) xi(1+rho_34)}",
            to_decimal(k34.value)?,
            d(-5.389_100_507_182_945, -69),
            Tolerance::Relative(1e-6),
        ),
        compare(
            "zeta herglotz g(282)",
            Decimal::from_f64(g282),
            d(-1.319_57, -4),
            Tolerance::Absolute(1e-8),
        ),
        compare(
            "chi4 kernel at t=67.6369208635460684",
            to_decimal(k4.value)?,
            d(-2.310_349_004_993_483_456, -45),
            Tolerance::Relative(1e-6),
        ),
        compare(
            "chi4 herglotz g(8714.2)",
            Decimal::from_f64(g4),
            d(-4.223_406_07, -4),
            Tolerance::Relative(1e-6),
        ),
    ])
}

fn repro(ctx: &Ctx) -> Out {
    let lines = repro_lines(&ctx.config, ctx.cache.clone())?;
    let tol_text = |t: Tolerance| match t {
        Tolerance::Relative(b) => format!("rel {b:e}"),
        Tolerance::Absolute(b) => format!("abs {b:e}"),
    };
    let checked = |l: &ReproLine| match l.tolerance {
        Tolerance::Relative(b) => format!("tol {b:e}"),
        Tolerance::Absolute(b) => format!("abs deviation {:.2e}, tol {b:e}", l.deviation),
    };
    let body = match ctx.format {
        Format::Text => lines
            .iter()
            .map(|l| {
                format!(
                    "{}: computed {:.15} reference {} rel deviation {:.2e} ({}) {}\n",
                    l.label,
                    l.computed,
                    reference_text(l.reference),
                    l.rel_deviation,
                    checked(l),
                    if l.ok { "ok" } else { "MISMATCH" }
                )
            })
            .collect(),
        Format::Csv => {
            let mut out = String::from("quantity,computed,reference,rel_deviation,deviation,tolerance,ok\n");
            for l in &lines {
                writeln!(
                    out,
                    "{},{:.15},{},{:e},{:e},{},{}",
                    l.label,
                    l.computed,
                    reference_text(l.reference),
                    l.rel_deviation,
                    l.deviation,
                    tol_text(l.tolerance),
                    l.ok
                )
                .unwrap();
            }
            out
        }
        Format::Json => {
            #[derive(Serialize)]
            struct J {
                quantity: &'static str,
                computed_mantissa: f64,
                computed_exp10: i64,
                reference_mantissa: f64,
                reference_exp10: i64,
                rel_deviation: f64,
                deviation: f64,
                tolerance: String,
                ok: bool,
            }
            json(
                &lines
                    .iter()
                    .map(|l| J {
                        quantity: l.label,
                        computed_mantissa: l.computed.mantissa,
                        computed_exp10: l.computed.exp10,
                        reference_mantissa: l.reference.mantissa,
                        reference_exp10: l.reference.exp10,
                        rel_deviation: l.rel_deviation,
                        deviation: l.deviation,
                        tolerance: tol_text(l.tolerance),
                        ok: l.ok,
                    })
                    .collect::<Vec<_>>(),
            )
        }
    };
    let failure = (!lines.iter().all(|l| l.ok)).then(|| Failure {
        code: EXIT_NUMERICAL,
        reason: "numerical: reproduction mismatch".into(),
    });
    Ok(Emitted {
        body,
        failure,
        ..Default::default()
    })
}

/// References at the precision they are quoted with.
fn reference_text(d: Decimal) -> String {
    format!("{}e{}", d.mantissa, d.exp10)
}

/// Full command-line entry: parse, run, write outputs. Returns the exit
/// status, standard output, and standard error text.
pub fn main_with_args<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => (EXIT_OK, e.to_string(), String::new()),
                _ => {
                    let first = e
                        .to_string()
                        .lines()
                        .next()
                        .unwrap_or("invalid arguments")
                        .trim_start_matches("error: ")
                        .to_string();
                    let f = Failure::argument(format!("{first} (see --help)"));
                    (f.code, String::new(), f.line() + "\n")
                }
            };
        }
    };
    let emitted = match run(&cli) {
        Ok(e) => e,
        Err(f) => return (f.code, String::new(), f.line() + "\n"),
    };
    let mut stdout = String::new();
    match &cli.global.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &emitted.body) {
                let f = Failure::argument(format!("cannot write {}: {e}", path.display()));
                return (f.code, String::new(), f.line() + "\n");
            }
        }
        None => stdout = emitted.body.clone(),
    }
    for (path, text) in &emitted.extra_files {
        if let Err(e) = std::fs::write(path, text) {
            let f = Failure::argument(format!("cannot write {}: {e}", path.display()));
            return (f.code, stdout, f.line() + "\n");
        }
    }
    if let Some(f) = emitted.failure {
        return (f.code, stdout, f.line() + "\n");
    }
    if cli.global.assert_nonnegative && emitted.violation {
        return (
            EXIT_VIOLATION,
            stdout,
            "error: violation: positivity condition fails\n".to_string(),
        );
    }
    (EXIT_OK, stdout, String::new())
}
