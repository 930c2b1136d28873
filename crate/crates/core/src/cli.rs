//! `statdistill` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parameter
//! error.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fock::{self, Statistics};
use crate::linalg::{DensityMatrix4, Matrix4};
use crate::measures::{self, DistillationSummary};
use crate::protocol::{
    self, distill, make_pair_state, ProtocolConfig, ProtocolError, SharedPairState,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const CSV_HEADER: [&str; 12] = [
    "statistics",
    "a",
    "b",
    "c_re",
    "c_im",
    "n",
    "p_cum",
    "concurrence_n",
    "initial_concurrence",
    "asymptotic_concurrence",
    "asymptotic_probability",
    "distillable",
];

/// Random pairs drawn by `verify`.
pub const VERIFY_PAIRS: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "statdistill", version, about = "Particle-statistics entanglement distillation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the protocol for one pair state.
    Run(RunArgs),
    /// Run a grid of pair states and write one CSV row per admissible point.
    Sweep(SweepArgs),
    /// Cross-check the splitter oracle, the iterated map and the closed forms.
    Verify(VerifyArgs),
    /// Print the asymptotic summary for one pair state as JSON.
    Limits(LimitsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatisticsArg {
    Fermion,
    Boson,
}

impl From<StatisticsArg> for Statistics {
    fn from(s: StatisticsArg) -> Self {
        match s {
            StatisticsArg::Fermion => Statistics::Fermion,
            StatisticsArg::Boson => Statistics::Boson,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct PairArgs {
    /// Weight a of the pair state.
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    /// Weight b; defaults to 1 - a, otherwise must satisfy a + b = 1.
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    /// Real part of the coherence c.
    #[arg(long = "c-re", allow_negative_numbers = true)]
    c_re: Option<f64>,
    /// Imaginary part of the coherence c.
    #[arg(long = "c-im", allow_negative_numbers = true)]
    c_im: Option<f64>,
    /// Modulus of c (polar form).
    #[arg(long = "c-abs", allow_negative_numbers = true)]
    c_abs: Option<f64>,
    /// Phase of c in radians (polar form).
    #[arg(long = "c-phase", allow_negative_numbers = true)]
    c_phase: Option<f64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Number of Bob pairs sent through splitters.
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, value_enum, default_value_t = StatisticsArg::Fermion)]
    statistics: StatisticsArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Range of a as start:stop:step (or a single value).
    #[arg(long = "a-range")]
    a_range: RangeSpec,
    /// Range of |c| as start:stop:step (or a single value).
    #[arg(long = "c-abs-range", default_value = "0")]
    c_abs_range: RangeSpec,
    /// Phase of c in radians, shared by every grid point.
    #[arg(long = "c-phase", default_value_t = 0.0, allow_negative_numbers = true)]
    c_phase: f64,
    #[arg(long, default_value_t = 1)]
    n: u32,
    #[arg(long, value_enum, default_value_t = StatisticsArg::Fermion)]
    statistics: StatisticsArg,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Largest step count checked against the closed form.
    #[arg(long = "n-max", default_value_t = 30)]
    n_max: u32,
    /// Absolute tolerance every check must meet.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Seed for the random pair states.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Args)]
struct LimitsArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Grid resolution for the efficiency maximum over a.
    #[arg(long, default_value_t = 1000)]
    resolution: u32,
}

#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<ProtocolError> for UsageError {
    fn from(e: ProtocolError) -> Self {
        UsageError(e.to_string())
    }
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

const MAX_RANGE_POINTS: usize = 1_000_000;

impl RangeSpec {
    pub fn single(v: f64) -> Self {
        RangeSpec {
            start: v,
            stop: v,
            step: 1.0,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.stop == self.start {
            return vec![self.start];
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl FromStr for RangeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| format!("invalid number {p:?}: {e}"))
        };
        let spec = match parts.as_slice() {
            [v] => RangeSpec::single(num(v)?),
            [a, b, c] => RangeSpec {
                start: num(a)?,
                stop: num(b)?,
                step: num(c)?,
            },
            _ => return Err(format!("expected start:stop:step or a single value, got {s:?}")),
        };
        if !(spec.start.is_finite() && spec.stop.is_finite() && spec.step.is_finite()) {
            return Err("range bounds must be finite".into());
        }
        if spec.stop < spec.start {
            return Err(format!("empty range: stop {} < start {}", spec.stop, spec.start));
        }
        if spec.step <= 0.0 {
            return Err(format!("range step must be positive, got {}", spec.step));
        }
        if (spec.stop - spec.start) / spec.step >= MAX_RANGE_POINTS as f64 {
            return Err(format!("range has more than {MAX_RANGE_POINTS} points"));
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub a_range: RangeSpec,
    pub c_abs_range: RangeSpec,
    pub c_phase: f64,
    pub n_steps: u32,
    pub statistics: Statistics,
}

/// One protocol run, in the shape written to CSV and JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub statistics: Statistics,
    pub a: f64,
    pub b: f64,
    pub c_re: f64,
    pub c_im: f64,
    pub n: u32,
    pub p_cum: f64,
    pub concurrence_n: f64,
    pub initial_concurrence: f64,
    pub asymptotic_concurrence: Option<f64>,
    pub asymptotic_probability: f64,
    pub distillable: bool,
}

impl RunRecord {
    pub fn compute(pair: &SharedPairState, n: u32, statistics: Statistics) -> Result<Self, ProtocolError> {
        let result = distill(&ProtocolConfig::new(*pair, n, statistics))?;
        let summary = measures::summarize(pair);
        Ok(RunRecord {
            statistics,
            a: pair.a(),
            b: pair.b(),
            c_re: pair.c().re,
            c_im: pair.c().im,
            n,
            p_cum: result.p_f,
            concurrence_n: result.final_concurrence(),
            initial_concurrence: summary.initial_concurrence,
            asymptotic_concurrence: summary.asymptotic_concurrence,
            asymptotic_probability: summary.asymptotic_probability,
            distillable: summary.distillable,
        })
    }

    pub fn csv_fields(&self) -> [String; 12] {
        [
            self.statistics.to_string(),
            fmt_f64(self.a),
            fmt_f64(self.b),
            fmt_f64(self.c_re),
            fmt_f64(self.c_im),
            self.n.to_string(),
            fmt_f64(self.p_cum),
            fmt_f64(self.concurrence_n),
            fmt_f64(self.initial_concurrence),
            self.asymptotic_concurrence.map(fmt_f64).unwrap_or_default(),
            fmt_f64(self.asymptotic_probability),
            self.distillable.to_string(),
        ]
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(out: W, records: &[RunRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.csv_fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Evaluates every admissible grid point, `a` ascending then `|c|` ascending.
/// Returns the records and the number of skipped points.
pub fn sweep_records(spec: &SweepSpec) -> Result<(Vec<RunRecord>, usize), ProtocolError> {
    let mut records = Vec::new();
    let mut skipped = 0;
    let c_values = spec.c_abs_range.values();
    for a in spec.a_range.values() {
        for &c_abs in &c_values {
            let c = Complex64::from_polar(c_abs, spec.c_phase);
            match make_pair_state(a, 1.0 - a, c) {
                Ok(pair) => records.push(RunRecord::compute(&pair, spec.n_steps, spec.statistics)?),
                Err(_) => skipped += 1,
            }
        }
    }
    Ok((records, skipped))
}

impl PairArgs {
    fn to_pair(&self) -> Result<SharedPairState, UsageError> {
        let cartesian = self.c_re.is_some() || self.c_im.is_some();
        let polar = self.c_abs.is_some() || self.c_phase.is_some();
        let c = match (cartesian, polar) {
            (true, true) => {
                return Err(UsageError(
                    "give c either as --c-re/--c-im or as --c-abs/--c-phase, not both".into(),
                ))
            }
            (_, true) => Complex64::from_polar(self.c_abs.unwrap_or(0.0), self.c_phase.unwrap_or(0.0)),
            _ => Complex64::new(self.c_re.unwrap_or(0.0), self.c_im.unwrap_or(0.0)),
        };
        let b = self.b.unwrap_or(1.0 - self.a);
        Ok(make_pair_state(self.a, b, c)?)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(&args, out),
        Command::Sweep(args) => cmd_sweep(&args, err),
        Command::Verify(args) => cmd_verify(&args, out),
        Command::Limits(args) => cmd_limits(&args, out),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn io_err(e: impl fmt::Display) -> UsageError {
    UsageError(format!("write failed: {e}"))
}

fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<i32, UsageError> {
    let pair = args.pair.to_pair()?;
    if args.n > protocol::DEFAULT_MAX_STEPS {
        return Err(ProtocolError::TooManySteps {
            requested: args.n,
            max: protocol::DEFAULT_MAX_STEPS,
        }
        .into());
    }
    let record = RunRecord::compute(&pair, args.n, args.statistics.into())?;
    match args.format {
        Format::Json => {
            serde_json::to_writer(&mut *out, &record).map_err(io_err)?;
            writeln!(out).map_err(io_err)?;
        }
        Format::Csv => write_csv(&mut *out, std::slice::from_ref(&record)).map_err(io_err)?,
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(args: &SweepArgs, err: &mut dyn Write) -> Result<i32, UsageError> {
    if args.n > protocol::DEFAULT_MAX_STEPS {
        return Err(ProtocolError::TooManySteps {
            requested: args.n,
            max: protocol::DEFAULT_MAX_STEPS,
        }
        .into());
    }
    let spec = SweepSpec {
        a_range: args.a_range,
        c_abs_range: args.c_abs_range,
        c_phase: args.c_phase,
        n_steps: args.n,
        statistics: args.statistics.into(),
    };
    let (records, skipped) = sweep_records(&spec)?;
    for r in &records {
        make_pair_state(r.a, r.b, Complex64::new(r.c_re, r.c_im))?;
    }
    let file = std::fs::File::create(&args.out)
        .map_err(|e| UsageError(format!("cannot write {}: {e}", args.out.display())))?;
    write_csv(std::io::BufWriter::new(file), &records)
        .map_err(|e| UsageError(format!("cannot write {}: {e}", args.out.display())))?;
    writeln!(err, "wrote {} rows, skipped {skipped} inadmissible points", records.len())
        .map_err(io_err)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct EfficiencyMax {
    value: f64,
    a: f64,
    b: f64,
}

#[derive(Debug, Serialize)]
struct LimitsReport {
    a: f64,
    b: f64,
    c_re: f64,
    c_im: f64,
    #[serde(flatten)]
    summary: DistillationSummary,
    efficiency_grid_max: EfficiencyMax,
}

fn cmd_limits(args: &LimitsArgs, out: &mut dyn Write) -> Result<i32, UsageError> {
    let pair = args.pair.to_pair()?;
    let (value, a) = measures::efficiency_grid_max(args.resolution);
    let report = LimitsReport {
        a: pair.a(),
        b: pair.b(),
        c_re: pair.c().re,
        c_im: pair.c().im,
        summary: measures::summarize(&pair),
        efficiency_grid_max: EfficiencyMax { value, a, b: 1.0 - a },
    };
    serde_json::to_writer_pretty(&mut *out, &report).map_err(io_err)?;
    writeln!(out).map_err(io_err)?;
    Ok(EXIT_OK)
}

/// Outcome of one `verify` check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub worst_deviation: f64,
    pub passed: bool,
}

/// Random admissible pair: `a` uniform, `|c|` uniform in `[0, √(ab)]`, phase
/// uniform.
pub fn random_pair(rng: &mut impl Rng) -> SharedPairState {
    let a: f64 = rng.random();
    let b = 1.0 - a;
    let c_abs = rng.random::<f64>() * (a * b).sqrt();
    let phase = rng.random::<f64>() * 2.0 * PI;
    make_pair_state(a, b, Complex64::from_polar(c_abs, phase))
        .or_else(|_| make_pair_state(a, b, Complex64::new(0.0, 0.0)))
        .expect("a in [0, 1) with c = 0 is always admissible")
}

/// Runs every `verify` check and returns their results in order.
pub fn verification_checks(n_max: u32, tol: f64, seed: u64) -> Result<Vec<CheckResult>, ProtocolError> {
    let mut checks = Vec::new();
    let mut push = |name, worst: f64| {
        checks.push(CheckResult {
            name,
            worst_deviation: worst,
            passed: worst.is_finite() && worst <= tol,
        })
    };

    let refs = fock::check_reference_states();
    push("(i) splitter output vs printed B1/B2 amplitudes", refs.b1_deviation.max(refs.b2_deviation));

    let expected = [std::f64::consts::FRAC_1_SQRT_2, 1.0, 1.0, std::f64::consts::FRAC_1_SQRT_2];
    let mut worst = 0.0f64;
    for stats in Statistics::ALL {
        let derivation = fock::derive_step(stats);
        for (f, e) in derivation.factors().iter().zip(expected) {
            worst = worst.max((f - e).abs());
        }
        worst = worst.max((derivation.alpha_kappa_overlap() - Complex64::new(1.0, 0.0)).norm());
        worst = worst.max(derivation.relative_phase_spread());
    }
    push("(ii) oracle step factors vs (1/sqrt2, 1, 1, 1/sqrt2), both statistics", worst);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<SharedPairState> = (0..VERIFY_PAIRS).map(|_| random_pair(&mut rng)).collect();
    let mut state_dev = 0.0f64;
    let mut conc_dev = 0.0f64;
    let mut composite_dev = 0.0f64;
    for pair in &pairs {
        let result = distill(&ProtocolConfig::new(*pair, n_max, Statistics::Fermion))?;
        let boson = distill(&ProtocolConfig::new(*pair, n_max, Statistics::Boson))?;
        state_dev = state_dev.max(result.final_state.entries().max_abs_diff(boson.final_state.entries()));
        for (k, step) in result.per_step.iter().enumerate() {
            let n = k as u32 + 1;
            let (closed, p_f) = protocol::final_state_closed_form(pair, n);
            state_dev = state_dev
                .max(step.state.entries().max_abs_diff(closed.entries()))
                .max((step.cumulative_prob - p_f).abs());
            conc_dev = conc_dev.max((result.concurrence_series[k + 1] - measures::concurrence_x_part(&step.state)).abs());
        }
        let initial = protocol::make_total_state(pair);
        conc_dev = conc_dev.max((result.concurrence_series[0] - measures::concurrence_x_part(&initial)).abs());

        if n_max >= 2 {
            let oracle = oracle_composite_state(pair, 2, Statistics::Fermion);
            composite_dev = composite_dev.max(oracle.entries().max_abs_diff(result.per_step[1].state.entries()));
        }
    }
    push("(iii) iterated map vs closed form (states and probabilities)", state_dev);
    push("(iv) general Wootters concurrence vs X-state closed form", conc_dev);
    push("(v) two-pair oracle composite vs iterated map", composite_dev);
    Ok(checks)
}

/// Joint state after `steps` pairs built directly from the oracle's kept
/// branch norms: `ρ'_jk ∝ ρ_jk ‖K_j‖ ‖K_k‖`.
pub fn oracle_composite_state(pair: &SharedPairState, steps: u32, statistics: Statistics) -> DensityMatrix4 {
    let norms = fock::kept_norms_after(steps, statistics);
    let rho = protocol::make_total_state(pair);
    let m = rho.entries();
    let sigma = Matrix4::from_fn(|i, j| m[(i, j)] * (norms[i] * norms[j]));
    let p = sigma.trace().re;
    DensityMatrix4::computational(sigma.scale(1.0 / p))
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, UsageError> {
    if args.n_max > protocol::DEFAULT_MAX_STEPS {
        return Err(UsageError(format!(
            "--n-max {} exceeds the maximum {}",
            args.n_max,
            protocol::DEFAULT_MAX_STEPS
        )));
    }
    if args.tol.is_nan() || args.tol < 0.0 {
        return Err(UsageError(format!("--tol must be nonnegative, got {}", args.tol)));
    }
    let checks = verification_checks(args.n_max, args.tol, args.seed)?;
    let mut all = true;
    for c in &checks {
        all &= c.passed;
        writeln!(
            out,
            "{} {}: worst deviation {:e} (tol {:e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.worst_deviation,
            args.tol
        )
        .map_err(io_err)?;
    }
    writeln!(out, "{}", if all { "all checks passed" } else { "verification FAILED" }).map_err(io_err)?;
    Ok(if all { EXIT_OK } else { EXIT_VERIFY_FAILED })
}
