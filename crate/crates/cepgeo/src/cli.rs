//! Argument parsing and command dispatch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cepgeo_core::kahler::{self, KahlerError, ModelPoint};
use cepgeo_core::numeric::{self, relative_residual, NumericError};
use cepgeo_core::priors::{self, PriorError, PriorFunction};
use cepgeo_core::{
    FilterError, ModelShape, QuadratureConfig, ValidatedFilter, DEFAULT_STABILITY_MARGIN, DEFAULT_TRUNCATION,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::number::Num;
use crate::report::*;
use crate::schema::{FilterDocument, TensorDocument};
use crate::table;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNCONVERGED: i32 = 3;

/// Pass threshold of `oracle-compare`.
pub const ORACLE_THRESHOLD: f64 = 1e-8;
/// Pass threshold of `duality-check`.
pub const DUALITY_THRESHOLD: f64 = 1e-6;
/// Pass threshold of `invariance-check`.
pub const INVARIANCE_THRESHOLD: f64 = 1e-10;

/// Environment variable capping worker threads.
pub const THREADS_VAR: &str = "CEPGEO_THREADS";

#[derive(Parser, Debug)]
#[command(name = "cepgeo", version, about = "Kähler information geometry of ARMA filters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Psi {
    Psi1,
    Psi2,
    Psi3,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit 3 when a quadrature has not converged.
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Debug)]
struct FilterInput {
    /// Filter JSON document.
    file: PathBuf,
    /// Stability margin: roots need modulus below 1 - eps.
    #[arg(long, default_value_t = DEFAULT_STABILITY_MARGIN)]
    eps: f64,
}

#[derive(Args, Debug)]
struct Quadrature {
    #[arg(long, default_value_t = numeric::DEFAULT_NODES)]
    nodes: usize,
    #[arg(long, default_value_t = numeric::DEFAULT_DERIV_STEP)]
    deriv_step: f64,
    #[arg(long, default_value_t = numeric::DEFAULT_TOLERANCE)]
    tol: f64,
}

impl Quadrature {
    fn config(&self) -> Result<QuadratureConfig, CliError> {
        Ok(QuadratureConfig::new(self.nodes, self.deriv_step, self.tol)?)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a filter against the stability constraints.
    Validate {
        #[command(flatten)]
        input: FilterInput,
        #[command(flatten)]
        output: Output,
    },
    /// Truncated complex cepstrum.
    Cepstrum {
        #[command(flatten)]
        input: FilterInput,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        trunc: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Closed-form potential, metric, connections and curvature.
    Tensors {
        #[command(flatten)]
        input: FilterInput,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        trunc: usize,
        #[command(flatten)]
        output: Output,
    },
    /// α-divergence between two filters.
    Divergence {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, default_value_t = DEFAULT_STABILITY_MARGIN)]
        eps: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha: f64,
        #[command(flatten)]
        quad: Quadrature,
        #[command(flatten)]
        output: Output,
    },
    /// Sample the Laplace-Beltrami sign of a prior.
    CheckPrior {
        #[arg(long, value_enum)]
        psi: Psi,
        /// `ar:p`, `ma:q` or `ar:p,ma:q`.
        #[arg(long, value_parser = parse_model)]
        model: ModelShape,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Closed forms against quadrature.
    OracleCompare {
        #[command(flatten)]
        input: FilterInput,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        alpha: f64,
        #[command(flatten)]
        quad: Quadrature,
        #[command(flatten)]
        output: Output,
    },
    /// α-duality and reciprocal-filter checks.
    DualityCheck {
        #[command(flatten)]
        input: FilterInput,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
        #[command(flatten)]
        quad: Quadrature,
        #[command(flatten)]
        output: Output,
    },
    /// Metric invariance under z^R, Blaschke and reflection factors.
    InvarianceCheck {
        #[command(flatten)]
        input: FilterInput,
        #[command(flatten)]
        quad: Quadrature,
        #[command(flatten)]
        output: Output,
    },
}

/// Parses `ar:p`, `ma:q` or `ar:p,ma:q`.
pub fn parse_model(s: &str) -> Result<ModelShape, String> {
    let mut shape = ModelShape::arma(0, 0);
    let (mut seen_ar, mut seen_ma) = (false, false);
    for part in s.split(',') {
        let (kind, count) = part
            .split_once(':')
            .ok_or_else(|| format!("expected ar:p or ma:q, got {part:?}"))?;
        let count: usize = count.trim().parse().map_err(|_| format!("bad order in {part:?}"))?;
        match kind.trim() {
            "ar" if !seen_ar => (shape.p, seen_ar) = (count, true),
            "ma" if !seen_ma => (shape.q, seen_ma) = (count, true),
            _ => return Err(format!("unexpected component {part:?}")),
        }
    }
    if shape.dimension() == 0 {
        return Err("model needs at least one root".into());
    }
    Ok(shape)
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{path}: invalid filter: {first}")]
    Invalid {
        path: PathBuf,
        first: FilterError,
        all: Vec<FilterError>,
    },
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Kahler(#[from] KahlerError),
    #[error(transparent)]
    Prior(#[from] PriorError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn code(&self) -> &'static str {
        match self {
            Self::Io { .. } => "IO_ERROR",
            Self::Parse { .. } => "PARSE_ERROR",
            Self::Invalid { first, .. } => first.code(),
            Self::Filter(e) => e.code(),
            Self::Numeric(e) => e.code(),
            Self::Kahler(e) => e.code(),
            Self::Prior(e) => e.code(),
            Self::Usage(_) => "USAGE",
        }
    }

    fn report(&self) -> ErrorReport {
        let violations = match self {
            Self::Invalid { all, .. } => all
                .iter()
                .map(|e| Problem {
                    code: e.code().into(),
                    message: e.to_string(),
                })
                .collect(),
            _ => Vec::new(),
        };
        ErrorReport {
            error: ErrorBody {
                code: self.code().into(),
                message: self.to_string(),
                violations,
            },
        }
    }
}

fn load_filter(input: &FilterInput) -> Result<ValidatedFilter, CliError> {
    load(&input.file, input.eps)
}

fn load(path: &Path, eps: f64) -> Result<ValidatedFilter, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    let doc: FilterDocument = serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.into(),
        source,
    })?;
    let spec = doc.to_spec();
    let all = spec.violations(eps);
    match spec.validate(eps) {
        Ok(f) => Ok(f),
        Err(first) => Err(CliError::Invalid {
            path: path.into(),
            first,
            all,
        }),
    }
}

/// Serialized report plus the exit code it implies.
struct Outcome {
    body: String,
    code: i32,
}

fn serialize<T: Serialize>(report: &T, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Table => table::render(&serde_json::to_value(report).expect("reports serialize")),
    }
}

fn finish<T: Serialize>(report: &T, output: &Output, pass: bool, unconverged: bool) -> Outcome {
    let code = if output.strict && unconverged {
        EXIT_UNCONVERGED
    } else if !pass {
        EXIT_CHECK_FAILED
    } else {
        EXIT_OK
    };
    Outcome {
        body: serialize(report, output.format),
        code,
    }
}

fn validate(input: &FilterInput, output: &Output) -> Result<Outcome, CliError> {
    let f = load_filter(input)?;
    let report = ValidateReport {
        valid: true,
        dimension: f.dimension(),
        labels: ModelPoint::from_filter(&f).labels(),
        gain: Num(f.gain()),
        gain_term: Num(f.gain_term()),
        z_power: f.z_power(),
        max_root_modulus: Num(f.max_root_modulus()),
        common_roots: f.common_roots().into_iter().map(|(a, b)| [a, b]).collect(),
    };
    Ok(finish(&report, output, true, false))
}

fn cepstrum(input: &FilterInput, trunc: usize, output: &Output) -> Result<Outcome, CliError> {
    let f = load_filter(input)?;
    let c = f.cepstrum(trunc)?;
    let report = CepstrumReport {
        truncation: c.truncation,
        phi0: c.phi0.into(),
        coeffs: c.coeffs.iter().map(|&z| z.into()).collect(),
        blaschke_coeffs: c.blaschke_coeffs.iter().map(|&z| z.into()).collect(),
        hardy_norm_squared: Num(c.hardy_norm_squared()),
        tail_bound: Num(c.tail_bound),
    };
    Ok(finish(&report, output, true, false))
}

fn coincidence_warning(c: &kahler::CoincidentRoots) -> Problem {
    Problem {
        code: "COINCIDENT_ROOTS".into(),
        message: format!(
            "parameters {} and {} are {:e} apart; inverse metric by pivoted solve",
            c.first, c.second, c.distance
        ),
    }
}

fn tensors(input: &FilterInput, alpha: f64, trunc: usize, output: &Output) -> Result<Outcome, CliError> {
    let f = load_filter(input)?;
    let m = ModelPoint::from_filter(&f);
    let labels = m.labels();
    let potential = kahler::kahler_potential(&m, trunc)?;
    let g = kahler::metric(&m);
    let inv = kahler::inverse_metric(&m)?;
    let conn = kahler::alpha_connection(&m, alpha);
    let curv = kahler::alpha_ricci(&m, alpha)?;
    let a = Some(alpha);
    let docs = vec![
        TensorDocument::from_matrix("metric", &labels, None, &g.mixed, [false, true]),
        TensorDocument::from_matrix("inverse_metric", &labels, None, &inv.raised, [false, true]),
        TensorDocument::from_tensor("gamma", &labels, a, &conn.gamma_mixed, [false, false, true]),
        TensorDocument::from_tensor("gamma_pure", &labels, a, &conn.gamma_pure, [false, false, false]),
        TensorDocument::from_tensor("gamma_split", &labels, a, &conn.gamma_split, [false, true, false]),
        TensorDocument::from_tensor(
            "gamma_split_bar",
            &labels,
            a,
            &conn.gamma_split_bar,
            [false, true, true],
        ),
        TensorDocument::from_tensor("t", &labels, None, &conn.t_mixed, [false, false, true]),
        TensorDocument::from_tensor("t_pure", &labels, None, &conn.t_pure, [false, false, false]),
        TensorDocument::from_matrix("ricci", &labels, a, &curv.ricci, [false, true]),
    ];
    let report = TensorsReport {
        alpha: Num(alpha),
        labels,
        potential: PotentialReport {
            value: Num(potential.value),
            tail_bound: Num(potential.tail_bound),
            truncation: potential.truncation,
        },
        det_g: Num(curv.det_g),
        scalar: Num(curv.scalar),
        warnings: inv.coincident.iter().map(coincidence_warning).collect(),
        tensors: docs,
    };
    Ok(finish(&report, output, true, false))
}

fn divergence(
    first: &Path,
    second: &Path,
    eps: f64,
    alpha: f64,
    quad: &Quadrature,
    output: &Output,
) -> Result<Outcome, CliError> {
    let cfg = quad.config()?;
    let (f1, f2) = (load(first, eps)?, load(second, eps)?);
    let d = numeric::divergence(&f1, &f2, alpha, &cfg)?;
    let report = DivergenceReport {
        alpha: Num(alpha),
        value: Num(d.value.value),
        nodes: d.nodes,
        change: Num(d.change),
        tol: Num(cfg.tol),
        unconverged: d.unconverged,
    };
    Ok(finish(&report, output, true, d.unconverged))
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n = v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn check_prior(psi: Psi, shape: ModelShape, samples: usize, seed: u64, output: &Output) -> Result<Outcome, CliError> {
    let psi = match psi {
        Psi::Psi1 => PriorFunction::Psi1,
        Psi::Psi2 => PriorFunction::Psi2,
        Psi::Psi3 => PriorFunction::Psi3,
    };
    psi.check_dimension(shape.dimension())?;
    if samples == 0 {
        return Err(PriorError::NoSamples.into());
    }
    let outcomes = thread_pool()?.install(|| {
        (0..samples as u64)
            .into_par_iter()
            .map(|i| priors::evaluate_sample(&psi, shape, seed, i))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let r = priors::SuperharmonicReport::from_outcomes(psi.name(), shape, seed, &outcomes)?;
    let pass = r.violations == 0 && r.nonpositive == 0;
    let report = PriorReport {
        prior: r.prior,
        model: ModelReport { p: shape.p, q: shape.q },
        seed,
        samples: r.samples,
        violations: r.violations,
        nonpositive: r.nonpositive,
        worst_value: Num(r.worst_value),
        margin: MarginReport {
            min: Num(r.margin.min),
            max: Num(r.margin.max),
            mean: Num(r.margin.mean),
            p05: Num(r.margin.p05),
            p50: Num(r.margin.p50),
            p95: Num(r.margin.p95),
        },
        rejected: r.rejected,
        pass,
    };
    Ok(finish(&report, output, pass, false))
}

fn oracle_compare(input: &FilterInput, alpha: f64, quad: &Quadrature, output: &Output) -> Result<Outcome, CliError> {
    let cfg = quad.config()?;
    let f = load_filter(input)?;
    let m = ModelPoint::from_filter(&f);
    let g = kahler::metric(&m);
    let conn = kahler::alpha_connection(&m, alpha);
    let curv = kahler::ricci0(&m)?;
    let gn = numeric::metric_numeric(&f, &cfg)?;
    let cn = numeric::connection_numeric(&f, alpha, &cfg)?;
    let rn = numeric::ricci_numeric(&f, &cfg)?;
    let res = |a: &[cepgeo_core::ComplexScalar], b: &[cepgeo_core::ComplexScalar]| Num(relative_residual(a, b));
    let residuals = OracleResiduals {
        metric: res(gn.value.mixed.as_slice(), g.mixed.as_slice()),
        gamma: res(cn.value.gamma_mixed.as_slice(), conn.gamma_mixed.as_slice()),
        gamma_pure: res(cn.value.gamma_pure.as_slice(), conn.gamma_pure.as_slice()),
        gamma_split: res(cn.value.gamma_split.as_slice(), conn.gamma_split.as_slice()),
        gamma_split_bar: res(cn.value.gamma_split_bar.as_slice(), conn.gamma_split_bar.as_slice()),
        t: res(cn.value.t_mixed.as_slice(), conn.t_mixed.as_slice()),
        t_pure: res(cn.value.t_pure.as_slice(), conn.t_pure.as_slice()),
        ricci: res(rn.value.ricci.as_slice(), curv.ricci.as_slice()),
        scalar: Num((rn.value.scalar - curv.scalar).abs() / curv.scalar.abs().max(f64::MIN_POSITIVE)),
    };
    let max = residuals.max();
    let unconverged = gn.unconverged || cn.unconverged || rn.unconverged;
    let pass = max < ORACLE_THRESHOLD;
    let report = OracleReport {
        alpha: Num(alpha),
        nodes: cfg.nodes,
        residuals,
        max_residual: Num(max),
        threshold: Num(ORACLE_THRESHOLD),
        pass,
        change: Num(gn.change.max(cn.change).max(rn.change)),
        unconverged,
        warnings: curv.coincident.iter().map(coincidence_warning).collect(),
    };
    Ok(finish(&report, output, pass, unconverged))
}

fn duality_check(input: &FilterInput, alpha: f64, quad: &Quadrature, output: &Output) -> Result<Outcome, CliError> {
    let cfg = quad.config()?;
    let f = load_filter(input)?;
    let r = numeric::duality_check(&f, alpha, &cfg)?;
    let pass = r.max_residual < DUALITY_THRESHOLD && r.reciprocal_residual < DUALITY_THRESHOLD;
    let report = DualityCheckReport {
        alpha: Num(alpha),
        nodes: cfg.nodes,
        max_residual: Num(r.max_residual),
        reciprocal_residual: Num(r.reciprocal_residual),
        threshold: Num(DUALITY_THRESHOLD),
        pass,
    };
    Ok(finish(&report, output, pass, false))
}

fn invariance_check(input: &FilterInput, quad: &Quadrature, output: &Output) -> Result<Outcome, CliError> {
    let cfg = quad.config()?;
    let f = load_filter(input)?;
    let r = numeric::invariance_suite(&f, &cfg)?;
    let pass = r.max_residual() < INVARIANCE_THRESHOLD;
    let report = InvarianceCheckReport {
        nodes: cfg.nodes,
        identity: Num(r.identity),
        z_power: Num(r.z_power),
        blaschke: Num(r.blaschke),
        reflection: r.reflection.map(Num),
        max_residual: Num(r.max_residual()),
        threshold: Num(INVARIANCE_THRESHOLD),
        pass,
    };
    Ok(finish(&report, output, pass, false))
}

fn dispatch(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Validate { input, output } => validate(input, output),
        Command::Cepstrum { input, trunc, output } => cepstrum(input, *trunc, output),
        Command::Tensors {
            input,
            alpha,
            trunc,
            output,
        } => tensors(input, *alpha, *trunc, output),
        Command::Divergence {
            first,
            second,
            eps,
            alpha,
            quad,
            output,
        } => divergence(first, second, *eps, *alpha, quad, output),
        Command::CheckPrior {
            psi,
            model,
            samples,
            seed,
            output,
        } => check_prior(*psi, *model, *samples, *seed, output),
        Command::OracleCompare {
            input,
            alpha,
            quad,
            output,
        } => oracle_compare(input, *alpha, quad, output),
        Command::DualityCheck {
            input,
            alpha,
            quad,
            output,
        } => duality_check(input, *alpha, quad, output),
        Command::InvarianceCheck { input, quad, output } => invariance_check(input, quad, output),
    }
}

fn output_of(command: &Command) -> &Output {
    match command {
        Command::Validate { output, .. }
        | Command::Cepstrum { output, .. }
        | Command::Tensors { output, .. }
        | Command::Divergence { output, .. }
        | Command::CheckPrior { output, .. }
        | Command::OracleCompare { output, .. }
        | Command::DualityCheck { output, .. }
        | Command::InvarianceCheck { output, .. } => output,
    }
}

fn deliver(body: &str, output: &Output, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &output.out {
        Some(path) => fs::write(path, body).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => stdout.write_all(body.as_bytes()).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

/// Runs one invocation. `argv[0]` is the program name. Reports, including
/// error reports, go to `--out` or `stdout`; a one-line message goes to
/// `stderr` on failure.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let output = output_of(&cli.command);
    let result = dispatch(&cli.command).and_then(|o| {
        deliver(&o.body, output, stdout)?;
        Ok(o.code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error [{}]: {e}", e.code());
            let _ = deliver(&serialize(&e.report(), output.format), output, stdout);
            EXIT_INVALID
        }
    }
}

/// [`run_with`] on the process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
