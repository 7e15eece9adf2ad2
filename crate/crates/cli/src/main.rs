//! `tvar`: time-varying AR sieve estimation, stability testing and
//! forecasting for locally stationary time series.

mod io;
mod json;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use tvar_sieve::cov_oracle::{self, local_spectral_density, uniform_grid};
use tvar_sieve::forecast;
use tvar_sieve::simgen::{self, McTestConfig, ModelId, ModelSpec};
use tvar_sieve::stability_test::{self, TestConfig};
use tvar_sieve::tuning;
use tvar_sieve::{BasisSpec, Error, TimeSeries};

/// Fixed default seed; never wall-clock, so runs are reproducible by default.
const DEFAULT_SEED: u64 = 17;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "tvar", version, about = "Time-varying AR sieve estimation, stability testing and forecasting")]
struct Cli {
    /// Worker threads (0 = auto); env TVAR_THREADS is the fallback.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BasisArgs {
    /// Basis family: fourier, legendre, or daub<N> (e.g. daub9).
    #[arg(long, default_value = "fourier")]
    basis: String,

    /// Number of basis functions c.
    #[arg(long)]
    c: Option<usize>,
}

impl BasisArgs {
    fn spec(&self, c: usize) -> Result<BasisSpec, Error> {
        BasisSpec::parse(&self.basis, c)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a simulated series as CSV.
    Simulate {
        /// Model name, optionally suffixed -null/-alt (e.g. tvar2-null).
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 256)]
        n: usize,
        /// Alternative magnitude δ; implies the alternative configuration.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = simgen::DEFAULT_BURN_IN)]
        burn_in: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Fit the sieve regression and emit the fitted model as JSON.
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        basis: BasisArgs,
        /// AR order b; omitted → chosen by cross-validation.
        #[arg(long)]
        b: Option<usize>,
        /// Subtract the sample mean before fitting.
        #[arg(long)]
        demean: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Stability test of the AR approximation coefficients.
    Test {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        basis: BasisArgs,
        /// Test order b*; omitted → rate-rule default max(2, n^{1/8}).
        #[arg(long)]
        b_star: Option<usize>,
        /// Bootstrap block size m; omitted → rate-rule default ~(2/3)·n^{1/3}.
        #[arg(long)]
        m: Option<usize>,
        /// Bootstrap replicates.
        #[arg(long = "B", default_value_t = 1000)]
        replicates: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Test the T_g variant (intercept function included).
        #[arg(long)]
        include_intercept: bool,
        #[arg(long)]
        demean: bool,
        /// Include the sorted bootstrap draws in the output.
        #[arg(long)]
        draws: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// One-step forecast with estimated MSE.
    Forecast {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        basis: BasisArgs,
        /// AR order b; omitted → chosen by cross-validation.
        #[arg(long)]
        b: Option<usize>,
        #[arg(long)]
        demean: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Data-driven tuning: CV for (b, c), minimum volatility for m.
    Tune {
        #[arg(long)]
        input: PathBuf,
        /// Basis family (the c grid is chosen by CV).
        #[arg(long, default_value = "fourier")]
        basis: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Monte Carlo size/power experiment over simulated replicates.
    Mc {
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        reps: usize,
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long)]
        b_star: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Bootstrap replicates per Monte Carlo replicate.
        #[arg(long = "B", default_value_t = 200)]
        replicates: usize,
        #[arg(long)]
        delta: Option<f64>,
        /// Rejection levels, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.05, 0.1])]
        alpha: Vec<f64>,
        #[arg(long)]
        include_intercept: bool,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// UPDC check via the local spectral density of an analytic model.
    UpdcCheck {
        /// Model with a linear structure: tvar2, tvma2, arma11, nonstat6.
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 101)]
        t_points: usize,
        #[arg(long, default_value_t = 361)]
        omega_points: usize,
        /// Truncation lag J of the spectral sum.
        #[arg(long, default_value_t = 200)]
        lag: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    schema_version: u32,
    generated_by: String,
    #[serde(flatten)]
    body: T,
}

fn envelope<T: Serialize>(body: T) -> Envelope<T> {
    Envelope {
        schema_version: SCHEMA_VERSION,
        generated_by: format!("tvar {}", env!("CARGO_PKG_VERSION")),
        body,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = if cli.threads > 0 {
        cli.threads
    } else {
        std::env::var("TVAR_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(0)
    };
    if threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("tvar: cannot size the worker pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("tvar: {err}");
            match err {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn emit(output: Option<&PathBuf>, bytes: Vec<u8>) -> Result<(), Error> {
    match output {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| Error::Data(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| Error::Data(format!("cannot write stdout: {e}")))
        }
    }
}

fn emit_json<T: Serialize>(output: Option<&PathBuf>, body: T) -> Result<(), Error> {
    let bytes = json::to_json_bytes(&envelope(body))
        .map_err(|e| Error::Data(format!("serialization failed: {e}")))?;
    emit(output, bytes)
}

/// Parses "name", "name-null" or "name-alt"; --delta switches models to the
/// alternative configuration.
fn parse_model(name: &str, n: usize, delta: Option<f64>) -> Result<ModelSpec, Error> {
    if let Some(base) = name.strip_suffix("-null") {
        if delta.is_some() {
            return Err(Error::Config("--delta conflicts with a -null model".into()));
        }
        return ModelSpec::null(ModelId::parse(base)?, n);
    }
    if let Some(base) = name.strip_suffix("-alt") {
        let d = delta
            .ok_or_else(|| Error::Config("an -alt model needs --delta".into()))?;
        return ModelSpec::alternative(ModelId::parse(base)?, d, n);
    }
    let id = ModelId::parse(name)?;
    match delta {
        Some(d) => ModelSpec::alternative(id, d, n),
        None => ModelSpec::null(id, n),
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Simulate { model, n, delta, burn_in, seed, output } => {
            let spec = parse_model(&model, n, delta)?.with_burn_in(burn_in)?;
            let series = simgen::simulate(&spec, seed);
            emit(output.as_ref(), io::write_series_csv(&series).into_bytes())
        }

        Command::Fit { input, basis, b, demean, output } => {
            let raw = io::read_series_csv(&input)?;
            let (x, mean) = preprocess(&raw, demean);
            let (b, c) = resolve_fit_order(&x, &basis, b)?;
            let spec = basis.spec(c)?;
            let fitted = tvar_sieve::fit(&x, b, &spec)?;
            #[derive(Serialize)]
            struct FitDoc {
                demeaned: bool,
                subtracted_mean: f64,
                #[serde(flatten)]
                fit: tvar_sieve::sieve_fit::SieveFitDocument,
            }
            emit_json(
                output.as_ref(),
                FitDoc {
                    demeaned: demean,
                    subtracted_mean: mean,
                    fit: fitted.to_document(),
                },
            )
        }

        Command::Test {
            input,
            basis,
            b_star,
            m,
            replicates,
            seed,
            include_intercept,
            demean,
            draws,
            output,
        } => {
            let raw = io::read_series_csv(&input)?;
            let (x, _) = preprocess(&raw, demean);
            let n = x.len();
            let c = match basis.c {
                Some(c) => c,
                None => stability_test::default_c(n),
            };
            let config = TestConfig {
                b_star: b_star.unwrap_or_else(|| stability_test::default_b_star(n)),
                m: m.unwrap_or_else(|| stability_test::default_m(n)),
                replicates,
                basis: basis.spec(c)?,
                seed,
                include_intercept,
            };
            let result = tvar_sieve::run_test(&x, &config)?;
            #[derive(Serialize)]
            struct TestDoc {
                n: usize,
                statistic: f64,
                p_value: f64,
                b_star: usize,
                c: usize,
                m: usize,
                replicates: usize,
                basis: String,
                seed: u64,
                include_intercept: bool,
                demeaned: bool,
                #[serde(skip_serializing_if = "Option::is_none")]
                draws: Option<Vec<f64>>,
            }
            emit_json(
                output.as_ref(),
                TestDoc {
                    n,
                    statistic: result.statistic,
                    p_value: result.p_value,
                    b_star: config.b_star,
                    c,
                    m: config.m,
                    replicates,
                    basis: config.basis.family_name(),
                    seed,
                    include_intercept,
                    demeaned: demean,
                    draws: draws.then_some(result.draws),
                },
            )
        }

        Command::Forecast { input, basis, b, demean, output } => {
            let raw = io::read_series_csv(&input)?;
            let (x, mean) = preprocess(&raw, demean);
            let (b, c) = resolve_fit_order(&x, &basis, b)?;
            let spec = basis.spec(c)?;
            let fitted = tvar_sieve::fit(&x, b, &spec)?;
            let report = forecast::forecast_report(&fitted, &x)?;
            #[derive(Serialize)]
            struct ForecastDoc {
                n: usize,
                demeaned: bool,
                /// Point forecast on the original scale (mean added back).
                point: f64,
                #[serde(flatten)]
                report: forecast::ForecastReport,
            }
            emit_json(
                output.as_ref(),
                ForecastDoc {
                    n: x.len(),
                    demeaned: demean,
                    point: report.point + mean,
                    report,
                },
            )
        }

        Command::Tune { input, basis, output } => {
            let x = io::read_series_csv(&input)?;
            let probe = BasisSpec::parse(&basis, 2)?;
            let result = tuning::tune(&x, probe.family(), probe.wavelet_order())?;
            #[derive(Serialize)]
            struct TuneDoc {
                n: usize,
                basis: String,
                #[serde(flatten)]
                result: tuning::TuningResult,
            }
            emit_json(output.as_ref(), TuneDoc { n: x.len(), basis, result })
        }

        Command::Mc {
            model,
            n,
            reps,
            basis,
            b_star,
            m,
            replicates,
            delta,
            alpha,
            include_intercept,
            seed,
            output,
        } => {
            let spec = parse_model(&model, n, delta)?;
            let probe = BasisSpec::parse(&basis.basis, 2)?;
            let config = McTestConfig {
                basis: probe.family(),
                wavelet_order: probe.wavelet_order(),
                b_star,
                c: basis.c,
                m,
                replicates,
                include_intercept,
            };
            let report = simgen::monte_carlo_size_power(&spec, &config, reps, &alpha, seed)?;
            emit_json(output.as_ref(), report)
        }

        Command::UpdcCheck { model, n, delta, t_points, omega_points, lag, output } => {
            let spec = parse_model(&model, n, delta)?;
            let acov = simgen::local_acov(&spec).ok_or_else(|| {
                Error::Config(format!(
                    "model {} has no analytic local autocovariance; use one of \
                     tvar2, tvma2, arma11, nonstat6",
                    spec.id.name()
                ))
            })?;
            let t_grid = uniform_grid(0.0, 1.0, t_points.max(1));
            let omega_grid = uniform_grid(
                -std::f64::consts::PI,
                std::f64::consts::PI,
                omega_points.max(2),
            );
            let report = cov_oracle::updc_check(&acov, &t_grid, &omega_grid, lag)?;
            let max_truncation = t_grid
                .iter()
                .map(|&t| local_spectral_density(&acov, t, 0.0, lag).truncation_bound)
                .fold(0.0f64, f64::max);
            #[derive(Serialize)]
            struct UpdcDoc {
                model: String,
                delta: f64,
                n: usize,
                kappa_min: f64,
                pass: bool,
                t_points: usize,
                omega_points: usize,
                lag: usize,
                max_truncation_bound: f64,
            }
            emit_json(
                output.as_ref(),
                UpdcDoc {
                    model: spec.id.name().to_string(),
                    delta: spec.delta,
                    n,
                    kappa_min: report.kappa_min,
                    pass: report.pass,
                    t_points,
                    omega_points,
                    lag,
                    max_truncation_bound: max_truncation,
                },
            )
        }
    }
}

fn preprocess(x: &TimeSeries, demean: bool) -> (TimeSeries, f64) {
    if demean {
        x.demeaned()
    } else {
        (x.clone(), 0.0)
    }
}

/// Resolves (b, c) for fit/forecast: both given → as-is; otherwise CV over
/// the default forecasting grids fills the gaps.
fn resolve_fit_order(
    x: &TimeSeries,
    basis: &BasisArgs,
    b: Option<usize>,
) -> Result<(usize, usize), Error> {
    if let (Some(b), Some(c)) = (b, basis.c) {
        return Ok((b, c));
    }
    let probe = BasisSpec::parse(&basis.basis, 2)?;
    let n = x.len();
    let b_cands: Vec<usize> = match b {
        Some(b) => vec![b],
        None => tuning::default_b_candidates(n),
    };
    let c_cands: Vec<usize> = match basis.c {
        Some(c) => vec![c],
        None => tuning::default_c_candidates(),
    };
    let cv = tuning::cv_select(
        x,
        &b_cands,
        &c_cands,
        probe.family(),
        probe.wavelet_order(),
        tuning::default_l(n),
    )?;
    Ok((cv.b_opt, cv.c_opt))
}
