//! `singpow` — approximate endpoint-singular functions by short power
//! expansions with a-priori exponents and collocation points.
//!
//! Subcommands: `precompute` (derive a scheme for a band and accuracy),
//! `fit` (expand a named target on a scheme), `eval` (evaluate a stored
//! fit), `experiment` (run a named experiment family to CSV/JSON).
//!
//! Exit codes: 0 success, 2 parameter/input error, 3 numerical-convergence
//! error.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use singpow::harness::{export, run_experiment, ExperimentSpec, Format};
use singpow::scheme::{build_scheme, evaluate, fit, sample_target, ApproxScheme, Arc, EPS0};
use singpow::scheme::FitResult;
use singpow::targets::Measure;
use singpow::{Error, Result};

#[derive(Parser)]
#[command(
    name = "singpow",
    version,
    about = "Short power expansions for endpoint-singular functions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Precompute the approximation scheme (powers, collocation points) for
    /// the band [a, b] at accuracy eps.
    Precompute {
        /// Lower band edge (a > 0).
        #[arg(long)]
        a: f64,
        /// Upper band edge (b > a).
        #[arg(long)]
        b: f64,
        /// Accuracy target: the truncation picks the first singular value
        /// at or below this.
        #[arg(long)]
        eps: f64,
        /// Working precision in decimal digits.
        #[arg(long, default_value_t = 60)]
        digits: u32,
        /// Discretization mesh size (also caps the spectrum length at
        /// mesh/4).
        #[arg(long, default_value_t = 400)]
        mesh: usize,
        /// Output path for the scheme JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a named target on a precomputed scheme and store the expansion.
    Fit {
        /// Path to a scheme JSON from `precompute`.
        #[arg(long)]
        scheme: PathBuf,
        /// Target id: sigma1..sigma4 (densities), sigma5 (x^c, needs --c),
        /// sigma6 (x^c (log x)^k, needs --c, --k defaults to 1).
        #[arg(long)]
        target: String,
        /// Exponent c for sigma5/sigma6.
        #[arg(long)]
        c: Option<f64>,
        /// Log order k for sigma6.
        #[arg(long)]
        k: Option<u32>,
        /// Fit along the quadratic arc t + i·alpha·(t²−t) instead of [0,1].
        #[arg(long = "arc-alpha")]
        arc_alpha: Option<f64>,
        /// Output path for the fit JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a stored fit at a point of [0,1] (the arc parameter when
    /// the fit lives on an arc).
    Eval {
        /// Path to a fit JSON from `fit`.
        #[arg(long)]
        fit: PathBuf,
        /// Evaluation point in [0,1].
        #[arg(long)]
        x: f64,
    },
    /// Run an experiment family and write its table.
    Experiment {
        /// Family: alpha_decay, sing_norms, gram_u, gram_v_condition,
        /// vnorm, error_vs_n, c_sweep, dist_orders, arc_error, arc_c_sweep,
        /// clustering.
        #[arg(long)]
        name: String,
        /// Band ratios γ (band [1, γ]); repeatable. Default 10, 50, 250.
        #[arg(long = "gamma")]
        gammas: Vec<f64>,
        /// Target ids for the target-driven families; repeatable.
        #[arg(long = "target")]
        targets: Vec<String>,
        /// Arc alphas for the arc families; repeatable.
        #[arg(long = "arc-alpha")]
        arc_alphas: Vec<f64>,
        /// Lowest truncation n to sweep.
        #[arg(long = "n-min")]
        n_min: Option<usize>,
        /// Highest truncation n to sweep (also the fixed n of c_sweep,
        /// arc_c_sweep, clustering).
        #[arg(long = "n-max")]
        n_max: Option<usize>,
        /// Sweep 1000 c values instead of 100 in the c-sweep families.
        #[arg(long = "full-c-sweep")]
        full_c_sweep: bool,
        /// Working precision in decimal digits.
        #[arg(long, default_value_t = 60)]
        digits: u32,
        /// Override the per-γ mesh size.
        #[arg(long)]
        mesh: Option<usize>,
        /// Output format.
        #[arg(long, value_enum, default_value_t = CliFormat::Csv)]
        format: CliFormat,
        /// Output path for the table.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.cmd) {
        eprintln!("error: {e}");
        let code = e.exit_code();
        if code == 3 {
            eprintln!("hint: raise --digits and/or --mesh and retry");
        }
        std::process::exit(code);
    }
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Precompute {
            a,
            b,
            eps,
            digits,
            mesh,
            out,
        } => {
            let band = singpow::laplace::Band::new(a, b)?;
            let scheme = build_scheme(band, eps, digits, mesh)?;
            std::fs::write(&out, scheme.to_json()?)?;
            println!("N = {}", scheme.n);
            println!("alpha_N = {:e}", scheme.alphas[scheme.n]);
            Ok(())
        }
        Cmd::Fit {
            scheme,
            target,
            c,
            k,
            arc_alpha,
            out,
        } => {
            let text = std::fs::read_to_string(&scheme)?;
            let scheme = ApproxScheme::from_json(&text)?;
            let band = scheme.band()?;
            let measure = Measure::from_id(&target, band, c, k)?;
            let arc = arc_alpha.map(|alpha| Arc { alpha });
            let samples = sample_target(&scheme, &measure, arc)?;
            let fitted = fit(&scheme, &samples, EPS0, arc)?;
            std::fs::write(&out, fitted.to_json()?)?;
            println!("k = {}", fitted.report.k);
            println!("residual = {:e}", fitted.residual);
            Ok(())
        }
        Cmd::Eval { fit, x } => {
            let text = std::fs::read_to_string(&fit)?;
            let fitted = FitResult::from_json(&text)?;
            let v = evaluate(&fitted, x)?;
            if fitted.arc.is_some() {
                println!("{:e} {:+e}i", v.re, v.im);
            } else {
                println!("{:e}", v.re);
            }
            Ok(())
        }
        Cmd::Experiment {
            name,
            gammas,
            targets,
            arc_alphas,
            n_min,
            n_max,
            full_c_sweep,
            digits,
            mesh,
            format,
            out,
        } => {
            let mut spec = ExperimentSpec::new(&name);
            if !gammas.is_empty() {
                spec.gammas = gammas;
            }
            spec.targets = targets;
            spec.arc_alphas = arc_alphas;
            spec.n_range = match (n_min, n_max) {
                (None, None) => None,
                (lo, hi) => {
                    let lo = lo.unwrap_or(1);
                    let hi = hi.unwrap_or(usize::MAX);
                    if hi < lo {
                        return Err(Error::Parameter(format!(
                            "--n-max {hi} is below --n-min {lo}"
                        )));
                    }
                    Some((lo, hi))
                }
            };
            spec.full_sweep = full_c_sweep;
            spec.digits = digits;
            spec.mesh = mesh;
            spec.format = match format {
                CliFormat::Csv => Format::Csv,
                CliFormat::Json => Format::Json,
            };
            spec.out = out;
            let table = run_experiment(&spec)?;
            export(&table, spec.format, &spec.out)?;
            println!(
                "wrote {} rows ({}) -> {}",
                table.rows.len(),
                spec.format,
                spec.out.display()
            );
            Ok(())
        }
    }
}
