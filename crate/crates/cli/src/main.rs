//! `cwlap`: disk spectrum, constant-width bodies, eigenvalue expansions,
//! sign certificates and the numerical check of the expansions.
//!
//! Exit status: 0 on success, 1 on a failed suite or a runtime error,
//! 2 on a usage error.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cwlap_core::bessel::global_table;
use cwlap_core::certify::{self, SignCertificate};
use cwlap_core::disk_spectrum::{enumerate_spectrum, Branch};
use cwlap_core::io::rows_to_csv;
use cwlap_core::oracle_solver::{convergence_study, solve_index, Domain};
use cwlap_core::perturbation::predict;
use cwlap_core::width_body::{ConstantWidthBody, DeformationCoeffs, SVG_POINTS};

use config::{FileConfig, Format, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "cwlap", version, about = "Dirichlet eigenvalues of the disk under constant-width deformations")]
struct Cli {
    /// Output format [default: csv]
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the table here instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Bessel zero cache file [default: ./cache/bessel_zeros.csv]
    #[arg(long, global = true, env = "CWLAP_CACHE")]
    cache: Option<PathBuf>,

    /// File of `key = value` lines. Keys: cache, format, output,
    /// solver_tol (default 1e-13), scan_step (default 0.01).
    /// Flags override the file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct BodyArgs {
    /// Odd harmonics, e.g. `a3=0.1,a5=0.02+0.01i,b3=-0.05`
    #[arg(long, default_value = "")]
    coeff: String,

    #[arg(long)]
    eps: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// First N disk eigenvalues with their modes
    Spectrum {
        #[arg(long)]
        count: usize,
    },
    /// Widths, diameter and area of a body; optional SVG outline
    Body {
        #[command(flatten)]
        body: BodyArgs,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Second-order prediction for λ_κ
    Expand {
        #[arg(long)]
        kappa: usize,
        #[command(flatten)]
        body: BodyArgs,
    },
    /// One sign certificate (--k --m --p) or a whole suite
    Certify {
        #[arg(long, requires_all = ["m", "p"], conflicts_with = "suite")]
        k: Option<u32>,
        #[arg(long, requires = "k")]
        m: Option<u32>,
        #[arg(long, requires = "k")]
        p: Option<u32>,
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        #[arg(long, default_value_t = 20)]
        m_cap: u32,
        #[arg(long, default_value_t = 10)]
        p_cap: u32,
    },
    /// LocalMin / NotLocalMin / Open for every index up to K (≤ 50)
    Classify {
        #[arg(long, default_value_t = 50)]
        max_kappa: usize,
    },
    /// λ_κ of the body from the eigensolver
    Solve {
        #[arg(long)]
        kappa: usize,
        #[command(flatten)]
        body: BodyArgs,
    },
    /// Solver against prediction for decreasing ε, with the fitted order
    Verify {
        #[arg(long)]
        kappa: usize,
        #[arg(long, default_value = "")]
        coeff: String,
        /// Strictly decreasing, at least three values
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        /// Exit with status 1 when the fitted order falls below this
        #[arg(long)]
        min_order: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Lemma6,
    AppendixC,
}

enum Failure {
    Usage(String),
    Violation(String),
    Runtime(String),
}

impl From<cwlap_core::Error> for Failure {
    fn from(e: cwlap_core::Error) -> Self {
        use cwlap_core::Error as E;
        match e {
            E::Parse(_) | E::InvalidBody(_) | E::OutOfRange(_) | E::Domain(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn emit(cfg: &RunConfig, text: String) -> Outcome {
    let text = if text.ends_with('\n') { text } else { text + "\n" };
    match &cfg.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render<T: Serialize>(cfg: &RunConfig, rows: &[T], json: impl Serialize) -> Outcome {
    let text = match cfg.format {
        Format::Csv => rows_to_csv(rows)?,
        Format::Json => serde_json::to_string_pretty(&json).map_err(|e| Failure::Runtime(e.to_string()))?,
    };
    emit(cfg, text)
}

fn parse_coeffs(s: &str) -> Result<DeformationCoeffs, Failure> {
    Ok(s.parse::<DeformationCoeffs>()?)
}

fn make_body(args: &BodyArgs) -> Result<ConstantWidthBody, Failure> {
    Ok(ConstantWidthBody::new(parse_coeffs(&args.coeff)?, args.eps)?)
}

fn attach_cache(path: &Path) -> Outcome {
    global_table().attach(path)?;
    Ok(())
}

#[derive(Serialize)]
struct BodySummary {
    coeff: String,
    eps: f64,
    epsilon_max: f64,
    min_width: f64,
    max_width: f64,
    diameter: f64,
    area: f64,
}

#[derive(Serialize)]
struct ExpandRow {
    kappa: usize,
    m: u32,
    p: u32,
    j: f64,
    branch: Branch,
    gamma: f64,
    upsilon_mag: f64,
    omega2: f64,
    eps: f64,
    lambda_disk: f64,
    lambda_pred: f64,
}

#[derive(Serialize)]
struct SolveRow {
    kappa: usize,
    eps: f64,
    lambda: f64,
    omega: f64,
    residual: f64,
    disk_lambda: f64,
}

fn report_violations(bad: &[&SignCertificate]) -> Outcome {
    if bad.is_empty() {
        return Ok(());
    }
    let lines: Vec<String> = bad
        .iter()
        .map(|c| format!("{} [{}]: {:?} in [{}, {}] ({:?}) {}", c.quantity, c.claim, c.sign, c.lo, c.hi, c.method, c.note))
        .collect();
    Err(Failure::Violation(format!("{} certificate(s) failed:\n{}", bad.len(), lines.join("\n"))))
}

fn run(cli: Cli) -> Outcome {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p).map_err(Failure::Usage)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::merge(file, cli.cache, cli.format, cli.output);

    match cli.command {
        Command::Spectrum { count } => {
            attach_cache(&cfg.cache)?;
            let t = enumerate_spectrum(count)?;
            let rows = t.rows();
            render(&cfg, &rows, &rows)
        }
        Command::Body { body, svg } => {
            let b = make_body(&body)?;
            let w = b.width_and_diameter();
            let row = BodySummary {
                coeff: b.coeffs().to_string(),
                eps: b.epsilon(),
                epsilon_max: b.epsilon_max(),
                min_width: w.min_width,
                max_width: w.max_width,
                diameter: w.diameter,
                area: b.area(),
            };
            if let Some(path) = svg {
                std::fs::write(&path, b.to_svg(SVG_POINTS))
                    .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
            }
            render(&cfg, std::slice::from_ref(&row), &row)
        }
        Command::Expand { kappa, body } => {
            attach_cache(&cfg.cache)?;
            let c = parse_coeffs(&body.coeff)?;
            let pr = predict(kappa, &c, body.eps)?;
            let row = ExpandRow {
                kappa: pr.kappa,
                m: pr.m,
                p: pr.p,
                j: pr.j,
                branch: pr.branch,
                gamma: pr.gamma,
                upsilon_mag: pr.upsilon_mag,
                omega2: pr.omega2,
                eps: pr.eps,
                lambda_disk: pr.j * pr.j,
                lambda_pred: pr.lambda_pred,
            };
            render(&cfg, std::slice::from_ref(&row), &pr)
        }
        Command::Certify { k, m, p, suite, m_cap, p_cap } => {
            attach_cache(&cfg.cache)?;
            let (certs, want_negative) = match (k, suite) {
                (Some(k), None) => {
                    let c = certify::certify_c_sign(k, m.unwrap_or(0), p.unwrap_or(1))?;
                    (vec![c], None)
                }
                (None, Some(Suite::Lemma6)) => (certify::lemma6_suite()?, Some(false)),
                (None, Some(Suite::AppendixC)) => (certify::appendix_c_suite(m_cap, p_cap)?, Some(true)),
                _ => return Err(Failure::Usage("give either --k --m --p or --suite".into())),
            };
            let rows: Vec<certify::CertificateRow> = certs.iter().map(Into::into).collect();
            render(&cfg, &rows, &certs)?;
            match want_negative {
                Some(neg) => report_violations(&certify::violations(&certs, neg)),
                None => Ok(()),
            }
        }
        Command::Classify { max_kappa } => {
            attach_cache(&cfg.cache)?;
            let rows = certify::classify(max_kappa)?;
            let text = match cfg.format {
                Format::Csv => certify::classification_csv(&rows)?,
                Format::Json => serde_json::to_string_pretty(&rows).map_err(|e| Failure::Runtime(e.to_string()))?,
            };
            emit(&cfg, text)
        }
        Command::Solve { kappa, body } => {
            attach_cache(&cfg.cache)?;
            let b = make_body(&body)?;
            let s = solve_index(&Domain::new(b), kappa, &cfg.solver)?;
            let row = SolveRow {
                kappa,
                eps: body.eps,
                lambda: s.lambda,
                omega: s.omega,
                residual: s.residual,
                disk_lambda: s.disk_lambda,
            };
            render(&cfg, std::slice::from_ref(&row), &s)
        }
        Command::Verify { kappa, coeff, eps, min_order } => {
            attach_cache(&cfg.cache)?;
            let c = parse_coeffs(&coeff)?;
            let st = convergence_study(&c, kappa, &eps, &cfg.solver)?;
            let text = match cfg.format {
                Format::Csv => st.to_csv()?,
                Format::Json => serde_json::to_string_pretty(&st).map_err(|e| Failure::Runtime(e.to_string()))?,
            };
            emit(&cfg, text)?;
            match (min_order, st.slope) {
                (Some(want), Some(s)) if s < want => {
                    Err(Failure::Violation(format!("fitted order {s:.3} below {want}")))
                }
                (Some(_), None) => Err(Failure::Violation("fitted order undefined (zero residual)".into())),
                _ => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Violation(msg)) | Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
