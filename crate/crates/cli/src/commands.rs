use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaussmode::states::{
    harmonic_chain_cm, isotropic_pair_cm, random_isotropic_cm, random_pure_cm, thermal_cm, tmss_cm,
    vacuum_cm, Boundary, ChainSpec, Scramble,
};
use gaussmode::{
    check_physical, entanglement_entropy, isotropy_check, modewise_decompose, purity_check,
    symplectic_spectrum, williamson_decompose, Bipartition, CovarianceMatrix, Error, Tolerances,
};
use thiserror::Error;

use crate::cmx::{emit_cmx, emit_matrix, parse_cmx, CmxError, ParsedCm, ASYMMETRY_TOL};
use crate::report::ModewiseReport;

/// Gaussian-state covariance matrix toolkit.
#[derive(Debug, Parser)]
#[command(name = "gaussmode", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Symplectic eigenvalues with physicality and purity verdicts.
    Spectrum {
        /// CMX file; `-` or absent reads stdin.
        file: Option<PathBuf>,
    },
    /// Williamson normal form S M Sᵀ = ⊕ λ_i 𝟙₂.
    Williamson {
        file: Option<PathBuf>,
        /// Write S as a CMX matrix document.
        #[arg(long)]
        out_s: Option<PathBuf>,
    },
    /// Modewise decomposition of an isotropic state across A | B.
    Modewise {
        file: Option<PathBuf>,
        /// Zero-based modes of side A; side B is the complement.
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<usize>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        report: ReportFormat,
        /// Write the side-A symplectic transform.
        #[arg(long)]
        out_sa: Option<PathBuf>,
        /// Write the side-B symplectic transform.
        #[arg(long)]
        out_sb: Option<PathBuf>,
    },
    /// Entanglement entropy of a pure state across A | B, in nats.
    Entropy {
        file: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<usize>,
        /// Report in bits instead of nats.
        #[arg(long)]
        bits: bool,
    },
    /// Write a generated covariance matrix to stdout.
    Gen(GenArgs),
    /// Symmetry, physicality, purity and isotropy report.
    Verify { file: Option<PathBuf> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub generator: Generator,
    /// RNG seed for the random generators and the thermal scramble.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Open,
    Periodic,
}

#[derive(Debug, Subcommand)]
pub enum Generator {
    /// 𝟙/2 on `--modes` modes.
    Vacuum {
        #[arg(long)]
        modes: usize,
    },
    /// Two-mode squeezed vacuum with squeezing `--r`.
    Tmss {
        #[arg(long)]
        r: f64,
    },
    /// Isotropic two-mode block with local eigenvalue `--lambda`.
    Pair {
        #[arg(long)]
        lambda0: f64,
        #[arg(long)]
        lambda: f64,
    },
    /// Ground state of a harmonic chain.
    Chain {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        coupling: f64,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, value_enum, default_value_t = BoundaryArg::Periodic)]
        boundary: BoundaryArg,
    },
    /// ½ S Sᵀ for a seeded random symplectic S.
    RandomPure {
        #[arg(long)]
        modes: usize,
        #[arg(long, default_value_t = 1.0)]
        r_max: f64,
    },
    /// λ₀ S Sᵀ for a seeded random symplectic S.
    RandomIsotropic {
        #[arg(long)]
        modes: usize,
        #[arg(long)]
        lambda0: f64,
        #[arg(long, default_value_t = 1.0)]
        r_max: f64,
    },
    /// ⊕ λ_i 𝟙₂, scrambled by a random symplectic when `--seed` is given.
    Thermal {
        #[arg(long, value_delimiter = ',', required = true)]
        lambdas: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        r_max: f64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Cmx(#[from] CmxError),
    #[error("cannot read {path}: {source}")]
    Input {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Domain(#[from] Error),
    /// Verdict commands that completed but found the input invalid.
    #[error("{0}")]
    Rejected(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Cmx(_) | CliError::Input { .. } => 2,
            CliError::Domain(Error::IndexOutOfRange { .. } | Error::InvalidBipartition(_)) => 2,
            CliError::Domain(_) | CliError::Output { .. } | CliError::Rejected(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Cmx(CmxError::Parse { .. }) => "ParseError",
            CliError::Cmx(CmxError::BadHeader { .. }) => "BadHeader",
            CliError::Cmx(CmxError::Asymmetry { .. }) => "AsymmetryError",
            CliError::Input { .. } | CliError::Output { .. } => "Io",
            CliError::Rejected(_) => "Unphysical",
            CliError::Domain(e) => match e {
                Error::DimensionMismatch(_) => "DimensionMismatch",
                Error::NonFinite { .. } => "NonFinite",
                Error::NotSymmetric { .. } => "NotSymmetric",
                Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
                Error::NoConvergence { .. } => "NoConvergence",
                Error::DomainError(_) => "DomainError",
                Error::UnpairedEigenvalue { .. } => "UnpairedEigenvalue",
                Error::Unphysical { .. } => "Unphysical",
                Error::NotIsotropic { .. } => "NotIsotropic",
                Error::NotPure { .. } => "NotPure",
                Error::DegeneracyMismatch(_) => "DegeneracyMismatch",
                Error::CouplingResidual { .. } => "CouplingResidual",
                Error::IndexOutOfRange { .. } => "IndexOutOfRange",
                Error::InvalidBipartition(_) => "InvalidBipartition",
                Error::InconsistentEntropy { .. } => "InconsistentEntropy",
            },
        }
    }
}

/// Successful command output: stdout text plus files to write.
#[derive(Debug, Default)]
struct Output {
    stdout: String,
    files: Vec<(PathBuf, String)>,
    /// Report printed in full, then the command still fails.
    verdict: Option<CliError>,
}

/// Runs one command line. Output is buffered: an error leaves `stdout`
/// untouched, except that `verify` prints its complete report before
/// exiting 1 on unphysical input.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return e.exit_code();
        }
    };
    let result = execute(cli.command, stdin).and_then(|out| {
        for (path, text) in &out.files {
            std::fs::write(path, text).map_err(|source| CliError::Output {
                path: path.display().to_string(),
                source,
            })?;
        }
        Ok(out)
    });
    match result {
        Ok(out) => {
            if let Err(e) = stdout
                .write_all(out.stdout.as_bytes())
                .and_then(|_| stdout.flush())
            {
                let _ = writeln!(stderr, "gaussmode: error[Io]: cannot write stdout: {e}");
                return 1;
            }
            match out.verdict {
                Some(e) => report_error(&e, stderr),
                None => 0,
            }
        }
        Err(e) => report_error(&e, stderr),
    }
}

fn report_error(e: &CliError, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "gaussmode: error[{}]: {e}", e.kind());
    e.exit_code()
}

fn read_input(file: Option<&Path>, stdin: &mut dyn Read) -> Result<ParsedCm, CliError> {
    let text = match file {
        Some(p) if p != Path::new("-") => {
            std::fs::read_to_string(p).map_err(|source| CliError::Input {
                path: p.display().to_string(),
                source,
            })?
        }
        _ => {
            let mut s = String::new();
            stdin
                .read_to_string(&mut s)
                .map_err(|source| CliError::Input {
                    path: "stdin".into(),
                    source,
                })?;
            s
        }
    };
    Ok(parse_cmx(&text)?)
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.12}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn execute(command: Command, stdin: &mut dyn Read) -> Result<Output, CliError> {
    let tol = Tolerances::default();
    let mut out = Output::default();
    let s = &mut out.stdout;
    match command {
        Command::Spectrum { file } => {
            let m = read_input(file.as_deref(), stdin)?.cm;
            let spec = symplectic_spectrum(&m, &tol)?;
            let phys = check_physical(&m, tol.purity);
            let _ = writeln!(s, "modes     {}", m.modes());
            let _ = writeln!(s, "spectrum  {}", join(spec.values()));
            let _ = writeln!(s, "physical  {}", phys.physical);
            let _ = writeln!(s, "pure      {}", purity_check(&m, tol.purity));
        }
        Command::Williamson { file, out_s } => {
            let m = read_input(file.as_deref(), stdin)?.cm;
            let w = williamson_decompose(&m, &tol)?;
            let _ = writeln!(s, "spectrum  {}", join(w.spectrum.values()));
            let _ = writeln!(s, "symplectic_residual  {:.3e}", w.s.residual());
            if let Some(path) = out_s {
                let comments = vec![
                    " S with S M S^T = diag(l1, l1, l2, l2, ...), not a covariance matrix"
                        .to_string(),
                ];
                out.files.push((path, emit_matrix(w.s.matrix(), &comments)));
            }
        }
        Command::Modewise {
            file,
            a,
            report,
            out_sa,
            out_sb,
        } => {
            let m = read_input(file.as_deref(), stdin)?.cm;
            let part = Bipartition::from_side_a(&a, m.modes())?;
            let d = modewise_decompose(&m, &part, &tol)?;
            let entropy = if purity_check(&m, tol.purity) {
                Some(entanglement_entropy(&m, &part, &tol)?)
            } else {
                None
            };
            let r = ModewiseReport::new(&d, entropy.as_ref())?;
            s.push_str(&match report {
                ReportFormat::Json => r.to_json(),
                ReportFormat::Text => r.to_text(),
            });
            for (path, sm, side, modes) in [
                (out_sa, &d.s_a, "A", part.side_a()),
                (out_sb, &d.s_b, "B", part.side_b()),
            ] {
                if let Some(path) = path {
                    let list: Vec<String> = modes.iter().map(|i| i.to_string()).collect();
                    let comments = vec![format!(
                        " side {side} transform on modes {}",
                        list.join(",")
                    )];
                    out.files.push((path, emit_matrix(sm.matrix(), &comments)));
                }
            }
        }
        Command::Entropy { file, a, bits } => {
            let m = read_input(file.as_deref(), stdin)?.cm;
            let part = Bipartition::from_side_a(&a, m.modes())?;
            let e = entanglement_entropy(&m, &part, &tol)?;
            let total = if bits {
                e.total / std::f64::consts::LN_2
            } else {
                e.total
            };
            let _ = writeln!(s, "{total}");
        }
        Command::Gen(args) => {
            let (m, description) = generate(&args)?;
            s.push_str(&emit_cmx(&m, &[format!(" gaussmode gen {description}")]));
        }
        Command::Verify { file } => {
            let parsed = read_input(file.as_deref(), stdin)?;
            let m = &parsed.cm;
            let phys = check_physical(m, tol.purity);
            let iso = isotropy_check(m, tol.isotropy);
            let _ = writeln!(s, "modes       {}", m.modes());
            let _ = writeln!(
                s,
                "symmetry    ok (absorbed asymmetry {:.3e}, limit {:.0e} relative)",
                parsed.asymmetry, ASYMMETRY_TOL
            );
            match phys.min_lambda {
                Some(l) => {
                    let _ = writeln!(
                        s,
                        "physical    {} (min symplectic eigenvalue {l:.12})",
                        phys.physical
                    );
                }
                None => {
                    let _ = writeln!(s, "physical    false (not positive definite)");
                }
            }
            let _ = writeln!(s, "pure        {}", purity_check(m, tol.purity));
            match iso.lambda0 {
                Some(l0) => {
                    let _ = writeln!(
                        s,
                        "isotropic   true (lambda0 {l0:.12}, deviation {:.3e})",
                        iso.deviation
                    );
                }
                None => {
                    let _ = writeln!(
                        s,
                        "isotropic   false (rms estimate {:.12}, deviation {:.3e})",
                        iso.estimate, iso.deviation
                    );
                }
            }
            if !phys.physical {
                out.verdict = Some(CliError::Rejected(match phys.min_lambda {
                    Some(l) => format!("minimum symplectic eigenvalue {l} is below 1/2"),
                    None => "matrix is not positive definite".into(),
                }));
            }
        }
    }
    Ok(out)
}

fn positive(name: &str, v: usize) -> Result<usize, CliError> {
    if v == 0 {
        return Err(CliError::Usage(format!("--{name} must be at least 1")));
    }
    Ok(v)
}

fn generate(args: &GenArgs) -> Result<(CovarianceMatrix, String), CliError> {
    let seed = args.seed.unwrap_or(0);
    Ok(match &args.generator {
        Generator::Vacuum { modes } => (vacuum_cm(positive("modes", *modes)?), format!("vacuum --modes {modes}")),
        Generator::Tmss { r } => (tmss_cm(*r)?, format!("tmss --r {r}")),
        Generator::Pair { lambda0, lambda } => (
            isotropic_pair_cm(*lambda0, *lambda)?,
            format!("pair --lambda0 {lambda0} --lambda {lambda}"),
        ),
        Generator::Chain { n, coupling, mass, boundary } => {
            let spec = ChainSpec {
                n: positive("n", *n)?,
                coupling: *coupling,
                mass_term: *mass,
                boundary: match boundary {
                    BoundaryArg::Open => Boundary::Open,
                    BoundaryArg::Periodic => Boundary::Periodic,
                },
            };
            let name = match boundary {
                BoundaryArg::Open => "open",
                BoundaryArg::Periodic => "periodic",
            };
            (
                harmonic_chain_cm(&spec)?,
                format!("chain --n {n} --coupling {coupling} --mass {mass} --boundary {name}"),
            )
        }
        Generator::RandomPure { modes, r_max } => (
            random_pure_cm(positive("modes", *modes)?, seed, *r_max),
            format!("random-pure --modes {modes} --r-max {r_max} --seed {seed}"),
        ),
        Generator::RandomIsotropic { modes, lambda0, r_max } => (
            random_isotropic_cm(positive("modes", *modes)?, *lambda0, seed, *r_max)?,
            format!("random-isotropic --modes {modes} --lambda0 {lambda0} --r-max {r_max} --seed {seed}"),
        ),
        Generator::Thermal { lambdas, r_max } => {
            let list: Vec<String> = lambdas.iter().map(|l| l.to_string()).collect();
            let scramble = args.seed.map(|seed| Scramble { seed, r_max: *r_max });
            let description = match scramble {
                Some(sc) => format!("thermal --lambdas {} --r-max {} --seed {}", list.join(","), sc.r_max, sc.seed),
                None => format!("thermal --lambdas {}", list.join(",")),
            };
            (thermal_cm(lambdas, scramble)?, description)
        }
    })
}
