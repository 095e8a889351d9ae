use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use srdp_eig::assembly::{assemble, local_matrices, BoundaryCondition};
use srdp_eig::basis2d::Family;
use srdp_eig::mesh::{build_dof_map, build_mesh, Domain};
use srdp_eig::studies::{
    parse_target, plot_convergence, run_study, spectrum_report, write_csv, StudySpec, Sweep,
};

#[derive(Parser)]
#[command(
    name = "srdp-eig",
    version,
    about = "Laplace eigenvalues with tensor and serendipity elements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Square,
    Lshape,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Square => Domain::UnitSquare,
            DomainArg::Lshape => Domain::LShape,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BcArg {
    Dirichlet,
    Neumann,
}

impl From<BcArg> for BoundaryCondition {
    fn from(b: BcArg) -> Self {
        match b {
            BcArg::Dirichlet => BoundaryCondition::Dirichlet,
            BcArg::Neumann => BoundaryCondition::Neumann,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Tensor,
    Serendipity,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Tensor => Family::Tensor,
            FamilyArg::Serendipity => Family::Serendipity,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilySelection {
    Tensor,
    Serendipity,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepArg {
    /// Vary the order at fixed resolution.
    P,
    /// Vary the resolution at fixed order.
    H,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisFormat {
    Text,
    Records,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixKind {
    Mass,
    Stiffness,
}

#[derive(Subcommand)]
enum Command {
    /// Run a p- or h-refinement study and write a CSV table.
    Study {
        #[arg(long, value_enum)]
        domain: DomainArg,
        #[arg(long, value_enum)]
        bc: BcArg,
        #[arg(long, value_enum, default_value = "both")]
        family: FamilySelection,
        #[arg(long, value_enum)]
        sweep: SweepArg,
        /// Resolution N for a p-sweep, order p for an h-sweep.
        #[arg(long)]
        fixed: usize,
        /// Exact eigenvalue, as a number or a preset (2pi2, 5pi2, dauge1..dauge4).
        #[arg(long)]
        target: String,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        plot: Option<PathBuf>,
        /// Solve sweep points one after another.
        #[arg(long)]
        deterministic: bool,
    },
    /// Print the local basis of one family and order.
    Basis {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        p: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: BasisFormat,
    },
    /// Compare the lowest eigenvalues of both families with the exact square spectrum.
    Spectrum {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        count: usize,
        #[arg(long, value_enum, default_value = "dirichlet")]
        bc: BcArg,
        #[arg(long, value_enum, default_value = "square")]
        domain: DomainArg,
    },
    /// Print mesh vertices, edges and elements.
    Mesh {
        #[arg(long, value_enum)]
        domain: DomainArg,
        #[arg(long)]
        n: usize,
    },
    /// Write an assembled global matrix in coordinate format.
    Matrix {
        #[arg(long, value_enum)]
        domain: DomainArg,
        #[arg(long, value_enum)]
        bc: BcArg,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        kind: MatrixKind,
    },
}

type CliResult = Result<(), Box<dyn std::error::Error>>;

fn check_positive(name: &str, v: usize) -> CliResult {
    if v == 0 {
        return Err(format!("--{name} must be at least 1").into());
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Study {
            domain,
            bc,
            family,
            sweep,
            fixed,
            target,
            csv,
            plot,
            deterministic,
        } => {
            check_positive("fixed", fixed)?;
            let families = match family {
                FamilySelection::Tensor => vec![Family::Tensor],
                FamilySelection::Serendipity => vec![Family::Serendipity],
                FamilySelection::Both => vec![Family::Tensor, Family::Serendipity],
            };
            let sweep = match sweep {
                SweepArg::P => Sweep::Order { resolution: fixed },
                SweepArg::H => Sweep::Resolution { order: fixed },
            };
            let spec = StudySpec {
                domain: domain.into(),
                bc: bc.into(),
                families,
                target: parse_target(&target)?,
                sweep,
                deterministic,
            };
            let outcome = run_study(&spec)?;
            for notice in &outcome.notices {
                eprintln!("{notice}");
            }
            write_csv(&outcome.rows, &csv)?;
            if let Some(path) = plot {
                plot_convergence(&outcome.rows, &path)?;
            }
        }
        Command::Basis { family, p, format } => {
            check_positive("p", p)?;
            let basis = Family::from(family).basis(p)?;
            let text = match format {
                BasisFormat::Text => basis.to_text(),
                BasisFormat::Records => basis.to_records(),
            };
            write!(out, "{text}")?;
        }
        Command::Spectrum {
            p,
            n,
            count,
            bc,
            domain,
        } => {
            check_positive("p", p)?;
            check_positive("n", n)?;
            let rows = spectrum_report(domain.into(), bc.into(), p, n, count)?;
            writeln!(out, "index,exact,tensor,serendipity")?;
            for r in rows {
                writeln!(
                    out,
                    "{},{:.12e},{:.12e},{:.12e}",
                    r.index, r.exact, r.tensor, r.serendipity
                )?;
            }
        }
        Command::Mesh { domain, n } => {
            check_positive("n", n)?;
            write!(out, "{}", build_mesh(domain.into(), n).dump())?;
        }
        Command::Matrix {
            domain,
            bc,
            family,
            p,
            n,
            kind,
        } => {
            check_positive("p", p)?;
            check_positive("n", n)?;
            let family = Family::from(family);
            let mesh = build_mesh(domain.into(), n);
            let dm = build_dof_map(&mesh, family, p)?;
            let lm = local_matrices(&family.basis(p)?);
            let sys = assemble(&mesh, &dm, &lm, bc.into())?;
            let matrix = match kind {
                MatrixKind::Mass => &sys.mass,
                MatrixKind::Stiffness => &sys.stiffness,
            };
            matrix.write_coordinate(&mut out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
