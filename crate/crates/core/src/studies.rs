//! p- and h-refinement sweeps, CSV output, SVG convergence plots and
//! spectrum comparison against the exact square spectrum.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use thiserror::Error;

use crate::assembly::{assemble, local_matrices, AssemblyError, BoundaryCondition, LocalMatrices};
use crate::basis2d::{Basis2dError, Family};
use crate::eigensolve::{select_near, solve_generalized, EigenError, EigenResult, SolveMetadata};
use crate::mesh::{build_dof_map, build_mesh, Domain};

/// Highest order reached by a p-sweep.
pub const MAX_ORDER: usize = 6;
/// Finest resolution reached by an h-sweep.
pub const MAX_RESOLUTION: usize = 5;
/// Smallest error shown on a log-scale plot.
pub const PLOT_FLOOR: f64 = 1e-16;

/// Reference eigenvalues of the L-shaped Neumann problem.
pub const DAUGE: [f64; 4] = [1.4756218450, 3.5340313683, 9.8696044011, 11.389479398];

#[derive(Debug, Error)]
pub enum StudyError {
    #[error(transparent)]
    Basis(#[from] Basis2dError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("unknown target '{0}': expected a number or one of {PRESET_NAMES}")]
    InvalidTarget(String),
    #[error("exact spectrum is only available on the unit square")]
    UnsupportedDomain,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("nothing to plot")]
    EmptyPlot,
}

const PRESET_NAMES: &str = "2pi2, 5pi2, dauge1, dauge2, dauge3, dauge4";

/// Resolves a preset name or parses a float.
pub fn parse_target(text: &str) -> Result<f64, StudyError> {
    let preset = match text.to_ascii_lowercase().as_str() {
        "2pi2" | "two-pi-squared" => Some(2.0 * PI * PI),
        "5pi2" | "five-pi-squared" => Some(5.0 * PI * PI),
        "dauge1" => Some(DAUGE[0]),
        "dauge2" => Some(DAUGE[1]),
        "dauge3" => Some(DAUGE[2]),
        "dauge4" => Some(DAUGE[3]),
        _ => None,
    };
    match preset {
        Some(v) => Ok(v),
        None => text
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| StudyError::InvalidTarget(text.to_string())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// `p = 1..=6` at fixed resolution `N`.
    Order { resolution: usize },
    /// `N = 1..=5` at fixed order `p`.
    Resolution { order: usize },
}

impl Sweep {
    /// `(p, N)` pairs in sweep order.
    pub fn points(self) -> Vec<(usize, usize)> {
        match self {
            Sweep::Order { resolution } => (1..=MAX_ORDER).map(|p| (p, resolution)).collect(),
            Sweep::Resolution { order } => (1..=MAX_RESOLUTION).map(|n| (order, n)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudySpec {
    pub domain: Domain,
    pub bc: BoundaryCondition,
    pub families: Vec<Family>,
    pub target: f64,
    pub sweep: Sweep,
    /// Run sweep points sequentially.
    pub deterministic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub family: Family,
    pub p: usize,
    pub n: usize,
    /// Free DOFs after boundary elimination.
    pub ndofs: usize,
    pub lambda_h: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StudyOutcome {
    pub rows: Vec<StudyRow>,
    /// Skipped sweep points with the reason.
    pub notices: Vec<String>,
}

/// Exact local matrices keyed by family and order, shared across sweep points.
#[derive(Debug, Default)]
pub struct LocalMatrixCache {
    inner: Mutex<HashMap<(Family, usize), Arc<LocalMatrices>>>,
}

impl LocalMatrixCache {
    pub fn get(&self, family: Family, p: usize) -> Result<Arc<LocalMatrices>, StudyError> {
        if let Some(lm) = self.inner.lock().expect("cache poisoned").get(&(family, p)) {
            return Ok(Arc::clone(lm));
        }
        let lm = Arc::new(local_matrices(&family.basis(p)?));
        self.inner
            .lock()
            .expect("cache poisoned")
            .insert((family, p), Arc::clone(&lm));
        Ok(lm)
    }
}

/// Assembles and solves one configuration. `Ok(None)` means Dirichlet
/// elimination left no free DOFs.
pub fn solve_case(
    domain: Domain,
    bc: BoundaryCondition,
    family: Family,
    p: usize,
    n: usize,
    cache: &LocalMatrixCache,
) -> Result<Option<EigenResult>, StudyError> {
    let mesh = build_mesh(domain, n);
    let dm = build_dof_map(&mesh, family, p)?;
    let lm = cache.get(family, p)?;
    let sys = match assemble(&mesh, &dm, &lm, bc) {
        Ok(sys) => sys,
        Err(AssemblyError::EmptySystem) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut result = solve_generalized(&sys)?;
    result.metadata = Some(SolveMetadata {
        family,
        order: p,
        resolution: n,
        bc,
        domain,
        ndofs: sys.dim(),
    });
    Ok(Some(result))
}

pub fn run_study(spec: &StudySpec) -> Result<StudyOutcome, StudyError> {
    run_study_with_cache(spec, &LocalMatrixCache::default())
}

pub fn run_study_with_cache(
    spec: &StudySpec,
    cache: &LocalMatrixCache,
) -> Result<StudyOutcome, StudyError> {
    let jobs: Vec<(Family, usize, usize)> = spec
        .families
        .iter()
        .flat_map(|&f| spec.sweep.points().into_iter().map(move |(p, n)| (f, p, n)))
        .collect();
    let run = |&(family, p, n): &(Family, usize, usize)| {
        solve_case(spec.domain, spec.bc, family, p, n, cache).map(|r| (family, p, n, r))
    };
    let results: Vec<_> = if spec.deterministic {
        jobs.iter().map(run).collect::<Result<_, _>>()?
    } else {
        jobs.par_iter().map(run).collect::<Result<_, _>>()?
    };

    let mut outcome = StudyOutcome::default();
    for (family, p, n, result) in results {
        let Some(result) = result else {
            outcome.notices.push(format!(
                "skipped {family} p={p} N={n}: {} conditions leave no free degrees of freedom",
                spec.bc.name()
            ));
            continue;
        };
        let lambda_h = select_near(&result, spec.target, 1)?[0];
        outcome.rows.push(StudyRow {
            family,
            p,
            n,
            ndofs: result.eigenvalues.len(),
            lambda_h,
            error: (lambda_h - spec.target).abs(),
        });
    }
    Ok(outcome)
}

const CSV_HEADER: [&str; 6] = ["family", "p", "N", "ndofs", "lambda_h", "error"];

fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv(rows: &[StudyRow], path: &Path) -> Result<(), StudyError> {
    let csv_err = |source| StudyError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.family.name().to_string(),
            r.p.to_string(),
            r.n.to_string(),
            r.ndofs.to_string(),
            format_float(r.lambda_h),
            format_float(r.error),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|source| StudyError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_csv(path: &Path) -> Result<Vec<StudyRow>, StudyError> {
    let csv_err = |source| StudyError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let bad = |what: &str| StudyError::Csv {
        path: path.to_path_buf(),
        source: csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("bad {what}"),
        )),
    };
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        let field = |k: usize| record.get(k).ok_or_else(|| bad(CSV_HEADER[k]));
        let family = match field(0)? {
            "tensor" => Family::Tensor,
            "serendipity" => Family::Serendipity,
            _ => return Err(bad("family")),
        };
        rows.push(StudyRow {
            family,
            p: field(1)?.parse().map_err(|_| bad("p"))?,
            n: field(2)?.parse().map_err(|_| bad("N"))?,
            ndofs: field(3)?.parse().map_err(|_| bad("ndofs"))?,
            lambda_h: field(4)?.parse().map_err(|_| bad("lambda_h"))?,
            error: field(5)?.parse().map_err(|_| bad("error"))?,
        });
    }
    Ok(rows)
}

/// Standalone SVG of `log10(error)` against free DOFs, one series per family.
pub fn render_convergence_svg(rows: &[StudyRow]) -> Result<String, StudyError> {
    if rows.is_empty() {
        return Err(StudyError::EmptyPlot);
    }
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const LEFT: f64 = 80.0;
    const RIGHT: f64 = 160.0;
    const TOP: f64 = 30.0;
    const BOTTOM: f64 = 60.0;

    let log_err = |r: &StudyRow| r.error.max(PLOT_FLOOR).log10();
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in rows {
        x_min = x_min.min(r.ndofs as f64);
        x_max = x_max.max(r.ndofs as f64);
        y_min = y_min.min(log_err(r));
        y_max = y_max.max(log_err(r));
    }
    let x_min = x_min.min(0.0);
    let (y_min, y_max) = (y_min.floor(), y_max.ceil().max(y_min.floor() + 1.0));
    let x_max = if x_max > x_min { x_max } else { x_min + 1.0 };
    let sx = |v: f64| LEFT + (v - x_min) / (x_max - x_min) * (W - LEFT - RIGHT);
    let sy = |v: f64| TOP + (y_max - v) / (y_max - y_min) * (H - TOP - BOTTOM);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let (x0, x1, y0, y1) = (sx(x_min), sx(x_max), sy(y_min), sy(y_max));
    let _ = writeln!(
        svg,
        r#"<path d="M {x0:.1} {y1:.1} L {x0:.1} {y0:.1} L {x1:.1} {y0:.1}" stroke="black" fill="none"/>"#
    );
    let mut tick = y_min;
    while tick <= y_max + 1e-9 {
        let ty = sy(tick);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">1e{}</text>"#,
            x0 - 6.0,
            ty + 4.0,
            tick as i64
        );
        tick += 1.0;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#,
        x1,
        y0 + 16.0,
        x_max
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">degrees of freedom</text>"#,
        (x0 + x1) / 2.0,
        H - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.1})">eigenvalue error</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    let mut families: Vec<Family> = rows.iter().map(|r| r.family).collect();
    families.sort();
    families.dedup();
    for (k, family) in families.iter().enumerate() {
        let color = match family {
            Family::Tensor => "#1f77b4",
            Family::Serendipity => "#d62728",
        };
        let series: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.family == *family)
            .map(|r| (sx(r.ndofs as f64), sy(log_err(r))))
            .collect();
        if series.len() > 1 {
            let pts: Vec<String> = series
                .iter()
                .map(|(x, y)| format!("{x:.1},{y:.1}"))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="1.5"/>"#,
                pts.join(" ")
            );
        }
        for (x, y) in &series {
            let _ = writeln!(
                svg,
                r#"<circle cx="{x:.1}" cy="{y:.1}" r="3.5" fill="{color}"/>"#
            );
        }
        let ly = TOP + 20.0 * k as f64 + 10.0;
        let lx = W - RIGHT + 20.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{lx:.1}" y="{:.1}" width="12" height="12" fill="{color}"/>"#,
            ly - 10.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{ly:.1}" font-size="12">{}</text>"#,
            lx + 18.0,
            family.name()
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn plot_convergence(rows: &[StudyRow], path: &Path) -> Result<(), StudyError> {
    let svg = render_convergence_svg(rows)?;
    fs::write(path, svg).map_err(|source| StudyError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// The `count` smallest values of `(m² + n²) π²` on the unit square, with
/// multiplicity. Neumann allows `m, n >= 0`, Dirichlet `m, n >= 1`.
pub fn exact_square_eigenvalues(bc: BoundaryCondition, count: usize) -> Vec<f64> {
    let start = match bc {
        BoundaryCondition::Dirichlet => 1,
        BoundaryCondition::Neumann => 0,
    };
    let limit = start + count as u64 + 1;
    let mut sums: Vec<u64> = (start..limit)
        .flat_map(|m| (start..limit).map(move |n| m * m + n * n))
        .collect();
    sums.sort_unstable();
    sums.truncate(count);
    sums.into_iter().map(|s| s as f64 * PI * PI).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub index: usize,
    pub exact: f64,
    pub tensor: f64,
    pub serendipity: f64,
}

/// Side-by-side exact, tensor and serendipity spectra on the unit square.
pub fn spectrum_report(
    domain: Domain,
    bc: BoundaryCondition,
    p: usize,
    n: usize,
    count: usize,
) -> Result<Vec<SpectrumRow>, StudyError> {
    if domain != Domain::UnitSquare {
        return Err(StudyError::UnsupportedDomain);
    }
    let cache = LocalMatrixCache::default();
    let exact = exact_square_eigenvalues(bc, count);
    let solve = |family| -> Result<Vec<f64>, StudyError> {
        let values = solve_case(domain, bc, family, p, n, &cache)?
            .map(|r| r.eigenvalues)
            .unwrap_or_default();
        if values.len() < count {
            return Err(EigenError::InsufficientSpectrum {
                requested: count,
                available: values.len(),
            }
            .into());
        }
        Ok(values)
    };
    let tensor = solve(Family::Tensor)?;
    let serendipity = solve(Family::Serendipity)?;
    Ok((0..count)
        .map(|index| SpectrumRow {
            index,
            exact: exact[index],
            tensor: tensor[index],
            serendipity: serendipity[index],
        })
        .collect())
}
