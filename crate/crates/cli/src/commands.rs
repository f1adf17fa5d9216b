use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use nashdual_core::infconv::{infconv_value_with, InfConvOptions};
use nashdual_core::numfmt::to_report_json;
use nashdual_core::radial::{read_profile_csv, write_columns, write_profile_csv};
use nashdual_core::sharp::{
    build_unweighted_optimizer_on, build_weighted_optimizer_on, constants_report, OPTIMIZER_CELLS,
};
use nashdual_core::verify::{run_battery, BatterySpec, Family};
use nashdual_core::{make_grid, Error, GridScheme, OptimizerMeta, RadialGrid, RadialProfile, VariantChoice};
use serde::Serialize;

use crate::{ConstantsArgs, Format, InfconvArgs, OptimizerArgs, Scheme, Variant, VerifyArgs};

const DEFAULT_CELLS: usize = 2048;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) | Self::Io { .. } => 2,
            Self::Core(e) => match e {
                Error::InvalidGrid(_)
                | Error::InvalidInput(_)
                | Error::NonFinite { .. }
                | Error::DivergentTail { .. }
                | Error::NonzeroMass { .. }
                | Error::NotMonotone
                | Error::Csv { .. }
                | Error::Io(_) => 2,
                _ => 3,
            },
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(io_err(p))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = to_report_json(value).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut w = sink(out)?;
    writeln!(w, "{text}").and_then(|_| w.flush()).map_err(io_err(out.unwrap_or(Path::new("stdout"))))
}

fn scheme(s: Scheme) -> GridScheme {
    match s {
        Scheme::Uniform => GridScheme::Uniform,
        Scheme::Graded => GridScheme::Graded,
    }
}

fn weight(p: f64) -> Result<f64> {
    if p.is_finite() && p >= 0.0 {
        Ok(p)
    } else {
        Err(CliError::Usage(format!("--p must be a nonnegative number, got {p}")))
    }
}

pub fn constants(a: ConstantsArgs) -> Result<ExitCode> {
    let report = constants_report(a.dim as usize, weight(a.p)?)?;
    emit_json(&report, a.output.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn family_profile(a: &InfconvArgs, name: &str, n: usize) -> Result<RadialProfile> {
    let param = match name {
        "gaussian" => a.sigma,
        "smoothed-indicator" => a.width,
        _ => None,
    };
    let family = Family::from_name(name, param)?;
    let cells = a.cells.unwrap_or(DEFAULT_CELLS);
    let grid = if family == Family::Optimizer {
        family.grid(n, a.r_max, cells)?
    } else {
        let r_max = a.r_max.unwrap_or_else(|| family.default_r_max());
        Arc::new(make_grid(n, r_max, cells, scheme(a.scheme))?)
    };
    Ok(family.profile_on(grid, a.p)?)
}

fn csv_profile(a: &InfconvArgs, path: &Path, n: usize) -> Result<RadialProfile> {
    let file = File::open(path).map_err(io_err(path))?;
    let table = read_profile_csv(file)?;
    if a.cells.is_none() && a.r_max.is_none() {
        let grid = Arc::new(RadialGrid::from_nodes(n, table.r.clone())?);
        return Ok(RadialProfile::new(grid, table.value)?);
    }
    let r_max = a.r_max.unwrap_or_else(|| table.last_radius());
    let grid = Arc::new(make_grid(n, r_max, a.cells.unwrap_or(DEFAULT_CELLS), scheme(a.scheme))?);
    Ok(table.resample(grid)?)
}

pub fn infconv(a: InfconvArgs) -> Result<ExitCode> {
    let n = a.dim as usize;
    let p = weight(a.p)?;
    let g = match (&a.family, &a.csv) {
        (Some(name), None) => family_profile(&a, name, n)?,
        (None, Some(path)) => csv_profile(&a, path, n)?,
        _ => return Err(CliError::Usage("give exactly one of --family or --csv".into())),
    };
    let mut opts = InfConvOptions {
        allow_signed: a.allow_signed,
        ..InfConvOptions::default()
    };
    if let Some(tol) = a.tol {
        if !(tol > 0.0) {
            return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
        }
        opts.tol = tol;
    }
    let sol = infconv_value_with(&g, p, &opts)?;
    let d = &sol.diagnostics;
    eprintln!(
        "solver path {}, {} iterations, {} grid expansions",
        format!("{:?}", d.path).to_lowercase(), d.iterations, d.grid_expansions
    );
    let out = a.output.out.as_deref();
    match a.format {
        Format::Json => emit_json(&sol.record(), out)?,
        Format::Csv => {
            let w = sink(out)?;
            write_columns(w, &["r", "h", "phi"], &[sol.h.grid().nodes(), sol.h.values(), sol.phi.values()])?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct OptimizerMetadata {
    n: usize,
    p: f64,
    cells: usize,
    r_max: f64,
    #[serde(flatten)]
    meta: OptimizerMeta,
    #[serde(skip_serializing_if = "Option::is_none")]
    el_residual_printed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    el_residual_rederived: Option<f64>,
}

pub fn optimizer(a: OptimizerArgs) -> Result<ExitCode> {
    let n = a.dim as usize;
    let p = weight(a.p)?;
    let grid = Family::Optimizer.grid(n, None, a.cells.unwrap_or(OPTIMIZER_CELLS))?;
    let (g, metadata) = if p == 0.0 {
        if a.variant != Variant::Auto {
            return Err(CliError::Usage("--variant applies to --p 2 only".into()));
        }
        let opt = build_unweighted_optimizer_on(grid.clone(), 1.0)?;
        let meta = OptimizerMetadata {
            n,
            p,
            cells: grid.cells(),
            r_max: grid.r_max(),
            meta: opt.meta,
            el_residual_printed: None,
            el_residual_rederived: None,
        };
        (opt.g, meta)
    } else if p == 2.0 {
        let choice = match a.variant {
            Variant::Printed => VariantChoice::Printed,
            Variant::Rederived => VariantChoice::Rederived,
            Variant::Auto => VariantChoice::Auto,
        };
        let build = build_weighted_optimizer_on(grid.clone(), choice)?;
        let meta = OptimizerMetadata {
            n,
            p,
            cells: grid.cells(),
            r_max: grid.r_max(),
            meta: build.accepted.profile.meta.clone(),
            el_residual_printed: Some(build.printed.el_relative),
            el_residual_rederived: Some(build.rederived.el_relative),
        };
        (build.accepted.profile.g, meta)
    } else {
        return Err(CliError::Usage(format!("optimizers exist for --p 0 and --p 2, got {p}")));
    };
    let out = a.output.out.as_deref();
    match a.format {
        Format::Csv => {
            write_profile_csv(sink(out)?, &g)?;
            if let Some(path) = out {
                emit_json(&metadata, Some(&companion(path, "json")))?;
            }
        }
        Format::Json => {
            emit_json(&metadata, out)?;
            if let Some(path) = out {
                let csv = companion(path, "csv");
                write_profile_csv(sink(Some(&csv))?, &g)?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn companion(path: &Path, ext: &str) -> PathBuf {
    let alt = path.with_extension(ext);
    if alt == path {
        path.with_extension(format!("meta.{ext}"))
    } else {
        alt
    }
}

pub fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let p = weight(a.p)?;
    let mut spec = BatterySpec::standard(a.dims.iter().map(|&d| d as usize).collect(), p);
    if let Some(cells) = a.cells {
        spec.cells = cells;
    }
    let report = run_battery(&spec)?;
    emit_json(&report, a.output.out.as_deref())?;
    if report.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        for f in &report.summary.failures {
            eprintln!("failed: {f}");
        }
        Ok(ExitCode::from(4))
    }
}

