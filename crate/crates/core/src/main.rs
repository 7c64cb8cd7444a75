use std::fs;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gup_hydrogen::export::{
    samples_json, spectrum_report, transform_samples, wavefunction_diagnostics, write_diagnostics_csv,
    write_samples_csv, format_float, WavefunctionDiagnostics,
};
use gup_hydrogen::localization::{default_samples, uniform_samples, DEFAULT_SAMPLES};
use gup_hydrogen::semiclassical::energy_semiclassical;
use gup_hydrogen::spectrum::{energy_closed_form, moment_p4_asymptotic_slope, moment_p4_cutoff};
use gup_hydrogen::verify::{run_verification, VerifyConfig};
use gup_hydrogen::wavefunction::{EigenfunctionContext, DEFAULT_NODES};
use gup_hydrogen::{AbscissaKind, Error, Method, ModelParams, SpectrumTable, Tolerances};

const EXIT_VALIDATION: u8 = 1;
const EXIT_NON_CONVERGENCE: u8 = 2;
const EXIT_VERIFY_FAILED: u8 = 3;

/// Bound states of the 1D hydrogen atom with [X,P] = i(1 + βP²), units ħ = 2m = 1.
#[derive(Parser, Debug)]
#[command(name = "gup-hydrogen", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Levels by closed form, root finding, Bohr-Sommerfeld and perturbation theory.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "1..5", value_parser = parse_levels)]
        levels: RangeInclusive<u32>,
    },
    /// Momentum-space eigenfunction on its grid with scalar diagnostics.
    Wavefn {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        /// Momentum cutoff for the undeformed <p^4> integral.
        #[arg(long)]
        cutoff: Option<f64>,
    },
    /// Quasiposition wave function psi(xi).
    Quasipos {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_span)]
        xi_range: Option<(f64, f64)>,
    },
    /// Formal coordinate-space solution eta(x).
    Coord {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_span)]
        x_range: Option<(f64, f64)>,
    },
    /// Bohr-Sommerfeld levels.
    Semiclassical {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "1..5", value_parser = parse_levels)]
        levels: RangeInclusive<u32>,
    },
    /// Full invariant suite; exit status 3 if any check fails.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "1..10", value_parser = parse_levels)]
        levels: RangeInclusive<u32>,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, default_value_t = DEFAULT_NODES, value_parser = parse_grid_points)]
    grid_points: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tol_spectrum: Option<f64>,
    #[arg(long)]
    tol_quadrature: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

fn parse_levels(s: &str) -> Result<RangeInclusive<u32>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let a: u32 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: u32 = b.trim_start_matches('=').trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if a == 0 || b < a {
        return Err(format!("level range must satisfy 1 <= A <= B, got {a}..{b}"));
    }
    Ok(a..=b)
}

fn parse_span(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(format!("range must be finite with LO < HI, got {a}..{b}"));
    }
    Ok((a, b))
}

fn parse_grid_points(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{s:?}: {e}"))?;
    if n < 64 || !n.is_multiple_of(2) {
        return Err(format!("grid node count must be even and >= 64, got {n}"));
    }
    Ok(n)
}

enum Failure {
    Physics(Error),
    VerifyFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Physics(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Physics(e.into())
    }
}

impl Common {
    fn params(&self) -> Result<ModelParams, Error> {
        ModelParams::new(self.alpha, self.beta)
    }

    fn tolerances(&self) -> Result<Tolerances, Error> {
        let mut t = Tolerances::default();
        for (name, v) in [("tol-spectrum", self.tol_spectrum), ("tol-quadrature", self.tol_quadrature)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::InvalidParameter(format!("--{name} must be positive, got {v}")));
                }
            }
        }
        if let Some(v) = self.tol_spectrum {
            t.spectrum = v;
        }
        if let Some(v) = self.tol_quadrature {
            t.quadrature_abs = v;
            t.quadrature_rel = v;
        }
        Ok(t)
    }

    /// Writes the primary artifact to --out or stdout.
    fn emit(&self, bytes: &[u8]) -> Result<(), Error> {
        match &self.out {
            Some(path) => fs::write(path, bytes).map_err(|e| Error::Output(format!("{}: {e}", path.display()))),
            None => Ok(io::stdout().lock().write_all(bytes)?),
        }
    }

    /// CSV diagnostics go next to --out, or to stderr without it.
    fn emit_diagnostics<D: Serialize>(&self, diagnostics: &D) -> Result<(), Error> {
        let mut buf = Vec::new();
        write_diagnostics_csv(&mut buf, diagnostics)?;
        match &self.out {
            Some(path) => {
                let side = diagnostics_path(path);
                fs::write(&side, buf).map_err(|e| Error::Output(format!("{}: {e}", side.display())))
            }
            None => Ok(io::stderr().lock().write_all(&buf)?),
        }
    }
}

fn diagnostics_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".diagnostics.csv");
    PathBuf::from(name)
}

fn level_context(common: &Common, n: u32) -> Result<EigenfunctionContext, Error> {
    let params = common.params()?;
    if params.is_undeformed() {
        return Err(Error::InvalidParameter("eigenfunctions on the momentum interval need beta > 0".into()));
    }
    Ok(EigenfunctionContext::new(params, energy_closed_form(&params, n)?))
}

#[derive(Serialize)]
struct WavefnDiagnostics {
    #[serde(flatten)]
    base: WavefunctionDiagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    cutoff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    moment_p4_cutoff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    moment_p4_asymptotic_slope: Option<f64>,
}

fn spectrum(common: &Common, levels: RangeInclusive<u32>) -> Result<(), Failure> {
    let report = spectrum_report(&common.params()?, levels, &common.tolerances()?)?;
    match common.format {
        Format::Json => common.emit(report.to_json()?.as_bytes())?,
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            common.emit(&buf)?;
        }
    }
    Ok(())
}

fn wavefn(common: &Common, n: u32, cutoff: Option<f64>) -> Result<(), Failure> {
    let ctx = level_context(common, n)?;
    let grid = ctx.grid(common.grid_points)?;
    let samples = ctx.sample(&grid)?;
    let moment = cutoff
        .map(|c| moment_p4_cutoff(ctx.params(), n, c))
        .transpose()?;
    let diagnostics = WavefnDiagnostics {
        base: wavefunction_diagnostics(&ctx, &grid)?,
        cutoff,
        moment_p4_cutoff: moment,
        moment_p4_asymptotic_slope: cutoff.map(|_| moment_p4_asymptotic_slope(ctx.params(), n)),
    };
    emit_samples(common, &samples, &diagnostics)
}

fn transform(common: &Common, n: u32, kind: AbscissaKind, span: Option<(f64, f64)>) -> Result<(), Failure> {
    let ctx = level_context(common, n)?;
    let grid = ctx.grid(common.grid_points)?;
    let abscissae = match span {
        Some((lo, hi)) => uniform_samples(lo, hi, DEFAULT_SAMPLES)?,
        None => default_samples(&ctx),
    };
    let (samples, diagnostics) = transform_samples(&ctx, &grid, kind, &abscissae)?;
    emit_samples(common, &samples, &diagnostics)
}

fn emit_samples<D: Serialize>(
    common: &Common,
    samples: &gup_hydrogen::SampledWaveFunction,
    diagnostics: &D,
) -> Result<(), Failure> {
    match common.format {
        Format::Json => common.emit(samples_json(samples, diagnostics)?.as_bytes())?,
        Format::Csv => {
            let mut buf = Vec::new();
            write_samples_csv(&mut buf, samples)?;
            common.emit(&buf)?;
            common.emit_diagnostics(diagnostics)?;
        }
    }
    Ok(())
}

fn semiclassical(common: &Common, levels: RangeInclusive<u32>) -> Result<(), Failure> {
    let params = common.params()?;
    let computed = levels
        .map(|n| Ok((energy_semiclassical(&params, n)?, energy_closed_form(&params, n)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let table = SpectrumTable::new(
        params,
        Method::Semiclassical,
        computed.iter().map(|(s, _)| *s).collect(),
        common.tolerances()?,
    )?;
    match common.format {
        Format::Json => common.emit((serde_json::to_string_pretty(&table).map_err(Error::from)? + "\n").as_bytes())?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Error::from(e);
            w.write_record(["n", "epsilon", "energy", "delta_closed_form"]).map_err(csv_err)?;
            for (s, c) in &computed {
                w.write_record([
                    s.n.to_string(),
                    format_float(s.epsilon),
                    format_float(s.energy),
                    format_float(s.energy - c.energy),
                ])
                .map_err(csv_err)?;
            }
            let buf = w.into_inner().map_err(|e| Error::Output(e.to_string()))?;
            common.emit(&buf)?;
        }
    }
    Ok(())
}

fn verify(common: &Common, levels: RangeInclusive<u32>) -> Result<(), Failure> {
    let config = VerifyConfig {
        levels,
        grid_points: common.grid_points,
        tolerances: common.tolerances()?,
    };
    let report = run_verification(&common.params()?, &config)?;
    {
        let mut err = io::stderr().lock();
        for check in &report.checks {
            writeln!(err, "{check}")?;
        }
    }
    match common.format {
        Format::Json => common.emit(report.to_json()?.as_bytes())?,
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            common.emit(&buf)?;
        }
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::VerifyFailed)
    }
}

fn error_record(kind: &str, message: &str, exit_code: u8) {
    let record = serde_json::json!({
        "error": { "kind": kind, "message": message, "exit_code": exit_code }
    });
    eprintln!("{record}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            error_record("invalid_arguments", message.trim(), EXIT_VALIDATION);
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    let outcome = match &cli.command {
        Command::Spectrum { common, levels } => spectrum(common, levels.clone()),
        Command::Wavefn { common, n, cutoff } => wavefn(common, *n, *cutoff),
        Command::Quasipos { common, n, xi_range } => transform(common, *n, AbscissaKind::QuasipositionXi, *xi_range),
        Command::Coord { common, n, x_range } => transform(common, *n, AbscissaKind::CoordinateX, *x_range),
        Command::Semiclassical { common, levels } => semiclassical(common, levels.clone()),
        Command::Verify { common, levels } => verify(common, levels.clone()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::VerifyFailed) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(Failure::Physics(e)) => {
            let code = if e.is_non_convergence() { EXIT_NON_CONVERGENCE } else { EXIT_VALIDATION };
            error_record(e.kind(), &e.to_string(), code);
            ExitCode::from(code)
        }
    }
}
