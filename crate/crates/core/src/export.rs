//! Side-by-side spectra, sampled functions and their diagnostics, with CSV and
//! JSON writers.
//!
//! CSV numbers are written with 17 significant digits; JSON numbers use the
//! shortest representation that parses back to the same double.

use std::io::Write;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coordinate::coordinate_samples;
use crate::error::{Error, Result};
use crate::localization::quasiposition_samples;
use crate::model::{
    AbscissaKind, EnergyLevel, Method, ModelParams, MomentumGrid, SampledWaveFunction, SpectrumTable, Tolerances,
};
use crate::numerics::QuadratureSpec;
use crate::semiclassical::{default_spec, energy_semiclassical_with};
use crate::spectrum::{energy_closed_form, energy_perturbative, energy_root_found_with_tol, PerturbativeOrder};
use crate::wavefunction::{integral_condition, schrodinger_residual, EigenfunctionContext};

/// Methods shown by [`spectrum_report`], in column order.
pub const REPORT_METHODS: [Method; 4] = [
    Method::ClosedForm,
    Method::RootFound,
    Method::Semiclassical,
    Method::Perturbative,
];

/// E_method − E_closed_form for one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelDelta {
    pub n: u32,
    pub method: Method,
    pub delta_energy: f64,
    pub relative: f64,
}

/// One [`SpectrumTable`] per method plus deltas against the closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub params: ModelParams,
    pub tables: Vec<SpectrumTable>,
    pub deltas: Vec<LevelDelta>,
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn check_levels(levels: &RangeInclusive<u32>) -> Result<()> {
    if levels.is_empty() || *levels.start() == 0 {
        return Err(Error::InvalidParameter(format!(
            "level range must be nonempty and start at 1 or above, got {}..{}",
            levels.start(),
            levels.end()
        )));
    }
    Ok(())
}

/// Levels by every method in [`REPORT_METHODS`]. The root-found route needs
/// β > 0 and is left out at β = 0; perturbative levels with non-negative
/// energy are not bound states and are left out.
pub fn spectrum_report(
    params: &ModelParams,
    levels: RangeInclusive<u32>,
    tolerances: &Tolerances,
) -> Result<SpectrumReport> {
    check_levels(&levels)?;
    let spec = QuadratureSpec {
        abs_tol: tolerances.quadrature_abs.min(default_spec().abs_tol),
        rel_tol: tolerances.quadrature_rel.min(default_spec().rel_tol),
        ..default_spec()
    };
    let rows = levels
        .clone()
        .into_par_iter()
        .map(|n| -> Result<[Option<EnergyLevel>; 4]> {
            let closed = energy_closed_form(params, n)?;
            let root = if params.is_undeformed() {
                None
            } else {
                Some(energy_root_found_with_tol(params, n, tolerances.spectrum)?)
            };
            let semi = energy_semiclassical_with(params, n, &spec)?;
            let e = energy_perturbative(params, n, PerturbativeOrder::Beta)?;
            let pert = EnergyLevel::new(n, -e, Method::Perturbative).ok();
            Ok([Some(closed), root, Some(semi), pert])
        })
        .collect::<Result<Vec<_>>>()?;

    let mut tables = Vec::new();
    for (k, method) in REPORT_METHODS.iter().enumerate() {
        let levels: Vec<EnergyLevel> = rows.iter().filter_map(|r| r[k]).collect();
        if !levels.is_empty() {
            tables.push(SpectrumTable::new(*params, *method, levels, *tolerances)?);
        }
    }
    let mut deltas = Vec::new();
    for row in &rows {
        let closed = row[0].expect("closed form always present");
        for level in row[1..].iter().flatten() {
            let delta = level.energy - closed.energy;
            deltas.push(LevelDelta {
                n: closed.n,
                method: level.method,
                delta_energy: delta,
                relative: delta.abs() / closed.epsilon,
            });
        }
    }
    Ok(SpectrumReport {
        params: *params,
        tables,
        deltas,
    })
}

impl SpectrumReport {
    pub fn table(&self, method: Method) -> Option<&SpectrumTable> {
        self.tables.iter().find(|t| t.method == method)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Columns: n, energy per method, then delta per non-reference method.
    pub fn csv_header() -> Vec<String> {
        let mut h = vec!["n".to_string()];
        h.extend(REPORT_METHODS.iter().map(|m| format!("energy_{m}")));
        h.extend(REPORT_METHODS[1..].iter().map(|m| format!("delta_{m}")));
        h
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::csv_header())?;
        let Some(closed) = self.table(Method::ClosedForm) else {
            return Ok(w.flush()?);
        };
        for reference in &closed.levels {
            let energy = |m: Method| {
                self.table(m)
                    .and_then(|t| t.levels.iter().find(|l| l.n == reference.n))
                    .map(|l| l.energy)
            };
            let mut record = vec![reference.n.to_string()];
            record.extend(REPORT_METHODS.iter().map(|&m| energy(m).map(format_float).unwrap_or_default()));
            record.extend(
                REPORT_METHODS[1..]
                    .iter()
                    .map(|&m| energy(m).map(|e| format_float(e - reference.energy)).unwrap_or_default()),
            );
            w.write_record(record)?;
        }
        Ok(w.flush()?)
    }
}

/// Scalar diagnostics of a momentum-space eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionDiagnostics {
    pub alpha: f64,
    pub beta: f64,
    pub n: u32,
    pub epsilon: f64,
    pub energy: f64,
    pub normalization_a: f64,
    pub c_re: f64,
    pub c_im: f64,
    pub abs_im_c: f64,
    pub integral_phi_re: f64,
    pub integral_phi_im: f64,
    pub abs_integral_phi: f64,
    pub norm: f64,
    pub schrodinger_residual: f64,
}

pub fn wavefunction_diagnostics(ctx: &EigenfunctionContext, grid: &MomentumGrid) -> Result<WavefunctionDiagnostics> {
    let level = ctx
        .level()
        .ok_or_else(|| Error::InvalidParameter("diagnostics need a quantized level".into()))?;
    let sampled = ctx.sample(grid)?;
    let integral = integral_condition(ctx, grid)?;
    Ok(WavefunctionDiagnostics {
        alpha: ctx.params().alpha(),
        beta: ctx.params().beta(),
        n: level.n,
        epsilon: level.epsilon,
        energy: level.energy,
        normalization_a: ctx.normalization(),
        c_re: ctx.c().re,
        c_im: ctx.c().im,
        abs_im_c: ctx.c().im.abs(),
        integral_phi_re: integral.re,
        integral_phi_im: integral.im,
        abs_integral_phi: integral.norm(),
        norm: sampled.norm_squared(grid)?,
        schrodinger_residual: schrodinger_residual(ctx, grid)?,
    })
}

/// Origin diagnostics of a quasiposition or coordinate profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformDiagnostics {
    pub kind: AbscissaKind,
    pub formal_solution: bool,
    pub alpha: f64,
    pub beta: f64,
    pub n: u32,
    pub epsilon: f64,
    pub origin_re: f64,
    pub origin_im: f64,
    pub abs_origin: f64,
    pub max_abs: f64,
    pub origin_ratio: f64,
}

const FORMAL_NOTE: &str =
    "eta(x) is a formal solution built from zero-uncertainty position eigenstates, not a physical wave function";

/// ψ(ξ) (`kind = QuasipositionXi`) or η(x) (`kind = CoordinateX`) at `abscissae`,
/// with the origin value evaluated separately.
pub fn transform_samples(
    ctx: &EigenfunctionContext,
    grid: &MomentumGrid,
    kind: AbscissaKind,
    abscissae: &[f64],
) -> Result<(SampledWaveFunction, TransformDiagnostics)> {
    let level = ctx
        .level()
        .ok_or_else(|| Error::InvalidParameter("transforms need a quantized level".into()))?;
    let run = |points: &[f64]| match kind {
        AbscissaKind::QuasipositionXi => quasiposition_samples(ctx, grid, points),
        AbscissaKind::CoordinateX => coordinate_samples(ctx, grid, points),
        AbscissaKind::MomentumP => Err(Error::InvalidParameter("momentum samples are not a transform".into())),
    };
    let samples = run(abscissae)?;
    let origin = run(&[0.0])?.values[0];
    let max_abs = samples.values.iter().map(|v| v.norm()).fold(origin.norm(), f64::max);
    Ok((
        samples,
        TransformDiagnostics {
            kind,
            formal_solution: kind == AbscissaKind::CoordinateX,
            alpha: ctx.params().alpha(),
            beta: ctx.params().beta(),
            n: level.n,
            epsilon: level.epsilon,
            origin_re: origin.re,
            origin_im: origin.im,
            abs_origin: origin.norm(),
            max_abs,
            origin_ratio: if max_abs > 0.0 { origin.norm() / max_abs } else { 0.0 },
        },
    ))
}

#[derive(Serialize)]
struct SampleRow {
    abscissa: f64,
    re: f64,
    im: f64,
    modulus_squared: f64,
}

#[derive(Serialize)]
struct SampledDocument<'a, D: Serialize> {
    kind: AbscissaKind,
    formal_solution: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
    diagnostics: &'a D,
    samples: Vec<SampleRow>,
}

/// Columns: abscissa (p, xi or x), re, im, modulus_squared.
pub fn samples_csv_header(kind: AbscissaKind) -> [&'static str; 4] {
    [kind.column_name(), "re", "im", "modulus_squared"]
}

pub fn write_samples_csv<W: Write>(out: W, samples: &SampledWaveFunction) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(samples_csv_header(samples.kind))?;
    for (&a, v) in samples.abscissae.iter().zip(&samples.values) {
        w.write_record([format_float(a), format_float(v.re), format_float(v.im), format_float(v.norm_sqr())])?;
    }
    Ok(w.flush()?)
}

/// One header row and one data row; floats with 17 significant digits.
pub fn write_diagnostics_csv<W: Write, D: Serialize>(out: W, diagnostics: &D) -> Result<()> {
    let value = serde_json::to_value(diagnostics)?;
    let object = value
        .as_object()
        .ok_or_else(|| Error::Output("diagnostics must serialize to an object".into()))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(object.keys())?;
    w.write_record(object.values().map(|v| match v {
        serde_json::Value::Number(n) if n.is_f64() => format_float(n.as_f64().unwrap_or(f64::NAN)),
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }))?;
    Ok(w.flush()?)
}

pub fn samples_json<D: Serialize>(samples: &SampledWaveFunction, diagnostics: &D) -> Result<String> {
    let formal = samples.kind == AbscissaKind::CoordinateX;
    let doc = SampledDocument {
        kind: samples.kind,
        formal_solution: formal,
        note: formal.then_some(FORMAL_NOTE),
        diagnostics,
        samples: samples
            .abscissae
            .iter()
            .zip(&samples.values)
            .map(|(&abscissa, v): (&f64, &Complex64)| SampleRow {
                abscissa,
                re: v.re,
                im: v.im,
                modulus_squared: v.norm_sqr(),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}
