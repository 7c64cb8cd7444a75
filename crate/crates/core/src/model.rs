//! Parameter, grid and result types shared by every computational module.
//!
//! Units are fixed to ħ = 1 and 2m = 1 throughout; they are not fields of any
//! type. Energies are negative for bound states and are stored together with
//! the binding ε = −E.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, GaussRule, LegendreSeries};

/// Coulomb coupling α and deformation parameter β of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ModelParams {
    alpha: f64,
    beta: f64,
}

#[derive(Deserialize)]
struct RawParams {
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.alpha, raw.beta)
    }
}

impl ModelParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive and finite, got {alpha}"
            )));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta must be non-negative and finite, got {beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// Undeformed quantum mechanics (β = 0).
    pub fn undeformed(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sqrt_beta(&self) -> f64 {
        self.beta.sqrt()
    }

    pub fn is_undeformed(&self) -> bool {
        self.beta == 0.0
    }

    /// Same α, different β.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.alpha, beta)
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alpha = {}, beta = {}", self.alpha, self.beta)
    }
}

/// Half width π/(2√β) of the momentum interval.
pub fn interval_half_width(params: &ModelParams) -> Result<f64> {
    half_width_for_beta(params.beta)
}

pub(crate) fn half_width_for_beta(beta: f64) -> Result<f64> {
    if beta == 0.0 {
        return Err(Error::UnboundedDomain);
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "beta must be positive for a bounded momentum domain, got {beta}"
        )));
    }
    Ok(FRAC_PI_2 / beta.sqrt())
}

/// Which route produced an energy level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    RootFound,
    Semiclassical,
    SingleValued,
    Perturbative,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::RootFound => "root_found",
            Method::Semiclassical => "semiclassical",
            Method::SingleValued => "single_valued",
            Method::Perturbative => "perturbative",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A bound state: quantum number, binding ε > 0 and energy E = −ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyLevel {
    pub n: u32,
    pub epsilon: f64,
    pub energy: f64,
    pub method: Method,
}

impl EnergyLevel {
    pub fn new(n: u32, epsilon: f64, method: Method) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "quantum number must be at least 1".into(),
            ));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "binding must be positive for a bound state, got {epsilon}"
            )));
        }
        Ok(Self {
            n,
            epsilon,
            energy: -epsilon,
            method,
        })
    }
}

/// Bijection between the reference interval (−1, 1) and the momentum
/// interval (−π/(2√β), π/(2√β)).
///
/// With θ = πx/2 the map is tan(√β p) = s·tan θ, i.e. the physical momentum
/// P = tan(√β p)/√β equals `scale·tan θ` with s = √β·scale. For s = 1 the map
/// is affine; smaller s concentrates nodes around p = 0 on the momentum scale
/// `scale`, which is where bound-state wave functions live.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumMap {
    sqrt_beta: f64,
    s: f64,
}

impl MomentumMap {
    pub fn new(beta: f64, scale: Option<f64>) -> Result<Self> {
        half_width_for_beta(beta)?;
        let sqrt_beta = beta.sqrt();
        let s = match scale {
            None => 1.0,
            Some(scale) if scale > 0.0 && scale.is_finite() => sqrt_beta * scale,
            Some(scale) => {
                return Err(Error::InvalidParameter(format!(
                    "momentum scale must be positive, got {scale}"
                )))
            }
        };
        Ok(Self { sqrt_beta, s })
    }

    pub fn to_momentum(&self, x: f64) -> f64 {
        let theta = FRAC_PI_2 * x;
        if self.s == 1.0 {
            theta / self.sqrt_beta
        } else {
            (self.s * theta.sin()).atan2(theta.cos()) / self.sqrt_beta
        }
    }

    /// dp/dx.
    pub fn jacobian(&self, x: f64) -> f64 {
        if self.s == 1.0 {
            return FRAC_PI_2 / self.sqrt_beta;
        }
        let theta = FRAC_PI_2 * x;
        let (sin, cos) = theta.sin_cos();
        FRAC_PI_2 * self.s / (self.sqrt_beta * (cos * cos + self.s * self.s * sin * sin))
    }

    pub fn to_reference(&self, p: f64) -> f64 {
        let u = self.sqrt_beta * p;
        if self.s == 1.0 {
            u / FRAC_PI_2
        } else {
            u.sin().atan2(self.s * u.cos()) / FRAC_PI_2
        }
    }
}

/// Gauss–Legendre quadrature grid on the open momentum interval.
#[derive(Debug, Clone)]
pub struct MomentumGrid {
    beta: f64,
    map: MomentumMap,
    rule: Arc<GaussRule>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl MomentumGrid {
    /// Gauss–Legendre nodes mapped affinely onto the interval.
    pub fn uniform(beta: f64, node_count: usize) -> Result<Self> {
        Self::build(beta, node_count, None)
    }

    /// Nodes concentrated on the physical-momentum scale `scale` around p = 0.
    pub fn clustered(beta: f64, node_count: usize, scale: f64) -> Result<Self> {
        Self::build(beta, node_count, Some(scale))
    }

    fn build(beta: f64, node_count: usize, scale: Option<f64>) -> Result<Self> {
        if node_count < 2 || !node_count.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "grid node count must be even and >= 2, got {node_count}"
            )));
        }
        let map = MomentumMap::new(beta, scale)?;
        let rule = gauss_legendre(node_count);
        let nodes: Vec<f64> = rule.nodes.iter().map(|&x| map.to_momentum(x)).collect();
        let weights = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| w * map.jacobian(x))
            .collect();
        Ok(Self {
            beta,
            map,
            rule,
            nodes,
            weights,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn half_width(&self) -> f64 {
        FRAC_PI_2 / self.beta.sqrt()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn map(&self) -> &MomentumMap {
        &self.map
    }

    /// Nodes of the underlying rule on (−1, 1).
    pub fn reference_nodes(&self) -> &[f64] {
        &self.rule.nodes
    }

    pub fn check_params(&self, params: &ModelParams) -> Result<()> {
        let model = params.beta();
        if (self.beta - model).abs() > 1e-14 * model.max(self.beta) {
            return Err(Error::GridMismatch {
                grid: self.beta,
                model,
            });
        }
        Ok(())
    }

    pub fn sample<F>(&self, f: F) -> Vec<Complex64>
    where
        F: Fn(f64) -> Complex64,
    {
        self.nodes.iter().map(|&p| f(p)).collect()
    }

    /// Quadrature of sampled values.
    pub fn integrate(&self, values: &[Complex64]) -> Complex64 {
        assert_eq!(values.len(), self.nodes.len());
        values.iter().zip(&self.weights).map(|(v, &w)| v * w).sum()
    }

    pub fn integrate_fn<F>(&self, f: F) -> Complex64
    where
        F: Fn(f64) -> Complex64,
    {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| f(p) * w)
            .sum()
    }

    /// Polynomial interpolant (in the reference variable) of values sampled at the nodes.
    pub fn interpolant(&self, values: &[Complex64]) -> GridFunction {
        GridFunction {
            map: self.map,
            series: LegendreSeries::interpolate(&self.rule, values),
        }
    }

    /// F(p) = ∫ from −π/(2√β) to p of the sampled function.
    pub fn antiderivative(&self, values: &[Complex64]) -> GridFunction {
        assert_eq!(values.len(), self.nodes.len());
        let integrand: Vec<Complex64> = values
            .iter()
            .zip(&self.weights)
            .zip(&self.rule.weights)
            .map(|((v, &w), &w_ref)| v * (w / w_ref))
            .collect();
        GridFunction {
            map: self.map,
            series: LegendreSeries::interpolate(&self.rule, &integrand).antiderivative(),
        }
    }

    /// Cumulative integral at every node: spectral integration of the same
    /// polynomial the quadrature rule integrates exactly, so the value past
    /// the last node coincides with [`MomentumGrid::integrate`].
    pub fn cumulative_integral(&self, values: &[Complex64]) -> Result<Vec<Complex64>> {
        if values.len() < 2 {
            return Err(Error::GridTooCoarse(
                "cumulative integration needs at least 2 samples".into(),
            ));
        }
        if values.len() != self.nodes.len() {
            return Err(Error::InvalidParameter(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                self.nodes.len()
            )));
        }
        let anti = self.antiderivative(values);
        Ok(self.rule.nodes.iter().map(|&x| anti.series.eval(x)).collect())
    }
}

/// A function on the momentum interval represented by a Legendre series in
/// the grid's reference variable.
#[derive(Debug, Clone)]
pub struct GridFunction {
    map: MomentumMap,
    series: LegendreSeries,
}

impl GridFunction {
    pub fn eval(&self, p: f64) -> Complex64 {
        self.series.eval(self.map.to_reference(p))
    }

    /// Value at the right end of the interval.
    pub fn right_end(&self) -> Complex64 {
        self.series.eval(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbscissaKind {
    MomentumP,
    QuasipositionXi,
    CoordinateX,
}

impl AbscissaKind {
    pub fn column_name(&self) -> &'static str {
        match self {
            AbscissaKind::MomentumP => "p",
            AbscissaKind::QuasipositionXi => "xi",
            AbscissaKind::CoordinateX => "x",
        }
    }
}

/// Complex samples of φ(p), ψ(ξ) or η(x).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWaveFunction {
    pub kind: AbscissaKind,
    pub abscissae: Vec<f64>,
    pub values: Vec<Complex64>,
    pub level: Option<EnergyLevel>,
    pub normalization_a: Option<f64>,
    pub constant_c: Option<Complex64>,
}

impl SampledWaveFunction {
    pub fn new(kind: AbscissaKind, abscissae: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if abscissae.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} abscissae but {} values",
                abscissae.len(),
                values.len()
            )));
        }
        if !abscissae.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter(
                "abscissae must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            kind,
            abscissae,
            values,
            level: None,
            normalization_a: None,
            constant_c: None,
        })
    }

    /// Samples of `f` at the nodes of a momentum grid.
    pub fn on_grid<F>(grid: &MomentumGrid, f: F) -> Self
    where
        F: Fn(f64) -> Complex64,
    {
        Self {
            kind: AbscissaKind::MomentumP,
            abscissae: grid.nodes().to_vec(),
            values: grid.sample(f),
            level: None,
            normalization_a: None,
            constant_c: None,
        }
    }

    pub fn with_metadata(
        mut self,
        level: Option<EnergyLevel>,
        normalization_a: Option<f64>,
        constant_c: Option<Complex64>,
    ) -> Self {
        self.level = level;
        self.normalization_a = normalization_a;
        self.constant_c = constant_c;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Checks that these are momentum samples taken exactly at the nodes of `grid`.
    pub fn check_grid(&self, grid: &MomentumGrid) -> Result<()> {
        if self.kind != AbscissaKind::MomentumP {
            return Err(Error::InvalidParameter(
                "expected momentum-space samples".into(),
            ));
        }
        if self.abscissae.len() != grid.node_count()
            || self.abscissae.iter().zip(grid.nodes()).any(|(a, b)| a != b)
        {
            return Err(Error::InvalidParameter(
                "samples were not taken at the nodes of this grid".into(),
            ));
        }
        Ok(())
    }

    /// Quadrature of |values|² over the grid.
    pub fn norm_squared(&self, grid: &MomentumGrid) -> Result<f64> {
        self.check_grid(grid)?;
        Ok(self
            .values
            .iter()
            .zip(grid.weights())
            .map(|(v, &w)| v.norm_sqr() * w)
            .sum())
    }
}

/// F(p_k) = ∫ from −π/(2√β) to p_k of the samples, at every grid node.
pub fn cumulative_integral(
    samples: &SampledWaveFunction,
    grid: &MomentumGrid,
) -> Result<SampledWaveFunction> {
    samples.check_grid(grid)?;
    let values = grid.cumulative_integral(&samples.values)?;
    Ok(SampledWaveFunction {
        values,
        ..samples.clone()
    })
}

/// Tolerances recorded alongside exported results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub spectrum: f64,
    pub quadrature_abs: f64,
    pub quadrature_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            spectrum: 1e-12,
            quadrature_abs: 1e-13,
            quadrature_rel: 1e-12,
        }
    }
}

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Levels of one method, sorted by n, without duplicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "TableRecord", try_from = "TableRecord")]
pub struct SpectrumTable {
    pub params: ModelParams,
    pub method: Method,
    pub levels: Vec<EnergyLevel>,
    pub tolerances: Tolerances,
    pub tool_version: String,
}

#[derive(Serialize, Deserialize)]
struct LevelRecord {
    n: u32,
    epsilon: f64,
    energy: f64,
}

#[derive(Serialize, Deserialize)]
struct TableRecord {
    params: ModelParams,
    method: Method,
    levels: Vec<LevelRecord>,
    tolerances: Tolerances,
    tool_version: String,
}

impl From<SpectrumTable> for TableRecord {
    fn from(t: SpectrumTable) -> Self {
        Self {
            params: t.params,
            method: t.method,
            levels: t
                .levels
                .iter()
                .map(|l| LevelRecord {
                    n: l.n,
                    epsilon: l.epsilon,
                    energy: l.energy,
                })
                .collect(),
            tolerances: t.tolerances,
            tool_version: t.tool_version,
        }
    }
}

impl TryFrom<TableRecord> for SpectrumTable {
    type Error = Error;

    fn try_from(r: TableRecord) -> Result<Self> {
        let levels = r
            .levels
            .into_iter()
            .map(|l| {
                let level = EnergyLevel::new(l.n, l.epsilon, r.method)?;
                if level.energy != l.energy {
                    return Err(Error::InvalidParameter(format!(
                        "level {}: energy {} is not -epsilon",
                        l.n, l.energy
                    )));
                }
                Ok(level)
            })
            .collect::<Result<Vec<_>>>()?;
        SpectrumTable::new(r.params, r.method, levels, r.tolerances)
            .map(|t| SpectrumTable {
                tool_version: r.tool_version,
                ..t
            })
    }
}

impl SpectrumTable {
    pub fn new(
        params: ModelParams,
        method: Method,
        mut levels: Vec<EnergyLevel>,
        tolerances: Tolerances,
    ) -> Result<Self> {
        levels.sort_by_key(|l| l.n);
        if levels.windows(2).any(|w| w[0].n == w[1].n) {
            return Err(Error::InvalidParameter(
                "duplicate quantum number in spectrum table".into(),
            ));
        }
        Ok(Self {
            params,
            method,
            levels,
            tolerances,
            tool_version: TOOL_VERSION.to_string(),
        })
    }
}

impl fmt::Display for SpectrumTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({})", self.method, self.params)?;
        for l in &self.levels {
            writeln!(f, "{:>4} {:>24.16e}", l.n, l.energy)?;
        }
        Ok(())
    }
}
