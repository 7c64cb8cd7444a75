//! Position eigenfunctions and the coordinate-space transform.
//!
//! Eigenstates of X have zero position uncertainty, so η(x) is a formal
//! intermediate solution and not the physical wave function.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::localization::default_samples;
use crate::model::{half_width_for_beta, AbscissaKind, ModelParams, MomentumGrid, SampledWaveFunction};
use crate::wavefunction::EigenfunctionContext;

fn prefactor(beta: f64) -> f64 {
    (beta.sqrt() / PI).sqrt()
}

/// u_x(p) = √(√β/π) e^{−ipx}.
pub fn position_eigenfunction(params: &ModelParams, x: f64, p: f64) -> Result<Complex64> {
    let half_width = half_width_for_beta(params.beta())?;
    if !(p.abs() < half_width) {
        return Err(Error::OutsideDomain { p, half_width });
    }
    Ok(Complex64::from_polar(prefactor(params.beta()), -p * x))
}

/// η(x) = √(√β/π) ∫ e^{ipx} φ(p) dp for samples of φ on `grid`.
pub fn coordinate_transform_of(values: &[Complex64], grid: &MomentumGrid, x: f64) -> Complex64 {
    grid.nodes()
        .iter()
        .zip(grid.weights())
        .zip(values)
        .map(|((&p, &w), &v)| v * Complex64::from_polar(w, p * x))
        .sum::<Complex64>()
        * prefactor(grid.beta())
}

pub fn coordinate_transform(ctx: &EigenfunctionContext, x: f64, grid: &MomentumGrid) -> Result<Complex64> {
    grid.check_params(ctx.params())?;
    let values = ctx.sample(grid)?.values;
    Ok(coordinate_transform_of(&values, grid, x))
}

/// η sampled at each x in `xs`, in parallel, ordered as `xs`.
pub fn coordinate_samples(ctx: &EigenfunctionContext, grid: &MomentumGrid, xs: &[f64]) -> Result<SampledWaveFunction> {
    grid.check_params(ctx.params())?;
    let sampled = ctx.sample(grid)?;
    let values: Vec<Complex64> = xs
        .par_iter()
        .map(|&x| coordinate_transform_of(&sampled.values, grid, x))
        .collect();
    Ok(SampledWaveFunction::new(AbscissaKind::CoordinateX, xs.to_vec(), values)?.with_metadata(
        sampled.level,
        sampled.normalization_a,
        sampled.constant_c,
    ))
}

/// |η(0)| / max |η| with the maximum taken over the default x-sampling
/// (shared with the quasiposition transform) and x = 0.
pub fn dirichlet_check(ctx: &EigenfunctionContext, grid: &MomentumGrid) -> Result<f64> {
    let mut xs = default_samples(ctx);
    xs.push(0.0);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let samples = coordinate_samples(ctx, grid, &xs)?;
    let origin = coordinate_transform_of(&ctx.sample(grid)?.values, grid, 0.0).norm();
    let max = samples.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(if max > 0.0 { origin / max } else { 0.0 })
}
