//! Maximal-localization states and the quasiposition representation.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{half_width_for_beta, AbscissaKind, ModelParams, MomentumGrid, SampledWaveFunction};
use crate::numerics::{derivative, integrate, QuadratureSpec};
use crate::wavefunction::EigenfunctionContext;

/// Number of points in the default ξ (and x) sampling.
pub const DEFAULT_SAMPLES: usize = 513;

/// State of minimal position uncertainty √β centered at quasiposition ξ:
/// `N cos(√β p) e^{−ipξ}` with `N = √(2√β/π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLState {
    params: ModelParams,
    xi: f64,
    normalization_n: f64,
}

impl MLState {
    pub fn new(params: ModelParams, xi: f64) -> Result<Self> {
        if params.is_undeformed() {
            return Err(Error::UnboundedDomain);
        }
        if !xi.is_finite() {
            return Err(Error::InvalidParameter(format!("xi must be finite, got {xi}")));
        }
        Ok(Self {
            params,
            xi,
            normalization_n: ml_normalization(&params),
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn normalization(&self) -> f64 {
        self.normalization_n
    }
}

/// N = √(2√β/π).
pub fn ml_normalization(params: &ModelParams) -> f64 {
    (2.0 * params.sqrt_beta() / PI).sqrt()
}

/// N cos(√β p) e^{−ipξ}. Meant for |p| < π/(2√β); the expression is evaluated
/// as written outside it.
pub fn ml_eval(state: &MLState, p: f64) -> Complex64 {
    let amplitude = state.normalization_n * (state.params.sqrt_beta() * p).cos();
    Complex64::from_polar(amplitude, -p * state.xi)
}

/// (⟨X⟩, ΔX) with X = i d/dp, by quadrature over the momentum interval.
pub fn ml_moments(state: &MLState) -> Result<(f64, f64)> {
    ml_moments_with(state, &QuadratureSpec::gauss_legendre(128).with_tolerances(1e-13, 1e-12))
}

pub fn ml_moments_with(state: &MLState, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let half_width = half_width_for_beta(state.params.beta())?;
    // resolve both the cos(√βp) envelope and the e^{−ipξ} carrier
    let scale = if state.xi == 0.0 { half_width } else { half_width.min(1.0 / state.xi.abs()) };
    let step = 0.05 * scale;
    let x_phi = |p: f64| -> Complex64 {
        derivative(|q| ml_eval(state, q), p, step)
            .map(|d| Complex64::i() * d.value)
            .unwrap_or_default()
    };
    let mean = integrate(|p| ml_eval(state, p).conj() * x_phi(p), -half_width, half_width, spec)?;
    let second = integrate(|p| Complex64::new(x_phi(p).norm_sqr(), 0.0), -half_width, half_width, spec)?;
    let variance = (second.re - mean.re * mean.re).max(0.0);
    Ok((mean.re, variance.sqrt()))
}

/// sin(x)/x.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    } else {
        x.sin() / x
    }
}

/// ⟨φ_ξ'|φ_ξ⟩ = (8β^{3/2}/π) sin(πd/(2√β)) / (4βd − d³), d = ξ − ξ'.
///
/// Within 1e−4·√β of d = 0 and d = ±2√β the removable singularities are
/// evaluated through series of sin(y)/y.
pub fn ml_overlap(params: &ModelParams, xi: f64, xi_prime: f64) -> Result<f64> {
    if params.is_undeformed() {
        return Err(Error::UnboundedDomain);
    }
    let k = ((xi - xi_prime) / params.sqrt_beta()).abs();
    const GUARD: f64 = 1e-4;
    if k < GUARD {
        return Ok(4.0 * sinc(FRAC_PI_2 * k) / (4.0 - k * k));
    }
    let delta = k - 2.0;
    if delta.abs() < GUARD {
        return Ok(4.0 * sinc(FRAC_PI_2 * delta) / ((2.0 + delta) * (4.0 + delta)));
    }
    Ok(8.0 * (FRAC_PI_2 * k).sin() / (PI * k * (4.0 - k * k)))
}

/// The overlap from its defining integral N² ∫ cos²(√βp) e^{−ipd} dp.
pub fn ml_overlap_quadrature(params: &ModelParams, xi: f64, xi_prime: f64, spec: &QuadratureSpec) -> Result<f64> {
    let half_width = half_width_for_beta(params.beta())?;
    let n2 = ml_normalization(params).powi(2);
    let d = xi - xi_prime;
    let sb = params.sqrt_beta();
    let v = integrate(
        |p| Complex64::from_polar(n2 * (sb * p).cos().powi(2), -p * d),
        -half_width,
        half_width,
        spec,
    )?;
    Ok(v.re)
}

/// ψ(ξ) = N ∫ cos(√βp) e^{ipξ} φ(p) dp for samples of φ on `grid`.
pub fn quasiposition_transform_of(values: &[Complex64], grid: &MomentumGrid, xi: f64) -> Complex64 {
    let sb = grid.beta().sqrt();
    let n = (2.0 * sb / PI).sqrt();
    grid.nodes()
        .iter()
        .zip(grid.weights())
        .zip(values)
        .map(|((&p, &w), &v)| v * Complex64::from_polar(w * (sb * p).cos(), p * xi))
        .sum::<Complex64>()
        * n
}

/// Quasiposition wave function of an eigenfunction at ξ.
pub fn quasiposition_transform(ctx: &EigenfunctionContext, xi: f64, grid: &MomentumGrid) -> Result<Complex64> {
    grid.check_params(ctx.params())?;
    let values = ctx.sample(grid)?.values;
    Ok(quasiposition_transform_of(&values, grid, xi))
}

/// ψ sampled at each ξ in `xis`, computed in parallel, ordered as `xis`.
pub fn quasiposition_samples(
    ctx: &EigenfunctionContext,
    grid: &MomentumGrid,
    xis: &[f64],
) -> Result<SampledWaveFunction> {
    grid.check_params(ctx.params())?;
    let sampled = ctx.sample(grid)?;
    let values: Vec<Complex64> = xis
        .par_iter()
        .map(|&xi| quasiposition_transform_of(&sampled.values, grid, xi))
        .collect();
    Ok(SampledWaveFunction::new(AbscissaKind::QuasipositionXi, xis.to_vec(), values)?.with_metadata(
        sampled.level,
        sampled.normalization_a,
        sampled.constant_c,
    ))
}

/// `count` uniform points over [lo, hi].
pub fn uniform_samples(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo < hi) || count < 2 {
        return Err(Error::InvalidParameter(format!(
            "sampling needs lo < hi and at least 2 points, got [{lo}, {hi}] with {count}"
        )));
    }
    let h = (hi - lo) / (count - 1) as f64;
    Ok((0..count).map(|k| lo + h * k as f64).collect())
}

/// Default sampling: 513 points over ±20 n²/α, with n the effective
/// quantum number α/(2√ε) of the state.
pub fn default_samples(ctx: &EigenfunctionContext) -> Vec<f64> {
    let alpha = ctx.params().alpha();
    let n = match ctx.level() {
        Some(level) => level.n as f64,
        None => alpha / (2.0 * ctx.epsilon().sqrt()),
    };
    let reach = 20.0 * n * n / alpha;
    uniform_samples(-reach, reach, DEFAULT_SAMPLES).expect("positive reach")
}

/// |ψ(0)| / max |ψ| over the default sampling.
pub fn origin_ratio(samples: &SampledWaveFunction) -> f64 {
    let max = samples.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let origin = samples
        .abscissae
        .iter()
        .zip(&samples.values)
        .min_by(|a, b| a.0.abs().total_cmp(&b.0.abs()))
        .map(|(_, v)| v.norm())
        .unwrap_or(0.0);
    if max > 0.0 {
        origin / max
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::energy_closed_form;
    use crate::wavefunction::eval_phi;

    fn params(beta: f64) -> ModelParams {
        ModelParams::new(1.0, beta).unwrap()
    }

    #[test]
    fn ml_state_basics() {
        let s = MLState::new(params(0.01), 0.0).unwrap();
        assert!((ml_eval(&s, 0.0).re - s.normalization()).abs() < 1e-15);
        let shifted = MLState::new(params(0.01), 3.7).unwrap();
        for p in [-10.0, 0.3, 7.0] {
            assert!((ml_eval(&s, p).norm() - ml_eval(&shifted, p).norm()).abs() < 1e-15);
        }
        assert!(MLState::new(ModelParams::undeformed(1.0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn ml_state_is_normalized() {
        let s = MLState::new(params(0.1), 1.0).unwrap();
        let l = half_width_for_beta(0.1).unwrap();
        let v = integrate(
            |p| Complex64::new(ml_eval(&s, p).norm_sqr(), 0.0),
            -l,
            l,
            &QuadratureSpec::gauss_legendre(64),
        )
        .unwrap();
        assert!((v.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn moments_are_xi_and_sqrt_beta() {
        for beta in [1e-2, 0.1] {
            for xi in [-1.0, 0.0, 1.0, 2.5] {
                let (mean, spread) = ml_moments(&MLState::new(params(beta), xi).unwrap()).unwrap();
                assert!((mean - xi).abs() < 1e-8, "{beta} {xi} {mean}");
                assert!((spread - beta.sqrt()).abs() < 1e-8, "{beta} {xi} {spread}");
            }
        }
    }

    #[test]
    fn overlap_special_values() {
        let p = params(0.01);
        assert_eq!(ml_overlap(&p, 0.4, 0.4).unwrap(), 1.0);
        assert!((ml_overlap(&p, 0.2, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((ml_overlap(&p, 0.0, 0.2).unwrap() - 0.5).abs() < 1e-15);
        // sine zeros at d = 2k√β for k ≥ 2
        assert!(ml_overlap(&p, 0.4, 0.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn overlap_is_continuous_across_guards() {
        let p = params(0.1);
        let sb = p.sqrt_beta();
        for centre in [0.0, 2.0 * sb] {
            let inside = ml_overlap(&p, centre + (1.0 - 1e-7) * 1e-4 * sb, 0.0).unwrap();
            let outside = ml_overlap(&p, centre + (1.0 + 1e-7) * 1e-4 * sb, 0.0).unwrap();
            assert!((inside - outside).abs() < 1e-10, "{centre}: {inside} {outside}");
        }
    }

    #[test]
    fn overlap_matches_defining_integral() {
        let spec = QuadratureSpec::gauss_legendre(128);
        for beta in [1e-2, 0.1] {
            let p = params(beta);
            let sb = p.sqrt_beta();
            for d in [0.0, 1e-6, 0.3 * sb, sb, 2.0 * sb, -2.0 * sb, 2.0 * sb + 3e-5 * sb, 5.5 * sb, 31.0 * sb] {
                let closed = ml_overlap(&p, d, 0.0).unwrap();
                let quad = ml_overlap_quadrature(&p, d, 0.0, &spec).unwrap();
                assert!((closed - quad).abs() < 1e-8, "beta {beta} d {d}: {closed} {quad}");
            }
        }
    }

    #[test]
    fn ml_state_peaks_at_its_centre() {
        let p = params(0.1);
        let grid = MomentumGrid::uniform(0.1, 256).unwrap();
        let xi0 = 1.3;
        let s = MLState::new(p, xi0).unwrap();
        let values = grid.sample(|q| ml_eval(&s, q));
        let xis = uniform_samples(-5.0, 5.0, 201).unwrap();
        let best = xis
            .iter()
            .map(|&xi| (xi, quasiposition_transform_of(&values, &grid, xi).norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!((best.0 - xi0).abs() <= 0.05 + 1e-12);
        // ψ at the centre equals the self-overlap
        assert!((quasiposition_transform_of(&values, &grid, xi0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transform_is_linear() {
        let p = params(0.1);
        let ctx = EigenfunctionContext::new(p, energy_closed_form(&p, 2).unwrap());
        let grid = ctx.grid(256).unwrap();
        let a = ctx.sample(&grid).unwrap().values;
        let b: Vec<Complex64> = grid.nodes().iter().map(|q| Complex64::new(0.0, (0.3 * q).cos())).collect();
        let mix: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| 2.0 * x - 0.5 * y).collect();
        let xi = 0.7;
        let lhs = quasiposition_transform_of(&mix, &grid, xi);
        let rhs = 2.0 * quasiposition_transform_of(&a, &grid, xi) - 0.5 * quasiposition_transform_of(&b, &grid, xi);
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn quasiposition_origin_does_not_vanish() {
        let p = params(0.1);
        let ctx = EigenfunctionContext::new(p, energy_closed_form(&p, 1).unwrap());
        let grid = ctx.grid(2048).unwrap();
        let s = quasiposition_samples(&ctx, &grid, &default_samples(&ctx)).unwrap();
        assert_eq!(s.len(), DEFAULT_SAMPLES);
        let r = origin_ratio(&s);
        assert!(r > 1e-2, "{r}");
        let direct = quasiposition_transform(&ctx, 0.0, &grid).unwrap();
        assert!((direct.norm() - s.values[DEFAULT_SAMPLES / 2].norm()).abs() < 1e-14);
    }

    #[test]
    fn quasiposition_origin_shrinks_with_beta() {
        let mut last = f64::INFINITY;
        for beta in [0.1, 1e-2, 1e-4] {
            let p = params(beta);
            let ctx = EigenfunctionContext::new(p, energy_closed_form(&p, 1).unwrap());
            let grid = ctx.grid(2048).unwrap();
            let r = origin_ratio(&quasiposition_samples(&ctx, &grid, &default_samples(&ctx)).unwrap());
            assert!(r < last, "beta {beta}: {r} !< {last}");
            last = r;
        }
    }

    #[test]
    fn quasiposition_rejects_mismatched_grid() {
        let p = params(0.1);
        let ctx = EigenfunctionContext::new(p, energy_closed_form(&p, 1).unwrap());
        let grid = MomentumGrid::uniform(0.2, 64).unwrap();
        assert!(quasiposition_transform(&ctx, 0.0, &grid).is_err());
    }

    #[test]
    fn eigenfunction_evaluates_on_transform_grid() {
        let p = params(0.1);
        let ctx = EigenfunctionContext::new(p, energy_closed_form(&p, 1).unwrap());
        assert!(eval_phi(&ctx, 0.0).is_ok());
    }
}
