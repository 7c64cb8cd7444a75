//! Momentum-space eigenfunctions and their consistency conditions.
//!
//! In the tan-representation `X = i d/dp`, `P = tan(√β p)/√β` on
//! |p| < π/(2√β), the inverse position acts as
//! `(1/X)φ(p) = −i ∫_{−π/(2√β)}^{p} φ(q) dq + c` and the eigenvalue problem
//! becomes the integral equation
//!
//! ```text
//! −tan²(√β p)/β · φ(p) − iα ∫_{−π/(2√β)}^{p} φ(q) dq + αc = ε φ(p).
//! ```
//!
//! Its solution for arbitrary ε > 0 is [`eval_phi`]; ε lies on the spectrum
//! exactly when the constant `c` is real.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{
    half_width_for_beta, AbscissaKind, EnergyLevel, ModelParams, MomentumGrid, SampledWaveFunction,
};
use crate::numerics::derivative;
use crate::spectrum::hermiticity_phase;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Default node count for eigenfunction grids.
pub const DEFAULT_NODES: usize = 2048;

/// An eigenfunction (or off-shell solution) with its normalization A and constant c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenfunctionContext {
    params: ModelParams,
    epsilon: f64,
    level: Option<EnergyLevel>,
    a: f64,
    c: Complex64,
}

impl EigenfunctionContext {
    /// Context for a quantized level.
    pub fn new(params: ModelParams, level: EnergyLevel) -> Self {
        let mut ctx = Self::build(params, level.epsilon);
        ctx.level = Some(level);
        ctx
    }

    /// Solution of the integral equation at an arbitrary binding ε > 0.
    pub fn off_shell(params: ModelParams, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "binding must be positive, got {epsilon}"
            )));
        }
        Ok(Self::build(params, epsilon))
    }

    fn build(params: ModelParams, epsilon: f64) -> Self {
        let a = normalization(&params, epsilon);
        let c = a * epsilon / params.alpha() * Complex64::from_polar(1.0, hermiticity_phase(&params, epsilon));
        Self {
            params,
            epsilon,
            level: None,
            a,
            c,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn level(&self) -> Option<EnergyLevel> {
        self.level
    }

    pub fn normalization(&self) -> f64 {
        self.a
    }

    pub fn c(&self) -> Complex64 {
        self.c
    }

    /// Same context with A scaled by `factor` (c left unchanged).
    pub fn with_normalization(mut self, a: f64) -> Self {
        self.a = a;
        self
    }

    /// Grid concentrated on the momentum scale √ε of this state.
    pub fn grid(&self, node_count: usize) -> Result<MomentumGrid> {
        MomentumGrid::clustered(self.params.beta(), node_count, self.epsilon.sqrt())
    }

    /// φ sampled at the nodes of `grid`, tagged with A, c and the level.
    pub fn sample(&self, grid: &MomentumGrid) -> Result<SampledWaveFunction> {
        grid.check_params(&self.params)?;
        let values = grid
            .nodes()
            .iter()
            .map(|&p| eval_phi(self, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(SampledWaveFunction {
            kind: AbscissaKind::MomentumP,
            abscissae: grid.nodes().to_vec(),
            values,
            level: self.level,
            normalization_a: Some(self.a),
            constant_c: Some(self.c),
        })
    }
}

/// A = √(2/π) ε^{−1/4} (1 + √(βε)) / √(1 + 2√(βε)).
pub fn normalization(params: &ModelParams, epsilon: f64) -> f64 {
    let s = (params.beta() * epsilon).sqrt();
    (2.0 / PI).sqrt() * epsilon.powf(-0.25) * (1.0 + s) / (1.0 + 2.0 * s).sqrt()
}

fn check_domain(params: &ModelParams, p: f64) -> Result<()> {
    if params.is_undeformed() {
        return if p.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("momentum must be finite, got {p}")))
        };
    }
    let half_width = half_width_for_beta(params.beta())?;
    if !(p.abs() < half_width) {
        return Err(Error::OutsideDomain { p, half_width });
    }
    Ok(())
}

/// Modulus |φ(p)| / A: 2βε cos²(√βp) / (1 + βε − (1 − βε) cos(2√βp)),
/// rewritten as βε cos² / (sin² + βε cos²) so that it stays accurate at the ends.
fn profile(params: &ModelParams, epsilon: f64, p: f64) -> f64 {
    if params.is_undeformed() {
        return epsilon / (p * p + epsilon);
    }
    let s2 = params.beta() * epsilon;
    let (sin, cos) = (params.sqrt_beta() * p).sin_cos();
    s2 * cos * cos / (sin * sin + s2 * cos * cos)
}

/// Phase (α/(1 − βε))(βp − arctan(tan(√βp)/√(βε))/√ε), single valued on the
/// open interval since the arctangent argument is real.
fn phase(params: &ModelParams, epsilon: f64, p: f64) -> f64 {
    let alpha = params.alpha();
    let sqrt_eps = epsilon.sqrt();
    if params.is_undeformed() {
        return -alpha / sqrt_eps * (p / sqrt_eps).atan();
    }
    let u = params.sqrt_beta() * p;
    let s = (params.beta() * epsilon).sqrt();
    let (sin, cos) = u.sin_cos();
    let theta = sin.atan2(s * cos);
    let one_minus_s2 = 1.0 - s * s;
    let ratio = if one_minus_s2.abs() < 1e-7 {
        // removable point βε = 1
        -(u + sin * cos) / (1.0 + s)
    } else {
        (s * u - theta) / one_minus_s2
    };
    alpha / sqrt_eps * ratio
}

/// Momentum-space eigenfunction φ(p).
pub fn eval_phi(ctx: &EigenfunctionContext, p: f64) -> Result<Complex64> {
    check_domain(&ctx.params, p)?;
    let modulus = ctx.a * profile(&ctx.params, ctx.epsilon, p);
    Ok(Complex64::from_polar(modulus, phase(&ctx.params, ctx.epsilon, p)))
}

/// |φ(p)|².
pub fn density(ctx: &EigenfunctionContext, p: f64) -> Result<f64> {
    check_domain(&ctx.params, p)?;
    let m = ctx.a * profile(&ctx.params, ctx.epsilon, p);
    Ok(m * m)
}

/// c = A (ε/α) exp[iπα / (2√ε(1 + √(βε)))].
pub fn constant_c(ctx: &EigenfunctionContext) -> Complex64 {
    ctx.c
}

/// Im c; vanishes exactly on the quantized spectrum.
pub fn hermiticity_residual(ctx: &EigenfunctionContext) -> f64 {
    ctx.c.im
}

/// (1/α) (tan²(√βp)/β + ε) φ(p), whose limit p → −π/(2√β) defines c.
pub fn c_limit_expression(ctx: &EigenfunctionContext, p: f64) -> Result<Complex64> {
    let phi = eval_phi(ctx, p)?;
    let kinetic = if ctx.params.is_undeformed() {
        p * p
    } else {
        (ctx.params.sqrt_beta() * p).tan().powi(2) / ctx.params.beta()
    };
    Ok(phi * (kinetic + ctx.epsilon) / ctx.params.alpha())
}

/// ∫ φ dp over the full interval by quadrature.
pub fn integral_condition(ctx: &EigenfunctionContext, grid: &MomentumGrid) -> Result<Complex64> {
    grid.check_params(&ctx.params)?;
    let mut sum = Complex64::new(0.0, 0.0);
    for (&p, &w) in grid.nodes().iter().zip(grid.weights()) {
        sum += eval_phi(ctx, p)? * w;
    }
    Ok(sum)
}

/// A (2ε/α) sin[πα / (2√ε(1 + √(βε)))], the exact value of [`integral_condition`].
pub fn integral_condition_closed_form(ctx: &EigenfunctionContext) -> f64 {
    ctx.a * 2.0 * ctx.epsilon / ctx.params.alpha() * hermiticity_phase(&ctx.params, ctx.epsilon).sin()
}

/// tan²(√βp)/β at a grid node.
fn kinetic(params: &ModelParams, p: f64) -> f64 {
    let (sin, cos) = (params.sqrt_beta() * p).sin_cos();
    sin * sin / (cos * cos * params.beta())
}

/// Sup over the nodes of `grid` of
/// |−tan²(√βp)/β φ − iα F + αc − εφ| with F the cumulative integral of φ.
pub fn schrodinger_residual(ctx: &EigenfunctionContext, grid: &MomentumGrid) -> Result<f64> {
    let sampled = ctx.sample(grid)?;
    schrodinger_residual_of(ctx, grid, &sampled.values, ctx.c)
}

/// Residual of the integral equation for arbitrary samples `values` and constant `c`
/// at the binding and coupling of `ctx`.
pub fn schrodinger_residual_of(
    ctx: &EigenfunctionContext,
    grid: &MomentumGrid,
    values: &[Complex64],
    c: Complex64,
) -> Result<f64> {
    grid.check_params(&ctx.params)?;
    let f = grid.cumulative_integral(values)?;
    let alpha = ctx.params.alpha();
    Ok(grid
        .nodes()
        .iter()
        .zip(values)
        .zip(&f)
        .map(|((&p, &phi), &cum)| {
            (-phi * kinetic(&ctx.params, p) - I * alpha * cum + alpha * c - ctx.epsilon * phi).norm()
        })
        .fold(0.0, f64::max))
}

/// Step for finite differences of φ at p: a fraction of the local length
/// scale of the solution, and well inside the interval.
fn phi_step(ctx: &EigenfunctionContext, p: f64) -> f64 {
    let sqrt_eps = ctx.epsilon.sqrt();
    let oscillation = (ctx.params.alpha() / sqrt_eps).max(1.0);
    if ctx.params.is_undeformed() {
        return 0.05 * (sqrt_eps + p.abs()) / oscillation;
    }
    let sqrt_beta = ctx.params.sqrt_beta();
    let s = sqrt_eps * sqrt_beta;
    let u = sqrt_beta * p;
    let (sin, cos) = u.sin_cos();
    let theta = sin.atan2(s * cos);
    let dp_dtheta = sqrt_eps / (theta.cos().powi(2) + s * s * theta.sin().powi(2));
    let h_theta = (0.05 / oscillation).min(0.25 * (FRAC_PI_2 - theta.abs()));
    let to_edge = FRAC_PI_2 / sqrt_beta - p.abs();
    (h_theta * dp_dtheta).min(0.25 * to_edge)
}

/// |φ' + β(2 sec²(√βp) tan(√βp)/√β + iα)/(tan²(√βp) + βε) φ| at p, with φ'
/// from Richardson-extrapolated central differences. This is the first-order
/// ODE obtained by differentiating the integral equation.
pub fn ode_residual(ctx: &EigenfunctionContext, p: f64) -> Result<f64> {
    check_domain(&ctx.params, p)?;
    let d = derivative(|q| eval_phi(ctx, q).unwrap_or_default(), p, phi_step(ctx, p))?;
    let phi = eval_phi(ctx, p)?;
    let coeff = if ctx.params.is_undeformed() {
        (2.0 * p + I * ctx.params.alpha()) / (p * p + ctx.epsilon)
    } else {
        let beta = ctx.params.beta();
        let sqrt_beta = ctx.params.sqrt_beta();
        let (sin, cos) = (sqrt_beta * p).sin_cos();
        // numerator and denominator multiplied by cos²
        let den = sin * sin + beta * ctx.epsilon * cos * cos;
        (2.0 * sqrt_beta * sin / cos + I * ctx.params.alpha() * beta * cos * cos) / den
    };
    Ok((d.value + coeff * phi).norm())
}

/// Residuals of the inverse-position identities on sampled data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseXResiduals {
    /// sup |X (1/X) φ − φ|
    pub r1: f64,
    /// sup |(1/X) X φ − φ − c|
    pub r2: f64,
    /// sup |[X, 1/X] φ + c|
    pub commutator: f64,
}

/// Reference-coordinate bound defining the interior nodes used for
/// derivative-based residuals.
const INTERIOR: f64 = 0.98;

/// Checks X(1/X)φ = φ, (1/X)Xφ = φ + c and [X, 1/X]φ = −c on sampled φ.
///
/// φ is represented by its spectral interpolant on `grid`; X = i d/dp is
/// applied by Richardson-extrapolated central differences and 1/X by the
/// cumulative integral plus `c`. The second identity assumes φ vanishes at
/// the left end of the interval, as functions in the domain of X do.
pub fn inverse_x_identities(
    phi: &SampledWaveFunction,
    c: Complex64,
    grid: &MomentumGrid,
) -> Result<InverseXResiduals> {
    phi.check_grid(grid)?;
    if grid.node_count() < 8 {
        return Err(Error::GridTooCoarse(format!(
            "{} nodes are too few to differentiate",
            grid.node_count()
        )));
    }
    let map = *grid.map();
    let step = |x: f64| (0.05f64).min(0.25 * (1.0 - x.abs())) * map.jacobian(x);

    let interpolant = grid.interpolant(&phi.values);
    let antiderivative = grid.antiderivative(&phi.values);
    let inverse_x = |p: f64| -I * antiderivative.eval(p) + c;

    // X φ at every node, then (1/X)(X φ)
    let x_phi = grid
        .nodes()
        .iter()
        .zip(grid.reference_nodes())
        .map(|(&p, &x)| Ok(I * derivative(|q| interpolant.eval(q), p, step(x))?.value))
        .collect::<Result<Vec<_>>>()?;
    let inverse_of_x_phi: Vec<Complex64> = grid
        .cumulative_integral(&x_phi)?
        .into_iter()
        .map(|f| -I * f + c)
        .collect();

    let mut out = InverseXResiduals {
        r1: 0.0,
        r2: 0.0,
        commutator: 0.0,
    };
    for (k, (&p, &x)) in grid.nodes().iter().zip(grid.reference_nodes()).enumerate() {
        if x.abs() > INTERIOR {
            continue;
        }
        let x_inverse_phi = I * derivative(inverse_x, p, step(x))?.value;
        let value = phi.values[k];
        out.r1 = out.r1.max((x_inverse_phi - value).norm());
        out.r2 = out.r2.max((inverse_of_x_phi[k] - value - c).norm());
        out.commutator = out
            .commutator
            .max((x_inverse_phi - inverse_of_x_phi[k] + c).norm());
    }
    Ok(out)
}

/// |(XP − PX) f(p) − i(1 + βP²) f(p)| with X = i d/dp by finite differences
/// and P = tan(√βp)/√β (P = p when β = 0).
pub fn commutator_check<F>(params: &ModelParams, testfn: F, p: f64) -> Result<f64>
where
    F: Fn(f64) -> Complex64,
{
    check_domain(params, p)?;
    let beta = params.beta();
    let momentum = |q: f64| {
        if params.is_undeformed() {
            q
        } else {
            (params.sqrt_beta() * q).tan() / params.sqrt_beta()
        }
    };
    let h = if params.is_undeformed() {
        0.1
    } else {
        let half_width = half_width_for_beta(beta)?;
        0.1f64.min(0.1 * half_width).min(0.5 * (half_width - p.abs()))
    };
    let x_of_pf = I * derivative(|q| testfn(q) * momentum(q), p, h)?.value;
    let p_of_xf = momentum(p) * I * derivative(&testfn, p, h)?.value;
    let big_p = momentum(p);
    let expected = I * (1.0 + beta * big_p * big_p) * testfn(p);
    Ok((x_of_pf - p_of_xf - expected).norm())
}
