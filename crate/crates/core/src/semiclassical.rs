//! Bohr–Sommerfeld quantization and the zeroth-order WKB phase equation.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{half_width_for_beta, EnergyLevel, Method, ModelParams};
use crate::numerics::{find_root, integrate, QuadratureSpec, RootBracket};
use crate::spectrum::undeformed_binding;

/// Quadrature settings used for the action integral.
pub fn default_spec() -> QuadratureSpec {
    QuadratureSpec {
        max_doublings: 3,
        ..QuadratureSpec::gauss_legendre(256).with_tolerances(1e-15, 1e-14)
    }
}

/// ∫ αβ / (tan²(√βp) + βε) dp over the momentum interval, i.e. −∮x dp on the
/// classical orbit at E = −ε.
pub fn action_integral(params: &ModelParams, eps: f64) -> Result<f64> {
    action_integral_with(params, eps, &default_spec())
}

/// As [`action_integral`] with explicit quadrature settings.
///
/// The integrand is even in p. On p > 0 put tan(√βp) = √(βε) e^v; the
/// integral becomes (α/√ε) ∫ dv / (cosh v · (1 + βε e^{2v})) over the real line, smooth on
/// the unit scale whatever the size of βε. The range is cut where the
/// integrand drops below e^{−40} of its peak.
pub fn action_integral_with(params: &ModelParams, eps: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("binding must be positive, got {eps}")));
    }
    spec.validate()?;
    let prefactor = params.alpha() / eps.sqrt();
    let s2 = params.beta() * eps;
    const CUT: f64 = 40.0;
    let upper = if s2 > 0.0 { CUT + (-0.5 * s2.ln()).max(0.0) } else { CUT };
    let v = integrate(
        |v: f64| Complex64::new(prefactor / (v.cosh() * (1.0 + s2 * (2.0 * v).exp())), 0.0),
        -CUT,
        upper,
        spec,
    )?;
    Ok(v.re)
}

/// πα / (√ε + √β ε).
pub fn action_closed_form(params: &ModelParams, eps: f64) -> f64 {
    PI * params.alpha() / (eps.sqrt() + params.sqrt_beta() * eps)
}

/// Level n from action_integral(ε) = 2nπ.
pub fn energy_semiclassical(params: &ModelParams, n: u32) -> Result<EnergyLevel> {
    energy_semiclassical_with(params, n, &default_spec())
}

pub fn energy_semiclassical_with(params: &ModelParams, n: u32, spec: &QuadratureSpec) -> Result<EnergyLevel> {
    if n == 0 {
        return Err(Error::InvalidParameter("quantum number must be >= 1".into()));
    }
    let target = 2.0 * PI * n as f64;
    let f = |eps: f64| action_integral_with(params, eps, spec).map(|a| a - target);
    // at β = 0 the root is the undeformed binding itself, so step just past it
    let hi = undeformed_binding(params.alpha(), n) * (1.0 + 1e-9);
    let f_hi = f(hi)?;
    // the action only exceeds πα/√ε by shrinking ε
    let mut lo = 0.5 * hi;
    let mut f_lo = f(lo)?;
    let mut halvings = 0;
    while f_lo.signum() == f_hi.signum() {
        halvings += 1;
        if halvings > 200 {
            return Err(Error::InvalidBracket {
                lo,
                hi,
                f_lo,
                f_hi,
            });
        }
        lo *= 0.5;
        f_lo = f(lo)?;
    }
    let bracket = RootBracket::from_values(lo, hi, f_lo, f_hi)?;
    let failure = RefCell::new(None);
    let eps = find_root(
        |e| match f(e) {
            Ok(v) => v,
            Err(err) => {
                failure.borrow_mut().get_or_insert(err);
                f64::NAN
            }
        },
        bracket,
        1e-15 * hi,
    )?;
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    EnergyLevel::new(n, eps, Method::Semiclassical)
}

/// x(p) = αβ / (tan²(√βp) − βE) on the classical orbit at energy E
/// (α / (p² − E) when β = 0).
pub fn classical_turning_curve(params: &ModelParams, energy: f64, p: f64) -> Result<f64> {
    let alpha = params.alpha();
    if params.is_undeformed() {
        let den = p * p - energy;
        if den == 0.0 || (energy > 0.0 && (den / energy).abs() < 1e-14) {
            return Err(Error::TurningPoint(energy.sqrt()));
        }
        return Ok(alpha / den);
    }
    let half_width = half_width_for_beta(params.beta())?;
    if !(p.abs() < half_width) {
        return Err(Error::OutsideDomain { p, half_width });
    }
    let beta = params.beta();
    let t = (params.sqrt_beta() * p).tan();
    let den = t * t - beta * energy;
    if den == 0.0 || (energy > 0.0 && (den / (beta * energy)).abs() < 1e-14) {
        return Err(Error::TurningPoint((beta * energy).sqrt().atan() / params.sqrt_beta()));
    }
    Ok(alpha * beta / den)
}

/// Positive branch Φ₀'² of Φ₀'² + (2β/3) Φ₀'⁴ = E + α/x.
fn phase_gradient_squared(params: &ModelParams, energy: f64, x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter(format!("x must be positive, got {x}")));
    }
    let k = energy + params.alpha() / x;
    if !(k > 0.0) {
        return Err(Error::ClassicallyForbidden(x));
    }
    // (−3 + 3√(1 + 8βK/3)) / (4β) without cancellation
    Ok(2.0 * k / (1.0 + (1.0 + 8.0 * params.beta() * k / 3.0).sqrt()))
}

/// Φ₀'(x), the classical momentum of H = p² + (2/3)βp⁴ − α/x at energy E.
pub fn wkb_momentum(params: &ModelParams, energy: f64, x: f64) -> Result<f64> {
    Ok(phase_gradient_squared(params, energy, x)?.sqrt())
}

/// |Φ₀'² + (2β/3)Φ₀'⁴ − (E + α/x)| for the positive branch.
pub fn wkb_phase_residual(params: &ModelParams, energy: f64, x: f64) -> Result<f64> {
    let y = phase_gradient_squared(params, energy, x)?;
    let k = energy + params.alpha() / x;
    Ok((y + 2.0 * params.beta() / 3.0 * y * y - k).abs())
}
