//! Bound-state spectrum by independent routes.
//!
//! * closed form of the Hermiticity quantization condition,
//! * root-finding on the same condition `α / (2(√ε + √β ε)) = n`,
//! * the single-valuedness condition `α / (2√ε (1 − βε)) = m`,
//! * the small-β series through order β,
//!
//! plus the cutoff-regularized `⟨p⁴⟩` of the undeformed states whose linear
//! divergence is responsible for the √β leading correction.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EnergyLevel, Method, ModelParams};
use crate::numerics::{find_root, integrate, QuadratureSpec, RootBracket};

/// Relative pad on the undeformed binding used as the upper end of root brackets.
const BRACKET_PAD: f64 = 1e-6;

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "quantum number must be at least 1".into(),
        ));
    }
    Ok(())
}

/// Binding α²/(4n²) of undeformed quantum mechanics.
pub fn undeformed_binding(alpha: f64, n: u32) -> f64 {
    let n = n as f64;
    alpha * alpha / (4.0 * n * n)
}

/// Closed-form binding.
///
/// Evaluated as √ε = (α/n) / (1 + √(1 + 2α√β/n)), algebraically identical to
/// (1/(4β))(1 − √(1 + 2α√β/n))² but free of cancellation as β → 0, where it
/// reduces to α/(2n) without a separate branch.
pub fn binding_closed_form(params: &ModelParams, n: u32) -> Result<f64> {
    check_n(n)?;
    if params.is_undeformed() {
        return Ok(undeformed_binding(params.alpha(), n));
    }
    let ratio = params.alpha() / n as f64;
    let root = (1.0 + 2.0 * ratio * params.sqrt_beta()).sqrt();
    let sqrt_eps = ratio / (1.0 + root);
    Ok(sqrt_eps * sqrt_eps)
}

pub fn energy_closed_form(params: &ModelParams, n: u32) -> Result<EnergyLevel> {
    EnergyLevel::new(n, binding_closed_form(params, n)?, Method::ClosedForm)
}

/// `α / (2(√ε + √β ε)) − n`; decreasing in ε, zero on the spectrum.
pub fn quantization_residual(params: &ModelParams, epsilon: f64, n: u32) -> f64 {
    params.alpha() / (2.0 * (epsilon.sqrt() + params.sqrt_beta() * epsilon)) - n as f64
}

/// Phase πα / (2√ε (1 + √(βε))) of the constant c; a multiple of π on the spectrum.
pub fn hermiticity_phase(params: &ModelParams, epsilon: f64) -> f64 {
    PI * params.alpha() / (2.0 * epsilon.sqrt() * (1.0 + (params.beta() * epsilon).sqrt()))
}

/// Root tolerance on ε that keeps the relative error far below 1e-10 even for
/// tightly bound or very weakly bound levels.
fn binding_tolerance(abs_tol: f64, scale: f64) -> f64 {
    abs_tol.min(1e-15 * scale)
}

/// Root of the quantization condition by Brent's method, bracketed by
/// (ε_closed/2, α²/(4n²)(1 + 10⁻⁶)).
pub fn energy_root_found(params: &ModelParams, n: u32) -> Result<EnergyLevel> {
    energy_root_found_with_tol(params, n, 1e-12)
}

pub fn energy_root_found_with_tol(params: &ModelParams, n: u32, abs_tol: f64) -> Result<EnergyLevel> {
    check_n(n)?;
    if params.is_undeformed() {
        return Err(Error::InvalidParameter(
            "root-found spectrum needs beta > 0; use the closed form at beta = 0".into(),
        ));
    }
    let upper = undeformed_binding(params.alpha(), n) * (1.0 + BRACKET_PAD);
    let lower = 0.5 * binding_closed_form(params, n)?;
    let residual = |eps: f64| quantization_residual(params, eps, n);
    let bracket = RootBracket::new(residual, lower, upper)?;
    let eps = find_root(residual, bracket, binding_tolerance(abs_tol, upper))?;
    EnergyLevel::new(n, eps, Method::RootFound)
}

/// `α / (2√ε (1 − βε)) − m`.
pub fn single_valued_residual(params: &ModelParams, epsilon: f64, m: u32) -> f64 {
    params.alpha() / (2.0 * epsilon.sqrt() * (1.0 - params.beta() * epsilon)) - m as f64
}

/// Binding from the single-valuedness condition, on the branch continuous in
/// β from ε = α²/(4m²).
///
/// In t = √ε the condition reads t − βt³ = α/(2m). The left side increases on
/// 0 < t < 1/√(3β), which contains the continuous branch; if its maximum
/// 2/(3√(3β)) falls short of α/(2m) the branch does not exist.
pub fn energy_single_valued(params: &ModelParams, m: u32) -> Result<EnergyLevel> {
    check_n(m)?;
    let target = params.alpha() / (2.0 * m as f64);
    if params.is_undeformed() {
        return EnergyLevel::new(m, target * target, Method::SingleValued);
    }
    let beta = params.beta();
    let t_max = 1.0 / (3.0 * beta).sqrt();
    let lhs = |t: f64| t - beta * t * t * t;
    let max_lhs = lhs(t_max);
    if max_lhs < target {
        return Err(Error::BranchAbsent { m, max_lhs, target });
    }
    let f = |t: f64| lhs(t) - target;
    // lhs(t) <= t, so the root is at or above the undeformed value
    let bracket = RootBracket::new(f, target, t_max)?;
    let t = find_root(f, bracket, 1e-16 * t_max)?;
    EnergyLevel::new(m, t * t, Method::SingleValued)
}

/// m = n / (1 − √(β ε_n)) with ε_n from the closed form.
pub fn m_of_n(params: &ModelParams, n: u32) -> Result<f64> {
    let eps = binding_closed_form(params, n)?;
    let beta_eps = params.beta() * eps;
    if beta_eps >= 1.0 {
        return Err(Error::SingleValuedOutOfRange(beta_eps));
    }
    Ok(n as f64 / (1.0 - beta_eps.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbativeOrder {
    SqrtBeta,
    Beta,
}

/// E_n ≈ −α²/(4n²) + (α³/(4n³))√β − (5α⁴/(16n⁴))β.
pub fn energy_perturbative(params: &ModelParams, n: u32, order: PerturbativeOrder) -> Result<f64> {
    check_n(n)?;
    let r = params.alpha() / n as f64;
    let mut e = -r * r / 4.0 + r * r * r / 4.0 * params.sqrt_beta();
    if order == PerturbativeOrder::Beta {
        e -= 5.0 * r.powi(4) / 16.0 * params.beta();
    }
    Ok(e)
}

/// Momentum density 2ε^{3/2} / (π(p² + ε)²) of the undeformed level n.
pub fn undeformed_density(epsilon: f64, p: f64) -> f64 {
    let d = p * p + epsilon;
    2.0 * epsilon.powf(1.5) / (PI * d * d)
}

/// ∫_{−Λ}^{Λ} p⁴ |φ⁰_n(p)|² dp by composite Gauss–Legendre quadrature on
/// geometrically growing panels [0, √ε], [√ε, 2√ε], … (the integrand is even).
pub fn moment_p4_cutoff(params: &ModelParams, n: u32, cutoff: f64) -> Result<f64> {
    check_n(n)?;
    if !(cutoff >= 0.0 && cutoff.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "cutoff must be non-negative, got {cutoff}"
        )));
    }
    if cutoff == 0.0 {
        return Ok(0.0);
    }
    let eps = undeformed_binding(params.alpha(), n);
    let spec = QuadratureSpec::gauss_legendre(64);
    let f = |p: f64| Complex64::new(p.powi(4) * undeformed_density(eps, p), 0.0);
    let mut lo = 0.0;
    let mut hi = eps.sqrt().min(cutoff);
    let mut total = 0.0;
    loop {
        total += integrate(f, lo, hi, &spec)?.re;
        if hi >= cutoff {
            break;
        }
        lo = hi;
        hi = (2.0 * hi).min(cutoff);
    }
    Ok(2.0 * total)
}

/// Large-Λ slope 4ε^{3/2}/π of [`moment_p4_cutoff`].
pub fn moment_p4_asymptotic_slope(params: &ModelParams, n: u32) -> f64 {
    4.0 * undeformed_binding(params.alpha(), n).powf(1.5) / PI
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, beta: f64) -> ModelParams {
        ModelParams::new(alpha, beta).unwrap()
    }

    // high-precision bisection on the quantization residual
    const EPS1_A1_B001: f64 = 0.22774424948338865;
    const EPS3_A05_B01: f64 = 0.006_600_903_477_074_47;
    const EPS5_A1_B001: f64 = 0.009_804_864_072_151_7;

    #[test]
    fn closed_form_undeformed_limit() {
        let l = energy_closed_form(&params(2.0, 0.0), 1).unwrap();
        assert_eq!(l.energy, -1.0);
        let l = energy_closed_form(&params(1.0, 0.0), 3).unwrap();
        assert_eq!(l.epsilon, 1.0 / 36.0);
    }

    #[test]
    fn closed_form_matches_bisection_oracle() {
        let l = energy_closed_form(&params(1.0, 0.01), 1).unwrap();
        assert!((l.epsilon - EPS1_A1_B001).abs() < 1e-15);
        assert!((l.energy + 0.22775).abs() < 1e-4);
        let l = energy_closed_form(&params(0.5, 0.1), 3).unwrap();
        assert!((l.epsilon / EPS3_A05_B01 - 1.0).abs() < 1e-14);
        let l = energy_closed_form(&params(1.0, 0.01), 5).unwrap();
        assert!((l.epsilon / EPS5_A1_B001 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_textbook_expression() {
        for (a, b, n) in [(1.0, 0.01, 1), (2.0, 0.1, 4), (0.5, 1e-4, 9)] {
            let p = params(a, b);
            let direct = (1.0 - (1.0 + 2.0 * a / n as f64 * f64::sqrt(b)).sqrt()).powi(2) / (4.0 * b);
            let eps = binding_closed_form(&p, n).unwrap();
            assert!((eps / direct - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_zero_quantum_number() {
        assert!(energy_closed_form(&params(1.0, 0.01), 0).is_err());
        assert!(energy_root_found(&params(1.0, 0.01), 0).is_err());
        assert!(energy_single_valued(&params(1.0, 0.01), 0).is_err());
    }

    #[test]
    fn levels_increase_to_zero() {
        let p = params(1.0, 0.1);
        let levels: Vec<f64> = (1..200).map(|n| energy_closed_form(&p, n).unwrap().energy).collect();
        assert!(levels.windows(2).all(|w| w[0] < w[1] && w[1] < 0.0));
        assert!(levels.last().unwrap().abs() < 1e-5);
    }

    #[test]
    fn root_found_agrees_with_closed_form() {
        for (a, b, n) in [(1.0, 0.01, 1), (0.5, 0.1, 3), (2.0, 1e-4, 10), (0.5, 1e-4, 10)] {
            let p = params(a, b);
            let root = energy_root_found(&p, n).unwrap();
            let closed = energy_closed_form(&p, n).unwrap();
            assert_eq!(root.method, Method::RootFound);
            assert!(((root.epsilon - closed.epsilon) / closed.epsilon).abs() < 1e-10);
        }
    }

    #[test]
    fn hermiticity_sine_vanishes_on_root() {
        let p = params(1.0, 0.01);
        let l = energy_root_found(&p, 1).unwrap();
        assert!(hermiticity_phase(&p, l.epsilon).sin().abs() < 1e-10);
    }

    #[test]
    fn root_found_needs_deformation() {
        assert!(energy_root_found(&params(1.0, 0.0), 1).is_err());
    }

    #[test]
    fn single_valued_examples() {
        let l = energy_single_valued(&params(1.3, 0.0), 2).unwrap();
        assert_eq!(l.epsilon, (1.3f64 / 4.0).powi(2));
        let p = params(1.0, 0.01);
        let l = energy_single_valued(&p, 1).unwrap();
        assert!(single_valued_residual(&p, l.epsilon, 1).abs() < 1e-10);
        // bisection oracle with beta eps < 1/3
        assert!((l.epsilon - 0.25126105610199768).abs() < 1e-14);
    }

    #[test]
    fn single_valued_branch_can_vanish() {
        // alpha sqrt(beta) / m = 1 > 4/(3 sqrt 3)
        let err = energy_single_valued(&params(1.0, 1.0), 1).unwrap_err();
        assert!(matches!(err, Error::BranchAbsent { m: 1, .. }));
        assert!(energy_single_valued(&params(1.0, 1.0), 2).is_ok());
    }

    #[test]
    fn m_of_n_examples() {
        assert_eq!(m_of_n(&params(1.0, 0.0), 4).unwrap(), 4.0);
        let m = m_of_n(&params(1.0, 0.01), 1).unwrap();
        assert!((m - 1.0501141320539313).abs() < 1e-13);
        assert!(m.fract() != 0.0);
        // rate sqrt(beta): (m - n)/sqrt(beta) -> n sqrt(eps_0) = alpha/2
        let small = params(1.0, 1e-12);
        let excess = m_of_n(&small, 1).unwrap() - 1.0;
        assert!((excess / 1e-6 - 0.5).abs() < 1e-3);
    }

    #[test]
    fn perturbative_examples() {
        let e = energy_perturbative(&params(1.0, 0.01), 1, PerturbativeOrder::Beta).unwrap();
        assert!((e + 0.228125).abs() < 1e-15);
        let e = energy_perturbative(&params(1.7, 0.0), 2, PerturbativeOrder::SqrtBeta).unwrap();
        assert_eq!(e, -(1.7f64 / 4.0).powi(2));
    }

    #[test]
    fn perturbative_error_scales_as_beta_three_halves() {
        let betas = [1e-4, 1e-5, 1e-6, 1e-7, 1e-8];
        let (xs, ys): (Vec<f64>, Vec<f64>) = betas
            .iter()
            .map(|&b| {
                let p = params(1.0, b);
                let exact = energy_closed_form(&p, 1).unwrap().energy;
                let series = energy_perturbative(&p, 1, PerturbativeOrder::Beta).unwrap();
                (b.ln(), (exact - series).abs().ln())
            })
            .unzip();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        assert!((slope - 1.5).abs() < 0.02, "slope {slope}");
    }

    #[test]
    fn moment_vanishes_at_zero_cutoff_and_grows_linearly() {
        let p = params(1.0, 0.01);
        assert_eq!(moment_p4_cutoff(&p, 1, 0.0).unwrap(), 0.0);
        assert!(moment_p4_cutoff(&p, 1, 1e-6).unwrap() < 1e-20);
        let eps = undeformed_binding(1.0, 1);
        let lam = 1000.0 * eps.sqrt();
        let slope = (moment_p4_cutoff(&p, 1, 2.0 * lam).unwrap() - moment_p4_cutoff(&p, 1, lam).unwrap()) / lam;
        let expected = moment_p4_asymptotic_slope(&p, 1);
        assert!((slope / expected - 1.0).abs() < 1e-3);
    }

    #[test]
    fn moment_matches_antiderivative() {
        // p^4/(p^2+e)^2 = 1 - 2e/(p^2+e) + e^2/(p^2+e)^2, so
        // ∫_0^L = L - (3/2)√e atan(L/√e) + e L / (2 (L^2 + e))
        let p = params(0.7, 0.0);
        for n in [1, 3] {
            let eps = undeformed_binding(0.7, n);
            let se = eps.sqrt();
            for lam in [0.3 * se, 5.0 * se, 300.0 * se] {
                let exact = 2.0 * (lam - 1.5 * se * (lam / se).atan() + eps * lam / (2.0 * (lam * lam + eps)))
                    * 2.0 * eps.powf(1.5) / PI;
                let got = moment_p4_cutoff(&p, n, lam).unwrap();
                assert!((got / exact - 1.0).abs() < 1e-11, "n = {n}, lam = {lam}");
            }
        }
    }

    #[test]
    fn gup_weakens_binding() {
        for n in 1..=10 {
            for b in [1e-4, 1e-2, 0.1] {
                let eps = binding_closed_form(&params(1.0, b), n).unwrap();
                assert!(eps < undeformed_binding(1.0, n));
            }
        }
    }
}
