use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::legendre::gauss_legendre;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    GaussLegendre,
    TanhSinh,
}

/// Quadrature settings. `integrate` starts at `node_count` and doubles it
/// until two successive estimates agree, at most `max_doublings` times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    pub node_count: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_doublings: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            scheme: Scheme::GaussLegendre,
            node_count: 2048,
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_doublings: 2,
        }
    }
}

impl QuadratureSpec {
    pub fn gauss_legendre(node_count: usize) -> Self {
        Self {
            node_count,
            ..Self::default()
        }
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count < 64 || !self.node_count.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "quadrature node count must be even and >= 64, got {}",
                self.node_count
            )));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "quadrature tolerances must be positive".into(),
            ));
        }
        Ok(())
    }

    fn accepts(&self, previous: Complex64, current: Complex64) -> bool {
        (current - previous).norm() <= self.abs_tol.max(self.rel_tol * current.norm())
    }
}

/// Tanh-sinh rule on [lo, hi] using roughly `node_count` abscissae.
///
/// Nodes are generated from the complement `1 - |x|` so that abscissae
/// clustered at the ends stay strictly interior.
pub fn tanh_sinh<F>(f: F, lo: f64, hi: f64, node_count: usize) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    const T_MAX: f64 = 4.0;
    let m = (node_count / 2).max(1);
    let h = T_MAX / m as f64;
    let half = 0.5 * (hi - lo);
    let mut sum = f(0.5 * (lo + hi)) * FRAC_PI_2;
    for k in 1..=m {
        let t = k as f64 * h;
        let u = FRAC_PI_2 * t.sinh();
        let cosh_u = u.cosh();
        // 1 - tanh(u), computed without cancellation
        let complement = 1.0 / (u.exp() * cosh_u);
        let w = FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        if w == 0.0 {
            break;
        }
        let left = lo + half * complement;
        if left > lo {
            sum += f(left) * w;
        }
        let right = hi - half * complement;
        if right < hi {
            sum += f(right) * w;
        }
    }
    sum * (h * half)
}

fn apply_rule<F>(f: &F, lo: f64, hi: f64, scheme: Scheme, nodes: usize) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    match scheme {
        Scheme::GaussLegendre => gauss_legendre(nodes).integrate(f, lo, hi),
        Scheme::TanhSinh => tanh_sinh(f, lo, hi, nodes),
    }
}

/// Integrates `f` over the open interval `(lo, hi)`.
///
/// The node count is doubled until two successive estimates differ by at
/// most `max(abs_tol, rel_tol * |estimate|)`.
pub fn integrate<F>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "integration requires lo < hi, got [{lo}, {hi}]"
        )));
    }
    let mut nodes = spec.node_count.max(2);
    let mut current = apply_rule(&f, lo, hi, spec.scheme, nodes);
    let mut previous = current;
    for _ in 0..spec.max_doublings.max(1) {
        nodes *= 2;
        previous = current;
        current = apply_rule(&f, lo, hi, spec.scheme, nodes);
        let finite = current.re.is_finite() && current.im.is_finite();
        if !finite {
            break;
        }
        if spec.accepts(previous, current) {
            return Ok(current);
        }
    }
    Err(Error::QuadratureNonConvergence {
        nodes,
        previous,
        current,
    })
}

/// Integrates `f` over the whole real line through `p = scale * tan(u)`.
pub fn integrate_real_line<F>(f: F, scale: f64, spec: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "real-line map needs a positive scale, got {scale}"
        )));
    }
    integrate(
        |u: f64| {
            let c = u.cos();
            f(scale * u.tan()) * (scale / (c * c))
        },
        -FRAC_PI_2,
        FRAC_PI_2,
        spec,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn real(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn constant_on_zero_to_pi() {
        let v = integrate(|_| real(1.0), 0.0, PI, &QuadratureSpec::gauss_legendre(64)).unwrap();
        assert!((v.re - PI).abs() < 1e-14);
    }

    #[test]
    fn cos_squared_is_half_the_interval() {
        let spec = QuadratureSpec::gauss_legendre(64);
        let v = integrate(|p| real(p.cos().powi(2)), -FRAC_PI_2, FRAC_PI_2, &spec).unwrap();
        assert!((v.re - FRAC_PI_2).abs() < 1e-14);
        let ts = QuadratureSpec {
            scheme: Scheme::TanhSinh,
            ..spec
        };
        let v = integrate(|p| real(p.cos().powi(2)), -FRAC_PI_2, FRAC_PI_2, &ts).unwrap();
        assert!((v.re - FRAC_PI_2).abs() < 1e-13);
    }

    #[test]
    fn undeformed_density_is_normalized() {
        let eps: f64 = 0.25;
        let spec = QuadratureSpec::gauss_legendre(64);
        let v = integrate_real_line(
            |p| real(2.0 * eps.powf(1.5) / (PI * (p * p + eps).powi(2))),
            1.0,
            &spec,
        )
        .unwrap();
        assert!((v.re - 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        // integral of x^(-1/2) over (0, 1) is 2; integral of ln(x) is -1
        let spec = QuadratureSpec {
            scheme: Scheme::TanhSinh,
            node_count: 64,
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_doublings: 4,
        };
        let v = integrate(|x| real(1.0 / x.sqrt()), 0.0, 1.0, &spec).unwrap();
        assert!((v.re - 2.0).abs() < 1e-11, "{v}");
        let v = integrate(|x| real(x.ln()), 0.0, 1.0, &spec).unwrap();
        assert!((v.re + 1.0).abs() < 1e-11, "{v}");
    }

    #[test]
    fn non_convergence_reports_both_estimates() {
        let spec = QuadratureSpec {
            max_doublings: 1,
            ..QuadratureSpec::gauss_legendre(64)
        };
        let err = integrate(|x| real((1000.0 * x).sin().abs()), 0.0, 10.0, &spec).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
        assert!(err.is_non_convergence());
    }

    #[test]
    fn rejects_empty_interval_and_bad_spec() {
        let spec = QuadratureSpec::gauss_legendre(64);
        assert!(integrate(|_| real(1.0), 1.0, 1.0, &spec).is_err());
        assert!(QuadratureSpec::gauss_legendre(63).validate().is_err());
        assert!(QuadratureSpec::gauss_legendre(32).validate().is_err());
        assert!(QuadratureSpec::default().validate().is_ok());
    }
}
