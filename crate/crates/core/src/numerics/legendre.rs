use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

/// Gauss-Legendre nodes and weights on [-1, 1], nodes in increasing order.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[lo, hi]` with the affine map of the rule.
    pub fn integrate<F>(&self, f: F, lo: f64, hi: f64) -> Complex64
    where
        F: Fn(f64) -> Complex64,
    {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let sum: Complex64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(mid + half * x) * w)
            .sum();
        sum * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
    let nf = n as f64;
    let dp = nf * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

fn compute_rule(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi initial guess, refined by Newton.
        let theta = PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        let mut dp = 0.0;
        for _ in 0..20 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussRule { nodes, weights }
}

/// Returns the `n`-point Gauss-Legendre rule, computed once per `n` and cached.
pub fn gauss_legendre(n: usize) -> Arc<GaussRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&n) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(compute_rule(n));
    cache
        .lock()
        .expect("rule cache poisoned")
        .entry(n)
        .or_insert(rule)
        .clone()
}

/// Legendre expansion on [-1, 1] of a function sampled at Gauss-Legendre nodes.
#[derive(Debug, Clone)]
pub struct LegendreSeries {
    coeffs: Vec<Complex64>,
}

impl LegendreSeries {
    /// Degree `n - 1` interpolant of `values` sampled at the nodes of `rule`.
    pub fn interpolate(rule: &GaussRule, values: &[Complex64]) -> Self {
        assert_eq!(rule.len(), values.len(), "sample count must match rule size");
        let n = rule.len();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for ((&x, &w), &v) in rule.nodes.iter().zip(&rule.weights).zip(values) {
            let wv = v * w;
            let mut p_prev = 0.0;
            let mut p = 1.0;
            for (j, c) in coeffs.iter_mut().enumerate() {
                *c += wv * p;
                let jf = j as f64;
                let next = ((2.0 * jf + 1.0) * x * p - jf * p_prev) / (jf + 1.0);
                p_prev = p;
                p = next;
            }
        }
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c *= (2.0 * j as f64 + 1.0) / 2.0;
        }
        Self { coeffs }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> Complex64 {
        let n = self.coeffs.len();
        if n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let zero = Complex64::new(0.0, 0.0);
        let (mut b1, mut b2) = (zero, zero);
        for k in (1..n).rev() {
            let kf = k as f64;
            let alpha = (2.0 * kf + 1.0) * x / (kf + 1.0);
            let beta_next = -(kf + 1.0) / (kf + 2.0);
            let bk = self.coeffs[k] + b1 * alpha + b2 * beta_next;
            b2 = b1;
            b1 = bk;
        }
        self.coeffs[0] + b1 * x - b2 * 0.5
    }

    /// Antiderivative vanishing at x = -1.
    pub fn antiderivative(&self) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        if n == 0 {
            return Self { coeffs: out };
        }
        out[0] += self.coeffs[0];
        out[1] += self.coeffs[0];
        for j in 1..n {
            let a = self.coeffs[j] / (2.0 * j as f64 + 1.0);
            out[j + 1] += a;
            out[j - 1] -= a;
        }
        Self { coeffs: out }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_symmetric() {
        for n in [2, 7, 64, 1024] {
            let rule = gauss_legendre(n);
            let sum: f64 = rule.weights.iter().sum();
            assert!((sum - 2.0).abs() < 1e-13, "n = {n}, sum = {sum}");
            for i in 0..n {
                assert_eq!(rule.nodes[i], -rule.nodes[n - 1 - i]);
                assert!(rule.nodes[i].abs() < 1.0);
            }
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = gauss_legendre(5);
        // x^8 integrates to 2/9, x^9 to 0
        let i8 = rule.integrate(|x| Complex64::new(x.powi(8), 0.0), -1.0, 1.0);
        let i9 = rule.integrate(|x| Complex64::new(x.powi(9), 0.0), -1.0, 1.0);
        assert!((i8.re - 2.0 / 9.0).abs() < 1e-15);
        assert!(i9.re.abs() < 1e-15);
    }

    #[test]
    fn series_interpolates_and_integrates_polynomials() {
        let rule = gauss_legendre(16);
        let f = |x: f64| Complex64::new(3.0 * x * x - x + 2.0, x.powi(5));
        let values: Vec<_> = rule.nodes.iter().map(|&x| f(x)).collect();
        let series = LegendreSeries::interpolate(&rule, &values);
        for x in [-0.9, -0.3, 0.0, 0.55, 1.0] {
            assert!((series.eval(x) - f(x)).norm() < 1e-13);
        }
        let anti = series.antiderivative();
        let exact = |x: f64| {
            Complex64::new(
                x.powi(3) - x * x / 2.0 + 2.0 * x - (-1.0 - 0.5 - 2.0),
                (x.powi(6) - 1.0) / 6.0,
            )
        };
        for x in [-1.0, -0.2, 0.7, 1.0] {
            assert!((anti.eval(x) - exact(x)).norm() < 1e-13, "x = {x}");
        }
    }
}
