use num_complex::Complex64;

use crate::error::{Error, Result};

/// Derivative estimate together with the extrapolation error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: Complex64,
    pub error: f64,
}

const SHRINK: f64 = 1.4;
const TABLE: usize = 10;
const SAFE: f64 = 2.0;

/// Central differences at steps `h, h/1.4, h/1.4², …` combined by a Richardson
/// (Ridders) tableau. The caller must keep `[x - h, x + h]` inside the domain of `f`.
pub fn derivative<F>(f: F, x: f64, h: f64) -> Result<Derivative>
where
    F: Fn(f64) -> Complex64,
{
    if !(h > 0.0) {
        return Err(Error::InvalidStep(h));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut a = [[zero; TABLE]; TABLE];
    let mut step = h;
    a[0][0] = (f(x + step) - f(x - step)) / (2.0 * step);
    let mut best = Derivative {
        value: a[0][0],
        error: f64::INFINITY,
    };
    let con2 = SHRINK * SHRINK;
    for i in 1..TABLE {
        step /= SHRINK;
        a[0][i] = (f(x + step) - f(x - step)) / (2.0 * step);
        let mut fac = con2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= con2;
            let err = (a[j][i] - a[j - 1][i])
                .norm()
                .max((a[j][i] - a[j - 1][i - 1]).norm());
            if err <= best.error {
                best = Derivative {
                    value: a[j][i],
                    error: err,
                };
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).norm() >= SAFE * best.error {
            break;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn square_at_one() {
        let d = derivative(|p| real(p * p), 1.0, 0.1).unwrap();
        assert!((d.value.re - 2.0).abs() < 1e-8);
    }

    #[test]
    fn sine_at_zero() {
        let d = derivative(|p| real(p.sin()), 0.0, 0.1).unwrap();
        assert!((d.value.re - 1.0).abs() < 1e-8);
        assert!(d.error < 1e-8);
    }

    #[test]
    fn deformed_momentum_has_unit_slope_at_origin() {
        let beta: f64 = 0.01;
        let sb = beta.sqrt();
        let d = derivative(|p| real((sb * p).tan() / sb), 0.0, 0.1).unwrap();
        assert!((d.value.re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn complex_valued_function() {
        let d = derivative(|p| Complex64::new(0.0, 2.0 * p).exp(), 0.3, 0.05).unwrap();
        let exact = Complex64::new(0.0, 2.0) * Complex64::new(0.0, 0.6).exp();
        assert!((d.value - exact).norm() < 1e-9);
    }

    #[test]
    fn rejects_non_positive_step() {
        assert_eq!(
            derivative(real, 0.0, 0.0).unwrap_err(),
            Error::InvalidStep(0.0)
        );
        assert!(derivative(real, 0.0, -1.0).is_err());
    }
}
