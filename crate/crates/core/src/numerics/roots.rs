use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;

/// An interval on which a continuous function changes sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl RootBracket {
    /// Evaluates `f` at both ends and checks for a strict sign change.
    pub fn new<F>(f: F, lo: f64, hi: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64,
    {
        Self::from_values(lo, hi, f(lo), f(hi))
    }

    pub fn from_values(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Result<Self> {
        let invalid = Error::InvalidBracket { lo, hi, f_lo, f_hi };
        if !(lo < hi) || !f_lo.is_finite() || !f_hi.is_finite() {
            return Err(invalid);
        }
        if f_lo * f_hi >= 0.0 && f_lo != 0.0 && f_hi != 0.0 {
            return Err(invalid);
        }
        Ok(Self { lo, hi, f_lo, f_hi })
    }
}

/// Brent's method: inverse quadratic interpolation and secant steps,
/// falling back to bisection whenever they leave the bracket or stall.
///
/// Stops when the bracket half-width drops below `abs_tol / 2` plus a few ulps
/// of the current iterate.
pub fn find_root<F>(f: F, bracket: RootBracket, abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(abs_tol >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "root tolerance must be non-negative, got {abs_tol}"
        )));
    }
    let RootBracket {
        lo: mut a,
        hi: mut b,
        f_lo: mut fa,
        f_hi: mut fb,
    } = bracket;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let (mut c, mut fc) = (b, fb);
    let (mut d, mut e) = (b - a, b - a);

    for _ in 0..MAX_ITERATIONS {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * abs_tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "function returned non-finite value {fb} at {b}"
            )));
        }
    }
    Err(Error::RootNonConvergence {
        iterations: MAX_ITERATIONS,
        lo: b.min(c),
        hi: b.max(c),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn linear_root() {
        let f = |x: f64| x - 1.0;
        let b = RootBracket::new(f, 0.0, 2.0).unwrap();
        assert!((find_root(f, b, 1e-12).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_two() {
        let f = |x: f64| x * x - 2.0;
        let b = RootBracket::new(f, 1.0, 2.0).unwrap();
        let r = find_root(f, b, 1e-12).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn rejects_bracket_without_sign_change() {
        let f = |x: f64| x * x + 1.0;
        assert!(matches!(
            RootBracket::new(f, -1.0, 1.0),
            Err(Error::InvalidBracket { .. })
        ));
        assert!(RootBracket::new(|x| x, 1.0, -1.0).is_err());
    }

    #[test]
    fn gup_quantization_residual_ground_state() {
        // alpha = 1, beta = 0.01, n = 1
        let f = |e: f64| 1.0 / (2.0 * (e.sqrt() + 0.1 * e)) - 1.0;
        let b = RootBracket::new(f, 0.1, 0.25).unwrap();
        let eps = find_root(f, b, 1e-14).unwrap();
        assert!((eps - 0.2277).abs() < 1e-4, "{eps}");
        assert!(f(eps).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn root_lies_inside_a_sign_change(shift in -0.9f64..0.9, k in 1.0f64..5.0) {
            let f = move |x: f64| (k * (x - shift)).sinh();
            let b = RootBracket::new(f, -1.0, 1.0).unwrap();
            let r = find_root(f, b, 1e-13).unwrap();
            prop_assert!(f(r - 1e-12) * f(r + 1e-12) <= 0.0);
            prop_assert!((r - shift).abs() < 1e-12);
        }
    }
}
