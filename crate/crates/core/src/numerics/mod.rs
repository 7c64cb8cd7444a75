//! Quadrature, spectral cumulative integration, bracketing root-finding and
//! finite differences shared by the physics modules.

mod diff;
mod legendre;
mod quadrature;
mod roots;

pub use diff::{derivative, Derivative};
pub use legendre::{gauss_legendre, GaussRule, LegendreSeries};
pub use quadrature::{integrate, integrate_real_line, tanh_sinh, QuadratureSpec, Scheme};
pub use roots::{find_root, RootBracket};
