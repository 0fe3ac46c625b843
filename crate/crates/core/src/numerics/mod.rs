//! Small numerical toolbox shared by every other module: compensated sums,
//! adaptive Gauss-Kronrod quadrature, least-squares fits, 1-D root finding and
//! limit extrapolation.

pub mod extrap;
pub mod fit;
pub mod gk;
pub mod grid;
pub mod roots;
pub mod sum;

pub use fit::{linear_fit, LinearFit};
pub use gk::{integrate, integrate_breaks, integrate_breaks_batched, Integral, Tol};
pub use grid::LogGrid;
pub use sum::{neumaier_sum, NeumaierSum};
