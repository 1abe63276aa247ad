//! Stochastic Galerkin approximation of `-div(a(x, y) grad u) = f` on the torus
//! with `a` affine in the parameters `y in [-1, 1]^J`.

pub mod galerkin;
pub mod legendre;
pub mod linalg;
pub mod problem;
pub mod reference;
pub mod study;
pub mod trig;

pub use galerkin::{assemble, solve, GalerkinSystem};
pub use legendre::legendre_coupling;
pub use linalg::{Preconditioner, SolveOptions};
pub use problem::{DecaySequences, ProblemSpec};
pub use reference::{Reference, YDesign};
pub use trig::{Complex, TrigFunction};
