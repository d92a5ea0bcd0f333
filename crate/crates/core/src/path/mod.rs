//! Sheet-tracked paths and loops on the Riemann surface.

pub mod arc;
pub mod gamma;
pub mod intersect;
pub mod reach;
pub mod loops;
pub mod route;
pub mod surface;

pub use arc::Arc;
pub use gamma::{trace_gamma, GammaComponent, GammaOptions, LevelSetGamma};
pub use reach::path_to_point;
pub use loops::{LoopBuilder, LoopOptions, LoopSystem};
pub use surface::{CurvePath, Segment, SurfacePath};
