//! Regulators of cycles on Jacobians of curves, computed numerically and
//! compared with Carlson representatives of extensions of mixed Hodge
//! structures.
//!
//! The numerical core is generic over the real scalar (`scalar::Real`);
//! the aliases below fix it to `f64`.

pub mod carlson;
pub mod chen;
pub mod compare;
pub mod curve;
pub mod error;
pub mod exact;
pub mod mhs;
pub mod path;
pub mod period;
pub mod pipeline;
pub mod quadrature;
pub mod regulator;
pub mod scalar;

pub use error::{NumError, NumResult};

pub type Complex = scalar::C<f64>;
pub type Curve = curve::CurveModel<f64>;
pub type Point = curve::PointOnCurve<f64>;
pub type Function = curve::function::RationalFunction<f64>;
pub type Loops = path::LoopSystem<f64>;
pub type Frame = period::PeriodFrame<f64>;
pub type Gamma = path::LevelSetGamma<f64>;
pub type Cycle = regulator::MotivicCycle<f64>;
