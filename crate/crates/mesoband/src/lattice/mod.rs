//! Torus geometry, band profiles and the variance operator `S`.

mod audit;
mod fft;
mod geometry;
mod moments;
mod operator;

pub use audit::{admissible, bound_audit, r2, AlphaAudit, AuditReport};
pub use geometry::{BandProfile, CustomProfile, TorusGeometry};
pub use moments::MomentTensors;
pub use operator::{partial_geometric, TraceTable, VarianceOperator};

pub(crate) use operator::Accumulator;
