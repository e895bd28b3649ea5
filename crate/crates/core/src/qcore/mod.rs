//! Finite-dimensional quantum-state and channel numerics over labeled
//! tensor-product registers: partial trace, purification, fidelity and
//! purified distance, Kraus-channel application, computational-basis
//! measurement, and Uhlmann isometry extraction.

pub mod channel;
pub mod density;
pub mod linalg;
pub mod measure;
pub mod metrics;
pub mod pure;
pub mod register;
pub mod selftest;
pub mod uhlmann;

pub use channel::QuantumChannel;
pub use density::DensityOperator;
pub use measure::{measure_computational, outcome_distribution, MeasurementOutcome};
pub use metrics::{fidelity, purified_distance};
pub use pure::PureState;
pub use register::{Register, RegisterSystem};
pub use uhlmann::uhlmann_isometry;
