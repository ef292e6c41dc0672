//! Time integration: additive Runge-Kutta tableaus and the GePUP stepper.

pub mod stepper;
pub mod tableau;

pub use stepper::{courant_dt, StepStats, Stepper, StepperConfig};
pub use tableau::{load_tableau, validate_tableau, ButcherTableau, TableauId, TableauReport};
