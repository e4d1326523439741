//! Classical characteristics: potentials, the flow with its variational
//! matrix, a Picard solver and trajectory bounds.

pub mod bounds;
pub mod flow;
pub mod picard;
pub mod potential;

pub use bounds::{
    bound_constants, japanese_bracket, random_bound_samples, trajectory_bound_check, BoundReport,
    BoundSample, BoundViolation,
};
pub use flow::{
    flow, jacobian_fd_check, trajectory, variational_flow, write_trajectory, FlowOptions, FlowState,
    Integrator, TrajectoryPoint, VariationalState,
};
pub use picard::{picard_flow, PicardFlow, PicardFlowOptions};
pub use potential::{Potential, PotentialClass, PotentialModel};
