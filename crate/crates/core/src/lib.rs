//! Phase-space tools for Schrödinger evolutions with quadratic and
//! sub-quadratic potentials: wave packet transforms, modulation-space norms
//! with evolving windows, classical characteristic flows with their
//! variational equations, and the characteristic-transport representation
//! of the wave packet transform of the solution.

pub mod classical;
pub mod error;
pub mod grid;
pub mod harness;
pub mod interp;
pub mod modspace;
pub mod schrod;
pub mod transport;
pub mod wpt;

mod fft;

pub use error::{Error, Result};
pub use grid::{mixed_norm, Exponent, Grid, MixedNormSpec, PhaseSpaceField, Point};
pub use wpt::{invert, wpt, wpt_adjoint, ComplexField, Window};
pub use classical::{FlowOptions, Integrator, Potential, PotentialClass, PotentialModel};
pub use harness::{ExperimentConfig, NormSeries, RawConfig, Summary};
pub use modspace::{mod_norm, WindowEvolution};
pub use transport::{PhaseIntegralSpec, RemainderSpec};
