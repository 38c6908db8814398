//! Torque control for planar manipulators that provably keeps joint
//! positions and velocities inside fixed box limits while tracking a
//! desired trajectory.
//!
//! The feasible box is reparametrized by exogenous states through a tanh
//! map, so the constrained tracking problem becomes an unconstrained one;
//! a feedback-linearizing torque law then drives the transformed errors to
//! zero. The crate bundles the transform machinery, closed-form planar
//! chain dynamics, the controller with its gain conditions, a fixed-step
//! closed-loop simulator, and Lyapunov/limit-margin analysis over the
//! recorded traces.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --example two_link_constant      # step to a target near the corner of the box
//! cargo run --example two_link_sine          # track a sinusoid brushing the limits
//! cargo run --example baseline_contrast      # computed-torque PD vs the limit-aware law
//! cargo run --example gain_validation        # Schur-condition check on published gain sets
//! cargo run --example timestep_sweep         # control-period sensitivity study
//! cargo run --example disturbance_rejection  # containment under a mid-run torque pulse
//! cargo run --example icub_leg               # 3-link leg stand-in with real limit tables
//! ```
//!
//! The `limit-torque` binary exposes the same machinery for batch use:
//! `run`, `preset`, `sweep`, `validate-gains`, and `audit` subcommands
//! (see the README).
//!
//! # Units
//!
//! Radians and radians/second everywhere inside the library; degrees only
//! at the config-file boundary.

pub mod analysis;
pub mod controller;
pub mod dynamics;
pub mod error;
pub mod limits;
pub mod output;
pub mod param;
pub mod runner;
pub mod scenario;
pub mod sim;
pub mod trajectory;

pub use analysis::{error_dynamics_residual, lyapunov_value, trace_metrics, MetricsReport};
pub use controller::{
    baseline_computed_torque, control_torque, transformed_bias, validate_gains, ControlDebug,
    GainReport, GainSet, PdGains, Variant,
};
pub use dynamics::{dyn_terms, energy, forward_dynamics, DynTerms, PlanarChainModel};
pub use error::{Error, Result};
pub use limits::{sat, sat_vec, JointState, LimitSet, TransformedState};
pub use param::{
    backward_map, forward_map, jacobians, psi_r, psi_r_dot, BackwardMode, PsiRInputs, DEFAULT_P,
    EPSILON_SAT,
};
pub use scenario::{preset, ScenarioConfig, PRESET_NAMES};
pub use sim::{
    simulate, sweep_timestep, ControlLaw, ControllerSelection, DisturbancePulse, Integrator,
    SimConfig, SimTrace, SweepSummary,
};
pub use trajectory::{DesiredState, FeasibilityReport, TrajectorySpec};
