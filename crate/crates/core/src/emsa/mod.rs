//! Checks of the eigensystem multiscale step on sampled realizations: cube
//! interactivity, separability, the good events of a scale, decay of
//! eigenvectors through good and buffered cubes and the scale schedules.

mod buffered;
mod decay;
mod initial;
mod interactivity;
mod iteration;
mod run;
mod scale;
mod schedule;
mod separability;
mod tensor;

pub use buffered::{build_buffered, BufferedCube};
pub use decay::{
    buffered_gain, crude_bound_check, verify_buffered_decay, verify_local_decay, Amplitudes, DecayCheck, NOISE_FLOOR,
};
pub use initial::{initial_scale, orbit_l1_distance, InitialScaleReport};
pub use interactivity::{classify_cube, disjoint_projection_check, InteractivityVerdict, ProjectionVerdict};
pub use iteration::{localization_center, run_iteration, IterationSetup, IterationStep, IterationTrace, StepKind};
pub use run::{run_emsa_seed, BufferSummary, EmsaReport, EmsaSetup, IterationCount, LemmaCount, EMSA_SCHEMA};
pub use scale::{evaluate_events, CoverCube, EventReport, ResonanceFailure, ScaleAnalysis};
pub use schedule::{decay_parameter_schedule, mass_threshold, scale_schedule, DecaySchedule, ScaleRow, ScaleSchedule};
pub use separability::{weak_separability, WeakSeparabilityWitness, WitnessMethod};
pub use tensor::{tensor_check, TensorCheck};
