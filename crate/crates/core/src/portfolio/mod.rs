//! Preferences, Schur-concavity probes and lattice optimizers.

mod optimize;
mod preference;

pub use optimize::{
    distance_to_uniform, lattice_counts, lattice_size, optimize_p1, optimize_p2, schur_probe, two_point_lattice,
    ExactLattice, LatticeOptions, P1Result, P2Result, ProbeResult, SampleBank, DEFAULT_LATTICE_BUDGET,
    DEFAULT_RESOLUTION, NOISE_Z,
};
pub use preference::{evaluate, Monotonicity, PenaltySpec, PreferenceSpec, Utility};
