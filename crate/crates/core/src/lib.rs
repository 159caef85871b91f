//! Density-matrix simulation of an assisted Wigner's-friend scenario.
//!
//! A friend (Alice) measures one half of a Bell-type state and stores the
//! outcome in a memory; an outside observer (Wigner) holds the other qubits.
//! This crate builds those states, applies decoherence to Alice's memory, and
//! computes entanglement negativity, witnesses, discrimination distances and
//! private-state key security. The [`theorem1`] module checks bounds on
//! assisted entanglement for shielded ensembles.
//!
//! Subsystems are addressed by string labels (`a`, `t`, `A`, `m`, ...);
//! bipartitions are written `"aA|t"`.

pub mod channel;
pub mod circuit;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod protocol;
pub mod random;
pub mod scenario;
pub mod state;
pub mod theorem1;
pub mod tol;

pub use channel::{apply_channel, block_dephasing, make_channel, ChannelKind, KrausChannel};
pub use circuit::{
    ghz_state, measure_projective, memory_pair, phi_state, psi_state, ud_projectors, up_rank, Evolve, Gate,
    GateKind, MeasurementOutcome,
};
pub use error::{Error, Result};
pub use linalg::{hermitian_eigen, hermitian_eigenvalues, schatten1, ComplexMatrix, HermitianEigen};
pub use metrics::{
    build_witnesses, helstrom_povm, is_ppt, negativity, povm_classical_distance, support_projector,
    supports_disjoint, trace_distance, witness_expectation, witness_violation, Povm, Witness,
};
pub use protocol::{
    alice_lab_state, alice_state_pair, assisted_negativity_closed_form, key_security, private_blocks,
    semiclassical_bound, traced_negativity, traced_negativity_with, ud_povm, wigner_state, AliceModel,
    PrivateBlocks,
};
pub use scenario::{run_scenario, with_param, RunReport, Scenario, SweepParam, SweepSpec};
pub use state::{partial_transpose_matrix, Bipartition, DensityMatrix, PureState, SubsystemLayout};
pub use theorem1::{
    random_instance, theorem1_bounds, EnsembleMember, ShieldFamily, Theorem1Bounds, Theorem1Instance,
};
