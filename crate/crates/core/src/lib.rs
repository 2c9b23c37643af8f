//! Entanglement entropies and boundary topological invariants of toric-code
//! stabilizer states.

pub mod dense;
pub mod entropy;
pub mod error;
pub mod excitations;
pub mod graph;
pub mod invariants;
pub mod lattice;
pub mod pauli;
pub mod region;

pub use entropy::{cond_mutual_info, entropy_fattal, entropy_restricted_rank, mutual_info, EntropyMethod, EntropyReport};
pub use error::{Error, Result};
pub use excitations::{CondensationKind, ExcitationKind, ExcitationProcess};
pub use graph::{build_restriction_graph, reduce, RestrictionGraph};
pub use invariants::{gamma_2d, gamma_line, gamma_point, tee_combination, InvariantKind, InvariantReport};
pub use lattice::{
    build_toric_code, fix_ground_state, fix_ground_state_with, independent_generating_set,
    Boundary, CodeLattice, Face, GeneratorKind, LatticeSpec, LogicalChoice, StabilizerState,
};
pub use pauli::{rank_gf2, BitMatrix, Bits, PauliWord};
pub use region::{area_report, box_region, AreaReport, Box3, Partition2dParams, PartitionABCD, PartitionParams, Region};
