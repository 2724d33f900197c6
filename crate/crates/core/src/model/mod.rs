//! Hamiltonians, density states and Liouvillian superoperators.

pub mod hamiltonian;
pub mod liouvillian;
pub mod spec;
pub mod state;

pub use hamiltonian::{
    build_attenuation, build_chain_hamiltonian, build_ring_hamiltonian, ComplexMatrix, Hamiltonian,
};
pub use liouvillian::{
    build_augmented_liouvillian, build_liouvillian, Accumulator, Representation, Superoperator,
    DENSE_SITE_LIMIT,
};
pub use spec::{SystemSpec, Topology};
pub use state::{population_index, vec_index, DensityState};
