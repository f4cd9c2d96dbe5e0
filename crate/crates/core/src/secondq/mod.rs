//! Second-quantized electronic structure on qubits.
//!
//! Mode `j` maps to qubit `j`; an occupied mode is `|1⟩`.

mod estimate;
mod integrals;
mod pauli;

pub use estimate::{estimate_ground_energy, GroundEnergyEstimate, GroundEnergyOptions, TrotterizedPauli};
pub use integrals::{load_integrals, parse_integrals, reduce_to_two_body, IntegralSet, Tensor4};
pub use pauli::{
    build_qubit_hamiltonian, evolve_pauli_string, fermionic_hamiltonian, jordan_wigner, ladder, number_operator,
    PauliString, PauliSum, QubitHamiltonian, MAX_PAULI_QUBITS, PRUNE_TOL,
};

/// Minimal-basis H₂ integrals shipped with the crate, 4 spin orbitals.
pub const H2_STO3G: &str = include_str!("../../data/h2_sto3g.txt");

/// Basis index with the lowest `n_electrons` modes occupied.
pub fn hartree_fock_index(n_electrons: usize) -> usize {
    (1usize << n_electrons) - 1
}
