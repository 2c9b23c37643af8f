//! Bit-packed Pauli algebra and GF(2) linear algebra.

mod bits;
mod matrix;
mod random;
mod word;

pub use bits::Bits;
pub use matrix::{independent_subset, rank_gf2, BitMatrix, EchelonBasis};
pub use random::random_stabilizer_group;
pub use word::PauliWord;

/// Stacked (x|z) check matrix of a list of words on `n` qubits.
pub fn check_matrix(n: usize, words: &[PauliWord]) -> BitMatrix {
    BitMatrix::from_rows(2 * n, words.iter().map(PauliWord::symplectic_row).collect())
        .expect("words share a qubit count")
}

/// Rank of the group generated by `words`.
pub fn group_rank(n: usize, words: &[PauliWord]) -> usize {
    check_matrix(n, words).rank()
}
