//! Brute-force state vectors and density matrices on a handful of qubits,
//! used to certify the stabilizer engines.
//!
//! Pauli words here are real operators, so every stabilizer state has real
//! amplitudes and all matrices are real symmetric. Qubit `j` is bit `j` of the
//! basis index.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::StabilizerState;
use crate::pauli::PauliWord;
use crate::region::Region;

pub const MAX_DENSE_QUBITS: usize = 14;
/// Largest subsystem for which a reduced density matrix is formed.
pub const MAX_REDUCED_QUBITS: usize = 12;
const TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    amplitudes: Vec<f64>,
}

fn masks(p: &PauliWord) -> (usize, usize) {
    let word = |b: &crate::pauli::Bits| b.words().first().copied().unwrap_or(0) as usize;
    (word(p.x_bits()), word(p.z_bits()))
}

impl DenseState {
    pub fn from_amplitudes(amplitudes: Vec<f64>) -> Result<Self> {
        let n = amplitudes.len().trailing_zeros() as usize;
        if amplitudes.len() != 1 << n || n > MAX_DENSE_QUBITS {
            return Err(Error::Dimension {
                expected: 1 << n.min(MAX_DENSE_QUBITS),
                got: amplitudes.len(),
            });
        }
        let s = Self { n, amplitudes };
        if (s.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Numerical(format!("state norm {} is not 1", s.norm())));
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &DenseState) -> f64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a * b).sum()
    }

    /// `P|ψ⟩` with `X^x Z^z |b⟩ = (−1)^{z·b} |b ⊕ x⟩`.
    pub fn apply(&self, p: &PauliWord) -> Result<DenseState> {
        if p.n_qubits() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: p.n_qubits(),
            });
        }
        Ok(Self {
            n: self.n,
            amplitudes: apply_raw(&self.amplitudes, p),
        })
    }

    pub fn expectation(&self, p: &PauliWord) -> Result<f64> {
        Ok(self.inner(&self.apply(p)?))
    }
}

fn apply_raw(v: &[f64], p: &PauliWord) -> Vec<f64> {
    let (x, z) = masks(p);
    let sign = f64::from(p.sign());
    let mut out = vec![0.0; v.len()];
    for (b, &a) in v.iter().enumerate() {
        let parity = (z & b).count_ones() % 2;
        out[b ^ x] = if parity == 1 { -sign * a } else { sign * a };
    }
    out
}

fn too_large(n: usize, max: usize) -> Result<()> {
    if n > max {
        return Err(Error::TooLarge { n, max });
    }
    Ok(())
}

/// The unit vector fixed by every generator, with its first nonzero amplitude
/// positive.
pub fn dense_from_stabilizers(state: &StabilizerState) -> Result<DenseState> {
    let n = state.n_qubits();
    too_large(n, MAX_DENSE_QUBITS)?;
    if let Some(i) = state.generators().iter().position(|g| g.x_bits().dot(g.z_bits())) {
        return Err(Error::InvalidState(format!(
            "generator {i} squares to −1 and fixes no real state"
        )));
    }
    for seed in 0..4u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ seed);
        let mut v: Vec<f64> = (0..1usize << n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for g in state.generators() {
            let gv = apply_raw(&v, g);
            for (a, b) in v.iter_mut().zip(gv) {
                *a = 0.5 * (*a + b);
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        let first = v.iter().copied().find(|a| a.abs() > 1e-12).unwrap_or(1.0);
        let scale = first.signum() / norm;
        v.iter_mut().for_each(|a| *a *= scale);
        let s = DenseState { n, amplitudes: v };
        for (i, g) in state.generators().iter().enumerate() {
            if (s.expectation(g)? - 1.0).abs() > TOL {
                return Err(Error::InvalidState(format!("generator {i} is not stabilized")));
            }
        }
        return Ok(s);
    }
    Err(Error::InvalidState("generators stabilize no state".into()))
}

/// Reduced density matrix on `r`; basis bit `j` is the `j`-th qubit of `r`
/// in increasing order.
pub fn reduced_density(s: &DenseState, r: &Region) -> Result<DMatrix<f64>> {
    if r.n_total() != s.n {
        return Err(Error::Dimension {
            expected: s.n,
            got: r.n_total(),
        });
    }
    let keep = r.qubits();
    too_large(keep.len(), MAX_REDUCED_QUBITS)?;
    let rest = r.complement().qubits();
    let m = amplitude_matrix(s, &keep, &rest);
    Ok(&m * m.transpose())
}

/// Amplitudes reshaped to rows indexed by `rows` qubits, columns by `cols`.
fn amplitude_matrix(s: &DenseState, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    let spread = |bits: usize, qubits: &[usize]| {
        qubits
            .iter()
            .enumerate()
            .filter(|&(j, _)| bits >> j & 1 == 1)
            .fold(0usize, |acc, (_, &q)| acc | 1 << q)
    };
    let row_idx: Vec<usize> = (0..1usize << rows.len()).map(|b| spread(b, rows)).collect();
    let col_idx: Vec<usize> = (0..1usize << cols.len()).map(|b| spread(b, cols)).collect();
    DMatrix::from_fn(row_idx.len(), col_idx.len(), |i, j| s.amplitudes[row_idx[i] | col_idx[j]])
}

// Spectra go through the SVD: for the symmetric matrices here the singular
// values are the eigenvalue magnitudes, and nalgebra's symmetric eigensolver
// returns NaN on some exactly rank-deficient differences of projectors.
fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    m.clone().singular_values().iter().copied().collect()
}

fn von_neumann_bits(eigs: &[f64]) -> f64 {
    eigs.iter().filter(|&&l| l > 1e-15).map(|&l| -l * l.log2()).sum()
}

/// Entropy of `r` in bits, from the Gram matrix of the smaller side.
pub fn dense_entropy(s: &DenseState, r: &Region) -> Result<f64> {
    if r.n_total() != s.n {
        return Err(Error::Dimension {
            expected: s.n,
            got: r.n_total(),
        });
    }
    let (a, b) = (r.qubits(), r.complement().qubits());
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let m = amplitude_matrix(s, &small, &large);
    let probs: Vec<f64> = singular_values(&m).iter().map(|x| x * x).collect();
    Ok(von_neumann_bits(&probs))
}

/// Entropy in bits of a density matrix.
pub fn matrix_entropy(rho: &DMatrix<f64>) -> Result<f64> {
    Ok(von_neumann_bits(&check_density(rho)?))
}

fn check_density(rho: &DMatrix<f64>) -> Result<Vec<f64>> {
    if !rho.is_square() {
        return Err(Error::Dimension {
            expected: rho.nrows(),
            got: rho.ncols(),
        });
    }
    if (rho - rho.transpose()).amax() > TOL {
        return Err(Error::Numerical("density matrix is not symmetric".into()));
    }
    // Σ|λ| − Σλ is twice the weight of the negative eigenvalues.
    let sv = singular_values(rho);
    let negative = 0.5 * (sv.iter().sum::<f64>() - rho.trace());
    if negative > TOL {
        return Err(Error::Numerical(format!(
            "density matrix has negative eigenvalues of total weight {negative:e}"
        )));
    }
    Ok(sv)
}

fn same_shape(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension {
            expected: a.nrows(),
            got: b.nrows(),
        });
    }
    Ok(())
}

/// `½ ‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DMatrix<f64>, sigma: &DMatrix<f64>) -> Result<f64> {
    same_shape(rho, sigma)?;
    check_density(rho)?;
    check_density(sigma)?;
    Ok(0.5 * singular_values(&(rho - sigma)).iter().sum::<f64>())
}

fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested Vᵀ");
    let d = DMatrix::from_diagonal(&svd.singular_values.map(f64::sqrt));
    u * d * v_t
}

/// `‖√ρ √σ‖₁`.
pub fn fidelity(rho: &DMatrix<f64>, sigma: &DMatrix<f64>) -> Result<f64> {
    same_shape(rho, sigma)?;
    check_density(rho)?;
    check_density(sigma)?;
    let prod = psd_sqrt(rho) * psd_sqrt(sigma);
    Ok(prod.singular_values().iter().sum())
}

/// Outcome of the local-to-global check
/// `D(ρ_ABC, σ_ABC)² ≤ I(A:C|B)_ρ + I(A:C|B)_σ` with `σ = uρu†`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeGeReport {
    /// Largest entry of `ρ_AB − σ_AB` and `ρ_BC − σ_BC`.
    pub marginal_deviation: f64,
    pub premise_met: bool,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub holds: Option<bool>,
}

fn dense_cmi(s: &DenseState, a: &Region, b: &Region, c: &Region) -> Result<f64> {
    let ab = a.union(b);
    let bc = b.union(c);
    let abc = ab.union(c);
    Ok(dense_entropy(s, &ab)? + dense_entropy(s, &bc)? - dense_entropy(s, b)? - dense_entropy(s, &abc)?)
}

pub fn verify_le_ge(state: &StabilizerState, u: &PauliWord, a: &Region, b: &Region, c: &Region) -> Result<LeGeReport> {
    for (x, y, name) in [(a, b, "A/B"), (a, c, "A/C"), (b, c, "B/C")] {
        if !x.is_disjoint(y) {
            return Err(Error::Overlap(name.into()));
        }
    }
    let rho = dense_from_stabilizers(state)?;
    let sigma = rho.apply(u)?;
    let mut dev: f64 = 0.0;
    for r in [a.union(b), b.union(c)] {
        dev = dev.max((reduced_density(&rho, &r)? - reduced_density(&sigma, &r)?).amax());
    }
    if dev > TOL {
        return Ok(LeGeReport {
            marginal_deviation: dev,
            premise_met: false,
            lhs: None,
            rhs: None,
            holds: None,
        });
    }
    let abc = a.union(b).union(c);
    let d = trace_distance(&reduced_density(&rho, &abc)?, &reduced_density(&sigma, &abc)?)?;
    let lhs = d * d;
    let rhs = dense_cmi(&rho, a, b, c)? + dense_cmi(&sigma, a, b, c)?;
    Ok(LeGeReport {
        marginal_deviation: dev,
        premise_met: true,
        lhs: Some(lhs),
        rhs: Some(rhs),
        holds: Some(lhs <= rhs + TOL),
    })
}

/// A random real density matrix `G Gᵀ / tr`.
pub fn random_density<R: Rng>(dim: usize, rank: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, rank.max(1), |_, _| rng.gen_range(-1.0..1.0));
    let m = &g * g.transpose();
    let t = m.trace();
    m / t
}

/// `|ψ⟩⟨ψ|` for a dense state.
pub fn projector(s: &DenseState) -> DMatrix<f64> {
    let v = DMatrix::from_column_slice(s.amplitudes.len(), 1, &s.amplitudes);
    &v * v.transpose()
}
