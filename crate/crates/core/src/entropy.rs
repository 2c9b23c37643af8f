//! Exact entanglement entropy of stabilizer states, in bits.
//!
//! Two engines: a GF(2) rank of the restricted generators, and a symplectic
//! Gram–Schmidt that counts anticommuting pairs among the restrictions. Both
//! accept redundant generating sets because they only depend on the group.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::StabilizerState;
use crate::pauli::{BitMatrix, Bits, PauliWord};
use crate::region::{area_report, Region};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyMethod {
    RestrictedRank,
    FattalPairs,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntropyReport {
    pub region: String,
    pub entropy_bits: usize,
    pub method: EntropyMethod,
    /// `area − N_R` when the state comes from a lattice.
    pub predicted: Option<i64>,
}

fn check_region(state: &StabilizerState, r: &Region) -> Result<()> {
    if r.n_total() != state.n_qubits() {
        return Err(Error::Dimension {
            expected: state.n_qubits(),
            got: r.n_total(),
        });
    }
    Ok(())
}

fn predicted(state: &StabilizerState, r: &Region) -> Option<i64> {
    let lattice = state.lattice()?;
    let rep = area_report(lattice, r);
    Some(rep.area as i64 - rep.components_rough_free as i64)
}

/// The side of the cut with fewer qubits, as a sorted position list.
fn smaller_side(r: &Region) -> Vec<usize> {
    if 2 * r.len() <= r.n_total() {
        r.qubits()
    } else {
        r.complement().qubits()
    }
}

/// Restrictions of `gens` to `positions`, packed onto `positions.len()` qubits.
/// Generators that vanish on the region are skipped.
pub fn restricted_words(gens: &[PauliWord], positions: &[usize]) -> Vec<PauliWord> {
    let mask = Bits::from_indices(gens.first().map_or(0, |g| g.n_qubits()), positions.iter().copied());
    gens.iter()
        .filter(|g| g.x_bits().intersects(&mask) || g.z_bits().intersects(&mask))
        .map(|g| {
            PauliWord::from_bits(g.x_bits().gather(positions), g.z_bits().gather(positions), false)
                .expect("gathered halves have equal length")
        })
        .collect()
}

/// `S(A) = rank(G|_A) − |A|` for any generating set of a pure stabilizer state.
pub fn entropy_by_rank(gens: &[PauliWord], positions: &[usize]) -> usize {
    let words = restricted_words(gens, positions);
    let rows = words.iter().map(PauliWord::symplectic_row).collect();
    let m = BitMatrix::from_rows(2 * positions.len(), rows).expect("rows have width 2|A|");
    m.rank() - positions.len()
}

/// Number of anticommuting pairs found by symplectic Gram–Schmidt.
///
/// The lowest-index remaining word is the pivot; its partner is the
/// lowest-index word anticommuting with it. All other words are then made to
/// commute with both.
pub fn fattal_pairs(mut words: Vec<PauliWord>) -> usize {
    let mut pairs = 0;
    let mut start = 0;
    while start < words.len() {
        let Some(off) = words[start + 1..]
            .iter()
            .position(|w| w.anticommutes(&words[start]))
        else {
            start += 1;
            continue;
        };
        let partner = start + 1 + off;
        words.swap(start + 1, partner);
        let (head, rest) = words.split_at_mut(start + 2);
        let (a, b) = (&head[start], &head[start + 1]);
        for w in rest.iter_mut() {
            let anti_a = w.anticommutes(a);
            let anti_b = w.anticommutes(b);
            if anti_a {
                w.mul_assign(b);
            }
            if anti_b {
                w.mul_assign(a);
            }
        }
        pairs += 1;
        start += 2;
    }
    pairs
}

pub fn entropy_restricted_rank(state: &StabilizerState, r: &Region) -> Result<EntropyReport> {
    check_region(state, r)?;
    let side = smaller_side(r);
    Ok(EntropyReport {
        region: r.label().to_string(),
        entropy_bits: entropy_by_rank(state.generators(), &side),
        method: EntropyMethod::RestrictedRank,
        predicted: predicted(state, r),
    })
}

pub fn entropy_fattal(state: &StabilizerState, r: &Region) -> Result<EntropyReport> {
    check_region(state, r)?;
    let side = smaller_side(r);
    Ok(EntropyReport {
        region: r.label().to_string(),
        entropy_bits: fattal_pairs(restricted_words(state.generators(), &side)),
        method: EntropyMethod::FattalPairs,
        predicted: predicted(state, r),
    })
}

/// Entropy in bits by the rank engine, without the report.
pub fn entropy(state: &StabilizerState, r: &Region) -> Result<usize> {
    check_region(state, r)?;
    Ok(entropy_by_rank(state.generators(), &smaller_side(r)))
}

fn require_disjoint(regions: &[(&Region, &str)]) -> Result<()> {
    for i in 0..regions.len() {
        for j in i + 1..regions.len() {
            if !regions[i].0.is_disjoint(regions[j].0) {
                return Err(Error::Overlap(format!("{} and {}", regions[i].1, regions[j].1)));
            }
        }
    }
    Ok(())
}

/// `I(A:B) = S(A) + S(B) − S(AB)`.
pub fn mutual_info(state: &StabilizerState, a: &Region, b: &Region) -> Result<i64> {
    require_disjoint(&[(a, "A"), (b, "B")])?;
    let s = |r: &Region| entropy(state, r).map(|v| v as i64);
    Ok(s(a)? + s(b)? - s(&a.union(b))?)
}

/// `I(A:C|B) = S(AB) + S(BC) − S(B) − S(ABC)`.
pub fn cond_mutual_info(state: &StabilizerState, a: &Region, b: &Region, c: &Region) -> Result<i64> {
    require_disjoint(&[(a, "A"), (b, "B"), (c, "C")])?;
    let s = |r: &Region| entropy(state, r).map(|v| v as i64);
    let ab = a.union(b);
    let bc = b.union(c);
    Ok(s(&ab)? + s(&bc)? - s(b)? - s(&ab.union(c))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_toric_code, fix_ground_state, LatticeSpec};
    use crate::pauli::random_stabilizer_group;
    use crate::region::{box_region, Box3};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn state(words: &[&str]) -> StabilizerState {
        let gens: Vec<PauliWord> = words.iter().map(|w| PauliWord::parse(w).unwrap()).collect();
        StabilizerState::new(gens[0].n_qubits(), gens).unwrap()
    }

    #[test]
    fn bell_pair_has_one_ebit() {
        let s = state(&["+XX", "+ZZ"]);
        let r = Region::from_qubits(2, [0]).unwrap();
        assert_eq!(entropy_fattal(&s, &r).unwrap().entropy_bits, 1);
        assert_eq!(entropy_restricted_rank(&s, &r).unwrap().entropy_bits, 1);
    }

    #[test]
    fn product_state_is_unentangled() {
        let s = state(&["+ZII", "+IZI", "+IIZ"]);
        for q in 0..3 {
            let r = Region::from_qubits(3, [q]).unwrap();
            assert_eq!(entropy_fattal(&s, &r).unwrap().entropy_bits, 0);
        }
        let a = Region::from_qubits(3, [0]).unwrap();
        let b = Region::from_qubits(3, [1]).unwrap();
        let c = Region::from_qubits(3, [2]).unwrap();
        assert_eq!(cond_mutual_info(&s, &a, &b, &c).unwrap(), 0);
        assert!(matches!(mutual_info(&s, &a, &a), Err(Error::Overlap(_))));
    }

    #[test]
    fn toric_code_edges_and_trivial_regions() {
        let l = build_toric_code(&LatticeSpec::torus_2d(2).unwrap()).unwrap();
        let s = fix_ground_state(&l).unwrap();
        let n = s.n_qubits();
        assert_eq!(entropy(&s, &Region::empty(n)).unwrap(), 0);
        assert_eq!(entropy(&s, &Region::full(n)).unwrap(), 0);
        for q in 0..n {
            assert_eq!(entropy(&s, &Region::from_qubits(n, [q]).unwrap()).unwrap(), 1);
        }
    }

    #[test]
    fn bulk_ball_matches_area_law() {
        let l = build_toric_code(&LatticeSpec::torus_3d(8).unwrap()).unwrap();
        let s = fix_ground_state(&l).unwrap();
        for side in 1..=4 {
            let r = box_region(&l, &Box3::cells([2; 3], [2 + side; 3]));
            let rep = entropy_restricted_rank(&s, &r).unwrap();
            assert_eq!(Some(rep.entropy_bits as i64), rep.predicted, "side {side}");
            assert_eq!(entropy_fattal(&s, &r).unwrap().entropy_bits, rep.entropy_bits);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let s = state(&["+XX", "+ZZ"]);
        assert!(entropy(&s, &Region::empty(3)).is_err());
    }

    fn random_case() -> impl Strategy<Value = (u64, usize, Vec<bool>)> {
        (any::<u64>(), 1usize..=24).prop_flat_map(|(seed, n)| {
            (Just(seed), Just(n), proptest::collection::vec(any::<bool>(), n))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn engines_agree_on_random_states((seed, n, mask) in random_case()) {
            let gens = random_stabilizer_group(n, &mut ChaCha8Rng::seed_from_u64(seed));
            let s = StabilizerState::new(n, gens).unwrap();
            let r = Region::from_mask(Bits::from_bools(&mask));
            let rank = entropy_restricted_rank(&s, &r).unwrap().entropy_bits;
            prop_assert_eq!(rank, entropy_fattal(&s, &r).unwrap().entropy_bits);
            prop_assert_eq!(rank, entropy(&s, &r.complement()).unwrap());
            prop_assert!(rank <= r.len().min(n - r.len()));
        }

        #[test]
        fn strong_subadditivity(seed in any::<u64>(), labels in proptest::collection::vec(0u8..4, 16)) {
            let n = labels.len();
            let gens = random_stabilizer_group(n, &mut ChaCha8Rng::seed_from_u64(seed));
            let s = StabilizerState::new(n, gens).unwrap();
            let part = |k: u8| Region::from_qubits(n, (0..n).filter(|&q| labels[q] == k)).unwrap();
            let (a, b, c) = (part(0), part(1), part(2));
            prop_assert!(cond_mutual_info(&s, &a, &b, &c).unwrap() >= 0);
            prop_assert!(mutual_info(&s, &a, &c).unwrap() >= 0);
        }
    }
}
