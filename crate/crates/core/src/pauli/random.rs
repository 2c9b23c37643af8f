use rand::Rng;

use super::{Bits, PauliWord};

/// A uniformly scrambled maximal commuting set of `n` independent words.
///
/// Starts from `Z_0, …, Z_{n-1}` and applies random symplectic transvections
/// `v ↦ v + ⟨v,h⟩ h`, which preserve commutation and independence. Signs are
/// left at +1; only the symplectic part matters for entropies.
pub fn random_stabilizer_group<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<PauliWord> {
    let mut words: Vec<PauliWord> = (0..n).map(|i| PauliWord::z_on(n, [i])).collect();
    if n == 0 {
        return words;
    }
    let rounds = 4 * n + 8;
    for _ in 0..rounds {
        let h = loop {
            let x = Bits::from_bools(&(0..n).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
            let z = Bits::from_bools(&(0..n).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
            let w = PauliWord::from_bits(x, z, false).expect("equal lengths");
            if !w.is_identity() {
                break w;
            }
        };
        for w in words.iter_mut() {
            if w.anticommutes(&h) {
                let next = w.multiply(&h).expect("equal lengths");
                *w = next.with_sign(false);
            }
        }
    }
    words
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::group_rank;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_groups_are_maximal_and_abelian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 5, 17] {
            let g = random_stabilizer_group(n, &mut rng);
            assert_eq!(group_rank(n, &g), n);
            for a in &g {
                for b in &g {
                    assert!(!a.anticommutes(b));
                }
            }
        }
    }
}
