//! Real Pauli words with a ±1 sign.
//!
//! Sign convention (used everywhere in the crate): a word with bit vectors
//! `x`, `z` and sign bit `s` denotes the real operator
//!
//! ```text
//! (-1)^s  ⊗_j  X^{x_j} Z^{z_j}
//! ```
//!
//! so a qubit carrying both bits holds `XZ = -iY`. Products of such words stay
//! real: `(X^a Z^b)(X^c Z^d) = (-1)^{b·c} X^{a+c} Z^{b+d}`. A word squares to
//! `(-1)^{x·z}`; stabilizer generators built by this crate are X-type or
//! Z-type and therefore square to the identity.

use std::fmt;

use super::bits::Bits;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliWord {
    x: Bits,
    z: Bits,
    negative: bool,
}

impl PauliWord {
    pub fn identity(n: usize) -> Self {
        Self {
            x: Bits::zeros(n),
            z: Bits::zeros(n),
            negative: false,
        }
    }

    pub fn from_bits(x: Bits, z: Bits, negative: bool) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::Dimension {
                expected: x.len(),
                got: z.len(),
            });
        }
        Ok(Self { x, z, negative })
    }

    /// X on every listed qubit.
    pub fn x_on<I: IntoIterator<Item = usize>>(n: usize, qubits: I) -> Self {
        Self {
            x: Bits::from_indices(n, qubits),
            z: Bits::zeros(n),
            negative: false,
        }
    }

    /// Z on every listed qubit.
    pub fn z_on<I: IntoIterator<Item = usize>>(n: usize, qubits: I) -> Self {
        Self {
            x: Bits::zeros(n),
            z: Bits::from_indices(n, qubits),
            negative: false,
        }
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    #[inline]
    pub fn x_bits(&self) -> &Bits {
        &self.x
    }

    #[inline]
    pub fn z_bits(&self) -> &Bits {
        &self.z
    }

    #[inline]
    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// +1 or -1.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn with_sign(mut self, negative: bool) -> Self {
        self.negative = negative;
        self
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    /// Qubits on which the word acts non-trivially.
    pub fn support(&self) -> Bits {
        let mut s = self.x.clone();
        s.or_assign(&self.z);
        s
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones()
    }

    /// True if the bit vectors are empty (the sign is ignored).
    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn is_x_type(&self) -> bool {
        self.z.is_zero()
    }

    pub fn is_z_type(&self) -> bool {
        self.x.is_zero()
    }

    fn check_len(&self, other: &PauliWord) -> Result<()> {
        if self.n_qubits() != other.n_qubits() {
            return Err(Error::Dimension {
                expected: self.n_qubits(),
                got: other.n_qubits(),
            });
        }
        Ok(())
    }

    /// 1 (`true`) iff the words anticommute: `x_p·z_q + z_p·x_q mod 2`.
    pub fn symplectic_product(&self, other: &PauliWord) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.anticommutes(other))
    }

    /// Unchecked variant of [`symplectic_product`](Self::symplectic_product).
    #[inline]
    pub fn anticommutes(&self, other: &PauliWord) -> bool {
        self.x.dot(&other.z) ^ self.z.dot(&other.x)
    }

    /// The product `self · other` with exact sign.
    pub fn multiply(&self, other: &PauliWord) -> Result<PauliWord> {
        self.check_len(other)?;
        let mut out = self.clone();
        out.mul_assign(other);
        Ok(out)
    }

    /// `self ← self · other`. Lengths must agree.
    pub fn mul_assign(&mut self, other: &PauliWord) {
        debug_assert_eq!(self.n_qubits(), other.n_qubits());
        let flip = self.z.dot(&other.x);
        self.negative ^= other.negative ^ flip;
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    /// Inverse: the word itself with the sign corrected by `(-1)^{x·z}`.
    pub fn inverse(&self) -> PauliWord {
        let mut out = self.clone();
        out.negative ^= self.x.dot(&self.z);
        out
    }

    /// Restriction to the qubits in `region` (a mask of length `n`). The
    /// result carries sign +1.
    pub fn restrict(&self, region: &Bits) -> Result<PauliWord> {
        if region.len() != self.n_qubits() {
            return Err(Error::Dimension {
                expected: self.n_qubits(),
                got: region.len(),
            });
        }
        let mut x = self.x.clone();
        let mut z = self.z.clone();
        x.and_assign(region);
        z.and_assign(region);
        Ok(PauliWord {
            x,
            z,
            negative: false,
        })
    }

    /// Restriction to an explicit qubit list, which is range checked.
    pub fn restrict_to(&self, qubits: &[usize]) -> Result<PauliWord> {
        let n = self.n_qubits();
        if let Some(&bad) = qubits.iter().find(|&&q| q >= n) {
            return Err(Error::IndexOutOfRange { index: bad, n });
        }
        self.restrict(&Bits::from_bools(&{
            let mut m = vec![false; n];
            for &q in qubits {
                m[q] = true;
            }
            m
        }))
    }

    /// Bits of the stacked (x | z) row, length `2n`.
    pub fn symplectic_row(&self) -> Bits {
        let n = self.n_qubits();
        let mut row = Bits::zeros(2 * n);
        for i in self.x.iter_ones() {
            row.set(i, true);
        }
        for i in self.z.iter_ones() {
            row.set(n + i, true);
        }
        row
    }

    /// Parses strings such as `"+XZI"` or `"-ZZ"`; `Y` stands for `XZ`.
    pub fn parse(s: &str) -> Result<PauliWord> {
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let n = body.chars().count();
        let mut x = Bits::zeros(n);
        let mut z = Bits::zeros(n);
        for (i, c) in body.chars().enumerate() {
            match c {
                'I' | '_' => {}
                'X' => x.set(i, true),
                'Z' => z.set(i, true),
                'Y' => {
                    x.set(i, true);
                    z.set(i, true);
                }
                other => {
                    return Err(Error::InvalidState(format!(
                        "bad Pauli character {other:?} in {s:?}"
                    )))
                }
            }
        }
        Ok(PauliWord { x, z, negative })
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.negative { '-' } else { '+' })?;
        for i in 0..self.n_qubits() {
            let c = match (self.x.get(i), self.z.get(i)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliWord({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliWord {
        PauliWord::parse(s).unwrap()
    }

    #[test]
    fn single_qubit_commutation() {
        assert!(p("X").symplectic_product(&p("Z")).unwrap());
        assert!(!p("X").symplectic_product(&p("X")).unwrap());
        assert!(!p("XX").symplectic_product(&p("ZZ")).unwrap());
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(matches!(
            p("X").symplectic_product(&p("XZ")),
            Err(Error::Dimension { .. })
        ));
        assert!(p("X").multiply(&p("XZ")).is_err());
    }

    #[test]
    fn identity_and_involution() {
        let q = p("-XZIZ");
        assert_eq!(q.multiply(&PauliWord::identity(4)).unwrap(), q);
        let xs = p("XXIX");
        let sq = xs.multiply(&xs).unwrap();
        assert!(sq.is_identity() && !sq.is_negative());
        let zs = p("-ZIZZ");
        let sq = zs.multiply(&zs).unwrap();
        assert!(sq.is_identity() && !sq.is_negative());
    }

    #[test]
    fn xz_squared_is_minus_identity() {
        let xz = p("X").multiply(&p("Z")).unwrap();
        let sq = xz.multiply(&xz).unwrap();
        assert!(sq.is_identity());
        assert!(sq.is_negative());
        let inv = xz.inverse();
        let one = xz.multiply(&inv).unwrap();
        assert!(one.is_identity() && !one.is_negative());
    }

    #[test]
    fn restrict_edges() {
        let q = p("-XZZY");
        let full = Bits::ones(4);
        assert_eq!(q.restrict(&full).unwrap(), q.clone().with_sign(false));
        assert!(q.restrict(&Bits::zeros(4)).unwrap().is_identity());
        assert!(matches!(
            q.restrict_to(&[7]),
            Err(Error::IndexOutOfRange { index: 7, n: 4 })
        ));
    }

    fn arb_word(n: usize) -> impl Strategy<Value = PauliWord> {
        (
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(any::<bool>(), n),
            any::<bool>(),
        )
            .prop_map(|(x, z, s)| {
                PauliWord::from_bits(Bits::from_bools(&x), Bits::from_bools(&z), s).unwrap()
            })
    }

    proptest! {
        #[test]
        fn symplectic_product_is_symmetric(a in arb_word(70), b in arb_word(70)) {
            prop_assert_eq!(a.anticommutes(&b), b.anticommutes(&a));
        }

        #[test]
        fn swapped_products_differ_by_commutator(a in arb_word(70), b in arb_word(70)) {
            let ab = a.multiply(&b).unwrap();
            let ba = b.multiply(&a).unwrap();
            prop_assert_eq!(ab.x_bits(), ba.x_bits());
            prop_assert_eq!(ab.z_bits(), ba.z_bits());
            prop_assert_eq!(ab.is_negative() ^ ba.is_negative(), a.anticommutes(&b));
        }

        #[test]
        fn multiplication_is_associative(a in arb_word(40), b in arb_word(40), c in arb_word(40)) {
            let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn restriction_halves_recombine(a in arb_word(50), mask in proptest::collection::vec(any::<bool>(), 50)) {
            let m = Bits::from_bools(&mask);
            let left = a.restrict(&m).unwrap();
            let right = a.restrict(&m.not()).unwrap();
            let joined = left.multiply(&right).unwrap();
            prop_assert_eq!(joined.x_bits(), a.x_bits());
            prop_assert_eq!(joined.z_bits(), a.z_bits());
        }
    }
}
