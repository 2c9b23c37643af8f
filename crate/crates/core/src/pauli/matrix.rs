//! Dense GF(2) matrices and incremental echelon bases.

use super::bits::Bits;
use crate::error::{Error, Result};

/// Row-major matrix over GF(2); every row has `cols` bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<Bits>,
}

impl BitMatrix {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<Bits>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension {
                expected: cols,
                got: bad.len(),
            });
        }
        Ok(Self { cols, rows })
    }

    pub fn push(&mut self, row: Bits) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::Dimension {
                expected: self.cols,
                got: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Bits] {
        &self.rows
    }

    /// Row rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.row_reduce().len()
    }

    /// Gaussian elimination in place, scanning columns from the lowest index
    /// and taking the lowest-index available row as pivot. Produces reduced
    /// row echelon form (pivot columns are cleared in every other row) and
    /// returns the pivot columns; the first `len()` rows are the non-zero rows.
    pub fn row_reduce(&mut self) -> Vec<usize> {
        let n_rows = self.rows.len();
        let mut pivots = Vec::new();
        let mut r = 0;
        let words = self.cols.div_ceil(64);
        'cols: for w in 0..words {
            for bit in 0..64 {
                let col = w * 64 + bit;
                if col >= self.cols || r == n_rows {
                    break 'cols;
                }
                let mask = 1u64 << bit;
                let Some(p) = (r..n_rows).find(|&i| self.rows[i].words()[w] & mask != 0) else {
                    continue;
                };
                self.rows.swap(r, p);
                let (head, tail) = self.rows.split_at_mut(r);
                let (pivot_row, tail) = tail.split_first_mut().expect("r < n_rows");
                for row in head.iter_mut().chain(tail.iter_mut()) {
                    if row.words()[w] & mask != 0 {
                        row.xor_assign(pivot_row);
                    }
                }
                pivots.push(col);
                r += 1;
            }
        }
        pivots
    }
}

impl BitMatrix {
    /// A basis of the right null space `{v : M v = 0}`.
    pub fn nullspace(&self) -> Vec<Bits> {
        let mut m = self.clone();
        let pivots = m.row_reduce();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = Bits::zeros(self.cols);
            v.set(free, true);
            for (k, &p) in pivots.iter().enumerate() {
                if m.rows[k].get(free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Free-function form of [`BitMatrix::rank`].
pub fn rank_gf2(m: &BitMatrix) -> usize {
    m.rank()
}

/// Incrementally built echelon basis that remembers, for each basis row,
/// which inserted vectors it is a combination of.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    len: usize,
    inserted: usize,
    rows: Vec<BasisRow>,
}

#[derive(Clone, Debug)]
struct BasisRow {
    pivot: usize,
    bits: Bits,
    combo: Vec<usize>,
}

impl EchelonBasis {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            inserted: 0,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; returns the residual and the set of
    /// inserted vector ids whose sum equals `v - residual`.
    pub fn reduce(&self, v: &Bits) -> (Bits, Vec<usize>) {
        let mut res = v.clone();
        let mut combo: Vec<usize> = Vec::new();
        for row in &self.rows {
            if res.get(row.pivot) {
                res.xor_assign(&row.bits);
                combo = symmetric_difference(&combo, &row.combo);
            }
        }
        (res, combo)
    }

    /// Inserts `v`, returning `true` if it was independent of the basis.
    /// Every call gets the next id (0, 1, 2, ...), independent or not.
    pub fn insert(&mut self, v: &Bits) -> bool {
        assert_eq!(v.len(), self.len);
        let id = self.inserted;
        self.inserted += 1;
        let (res, mut combo) = self.reduce(v);
        match res.first_one() {
            None => false,
            Some(pivot) => {
                combo = symmetric_difference(&combo, &[id]);
                self.rows.push(BasisRow {
                    pivot,
                    bits: res,
                    combo,
                });
                true
            }
        }
    }

    pub fn contains(&self, v: &Bits) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// If `v` lies in the span, the inserted ids summing to it.
    pub fn solve(&self, v: &Bits) -> Option<Vec<usize>> {
        let (res, combo) = self.reduce(v);
        res.is_zero().then_some(combo)
    }
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Indices of a maximal independent subset, chosen greedily in input order.
pub fn independent_subset(rows: &[Bits]) -> Vec<usize> {
    let Some(first) = rows.first() else {
        return Vec::new();
    };
    let mut basis = EchelonBasis::new(first.len());
    rows.iter()
        .enumerate()
        .filter_map(|(i, r)| basis.insert(r).then_some(i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    // Oracle: the rank is log2 of the size of the enumerated row span.
    fn brute_force_rank(cols: usize, rows: &[Vec<bool>]) -> usize {
        let to_u32 = |r: &Vec<bool>| {
            r.iter()
                .enumerate()
                .fold(0u32, |acc, (i, &b)| acc | ((b as u32) << i))
        };
        let mut span: HashSet<u32> = HashSet::from([0]);
        for r in rows {
            let v = to_u32(r);
            let next: Vec<u32> = span.iter().map(|s| s ^ v).collect();
            span.extend(next);
        }
        assert!(cols <= 12);
        span.len().trailing_zeros() as usize
    }

    fn matrix(cols: usize, rows: &[Vec<bool>]) -> BitMatrix {
        BitMatrix::from_rows(cols, rows.iter().map(|r| Bits::from_bools(r)).collect()).unwrap()
    }

    #[test]
    fn identity_rank() {
        let rows: Vec<Vec<bool>> = (0..9).map(|i| (0..9).map(|j| i == j).collect()).collect();
        assert_eq!(rank_gf2(&matrix(9, &rows)), 9);
    }

    #[test]
    fn duplicate_rows_rank_one() {
        let r = vec![true, false, true, true];
        assert_eq!(rank_gf2(&matrix(4, &[r.clone(), r])), 1);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        assert!(BitMatrix::from_rows(3, vec![Bits::zeros(4)]).is_err());
    }

    #[test]
    fn reduced_form_clears_pivot_columns() {
        let rows = vec![
            vec![true, true, false, true],
            vec![false, true, true, false],
            vec![true, false, true, true],
        ];
        let mut m = matrix(4, &rows);
        let piv = m.row_reduce();
        assert_eq!(piv, vec![0, 1]);
        for (k, &c) in piv.iter().enumerate() {
            for (i, row) in m.rows().iter().enumerate() {
                assert_eq!(row.get(c), i == k);
            }
        }
    }

    #[test]
    fn echelon_solve_recovers_combination() {
        let rows: Vec<Bits> = [[1, 2], [2, 3], [0, 3]]
            .iter()
            .map(|r| Bits::from_indices(5, r.iter().copied()))
            .collect();
        let mut b = EchelonBasis::new(5);
        for r in &rows {
            b.insert(r);
        }
        let target = Bits::from_indices(5, [1, 3]);
        let combo = b.solve(&target).unwrap();
        let mut acc = Bits::zeros(5);
        for i in combo {
            acc.xor_assign(&rows[i]);
        }
        assert_eq!(acc, target);
        assert!(b.solve(&Bits::from_indices(5, [4])).is_none());
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let rows = vec![
            vec![true, true, false, true, false],
            vec![false, true, true, false, false],
        ];
        let m = matrix(5, &rows);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 3);
        for v in &ns {
            for r in m.rows() {
                assert!(!r.dot(v));
            }
        }
        let mut b = EchelonBasis::new(5);
        assert!(ns.iter().all(|v| b.insert(v)));
    }

    proptest! {
        #[test]
        fn rank_matches_span_enumeration(
            cols in 1usize..=12,
            rows in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 12), 0..14)
        ) {
            let rows: Vec<Vec<bool>> = rows.into_iter().map(|mut r| { r.truncate(cols); r }).collect();
            let m = matrix(cols, &rows);
            let expected = brute_force_rank(cols, &rows);
            prop_assert_eq!(m.rank(), expected);
            prop_assert_eq!(independent_subset(m.rows()).len(), expected);
            let mut shuffled = rows.clone();
            shuffled.reverse();
            prop_assert_eq!(matrix(cols, &shuffled).rank(), expected);
        }
    }
}
