use std::collections::BTreeMap;

use super::{BitVector, GaloisError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertOutcome {
    RankIncreased,
    Redundant,
}

/// Incremental Gauss-Jordan eliminator over GF(2) with payloads attached to rows.
///
/// The basis is kept in reduced row echelon form: every pivot column is set
/// in exactly one row. Unknown `i` is solved once its pivot row is the unit
/// vector `e_i`, and from then on that row never changes.
///
/// The number of unknowns may grow between inserts. Existing rows are then
/// read as zero-padded on the right.
#[derive(Clone, Debug)]
pub struct Eliminator {
    dimension: usize,
    payload_len: usize,
    rows: Vec<BitVector>,
    payloads: Vec<Vec<u8>>,
    row_of_pivot: Vec<Option<usize>>,
    pivot_mask: BitVector,
    solved: BitVector,
    solved_count: usize,
    newly_solved: Vec<usize>,
}

impl Eliminator {
    pub fn new(dimension: usize, payload_len: usize) -> Self {
        Eliminator {
            dimension,
            payload_len,
            rows: Vec::new(),
            payloads: Vec::new(),
            row_of_pivot: vec![None; dimension],
            pivot_mask: BitVector::zeros(dimension),
            solved: BitVector::zeros(dimension),
            solved_count: 0,
            newly_solved: Vec::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn payload_len(&self) -> usize {
        self.payload_len
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Raises the unknown count; a smaller value is a no-op.
    pub fn grow(&mut self, dimension: usize) {
        if dimension <= self.dimension {
            return;
        }
        self.dimension = dimension;
        self.row_of_pivot.resize(dimension, None);
        self.pivot_mask.resize(dimension);
        self.solved.resize(dimension);
    }

    /// Reduces `combo` against the basis and keeps the remainder if nonzero.
    ///
    /// `combo` may be shorter than the current dimension, never longer.
    pub fn insert(&mut self, combo: &BitVector, payload: &[u8]) -> Result<InsertOutcome, GaloisError> {
        if combo.len() > self.dimension {
            return Err(GaloisError::WidthExceedsDimension {
                width: combo.len(),
                dimension: self.dimension,
            });
        }
        if payload.len() != self.payload_len {
            return Err(GaloisError::PayloadLength {
                expected: self.payload_len,
                got: payload.len(),
            });
        }

        // Pivot bits of `combo` pick the basis rows to subtract. In RREF no
        // row touches another row's pivot, so the subtraction order is free.
        let used: Vec<usize> = combo
            .words()
            .iter()
            .zip(self.pivot_mask.words())
            .enumerate()
            .flat_map(|(wi, (&c, &m))| {
                let mut rest = c & m;
                std::iter::from_fn(move || {
                    if rest == 0 {
                        return None;
                    }
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * 64 + b)
                })
            })
            .map(|col| self.row_of_pivot[col].expect("pivot mask out of sync"))
            .collect();

        let mut v = combo.clone();
        v.resize(self.dimension);
        for &r in &used {
            v.xor_assign(&self.rows[r]);
        }
        let Some(pivot) = v.first_one() else {
            return Ok(InsertOutcome::Redundant);
        };

        let mut p = payload.to_vec();
        for &r in &used {
            xor_bytes(&mut p, &self.payloads[r]);
        }

        let mut touched = Vec::new();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if pivot < row.len() && row.get(pivot) {
                row.resize(self.dimension);
                row.xor_assign(&v);
                xor_bytes(&mut self.payloads[i], &p);
                touched.push(i);
            }
        }

        let new_index = self.rows.len();
        self.rows.push(v);
        self.payloads.push(p);
        self.row_of_pivot[pivot] = Some(new_index);
        self.pivot_mask.set(pivot, true);
        touched.push(new_index);

        for i in touched {
            if self.rows[i].count_ones() == 1 {
                let col = self.rows[i].first_one().unwrap();
                if !self.solved.get(col) {
                    self.solved.set(col, true);
                    self.solved_count += 1;
                    self.newly_solved.push(col);
                }
            }
        }
        Ok(InsertOutcome::RankIncreased)
    }

    pub fn is_solved(&self, unknown: usize) -> bool {
        unknown < self.dimension && self.solved.get(unknown)
    }

    pub fn solved_count(&self) -> usize {
        self.solved_count
    }

    /// Unknowns solved since the previous call, in the order they were solved.
    pub fn drain_newly_solved(&mut self) -> Vec<usize> {
        std::mem::take(&mut self.newly_solved)
    }

    /// Payload of a solved unknown.
    pub fn solution(&self, unknown: usize) -> Option<&[u8]> {
        if !self.is_solved(unknown) {
            return None;
        }
        let r = self.row_of_pivot[unknown]?;
        Some(&self.payloads[r])
    }

    /// Every unknown whose unit vector lies in the row space, with its payload.
    pub fn solve(&self) -> BTreeMap<usize, Vec<u8>> {
        self.solved
            .iter_ones()
            .map(|col| (col, self.payloads[self.row_of_pivot[col].unwrap()].clone()))
            .collect()
    }

    /// Current basis rows, zero-padded to the dimension.
    pub fn basis(&self) -> Vec<BitVector> {
        self.rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.resize(self.dimension);
                r
            })
            .collect()
    }
}

#[inline]
pub(crate) fn xor_bytes(dst: &mut [u8], src: &[u8]) {
    debug_assert_eq!(dst.len(), src.len());
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_vector_is_redundant() {
        let mut e = Eliminator::new(4, 0);
        assert_eq!(e.insert(&BitVector::zeros(4), &[]).unwrap(), InsertOutcome::Redundant);
        assert_eq!(e.rank(), 0);
        assert!(e.solve().is_empty());
    }

    #[test]
    fn unit_vectors_reach_full_rank() {
        let mut e = Eliminator::new(6, 1);
        for i in 0..6 {
            let out = e.insert(&BitVector::unit(6, i), &[i as u8]).unwrap();
            assert_eq!(out, InsertOutcome::RankIncreased);
            assert_eq!(e.rank(), i + 1);
        }
        let sol = e.solve();
        assert_eq!(sol.len(), 6);
        for (i, p) in sol {
            assert_eq!(p, vec![i as u8]);
        }
    }

    #[test]
    fn reinserting_spanned_row_is_redundant() {
        let mut e = Eliminator::new(3, 0);
        let a = BitVector::from_bools(&[true, true, false]);
        let b = BitVector::from_bools(&[false, true, true]);
        let mut c = a.clone();
        c.xor_assign(&b);
        e.insert(&a, &[]).unwrap();
        e.insert(&b, &[]).unwrap();
        assert_eq!(e.insert(&c, &[]).unwrap(), InsertOutcome::Redundant);
        assert_eq!(e.insert(&a, &[]).unwrap(), InsertOutcome::Redundant);
        assert_eq!(e.rank(), 2);
    }

    #[test]
    fn oversized_combo_is_rejected() {
        let mut e = Eliminator::new(2, 0);
        let err = e.insert(&BitVector::zeros(3), &[]).unwrap_err();
        assert_eq!(err, GaloisError::WidthExceedsDimension { width: 3, dimension: 2 });
        let err = Eliminator::new(2, 4).insert(&BitVector::zeros(2), &[0; 3]).unwrap_err();
        assert_eq!(err, GaloisError::PayloadLength { expected: 4, got: 3 });
    }

    #[test]
    fn growing_dimension_keeps_old_rows() {
        let mut e = Eliminator::new(1, 1);
        e.insert(&BitVector::from_bools(&[true]), &[5]).unwrap();
        e.grow(3);
        // x0 + x2 = 7 with x0 = 5  ->  x2 = 2
        e.insert(&BitVector::from_bools(&[true, false, true]), &[7]).unwrap();
        assert_eq!(e.solution(0), Some(&[5u8][..]));
        assert_eq!(e.solution(2), Some(&[2u8][..]));
        assert!(!e.is_solved(1));
        let mut newly = e.drain_newly_solved();
        newly.sort();
        assert_eq!(newly, vec![0, 2]);
    }

    #[test]
    fn missing_unit_vector_stays_unsolved() {
        // span{e0+e1, e2} excludes e0 and e1 individually
        let mut e = Eliminator::new(3, 1);
        e.insert(&BitVector::from_bools(&[true, true, false]), &[1]).unwrap();
        e.insert(&BitVector::from_bools(&[false, false, true]), &[9]).unwrap();
        assert_eq!(e.solve().keys().copied().collect::<Vec<_>>(), vec![2]);
    }
}
