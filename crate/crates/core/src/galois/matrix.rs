use super::{BitVector, GaloisError};

/// Dense bit matrix with row operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: Vec<BitVector>,
    width: usize,
    rank: Option<usize>,
}

impl Gf2Matrix {
    pub fn new(width: usize) -> Self {
        Gf2Matrix {
            rows: Vec::new(),
            width,
            rank: None,
        }
    }

    pub fn from_rows(width: usize, rows: Vec<BitVector>) -> Result<Self, GaloisError> {
        if let Some(bad) = rows.iter().find(|r| r.len() != width) {
            return Err(GaloisError::WidthMismatch {
                expected: width,
                got: bad.len(),
            });
        }
        Ok(Gf2Matrix {
            rows,
            width,
            rank: None,
        })
    }

    pub fn push_row(&mut self, row: BitVector) -> Result<(), GaloisError> {
        if row.len() != self.width {
            return Err(GaloisError::WidthMismatch {
                expected: self.width,
                got: row.len(),
            });
        }
        self.rows.push(row);
        self.rank = None;
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    /// Rank cached by the last [`Gf2Matrix::eliminate`], if still valid.
    pub fn cached_rank(&self) -> Option<usize> {
        self.rank
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        self.rows.swap(a, b);
    }

    /// `rows[dst] ^= rows[src]`.
    pub fn xor_rows(&mut self, dst: usize, src: usize) {
        assert_ne!(dst, src, "xor of a row into itself");
        let (lo, hi) = self.rows.split_at_mut(dst.max(src));
        if dst < src {
            lo[dst].xor_assign(&hi[0]);
        } else {
            hi[0].xor_assign(&lo[src]);
        }
        self.rank = None;
    }

    /// Reduces in place to reduced row echelon form and returns the rank.
    /// Nonzero rows come first with strictly increasing pivot columns.
    pub fn eliminate(&mut self) -> usize {
        let mut rank = 0;
        for col in 0..self.width {
            let Some(p) = (rank..self.rows.len()).find(|&r| self.rows[r].get(col)) else {
                continue;
            };
            self.rows.swap(rank, p);
            for r in 0..self.rows.len() {
                if r != rank && self.rows[r].get(col) {
                    self.xor_rows(r, rank);
                }
            }
            rank += 1;
        }
        self.rank = Some(rank);
        rank
    }

    /// Rank without modifying `self`.
    pub fn rank(&self) -> usize {
        if let Some(r) = self.rank {
            return r;
        }
        self.clone().eliminate()
    }

    /// Pivot column of each nonzero row; only meaningful after [`Gf2Matrix::eliminate`].
    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().filter_map(|r| r.first_one()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_full_rank() {
        let rows = (0..5).map(|i| BitVector::unit(5, i)).collect();
        let m = Gf2Matrix::from_rows(5, rows).unwrap();
        assert_eq!(m.rank(), 5);
    }

    #[test]
    fn dependent_rows_reduce_rank() {
        let a = BitVector::from_bools(&[true, true, false]);
        let b = BitVector::from_bools(&[false, true, true]);
        let mut c = a.clone();
        c.xor_assign(&b);
        let mut m = Gf2Matrix::from_rows(3, vec![a, b, c]).unwrap();
        assert_eq!(m.eliminate(), 2);
        assert_eq!(m.cached_rank(), Some(2));
        assert_eq!(m.pivots(), vec![0, 1]);
        assert!(m.row(2).is_zero());
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = Gf2Matrix::from_rows(4, vec![BitVector::zeros(3)]).unwrap_err();
        assert_eq!(err, GaloisError::WidthMismatch { expected: 4, got: 3 });
    }
}
