//! Exact dense linear algebra over the Gaussian rationals: reduced row
//! echelon form, nullspace bases, and determinants. Sizes here are tiny
//! (tens of rows), so plain Gauss-Jordan over the field is enough.

use crate::gauss::Gq;

/// Dense matrix over Q(i), row major.
#[derive(Clone, Debug, PartialEq)]
pub struct QiMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Gq>,
}

impl QiMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Gq::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Gq>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn at(&self, r: usize, c: usize) -> &Gq {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Gq) {
        self.data[r * self.cols + c] = v;
    }

    /// In-place reduced row echelon form; returns pivot column indices.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = self.at(row, col).inv();
            for c in col..self.cols {
                let v = self.at(row, c) * &inv;
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r != row && !self.at(r, col).is_zero() {
                    let f = self.at(r, col).clone();
                    for c in col..self.cols {
                        let v = self.at(r, c) - &(&f * self.at(row, c));
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Basis of the right nullspace, exact.
    pub fn nullspace(&self) -> Vec<Vec<Gq>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![Gq::zero(); self.cols];
            v[f] = Gq::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m.at(r, f);
            }
            basis.push(v);
        }
        basis
    }

    /// Determinant of a square matrix, exact.
    pub fn det(&self) -> Gq {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Gq::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.at(r, col).is_zero()) else {
                return Gq::zero();
            };
            if p != col {
                m.swap_rows(col, p);
                det = -&det;
            }
            let pivot = m.at(col, col).clone();
            det = &det * &pivot;
            let inv = pivot.inv();
            for r in col + 1..n {
                if m.at(r, col).is_zero() {
                    continue;
                }
                let f = m.at(r, col) * &inv;
                for c in col..n {
                    let v = m.at(r, c) - &(&f * m.at(col, c));
                    m.set(r, c, v);
                }
            }
        }
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> Gq {
        Gq::from_int(n)
    }

    #[test]
    fn nullspace_of_rank_one() {
        // [1 2 3] has a 2-dimensional nullspace.
        let m = QiMatrix::from_rows(vec![vec![g(1), g(2), g(3)]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let dot = &(&v[0] + &(&g(2) * &v[1])) + &(&g(3) * &v[2]);
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn det_with_imaginary_entries() {
        // det [[i, 1], [1, i]] = i*i - 1 = -2
        let m = QiMatrix::from_rows(vec![vec![Gq::i(), g(1)], vec![g(1), Gq::i()]]);
        assert_eq!(m.det(), g(-2));
    }

    #[test]
    fn full_rank_nullspace_empty() {
        let m = QiMatrix::from_rows(vec![vec![g(1), g(0)], vec![g(0), g(1)]]);
        assert!(m.nullspace().is_empty());
    }
}
