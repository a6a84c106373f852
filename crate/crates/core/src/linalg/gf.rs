//! Dense matrices over a prime field: the randomized fast path for ranks,
//! kernels and solves. Everything is deterministic for a fixed modulus.

use crate::arith::{GfPrime, Rational};

/// Dense row-major matrix over GF(p).
#[derive(Debug, Clone)]
pub struct GfMatrix {
    pub field: GfPrime,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl GfMatrix {
    pub fn zero(field: GfPrime, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(field: GfPrime, rows: Vec<Vec<u64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            debug_assert_eq!(row.len(), c);
            data.extend(row);
        }
        Self {
            field,
            rows: r,
            cols: c,
            data,
        }
    }

    /// Reduce a rational matrix mod p; `None` when a denominator vanishes.
    pub fn from_rational_rows(field: GfPrime, rows: &[Vec<Rational>]) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            for x in row {
                data.push(field.from_rational(x)?);
            }
        }
        Some(Self {
            field,
            rows: r,
            cols: c,
            data,
        })
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let c = self.cols;
        let (lo, hi) = (a.min(b), a.max(b));
        let (head, tail) = self.data.split_at_mut(hi * c);
        head[lo * c..lo * c + c].swap_with_slice(&mut tail[..c]);
    }

    fn scale_row(&mut self, i: usize, s: u64) {
        let f = self.field;
        for x in self.row_mut(i) {
            *x = f.mul(*x, s);
        }
    }

    /// rows[i] -= c * rows[src], from column `from` on.
    fn eliminate(&mut self, i: usize, src: usize, c: u64, from: usize) {
        if c == 0 {
            return;
        }
        let f = self.field;
        let m = f.neg(c);
        let cols = self.cols;
        let (src_off, dst_off) = (src * cols, i * cols);
        // disjoint row views
        let (a, b) = if src < i {
            let (h, t) = self.data.split_at_mut(dst_off);
            (&h[src_off + from..src_off + cols], &mut t[from..cols])
        } else {
            let (h, t) = self.data.split_at_mut(src_off);
            (&t[from..cols], &mut h[dst_off + from..dst_off + cols])
        };
        for (y, x) in b.iter_mut().zip(a) {
            *y = f.reduce(*y + m * *x);
        }
    }

    /// In-place row echelon form (pivot rows normalized to leading 1,
    /// elimination below only). Returns the pivot columns in order.
    pub fn echelonize(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.data[i * self.cols + col] != 0) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self
                .field
                .inv(self.data[r * self.cols + col])
                .expect("pivot nonzero");
            self.scale_row(r, inv);
            for i in r + 1..self.rows {
                let c = self.data[i * self.cols + col];
                self.eliminate(i, r, c, col);
            }
            pivots.push(col);
            r += 1;
        }
        pivots
    }

    /// Full reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let pivots = self.echelonize();
        for (r, &col) in pivots.iter().enumerate().rev() {
            for i in 0..r {
                let c = self.data[i * self.cols + col];
                self.eliminate(i, r, c, col);
            }
        }
        pivots
    }

    pub fn rank(mut self) -> usize {
        self.echelonize().len()
    }

    /// Canonical basis of the right kernel, one row per free column, in
    /// reduced echelon form with respect to the free columns.
    pub fn kernel(mut self) -> Vec<Vec<u64>> {
        let pivots = self.rref();
        let f = self.field;
        let mut is_pivot = vec![usize::MAX; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            is_pivot[c] = r;
        }
        let mut out = Vec::with_capacity(self.cols - pivots.len());
        for free in 0..self.cols {
            if is_pivot[free] != usize::MAX {
                continue;
            }
            let mut v = vec![0u64; self.cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(self.data[r * self.cols + free]);
            }
            out.push(v);
        }
        out
    }

    /// Ranks of the matrix and of the matrix augmented with `rhs` columns,
    /// plus the canonical particular solution when consistent. Pivoting scans
    /// columns in the order given by `order` (identity order = echelon
    /// convention; a reversed order realizes an independent splitting choice).
    pub fn solve_multi(
        &self,
        rhs: &[Vec<u64>],
        order: &[usize],
    ) -> Option<Vec<Vec<u64>>> {
        debug_assert_eq!(order.len(), self.cols);
        let f = self.field;
        let k = rhs.len();
        let aug_cols = self.cols + k;
        let mut aug = GfMatrix::zero(f, self.rows, aug_cols);
        for i in 0..self.rows {
            for (jj, &j) in order.iter().enumerate() {
                aug.data[i * aug_cols + jj] = self.data[i * self.cols + j];
            }
            for (b, rhs_col) in rhs.iter().enumerate() {
                aug.data[i * aug_cols + self.cols + b] = rhs_col[i];
            }
        }
        // eliminate only on the first self.cols columns
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..self.cols {
            if r == aug.rows {
                break;
            }
            let Some(p) = (r..aug.rows).find(|&i| aug.data[i * aug_cols + col] != 0) else {
                continue;
            };
            aug.swap_rows(r, p);
            let inv = f.inv(aug.data[r * aug_cols + col]).expect("pivot");
            aug.scale_row(r, inv);
            for i in 0..aug.rows {
                if i != r {
                    let c = aug.data[i * aug_cols + col];
                    aug.eliminate(i, r, c, col);
                }
            }
            pivots.push(col);
            r += 1;
        }
        // consistency: no pivot may appear in the rhs block
        for i in r..aug.rows {
            if aug.data[i * aug_cols + self.cols..(i + 1) * aug_cols]
                .iter()
                .any(|&x| x != 0)
            {
                return None;
            }
        }
        let mut sols = Vec::with_capacity(k);
        for b in 0..k {
            let mut x = vec![0u64; self.cols];
            for (row, &col) in pivots.iter().enumerate() {
                x[order[col]] = aug.data[row * aug_cols + self.cols + b];
            }
            sols.push(x);
        }
        Some(sols)
    }

    /// Determinant of a square matrix.
    pub fn det(mut self) -> u64 {
        assert_eq!(self.rows, self.cols);
        let f = self.field;
        let mut det = 1u64;
        for col in 0..self.cols {
            let Some(p) = (col..self.rows).find(|&i| self.data[i * self.cols + col] != 0) else {
                return 0;
            };
            if p != col {
                self.swap_rows(col, p);
                det = f.neg(det);
            }
            let piv = self.data[col * self.cols + col];
            det = f.mul(det, piv);
            let inv = f.inv(piv).expect("pivot");
            self.scale_row(col, inv);
            for i in col + 1..self.rows {
                let c = self.data[i * self.cols + col];
                self.eliminate(i, col, c, col);
            }
        }
        det
    }
}

/// Incrementally maintained row echelon basis over GF(p), used to share a
/// common core between many rank probes of stacked spans.
#[derive(Debug, Clone)]
pub struct GfEchelon {
    pub field: GfPrime,
    pub cols: usize,
    rows: Vec<Vec<u64>>,
    pivot_row_of_col: Vec<usize>,
}

impl GfEchelon {
    pub fn new(field: GfPrime, cols: usize) -> Self {
        Self {
            field,
            cols,
            rows: Vec::new(),
            pivot_row_of_col: vec![usize::MAX; cols],
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Forward-reduce `row` against the basis in place.
    pub fn reduce(&self, row: &mut [u64]) {
        let f = self.field;
        for j in 0..self.cols {
            let c = row[j];
            if c == 0 {
                continue;
            }
            let r = self.pivot_row_of_col[j];
            if r == usize::MAX {
                continue;
            }
            let m = f.neg(c);
            let src = &self.rows[r];
            for (y, x) in row[j..].iter_mut().zip(&src[j..]) {
                *y = f.reduce(*y + m * *x);
            }
        }
    }

    /// Reduce and insert; returns true when the row added a new pivot.
    pub fn insert(&mut self, mut row: Vec<u64>) -> bool {
        self.reduce(&mut row);
        let Some(j) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self.field.inv(row[j]).expect("pivot nonzero");
        for x in &mut row[j..] {
            *x = self.field.mul(*x, inv);
        }
        self.pivot_row_of_col[j] = self.rows.len();
        self.rows.push(row);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::certification_field;

    fn f() -> GfPrime {
        certification_field(0)
    }

    #[test]
    fn rank_identity_and_zero() {
        let id = GfMatrix::from_rows(
            f(),
            (0..3)
                .map(|i| (0..3).map(|j| u64::from(i == j)).collect())
                .collect(),
        );
        assert_eq!(id.rank(), 3);
        assert_eq!(GfMatrix::zero(f(), 4, 5).rank(), 0);
    }

    #[test]
    fn kernel_of_ones_row() {
        let m = GfMatrix::from_rows(f(), vec![vec![1, 1]]);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        // spans (1, -1)
        let fld = f();
        assert_eq!(k[0][1], 1);
        assert_eq!(k[0][0], fld.neg(1));
    }

    #[test]
    fn solve_consistency() {
        let fld = f();
        let m = GfMatrix::from_rows(fld, vec![vec![1, 2, 3], vec![0, 1, 1]]);
        let order: Vec<usize> = (0..3).collect();
        let sols = m.solve_multi(&[vec![6, 2]], &order).unwrap();
        // check A x = b
        let x = &sols[0];
        let e0 = fld.reduce(fld.reduce(x[0] + 2 * x[1]) + 3 * x[2]);
        let e1 = fld.reduce(x[1] + x[2]);
        assert_eq!((e0, e1), (6, 2));
        // inconsistent system
        let m2 = GfMatrix::from_rows(fld, vec![vec![1, 0], vec![1, 0]]);
        assert!(m2.solve_multi(&[vec![1, 2]], &[0, 1]).is_none());
    }

    #[test]
    fn echelon_incremental_matches_batch() {
        let fld = f();
        let rows = vec![
            vec![1u64, 2, 3, 4],
            vec![2, 4, 6, 8],
            vec![0, 1, 1, 0],
            vec![1, 3, 4, 4],
        ];
        let batch = GfMatrix::from_rows(fld, rows.clone()).rank();
        let mut ech = GfEchelon::new(fld, 4);
        let mut n = 0;
        for r in rows {
            if ech.insert(r) {
                n += 1;
            }
        }
        assert_eq!(batch, n);
        assert_eq!(ech.rank(), batch);
    }
}
