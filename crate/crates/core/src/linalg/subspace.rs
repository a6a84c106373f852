//! Rational matrices and subspaces with canonical (reduced row echelon)
//! bases, so subspace equality is decidable by basis comparison.
//!
//! Echelon bases are produced multimodularly; a `Verify::Exact` request adds
//! an unconditional certificate (every input row re-reduces to zero against
//! the reconstructed basis with exact arithmetic, while the modular rank
//! bounds the dimension from below).

use crate::arith::{certification_field, Rational};
use crate::linalg::exact::{bareiss_rank, primitive_integer_row};
use crate::linalg::gf::GfMatrix;
use crate::linalg::modular::{
    reconstruct_rationals, ModularImage, ReconstructError, ReconstructOptions,
};
use num_traits::Zero;

/// Errors from matrix and subspace operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("ambient dimensions differ: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("multimodular reconstruction failed: {0}")]
    Reconstruction(#[from] ReconstructError),
    #[error("exact verification failed in {0}")]
    VerificationFailed(&'static str),
    #[error("inconsistent linear system")]
    Inconsistent,
}

/// How a reconstructed object is checked before it is returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verify {
    /// Held-out-prime agreement only (already part of reconstruction).
    HeldOutPrimes,
    /// Additional unconditional certificate via exact arithmetic.
    Exact,
}

/// Dense rational matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: Vec<Vec<Rational>>,
    pub cols: usize,
}

impl Matrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        Self { rows, cols }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// Exact rank: modular fast path when it meets the dimension cap
    /// (a modular rank never exceeds the rational one), exact fraction-free
    /// elimination otherwise.
    pub fn rank(&self) -> usize {
        let cap = self.nrows().min(self.cols);
        if cap == 0 {
            return 0;
        }
        for idx in 0..3 {
            let field = certification_field(idx);
            if let Some(m) = GfMatrix::from_rational_rows(field, &self.rows) {
                if m.rank() == cap {
                    return cap;
                }
                break;
            }
        }
        bareiss_rank(self.rows.iter().map(|r| primitive_integer_row(r)).collect())
    }

    /// Canonical basis of the right kernel as a [`Subspace`].
    pub fn kernel(&self, verify: Verify) -> Result<Subspace, LinalgError> {
        let (_, basis) = kernel_rational(&self.rows, self.cols)?;
        let sub = Subspace::from_rref(self.cols, basis);
        if verify == Verify::Exact {
            for v in &sub.basis {
                for row in &self.rows {
                    let dot: Rational = row.iter().zip(v).map(|(a, b)| a * b).sum();
                    if !dot.is_zero() {
                        return Err(LinalgError::VerificationFailed("kernel"));
                    }
                }
            }
            // dimension certificate: modular rank caps the kernel from above
            let (rank_p, _) = best_modular_rank(&self.rows);
            if self.cols - rank_p != sub.dim() {
                return Err(LinalgError::VerificationFailed("kernel dimension"));
            }
        }
        Ok(sub)
    }

    /// Canonical particular solution of `self * x = b`, or a certificate of
    /// inconsistency (`Err(Inconsistent)`) when the augmented rank exceeds
    /// the exact column rank.
    pub fn solve(&self, b: &[Rational], verify: Verify) -> Result<Vec<Rational>, LinalgError> {
        assert_eq!(b.len(), self.nrows());
        let order: Vec<usize> = (0..self.cols).collect();
        let imager = |fld| {
            let m = GfMatrix::from_rational_rows(fld, &self.rows)?;
            let rhs: Option<Vec<u64>> = b.iter().map(|x| fld.from_rational(x)).collect();
            let rhs = rhs?;
            match m.solve_multi(&[rhs], &order) {
                Some(sols) => Some(ModularImage {
                    signature: vec![1],
                    entries: sols.into_iter().next().expect("one rhs"),
                }),
                None => Some(ModularImage {
                    signature: vec![0],
                    entries: vec![],
                }),
            }
        };
        let (sig, sol) = reconstruct_rationals(imager, ReconstructOptions::default())?;
        if sig == vec![0] {
            return Err(LinalgError::Inconsistent);
        }
        if verify == Verify::Exact {
            for (row, bi) in self.rows.iter().zip(b) {
                let dot: Rational = row.iter().zip(&sol).map(|(a, x)| a * x).sum();
                if &dot != bi {
                    return Err(LinalgError::VerificationFailed("solve"));
                }
            }
        }
        Ok(sol)
    }
}

fn best_modular_rank(rows: &[Vec<Rational>]) -> (usize, usize) {
    let mut best = 0;
    let mut at = 0;
    for idx in 0..3 {
        let field = certification_field(idx);
        if let Some(m) = GfMatrix::from_rational_rows(field, rows) {
            let r = m.rank();
            if r > best {
                best = r;
                at = idx;
            }
        }
    }
    (best, at)
}

/// Multimodular reduced row echelon basis of the row span.
pub fn rref_rational(
    rows: &[Vec<Rational>],
    cols: usize,
) -> Result<(Vec<usize>, Vec<Vec<Rational>>), LinalgError> {
    if rows.is_empty() {
        return Ok((vec![], vec![]));
    }
    let imager = |fld| {
        let mut m = GfMatrix::from_rational_rows(fld, rows)?;
        let pivots = m.rref();
        let rank = pivots.len();
        let mut signature = Vec::with_capacity(rank + 1);
        signature.push(rank);
        signature.extend(&pivots);
        let mut entries = Vec::new();
        let mut is_pivot = vec![false; cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        for r in 0..rank {
            for c in 0..cols {
                if !is_pivot[c] && c > pivots[r] {
                    entries.push(m.row(r)[c]);
                }
            }
        }
        Some(ModularImage { signature, entries })
    };
    let (sig, flat) = reconstruct_rationals(imager, ReconstructOptions::default())?;
    let rank = sig[0];
    let pivots: Vec<usize> = sig[1..=rank].to_vec();
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = vec![vec![Rational::zero(); cols]; rank];
    let mut it = flat.into_iter();
    for r in 0..rank {
        basis[r][pivots[r]] = Rational::from_integer(1.into());
        for c in 0..cols {
            if !is_pivot[c] && c > pivots[r] {
                basis[r][c] = it.next().expect("entry count matches signature");
            }
        }
    }
    Ok((pivots, basis))
}

/// Multimodular canonical kernel basis.
pub fn kernel_rational(
    rows: &[Vec<Rational>],
    cols: usize,
) -> Result<(Vec<usize>, Vec<Vec<Rational>>), LinalgError> {
    if rows.is_empty() {
        let id = (0..cols)
            .map(|i| {
                let mut v = vec![Rational::zero(); cols];
                v[i] = Rational::from_integer(1.into());
                v
            })
            .collect();
        return Ok(((0..cols).collect(), id));
    }
    let imager = |fld| {
        let m = GfMatrix::from_rational_rows(fld, rows)?;
        let ker = m.kernel();
        // canonicalize to a reduced echelon basis of the kernel
        let mut km = GfMatrix::from_rows(fld, ker);
        let pivots = km.rref();
        let mut signature = vec![pivots.len()];
        signature.extend(&pivots);
        let mut entries = Vec::new();
        for r in 0..pivots.len() {
            entries.extend_from_slice(km.row(r));
        }
        Some(ModularImage { signature, entries })
    };
    let (sig, flat) = reconstruct_rationals(imager, ReconstructOptions::default())?;
    let dim = sig[0];
    let leads = sig[1..=dim].to_vec();
    let basis = flat
        .chunks(cols)
        .map(|c| c.to_vec())
        .collect::<Vec<_>>();
    debug_assert_eq!(basis.len(), dim);
    Ok((leads, basis))
}

/// A linear subspace of a coordinate space, held as a canonical reduced
/// echelon basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient: usize,
    pivots: Vec<usize>,
    basis: Vec<Vec<Rational>>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            pivots: vec![],
            basis: vec![],
        }
    }

    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![Rational::zero(); ambient];
                v[i] = Rational::from_integer(1.into());
                v
            })
            .collect();
        Self {
            ambient,
            pivots: (0..ambient).collect(),
            basis,
        }
    }

    /// Echelonize a spanning set.
    pub fn from_rows(ambient: usize, rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let (pivots, basis) = rref_rational(&rows, ambient)?;
        Ok(Self {
            ambient,
            pivots,
            basis,
        })
    }

    /// Wrap rows already known to be a reduced echelon basis.
    pub fn from_rref(ambient: usize, basis: Vec<Vec<Rational>>) -> Self {
        let pivots = basis
            .iter()
            .map(|r| r.iter().position(|x| !x.is_zero()).expect("nonzero row"))
            .collect();
        Self {
            ambient,
            pivots,
            basis,
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.dim()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Exact reduction of a vector against the basis; the remainder is zero
    /// iff the vector lies in the subspace.
    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.ambient);
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let c = w[p].clone();
            for (wi, ri) in w.iter_mut().zip(row) {
                if !ri.is_zero() {
                    *wi -= &c * ri;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    pub fn sum(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_ambient(other)?;
        let mut rows = self.basis.clone();
        rows.extend(other.basis.clone());
        Self::from_rows(self.ambient, rows)
    }

    /// Zassenhaus intersection.
    pub fn intersect(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_ambient(other)?;
        let n = self.ambient;
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Self::zero(n));
        }
        let u = &self.basis;
        let v = &other.basis;
        let imager = |fld: crate::arith::GfPrime| {
            let to_mod = |rows: &[Vec<Rational>]| -> Option<Vec<Vec<u64>>> {
                rows.iter()
                    .map(|r| r.iter().map(|x| fld.from_rational(x)).collect())
                    .collect()
            };
            let um = to_mod(u)?;
            let vm = to_mod(v)?;
            let mut rows = Vec::with_capacity(um.len() + vm.len());
            for r in um {
                let mut d = r.clone();
                d.extend(r);
                rows.push(d);
            }
            for r in vm {
                let mut d = r;
                d.extend(std::iter::repeat(0).take(n));
                rows.push(d);
            }
            let mut m = GfMatrix::from_rows(fld, rows);
            let pivots = m.rref();
            // rows whose pivot lies in the right half span the intersection
            let mut inter = Vec::new();
            for (r, &p) in pivots.iter().enumerate() {
                if p >= n {
                    inter.push(m.row(r)[n..].to_vec());
                }
            }
            let mut im = GfMatrix::from_rows(fld, inter);
            let ipiv = im.rref();
            let rank = ipiv.len();
            let mut signature = vec![rank];
            signature.extend(&ipiv);
            let mut entries = Vec::new();
            for r in 0..rank {
                entries.extend_from_slice(im.row(r));
            }
            Some(ModularImage { signature, entries })
        };
        let (sig, flat) = reconstruct_rationals(imager, ReconstructOptions::default())?;
        let dim = sig[0];
        let basis: Vec<Vec<Rational>> = flat.chunks(n).map(|c| c.to_vec()).collect();
        debug_assert_eq!(basis.len(), dim);
        Ok(Self::from_rref(n, basis))
    }

    fn check_ambient(&self, other: &Self) -> Result<(), LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::AmbientMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| rat_int(x)).collect()
    }

    #[test]
    fn matrix_rank_examples() {
        let id = Matrix::new(vec![v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])]);
        assert_eq!(id.rank(), 3);
        let zero = Matrix::new(vec![v(&[0, 0]), v(&[0, 0])]);
        assert_eq!(zero.rank(), 0);
    }

    #[test]
    fn kernel_examples() {
        let id = Matrix::new(vec![v(&[1, 0]), v(&[0, 1])]);
        assert_eq!(id.kernel(Verify::Exact).unwrap().dim(), 0);
        let row = Matrix::new(vec![v(&[1, 1])]);
        let k = row.kernel(Verify::Exact).unwrap();
        assert_eq!(k.dim(), 1);
        assert!(k.contains(&[rat_int(1), rat_int(-1)]));
    }

    #[test]
    fn subspace_dimension_formula() {
        // complementary coordinate planes in C^4
        let u = Subspace::from_rows(4, vec![v(&[1, 0, 0, 0]), v(&[0, 1, 0, 0])]).unwrap();
        let w = Subspace::from_rows(4, vec![v(&[0, 0, 1, 0]), v(&[0, 0, 0, 1])]).unwrap();
        assert_eq!(u.sum(&w).unwrap().dim(), 4);
        assert_eq!(u.intersect(&w).unwrap().dim(), 0);
        // u = v case
        assert_eq!(u.sum(&u).unwrap(), u);
        assert_eq!(u.intersect(&u).unwrap(), u);
    }

    #[test]
    fn intersect_generic() {
        let u = Subspace::from_rows(3, vec![v(&[1, 0, 1]), v(&[0, 1, 1])]).unwrap();
        let w = Subspace::from_rows(3, vec![v(&[1, 1, 2]), v(&[1, -1, 0])]).unwrap();
        let i = u.intersect(&w).unwrap();
        assert_eq!(i.dim(), 2 + 2 - u.sum(&w).unwrap().dim());
        for b in i.basis() {
            assert!(u.contains(b));
            assert!(w.contains(b));
        }
    }

    #[test]
    fn solve_and_inconsistency() {
        let m = Matrix::new(vec![v(&[2, 0]), v(&[0, 4])]);
        let x = m.solve(&[rat_int(1), rat_int(1)], Verify::Exact).unwrap();
        assert_eq!(x, vec![rat(1, 2), rat(1, 4)]);
        let bad = Matrix::new(vec![v(&[1, 0]), v(&[1, 0])]);
        assert_eq!(
            bad.solve(&[rat_int(0), rat_int(1)], Verify::Exact),
            Err(LinalgError::Inconsistent)
        );
    }

    #[test]
    fn ambient_mismatch_is_reported() {
        let u = Subspace::zero(3);
        let w = Subspace::zero(4);
        assert!(matches!(
            u.sum(&w),
            Err(LinalgError::AmbientMismatch { left: 3, right: 4 })
        ));
    }
}
