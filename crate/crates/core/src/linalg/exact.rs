//! Fraction-free (Bareiss) elimination over the integers, maximal-minor
//! enumeration, and small combinatorial helpers.
//!
//! Bareiss keeps every intermediate entry an exact k-by-k minor of the input,
//! which bounds coefficient growth; it is the rational ground truth behind
//! the modular fast paths.

use crate::arith::{certification_field, GfPrime, Integer, Rational};
use crate::linalg::gf::GfMatrix;
use num_traits::Zero;

/// Binomial coefficient as usize (small arguments only).
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Exact determinant of a square BigInt matrix (Bareiss).
pub fn bareiss_det(mut a: Vec<Vec<Integer>>) -> Integer {
    let n = a.len();
    if n == 0 {
        return Integer::from(1);
    }
    let mut sign = 1i64;
    let mut prev = Integer::from(1);
    for k in 0..n - 1 {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Integer::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
            a[i][k] = Integer::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Exact rank of a BigInt matrix (fraction-free elimination with row and
/// column pivoting).
pub fn bareiss_rank(mut a: Vec<Vec<Integer>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut prev = Integer::from(1);
    let mut r = 0;
    let mut col = 0;
    while r < rows && col < cols {
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            col += 1;
            continue;
        };
        a.swap(p, r);
        for i in r + 1..rows {
            for j in col + 1..cols {
                let t = &a[r][col] * &a[i][j] - &a[i][col] * &a[r][j];
                a[i][j] = t / &prev;
            }
            a[i][col] = Integer::zero();
        }
        prev = a[r][col].clone();
        r += 1;
        col += 1;
    }
    r
}

/// Exact rank of a rational matrix: scale rows to integers, then Bareiss.
pub fn rational_rank_exact(rows: &[Vec<Rational>]) -> usize {
    bareiss_rank(rows.iter().map(|r| primitive_integer_row(r)).collect())
}

/// Row-wise primitive integer scaling of a rational matrix.
pub fn primitive_rows(rows: &[Vec<Rational>]) -> Vec<Vec<Integer>> {
    rows.iter().map(|r| primitive_integer_row(r)).collect()
}

/// Clear denominators and divide by the content, preserving the row span.
pub fn primitive_integer_row(row: &[Rational]) -> Vec<Integer> {
    use num_integer::Integer as _;
    let mut lcm = Integer::from(1);
    for x in row {
        lcm = lcm.lcm(x.denom());
    }
    let mut out: Vec<Integer> = row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut g = Integer::zero();
    for x in &out {
        g = g.gcd(x);
    }
    if !g.is_zero() && g != Integer::from(1) {
        for x in &mut out {
            *x /= &g;
        }
    }
    out
}

/// Outcome of a maximal-minor scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorScan {
    /// Total number of maximal minors examined (or scheduled, on failure).
    pub total: usize,
    /// All minors nonzero?
    pub all_nonzero: bool,
    /// Row set of the first vanishing minor, when one exists.
    pub zero_witness: Option<Vec<usize>>,
}

/// Check that every cols-by-cols minor of an integer matrix with
/// rows >= cols is nonzero. A minor that is nonzero modulo the certification
/// prime is certified nonzero over the rationals; a vanishing modular minor
/// is recomputed exactly before it is reported. Short-circuits on the first
/// exact zero.
pub fn all_maximal_minors_nonzero(rows: &[Vec<Integer>]) -> MinorScan {
    let n = rows.len();
    let k = rows.first().map_or(0, |r| r.len());
    assert!(n >= k, "minor scan requires rows >= cols");
    let field = certification_field(0);
    let total = binomial(n, k);
    let mod_rows: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| field.from_bigint(x)).collect())
        .collect();
    for subset in combinations_vec(n, k) {
        let sub_mod: Vec<Vec<u64>> = subset.iter().map(|&i| mod_rows[i].clone()).collect();
        if GfMatrix::from_rows(field, sub_mod).det() != 0 {
            continue;
        }
        // confirm over the integers
        let sub: Vec<Vec<Integer>> = subset.iter().map(|&i| rows[i].clone()).collect();
        if bareiss_det(sub).is_zero() {
            return MinorScan {
                total,
                all_nonzero: false,
                zero_witness: Some(subset),
            };
        }
    }
    MinorScan {
        total,
        all_nonzero: true,
        zero_witness: None,
    }
}

/// All k-subsets of {0,..,n-1} in lexicographic order.
pub fn combinations_vec(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Modular rank with the spec's retry policy: the fixed certification prime
/// first; when the result is below `cap` (the structural upper bound) retry
/// with two more primes and keep the maximum. A modular rank can only
/// under-estimate the rational rank, so a value meeting `cap` is exact.
pub fn modular_rank_with_retry<F>(cap: usize, image: F) -> (usize, bool)
where
    F: Fn(GfPrime) -> Option<GfMatrix>,
{
    let mut best = 0;
    for idx in 0..3 {
        let field = certification_field(idx);
        if let Some(m) = image(field) {
            best = best.max(m.rank());
            if best == cap {
                return (best, true);
            }
        }
    }
    (best, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_rows(rows: &[&[i64]]) -> Vec<Vec<Integer>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| Integer::from(x)).collect())
            .collect()
    }

    #[test]
    fn bareiss_det_small() {
        assert_eq!(
            bareiss_det(int_rows(&[&[2, 0], &[0, 3]])),
            Integer::from(6)
        );
        assert_eq!(
            bareiss_det(int_rows(&[&[1, 2], &[2, 4]])),
            Integer::zero()
        );
        // 3x3 with a row swap on the way
        assert_eq!(
            bareiss_det(int_rows(&[&[0, 1, 2], &[1, 0, 1], &[2, 3, 0]])),
            Integer::from(-1) * bareiss_det(int_rows(&[&[1, 0, 1], &[0, 1, 2], &[2, 3, 0]]))
        );
    }

    #[test]
    fn bareiss_rank_rectangular() {
        assert_eq!(bareiss_rank(int_rows(&[&[1, 2, 3], &[2, 4, 6]])), 1);
        assert_eq!(bareiss_rank(int_rows(&[&[1, 0, 0], &[0, 0, 1]])), 2);
        assert_eq!(bareiss_rank(int_rows(&[&[0, 0], &[0, 0]])), 0);
    }

    #[test]
    fn minors_repeated_row_fails_with_witness() {
        let rows = int_rows(&[&[1, 0], &[0, 1], &[1, 0]]);
        let scan = all_maximal_minors_nonzero(&rows);
        assert!(!scan.all_nonzero);
        assert_eq!(scan.zero_witness, Some(vec![0, 2]));
        assert_eq!(scan.total, 3);
    }

    #[test]
    fn minors_generic_pass() {
        let rows = int_rows(&[&[1, 0], &[0, 1], &[1, 1], &[1, 2]]);
        let scan = all_maximal_minors_nonzero(&rows);
        assert!(scan.all_nonzero);
        assert_eq!(scan.total, 6);
    }

    #[test]
    fn combinations_order_and_count() {
        let cs = combinations_vec(4, 2);
        assert_eq!(cs.len(), binomial(4, 2));
        assert_eq!(cs.first(), Some(&vec![0, 1]));
        assert_eq!(cs.last(), Some(&vec![2, 3]));
        assert_eq!(combinations_vec(3, 3), vec![vec![0, 1, 2]]);
    }
}
