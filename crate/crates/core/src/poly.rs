//! The graded ring R = C[x0..x4]: monomial indexing in the fixed graded-lex
//! order, Veronese maps, graded multiplication, the apolarity pairing and
//! catalecticant matrices.
//!
//! The monomial order is graded lexicographic with x0 > x1 > x2 > x3 > x4,
//! fixed globally; every coefficient vector, subspace basis and file format
//! refers to it.

use crate::arith::{Integer, Rational};
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Number of variables (the ambient projective space is P^4).
pub const NVARS: usize = 5;

/// Exponent vector of a monomial in five variables.
pub type Exponents = [u8; NVARS];

/// dim R_d = binom(d+4, 4).
pub fn dim_graded(d: usize) -> usize {
    crate::linalg::binomial(d + NVARS - 1, NVARS - 1)
}

/// The degree-d monomials in graded-lex order, plus the index lookup table.
struct MonomialTable {
    exps: Vec<Exponents>,
    index: HashMap<Exponents, usize>,
}

fn table(d: usize) -> &'static MonomialTable {
    static TABLES: OnceLock<Mutex<Vec<&'static MonomialTable>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| Mutex::new(Vec::new()));
    let mut guard = tables.lock().expect("monomial table lock");
    while guard.len() <= d {
        let deg = guard.len();
        let mut exps = Vec::with_capacity(dim_graded(deg));
        let mut cur = [0u8; NVARS];
        gen_exponents(deg, 0, &mut cur, &mut exps);
        // graded-lex with x0 > .. > x4: larger x0-exponent first
        exps.sort_by(|a, b| b.cmp(a));
        let index = exps.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let boxed: &'static MonomialTable = Box::leak(Box::new(MonomialTable { exps, index }));
        guard.push(boxed);
    }
    guard[d]
}

fn gen_exponents(remaining: usize, var: usize, cur: &mut Exponents, out: &mut Vec<Exponents>) {
    if var == NVARS - 1 {
        cur[var] = remaining as u8;
        out.push(*cur);
        return;
    }
    for e in 0..=remaining {
        cur[var] = e as u8;
        gen_exponents(remaining - e, var + 1, cur, out);
    }
    cur[var] = 0;
}

/// Exponent vectors of degree d, graded-lex order.
pub fn monomials(d: usize) -> &'static [Exponents] {
    &table(d).exps
}

/// Index of an exponent vector within its degree block.
pub fn monomial_index(e: &Exponents) -> usize {
    let d: usize = e.iter().map(|&x| x as usize).sum();
    table(d).index[e]
}

/// Product of factorials of the exponents, the apolarity weight.
pub fn exponent_weight(e: &Exponents) -> Integer {
    let mut w = Integer::one();
    for &x in e {
        for k in 2..=x as u64 {
            w *= Integer::from(k);
        }
    }
    w
}

/// Multinomial coefficient d! / (e0! .. e4!) for |e| = d.
pub fn multinomial(e: &Exponents) -> Integer {
    let d: u64 = e.iter().map(|&x| x as u64).sum();
    let mut num = Integer::one();
    for k in 2..=d {
        num *= Integer::from(k);
    }
    num / exponent_weight(e)
}

/// Errors from ring operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("point has all coordinates zero")]
    ZeroPoint,
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
}

/// A homogeneous form of fixed degree, as its graded-lex coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedForm {
    pub degree: usize,
    pub coeffs: Vec<Rational>,
}

impl GradedForm {
    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![Rational::zero(); dim_graded(degree)],
        }
    }

    pub fn from_coeffs(degree: usize, coeffs: Vec<Rational>) -> Result<Self, PolyError> {
        if coeffs.len() != dim_graded(degree) {
            return Err(PolyError::DegreeMismatch {
                expected: dim_graded(degree),
                got: coeffs.len(),
            });
        }
        Ok(Self { degree, coeffs })
    }

    /// The i-th coordinate variable as a degree-1 form.
    pub fn variable(i: usize) -> Self {
        let mut f = Self::zero(1);
        let mut e = [0u8; NVARS];
        e[i] = 1;
        f.coeffs[monomial_index(&e)] = Rational::one();
        f
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Exact polynomial product.
    pub fn multiply(&self, other: &Self) -> Self {
        let d = self.degree + other.degree;
        let mut out = GradedForm::zero(d);
        let a_exps = monomials(self.degree);
        let b_exps = monomials(other.degree);
        for (i, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in other.coeffs.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let mut e = a_exps[i];
                for (k, &bk) in b_exps[j].iter().enumerate() {
                    e[k] += bk;
                }
                out.coeffs[monomial_index(&e)] += ca * cb;
            }
        }
        out
    }

    /// Evaluate at affine representative coordinates.
    pub fn evaluate(&self, coords: &[Rational; NVARS]) -> Rational {
        let mut acc = Rational::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut term = c.clone();
            for (k, &e) in monomials(self.degree)[i].iter().enumerate() {
                for _ in 0..e {
                    term *= &coords[k];
                }
            }
            acc += term;
        }
        acc
    }
}

/// A point of P^4 with raw coordinates preserved for reporting and a
/// canonical representative (first nonzero coordinate scaled to 1) for
/// equality tests.
#[derive(Debug, Clone)]
pub struct ProjectivePoint {
    raw: [Rational; NVARS],
    canonical: [Rational; NVARS],
}

impl ProjectivePoint {
    pub fn new(raw: [Rational; NVARS]) -> Result<Self, PolyError> {
        let lead = raw.iter().position(|c| !c.is_zero());
        let Some(lead) = lead else {
            return Err(PolyError::ZeroPoint);
        };
        let scale = raw[lead].clone();
        let canonical = std::array::from_fn(|i| &raw[i] / &scale);
        Ok(Self { raw, canonical })
    }

    pub fn from_ints(coords: [i64; NVARS]) -> Result<Self, PolyError> {
        Self::new(std::array::from_fn(|i| {
            Rational::from_integer(Integer::from(coords[i]))
        }))
    }

    pub fn raw(&self) -> &[Rational; NVARS] {
        &self.raw
    }

    pub fn canonical(&self) -> &[Rational; NVARS] {
        &self.canonical
    }

    /// Coefficient vector of L^d where L is the linear form of this point
    /// (multinomial coefficients included), i.e. the d-th Veronese image.
    pub fn veronese(&self, d: usize) -> Vec<Rational> {
        assert!(d >= 1, "veronese needs degree >= 1");
        let exps = monomials(d);
        let mut out = Vec::with_capacity(exps.len());
        for e in exps {
            let mut c = Rational::from_integer(multinomial(e));
            for (k, &ek) in e.iter().enumerate() {
                for _ in 0..ek {
                    c *= &self.raw[k];
                }
            }
            out.push(c);
        }
        out
    }

    /// Rows of the differential of v_d at this point: coefficient vectors of
    /// L^(d-1) * x_i for i = 0..4 (scalar factors dropped).
    pub fn tangent_rows(&self, d: usize) -> Vec<Vec<Rational>> {
        assert!(d >= 2);
        let l_pow = GradedForm::from_coeffs(d - 1, self.veronese(d - 1)).expect("veronese dims");
        (0..NVARS)
            .map(|i| l_pow.multiply(&GradedForm::variable(i)).coeffs)
            .collect()
    }
}

impl PartialEq for ProjectivePoint {
    fn eq(&self, other: &Self) -> bool {
        self.canonical == other.canonical
    }
}
impl Eq for ProjectivePoint {}

/// Quartic form in five variables: the tensor being certified.
pub type QuarticForm = GradedForm;

/// Apolar pairing of two quartics: sum over monomials of
/// `g_a * t_a * a0! a1! a2! a3! a4!`. The only identity the pipeline relies
/// on is `<g, L^4> = 24 * g(u)`, which this integral normalization satisfies.
pub fn apolar_pair(g: &GradedForm, t: &QuarticForm) -> Rational {
    assert_eq!(g.degree, 4);
    assert_eq!(t.degree, 4);
    let mut acc = Rational::zero();
    for (i, e) in monomials(4).iter().enumerate() {
        if g.coeffs[i].is_zero() || t.coeffs[i].is_zero() {
            continue;
        }
        acc += &g.coeffs[i] * &t.coeffs[i] * Rational::from_integer(exponent_weight(e));
    }
    acc
}

/// Matrix of the contraction R_a -> (R_b)* induced by the apolar pairing:
/// entry (beta, gamma) = t_(beta+gamma) * (beta+gamma)!.
pub fn catalecticant(t: &QuarticForm, a: usize, b: usize) -> crate::linalg::Matrix {
    assert_eq!(a + b, 4, "catalecticant needs a + b = 4");
    assert!(a >= 1 && b >= 1);
    assert_eq!(t.degree, 4);
    let rows_exps = monomials(a);
    let cols_exps = monomials(b);
    let mut rows = Vec::with_capacity(rows_exps.len());
    for be in rows_exps {
        let mut row = Vec::with_capacity(cols_exps.len());
        for ge in cols_exps {
            let mut e = *be;
            for (k, &g) in ge.iter().enumerate() {
                e[k] += g;
            }
            let idx = monomial_index(&e);
            row.push(&t.coeffs[idx] * Rational::from_integer(exponent_weight(&e)));
        }
        rows.push(row);
    }
    crate::linalg::Matrix::new(rows)
}

/// Weighted sum of fourth Veronese powers: `sum_i w_i * v4(P_i)`.
pub fn weighted_veronese_sum(points: &[ProjectivePoint], weights: &[Rational]) -> QuarticForm {
    assert_eq!(points.len(), weights.len());
    let mut t = GradedForm::zero(4);
    for (p, w) in points.iter().zip(weights) {
        for (c, v) in t.coeffs.iter_mut().zip(p.veronese(4)) {
            *c += w * v;
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_int};
    use proptest::prelude::*;

    #[test]
    fn graded_dimensions() {
        assert_eq!(dim_graded(0), 1);
        assert_eq!(dim_graded(2), 15);
        assert_eq!(dim_graded(4), 70);
        assert_eq!(dim_graded(10), 1001);
    }

    #[test]
    fn monomial_order_is_graded_lex() {
        // degree 2: x0^2 first, x4^2 last
        let m = monomials(2);
        assert_eq!(m[0], [2, 0, 0, 0, 0]);
        assert_eq!(m[1], [1, 1, 0, 0, 0]);
        assert_eq!(m[14], [0, 0, 0, 0, 2]);
    }

    #[test]
    fn veronese_basis_vector() {
        let p = ProjectivePoint::from_ints([1, 0, 0, 0, 0]).unwrap();
        let v = p.veronese(4);
        assert_eq!(v[monomial_index(&[4, 0, 0, 0, 0])], rat_int(1));
        assert_eq!(v.iter().filter(|c| !c.is_zero()).count(), 1);
    }

    #[test]
    fn veronese_binomial_square() {
        let p = ProjectivePoint::from_ints([1, 1, 0, 0, 0]).unwrap();
        let v = p.veronese(2);
        assert_eq!(v[monomial_index(&[2, 0, 0, 0, 0])], rat_int(1));
        assert_eq!(v[monomial_index(&[1, 1, 0, 0, 0])], rat_int(2));
        assert_eq!(v[monomial_index(&[0, 2, 0, 0, 0])], rat_int(1));
        assert_eq!(v.iter().filter(|c| !c.is_zero()).count(), 3);
    }

    #[test]
    fn zero_point_rejected() {
        assert_eq!(
            ProjectivePoint::from_ints([0; 5]).unwrap_err(),
            PolyError::ZeroPoint
        );
    }

    #[test]
    fn multiply_examples() {
        let x0 = GradedForm::variable(0);
        let x1 = GradedForm::variable(1);
        let p = x0.multiply(&x1);
        assert_eq!(p.coeffs[monomial_index(&[1, 1, 0, 0, 0])], rat_int(1));
        // (x0+x1)(x0-x1) = x0^2 - x1^2
        let mut a = GradedForm::zero(1);
        a.coeffs[monomial_index(&[1, 0, 0, 0, 0])] = rat_int(1);
        a.coeffs[monomial_index(&[0, 1, 0, 0, 0])] = rat_int(1);
        let mut b = GradedForm::zero(1);
        b.coeffs[monomial_index(&[1, 0, 0, 0, 0])] = rat_int(1);
        b.coeffs[monomial_index(&[0, 1, 0, 0, 0])] = rat_int(-1);
        let ab = a.multiply(&b);
        assert_eq!(ab.coeffs[monomial_index(&[2, 0, 0, 0, 0])], rat_int(1));
        assert_eq!(ab.coeffs[monomial_index(&[0, 2, 0, 0, 0])], rat_int(-1));
        assert_eq!(ab.coeffs[monomial_index(&[1, 1, 0, 0, 0])], rat_int(0));
    }

    #[test]
    fn apolar_x0_fourth_selfpair_is_24() {
        let p = ProjectivePoint::from_ints([1, 0, 0, 0, 0]).unwrap();
        let l4 = GradedForm::from_coeffs(4, p.veronese(4)).unwrap();
        assert_eq!(apolar_pair(&l4, &l4), rat_int(24));
    }

    #[test]
    fn catalecticant_of_pure_power_has_rank_one() {
        let p = ProjectivePoint::from_ints([1, 0, 0, 0, 0]).unwrap();
        let t = GradedForm::from_coeffs(4, p.veronese(4)).unwrap();
        assert_eq!(catalecticant(&t, 2, 2).rank(), 1);
        assert_eq!(catalecticant(&t, 1, 3).rank(), 1);
    }

    fn arb_point() -> impl Strategy<Value = ProjectivePoint> {
        proptest::collection::vec(-30i64..30, 5).prop_filter_map("nonzero", |v| {
            ProjectivePoint::from_ints([v[0], v[1], v[2], v[3], v[4] | 1]).ok()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn evaluation_homomorphism(p in arb_point(), fa in proptest::collection::vec(-9i64..9, 15), fb in proptest::collection::vec(-9i64..9, 5)) {
            let f = GradedForm::from_coeffs(2, fa.iter().map(|&x| rat_int(x)).collect()).unwrap();
            let g = GradedForm::from_coeffs(1, fb.iter().map(|&x| rat_int(x)).collect()).unwrap();
            let lhs = f.multiply(&g).evaluate(p.raw());
            let rhs = f.evaluate(p.raw()) * g.evaluate(p.raw());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn apolar_pairs_with_powers_as_evaluation(p in arb_point(), gs in proptest::collection::vec((-9i64..9, 1i64..5), 70)) {
            // <g, L^4> = 24 * g(u) for every quartic g and point u
            let g = GradedForm::from_coeffs(4, gs.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap();
            let l4 = GradedForm::from_coeffs(4, p.veronese(4)).unwrap();
            prop_assert_eq!(apolar_pair(&g, &l4), rat_int(24) * g.evaluate(p.raw()));
        }

        #[test]
        fn catalecticant_22_is_weighted_symmetric(ts in proptest::collection::vec(-9i64..9, 70)) {
            let t = GradedForm::from_coeffs(4, ts.iter().map(|&x| rat_int(x)).collect()).unwrap();
            let m = catalecticant(&t, 2, 2);
            for i in 0..15 {
                for j in 0..15 {
                    prop_assert_eq!(&m.rows[i][j], &m.rows[j][i]);
                }
            }
        }
    }
}
