//! Liaison engine for the rank-12 pipeline: Koszul certification of complete
//! intersections, degreewise residue (colon) ideals, lifting of the
//! comparison map through the minimal resolution of I_A, and the final-test
//! linear system whose kernel parametrizes alternative decompositions.
//!
//! The lifted data is computed per prime: the tower of minimal-resolution
//! pieces (first, second and third syzygies in low internal degrees) is
//! solved over GF(p) with deterministic echelon splittings, and every
//! cross-prime object carries its pivot-pattern signature so unlucky primes
//! are detected and discarded. Rank-8 outcomes are exact as soon as one
//! prime attains the cap; rank-7 outcomes are re-anchored by an exact
//! orthogonality check on the reconstructed residue ideal.

use crate::arith::{certification_field, GfPrime, Rational};
use crate::linalg::{
    reconstruct_rationals, GfMatrix, LinalgError, ModularImage, ReconstructOptions, Subspace,
};
use crate::pointsets::{
    colon_piece, generated_dim_exact, ideal_generators, koszul_hilbert, PointSet, PointSetError,
};
use crate::poly::{
    apolar_pair, dim_graded, exponent_weight, monomial_index, monomials, GradedForm, QuarticForm,
};
use num_traits::Zero;

/// Errors from liaison computations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LiaisonError {
    #[error("not a proper complete intersection: degree {degree} piece has dimension {got}, Koszul predicts {expected}")]
    NotProper {
        degree: usize,
        expected: usize,
        got: usize,
    },
    #[error("input is not generic enough: {0}")]
    NonGeneric(String),
    #[error("form is not apolar to the point set (T outside the span of v4(A))")]
    NotApolar,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Reconstruct(#[from] crate::linalg::ReconstructError),
    #[error(transparent)]
    Points(#[from] PointSetError),
}

/// A certified complete intersection: generators plus their degree type,
/// with generated-piece dimensions matching the Koszul predictions through
/// the socle degree plus one.
#[derive(Debug, Clone)]
pub struct CompleteIntersection {
    pub gens: Vec<GradedForm>,
    pub degrees: Vec<usize>,
}

impl CompleteIntersection {
    pub fn socle(&self) -> usize {
        self.degrees.iter().sum::<usize>() - 4
    }
}

/// Verify that the generated-piece dimensions match the Koszul h-vector
/// predictions on every degree through socle + 1. A modular dimension that
/// meets the prediction is exact (the Koszul complex bounds the dimension
/// from above, a modular rank bounds it from below).
pub fn certify_ci(gens: Vec<GradedForm>) -> Result<CompleteIntersection, LiaisonError> {
    assert_eq!(gens.len(), 4, "complete intersections in P^4 use 4 forms");
    let degrees: Vec<usize> = gens.iter().map(|g| g.degree).collect();
    let socle: usize = degrees.iter().sum::<usize>() - 4;
    let hilbert = koszul_hilbert(&degrees, socle + 1);
    let dmin = *degrees.iter().min().expect("nonempty");
    for d in dmin..=socle + 1 {
        let expected = dim_graded(d) - hilbert[d];
        let usable: Vec<GradedForm> = gens.iter().filter(|g| g.degree <= d).cloned().collect();
        let got = generated_dim_exact(&usable, d, Some(expected));
        if got != expected {
            return Err(LiaisonError::NotProper {
                degree: d,
                expected,
                got,
            });
        }
    }
    Ok(CompleteIntersection { gens, degrees })
}

/// Degreewise residue ideal pieces (I_Z : I_A)_d for d = 1..=d_max.
pub fn residue_points_ideal(
    ci: &CompleteIntersection,
    a: &PointSet,
    d_max: usize,
) -> Result<Vec<(usize, Subspace)>, LiaisonError> {
    for g in &ci.gens {
        for p in a.points() {
            if !g.evaluate(p.raw()).is_zero() {
                return Err(LiaisonError::NonGeneric(
                    "complete intersection does not contain the point set".into(),
                ));
            }
        }
    }
    let a_gens = ideal_generators(a, 4)?;
    let mut out = Vec::new();
    for d in 1..=d_max {
        out.push((d, colon_piece(&ci.gens, &a_gens, d)?));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// The residue family: quadrics, cubic complement, and the lifting tower
// ---------------------------------------------------------------------------

/// The parametrized family of residues of A in complete intersections
/// (Q1, Q2, Q3, F(lambda)) with F(lambda) = sum of lambda_j * F_j.
#[derive(Debug, Clone)]
pub struct ResidueFamily {
    /// Basis of the quadrics through A.
    pub quadrics: Vec<GradedForm>,
    /// F_1..F_8: a basis of (I_A)_3 modulo the quadric multiples.
    pub cubic_basis: Vec<GradedForm>,
    /// (I_C)_3 = R_1 * quadrics, used for span accounting.
    pub curve_cubics: Subspace,
    /// Full (I_A)_3, used for span accounting.
    pub ideal_cubics: Subspace,
}

/// Number of affine parameters of the family.
pub const FAMILY_PARAMS: usize = 8;

impl ResidueFamily {
    /// The cubic F(lambda) = sum of lambda_m * F_m.
    pub fn cubic_at(&self, lambda: &[Rational]) -> GradedForm {
        assert_eq!(lambda.len(), FAMILY_PARAMS);
        let mut f = GradedForm::zero(3);
        for (m, fm) in self.cubic_basis.iter().enumerate() {
            for (c, x) in f.coeffs.iter_mut().zip(&fm.coeffs) {
                *c += &lambda[m] * x;
            }
        }
        f
    }
}

/// Build the residue family data for a 12-point set satisfying the
/// rank-12 conditions (3 quadrics, 23 cubics, 8 of them new).
pub fn residue_family(a: &PointSet) -> Result<ResidueFamily, LiaisonError> {
    if a.len() != 12 {
        return Err(LiaisonError::NonGeneric(format!(
            "residue family needs 12 points, got {}",
            a.len()
        )));
    }
    let quadric_piece = a.ideal_piece(2)?;
    if quadric_piece.dim() != 3 {
        return Err(LiaisonError::NonGeneric(format!(
            "expected 3 quadrics through A, found {}",
            quadric_piece.dim()
        )));
    }
    let quadrics: Vec<GradedForm> = quadric_piece
        .basis()
        .iter()
        .map(|b| GradedForm::from_coeffs(2, b.clone()).expect("quadric dims"))
        .collect();
    let curve_cubics = crate::pointsets::generated_piece(&quadrics, 3)?;
    if curve_cubics.dim() != 15 {
        return Err(LiaisonError::NonGeneric(format!(
            "quadric multiples span {} cubics, expected 15",
            curve_cubics.dim()
        )));
    }
    let ideal_cubics = a.ideal_piece(3)?;
    if ideal_cubics.dim() != 23 {
        return Err(LiaisonError::NonGeneric(format!(
            "expected 23 cubics through A, found {}",
            ideal_cubics.dim()
        )));
    }
    let mut cubic_basis = Vec::with_capacity(FAMILY_PARAMS);
    let mut seen = curve_cubics.clone();
    for b in ideal_cubics.basis() {
        if !seen.contains(b) {
            cubic_basis.push(GradedForm::from_coeffs(3, b.clone()).expect("cubic dims"));
            seen = seen.sum(&Subspace::from_rows(dim_graded(3), vec![b.clone()])?)?;
        }
    }
    if cubic_basis.len() != FAMILY_PARAMS {
        return Err(LiaisonError::NonGeneric(format!(
            "cubic complement has dimension {}, expected {}",
            cubic_basis.len(),
            FAMILY_PARAMS
        )));
    }
    Ok(ResidueFamily {
        quadrics,
        cubic_basis,
        curve_cubics,
        ideal_cubics,
    })
}

/// Pivot-order convention for the echelon-based splittings of the lifting
/// systems. Two independent choices realize two independent mapping-cone
/// splittings; the final-test kernel must agree between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitOrder {
    Forward,
    Reversed,
}

fn order_vec(n: usize, order: SplitOrder) -> Vec<usize> {
    match order {
        SplitOrder::Forward => (0..n).collect(),
        SplitOrder::Reversed => (0..n).rev().collect(),
    }
}

/// One prime's worth of lifted data: the seven residue cubics as linear
/// functions of the eight family parameters, plus the tower's pivot
/// signature for cross-prime consistency.
struct TowerModP {
    field: GfPrime,
    /// c[k][m]: 35-vector, the lambda_m coefficient of the k-th lifted cubic.
    lifted: Vec<Vec<Vec<u64>>>,
    signature: Vec<usize>,
}

fn reduce_forms(field: GfPrime, forms: &[GradedForm]) -> Option<Vec<Vec<u64>>> {
    forms
        .iter()
        .map(|f| {
            f.coeffs
                .iter()
                .map(|c| field.from_rational(c))
                .collect::<Option<Vec<u64>>>()
        })
        .collect()
}

fn mul_poly_modp(field: GfPrime, da: usize, a: &[u64], db: usize, b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; dim_graded(da + db)];
    let ea = monomials(da);
    let eb = monomials(db);
    for (i, &ca) in a.iter().enumerate() {
        if ca == 0 {
            continue;
        }
        for (j, &cb) in b.iter().enumerate() {
            if cb == 0 {
                continue;
            }
            let mut e = ea[i];
            for (k, &x) in eb[j].iter().enumerate() {
                e[k] += x;
            }
            let idx = monomial_index(&e);
            out[idx] = field.mul_add(out[idx], ca, cb);
        }
    }
    out
}

/// Syzygy coordinates at internal degree e: blocks [a1|a2|a3|b1..b8] with the
/// a-blocks in R_(e-2) and the b-blocks in R_(e-3).
fn syz_dims(e: usize) -> (usize, usize, usize) {
    let qa = dim_graded(e - 2);
    let qb = if e >= 3 { dim_graded(e - 3) } else { 0 };
    (qa, qb, 3 * qa + 8 * qb)
}

/// The map (gens coordinates) -> R_e as a GfMatrix (rows = equations in R_e).
fn gen_map_matrix(field: GfPrime, q: &[Vec<u64>], f: &[Vec<u64>], e: usize) -> GfMatrix {
    let (qa, qb, total) = syz_dims(e);
    let ne = dim_graded(e);
    let mut cols: Vec<Vec<u64>> = Vec::with_capacity(total);
    for qi in q {
        for m in monomials(e - 2) {
            let mut mono = vec![0u64; qa];
            mono[monomial_index(m)] = 1;
            let _ = &mono;
            cols.push(mul_poly_sparse(field, e - 2, m, 2, qi, ne));
        }
    }
    if qb > 0 {
        for fj in f {
            for m in monomials(e - 3) {
                cols.push(mul_poly_sparse(field, e - 3, m, 3, fj, ne));
            }
        }
    }
    // transpose into equations-by-unknowns
    let mut data = vec![0u64; ne * total];
    for (c, col) in cols.iter().enumerate() {
        for (r, &x) in col.iter().enumerate() {
            data[r * total + c] = x;
        }
    }
    GfMatrix {
        field,
        rows: ne,
        cols: total,
        data,
    }
}

fn mul_poly_sparse(
    field: GfPrime,
    _dm: usize,
    m: &crate::poly::Exponents,
    dg: usize,
    g: &[u64],
    ne: usize,
) -> Vec<u64> {
    let mut out = vec![0u64; ne];
    for (i, &c) in g.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mut e = monomials(dg)[i];
        for (k, &x) in m.iter().enumerate() {
            e[k] += x;
        }
        out[monomial_index(&e)] = field.add(out[monomial_index(&e)], c);
    }
    out
}

/// Canonical kernel basis (rref) with pivot signature.
fn canonical_kernel(m: GfMatrix) -> (Vec<Vec<u64>>, Vec<usize>) {
    let field = m.field;
    let ker = m.kernel();
    let mut km = GfMatrix::from_rows(field, ker);
    let pivots = km.rref();
    let rows = (0..pivots.len()).map(|r| km.row(r).to_vec()).collect();
    (rows, pivots)
}

/// Component-wise multiplication of a free-module element by a polynomial:
/// `elem` has `ncomp` blocks of degree `de` coefficients; the result has
/// blocks of degree `de + dq`.
fn free_mult(
    field: GfPrime,
    ncomp: usize,
    de: usize,
    elem: &[u64],
    dq: usize,
    q: &[u64],
) -> Vec<u64> {
    let nin = dim_graded(de);
    let nout = dim_graded(de + dq);
    let mut out = vec![0u64; ncomp * nout];
    for c in 0..ncomp {
        let block = &elem[c * nin..(c + 1) * nin];
        if block.iter().all(|&x| x == 0) {
            continue;
        }
        let prod = mul_poly_modp(field, de, block, dq, q);
        out[c * nout..(c + 1) * nout].copy_from_slice(&prod);
    }
    out
}

/// The matrix of multiplication G (x) R_s -> target free coordinates:
/// columns indexed by (basis element, degree-s monomial).
fn free_module_map(
    field: GfPrime,
    basis: &[Vec<u64>],
    ncomp: usize,
    de: usize,
    s: usize,
) -> GfMatrix {
    let nout = dim_graded(de + s);
    let rows_dim = ncomp * nout;
    let cols_dim = basis.len() * dim_graded(s);
    let mut data = vec![0u64; rows_dim * cols_dim];
    let mut col = 0;
    for b in basis {
        for m in monomials(s) {
            let mut mono = vec![0u64; dim_graded(s)];
            mono[monomial_index(m)] = 1;
            let image = free_mult(field, ncomp, de, b, s, &mono);
            for (r, &x) in image.iter().enumerate() {
                if x != 0 {
                    data[r * cols_dim + col] = x;
                }
            }
            col += 1;
        }
    }
    GfMatrix {
        field,
        rows: rows_dim,
        cols: cols_dim,
        data,
    }
}

fn build_tower(field: GfPrime, family: &ResidueFamily, order: SplitOrder) -> Option<TowerModP> {
    let q = reduce_forms(field, &family.quadrics)?;
    let f = reduce_forms(field, &family.cubic_basis)?;
    let mut signature = Vec::new();

    // --- G2: first syzygies of (Q1,Q2,Q3,F1..F8) in degree 4
    let m4 = gen_map_matrix(field, &q, &f, 4);
    let (g2, piv_g2) = canonical_kernel(m4);
    if g2.len() != 27 {
        return None;
    }
    signature.push(g2.len());
    signature.extend(piv_g2.iter().take(3));

    // tautological syzygies between pairs of quadrics, in G2-coordinates
    let (qa4, _qb4, tot4) = syz_dims(4);
    let mut sigma_qq = Vec::new();
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let mut v = vec![0u64; tot4];
        for (t, &x) in q[j].iter().enumerate() {
            v[i * qa4 + t] = x;
        }
        for (t, &x) in q[i].iter().enumerate() {
            v[j * qa4 + t] = field.sub(v[j * qa4 + t], x);
        }
        sigma_qq.push(v);
    }
    let g2_matrix = {
        // columns = g2 basis vectors
        let cols_dim = g2.len();
        let mut data = vec![0u64; tot4 * cols_dim];
        for (c, b) in g2.iter().enumerate() {
            for (r, &x) in b.iter().enumerate() {
                data[r * cols_dim + c] = x;
            }
        }
        GfMatrix {
            field,
            rows: tot4,
            cols: cols_dim,
            data,
        }
    };
    let psi2_qq = g2_matrix.solve_multi(&sigma_qq, &order_vec(27, order))?;

    // --- E5: (G2)_5 -> (G1)_5 and psi2 on the F-wedges (lambda-linear)
    let e5 = syz_embedding_matrix(field, &g2, 4, 1, &q, &f);
    // sigma_{i,F_m}: coords a_i = F_m, b_m = -Q_i  (degree-5 syzygies)
    let (qa5, qb5, tot5) = syz_dims(5);
    let mut sigma_if: Vec<Vec<u64>> = Vec::with_capacity(3 * 8);
    for i in 0..3 {
        for m in 0..8 {
            let mut v = vec![0u64; tot5];
            for (t, &x) in f[m].iter().enumerate() {
                v[i * qa5 + t] = x;
            }
            for (t, &x) in q[i].iter().enumerate() {
                let idx = 3 * qa5 + m * qb5 + t;
                v[idx] = field.sub(v[idx], x);
            }
            sigma_if.push(v);
        }
    }
    let psi2_if = e5.solve_multi(&sigma_if, &order_vec(e5.cols, order))?;

    // --- G3: kernel of E5 (second syzygies, degree 5)
    let (g3, piv_g3) = canonical_kernel(e5);
    if g3.len() != 24 {
        return None;
    }
    signature.push(g3.len());
    signature.extend(piv_g3.iter().take(3));

    // --- D6: (G3)_6 -> (G2)_6 and psi3(e_123)
    let d6 = free_module_map(field, &g3, 27, 1, 1);
    // rhs = Q1 psi2(e_23) - Q2 psi2(e_13) + Q3 psi2(e_12) in (G2)_6
    // psi2_qq rows are G2-coordinate scalars (degree-4 internal): treat as
    // 27 components of degree 0
    let mut rhs6 = vec![0u64; 27 * dim_graded(2)];
    let signs: [(usize, usize, bool); 3] = [(0, 2, false), (1, 1, true), (2, 0, false)];
    for &(qi, wedge, negate) in &signs {
        // wedge indexing: psi2_qq[0] = e_01, [1] = e_02, [2] = e_12
        let contrib = free_mult(field, 27, 0, &psi2_qq[wedge], 2, &q[qi]);
        for (t, &x) in contrib.iter().enumerate() {
            rhs6[t] = if negate {
                field.sub(rhs6[t], x)
            } else {
                field.add(rhs6[t], x)
            };
        }
    }
    let psi3_123 = d6
        .solve_multi(&[rhs6], &order_vec(d6.cols, order))?
        .into_iter()
        .next()
        .expect("one rhs");

    // --- G4: kernel of D6 (third syzygies, degree 6)
    let (g4, piv_g4) = canonical_kernel(d6);
    if g4.len() != 7 {
        return None;
    }
    signature.push(g4.len());
    signature.extend(piv_g4.iter().take(3));

    // --- D7: (G3)_7 -> (G2)_7 and psi3 on e_ijF (lambda-linear)
    let d7 = free_module_map(field, &g3, 27, 1, 2);
    // rhs(i<j, m) = Q_i psi2(e_jF)_m - Q_j psi2(e_iF)_m + F_m psi2(e_ij)
    let pair_order: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];
    let mut rhs7: Vec<Vec<u64>> = Vec::with_capacity(3 * 8);
    for &(i, j) in &pair_order {
        let wedge_ij = match (i, j) {
            (0, 1) => 0,
            (0, 2) => 1,
            (1, 2) => 2,
            _ => unreachable!(),
        };
        for m in 0..8 {
            // psi2_if rows are indexed i*8+m, each 135 coords = 27 linear forms
            let a = free_mult(field, 27, 1, &psi2_if[j * 8 + m], 2, &q[i]);
            let b = free_mult(field, 27, 1, &psi2_if[i * 8 + m], 2, &q[j]);
            let c = free_mult(field, 27, 0, &psi2_qq[wedge_ij], 3, &f[m]);
            let mut v = vec![0u64; 27 * dim_graded(3)];
            for t in 0..v.len() {
                v[t] = field.add(field.sub(a[t], b[t]), c[t]);
            }
            rhs7.push(v);
        }
    }
    let psi3_ijf = d7.solve_multi(&rhs7, &order_vec(d7.cols, order))?;

    // --- D9: (G4)_9 -> (G3)_9 and psi4 (lambda-linear)
    let d9 = free_module_map(field, &g4, 24, 1, 3);
    // rhs(m) = Q1 psi3(e_23F)_m - Q2 psi3(e_13F)_m + Q3 psi3(e_12F)_m
    //          - F_m psi3(e_123)
    let mut rhs9: Vec<Vec<u64>> = Vec::with_capacity(8);
    for m in 0..8 {
        // psi3_ijf indexed by pair then m; pairs are (0,1),(0,2),(1,2)
        let a = free_mult(field, 24, 2, &psi3_ijf[2 * 8 + m], 2, &q[0]);
        let b = free_mult(field, 24, 2, &psi3_ijf[8 + m], 2, &q[1]);
        let c = free_mult(field, 24, 2, &psi3_ijf[m], 2, &q[2]);
        let d = free_mult(field, 24, 1, &psi3_123, 3, &f[m]);
        let mut v = vec![0u64; 24 * dim_graded(4)];
        for t in 0..v.len() {
            let mut x = field.sub(a[t], b[t]);
            x = field.add(x, c[t]);
            x = field.sub(x, d[t]);
            v[t] = x;
        }
        rhs9.push(v);
    }
    let psi4 = d9.solve_multi(&rhs9, &order_vec(d9.cols, order))?;

    // psi4[m] is a (G4)_9 element: 7 blocks of degree-3 coefficients in the
    // g4 basis: exactly the lambda_m-coefficients of the 7 lifted cubics.
    let n3 = dim_graded(3);
    let mut lifted = vec![vec![vec![0u64; n3]; 8]; 7];
    for (m, v) in psi4.iter().enumerate() {
        for k in 0..7 {
            lifted[k][m].copy_from_slice(&v[k * n3..(k + 1) * n3]);
        }
    }
    Some(TowerModP {
        field,
        lifted,
        signature,
    })
}

/// Embedding matrix of (G2 shifted by s) into syzygy coordinates at
/// degree 4 + s.
fn syz_embedding_matrix(
    field: GfPrime,
    g2: &[Vec<u64>],
    base_degree: usize,
    s: usize,
    _q: &[Vec<u64>],
    _f: &[Vec<u64>],
) -> GfMatrix {
    let e = base_degree + s;
    let (qa_out, qb_out, tot_out) = syz_dims(e);
    let (qa_in, qb_in, _tot_in) = syz_dims(base_degree);
    let cols_dim = g2.len() * dim_graded(s);
    let mut data = vec![0u64; tot_out * cols_dim];
    let mut col = 0;
    for b in g2 {
        for m in monomials(s) {
            // multiply each of the 11 polynomial blocks by the monomial
            for blk in 0..3 {
                let seg = &b[blk * qa_in..(blk + 1) * qa_in];
                for (i, &c) in seg.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let mut exps = monomials(base_degree - 2)[i];
                    for (k, &x) in m.iter().enumerate() {
                        exps[k] += x;
                    }
                    let r = blk * qa_out + monomial_index(&exps);
                    data[r * cols_dim + col] = field.add(data[r * cols_dim + col], c);
                }
            }
            for blk in 0..8 {
                let seg = &b[3 * qa_in + blk * qb_in..3 * qa_in + (blk + 1) * qb_in];
                for (i, &c) in seg.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let mut exps = monomials(base_degree - 3)[i];
                    for (k, &x) in m.iter().enumerate() {
                        exps[k] += x;
                    }
                    let r = 3 * qa_out + blk * qb_out + monomial_index(&exps);
                    data[r * cols_dim + col] = field.add(data[r * cols_dim + col], c);
                }
            }
            col += 1;
        }
    }
    GfMatrix {
        field,
        rows: tot_out,
        cols: cols_dim,
        data,
    }
}

// ---------------------------------------------------------------------------
// The final-test system (MatEqns)
// ---------------------------------------------------------------------------

/// The assembled final-test system: rank and kernel of the matrix of
/// apolarity equations in the eight family parameters.
#[derive(Debug, Clone)]
pub struct FinalTestSystem {
    /// Raw lambda-linear rows before dedup (one per cubic generator and
    /// variable).
    pub raw_rows: usize,
    /// Rows surviving deduplication of zero rows, per prime.
    pub live_rows: usize,
    /// Rank of the system (certified across primes).
    pub rank: usize,
    /// Kernel dimension (8 - rank).
    pub kernel_dim: usize,
    /// Provenance of each raw row.
    pub provenance: Vec<String>,
    /// Exact kernel direction when the kernel is one-dimensional.
    pub kernel: Option<Vec<Rational>>,
    /// True when the Forward and Reversed splittings produced identical
    /// kernels modulo every probed prime.
    pub kernel_invariant: bool,
}

/// Assemble the final-test system for T against the residue family of A.
///
/// Preconditions: T is orthogonal to (I_A)_4 (checked exactly through the
/// Veronese span) and the family is certified. The 40 raw rows are the
/// pairings of T with x_j * c for c among the eight cubic generators
/// (F(lambda) and the seven lifted cubics); the F rows vanish identically.
pub fn build_mateqns(
    t: &QuarticForm,
    a: &PointSet,
    family: &ResidueFamily,
) -> Result<FinalTestSystem, LiaisonError> {
    // precondition: T in the span of v4(A), i.e. T orthogonal to (I_A)_4
    let mut rows = a.evaluation_matrix(4).rows;
    let base_rank = crate::linalg::Matrix::new(rows.clone()).rank();
    rows.push(t.coeffs.clone());
    if crate::linalg::Matrix::new(rows).rank() != base_rank {
        return Err(LiaisonError::NotApolar);
    }

    let mut provenance = Vec::new();
    for k in 0..8 {
        for j in 0..5 {
            let label = if k == 0 {
                format!("<T, x{} * F(lambda)>", j)
            } else {
                format!("<T, x{} * lift{}(lambda)>", j, k)
            };
            provenance.push(label);
        }
    }

    let mut rank = None;
    let mut kernels_by_prime: Vec<(u64, Option<Vec<u64>>)> = Vec::new();
    let mut live_rows = 0;
    let mut kernel_invariant = true;
    let mut good_primes = 0usize;
    let mut idx = 0usize;
    while good_primes < 3 && idx < 24 {
        let field = certification_field(idx);
        idx += 1;
        let Some((m_fwd, live)) = mateqns_modp(field, t, family, SplitOrder::Forward) else {
            continue;
        };
        let Some((m_rev, _)) = mateqns_modp(field, t, family, SplitOrder::Reversed) else {
            continue;
        };
        let (rank_f, ker_f) = rank_and_kernel(field, &m_fwd);
        let (rank_r, ker_r) = rank_and_kernel(field, &m_rev);
        if rank_f != rank_r || ker_f != ker_r {
            kernel_invariant = false;
        }
        live_rows = live;
        match rank {
            None => rank = Some(rank_f),
            Some(r) if r == rank_f => {}
            Some(r) => {
                // ranks can only drop modulo unlucky primes: keep the larger
                if rank_f > r {
                    rank = Some(rank_f);
                    kernels_by_prime.clear();
                    good_primes = 0;
                } else {
                    continue;
                }
            }
        }
        kernels_by_prime.push((field.modulus(), ker_f.map(|k| k.into_iter().next().unwrap())));
        good_primes += 1;
    }
    let rank = rank.ok_or_else(|| {
        LiaisonError::NonGeneric("final-test tower failed at every probed prime".into())
    })?;
    let kernel_dim = FAMILY_PARAMS - rank;
    let kernel = if kernel_dim == 1 {
        let (_, lambda) = reconstruct_rationals(
            |field| {
                let (m, _) = mateqns_modp(field, t, family, SplitOrder::Forward)?;
                let (r, ker) = rank_and_kernel(field, &m);
                if r != rank {
                    return None;
                }
                let ker = ker?;
                Some(ModularImage {
                    signature: vec![
                        1,
                        ker[0].iter().position(|&x| x != 0).unwrap_or(FAMILY_PARAMS),
                    ],
                    entries: ker.into_iter().next().unwrap(),
                })
            },
            ReconstructOptions::default(),
        )?;
        Some(lambda)
    } else {
        None
    };
    Ok(FinalTestSystem {
        raw_rows: 40,
        live_rows,
        rank,
        kernel_dim,
        provenance,
        kernel,
        kernel_invariant,
    })
}

fn rank_and_kernel(field: GfPrime, m: &GfMatrix) -> (usize, Option<Vec<Vec<u64>>>) {
    let rank = m.clone().rank();
    if FAMILY_PARAMS - rank == 1 {
        let ker = m.clone().kernel();
        let mut km = GfMatrix::from_rows(field, ker);
        km.rref();
        (rank, Some(vec![km.row(0).to_vec()]))
    } else {
        (rank, None)
    }
}

/// The final-test matrix modulo one prime: 40 rows (8 cubic generators by 5
/// variables) by 8 lambda columns; returns the matrix with zero rows removed
/// and the live row count.
fn mateqns_modp(
    field: GfPrime,
    t: &QuarticForm,
    family: &ResidueFamily,
    order: SplitOrder,
) -> Option<(GfMatrix, usize)> {
    let tower = build_tower(field, family, order)?;
    debug_assert_eq!(tower.field.modulus(), field.modulus());
    let t_mod: Vec<u64> = t
        .coeffs
        .iter()
        .map(|c| field.from_rational(c))
        .collect::<Option<Vec<u64>>>()?;
    let f_mod = reduce_forms(field, &family.cubic_basis)?;
    let weights: Vec<u64> = monomials(4)
        .iter()
        .map(|e| field.from_bigint(&exponent_weight(e)))
        .collect();
    let pair = |g: &[u64]| -> u64 {
        let mut acc = 0u64;
        for (i, &c) in g.iter().enumerate() {
            if c == 0 || t_mod[i] == 0 {
                continue;
            }
            acc = field.add(acc, field.mul(field.mul(c, t_mod[i]), weights[i]));
        }
        acc
    };
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(40);
    // F(lambda) rows: entry (j, m) = <T, x_j F_m>; identically zero since
    // x_j F_m lies in (I_A)_4
    for j in 0..5 {
        let xj = var_vec(j);
        let row: Vec<u64> = (0..8)
            .map(|m| pair(&mul_poly_modp(field, 1, &xj, 3, &f_mod[m])))
            .collect();
        rows.push(row);
    }
    // lifted rows: entry ((k, j), m) = <T, x_j c_k^(m)>
    for k in 0..7 {
        for j in 0..5 {
            let xj = var_vec(j);
            let row: Vec<u64> = (0..8)
                .map(|m| pair(&mul_poly_modp(field, 1, &xj, 3, &tower.lifted[k][m])))
                .collect();
            rows.push(row);
        }
    }
    let live: Vec<Vec<u64>> = rows
        .into_iter()
        .filter(|r| r.iter().any(|&x| x != 0))
        .collect();
    let live_count = live.len();
    Some((GfMatrix::from_rows(field, live), live_count))
}

fn var_vec(j: usize) -> Vec<u64> {
    let mut v = vec![0u64; dim_graded(1)];
    let mut e = [0u8; 5];
    e[j] = 1;
    v[monomial_index(&e)] = 1;
    v
}

/// Evaluate the lifted cubic generators at a specific rational lambda.
///
/// The raw mapping-cone representatives carry elimination-artifact
/// coefficient heights, so the returned generators are canonicalized first:
/// each is reduced modulo the quadric multiples (I_C)_3 and the eight
/// reductions are put in reduced echelon form. The canonical generators are
/// intrinsic to (A, lambda); together with (I_C)_3 and F(lambda) they still
/// generate the residue ideal in degree 3.
pub fn lift_cubic(
    family: &ResidueFamily,
    lambda: &[Rational],
) -> Result<Vec<GradedForm>, LiaisonError> {
    assert_eq!(lambda.len(), FAMILY_PARAMS);
    if lambda.iter().all(|x| x.is_zero()) {
        return Err(LiaisonError::NonGeneric(
            "lift at lambda = 0 is degenerate".into(),
        ));
    }
    let n3 = dim_graded(3);
    let curve_basis = family.curve_cubics.basis();
    let curve_pivots = family.curve_cubics.pivots().to_vec();
    let imager = |field: GfPrime| {
        let tower = build_tower(field, family, SplitOrder::Forward)?;
        let lam: Vec<u64> = lambda
            .iter()
            .map(|x| field.from_rational(x))
            .collect::<Option<Vec<u64>>>()?;
        let f_mod = reduce_forms(field, &family.cubic_basis)?;
        let curve_mod: Vec<Vec<u64>> = curve_basis
            .iter()
            .map(|b| {
                b.iter()
                    .map(|c| field.from_rational(c))
                    .collect::<Option<Vec<u64>>>()
            })
            .collect::<Option<Vec<Vec<u64>>>>()?;
        let reduce_curve = |v: &mut [u64]| {
            for (row, &p) in curve_mod.iter().zip(&curve_pivots) {
                let c = v[p];
                if c == 0 {
                    continue;
                }
                let m = field.neg(c);
                for (vi, ri) in v.iter_mut().zip(row) {
                    *vi = field.reduce(*vi + m * *ri);
                }
            }
        };
        let mut gens: Vec<Vec<u64>> = Vec::with_capacity(8);
        // F(lambda)
        let mut flam = vec![0u64; n3];
        for (m, fm) in f_mod.iter().enumerate() {
            for (t, &x) in fm.iter().enumerate() {
                flam[t] = field.mul_add(flam[t], lam[m], x);
            }
        }
        reduce_curve(&mut flam);
        gens.push(flam);
        for k in 0..7 {
            let mut c = vec![0u64; n3];
            for m in 0..8 {
                for (t, &x) in tower.lifted[k][m].iter().enumerate() {
                    c[t] = field.mul_add(c[t], lam[m], x);
                }
            }
            reduce_curve(&mut c);
            gens.push(c);
        }
        let mut gm = GfMatrix::from_rows(field, gens);
        let pivots = gm.rref();
        if pivots.len() != 8 {
            return None;
        }
        let mut signature = tower.signature.clone();
        signature.extend(&pivots);
        let mut entries = Vec::with_capacity(8 * n3);
        for r in 0..8 {
            entries.extend_from_slice(gm.row(r));
        }
        Some(ModularImage { signature, entries })
    };
    let (_, flat) = reconstruct_rationals(imager, ReconstructOptions::default())?;
    Ok(flat
        .chunks(n3)
        .map(|c| GradedForm::from_coeffs(3, c.to_vec()).expect("cubic dims"))
        .collect())
}

/// Timing hook: run the lifting tower once for one prime.
pub fn tower_probe_for_timing(field: GfPrime, family: &ResidueFamily) -> bool {
    build_tower(field, family, SplitOrder::Forward).is_some()
}

/// Exact orthogonality oracle: T is orthogonal to every element of the
/// subspace (all apolar pairings with basis vectors vanish, checked with
/// exact arithmetic).
pub fn orthogonal_to_subspace(t: &QuarticForm, space: &Subspace) -> bool {
    assert_eq!(space.ambient(), dim_graded(4));
    space.basis().iter().all(|b| {
        let g = GradedForm::from_coeffs(4, b.clone()).expect("quartic dims");
        apolar_pair(&g, t).is_zero()
    })
}

/// Verify modulo three fresh primes that random lambdas outside the kernel
/// fail the orthogonality test (a nonzero modular pairing certifies a
/// nonzero rational pairing).
pub fn refute_random_lambdas(
    t: &QuarticForm,
    family: &ResidueFamily,
    count: usize,
) -> bool {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(0x9e3779b97f4a7c15);
    let field = certification_field(0);
    let Some((m, _)) = mateqns_modp(field, t, family, SplitOrder::Forward) else {
        return false;
    };
    let mut refuted = 0;
    let mut tries = 0;
    while refuted < count && tries < count * 4 {
        tries += 1;
        let lam: Vec<u64> = (0..8).map(|_| rng.gen_range(1..field.modulus())).collect();
        // M * lambda != 0 certifies the rational failure
        let nonzero = (0..m.rows).any(|r| {
            let mut acc = 0u64;
            for (c, &l) in lam.iter().enumerate() {
                acc = field.mul_add(acc, m.row(r)[c], l);
            }
            acc != 0
        });
        if nonzero {
            refuted += 1;
        }
    }
    refuted >= count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_int;
    use crate::poly::GradedForm;

    fn linear(coeffs: [i64; 5]) -> GradedForm {
        let mut f = GradedForm::zero(1);
        for (i, &c) in coeffs.iter().enumerate() {
            let mut e = [0u8; 5];
            e[i] = 1;
            f.coeffs[monomial_index(&e)] = rat_int(c);
        }
        f
    }

    #[test]
    fn certify_ci_type_1112() {
        // three generic hyperplanes and a quadric: two points, h-vector (1,1)
        let l1 = linear([1, 2, 0, 1, -1]);
        let l2 = linear([0, 1, 1, -2, 3]);
        let l3 = linear([2, -1, 1, 0, 1]);
        let q = linear([1, 1, -1, 1, 2]).multiply(&linear([3, -1, 2, 1, 1]));
        let ci = certify_ci(vec![l1, l2, l3, q]).unwrap();
        assert_eq!(ci.socle(), 1);
        assert_eq!(koszul_hilbert(&ci.degrees, 3), vec![1, 2, 2, 2]);
    }

    #[test]
    fn certify_ci_rejects_degenerate() {
        // repeated hyperplane: not a regular sequence
        let l = linear([1, 2, 3, 4, 5]);
        let err = certify_ci(vec![
            l.clone(),
            l.clone(),
            linear([1, 0, 0, 0, 1]),
            linear([0, 1, 0, 1, 0]).multiply(&linear([1, 0, 1, 0, 1])),
        ])
        .unwrap_err();
        assert!(matches!(err, LiaisonError::NotProper { .. }));
    }
}
