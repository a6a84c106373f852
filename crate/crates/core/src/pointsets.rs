//! Finite point sets in P^4 and the degreewise calculus of their ideals:
//! evaluation matrices, Hilbert data, minimal-generator counts,
//! Cayley-Bacharach checks, base-locus analysis, degreewise colon ideals and
//! complete-intersection h-vectors.

use crate::arith::{certification_field, GfPrime, Rational};
use crate::linalg::{GfEchelon, GfMatrix, LinalgError, Matrix, Subspace, Verify};
use crate::poly::{dim_graded, monomial_index, monomials, GradedForm, ProjectivePoint, NVARS};
use num_traits::Zero;

/// Errors from point-set operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PointSetError {
    #[error("repeated point at indices {0} and {1}")]
    RepeatedPoint(usize, usize),
    #[error("operation needs at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("inconsistent linkage data: negative entry at index {0}")]
    NegativeLinkage(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A finite set of pairwise distinct points of P^4.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<ProjectivePoint>,
}

impl PointSet {
    pub fn new(points: Vec<ProjectivePoint>) -> Result<Self, PointSetError> {
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(PointSetError::RepeatedPoint(i, j));
                }
            }
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ProjectivePoint] {
        &self.points
    }

    /// Subset by indices (indices must be distinct and in range).
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
        }
    }

    /// All points except the one at `skip`.
    pub fn without(&self, skip: usize) -> Self {
        let points = self
            .points
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, p)| p.clone())
            .collect();
        Self { points }
    }

    /// Stable identity string built from canonical coordinates, usable as a
    /// cache key.
    pub fn canonical_key(&self) -> String {
        let mut parts: Vec<String> = self
            .points
            .iter()
            .map(|p| {
                p.canonical()
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        parts.sort();
        parts.join(";")
    }

    /// The l(A) x dim R_d matrix whose row i is veronese(P_i, d).
    pub fn evaluation_matrix(&self, d: usize) -> Matrix {
        Matrix::new(self.points.iter().map(|p| p.veronese(d)).collect())
    }

    /// Plain monomial evaluations (no multinomial weights); same rank as the
    /// Veronese matrix, and its kernel is exactly the space of degree-d forms
    /// vanishing on the set.
    pub fn monomial_evaluation_rows(&self, d: usize) -> Vec<Vec<Rational>> {
        self.points
            .iter()
            .map(|p| {
                monomials(d)
                    .iter()
                    .map(|e| {
                        let mut c = Rational::from_integer(1.into());
                        for (k, &ek) in e.iter().enumerate() {
                            for _ in 0..ek {
                                c *= &p.raw()[k];
                            }
                        }
                        c
                    })
                    .collect()
            })
            .collect()
    }

    /// Hilbert function value h_A(d) = rank of the evaluation matrix.
    pub fn hilbert_value(&self, d: usize) -> usize {
        if d == 0 {
            return usize::from(!self.is_empty());
        }
        self.evaluation_matrix(d).rank()
    }

    /// All degree-d forms vanishing on the set, as a canonical subspace of
    /// R_d. The kernel is certified exactly.
    pub fn ideal_piece(&self, d: usize) -> Result<Subspace, PointSetError> {
        let m = Matrix::new(self.monomial_evaluation_rows(d));
        Ok(m.kernel(Verify::Exact)?)
    }
}

/// Hilbert function values, first difference and h-vector up to a degree
/// bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertData {
    pub values: Vec<usize>,
    pub first_difference: Vec<i64>,
    pub h_vector: Vec<i64>,
}

impl HilbertData {
    pub fn from_values(values: Vec<usize>) -> Self {
        let mut first_difference = Vec::with_capacity(values.len());
        for (j, &h) in values.iter().enumerate() {
            let prev = if j == 0 { 0 } else { values[j - 1] };
            first_difference.push(h as i64 - prev as i64);
        }
        let last_nonzero = first_difference.iter().rposition(|&x| x != 0);
        let h_vector = match last_nonzero {
            Some(k) => first_difference[..=k].to_vec(),
            None => vec![],
        };
        Self {
            values,
            first_difference,
            h_vector,
        }
    }
}

/// Hilbert data of a point set up to degree `d_max`.
pub fn hilbert_data(a: &PointSet, d_max: usize) -> HilbertData {
    let mut values = Vec::with_capacity(d_max + 1);
    let mut stabilized = false;
    for d in 0..=d_max {
        if stabilized {
            values.push(a.len());
            continue;
        }
        let h = a.hilbert_value(d);
        // separation persists: once h hits l(A), it stays there
        if h == a.len() {
            stabilized = true;
        }
        values.push(h);
    }
    HilbertData::from_values(values)
}

/// Degree-d piece of the ideal generated by `gens`:
/// span{ m * g : g generator, m monomial of degree d - deg g }.
pub fn generated_piece(gens: &[GradedForm], d: usize) -> Result<Subspace, PointSetError> {
    let rows = multiples_rows(gens, d);
    Ok(Subspace::from_rows(dim_graded(d), rows)?)
}

/// All monomial-multiple rows of `gens` in degree d, over the rationals.
pub fn multiples_rows(gens: &[GradedForm], d: usize) -> Vec<Vec<Rational>> {
    let mut rows = Vec::new();
    for g in gens {
        assert!(g.degree <= d, "generator degree exceeds target degree");
        let shift = d - g.degree;
        for m in monomials(shift) {
            let mut row = vec![Rational::zero(); dim_graded(d)];
            for (i, c) in g.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut e = monomials(g.degree)[i];
                for (k, &mk) in m.iter().enumerate() {
                    e[k] += mk;
                }
                row[monomial_index(&e)] = c.clone();
            }
            rows.push(row);
        }
    }
    rows
}

/// Same rows reduced modulo a prime; `None` when a denominator vanishes.
pub fn multiples_rows_modp(
    field: GfPrime,
    gens: &[(usize, Vec<u64>)],
    d: usize,
) -> Vec<Vec<u64>> {
    let mut rows = Vec::new();
    for (deg, coeffs) in gens {
        let shift = d - deg;
        for m in monomials(shift) {
            let mut row = vec![0u64; dim_graded(d)];
            for (i, &c) in coeffs.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let mut e = monomials(*deg)[i];
                for (k, &mk) in m.iter().enumerate() {
                    e[k] += mk;
                }
                row[monomial_index(&e)] = c;
            }
            rows.push(row);
        }
    }
    let _ = field;
    rows
}

/// Dimension of the degree-d generated piece, exact.
///
/// Modular fast path: a modular rank meeting `cap` (when the caller knows a
/// structural upper bound, e.g. the dimension of an enclosing ideal piece)
/// is exact. Falls back to fraction-free elimination otherwise.
pub fn generated_dim_exact(gens: &[GradedForm], d: usize, cap: Option<usize>) -> usize {
    let nrows: usize = gens.iter().map(|g| dim_graded(d - g.degree)).sum();
    let hard_cap = nrows.min(dim_graded(d)).min(cap.unwrap_or(usize::MAX));
    for idx in 0..3 {
        let field = certification_field(idx);
        let gens_p: Option<Vec<(usize, Vec<u64>)>> = gens
            .iter()
            .map(|g| {
                g.coeffs
                    .iter()
                    .map(|c| field.from_rational(c))
                    .collect::<Option<Vec<u64>>>()
                    .map(|v| (g.degree, v))
            })
            .collect();
        if let Some(gens_p) = gens_p {
            let rows = multiples_rows_modp(field, &gens_p, d);
            let r = GfMatrix::from_rows(field, rows).rank();
            if r == hard_cap {
                return r;
            }
        }
    }
    let rows = multiples_rows(gens, d);
    crate::linalg::rational_rank_exact(&rows)
}

/// Number of minimal generators of I_A in degree d: the part of (I_A)_d not
/// reached by multiples of the lower-degree pieces.
pub fn min_generator_count(a: &PointSet, d: usize) -> Result<usize, PointSetError> {
    assert!(d >= 1);
    let piece = a.ideal_piece(d)?;
    if d <= 1 {
        return Ok(piece.dim());
    }
    let lower = a.ideal_piece(d - 1)?;
    if lower.dim() == 0 {
        return Ok(piece.dim());
    }
    let gens: Vec<GradedForm> = lower
        .basis()
        .iter()
        .map(|b| GradedForm::from_coeffs(d - 1, b.clone()).expect("basis has graded dims"))
        .collect();
    let generated = generated_dim_exact(&gens, d, Some(piece.dim()));
    Ok(piece.dim() - generated)
}

/// Cayley-Bacharach property in degree i: removing any single point does not
/// enlarge the degree-i ideal piece.
pub fn cayley_bacharach(z: &PointSet, i: usize) -> Result<bool, PointSetError> {
    if z.len() < 2 {
        return Err(PointSetError::TooFewPoints {
            need: 2,
            got: z.len(),
        });
    }
    if i == 0 {
        return Ok(true);
    }
    let full = dim_graded(i) - z.hilbert_value(i);
    for skip in 0..z.len() {
        let reduced = z.without(skip);
        let dim = dim_graded(i) - reduced.hilbert_value(i);
        if dim != full {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The inequality of the Cayley-Bacharach growth theorem:
/// Dh(0) + .. + Dh(j) <= Dh(i+1-j) + .. + Dh(i+1).
pub fn cb_inequality(dh: &[i64], i: usize, j: usize) -> bool {
    assert!(j <= i + 1);
    let get = |k: usize| dh.get(k).copied().unwrap_or(0);
    let lhs: i64 = (0..=j).map(get).sum();
    let rhs: i64 = (i + 1 - j..=i + 1).map(get).sum();
    lhs <= rhs
}

/// Coefficients of prod_i (1 + t + .. + t^(d_i - 1)): the h-vector of a
/// complete intersection of the given type.
pub fn koszul_hvector(degrees: &[usize]) -> Vec<i64> {
    assert!(!degrees.is_empty());
    let mut coeffs = vec![1i64];
    for &d in degrees {
        assert!(d >= 1);
        let mut next = vec![0i64; coeffs.len() + d - 1];
        for (i, &c) in coeffs.iter().enumerate() {
            for k in 0..d {
                next[i + k] += c;
            }
        }
        coeffs = next;
    }
    coeffs
}

/// Hilbert function values (cumulative sums of the Koszul h-vector) of a
/// complete intersection, extended constantly past the socle.
pub fn koszul_hilbert(degrees: &[usize], d_max: usize) -> Vec<usize> {
    let hv = koszul_hvector(degrees);
    let mut out = Vec::with_capacity(d_max + 1);
    let mut acc = 0i64;
    for d in 0..=d_max {
        acc += hv.get(d).copied().unwrap_or(0);
        out.push(acc as usize);
    }
    out
}

/// Linkage formula for h-vectors: Dh_B(i) = Dh_Z(i) - Dh_A(socle - i).
pub fn linkage_hvector(
    z_hvec: &[i64],
    a_dh: &[i64],
    socle: usize,
) -> Result<Vec<i64>, PointSetError> {
    let geta = |k: i64| {
        if k < 0 {
            0
        } else {
            a_dh.get(k as usize).copied().unwrap_or(0)
        }
    };
    let mut out = Vec::new();
    for i in 0..=socle {
        let z = z_hvec.get(i).copied().unwrap_or(0);
        let v = z - geta(socle as i64 - i as i64);
        if v < 0 {
            return Err(PointSetError::NegativeLinkage(i));
        }
        out.push(v);
    }
    while out.last() == Some(&0) {
        out.pop();
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Base locus probing
// ---------------------------------------------------------------------------

/// Probe window for Hilbert-polynomial detection.
pub const PROBE_WINDOW: std::ops::RangeInclusive<usize> = 6..=10;

/// Verdict of a base-locus probe.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum BaseLocusVerdict {
    /// Zero-dimensional of the given length.
    Finite { length: usize },
    /// One-dimensional with Hilbert polynomial `degree * t + constant`.
    Curve { degree: i64, constant: i64 },
    /// Window data fits neither pattern.
    Undetermined,
}

/// Base-locus report: the verdict plus the h values on the probe window.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct BaseLocusReport {
    pub verdict: BaseLocusVerdict,
    pub window: Vec<(usize, usize)>,
}

/// Classify a window of (degree, h) samples: constant fits a finite scheme,
/// an exact positive-slope linear fit a curve.
pub fn classify_window_public(window: &[(usize, usize)]) -> BaseLocusVerdict {
    classify_window(window)
}

fn classify_window(window: &[(usize, usize)]) -> BaseLocusVerdict {
    let (d0, h0) = window[0];
    if window.iter().all(|&(_, h)| h == h0) {
        return BaseLocusVerdict::Finite { length: h0 };
    }
    let (d1, h1) = window[1];
    let slope = (h1 as i64 - h0 as i64) / (d1 as i64 - d0 as i64);
    let constant = h0 as i64 - slope * d0 as i64;
    if slope > 0
        && window
            .iter()
            .all(|&(d, h)| h as i64 == slope * d as i64 + constant)
    {
        return BaseLocusVerdict::Curve {
            degree: slope,
            constant,
        };
    }
    BaseLocusVerdict::Undetermined
}

/// h values of R/(gens) over the probe window, modulo one prime. Generators
/// are (degree, coeff vector) pairs. Once a window degree reaches h = 0 the
/// remaining degrees are 0 without further elimination (the piece is all of
/// R_d, and R_1 * R_d = R_(d+1)).
fn window_h_modp(field: GfPrime, gens: &[(usize, Vec<u64>)]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut hit_zero = false;
    for d in PROBE_WINDOW {
        if hit_zero {
            out.push((d, 0));
            continue;
        }
        let rows = multiples_rows_modp(field, gens, d);
        let rank = GfMatrix::from_rows(field, rows).rank();
        let h = dim_graded(d) - rank;
        if h == 0 {
            hit_zero = true;
        }
        out.push((d, h));
    }
    out
}

/// Shared-core prober: the echelonized monomial multiples of a fixed set of
/// core generators are built once per window degree and reused by every
/// probe that extends the core by a few extra quadrics. This is what makes
/// the 11-subset enumeration of condition (iv') affordable.
pub struct SharedQuadricProber {
    field: GfPrime,
    core: Vec<(usize, GfEchelon)>,
}

impl SharedQuadricProber {
    /// Build the core echelons from quadric coefficient vectors.
    pub fn new(field: GfPrime, core_quadrics: &[Vec<Rational>]) -> Option<Self> {
        let gens: Option<Vec<(usize, Vec<u64>)>> = core_quadrics
            .iter()
            .map(|q| {
                q.iter()
                    .map(|c| field.from_rational(c))
                    .collect::<Option<Vec<u64>>>()
                    .map(|v| (2usize, v))
            })
            .collect();
        let gens = gens?;
        let mut core = Vec::new();
        for d in PROBE_WINDOW {
            let mut ech = GfEchelon::new(field, dim_graded(d));
            for row in multiples_rows_modp(field, &gens, d) {
                ech.insert(row);
            }
            core.push((d, ech));
        }
        Some(Self { field, core })
    }

    /// Window h values for core + extra quadrics.
    pub fn probe(&self, extra_quadrics: &[Vec<Rational>]) -> Option<Vec<(usize, usize)>> {
        let extras: Option<Vec<(usize, Vec<u64>)>> = extra_quadrics
            .iter()
            .map(|q| {
                q.iter()
                    .map(|c| self.field.from_rational(c))
                    .collect::<Option<Vec<u64>>>()
                    .map(|v| (2usize, v))
            })
            .collect();
        let extras = extras?;
        let mut out = Vec::new();
        for (d, core_ech) in &self.core {
            let mut ech = core_ech.clone();
            for row in multiples_rows_modp(self.field, &extras, *d) {
                ech.insert(row);
            }
            out.push((*d, dim_graded(*d) - ech.rank()));
        }
        Some(out)
    }
}

/// Base locus of a linear system of quadrics: compute h over the probe
/// window and classify. Starts at the fixed certification prime; when the
/// window fits no pattern, retries two more primes keeping the pointwise
/// minimal h (modular ranks only under-estimate, so the minimum is the best
/// available upper bound on the true h).
pub fn base_locus(quadrics: &Subspace) -> BaseLocusReport {
    assert_eq!(quadrics.ambient(), dim_graded(2));
    assert!(quadrics.dim() > 0, "base locus needs a nonzero system");
    let mut best: Option<Vec<(usize, usize)>> = None;
    for idx in 0..3 {
        let field = certification_field(idx);
        let gens: Option<Vec<(usize, Vec<u64>)>> = quadrics
            .basis()
            .iter()
            .map(|q| {
                q.iter()
                    .map(|c| field.from_rational(c))
                    .collect::<Option<Vec<u64>>>()
                    .map(|v| (2usize, v))
            })
            .collect();
        let Some(gens) = gens else { continue };
        let window = window_h_modp(field, &gens);
        best = Some(match best {
            None => window,
            Some(prev) => prev
                .into_iter()
                .zip(window)
                .map(|((d, a), (_, b))| (d, a.min(b)))
                .collect(),
        });
        let verdict = classify_window(best.as_ref().expect("window"));
        if verdict != BaseLocusVerdict::Undetermined {
            return BaseLocusReport {
                verdict,
                window: best.expect("window"),
            };
        }
    }
    let window = best.unwrap_or_default();
    BaseLocusReport {
        verdict: BaseLocusVerdict::Undetermined,
        window,
    }
}

/// True when the ideal generated by `gens` reaches the full graded piece
/// somewhere in the probe window (the scheme cut out is empty). Used by the
/// smoothness certificate of condition (v).
pub fn empty_in_window(gens: &[GradedForm]) -> bool {
    for idx in 0..3 {
        let field = certification_field(idx);
        let gens_p: Option<Vec<(usize, Vec<u64>)>> = gens
            .iter()
            .map(|g| {
                g.coeffs
                    .iter()
                    .map(|c| field.from_rational(c))
                    .collect::<Option<Vec<u64>>>()
                    .map(|v| (g.degree, v))
            })
            .collect();
        let Some(gens_p) = gens_p else { continue };
        let window = window_h_modp(field, &gens_p);
        if window.iter().any(|&(_, h)| h == 0) {
            return true;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Colon ideals (degreewise)
// ---------------------------------------------------------------------------

/// Reduced-row-echelon data of an ideal piece modulo p with its quotient
/// projection R_d -> R_d / piece (coordinates at non-pivot columns).
struct QuotientModP {
    rref_rows: Vec<Vec<u64>>,
    pivot_row_of_col: Vec<usize>,
    nonpivot_cols: Vec<usize>,
}

impl QuotientModP {
    fn new(field: GfPrime, rows: Vec<Vec<u64>>, cols: usize) -> Self {
        let mut m = GfMatrix::from_rows(field, rows);
        let pivots = m.rref();
        let mut pivot_row_of_col = vec![usize::MAX; cols];
        for (r, &c) in pivots.iter().enumerate() {
            pivot_row_of_col[c] = r;
        }
        let nonpivot_cols = (0..cols)
            .filter(|&c| pivot_row_of_col[c] == usize::MAX)
            .collect();
        let rref_rows = (0..pivots.len()).map(|r| m.row(r).to_vec()).collect();
        Self {
            rref_rows,
            pivot_row_of_col,
            nonpivot_cols,
        }
    }

    fn quotient_dim(&self) -> usize {
        self.nonpivot_cols.len()
    }

    /// Quotient coordinates of a (typically sparse) vector.
    fn project(&self, field: GfPrime, v: &[u64]) -> Vec<u64> {
        let mut out: Vec<u64> = self.nonpivot_cols.iter().map(|&c| v[c]).collect();
        for (c, &x) in v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let r = self.pivot_row_of_col[c];
            if r == usize::MAX {
                continue;
            }
            let row = &self.rref_rows[r];
            for (o, &nc) in out.iter_mut().zip(&self.nonpivot_cols) {
                if row[nc] != 0 {
                    *o = field.sub(*o, field.mul(x, row[nc]));
                }
            }
        }
        out
    }
}

/// Degree-d piece of the colon ideal (z_gens) : (a_gens):
/// { g in R_d : g * f lies in the ideal generated by z_gens, for every f }.
///
/// Computed multimodularly: for each prime, the conditions are assembled in
/// the quotients R_(d+e) / (I_Z)_(d+e), the kernel is canonicalized, and the
/// rational basis is reconstructed (held-out prime verification included).
/// Generators of `a_gens` that coincide with a z generator are skipped: their
/// condition map is identically zero.
pub fn colon_piece(
    z_gens: &[GradedForm],
    a_gens: &[GradedForm],
    d: usize,
) -> Result<Subspace, PointSetError> {
    let n = dim_graded(d);
    let conditions: Vec<&GradedForm> = a_gens
        .iter()
        .filter(|f| !z_gens.iter().any(|z| z == *f))
        .collect();
    if conditions.is_empty() {
        return Ok(Subspace::full(n));
    }
    let imager = |field: GfPrime| {
        let zp = reduce_graded_forms(field, z_gens)?;
        let cp: Option<Vec<(usize, Vec<u64>)>> = conditions
            .iter()
            .map(|f| {
                f.coeffs
                    .iter()
                    .map(|c| field.from_rational(c))
                    .collect::<Option<Vec<u64>>>()
                    .map(|v| (f.degree, v))
            })
            .collect();
        let (basis, pivots) = colon_basis_modp(field, &zp, &cp?, d)?;
        let mut signature = vec![pivots.len()];
        signature.extend(&pivots);
        Some(crate::linalg::ModularImage {
            signature,
            entries: basis.into_iter().flatten().collect(),
        })
    };
    let (sig, flat) =
        crate::linalg::reconstruct_rationals(imager, crate::linalg::ReconstructOptions::default())
            .map_err(LinalgError::Reconstruction)?;
    let dim = sig[0];
    let basis: Vec<Vec<Rational>> = flat.chunks(n).map(|c| c.to_vec()).collect();
    debug_assert_eq!(basis.len(), dim);
    Ok(Subspace::from_rref(n, basis))
}

/// Reduce graded forms to (degree, coefficient) pairs modulo a prime.
pub fn reduce_graded_forms(
    field: GfPrime,
    forms: &[GradedForm],
) -> Option<Vec<(usize, Vec<u64>)>> {
    forms
        .iter()
        .map(|g| {
            g.coeffs
                .iter()
                .map(|c| field.from_rational(c))
                .collect::<Option<Vec<u64>>>()
                .map(|v| (g.degree, v))
        })
        .collect()
}

/// One prime's worth of the degree-d colon kernel: the canonical (rref)
/// basis of { g in R_d : g * f in (z_gens) for all condition forms f },
/// together with its pivot pattern.
pub fn colon_basis_modp(
    field: GfPrime,
    z_gens: &[(usize, Vec<u64>)],
    conditions: &[(usize, Vec<u64>)],
    d: usize,
) -> Option<(Vec<Vec<u64>>, Vec<usize>)> {
    let n = dim_graded(d);
    let mut cond_rows: Vec<Vec<u64>> = Vec::new();
    let mut degrees: Vec<usize> = conditions.iter().map(|(fd, _)| d + fd).collect();
    degrees.sort_unstable();
    degrees.dedup();
    for &e in &degrees {
        let quot = QuotientModP::new(field, multiples_rows_modp(field, z_gens, e), dim_graded(e));
        if quot.quotient_dim() == 0 {
            continue;
        }
        for (fd, fp) in conditions.iter().filter(|(fd, _)| d + fd == e) {
            // rows of the map g -> [g*f] in the quotient, assembled by columns
            let mut cols: Vec<Vec<u64>> = Vec::with_capacity(n);
            for m in monomials(d) {
                let mut prod = vec![0u64; dim_graded(e)];
                for (i, &c) in fp.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let mut exp = monomials(*fd)[i];
                    for (k, &mk) in m.iter().enumerate() {
                        exp[k] += mk;
                    }
                    prod[monomial_index(&exp)] = c;
                }
                cols.push(quot.project(field, &prod));
            }
            let qd = quot.quotient_dim();
            for r in 0..qd {
                cond_rows.push(cols.iter().map(|c| c[r]).collect());
            }
        }
    }
    let m = if cond_rows.is_empty() {
        GfMatrix::zero(field, 1, n)
    } else {
        GfMatrix::from_rows(field, cond_rows)
    };
    let ker = m.kernel();
    let mut km = GfMatrix::from_rows(field, ker);
    let pivots = km.rref();
    let basis = (0..pivots.len()).map(|r| km.row(r).to_vec()).collect();
    Some((basis, pivots))
}

/// Minimal generators of the ideal of a point set up to degree `max_degree`
/// (pieces completed degree by degree; the result spans every piece).
pub fn ideal_generators(a: &PointSet, max_degree: usize) -> Result<Vec<GradedForm>, PointSetError> {
    let mut gens: Vec<GradedForm> = Vec::new();
    for d in 1..=max_degree {
        let piece = a.ideal_piece(d)?;
        if piece.dim() == 0 {
            continue;
        }
        let have: Vec<GradedForm> = gens.clone();
        let generated = if have.is_empty() {
            Subspace::zero(dim_graded(d))
        } else {
            generated_piece(&have, d)?
        };
        if generated.dim() == piece.dim() {
            continue;
        }
        // extend by basis vectors of the piece not reached by multiples
        let mut ext = generated.clone();
        for b in piece.basis() {
            if !ext.contains(b) {
                let g = GradedForm::from_coeffs(d, b.clone()).expect("graded dims");
                ext = ext.sum(&Subspace::from_rows(dim_graded(d), vec![b.clone()])?)?;
                gens.push(g);
            }
        }
    }
    Ok(gens)
}

/// Restriction surjectivity check behind the separation lemma: for a set
/// separated in degree d-1, the map (I_Z)_d -> (R/Lambda)_d surjects for a
/// general linear form Lambda. Realized by substituting the last variable
/// and computing a rank.
pub fn restriction_surjects(
    z: &PointSet,
    d: usize,
    lambda: &GradedForm,
) -> Result<bool, PointSetError> {
    assert_eq!(lambda.degree, 1);
    // solve Lambda = 0 for the last variable with nonzero coefficient
    let coeffs = &lambda.coeffs;
    let var = (0..NVARS)
        .rev()
        .find(|&i| {
            let mut e = [0u8; NVARS];
            e[i] = 1;
            !coeffs[monomial_index(&e)].is_zero()
        })
        .expect("nonzero linear form");
    let mut e_var = [0u8; NVARS];
    e_var[var] = 1;
    let c_var = coeffs[monomial_index(&e_var)].clone();
    // x_var -> -(sum of other terms)/c_var
    let mut replacement = GradedForm::zero(1);
    for i in 0..NVARS {
        if i == var {
            continue;
        }
        let mut e = [0u8; NVARS];
        e[i] = 1;
        let c = &coeffs[monomial_index(&e)];
        if !c.is_zero() {
            replacement.coeffs[monomial_index(&e)] = -(c / &c_var);
        }
    }
    let piece = z.ideal_piece(d)?;
    // substitute into each basis form; the image lives in the span of
    // monomials with zero exponent on `var`
    let target_cols: Vec<usize> = (0..dim_graded(d))
        .filter(|&i| monomials(d)[i][var] == 0)
        .collect();
    let mut rows = Vec::new();
    for b in piece.basis() {
        let g = GradedForm::from_coeffs(d, b.clone()).expect("dims");
        let image = substitute_variable(&g, var, &replacement);
        rows.push(
            target_cols
                .iter()
                .map(|&c| image.coeffs[c].clone())
                .collect::<Vec<_>>(),
        );
    }
    let rank = Matrix::new(rows).rank();
    Ok(rank == crate::linalg::binomial(d + NVARS - 2, NVARS - 2))
}

/// Substitute `x_var := replacement` (a linear form) in a graded form.
pub fn substitute_variable(g: &GradedForm, var: usize, replacement: &GradedForm) -> GradedForm {
    let mut out = GradedForm::zero(g.degree);
    for (i, c) in g.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = monomials(g.degree)[i];
        // start from the monomial with var removed
        let mut term = GradedForm::zero((g.degree as u8 - e[var]) as usize);
        let mut base = e;
        base[var] = 0;
        term.coeffs[monomial_index(&base)] = c.clone();
        for _ in 0..e[var] {
            term = term.multiply(replacement);
        }
        // term now has degree g.degree - e[var] + e[var]*1... pad by nothing:
        // replacement is degree 1, so term has full degree again only after
        // multiplying e[var] times; degrees match g.degree
        debug_assert_eq!(term.degree, g.degree);
        for (k, t) in term.coeffs.iter().enumerate() {
            if !t.is_zero() {
                out.coeffs[k] += t;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_int;

    fn pt(c: [i64; 5]) -> ProjectivePoint {
        ProjectivePoint::from_ints(c).unwrap()
    }

    #[test]
    fn repeated_points_rejected() {
        let e = PointSet::new(vec![pt([1, 2, 3, 4, 5]), pt([2, 4, 6, 8, 10])]).unwrap_err();
        assert_eq!(e, PointSetError::RepeatedPoint(0, 1));
    }

    #[test]
    fn single_point_hilbert() {
        let a = PointSet::new(vec![pt([1, 2, 0, 0, 1])]).unwrap();
        let h = hilbert_data(&a, 4);
        assert_eq!(h.values, vec![1, 1, 1, 1, 1]);
        assert_eq!(h.h_vector, vec![1]);
        assert_eq!(a.evaluation_matrix(3).rank(), 1);
    }

    #[test]
    fn generated_piece_single_variable() {
        let x0 = GradedForm::variable(0);
        let g = generated_piece(&[x0], 2).unwrap();
        assert_eq!(g.dim(), 5);
    }

    #[test]
    fn koszul_hvectors() {
        assert_eq!(koszul_hvector(&[2, 2, 2, 3]), vec![1, 4, 7, 7, 4, 1]);
        assert_eq!(
            koszul_hvector(&[2, 2, 3, 3]),
            vec![1, 4, 8, 10, 8, 4, 1]
        );
        assert_eq!(koszul_hvector(&[1, 1, 1, 2]), vec![1, 1]);
        // partial sum at degree 4 for (2,2,2,3) is 23
        assert_eq!(koszul_hilbert(&[2, 2, 2, 3], 6), vec![1, 5, 12, 19, 23, 24, 24]);
    }

    #[test]
    fn linkage_formula() {
        // type (2,2,2,3), socle 5, Dh_A = (1,4,7) -> Dh_B = (1,4,7)
        let z = koszul_hvector(&[2, 2, 2, 3]);
        assert_eq!(
            linkage_hvector(&z, &[1, 4, 7], 5).unwrap(),
            vec![1, 4, 7]
        );
        // type (2,2,3,3), socle 6, Dh_{A u W} = (1,4,8,10) -> Dh_B = (1,4,8)
        let z = koszul_hvector(&[2, 2, 3, 3]);
        assert_eq!(
            linkage_hvector(&z, &[1, 4, 8, 10], 6).unwrap(),
            vec![1, 4, 8]
        );
        // reversed-complement symmetry: Dh_A a prefix of Dh_Z leaves the
        // reversed tail
        let z = koszul_hvector(&[2, 2, 2, 3]);
        assert_eq!(linkage_hvector(&z, &[1, 4], 5).unwrap(), vec![1, 4, 7, 7]);
        // inconsistent data errors
        assert!(linkage_hvector(&[1, 1], &[5], 1).is_err());
    }

    #[test]
    fn cb_inequality_on_koszul() {
        let dh = koszul_hvector(&[2, 2, 2, 3]);
        // i=4, j=2: 1+4+7 = 12 <= 7+4+1 = 12
        assert!(cb_inequality(&dh, 4, 2));
        let dh13 = koszul_hvector(&[2, 2, 3, 3]);
        let dh13 = linkage_hvector(&dh13, &[1, 4, 8, 10], 6).unwrap();
        let _ = dh13;
    }

    #[test]
    fn cb_two_points_degree_zero() {
        let z = PointSet::new(vec![pt([1, 0, 0, 0, 0]), pt([0, 1, 0, 0, 0])]).unwrap();
        assert!(cayley_bacharach(&z, 0).unwrap());
        assert!(matches!(
            cayley_bacharach(&PointSet::new(vec![pt([1, 0, 0, 0, 0])]).unwrap(), 1),
            Err(PointSetError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn substitution_is_evaluation_compatible() {
        // g = x0^2 + x4^2, substitute x4 -> -x0: expect 2 x0^2
        let mut g = GradedForm::zero(2);
        g.coeffs[monomial_index(&[2, 0, 0, 0, 0])] = rat_int(1);
        g.coeffs[monomial_index(&[0, 0, 0, 0, 2])] = rat_int(1);
        let mut rep = GradedForm::zero(1);
        rep.coeffs[monomial_index(&[1, 0, 0, 0, 0])] = rat_int(-1);
        let s = substitute_variable(&g, 4, &rep);
        assert_eq!(s.coeffs[monomial_index(&[2, 0, 0, 0, 0])], rat_int(2));
    }
}
