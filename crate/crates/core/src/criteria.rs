//! Identifiability criteria: Kruskal ranks and the reshaped Kruskal
//! criterion, the tangent-space (Terracini) test, the 2n+1 quartic
//! criterion, and the condition battery (i)-(v), (iv') used by the
//! rank-9..13 certification pipelines.

use crate::arith::Rational;
use crate::linalg::{
    all_maximal_minors_nonzero, binomial, combinations_vec, primitive_rows, Matrix, Subspace,
};
use crate::pointsets::{
    base_locus, empty_in_window, BaseLocusReport, BaseLocusVerdict, PointSet, PointSetError,
    SharedQuadricProber,
};
use crate::poly::{dim_graded, monomial_index, GradedForm, QuarticForm, NVARS};
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

/// Errors from criteria evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CriteriaError {
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
    #[error("decomposition is redundant: point {0} is not needed")]
    Redundant(usize),
    #[error("criterion needs exactly {need} points, got {got}")]
    WrongCardinality { need: usize, got: usize },
    #[error("form does not lie in the span of the fourth Veronese images")]
    NotInSpan,
    #[error(transparent)]
    Points(#[from] PointSetError),
}

/// Largest k such that every k-subset of the d-th Veronese images is
/// linearly independent.
pub fn kruskal_rank(a: &PointSet, d: usize) -> usize {
    assert!(d >= 1);
    let m = a.evaluation_matrix(d);
    let full = m.rank();
    if full == a.len() {
        return full;
    }
    // find the smallest dependent subset; k_d is one less than its size
    for k in 1..=full + 1 {
        for subset in combinations_vec(a.len(), k) {
            let rows: Vec<Vec<Rational>> = subset.iter().map(|&i| m.rows[i].clone()).collect();
            if Matrix::new(rows).rank() < k {
                return k - 1;
            }
        }
    }
    full
}

/// Evidence for one Kruskal-rank flag, including the paper-style full minor
/// scan on the stacked Veronese matrix.
#[derive(Debug, Clone, Serialize)]
pub struct KruskalEvidence {
    pub degree: usize,
    pub k: usize,
    pub minors_checked: usize,
    pub all_minors_nonzero: bool,
    pub zero_minor_witness: Option<Vec<usize>>,
}

/// Kruskal rank together with the maximal-minor scan the paper's tests (ii)
/// and (iii) report. For d = 1 the minors are the l-choose-5 row minors of
/// the coordinate matrix; for d >= 2 (with l <= dim R_d) they are the
/// column-choice minors of the stacked Veronese matrix.
pub fn kruskal_with_minors(a: &PointSet, d: usize) -> KruskalEvidence {
    let k = kruskal_rank(a, d);
    let n = dim_graded(d);
    let scan = if d == 1 && a.len() >= NVARS {
        let rows = primitive_rows(
            &a.points()
                .iter()
                .map(|p| p.raw().to_vec())
                .collect::<Vec<_>>(),
        );
        all_maximal_minors_nonzero(&rows)
    } else {
        // transpose so rows >= cols, minors = column choices
        let m = a.evaluation_matrix(d);
        let rows = primitive_rows(&m.rows);
        let t: Vec<Vec<crate::arith::Integer>> = (0..n)
            .map(|c| rows.iter().map(|r| r[c].clone()).collect())
            .collect();
        all_maximal_minors_nonzero(&t)
    };
    KruskalEvidence {
        degree: d,
        k,
        minors_checked: scan.total,
        all_minors_nonzero: scan.all_nonzero,
        zero_minor_witness: scan.zero_witness,
    }
}

/// Rank of the stacked tangent-space matrix of v_d at the points of A
/// (5 rows per point). The affine span dimension; the projective dimension
/// is one less.
pub fn terracini_rank(a: &PointSet, d: usize) -> usize {
    let mut rows = Vec::with_capacity(NVARS * a.len());
    for p in a.points() {
        rows.extend(p.tangent_rows(d));
    }
    Matrix::new(rows).rank()
}

#[derive(Debug, Clone, Serialize)]
pub struct TerraciniEvidence {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub expected: usize,
    pub projective_dim: usize,
}

pub fn terracini_evidence(a: &PointSet, d: usize) -> TerraciniEvidence {
    let rank = terracini_rank(a, d);
    let rows = NVARS * a.len();
    let cols = dim_graded(d);
    TerraciniEvidence {
        rows,
        cols,
        rank,
        expected: rows.min(cols),
        projective_dim: rank.saturating_sub(1),
    }
}

/// Outcome of a criterion that either certifies or abstains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CriterionVerdict {
    Identifiable,
    Inconclusive,
}

/// Reshaped Kruskal criterion for degree-d forms (d >= 3): identifiable when
/// some partition d = d1+d2+d3 satisfies 2*l(A) <= k_d1 + k_d2 + k_d3 - 2.
pub fn reshaped_kruskal(
    a: &PointSet,
    t: &QuarticForm,
    d: usize,
) -> Result<(CriterionVerdict, Vec<(usize, usize, usize, usize)>), CriteriaError> {
    assert!(d >= 3);
    if let Some(witness) = redundant_point(a, t)? {
        return Err(CriteriaError::Redundant(witness));
    }
    let mut tried = Vec::new();
    let mut k_cache: HashMap<usize, usize> = HashMap::new();
    let mut k_of = |deg: usize, a: &PointSet| -> usize {
        *k_cache.entry(deg).or_insert_with(|| kruskal_rank(a, deg))
    };
    let l = a.len();
    for d1 in 1..=d - 2 {
        for d2 in 1..=d1 {
            let d3 = d as i64 - d1 as i64 - d2 as i64;
            if d3 < 1 || d3 > d2 as i64 {
                continue;
            }
            let d3 = d3 as usize;
            let (k1, k2, k3) = (k_of(d1, a), k_of(d2, a), k_of(d3, a));
            tried.push((d1, d2, d3, k1 + k2 + k3));
            if 2 * l + 2 <= k1 + k2 + k3 {
                return Ok((CriterionVerdict::Identifiable, tried));
            }
        }
    }
    Ok((CriterionVerdict::Inconclusive, tried))
}

/// Index of a point whose Veronese image is not needed to span T, when one
/// exists. T must lie in the span of v4(A) (error otherwise).
pub fn redundant_point(a: &PointSet, t: &QuarticForm) -> Result<Option<usize>, CriteriaError> {
    let full = a.evaluation_matrix(4);
    let full_rank = full.rank();
    if !in_span(&full, full_rank, t) {
        return Err(CriteriaError::NotInSpan);
    }
    for skip in 0..a.len() {
        let sub = a.without(skip);
        let m = sub.evaluation_matrix(4);
        let r = m.rank();
        if in_span(&m, r, t) {
            return Ok(Some(skip));
        }
    }
    Ok(None)
}

/// Exact span membership: rank of the matrix augmented with t stays put.
fn in_span(m: &Matrix, m_rank: usize, t: &QuarticForm) -> bool {
    let mut rows = m.rows.clone();
    rows.push(t.coeffs.clone());
    Matrix::new(rows).rank() == m_rank
}

/// The 2n+1 criterion for quartics (n = 4, nine points): identifiable of
/// rank 9 when v4(A) spans with full rank 9, k1(A) = 5, and the tangent
/// span has the expected rank 2n^2 + 3n + 1 = 45.
pub fn quartic_2n1_criterion(
    a: &PointSet,
    t: &QuarticForm,
) -> Result<(CriterionVerdict, TerraciniEvidence), CriteriaError> {
    if a.len() != 9 {
        return Err(CriteriaError::WrongCardinality {
            need: 9,
            got: a.len(),
        });
    }
    if let Some(witness) = redundant_point(a, t)? {
        return Err(CriteriaError::Redundant(witness));
    }
    let terr = terracini_evidence(a, 4);
    let span_ok = a.evaluation_matrix(4).rank() == 9;
    let k1_ok = kruskal_rank(a, 1) == NVARS;
    let terr_ok = terr.rank == 45;
    let verdict = if span_ok && k1_ok && terr_ok {
        CriterionVerdict::Identifiable
    } else {
        CriterionVerdict::Inconclusive
    };
    Ok((verdict, terr))
}

// ---------------------------------------------------------------------------
// The condition battery (i)-(v)
// ---------------------------------------------------------------------------

/// Which conditions beyond (i)-(iii) the battery evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatteryLevel {
    /// (iv): base locus of the quadrics through A is finite.
    Iv,
    /// (iv'): base locus finite for every 11-subset (and smaller, implied).
    IvPrime,
    /// (iv') plus (v): the base locus is a smooth irreducible curve of
    /// degree 8 with the expected resolution data.
    V,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubsetProbe {
    pub subset: Vec<usize>,
    pub report: BaseLocusReport,
}

/// Structured result of the battery: every true flag carries the numeric
/// evidence that proves it.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub r: usize,
    pub non_redundant: bool,
    pub redundant_witness: Option<usize>,
    pub k1: KruskalEvidence,
    pub k2: KruskalEvidence,
    pub quadric_space_dim: usize,
    pub base_locus_full: Option<BaseLocusReport>,
    pub subset_probes: Vec<SubsetProbe>,
    pub iv_holds: bool,
    pub curve_conditions: Option<CurveEvidence>,
    pub generator_counts: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveEvidence {
    pub is_degree8_curve: bool,
    pub smooth_certificate: bool,
    pub window: Vec<(usize, usize)>,
}

impl ConditionReport {
    pub fn flag_i(&self) -> bool {
        self.non_redundant
    }
    pub fn flag_ii(&self) -> bool {
        self.k1.k == NVARS
    }
    pub fn flag_iii(&self) -> bool {
        self.k2.k == self.r
    }
    pub fn flag_iv(&self) -> bool {
        self.iv_holds
    }
    pub fn flag_v(&self) -> bool {
        self.curve_conditions
            .as_ref()
            .map(|c| c.is_degree8_curve && c.smooth_certificate)
            .unwrap_or(false)
    }
}

/// Cache of base-locus probes keyed by canonical point-set identity, shared
/// across the thirteen subproblems of the rank-13 reduction.
#[derive(Default)]
pub struct ProbeCache {
    map: std::sync::Mutex<HashMap<String, BaseLocusReport>>,
}

impl ProbeCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn get(&self, key: &str) -> Option<BaseLocusReport> {
        self.map.lock().expect("probe cache").get(key).cloned()
    }

    fn put(&self, key: String, value: BaseLocusReport) {
        self.map.lock().expect("probe cache").insert(key, value);
    }
}

/// Evaluate conditions (i)-(iii) plus the requested base-locus level for a
/// decomposition (A, T) with 9 <= r <= 13.
pub fn condition_battery(
    a: &PointSet,
    t: &QuarticForm,
    level: BatteryLevel,
    cache: &ProbeCache,
) -> Result<ConditionReport, CriteriaError> {
    let r = a.len();
    assert!((9..=13).contains(&r), "battery expects 9 <= r <= 13");
    let redundant = redundant_point(a, t)?;
    let k1 = kruskal_with_minors(a, 1);
    let k2 = kruskal_with_minors(a, 2);
    let quadrics = a.ideal_piece(2)?;
    let mut generator_counts = Vec::new();
    for d in 2..=3 {
        generator_counts.push((d, crate::pointsets::min_generator_count(a, d)?));
    }

    let mut report = ConditionReport {
        r,
        non_redundant: redundant.is_none(),
        redundant_witness: redundant,
        k1,
        k2,
        quadric_space_dim: quadrics.dim(),
        base_locus_full: None,
        subset_probes: Vec::new(),
        iv_holds: false,
        curve_conditions: None,
        generator_counts,
    };

    match level {
        BatteryLevel::Iv => {
            let full = cached_base_locus(a, &quadrics, cache);
            report.iv_holds = matches!(full.verdict, BaseLocusVerdict::Finite { length } if length <= 16);
            report.base_locus_full = Some(full);
        }
        BatteryLevel::IvPrime | BatteryLevel::V => {
            report.subset_probes = subset_probes_11(a, &quadrics, cache)?;
            report.iv_holds = report.subset_probes.iter().all(
                |p| matches!(p.report.verdict, BaseLocusVerdict::Finite { length } if length <= 16),
            );
            if level == BatteryLevel::V {
                let full = cached_base_locus(a, &quadrics, cache);
                let is_curve = matches!(
                    full.verdict,
                    BaseLocusVerdict::Curve {
                        degree: 8,
                        constant: -4
                    }
                );
                let smooth = is_curve && smooth_curve_certificate(&quadrics);
                report.curve_conditions = Some(CurveEvidence {
                    is_degree8_curve: is_curve,
                    smooth_certificate: smooth,
                    window: full.window.clone(),
                });
                report.base_locus_full = Some(full);
            }
        }
    }
    Ok(report)
}

/// Cache-aware standalone probe, shared with the certifier's subset-closed
/// condition (iv) enumeration.
pub fn cached_base_locus(a: &PointSet, quadrics: &Subspace, cache: &ProbeCache) -> BaseLocusReport {
    let key = a.canonical_key();
    if let Some(hit) = cache.get(&key) {
        return hit;
    }
    let report = base_locus(quadrics);
    cache.put(key, report.clone());
    report
}

/// Probe the base locus of every 11-subset of A, sharing the echelonized
/// multiples of the quadrics through the full set across all probes.
fn subset_probes_11(
    a: &PointSet,
    full_quadrics: &Subspace,
    cache: &ProbeCache,
) -> Result<Vec<SubsetProbe>, CriteriaError> {
    let r = a.len();
    let subsets = combinations_vec(r, 11.min(r));
    // resolve cache hits first
    let mut jobs: Vec<(Vec<usize>, PointSet, String)> = Vec::new();
    let mut done: HashMap<usize, SubsetProbe> = HashMap::new();
    for (idx, subset) in subsets.iter().enumerate() {
        let sub = a.subset(subset);
        let key = sub.canonical_key();
        if let Some(hit) = cache.get(&key) {
            done.insert(
                idx,
                SubsetProbe {
                    subset: subset.clone(),
                    report: hit,
                },
            );
        } else {
            jobs.push((subset.clone(), sub, key));
        }
    }
    // extra quadrics per job, exact
    let mut prepared: Vec<(Vec<usize>, String, Vec<Vec<Rational>>)> = Vec::new();
    for (subset, sub, key) in jobs {
        let piece = sub.ideal_piece(2)?;
        let mut extras = Vec::new();
        let mut seen = full_quadrics.clone();
        for b in piece.basis() {
            let red = seen.reduce(b);
            if !red.iter().all(|x| x.is_zero()) {
                extras.push(b.clone());
                seen = seen.sum(&Subspace::from_rows(dim_graded(2), vec![b.clone()])?)?;
            }
        }
        prepared.push((subset, key, extras));
    }
    // probe with the fixed prime and per-probe retry on undetermined windows
    let probed: Vec<(Vec<usize>, String, BaseLocusReport)> = {
        let mut results: Vec<Option<(Vec<usize>, String, BaseLocusReport)>> =
            (0..prepared.len()).map(|_| None).collect();
        let probers: Vec<Option<SharedQuadricProber>> = (0..3)
            .map(|i| {
                SharedQuadricProber::new(
                    crate::arith::certification_field(i),
                    full_quadrics.basis(),
                )
            })
            .collect();
        results
            .par_iter_mut()
            .zip(prepared.par_iter())
            .for_each(|(slot, (subset, key, extras))| {
                let mut window: Option<Vec<(usize, usize)>> = None;
                let mut verdict = BaseLocusVerdict::Undetermined;
                for prober in probers.iter().flatten() {
                    if let Some(w) = prober.probe(extras) {
                        let merged = match window.take() {
                            None => w,
                            Some(prev) => prev
                                .into_iter()
                                .zip(w)
                                .map(|((d, x), (_, y))| (d, x.min(y)))
                                .collect(),
                        };
                        verdict = crate::pointsets::classify_window_public(&merged);
                        window = Some(merged);
                        if verdict != BaseLocusVerdict::Undetermined {
                            break;
                        }
                    }
                }
                let report = BaseLocusReport {
                    verdict,
                    window: window.unwrap_or_default(),
                };
                *slot = Some((subset.clone(), key.clone(), report));
            });
        results.into_iter().flatten().collect()
    };
    for (_, key, report) in &probed {
        cache.put(key.clone(), report.clone());
    }
    let mut by_subset: HashMap<Vec<usize>, BaseLocusReport> = probed
        .into_iter()
        .map(|(s, _, rep)| (s, rep))
        .collect();
    let mut out = Vec::with_capacity(subsets.len());
    for (idx, subset) in subsets.iter().enumerate() {
        if let Some(hit) = done.remove(&idx) {
            out.push(hit);
        } else {
            let report = by_subset.remove(subset).expect("probe scheduled");
            out.push(SubsetProbe {
                subset: subset.clone(),
                report,
            });
        }
    }
    Ok(out)
}

/// Smoothness certificate for condition (v): the ideal generated by the
/// three quadrics and the ten 3x3 minors of their Jacobian reaches the full
/// graded piece inside the probe window (empty singular locus), and a
/// complete-intersection curve is connected, so smooth implies irreducible.
pub fn smooth_curve_certificate(quadrics: &Subspace) -> bool {
    let mut gens: Vec<GradedForm> = quadrics
        .basis()
        .iter()
        .map(|b| GradedForm::from_coeffs(2, b.clone()).expect("quadric dims"))
        .collect();
    let jac: Vec<Vec<GradedForm>> = gens.iter().map(jacobian_row).collect();
    if jac.len() != 3 {
        return false;
    }
    for cols in combinations_vec(NVARS, 3) {
        gens.push(det3(&jac, &cols));
    }
    empty_in_window(&gens)
}

fn jacobian_row(q: &GradedForm) -> Vec<GradedForm> {
    (0..NVARS)
        .map(|v| {
            let mut d = GradedForm::zero(1);
            for (i, c) in q.coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let e = crate::poly::monomials(2)[i];
                if e[v] == 0 {
                    continue;
                }
                let mut de = e;
                de[v] -= 1;
                d.coeffs[monomial_index(&de)] +=
                    c * Rational::from_integer((e[v] as i64).into());
            }
            d
        })
        .collect()
}

fn det3(jac: &[Vec<GradedForm>], cols: &[usize]) -> GradedForm {
    let mut acc = GradedForm::zero(3);
    let perms: [([usize; 3], i64); 6] = [
        ([0, 1, 2], 1),
        ([0, 2, 1], -1),
        ([1, 0, 2], -1),
        ([1, 2, 0], 1),
        ([2, 0, 1], 1),
        ([2, 1, 0], -1),
    ];
    for (perm, sgn) in perms {
        let prod = jac[0][cols[perm[0]]]
            .multiply(&jac[1][cols[perm[1]]])
            .multiply(&jac[2][cols[perm[2]]]);
        for (a, b) in acc.coeffs.iter_mut().zip(prod.coeffs) {
            *a += Rational::from_integer(sgn.into()) * b;
        }
    }
    acc
}

/// Sanity count used by tests: expected number of column minors for the
/// (iii) evidence of an r-point set.
pub fn expected_k2_minors(r: usize) -> usize {
    binomial(dim_graded(2), r)
}
