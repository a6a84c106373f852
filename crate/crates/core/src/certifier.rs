//! Orchestration: given a Waring expression of a quartic in five variables,
//! dispatch on the length r and produce a verdict on minimality (rank) and
//! uniqueness (identifiability) with a complete evidence trail.

use crate::arith::Rational;
use crate::criteria::{
    cached_base_locus, condition_battery, quartic_2n1_criterion, reshaped_kruskal,
    terracini_evidence, BatteryLevel, ConditionReport, CriteriaError, CriterionVerdict,
    ProbeCache, TerraciniEvidence,
};
use crate::liaison::{
    build_mateqns, certify_ci, orthogonal_to_subspace, refute_random_lambdas, residue_family,
    residue_points_ideal, LiaisonError,
};
use crate::linalg::{LinalgError, Matrix, Subspace, Verify};
use crate::pointsets::{hilbert_data, BaseLocusVerdict, HilbertData, PointSet, PointSetError};
use crate::poly::{weighted_veronese_sum, QuarticForm};
use num_traits::Zero;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Errors from certification input validation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CertifierError {
    #[error("weight {0} is zero")]
    ZeroWeight(usize),
    #[error("points and weights have different lengths: {points} vs {weights}")]
    LengthMismatch { points: usize, weights: usize },
    #[error("expression length {0} exceeds 13: identifiability is excluded for r >= 14")]
    TooLong(usize),
    #[error("expression is empty")]
    Empty,
    #[error("the Veronese images of the points are linearly dependent")]
    DependentPowers,
    #[error("form is not in the span of the fourth powers")]
    FormOutsideSpan,
    #[error(transparent)]
    Points(#[from] PointSetError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error(transparent)]
    Liaison(#[from] LiaisonError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A candidate Waring expression: points, nonzero weights, and the derived
/// form (always recomputed from the points and weights, never trusted).
#[derive(Debug, Clone)]
pub struct Decomposition {
    points: PointSet,
    weights: Vec<Rational>,
    form: QuarticForm,
}

impl Decomposition {
    pub fn new(points: PointSet, weights: Vec<Rational>) -> Result<Self, CertifierError> {
        if points.is_empty() {
            return Err(CertifierError::Empty);
        }
        if points.len() != weights.len() {
            return Err(CertifierError::LengthMismatch {
                points: points.len(),
                weights: weights.len(),
            });
        }
        if let Some(i) = weights.iter().position(|w| w.is_zero()) {
            return Err(CertifierError::ZeroWeight(i));
        }
        let form = weighted_veronese_sum(points.points(), &weights);
        Ok(Self {
            points,
            weights,
            form,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn form(&self) -> &QuarticForm {
        &self.form
    }
}

/// Rank certification outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RankStatus {
    RankCertified(usize),
    Inconclusive,
}

/// A certified alternative decomposition, carried as exact data.
#[derive(Debug, Clone)]
pub struct AlternativeWitness {
    /// Family parameters of the alternative cubic (kernel of the final
    /// test system).
    pub lambda: Vec<Rational>,
    /// Exact degree-2..4 pieces of the residue ideal.
    pub residue_pieces: Vec<(usize, Subspace)>,
    /// Index of the removed point, for rank-13 reductions (None at r = 12).
    pub reduction_index: Option<usize>,
}

/// Identifiability outcome.
#[derive(Debug, Clone)]
pub enum Identifiability {
    Identifiable,
    NotIdentifiable(Box<AlternativeWitness>),
    Undetermined { reason: String },
    CannotHandle { reason: String },
}

impl Identifiability {
    pub fn label(&self) -> &'static str {
        match self {
            Identifiability::Identifiable => "IDENTIFIABLE",
            Identifiability::NotIdentifiable(_) => "NOT_IDENTIFIABLE",
            Identifiability::Undetermined { .. } => "UNDETERMINED",
            Identifiability::CannotHandle { .. } => "CANNOT_HANDLE",
        }
    }
}

/// Summary of the final-test system for the evidence trail.
#[derive(Debug, Clone, Serialize)]
pub struct FinalTestEvidence {
    pub raw_rows: usize,
    pub live_rows: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    pub kernel_invariant: bool,
    pub oracle_confirmed: Option<bool>,
}

/// The full evidence trail of a verdict.
#[derive(Debug, Clone, Serialize, Default)]
pub struct Evidence {
    pub r: usize,
    pub veronese_rank: Option<usize>,
    pub veronese_hash: Option<String>,
    pub hilbert: Option<HilbertSummary>,
    pub conditions: Option<ConditionReport>,
    pub terracini: Option<TerraciniEvidence>,
    pub final_test: Option<FinalTestEvidence>,
    pub kruskal_partitions: Vec<(usize, usize, usize, usize)>,
    pub reduction: Vec<ReductionStep>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HilbertSummary {
    pub values: Vec<usize>,
    pub first_difference: Vec<i64>,
    pub h_vector: Vec<i64>,
}

impl From<&HilbertData> for HilbertSummary {
    fn from(h: &HilbertData) -> Self {
        Self {
            values: h.values.clone(),
            first_difference: h.first_difference.clone(),
            h_vector: h.h_vector.clone(),
        }
    }
}

/// Per-subproblem record of the rank-13 reduction.
#[derive(Debug, Clone, Serialize)]
pub struct ReductionStep {
    pub removed: usize,
    pub outcome: String,
}

/// The structured certification result.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub rank_status: RankStatus,
    pub identifiability: Identifiability,
    pub evidence: Evidence,
}

/// Recover the unique weights expressing T over v4(A), or a certificate
/// that T lies outside the span. Requires the Veronese images to be
/// linearly independent.
pub fn recover_weights(
    t: &QuarticForm,
    a: &PointSet,
) -> Result<Vec<Rational>, CertifierError> {
    let m = a.evaluation_matrix(4);
    if m.rank() != a.len() {
        return Err(CertifierError::DependentPowers);
    }
    // solve (V^T) w = t exactly: columns indexed by points
    let cols = a.len();
    let rows: Vec<Vec<Rational>> = (0..t.coeffs.len())
        .map(|alpha| (0..cols).map(|i| m.rows[i][alpha].clone()).collect())
        .collect();
    match Matrix::new(rows).solve(&t.coeffs, Verify::Exact) {
        Ok(w) => Ok(w),
        Err(LinalgError::Inconsistent) => Err(CertifierError::FormOutsideSpan),
        Err(e) => Err(e.into()),
    }
}

fn hash_matrix(m: &Matrix) -> String {
    let mut hasher = Sha256::new();
    for row in &m.rows {
        for x in row {
            hasher.update(x.to_string().as_bytes());
            hasher.update(b",");
        }
        hasher.update(b";");
    }
    format!("{:x}", hasher.finalize())
}

/// Certify a Waring expression: is its length the rank, and is it the
/// unique expression of that length?
pub fn certify(d: &Decomposition) -> Result<Verdict, CertifierError> {
    let r = d.len();
    if r > 13 {
        return Err(CertifierError::TooLong(r));
    }
    let cache = ProbeCache::new();
    let a = d.points();
    let t = d.form();
    let mut evidence = Evidence {
        r,
        ..Default::default()
    };
    let eval4 = a.evaluation_matrix(4);
    evidence.veronese_rank = Some(eval4.rank());
    evidence.veronese_hash = Some(hash_matrix(&eval4));
    evidence.hilbert = Some((&hilbert_data(a, 5)).into());

    if r <= 8 {
        return certify_small(d, evidence);
    }
    if r == 9 {
        return certify_nine(d, evidence);
    }
    if r <= 11 {
        return certify_10_11(d, evidence, &cache);
    }
    if r == 12 {
        let (rank_status, identifiability, ev) = certify_twelve(a, t, &cache, None)?;
        let mut evidence = merge_evidence(evidence, ev);
        soundness_gate(&identifiability, &mut evidence);
        return Ok(Verdict {
            rank_status,
            identifiability,
            evidence,
        });
    }
    certify_thirteen(d, evidence, &cache)
}

fn merge_evidence(mut base: Evidence, twelve: Evidence) -> Evidence {
    base.conditions = twelve.conditions;
    base.terracini = twelve.terracini;
    base.final_test = twelve.final_test;
    base.notes.extend(twelve.notes);
    base.reduction = twelve.reduction;
    base
}

/// No IDENTIFIABLE verdict may survive a deficient tangent span, a false
/// condition flag, or a missing final-test certificate.
fn soundness_gate(identifiability: &Identifiability, evidence: &mut Evidence) {
    if matches!(identifiability, Identifiability::Identifiable) {
        let conds_ok = evidence
            .conditions
            .as_ref()
            .map(|c| c.flag_i() && c.flag_ii() && c.flag_iii() && c.flag_iv())
            .unwrap_or(false);
        let terr_ok = evidence
            .terracini
            .as_ref()
            .map(|t| t.rank == t.expected)
            .unwrap_or(true);
        assert!(
            conds_ok && terr_ok,
            "soundness gate: IDENTIFIABLE without supporting evidence"
        );
        evidence.notes.push("soundness gate passed".into());
    }
}

fn certify_small(d: &Decomposition, mut evidence: Evidence) -> Result<Verdict, CertifierError> {
    match reshaped_kruskal(d.points(), d.form(), 4) {
        Ok((CriterionVerdict::Identifiable, tried)) => {
            evidence.kruskal_partitions = tried;
            Ok(Verdict {
                rank_status: RankStatus::RankCertified(d.len()),
                identifiability: Identifiability::Identifiable,
                evidence,
            })
        }
        Ok((CriterionVerdict::Inconclusive, tried)) => {
            evidence.kruskal_partitions = tried;
            Ok(Verdict {
                rank_status: RankStatus::Inconclusive,
                identifiability: Identifiability::CannotHandle {
                    reason: "reshaped Kruskal bound not met for any partition".into(),
                },
                evidence,
            })
        }
        Err(CriteriaError::Redundant(i)) => Ok(Verdict {
            rank_status: RankStatus::Inconclusive,
            identifiability: Identifiability::CannotHandle {
                reason: format!("expression is redundant at point {i}"),
            },
            evidence,
        }),
        Err(e) => Err(e.into()),
    }
}

fn certify_nine(d: &Decomposition, mut evidence: Evidence) -> Result<Verdict, CertifierError> {
    match quartic_2n1_criterion(d.points(), d.form()) {
        Ok((verdict, terr)) => {
            evidence.terracini = Some(terr);
            match verdict {
                CriterionVerdict::Identifiable => Ok(Verdict {
                    rank_status: RankStatus::RankCertified(9),
                    identifiability: Identifiability::Identifiable,
                    evidence,
                }),
                CriterionVerdict::Inconclusive => Ok(Verdict {
                    rank_status: RankStatus::Inconclusive,
                    identifiability: Identifiability::CannotHandle {
                        reason: "nine-point criterion conditions not all satisfied".into(),
                    },
                    evidence,
                }),
            }
        }
        Err(CriteriaError::Redundant(i)) => Ok(Verdict {
            rank_status: RankStatus::Inconclusive,
            identifiability: Identifiability::CannotHandle {
                reason: format!("expression is redundant at point {i}"),
            },
            evidence,
        }),
        Err(e) => Err(e.into()),
    }
}

fn certify_10_11(
    d: &Decomposition,
    mut evidence: Evidence,
    cache: &ProbeCache,
) -> Result<Verdict, CertifierError> {
    let a = d.points();
    let t = d.form();
    let report = condition_battery(a, t, BatteryLevel::Iv, cache)?;
    let rank_ok = report.flag_i() && report.flag_ii() && report.flag_iii();
    let rank_status = if rank_ok {
        RankStatus::RankCertified(d.len())
    } else {
        RankStatus::Inconclusive
    };
    // subset-closed condition (iv): probe every subset of size >= 9 as well
    let mut subsets_ok = report.flag_iv();
    if rank_ok && subsets_ok {
        'outer: for size in 9..d.len() {
            for subset in crate::linalg::combinations_vec(d.len(), size) {
                let sub = a.subset(&subset);
                let quadrics = sub.ideal_piece(2)?;
                let bl = cached_base_locus(&sub, &quadrics, cache).verdict;
                if !matches!(bl, BaseLocusVerdict::Finite { length } if length <= 16) {
                    subsets_ok = false;
                    evidence
                        .notes
                        .push(format!("condition (iv) fails on subset {subset:?}"));
                    break 'outer;
                }
            }
        }
    }
    let identifiability = if !rank_ok {
        Identifiability::CannotHandle {
            reason: "conditions (i)-(iii) not all satisfied".into(),
        }
    } else if subsets_ok {
        Identifiability::Identifiable
    } else {
        Identifiability::CannotHandle {
            reason: "base locus finiteness fails for the set or one of its subsets".into(),
        }
    };
    evidence.conditions = Some(report);
    soundness_gate(&identifiability, &mut evidence);
    Ok(Verdict {
        rank_status,
        identifiability,
        evidence,
    })
}

/// The rank-12 pipeline shared between direct certification and the
/// rank-13 per-point reduction.
fn certify_twelve(
    a: &PointSet,
    t: &QuarticForm,
    cache: &ProbeCache,
    reduction_index: Option<usize>,
) -> Result<(RankStatus, Identifiability, Evidence), CertifierError> {
    let mut evidence = Evidence {
        r: 12,
        ..Default::default()
    };
    let report = condition_battery(a, t, BatteryLevel::V, cache)?;
    let rank_ok = report.flag_i() && report.flag_ii() && report.flag_iii();
    let rank_status = if rank_ok {
        RankStatus::RankCertified(12)
    } else {
        RankStatus::Inconclusive
    };
    let terr = terracini_evidence(a, 4);
    let terr_ok = terr.rank == 60;
    evidence.terracini = Some(terr);
    let flags_ok = rank_ok && report.flag_iv() && report.flag_v() && terr_ok;
    evidence.conditions = Some(report);
    if !flags_ok {
        let reason = "conditions (i)-(v) or the tangent-span test failed".to_string();
        return Ok((
            rank_status,
            Identifiability::CannotHandle { reason },
            evidence,
        ));
    }
    let family = match residue_family(a) {
        Ok(f) => f,
        Err(LiaisonError::NonGeneric(reason)) => {
            return Ok((
                rank_status,
                Identifiability::CannotHandle { reason },
                evidence,
            ))
        }
        Err(e) => return Err(e.into()),
    };
    let system = build_mateqns(t, a, &family)?;
    let mut final_ev = FinalTestEvidence {
        raw_rows: system.raw_rows,
        live_rows: system.live_rows,
        rank: system.rank,
        kernel_dim: system.kernel_dim,
        kernel_invariant: system.kernel_invariant,
        oracle_confirmed: None,
    };
    if !system.kernel_invariant {
        evidence.final_test = Some(final_ev);
        return Ok((
            rank_status,
            Identifiability::CannotHandle {
                reason: "final-test kernel depends on the lifting splitting".into(),
            },
            evidence,
        ));
    }
    let identifiability = match (system.rank, system.kernel.clone()) {
        (8, _) => Identifiability::Identifiable,
        (7, Some(lambda)) => {
            // oracle: the residue ideal at lambda is orthogonal to T, and
            // random parameters away from the kernel are refuted
            let oracle = confirm_alternative(t, a, &family, &lambda)?;
            final_ev.oracle_confirmed = Some(oracle.is_some());
            match oracle {
                Some(residue_pieces) => {
                    Identifiability::NotIdentifiable(Box::new(AlternativeWitness {
                        lambda,
                        residue_pieces,
                        reduction_index,
                    }))
                }
                None => Identifiability::CannotHandle {
                    reason: "final-test kernel failed the exact orthogonality oracle".into(),
                },
            }
        }
        (rank, _) => Identifiability::CannotHandle {
            reason: format!("final-test system has unexpected rank {rank}"),
        },
    };
    evidence.final_test = Some(final_ev);
    Ok((rank_status, identifiability, evidence))
}

/// The full nonlinear confirmation of a final-test kernel direction: rebuild
/// the complete intersection at lambda, certify it, recompute the residue
/// pieces by the direct degreewise colon, and check T's orthogonality to the
/// whole degree-4 piece with exact arithmetic; also refute twenty random
/// parameter choices away from the kernel.
fn confirm_alternative(
    t: &QuarticForm,
    a: &PointSet,
    family: &crate::liaison::ResidueFamily,
    lambda: &[Rational],
) -> Result<Option<Vec<(usize, Subspace)>>, CertifierError> {
    let mut gens = family.quadrics.clone();
    gens.push(family.cubic_at(lambda));
    let ci = match certify_ci(gens) {
        Ok(ci) => ci,
        Err(LiaisonError::NotProper { .. }) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let pieces = residue_points_ideal(&ci, a, 4)?;
    let ib4 = pieces
        .iter()
        .find(|(d, _)| *d == 4)
        .map(|(_, s)| s.clone())
        .expect("degree 4 piece requested");
    if ib4.dim() != 58 {
        return Ok(None);
    }
    if !orthogonal_to_subspace(t, &ib4) {
        return Ok(None);
    }
    if !refute_random_lambdas(t, family, 20) {
        return Ok(None);
    }
    let kept: Vec<(usize, Subspace)> = pieces.into_iter().filter(|(d, _)| *d >= 2).collect();
    Ok(Some(kept))
}

fn certify_thirteen(
    d: &Decomposition,
    mut evidence: Evidence,
    cache: &ProbeCache,
) -> Result<Verdict, CertifierError> {
    let a = d.points();
    let t = d.form();
    let report = condition_battery(a, t, BatteryLevel::IvPrime, cache)?;
    let rank_ok =
        report.flag_i() && report.flag_ii() && report.flag_iii() && report.flag_iv();
    evidence.terracini = Some(terracini_evidence(a, 4));
    let rank_status = if rank_ok {
        RankStatus::RankCertified(13)
    } else {
        RankStatus::Inconclusive
    };
    evidence.conditions = Some(report);
    if !rank_ok {
        return Ok(Verdict {
            rank_status,
            identifiability: Identifiability::CannotHandle {
                reason: "conditions (i)-(iii), (iv') not all satisfied".into(),
            },
            evidence,
        });
    }
    // per-point reduction: certify T - w_i v4(P_i) against A minus P_i
    let weights = recover_weights(t, a)?;
    let mut steps = Vec::with_capacity(13);
    let mut witness: Option<AlternativeWitness> = None;
    let mut cannot: Option<String> = None;
    for i in 0..13 {
        let sub = a.without(i);
        let mut t_sub = t.clone();
        let v = a.points()[i].veronese(4);
        for (c, x) in t_sub.coeffs.iter_mut().zip(v) {
            *c -= &weights[i] * x;
        }
        let (sub_rank, sub_id, _sub_ev) = certify_twelve(&sub, &t_sub, cache, Some(i))?;
        let outcome = match (&sub_rank, &sub_id) {
            (RankStatus::RankCertified(12), id) => id.label().to_string(),
            _ => "RANK_UNCERTIFIED".to_string(),
        };
        steps.push(ReductionStep {
            removed: i,
            outcome: outcome.clone(),
        });
        match sub_id {
            Identifiability::NotIdentifiable(w) => {
                witness.get_or_insert(*w);
            }
            Identifiability::Identifiable => {}
            Identifiability::CannotHandle { reason } | Identifiability::Undetermined { reason } => {
                cannot.get_or_insert(format!("subproblem {i}: {reason}"));
            }
        }
    }
    evidence.reduction = steps;
    let identifiability = if let Some(w) = witness {
        Identifiability::NotIdentifiable(Box::new(w))
    } else if let Some(reason) = cannot {
        Identifiability::CannotHandle { reason }
    } else {
        Identifiability::Undetermined {
            reason: "all thirteen reductions are identifiable; membership in the \
                     residual ten-dimensional family is outside this certifier's scope"
                .into(),
        }
    };
    Ok(Verdict {
        rank_status,
        identifiability,
        evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructor::{random_points, random_weights};
    use rand::SeedableRng;

    #[test]
    fn decomposition_validation() {
        let a = random_points(3, 5).unwrap();
        let err =
            Decomposition::new(a.clone(), vec![Rational::zero(); 3]).unwrap_err();
        assert_eq!(err, CertifierError::ZeroWeight(0));
        let err = Decomposition::new(a, vec![Rational::from_integer(1.into()); 2]).unwrap_err();
        assert!(matches!(err, CertifierError::LengthMismatch { .. }));
    }

    #[test]
    fn recover_weights_roundtrip() {
        let a = random_points(7, 11).unwrap();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(99);
        let w = random_weights(&mut rng, 7);
        let d = Decomposition::new(a.clone(), w.clone()).unwrap();
        assert_eq!(recover_weights(d.form(), &a).unwrap(), w);
        // a form outside the span yields the inconsistency certificate
        let mut t = d.form().clone();
        t.coeffs[0] += Rational::from_integer(1.into());
        // perturbing one coefficient leaves the span with overwhelming
        // likelihood for these fixtures
        assert!(matches!(
            recover_weights(&t, &a),
            Err(CertifierError::FormOutsideSpan)
        ));
    }

    #[test]
    fn reshaped_kruskal_certifies_rank_two() {
        let a = random_points(2, 3).unwrap();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(4);
        let w = random_weights(&mut rng, 2);
        let d = Decomposition::new(a, w).unwrap();
        let v = certify(&d).unwrap();
        assert_eq!(v.rank_status, RankStatus::RankCertified(2));
        assert!(matches!(v.identifiability, Identifiability::Identifiable));
    }

    #[test]
    fn r_14_is_rejected() {
        let a = random_points(14, 21).unwrap();
        let w = vec![Rational::from_integer(1.into()); 14];
        let d = Decomposition::new(a, w).unwrap();
        assert_eq!(certify(&d).unwrap_err(), CertifierError::TooLong(14));
    }
}
