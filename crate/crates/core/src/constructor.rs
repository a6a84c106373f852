//! Instance generators: generic identifiable expressions, and the liaison
//! constructions that produce non-identifiable witnesses for ranks 12 and 13.
//! Everything is seeded and deterministic: one seed, one instance, byte for
//! byte.

use crate::arith::{GfPrime, Rational};
use crate::certifier::{recover_weights, CertifierError, Decomposition};
use crate::criteria;
use crate::liaison::{certify_ci, residue_family, residue_points_ideal, LiaisonError};
use crate::linalg::{
    reconstruct_rationals, GfMatrix, LinalgError, ModularImage, ReconstructOptions, Subspace,
};
use crate::pointsets::{
    colon_basis_modp, ideal_generators, reduce_graded_forms, PointSet, PointSetError,
};
use crate::poly::{
    dim_graded, exponent_weight, monomial_index, monomials, GradedForm, ProjectivePoint,
    QuarticForm, NVARS,
};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Errors from instance construction.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstructError {
    #[error("retry budget exhausted after {0} attempts")]
    RetryBudget(usize),
    #[error(transparent)]
    Points(#[from] PointSetError),
    #[error(transparent)]
    Liaison(#[from] LiaisonError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Certifier(#[from] CertifierError),
    #[error("construction step failed: {0}")]
    Step(String),
}

/// Coordinate box for generic instances, mirroring the magnitudes of the
/// published example data.
pub const GENERIC_COORD_BOX: i64 = 15_000;

/// Coordinate box for the liaison witness constructions (the published
/// non-identifiable example uses this regime); smaller inputs keep the
/// reconstructed rational data at manageable heights.
pub const WITNESS_COORD_BOX: i64 = 50;

const REDRAW_BUDGET: usize = 64;

fn draw_point(rng: &mut ChaCha20Rng, bound: i64) -> ProjectivePoint {
    loop {
        let coords: [i64; NVARS] = std::array::from_fn(|_| rng.gen_range(-bound..=bound));
        if let Ok(p) = ProjectivePoint::from_ints(coords) {
            return p;
        }
    }
}

/// Draw r distinct points inside a coordinate box.
pub fn draw_points(rng: &mut ChaCha20Rng, r: usize, bound: i64) -> Result<PointSet, ConstructError> {
    'attempt: for _ in 0..REDRAW_BUDGET {
        let mut pts = Vec::with_capacity(r);
        for _ in 0..r {
            pts.push(draw_point(rng, bound));
        }
        match PointSet::new(pts) {
            Ok(set) => return Ok(set),
            Err(_) => continue 'attempt,
        }
    }
    Err(ConstructError::RetryBudget(REDRAW_BUDGET))
}

/// Integer-coordinate points from a seeded generator, re-drawn until
/// conditions (ii) k1 = 5 and (iii) k2 = r hold.
pub fn random_points(r: usize, seed: u64) -> Result<PointSet, ConstructError> {
    assert!(r >= 1 && r <= 21, "random_points supports 1 <= r <= 21");
    random_points_in_box(r, seed, GENERIC_COORD_BOX)
}

/// Test hook: draw conditioned points inside an explicit coordinate box.
pub fn random_points_in_box_public(
    r: usize,
    seed: u64,
    bound: i64,
) -> Result<PointSet, ConstructError> {
    random_points_in_box(r, seed, bound)
}

pub(crate) fn random_points_in_box(
    r: usize,
    seed: u64,
    bound: i64,
) -> Result<PointSet, ConstructError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for _ in 0..REDRAW_BUDGET {
        let set = draw_points(&mut rng, r, bound)?;
        let k1_target = r.min(NVARS);
        if criteria::kruskal_rank(&set, 1) != k1_target {
            continue;
        }
        if r <= crate::poly::dim_graded(2) && criteria::kruskal_rank(&set, 2) != r {
            continue;
        }
        return Ok(set);
    }
    Err(ConstructError::RetryBudget(REDRAW_BUDGET))
}

/// Seeded nonzero rational weights (small integers, never zero).
pub fn random_weights(rng: &mut ChaCha20Rng, r: usize) -> Vec<Rational> {
    (0..r)
        .map(|_| {
            let mut x = 0i64;
            while x == 0 {
                x = rng.gen_range(-9..=9);
            }
            Rational::from_integer(x.into())
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Non-identifiable witnesses
// ---------------------------------------------------------------------------

/// A constructed witness instance: the decomposition (points plus recovered
/// weights), the exact residue ideal pieces of the alternative decomposition,
/// and the construction parameters.
#[derive(Debug, Clone)]
pub struct WitnessInstance {
    pub decomposition: Decomposition,
    /// Exact degree-2..4 pieces of the residue ideal I_B.
    pub residue_pieces: Vec<(usize, Subspace)>,
    pub seed: u64,
}

/// The apolar-orthogonal direction of a codimension-1 subspace of R_4,
/// reconstructed from per-prime pipelines. `pieces_modp` must return the
/// rref bases of (I_A)_4 and (I_B)_4 modulo the prime.
fn orthogonal_quartic<F>(pieces_modp: F) -> Result<QuarticForm, ConstructError>
where
    F: Fn(GfPrime) -> Option<(Vec<Vec<u64>>, Vec<Vec<u64>>)> + Sync,
{
    let n4 = dim_graded(4);
    let imager = |field: GfPrime| {
        let (ia4, ib4) = pieces_modp(field)?;
        // pairing matrix rows: u scaled by the apolarity weights
        let weights: Vec<u64> = monomials(4)
            .iter()
            .map(|e| field.from_bigint(&exponent_weight(e)))
            .collect();
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(ia4.len() + ib4.len());
        for u in ia4.iter().chain(ib4.iter()) {
            rows.push(
                u.iter()
                    .zip(&weights)
                    .map(|(&x, &w)| field.mul(x, w))
                    .collect(),
            );
        }
        let m = GfMatrix::from_rows(field, rows);
        let rank = m.clone().rank();
        if rank != n4 - 1 {
            return None;
        }
        let ker = m.kernel();
        let mut km = GfMatrix::from_rows(field, ker);
        let pivots = km.rref();
        if pivots.len() != 1 {
            return None;
        }
        Some(ModularImage {
            signature: vec![pivots[0]],
            entries: km.row(0).to_vec(),
        })
    };
    let (_, coeffs) = reconstruct_rationals(imager, ReconstructOptions::default())
        .map_err(LinalgError::Reconstruction)?;
    Ok(GradedForm::from_coeffs(4, coeffs).expect("quartic dims"))
}

/// Regenerate a non-identifiable rank-12 instance: a generic 12-point A, a
/// generic cubic through it, the residue B of the linkage, and the unique
/// quartic T apolar to both ideals (the span sum has codimension 1), with
/// the weights of T over A recovered exactly and all nonzero.
pub fn make_nonidentifiable_12(seed: u64) -> Result<WitnessInstance, ConstructError> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xA5A5_0001);
    for attempt in 0..REDRAW_BUDGET {
        let sub_seed = seed.wrapping_add(attempt as u64).wrapping_mul(0x9E37_79B9);
        let Ok(a) = random_points_in_box(12, sub_seed, WITNESS_COORD_BOX) else {
            continue;
        };
        let Ok(family) = residue_family(&a) else {
            continue;
        };
        let lambda: Vec<Rational> = random_weights(&mut rng, 8);
        let cubic = family.cubic_at(&lambda);
        let mut ci_gens = family.quadrics.clone();
        ci_gens.push(cubic);
        let ci = match certify_ci(ci_gens) {
            Ok(ci) => ci,
            Err(LiaisonError::NotProper { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        // fused per-prime pipeline for T
        let z_gens = ci.gens.clone();
        let cubic_conditions = family.cubic_basis.clone();
        let eval_rows = a.monomial_evaluation_rows(4);
        let t = orthogonal_quartic(|field| {
            let zp = reduce_graded_forms(field, &z_gens)?;
            let cp = reduce_graded_forms(field, &cubic_conditions)?;
            let (ib4, _) = colon_basis_modp(field, &zp, &cp, 4)?;
            if ib4.len() != 58 {
                return None;
            }
            let ev: Option<Vec<Vec<u64>>> = eval_rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|c| field.from_rational(c))
                        .collect::<Option<Vec<u64>>>()
                })
                .collect();
            let ia4 = GfMatrix::from_rows(field, ev?).kernel();
            let mut km = GfMatrix::from_rows(field, ia4);
            let piv = km.rref();
            if piv.len() != 58 {
                return None;
            }
            let ia4 = (0..piv.len()).map(|r| km.row(r).to_vec()).collect();
            Some((ia4, ib4))
        });
        let Ok(t) = t else { continue };
        let weights = match recover_weights(&t, &a) {
            Ok(w) => w,
            Err(CertifierError::FormOutsideSpan) => continue,
            Err(e) => return Err(e.into()),
        };
        if weights.iter().any(|w| w.is_zero()) {
            continue;
        }
        // exact residue pieces for the witness and the extraction pipeline
        let a_gens = ideal_generators(&a, 3)?;
        let pieces = residue_points_ideal(&ci, &a, 4)?;
        let pieces: Vec<(usize, Subspace)> =
            pieces.into_iter().filter(|(d, _)| *d >= 2).collect();
        let dims: Vec<usize> = pieces.iter().map(|(_, s)| s.dim()).collect();
        if dims != vec![3, 23, 58] {
            continue;
        }
        let _ = a_gens;
        // exact confirmation: T is apolar to the whole degree-4 residue piece
        let ib4 = &pieces[2].1;
        if !crate::liaison::orthogonal_to_subspace(&t, ib4) {
            return Err(ConstructError::Step(
                "constructed form fails exact orthogonality to the residue ideal".into(),
            ));
        }
        let decomposition = Decomposition::new(a, weights)?;
        return Ok(WitnessInstance {
            decomposition,
            residue_pieces: pieces,
            seed,
        });
    }
    Err(ConstructError::RetryBudget(REDRAW_BUDGET))
}

/// A rank-13 instance with two minimal decompositions sharing one point:
/// extend a non-identifiable rank-12 pair by a generic thirteenth point.
/// The per-point reduction at the new point must expose non-identifiability.
pub fn make_nondisjoint_13(seed: u64) -> Result<WitnessInstance, ConstructError> {
    let base = make_nonidentifiable_12(seed)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xA5A5_0013);
    for _ in 0..REDRAW_BUDGET {
        let p13 = draw_point(&mut rng, WITNESS_COORD_BOX);
        let mut points = base.decomposition.points().points().to_vec();
        points.push(p13);
        let Ok(a) = PointSet::new(points) else {
            continue;
        };
        if criteria::kruskal_rank(&a, 1) != 5 || criteria::kruskal_rank(&a, 2) != 13 {
            continue;
        }
        let mut weights = base.decomposition.weights().to_vec();
        let extra = random_weights(&mut rng, 1).pop().expect("one weight");
        weights.push(extra);
        let decomposition = Decomposition::new(a, weights)?;
        return Ok(WitnessInstance {
            decomposition,
            residue_pieces: base.residue_pieces,
            seed,
        });
    }
    Err(ConstructError::RetryBudget(REDRAW_BUDGET))
}

/// Bundled reference instance: a rank-12 identifiable quartic given by
/// twelve integer-coordinate linear forms with unit weights. Used as a
/// regression fixture by the acceptance suite and the CLI.
pub fn reference_identifiable_12() -> (PointSet, Vec<Rational>) {
    let coords: [[i64; NVARS]; 12] = [
        [-1960, 7185, 2948, 1986, -7270],
        [8416, -14232, 8567, 14988, -12297],
        [4210, -11055, -6249, 530, 6066],
        [-6981, 1313, 6692, 12883, 4597],
        [8211, -5857, 6853, -5758, -1890],
        [8633, 6895, 14963, 14147, -405],
        [12697, -10281, 10647, 1414, 11296],
        [-15107, 4696, -6212, 6064, 8777],
        [-14194, -13431, -2768, 6063, -1066],
        [-687, 7327, 9904, 11696, 10323],
        [-262, -14530, 5673, 10210, 5157],
        [-5397, 6232, -7867, -10827, -653],
    ];
    let points = coords
        .iter()
        .map(|&c| ProjectivePoint::from_ints(c).expect("nonzero rows"))
        .collect();
    let set = PointSet::new(points).expect("distinct rows");
    let weights = vec![Rational::from_integer(1.into()); 12];
    (set, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_points_deterministic() {
        let a = random_points(9, 7).unwrap();
        let b = random_points(9, 7).unwrap();
        assert_eq!(a, b);
        let c = random_points(9, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn random_points_generic_simplex() {
        let a = random_points(5, 1).unwrap();
        assert_eq!(criteria::kruskal_rank(&a, 1), 5);
    }
}
