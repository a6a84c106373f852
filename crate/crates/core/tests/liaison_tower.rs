//! The lifted residue generators must agree with the direct degreewise colon
//! computation: for a sampled lambda, the span of the quadric multiples and
//! the eight lifted cubics equals the colon piece (I_Z(lambda) : I_A)_3, and
//! in degree 4 the residue ideal piece is 58-dimensional with the expected
//! intersection against (I_A)_4.

use waring_core::arith::{rat_int, Rational};
use waring_core::constructor::random_points_in_box_public as random_points_small;
use waring_core::liaison::{certify_ci, lift_cubic, residue_family, residue_points_ideal};
use waring_core::linalg::Subspace;
use waring_core::pointsets::ideal_generators;
use waring_core::poly::dim_graded;

#[test]
fn lift_matches_direct_colon() {
    let a = random_points_small(12, 42, 9).unwrap();
    let family = residue_family(&a).unwrap();
    assert_eq!(family.quadrics.len(), 3);
    assert_eq!(family.cubic_basis.len(), 8);
    assert_eq!(family.curve_cubics.dim(), 15);

    // sample lambda
    let lambda: Vec<Rational> = (1..=8).map(|i| rat_int([3, -1, 2, 5, -4, 1, -2, 7][i - 1])).collect();
    let lifted = lift_cubic(&family, &lambda).unwrap();
    assert_eq!(lifted.len(), 8);

    // the complete intersection at lambda
    let mut gens = family.quadrics.clone();
    gens.push(family.cubic_at(&lambda));
    let ci = certify_ci(gens).unwrap();
    assert_eq!(ci.socle(), 5);

    // direct colon in degree 3
    let pieces = residue_points_ideal(&ci, &a, 4).unwrap();
    let ib3 = &pieces[2].1;
    let ib4 = &pieces[3].1;
    assert_eq!(ib3.dim(), 23, "residue degree-3 piece");
    assert_eq!(ib4.dim(), 58, "residue degree-4 piece");

    // span{(I_C)_3, lifted cubics} == (I_B)_3
    let mut rows: Vec<Vec<Rational>> = family.curve_cubics.basis().to_vec();
    for c in &lifted {
        rows.push(c.coeffs.clone());
    }
    let span = Subspace::from_rows(dim_graded(3), rows).unwrap();
    assert_eq!(span.dim(), 23);
    assert_eq!(&span, ib3, "lifted span equals the direct colon");

    // dimension bookkeeping in degree 4: dim((I_B)_4 cap (I_A)_4) = 47
    let a_gens = ideal_generators(&a, 3).unwrap();
    let _ = a_gens;
    let ia4 = a.ideal_piece(4).unwrap();
    assert_eq!(ia4.dim(), 58);
    let inter = ia4.intersect(ib4).unwrap();
    assert_eq!(inter.dim(), 47);
    let sum = ia4.sum(ib4).unwrap();
    assert_eq!(sum.dim(), 69, "codimension 1 in R_4");
}
