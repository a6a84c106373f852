//! The bundled identifiable reference instance must reproduce its known
//! exact invariants: full Veronese rank 12, all 792 and 455 maximal minors
//! nonzero, tangent-span rank 60, and a full-rank (8) final-test system.

use waring_core::constructor::reference_identifiable_12;
use waring_core::criteria::{kruskal_with_minors, terracini_evidence};
use waring_core::liaison::{build_mateqns, residue_family};
use waring_core::poly::weighted_veronese_sum;

#[test]
fn reference_instance_invariants() {
    let (a, w) = reference_identifiable_12();
    let t = weighted_veronese_sum(a.points(), &w);

    assert_eq!(a.evaluation_matrix(4).rank(), 12);

    let k1 = kruskal_with_minors(&a, 1);
    assert_eq!(k1.k, 5);
    assert_eq!(k1.minors_checked, 792);
    assert!(k1.all_minors_nonzero);

    let k2 = kruskal_with_minors(&a, 2);
    assert_eq!(k2.k, 12);
    assert_eq!(k2.minors_checked, 455);
    assert!(k2.all_minors_nonzero);

    let terr = terracini_evidence(&a, 4);
    assert_eq!((terr.rows, terr.cols), (60, 70));
    assert_eq!(terr.rank, 60);
    assert_eq!(terr.projective_dim, 59);

    let family = residue_family(&a).unwrap();
    let system = build_mateqns(&t, &a, &family).unwrap();
    eprintln!(
        "final test: rank {} kernel {} live rows {} invariant {}",
        system.rank, system.kernel_dim, system.live_rows, system.kernel_invariant
    );
    assert_eq!(system.rank, 8);
    assert_eq!(system.kernel_dim, 0);
    assert!(system.kernel_invariant);
}
