//! A regenerated non-identifiable rank-12 instance must drive the final
//! test to rank exactly 7 with a one-dimensional, splitting-invariant
//! kernel whose direction passes the exact orthogonality oracle.

use std::time::Instant;
use waring_core::constructor::make_nonidentifiable_12;
use waring_core::liaison::{build_mateqns, residue_family};

#[test]
fn nonid12_final_test_rank_seven() {
    let t0 = Instant::now();
    let w = make_nonidentifiable_12(1).unwrap();
    eprintln!("construct: {:?}", t0.elapsed());
    let a = w.decomposition.points();
    let t = w.decomposition.form();
    assert_eq!(a.len(), 12);
    assert!(w.decomposition.weights().len() == 12);

    let t1 = Instant::now();
    let family = residue_family(a).unwrap();
    let system = build_mateqns(t, a, &family).unwrap();
    eprintln!(
        "mateqns: {:?} rank {} kernel_dim {} invariant {}",
        t1.elapsed(),
        system.rank,
        system.kernel_dim,
        system.kernel_invariant
    );
    assert_eq!(system.rank, 7);
    assert_eq!(system.kernel_dim, 1);
    assert!(system.kernel_invariant);
    assert!(system.kernel.is_some());
}
