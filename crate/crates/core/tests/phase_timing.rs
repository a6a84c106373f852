use std::time::Instant;
use waring_core::arith::rat_int;
use waring_core::constructor::random_points_in_box_public;
use waring_core::liaison::{certify_ci, lift_cubic, residue_family, residue_points_ideal};

#[test]
fn phases() {
    let t0 = Instant::now();
    let a = random_points_in_box_public(12, 42, 9).unwrap();
    let family = residue_family(&a).unwrap();
    eprintln!("family: {:?}", t0.elapsed());

    let lambda: Vec<_> = [3i64, -1, 2, 5, -4, 1, -2, 7].iter().map(|&x| rat_int(x)).collect();
    let t1 = Instant::now();
    let lifted = lift_cubic(&family, &lambda).unwrap();
    eprintln!("lift_cubic: {:?}", t1.elapsed());

    let t2 = Instant::now();
    let mut gens = family.quadrics.clone();
    gens.push(family.cubic_at(&lambda));
    let ci = certify_ci(gens).unwrap();
    let _ = &lifted;
    eprintln!("certify_ci: {:?}", t2.elapsed());

    let t3 = Instant::now();
    let pieces = residue_points_ideal(&ci, &a, 4).unwrap();
    eprintln!("residue pieces: {:?} dims {:?}", t3.elapsed(), pieces.iter().map(|p| p.1.dim()).collect::<Vec<_>>());

    let t4 = Instant::now();
    let ia4 = a.ideal_piece(4).unwrap();
    let inter = ia4.intersect(&pieces[3].1).unwrap();
    eprintln!("ideal4+intersect: {:?} dim {}", t4.elapsed(), inter.dim());
}
