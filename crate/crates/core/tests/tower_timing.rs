use std::time::Instant;
use waring_core::arith::{certification_field, rat_int};
use waring_core::constructor::random_points_in_box_public;
use waring_core::liaison::{residue_family, tower_probe_for_timing};

#[test]
fn tower_cost() {
    let a = random_points_in_box_public(12, 42, 9).unwrap();
    let family = residue_family(&a).unwrap();
    let t0 = Instant::now();
    let n = 5;
    for i in 0..n {
        let field = certification_field(i);
        assert!(tower_probe_for_timing(field, &family));
    }
    eprintln!("tower avg: {:?}", t0.elapsed() / n as u32);
    let _ = rat_int(1);
}
