use waring_core::arith::{rat_height_digits, rat_int};
use waring_core::constructor::random_points_in_box_public;
use waring_core::liaison::{lift_cubic, residue_family};

#[test]
fn lifted_heights() {
    let a = random_points_in_box_public(12, 42, 9).unwrap();
    let family = residue_family(&a).unwrap();
    for (i, q) in family.quadrics.iter().enumerate() {
        let h = q.coeffs.iter().map(rat_height_digits).max().unwrap();
        eprintln!("quadric {} height: {} digits", i, h);
    }
    let h = family.cubic_basis.iter().flat_map(|f| f.coeffs.iter().map(rat_height_digits)).max().unwrap();
    eprintln!("cubic basis height: {} digits", h);
    let lambda: Vec<_> = [3i64, -1, 2, 5, -4, 1, -2, 7].iter().map(|&x| rat_int(x)).collect();
    let lifted = lift_cubic(&family, &lambda).unwrap();
    let h = lifted.iter().flat_map(|f| f.coeffs.iter().map(rat_height_digits)).max().unwrap();
    eprintln!("lifted height: {} digits", h);
}
