use std::time::Instant;
use waring_core::arith::rat_height_digits;
use waring_core::certifier::{certify, Identifiability, RankStatus};
use waring_core::constructor::make_nonidentifiable_12;

#[test]
fn certify_flags_nonid12() {
    let w = make_nonidentifiable_12(1).unwrap();
    let t_heights = w
        .decomposition
        .form()
        .coeffs
        .iter()
        .map(rat_height_digits)
        .max()
        .unwrap();
    eprintln!("T height: {} digits", t_heights);
    let t0 = Instant::now();
    let v = certify(&w.decomposition).unwrap();
    eprintln!("certify: {:?}", t0.elapsed());
    assert_eq!(v.rank_status, RankStatus::RankCertified(12));
    match &v.identifiability {
        Identifiability::NotIdentifiable(wit) => {
            eprintln!("witness lambda height: {:?}", wit.lambda.iter().map(rat_height_digits).max());
            assert_eq!(wit.residue_pieces.len(), 3);
            assert_eq!(wit.residue_pieces[2].1.dim(), 58);
        }
        other => panic!("expected NOT_IDENTIFIABLE, got {}", other.label()),
    }
    let ft = v.evidence.final_test.unwrap();
    assert_eq!(ft.rank, 7);
    assert_eq!(ft.oracle_confirmed, Some(true));
}
