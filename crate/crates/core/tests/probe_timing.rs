//! Temporary probe timing experiment.
use std::time::Instant;
use waring_core::constructor::random_points;
use waring_core::pointsets::{base_locus, hilbert_data, BaseLocusVerdict};

#[test]
fn time_generic_probes() {
    for (r, seed) in [(9usize, 1u64), (10, 1), (11, 1), (12, 1)] {
        let t0 = Instant::now();
        let a = random_points(r, seed).unwrap();
        let t1 = Instant::now();
        let h = hilbert_data(&a, 4);
        let t2 = Instant::now();
        let q = a.ideal_piece(2).unwrap();
        let t3 = Instant::now();
        let bl = base_locus(&q);
        let t4 = Instant::now();
        eprintln!(
            "r={} draw={:?} hilbert={:?} (h={:?}) ideal={:?} (dim {}) probe={:?} verdict={:?}",
            r,
            t1 - t0,
            t2 - t1,
            h.values,
            t3 - t2,
            q.dim(),
            t4 - t3,
            bl.verdict
        );
        match r {
            9 => assert_eq!(bl.verdict, BaseLocusVerdict::Finite { length: 9 }),
            10 => assert_eq!(bl.verdict, BaseLocusVerdict::Finite { length: 10 }),
            11 => assert_eq!(bl.verdict, BaseLocusVerdict::Finite { length: 16 }),
            12 => assert_eq!(
                bl.verdict,
                BaseLocusVerdict::Curve {
                    degree: 8,
                    constant: -4
                }
            ),
            _ => unreachable!(),
        }
    }
}
