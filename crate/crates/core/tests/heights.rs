use proptest::prelude::*;

use dynaport::arith::{rat, Rat};
use dynaport::dynamics::{ProjPoint, RationalMap};
use dynaport::expr::parse_map;
use dynaport::heights::{
    canonical_height, classify_orbit, height_gap_constant, meeting_bound_q, weil_height, OrbitType,
};
use dynaport::Error;

const MAPS: [&str; 4] = ["x^2+1", "x^2-2", "(x^2-1)/x", "x^3-3x"];

fn map(i: usize) -> RationalMap<Rat> {
    parse_map(MAPS[i]).unwrap()
}

fn point(bound: i64) -> impl Strategy<Value = ProjPoint<Rat>> {
    (-bound..=bound, 1..=bound).prop_map(|(a, b)| ProjPoint::affine(rat(a, b)))
}

#[test]
fn weil_height_moves_by_at_most_the_gap() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for i in 0..MAPS.len() {
        let m = map(i);
        let gap = height_gap_constant(&m);
        let d = m.degree() as f64;
        for _ in 0..1000 {
            let p = ProjPoint::affine(rat(rng.gen_range(-10_000..=10_000), rng.gen_range(1..=10_000)));
            let h = weil_height(&p);
            let hp = weil_height(&m.apply(&p));
            assert!(hp - d * h <= gap.c_up + 1e-9, "{} at {p}: up", MAPS[i]);
            assert!(d * h - hp <= gap.c_low + 1e-9, "{} at {p}: down", MAPS[i]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn canonical_estimates_agree(i in 0usize..MAPS.len(), p in point(40)) {
        let m = map(i);
        let coarse = canonical_height(&m, &p, 1e-2).unwrap();
        let fine = canonical_height(&m, &p, 1e-4).unwrap();
        prop_assert!((coarse.value - fine.value).abs() <= coarse.error_bound + fine.error_bound + 1e-12);
    }

    #[test]
    fn canonical_height_scales_by_degree(i in 0usize..MAPS.len(), p in point(40)) {
        let m = map(i);
        let h = canonical_height(&m, &p, 1e-3).unwrap();
        let hp = canonical_height(&m, &m.apply(&p), 1e-3).unwrap();
        let d = m.degree() as f64;
        prop_assert!((hp.value - d * h.value).abs() <= hp.error_bound + d * h.error_bound + 1e-12);
    }

    #[test]
    fn orbit_classification_is_consistent(i in 0usize..MAPS.len(), p in point(20)) {
        let m = map(i);
        match classify_orbit(&m, &p, 64) {
            Ok(OrbitType::Preperiodic { m: pre, n }) => {
                prop_assert!(n >= 1);
                prop_assert_eq!(m.iterate(&p, pre + n), m.iterate(&p, pre));
            }
            Ok(OrbitType::Wandering { certified_at }) => {
                let escape = height_gap_constant(&m).escape_height(m.degree());
                prop_assert!(weil_height(&m.iterate(&p, certified_at)) > escape);
            }
            Err(e) => {
                let capped = matches!(e, Error::Cap { .. });
                prop_assert!(capped, "{}", e);
            }
        }
    }

    #[test]
    fn meeting_inequality(a in -100_000i64..=100_000, b in 1i64..=100_000, c in -100_000i64..=100_000, e in 1i64..=100_000) {
        let (x, y) = (ProjPoint::affine(rat(a, b)), ProjPoint::affine(rat(c, e)));
        prop_assume!(x != y);
        prop_assert!(meeting_bound_q(&x, &y).unwrap().holds());
    }
}

#[test]
fn chebyshev_fixed_points_are_preperiodic() {
    let m = map(3);
    assert_eq!(
        classify_orbit(&m, &ProjPoint::affine(rat(2, 1)), 64).unwrap(),
        OrbitType::Preperiodic { m: 0, n: 1 }
    );
    assert_eq!(
        classify_orbit(&m, &ProjPoint::affine(rat(1, 1)), 64).unwrap(),
        OrbitType::Preperiodic { m: 1, n: 1 }
    );
    let e = canonical_height(&m, &ProjPoint::affine(rat(2, 1)), 1e-6).unwrap();
    assert!(e.value.abs() <= e.error_bound);
}
