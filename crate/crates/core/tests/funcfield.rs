use proptest::prelude::*;

use dynaport::dynamics::{ProjPoint, RationalMap};
use dynaport::expr::{parse_map, parse_point};
use dynaport::factor::{factor_rational_poly, DEFAULT_FACTOR_CAP};
use dynaport::funcfield::{
    distinct_factor_count, ff_ord, ff_portrait_at_place, ff_search_witnesses, ff_squarefree_profile, gleason_check,
    FFPlace, PlaceOrbit, ProfileEntry, DEFAULT_PLACE_STEPS,
};
use dynaport::{Poly, Rat, RatFunc};

fn t_poly(max_deg: usize) -> impl Strategy<Value = Poly<Rat>> {
    prop::collection::vec(-4i64..=4, 1..=max_deg + 1)
        .prop_map(|v| Poly::from_i64s(&v))
        .prop_filter("nonzero", |p| !p.is_zero())
}

fn places_of(p: &Poly<Rat>) -> Vec<FFPlace> {
    if p.deg() == 0 {
        return Vec::new();
    }
    factor_rational_poly(p, DEFAULT_FACTOR_CAP)
        .unwrap()
        .factors
        .into_iter()
        .map(|(q, _)| FFPlace::finite(&q).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_formula_and_height(num in t_poly(4), den in t_poly(3)) {
        let f = RatFunc::new(num, den);
        let mut places = places_of(f.num());
        places.extend(places_of(f.den()));
        places.push(FFPlace::Infinity);
        let ords: Vec<(i64, i64)> = places
            .iter()
            .map(|v| (ff_ord(&f, v).unwrap(), v.weight() as i64))
            .collect();
        prop_assert_eq!(ords.iter().map(|(o, w)| o * w).sum::<i64>(), 0);
        let poles: i64 = ords.iter().map(|(o, w)| (-o).max(0) * w).sum();
        prop_assert_eq!(poles, f.height() as i64);
    }

    #[test]
    fn profile_accounts_for_every_root(a in t_poly(2), b in t_poly(2), c in t_poly(1)) {
        let g = &(&a * &b.pow(2)) * &c.pow(3);
        prop_assume!(g.deg() > 0);
        let profile = ff_squarefree_profile(&g).unwrap();
        prop_assert_eq!(profile.expand(), g.monic());
        prop_assert!(profile.complete);
        let total: usize = profile
            .entries
            .iter()
            .map(|(e, _)| match e {
                ProfileEntry::Place(v) => v.weight(),
                ProfileEntry::Block(b) => b.deg(),
            })
            .sum();
        prop_assert_eq!(total, distinct_factor_count(&g));
    }
}

fn ff_map(s: &str) -> RationalMap<RatFunc> {
    parse_map(s).unwrap()
}

#[test]
fn witnesses_have_simple_valuation_and_the_right_portrait() {
    let map = ff_map("x^2 + t");
    let mut found = 0;
    for a in ["0", "1", "t", "t+1", "2t-1"] {
        let alpha: ProjPoint<RatFunc> = parse_point(a).unwrap();
        for (m, n) in [(0, 1), (0, 2), (1, 1), (1, 2), (2, 1)] {
            let s = match ff_search_witnesses(&map, &alpha, m, n, 2) {
                Ok(s) => s,
                Err(dynaport::Error::Preperiodic(_)) => continue,
                Err(e) => panic!("{a} ({m},{n}): {e}"),
            };
            for w in &s.witnesses {
                found += 1;
                assert_eq!(w.valuation, 1, "{a} ({m},{n}) at {:?}", w.place);
                let FFPlace::Finite(pi) = &w.place else {
                    panic!("witness at infinity");
                };
                let walk = ff_portrait_at_place(&map, &alpha, pi, DEFAULT_PLACE_STEPS).unwrap();
                assert_eq!(walk.portrait(), Some(w.portrait));
                assert_eq!((w.portrait.m, w.portrait.n), (m, n));
            }
        }
    }
    assert!(found > 0);
}

#[test]
fn place_orbits_are_stable_under_a_larger_step_cap() {
    let map = ff_map("x^2 + t");
    let alpha: ProjPoint<RatFunc> = parse_point("t").unwrap();
    for pi in [[0, 1], [1, 1], [-1, 1], [2, 1], [3, 1]] {
        let pi = Poly::from_i64s(&pi);
        let short = ff_portrait_at_place(&map, &alpha, &pi, 16).unwrap();
        let long = ff_portrait_at_place(&map, &alpha, &pi, 32).unwrap();
        match short {
            PlaceOrbit::Undecided { .. } => {}
            _ => assert_eq!(short, long, "place {pi}"),
        }
    }
}

#[test]
fn gleason_holds_for_x2_plus_t() {
    let r = gleason_check(&ff_map("x^2 + t"), 6).unwrap();
    assert_eq!(r.len(), 6);
    assert!(r.iter().all(|(_, ok)| *ok), "{r:?}");
}
