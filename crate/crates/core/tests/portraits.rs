use proptest::prelude::*;

use dynaport::arith::Rat;
use dynaport::dynamics::{ProjPoint, RationalMap};
use dynaport::expr::{parse_map, parse_point};
use dynaport::modp::{is_prime, rat_mod};
use dynaport::portraits::{is_squarefree_portrait, portrait_mod_p, search_witnesses, Portrait};

fn q_map(s: &str) -> RationalMap<Rat> {
    parse_map(s).unwrap()
}

/// Whether `x` and `y` have the same reduction, from the exact values
/// (`None` stands for the point at infinity).
fn meet(x: &ProjPoint<Rat>, y: &ProjPoint<Rat>, p: u64) -> bool {
    let red = |z: &ProjPoint<Rat>| z.value().and_then(|v| rat_mod(&v, p));
    red(x) == red(y)
}

#[test]
fn squarefree_portraits_are_doubly_primitive() {
    let primes: Vec<u64> = (2..400).filter(|&p| is_prime(p)).collect();
    let mut seen = 0;
    for src in ["x^2+1", "x^2-2", "x^2+3", "(x^2-1)/x"] {
        let map = q_map(src);
        for a in ["2", "3", "5/2", "-4"] {
            let alpha: ProjPoint<Rat> = parse_point(a).unwrap();
            let orbit = map.orbit(&alpha, 6);
            for m in 0..=3usize {
                for n in 1..=6 - m {
                    for &p in &primes {
                        if !is_squarefree_portrait(&map, &alpha, m, n, p).unwrap_or(false) {
                            continue;
                        }
                        seen += 1;
                        assert!(meet(&orbit[m + n], &orbit[m], p));
                        for u in 0..=m + n {
                            for v in 1..=m + n - u {
                                if u < m || v < n {
                                    assert!(
                                        !meet(&orbit[u + v], &orbit[u], p) || (u >= m && v % n == 0),
                                        "{src} alpha={a} ({m},{n}) p={p}: iterates {u} and {} meet",
                                        u + v
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    assert!(seen > 20, "only {seen} squarefree portraits found");
}

#[test]
fn witnesses_are_independent_of_worker_count() {
    let map = q_map("x^2+1");
    let alpha: ProjPoint<Rat> = parse_point("2").unwrap();
    for (m, n) in [(0, 1), (1, 3), (2, 2)] {
        let one = search_witnesses(&map, &alpha, m, n, 20_000, &[], 1).unwrap();
        let four = search_witnesses(&map, &alpha, m, n, 20_000, &[], 4).unwrap();
        assert_eq!(one, four);
        let primes: Vec<u64> = one.witnesses.iter().map(|w| w.prime).collect();
        assert!(primes.windows(2).all(|w| w[0] < w[1]));
        let skip: Vec<u64> = primes.iter().take(2).copied().collect();
        let fewer = search_witnesses(&map, &alpha, m, n, 20_000, &skip, 2).unwrap();
        assert_eq!(fewer.witnesses.len() + skip.len(), one.witnesses.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn portraits_match_a_plain_walk(c in -6i64..=6, a in -20i64..=20, pi in 0usize..40) {
        let p = (3u64..).filter(|&q| is_prime(q)).nth(pi).unwrap();
        let map = q_map(&format!("x^2 + {c}"));
        let alpha: ProjPoint<Rat> = parse_point(&a.to_string()).unwrap();
        let port = portrait_mod_p(&map, &alpha, p).unwrap();
        let step = |x: u64| (x * x + c.rem_euclid(p as i64) as u64) % p;
        let mut seen = Vec::new();
        let mut x = a.rem_euclid(p as i64) as u64;
        loop {
            if let Some(j) = seen.iter().position(|&s| s == x) {
                prop_assert_eq!(port, Portrait::new(j, seen.len() - j));
                break;
            }
            seen.push(x);
            x = step(x);
        }
    }
}
