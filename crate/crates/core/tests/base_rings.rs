use proptest::prelude::*;

use dynaport::arith::rat;
use dynaport::factor::{factor_rational_poly, DEFAULT_FACTOR_CAP};
use dynaport::quot::QuotField;
use dynaport::{Field, Poly, Rat};

fn poly(max_deg: usize, c: i64) -> impl Strategy<Value = Poly<Rat>> {
    prop::collection::vec(-c..=c, 1..=max_deg + 1).prop_map(|v| Poly::from_i64s(&v))
}

fn nonzero(max_deg: usize, c: i64) -> impl Strategy<Value = Poly<Rat>> {
    poly(max_deg, c).prop_filter("nonzero", |p| !p.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn squarefree_decomposition_reconstructs(a in nonzero(3, 5), b in nonzero(2, 5), c in nonzero(2, 5)) {
        let f = &(&a * &b.pow(2)) * &c.pow(3);
        let parts = f.squarefree_decompose().unwrap();
        let mut prod = Poly::constant(f.lc());
        for (g, k) in &parts {
            prop_assert!(g.is_squarefree());
            prod = &prod * &g.pow(*k as u32);
        }
        prop_assert_eq!(prod, f);
    }

    #[test]
    fn resultant_vanishes_iff_common_factor(a in nonzero(3, 6), b in nonzero(3, 6), shared in prop::bool::ANY, s in nonzero(1, 3)) {
        let (a, b) = if shared && s.deg() > 0 { (&a * &s, &b * &s) } else { (a, b) };
        prop_assume!(a.deg() > 0 && b.deg() > 0);
        let r = Poly::resultant(&a, &b).unwrap();
        prop_assert_eq!(r.is_zero(), Poly::gcd(&a, &b).deg() > 0);
    }

    #[test]
    fn factorization_multiplies_back(a in nonzero(3, 6), b in nonzero(3, 6)) {
        let f = &a * &b;
        prop_assume!(f.deg() > 0);
        let fac = factor_rational_poly(&f, DEFAULT_FACTOR_CAP).unwrap();
        prop_assert_eq!(fac.expand(), f);
        for (q, _) in &fac.factors {
            prop_assert!(q.is_monic());
            // factors of a and b have degree at most 3, where having no
            // rational root proves irreducibility; every rational root of a
            // or b is u/v with |u|, v <= 6
            prop_assert!(q.deg() <= 3);
            if q.deg() > 1 {
                for u in -6i64..=6 {
                    for v in 1i64..=6 {
                        prop_assert!(!q.eval(&rat(u, v)).is_zero(), "{} has root {}/{}", q, u, v);
                    }
                }
            }
        }
    }
}

#[test]
fn quotient_field_inverses() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for modulus in [&[1, 0, 1][..], &[-2, 0, 0, 1], &[1, 1, 0, 0, 1]] {
        let k = QuotField::new(&Poly::from_i64s(modulus)).unwrap();
        let mut done = 0;
        while done < 1000 {
            let coeffs: Vec<i64> = (0..k.degree()).map(|_| rng.gen_range(-9..=9)).collect();
            let x = k.elem(&Poly::from_i64s(&coeffs));
            if x.is_zero() {
                continue;
            }
            assert!((x.clone() * &x.inv()).is_one());
            done += 1;
        }
    }
}

#[test]
fn reducible_modulus_is_rejected() {
    assert!(QuotField::new(&Poly::from_i64s(&[-1, 0, 1])).is_err());
}
