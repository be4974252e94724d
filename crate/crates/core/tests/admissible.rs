use proptest::prelude::*;

use dynaport::admissible::{
    a1_verdict, a1_verdict_with, a2_verdict, admissible_table, is_dynamically_unramified, verify_certificate,
    AvoidanceCertificate, Caps, Status, Strategy, Termination, Verdict,
};
use dynaport::arith::{rat, Rat};
use dynaport::dynamics::{PointSet, ProjPoint, RationalMap};
use dynaport::expr::parse_map;
use dynaport::Error;

fn quad(c: i64) -> RationalMap<Rat> {
    parse_map(&format!("x^2 + {c}")).unwrap()
}

/// Shape every verdict must have, with the certificate re-checked from scratch.
fn well_formed(v: &Verdict<Rat>) -> Result<(), TestCaseError> {
    match v.status {
        Status::Yes => {
            let cert = v
                .certificate
                .as_ref()
                .ok_or_else(|| TestCaseError::fail("yes without certificate"))?;
            prop_assert!(v.reason.is_none());
            if let Err(e) = verify_certificate(cert) {
                return Err(TestCaseError::fail(format!("certificate rejected: {e}")));
            }
        }
        Status::No => {
            prop_assert!(v.certificate.is_none());
            prop_assert!(v.reason.is_some());
        }
        Status::Unknown => {
            prop_assert!(v.certificate.is_none());
            prop_assert!(v.bound_hit.is_some());
        }
    }
    Ok(())
}

fn a1(map: &RationalMap<Rat>, alpha: &ProjPoint<Rat>, m: usize, strategy: Strategy) -> Option<Verdict<Rat>> {
    match a1_verdict_with(map, alpha, m, Caps::default(), strategy) {
        Ok(v) => Some(v),
        Err(Error::Preperiodic(_)) => None,
        Err(e) => panic!("{e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn a1_verdicts_are_well_formed(c in -4i64..=4, a in -6i64..=6, b in 1i64..=3, m in 0usize..=3) {
        let alpha = ProjPoint::affine(rat(a, b));
        if let Some(v) = a1(&quad(c), &alpha, m, Strategy::Auto) {
            well_formed(&v)?;
        }
    }

    #[test]
    fn shortcut_never_contradicts_direct_search(c in -4i64..=4, a in -6i64..=6, m in 1usize..=3) {
        let map = quad(c);
        let alpha = ProjPoint::affine(rat(a, 1));
        let (Some(fast), Some(direct)) = (a1(&map, &alpha, m, Strategy::FastOnly), a1(&map, &alpha, m, Strategy::Direct)) else {
            return Ok(());
        };
        well_formed(&fast)?;
        well_formed(&direct)?;
        prop_assert_ne!(fast.status, Status::No);
        if fast.status == Status::Yes {
            prop_assert_ne!(direct.status, Status::No);
        }
    }

    #[test]
    fn a2_verdicts_are_well_formed(c in -4i64..=4, d in 1i64..=4, n in 1usize..=3) {
        let map: RationalMap<Rat> = parse_map(&format!("x^2 + {c}/{d}")).unwrap();
        well_formed(&a2_verdict(&map, n).unwrap())?;
    }

    #[test]
    fn unramified_targets_are_well_formed(c in -4i64..=4, a in -8i64..=8) {
        let v = is_dynamically_unramified(&quad(c), &ProjPoint::affine(rat(a, 1)), Caps::default());
        well_formed(&v)?;
    }
}

fn sample_certificate() -> AvoidanceCertificate<Rat> {
    a1_verdict(&quad(1), &ProjPoint::affine(rat(2, 1)), 2)
        .unwrap()
        .certificate
        .unwrap()
}

#[test]
fn tampering_breaks_certificates() {
    let good = sample_certificate();
    verify_certificate(&good).unwrap();
    let mut tampered = Vec::new();

    let mut c = good.clone();
    c.depth += 1;
    tampered.push(("depth", c));

    let mut c = good.clone();
    c.threshold = -1.0;
    tampered.push(("threshold", c));

    let mut c = good.clone();
    c.classes.clear();
    tampered.push(("classes", c));

    let mut c = good.clone();
    c.node = PointSet::point(&ProjPoint::affine(rat(0, 1)));
    tampered.push(("node", c));

    let mut c = good.clone();
    c.map = quad(2);
    tampered.push(("map", c));

    let mut c = good.clone();
    for class in &mut c.classes {
        match &mut class.termination {
            Termination::CriticalCycleClosed { repeat, .. } => *repeat += 1,
            Termination::HeightDominance { index, .. } => *index += 1,
        }
    }
    tampered.push(("termination", c));

    for (what, c) in tampered {
        assert!(verify_certificate(&c).is_err(), "tampered {what} still verifies");
    }
}

#[test]
fn table_counts_match_entries() {
    let map = quad(1);
    let alpha = ProjPoint::affine(rat(3, 1));
    let t = admissible_table(&map, &alpha, 6, 4, 2).unwrap();
    let count = |v: &[(usize, Verdict<Rat>)], s| v.iter().filter(|(_, x)| x.status == s).count();
    assert_eq!(t.a1_no, count(&t.a1, Status::No));
    assert_eq!(t.a2_unknown, count(&t.a2, Status::Unknown));
    for (m, v) in &t.a1 {
        for (n, w) in &t.a2 {
            let cell = t.cell(*m, *n).unwrap();
            assert_eq!(cell == Status::Yes, v.status == Status::Yes && w.status == Status::Yes);
            assert_eq!(cell == Status::No, v.status == Status::No || w.status == Status::No);
        }
    }
    let serial = admissible_table(&map, &alpha, 6, 4, 1).unwrap();
    assert_eq!(
        serde_json::to_string(&t).unwrap(),
        serde_json::to_string(&serial).unwrap()
    );
}

/// For `x^2 + c` the candidates at `m >= 1` are `-phi^(m-1)(alpha)`. The
/// backward tree above a point dies only at `c`, whose sole preimage is the
/// critical point, so `A_1` fails exactly when `phi^(m-1)(alpha)` is `0` or
/// `-c`, or at `m = 0` when `alpha = c`.
#[test]
fn a1_failures_match_the_critical_orbit_for_quadratics() {
    for (c, alpha) in [
        (1, "2"),
        (1, "-1"),
        (-1, "3"),
        (2, "1/2"),
        (-3, "0"),
        (-2, "1/3"),
        (3, "3"),
    ] {
        let map = quad(c);
        let alpha: ProjPoint<Rat> = dynaport::expr::parse_point(alpha).unwrap();
        let t = admissible_table(&map, &alpha, 8, 1, 2).unwrap();
        assert_eq!(t.a1_unknown, 0, "c={c} alpha={alpha}");
        let orbit = map.orbit(&alpha, 8);
        let is = |p: &ProjPoint<Rat>, v: i64| p.value() == Some(rat(v, 1));
        for (m, v) in &t.a1 {
            let fails = if *m == 0 {
                is(&alpha, c)
            } else {
                is(&orbit[m - 1], 0) || is(&orbit[m - 1], -c)
            };
            assert_eq!(v.status == Status::No, fails, "c={c} alpha={alpha} m={m}");
        }
        assert!(t.a1_no <= 2);
    }
}
