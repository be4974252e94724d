//! The worked examples `x^2 + 1` over `Q`, `x^2 + t` over `Q(t)`, and the two
//! counterexample maps, packaged as checks with expected and observed values.

use num_bigint::BigInt;
use serde::Serialize;

use crate::admissible::{a1_verdict, a2_verdict, verify_certificate, Reason, Status, Verdict};
use crate::arith::Rat;
use crate::base::Base;
use crate::dynamics::{ProjPoint, RationalMap};
use crate::error::{Error, Result};
use crate::expr::{parse_map, parse_point, parse_t_poly, Parse};
use crate::funcfield::{ff_search_witnesses, gleason_check, FFPlace};
use crate::portraits::{difference_factorization, search_witnesses, Portrait};
use crate::ratfunc::RatFunc;

pub const EXAMPLES: [&str; 3] = ["nf-x2p1", "ff-x2pt", "counterexamples"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixtureReport {
    pub example: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Clone, Copy, Debug)]
pub struct FixtureOptions {
    pub threads: usize,
    /// Largest prime scanned by the witness searches.
    pub p_max: u64,
    pub max_m: usize,
    pub max_n: usize,
    pub ff_max_m: usize,
    pub ff_max_n: usize,
    pub gleason_n: usize,
}

impl Default for FixtureOptions {
    fn default() -> Self {
        FixtureOptions {
            threads: 1,
            p_max: 10_000,
            max_m: 10,
            max_n: 6,
            ff_max_m: 6,
            ff_max_n: 3,
            gleason_n: 10,
        }
    }
}

fn check(name: impl Into<String>, expected: impl Into<String>, observed: impl Into<String>) -> Check {
    let (expected, observed) = (expected.into(), observed.into());
    Check {
        name: name.into(),
        passed: expected == observed,
        expected,
        observed,
    }
}

fn symbol(s: Status) -> char {
    match s {
        Status::Yes => 'Y',
        Status::No => 'N',
        Status::Unknown => '?',
    }
}

/// `Y`/`N`/`?` per index, with every `Yes` certificate re-verified; a
/// certificate that fails verification shows up as `!`.
pub fn verdict_pattern<K: Base>(verdicts: &[Verdict<K>]) -> String {
    verdicts
        .iter()
        .map(|v| match (&v.status, &v.certificate) {
            (Status::Yes, Some(c)) if verify_certificate(c).is_err() => '!',
            (Status::Yes, None) => '!',
            (s, _) => symbol(*s),
        })
        .collect()
}

/// The `A_1` pattern for `m = 0..=max_m` when the orbit of `alpha` meets
/// `excluded` at step `hit`: `No` exactly at `hit`.
fn expected_pattern(max_m: usize, hit: Option<usize>) -> String {
    (0..=max_m).map(|m| if Some(m) == hit { 'N' } else { 'Y' }).collect()
}

fn a1_pattern<K: Base>(map: &RationalMap<K>, alpha: &ProjPoint<K>, max_m: usize) -> Result<String> {
    let v: Result<Vec<_>> = (0..=max_m).map(|m| a1_verdict(map, alpha, m)).collect();
    Ok(verdict_pattern(&v?))
}

fn a2_pattern<K: Base>(map: &RationalMap<K>, max_n: usize) -> Result<String> {
    let v: Result<Vec<_>> = (1..=max_n).map(|n| a2_verdict(map, n)).collect();
    Ok(verdict_pattern(&v?))
}

fn map_of<K: Parse>(src: &str) -> RationalMap<K> {
    parse_map(src).expect("fixture map parses")
}

fn point_of<K: Parse>(src: &str) -> ProjPoint<K> {
    parse_point(src).expect("fixture point parses")
}

/// Three orbits of `x^2 + c`: through `c_pt`, through `-c_pt`, and one
/// avoiding both. The exclusion sits at `M` in the first case and `M + 1` in
/// the second.
fn three_cases<K: Parse>(
    checks: &mut Vec<Check>,
    map: &RationalMap<K>,
    cases: [(&str, Option<usize>); 3],
    max_m: usize,
) -> Result<()> {
    for (alpha, hit) in cases {
        let a: ProjPoint<K> = point_of(alpha);
        checks.push(check(
            format!("A1 alpha={alpha} m=0..{max_m}"),
            expected_pattern(max_m, hit),
            a1_pattern(map, &a, max_m)?,
        ));
    }
    Ok(())
}

/// `Some(factorization)` when every prime dividing the difference is at most
/// `p_max`, so a search up to `p_max` is exhaustive.
pub fn exhaustive(
    map: &RationalMap<Rat>,
    alpha: &ProjPoint<Rat>,
    m: usize,
    n: usize,
    p_max: u64,
) -> Result<Option<String>> {
    let Some(f) = difference_factorization(map, alpha, m, n)? else {
        return Ok(None);
    };
    if f.iter().any(|(p, _)| *p > BigInt::from(p_max)) {
        return Ok(None);
    }
    let parts: Vec<String> = f
        .iter()
        .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
        .collect();
    Ok(Some(if parts.is_empty() { "1".into() } else { parts.join("*") }))
}

fn nf_x2p1(opts: &FixtureOptions) -> Result<Vec<Check>> {
    let map: RationalMap<Rat> = map_of("x^2 + 1");
    let mut checks = vec![check(
        format!("A2 n=1..{}", opts.max_n),
        "Y".repeat(opts.max_n),
        a2_pattern(&map, opts.max_n)?,
    )];
    three_cases(
        &mut checks,
        &map,
        [("1", Some(0)), ("-1", Some(1)), ("3", None)],
        opts.max_m,
    )?;
    let alpha: ProjPoint<Rat> = point_of("2");
    for m in 0..=2 {
        for n in 1..=3 {
            let s = search_witnesses(&map, &alpha, m, n, opts.p_max, &[], opts.threads)?;
            let ok = s.witnesses.iter().all(|w| w.verification.passed);
            let (observed, passed) = match (s.witnesses.first(), ok) {
                (_, false) => ("re-verification failed".to_string(), false),
                (Some(w), true) => (format!("found, first p={}", w.prime), true),
                (None, true) => match exhaustive(&map, &alpha, m, n, opts.p_max)? {
                    Some(f) => (format!("none exist, difference = {f}"), true),
                    None => ("none up to p_max".to_string(), false),
                },
            };
            checks.push(Check {
                name: format!("witness alpha=2 (m,n)=({m},{n}) p<={}", opts.p_max),
                expected: "found, or provably none".into(),
                observed,
                passed,
            });
        }
    }
    Ok(checks)
}

fn ff_x2pt(opts: &FixtureOptions) -> Result<Vec<Check>> {
    let map: RationalMap<RatFunc> = map_of("x^2 + t");
    let gleason = gleason_check(&map, opts.gleason_n)?;
    let mut checks = vec![
        check(
            format!("Gleason squarefree n=1..{}", opts.gleason_n),
            "all true",
            if gleason.iter().all(|&(_, s)| s) {
                "all true".to_string()
            } else {
                let bad: Vec<String> = gleason.iter().filter(|(_, s)| !s).map(|(n, _)| n.to_string()).collect();
                format!("fails at n={}", bad.join(","))
            },
        ),
        check(
            format!("A2 n=1..{}", opts.ff_max_n),
            "Y".repeat(opts.ff_max_n),
            a2_pattern(&map, opts.ff_max_n)?,
        ),
    ];
    three_cases(
        &mut checks,
        &map,
        [("t", Some(0)), ("-t", Some(1)), ("t + 3", None)],
        opts.ff_max_m,
    )?;
    let alpha: ProjPoint<RatFunc> = point_of("t");
    let s = ff_search_witnesses(&map, &alpha, 1, 1, opts.threads)?;
    let place = FFPlace::Finite(parse_t_poly("t + 2")?);
    let observed = match s.witnesses.iter().find(|w| w.place == place) {
        Some(w) => format!("place {} portrait {} valuation {}", w.place, w.portrait, w.valuation),
        None => "missing".to_string(),
    };
    checks.push(check(
        "ff witness alpha=t (m,n)=(1,1)",
        format!("place {} portrait {} valuation 1", place, Portrait::new(1, 1)),
        observed,
    ));
    Ok(checks)
}

fn counterexamples(opts: &FixtureOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let map: RationalMap<Rat> = map_of("x + x^2");
    for alpha in ["1", "2", "3", "1/2"] {
        let a: ProjPoint<Rat> = point_of(alpha);
        for m in 0..=2 {
            let s = search_witnesses(&map, &a, m, 1, opts.p_max, &[], opts.threads)?;
            checks.push(check(
                format!("x+x^2 alpha={alpha} (m,n)=({m},1) p<={}", opts.p_max),
                "0 witnesses",
                format!("{} witnesses", s.witnesses.len()),
            ));
        }
    }
    let v = a2_verdict(&map, 1)?;
    checks.push(check("x+x^2 A2 n=1", "N", symbol(v.status).to_string()));
    let map: RationalMap<Rat> = map_of("(x - 1)(x - 2)^2");
    let v = a1_verdict(&map, &point_of("1"), 1)?;
    checks.push(check(
        "(x-1)(x-2)^2 A1 alpha=1 m=1",
        format!("N {:?}", Reason::AllPreimagesRamified),
        format!(
            "{} {}",
            symbol(v.status),
            v.reason.map(|r| format!("{r:?}")).unwrap_or_default()
        ),
    ));
    Ok(checks)
}

pub fn run_fixture(name: &str, opts: &FixtureOptions) -> Result<FixtureReport> {
    let checks = match name {
        "nf-x2p1" => nf_x2p1(opts)?,
        "ff-x2pt" => ff_x2pt(opts)?,
        "counterexamples" => counterexamples(opts)?,
        other => {
            return Err(Error::Invalid(format!(
                "unknown example '{other}' (expected one of {})",
                EXAMPLES.join(", ")
            )))
        }
    };
    Ok(FixtureReport {
        example: name.to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
