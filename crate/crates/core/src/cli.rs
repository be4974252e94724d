//! The `dynaport` command line: argument parsing, dispatch to the library,
//! and exit codes (0 ok, 1 internal error, 2 usage error, 3 partial result
//! cut short by a cap).

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::admissible::{
    a1_verdict_with, a2_verdict_with, admissible_table, is_dynamically_unramified, Caps, Status, Strategy, Verdict,
    DEFAULT_DEGREE_CAP, DEFAULT_ORBIT_CAP, DEFAULT_PREPERIODIC_STEPS,
};
use crate::base::Base;
use crate::dynamics::{ProjPoint, RationalMap};
use crate::error::{Error, Result};
use crate::expr::{parse_map, parse_point, parse_t_poly, Parse};
use crate::fixtures::{run_fixture, FixtureOptions, EXAMPLES};
use crate::funcfield::{ff_portrait_at_place, ff_search_witnesses, gleason_check, PlaceOrbit, DEFAULT_PLACE_STEPS};
use crate::heights::{canonical_height, classify_orbit, height_gap_constant, OrbitType, DEFAULT_ORBIT_STEPS};
use crate::portraits::{portrait_mod_p, search_witnesses};
use crate::report::{aligned, gleason_lines, status_symbol, verdict_grid, Format, Report};
use crate::workers::worker_count;
use crate::{Rat, RatFunc};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "dynaport",
    version,
    about = "Dynamical portraits, squarefree witnesses and admissible sets on P^1"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    pub output: Output,
    /// Worker threads; defaults to DYNAPORT_THREADS, then the core count.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BaseArg {
    /// The rationals.
    Nf,
    /// The rational function field Q(t).
    Ff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Auto,
    Direct,
    Fast,
}

#[derive(Args, Debug, Clone)]
pub struct MapArgs {
    /// Rational map in x, e.g. "x^2+1" or "(x^2-1)/x"; over ff it may use t.
    #[arg(long)]
    pub map: String,
    #[arg(long, value_enum, default_value_t = BaseArg::Nf)]
    pub base: BaseArg,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct CapArgs {
    /// Backward search depth (default 2 d^3).
    #[arg(long)]
    pub depth_cap: Option<usize>,
    /// Largest level size in the backward search.
    #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
    pub degree_cap: usize,
    /// Largest forward index on a critical orbit.
    #[arg(long, default_value_t = DEFAULT_ORBIT_CAP)]
    pub orbit_cap: usize,
    #[arg(long, default_value_t = DEFAULT_PREPERIODIC_STEPS)]
    pub preperiodic_steps: usize,
}

impl CapArgs {
    fn caps(&self) -> Caps {
        Caps {
            depth: self.depth_cap,
            degree: self.degree_cap,
            orbit: self.orbit_cap,
            preperiodic_steps: self.preperiodic_steps,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Portrait of alpha modulo a prime (nf) or a place pi(t) (ff).
    Portrait {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, required_unless_present = "place")]
        prime: Option<u64>,
        /// Monic irreducible polynomial in t.
        #[arg(long)]
        place: Option<String>,
        #[arg(long, default_value_t = DEFAULT_PLACE_STEPS)]
        step_cap: usize,
    },
    /// Primes p <= pmax where alpha has squarefree portrait (m, n).
    Search {
        #[arg(long)]
        map: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        pmax: u64,
        #[arg(long, value_delimiter = ',')]
        exclude: Vec<u64>,
    },
    /// Admissibility verdicts: A1 at m, A2 at n, a grid, or unramifiedness over a target.
    Admissible {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        max_m: Option<usize>,
        #[arg(long)]
        max_n: Option<usize>,
        /// Decide dynamic unramifiedness over this point instead.
        #[arg(long, allow_hyphen_values = true)]
        target: Option<String>,
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Weil height, canonical height estimate and orbit type of alpha.
    Height {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_ORBIT_STEPS)]
        step_cap: usize,
    },
    /// Squarefreeness of phi^n(0) as a polynomial in t, n = 1..n-max.
    Gleason {
        #[arg(long, default_value = "x^2+t")]
        map: String,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// Places of Q(t) where alpha has squarefree portrait (m, n).
    FfSearch {
        #[arg(long)]
        map: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Re-run the built-in worked examples.
    Verify {
        /// nf-x2p1, ff-x2pt, counterexamples or all.
        #[arg(long, default_value = "all")]
        example: String,
        #[arg(long, default_value_t = 10_000)]
        pmax: u64,
    },
}

/// What a command run produced: the exit code and the text for each stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Cap { .. } | Error::Precision { .. } => EXIT_PARTIAL,
        Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_USAGE,
    }
}

pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let format = match cli.output {
        Output::Json => Format::Json,
        Output::Table => Format::Table,
    };
    let threads = worker_count(cli.threads);
    match execute(&cli.command, threads) {
        Ok((report, failed)) => {
            let code = if failed {
                EXIT_INTERNAL
            } else if report.partial {
                EXIT_PARTIAL
            } else {
                EXIT_OK
            };
            let mut stdout = report.render(format);
            if !stdout.ends_with('\n') {
                stdout.push('\n');
            }
            Outcome {
                code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// Runs one subcommand; the flag is set when a `verify` check failed.
pub fn execute(cmd: &Command, threads: usize) -> Result<(Report, bool)> {
    let ok = |r: Report| Ok((r, false));
    match cmd {
        Command::Portrait {
            map,
            alpha,
            prime,
            place,
            step_cap,
        } => match (map.base, prime, place) {
            (BaseArg::Nf, Some(p), None) => {
                let phi: RationalMap<Rat> = parse_map(&map.map)?;
                let a: ProjPoint<Rat> = parse_point(alpha)?;
                let port = portrait_mod_p(&phi, &a, *p)?;
                let body = json!({"m": port.m, "n": port.n, "prime": p});
                ok(Report::new("portrait", &body, format!("portrait mod {p}: {port}"))?)
            }
            (BaseArg::Ff, None, Some(pi)) => {
                let phi: RationalMap<RatFunc> = parse_map(&map.map)?;
                let a: ProjPoint<RatFunc> = parse_point(alpha)?;
                let pi = parse_t_poly(pi)?;
                let orbit = ff_portrait_at_place(&phi, &a, &pi, *step_cap)?;
                let table = match &orbit {
                    PlaceOrbit::Portrait { m, n } => format!("portrait at {}: ({m}, {n})", pi.fmt_var("t")),
                    PlaceOrbit::Escapes { step, .. } => {
                        format!("not preperiodic at {} (escapes at step {step})", pi.fmt_var("t"))
                    }
                    PlaceOrbit::Undecided { steps } => format!("undecided after {steps} steps"),
                };
                let undecided = matches!(orbit, PlaceOrbit::Undecided { .. });
                let body = json!({"place": pi.fmt_var("t"), "orbit": orbit});
                ok(Report::new("portrait", &body, table)?.with_partial(undecided))
            }
            _ => Err(Error::Invalid(
                "use --prime with --base nf and --place with --base ff".into(),
            )),
        },
        Command::Search {
            map,
            alpha,
            m,
            n,
            pmax,
            exclude,
        } => {
            let phi: RationalMap<Rat> = parse_map(map)?;
            let a: ProjPoint<Rat> = parse_point(alpha)?;
            let s = search_witnesses(&phi, &a, *m, *n, *pmax, exclude, threads)?;
            let mut rows = vec![vec![
                "prime".into(),
                "portrait".into(),
                "squarefree".into(),
                "verified".into(),
            ]];
            rows.extend(s.witnesses.iter().map(|w| {
                vec![
                    w.prime.to_string(),
                    w.portrait.to_string(),
                    w.squarefree.to_string(),
                    w.verification.passed.to_string(),
                ]
            }));
            let mut table = aligned(&rows);
            table.push_str(&format!(
                "{} witnesses among {} primes <= {} ({} bad, {} skipped)\n",
                s.witnesses.len(),
                s.primes_scanned,
                pmax,
                s.bad_primes.len(),
                s.skipped.len()
            ));
            ok(Report::new("search", &s, table)?)
        }
        Command::Admissible { map, .. } => match map.base {
            BaseArg::Nf => ok(admissible::<Rat>(cmd, threads)?),
            BaseArg::Ff => ok(admissible::<RatFunc>(cmd, threads)?),
        },
        Command::Height {
            map,
            alpha,
            tol,
            step_cap,
        } => match map.base {
            BaseArg::Nf => ok(height::<Rat>(&map.map, alpha, *tol, *step_cap)?),
            BaseArg::Ff => ok(height::<RatFunc>(&map.map, alpha, *tol, *step_cap)?),
        },
        Command::Gleason { map, n_max } => {
            let phi: RationalMap<RatFunc> = parse_map(map)?;
            let res = gleason_check(&phi, *n_max)?;
            let body: Vec<_> = res.iter().map(|&(n, s)| json!({"n": n, "squarefree": s})).collect();
            ok(Report::new(
                "gleason",
                &json!({ "results": body }),
                gleason_lines(&res),
            )?)
        }
        Command::FfSearch { map, alpha, m, n } => {
            let phi: RationalMap<RatFunc> = parse_map(map)?;
            let a: ProjPoint<RatFunc> = parse_point(alpha)?;
            let s = ff_search_witnesses(&phi, &a, *m, *n, threads)?;
            let mut rows = vec![vec!["place".into(), "valuation".into(), "portrait".into()]];
            rows.extend(
                s.witnesses
                    .iter()
                    .map(|w| vec![w.place.to_string(), w.valuation.to_string(), w.portrait.to_string()]),
            );
            let mut table = aligned(&rows);
            if let Some(note) = &s.note {
                table.push_str(&format!("note: {note}\n"));
            }
            let partial = !s.complete;
            ok(Report::new("ff-search", &s, table)?.with_partial(partial))
        }
        Command::Verify { example, pmax } => {
            let names: Vec<&str> = if example == "all" {
                EXAMPLES.to_vec()
            } else {
                vec![example.as_str()]
            };
            let opts = FixtureOptions {
                threads,
                p_max: *pmax,
                ..Default::default()
            };
            let reports = names
                .iter()
                .map(|n| run_fixture(n, &opts))
                .collect::<Result<Vec<_>>>()?;
            let mut rows = Vec::new();
            for r in &reports {
                for c in &r.checks {
                    rows.push(vec![
                        if c.passed { "PASS" } else { "FAIL" }.to_string(),
                        r.example.clone(),
                        c.name.clone(),
                        c.observed.clone(),
                    ]);
                }
            }
            let failed = reports.iter().any(|r| !r.passed);
            let total: usize = reports.iter().map(|r| r.checks.len()).sum();
            let passed: usize = reports
                .iter()
                .map(|r| r.checks.iter().filter(|c| c.passed).count())
                .sum();
            let mut table = aligned(&rows);
            table.push_str(&format!(
                "{}: {passed}/{total} checks\n",
                if failed { "FAIL" } else { "PASS" }
            ));
            let body = json!({"examples": reports, "passed": !failed});
            Ok((Report::new("verify", &body, table)?, failed))
        }
    }
}

#[derive(Serialize)]
#[serde(bound = "")]
struct AdmissibleBody<K: Base> {
    #[serde(skip_serializing_if = "Option::is_none")]
    unramified: Option<Verdict<K>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a1: Option<Verdict<K>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a2: Option<Verdict<K>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<crate::admissible::AdmissibleTable<K>>,
}

fn describe<K: Base>(label: &str, v: &Verdict<K>) -> String {
    let detail = match (v.status, &v.reason, &v.bound_hit, &v.certificate) {
        (Status::No, Some(r), _, _) => format!(" ({r:?})"),
        (Status::Unknown, _, Some(b), _) => format!(" ({b})"),
        (Status::Yes, _, _, Some(c)) => format!(" (certificate depth {}, {:?})", c.depth, c.termination_reason()),
        _ => String::new(),
    };
    format!("{label}: {}{detail}\n", status_symbol(v.status))
}

fn admissible<K: Parse>(cmd: &Command, threads: usize) -> Result<Report> {
    let Command::Admissible {
        map,
        alpha,
        m,
        n,
        max_m,
        max_n,
        target,
        strategy,
        caps,
    } = cmd
    else {
        unreachable!("dispatched on the admissible subcommand")
    };
    let phi: RationalMap<K> = parse_map(&map.map)?;
    let caps = caps.caps();
    let strategy = match strategy {
        StrategyArg::Auto => Strategy::Auto,
        StrategyArg::Direct => Strategy::Direct,
        StrategyArg::Fast => Strategy::FastOnly,
    };
    let alpha = alpha.as_deref().map(parse_point::<K>).transpose()?;
    let need_alpha = || {
        alpha
            .clone()
            .ok_or_else(|| Error::Invalid("--alpha is required for A1".into()))
    };
    let mut body = AdmissibleBody::<K> {
        unramified: None,
        a1: None,
        a2: None,
        table: None,
    };
    let mut text = String::new();
    if let Some(t) = target {
        let v = is_dynamically_unramified(&phi, &parse_point::<K>(t)?, caps);
        text.push_str(&describe("unramified over target", &v));
        body.unramified = Some(v);
    }
    if let Some(m) = m {
        let v = a1_verdict_with(&phi, &need_alpha()?, *m, caps, strategy)?;
        text.push_str(&describe(&format!("A1 m={m}"), &v));
        body.a1 = Some(v);
    }
    if let Some(n) = n {
        let v = a2_verdict_with(&phi, *n, caps)?;
        text.push_str(&describe(&format!("A2 n={n}"), &v));
        body.a2 = Some(v);
    }
    if max_m.is_some() || max_n.is_some() {
        let t = admissible_table(
            &phi,
            &need_alpha()?,
            max_m.unwrap_or(0),
            max_n.unwrap_or(1).max(1),
            threads,
        )?;
        let a1: Vec<_> = t.a1.iter().map(|(k, v)| (*k, v.status)).collect();
        let a2: Vec<_> = t.a2.iter().map(|(k, v)| (*k, v.status)).collect();
        text.push_str(&verdict_grid(&a1, &a2));
        body.table = Some(t);
    }
    if text.is_empty() {
        return Err(Error::Invalid("give --target, --m, --n, --max-m or --max-n".into()));
    }
    let unknown = body
        .unramified
        .iter()
        .chain(&body.a1)
        .chain(&body.a2)
        .map(|v| v.status)
        .chain(
            body.table
                .iter()
                .flat_map(|t| t.a1.iter().chain(&t.a2).map(|(_, v)| v.status)),
        )
        .any(|s| s == Status::Unknown);
    Ok(Report::new("admissible", &body, text)?.with_partial(unknown))
}

fn height<K: Parse>(map: &str, alpha: &str, tol: f64, step_cap: usize) -> Result<Report> {
    let phi: RationalMap<K> = parse_map(map)?;
    let a: ProjPoint<K> = parse_point(alpha)?;
    let gap = height_gap_constant(&phi);
    let escape = gap.escape_height(phi.degree());
    // a precision overrun still reports the estimate reached so far
    let (est, canonical_text, partial) = match canonical_height(&phi, &a, tol) {
        Ok(e) => (json!(e), format!("{:.12} +/- {:.3e}", e.value, e.error_bound), false),
        Err(Error::Precision { steps, partial }) => (
            json!({ "partial_estimate": partial, "iterations": steps }),
            format!("{partial:.12} (precision cap after {steps} steps)"),
            true,
        ),
        Err(e) => return Err(e),
    };
    let orbit = classify_orbit(&phi, &a, step_cap)?;
    let orbit_text = match orbit {
        OrbitType::Wandering { certified_at } => format!("wandering (iterate {certified_at} passes the escape height)"),
        OrbitType::Preperiodic { m, n } => format!("preperiodic with portrait ({m}, {n})"),
    };
    let table = aligned(&[
        vec!["weil".into(), format!("{:.12}", a.height())],
        vec!["canonical".into(), canonical_text],
        vec!["gap c_up".into(), format!("{:.12}", gap.c_up)],
        vec!["gap c_low".into(), format!("{:.12}", gap.c_low)],
        vec!["escape".into(), format!("{escape:.12}")],
        vec!["orbit".into(), orbit_text],
    ]);
    let body = json!({
        "weil_height": a.height(),
        "canonical_height": est,
        "gap": gap,
        "escape_height": escape,
        "orbit": orbit,
    });
    Ok(Report::new("height", &body, table)?.with_partial(partial))
}
