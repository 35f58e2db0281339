//! Runs a validated job and renders its report as text or JSON.

use std::fmt::Write;

use orbicalc::analytic::MapData;
use orbicalc::decomp::{
    bounded_genus_criterion, left_factor, verify_semiconjugacy, LeftFactorWitness,
};
use orbicalc::fibercurve::{genus_sequence, GenusRow};
use orbicalc::funcalg::field::rational_expr;
use orbicalc::lattes::analyze;
use orbicalc::orbifold::{canonical_orbifolds, classify_map, MapKind, OrbifoldJson};
use orbicalc::orbits::{orbit_scan, progression_fit, DEFAULT_HEIGHT_CAP_BITS};
use orbicalc::Error;
use serde::Serialize;

use crate::{GlobalOpts, Job, SCHEMA};

pub struct Output {
    pub text: String,
    pub error: Option<Error>,
}

#[derive(Serialize)]
struct Envelope<R: Serialize> {
    schema: &'static str,
    command: &'static str,
    report: Option<R>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorJson>,
}

#[derive(Serialize)]
struct ErrorJson {
    kind: &'static str,
    message: String,
}

fn error_kind(e: &Error) -> &'static str {
    if e.is_resource() {
        "resource"
    } else if matches!(e, Error::Inconsistent(_)) {
        "internal"
    } else {
        "input"
    }
}

#[derive(Serialize)]
struct CriticalJson {
    point: String,
    local_degree: usize,
    value: String,
}

#[derive(Serialize)]
struct AnalyzeJson {
    map: String,
    degree: usize,
    critical: Vec<CriticalJson>,
    o1: OrbifoldJson,
    o2: OrbifoldJson,
    chi_o1: String,
    chi_o2: String,
    kind: MapKind,
}

#[derive(Serialize)]
struct CurveGenusJson {
    a: String,
    u: String,
    rows: Vec<GenusRow>,
}

#[derive(Serialize)]
struct LeftFactorJson {
    u: String,
    f: String,
    present: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    v: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    absence: Option<orbicalc::decomp::Absence>,
}

#[derive(Serialize)]
struct SemiconjJson {
    a: String,
    x: String,
    b: String,
    holds: bool,
}

/// Renders `report` (with `text` as the human form) or the error alone.
fn finish<R: Serialize>(
    command: &'static str,
    opts: &GlobalOpts,
    result: Result<(R, String), Error>,
) -> Output {
    let (report, text, error) = match result {
        Ok((r, t)) => (Some(r), t, None),
        Err(e) => (None, String::new(), Some(e)),
    };
    emit(command, opts, report, text, error)
}

fn emit<R: Serialize>(
    command: &'static str,
    opts: &GlobalOpts,
    report: Option<R>,
    text: String,
    error: Option<Error>,
) -> Output {
    if opts.json {
        let env = Envelope {
            schema: SCHEMA,
            command,
            report,
            error: error.as_ref().map(|e| ErrorJson {
                kind: error_kind(e),
                message: e.to_string(),
            }),
        };
        let text = serde_json::to_string_pretty(&env).expect("reports serialize");
        Output { text, error }
    } else {
        Output { text, error }
    }
}

pub fn run(job: &Job, opts: &GlobalOpts) -> Output {
    let bits = opts.precision_bits;
    match job {
        Job::Analyze { f } => finish(
            "analyze",
            opts,
            (|| {
                let md = MapData::new(f, bits)?;
                let (o1, o2) = canonical_orbifolds(&md)?;
                let kind = classify_map(&md, &o1, &o2)?;
                let (c1, c2) = (o1.euler_char(), o2.euler_char());
                let mut t = String::new();
                writeln!(t, "map      {f}").unwrap();
                writeln!(t, "degree   {}", f.degree()).unwrap();
                writeln!(t, "critical points (point, local degree, value):").unwrap();
                for c in &md.critical {
                    writeln!(t, "  {}  {}  {}", c.point, c.local_degree, c.value).unwrap();
                }
                writeln!(
                    t,
                    "O1       {}  chi = {}",
                    o1.describe(),
                    rational_expr(&c1)
                )
                .unwrap();
                writeln!(
                    t,
                    "O2       {}  chi = {}",
                    o2.describe(),
                    rational_expr(&c2)
                )
                .unwrap();
                write!(t, "f: O1 -> O2 is {kind:?}").unwrap();
                let r = AnalyzeJson {
                    map: f.to_expr(),
                    degree: f.degree(),
                    critical: md
                        .critical
                        .iter()
                        .map(|c| CriticalJson {
                            point: c.point.to_expr(),
                            local_degree: c.local_degree,
                            value: c.value.to_expr(),
                        })
                        .collect(),
                    o1: o1.to_json(),
                    o2: o2.to_json(),
                    chi_o1: rational_expr(&c1),
                    chi_o2: rational_expr(&c2),
                    kind,
                };
                Ok((r, t))
            })(),
        ),
        Job::Lattes { a } => finish(
            "lattes",
            opts,
            (|| {
                let r = analyze(a, bits)?;
                let j = r.to_json();
                let mut t = String::new();
                writeln!(t, "class    {}", j.class).unwrap();
                if let Some(n) = j.n {
                    writeln!(t, "n        {n}").unwrap();
                }
                if let Some(s) = j.sign {
                    writeln!(t, "sign     {s}").unwrap();
                }
                if let Some(mu) = &j.mu {
                    writeln!(t, "mu       {mu}").unwrap();
                }
                match &r.maximal {
                    Some(o) => writeln!(t, "O0       {}", o.describe()).unwrap(),
                    None => writeln!(t, "O0       none").unwrap(),
                }
                writeln!(t, "admissible orbifolds: {}", r.admissible.len()).unwrap();
                for o in &r.admissible {
                    writeln!(t, "  {}", o.describe()).unwrap();
                }
                for w in &r.warnings {
                    writeln!(t, "warning: {w}").unwrap();
                }
                Ok((j, t.trim_end().to_string()))
            })(),
        ),
        Job::CurveGenus { a, u, dmax } => finish(
            "curve-genus",
            opts,
            (|| {
                let rows = genus_sequence(a, u, *dmax, bits)?;
                let mut t = String::new();
                writeln!(t, "A^d(x) = U(y) with A = {a}, U = {u}").unwrap();
                for r in &rows {
                    let parts: Vec<String> = r
                        .components
                        .iter()
                        .map(|c| {
                            format!("(genus {}, deg_p {}, deg_q {})", c.genus, c.deg_p, c.deg_q)
                        })
                        .collect();
                    writeln!(
                        t,
                        "d = {}: {} component(s), g_d = {}  {}",
                        r.d,
                        r.n,
                        r.min_genus,
                        parts.join(" ")
                    )
                    .unwrap();
                }
                Ok((
                    CurveGenusJson {
                        a: a.to_expr(),
                        u: u.to_expr(),
                        rows,
                    },
                    t.trim_end().to_string(),
                ))
            })(),
        ),
        Job::LeftFactor { u, f } => finish(
            "left-factor",
            opts,
            (|| {
                let w = left_factor(u, f, bits)?;
                let (t, r) = match &w {
                    LeftFactorWitness::Present(v) => (
                        format!("F = U o V with V = {v}"),
                        LeftFactorJson {
                            u: u.to_expr(),
                            f: f.to_expr(),
                            present: true,
                            v: Some(v.to_expr()),
                            absence: None,
                        },
                    ),
                    LeftFactorWitness::Absent(why) => (
                        format!("U is not a left factor of F ({why:?})"),
                        LeftFactorJson {
                            u: u.to_expr(),
                            f: f.to_expr(),
                            present: false,
                            v: None,
                            absence: Some(*why),
                        },
                    ),
                };
                Ok((r, t))
            })(),
        ),
        Job::Semiconj { a, x, b } => finish(
            "semiconj",
            opts,
            (|| {
                let holds = verify_semiconjugacy(a, x, b)?;
                let t = format!("A o X {} X o B", if holds { "=" } else { "!=" });
                Ok((
                    SemiconjJson {
                        a: a.to_expr(),
                        x: x.to_expr(),
                        b: b.to_expr(),
                        holds,
                    },
                    t,
                ))
            })(),
        ),
        Job::BoundedGenus { a, u, lmax } => finish(
            "bounded-genus",
            opts,
            (|| {
                let r = bounded_genus_criterion(a, u, *lmax, bits)?;
                let j = r.to_json();
                let mut t = format!("verdict  {}", j.verdict);
                if let Some(l) = j.l {
                    write!(t, "\nl        {l}").unwrap();
                }
                if let Some(v) = &j.v {
                    write!(t, "\nV        {v}").unwrap();
                }
                if let Some(th) = &j.theta {
                    write!(t, "\ntheta    {th}").unwrap();
                }
                if let Some(b) = j.bounded {
                    write!(t, "\nbounded  {b}").unwrap();
                }
                if let Some(why) = &j.reason {
                    write!(t, "\nreason   {why}").unwrap();
                }
                if let Some(o) = &r.maximal {
                    write!(t, "\nO0       {}", o.describe()).unwrap();
                }
                Ok((j, t))
            })(),
        ),
        Job::OrbitScan { a, u, x0, n } => {
            let r = match orbit_scan(a, u, x0, *n, DEFAULT_HEIGHT_CAP_BITS) {
                Ok(r) => r,
                Err(e) => return emit::<()>("orbit-scan", opts, None, String::new(), Some(e)),
            };
            // a truncated scan is still reported, with exit status 3
            let error = r
                .stopped
                .as_ref()
                .map(|why| Error::Budget(format!("scan stopped at n = {}: {why}", r.reached)));
            let fit = progression_fit(&r.membership);
            let mut t = String::new();
            writeln!(t, "A = {a}, U = {u}, x0 = {x0}, n = 0..={}", r.reached).unwrap();
            let line: String = r
                .membership
                .iter()
                .map(|&m| if m { '1' } else { '0' })
                .collect();
            writeln!(t, "membership {line}").unwrap();
            let members: Vec<String> = r.members().iter().map(|m| m.to_string()).collect();
            writeln!(t, "members    {{{}}}", members.join(", ")).unwrap();
            if let Some((mu, p)) = r.cycle {
                writeln!(t, "cycle      A^{} = A^{} (period {p})", mu + p, mu).unwrap();
            }
            write!(t, "fit        {} ({:?})", fit.describe(), fit.status).unwrap();
            emit("orbit-scan", opts, Some(r.to_json()), t, error)
        }
    }
}
