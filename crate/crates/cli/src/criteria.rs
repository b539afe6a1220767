//! The acceptance criteria, runnable from `selftest` and the integration
//! tests. Each returns one [`Outcome`] with a one-line summary.

use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;

use hypiso_core::classify::{hurwitz_bound, planar_obstruction, realizable, Answer, GroupClass, SurfaceDescriptor};
use hypiso_core::endspace::{CharSystem, EndSpace, StarPart};
use hypiso_core::format::Decimal;
use hypiso_core::grouptable::{isomorphic, CayleyGraph, FiniteGroup, VcGroup};
use hypiso_core::hypgeom::{collar_width, LengthBudget, ARCSINH_ONE, IDENTITY_TOL, TWO_ARCSINH_ONE};
use hypiso_core::ordinal::Ordinal;
use hypiso_core::synth::{
    build_x, build_x_finite, complex_automorphisms_with, complex_end_space, connected_after_removing_ball,
    quotient, GluingComplex, GroupSource, PieceKind,
};
use hypiso_core::verify::verify;

use crate::app::{run_args, EXIT_OK, EXIT_VERIFY};
use crate::oracle::{derived_matches_lower_model, NestedModel};

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] criterion {:>2} {}: {} ({} ms)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed_ms
        )
    }
}

fn timed(id: u8, title: &'static str, limit: Option<Duration>, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (mut passed, mut detail) = f();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed > limit {
            passed = false;
            detail.push_str(&format!("; over the {} ms budget", limit.as_millis()));
        }
    }
    Outcome {
        id,
        title,
        passed,
        detail,
        elapsed_ms: elapsed.as_millis(),
    }
}

pub fn all(jobs: usize) -> Vec<Outcome> {
    vec![
        classification_matrix(),
        cayley_rigidity(),
        complex_isometry_groups(jobs),
        collar_identity(),
        completeness(jobs),
        quotient_round_trip(),
        cb_machinery(),
        star_decomposition(),
        one_endedness(),
        obstructions(),
        determinism(),
    ]
}

fn omega_times(k: u64) -> Ordinal {
    Ordinal::omega().mul_nat(k).expect("small multiple")
}

/// Rows `(α, n)` with the expected answers for finite, virtually cyclic and
/// countably infinite groups; `R` realizable, `N` not. Degree 1 admits every
/// countable group, degree 2 at a successor (or 0) the virtually cyclic ones,
/// everything else only the finite ones.
const GOLDEN: &str = "
0 1 RRR | 0 2 RRN | 0 3 RNN | 0 5 RNN
1 1 RRR | 1 2 RRN | 1 3 RNN | 1 5 RNN
2 1 RRR | 2 2 RRN | 2 3 RNN | 2 5 RNN
3 1 RRR | 3 2 RRN | 3 3 RNN | 3 5 RNN
w 1 RRR | w 2 RNN | w 3 RNN | w 5 RNN
w+1 1 RRR | w+1 2 RRN | w+1 3 RNN | w+1 5 RNN
w*2 1 RRR | w*2 2 RNN | w*2 3 RNN | w*2 5 RNN
";

fn golden_alpha(s: &str) -> Ordinal {
    match s {
        "w" => Ordinal::omega(),
        "w+1" => Ordinal::omega().succ(),
        "w*2" => omega_times(2),
        n => Ordinal::nat(n.parse().expect("golden rank")),
    }
}

pub fn classification_matrix() -> Outcome {
    timed(1, "classification matrix", Some(Duration::from_secs(1)), || {
        let groups = [
            GroupClass::Specific {
                group: FiniteGroup::symmetric(3),
            },
            GroupClass::VirtuallyCyclic,
            GroupClass::CountableInfinite,
        ];
        let mut cells = 0;
        let mut mismatches = Vec::new();
        for cell in GOLDEN.split(['|', '\n']).map(str::trim).filter(|c| !c.is_empty()) {
            let f: Vec<&str> = cell.split_whitespace().collect();
            let (alpha, n) = (golden_alpha(f[0]), f[1].parse::<u64>().expect("golden degree"));
            let s = SurfaceDescriptor::standard(CharSystem::new(alpha, n).expect("degree ≥ 1").canonical());
            for (g, want) in groups.iter().zip(f[2].chars()) {
                cells += 1;
                let got = realizable(&s, g).answer;
                let want = if want == 'R' { Answer::Realizable } else { Answer::NotRealizable };
                if got != want {
                    mismatches.push(format!("({}, {n}) {}: {got:?}", f[0], g.tag()));
                }
            }
        }
        let ok = cells == 84 && mismatches.is_empty();
        (ok, format!("{}/{cells} cells match{}", cells - mismatches.len(), list(&mismatches)))
    })
}

fn list(items: &[String]) -> String {
    if items.is_empty() {
        String::new()
    } else {
        format!("; mismatches: {}", items.join(", "))
    }
}

pub const RIGIDITY_GROUPS: [&str; 8] = ["Z2", "Z3", "Z4", "Z2xZ2", "Z6", "S3", "D4", "Q8"];

fn rigidity_groups() -> Vec<(&'static str, FiniteGroup)> {
    RIGIDITY_GROUPS
        .iter()
        .map(|&n| (n, FiniteGroup::builtin(n).expect("builtin group")))
        .collect()
}

pub fn cayley_rigidity() -> Outcome {
    timed(2, "Cayley rigidity", Some(Duration::from_secs(10)), || {
        let bad: Vec<String> = rigidity_groups()
            .into_iter()
            .filter(|(_, g)| !isomorphic(&CayleyGraph::complete(g).decorated_automorphisms(), g))
            .map(|(n, _)| n.to_string())
            .collect();
        (bad.is_empty(), format!("{}/8 groups rigid{}", 8 - bad.len(), list(&bad)))
    })
}

fn w1() -> EndSpace {
    EndSpace::omega_sum(EndSpace::Singleton)
}

/// The complexes of the complex-level isometry group check.
pub fn isometry_complexes() -> Vec<(String, FiniteGroup, GluingComplex)> {
    let mut out = Vec::new();
    for (name, g) in rigidity_groups() {
        for (ends_name, e) in [("w+1", w1()), ("cantor", EndSpace::Cantor)] {
            let c = build_x_finite(&e, &g, 1, 1).expect("finite complex");
            out.push((format!("{name}/{ends_name}"), g.clone(), c));
        }
    }
    out
}

pub fn complex_isometry_groups(jobs: usize) -> Outcome {
    timed(3, "complex isometry groups", Some(Duration::from_secs(60)), || {
        let all = isometry_complexes();
        let bad: Vec<String> = all
            .iter()
            .filter(|(_, g, c)| !isomorphic(&complex_automorphisms_with(c, jobs), g))
            .map(|(n, _, _)| n.clone())
            .collect();
        (bad.is_empty(), format!("{}/{} complexes match their group{}", all.len() - bad.len(), all.len(), list(&bad)))
    })
}

pub fn collar_identity() -> Outcome {
    timed(4, "collar identity", None, || {
        let (lo, hi) = (1e-6f64.ln(), 20f64.ln());
        let mut worst = 0.0f64;
        for i in 0..1000 {
            let l = (lo + (hi - lo) * i as f64 / 999.0).exp();
            let w = collar_width(l).expect("positive length");
            worst = worst.max(((l / 2.0).sinh() * w.sinh() - 1.0).abs());
        }
        let anchor = (collar_width(TWO_ARCSINH_ONE).expect("positive") - ARCSINH_ONE).abs() / ARCSINH_ONE;
        let ok = worst <= IDENTITY_TOL && anchor <= IDENTITY_TOL;
        (ok, format!("max relative error {worst:.2e} over 1000 samples, anchor error {anchor:.2e}"))
    })
}

/// The complexes of the quotient round trip, with their quotients.
pub fn quotient_cases() -> Vec<(String, EndSpace, GluingComplex)> {
    let ends = [
        ("pt", EndSpace::Singleton),
        ("w+1", w1()),
        ("w^2+1", EndSpace::tower(Ordinal::nat(2))),
        ("(1,2)", CharSystem::new(Ordinal::one(), 2).expect("degree 2").canonical()),
        ("cantor", EndSpace::Cantor),
    ];
    let mut out = Vec::new();
    for (en, e) in ends {
        for n in [2, 3] {
            let g = FiniteGroup::cyclic(n);
            let total = build_x_finite(&e, &g, 2, 1).expect("finite complex");
            let q = quotient(&total, &g).expect("deck group embeds").quotient;
            out.push((format!("{en}/Z{n}"), e.clone(), total));
            out.push((format!("{en}/Z{n} quotient"), e.clone(), q));
        }
    }
    out
}

pub fn completeness(jobs: usize) -> Outcome {
    timed(5, "completeness by construction", None, || {
        let budget = LengthBudget::default();
        let bound = Decimal::new(TWO_ARCSINH_ONE);
        let mut bad = Vec::new();
        let mut count = 0;
        let complexes = isometry_complexes()
            .into_iter()
            .map(|(n, _, c)| (n, c))
            .chain(quotient_cases().into_iter().map(|(n, _, c)| (n, c)));
        for (name, c) in complexes {
            count += 1;
            let cert_ok = c
                .completeness
                .as_ref()
                .is_some_and(|cert| cert.holds && cert.bound == bound && cert.matches(&c));
            let violations = budget.band_violations(&c);
            if !cert_ok || !violations.is_empty() {
                bad.push(format!("{name} ({} band violations)", violations.len()));
            }
            if jobs > 1 && !verify(&c, jobs).passed() {
                bad.push(format!("{name} fails verification"));
            }
        }
        (bad.is_empty(), format!("{}/{count} complexes certified with bound 2·asinh(1){}", count - bad.len(), list(&bad)))
    })
}

pub fn quotient_round_trip() -> Outcome {
    timed(6, "quotient round trip", None, || {
        let mut bad = Vec::new();
        let mut count = 0;
        for (name, e, c) in quotient_cases().into_iter().filter(|(n, _, _)| n.ends_with("quotient")) {
            count += 1;
            let got = complex_end_space(&c, true);
            if got.as_ref().ok() != Some(&e.canonical()) {
                bad.push(format!("{name}: {got:?}"));
            }
        }
        (bad.is_empty(), format!("{}/{count} quotients recover canonical(e){}", count - bad.len(), list(&bad)))
    })
}

pub fn cb_machinery() -> Outcome {
    timed(7, "Cantor–Bendixson machinery", None, || {
        let mut bad = Vec::new();
        for alpha in 0..=3u32 {
            for d in 1..=3u32 {
                let e = CharSystem::new(Ordinal::nat(alpha as u64), d as u64)
                    .expect("degree ≥ 1")
                    .canonical();
                let at = e.derivative_at(&Ordinal::nat(alpha as u64));
                let want = CharSystem::new(Ordinal::zero(), d as u64).expect("points");
                if at.as_ref().and_then(EndSpace::countable_system) != Some(want.clone()) {
                    bad.push(format!("({alpha},{d}) step {alpha}: {at:?}"));
                }
                if e.derivative_at(&Ordinal::nat(alpha as u64 + 1)).is_some() {
                    bad.push(format!("({alpha},{d}) step {} not empty", alpha + 1));
                }
                // Literal iteration of the one-step derivative agrees.
                let mut step = Some(e.clone());
                for _ in 0..alpha {
                    step = step.and_then(|s| s.derivative());
                }
                if step.as_ref().and_then(EndSpace::countable_system) != Some(want.clone()) {
                    bad.push(format!("({alpha},{d}) iterated derivative"));
                }
                if alpha <= 2 {
                    let model = NestedModel::new(alpha, d, 3);
                    if model.rank_degree() != (alpha as usize, d as usize) {
                        bad.push(format!("({alpha},{d}) oracle profile {:?}", model.profile()));
                    }
                    for k in 0..=alpha {
                        let symbolic = e
                            .derivative_at(&Ordinal::nat(k as u64))
                            .and_then(|x| x.countable_system());
                        let lower = CharSystem::new(Ordinal::nat((alpha - k) as u64), d as u64).ok();
                        if !derived_matches_lower_model(alpha, d, 3, k) || symbolic != lower {
                            bad.push(format!("({alpha},{d}) derived set {k}"));
                        }
                    }
                }
            }
        }
        (bad.is_empty(), format!("12 expressions, oracle on α ≤ 2{}", list(&bad)))
    })
}

/// Countable expressions with their degree worked out by hand.
fn degree_cases() -> Vec<(EndSpace, u64)> {
    let pt = EndSpace::Singleton;
    let two = EndSpace::union(vec![pt.clone(), pt.clone()]).expect("two parts");
    let t2 = EndSpace::tower(Ordinal::nat(2));
    vec![
        (pt.clone(), 1),
        (two.clone(), 2),
        (w1(), 1),
        (EndSpace::omega_sum(two.clone()), 1),
        (EndSpace::union(vec![w1(), pt.clone()]).expect("parts"), 1),
        (EndSpace::union(vec![w1(), w1()]).expect("parts"), 2),
        (t2.clone(), 1),
        (EndSpace::union(vec![t2.clone(), t2.clone(), t2.clone()]).expect("parts"), 3),
        (EndSpace::union(vec![t2.clone(), w1()]).expect("parts"), 1),
        (EndSpace::omega_sum(EndSpace::union(vec![t2.clone(), t2]).expect("parts")), 1),
        (EndSpace::tower(Ordinal::omega()), 1),
        (
            EndSpace::union(vec![EndSpace::tower(Ordinal::omega()), EndSpace::tower(Ordinal::omega())]).expect("parts"),
            2,
        ),
        (EndSpace::union(vec![w1(), EndSpace::omega_sum(w1())]).expect("parts"), 1),
    ]
}

pub fn star_decomposition() -> Outcome {
    timed(8, "star decomposition", None, || {
        let mut bad = Vec::new();
        let cases = [
            ("w+1", w1()),
            ("w^2+1", EndSpace::tower(Ordinal::nat(2))),
            ("w^w+1", EndSpace::tower(Ordinal::omega())),
            ("cantor", EndSpace::Cantor),
        ];
        for (name, e) in cases {
            let Ok(sd) = e.star_decomposition() else {
                bad.push(format!("{name}: no decomposition"));
                continue;
            };
            for part in sd.parts(4) {
                let closed = part.compactify();
                let same = match (closed.countable_system(), e.countable_system()) {
                    (Some(a), Some(b)) => a == b,
                    (None, None) => closed.is_perfect() && e.is_perfect(),
                    _ => false,
                };
                if !same {
                    bad.push(format!("{name}: part compactifies to {closed}"));
                }
                if let StarPart::Cofinal { limit } = &part {
                    // Block ranks increase along the fundamental sequence and stay below the limit.
                    let ranks: Vec<Ordinal> = (1..=4)
                        .map(|k| part.block(k).countable_system().expect("countable").alpha)
                        .collect();
                    if ranks.windows(2).any(|w| w[0] >= w[1]) || ranks.iter().any(|r| r >= limit) {
                        bad.push(format!("{name}: cofinal blocks {ranks:?}"));
                    }
                }
            }
        }
        let cases = degree_cases();
        for (e, degree) in &cases {
            if e.countable_system().map(|cs| cs.degree) != Some(*degree) {
                bad.push(format!("{e}: degree"));
            }
            if e.is_self_similar() != (*degree == 1) {
                bad.push(format!("{e}: self-similarity"));
            }
        }
        (bad.is_empty(), format!("4 star decompositions, {} degree cases{}", cases.len(), list(&bad)))
    })
}

pub fn one_endedness() -> Outcome {
    timed(9, "one-endedness shadow", Some(Duration::from_secs(5)), || {
        let c = build_x(&EndSpace::Singleton, GroupSource::Ball { group: VcGroup::integers() }, 2, 3, 1)
            .expect("ball complex");
        let vertices: Vec<usize> = (0..c.pieces.len()).filter(|&i| c.pieces[i].kind == PieceKind::Vertex).collect();
        let bad: Vec<String> = vertices
            .iter()
            .filter(|&&v| !connected_after_removing_ball(&c, v, 1))
            .map(|&v| c.pieces[v].id.clone())
            .collect();
        let ok = bad.is_empty() && c.is_connected() && vertices.len() == 7;
        (ok, format!("{} of {} radius-1 balls removable{}", vertices.len() - bad.len(), vertices.len(), list(&bad)))
    })
}

pub fn obstructions() -> Outcome {
    timed(10, "obstructions", None, || {
        let mut bad = Vec::new();
        for g in [2u64, 3, 5] {
            let at = 168 * (g as usize - 1);
            let at_answer = hurwitz_bound(g, &FiniteGroup::cyclic(at)).map(|v| v.answer);
            let over_answer = hurwitz_bound(g, &FiniteGroup::cyclic(at + 1)).map(|v| v.answer);
            if at_answer != Ok(Answer::Inconclusive) || over_answer != Ok(Answer::NotRealizable) {
                bad.push(format!("hurwitz g={g}"));
            }
        }
        let a5 = FiniteGroup::alternating(5);
        for n in 1..=3 {
            if planar_obstruction(n, &a5).map(|v| v.answer) != Ok(Answer::NotRealizable) {
                bad.push(format!("A5 with {n} planar ends"));
            }
        }
        for name in ["Z7", "Z2xZ2", "Z6", "Z5xZ5"] {
            let g = FiniteGroup::builtin(name).expect("builtin group");
            for n in 1..=3 {
                if planar_obstruction(n, &g).map(|v| v.answer) != Ok(Answer::Inconclusive) {
                    bad.push(format!("{name} with {n} planar ends"));
                }
            }
        }
        (bad.is_empty(), format!("hurwitz thresholds at g = 2, 3, 5; A5 rejected; abelian accepted{}", list(&bad)))
    })
}

/// CLI arguments of the golden complexes.
pub const GOLDEN_BUILDS: [&[&str]; 6] = [
    &["--ends", "w^1*1+1", "--group", "builtin:Z2", "--M", "2", "--seed", "7"],
    &["--ends", "cantor", "--group", "builtin:S3", "--M", "1", "--seed", "3"],
    &["--ends", "w^2*3+1", "--group", "builtin:Z2xZ2", "--M", "1", "--seed", "11"],
    &["--ends", "w^1*1+1", "--group", "builtin:Z3", "--construction", "y", "--M", "1", "--seed", "5"],
    &["--ends", "w^0*1+1", "--group", "builtin:Z", "--M", "2", "--R", "3", "--seed", "1"],
    &["--ends", "w^2*2+1", "--group", "builtin:Dinf", "--construction", "xgamma", "--R", "3", "--seed", "9"],
];

pub fn golden_json(args: &[&str]) -> Result<String, String> {
    let out = run_args(std::iter::once("build").chain(args.iter().copied()));
    if out.code == EXIT_OK {
        Ok(out.stdout)
    } else {
        Err(out.stderr)
    }
}

/// Length fields of a complex JSON value, as pointers with the value that
/// lies `1e-6` outside the field's band.
pub fn out_of_band_edits(c: &GluingComplex) -> Vec<(String, f64)> {
    let budget = LengthBudget::default();
    let mut edits = Vec::new();
    let vertex = c.pieces.iter().position(|p| p.kind == PieceKind::Vertex);
    let edge = c.pieces.iter().position(|p| p.kind == PieceKind::Edge);
    if let Some(v) = vertex {
        edits.push((format!("/pieces/{v}/ports/0/length"), budget.boundary_band.hi + 1e-6));
        edits.push((format!("/pieces/{v}/ports/0/length"), budget.boundary_band.lo - 1e-6));
        let last = c.pieces[v].cuffs.len() - 1;
        edits.push((format!("/pieces/{v}/cuffs/{last}"), budget.cuff_band.hi + 1e-6));
        edits.push((format!("/pieces/{v}/cuffs/0"), budget.cuff_band.lo - 1e-6));
    }
    if let Some(e) = edge {
        edits.push((format!("/pieces/{e}/cuffs/0"), budget.edge_cuff_band.hi + 1e-6));
        edits.push((format!("/pieces/{e}/cuffs/1"), budget.edge_cuff_band.lo - 1e-6));
        edits.push((format!("/pieces/{e}/ports/1/length"), budget.boundary_band.hi + 1e-6));
    }
    let key = c.lambda.keys().next().expect("lambda table").replace('~', "~0").replace('/', "~1");
    edits.push((format!("/lambda/{key}"), budget.boundary_band.hi + 1e-6));
    edits
}

/// Applies a JSON-pointer edit to serialized complex text.
pub fn perturb(json: &str, pointer: &str, value: f64) -> String {
    let mut v: serde_json::Value = serde_json::from_str(json).expect("complex JSON");
    *v.pointer_mut(pointer).expect("length field") = serde_json::Value::String(hypiso_core::format::decimal15(value));
    serde_json::to_string_pretty(&v).expect("value serializes")
}

pub fn determinism() -> Outcome {
    timed(11, "determinism", None, || {
        let mut bad = Vec::new();
        let mut perturbations = 0;
        let dir = std::env::temp_dir().join(format!("hypiso-selftest-{}", std::process::id()));
        if let Err(e) = std::fs::create_dir_all(&dir) {
            return (false, format!("cannot create {}: {e}", dir.display()));
        }
        for (i, args) in GOLDEN_BUILDS.iter().enumerate() {
            let (a, b) = match (golden_json(args), golden_json(args)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => {
                    bad.push(format!("build {i}: {}", e.trim()));
                    continue;
                }
            };
            if a != b {
                bad.push(format!("build {i} not byte-identical"));
            }
            let path = dir.join(format!("golden-{i}.json"));
            let verify_file = |text: &str| -> i32 {
                std::fs::write(&path, text).expect("temp file");
                run_args(["verify".as_ref(), path.as_os_str()]).code
            };
            if verify_file(&a) != EXIT_OK {
                bad.push(format!("build {i} does not verify"));
            }
            let c = GluingComplex::from_json(&a).expect("built JSON parses");
            for (pointer, value) in out_of_band_edits(&c) {
                perturbations += 1;
                if verify_file(&perturb(&a, &pointer, value)) != EXIT_VERIFY {
                    bad.push(format!("build {i}: {pointer} = {value} not rejected"));
                }
            }
        }
        let _ = std::fs::remove_dir_all(&dir);
        (
            bad.is_empty(),
            format!("{} golden builds reproducible and verified, {perturbations} perturbations rejected{}", GOLDEN_BUILDS.len(), list(&bad)),
        )
    })
}
