//! Re-checks every invariant of a gluing complex from its serialized form.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::grouptable::{isomorphic, FiniteGroup};
use crate::hypgeom::LengthBudget;
use crate::synth::{complex_automorphisms_with, complex_end_space, GroupSource, Owner, PieceKind, Recipe};
use crate::synth::{GluingComplex, Genus};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }
}

fn check(name: &'static str, details: Vec<String>) -> Check {
    let status = if details.is_empty() { Status::Pass } else { Status::Fail };
    Check { name, status, details }
}

fn skipped(name: &'static str, why: &str) -> Check {
    Check {
        name,
        status: Status::Skipped,
        details: vec![why.to_string()],
    }
}

/// Runs all checks. Structural failures stop the run early, since the later
/// checks index through pairings.
pub fn verify(c: &GluingComplex, jobs: usize) -> Report {
    let mut checks = vec![structure(c)];
    if checks[0].status == Status::Pass {
        checks.extend([
            frontier(c),
            glued_lengths(c),
            bands(c),
            piece_shapes(c),
            lambda_table(c),
            twists(c),
            edge_convention(c),
            end_space(c),
        ]);
        // The symmetry search relies on consistent lengths and pairings.
        if checks.iter().all(|c| c.status != Status::Fail) {
            checks.push(automorphisms(c, jobs));
        } else {
            checks.push(skipped("automorphisms", "earlier checks failed"));
        }
        checks.push(certificate(c));
    }
    Report { seed: c.seed, checks }
}

fn structure(c: &GluingComplex) -> Check {
    let mut bad = Vec::new();
    let mut ids = HashSet::new();
    for p in &c.pieces {
        if !ids.insert(p.id.as_str()) {
            bad.push(format!("duplicate piece id {}", p.id));
        }
        let mut names = HashSet::new();
        for port in &p.ports {
            if !names.insert(port.name.as_str()) {
                bad.push(format!("{} repeats port {}", p.id, port.name));
            }
        }
    }
    let mut used = HashSet::new();
    for (i, pr) in c.pairings.iter().enumerate() {
        for r in [pr.a, pr.b] {
            if c.pieces.get(r.piece).and_then(|p| p.ports.get(r.port)).is_none() {
                bad.push(format!("pairing {i} refers to a missing port ({}, {})", r.piece, r.port));
            } else if !used.insert(r) {
                bad.push(format!("pairing {i} reuses port {}/{}", c.pieces[r.piece].id, c.pieces[r.piece].ports[r.port].name));
            }
        }
        if pr.a == pr.b {
            bad.push(format!("pairing {i} glues a port to itself"));
        }
        if !pr.orientation_reversing {
            bad.push(format!("pairing {i} is orientation preserving"));
        }
    }
    check("structure", bad)
}

fn frontier(c: &GluingComplex) -> Check {
    let partners = c.partners();
    let mut bad = Vec::new();
    for (i, p) in c.pieces.iter().enumerate() {
        for (j, port) in p.ports.iter().enumerate() {
            match (partners[i][j].is_some(), port.frontier) {
                (false, false) => bad.push(format!("{}/{} is unpaired", p.id, port.name)),
                (true, true) => bad.push(format!("{}/{} is paired but marked frontier", p.id, port.name)),
                _ => {}
            }
            if port.frontier && p.kind == PieceKind::Edge {
                bad.push(format!("edge piece {} has a frontier port", p.id));
            }
        }
    }
    check("frontier", bad)
}

fn glued_lengths(c: &GluingComplex) -> Check {
    let mut bad = Vec::new();
    for pr in &c.pairings {
        let (pa, pb) = (&c.pieces[pr.a.piece], &c.pieces[pr.b.piece]);
        let (a, b) = (&pa.ports[pr.a.port], &pb.ports[pr.b.port]);
        if a.length != b.length {
            bad.push(format!("{}/{} = {} glued to {}/{} = {}", pa.id, a.name, a.length, pb.id, b.name, b.length));
        }
    }
    check("glued_lengths", bad)
}

fn bands(c: &GluingComplex) -> Check {
    check("length_bands", LengthBudget::default().band_violations(c))
}

fn piece_shapes(c: &GluingComplex) -> Check {
    let mut bad = Vec::new();
    for p in &c.pieces {
        match p.kind {
            PieceKind::Edge => {
                if p.ports.len() != 2 || p.cuffs.len() != 2 || p.genus != Genus::One {
                    bad.push(format!("edge piece {} is not a torus with two boundary curves", p.id));
                }
                if !matches!(p.owner, Owner::Edge { .. }) {
                    bad.push(format!("edge piece {} has a vertex owner", p.id));
                }
            }
            PieceKind::Vertex => {
                if p.genus != Genus::Infinite || !matches!(p.owner, Owner::Vertex { .. }) {
                    bad.push(format!("vertex piece {} has the wrong genus or owner", p.id));
                }
                if p.cuffs.len() != p.ports.len() + 1 {
                    bad.push(format!("vertex piece {} has {} cuffs for {} ports", p.id, p.cuffs.len(), p.ports.len()));
                }
                if p.cuffs.windows(2).any(|w| w[0] >= w[1]) {
                    bad.push(format!("vertex piece {} has cuffs that are not strictly increasing", p.id));
                }
            }
        }
    }
    check("piece_shapes", bad)
}

fn lambda_table(c: &GluingComplex) -> Check {
    let mut bad = Vec::new();
    let mut values = HashMap::new();
    for (name, l) in &c.lambda {
        if let Some(other) = values.insert(l.get().to_bits(), name) {
            bad.push(format!("lambda repeats {l} for {other} and {name}"));
        }
    }
    for p in &c.pieces {
        for port in &p.ports {
            match c.lambda.get(&port.name) {
                Some(l) if *l == port.length => {}
                Some(l) => bad.push(format!("{}/{} = {} but lambda is {l}", p.id, port.name, port.length)),
                None => bad.push(format!("{}/{} has no lambda entry", p.id, port.name)),
            }
        }
    }
    check("lambda", bad)
}

fn twists(c: &GluingComplex) -> Check {
    let ids: HashMap<&str, usize> = c.pieces.iter().enumerate().map(|(i, p)| (p.id.as_str(), i)).collect();
    let mut bad = Vec::new();
    for key in c.twists.keys() {
        let known = key.split_once('/').is_some_and(|(piece, curve)| {
            ids.get(piece).is_some_and(|&i| {
                let p = &c.pieces[i];
                p.ports.iter().any(|port| port.name == curve)
                    || curve
                        .strip_prefix('c')
                        .and_then(|j| j.parse::<usize>().ok())
                        .is_some_and(|j| j < p.cuffs.len())
            })
        });
        if !known {
            bad.push(format!("twist {key} names no curve"));
        }
    }
    check("twists", bad)
}

/// Edge pieces leave their source through an even boundary index and enter
/// their target through the odd one below it.
fn edge_convention(c: &GluingComplex) -> Check {
    let partners = c.partners();
    let group = match &c.recipe {
        Recipe::X { group: GroupSource::Finite { group }, .. } | Recipe::Y { group: GroupSource::Finite { group }, .. } => {
            Some(group)
        }
        _ => None,
    };
    let gamma = matches!(c.recipe, Recipe::XGamma { .. });
    // Quotient pieces keep the owners of their orbit representatives, so
    // only the kind of the glued piece is checked there.
    let cosets = matches!(c.recipe, Recipe::Quotient { .. });
    let mut bad = Vec::new();
    for (i, p) in c.pieces.iter().enumerate() {
        let Owner::Edge { element, label, index, target } = &p.owner else { continue };
        if p.ports.len() != 2 {
            continue;
        }
        let expected = if gamma {
            [format!("z({label},0)"), format!("z({label},1)")]
        } else {
            match index.checked_mul(2).filter(|&k| k >= 2) {
                Some(k) => [format!("d({label},{k})"), format!("d({label},{})", k - 1)],
                None => {
                    bad.push(format!("{} has edge index {index}", p.id));
                    continue;
                }
            }
        };
        for (slot, (owner, name)) in [element, target].into_iter().zip(&expected).enumerate() {
            if p.ports[slot].name != *name {
                bad.push(format!("{} port {slot} is {} instead of {name}", p.id, p.ports[slot].name));
            }
            if let Some(q) = partners[i][slot] {
                let other = &c.pieces[q.piece];
                let owner_ok = if cosets {
                    other.kind == PieceKind::Vertex
                } else {
                    other.owner == (Owner::Vertex { element: owner.clone() })
                };
                if !owner_ok || other.ports[q.port].name != *name {
                    bad.push(format!("{} port {slot} is glued to {}/{}", p.id, other.id, other.ports[q.port].name));
                }
            }
        }
        if let Some(g) = group {
            let product = g.index_of(element).zip(g.index_of(label)).map(|(x, h)| g.name(g.mul(x, h)));
            if product != Some(target.as_str()) {
                bad.push(format!("{} joins {element} to {target}, which is not {element}·{label}", p.id));
            }
        }
    }
    check("edge_convention", bad)
}

fn end_space(c: &GluingComplex) -> Check {
    if matches!(c.recipe, Recipe::Manual) {
        return skipped("end_space", "no recipe");
    }
    match complex_end_space(c, true) {
        Ok(_) => check("end_space", Vec::new()),
        Err(e) => check("end_space", vec![e.to_string()]),
    }
}

fn automorphisms(c: &GluingComplex, jobs: usize) -> Check {
    let declared: &FiniteGroup = match &c.recipe {
        Recipe::X { group: GroupSource::Finite { group }, .. } | Recipe::Y { group: GroupSource::Finite { group }, .. } => group,
        _ => return skipped("automorphisms", "the declared group acts on the untruncated surface only"),
    };
    let aut = complex_automorphisms_with(c, jobs);
    if isomorphic(&aut, declared) {
        check("automorphisms", Vec::new())
    } else {
        let orders: BTreeSet<usize> = aut.order_profile().into_iter().collect();
        check(
            "automorphisms",
            vec![format!(
                "computed group has order {} (element orders {orders:?}), declared order {}",
                aut.order(),
                declared.order()
            )],
        )
    }
}

fn certificate(c: &GluingComplex) -> Check {
    match &c.completeness {
        None => check("completeness", vec!["no certificate".into()]),
        Some(cert) if !cert.holds => check("completeness", vec!["certificate does not hold".into()]),
        Some(cert) if cert.matches(c) => check("completeness", Vec::new()),
        Some(_) => check("completeness", vec!["certificate does not match the recorded lengths".into()]),
    }
}
