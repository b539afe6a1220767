//! Finite truncations of the glued surfaces.
//!
//! A [`GluingComplex`] records vertex pieces (infinite-genus surfaces with
//! boundary whose own ends are summarized symbolically), edge pieces (tori
//! with two boundary curves), the pairing of boundary curves, every curve
//! length and twist, and the recipe it came from. Symbolic claims such as
//! the end space of the untruncated surface are answered from the recipe;
//! combinatorial claims such as the automorphism group are computed from the
//! truncation.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::endspace::{CharSystem, EndSpace, StarDecomposition};
use crate::format::Decimal;
use crate::grouptable::{find_monomorphism, FiniteGroup, VcElement, VcGroup};
use crate::hypgeom::{certify_complete, CompletenessCertificate, ARCSINH_ONE, TWO_ARCSINH_ONE};
use crate::ordinal::Ordinal;

pub const SCHEMA_VERSION: u32 = 1;

/// Flag set on two-ended complexes built for the characteristic system `(0, 2)`.
pub const CORNER_CASE_ALPHA_ZERO: &str = "corner_case_alpha_zero";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("truncation depth must be at least 1")]
    TruncationTooSmall,
    #[error("end space is not self-similar")]
    NotSelfSimilar,
    #[error("the rank {0} is not a successor ordinal")]
    AlphaNotSuccessor(Ordinal),
    #[error("characteristic system must have degree 2, got {0}")]
    DegreeNotTwo(u64),
    #[error("group descriptor lacks a two-ended certificate")]
    NotTwoEndedCertified,
    #[error("vertex pieces are disconnected or carry different end spaces")]
    VertexEndsDisagree,
    #[error("complex has no recipe")]
    UnknownRecipe,
    #[error("deck group does not embed in the group of the complex")]
    DeckNotSubgroup,
    #[error("deck action is not free: {0}")]
    ActionNotFree(String),
    #[error("deck action does not preserve the decoration: {0}")]
    ActionNotDecorationPreserving(String),
    #[error("quotients need a finite-group recipe")]
    QuotientUnsupported,
    #[error("complex JSON: {0}")]
    Json(String),
    #[error("schema version {0} is not supported")]
    SchemaVersion(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceKind {
    Vertex,
    Edge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Genus {
    Infinite,
    One,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Owner {
    Vertex {
        element: String,
    },
    /// The edge from `element` to `target = element·label`.
    Edge {
        element: String,
        label: String,
        index: u64,
        target: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Port {
    /// Also the key of this curve in the complex's `lambda` table.
    pub name: String,
    pub length: Decimal,
    /// Unpaired because its partner lies outside the truncation.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub frontier: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub id: String,
    pub kind: PieceKind,
    pub owner: Owner,
    pub ports: Vec<Port>,
    /// Interior pants cuffs.
    pub cuffs: Vec<Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_summary: Option<EndSpace>,
    pub genus: Genus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PortRef {
    pub piece: usize,
    pub port: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    pub a: PortRef,
    pub b: PortRef,
    pub orientation_reversing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    /// Largest boundary index used on vertex pieces is `2·depth`.
    pub depth: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
}

/// How a group enters a recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GroupSource {
    Finite { group: FiniteGroup },
    /// An infinite group, materialized on a word-metric ball.
    Ball { group: VcGroup },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "snake_case")]
pub enum Recipe {
    /// One vertex piece per element, edge pieces along the complete Cayley graph.
    X { ends: EndSpace, group: GroupSource },
    /// As `X`, with vertex pieces whose ends are a star decomposition part
    /// compactified at the star point.
    Y {
        ends: EndSpace,
        group: GroupSource,
        star: StarDecomposition,
    },
    /// Two-ended construction over a generating-set Cayley graph.
    XGamma { system: CharSystem, group: VcGroup },
    /// Quotient of a finite-group `X` or `Y` complex by a deck group.
    Quotient {
        base: EndSpace,
        total_order: usize,
        deck: FiniteGroup,
    },
    Manual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluingComplex {
    pub schema_version: u32,
    pub seed: u64,
    pub recipe: Recipe,
    pub truncation: Truncation,
    pub sup_bound: Decimal,
    pub planar_ends: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
    /// Boundary-curve lengths by curve name.
    pub lambda: BTreeMap<String, Decimal>,
    pub pieces: Vec<Piece>,
    pub pairings: Vec<Pairing>,
    /// Twist parameters by curve id: `piece/cN` for interior cuffs and
    /// `vertex-piece/port` for glued boundary curves.
    pub twists: BTreeMap<String, Decimal>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completeness: Option<CompletenessCertificate>,
}

/// The `n`-th boundary length, `n ≥ 1`: `asinh(1)·(n+1)/(n+2) − asinh(1)/2`,
/// strictly increasing in `(0, asinh(1)/2)`.
pub fn lambda_value(n: u64) -> f64 {
    assert!(n >= 1);
    let n = n as f64;
    ARCSINH_ONE * (n + 1.0) / (n + 2.0) - ARCSINH_ONE / 2.0
}

/// Base interior cuff lengths of vertex pieces, strictly increasing in
/// `(1.5·asinh(1), 2·asinh(1))`.
fn cuff_base(j: usize) -> f64 {
    let j = j as f64;
    ARCSINH_ONE * (1.0 + (j + 1.0) / (j + 2.0))
}

fn cuff_gap(j: usize) -> f64 {
    cuff_base(j + 1) - cuff_base(j)
}

fn port_name(label: &str, k: u64) -> String {
    format!("d({label},{k})")
}

fn zeta_name(label: &str, i: u64) -> String {
    format!("z({label},{i})")
}

/// A vertex set with a multiplication to pair ports along.
struct Materialized {
    names: Vec<String>,
    /// Labels, in enumeration order.
    labels: Vec<String>,
    /// `step[v][l]`: the vertex `v·label_l`, if materialized.
    step: Vec<Vec<Option<usize>>>,
}

impl Materialized {
    fn complete_finite(g: &FiniteGroup) -> Self {
        let labels: Vec<usize> = g.non_identity().collect();
        Self {
            names: g.names().to_vec(),
            labels: labels.iter().map(|&h| g.name(h).to_string()).collect(),
            step: g
                .elements()
                .map(|x| labels.iter().map(|&h| Some(g.mul(x, h))).collect())
                .collect(),
        }
    }

    /// Complete Cayley graph restricted to a ball, with labels the non-trivial
    /// differences of ball elements.
    fn complete_ball(g: &VcGroup, radius: usize) -> Self {
        let ball: Vec<VcElement> = g.ball(radius).into_iter().map(|(x, _)| x).collect();
        let index: HashMap<VcElement, usize> = ball.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut labels: Vec<VcElement> = Vec::new();
        let mut seen = HashSet::new();
        for &a in &ball {
            for &b in &ball {
                let d = g.mul(g.inv(a), b);
                if d != g.identity() && seen.insert(d) {
                    labels.push(d);
                }
            }
        }
        labels.sort();
        Self {
            names: ball.iter().map(|&x| g.name(x)).collect(),
            labels: labels.iter().map(|&h| g.name(h)).collect(),
            step: ball
                .iter()
                .map(|&x| labels.iter().map(|&h| index.get(&g.mul(x, h)).copied()).collect())
                .collect(),
        }
    }

    fn generating_ball(g: &VcGroup, radius: usize) -> Self {
        let ball: Vec<VcElement> = g.ball(radius).into_iter().map(|(x, _)| x).collect();
        let index: HashMap<VcElement, usize> = ball.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        Self {
            names: ball.iter().map(|&x| g.name(x)).collect(),
            labels: g.generators().iter().map(|&s| g.name(s)).collect(),
            step: ball
                .iter()
                .map(|&x| g.generators().iter().map(|&s| index.get(&g.mul(x, s)).copied()).collect())
                .collect(),
        }
    }
}

/// Tracks curve twists, drawn once per orbit key so the group action is
/// isometric.
struct Twists {
    rng: ChaCha8Rng,
    by_orbit: BTreeMap<String, Decimal>,
    by_curve: BTreeMap<String, Decimal>,
}

impl Twists {
    fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            by_orbit: BTreeMap::new(),
            by_curve: BTreeMap::new(),
        }
    }

    fn assign(&mut self, curve: String, orbit: String) {
        let rng = &mut self.rng;
        let t = *self
            .by_orbit
            .entry(orbit)
            .or_insert_with(|| Decimal::new(rng.gen_range(-0.5..0.5)));
        self.by_curve.insert(curve, t);
    }
}

struct Blueprint<'a> {
    vertex_ends: Option<EndSpace>,
    vertices: &'a Materialized,
    /// Edge pieces are indexed `1..=depth` per label (complete graphs) or
    /// one per label (generating-set graphs).
    depth: Option<u64>,
    seed: u64,
}

/// Shared assembly for all three constructions.
fn assemble(bp: Blueprint<'_>) -> (Vec<Piece>, Vec<Pairing>, BTreeMap<String, Decimal>, BTreeMap<String, Decimal>) {
    let mv = bp.vertices;
    // Boundary curve names on each vertex piece, in enumeration order, with
    // the edge-port slots they pair with.
    let mut vertex_ports: Vec<String> = Vec::new();
    let mut lambda = BTreeMap::new();
    for label in &mv.labels {
        match bp.depth {
            Some(m) => {
                for k in 1..=2 * m {
                    vertex_ports.push(port_name(label, k));
                }
            }
            None => {
                for i in 0..2 {
                    vertex_ports.push(zeta_name(label, i));
                }
            }
        }
    }
    for (n, name) in vertex_ports.iter().enumerate() {
        lambda.insert(name.clone(), Decimal::new(lambda_value(n as u64 + 1)));
    }
    let cuff_count = vertex_ports.len() + 1;
    let mut perturb = ChaCha8Rng::seed_from_u64(bp.seed ^ 0x9e37_79b9_7f4a_7c15);
    let cuffs: Vec<Decimal> = (0..cuff_count)
        .map(|j| Decimal::new(cuff_base(j) + perturb.gen_range(0.0..0.25) * cuff_gap(j)))
        .collect();
    let mut twists = Twists::new(bp.seed);

    let mut pieces = Vec::new();
    let port_index: HashMap<&str, usize> =
        vertex_ports.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    for (v, name) in mv.names.iter().enumerate() {
        let id = format!("v{v}");
        for j in 0..cuff_count {
            twists.assign(format!("{id}/c{j}"), format!("V/c{j}"));
        }
        pieces.push(Piece {
            id,
            kind: PieceKind::Vertex,
            owner: Owner::Vertex {
                element: name.clone(),
            },
            ports: vertex_ports
                .iter()
                .map(|n| Port {
                    name: n.clone(),
                    length: lambda[n],
                    frontier: true,
                })
                .collect(),
            cuffs: cuffs.clone(),
            end_summary: bp.vertex_ends.clone(),
            genus: Genus::Infinite,
        });
    }

    let mut pairings = Vec::new();
    let edge_cuff = Decimal::new(ARCSINH_ONE);
    let mut e = 0;
    for v in 0..mv.names.len() {
        for (l, label) in mv.labels.iter().enumerate() {
            let Some(w) = mv.step[v][l] else { continue };
            let slots: Vec<(u64, String, String)> = match bp.depth {
                Some(m) => (1..=m)
                    .map(|i| (i, port_name(label, 2 * i), port_name(label, 2 * i - 1)))
                    .collect(),
                None => vec![(0, zeta_name(label, 0), zeta_name(label, 1))],
            };
            for (index, out_port, in_port) in slots {
                let id = format!("e{e}");
                e += 1;
                let orbit = format!("E({label},{index})");
                twists.assign(format!("{id}/c0"), format!("{orbit}/c0"));
                twists.assign(format!("{id}/c1"), format!("{orbit}/c1"));
                let piece = pieces.len();
                pieces.push(Piece {
                    id,
                    kind: PieceKind::Edge,
                    owner: Owner::Edge {
                        element: mv.names[v].clone(),
                        label: label.clone(),
                        index,
                        target: mv.names[w].clone(),
                    },
                    ports: vec![
                        Port {
                            name: out_port.clone(),
                            length: lambda[&out_port],
                            frontier: false,
                        },
                        Port {
                            name: in_port.clone(),
                            length: lambda[&in_port],
                            frontier: false,
                        },
                    ],
                    cuffs: vec![edge_cuff, edge_cuff],
                    end_summary: None,
                    genus: Genus::One,
                });
                for (edge_port, vertex, vport) in [(0, v, &out_port), (1, w, &in_port)] {
                    let slot = port_index[vport.as_str()];
                    pieces[vertex].ports[slot].frontier = false;
                    twists.assign(format!("v{vertex}/{vport}"), format!("d/{vport}"));
                    pairings.push(Pairing {
                        a: PortRef { piece: vertex, port: slot },
                        b: PortRef { piece, port: edge_port },
                        orientation_reversing: true,
                    });
                }
            }
        }
    }
    (pieces, pairings, lambda, twists.by_curve)
}

fn finish(mut c: GluingComplex) -> GluingComplex {
    c.completeness = certify_complete(&c).ok();
    c
}

fn check_depth(m: u64) -> Result<(), SynthError> {
    if m < 1 {
        Err(SynthError::TruncationTooSmall)
    } else {
        Ok(())
    }
}

fn materialize(group: &GroupSource, radius: usize) -> (Materialized, Option<usize>) {
    match group {
        GroupSource::Finite { group } => (Materialized::complete_finite(group), None),
        GroupSource::Ball { group } => (Materialized::complete_ball(group, radius), Some(radius)),
    }
}

/// `X`: vertex ends are `e` itself.
pub fn build_x(e: &EndSpace, group: GroupSource, m: u64, radius: usize, seed: u64) -> Result<GluingComplex, SynthError> {
    check_depth(m)?;
    let (mv, radius) = materialize(&group, radius);
    let (pieces, pairings, lambda, twists) = assemble(Blueprint {
        vertex_ends: Some(e.clone()),
        vertices: &mv,
        depth: Some(m),
        seed,
    });
    Ok(finish(GluingComplex {
        schema_version: SCHEMA_VERSION,
        seed,
        recipe: Recipe::X {
            ends: e.clone(),
            group,
        },
        truncation: Truncation { depth: m, radius },
        sup_bound: Decimal::new(TWO_ARCSINH_ONE),
        planar_ends: 0,
        flags: Vec::new(),
        lambda,
        pieces,
        pairings,
        twists,
        completeness: None,
    }))
}

/// `X` over a finite group.
pub fn build_x_finite(e: &EndSpace, g: &FiniteGroup, m: u64, seed: u64) -> Result<GluingComplex, SynthError> {
    build_x(e, GroupSource::Finite { group: g.clone() }, m, 0, seed)
}

/// `Y`: vertex ends are `E₁ ∪ {x}` for a star decomposition of `e`. The
/// one-point space has no star decomposition and falls back to `X`.
pub fn build_y(e: &EndSpace, group: GroupSource, m: u64, radius: usize, seed: u64) -> Result<GluingComplex, SynthError> {
    check_depth(m)?;
    if !e.is_self_similar() {
        return Err(SynthError::NotSelfSimilar);
    }
    if *e == EndSpace::Singleton {
        return build_x(e, group, m, radius, seed);
    }
    let star = e.star_decomposition().map_err(|_| SynthError::NotSelfSimilar)?;
    let (mv, radius) = materialize(&group, radius);
    let (pieces, pairings, lambda, twists) = assemble(Blueprint {
        vertex_ends: Some(star.part.compactify()),
        vertices: &mv,
        depth: Some(m),
        seed,
    });
    Ok(finish(GluingComplex {
        schema_version: SCHEMA_VERSION,
        seed,
        recipe: Recipe::Y {
            ends: e.clone(),
            group,
            star,
        },
        truncation: Truncation { depth: m, radius },
        sup_bound: Decimal::new(TWO_ARCSINH_ONE),
        planar_ends: 0,
        flags: Vec::new(),
        lambda,
        pieces,
        pairings,
        twists,
        completeness: None,
    }))
}

/// `X_Γ` for a two-ended group and characteristic system `(α, 2)`.
pub fn build_x_gamma(g: &VcGroup, cs: &CharSystem, radius: usize, seed: u64) -> Result<GluingComplex, SynthError> {
    if cs.degree != 2 {
        return Err(SynthError::DegreeNotTwo(cs.degree));
    }
    let mut flags = Vec::new();
    let vertex_ends = if cs.alpha.is_zero() {
        flags.push(CORNER_CASE_ALPHA_ZERO.to_string());
        None
    } else if cs.alpha.is_successor() {
        Some(EndSpace::tower(cs.alpha.pred().expect("successor")))
    } else {
        return Err(SynthError::AlphaNotSuccessor(cs.alpha.clone()));
    };
    if !g.two_ended_certificate {
        return Err(SynthError::NotTwoEndedCertified);
    }
    let mv = Materialized::generating_ball(g, radius);
    let (pieces, pairings, lambda, twists) = assemble(Blueprint {
        vertex_ends,
        vertices: &mv,
        depth: None,
        seed,
    });
    Ok(finish(GluingComplex {
        schema_version: SCHEMA_VERSION,
        seed,
        recipe: Recipe::XGamma {
            system: cs.clone(),
            group: g.clone(),
        },
        truncation: Truncation { depth: 1, radius: Some(radius) },
        sup_bound: Decimal::new(TWO_ARCSINH_ONE),
        planar_ends: 0,
        flags,
        lambda,
        pieces,
        pairings,
        twists,
        completeness: None,
    }))
}

impl GluingComplex {
    pub fn vertex_count(&self) -> usize {
        self.pieces.iter().filter(|p| p.kind == PieceKind::Vertex).count()
    }

    pub fn edge_count(&self) -> usize {
        self.pieces.iter().filter(|p| p.kind == PieceKind::Edge).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("complex serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SynthError> {
        let c: GluingComplex = serde_json::from_str(text).map_err(|e| SynthError::Json(e.to_string()))?;
        if c.schema_version != SCHEMA_VERSION {
            return Err(SynthError::SchemaVersion(c.schema_version));
        }
        Ok(c)
    }

    pub fn piece_index(&self, id: &str) -> Option<usize> {
        self.pieces.iter().position(|p| p.id == id)
    }

    /// `partner[piece][port]`: the port glued to it.
    pub fn partners(&self) -> Vec<Vec<Option<PortRef>>> {
        let mut out: Vec<Vec<Option<PortRef>>> =
            self.pieces.iter().map(|p| vec![None; p.ports.len()]).collect();
        for pr in &self.pairings {
            if let (Some(a), Some(b)) = (self.slot(pr.a), self.slot(pr.b)) {
                let _ = (a, b);
                out[pr.a.piece][pr.a.port] = Some(pr.b);
                out[pr.b.piece][pr.b.port] = Some(pr.a);
            }
        }
        out
    }

    fn slot(&self, r: PortRef) -> Option<&Port> {
        self.pieces.get(r.piece)?.ports.get(r.port)
    }

    /// Piece adjacency through pairings.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.pieces.len()];
        for pr in &self.pairings {
            if pr.a.piece < adj.len() && pr.b.piece < adj.len() {
                adj[pr.a.piece].push(pr.b.piece);
                adj[pr.b.piece].push(pr.a.piece);
            }
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        connected_without(&self.adjacency(), &vec![false; self.pieces.len()])
    }
}

/// True when the pieces not marked `removed` form one connected graph.
fn connected_without(adj: &[Vec<usize>], removed: &[bool]) -> bool {
    let Some(start) = (0..adj.len()).find(|&i| !removed[i]) else {
        return true;
    };
    let mut seen = vec![false; adj.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !removed[y] && !std::mem::replace(&mut seen[y], true) {
                queue.push_back(y);
            }
        }
    }
    (0..adj.len()).all(|i| removed[i] || seen[i])
}

/// End space of the surface a complex models.
///
/// With `ideal`, this is the untruncated surface: for a finite group all
/// vertex ends are identified along infinitely many edge pieces, so the
/// surface has the ends of one vertex piece; over an infinite group the
/// complete-Cayley surface is one-ended; `Y` merges the star points of all
/// vertex pieces; `X_Γ` has the two ends of `Γ` plus the vertex ends
/// accumulating onto them. Without `ideal`, it is the union of the ends of
/// the materialized vertex pieces.
pub fn complex_end_space(c: &GluingComplex, ideal: bool) -> Result<EndSpace, SynthError> {
    if !ideal {
        let parts: Vec<EndSpace> = c
            .pieces
            .iter()
            .filter_map(|p| p.end_summary.clone())
            .collect();
        return EndSpace::union(parts)
            .map(|e| e.canonical())
            .map_err(|_| SynthError::UnknownRecipe);
    }
    match &c.recipe {
        Recipe::Manual => Err(SynthError::UnknownRecipe),
        Recipe::X {
            group: GroupSource::Ball { .. },
            ..
        }
        | Recipe::Y {
            ends: EndSpace::Singleton,
            group: GroupSource::Ball { .. },
            ..
        } => Ok(EndSpace::Singleton),
        Recipe::X { .. } | Recipe::Quotient { .. } => merged_vertex_ends(c).ok_or(SynthError::VertexEndsDisagree),
        Recipe::Y { star, .. } => Ok(star.part.compactify().canonical()),
        Recipe::XGamma { system, .. } => Ok(system.canonical()),
    }
}

/// The common end space of the vertex pieces of a connected complex, when
/// they all agree.
fn merged_vertex_ends(c: &GluingComplex) -> Option<EndSpace> {
    let mut summaries = c
        .pieces
        .iter()
        .filter(|p| p.kind == PieceKind::Vertex)
        .map(|p| p.end_summary.as_ref().map(EndSpace::canonical));
    let first = summaries.next()??;
    (summaries.all(|s| s.as_ref() == Some(&first)) && c.is_connected()).then_some(first)
}

/// Result of a deck-group quotient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverDescriptor {
    pub total: GluingComplex,
    pub group: FiniteGroup,
    /// Image of the deck group inside the group of the total complex.
    pub embedding: Vec<usize>,
    pub quotient: GluingComplex,
    /// `deck_action[d][piece]` is the piece that `d` moves `piece` to.
    pub deck_action: Vec<Vec<usize>>,
    /// `projection[piece]` is the quotient piece under `piece`.
    pub projection: Vec<usize>,
}

fn finite_group_of(c: &GluingComplex) -> Option<(&FiniteGroup, &EndSpace)> {
    match &c.recipe {
        Recipe::X {
            ends,
            group: GroupSource::Finite { group },
        }
        | Recipe::Y {
            ends,
            group: GroupSource::Finite { group },
            ..
        } => Some((group, ends)),
        _ => None,
    }
}

/// Quotient by a deck group, embedded into the complex's group and acting by
/// left multiplication.
pub fn quotient(c: &GluingComplex, deck: &FiniteGroup) -> Result<CoverDescriptor, SynthError> {
    let (g, _) = finite_group_of(c).ok_or(SynthError::QuotientUnsupported)?;
    let embedding = find_monomorphism(deck, g).ok_or(SynthError::DeckNotSubgroup)?;
    quotient_with(c, deck, embedding)
}

pub fn quotient_with(c: &GluingComplex, deck: &FiniteGroup, embedding: Vec<usize>) -> Result<CoverDescriptor, SynthError> {
    let (g, base) = finite_group_of(c).ok_or(SynthError::QuotientUnsupported)?;
    if !deck.is_homomorphism(g, &embedding) {
        return Err(SynthError::ActionNotDecorationPreserving(
            "deck map is not a homomorphism".into(),
        ));
    }
    let element = |name: &str| g.index_of(name).expect("recipe element");
    // Pieces keyed by (kind, element, label, index).
    let key = |p: &Piece| -> (usize, Option<(String, u64)>) {
        match &p.owner {
            Owner::Vertex { element: x } => (element(x), None),
            Owner::Edge { element: x, label, index, .. } => (element(x), Some((label.clone(), *index))),
        }
    };
    let lookup: HashMap<(usize, Option<(String, u64)>), usize> =
        c.pieces.iter().enumerate().map(|(i, p)| (key(p), i)).collect();
    let deck_action: Vec<Vec<usize>> = deck
        .elements()
        .map(|d| {
            c.pieces
                .iter()
                .map(|p| {
                    let (x, rest) = key(p);
                    lookup[&(g.mul(embedding[d], x), rest)]
                })
                .collect()
        })
        .collect();
    check_deck_action(c, deck, &deck_action)?;

    // Orbit representatives: smallest piece index in each orbit.
    let n = c.pieces.len();
    let mut projection = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for i in 0..n {
        if projection[i] == usize::MAX {
            let q = reps.len();
            reps.push(i);
            for act in &deck_action {
                projection[act[i]] = q;
            }
        }
    }
    let mut pieces: Vec<Piece> = reps
        .iter()
        .enumerate()
        .map(|(q, &i)| {
            let mut p = c.pieces[i].clone();
            p.id = format!("{}{q}", if p.kind == PieceKind::Vertex { "v" } else { "e" });
            p
        })
        .collect();
    // Re-label every piece id as v0.., e0.. in order.
    let (mut nv, mut ne) = (0, 0);
    for p in &mut pieces {
        let counter = if p.kind == PieceKind::Vertex { &mut nv } else { &mut ne };
        p.id = format!("{}{}", if p.kind == PieceKind::Vertex { "v" } else { "e" }, counter);
        *counter += 1;
    }
    let mut pairings = Vec::new();
    let mut seen = HashSet::new();
    for pr in &c.pairings {
        let (a, b) = (pr.a, pr.b);
        let qa = PortRef { piece: projection[a.piece], port: a.port };
        let qb = PortRef { piece: projection[b.piece], port: b.port };
        // Keep the gluing seen from the representative edge piece.
        let edge_side = if c.pieces[b.piece].kind == PieceKind::Edge { b } else { a };
        if reps[projection[edge_side.piece]] != edge_side.piece {
            continue;
        }
        if seen.insert((qa, qb)) {
            pairings.push(Pairing { a: qa, b: qb, orientation_reversing: pr.orientation_reversing });
        }
    }
    let mut twists = BTreeMap::new();
    for (curve, &t) in &c.twists {
        let (piece, rest) = curve.split_once('/').expect("curve id");
        let i = c.piece_index(piece).expect("twist piece");
        if reps[projection[i]] == i {
            twists.insert(format!("{}/{rest}", pieces[projection[i]].id), t);
        }
    }
    let quotient = finish(GluingComplex {
        schema_version: SCHEMA_VERSION,
        seed: c.seed,
        recipe: Recipe::Quotient {
            base: base.clone(),
            total_order: g.order(),
            deck: deck.clone(),
        },
        truncation: c.truncation,
        sup_bound: c.sup_bound,
        planar_ends: c.planar_ends,
        flags: c.flags.clone(),
        lambda: c.lambda.clone(),
        pieces,
        pairings,
        twists,
        completeness: None,
    });
    Ok(CoverDescriptor {
        total: c.clone(),
        group: deck.clone(),
        embedding,
        quotient,
        deck_action,
        projection,
    })
}

/// Checks that `action` is a free group action preserving kinds, lengths,
/// twists and pairings.
pub fn check_deck_action(c: &GluingComplex, deck: &FiniteGroup, action: &[Vec<usize>]) -> Result<(), SynthError> {
    let n = c.pieces.len();
    let id = deck.identity();
    if action[id].iter().enumerate().any(|(i, &j)| i != j) {
        return Err(SynthError::ActionNotFree("identity moves a piece".into()));
    }
    for a in deck.elements() {
        for b in deck.elements() {
            let ab = deck.mul(a, b);
            if (0..n).any(|i| action[ab][i] != action[a][action[b][i]]) {
                return Err(SynthError::ActionNotFree(format!(
                    "composition fails for {} and {}",
                    deck.name(a),
                    deck.name(b)
                )));
            }
        }
        if a != id {
            if let Some(i) = (0..n).find(|&i| action[a][i] == i) {
                return Err(SynthError::ActionNotFree(format!(
                    "{} fixes piece {}",
                    deck.name(a),
                    c.pieces[i].id
                )));
            }
        }
        let sig = Signatures::new(c);
        for i in 0..n {
            if sig.piece[i] != sig.piece[action[a][i]] {
                return Err(SynthError::ActionNotDecorationPreserving(format!(
                    "{} maps {} to a differently decorated piece",
                    deck.name(a),
                    c.pieces[i].id
                )));
            }
        }
        if !preserves_pairings(c, &action[a]) {
            return Err(SynthError::ActionNotDecorationPreserving(format!(
                "{} breaks a pairing or twist",
                deck.name(a)
            )));
        }
    }
    Ok(())
}

/// Decoration data a piece map must preserve.
struct Signatures {
    piece: Vec<PieceSig>,
    /// Port position by length, per piece.
    port_by_length: Vec<HashMap<u64, usize>>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct PieceSig {
    kind: PieceKind,
    ports: Vec<(u64, bool, Option<u64>)>,
    cuffs: Vec<(u64, Option<u64>)>,
    ends: Option<EndSpace>,
}

fn bits(d: Decimal) -> u64 {
    d.get().to_bits()
}

impl Signatures {
    fn new(c: &GluingComplex) -> Self {
        let twist = |key: String| c.twists.get(&key).map(|&t| bits(t));
        let mut piece = Vec::with_capacity(c.pieces.len());
        let mut port_by_length = Vec::with_capacity(c.pieces.len());
        for p in &c.pieces {
            let mut ports: Vec<(u64, bool, Option<u64>)> = p
                .ports
                .iter()
                .map(|port| (bits(port.length), port.frontier, twist(format!("{}/{}", p.id, port.name))))
                .collect();
            ports.sort();
            let mut cuffs: Vec<(u64, Option<u64>)> = p
                .cuffs
                .iter()
                .enumerate()
                .map(|(j, &l)| (bits(l), twist(format!("{}/c{j}", p.id))))
                .collect();
            // Edge-piece cuffs may be swapped; vertex pieces are rigid, so their
            // cuffs keep their positions.
            if p.kind == PieceKind::Edge {
                cuffs.sort();
            }
            piece.push(PieceSig {
                kind: p.kind,
                ports,
                cuffs,
                ends: p.end_summary.as_ref().map(EndSpace::canonical),
            });
            port_by_length.push(
                p.ports
                    .iter()
                    .enumerate()
                    .map(|(i, port)| (bits(port.length), i))
                    .collect(),
            );
        }
        Self { piece, port_by_length }
    }

    /// The port of `to` matching port `port` of `from`, when lengths are
    /// distinct within each piece.
    fn image_port(&self, c: &GluingComplex, from: usize, port: usize, to: usize) -> Option<usize> {
        self.port_by_length[to]
            .get(&bits(c.pieces[from].ports[port].length))
            .copied()
    }
}

fn preserves_pairings(c: &GluingComplex, map: &[usize]) -> bool {
    let sig = Signatures::new(c);
    let partners = c.partners();
    for (i, p) in c.pieces.iter().enumerate() {
        for port in 0..p.ports.len() {
            let Some(j) = sig.image_port(c, i, port, map[i]) else {
                return false;
            };
            match (partners[i][port], partners[map[i]][j]) {
                (None, None) => {}
                (Some(q), Some(q2)) => {
                    if map[q.piece] != q2.piece || sig.image_port(c, q.piece, q.port, q2.piece) != Some(q2.port) {
                        return false;
                    }
                }
                _ => return false,
            }
        }
    }
    true
}

/// Decoration-preserving piece permutations, in sorted order.
pub fn automorphism_maps(c: &GluingComplex, jobs: usize) -> Vec<Vec<usize>> {
    let n = c.pieces.len();
    if n == 0 {
        return vec![Vec::new()];
    }
    let sig = Signatures::new(c);
    let partners = c.partners();
    // Ports within a piece must have distinct lengths for the forced port map.
    if sig.port_by_length.iter().zip(&c.pieces).any(|(m, p)| m.len() != p.ports.len()) {
        return brute_force_maps(c, &sig);
    }
    let search = Search { c, sig: &sig, partners: &partners };
    let start = (0..n).find(|&i| c.pieces[i].kind == PieceKind::Vertex).unwrap_or(0);
    let candidates: Vec<usize> = (0..n).filter(|&j| sig.piece[j] == sig.piece[start]).collect();
    let mut found: Vec<Vec<usize>> = if jobs > 1 && candidates.len() > 1 {
        let chunks: Vec<&[usize]> = candidates.chunks(candidates.len().div_ceil(jobs)).collect();
        std::thread::scope(|s| {
            let handles: Vec<_> = chunks
                .into_iter()
                .map(|chunk| s.spawn(|| chunk.iter().flat_map(|&j| search.from(start, j)).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("search thread")).collect()
        })
    } else {
        candidates.iter().flat_map(|&j| search.from(start, j)).collect()
    };
    found.sort();
    found.dedup();
    found
}

struct Search<'a> {
    c: &'a GluingComplex,
    sig: &'a Signatures,
    partners: &'a [Vec<Option<PortRef>>],
}

impl Search<'_> {
    /// All automorphisms sending `start` to `image`.
    fn from(&self, start: usize, image: usize) -> Vec<Vec<usize>> {
        let n = self.c.pieces.len();
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        let mut out = Vec::new();
        if self.assign(&mut map, &mut used, start, image) {
            self.complete(&mut map, &mut used, &mut out);
        }
        out
    }

    fn complete(&self, map: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let Some(v) = map.iter().position(|&x| x == usize::MAX) else {
            if preserves_pairings(self.c, map) {
                out.push(map.clone());
            }
            return;
        };
        for w in 0..map.len() {
            if used[w] || self.sig.piece[v] != self.sig.piece[w] {
                continue;
            }
            let (m0, u0) = (map.clone(), used.clone());
            if self.assign(map, used, v, w) {
                self.complete(map, used, out);
            }
            *map = m0;
            *used = u0;
        }
    }

    /// Sets `v ↦ w` and follows pairings; false on a contradiction.
    fn assign(&self, map: &mut [usize], used: &mut [bool], v: usize, w: usize) -> bool {
        let mut stack = vec![(v, w)];
        while let Some((x, y)) = stack.pop() {
            if map[x] != usize::MAX {
                if map[x] != y {
                    return false;
                }
                continue;
            }
            if used[y] || self.sig.piece[x] != self.sig.piece[y] {
                return false;
            }
            map[x] = y;
            used[y] = true;
            for port in 0..self.c.pieces[x].ports.len() {
                let Some(j) = self.sig.image_port(self.c, x, port, y) else {
                    return false;
                };
                match (self.partners[x][port], self.partners[y][j]) {
                    (Some(q), Some(q2)) => stack.push((q.piece, q2.piece)),
                    (None, None) => {}
                    _ => return false,
                }
            }
        }
        true
    }
}

/// Exhaustive search, used only when port lengths repeat within a piece.
fn brute_force_maps(c: &GluingComplex, sig: &Signatures) -> Vec<Vec<usize>> {
    fn rec(c: &GluingComplex, sig: &Signatures, map: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let v = map.len();
        if v == c.pieces.len() {
            if pairing_multiset_preserved(c, map) {
                out.push(map.clone());
            }
            return;
        }
        for w in 0..c.pieces.len() {
            if !used[w] && sig.piece[v] == sig.piece[w] {
                used[w] = true;
                map.push(w);
                rec(c, sig, map, used, out);
                map.pop();
                used[w] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(c, sig, &mut Vec::new(), &mut vec![false; c.pieces.len()], &mut out);
    out
}

/// Piece-level check: the multiset of glued piece pairs with their lengths
/// is preserved.
fn pairing_multiset_preserved(c: &GluingComplex, map: &[usize]) -> bool {
    let entry = |a: PortRef, b: PortRef, m: &dyn Fn(usize) -> usize| {
        let la = bits(c.pieces[a.piece].ports[a.port].length);
        let lb = bits(c.pieces[b.piece].ports[b.port].length);
        let (x, y) = ((m(a.piece), la), (m(b.piece), lb));
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    };
    let mut before: Vec<_> = c.pairings.iter().map(|p| entry(p.a, p.b, &|i| map[i])).collect();
    let mut after: Vec<_> = c.pairings.iter().map(|p| entry(p.a, p.b, &|i| i)).collect();
    before.sort();
    after.sort();
    before == after
}

/// The group of decoration-preserving piece permutations.
pub fn complex_automorphisms(c: &GluingComplex) -> FiniteGroup {
    complex_automorphisms_with(c, 1)
}

pub fn complex_automorphisms_with(c: &GluingComplex, jobs: usize) -> FiniteGroup {
    let maps = automorphism_maps(c, jobs);
    let names = (0..maps.len()).map(|i| format!("a{i}")).collect();
    FiniteGroup::from_permutations(maps, names).expect("automorphisms are closed")
}

/// Removes the vertex pieces at distance `≤ r` from `center` (in the
/// complex's own word metric, using its edge pieces) together with their
/// incident edge pieces, and reports whether the rest stays connected.
pub fn connected_after_removing_ball(c: &GluingComplex, center: usize, r: usize) -> bool {
    let adj = c.adjacency();
    let vertices: Vec<usize> = (0..c.pieces.len())
        .filter(|&i| c.pieces[i].kind == PieceKind::Vertex)
        .collect();
    // Vertex-to-vertex steps of length one pass through exactly one edge piece.
    let mut dist = vec![usize::MAX; c.pieces.len()];
    dist[center] = 0;
    let mut queue = VecDeque::from([center]);
    while let Some(v) = queue.pop_front() {
        if dist[v] == r {
            continue;
        }
        for &e in &adj[v] {
            for &w in &adj[e] {
                if c.pieces[w].kind == PieceKind::Vertex && dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    let mut removed = vec![false; c.pieces.len()];
    for &v in &vertices {
        if dist[v] <= r {
            removed[v] = true;
            for &e in &adj[v] {
                removed[e] = true;
            }
        }
    }
    connected_without(&adj, &removed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouptable::isomorphic;

    fn w1() -> EndSpace {
        EndSpace::omega_sum(EndSpace::Singleton)
    }

    fn z(n: usize) -> FiniteGroup {
        FiniteGroup::cyclic(n)
    }

    #[test]
    fn lambda_is_injective_and_in_band() {
        let mut prev = 0.0;
        for n in 1..10_000 {
            let l = lambda_value(n);
            assert!(l > prev && l < ARCSINH_ONE / 2.0);
            prev = l;
        }
        for j in 0..1000 {
            assert!(cuff_base(j) > ARCSINH_ONE && cuff_base(j) + cuff_gap(j) < TWO_ARCSINH_ONE);
        }
    }

    #[test]
    fn build_x_counts() {
        let c = build_x_finite(&w1(), &z(2), 2, 7).unwrap();
        assert_eq!((c.vertex_count(), c.edge_count(), c.pairings.len()), (2, 4, 8));
        let c = build_x_finite(&EndSpace::Singleton, &FiniteGroup::trivial(), 1, 7).unwrap();
        assert_eq!((c.vertex_count(), c.edge_count()), (1, 0));
        let c = build_x_finite(&EndSpace::Cantor, &z(3), 1, 7).unwrap();
        assert_eq!((c.vertex_count(), c.edge_count()), (3, 6));
        assert_eq!(build_x_finite(&w1(), &z(2), 0, 7), Err(SynthError::TruncationTooSmall));
    }

    #[test]
    fn edge_convention() {
        let g = FiniteGroup::symmetric(3);
        let c = build_x_finite(&w1(), &g, 2, 1).unwrap();
        let partners = c.partners();
        for (i, p) in c.pieces.iter().enumerate() {
            let Owner::Edge { element, label, index, target } = &p.owner else { continue };
            let gh = g.mul(g.index_of(element).unwrap(), g.index_of(label).unwrap());
            assert_eq!(g.name(gh), target);
            let out = partners[i][0].unwrap();
            let inp = partners[i][1].unwrap();
            assert_eq!(c.pieces[out.piece].owner, Owner::Vertex { element: element.clone() });
            assert_eq!(c.pieces[inp.piece].owner, Owner::Vertex { element: target.clone() });
            assert_eq!(c.pieces[out.piece].ports[out.port].name, port_name(label, 2 * index));
            assert_eq!(c.pieces[inp.piece].ports[inp.port].name, port_name(label, 2 * index - 1));
        }
    }

    #[test]
    fn every_port_paired_in_finite_complexes() {
        let c = build_x_finite(&w1(), &FiniteGroup::dihedral(4), 2, 3).unwrap();
        let partners = c.partners();
        assert!(partners.iter().flatten().all(Option::is_some));
        for pr in &c.pairings {
            let a = &c.pieces[pr.a.piece].ports[pr.a.port];
            let b = &c.pieces[pr.b.piece].ports[pr.b.port];
            assert_eq!(a.length, b.length);
            assert_eq!(a.name, b.name);
        }
    }

    #[test]
    fn small_automorphism_groups() {
        let c = build_x_finite(&w1(), &z(2), 2, 7).unwrap();
        assert_eq!(complex_automorphisms(&c).order(), 2);
        let s3 = FiniteGroup::symmetric(3);
        let c = build_x_finite(&EndSpace::Cantor, &s3, 1, 7).unwrap();
        let aut = complex_automorphisms_with(&c, 3);
        assert!(isomorphic(&aut, &s3));
        assert!(!aut.is_abelian());
        let c = build_x_finite(&w1(), &FiniteGroup::trivial(), 1, 7).unwrap();
        assert_eq!(complex_automorphisms(&c).order(), 1);
    }

    #[test]
    fn breaking_a_twist_kills_symmetry() {
        let mut c = build_x_finite(&w1(), &z(3), 1, 7).unwrap();
        let key = c.twists.keys().find(|k| k.starts_with("e0/")).unwrap().clone();
        c.twists.insert(key, Decimal::new(0.4321));
        assert_eq!(complex_automorphisms(&c).order(), 1);
    }

    #[test]
    fn determinism() {
        let a = build_x_finite(&w1(), &z(3), 2, 11).unwrap().to_json();
        let b = build_x_finite(&w1(), &z(3), 2, 11).unwrap().to_json();
        let c = build_x_finite(&w1(), &z(3), 2, 12).unwrap().to_json();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let parsed = GluingComplex::from_json(&a).unwrap();
        assert_eq!(parsed.to_json(), a);
    }

    #[test]
    fn y_construction() {
        let c = build_y(&w1(), GroupSource::Finite { group: z(2) }, 1, 0, 5).unwrap();
        let v = &c.pieces[0];
        assert!(v.end_summary.as_ref().unwrap().homeomorphic(&w1()));
        assert_eq!(complex_end_space(&c, true).unwrap(), w1().canonical());
        let pair = EndSpace::Union(vec![EndSpace::Singleton, EndSpace::Singleton]);
        assert_eq!(
            build_y(&pair, GroupSource::Finite { group: z(2) }, 1, 0, 5),
            Err(SynthError::NotSelfSimilar)
        );
        let c = build_y(&EndSpace::Cantor, GroupSource::Finite { group: z(3) }, 1, 0, 5).unwrap();
        assert_eq!(c.vertex_count(), 3);
        assert!(c.pieces[..3].iter().all(|p| p.end_summary == Some(EndSpace::omega_sum(EndSpace::Cantor))));
        let c = build_y(&w1(), GroupSource::Ball { group: VcGroup::integers() }, 1, 2, 5).unwrap();
        assert_eq!(
            complex_end_space(&c, true).unwrap().countable_system(),
            Some(CharSystem::new(Ordinal::one(), 1).unwrap())
        );
    }

    #[test]
    fn x_gamma_construction() {
        let cs = CharSystem::new(Ordinal::one(), 2).unwrap();
        let c = build_x_gamma(&VcGroup::integers(), &cs, 3, 1).unwrap();
        assert_eq!((c.vertex_count(), c.edge_count()), (7, 12));
        assert!(c.pieces[..7].iter().all(|p| p.end_summary == Some(EndSpace::Singleton)));
        assert_eq!(complex_end_space(&c, true).unwrap(), cs.canonical());
        let frontier = c.pieces.iter().flat_map(|p| &p.ports).filter(|p| p.frontier).count();
        assert_eq!(frontier, 4);
        let limit = CharSystem::new(Ordinal::omega(), 2).unwrap();
        assert_eq!(
            build_x_gamma(&VcGroup::integers(), &limit, 3, 1),
            Err(SynthError::AlphaNotSuccessor(Ordinal::omega()))
        );
        let three = CharSystem::new(Ordinal::one(), 3).unwrap();
        assert_eq!(build_x_gamma(&VcGroup::integers(), &three, 3, 1), Err(SynthError::DegreeNotTwo(3)));
        let mut uncertified = VcGroup::integers();
        uncertified.two_ended_certificate = false;
        assert_eq!(build_x_gamma(&uncertified, &cs, 3, 1), Err(SynthError::NotTwoEndedCertified));
        let zero = CharSystem::new(Ordinal::zero(), 2).unwrap();
        let c = build_x_gamma(&VcGroup::infinite_dihedral(), &zero, 2, 1).unwrap();
        assert_eq!(c.flags, vec![CORNER_CASE_ALPHA_ZERO.to_string()]);
        assert!(c.pieces.iter().all(|p| p.end_summary.is_none()));
        assert_eq!(complex_end_space(&c, true).unwrap(), zero.canonical());
    }

    #[test]
    fn end_spaces() {
        let c = build_x_finite(&w1(), &z(2), 2, 1).unwrap();
        assert_eq!(complex_end_space(&c, true).unwrap(), w1().canonical());
        let truncated = complex_end_space(&c, false).unwrap();
        assert_eq!(truncated.countable_system(), Some(CharSystem::new(Ordinal::one(), 2).unwrap()));
        let inf = build_x(&EndSpace::Singleton, GroupSource::Ball { group: VcGroup::integers() }, 2, 3, 1).unwrap();
        assert_eq!(complex_end_space(&inf, true).unwrap(), EndSpace::Singleton);
        let mut manual = c.clone();
        manual.recipe = Recipe::Manual;
        assert_eq!(complex_end_space(&manual, true), Err(SynthError::UnknownRecipe));
    }

    #[test]
    fn quotients() {
        let c = build_x_finite(&w1(), &z(2), 2, 1).unwrap();
        let cover = quotient(&c, &z(2)).unwrap();
        let q = &cover.quotient;
        assert_eq!((q.vertex_count(), q.edge_count(), q.pairings.len()), (1, 2, 4));
        assert!(q.pairings.iter().all(|p| q.pieces[p.a.piece].kind == PieceKind::Vertex && p.a.piece == 0));
        assert_eq!(
            complex_end_space(q, true).unwrap().countable_system(),
            Some(CharSystem::new(Ordinal::one(), 1).unwrap())
        );
        let trivial = quotient(&c, &FiniteGroup::trivial()).unwrap();
        assert_eq!(trivial.quotient.pieces, c.pieces);
        assert_eq!(trivial.quotient.pairings.len(), c.pairings.len());
        let c3 = build_x_finite(&EndSpace::Cantor, &z(3), 1, 1).unwrap();
        let q3 = quotient(&c3, &z(3)).unwrap();
        assert_eq!(complex_end_space(&q3.quotient, true).unwrap(), EndSpace::Cantor);
        assert_eq!(quotient(&c, &z(3)).unwrap_err(), SynthError::DeckNotSubgroup);
        let s3 = FiniteGroup::symmetric(3);
        let c6 = build_x_finite(&w1(), &s3, 1, 1).unwrap();
        let q = quotient(&c6, &z(3)).unwrap();
        assert_eq!(q.quotient.vertex_count(), 2);
        assert!(q.quotient.completeness.is_some());
    }

    #[test]
    fn non_free_action_is_rejected() {
        let c = build_x_finite(&w1(), &z(2), 1, 1).unwrap();
        let fixed: Vec<Vec<usize>> = vec![(0..c.pieces.len()).collect(), (0..c.pieces.len()).collect()];
        assert!(matches!(check_deck_action(&c, &z(2), &fixed), Err(SynthError::ActionNotFree(_))));
    }

    #[test]
    fn connectivity_shadow() {
        let c = build_x(&EndSpace::Singleton, GroupSource::Ball { group: VcGroup::integers() }, 2, 3, 1).unwrap();
        assert_eq!(c.vertex_count(), 7);
        for v in 0..7 {
            assert!(connected_after_removing_ball(&c, v, 1));
        }
        // The generating-set complex over Z is a path and does disconnect.
        let cs = CharSystem::new(Ordinal::one(), 2).unwrap();
        let path = build_x_gamma(&VcGroup::integers(), &cs, 3, 1).unwrap();
        assert!(!connected_after_removing_ball(&path, 0, 1));
    }

    #[test]
    fn certificates() {
        let c = build_x_finite(&w1(), &z(3), 2, 1).unwrap();
        let cert = c.completeness.clone().unwrap();
        assert!(cert.holds);
        assert_eq!(cert.bound, Decimal::new(TWO_ARCSINH_ONE));
        assert!(cert.matches(&c));
    }
}
