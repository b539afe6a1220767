//! Which groups are isometry groups of complete hyperbolic metrics on a
//! given infinite-genus surface, with citations, plus the finite-genus and
//! planar-end obstructions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::endspace::{AlphaKind, EndSpace, Trichotomy};
use crate::grouptable::{isomorphic, FiniteGroup};
use crate::synth::{build_x_finite, complex_automorphisms, GluingComplex, SynthError, CORNER_CASE_ALPHA_ZERO};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("genus {0} is below 2; low genus is handled by the sphere and torus cases")]
    GenusTooSmall(u64),
    #[error("the planar obstruction needs at least one planar end")]
    NoPlanarEnds,
    #[error("end space is outside the supported grammar")]
    OutOfScope,
    #[error("no witness: {0}")]
    Witness(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum SurfaceGenus {
    Finite(u64),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum PlanarEnds {
    Count(u64),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDescriptor {
    pub genus: SurfaceGenus,
    pub ends: EndSpace,
    pub planar_ends: PlanarEnds,
}

impl SurfaceDescriptor {
    /// Infinite genus, no planar ends.
    pub fn standard(ends: EndSpace) -> Self {
        Self {
            genus: SurfaceGenus::Infinite,
            ends,
            planar_ends: PlanarEnds::Count(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum GroupClass {
    Finite {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<usize>,
    },
    /// Infinite virtually cyclic.
    VirtuallyCyclic,
    CountableInfinite,
    Uncountable,
    Specific { group: FiniteGroup },
}

impl GroupClass {
    pub fn tag(&self) -> &'static str {
        match self {
            GroupClass::Finite { .. } => "finite",
            GroupClass::VirtuallyCyclic => "virtually_cyclic",
            GroupClass::CountableInfinite => "countable_infinite",
            GroupClass::Uncountable => "uncountable",
            GroupClass::Specific { .. } => "specific",
        }
    }

    /// Smallest allowed class containing this one, or `None` for uncountable.
    pub fn least_class(&self) -> Option<AllowedClass> {
        match self {
            GroupClass::Finite { .. } | GroupClass::Specific { .. } => Some(AllowedClass::Finite),
            GroupClass::VirtuallyCyclic => Some(AllowedClass::VirtuallyCyclic),
            GroupClass::CountableInfinite => Some(AllowedClass::Countable),
            GroupClass::Uncountable => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Realizable,
    NotRealizable,
    Inconclusive,
    OutOfScope,
}

/// Ordered by inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllowedClass {
    Finite,
    VirtuallyCyclic,
    Countable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    UpperBoundOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub answer: Answer,
    pub allowed_class: Option<AllowedClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exactness: Option<Exactness>,
    pub citations: Vec<String>,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl Verdict {
    fn out_of_scope(citations: &[&str], note: &str) -> Self {
        Self {
            answer: Answer::OutOfScope,
            allowed_class: None,
            exactness: None,
            citations: citations.iter().map(|c| c.to_string()).collect(),
            notes: vec![note.to_string()],
            flags: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }
}

/// The class and citations for an in-scope surface, before a group is given.
struct Rule {
    allowed: AllowedClass,
    exactness: Exactness,
    citations: &'static [&'static str],
    note: &'static str,
    flag: Option<&'static str>,
}

fn rule(ends: &EndSpace) -> Result<Rule, &'static str> {
    if let Some(cs) = ends.countable_system() {
        return Ok(match (cs.degree, AlphaKind::of(&cs.alpha)) {
            (1, _) => Rule {
                allowed: AllowedClass::Countable,
                exactness: Exactness::Exact,
                citations: &["ThmB.1"],
                note: "degree 1: every countable group is realized",
                flag: None,
            },
            (2, AlphaKind::Zero) => Rule {
                allowed: AllowedClass::VirtuallyCyclic,
                exactness: Exactness::Exact,
                citations: &["Thm4.13"],
                note: "two ends: the isometry group preserves the pair of ends and is virtually cyclic; \
                       the doubly-pointed building block is empty at rank 0",
                flag: Some(CORNER_CASE_ALPHA_ZERO),
            },
            (2, AlphaKind::Successor) => Rule {
                allowed: AllowedClass::VirtuallyCyclic,
                exactness: Exactness::Exact,
                citations: &["ThmB.2", "Thm4.16(i)"],
                note: "degree 2 at a successor rank: exactly the virtually cyclic groups",
                flag: None,
            },
            (2, AlphaKind::Limit) => Rule {
                allowed: AllowedClass::Finite,
                exactness: Exactness::Exact,
                citations: &["Thm4.16(ii)", "ThmB.3"],
                note: "degree 2 at a limit rank: exactly the finite groups",
                flag: None,
            },
            _ => Rule {
                allowed: AllowedClass::Finite,
                exactness: Exactness::Exact,
                citations: &["ThmB.3", "Lem4.1"],
                note: "degree at least 3 gives a compact non-displaceable subsurface: exactly the finite groups",
                flag: None,
            },
        });
    }
    if ends.is_perfect() {
        return Ok(Rule {
            allowed: AllowedClass::Countable,
            exactness: Exactness::Exact,
            citations: &["ThmA.1"],
            note: "the Cantor set is self-similar: every countable group is realized",
            flag: None,
        });
    }
    Err("uncountable end spaces other than the Cantor set are outside the supported grammar")
}

/// Decides realizability of `g` on `s`.
pub fn realizable(s: &SurfaceDescriptor, g: &GroupClass) -> Verdict {
    if s.genus != SurfaceGenus::Infinite || s.planar_ends != PlanarEnds::Count(0) {
        return obstructions_only(s, g);
    }
    if s.ends.validate().is_err() {
        return Verdict::out_of_scope(&[], "end space expression is malformed");
    }
    let rule = match rule(&s.ends) {
        Ok(r) => r,
        Err(note) => return Verdict::out_of_scope(&["ThmA.1"], note),
    };
    let inside = g.least_class().is_some_and(|c| c <= rule.allowed);
    let mut citations: Vec<String> = Vec::new();
    if matches!(g, GroupClass::Specific { .. }) && inside {
        citations.push("Thm3.9".into());
    }
    citations.extend(rule.citations.iter().map(|c| c.to_string()));
    let mut notes = vec![rule.note.to_string()];
    if let GroupClass::Finite { order: Some(0) } = g {
        notes.push("a group has at least one element; order 0 is read as unspecified".into());
    }
    Verdict {
        answer: if inside { Answer::Realizable } else { Answer::NotRealizable },
        allowed_class: Some(rule.allowed),
        exactness: Some(rule.exactness),
        citations,
        notes,
        flags: rule.flag.iter().map(|f| f.to_string()).collect(),
    }
}

fn obstructions_only(s: &SurfaceDescriptor, g: &GroupClass) -> Verdict {
    if let GroupClass::Specific { group } = g {
        if let SurfaceGenus::Finite(genus) = s.genus {
            if let Ok(v) = hurwitz_bound(genus, group) {
                if v.answer == Answer::NotRealizable {
                    return v;
                }
            }
        }
        if let PlanarEnds::Count(n) = s.planar_ends {
            if let Ok(v) = planar_obstruction(n, group) {
                if v.answer == Answer::NotRealizable {
                    return v;
                }
            }
        }
    }
    Verdict::out_of_scope(
        &["Prop9.1", "Prop9.2"],
        "only infinite genus without planar ends is classified; no obstruction applies",
    )
}

/// Isometry groups of closed genus-`genus` surfaces have order at most
/// `168(genus − 1)`.
pub fn hurwitz_bound(genus: u64, g: &FiniteGroup) -> Result<Verdict, ClassifyError> {
    if genus < 2 {
        return Err(ClassifyError::GenusTooSmall(genus));
    }
    let bound = 168u128 * (genus as u128 - 1);
    let exceeds = g.order() as u128 > bound;
    Ok(Verdict {
        answer: if exceeds { Answer::NotRealizable } else { Answer::Inconclusive },
        allowed_class: None,
        exactness: None,
        citations: vec!["Prop9.1".into()],
        notes: vec![format!(
            "|G| = {} {} 168(g-1) = {bound}",
            g.order(),
            if exceeds { ">" } else { "<=" }
        )],
        flags: Vec::new(),
    })
}

/// `n!`, saturating.
fn factorial(n: u64) -> u128 {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k)).unwrap_or(u128::MAX)
}

/// A non-abelian simple group of order above `n!` cannot act on a surface
/// with `n` planar ends.
pub fn planar_obstruction(n_planar: u64, g: &FiniteGroup) -> Result<Verdict, ClassifyError> {
    if n_planar == 0 {
        return Err(ClassifyError::NoPlanarEnds);
    }
    let simple_nonabelian = !g.is_abelian() && g.is_simple();
    let big = g.order() as u128 > factorial(n_planar);
    let blocked = simple_nonabelian && big;
    let note = if blocked {
        format!("non-abelian simple group of order {} > {n_planar}!", g.order())
    } else if !simple_nonabelian {
        "group is abelian or not simple".to_string()
    } else {
        format!("order {} <= {n_planar}!", g.order())
    };
    Ok(Verdict {
        answer: if blocked { Answer::NotRealizable } else { Answer::Inconclusive },
        allowed_class: None,
        exactness: None,
        citations: vec!["Prop9.2".into()],
        notes: vec![note],
        flags: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub branch: Trichotomy,
    pub verdicts: Vec<(String, Verdict)>,
    pub flags: Vec<String>,
}

/// Every in-scope surface falls in exactly one trichotomy branch, and each
/// group tag gets a verdict in that branch.
pub fn corollary_consistency(s: &SurfaceDescriptor) -> Result<ConsistencyReport, ClassifyError> {
    if s.genus != SurfaceGenus::Infinite || s.planar_ends != PlanarEnds::Count(0) {
        return Err(ClassifyError::OutOfScope);
    }
    let branch = s.ends.trichotomy().map_err(|_| ClassifyError::OutOfScope)?;
    let tags = [
        GroupClass::Finite { order: None },
        GroupClass::VirtuallyCyclic,
        GroupClass::CountableInfinite,
        GroupClass::Uncountable,
    ];
    let verdicts: Vec<(String, Verdict)> = tags
        .iter()
        .map(|g| (g.tag().to_string(), realizable(s, g)))
        .collect();
    if verdicts.iter().any(|(_, v)| v.answer == Answer::OutOfScope) {
        return Err(ClassifyError::OutOfScope);
    }
    let mut flags: Vec<String> = verdicts.iter().flat_map(|(_, v)| v.flags.clone()).collect();
    flags.sort();
    flags.dedup();
    Ok(ConsistencyReport { branch, verdicts, flags })
}

/// Builds the finite-group complex for `g` and checks that its computed
/// automorphism group is `g`.
pub fn witness(ends: &EndSpace, g: &FiniteGroup, m: u64, seed: u64) -> Result<GluingComplex, ClassifyError> {
    let c = build_x_finite(ends, g, m, seed).map_err(|e: SynthError| ClassifyError::Witness(e.to_string()))?;
    if isomorphic(&complex_automorphisms(&c), g) {
        Ok(c)
    } else {
        Err(ClassifyError::Witness("computed automorphism group differs".into()))
    }
}
