//! Symbolic end spaces.
//!
//! Every space here is compact, metrizable and totally disconnected, built from
//! five constructors:
//!
//! * [`EndSpace::Singleton`]: one point;
//! * [`EndSpace::Union`]: a finite disjoint union of at least two parts;
//! * [`EndSpace::OmegaSum`]: the one-point compactification of countably many
//!   pairwise separated clopen copies of a space;
//! * [`EndSpace::Tower`]: `ω^α + 1` for `α ≥ 1`, the countable space of
//!   characteristic system `(α, 1)`, needed because limit ranks cannot be
//!   written with `OmegaSum` alone;
//! * [`EndSpace::Cantor`]: the Cantor set.
//!
//! Countable spaces (those without a Cantor atom) are classified by their
//! characteristic system `(α, d)`: the Cantor–Bendixson rank is `α + 1` and the
//! `α`-th derivative has exactly `d` points. Two countable expressions are
//! homeomorphic iff their systems agree, and [`EndSpace::canonical`] maps each
//! class to one representative. All ends are taken to be non-planar.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::{Ordinal, OrdinalError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EndSpaceError {
    #[error("union must have at least one part")]
    EmptyUnion,
    #[error("tower exponent must be at least 1 (use a singleton for rank 1)")]
    TowerTooLow,
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("end space is not self-similar")]
    NotSelfSimilar,
    #[error("mixed uncountable end space is outside the decidable fragment")]
    Unsupported,
    #[error("invalid shorthand {input:?}: {msg}")]
    Shorthand { input: String, msg: String },
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
    #[error("invalid end-space JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawEndSpace", into = "RawEndSpace")]
pub enum EndSpace {
    Singleton,
    Union(Vec<EndSpace>),
    OmegaSum(Box<EndSpace>),
    Tower(Ordinal),
    Cantor,
}

/// Characteristic system `(α, d)` of a countable compact space: it is
/// homeomorphic to `ω^α·d + 1` (for `α = 0`, to `d` points).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharSystem {
    pub alpha: Ordinal,
    pub degree: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Countability {
    Countable(CharSystem),
    NotCountable,
}

impl CharSystem {
    pub fn new(alpha: Ordinal, degree: u64) -> Result<Self, EndSpaceError> {
        if degree == 0 {
            return Err(EndSpaceError::ZeroDegree);
        }
        Ok(Self { alpha, degree })
    }

    /// The canonical expression with this characteristic system.
    pub fn canonical(&self) -> EndSpace {
        let one = if self.alpha.is_zero() {
            EndSpace::Singleton
        } else {
            EndSpace::Tower(self.alpha.clone())
        };
        if self.degree == 1 {
            one
        } else {
            EndSpace::Union(vec![one; self.degree as usize])
        }
    }

    /// Parses the `w^a*d+1` shorthand: the successor ordinal `ω^α·d + 1`
    /// denotes the system `(α, d)`.
    pub fn parse_shorthand(s: &str) -> Result<Self, EndSpaceError> {
        let bad = |msg: &str| EndSpaceError::Shorthand {
            input: s.to_string(),
            msg: msg.to_string(),
        };
        let x: Ordinal = s.parse()?;
        let body = x
            .pred()
            .map_err(|_| bad("expected a successor ordinal of the form w^a*d + 1"))?;
        match body.terms() {
            [t] => Self::new(t.exponent.clone(), t.coefficient),
            [] => Err(bad("the empty space is not an end space")),
            _ => Err(bad("expected a single term before '+ 1'")),
        }
    }

    pub fn shorthand(&self) -> String {
        let body = Ordinal::monomial(self.alpha.clone(), self.degree);
        if self.alpha.is_zero() {
            // `d + 1` would print as a single number; keep the exponent visible.
            format!("w^0*{} + 1", self.degree)
        } else {
            format!("{body} + 1")
        }
    }

    /// Characteristic system of a disjoint union.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        match self.alpha.cmp(&other.alpha) {
            std::cmp::Ordering::Greater => self.clone(),
            std::cmp::Ordering::Less => other.clone(),
            std::cmp::Ordering::Equal => Self {
                alpha: self.alpha.clone(),
                degree: self.degree + other.degree,
            },
        }
    }
}

impl fmt::Display for CharSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alpha, self.degree)
    }
}

impl EndSpace {
    /// Builds a union, flattening nested unions; one part collapses to itself.
    pub fn union(parts: Vec<EndSpace>) -> Result<Self, EndSpaceError> {
        let mut flat = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                EndSpace::Union(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Err(EndSpaceError::EmptyUnion),
            1 => Ok(flat.pop().unwrap()),
            _ => Ok(EndSpace::Union(flat)),
        }
    }

    pub fn omega_sum(copy: EndSpace) -> Self {
        EndSpace::OmegaSum(Box::new(copy))
    }

    /// `ω^α + 1`; zero exponent gives the singleton.
    pub fn tower(alpha: Ordinal) -> Self {
        if alpha.is_zero() {
            EndSpace::Singleton
        } else {
            EndSpace::Tower(alpha)
        }
    }

    /// Checks constructor invariants recursively.
    pub fn validate(&self) -> Result<(), EndSpaceError> {
        match self {
            EndSpace::Singleton | EndSpace::Cantor => Ok(()),
            EndSpace::Tower(a) if a.is_zero() => Err(EndSpaceError::TowerTooLow),
            EndSpace::Tower(_) => Ok(()),
            EndSpace::Union(parts) if parts.len() < 2 => Err(EndSpaceError::EmptyUnion),
            EndSpace::Union(parts) => parts.iter().try_for_each(EndSpace::validate),
            EndSpace::OmegaSum(c) => c.validate(),
        }
    }

    pub fn has_cantor(&self) -> bool {
        match self {
            EndSpace::Cantor => true,
            EndSpace::Singleton | EndSpace::Tower(_) => false,
            EndSpace::Union(parts) => parts.iter().any(EndSpace::has_cantor),
            EndSpace::OmegaSum(c) => c.has_cantor(),
        }
    }

    pub fn is_countable(&self) -> bool {
        !self.has_cantor()
    }

    /// The set of accumulation points, or `None` when it is empty.
    pub fn derivative(&self) -> Option<EndSpace> {
        match self {
            EndSpace::Singleton => None,
            EndSpace::Cantor => Some(EndSpace::Cantor),
            EndSpace::Tower(a) => {
                // (ω^α + 1)' ≅ ω^(−1+α) + 1
                let lowered = a.left_sub(&Ordinal::one()).expect("tower exponent ≥ 1");
                Some(EndSpace::tower(lowered))
            }
            EndSpace::Union(parts) => {
                let kept: Vec<_> = parts.iter().filter_map(EndSpace::derivative).collect();
                EndSpace::union(kept).ok()
            }
            EndSpace::OmegaSum(c) => Some(match c.derivative() {
                Some(d) => EndSpace::omega_sum(d),
                None => EndSpace::Singleton,
            }),
        }
    }

    /// The `steps`-th Cantor–Bendixson derivative (transfinite), or `None` when
    /// it is empty.
    pub fn derivative_at(&self, steps: &Ordinal) -> Option<EndSpace> {
        if steps.is_zero() {
            return Some(self.clone());
        }
        match self {
            EndSpace::Singleton => None,
            EndSpace::Cantor => Some(EndSpace::Cantor),
            EndSpace::Tower(a) => {
                // X^β of ω^α + 1 is ω^γ + 1 with β + γ = α, empty past α.
                a.left_sub(steps).map(EndSpace::tower)
            }
            EndSpace::Union(parts) => {
                let kept: Vec<_> = parts.iter().filter_map(|p| p.derivative_at(steps)).collect();
                EndSpace::union(kept).ok()
            }
            EndSpace::OmegaSum(c) => {
                if c.has_cantor() {
                    return Some(match c.derivative_at(steps) {
                        Some(d) => EndSpace::omega_sum(d),
                        None => EndSpace::Singleton,
                    });
                }
                let rank = c.char_system_countable().alpha.succ();
                match steps.cmp(&rank) {
                    std::cmp::Ordering::Less => Some(EndSpace::omega_sum(
                        c.derivative_at(steps).expect("below the copy's rank"),
                    )),
                    std::cmp::Ordering::Equal => Some(EndSpace::Singleton),
                    std::cmp::Ordering::Greater => None,
                }
            }
        }
    }

    fn char_system_countable(&self) -> CharSystem {
        match self {
            EndSpace::Singleton => CharSystem {
                alpha: Ordinal::zero(),
                degree: 1,
            },
            EndSpace::Tower(a) => CharSystem {
                alpha: a.clone(),
                degree: 1,
            },
            EndSpace::Union(parts) => parts
                .iter()
                .map(EndSpace::char_system_countable)
                .reduce(|a, b| a.disjoint_union(&b))
                .expect("union has parts"),
            EndSpace::OmegaSum(c) => CharSystem {
                alpha: c.char_system_countable().alpha.succ(),
                degree: 1,
            },
            EndSpace::Cantor => unreachable!("caller checks countability"),
        }
    }

    pub fn char_system(&self) -> Countability {
        if self.has_cantor() {
            Countability::NotCountable
        } else {
            Countability::Countable(self.char_system_countable())
        }
    }

    pub fn countable_system(&self) -> Option<CharSystem> {
        match self.char_system() {
            Countability::Countable(cs) => Some(cs),
            Countability::NotCountable => None,
        }
    }

    /// Canonical representative of the homeomorphism class.
    ///
    /// Countable spaces go through their characteristic system. Perfect
    /// expressions collapse to the Cantor set. Mixed expressions keep their
    /// shape with canonical parts sorted, which is sound but not complete.
    pub fn canonical(&self) -> EndSpace {
        if let Some(cs) = self.countable_system() {
            return cs.canonical();
        }
        if self.is_perfect() {
            return EndSpace::Cantor;
        }
        match self {
            EndSpace::Union(_) => {
                let mut leaves = Vec::new();
                self.collect_leaves(&mut leaves);
                let mut countable: Option<CharSystem> = None;
                let mut has_perfect = false;
                let mut mixed: Vec<EndSpace> = Vec::new();
                for p in leaves {
                    if let Some(cs) = p.countable_system() {
                        countable = Some(match countable {
                            Some(c) => c.disjoint_union(&cs),
                            None => cs,
                        });
                    } else if p.is_perfect() {
                        has_perfect = true;
                    } else {
                        mixed.push(p.canonical());
                    }
                }
                mixed.sort_by_cached_key(|e| e.to_string());
                let mut out = Vec::new();
                if has_perfect {
                    out.push(EndSpace::Cantor);
                }
                out.extend(mixed);
                if let Some(cs) = countable {
                    out.push(cs.canonical());
                }
                EndSpace::union(out).expect("nonempty")
            }
            EndSpace::OmegaSum(c) => EndSpace::omega_sum(c.canonical()),
            other => other.clone(),
        }
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a EndSpace>) {
        match self {
            EndSpace::Union(parts) => parts.iter().for_each(|p| p.collect_leaves(out)),
            other => out.push(other),
        }
    }

    /// True when the expression has no isolated points (hence is a Cantor set).
    pub fn is_perfect(&self) -> bool {
        match self {
            EndSpace::Cantor => true,
            EndSpace::Singleton | EndSpace::Tower(_) => false,
            EndSpace::Union(parts) => parts.iter().all(EndSpace::is_perfect),
            EndSpace::OmegaSum(c) => c.is_perfect(),
        }
    }

    /// Cantor atom combined with a part that has isolated points.
    pub fn is_mixed(&self) -> bool {
        self.has_cantor() && !self.is_perfect()
    }

    pub fn homeomorphic(&self, other: &EndSpace) -> bool {
        self.canonical() == other.canonical()
    }

    /// Radial symmetry: the space minus one star point splits into countably
    /// many pairwise homeomorphic, separated pieces.
    pub fn is_radially_symmetric(&self) -> bool {
        if let Some(cs) = self.countable_system() {
            return cs.degree == 1;
        }
        if self.is_perfect() {
            return true;
        }
        matches!(self.canonical(), EndSpace::OmegaSum(_))
    }

    /// Self-similarity, decided through its equivalence with radial symmetry.
    pub fn is_self_similar(&self) -> bool {
        self.is_radially_symmetric()
    }

    pub fn star_decomposition(&self) -> Result<StarDecomposition, EndSpaceError> {
        if *self == EndSpace::Singleton || !self.is_self_similar() {
            return Err(EndSpaceError::NotSelfSimilar);
        }
        if let EndSpace::OmegaSum(c) = self {
            return Ok(StarDecomposition {
                star: StarPoint::CompactificationPoint,
                part: StarPart::Repeated((**c).clone()),
            });
        }
        if self.is_perfect() {
            return Ok(StarDecomposition {
                star: StarPoint::CantorPoint,
                part: StarPart::Repeated(EndSpace::Cantor),
            });
        }
        if let Some(cs) = self.countable_system() {
            let star = StarPoint::TopRank {
                alpha: cs.alpha.clone(),
            };
            let part = if cs.alpha.is_successor() {
                StarPart::Repeated(EndSpace::tower(cs.alpha.pred()?))
            } else {
                StarPart::Cofinal {
                    limit: cs.alpha.clone(),
                }
            };
            return Ok(StarDecomposition { star, part });
        }
        match self.canonical() {
            EndSpace::OmegaSum(c) => Ok(StarDecomposition {
                star: StarPoint::CompactificationPoint,
                part: StarPart::Repeated(*c),
            }),
            _ => Err(EndSpaceError::NotSelfSimilar),
        }
    }

    pub fn trichotomy(&self) -> Result<Trichotomy, EndSpaceError> {
        if let Some(cs) = self.countable_system() {
            return Ok(match cs.degree {
                1 => Trichotomy::SelfSimilar,
                2 => Trichotomy::DoublyPointed {
                    alpha_kind: AlphaKind::of(&cs.alpha),
                },
                _ => Trichotomy::NonDisplaceable,
            });
        }
        if self.is_perfect() {
            return Ok(Trichotomy::SelfSimilar);
        }
        Err(EndSpaceError::Unsupported)
    }

    /// Parses CLI input: `cantor`, a JSON object, or the `w^a*d+1` shorthand.
    pub fn parse_cli(s: &str) -> Result<Self, EndSpaceError> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("cantor") {
            return Ok(EndSpace::Cantor);
        }
        if t.starts_with('{') {
            return Self::from_json(t);
        }
        Ok(CharSystem::parse_shorthand(t)?.canonical())
    }

    pub fn from_json(s: &str) -> Result<Self, EndSpaceError> {
        serde_json::from_str(s).map_err(|e| EndSpaceError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("end space serializes")
    }
}

impl fmt::Display for EndSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EndSpace::Singleton => f.write_str("pt"),
            EndSpace::Cantor => f.write_str("C"),
            EndSpace::Tower(a) => write!(f, "T[{a}]"),
            EndSpace::OmegaSum(c) => write!(f, "Σω({c})"),
            EndSpace::Union(parts) => {
                f.write_str("(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ⊔ ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaKind {
    Zero,
    Successor,
    Limit,
}

impl AlphaKind {
    pub fn of(a: &Ordinal) -> Self {
        if a.is_zero() {
            AlphaKind::Zero
        } else if a.is_successor() {
            AlphaKind::Successor
        } else {
            AlphaKind::Limit
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "branch")]
pub enum Trichotomy {
    SelfSimilar,
    DoublyPointed { alpha_kind: AlphaKind },
    NonDisplaceable,
}

/// Which point of the space serves as star point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StarPoint {
    /// The point added by an `OmegaSum` compactification.
    CompactificationPoint,
    /// The unique point of the `α`-th derivative of a degree-1 countable space.
    TopRank { alpha: Ordinal },
    /// Any point of a Cantor set.
    CantorPoint,
}

/// One piece `E_n` of a star decomposition. `E_n` is not compact; it is
/// described by the clopen blocks it is a disjoint union of.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "blocks")]
pub enum StarPart {
    /// Countably many copies of one compact block.
    Repeated(EndSpace),
    /// Blocks `ω^(λ[k]) + 1`, `k = 1, 2, …`, along the fundamental sequence of
    /// the limit `λ`.
    Cofinal { limit: Ordinal },
}

impl StarPart {
    /// The `k`-th block (1-based).
    pub fn block(&self, k: u64) -> EndSpace {
        match self {
            StarPart::Repeated(b) => b.clone(),
            StarPart::Cofinal { limit } => {
                EndSpace::tower(limit.fundamental(k).expect("limit ordinal"))
            }
        }
    }

    /// `E_n ∪ {x}`: the one-point compactification of the block sequence.
    pub fn compactify(&self) -> EndSpace {
        match self {
            StarPart::Repeated(b) => EndSpace::omega_sum(b.clone()),
            StarPart::Cofinal { limit } => {
                // The k-th block has rank λ[k] + 1; ranks increase with
                // supremum λ, so the added point is the only point of the
                // λ-th derivative.
                EndSpace::tower(limit.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarDecomposition {
    pub star: StarPoint,
    /// Every `E_n` is homeomorphic to this part.
    pub part: StarPart,
}

impl StarDecomposition {
    /// The first `n` pieces of the decomposition.
    pub fn parts(&self, n: usize) -> Vec<StarPart> {
        vec![self.part.clone(); n]
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RawEndSpace {
    Singleton {},
    Union { parts: Vec<RawEndSpace> },
    OmegaSum { copy: Box<RawEndSpace> },
    Tower { alpha: Ordinal },
    Cantor {},
}

/// Depth limit for decoded JSON trees.
const MAX_JSON_DEPTH: usize = 256;

impl RawEndSpace {
    fn into_checked(self, depth: usize) -> Result<EndSpace, EndSpaceError> {
        if depth > MAX_JSON_DEPTH {
            return Err(EndSpaceError::Json("expression nested too deeply".into()));
        }
        Ok(match self {
            RawEndSpace::Singleton {} => EndSpace::Singleton,
            RawEndSpace::Cantor {} => EndSpace::Cantor,
            RawEndSpace::Tower { alpha } => {
                if alpha.is_zero() {
                    return Err(EndSpaceError::TowerTooLow);
                }
                EndSpace::Tower(alpha)
            }
            RawEndSpace::OmegaSum { copy } => EndSpace::omega_sum(copy.into_checked(depth + 1)?),
            RawEndSpace::Union { parts } => {
                if parts.len() < 2 {
                    return Err(EndSpaceError::Json(
                        "union needs at least two parts".into(),
                    ));
                }
                EndSpace::Union(
                    parts
                        .into_iter()
                        .map(|p| p.into_checked(depth + 1))
                        .collect::<Result<_, _>>()?,
                )
            }
        })
    }
}

impl TryFrom<RawEndSpace> for EndSpace {
    type Error = EndSpaceError;

    fn try_from(raw: RawEndSpace) -> Result<Self, Self::Error> {
        raw.into_checked(0)
    }
}

impl From<EndSpace> for RawEndSpace {
    fn from(e: EndSpace) -> Self {
        match e {
            EndSpace::Singleton => RawEndSpace::Singleton {},
            EndSpace::Cantor => RawEndSpace::Cantor {},
            EndSpace::Tower(alpha) => RawEndSpace::Tower { alpha },
            EndSpace::OmegaSum(c) => RawEndSpace::OmegaSum {
                copy: Box::new((*c).into()),
            },
            EndSpace::Union(parts) => RawEndSpace::Union {
                parts: parts.into_iter().map(Into::into).collect(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w() -> Ordinal {
        Ordinal::omega()
    }

    fn ord(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn os(e: EndSpace) -> EndSpace {
        EndSpace::omega_sum(e)
    }

    fn pair(e: EndSpace) -> EndSpace {
        EndSpace::Union(vec![e.clone(), e])
    }

    fn cs(alpha: Ordinal, degree: u64) -> CharSystem {
        CharSystem::new(alpha, degree).unwrap()
    }

    /// Applies `derivative` until the space is empty; returns the number of
    /// nonempty stages past the first and the point count of the last stage.
    fn literal_profile(e: &EndSpace) -> (u64, u64) {
        let mut cur = e.clone();
        let mut steps = 0;
        loop {
            match cur.derivative() {
                Some(next) => {
                    cur = next;
                    steps += 1;
                }
                None => break,
            }
        }
        (steps, count_points(&cur))
    }

    fn count_points(e: &EndSpace) -> u64 {
        match e {
            EndSpace::Singleton => 1,
            EndSpace::Union(parts) => parts.iter().map(count_points).sum(),
            other => panic!("last stage {other} is not finite"),
        }
    }

    #[test]
    fn derivative_rules() {
        assert_eq!(os(EndSpace::Singleton).derivative(), Some(EndSpace::Singleton));
        assert_eq!(EndSpace::Cantor.derivative(), Some(EndSpace::Cantor));
        assert_eq!(
            os(os(EndSpace::Singleton)).derivative(),
            Some(os(EndSpace::Singleton))
        );
        assert_eq!(EndSpace::Singleton.derivative(), None);
        assert_eq!(pair(EndSpace::Singleton).derivative(), None);
        let mixed = EndSpace::Union(vec![EndSpace::Singleton, os(EndSpace::Singleton)]);
        assert_eq!(mixed.derivative(), Some(EndSpace::Singleton));
    }

    #[test]
    fn tower_derivatives() {
        assert_eq!(EndSpace::Tower(ord("3")).derivative(), Some(EndSpace::Tower(ord("2"))));
        assert_eq!(EndSpace::Tower(ord("1")).derivative(), Some(EndSpace::Singleton));
        assert_eq!(EndSpace::Tower(w()).derivative(), Some(EndSpace::Tower(w())));
        assert_eq!(
            EndSpace::Tower(ord("w+2")).derivative_at(&ord("w")),
            Some(EndSpace::Tower(ord("2")))
        );
        assert_eq!(
            EndSpace::Tower(ord("w^2")).derivative_at(&ord("w")),
            Some(EndSpace::Tower(ord("w^2")))
        );
        assert_eq!(EndSpace::Tower(w()).derivative_at(&w()), Some(EndSpace::Singleton));
        assert_eq!(EndSpace::Tower(w()).derivative_at(&ord("w+1")), None);
    }

    #[test]
    fn char_systems() {
        assert_eq!(
            EndSpace::Singleton.char_system(),
            Countability::Countable(cs(Ordinal::zero(), 1))
        );
        assert_eq!(
            pair(os(EndSpace::Singleton)).char_system(),
            Countability::Countable(cs(Ordinal::one(), 2))
        );
        assert_eq!(pair(os(EndSpace::Singleton)).derivative().unwrap().derivative(), None);
        assert_eq!(
            EndSpace::Union(vec![EndSpace::Singleton, EndSpace::Cantor]).char_system(),
            Countability::NotCountable
        );
        // The top rank dominates and only its points count towards the degree.
        let e = EndSpace::Union(vec![
            os(os(EndSpace::Singleton)),
            os(EndSpace::Singleton),
            EndSpace::Tower(ord("2")),
        ]);
        assert_eq!(e.countable_system(), Some(cs(ord("2"), 2)));
        assert_eq!(os(EndSpace::Tower(w())).countable_system(), Some(cs(ord("w+1"), 1)));
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(cs(Ordinal::zero(), 1).canonical(), EndSpace::Singleton);
        assert_eq!(cs(ord("2"), 1).canonical(), EndSpace::Tower(ord("2")));
        assert_eq!(cs(Ordinal::zero(), 3).canonical().to_string(), "(pt ⊔ pt ⊔ pt)");
        assert!(os(os(EndSpace::Singleton)).homeomorphic(&EndSpace::Tower(ord("2"))));
        assert!(!os(EndSpace::Singleton).homeomorphic(&pair(EndSpace::Singleton)));
        assert_eq!(os(EndSpace::Cantor).canonical(), EndSpace::Cantor);
        assert_eq!(pair(EndSpace::Cantor).canonical(), EndSpace::Cantor);
        let mixed = EndSpace::Union(vec![EndSpace::Singleton, EndSpace::Cantor, EndSpace::Cantor]);
        assert_eq!(
            mixed.canonical(),
            EndSpace::Union(vec![EndSpace::Cantor, EndSpace::Singleton])
        );
    }

    #[test]
    fn radial_symmetry_and_self_similarity() {
        assert!(os(EndSpace::Singleton).is_radially_symmetric());
        assert!(EndSpace::Cantor.is_radially_symmetric());
        assert!(!pair(os(EndSpace::Singleton)).is_radially_symmetric());
        assert!(os(EndSpace::Singleton).is_self_similar());
        assert!(EndSpace::Singleton.is_self_similar());
        assert!(!pair(EndSpace::Singleton).is_self_similar());
        let mixed_sum = os(EndSpace::Union(vec![EndSpace::Singleton, EndSpace::Cantor]));
        assert!(mixed_sum.is_self_similar());
        let mixed = EndSpace::Union(vec![EndSpace::Singleton, EndSpace::Cantor]);
        assert!(!mixed.is_self_similar());
    }

    #[test]
    fn star_decompositions() {
        let d = os(EndSpace::Singleton).star_decomposition().unwrap();
        assert_eq!(d.star, StarPoint::CompactificationPoint);
        assert_eq!(d.part, StarPart::Repeated(EndSpace::Singleton));
        assert!(d.part.compactify().homeomorphic(&os(EndSpace::Singleton)));

        let e = os(os(EndSpace::Singleton));
        let d = e.star_decomposition().unwrap();
        assert_eq!(d.part.compactify().countable_system(), Some(cs(ord("2"), 1)));
        assert_eq!(d.part.block(1).countable_system(), Some(cs(ord("1"), 1)));

        let e = EndSpace::Tower(ord("w^w"));
        let d = e.star_decomposition().unwrap();
        assert_eq!(d.star, StarPoint::TopRank { alpha: ord("w^w") });
        assert_eq!(d.part.block(3), EndSpace::Tower(ord("w^3")));
        assert!(d.part.compactify().homeomorphic(&e));

        let d = EndSpace::Cantor.star_decomposition().unwrap();
        assert_eq!(d.star, StarPoint::CantorPoint);
        assert!(d.part.compactify().homeomorphic(&EndSpace::Cantor));
        assert_eq!(d.parts(4).len(), 4);

        assert_eq!(
            EndSpace::Singleton.star_decomposition(),
            Err(EndSpaceError::NotSelfSimilar)
        );
        assert_eq!(
            pair(EndSpace::Singleton).star_decomposition(),
            Err(EndSpaceError::NotSelfSimilar)
        );
    }

    #[test]
    fn trichotomy_branches() {
        assert_eq!(
            cs(Ordinal::one(), 1).canonical().trichotomy(),
            Ok(Trichotomy::SelfSimilar)
        );
        assert_eq!(
            cs(w(), 2).canonical().trichotomy(),
            Ok(Trichotomy::DoublyPointed {
                alpha_kind: AlphaKind::Limit
            })
        );
        assert_eq!(
            cs(Ordinal::zero(), 2).canonical().trichotomy(),
            Ok(Trichotomy::DoublyPointed {
                alpha_kind: AlphaKind::Zero
            })
        );
        assert_eq!(
            cs(Ordinal::zero(), 3).canonical().trichotomy(),
            Ok(Trichotomy::NonDisplaceable)
        );
        assert_eq!(EndSpace::Cantor.trichotomy(), Ok(Trichotomy::SelfSimilar));
        assert_eq!(
            EndSpace::Union(vec![EndSpace::Singleton, EndSpace::Cantor]).trichotomy(),
            Err(EndSpaceError::Unsupported)
        );
    }

    #[test]
    fn shorthand() {
        let c = CharSystem::parse_shorthand("w^1*1+1").unwrap();
        assert_eq!(c, cs(Ordinal::one(), 1));
        let c = CharSystem::parse_shorthand("w^w*2+1").unwrap();
        assert_eq!(c, cs(w(), 2));
        assert_eq!(CharSystem::parse_shorthand("4").unwrap(), cs(Ordinal::zero(), 3));
        assert_eq!(CharSystem::parse_shorthand("w^0*3 + 1").unwrap(), cs(Ordinal::zero(), 3));
        for bad in ["w", "0", "w^2 + w + 1", "w^w", "x"] {
            assert!(CharSystem::parse_shorthand(bad).is_err(), "{bad}");
        }
        for c in [cs(Ordinal::zero(), 2), cs(ord("w+1"), 3), cs(Ordinal::one(), 1)] {
            assert_eq!(CharSystem::parse_shorthand(&c.shorthand()).unwrap(), c);
        }
        assert_eq!(EndSpace::parse_cli("Cantor").unwrap(), EndSpace::Cantor);
        assert_eq!(
            EndSpace::parse_cli("w^2*1+1").unwrap(),
            EndSpace::Tower(ord("2"))
        );
        assert_eq!(
            EndSpace::parse_cli(r#"{"type":"omega_sum","copy":{"type":"singleton"}}"#).unwrap(),
            os(EndSpace::Singleton)
        );
    }

    #[test]
    fn json_encoding() {
        let e = EndSpace::Union(vec![
            os(EndSpace::Cantor),
            EndSpace::Tower(ord("w^2 + 1")),
            EndSpace::Singleton,
        ]);
        let s = e.to_json();
        assert_eq!(
            s,
            r#"{"type":"union","parts":[{"type":"omega_sum","copy":{"type":"cantor"}},{"type":"tower","alpha":"w^2 + 1"},{"type":"singleton"}]}"#
        );
        assert_eq!(EndSpace::from_json(&s).unwrap(), e);
        for bad in [
            r#"{"type":"union","parts":[{"type":"singleton"}]}"#,
            r#"{"type":"tower","alpha":"0"}"#,
            r#"{"type":"cantor","extra":1}"#,
            r#"{"type":"blob"}"#,
        ] {
            assert!(EndSpace::from_json(bad).is_err(), "{bad}");
        }
        let deep = format!(
            "{}{{\"type\":\"singleton\"}}{}",
            r#"{"type":"omega_sum","copy":"#.repeat(300),
            "}".repeat(300)
        );
        assert!(EndSpace::from_json(&deep).is_err());
    }

    fn countable_expr() -> impl Strategy<Value = EndSpace> {
        let leaf = prop_oneof![
            3 => Just(EndSpace::Singleton),
            1 => (1u64..4).prop_map(|k| EndSpace::Tower(Ordinal::nat(k))),
        ];
        leaf.prop_recursive(4, 16, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(EndSpace::omega_sum),
                prop::collection::vec(inner, 2..4).prop_map(EndSpace::Union),
            ]
        })
    }

    fn any_expr() -> impl Strategy<Value = EndSpace> {
        let leaf = prop_oneof![
            3 => Just(EndSpace::Singleton),
            1 => Just(EndSpace::Cantor),
            1 => prop_oneof![Just(w()), Just(ord("w+1")), Just(ord("2"))].prop_map(EndSpace::Tower),
        ];
        leaf.prop_recursive(3, 12, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(EndSpace::omega_sum),
                prop::collection::vec(inner, 2..4).prop_map(EndSpace::Union),
            ]
        })
    }

    proptest! {
        #[test]
        fn rank_and_degree_match_literal_iteration(e in countable_expr()) {
            let c = e.countable_system().unwrap();
            let (steps, points) = literal_profile(&e);
            prop_assert_eq!(Ordinal::nat(steps), c.alpha.clone());
            prop_assert_eq!(points, c.degree);
            let top = e.derivative_at(&c.alpha).unwrap();
            prop_assert_eq!(top.canonical(), cs(Ordinal::zero(), c.degree).canonical());
            prop_assert_eq!(e.derivative_at(&c.alpha.succ()), None);
        }

        #[test]
        fn canonical_is_invariant(e in any_expr()) {
            let c = e.canonical();
            prop_assert_eq!(c.canonical(), c.clone());
            prop_assert_eq!(c.countable_system(), e.countable_system());
            prop_assert_eq!(c.is_perfect(), e.is_perfect());
            prop_assert!(c.validate().is_ok());
        }

        #[test]
        fn equal_systems_share_canonical_form(e in countable_expr(), f in countable_expr()) {
            let same = e.countable_system() == f.countable_system();
            prop_assert_eq!(e.homeomorphic(&f), same);
        }

        #[test]
        fn self_similar_is_radial_symmetry(e in any_expr()) {
            prop_assert_eq!(e.is_self_similar(), e.is_radially_symmetric());
            if let Some(c) = e.countable_system() {
                prop_assert_eq!(e.is_self_similar(), c.degree == 1);
            }
        }

        #[test]
        fn star_parts_compactify_to_the_space(e in any_expr()) {
            if let Ok(d) = e.star_decomposition() {
                let back = d.part.compactify();
                prop_assert!(back.homeomorphic(&e), "{} vs {}", back, e);
            }
        }

        #[test]
        fn trichotomy_is_total_on_countable(e in countable_expr()) {
            let c = e.countable_system().unwrap();
            let t = e.trichotomy().unwrap();
            match c.degree {
                1 => prop_assert_eq!(t, Trichotomy::SelfSimilar),
                2 => {
                    let doubly = matches!(t, Trichotomy::DoublyPointed { .. });
                    prop_assert!(doubly);
                }
                _ => prop_assert_eq!(t, Trichotomy::NonDisplaceable),
            }
        }

        #[test]
        fn json_round_trip(e in any_expr()) {
            prop_assert_eq!(EndSpace::from_json(&e.to_json()).unwrap(), e);
        }
    }
}
