//! Numeric kernels: the collar function, length thresholds, completeness
//! certificates and right-angled hexagon seams.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::synth::{GluingComplex, PieceKind};

/// `asinh(1) = ln(1 + √2)`.
pub const ARCSINH_ONE: f64 = 0.881_373_587_019_543_025_232_609_3;

/// `2·asinh(1)`, the short-geodesic threshold.
pub const TWO_ARCSINH_ONE: f64 = 2.0 * ARCSINH_ONE;

/// Relative tolerance for closed-form identities.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Tolerance for the reverse hexagon check.
pub const HEXAGON_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("length must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("cuff length must be positive, got {0}")]
    NonPositiveCuff(f64),
    #[error("lengths exceed the bound {bound}: {}", .offending.join("; "))]
    UnboundedLengths { bound: f64, offending: Vec<String> },
}

/// An open interval, or a single point when `lo == hi`. Point bands allow
/// for rounding to the serialized precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn contains(&self, x: f64) -> bool {
        if self.lo == self.hi {
            (x - self.lo).abs() <= 1e-14 * self.lo.abs()
        } else {
            self.lo < x && x < self.hi
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthBudget {
    /// Glued boundary curves.
    pub boundary_band: Band,
    /// Interior cuffs of vertex pieces.
    pub cuff_band: Band,
    /// Interior cuffs of edge pieces, which are exactly `asinh(1)`.
    pub edge_cuff_band: Band,
    pub sup_bound: f64,
}

impl Default for LengthBudget {
    fn default() -> Self {
        Self {
            boundary_band: Band { lo: 0.0, hi: ARCSINH_ONE },
            cuff_band: Band { lo: ARCSINH_ONE, hi: TWO_ARCSINH_ONE },
            edge_cuff_band: Band { lo: ARCSINH_ONE, hi: ARCSINH_ONE },
            sup_bound: TWO_ARCSINH_ONE,
        }
    }
}

/// `η(l) = asinh(1 / sinh(l/2))`.
pub fn collar_width(l: f64) -> Result<f64, GeomError> {
    if !(l > 0.0) {
        return Err(GeomError::NonPositiveLength(l));
    }
    Ok((1.0 / (l / 2.0).sinh()).asinh())
}

/// The collar-lemma hypothesis: both lengths are below `2·asinh(1)`.
pub fn short_geodesics_disjoint(l1: f64, l2: f64) -> bool {
    l1 > 0.0 && l2 > 0.0 && l1 < TWO_ARCSINH_ONE && l2 < TWO_ARCSINH_ONE
}

/// Seam lengths `(d_ab, d_bc, d_ca)` of a pair of pants with cuffs `a, b, c`;
/// `d_xy` joins cuffs `x` and `y`.
pub fn pants_seam(a: f64, b: f64, c: f64) -> Result<(f64, f64, f64), GeomError> {
    for x in [a, b, c] {
        if !(x > 0.0) || !x.is_finite() {
            return Err(GeomError::NonPositiveCuff(x));
        }
    }
    let seam = |x: f64, y: f64, opp: f64| {
        let (x, y, opp) = (x / 2.0, y / 2.0, opp / 2.0);
        ((opp.cosh() + x.cosh() * y.cosh()) / (x.sinh() * y.sinh())).acosh()
    };
    Ok((seam(a, b, c), seam(b, c, a), seam(c, a, b)))
}

/// Recovers the half-cuffs from the seams with the hexagon law applied to
/// the other three sides, and returns their largest relative deviation.
pub fn hexagon_residual(a: f64, b: f64, c: f64, seams: (f64, f64, f64)) -> f64 {
    let (d_ab, d_bc, d_ca) = seams;
    let half = |s1: f64, s2: f64, opp: f64| {
        ((s1.cosh() * s2.cosh() + opp.cosh()) / (s1.sinh() * s2.sinh())).acosh()
    };
    let rel = |got: f64, want: f64| ((got - want) / want).abs();
    [
        rel(half(d_bc, d_ca, d_ab), c / 2.0),
        rel(half(d_ca, d_ab, d_bc), a / 2.0),
        rel(half(d_ab, d_bc, d_ca), b / 2.0),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Witness that every curve of the pants decomposition is shorter than a
/// uniform bound, which makes the glued surface complete.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletenessCertificate {
    pub holds: bool,
    pub bound: crate::format::Decimal,
    pub max_length: crate::format::Decimal,
    pub curves_checked: usize,
    pub planar_ends: u64,
}

impl CompletenessCertificate {
    /// Recomputes the certificate for `c` and compares.
    pub fn matches(&self, c: &GluingComplex) -> bool {
        certify_complete(c).is_ok_and(|fresh| fresh == *self)
    }
}

/// Every length recorded in a complex, labelled by where it comes from.
pub fn curve_lengths(c: &GluingComplex) -> Vec<(String, CurveRole, f64)> {
    let mut out = Vec::new();
    for p in &c.pieces {
        for port in &p.ports {
            out.push((format!("{}/{}", p.id, port.name), CurveRole::Boundary, port.length.get()));
        }
        let role = match p.kind {
            PieceKind::Vertex => CurveRole::VertexCuff,
            PieceKind::Edge => CurveRole::EdgeCuff,
        };
        for (i, l) in p.cuffs.iter().enumerate() {
            out.push((format!("{}/c{i}", p.id), role, l.get()));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveRole {
    Boundary,
    VertexCuff,
    EdgeCuff,
}

impl LengthBudget {
    pub fn band(&self, role: CurveRole) -> Band {
        match role {
            CurveRole::Boundary => self.boundary_band,
            CurveRole::VertexCuff => self.cuff_band,
            CurveRole::EdgeCuff => self.edge_cuff_band,
        }
    }

    /// Curves whose lengths fall outside their band.
    pub fn band_violations(&self, c: &GluingComplex) -> Vec<String> {
        curve_lengths(c)
            .into_iter()
            .filter(|(_, role, l)| !self.band(*role).contains(*l))
            .map(|(name, _, l)| format!("{name} = {}", crate::format::decimal15(l)))
            .collect()
    }
}

/// Checks every length against the complex's declared bound. Ends are
/// non-planar throughout, so the planar count must be zero.
pub fn certify_complete(c: &GluingComplex) -> Result<CompletenessCertificate, GeomError> {
    let bound = c.sup_bound.get();
    let lengths = curve_lengths(c);
    let offending: Vec<String> = lengths
        .iter()
        .filter(|(_, _, l)| !(*l > 0.0 && *l <= bound))
        .map(|(name, _, l)| format!("{name} = {}", crate::format::decimal15(*l)))
        .chain((c.planar_ends != 0).then(|| format!("{} planar ends declared", c.planar_ends)))
        .collect();
    if !offending.is_empty() {
        return Err(GeomError::UnboundedLengths { bound, offending });
    }
    let max_length = lengths.iter().map(|(_, _, l)| *l).fold(0.0, f64::max);
    Ok(CompletenessCertificate {
        holds: true,
        bound: crate::format::Decimal::new(bound),
        max_length: crate::format::Decimal::new(max_length),
        curves_checked: lengths.len(),
        planar_ends: 0,
    })
}
