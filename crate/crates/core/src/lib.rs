//! End spaces of infinite-genus surfaces, finite groups and their Cayley
//! graphs, glued model surfaces with certified isometry groups, and the
//! realizability classifier built on them.

pub mod classify;
pub mod dot;
pub mod endspace;
pub mod format;
pub mod grouptable;
pub mod hypgeom;
pub mod ordinal;
pub mod synth;
pub mod verify;
