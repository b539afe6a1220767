//! Decimal serialization of lengths.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Significant digits written for every length.
pub const SIGNIFICANT_DIGITS: i32 = 15;

/// Formats a finite float as a plain decimal with 15 significant digits,
/// trailing zeros removed.
pub fn decimal15(x: f64) -> String {
    assert!(x.is_finite(), "non-finite length {x}");
    if x == 0.0 {
        return "0".to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    // Rounding can bump the leading digit (9.99… → 10.0); recompute once.
    let mut decimals = (SIGNIFICANT_DIGITS - 1 - exp).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    let digits = s.trim_start_matches(['-', '0', '.']).chars().filter(char::is_ascii_digit).count();
    if digits > SIGNIFICANT_DIGITS as usize && decimals > 0 {
        decimals -= 1;
        s = format!("{x:.decimals$}");
    }
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        s = t.to_string();
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

/// Rounds to the value that [`decimal15`] writes, so in-memory values equal
/// what a reader parses back.
pub fn quantize(x: f64) -> f64 {
    decimal15(x).parse().expect("decimal15 output parses")
}

/// A real number stored at 15 significant digits and serialized as a
/// decimal string.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Decimal(f64);

impl Decimal {
    pub fn new(x: f64) -> Self {
        Decimal(quantize(x))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&decimal15(self.0))
    }
}

impl FromStr for Decimal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let x: f64 = s.trim().parse().map_err(|e| format!("invalid decimal {s:?}: {e}"))?;
        if !x.is_finite() {
            return Err(format!("non-finite decimal {s:?}"));
        }
        Ok(Decimal(x))
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&decimal15(self.0))
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        assert_eq!(decimal15(0.881373587019543025), "0.881373587019543");
        assert_eq!(decimal15(1.0), "1");
        assert_eq!(decimal15(1.5e-7), "0.00000015");
        assert_eq!(decimal15(-2.25), "-2.25");
        assert_eq!(decimal15(9.9999999999999999), "10");
        assert_eq!(decimal15(123456789012345.6), "123456789012346");
        assert_eq!(decimal15(0.0), "0");
    }

    proptest! {
        #[test]
        fn quantize_is_stable(x in -1e6f64..1e6) {
            let q = quantize(x);
            prop_assert_eq!(quantize(q), q);
            prop_assert_eq!(decimal15(q), decimal15(x));
            if x != 0.0 {
                prop_assert!(((q - x) / x).abs() < 1e-14);
            }
        }
    }
}
