//! Ordinals below ε₀ in Cantor normal form.
//!
//! An [`Ordinal`] is a finite, strictly decreasing sum `ω^e₁·c₁ + … + ω^eₖ·cₖ`
//! whose exponents are themselves ordinals of the same shape. The empty sum is
//! zero. Values are immutable; every constructor returns the normal form, so
//! structural equality coincides with ordinal equality.
//!
//! Text syntax (used by the CLI and the JSON encodings):
//!
//! ```text
//! w^{w+1}*2 + w^3 + w*4 + 7
//! ```
//!
//! A bare natural number or a bare `w` may follow `^` without braces; every
//! other exponent is braced. `ω` is accepted as a synonym for `w`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrdinalError {
    #[error("predecessor undefined for {0}: not a successor ordinal")]
    NotSuccessor(Ordinal),
    #[error("coefficient overflow")]
    Overflow,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// One Cantor-normal-form term `ω^exponent · coefficient`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub exponent: Ordinal,
    pub coefficient: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<Term>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::nat(1)
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        Self {
            terms: vec![Term {
                exponent: Self::zero(),
                coefficient: n,
            }],
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::one())
    }

    /// `ω^exponent`.
    pub fn omega_pow(exponent: Ordinal) -> Self {
        Self {
            terms: vec![Term {
                exponent,
                coefficient: 1,
            }],
        }
    }

    /// `ω^exponent · coefficient`; zero when the coefficient is zero.
    pub fn monomial(exponent: Ordinal, coefficient: u64) -> Self {
        if coefficient == 0 {
            return Self::zero();
        }
        Self {
            terms: vec![Term {
                exponent,
                coefficient,
            }],
        }
    }

    /// Interprets `terms` as the ordinal sum taken left to right and returns
    /// its normal form. Zero coefficients are dropped.
    pub fn from_terms<I>(terms: I) -> Result<Self, OrdinalError>
    where
        I: IntoIterator<Item = (Ordinal, u64)>,
    {
        terms
            .into_iter()
            .try_fold(Self::zero(), |acc, (e, c)| acc.checked_add(&Self::monomial(e, c)))
    }

    pub fn normalize(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|t| (t.exponent.normalize(), t.coefficient)))
            .expect("normalizing a valid ordinal cannot overflow")
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|t| t.exponent.is_zero())
    }

    /// The value as a natural number, if finite.
    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exponent.is_zero() => Some(t.coefficient),
            _ => None,
        }
    }

    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exponent.is_zero())
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && !self.is_successor()
    }

    pub fn pred(&self) -> Result<Self, OrdinalError> {
        if !self.is_successor() {
            return Err(OrdinalError::NotSuccessor(self.clone()));
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("successor has a term");
        last.coefficient -= 1;
        if last.coefficient == 0 {
            terms.pop();
        }
        Ok(Self { terms })
    }

    pub fn succ(&self) -> Self {
        self.add(&Self::one())
    }

    /// Exponent of the leading term; `None` for zero.
    pub fn leading_exponent(&self) -> Option<&Ordinal> {
        self.terms.first().map(|t| &t.exponent)
    }

    /// Depth of exponent nesting: 0 for zero, 1 for nonzero naturals, …
    pub fn nesting_depth(&self) -> usize {
        self.terms
            .iter()
            .map(|t| 1 + t.exponent.nesting_depth())
            .max()
            .unwrap_or(0)
    }

    /// Ordinal sum `self + rhs`.
    ///
    /// Panics on coefficient overflow; see [`Ordinal::checked_add`].
    pub fn add(&self, rhs: &Ordinal) -> Self {
        self.checked_add(rhs).expect("ordinal coefficient overflow")
    }

    pub fn checked_add(&self, rhs: &Ordinal) -> Result<Self, OrdinalError> {
        let Some(lead) = rhs.terms.first() else {
            return Ok(self.clone());
        };
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .take_while(|t| t.exponent >= lead.exponent)
            .cloned()
            .collect();
        let mut rest = rhs.terms.iter();
        match terms.last_mut() {
            Some(last) if last.exponent == lead.exponent => {
                last.coefficient = last
                    .coefficient
                    .checked_add(lead.coefficient)
                    .ok_or(OrdinalError::Overflow)?;
                rest.next();
            }
            _ => {}
        }
        terms.extend(rest.cloned());
        Ok(Self { terms })
    }

    /// Right multiplication by a natural number: `self · k`.
    pub fn mul_nat(&self, k: u64) -> Result<Self, OrdinalError> {
        if k == 0 || self.is_zero() {
            return Ok(Self::zero());
        }
        let mut terms = self.terms.clone();
        terms[0].coefficient = terms[0]
            .coefficient
            .checked_mul(k)
            .ok_or(OrdinalError::Overflow)?;
        Ok(Self { terms })
    }

    /// The unique `γ` with `lhs + γ = self`, when `lhs ≤ self`.
    pub fn left_sub(&self, lhs: &Ordinal) -> Option<Self> {
        let mut i = 0;
        loop {
            match (self.terms.get(i), lhs.terms.get(i)) {
                (_, None) => {
                    return Some(Self {
                        terms: self.terms[i..].to_vec(),
                    })
                }
                (None, Some(_)) => return None,
                (Some(a), Some(b)) => match b.exponent.cmp(&a.exponent) {
                    Ordering::Greater => return None,
                    Ordering::Less => {
                        return Some(Self {
                            terms: self.terms[i..].to_vec(),
                        })
                    }
                    Ordering::Equal => match b.coefficient.cmp(&a.coefficient) {
                        Ordering::Greater => return None,
                        Ordering::Equal => i += 1,
                        Ordering::Less => {
                            let mut terms = self.terms[i..].to_vec();
                            terms[0].coefficient -= b.coefficient;
                            return Some(Self { terms });
                        }
                    },
                },
            }
        }
    }

    /// `k`-th element of the standard fundamental sequence of a limit ordinal.
    ///
    /// For `γ + ω^(δ+1)` this is `γ + ω^δ·k`; for `γ + ω^λ` with `λ` a limit it
    /// is `γ + ω^(λ[k])`. Returns `None` unless `self` is a limit.
    pub fn fundamental(&self, k: u64) -> Option<Self> {
        if !self.is_limit() {
            return None;
        }
        let (last, init) = self.terms.split_last()?;
        let mut head = Self {
            terms: init.to_vec(),
        };
        if last.coefficient > 1 {
            head = head.add(&Self::monomial(last.exponent.clone(), last.coefficient - 1));
        }
        let tail = if last.exponent.is_successor() {
            Self::monomial(last.exponent.pred().ok()?, k)
        } else {
            Self::omega_pow(last.exponent.fundamental(k)?)
        };
        Some(head.add(&tail))
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a
                .exponent
                .cmp(&b.exponent)
                .then(a.coefficient.cmp(&b.coefficient));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

/// Three-way ordinal comparison.
pub fn compare(a: &Ordinal, b: &Ordinal) -> Ordering {
    a.cmp(b)
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if t.exponent.is_zero() {
                write!(f, "{}", t.coefficient)?;
                continue;
            }
            f.write_str("w")?;
            if t.exponent != Ordinal::one() {
                match t.exponent.as_nat() {
                    Some(n) => write!(f, "^{n}")?,
                    None if t.exponent == Ordinal::omega() => f.write_str("^w")?,
                    None => write!(f, "^{{{}}}", t.exponent)?,
                }
            }
            if t.coefficient != 1 {
                write!(f, "*{}", t.coefficient)?;
            }
        }
        Ok(())
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { src: s, pos: 0 };
        let v = p.sum(0)?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(v)
    }
}

/// Upper bound on brace nesting accepted by the parser.
const MAX_NESTING: usize = 64;

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> OrdinalError {
        OrdinalError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn eat_omega(&mut self) -> bool {
        self.eat('w') || self.eat('ω')
    }

    fn nat(&mut self) -> Result<u64, OrdinalError> {
        self.skip_ws();
        let start = self.pos;
        let digits = self.src[start..]
            .bytes()
            .take_while(u8::is_ascii_digit)
            .count();
        if digits == 0 {
            return Err(self.err("expected a natural number"));
        }
        self.pos += digits;
        self.src[start..self.pos].parse().map_err(|_| OrdinalError::Parse {
            pos: start,
            msg: "natural number out of range".into(),
        })
    }

    fn sum(&mut self, depth: usize) -> Result<Ordinal, OrdinalError> {
        if depth > MAX_NESTING {
            return Err(self.err("exponent nesting too deep"));
        }
        let mut acc = self.term(depth)?;
        while self.eat('+') {
            let t = self.term(depth)?;
            acc = acc.checked_add(&t).map_err(|_| self.err("coefficient overflow"))?;
        }
        Ok(acc)
    }

    fn term(&mut self, depth: usize) -> Result<Ordinal, OrdinalError> {
        self.skip_ws();
        if !self.eat_omega() {
            return Ok(Ordinal::nat(self.nat()?));
        }
        let exponent = if self.eat('^') {
            if self.eat('{') {
                let e = self.sum(depth + 1)?;
                if !self.eat('}') {
                    return Err(self.err("expected '}'"));
                }
                e
            } else if self.eat_omega() {
                Ordinal::omega()
            } else {
                Ordinal::nat(self.nat()?)
            }
        } else {
            Ordinal::one()
        };
        let coefficient = if self.eat('*') { self.nat()? } else { 1 };
        Ok(Ordinal::monomial(exponent, coefficient))
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn compare_examples() {
        assert_eq!(compare(&Ordinal::omega(), &Ordinal::omega()), Ordering::Equal);
        assert_eq!(compare(&o("w+1"), &o("w*2")), Ordering::Less);
        assert_eq!(compare(&o("w^w"), &o("w^3*5 + w")), Ordering::Greater);
    }

    #[test]
    fn add_examples() {
        assert_eq!(Ordinal::one().add(&Ordinal::omega()), Ordinal::omega());
        assert_eq!(Ordinal::omega().add(&Ordinal::one()), o("w + 1"));
        assert_eq!(o("w^2 + w").add(&o("w^2")), o("w^2*2"));
    }

    #[test]
    fn successor_and_limit() {
        let x = o("w+1");
        assert!(x.is_successor());
        assert_eq!(x.pred().unwrap(), Ordinal::omega());
        assert!(o("w^w").is_limit());
        let zero = Ordinal::zero();
        assert!(!zero.is_limit() && !zero.is_successor());
        assert!(matches!(zero.pred(), Err(OrdinalError::NotSuccessor(_))));
        assert!(matches!(o("w^2").pred(), Err(OrdinalError::NotSuccessor(_))));
    }

    #[test]
    fn mul_nat_scales_leading_term() {
        assert_eq!(o("w^2 + w + 1").mul_nat(3).unwrap(), o("w^2*3 + w + 1"));
        assert_eq!(o("5").mul_nat(3).unwrap(), o("15"));
        assert!(o("w").mul_nat(0).unwrap().is_zero());
    }

    #[test]
    fn left_subtraction() {
        assert_eq!(o("w").left_sub(&o("1")).unwrap(), o("w"));
        assert_eq!(o("w + 1").left_sub(&o("1")).unwrap(), o("w + 1"));
        assert_eq!(o("w + 2").left_sub(&o("w")).unwrap(), o("2"));
        assert_eq!(o("w^2*3").left_sub(&o("w^2 + w")).unwrap(), o("w^2*2"));
        assert_eq!(o("5").left_sub(&o("2")).unwrap(), o("3"));
        assert!(o("w").left_sub(&o("w+1")).is_none());
    }

    #[test]
    fn fundamental_sequences() {
        assert_eq!(o("w").fundamental(3).unwrap(), o("3"));
        assert_eq!(o("w^2").fundamental(4).unwrap(), o("w*4"));
        assert_eq!(o("w^w").fundamental(2).unwrap(), o("w^2"));
        assert_eq!(o("w^2 + w*2").fundamental(5).unwrap(), o("w^2 + w + 5"));
        assert!(o("w + 1").fundamental(1).is_none());
    }

    #[test]
    fn printer_forms() {
        assert_eq!(o("w^2*3 + w + 1").to_string(), "w^2*3 + w + 1");
        assert_eq!(o("w^1*1+1").to_string(), "w + 1");
        assert_eq!(o("w^w*2+1").to_string(), "w^w*2 + 1");
        assert_eq!(o("w^{w+1}").to_string(), "w^{w + 1}");
        assert_eq!(o("w^{w^w}").to_string(), "w^{w^w}");
        assert_eq!(o("0").to_string(), "0");
        assert_eq!(o("ω^ω").to_string(), "w^w");
    }

    #[test]
    fn parser_normalizes_unordered_sums() {
        assert_eq!(o("1 + w"), Ordinal::omega());
        assert_eq!(o("w + w^2"), o("w^2"));
        assert_eq!(o("w*0 + 3"), o("3"));
    }

    #[test]
    fn parser_rejects_garbage() {
        for bad in ["", "w^", "w^{1", "+", "w**2", "w^{w}}", "x", "18446744073709551616"] {
            assert!(bad.parse::<Ordinal>().is_err(), "{bad:?}");
        }
        let deep = format!("{}1{}", "w^{".repeat(100), "}".repeat(100));
        assert!(deep.parse::<Ordinal>().is_err());
    }

    /// Reference ordinal used only by the property tests: the raw term list,
    /// evaluated by structural recursion on the original (possibly
    /// non-normal) sum.
    #[derive(Debug, Clone)]
    enum Raw {
        Sum(Vec<(Raw, u64)>),
    }

    fn raw_strategy() -> impl Strategy<Value = Raw> {
        let leaf = prop::collection::vec((Just(Raw::Sum(vec![])), 1u64..=9), 0..3).prop_map(Raw::Sum);
        leaf.prop_recursive(3, 16, 3, |inner| {
            prop::collection::vec((inner, 1u64..=9), 0..4).prop_map(Raw::Sum)
        })
    }

    #[derive(Debug, Clone)]
    struct NormTerm(Vec<(NormTerm, u64)>);

    fn cmp_norm(a: &[(NormTerm, u64)], b: &[(NormTerm, u64)]) -> Ordering {
        for ((ea, ca), (eb, cb)) in a.iter().zip(b) {
            let o = cmp_norm(&ea.0, &eb.0).then(ca.cmp(cb));
            if o != Ordering::Equal {
                return o;
            }
        }
        a.len().cmp(&b.len())
    }

    fn ref_norm(r: &Raw) -> Vec<(NormTerm, u64)> {
        let Raw::Sum(ts) = r;
        let mut out: Vec<(NormTerm, u64)> = Vec::new();
        for (e, c) in ts {
            let e = NormTerm(ref_norm(e));
            while out.last().is_some_and(|(x, _)| cmp_norm(&x.0, &e.0) == Ordering::Less) {
                out.pop();
            }
            match out.last_mut() {
                Some((x, k)) if cmp_norm(&x.0, &e.0) == Ordering::Equal => *k += c,
                _ => out.push((e, *c)),
            }
        }
        out
    }

    fn ref_concat(a: &Raw, b: &Raw) -> Raw {
        let (Raw::Sum(x), Raw::Sum(y)) = (a, b);
        Raw::Sum(x.iter().chain(y).cloned().collect())
    }

    fn to_ordinal(r: &Raw) -> Ordinal {
        let Raw::Sum(ts) = r;
        Ordinal::from_terms(ts.iter().map(|(e, c)| (to_ordinal(e), *c))).unwrap()
    }

    fn same(a: &Ordinal, r: &[(NormTerm, u64)]) -> bool {
        a.terms.len() == r.len()
            && a.terms
                .iter()
                .zip(r)
                .all(|(t, (e, c))| t.coefficient == *c && same(&t.exponent, &e.0))
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent(r in raw_strategy()) {
            let x = to_ordinal(&r);
            prop_assert_eq!(x.normalize(), x.clone());
            prop_assert_eq!(x.normalize().normalize(), x);
        }

        #[test]
        fn construction_matches_reference(r in raw_strategy()) {
            prop_assert!(same(&to_ordinal(&r), &ref_norm(&r)));
        }

        #[test]
        fn add_matches_reference_and_is_associative(a in raw_strategy(), b in raw_strategy(), c in raw_strategy()) {
            let (x, y, z) = (to_ordinal(&a), to_ordinal(&b), to_ordinal(&c));
            prop_assert!(same(&x.add(&y), &ref_norm(&ref_concat(&a, &b))));
            prop_assert_eq!(x.add(&y).add(&z), x.add(&y.add(&z)));
        }

        #[test]
        fn compare_is_total_order(a in raw_strategy(), b in raw_strategy(), c in raw_strategy()) {
            let (x, y, z) = (to_ordinal(&a), to_ordinal(&b), to_ordinal(&c));
            prop_assert_eq!(x.cmp(&y), cmp_norm(&ref_norm(&a), &ref_norm(&b)));
            prop_assert_eq!(x.cmp(&y), y.cmp(&x).reverse());
            prop_assert_eq!(x.cmp(&y) == Ordering::Equal, x == y);
            if x <= y && y <= z {
                prop_assert!(x <= z);
            }
        }

        #[test]
        fn exactly_one_kind(a in raw_strategy()) {
            let x = to_ordinal(&a);
            let kinds = [x.is_zero(), x.is_successor(), x.is_limit()];
            prop_assert_eq!(kinds.iter().filter(|k| **k).count(), 1);
        }

        #[test]
        fn printer_round_trips(a in raw_strategy()) {
            let x = to_ordinal(&a);
            let s = x.to_string();
            let back: Ordinal = s.parse().unwrap();
            prop_assert_eq!(&back, &x);
            prop_assert_eq!(back.to_string(), s);
        }

        #[test]
        fn left_sub_inverts_add(a in raw_strategy(), b in raw_strategy()) {
            let (x, y) = (to_ordinal(&a), to_ordinal(&b));
            let s = x.add(&y);
            let g = s.left_sub(&x).unwrap();
            prop_assert_eq!(x.add(&g), s);
        }
    }
}
