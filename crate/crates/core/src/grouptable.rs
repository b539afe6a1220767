//! Finite groups as multiplication tables, Cayley graphs and their decorated
//! automorphisms, plus a small family of virtually cyclic groups.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("empty table")]
    Empty,
    #[error("row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("entry ({row}, {col}) = {value} is out of range")]
    OutOfRange { row: usize, col: usize, value: usize },
    #[error("not a Latin square: {kind} {index} repeats an element")]
    NotLatin { kind: LineKind, index: usize },
    #[error("no identity element")]
    NoIdentity,
    #[error("not associative: ({0}*{1})*{2} != {0}*({1}*{2})")]
    NotAssociative(usize, usize, usize),
    #[error("duplicate element name {0:?}")]
    DuplicateName(String),
    #[error("{0} names for a table of order {1}")]
    NameCount(usize, usize),
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("unknown builtin group {0:?}")]
    UnknownBuiltin(String),
    #[error("CSV: {0}")]
    Csv(String),
    #[error("JSON: {0}")]
    Json(String),
    #[error("invalid virtually cyclic descriptor: {0}")]
    BadDescriptor(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineKind {
    Row,
    Column,
}

impl fmt::Display for LineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LineKind::Row => "row",
            LineKind::Column => "column",
        })
    }
}

/// A validated finite group. `table[g][h]` is the index of `g·h`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupJson", into = "GroupJson")]
pub struct FiniteGroup {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupJson {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
}

impl TryFrom<GroupJson> for FiniteGroup {
    type Error = GroupError;
    fn try_from(raw: GroupJson) -> Result<Self, GroupError> {
        FiniteGroup::validate_table(raw.table, raw.names)
    }
}

impl From<FiniteGroup> for GroupJson {
    fn from(g: FiniteGroup) -> Self {
        GroupJson {
            names: g.names,
            table: g.table,
        }
    }
}

impl FiniteGroup {
    /// Validates shape, the Latin property, identity and associativity, in
    /// that order.
    pub fn validate_table(table: Vec<Vec<usize>>, names: Vec<String>) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::Empty);
        }
        if names.len() != n {
            return Err(GroupError::NameCount(names.len(), n));
        }
        let mut seen_names = HashSet::new();
        for name in &names {
            if !seen_names.insert(name.as_str()) {
                return Err(GroupError::DuplicateName(name.clone()));
            }
        }
        for (row, r) in table.iter().enumerate() {
            if r.len() != n {
                return Err(GroupError::NotSquare {
                    row,
                    len: r.len(),
                    expected: n,
                });
            }
            if let Some((col, &value)) = r.iter().enumerate().find(|(_, &v)| v >= n) {
                return Err(GroupError::OutOfRange { row, col, value });
            }
        }
        let mut seen = vec![false; n];
        for (i, r) in table.iter().enumerate() {
            seen.iter_mut().for_each(|s| *s = false);
            for &v in r {
                if std::mem::replace(&mut seen[v], true) {
                    return Err(GroupError::NotLatin {
                        kind: LineKind::Row,
                        index: i,
                    });
                }
            }
        }
        for j in 0..n {
            seen.iter_mut().for_each(|s| *s = false);
            for r in &table {
                if std::mem::replace(&mut seen[r[j]], true) {
                    return Err(GroupError::NotLatin {
                        kind: LineKind::Column,
                        index: j,
                    });
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or(GroupError::NoIdentity)?;
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(GroupError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        let inverses = (0..n)
            .map(|g| (0..n).find(|&h| table[g][h] == identity).expect("Latin row"))
            .collect();
        Ok(Self {
            names,
            table,
            identity,
            inverses,
        })
    }

    /// For tables that are groups by construction: skips the cubic
    /// associativity check.
    fn assume_group(table: Vec<Vec<usize>>, names: Vec<String>) -> Self {
        let n = table.len();
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g))
            .expect("group table has an identity");
        let inverses = (0..n)
            .map(|g| (0..n).find(|&h| table[g][h] == identity).expect("group table has inverses"))
            .collect();
        Self {
            names,
            table,
            identity,
            inverses,
        }
    }

    /// Elements named by their indices.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let names = (0..table.len()).map(|i| i.to_string()).collect();
        Self::validate_table(table, names)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> {
        0..self.order()
    }

    pub fn non_identity(&self) -> impl Iterator<Item = usize> + '_ {
        self.elements().filter(move |&g| g != self.identity)
    }

    pub fn pow(&self, a: usize, k: u64) -> usize {
        let mut r = self.identity;
        for _ in 0..k {
            r = self.mul(r, a);
        }
        r
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Sorted multiset of element orders.
    pub fn order_profile(&self) -> Vec<usize> {
        let mut v: Vec<_> = self.elements().map(|a| self.element_order(a)).collect();
        v.sort_unstable();
        v
    }

    pub fn center_size(&self) -> usize {
        self.elements()
            .filter(|&z| self.elements().all(|g| self.mul(z, g) == self.mul(g, z)))
            .count()
    }

    pub fn is_abelian(&self) -> bool {
        self.center_size() == self.order()
    }

    /// Subgroup generated by `gens`, as a sorted list of indices.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.order()];
        inside[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(x, s);
                if !std::mem::replace(&mut inside[y], true) {
                    queue.push_back(y);
                }
            }
        }
        self.elements().filter(|&g| inside[g]).collect()
    }

    /// Smallest normal subgroup containing `a`.
    pub fn normal_closure(&self, a: usize) -> Vec<usize> {
        let conjugates: Vec<usize> = self
            .elements()
            .map(|g| self.mul(self.mul(g, a), self.inv(g)))
            .collect();
        self.generated_subgroup(&conjugates)
    }

    /// A group is simple when it is nontrivial and every non-identity
    /// element has the whole group as normal closure.
    pub fn is_simple(&self) -> bool {
        self.order() > 1
            && self
                .non_identity()
                .all(|a| self.normal_closure(a).len() == self.order())
    }

    /// A small generating set, chosen greedily by decreasing element order.
    pub fn generators(&self) -> Vec<usize> {
        let mut candidates: Vec<usize> = self.non_identity().collect();
        candidates.sort_by_key(|&a| (std::cmp::Reverse(self.element_order(a)), a));
        let mut gens = Vec::new();
        let mut span = vec![self.identity];
        for a in candidates {
            if span.len() == self.order() {
                break;
            }
            if span.binary_search(&a).is_err() {
                gens.push(a);
                span = self.generated_subgroup(&gens);
            }
        }
        gens
    }

    /// Checks that `map` is a homomorphism into `target`.
    pub fn is_homomorphism(&self, target: &FiniteGroup, map: &[usize]) -> bool {
        map.len() == self.order()
            && map.iter().all(|&x| x < target.order())
            && self.elements().all(|a| {
                self.elements()
                    .all(|b| map[self.mul(a, b)] == target.mul(map[a], map[b]))
            })
    }

    /// Checks that `map` is an automorphism of `self`.
    pub fn is_automorphism(&self, map: &[usize]) -> bool {
        let mut seen = vec![false; self.order()];
        self.is_homomorphism(self, map)
            && map.iter().all(|&x| !std::mem::replace(&mut seen[x], true))
    }

    pub fn direct_product(&self, other: &FiniteGroup) -> FiniteGroup {
        let (n, m) = (self.order(), other.order());
        let idx = |a: usize, b: usize| a * m + b;
        let mut names = Vec::with_capacity(n * m);
        let mut table = vec![vec![0; n * m]; n * m];
        for a in 0..n {
            for b in 0..m {
                names.push(format!("({},{})", self.name(a), other.name(b)));
                for c in 0..n {
                    for d in 0..m {
                        table[idx(a, b)][idx(c, d)] = idx(self.mul(a, c), other.mul(b, d));
                    }
                }
            }
        }
        FiniteGroup::assume_group(table, names)
    }

    /// Builds the group of a complete list of permutations (closed under
    /// composition), with `(p·q)(x) = p(q(x))`.
    pub fn from_permutations(perms: Vec<Vec<usize>>, names: Vec<String>) -> Result<Self, GroupError> {
        let index: HashMap<&[usize], usize> =
            perms.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
        let mut table = vec![vec![0; perms.len()]; perms.len()];
        for (i, p) in perms.iter().enumerate() {
            for (j, q) in perms.iter().enumerate() {
                let pq: Vec<usize> = q.iter().map(|&x| p[x]).collect();
                table[i][j] = *index
                    .get(pq.as_slice())
                    .ok_or_else(|| GroupError::BadDescriptor("permutations not closed".into()))?;
            }
        }
        Self::validate_table(table, names)
    }

    /// Permutation group generated by `gens` on `degree` points. Elements are
    /// named in 1-based cycle notation.
    pub fn permutation_closure(degree: usize, gens: &[Vec<usize>]) -> Self {
        let id: Vec<usize> = (0..degree).collect();
        let mut elems = vec![id.clone()];
        let mut seen: HashSet<Vec<usize>> = HashSet::from([id]);
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let next: Vec<usize> = elems[i].iter().map(|&x| g[x]).collect();
                if seen.insert(next.clone()) {
                    elems.push(next);
                }
            }
            i += 1;
        }
        elems[1..].sort();
        let names = elems.iter().map(|p| cycle_notation(p)).collect();
        Self::from_permutations(elems, names).expect("closed by construction")
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::assume_group(table, (0..n).map(|i| i.to_string()).collect())
    }

    /// Dihedral group of order `2n`: elements `r^k` and `s r^k`.
    pub fn dihedral(n: usize) -> Self {
        assert!(n >= 1);
        // (f, k) stands for s^f r^k; r^k s = s r^(-k).
        let idx = |f: usize, k: usize| f * n + k;
        let mut table = vec![vec![0; 2 * n]; 2 * n];
        let mut names = Vec::with_capacity(2 * n);
        for f in 0..2 {
            for k in 0..n {
                names.push(match (f, k) {
                    (0, 0) => "e".to_string(),
                    (0, 1) => "r".to_string(),
                    (0, k) => format!("r{k}"),
                    (1, 0) => "s".to_string(),
                    (1, 1) => "sr".to_string(),
                    (1, k) => format!("sr{k}"),
                    _ => unreachable!(),
                });
                for g in 0..2 {
                    for l in 0..n {
                        let k2 = if g == 1 { (n - k) % n } else { k };
                        table[idx(f, k)][idx(g, l)] = idx(f ^ g, (k2 + l) % n);
                    }
                }
            }
        }
        Self::validate_table(table, names).expect("dihedral group")
    }

    pub fn symmetric(n: usize) -> Self {
        assert!((1..=5).contains(&n));
        let mut gens = Vec::new();
        if n >= 2 {
            let mut t: Vec<usize> = (0..n).collect();
            t.swap(0, 1);
            gens.push(t);
            gens.push((0..n).map(|i| (i + 1) % n).collect());
        }
        Self::permutation_closure(n, &gens)
    }

    pub fn alternating(n: usize) -> Self {
        assert!((1..=6).contains(&n));
        let gens: Vec<Vec<usize>> = (2..n)
            .map(|k| {
                let mut p: Vec<usize> = (0..n).collect();
                p[0] = 1;
                p[1] = k;
                p[k] = 0;
                p
            })
            .collect();
        Self::permutation_closure(n, &gens)
    }

    pub fn quaternion() -> Self {
        // Units ±1, ±i, ±j, ±k as (sign, unit) with unit 0..4 = 1, i, j, k.
        const UNIT: [[(bool, usize); 4]; 4] = [
            [(false, 0), (false, 1), (false, 2), (false, 3)],
            [(false, 1), (true, 0), (false, 3), (true, 2)],
            [(false, 2), (true, 3), (true, 0), (false, 1)],
            [(false, 3), (false, 2), (true, 1), (true, 0)],
        ];
        let labels = ["1", "i", "j", "k"];
        let idx = |neg: bool, u: usize| u * 2 + neg as usize;
        let mut names = vec![String::new(); 8];
        let mut table = vec![vec![0; 8]; 8];
        for u in 0..4 {
            for sa in [false, true] {
                names[idx(sa, u)] = format!("{}{}", if sa { "-" } else { "" }, labels[u]);
                for v in 0..4 {
                    for sb in [false, true] {
                        let (s, w) = UNIT[u][v];
                        table[idx(sa, u)][idx(sb, v)] = idx(s ^ sa ^ sb, w);
                    }
                }
            }
        }
        Self::validate_table(table, names).expect("quaternion group")
    }

    /// Parses builtin names: `Zn`, `Dn` (order 2n), `Sn`, `An`, `Q8`,
    /// `trivial`, and `x`-separated direct products such as `Z2xZ2`.
    /// A `builtin:` prefix is accepted.
    pub fn builtin(spec: &str) -> Result<Self, GroupError> {
        let s = spec.trim();
        let s = s.strip_prefix("builtin:").unwrap_or(s);
        let unknown = || GroupError::UnknownBuiltin(spec.to_string());
        let factors: Vec<&str> = s.split(['x', '×']).collect();
        if factors.len() > 1 {
            let mut it = factors.into_iter().map(Self::builtin_factor);
            let first = it.next().unwrap().ok_or_else(unknown)?;
            return it.try_fold(first, |acc, f| Ok(acc.direct_product(&f.ok_or_else(unknown)?)));
        }
        Self::builtin_factor(s).ok_or_else(unknown)
    }

    fn builtin_factor(s: &str) -> Option<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("trivial") || s == "1" {
            return Some(Self::trivial());
        }
        if s == "Q8" {
            return Some(Self::quaternion());
        }
        let (head, num) = s.split_at(s.find(|c: char| c.is_ascii_digit())?);
        let n: usize = num.parse().ok()?;
        match head {
            "Z" | "C" if (1..=4096).contains(&n) => Some(Self::cyclic(n)),
            "D" if (1..=2048).contains(&n) => Some(Self::dihedral(n)),
            "S" if (1..=5).contains(&n) => Some(Self::symmetric(n)),
            "A" if (1..=6).contains(&n) => Some(Self::alternating(n)),
            _ => None,
        }
    }

    /// Reads a table in CSV form. The header row lists element names; each
    /// following row lists products as names or indices. A header starting
    /// with an empty cell marks a leading column of row labels, which must
    /// match the header order.
    pub fn from_csv(text: &str) -> Result<Self, GroupError> {
        let csv_err = |e: csv::Error| GroupError::Csv(e.to_string());
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut records = rdr.records();
        let header = records
            .next()
            .ok_or(GroupError::Empty)?
            .map_err(csv_err)?;
        let labelled = header.get(0) == Some("");
        let names: Vec<String> = header
            .iter()
            .skip(labelled as usize)
            .map(str::to_string)
            .collect();
        let lookup: HashMap<&str, usize> =
            names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut table = Vec::new();
        for (row, rec) in records.enumerate() {
            let rec = rec.map_err(csv_err)?;
            if rec.iter().all(str::is_empty) {
                continue;
            }
            let mut cells = rec.iter();
            if labelled {
                let label = cells.next().unwrap_or("");
                if names.get(row).map(String::as_str) != Some(label) {
                    return Err(GroupError::Csv(format!(
                        "row {row} is labelled {label:?}, expected {:?}",
                        names.get(row)
                    )));
                }
            }
            let parsed = cells
                .map(|c| {
                    lookup
                        .get(c)
                        .copied()
                        .or_else(|| c.parse::<usize>().ok())
                        .ok_or_else(|| GroupError::UnknownElement(c.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            table.push(parsed);
        }
        Self::validate_table(table, names)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.names).expect("in-memory write");
        for row in &self.table {
            w.write_record(row.iter().map(|&i| self.names[i].as_str()))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    pub fn from_json(text: &str) -> Result<Self, GroupError> {
        serde_json::from_str(text).map_err(|e| GroupError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// 1-based cycle notation, `e` for the identity.
fn cycle_notation(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        out.push('(');
        let mut x = start;
        let mut first = true;
        while !seen[x] {
            seen[x] = true;
            if !first {
                out.push(' ');
            }
            first = false;
            out.push_str(&(x + 1).to_string());
            x = p[x];
        }
        out.push(')');
    }
    if out.is_empty() {
        out.push('e');
    }
    out
}

/// Invariants that any isomorphism preserves.
fn invariants_match(a: &FiniteGroup, b: &FiniteGroup) -> bool {
    a.order() == b.order()
        && a.order_profile() == b.order_profile()
        && a.center_size() == b.center_size()
}

/// Searches for a homomorphism `src → dst` that is injective, and also
/// surjective when `onto` is set, by backtracking over generator images.
fn search_embedding(src: &FiniteGroup, dst: &FiniteGroup, onto: bool) -> Option<Vec<usize>> {
    if src.order() > dst.order() || (onto && src.order() != dst.order()) {
        return None;
    }
    let gens = src.generators();
    let orders: Vec<usize> = gens.iter().map(|&g| src.element_order(g)).collect();
    let candidates: Vec<Vec<usize>> = orders
        .iter()
        .map(|&k| dst.elements().filter(|&x| dst.element_order(x) == k).collect())
        .collect();
    let mut images = Vec::with_capacity(gens.len());
    fn rec(
        src: &FiniteGroup,
        dst: &FiniteGroup,
        gens: &[usize],
        candidates: &[Vec<usize>],
        images: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        if images.len() == gens.len() {
            return extend(src, dst, gens, images);
        }
        for &c in &candidates[images.len()] {
            if images.contains(&c) {
                continue;
            }
            images.push(c);
            if let Some(m) = rec(src, dst, gens, candidates, images) {
                return Some(m);
            }
            images.pop();
        }
        None
    }
    let map = rec(src, dst, &gens, &candidates, &mut images)?;
    debug_assert!(!onto || map.iter().collect::<HashSet<_>>().len() == dst.order());
    Some(map)
}

/// Extends generator images to an injective homomorphism, if one exists.
fn extend(src: &FiniteGroup, dst: &FiniteGroup, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
    const UNSET: usize = usize::MAX;
    let mut map = vec![UNSET; src.order()];
    let mut used = vec![false; dst.order()];
    map[src.identity()] = dst.identity();
    used[dst.identity()] = true;
    let mut queue = VecDeque::from([src.identity()]);
    while let Some(x) = queue.pop_front() {
        for (&s, &t) in gens.iter().zip(images) {
            let xs = src.mul(x, s);
            let image = dst.mul(map[x], t);
            if map[xs] == UNSET {
                if std::mem::replace(&mut used[image], true) {
                    return None;
                }
                map[xs] = image;
                queue.push_back(xs);
            } else if map[xs] != image {
                return None;
            }
        }
    }
    src.is_homomorphism(dst, &map).then_some(map)
}

/// An isomorphism `a → b` as an index map, if any.
pub fn find_isomorphism(a: &FiniteGroup, b: &FiniteGroup) -> Option<Vec<usize>> {
    if !invariants_match(a, b) {
        return None;
    }
    search_embedding(a, b, true)
}

pub fn isomorphic(a: &FiniteGroup, b: &FiniteGroup) -> bool {
    find_isomorphism(a, b).is_some()
}

/// An injective homomorphism `a → b`, if any.
pub fn find_monomorphism(a: &FiniteGroup, b: &FiniteGroup) -> Option<Vec<usize>> {
    if b.order() % a.order() != 0 {
        return None;
    }
    search_embedding(a, b, false)
}

/// A directed, edge-labelled graph. Every edge goes from `source` to
/// `target` and carries one of `labels`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CayleyGraph {
    pub vertices: Vec<String>,
    pub labels: Vec<String>,
    pub edges: Vec<CayleyEdge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CayleyEdge {
    pub source: usize,
    pub target: usize,
    pub label: usize,
}

impl CayleyGraph {
    /// Edge `g → g·h` labelled `h` for every `g` and every `h ≠ id`.
    pub fn complete(g: &FiniteGroup) -> Self {
        let labels: Vec<usize> = g.non_identity().collect();
        Self::with_generators(g, &labels)
    }

    /// Edge `g → g·s` labelled `s` for every `g` and every `s` in `gens`.
    pub fn with_generators(g: &FiniteGroup, gens: &[usize]) -> Self {
        let edges = g
            .elements()
            .flat_map(|x| {
                gens.iter().enumerate().map(move |(l, &s)| CayleyEdge {
                    source: x,
                    target: g.mul(x, s),
                    label: l,
                })
            })
            .collect();
        Self {
            vertices: g.names().to_vec(),
            labels: gens.iter().map(|&s| g.name(s).to_string()).collect(),
            edges,
        }
    }

    pub fn edges_with_label(&self, label: usize) -> usize {
        self.edges.iter().filter(|e| e.label == label).count()
    }

    /// `succ[l][v]`: the target of the `l`-labelled edge out of `v`, when
    /// every vertex has exactly one such edge.
    fn label_functions(&self) -> Option<Vec<Vec<usize>>> {
        let n = self.vertices.len();
        let mut succ = vec![vec![usize::MAX; n]; self.labels.len()];
        for e in &self.edges {
            let slot = &mut succ[e.label][e.source];
            if *slot != usize::MAX {
                return None;
            }
            *slot = e.target;
        }
        succ.iter().all(|f| f.iter().all(|&t| t != usize::MAX)).then_some(succ)
    }

    /// All vertex bijections preserving every labelled directed edge.
    pub fn decorated_automorphism_maps(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let edge_set: HashSet<CayleyEdge> = self.edges.iter().copied().collect();
        let preserves = |p: &[usize]| {
            self.edges.iter().all(|e| {
                edge_set.contains(&CayleyEdge {
                    source: p[e.source],
                    target: p[e.target],
                    label: e.label,
                })
            })
        };
        let succ = self.label_functions();
        let mut found = Vec::new();
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        self.extend_automorphism(&mut map, &mut used, succ.as_deref(), &preserves, &mut found);
        found.sort();
        found
    }

    fn extend_automorphism(
        &self,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        succ: Option<&[Vec<usize>]>,
        preserves: &dyn Fn(&[usize]) -> bool,
        found: &mut Vec<Vec<usize>>,
    ) {
        let Some(v) = map.iter().position(|&x| x == usize::MAX) else {
            if preserves(map) {
                found.push(map.clone());
            }
            return;
        };
        for w in 0..map.len() {
            if used[w] {
                continue;
            }
            let (saved_map, saved_used) = (map.clone(), used.clone());
            map[v] = w;
            used[w] = true;
            if propagate(map, used, succ, v) {
                self.extend_automorphism(map, used, succ, preserves, found);
            }
            *map = saved_map;
            *used = saved_used;
        }
    }

    /// Automorphism group under composition.
    pub fn decorated_automorphisms(&self) -> FiniteGroup {
        let maps = self.decorated_automorphism_maps();
        let names = maps.iter().map(|p| cycle_notation(p)).collect();
        FiniteGroup::from_permutations(maps, names).expect("automorphisms form a group")
    }

    /// Number of automorphisms of the underlying undirected simple graph,
    /// forgetting labels and directions.
    pub fn undecorated_automorphism_count(&self) -> usize {
        let n = self.vertices.len();
        let mut adj = vec![vec![false; n]; n];
        for e in &self.edges {
            if e.source != e.target {
                adj[e.source][e.target] = true;
                adj[e.target][e.source] = true;
            }
        }
        fn rec(adj: &[Vec<bool>], map: &mut Vec<usize>, used: &mut [bool]) -> usize {
            let v = map.len();
            if v == adj.len() {
                return 1;
            }
            let mut total = 0;
            for w in 0..adj.len() {
                if used[w] || (0..v).any(|u| adj[u][v] != adj[map[u]][w]) {
                    continue;
                }
                used[w] = true;
                map.push(w);
                total += rec(adj, map, used);
                map.pop();
                used[w] = false;
            }
            total
        }
        rec(&adj, &mut Vec::with_capacity(n), &mut vec![false; n])
    }
}

/// Forces images along label functions from a newly assigned vertex.
/// Returns false on a conflict.
fn propagate(map: &mut [usize], used: &mut [bool], succ: Option<&[Vec<usize>]>, start: usize) -> bool {
    let Some(succ) = succ else { return true };
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for f in succ {
            let (a, b) = (f[v], f[map[v]]);
            if map[a] == usize::MAX {
                if used[b] {
                    return false;
                }
                map[a] = b;
                used[b] = true;
                stack.push(a);
            } else if map[a] != b {
                return false;
            }
        }
    }
    true
}

/// An element of a virtually cyclic group: a translation part in `Z` and a
/// finite part (a group index, or the reflection bit for `D∞`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VcElement {
    pub shift: i64,
    pub finite: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VcKind {
    /// `F ⋊_φ Z` with `(n, f)(m, h) = (n + m, φ^m(f)·h)`.
    FiniteByZ {
        finite: FiniteGroup,
        automorphism: Vec<usize>,
    },
    /// `Z ⋊ Z/2`, elements `x ↦ ±x + n`.
    InfiniteDihedral,
}

/// A two-ended group given by a normal form, with a symmetric generating
/// set. Two-endedness is certified by the caller, not computed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "VcJson", into = "VcJson")]
pub struct VcGroup {
    kind: VcKind,
    generators: Vec<VcElement>,
    pub two_ended_certificate: bool,
    inverse_automorphism: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct VcJson {
    #[serde(flatten)]
    kind: VcKind,
    #[serde(default)]
    generators: Option<Vec<VcElement>>,
    two_ended_certificate: bool,
}

impl TryFrom<VcJson> for VcGroup {
    type Error = GroupError;
    fn try_from(raw: VcJson) -> Result<Self, GroupError> {
        let mut g = VcGroup::new(raw.kind, raw.two_ended_certificate)?;
        if let Some(gens) = raw.generators {
            g = g.with_generators(gens)?;
        }
        Ok(g)
    }
}

impl From<VcGroup> for VcJson {
    fn from(g: VcGroup) -> Self {
        VcJson {
            kind: g.kind,
            generators: Some(g.generators),
            two_ended_certificate: g.two_ended_certificate,
        }
    }
}

impl VcGroup {
    pub fn new(kind: VcKind, two_ended_certificate: bool) -> Result<Self, GroupError> {
        let mut inverse_automorphism = Vec::new();
        let generators = match &kind {
            VcKind::FiniteByZ {
                finite,
                automorphism,
            } => {
                if !finite.is_automorphism(automorphism) {
                    return Err(GroupError::BadDescriptor(
                        "map is not an automorphism of the finite part".into(),
                    ));
                }
                inverse_automorphism = vec![0; finite.order()];
                for (a, &b) in automorphism.iter().enumerate() {
                    inverse_automorphism[b] = a;
                }
                let mut gens = vec![
                    VcElement { shift: 1, finite: finite.identity() },
                    VcElement { shift: -1, finite: finite.identity() },
                ];
                for f in finite.generators() {
                    gens.push(VcElement { shift: 0, finite: f });
                    let fi = finite.inv(f);
                    if fi != f {
                        gens.push(VcElement { shift: 0, finite: fi });
                    }
                }
                gens
            }
            VcKind::InfiniteDihedral => vec![
                VcElement { shift: 1, finite: 0 },
                VcElement { shift: -1, finite: 0 },
                VcElement { shift: 0, finite: 1 },
            ],
        };
        Ok(Self {
            kind,
            generators,
            two_ended_certificate,
            inverse_automorphism,
        })
    }

    /// The integers, generated by `±1`.
    pub fn integers() -> Self {
        Self::product_with_z(FiniteGroup::trivial())
    }

    /// `F × Z`.
    pub fn product_with_z(finite: FiniteGroup) -> Self {
        let automorphism = finite.elements().collect();
        Self::new(VcKind::FiniteByZ { finite, automorphism }, true).expect("identity map")
    }

    pub fn infinite_dihedral() -> Self {
        Self::new(VcKind::InfiniteDihedral, true).expect("valid")
    }

    /// Parses `Z`, `Dinf` or `Z x F` for a builtin finite `F`.
    pub fn builtin(spec: &str) -> Result<Self, GroupError> {
        let s = spec.trim();
        let s = s.strip_prefix("builtin:").unwrap_or(s);
        match s {
            "Z" => Ok(Self::integers()),
            "Dinf" | "D∞" => Ok(Self::infinite_dihedral()),
            _ => {
                let rest = s
                    .strip_prefix("Zx")
                    .or_else(|| s.strip_prefix("Z×"))
                    .ok_or_else(|| GroupError::UnknownBuiltin(spec.to_string()))?;
                Ok(Self::product_with_z(FiniteGroup::builtin(rest)?))
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self, GroupError> {
        serde_json::from_str(text).map_err(|e| GroupError::Json(e.to_string()))
    }

    /// Replaces the generating set after checking it is closed under inverses.
    pub fn with_generators(mut self, gens: Vec<VcElement>) -> Result<Self, GroupError> {
        for &g in &gens {
            self.check_element(g)?;
            if !gens.contains(&self.inv(g)) {
                return Err(GroupError::BadDescriptor(format!(
                    "generating set is not symmetric: missing the inverse of {}",
                    self.name(g)
                )));
            }
        }
        if !gens.iter().any(|g| g.shift != 0) {
            return Err(GroupError::BadDescriptor(
                "generating set has no element of infinite order".into(),
            ));
        }
        self.generators = gens;
        Ok(self)
    }

    fn check_element(&self, g: VcElement) -> Result<(), GroupError> {
        let bound = match &self.kind {
            VcKind::FiniteByZ { finite, .. } => finite.order(),
            VcKind::InfiniteDihedral => 2,
        };
        if g.finite >= bound {
            return Err(GroupError::BadDescriptor(format!(
                "finite part {} out of range",
                g.finite
            )));
        }
        Ok(())
    }

    pub fn kind(&self) -> &VcKind {
        &self.kind
    }

    pub fn generators(&self) -> &[VcElement] {
        &self.generators
    }

    pub fn identity(&self) -> VcElement {
        match &self.kind {
            VcKind::FiniteByZ { finite, .. } => VcElement { shift: 0, finite: finite.identity() },
            VcKind::InfiniteDihedral => VcElement { shift: 0, finite: 0 },
        }
    }

    fn phi_pow(&self, f: usize, m: i64) -> usize {
        let VcKind::FiniteByZ { automorphism, .. } = &self.kind else {
            unreachable!()
        };
        let map = if m >= 0 { automorphism } else { &self.inverse_automorphism };
        let mut x = f;
        for _ in 0..m.unsigned_abs() {
            x = map[x];
        }
        x
    }

    pub fn mul(&self, a: VcElement, b: VcElement) -> VcElement {
        match &self.kind {
            VcKind::FiniteByZ { finite, .. } => VcElement {
                shift: a.shift + b.shift,
                finite: finite.mul(self.phi_pow(a.finite, b.shift), b.finite),
            },
            VcKind::InfiniteDihedral => VcElement {
                shift: a.shift + if a.finite == 1 { -b.shift } else { b.shift },
                finite: a.finite ^ b.finite,
            },
        }
    }

    pub fn inv(&self, a: VcElement) -> VcElement {
        match &self.kind {
            VcKind::FiniteByZ { finite, .. } => VcElement {
                shift: -a.shift,
                finite: self.phi_pow(finite.inv(a.finite), -a.shift),
            },
            VcKind::InfiniteDihedral if a.finite == 1 => a,
            VcKind::InfiniteDihedral => VcElement { shift: -a.shift, finite: 0 },
        }
    }

    pub fn name(&self, a: VcElement) -> String {
        match &self.kind {
            VcKind::FiniteByZ { finite, .. } if finite.order() == 1 => a.shift.to_string(),
            VcKind::FiniteByZ { finite, .. } => format!("({},{})", a.shift, finite.name(a.finite)),
            VcKind::InfiniteDihedral => {
                format!("{}{}", a.shift, if a.finite == 1 { "s" } else { "" })
            }
        }
    }

    /// Word-metric ball of radius `r`, with distances, in BFS order.
    pub fn ball(&self, r: usize) -> Vec<(VcElement, usize)> {
        let mut dist: BTreeMap<VcElement, usize> = BTreeMap::new();
        let mut out = vec![(self.identity(), 0)];
        dist.insert(self.identity(), 0);
        let mut i = 0;
        while i < out.len() {
            let (x, d) = out[i];
            if d < r {
                for &s in &self.generators {
                    let y = self.mul(x, s);
                    if !dist.contains_key(&y) {
                        dist.insert(y, d + 1);
                        out.push((y, d + 1));
                    }
                }
            }
            i += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_groups() -> Vec<(&'static str, FiniteGroup)> {
        ["Z1", "Z2", "Z3", "Z4", "Z2xZ2", "Z5", "Z6", "S3", "Z7", "D4", "Q8", "Z2xZ2xZ2", "Z8", "Z2xZ4"]
            .into_iter()
            .map(|n| (n, FiniteGroup::builtin(n).unwrap()))
            .collect()
    }

    #[test]
    fn validation() {
        let z2 = FiniteGroup::from_table(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(z2.order(), 2);
        assert_eq!(
            FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]),
            Err(GroupError::NotLatin { kind: LineKind::Row, index: 1 })
        );
        assert_eq!(
            FiniteGroup::from_table(vec![vec![1, 0], vec![0, 1]]).unwrap().identity(),
            1
        );
        assert_eq!(
            FiniteGroup::from_table(vec![vec![1, 2, 0], vec![2, 0, 1], vec![0, 1, 2]])
                .unwrap()
                .identity(),
            2
        );
        // Latin with identity but not associative (order 5 loop).
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(
            FiniteGroup::from_table(loop5),
            Err(GroupError::NotAssociative(..))
        ));
        assert_eq!(
            FiniteGroup::from_table(vec![vec![1, 2, 0], vec![0, 1, 2], vec![2, 0, 1]]),
            Err(GroupError::NoIdentity)
        );
        assert!(matches!(
            FiniteGroup::from_table(vec![vec![0, 1], vec![1]]),
            Err(GroupError::NotSquare { row: 1, .. })
        ));
        assert!(matches!(
            FiniteGroup::from_table(vec![vec![0, 2], vec![1, 0]]),
            Err(GroupError::OutOfRange { value: 2, .. })
        ));
        assert_eq!(FiniteGroup::from_table(vec![]), Err(GroupError::Empty));
    }

    #[test]
    fn builtin_orders() {
        for (name, order) in [
            ("Z1", 1),
            ("Z6", 6),
            ("D4", 8),
            ("D3", 6),
            ("S3", 6),
            ("S4", 24),
            ("A4", 12),
            ("A5", 60),
            ("Q8", 8),
            ("Z2xZ3", 6),
            ("builtin:Z2xZ2", 4),
            ("trivial", 1),
        ] {
            assert_eq!(FiniteGroup::builtin(name).unwrap().order(), order, "{name}");
        }
        for bad in ["Z0", "S9", "G7", "", "Zx", "builtin:"] {
            assert!(FiniteGroup::builtin(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn group_invariants() {
        let q8 = FiniteGroup::quaternion();
        assert_eq!(q8.order_profile(), vec![1, 2, 4, 4, 4, 4, 4, 4]);
        assert_eq!(q8.center_size(), 2);
        let d4 = FiniteGroup::dihedral(4);
        assert_eq!(d4.order_profile(), vec![1, 2, 2, 2, 2, 2, 4, 4]);
        assert_eq!(d4.center_size(), 2);
        assert!(!FiniteGroup::symmetric(3).is_abelian());
        assert!(FiniteGroup::alternating(5).is_simple());
        assert!(!FiniteGroup::alternating(4).is_simple());
        assert!(FiniteGroup::cyclic(7).is_simple());
        assert!(!FiniteGroup::trivial().is_simple());
        assert_eq!(FiniteGroup::symmetric(3).name(0), "e");
    }

    #[test]
    fn isomorphism_examples() {
        let z4 = FiniteGroup::cyclic(4);
        let v4 = FiniteGroup::builtin("Z2xZ2").unwrap();
        assert_eq!(z4.order_profile(), vec![1, 2, 4, 4]);
        assert_eq!(v4.order_profile(), vec![1, 2, 2, 2]);
        assert!(!isomorphic(&z4, &v4));
        let z6 = FiniteGroup::cyclic(6);
        let z2z3 = FiniteGroup::builtin("Z2xZ3").unwrap();
        let m = find_isomorphism(&z6, &z2z3).unwrap();
        assert!(z6.is_homomorphism(&z2z3, &m));
        assert!(isomorphic(&FiniteGroup::dihedral(3), &FiniteGroup::symmetric(3)));
        assert!(!isomorphic(&FiniteGroup::dihedral(4), &FiniteGroup::quaternion()));
        assert!(!isomorphic(&FiniteGroup::cyclic(6), &FiniteGroup::symmetric(3)));
        let a5 = FiniteGroup::alternating(5);
        assert!(isomorphic(&a5, &a5));
        assert!(find_monomorphism(&FiniteGroup::cyclic(2), &FiniteGroup::symmetric(3)).is_some());
        assert!(find_monomorphism(&FiniteGroup::cyclic(4), &FiniteGroup::builtin("Z2xZ4").unwrap()).is_some());
        assert!(find_monomorphism(&FiniteGroup::cyclic(4), &FiniteGroup::builtin("Z2xZ2xZ2").unwrap()).is_none());
    }

    #[test]
    fn complete_cayley_graphs() {
        let g = CayleyGraph::complete(&FiniteGroup::cyclic(2));
        assert_eq!((g.vertices.len(), g.edges.len(), g.labels.len()), (2, 2, 1));
        let g = CayleyGraph::complete(&FiniteGroup::trivial());
        assert_eq!((g.vertices.len(), g.edges.len()), (1, 0));
        assert_eq!(g.decorated_automorphisms().order(), 1);
        let g = CayleyGraph::complete(&FiniteGroup::cyclic(3));
        assert_eq!((g.vertices.len(), g.edges.len(), g.labels.len()), (3, 6, 2));
        assert!((0..2).all(|l| g.edges_with_label(l) == 3));
        assert_eq!(g.decorated_automorphisms().order(), 3);
        assert_eq!(g.undecorated_automorphism_count(), 6);
    }

    #[test]
    fn generating_set_cayley_graph() {
        let z6 = FiniteGroup::cyclic(6);
        let g = CayleyGraph::with_generators(&z6, &[1]);
        assert_eq!(g.edges.len(), 6);
        assert_eq!(g.decorated_automorphisms().order(), 6);
        let s3 = FiniteGroup::symmetric(3);
        let gens = s3.generators();
        let aut = CayleyGraph::with_generators(&s3, &gens).decorated_automorphisms();
        assert!(isomorphic(&aut, &s3));
    }

    #[test]
    fn decorated_automorphisms_of_unlabelled_constraints() {
        // A graph without the one-edge-per-label structure still works.
        let graph = CayleyGraph {
            vertices: vec!["a".into(), "b".into(), "c".into()],
            labels: vec!["x".into()],
            edges: vec![
                CayleyEdge { source: 0, target: 1, label: 0 },
                CayleyEdge { source: 0, target: 2, label: 0 },
            ],
        };
        assert_eq!(graph.decorated_automorphism_maps(), vec![vec![0, 1, 2], vec![0, 2, 1]]);
    }

    #[test]
    fn csv_and_json() {
        let s3 = FiniteGroup::symmetric(3);
        let csv = s3.to_csv();
        assert_eq!(FiniteGroup::from_csv(&csv).unwrap(), s3);
        let z2 = FiniteGroup::from_csv("e,a\n0,1\n1,0\n").unwrap();
        assert_eq!(z2.names(), ["e", "a"]);
        let labelled = FiniteGroup::from_csv(",e,a\ne,e,a\na,a,e\n").unwrap();
        assert_eq!(labelled, z2);
        assert!(matches!(
            FiniteGroup::from_csv("e,a\ne,b\na,e\n"),
            Err(GroupError::UnknownElement(_))
        ));
        assert!(FiniteGroup::from_csv(",e,a\na,e,a\ne,a,e\n").is_err());
        let json = s3.to_json();
        assert_eq!(FiniteGroup::from_json(&json).unwrap(), s3);
        assert!(FiniteGroup::from_json(r#"{"names":["a","b"],"table":[[0,1],[1,1]]}"#).is_err());
        assert!(FiniteGroup::from_json(r#"{"names":["a","a"],"table":[[0,1],[1,0]]}"#).is_err());
    }

    #[test]
    fn vc_groups() {
        let z = VcGroup::integers();
        assert_eq!(z.ball(3).len(), 7);
        assert_eq!(z.generators().len(), 2);
        let dinf = VcGroup::infinite_dihedral();
        let s = VcElement { shift: 0, finite: 1 };
        let t = VcElement { shift: 1, finite: 0 };
        // s t s = t^-1
        assert_eq!(dinf.mul(dinf.mul(s, t), s), dinf.inv(t));
        let zz2 = VcGroup::builtin("ZxZ2").unwrap();
        assert_eq!(zz2.ball(1).len(), 4);
        // Z ⋊ Z3 with inversion on Z3.
        let z3 = FiniteGroup::cyclic(3);
        let twisted = VcGroup::new(
            VcKind::FiniteByZ { finite: z3, automorphism: vec![0, 2, 1] },
            true,
        )
        .unwrap();
        let a = VcElement { shift: 1, finite: 1 };
        let b = VcElement { shift: -2, finite: 2 };
        assert_eq!(twisted.mul(a, twisted.inv(a)), twisted.identity());
        assert_eq!(twisted.mul(twisted.inv(b), b), twisted.identity());
        assert_ne!(twisted.mul(a, b), twisted.mul(b, a));
        assert!(VcGroup::new(
            VcKind::FiniteByZ { finite: FiniteGroup::cyclic(3), automorphism: vec![0, 0, 1] },
            true
        )
        .is_err());
        let json = serde_json::to_string(&twisted).unwrap();
        assert_eq!(VcGroup::from_json(&json).unwrap(), twisted);
        let asym = VcGroup::integers().with_generators(vec![t]);
        assert!(asym.is_err());
    }

    proptest! {
        #[test]
        fn vc_group_axioms(
            shifts in prop::collection::vec(-4i64..5, 3),
            fins in prop::collection::vec(0usize..6, 3),
            which in 0usize..3,
        ) {
            let g = match which {
                0 => VcGroup::infinite_dihedral(),
                1 => VcGroup::new(
                    VcKind::FiniteByZ { finite: FiniteGroup::symmetric(3), automorphism: {
                        // conjugation by a transposition
                        let s3 = FiniteGroup::symmetric(3);
                        let t = s3.index_of("(1 2)").unwrap();
                        s3.elements().map(|x| s3.mul(s3.mul(t, x), s3.inv(t))).collect()
                    }},
                    true,
                ).unwrap(),
                _ => VcGroup::product_with_z(FiniteGroup::cyclic(6)),
            };
            let bound = if which == 0 { 2 } else { 6 };
            let e: Vec<VcElement> = shifts.iter().zip(&fins)
                .map(|(&shift, &f)| VcElement { shift, finite: f % bound })
                .collect();
            let (a, b, c) = (e[0], e[1], e[2]);
            prop_assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
            prop_assert_eq!(g.mul(a, g.inv(a)), g.identity());
            prop_assert_eq!(g.mul(g.identity(), a), a);
        }

        #[test]
        fn isomorphism_is_invariant_under_relabelling(idx in 0usize..14, seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let (_, g) = small_groups().swap_remove(idx);
            let n = g.order();
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let mut table = vec![vec![0; n]; n];
            for a in 0..n {
                for b in 0..n {
                    table[perm[a]][perm[b]] = perm[g.mul(a, b)];
                }
            }
            let h = FiniteGroup::from_table(table).unwrap();
            prop_assert!(isomorphic(&g, &h));
        }
    }

    #[test]
    fn rigidity_of_complete_cayley_graphs() {
        for (name, g) in small_groups() {
            let aut = CayleyGraph::complete(&g).decorated_automorphisms();
            assert!(isomorphic(&aut, &g), "{name}");
        }
    }

    #[test]
    fn pairwise_isomorphism_classes() {
        let groups = small_groups();
        for (i, (n1, g1)) in groups.iter().enumerate() {
            for (j, (n2, g2)) in groups.iter().enumerate() {
                let expected = i == j;
                assert_eq!(isomorphic(g1, g2), expected, "{n1} vs {n2}");
            }
        }
    }
}
