//! Graphviz export of gluing complexes, and a small parser for the DOT
//! language used to check the export.

use std::fmt::Write;

use thiserror::Error;

use crate::synth::{GluingComplex, Owner, PieceKind};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Pieces in index order as nodes, pairings in recorded order as edges
/// labelled with the glued length.
pub fn to_dot(c: &GluingComplex) -> String {
    let mut out = String::new();
    writeln!(out, "graph complex {{").unwrap();
    writeln!(out, "  graph [seed={}];", quote(&c.seed.to_string())).unwrap();
    for p in &c.pieces {
        let shape = match p.kind {
            PieceKind::Vertex => "box",
            PieceKind::Edge => "ellipse",
        };
        let label = match &p.owner {
            Owner::Vertex { element } => format!("{} {element}", p.id),
            Owner::Edge { element, label, index, .. } => format!("{} E({element},{label},{index})", p.id),
        };
        writeln!(out, "  {} [shape={shape}, label={}];", quote(&p.id), quote(&label)).unwrap();
    }
    for pr in &c.pairings {
        let a = &c.pieces[pr.a.piece];
        let b = &c.pieces[pr.b.piece];
        let port = &a.ports[pr.a.port];
        writeln!(
            out,
            "  {} -- {} [label={}];",
            quote(&a.id),
            quote(&b.id),
            quote(&format!("{} {}", port.name, port.length))
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("DOT parse error at byte {offset}: {message}")]
pub struct DotError {
    pub offset: usize,
    pub message: String,
}

pub type Attrs = Vec<(String, String)>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DotGraph {
    pub strict: bool,
    pub directed: bool,
    pub name: Option<String>,
    pub nodes: Vec<(String, Attrs)>,
    pub edges: Vec<(String, String, Attrs)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Id(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eq,
    Semi,
    Comma,
    Colon,
    Edge(bool),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, DotError> {
    let bytes = src.as_bytes();
    let err = |offset, message: &str| DotError {
        offset,
        message: message.to_string(),
    };
    let mut out = Vec::new();
    let mut i = 0;
    let mut line_start = true;
    while i < bytes.len() {
        let b = bytes[i];
        if b == b'\n' {
            line_start = true;
            i += 1;
            continue;
        }
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if b == b'#' && line_start {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        line_start = false;
        let start = i;
        if src[i..].starts_with("//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if src[i..].starts_with("/*") {
            let end = src[i + 2..].find("*/").ok_or_else(|| err(i, "unterminated comment"))?;
            i += end + 4;
            continue;
        }
        let simple = match b {
            b'{' => Some(Tok::LBrace),
            b'}' => Some(Tok::RBrace),
            b'[' => Some(Tok::LBracket),
            b']' => Some(Tok::RBracket),
            b'=' => Some(Tok::Eq),
            b';' => Some(Tok::Semi),
            b',' => Some(Tok::Comma),
            b':' => Some(Tok::Colon),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((start, t));
            i += 1;
            continue;
        }
        if src[i..].starts_with("--") || src[i..].starts_with("->") {
            out.push((start, Tok::Edge(bytes[i + 1] == b'>')));
            i += 2;
            continue;
        }
        if b == b'"' {
            let mut s = String::new();
            i += 1;
            loop {
                let Some(ch) = src[i..].chars().next() else {
                    return Err(err(start, "unterminated string"));
                };
                i += ch.len_utf8();
                match ch {
                    '"' => break,
                    '\\' => {
                        let Some(next) = src[i..].chars().next() else {
                            return Err(err(start, "unterminated string"));
                        };
                        i += next.len_utf8();
                        match next {
                            '"' => s.push('"'),
                            '\\' => s.push('\\'),
                            'n' => s.push('\n'),
                            '\n' => {}
                            other => {
                                s.push('\\');
                                s.push(other);
                            }
                        }
                    }
                    c => s.push(c),
                }
            }
            out.push((start, Tok::Id(s)));
            continue;
        }
        if b == b'<' {
            // HTML strings nest angle brackets.
            let mut depth = 0usize;
            while i < bytes.len() {
                match bytes[i] {
                    b'<' => depth += 1,
                    b'>' => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    _ => {}
                }
                i += 1;
            }
            if i >= bytes.len() {
                return Err(err(start, "unterminated HTML string"));
            }
            i += 1;
            out.push((start, Tok::Id(src[start + 1..i - 1].to_string())));
            continue;
        }
        let is_word = |c: char| c.is_alphanumeric() || c == '_' || (c as u32) >= 0x80;
        let first = src[i..].chars().next().expect("in bounds");
        if first == '-' || first == '.' || first.is_ascii_digit() {
            let mut j = i + 1;
            while j < bytes.len() && (bytes[j].is_ascii_digit() || bytes[j] == b'.') {
                j += 1;
            }
            let text = &src[i..j];
            let valid = text.matches('.').count() <= 1 && text.trim_start_matches('-').chars().any(|c| c.is_ascii_digit());
            if !valid {
                return Err(err(start, "malformed numeral"));
            }
            out.push((start, Tok::Id(text.to_string())));
            i = j;
            continue;
        }
        if is_word(first) && !first.is_ascii_digit() {
            let mut j = i;
            while let Some(c) = src[j..].chars().next() {
                if !is_word(c) {
                    break;
                }
                j += c.len_utf8();
            }
            out.push((start, Tok::Id(src[i..j].to_string())));
            i = j;
            continue;
        }
        return Err(err(start, &format!("unexpected character {first:?}")));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    graph: DotGraph,
    depth: usize,
}

const MAX_SUBGRAPH_DEPTH: usize = 64;

fn keyword(t: &Tok, word: &str) -> bool {
    matches!(t, Tok::Id(s) if s.eq_ignore_ascii_case(word))
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn fail<T>(&self, message: &str) -> Result<T, DotError> {
        Err(DotError {
            offset: self.toks.get(self.pos).map_or(self.end, |(o, _)| *o),
            message: message.to_string(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), DotError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(&format!("expected {what}"))
        }
    }

    fn id(&mut self) -> Result<String, DotError> {
        match self.peek() {
            Some(Tok::Id(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail("expected an identifier"),
        }
    }

    fn graph(&mut self) -> Result<(), DotError> {
        if self.peek().is_some_and(|t| keyword(t, "strict")) {
            self.graph.strict = true;
            self.pos += 1;
        }
        match self.peek() {
            Some(t) if keyword(t, "graph") => self.graph.directed = false,
            Some(t) if keyword(t, "digraph") => self.graph.directed = true,
            _ => return self.fail("expected graph or digraph"),
        }
        self.pos += 1;
        if let Some(Tok::Id(_)) = self.peek() {
            self.graph.name = Some(self.id()?);
        }
        self.expect(Tok::LBrace, "{")?;
        self.stmt_list()?;
        self.expect(Tok::RBrace, "}")?;
        if self.pos != self.toks.len() {
            return self.fail("trailing input after graph");
        }
        Ok(())
    }

    fn stmt_list(&mut self) -> Result<(), DotError> {
        while !matches!(self.peek(), Some(Tok::RBrace) | None) {
            self.stmt()?;
            if self.peek() == Some(&Tok::Semi) {
                self.pos += 1;
            }
        }
        Ok(())
    }

    fn attr_list(&mut self) -> Result<Attrs, DotError> {
        let mut attrs = Vec::new();
        while self.peek() == Some(&Tok::LBracket) {
            self.pos += 1;
            while self.peek() != Some(&Tok::RBracket) {
                let k = self.id()?;
                self.expect(Tok::Eq, "=")?;
                let v = self.id()?;
                attrs.push((k, v));
                if matches!(self.peek(), Some(Tok::Comma | Tok::Semi)) {
                    self.pos += 1;
                }
            }
            self.pos += 1;
        }
        Ok(attrs)
    }

    fn subgraph(&mut self) -> Result<(), DotError> {
        if self.peek().is_some_and(|t| keyword(t, "subgraph")) {
            self.pos += 1;
            if let Some(Tok::Id(_)) = self.peek() {
                self.pos += 1;
            }
        }
        self.depth += 1;
        if self.depth > MAX_SUBGRAPH_DEPTH {
            return self.fail("subgraphs nested too deeply");
        }
        self.expect(Tok::LBrace, "{")?;
        self.stmt_list()?;
        self.expect(Tok::RBrace, "}")?;
        self.depth -= 1;
        Ok(())
    }

    fn node_id(&mut self) -> Result<String, DotError> {
        let id = self.id()?;
        // Ports are accepted and dropped.
        for _ in 0..2 {
            if self.peek() == Some(&Tok::Colon) {
                self.pos += 1;
                self.id()?;
            }
        }
        Ok(id)
    }

    fn stmt(&mut self) -> Result<(), DotError> {
        let Some(t) = self.peek().cloned() else {
            return self.fail("unexpected end of input");
        };
        if ["graph", "node", "edge"].iter().any(|w| keyword(&t, w)) {
            self.pos += 1;
            self.attr_list()?;
            return Ok(());
        }
        if keyword(&t, "subgraph") || t == Tok::LBrace {
            return self.subgraph();
        }
        let first = self.node_id()?;
        if self.peek() == Some(&Tok::Eq) {
            self.pos += 1;
            self.id()?;
            return Ok(());
        }
        let mut chain = vec![first];
        while let Some(Tok::Edge(directed)) = self.peek().cloned() {
            if directed != self.graph.directed {
                return self.fail("edge operator does not match graph kind");
            }
            self.pos += 1;
            chain.push(self.node_id()?);
        }
        let attrs = self.attr_list()?;
        if chain.len() == 1 {
            self.graph.nodes.push((chain.pop().expect("one node"), attrs));
        } else {
            for w in chain.windows(2) {
                self.graph.edges.push((w[0].clone(), w[1].clone(), attrs.clone()));
            }
        }
        Ok(())
    }
}

/// Parses one graph. Subgraph statements are accepted and flattened.
pub fn parse_dot(src: &str) -> Result<DotGraph, DotError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        end: src.len(),
        graph: DotGraph::default(),
        depth: 0,
    };
    p.graph()?;
    Ok(p.graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endspace::EndSpace;
    use crate::grouptable::FiniteGroup;
    use crate::synth::build_x_finite;

    #[test]
    fn export_round_trips_through_parser() {
        let c = build_x_finite(&EndSpace::omega_sum(EndSpace::Singleton), &FiniteGroup::cyclic(2), 2, 7).unwrap();
        let dot = to_dot(&c);
        assert_eq!(dot, to_dot(&c.clone()));
        let g = parse_dot(&dot).unwrap();
        assert!(!g.directed);
        assert_eq!(g.nodes.len(), 6);
        assert_eq!(g.edges.len(), 8);
        let shape = |id: &str| {
            g.nodes
                .iter()
                .find(|(n, _)| n == id)
                .and_then(|(_, a)| a.iter().find(|(k, _)| k == "shape"))
                .map(|(_, v)| v.as_str())
        };
        assert_eq!(shape("v0"), Some("box"));
        assert_eq!(shape("e3"), Some("ellipse"));
        assert!(g.edges.iter().all(|(_, _, a)| a[0].0 == "label"));
    }

    #[test]
    fn grammar_features() {
        let g = parse_dot(
            "/* c */ strict digraph \"G\" {\n# line\n a -> b -> c [color=red; w=1.5]\n subgraph s { x } node [shape=box]\n \"q\\\"\":p:n -> <<b>x</b>>; k = v }",
        )
        .unwrap();
        assert!(g.strict && g.directed);
        assert_eq!(g.name.as_deref(), Some("G"));
        assert_eq!(g.edges.len(), 3);
        assert_eq!(g.edges[2].0, "q\"");
        assert_eq!(g.edges[2].1, "<b>x</b>");
        assert_eq!(g.nodes, vec![("x".to_string(), vec![])]);
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "",
            "graph {",
            "graph { a -> b }",
            "digraph { a -- b }",
            "graph { a [x] }",
            "graph { \"open }",
            "graph {} trailing",
            "graph { a -- }",
            "graph { 1.2.3 }",
            "graph { @ }",
            "graph { /* }",
        ] {
            assert!(parse_dot(bad).is_err(), "{bad:?}");
        }
        let deep = format!("graph {{ {} }}", "{".repeat(100) + &"}".repeat(100));
        assert!(parse_dot(&deep).is_err());
    }
}
