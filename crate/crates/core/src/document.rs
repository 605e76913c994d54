//! Plain-text input documents.
//!
//! ```text
//! # comment
//! kind lattice            lattice | rootsystem | torus-marking | two-adic | subgroup
//! name SU(2)              optional
//! rank 1
//! precision 16            optional, two-adic only
//! generator               followed by `rank` rows
//! -1
//! marking                 followed by a `b` line and a `beta` line
//! b 1
//! beta -2
//! ```
//!
//! Root systems list `root <vector> coroot <covector>` lines. Torus markings use a `torus`
//! block: `rank` rows of the reflection, then `h <fractions>`. Two-adic documents may list
//! `block di4` or `block catalog <name>` lines instead of generators, and `doubled` blocks
//! (a reflection's rows) choosing the `2b₀` marking on its class. Subgroup documents add
//! `subgroup-generator` blocks.

use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::catalog::build_entry;
use crate::lattice::{generate_group, IntMatrix, Reflection, StrictMarking, DEFAULT_CAP};
use crate::rootdata::{lattice_to_torus, torus_to_lattice, MarkedReflectionLattice, MarkedReflectionTorus, Root, RootSystem, TorusElement};
use crate::twoadic::{self, CompleteMarkedLattice, TwoAdicMatrix};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DocumentKind {
    Lattice,
    RootSystem,
    TorusMarking,
    TwoAdic,
    Subgroup,
}

impl DocumentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DocumentKind::Lattice => "lattice",
            DocumentKind::RootSystem => "rootsystem",
            DocumentKind::TorusMarking => "torus-marking",
            DocumentKind::TwoAdic => "two-adic",
            DocumentKind::Subgroup => "subgroup",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "lattice" => DocumentKind::Lattice,
            "rootsystem" => DocumentKind::RootSystem,
            "torus-marking" => DocumentKind::TorusMarking,
            "two-adic" => DocumentKind::TwoAdic,
            "subgroup" => DocumentKind::Subgroup,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block {
    Di4,
    Catalog(String),
}

pub type Rows = Vec<Vec<BigInt>>;

#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub kind: DocumentKind,
    pub name: Option<String>,
    pub rank: usize,
    pub precision: Option<u32>,
    pub generators: Vec<Rows>,
    pub markings: Vec<StrictMarking>,
    pub roots: Vec<Root>,
    pub torus_markings: Vec<(Rows, TorusElement)>,
    pub blocks: Vec<Block>,
    pub doubled: Vec<Rows>,
    pub subgroup_generators: Vec<Rows>,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<(usize, &'a str)>,
}

fn tokenize(number: usize, raw: &str) -> Line<'_> {
    let content = raw.split('#').next().unwrap_or("");
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, ch) in content.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push((s, &content[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push((s, &content[s..]));
    }
    let tokens = tokens.into_iter().map(|(s, t)| (content[..s].chars().count() + 1, t)).collect();
    Line { number, tokens }
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn parse_int(line: usize, (col, tok): (usize, &str)) -> Result<BigInt> {
    tok.parse::<BigInt>().map_err(|_| perr(line, col, format!("expected an integer, found `{tok}`")))
}

fn parse_frac(line: usize, (col, tok): (usize, &str)) -> Result<BigRational> {
    let bad = || perr(line, col, format!("expected a fraction, found `{tok}`"));
    match tok.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(perr(line, col, "zero denominator"));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(tok.parse().map_err(|_| bad())?)),
    }
}

struct Parser<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
    last_line: usize,
}

impl<'a> Parser<'a> {
    fn next(&mut self) -> Option<&Line<'a>> {
        let l = self.lines.get(self.pos);
        self.pos += 1;
        l
    }

    fn vector(line: &Line<'a>, tokens: &[(usize, &'a str)], rank: usize) -> Result<Vec<BigInt>> {
        if tokens.len() != rank {
            let col = tokens.get(rank).or(tokens.last()).map_or(1, |t| t.0);
            return Err(perr(line.number, col, format!("expected {rank} entries, found {}", tokens.len())));
        }
        tokens.iter().map(|&t| parse_int(line.number, t)).collect()
    }

    fn rows(&mut self, rank: usize, what: &str) -> Result<Rows> {
        let mut rows = Vec::with_capacity(rank);
        for _ in 0..rank {
            let last = self.last_line;
            let line = match self.lines.get(self.pos) {
                Some(l) => l,
                None => return Err(perr(last + 1, 1, format!("unexpected end of file inside {what}"))),
            };
            self.pos += 1;
            let v = Self::vector(line, &line.tokens, rank)?;
            rows.push(v);
        }
        Ok(rows)
    }
}

impl Document {
    pub fn new(kind: DocumentKind, rank: usize) -> Self {
        Document {
            kind,
            name: None,
            rank,
            precision: None,
            generators: Vec::new(),
            markings: Vec::new(),
            roots: Vec::new(),
            torus_markings: Vec::new(),
            blocks: Vec::new(),
            doubled: Vec::new(),
            subgroup_generators: Vec::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let all: Vec<Line> = text.lines().enumerate().map(|(i, l)| tokenize(i + 1, l)).collect();
        let last_line = text.lines().count();
        let lines: Vec<Line> = all.into_iter().filter(|l| !l.tokens.is_empty()).collect();
        let mut p = Parser { lines, pos: 0, last_line };
        let mut kind = None;
        let mut name = None;
        let mut rank: Option<usize> = None;
        let mut precision = None;
        let mut doc_items: Vec<(usize, String, Vec<Rows>, Option<StrictMarking>)> = Vec::new();
        let mut roots = Vec::new();
        let mut torus_markings = Vec::new();
        let mut blocks = Vec::new();
        let need_rank = |rank: Option<usize>, line: usize, col: usize| rank.ok_or_else(|| perr(line, col, "`rank` must come first"));
        while let Some(line) = p.next() {
            let number = line.number;
            let (col, head) = line.tokens[0];
            let rest: Vec<(usize, &str)> = line.tokens[1..].to_vec();
            match head {
                "kind" => {
                    let (c, t) = *rest.first().ok_or_else(|| perr(number, col, "missing kind"))?;
                    kind = Some(DocumentKind::parse(t).ok_or_else(|| perr(number, c, format!("unknown kind `{t}`")))?);
                }
                "name" => {
                    name = Some(rest.iter().map(|t| t.1).collect::<Vec<_>>().join(" "));
                }
                "rank" => {
                    let (c, t) = *rest.first().ok_or_else(|| perr(number, col, "missing rank"))?;
                    rank = Some(t.parse().map_err(|_| perr(number, c, format!("bad rank `{t}`")))?);
                }
                "precision" => {
                    let (c, t) = *rest.first().ok_or_else(|| perr(number, col, "missing precision"))?;
                    let k: u32 = t.parse().map_err(|_| perr(number, c, format!("bad precision `{t}`")))?;
                    if !(2..=62).contains(&k) {
                        return Err(perr(number, c, "precision must lie in 2..=62"));
                    }
                    precision = Some(k);
                }
                "generator" | "doubled" | "subgroup-generator" => {
                    let r = need_rank(rank, number, col)?;
                    let rows = p.rows(r, head)?;
                    doc_items.push((number, head.to_string(), vec![rows], None));
                }
                "marking" => {
                    let r = need_rank(rank, number, col)?;
                    let mut b = None;
                    let mut beta = None;
                    for _ in 0..2 {
                        let last = p.last_line;
                        let l = p.next().ok_or_else(|| perr(last + 1, 1, "unexpected end of file inside marking"))?;
                        let (c, label) = l.tokens[0];
                        let v = Parser::vector(l, &l.tokens[1..], r)?;
                        match label {
                            "b" => b = Some(v),
                            "beta" => beta = Some(v),
                            other => return Err(perr(l.number, c, format!("expected `b` or `beta`, found `{other}`"))),
                        }
                    }
                    let (b, beta) = b.zip(beta).ok_or_else(|| perr(number, col, "marking needs one `b` and one `beta` line"))?;
                    doc_items.push((number, head.to_string(), Vec::new(), Some(StrictMarking { b, beta })));
                }
                "root" => {
                    let r = need_rank(rank, number, col)?;
                    let split = rest
                        .iter()
                        .position(|t| t.1 == "coroot")
                        .ok_or_else(|| perr(number, col, "root line needs `coroot`"))?;
                    let vector = Parser::vector(line, &rest[..split], r)?;
                    let coroot = Parser::vector(line, &rest[split + 1..], r)?;
                    roots.push(Root { vector, coroot });
                }
                "torus" => {
                    let r = need_rank(rank, number, col)?;
                    let rows = p.rows(r, "torus")?;
                    let last = p.last_line;
                    let l = p.next().ok_or_else(|| perr(last + 1, 1, "unexpected end of file inside torus"))?;
                    let (c, label) = l.tokens[0];
                    if label != "h" {
                        return Err(perr(l.number, c, format!("expected `h`, found `{label}`")));
                    }
                    if l.tokens.len() != r + 1 {
                        return Err(perr(l.number, c, format!("expected {r} coordinates")));
                    }
                    let coords = l.tokens[1..].iter().map(|&t| parse_frac(l.number, t)).collect::<Result<Vec<_>>>()?;
                    torus_markings.push((rows, TorusElement::new(coords)));
                }
                "block" => {
                    let (c, t) = *rest.first().ok_or_else(|| perr(number, col, "missing block kind"))?;
                    match t {
                        "di4" => blocks.push(Block::Di4),
                        "catalog" => {
                            let name = rest[1..].iter().map(|t| t.1).collect::<Vec<_>>().join(" ");
                            if name.is_empty() {
                                return Err(perr(number, c, "missing catalog name"));
                            }
                            blocks.push(Block::Catalog(name));
                        }
                        other => return Err(perr(number, c, format!("unknown block `{other}`"))),
                    }
                }
                other => return Err(perr(number, col, format!("unknown keyword `{other}`"))),
            }
        }
        let kind = kind.ok_or_else(|| perr(1, 1, "missing `kind` line"))?;
        let rank = match rank {
            Some(r) => r,
            None if !blocks.is_empty() => 0,
            None => return Err(perr(last_line.max(1), 1, "missing `rank` line")),
        };
        let mut doc = Document::new(kind, rank);
        doc.name = name;
        doc.precision = precision;
        doc.roots = roots;
        doc.torus_markings = torus_markings;
        doc.blocks = blocks;
        for (_, head, mut rows, marking) in doc_items {
            match head.as_str() {
                "generator" => doc.generators.append(&mut rows),
                "doubled" => doc.doubled.append(&mut rows),
                "subgroup-generator" => doc.subgroup_generators.append(&mut rows),
                "marking" => doc.markings.extend(marking),
                _ => unreachable!(),
            }
        }
        Ok(doc)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "kind {}", self.kind.as_str());
        if let Some(n) = &self.name {
            let _ = writeln!(out, "name {n}");
        }
        let _ = writeln!(out, "rank {}", self.rank);
        if let Some(k) = self.precision {
            let _ = writeln!(out, "precision {k}");
        }
        let join = |v: &[BigInt]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let matrix = |out: &mut String, head: &str, rows: &Rows| {
            let _ = writeln!(out, "{head}");
            for r in rows {
                let _ = writeln!(out, "{}", join(r));
            }
        };
        for b in &self.blocks {
            match b {
                Block::Di4 => out.push_str("block di4\n"),
                Block::Catalog(n) => {
                    let _ = writeln!(out, "block catalog {n}");
                }
            }
        }
        for g in &self.generators {
            matrix(&mut out, "generator", g);
        }
        for m in &self.markings {
            let _ = writeln!(out, "marking\nb {}\nbeta {}", join(&m.b), join(&m.beta));
        }
        for r in &self.roots {
            let _ = writeln!(out, "root {} coroot {}", join(&r.vector), join(&r.coroot));
        }
        for (rows, h) in &self.torus_markings {
            matrix(&mut out, "torus", rows);
            let coords: Vec<String> = h.coords().iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "h {}", coords.join(" "));
        }
        for d in &self.doubled {
            matrix(&mut out, "doubled", d);
        }
        for s in &self.subgroup_generators {
            matrix(&mut out, "subgroup-generator", s);
        }
        out
    }

    fn int_matrices(&self, rows: &[Rows]) -> Result<Vec<IntMatrix>> {
        rows.iter().map(|r| IntMatrix::from_rows(r)).collect()
    }

    fn expect_kind(&self, kinds: &[DocumentKind]) -> Result<()> {
        if kinds.contains(&self.kind) {
            Ok(())
        } else {
            Err(Error::Parse { line: 1, column: 6, message: format!("a {} document cannot be used here", self.kind.as_str()) })
        }
    }

    /// The marked lattice: generated group, given markings propagated, `b₀` elsewhere.
    pub fn to_lattice(&self) -> Result<MarkedReflectionLattice> {
        match self.kind {
            DocumentKind::RootSystem => crate::rootdata::rootsystem_to_lattice(&self.to_rootsystem()?),
            DocumentKind::TorusMarking => torus_to_lattice(&self.to_torus()?),
            DocumentKind::Lattice | DocumentKind::Subgroup => {
                let group = Arc::new(generate_group(self.rank, &self.int_matrices(&self.generators)?, DEFAULT_CAP)?);
                MarkedReflectionLattice::from_markings(group, &self.markings)
            }
            DocumentKind::TwoAdic => Err(Error::Parse { line: 1, column: 6, message: "two-adic documents have no integral lattice".into() }),
        }
    }

    pub fn to_rootsystem(&self) -> Result<RootSystem> {
        match self.kind {
            DocumentKind::RootSystem => RootSystem::new(self.rank, self.roots.clone()),
            _ => Ok(crate::rootdata::lattice_to_rootsystem(&self.to_lattice()?)),
        }
    }

    pub fn to_torus(&self) -> Result<MarkedReflectionTorus> {
        if self.kind != DocumentKind::TorusMarking {
            return Ok(lattice_to_torus(&self.to_lattice()?));
        }
        let group = Arc::new(generate_group(self.rank, &self.int_matrices(&self.generators)?, DEFAULT_CAP)?);
        // Given torus markings become lattice markings, which propagate by conjugation.
        let two = BigInt::from(2);
        let mut given = Vec::new();
        for (rows, h) in &self.torus_markings {
            let sigma = Reflection::new(IntMatrix::from_rows(rows)?)?;
            let b0 = sigma.root_generator();
            let b: Vec<BigInt> = if *h == TorusElement::from_numerators(&b0, &two) {
                b0
            } else if h.is_zero() {
                b0.iter().map(|x| x * 2).collect()
            } else {
                return Err(Error::InvalidMarking(format!("{h} is not a torus marking of {}", sigma.matrix)));
            };
            let beta = sigma.coroot_for(&b).ok_or_else(|| Error::InvalidMarking(format!("{h} is not a torus marking of {}", sigma.matrix)))?;
            given.push(StrictMarking { b, beta });
        }
        let lattice = MarkedReflectionLattice::from_markings(group, &given)?;
        let torus = lattice_to_torus(&lattice);
        MarkedReflectionTorus::new(torus.group, torus.markings)
    }

    /// The complete lattice at the document precision (or `k` when given).
    pub fn to_complete(&self, k: Option<u32>) -> Result<CompleteMarkedLattice> {
        let k = k.or(self.precision).unwrap_or(twoadic::DEFAULT_PRECISION);
        if self.kind != DocumentKind::TwoAdic {
            return twoadic::promote(&self.to_lattice()?, k);
        }
        let mut parts = Vec::new();
        for b in &self.blocks {
            parts.push(match b {
                Block::Di4 => twoadic::di4_data(k)?.lattice()?,
                Block::Catalog(name) => twoadic::promote(&build_entry(name)?.lattice, k)?,
            });
        }
        if !self.generators.is_empty() || parts.is_empty() {
            let gens = self
                .generators
                .iter()
                .map(|rows| {
                    let small: Vec<Vec<i64>> = rows
                        .iter()
                        .map(|r| r.iter().map(|x| x.to_i64().ok_or(Error::Overflow)).collect::<Result<_>>())
                        .collect::<Result<_>>()?;
                    TwoAdicMatrix::from_rows(&small, k)
                })
                .collect::<Result<Vec<_>>>()?;
            let doubled = self
                .doubled
                .iter()
                .map(|rows| {
                    let small: Vec<Vec<i64>> = rows
                        .iter()
                        .map(|r| r.iter().map(|x| x.to_i64().ok_or(Error::Overflow)).collect::<Result<_>>())
                        .collect::<Result<_>>()?;
                    TwoAdicMatrix::from_rows(&small, k)
                })
                .collect::<Result<Vec<_>>>()?;
            let group = Arc::new(crate::lattice::MatrixGroup::generate(TwoAdicMatrix::identity(self.rank, k), &gens, 200_000)?);
            let t = group.table().clone();
            let doubled_idx: Vec<usize> =
                doubled.iter().map(|m| group.index_of(m).ok_or(Error::NotInGroup)).collect::<Result<_>>()?;
            let classes: Vec<usize> = doubled_idx.iter().flat_map(|&d| t.conjugacy_class(d)).collect();
            parts.push(CompleteMarkedLattice::new(group, |e, _| classes.contains(&e))?);
        }
        let out = if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            CompleteMarkedLattice::block_sum(&parts.iter().collect::<Vec<_>>())?
        };
        if self.rank != 0 && out.rank() != self.rank {
            return Err(Error::DimensionMismatch { expected: self.rank, found: out.rank() });
        }
        Ok(out)
    }

    /// Element indices in the lattice group of the subgroup generators.
    pub fn subgroup_indices(&self, lattice: &MarkedReflectionLattice) -> Result<Vec<usize>> {
        self.expect_kind(&[DocumentKind::Subgroup])?;
        self.int_matrices(&self.subgroup_generators)?
            .iter()
            .map(|m| lattice.group.index_of(m).ok_or(Error::NotInGroup))
            .collect()
    }

    /// Export a marked lattice with its group generators and one marking per reflection class.
    pub fn from_lattice(name: Option<&str>, m: &MarkedReflectionLattice) -> Self {
        let mut doc = Document::new(DocumentKind::Lattice, m.rank());
        doc.name = name.map(str::to_string);
        doc.generators = m.group.generators().iter().map(|&g| m.group.element(g).rows()).collect();
        let classes = crate::lattice::reflection_classes(&m.group, &m.reflections).unwrap_or_default();
        for class in classes {
            if let Some(mk) = m.marking_of(class[0]) {
                doc.markings.push(mk.clone());
            }
        }
        doc
    }

    pub fn from_rootsystem(name: Option<&str>, rs: &RootSystem) -> Self {
        let mut doc = Document::new(DocumentKind::RootSystem, rs.rank);
        doc.name = name.map(str::to_string);
        doc.roots = rs.roots.clone();
        doc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_round_trip() {
        for name in ["SU(2)", "SO(3)", "U(2)", "Spin(5)", "G2"] {
            let e = build_entry(name).unwrap();
            let doc = Document::from_lattice(Some(name), &e.lattice);
            let text = doc.render();
            let back = Document::parse(&text).unwrap();
            assert_eq!(back, doc);
            assert_eq!(back.to_lattice().unwrap(), e.lattice, "{name}");
        }
    }

    #[test]
    fn rootsystem_and_torus() {
        let e = build_entry("SO(3)").unwrap();
        let rs = crate::rootdata::lattice_to_rootsystem(&e.lattice);
        let doc = Document::from_rootsystem(None, &rs);
        assert_eq!(Document::parse(&doc.render()).unwrap().to_lattice().unwrap(), e.lattice);
        let text = "kind torus-marking\nrank 1\ngenerator\n-1\ntorus\n-1\nh 0\n";
        let t = Document::parse(text).unwrap().to_torus().unwrap();
        assert_eq!(torus_to_lattice(&t).unwrap(), e.lattice);
    }

    #[test]
    fn parse_errors() {
        let err = Document::parse("kind lattice\nrank 2\ngenerator\n1 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 5, column: 1, .. }), "{err}");
        let err = Document::parse("kind lattice\nrank 2\ngenerator\n1 x\n0 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, column: 3, .. }), "{err}");
        let err = Document::parse("kind nonsense\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, column: 6, .. }), "{err}");
        let err = Document::parse("kind lattice\nrank 1\nwat\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, column: 1, .. }), "{err}");
    }

    #[test]
    fn two_adic_blocks() {
        let doc = Document::parse("kind two-adic\nprecision 12\nblock di4\nblock catalog Spin(5)\n").unwrap();
        let c = doc.to_complete(None).unwrap();
        assert_eq!((c.rank(), c.group.order()), (5, 336 * 8));
        let empty = Document::parse("kind two-adic\nrank 0\n").unwrap().to_complete(None).unwrap();
        assert_eq!(empty.rank(), 0);
    }
}
