//! Finite relational background structures.
//!
//! A [`Structure`] is loaded once and never mutated afterwards. Learners talk
//! to it only through the two local-access queries, [`Structure::neighbors`]
//! and [`Structure::has_tuple`], both of which bump an atomic counter so a run
//! can report exactly how much of the structure it touched.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use thiserror::Error;

/// Dense element id. Ids follow first appearance in the source document.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(pub u32);

impl Element {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: usize,
}

/// A relational signature: no constants, every arity at least one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    relations: Vec<RelationSymbol>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_relations<I, S>(relations: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut sig = Signature::new();
        for (name, arity) in relations {
            sig.add(name, arity)?;
        }
        Ok(sig)
    }

    pub fn add(&mut self, name: impl Into<String>, arity: usize) -> Result<usize, StructureError> {
        let name = name.into();
        if arity == 0 {
            return Err(StructureError::ZeroArity(name));
        }
        if !is_identifier(&name) {
            return Err(StructureError::BadName(name));
        }
        if self.index_of(&name).is_some() {
            return Err(StructureError::DuplicateRelation(name));
        }
        self.relations.push(RelationSymbol { name, arity });
        Ok(self.relations.len() - 1)
    }

    pub fn relations(&self) -> &[RelationSymbol] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn arity(&self, index: usize) -> usize {
        self.relations[index].arity
    }

    /// Relation indices sorted by relation name; the order used by every
    /// serialized or canonical form.
    pub fn name_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.relations.len()).collect();
        order.sort_by(|&a, &b| self.relations[a].name.cmp(&self.relations[b].name));
        order
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// Snapshot of the local-access counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AccessReceipt {
    pub neighbor_queries: u64,
    pub tuple_queries: u64,
}

impl AccessReceipt {
    pub fn total(&self) -> u64 {
        self.neighbor_queries + self.tuple_queries
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: relation {relation} has arity {expected}, got {found} entries")]
    ArityMismatch {
        line: usize,
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: undeclared relation {relation}")]
    UndeclaredRelation { line: usize, relation: String },
    #[error("unknown relation {0}")]
    UnknownRelation(String),
    #[error("relation {relation} expects {expected} arguments, got {found}")]
    TupleArity {
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("relation {0} declared twice")]
    DuplicateRelation(String),
    #[error("relation {0} must have arity at least 1")]
    ZeroArity(String),
    #[error("invalid name {0:?}")]
    BadName(String),
}

/// Incremental construction of a [`Structure`].
#[derive(Debug, Default)]
pub struct StructureBuilder {
    signature: Signature,
    names: Vec<String>,
    index: HashMap<String, Element>,
    relations: Vec<Vec<Vec<Element>>>,
    seen: Vec<HashSet<Vec<Element>>>,
}

impl StructureBuilder {
    pub fn new(signature: Signature) -> Self {
        let n = signature.len();
        StructureBuilder {
            signature,
            relations: vec![Vec::new(); n],
            seen: vec![HashSet::new(); n],
            ..Default::default()
        }
    }

    /// Interns `name`, returning the existing id when already present.
    pub fn element(&mut self, name: &str) -> Element {
        if let Some(&e) = self.index.get(name) {
            return e;
        }
        let e = Element(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), e);
        e
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn tuple(&mut self, relation: &str, entries: &[&str]) -> Result<(), StructureError> {
        let rel = self
            .signature
            .index_of(relation)
            .ok_or_else(|| StructureError::UnknownRelation(relation.to_string()))?;
        let arity = self.signature.arity(rel);
        if entries.len() != arity {
            return Err(StructureError::TupleArity {
                relation: relation.to_string(),
                expected: arity,
                found: entries.len(),
            });
        }
        let tuple: Vec<Element> = entries.iter().map(|n| self.element(n)).collect();
        self.insert(rel, tuple);
        Ok(())
    }

    /// Adds a tuple over already interned elements.
    pub fn tuple_ids(&mut self, rel: usize, tuple: Vec<Element>) -> Result<(), StructureError> {
        let arity = self.signature.arity(rel);
        if tuple.len() != arity {
            return Err(StructureError::TupleArity {
                relation: self.signature.relations()[rel].name.clone(),
                expected: arity,
                found: tuple.len(),
            });
        }
        if let Some(bad) = tuple.iter().find(|e| e.index() >= self.names.len()) {
            return Err(StructureError::UnknownElement(bad.to_string()));
        }
        self.insert(rel, tuple);
        Ok(())
    }

    fn insert(&mut self, rel: usize, tuple: Vec<Element>) {
        if self.seen[rel].insert(tuple.clone()) {
            self.relations[rel].push(tuple);
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn build(self) -> Structure {
        let n = self.names.len();
        let mut adjacency: Vec<Vec<Element>> = vec![Vec::new(); n];
        for tuples in &self.relations {
            for t in tuples {
                for (i, &a) in t.iter().enumerate() {
                    for &b in &t[i + 1..] {
                        if a != b {
                            adjacency[a.index()].push(b);
                            adjacency[b.index()].push(a);
                        }
                    }
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let mut relations = self.relations;
        for tuples in &mut relations {
            tuples.sort();
        }
        Structure {
            signature: Arc::new(self.signature),
            names: self.names,
            index: self.index,
            relations,
            membership: self.seen,
            adjacency,
            neighbor_queries: AtomicU64::new(0),
            tuple_queries: AtomicU64::new(0),
        }
    }
}

/// An immutable finite relational structure with a metered local-access view.
#[derive(Debug)]
pub struct Structure {
    signature: Arc<Signature>,
    names: Vec<String>,
    index: HashMap<String, Element>,
    relations: Vec<Vec<Vec<Element>>>,
    membership: Vec<HashSet<Vec<Element>>>,
    adjacency: Vec<Vec<Element>>,
    neighbor_queries: AtomicU64,
    tuple_queries: AtomicU64,
}

impl Structure {
    /// Parses the line-oriented structure document.
    ///
    /// ```text
    /// signature
    /// relation L 2
    /// relation C 1
    /// tuples
    /// C 1
    /// L 1 2
    /// element isolated
    /// ```
    pub fn parse(text: &str) -> Result<Structure, StructureError> {
        #[derive(PartialEq)]
        enum Section {
            Start,
            Signature,
            Tuples,
        }
        let mut section = Section::Start;
        let mut signature = Signature::new();
        let mut builder: Option<StructureBuilder> = None;

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            let parse_err = |message: String| StructureError::Parse {
                line: line_no,
                message,
            };
            match words[0] {
                "signature" if words.len() == 1 => {
                    if section != Section::Start {
                        return Err(parse_err("duplicate signature section".into()));
                    }
                    section = Section::Signature;
                }
                "tuples" if words.len() == 1 => {
                    if section == Section::Tuples {
                        return Err(parse_err("duplicate tuples section".into()));
                    }
                    section = Section::Tuples;
                    builder.get_or_insert_with(|| StructureBuilder::new(signature.clone()));
                }
                "relation" if section == Section::Signature => {
                    if words.len() != 3 {
                        return Err(parse_err("expected `relation <name> <arity>`".into()));
                    }
                    let arity: usize = words[2]
                        .parse()
                        .map_err(|_| parse_err(format!("bad arity {:?}", words[2])))?;
                    signature.add(words[1], arity).map_err(|e| parse_err(e.to_string()))?;
                }
                "element" if section != Section::Start => {
                    if words.len() != 2 {
                        return Err(parse_err("expected `element <name>`".into()));
                    }
                    let b = builder.get_or_insert_with(|| StructureBuilder::new(signature.clone()));
                    b.element(words[1]);
                }
                _ if section == Section::Tuples => {
                    let b = builder.as_mut().expect("builder exists in tuples section");
                    let rel = b.signature().index_of(words[0]).ok_or_else(|| {
                        StructureError::UndeclaredRelation {
                            line: line_no,
                            relation: words[0].to_string(),
                        }
                    })?;
                    let arity = b.signature().arity(rel);
                    if words.len() - 1 != arity {
                        return Err(StructureError::ArityMismatch {
                            line: line_no,
                            relation: words[0].to_string(),
                            expected: arity,
                            found: words.len() - 1,
                        });
                    }
                    b.tuple(words[0], &words[1..]).map_err(|e| parse_err(e.to_string()))?;
                }
                _ => return Err(parse_err(format!("unexpected line {line:?}"))),
            }
        }
        if section == Section::Start {
            return Err(StructureError::Parse {
                line: 0,
                message: "missing `signature` section".into(),
            });
        }
        Ok(builder
            .unwrap_or_else(|| StructureBuilder::new(signature))
            .build())
    }

    /// Serializes back into the document format. Elements are listed first so
    /// that re-parsing preserves ids.
    pub fn to_document(&self) -> String {
        let mut out = String::from("signature\n");
        for r in self.signature.relations() {
            out.push_str(&format!("relation {} {}\n", r.name, r.arity));
        }
        out.push_str("tuples\n");
        for name in &self.names {
            out.push_str(&format!("element {name}\n"));
        }
        for (rel, tuples) in self.relations.iter().enumerate() {
            let name = &self.signature.relations()[rel].name;
            for t in tuples {
                out.push_str(name);
                for e in t {
                    out.push(' ');
                    out.push_str(&self.names[e.index()]);
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn signature_arc(&self) -> &Arc<Signature> {
        &self.signature
    }

    /// |U(B)|.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> impl ExactSizeIterator<Item = Element> + '_ {
        (0..self.names.len() as u32).map(Element)
    }

    pub fn name(&self, e: Element) -> &str {
        &self.names[e.index()]
    }

    pub fn lookup(&self, name: &str) -> Result<Element, StructureError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| StructureError::UnknownElement(name.to_string()))
    }

    pub fn lookup_all<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<Element>, StructureError> {
        names.iter().map(|n| self.lookup(n.as_ref())).collect()
    }

    fn check(&self, u: Element) -> Result<(), StructureError> {
        if u.index() < self.names.len() {
            Ok(())
        } else {
            Err(StructureError::UnknownElement(u.to_string()))
        }
    }

    /// Local access: the Gaifman neighbors of `u`, sorted by id.
    pub fn neighbors(&self, u: Element) -> Result<&[Element], StructureError> {
        self.check(u)?;
        self.neighbor_queries.fetch_add(1, Ordering::Relaxed);
        Ok(&self.adjacency[u.index()])
    }

    /// Local access: is `tuple` in relation `relation`?
    pub fn has_tuple(&self, relation: &str, tuple: &[Element]) -> Result<bool, StructureError> {
        let rel = self
            .signature
            .index_of(relation)
            .ok_or_else(|| StructureError::UnknownRelation(relation.to_string()))?;
        self.has_tuple_idx(rel, tuple)
    }

    /// [`Structure::has_tuple`] keyed by relation index.
    pub fn has_tuple_idx(&self, rel: usize, tuple: &[Element]) -> Result<bool, StructureError> {
        let arity = self.signature.arity(rel);
        if tuple.len() != arity {
            return Err(StructureError::TupleArity {
                relation: self.signature.relations()[rel].name.clone(),
                expected: arity,
                found: tuple.len(),
            });
        }
        for &e in tuple {
            self.check(e)?;
        }
        self.tuple_queries.fetch_add(1, Ordering::Relaxed);
        Ok(self.membership[rel].contains(tuple))
    }

    /// Unmetered neighbor list for global scans (model checking, oracles).
    pub fn neighbors_global(&self, u: Element) -> &[Element] {
        &self.adjacency[u.index()]
    }

    /// Unmetered membership test for global evaluation.
    pub fn contains_global(&self, rel: usize, tuple: &[Element]) -> bool {
        self.membership[rel].contains(tuple)
    }

    /// All tuples of a relation, sorted. Global access.
    pub fn tuples(&self, rel: usize) -> &[Vec<Element>] {
        &self.relations[rel]
    }

    /// Δ(B). A global scan; not metered and not part of any learner budget.
    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// N_r(ū) by breadth-first search over [`Structure::neighbors`].
    ///
    /// Output is ordered by (BFS layer, element id). Layer 0 is the set of
    /// distinct entries of `tuple`.
    pub fn ball(&self, tuple: &[Element], radius: usize) -> Result<Vec<Element>, StructureError> {
        ball_with(tuple, radius, |u| self.neighbors(u).map(|s| s.to_vec()))
    }

    pub fn access_receipt(&self) -> AccessReceipt {
        AccessReceipt {
            neighbor_queries: self.neighbor_queries.load(Ordering::Relaxed),
            tuple_queries: self.tuple_queries.load(Ordering::Relaxed),
        }
    }

    pub fn reset_access(&self) {
        self.neighbor_queries.store(0, Ordering::Relaxed);
        self.tuple_queries.store(0, Ordering::Relaxed);
    }

    /// Copy of this structure with `count` extra isolated elements named
    /// `{prefix}{i}`, appended after all existing ids.
    pub fn with_isolated_padding(&self, count: usize, prefix: &str) -> Structure {
        let mut b = StructureBuilder::new((*self.signature).clone());
        for name in &self.names {
            b.element(name);
        }
        for (rel, tuples) in self.relations.iter().enumerate() {
            for t in tuples {
                b.insert(rel, t.clone());
            }
        }
        for i in 0..count {
            b.element(&format!("{prefix}{i}"));
        }
        b.build()
    }
}

/// Layered BFS shared by metered and unmetered callers.
pub(crate) fn ball_with<F>(
    tuple: &[Element],
    radius: usize,
    mut neighbors: F,
) -> Result<Vec<Element>, StructureError>
where
    F: FnMut(Element) -> Result<Vec<Element>, StructureError>,
{
    let mut seen: HashSet<Element> = HashSet::new();
    let mut layer: Vec<Element> = Vec::new();
    for &u in tuple {
        if seen.insert(u) {
            layer.push(u);
        }
    }
    layer.sort_unstable();
    let mut out = layer.clone();
    for _ in 0..radius {
        let mut next = Vec::new();
        for &u in &layer {
            for v in neighbors(u)? {
                if seen.insert(v) {
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_unstable();
        out.extend_from_slice(&next);
        layer = next;
    }
    Ok(out)
}
