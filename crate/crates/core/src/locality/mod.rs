//! Spheres: r-neighborhoods of tuples with their centers.
//!
//! A [`Sphere`] is detached from global element names. Its local ids follow
//! the ball order of the extraction (BFS layer, then global id), so its size
//! depends only on degree, radius and center count.

mod canon;
mod render;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::structure::{Element, Signature, Structure, StructureError};

pub use render::{render_sphere_formula, DEFAULT_RENDER_CAP};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SphereError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("spheres have different signatures")]
    SignatureMismatch,
    #[error("center counts differ: {0} vs {1}")]
    CenterCount(usize, usize),
    #[error("radii differ: {0} vs {1}")]
    Radius(usize, usize),
    #[error("sphere has {size} elements, over the rendering cap of {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("expected a sphere with one center, got {0}")]
    NotSingleCenter(usize),
    #[error("sphere text line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sphere {
    pub(crate) signature: Arc<Signature>,
    pub(crate) radius: usize,
    pub(crate) size: usize,
    pub(crate) centers: Vec<u32>,
    /// Per relation (signature order), sorted and deduplicated local tuples.
    pub(crate) relations: Vec<Vec<Vec<u32>>>,
}

/// Opaque isomorphism invariant: equal keys iff isomorphic spheres.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl Sphere {
    /// Builds a sphere from local data. Tuples are sorted and deduplicated.
    pub fn new(
        signature: Arc<Signature>,
        radius: usize,
        size: usize,
        centers: Vec<u32>,
        mut relations: Vec<Vec<Vec<u32>>>,
    ) -> Result<Sphere, SphereError> {
        let bad = |message: String| SphereError::Parse { line: 0, message };
        if relations.len() != signature.len() {
            return Err(bad("one tuple list per relation expected".into()));
        }
        if centers.iter().any(|&c| c as usize >= size) {
            return Err(bad("center out of range".into()));
        }
        for (rel, ts) in relations.iter_mut().enumerate() {
            for t in ts.iter() {
                if t.len() != signature.arity(rel) || t.iter().any(|&u| u as usize >= size) {
                    return Err(bad(format!(
                        "bad tuple for {}",
                        signature.relations()[rel].name
                    )));
                }
            }
            ts.sort_unstable();
            ts.dedup();
        }
        Ok(Sphere {
            signature,
            radius,
            size,
            centers,
            relations,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Size of the local universe.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn centers(&self) -> &[u32] {
        &self.centers
    }

    pub fn tuples(&self, rel: usize) -> &[Vec<u32>] {
        &self.relations[rel]
    }

    /// Distances from the centers inside the sphere itself.
    pub fn distances(&self) -> Vec<Option<usize>> {
        let mut adj = vec![Vec::new(); self.size];
        for ts in &self.relations {
            for t in ts {
                for &a in t {
                    for &b in t {
                        if a != b {
                            adj[a as usize].push(b as usize);
                        }
                    }
                }
            }
        }
        let mut dist = vec![None; self.size];
        let mut queue = std::collections::VecDeque::new();
        for &c in &self.centers {
            if dist[c as usize].is_none() {
                dist[c as usize] = Some(0);
                queue.push_back(c as usize);
            }
        }
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            for &v in &adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Relabels local ids by `perm` (old id to new id).
    pub(crate) fn relabel(&self, perm: &[u32]) -> Sphere {
        let relations = self
            .relations
            .iter()
            .map(|ts| {
                let mut out: Vec<Vec<u32>> = ts
                    .iter()
                    .map(|t| t.iter().map(|&u| perm[u as usize]).collect())
                    .collect();
                out.sort_unstable();
                out
            })
            .collect();
        Sphere {
            signature: self.signature.clone(),
            radius: self.radius,
            size: self.size,
            centers: self.centers.iter().map(|&c| perm[c as usize]).collect(),
            relations,
        }
    }

    /// Key and canonical representative of the isomorphism class.
    pub fn canonical_form(&self) -> (CanonicalKey, Sphere) {
        let (code, lab) = canon::canonical_labeling(self);
        (key_bytes(&code), self.relabel(&lab))
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        key_bytes(&canon::canonical_labeling(self).0)
    }

    /// Text form, one item per line, tuples in canonical order (relations by
    /// name, tuples lexicographic).
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "sphere radius {} centers {} size {}\n",
            self.radius,
            self.centers.len(),
            self.size
        );
        out.push_str("c");
        for c in &self.centers {
            out.push_str(&format!(" {c}"));
        }
        out.push('\n');
        for rel in self.signature.name_order() {
            let name = &self.signature.relations()[rel].name;
            for t in &self.relations[rel] {
                out.push_str("t ");
                out.push_str(name);
                for u in t {
                    out.push_str(&format!(" {u}"));
                }
                out.push('\n');
            }
        }
        out.push_str("end\n");
        out
    }

    /// Parses the block written by [`Sphere::to_text`]; `first_line` is used
    /// for error positions.
    pub fn from_lines<'a>(
        signature: Arc<Signature>,
        lines: &mut impl Iterator<Item = (usize, &'a str)>,
    ) -> Result<Sphere, SphereError> {
        let err = |line: usize, message: &str| SphereError::Parse {
            line,
            message: message.to_string(),
        };
        let (line, header) = lines.next().ok_or_else(|| err(0, "missing sphere header"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| err(line, "expected a number"));
        if h.len() != 7 || h[0] != "sphere" || h[1] != "radius" || h[3] != "centers" || h[5] != "size" {
            return Err(err(line, "malformed sphere header"));
        }
        let (radius, ncenters, size) = (num(h[2])?, num(h[4])?, num(h[6])?);
        let (line, cl) = lines.next().ok_or_else(|| err(line, "missing center line"))?;
        let mut parts = cl.split_whitespace();
        if parts.next() != Some("c") {
            return Err(err(line, "expected center line"));
        }
        let centers = parts
            .map(|p| p.parse::<u32>().map_err(|_| err(line, "bad center id")))
            .collect::<Result<Vec<_>, _>>()?;
        if centers.len() != ncenters {
            return Err(err(line, "center count does not match header"));
        }
        let mut relations = vec![Vec::new(); signature.len()];
        loop {
            let (line, l) = lines.next().ok_or_else(|| err(line, "missing end"))?;
            let mut parts = l.split_whitespace();
            match parts.next() {
                Some("end") => break,
                Some("t") => {
                    let name = parts.next().ok_or_else(|| err(line, "missing relation"))?;
                    let rel = signature
                        .index_of(name)
                        .ok_or_else(|| err(line, "unknown relation"))?;
                    let t = parts
                        .map(|p| p.parse::<u32>().map_err(|_| err(line, "bad element id")))
                        .collect::<Result<Vec<_>, _>>()?;
                    relations[rel].push(t);
                }
                _ => return Err(err(line, "expected tuple line or end")),
            }
        }
        Sphere::new(signature, radius, size, centers, relations).map_err(|e| match e {
            SphereError::Parse { message, .. } => SphereError::Parse { line, message },
            other => other,
        })
    }
}

fn key_bytes(code: &[u32]) -> CanonicalKey {
    let mut bytes = Vec::with_capacity(code.len() * 4);
    for &c in code {
        bytes.extend_from_slice(&c.to_be_bytes());
    }
    CanonicalKey(bytes)
}

/// Generic extraction over a pair of access functions.
fn extract_with<N, T>(
    s: &Structure,
    tuple: &[Element],
    radius: usize,
    mut neighbors: N,
    mut has_tuple: T,
) -> Result<Sphere, StructureError>
where
    N: FnMut(Element) -> Result<Vec<Element>, StructureError>,
    T: FnMut(usize, &[Element]) -> Result<bool, StructureError>,
{
    let mut cache: HashMap<Element, Vec<Element>> = HashMap::new();
    let ball = crate::structure::ball_with(tuple, radius, |u| {
        let ns = neighbors(u)?;
        cache.insert(u, ns.clone());
        Ok(ns)
    })?;
    let local: HashMap<Element, u32> = ball
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i as u32))
        .collect();
    // neighbor lists restricted to the ball, local ids, self included
    let mut close: Vec<Vec<u32>> = Vec::with_capacity(ball.len());
    for &u in &ball {
        let ns = match cache.get(&u) {
            Some(ns) => ns.clone(),
            None => neighbors(u)?,
        };
        let mut c: Vec<u32> = ns.iter().filter_map(|v| local.get(v).copied()).collect();
        c.push(local[&u]);
        c.sort_unstable();
        close.push(c);
    }
    let adjacent_or_equal = |a: u32, b: u32| close[a as usize].binary_search(&b).is_ok();
    let sig = s.signature_arc().clone();
    let mut relations = vec![Vec::new(); sig.len()];
    for (rel, out) in relations.iter_mut().enumerate() {
        let arity = sig.arity(rel);
        for first in 0..ball.len() as u32 {
            let options = &close[first as usize];
            let mut idx = vec![0usize; arity - 1];
            'tuples: loop {
                let mut t = Vec::with_capacity(arity);
                t.push(first);
                t.extend(idx.iter().map(|&i| options[i]));
                let clique = (0..arity).all(|i| (0..i).all(|j| adjacent_or_equal(t[i], t[j])));
                if clique {
                    let global: Vec<Element> = t.iter().map(|&i| ball[i as usize]).collect();
                    if has_tuple(rel, &global)? {
                        out.push(t);
                    }
                }
                let mut j = idx.len();
                loop {
                    if j == 0 {
                        break 'tuples;
                    }
                    j -= 1;
                    idx[j] += 1;
                    if idx[j] < options.len() {
                        break;
                    }
                    idx[j] = 0;
                }
            }
        }
    }
    for ts in relations.iter_mut() {
        ts.sort_unstable();
    }
    let centers = tuple.iter().map(|e| local[e]).collect();
    Ok(Sphere {
        signature: sig,
        radius,
        size: ball.len(),
        centers,
        relations,
    })
}

/// 𝒩_r(ū) through metered local access only.
pub fn extract_sphere(s: &Structure, tuple: &[Element], radius: usize) -> Result<Sphere, StructureError> {
    extract_with(
        s,
        tuple,
        radius,
        |u| s.neighbors(u).map(<[Element]>::to_vec),
        |rel, t| s.has_tuple_idx(rel, t),
    )
}

/// Same as [`extract_sphere`] but unmetered, for harness and oracle use.
pub fn extract_sphere_global(s: &Structure, tuple: &[Element], radius: usize) -> Result<Sphere, StructureError> {
    for &e in tuple {
        if e.index() >= s.len() {
            return Err(StructureError::UnknownElement(e.to_string()));
        }
    }
    extract_with(
        s,
        tuple,
        radius,
        |u| Ok(s.neighbors_global(u).to_vec()),
        |rel, t| Ok(s.contains_global(rel, t)),
    )
}

fn check_shapes(a: &Sphere, b: &Sphere) -> Result<(), SphereError> {
    if a.signature != b.signature {
        return Err(SphereError::SignatureMismatch);
    }
    if a.centers.len() != b.centers.len() {
        return Err(SphereError::CenterCount(a.centers.len(), b.centers.len()));
    }
    if a.radius != b.radius {
        return Err(SphereError::Radius(a.radius, b.radius));
    }
    Ok(())
}

/// Center-respecting isomorphism test.
pub fn spheres_isomorphic(a: &Sphere, b: &Sphere) -> Result<bool, SphereError> {
    check_shapes(a, b)?;
    Ok(canon::isomorphic(a, b))
}

pub fn canonical_key(s: &Sphere) -> CanonicalKey {
    s.canonical_key()
}

/// Does 𝒩_r(b̄) realize τ? Local access only.
pub fn evaluate_sphere_formula(s: &Structure, tau: &Sphere, tuple: &[Element]) -> Result<bool, SphereError> {
    if tuple.len() != tau.centers.len() {
        return Err(SphereError::CenterCount(tau.centers.len(), tuple.len()));
    }
    let local = extract_sphere(s, tuple, tau.radius)?;
    spheres_isomorphic(tau, &local)
}

/// |{a : 𝒩_r(a) ≅ τ}|. A global scan.
pub fn count_type_occurrences(s: &Structure, tau: &Sphere) -> Result<u64, SphereError> {
    if tau.centers.len() != 1 {
        return Err(SphereError::NotSingleCenter(tau.centers.len()));
    }
    if **s.signature_arc() != *tau.signature {
        return Err(SphereError::SignatureMismatch);
    }
    let key = tau.canonical_key();
    let mut count = 0;
    for a in s.elements() {
        let local = extract_sphere_global(s, &[a], tau.radius)?;
        if local.size == tau.size && local.canonical_key() == key {
            count += 1;
        }
    }
    Ok(count)
}
