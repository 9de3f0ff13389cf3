//! Color refinement with individualization.
//!
//! Vertices are sphere elements. Tuples act as hyperedges; a vertex's color
//! is refined by the multiset of (relation, position, colors of the tuple)
//! over the tuples it occurs in. Centers start with colors given by the set
//! of center positions they occupy.

use std::cmp::Ordering;

use super::Sphere;

/// Hypergraph view shared by the canonical-form search and the pairwise test.
pub(crate) struct Incidence {
    pub n: usize,
    pub tuples: Vec<(u32, Vec<u32>)>,
    pub at: Vec<Vec<(u32, u32)>>,
}

impl Incidence {
    pub fn new(n: usize, tuples: Vec<(u32, Vec<u32>)>) -> Self {
        let mut at = vec![Vec::new(); n];
        for (i, (_, t)) in tuples.iter().enumerate() {
            for (p, &v) in t.iter().enumerate() {
                at[v as usize].push((i as u32, p as u32));
            }
        }
        Incidence { n, tuples, at }
    }

    pub fn of_sphere(s: &Sphere) -> Self {
        let mut tuples = Vec::new();
        for (rel, ts) in s.relations.iter().enumerate() {
            for t in ts {
                tuples.push((rel as u32, t.clone()));
            }
        }
        Incidence::new(s.size, tuples)
    }
}

/// Initial colors: by the sorted list of center positions a vertex occupies.
pub(crate) fn center_keys(n: usize, centers: &[u32]) -> Vec<Vec<u32>> {
    let mut keys = vec![Vec::new(); n];
    for (i, &c) in centers.iter().enumerate() {
        keys[c as usize].push(i as u32);
    }
    keys
}

/// Dense colors from arbitrary ordered keys; equal keys share a color.
pub(crate) fn densify<K: Ord>(keys: &[K]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut colors = vec![0u32; keys.len()];
    let mut c = 0u32;
    for (i, &v) in order.iter().enumerate() {
        if i > 0 && keys[order[i - 1]] != keys[v] {
            c += 1;
        }
        colors[v] = c;
    }
    colors
}

fn count_colors(colors: &[u32]) -> usize {
    colors.iter().max().map_or(0, |&m| m as usize + 1)
}

/// Refines to the coarsest stable coloring below `colors`. Old colors are the
/// major sort key, so cells only split and keep their relative order.
pub(crate) fn refine(g: &Incidence, colors: &mut Vec<u32>) {
    let mut classes = count_colors(colors);
    loop {
        let keys: Vec<Vec<u32>> = (0..g.n)
            .map(|v| {
                let mut entries: Vec<Vec<u32>> = g.at[v]
                    .iter()
                    .map(|&(ti, p)| {
                        let (rel, t) = &g.tuples[ti as usize];
                        let mut e = Vec::with_capacity(t.len() + 2);
                        e.push(*rel);
                        e.push(p);
                        e.extend(t.iter().map(|&u| colors[u as usize]));
                        e
                    })
                    .collect();
                entries.sort_unstable();
                let mut key = vec![colors[v], entries.len() as u32];
                for e in entries {
                    key.extend(e);
                }
                key
            })
            .collect();
        let next = densify(&keys);
        let next_classes = count_colors(&next);
        *colors = next;
        if next_classes == classes {
            return;
        }
        classes = next_classes;
    }
}

/// Gives `v` its own color just before the rest of its cell.
pub(crate) fn individualize(colors: &[u32], v: usize) -> Vec<u32> {
    let c = colors[v];
    colors
        .iter()
        .enumerate()
        .map(|(u, &cu)| if u == v || cu < c { cu } else { cu + 1 })
        .collect()
}

/// First non-singleton cell (lowest color), members in vertex order.
pub(crate) fn target_cell(colors: &[u32]) -> Option<Vec<usize>> {
    let mut sizes = vec![0usize; count_colors(colors)];
    for &c in colors {
        sizes[c as usize] += 1;
    }
    let c = sizes.iter().position(|&s| s > 1)? as u32;
    Some((0..colors.len()).filter(|&v| colors[v] == c).collect())
}

/// Encodes the sphere relabeled by the discrete coloring `lab`.
pub(crate) fn encode(s: &Sphere, lab: &[u32]) -> Vec<u32> {
    let mut code = vec![s.radius as u32, s.size as u32, s.centers.len() as u32];
    code.extend(s.centers.iter().map(|&c| lab[c as usize]));
    for ts in &s.relations {
        let mut mapped: Vec<Vec<u32>> = ts
            .iter()
            .map(|t| t.iter().map(|&u| lab[u as usize]).collect())
            .collect();
        mapped.sort_unstable();
        code.push(mapped.len() as u32);
        for t in mapped {
            code.extend(t);
        }
    }
    code
}

struct Search<'a> {
    sphere: &'a Sphere,
    g: Incidence,
    best: Option<(Vec<u32>, Vec<u32>)>,
    autos: Vec<Vec<u32>>,
}

impl Search<'_> {
    fn run(&mut self, mut colors: Vec<u32>, path: &mut Vec<usize>) {
        refine(&self.g, &mut colors);
        let cell = match target_cell(&colors) {
            None => return self.leaf(colors),
            Some(cell) => cell,
        };
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() && self.same_orbit(path, &explored, v) {
                continue;
            }
            path.push(v);
            self.run(individualize(&colors, v), path);
            path.pop();
            explored.push(v);
        }
    }

    fn leaf(&mut self, lab: Vec<u32>) {
        let code = encode(self.sphere, &lab);
        match &self.best {
            None => self.best = Some((code, lab)),
            Some((best, best_lab)) => match code.cmp(best) {
                Ordering::Less => self.best = Some((code, lab)),
                Ordering::Equal => {
                    let mut inv = vec![0u32; lab.len()];
                    for (v, &p) in best_lab.iter().enumerate() {
                        inv[p as usize] = v as u32;
                    }
                    let gamma: Vec<u32> = lab.iter().map(|&p| inv[p as usize]).collect();
                    if gamma.iter().enumerate().any(|(v, &w)| v as u32 != w) {
                        self.autos.push(gamma);
                    }
                }
                Ordering::Greater => {}
            },
        }
    }

    /// Is `v` in the orbit of an explored vertex under the known
    /// automorphisms that fix the current path pointwise?
    fn same_orbit(&self, path: &[usize], explored: &[usize], v: usize) -> bool {
        let n = self.g.n;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut any = false;
        for gamma in &self.autos {
            if path.iter().all(|&p| gamma[p] as usize == p) {
                any = true;
                for (x, &y) in gamma.iter().enumerate() {
                    let (a, b) = (find(&mut parent, x), find(&mut parent, y as usize));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
        if !any {
            return false;
        }
        let rv = find(&mut parent, v);
        explored.iter().any(|&e| find(&mut parent, e) == rv)
    }
}

/// Minimal code over all leaves of the individualization tree, and the
/// labeling that attains it.
pub(crate) fn canonical_labeling(s: &Sphere) -> (Vec<u32>, Vec<u32>) {
    let g = Incidence::of_sphere(s);
    let colors = densify(&center_keys(s.size, &s.centers));
    let mut search = Search {
        sphere: s,
        g,
        best: None,
        autos: Vec::new(),
    };
    search.run(colors, &mut Vec::new());
    search.best.expect("search visits at least one leaf")
}

/// Decides center-respecting isomorphism by joint refinement on the disjoint
/// union and backtracking over matching choices.
pub(crate) fn isomorphic(a: &Sphere, b: &Sphere) -> bool {
    if a.size != b.size || a.centers.len() != b.centers.len() {
        return false;
    }
    if a.relations.iter().zip(&b.relations).any(|(x, y)| x.len() != y.len()) {
        return false;
    }
    let n = a.size;
    let mut tuples = Vec::new();
    for (rel, ts) in a.relations.iter().enumerate() {
        for t in ts {
            tuples.push((rel as u32, t.clone()));
        }
    }
    for (rel, ts) in b.relations.iter().enumerate() {
        for t in ts {
            tuples.push((rel as u32, t.iter().map(|&u| u + n as u32).collect()));
        }
    }
    let g = Incidence::new(2 * n, tuples);
    let mut keys = center_keys(n, &a.centers);
    keys.extend(center_keys(n, &b.centers));
    // Center lists must agree position by position: the same positions must
    // coincide on both sides.
    for i in 0..a.centers.len() {
        for j in 0..i {
            if (a.centers[i] == a.centers[j]) != (b.centers[i] == b.centers[j]) {
                return false;
            }
        }
    }
    let colors = densify(&keys);
    match_from(a, b, &g, colors)
}

fn balanced(colors: &[u32], n: usize) -> bool {
    let k = count_colors(colors);
    let mut diff = vec![0i64; k];
    for (v, &c) in colors.iter().enumerate() {
        diff[c as usize] += if v < n { 1 } else { -1 };
    }
    diff.iter().all(|&d| d == 0)
}

fn match_from(a: &Sphere, b: &Sphere, g: &Incidence, mut colors: Vec<u32>) -> bool {
    let n = a.size;
    refine(g, &mut colors);
    if !balanced(&colors, n) {
        return false;
    }
    // A cell with exactly one vertex per side is settled.
    let k = count_colors(&colors);
    let mut sizes = vec![0usize; k];
    for &c in &colors {
        sizes[c as usize] += 1;
    }
    let Some(c) = sizes.iter().position(|&s| s > 2) else {
        return verify(a, b, &colors);
    };
    let c = c as u32;
    let v = (0..n).find(|&v| colors[v] == c).expect("balanced cell has a left vertex");
    for w in (n..2 * n).filter(|&w| colors[w] == c) {
        let mut next = individualize(&colors, v);
        // give w the same fresh color as v
        next[w] = next[v];
        if match_from(a, b, g, next) {
            return true;
        }
    }
    false
}

/// Checks the bijection read off a discrete balanced coloring, in both
/// directions.
fn verify(a: &Sphere, b: &Sphere, colors: &[u32]) -> bool {
    let n = a.size;
    let mut by_color = vec![u32::MAX; n];
    for w in n..2 * n {
        by_color[colors[w] as usize] = (w - n) as u32;
    }
    let f: Vec<u32> = (0..n).map(|v| by_color[colors[v] as usize]).collect();
    let mut inv = vec![0u32; n];
    for (v, &w) in f.iter().enumerate() {
        inv[w as usize] = v as u32;
    }
    if a.centers.iter().zip(&b.centers).any(|(&x, &y)| f[x as usize] != y) {
        return false;
    }
    for (ta, tb) in a.relations.iter().zip(&b.relations) {
        for t in ta {
            let image: Vec<u32> = t.iter().map(|&u| f[u as usize]).collect();
            if tb.binary_search(&image).is_err() {
                return false;
            }
        }
        for t in tb {
            let pre: Vec<u32> = t.iter().map(|&u| inv[u as usize]).collect();
            if ta.binary_search(&pre).is_err() {
                return false;
            }
        }
    }
    true
}
