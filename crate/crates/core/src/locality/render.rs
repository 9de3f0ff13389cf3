//! Explicit first-order sphere formulas.
//!
//! Centers are `x1..xk`, the other sphere elements `z1..zm` in local order.
//! Each conjunct is placed right under the quantifier of its last variable,
//! which keeps naive evaluation of the text tractable.

use super::{Sphere, SphereError};
use crate::logic::Formula;

pub const DEFAULT_RENDER_CAP: usize = 10;

pub fn render_sphere_formula(tau: &Sphere, cap: usize) -> Result<String, SphereError> {
    if tau.size > cap {
        return Err(SphereError::CapExceeded { size: tau.size, cap });
    }
    Ok(sphere_formula(tau).to_string())
}

pub(crate) fn sphere_formula(tau: &Sphere) -> Formula {
    let n = tau.size;
    let mut var = vec![String::new(); n];
    let mut level = vec![0usize; n];
    let mut center_eqs = Vec::new();
    for (i, &c) in tau.centers.iter().enumerate() {
        let name = format!("x{}", i + 1);
        if var[c as usize].is_empty() {
            var[c as usize] = name;
        } else {
            center_eqs.push(Formula::Eq(var[c as usize].clone(), name));
        }
    }
    let mut z = 0;
    for e in 0..n {
        if var[e].is_empty() {
            z += 1;
            var[e] = format!("z{z}");
            level[e] = z;
        }
    }
    let depth = z;
    let mut per_level: Vec<Vec<Formula>> = vec![Vec::new(); depth + 1];
    let sig = &tau.signature;
    let order = sig.name_order();
    let atom = |rel: usize, t: &[u32]| {
        Formula::Atom(
            sig.relations()[rel].name.clone(),
            t.iter().map(|&u| var[u as usize].clone()).collect(),
        )
    };
    let lvl = |t: &[u32]| t.iter().map(|&u| level[u as usize]).max().unwrap_or(0);

    let mut positive = vec![Vec::new(); depth + 1];
    let mut negative = vec![Vec::new(); depth + 1];
    for &rel in &order {
        let arity = sig.arity(rel);
        for t in all_tuples(n, arity) {
            if tau.relations[rel].binary_search(&t).is_ok() {
                positive[lvl(&t)].push(atom(rel, &t));
            } else {
                negative[lvl(&t)].push(Formula::not(atom(rel, &t)));
            }
        }
    }
    let mut distinct = vec![Vec::new(); depth + 1];
    for b in 0..n {
        for a in 0..b {
            let (a, b) = if level[a] <= level[b] { (a, b) } else { (b, a) };
            distinct[level[a].max(level[b])].push(Formula::not(Formula::Eq(
                var[a].clone(),
                var[b].clone(),
            )));
        }
    }
    for l in 0..=depth {
        per_level[l].append(&mut positive[l]);
        per_level[l].append(&mut distinct[l]);
        if l == 0 {
            per_level[0].append(&mut center_eqs);
        }
        per_level[l].append(&mut negative[l]);
    }
    per_level[depth].extend(closures(tau, &var));

    let mut body: Option<Formula> = None;
    for l in (0..=depth).rev() {
        let mut parts = std::mem::take(&mut per_level[l]);
        if let Some(inner) = body.take() {
            parts.push(inner);
        }
        let conj = Formula::conjunction(parts);
        body = if l == 0 {
            conj
        } else {
            let z = format!("z{l}");
            Some(Formula::exists(&z, conj.unwrap_or_else(|| Formula::eq(&z, &z))))
        };
    }
    body.unwrap_or_else(|| Formula::forall("y", Formula::eq("y", "y")))
}

/// Every neighbor of an element strictly inside the radius is a sphere element.
fn closures(tau: &Sphere, var: &[String]) -> Vec<Formula> {
    let sig = &tau.signature;
    if !sig.relations().iter().any(|r| r.arity >= 2) {
        return Vec::new();
    }
    let dist = tau.distances();
    let mut out = Vec::new();
    for e in 0..tau.size {
        if !matches!(dist[e], Some(d) if d < tau.radius) {
            continue;
        }
        let mut options = vec![Formula::not(adjacent(tau, "y", &var[e]))];
        options.extend(var.iter().map(|v| Formula::eq("y", v)));
        out.push(Formula::forall(
            "y",
            Formula::disjunction(options).expect("nonempty"),
        ));
    }
    out
}

/// Gaifman adjacency of `a` and `b` as a formula.
fn adjacent(tau: &Sphere, a: &str, b: &str) -> Formula {
    let sig = &tau.signature;
    let mut cases = Vec::new();
    for rel in sig.name_order() {
        let arity = sig.arity(rel);
        if arity < 2 {
            continue;
        }
        for i in 0..arity {
            for j in 0..arity {
                if i == j {
                    continue;
                }
                let mut args = Vec::with_capacity(arity);
                let mut fresh = Vec::new();
                for p in 0..arity {
                    if p == i {
                        args.push(a.to_string());
                    } else if p == j {
                        args.push(b.to_string());
                    } else {
                        let w = format!("w{}", fresh.len() + 1);
                        args.push(w.clone());
                        fresh.push(w);
                    }
                }
                let mut f = Formula::Atom(sig.relations()[rel].name.clone(), args);
                for w in fresh.iter().rev() {
                    f = Formula::exists(w, f);
                }
                cases.push(f);
            }
        }
    }
    Formula::disjunction(cases).expect("some relation has arity at least 2")
}

fn all_tuples(n: usize, arity: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n as u32).map(move |u| {
                    let mut t = t.clone();
                    t.push(u);
                    t
                })
            })
            .collect();
    }
    out
}
