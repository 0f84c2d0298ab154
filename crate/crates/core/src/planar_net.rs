//! Weighted planar networks of bidiagonal factorizations and path-family sums.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expr_core::IndexSet;
use crate::tn_matrix::{compose, minor, BidiagFactor, BidiagFactorization, Scalar};

/// Default and hard cap on the vertex count accepted by the path sums.
pub const MAX_VERTICES: usize = 128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub level: usize,
    pub column: usize,
}

impl Vertex {
    pub fn id(&self) -> String {
        format!("L{}C{}", self.level, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: Scalar,
}

/// Acyclic network with `n` sources and `n` sinks, one horizontal line per
/// level. Vertex indices are a topological order.
#[derive(Clone, Debug)]
pub struct PlanarNetwork {
    n: usize,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    out: Vec<Vec<(usize, Scalar)>>,
    sources: Vec<usize>,
    sinks: Vec<usize>,
}

struct Builder {
    n: usize,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    current: Vec<usize>,
    pending: Vec<Scalar>,
    column: usize,
}

impl Builder {
    fn new(n: usize) -> Self {
        let vertices: Vec<Vertex> = (1..=n).map(|level| Vertex { level, column: 0 }).collect();
        Builder {
            n,
            vertices,
            edges: Vec::new(),
            current: (0..n).collect(),
            pending: vec![Scalar::one(); n],
            column: 0,
        }
    }

    /// Closes the pending horizontal segment on `level` at a fresh vertex.
    fn advance(&mut self, level: usize) -> usize {
        let v = self.vertices.len();
        self.vertices.push(Vertex {
            level,
            column: self.column,
        });
        let w = std::mem::replace(&mut self.pending[level - 1], Scalar::one());
        self.edges.push(Edge {
            from: self.current[level - 1],
            to: v,
            weight: w,
        });
        self.current[level - 1] = v;
        v
    }

    /// Diagonal edge from level `s` to level `t` carrying `w`.
    fn crossing(&mut self, s: usize, t: usize, w: &Scalar) {
        if w.is_zero() {
            return;
        }
        self.column += 1;
        let a = self.advance(s);
        let b = self.advance(t);
        self.edges.push(Edge {
            from: a,
            to: b,
            weight: w.clone(),
        });
    }

    fn push(&mut self, f: &BidiagFactor) {
        match f {
            BidiagFactor::Lower { k, w } => self.crossing(k + 1, *k, w),
            BidiagFactor::Upper { k, w } => self.crossing(*k, k + 1, w),
            BidiagFactor::Diag { d } => {
                for (p, x) in self.pending.iter_mut().zip(d) {
                    *p *= x;
                }
            }
        }
    }

    fn finish(mut self) -> PlanarNetwork {
        self.column += 1;
        let sinks: Vec<usize> = (1..=self.n).map(|l| self.advance(l)).collect();
        let mut out = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            out[e.from].push((e.to, e.weight.clone()));
        }
        PlanarNetwork {
            n: self.n,
            vertices: self.vertices,
            edges: self.edges,
            out,
            sources: (0..self.n).collect(),
            sinks,
        }
    }
}

/// Network of a validated factorization.
pub fn build_network(f: &BidiagFactorization) -> PlanarNetwork {
    build_network_from_factors(f.n(), f.factors()).expect("validated factorization")
}

/// Network of an arbitrary factor sequence, e.g. two factorizations back to back.
pub fn build_network_from_factors(n: usize, factors: &[BidiagFactor]) -> Result<PlanarNetwork> {
    // Reuse the composition check for factor validity.
    crate::tn_matrix::compose_factors(n, factors)?;
    let mut b = Builder::new(n);
    for f in factors {
        b.push(f);
    }
    Ok(b.finish())
}

impl PlanarNetwork {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn source(&self, level: usize) -> usize {
        self.sources[level - 1]
    }

    pub fn sink(&self, level: usize) -> usize {
        self.sinks[level - 1]
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph planar_network {\n  rankdir=LR;\n");
        for v in &self.vertices {
            let _ = writeln!(s, "  \"{}\";", v.id());
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "  \"{}\" -> \"{}\" [weight=\"{}\"];",
                self.vertices[e.from].id(),
                self.vertices[e.to].id(),
                e.weight
            );
        }
        s.push_str("}\n");
        s
    }

    fn check(&self, rows: &IndexSet, cols: &IndexSet, budget: usize) -> Result<()> {
        if rows.len() != cols.len() {
            return Err(Error::SizeMismatch(format!("{rows} and {cols} differ in size")));
        }
        for s in [rows, cols] {
            if let Some(k) = s.last() {
                if k > self.n {
                    return Err(Error::OutOfRange { index: k, n: self.n });
                }
            }
        }
        let cap = budget.min(MAX_VERTICES);
        if self.vertices.len() > cap {
            return Err(Error::BudgetExceeded(format!(
                "network has {} vertices, budget is {cap}",
                self.vertices.len()
            )));
        }
        Ok(())
    }
}

/// Sum over vertex-disjoint path families from sources `rows` to sinks
/// `cols` of the product of edge weights.
pub fn path_weight_sum(net: &PlanarNetwork, rows: &IndexSet, cols: &IndexSet) -> Result<Scalar> {
    path_weight_sum_with_budget(net, rows, cols, MAX_VERTICES)
}

/// As [`path_weight_sum`] with an explicit vertex budget (capped at 128).
///
/// The sweep keeps the set of current path heads and always advances the
/// head with the smallest topological index, so every head that could still
/// meet a vertex is behind it and a state's contributions are complete when
/// it is popped.
pub fn path_weight_sum_with_budget(
    net: &PlanarNetwork,
    rows: &IndexSet,
    cols: &IndexSet,
    budget: usize,
) -> Result<Scalar> {
    net.check(rows, cols, budget)?;
    let sink_mask: u128 = net.sinks.iter().fold(0, |m, &v| m | (1u128 << v));
    let start: u128 = rows.iter().fold(0, |m, l| m | (1u128 << net.source(l)));
    let goal: u128 = cols.iter().fold(0, |m, l| m | (1u128 << net.sink(l)));
    let key = |state: u128| -> u32 {
        let open = state & !sink_mask;
        if open == 0 {
            u32::MAX
        } else {
            open.trailing_zeros()
        }
    };
    let mut queue: BTreeMap<(u32, u128), Scalar> = BTreeMap::new();
    queue.insert((key(start), start), Scalar::one());
    let mut total = Scalar::zero();
    while let Some(((k, state), w)) = queue.pop_first() {
        if k == u32::MAX {
            if state == goal {
                total += w;
            }
            continue;
        }
        let h = k as usize;
        let rest = state & !(1u128 << h);
        for (t, ew) in &net.out[h] {
            let bit = 1u128 << t;
            if rest & bit != 0 {
                continue;
            }
            let next = rest | bit;
            let add = &w * ew;
            *queue.entry((key(next), next)).or_insert_with(Scalar::zero) += add;
        }
    }
    Ok(total)
}

/// A family of vertex-disjoint paths, path `k` joining the `k`-th selected
/// source to the `k`-th selected sink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathFamily {
    pub paths: Vec<Vec<usize>>,
}

impl PathFamily {
    pub fn weight(&self, net: &PlanarNetwork) -> Scalar {
        let mut w = Scalar::one();
        for p in &self.paths {
            for pair in p.windows(2) {
                let e = net.out[pair[0]]
                    .iter()
                    .find(|(t, _)| *t == pair[1])
                    .expect("path follows edges");
                w *= &e.1;
            }
        }
        w
    }
}

/// Lists every order-preserving vertex-disjoint path family by depth-first
/// search. Exponential; meant for cross-checking the sweep on small networks.
pub fn enumerate_path_families(
    net: &PlanarNetwork,
    rows: &IndexSet,
    cols: &IndexSet,
) -> Result<Vec<PathFamily>> {
    net.check(rows, cols, MAX_VERTICES)?;
    let pairs: Vec<(usize, usize)> = rows
        .iter()
        .zip(cols.iter())
        .map(|(i, j)| (net.source(i), net.sink(j)))
        .collect();
    let mut out = Vec::new();
    let mut used = vec![false; net.vertices.len()];
    let mut chosen: Vec<Vec<usize>> = Vec::new();
    families_rec(net, &pairs, &mut used, &mut chosen, &mut out);
    Ok(out)
}

fn families_rec(
    net: &PlanarNetwork,
    pairs: &[(usize, usize)],
    used: &mut Vec<bool>,
    chosen: &mut Vec<Vec<usize>>,
    out: &mut Vec<PathFamily>,
) {
    let Some(&(s, t)) = pairs.get(chosen.len()) else {
        out.push(PathFamily {
            paths: chosen.clone(),
        });
        return;
    };
    if used[s] {
        return;
    }
    let mut path = vec![s];
    used[s] = true;
    paths_rec(net, t, pairs, used, &mut path, chosen, out);
    used[s] = false;
}

fn paths_rec(
    net: &PlanarNetwork,
    target: usize,
    pairs: &[(usize, usize)],
    used: &mut Vec<bool>,
    path: &mut Vec<usize>,
    chosen: &mut Vec<Vec<usize>>,
    out: &mut Vec<PathFamily>,
) {
    let v = *path.last().expect("nonempty");
    if v == target {
        chosen.push(path.clone());
        families_rec(net, pairs, used, chosen, out);
        chosen.pop();
        return;
    }
    for (t, _) in &net.out[v] {
        if used[*t] {
            continue;
        }
        used[*t] = true;
        path.push(*t);
        paths_rec(net, target, pairs, used, path, chosen, out);
        path.pop();
        used[*t] = false;
    }
}

/// True iff every minor of `compose(f)` equals the matching path sum.
pub fn lindstrom_check(f: &BidiagFactorization) -> Result<bool> {
    let n = f.n();
    if n > 5 {
        return Err(Error::DimensionTooLarge { n, limit: 5 });
    }
    let a = compose(f);
    let net = build_network(f);
    for rows in IndexSet::all_subsets(n)? {
        for cols in IndexSet::all_of_size(n, rows.len())? {
            if path_weight_sum(&net, &rows, &cols)? != minor(&a, &rows, &cols)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
