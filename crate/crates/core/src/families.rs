//! Generators for the classical additive inequalities and identities.
//!
//! Each generator returns a [`DetExpr`] in canonical form (`... >= 0` or
//! `... = 0`). Partial sums keep one term per summation index.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr_core::{int, shift_set, DetExpr, IndexSet, Minor, OpSpec, Relation, Term};

fn sign(e: usize) -> BigRational {
    if e.is_multiple_of(2) {
        int(1)
    } else {
        int(-1)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > 32 {
        return Err(Error::InvalidParameter(format!("dimension {n} outside [1, 32]")));
    }
    Ok(())
}

fn check_index(name: &str, k: usize, lo: usize, hi: usize) -> Result<()> {
    if k < lo || k > hi {
        return Err(Error::InvalidParameter(format!("{name} = {k} outside [{lo}, {hi}]")));
    }
    Ok(())
}

fn single(n: usize, k: usize) -> Result<IndexSet> {
    IndexSet::new(n, &[k])
}

fn all_but(n: usize, k: usize) -> Result<IndexSet> {
    Ok(IndexSet::full(n)?.without(k))
}

/// `(-1)^{1+l} [ sum_{k<=l} (-1)^{1+k} a_{1k} det A_{1k} - det A ] >= 0`.
pub fn gantmacher_krein(n: usize, l: usize) -> Result<DetExpr> {
    check_n(n)?;
    check_index("l", l, 1, n)?;
    let outer = sign(1 + l);
    let mut terms = Vec::with_capacity(l + 1);
    for k in 1..=l {
        terms.push(Term::new(
            &outer * sign(1 + k),
            vec![
                Minor::new(single(n, 1)?, single(n, k)?)?,
                Minor::new(all_but(n, 1)?, all_but(n, k)?)?,
            ],
        ));
    }
    terms.push(Term::new(-outer, vec![Minor::principal(IndexSet::full(n)?)]));
    DetExpr::new(n, terms, Relation::GeqZero)
}

/// Partial row sum of `A o (adj A)^T - det(A) I` along row `i`:
/// `(-1)^{i+l} sum_{k<=l} a*_{ik} >= 0`.
pub fn laplace_refined_diag(n: usize, i: usize, l: usize) -> Result<DetExpr> {
    check_n(n)?;
    check_index("i", i, 1, n)?;
    check_index("l", l, 1, n)?;
    let outer = sign(i + l);
    let mut terms = Vec::with_capacity(l + 1);
    for k in 1..=l {
        terms.push(Term::new(
            &outer * sign(i + k),
            vec![
                Minor::new(single(n, i)?, single(n, k)?)?,
                Minor::new(all_but(n, i)?, all_but(n, k)?)?,
            ],
        ));
        if k == i {
            terms.push(Term::new(-outer.clone(), vec![Minor::principal(IndexSet::full(n)?)]));
        }
    }
    DetExpr::new(n, terms, Relation::GeqZero)
}

/// `(-1)^{j+l} sum_{k<=l} (-1)^{j+k} a_{ik} det A_{jk} >= 0` for `i != j`.
pub fn laplace_refined_offdiag(n: usize, i: usize, j: usize, l: usize) -> Result<DetExpr> {
    check_n(n)?;
    check_index("i", i, 1, n)?;
    check_index("j", j, 1, n)?;
    check_index("l", l, 1, n)?;
    if i == j {
        return Err(Error::InvalidParameter("off-diagonal form needs i != j".into()));
    }
    let outer = sign(j + l);
    let mut terms = Vec::with_capacity(l);
    for k in 1..=l {
        terms.push(Term::new(
            &outer * sign(j + k),
            vec![
                Minor::new(single(n, i)?, single(n, k)?)?,
                Minor::new(all_but(n, j)?, all_but(n, k)?)?,
            ],
        ));
    }
    DetExpr::new(n, terms, Relation::GeqZero)
}

/// The full Laplace expansion `sum_k (-1)^{j+k} a_{ik} det A_{jk} - [i=j] det A = 0`.
pub fn laplace_identity(n: usize, i: usize, j: usize) -> Result<DetExpr> {
    check_n(n)?;
    check_index("i", i, 1, n)?;
    check_index("j", j, 1, n)?;
    let mut terms = Vec::with_capacity(n + 1);
    for k in 1..=n {
        terms.push(Term::new(
            sign(j + k),
            vec![
                Minor::new(single(n, i)?, single(n, k)?)?,
                Minor::new(all_but(n, j)?, all_but(n, k)?)?,
            ],
        ));
    }
    if i == j {
        terms.push(Term::new(int(-1), vec![Minor::principal(IndexSet::full(n)?)]));
    }
    DetExpr::new(n, terms, Relation::EqZero)
}

/// Parameters of the Karlin-type sums: column set `T`, row set `S` and the
/// omitted row `p`. The free columns `V = [n] \ T` are indexed from 1.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct KarlinParams {
    pub n: usize,
    pub t: IndexSet,
    pub s: IndexSet,
    pub p: usize,
}

impl KarlinParams {
    pub fn new(n: usize, t: &[usize], s: &[usize], p: usize) -> Result<Self> {
        check_n(n)?;
        check_index("p", p, 1, n)?;
        let t = IndexSet::new(n, t)?;
        let s = IndexSet::new(n, s)?;
        if s.contains(p) {
            return Err(Error::InvalidParameter(format!("S = {s} contains p = {p}")));
        }
        if s.len() != t.len() + 1 {
            return Err(Error::InvalidParameter(format!("|S| = {} but |T| + 1 = {}", s.len(), t.len() + 1)));
        }
        Ok(KarlinParams { n, t, s, p })
    }

    pub fn v(&self) -> Vec<usize> {
        self.t.complement().elements()
    }

    pub fn m(&self) -> usize {
        self.n - self.t.len()
    }

    fn term(&self, k: usize, coeff: BigRational) -> Result<Term> {
        let vk = self.v()[k - 1];
        Ok(Term::new(
            coeff,
            vec![
                Minor::new(self.s, self.t.with(vk)?)?,
                Minor::new(all_but(self.n, self.p)?, all_but(self.n, vk)?)?,
            ],
        ))
    }

    /// Every admissible parameter triple for dimension `n`.
    pub fn enumerate(n: usize) -> Result<Vec<KarlinParams>> {
        check_n(n)?;
        let mut out = Vec::new();
        for t in IndexSet::all_subsets(n)? {
            for p in 1..=n {
                for s in IndexSet::all_of_size(n, t.len() + 1)? {
                    if !s.contains(p) {
                        out.push(KarlinParams { n, t, s, p });
                    }
                }
            }
        }
        Ok(out)
    }
}

/// `(-1)^{1+l} sum_{k<=l} (-1)^{1+k} det A(S|T+v_k) det A([n]-p|[n]-v_k) >= 0`.
pub fn karlin_partial(params: &KarlinParams, l: usize) -> Result<DetExpr> {
    check_index("l", l, 1, params.m())?;
    let outer = sign(1 + l);
    let terms = (1..=l)
        .map(|k| params.term(k, &outer * sign(1 + k)))
        .collect::<Result<Vec<_>>>()?;
    DetExpr::new(params.n, terms, Relation::GeqZero)
}

/// The full alternating sum, asserted `= 0` for every real matrix.
pub fn karlin_identity(params: &KarlinParams) -> Result<DetExpr> {
    let terms = (1..=params.m())
        .map(|k| params.term(k, sign(1 + k)))
        .collect::<Result<Vec<_>>>()?;
    DetExpr::new_unmerged(params.n, terms, Relation::EqZero)
}

/// Splits `P = P1 + P2`, `Q = Q1 + Q2` for the fluctuating generalized
/// Laplace sums. Empty parts are allowed.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GenLaplaceParams {
    pub n: usize,
    pub p1: IndexSet,
    pub p2: IndexSet,
    pub q1: IndexSet,
    pub q2: IndexSet,
}

fn precedes(a: &IndexSet, b: &IndexSet) -> bool {
    match (a.last(), b.first()) {
        (Some(x), Some(y)) => x < y,
        _ => true,
    }
}

impl GenLaplaceParams {
    pub fn new(n: usize, p1: &[usize], p2: &[usize], q1: &[usize], q2: &[usize]) -> Result<Self> {
        check_n(n)?;
        let g = GenLaplaceParams {
            n,
            p1: IndexSet::new(n, p1)?,
            p2: IndexSet::new(n, p2)?,
            q1: IndexSet::new(n, q1)?,
            q2: IndexSet::new(n, q2)?,
        };
        let p = g.p();
        let q = g.q();
        if p.is_empty() || q.is_empty() || p.len() + q.len() != n {
            return Err(Error::InvalidParameter(format!(
                "need nonempty P, Q with |P| + |Q| = {n}, got |P| = {}, |Q| = {}",
                p.len(),
                q.len()
            )));
        }
        if !precedes(&g.p1, &g.p2) || !precedes(&g.q1, &g.q2) {
            return Err(Error::InvalidParameter("splits must satisfy P1 < P2 and Q1 < Q2".into()));
        }
        if !g.q1.is_subset(&g.p1) || !g.p2.is_subset(&g.q2) {
            return Err(Error::HypothesisViolated(format!(
                "need Q1 in P1 and P2 in Q2 (P1 = {}, P2 = {}, Q1 = {}, Q2 = {})",
                g.p1, g.p2, g.q1, g.q2
            )));
        }
        // The split conditions alone admit pairs such as P = {3}, Q = {1,2}
        // that fail on the identity matrix. Require the pair to be reachable
        // from ([1,d], [d+1,n]) by simultaneous row set operations.
        if !precedes(&p.difference(&q)?, &q.difference(&p)?) {
            return Err(Error::HypothesisViolated(format!(
                "every element of P \\ Q must precede every element of Q \\ P (P = {p}, Q = {q})"
            )));
        }
        Ok(g)
    }

    /// Finds a valid split of the given `P` and `Q`, if any.
    pub fn from_sets(n: usize, p: &[usize], q: &[usize]) -> Result<Self> {
        let ps = IndexSet::new(n, p)?.elements();
        let qs = IndexSet::new(n, q)?.elements();
        let mut last = None;
        for a in 0..=ps.len() {
            for b in 0..=qs.len() {
                match Self::new(n, &ps[..a], &ps[a..], &qs[..b], &qs[b..]) {
                    Ok(g) => return Ok(g),
                    Err(e) => last = Some(e),
                }
            }
        }
        Err(last.unwrap_or_else(|| Error::InvalidParameter("no split".into())))
    }

    pub fn p(&self) -> IndexSet {
        IndexSet::from_mask(self.n, self.p1.mask() | self.p2.mask()).expect("same ambient")
    }

    pub fn q(&self) -> IndexSet {
        IndexSet::from_mask(self.n, self.q1.mask() | self.q2.mask()).expect("same ambient")
    }

    pub fn d(&self) -> usize {
        self.p().len()
    }

    /// `J_{dl} = [n-d, n] \ {n-d+l}`.
    pub fn j(&self, l: usize) -> Result<IndexSet> {
        let d = self.d();
        check_index("l", l, 0, d)?;
        Ok(IndexSet::interval(self.n, self.n - d, self.n)?.without(self.n - d + l))
    }

    /// One valid split for every admissible `(P, Q)` of dimension `n`.
    pub fn enumerate(n: usize) -> Result<Vec<GenLaplaceParams>> {
        check_n(n)?;
        let mut out = Vec::new();
        for p in IndexSet::all_subsets(n)? {
            if p.is_empty() || p.len() == n {
                continue;
            }
            for q in IndexSet::all_of_size(n, n - p.len())? {
                if let Ok(g) = Self::from_sets(n, &p.elements(), &q.elements()) {
                    out.push(g);
                }
            }
        }
        Ok(out)
    }
}

/// `(-1)^{1+l} sum_{k=0}^{l} (-1)^{1+k} det A(P|J_{dk}) det A(Q|[n]-J_{dk}) >= 0`.
pub fn gen_laplace_fluct(params: &GenLaplaceParams, l: usize) -> Result<DetExpr> {
    let d = params.d();
    check_index("l", l, 0, d)?;
    let p = params.p();
    let q = params.q();
    let outer = sign(1 + l);
    let mut terms = Vec::with_capacity(l + 1);
    for k in 0..=l {
        let j = params.j(k)?;
        terms.push(Term::new(
            &outer * sign(1 + k),
            vec![Minor::new(p, j)?, Minor::new(q, j.complement())?],
        ));
    }
    DetExpr::new(params.n, terms, Relation::GeqZero)
}

/// Two nonincreasing block-size sequences of equal length summing to `n`,
/// with `mu` majorizing `lambda`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BJParams {
    pub n: usize,
    pub lambda: Vec<usize>,
    pub mu: Vec<usize>,
}

impl BJParams {
    pub fn new(n: usize, lambda: Vec<usize>, mu: Vec<usize>) -> Result<Self> {
        check_n(n)?;
        if lambda.is_empty() || lambda.len() != mu.len() {
            return Err(Error::InvalidParameter("lambda and mu need the same positive length".into()));
        }
        for (name, s) in [("lambda", &lambda), ("mu", &mu)] {
            if s.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::InvalidParameter(format!("{name} is not nonincreasing")));
            }
            if s.iter().sum::<usize>() != n {
                return Err(Error::InvalidParameter(format!("{name} does not sum to {n}")));
            }
        }
        let (mut a, mut b) = (0, 0);
        for (x, y) in lambda.iter().zip(&mu) {
            a += x;
            b += y;
            if a > b {
                return Err(Error::Precondition("mu must majorize lambda".into()));
            }
        }
        Ok(BJParams { n, lambda, mu })
    }

    pub fn r(&self) -> usize {
        self.lambda.len()
    }

    /// Every admissible pair with exactly `r` parts.
    pub fn enumerate(n: usize, r: usize) -> Result<Vec<BJParams>> {
        check_n(n)?;
        let parts = compositions_nonincreasing(n, r);
        let mut out = Vec::new();
        for l in &parts {
            for m in &parts {
                if let Ok(p) = BJParams::new(n, l.clone(), m.clone()) {
                    out.push(p);
                }
            }
        }
        Ok(out)
    }
}

fn compositions_nonincreasing(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(rem: usize, slots: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 0 {
            if rem == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for x in (0..=cap.min(rem)).rev() {
            cur.push(x);
            go(rem - x, slots - 1, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, r, n, &mut Vec::new(), &mut out);
    out
}

/// Ordered tuples of disjoint blocks covering `[n]` with the given sizes.
pub fn ordered_partitions(n: usize, sizes: &[usize]) -> Result<Vec<Vec<IndexSet>>> {
    if sizes.iter().sum::<usize>() != n {
        return Err(Error::InvalidParameter("block sizes must sum to n".into()));
    }
    if n > 12 {
        return Err(Error::DimensionTooLarge { n, limit: 12 });
    }
    fn go(free: IndexSet, sizes: &[usize], cur: &mut Vec<IndexSet>, out: &mut Vec<Vec<IndexSet>>) {
        let Some((&k, rest)) = sizes.split_first() else {
            out.push(cur.clone());
            return;
        };
        for block in IndexSet::all_of_size(free.ambient(), k).expect("ambient checked") {
            if block.is_subset(&free) {
                cur.push(block);
                go(free.difference(&block).expect("same ambient"), rest, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(IndexSet::full(n)?, sizes, &mut Vec::new(), &mut out);
    Ok(out)
}

fn factorial_product(sizes: &[usize]) -> BigRational {
    let mut f = BigInt::one();
    for &s in sizes {
        for k in 2..=s {
            f *= k;
        }
    }
    BigRational::from_integer(f)
}

fn partition_terms(
    n: usize,
    sizes: &[usize],
    coeff: &BigRational,
    shift: Option<(usize, usize)>,
) -> Result<Vec<Term>> {
    let mut terms = Vec::new();
    for part in ordered_partitions(n, sizes)? {
        let mut blocks = part;
        if let Some((u, v)) = shift {
            if blocks.iter().any(|b| b.contains(u) && b.contains(v)) {
                continue;
            }
            for b in &mut blocks {
                *b = shift_set(b, u, v)?;
            }
        }
        let minors: Vec<Minor> = blocks
            .into_iter()
            .filter(|b| !b.is_empty())
            .map(Minor::principal)
            .collect();
        terms.push(Term::new(coeff.clone(), minors));
    }
    Ok(terms)
}

fn bj_expr(params: &BJParams, shift: Option<(usize, usize)>) -> Result<DetExpr> {
    let mut terms = partition_terms(params.n, &params.lambda, &factorial_product(&params.lambda), shift)?;
    terms.extend(partition_terms(params.n, &params.mu, &-factorial_product(&params.mu), shift)?);
    DetExpr::new(params.n, terms, Relation::GeqZero)
}

/// `lambda! sum_I prod det A(I_k) - mu! sum_J prod det A(J_k) >= 0`.
pub fn barrett_johnson(params: &BJParams) -> Result<DetExpr> {
    bj_expr(params, None)
}

/// The same sums restricted to partitions with no block holding both `u`
/// and `v`, with `u` moved to `v` inside its block.
pub fn barrett_johnson_shifted(params: &BJParams, u: usize, v: usize) -> Result<DetExpr> {
    check_index("u", u, 1, params.n)?;
    check_index("v", v, 1, params.n)?;
    if u.abs_diff(v) != 1 {
        return Err(Error::NonConsecutive { u, v });
    }
    bj_expr(params, Some((u, v)))
}

/// Row operations taking the row-set pair `(p, q)` to `(x, y)` for `x`
/// inside `y`: first both sets are packed to `[1,|p|]`, `[1,|q|]`, then
/// spread out by the order-preserving maps. Requires `|p| <= |q|`,
/// `|x| = |p|`, `|y| = |q|`.
pub fn containment_sequence(p: &IndexSet, q: &IndexSet, x: &IndexSet, y: &IndexSet) -> Result<Vec<OpSpec>> {
    let n = p.ambient();
    for s in [q, x, y] {
        if s.ambient() != n {
            return Err(Error::AmbientMismatch { expected: n, found: s.ambient() });
        }
    }
    if p.len() > q.len() || x.len() != p.len() || y.len() != q.len() || !x.is_subset(y) {
        return Err(Error::InvalidParameter(
            "need |P| <= |Q|, |X| = |P|, |Y| = |Q| and X inside Y".into(),
        ));
    }
    let mut ops = Vec::new();
    for _ in 0..q.len() {
        for k in (2..=n).rev() {
            ops.push(OpSpec::row(k, k - 1));
        }
    }
    let ye = y.elements();
    let positions: Vec<usize> = x
        .iter()
        .map(|xe| ye.iter().position(|&e| e == xe).expect("x inside y") + 1)
        .collect();
    for (j0, &target) in positions.iter().enumerate().rev() {
        for k in (j0 + 1)..target {
            ops.push(OpSpec::row(k, k + 1));
        }
    }
    for (j0, &target) in ye.iter().enumerate().rev() {
        for k in (j0 + 1)..target {
            ops.push(OpSpec::row(k, k + 1));
        }
    }
    Ok(ops)
}

/// A generator together with its parameters.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Family {
    Gk { n: usize, l: usize },
    LaplaceDiag { n: usize, i: usize, l: usize },
    LaplaceOffdiag { n: usize, i: usize, j: usize, l: usize },
    Karlin { params: KarlinParams, l: usize },
    KarlinId { params: KarlinParams },
    GenLaplace { params: GenLaplaceParams, l: usize },
    Bj { params: BJParams },
    BjShifted { params: BJParams, u: usize, v: usize },
}

/// Flat JSON form of every family's parameters; unused fields are omitted.
#[derive(Clone, Default, Debug, Serialize, Deserialize)]
pub struct FamilyParamsJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<usize>>,
    #[serde(rename = "S", skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(rename = "P1", skip_serializing_if = "Option::is_none")]
    pub p1: Option<Vec<usize>>,
    #[serde(rename = "P2", skip_serializing_if = "Option::is_none")]
    pub p2: Option<Vec<usize>>,
    #[serde(rename = "Q1", skip_serializing_if = "Option::is_none")]
    pub q1: Option<Vec<usize>>,
    #[serde(rename = "Q2", skip_serializing_if = "Option::is_none")]
    pub q2: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<usize>,
}

fn need<T: Clone>(x: &Option<T>, name: &str) -> Result<T> {
    x.clone().ok_or_else(|| Error::InvalidParameter(format!("missing parameter {name}")))
}

pub const FAMILY_NAMES: [&str; 8] =
    ["gk", "laplace-diag", "laplace-offdiag", "karlin", "karlin-id", "genlaplace", "bj", "bj-shifted"];

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Gk { .. } => "gk",
            Family::LaplaceDiag { .. } => "laplace-diag",
            Family::LaplaceOffdiag { .. } => "laplace-offdiag",
            Family::Karlin { .. } => "karlin",
            Family::KarlinId { .. } => "karlin-id",
            Family::GenLaplace { .. } => "genlaplace",
            Family::Bj { .. } => "bj",
            Family::BjShifted { .. } => "bj-shifted",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Family::Gk { n, .. } | Family::LaplaceDiag { n, .. } | Family::LaplaceOffdiag { n, .. } => *n,
            Family::Karlin { params, .. } | Family::KarlinId { params } => params.n,
            Family::GenLaplace { params, .. } => params.n,
            Family::Bj { params } | Family::BjShifted { params, .. } => params.n,
        }
    }

    pub fn expr(&self) -> Result<DetExpr> {
        match self {
            Family::Gk { n, l } => gantmacher_krein(*n, *l),
            Family::LaplaceDiag { n, i, l } => laplace_refined_diag(*n, *i, *l),
            Family::LaplaceOffdiag { n, i, j, l } => laplace_refined_offdiag(*n, *i, *j, *l),
            Family::Karlin { params, l } => karlin_partial(params, *l),
            Family::KarlinId { params } => karlin_identity(params),
            Family::GenLaplace { params, l } => gen_laplace_fluct(params, *l),
            Family::Bj { params } => barrett_johnson(params),
            Family::BjShifted { params, u, v } => barrett_johnson_shifted(params, *u, *v),
        }
    }

    pub fn from_params(name: &str, j: &FamilyParamsJson) -> Result<Family> {
        let n = need(&j.n, "n")?;
        let fam = match name {
            "gk" => Family::Gk { n, l: need(&j.l, "l")? },
            "laplace-diag" => Family::LaplaceDiag { n, i: need(&j.i, "i")?, l: need(&j.l, "l")? },
            "laplace-offdiag" => Family::LaplaceOffdiag {
                n,
                i: need(&j.i, "i")?,
                j: need(&j.j, "j")?,
                l: need(&j.l, "l")?,
            },
            "karlin" | "karlin-id" => {
                let params = KarlinParams::new(
                    n,
                    &j.t.clone().unwrap_or_default(),
                    &need(&j.s, "S")?,
                    need(&j.p, "p")?,
                )?;
                if name == "karlin" {
                    Family::Karlin { params, l: need(&j.l, "l")? }
                } else {
                    Family::KarlinId { params }
                }
            }
            "genlaplace" => Family::GenLaplace {
                params: GenLaplaceParams::new(
                    n,
                    &j.p1.clone().unwrap_or_default(),
                    &j.p2.clone().unwrap_or_default(),
                    &j.q1.clone().unwrap_or_default(),
                    &j.q2.clone().unwrap_or_default(),
                )?,
                l: need(&j.l, "l")?,
            },
            "bj" | "bj-shifted" => {
                let params = BJParams::new(n, need(&j.lambda, "lambda")?, need(&j.mu, "mu")?)?;
                if name == "bj" {
                    Family::Bj { params }
                } else {
                    Family::BjShifted { params, u: need(&j.u, "u")?, v: need(&j.v, "v")? }
                }
            }
            other => return Err(Error::InvalidParameter(format!("unknown family {other}"))),
        };
        fam.expr()?;
        Ok(fam)
    }

    pub fn to_params(&self) -> FamilyParamsJson {
        let mut j = FamilyParamsJson { n: Some(self.n()), ..Default::default() };
        match self {
            Family::Gk { l, .. } => j.l = Some(*l),
            Family::LaplaceDiag { i, l, .. } => {
                j.i = Some(*i);
                j.l = Some(*l);
            }
            Family::LaplaceOffdiag { i, j: jj, l, .. } => {
                j.i = Some(*i);
                j.j = Some(*jj);
                j.l = Some(*l);
            }
            Family::Karlin { params, l } => {
                karlin_fields(&mut j, params);
                j.l = Some(*l);
            }
            Family::KarlinId { params } => karlin_fields(&mut j, params),
            Family::GenLaplace { params, l } => {
                j.p1 = Some(params.p1.elements());
                j.p2 = Some(params.p2.elements());
                j.q1 = Some(params.q1.elements());
                j.q2 = Some(params.q2.elements());
                j.l = Some(*l);
            }
            Family::Bj { params } => bj_fields(&mut j, params),
            Family::BjShifted { params, u, v } => {
                bj_fields(&mut j, params);
                j.u = Some(*u);
                j.v = Some(*v);
            }
        }
        j
    }

    /// Every admissible inequality instance of dimension `n`; Barrett-Johnson
    /// pairs have at most `max_parts` parts. Identities are not included.
    pub fn admissible(n: usize, max_parts: usize) -> Result<Vec<Family>> {
        let mut out = Vec::new();
        for l in 1..=n {
            out.push(Family::Gk { n, l });
            for i in 1..=n {
                out.push(Family::LaplaceDiag { n, i, l });
                for j in (1..=n).filter(|&j| j != i) {
                    out.push(Family::LaplaceOffdiag { n, i, j, l });
                }
            }
        }
        for params in KarlinParams::enumerate(n)? {
            for l in 1..=params.m() {
                out.push(Family::Karlin { params, l });
            }
        }
        for params in GenLaplaceParams::enumerate(n)? {
            for l in 0..=params.d() {
                out.push(Family::GenLaplace { params, l });
            }
        }
        for r in 1..=max_parts {
            for params in BJParams::enumerate(n, r)? {
                for u in 1..n {
                    out.push(Family::BjShifted { params: params.clone(), u, v: u + 1 });
                    out.push(Family::BjShifted { params: params.clone(), u: u + 1, v: u });
                }
                out.push(Family::Bj { params });
            }
        }
        Ok(out)
    }
}

fn karlin_fields(j: &mut FamilyParamsJson, p: &KarlinParams) {
    j.t = Some(p.t.elements());
    j.s = Some(p.s.elements());
    j.p = Some(p.p);
}

fn bj_fields(j: &mut FamilyParamsJson, p: &BJParams) {
    j.lambda = Some(p.lambda.clone());
    j.mu = Some(p.mu.clone());
}
