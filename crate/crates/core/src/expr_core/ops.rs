use std::fmt;

use num_traits::Signed;

use super::expr::{DetExpr, Minor, Term};
use super::index_set::IndexSet;
use crate::error::{Error, Result};

fn check_pair(n: usize, u: usize, v: usize) -> Result<()> {
    for x in [u, v] {
        if x == 0 || x > n {
            return Err(Error::OutOfRange { index: x, n });
        }
    }
    if u.abs_diff(v) > 1 {
        return Err(Error::NonConsecutive { u, v });
    }
    Ok(())
}

/// Replaces `u` by `v` when `u` is present and `v` absent; otherwise returns `set`.
pub fn shift_set(set: &IndexSet, u: usize, v: usize) -> Result<IndexSet> {
    check_pair(set.ambient(), u, v)?;
    Ok(shift_unchecked(set, u, v))
}

#[inline]
pub(crate) fn shift_unchecked(set: &IndexSet, u: usize, v: usize) -> IndexSet {
    if u != v && set.contains(u) && !set.contains(v) {
        let mask = (set.mask() & !(1u64 << (u - 1))) | (1u64 << (v - 1));
        IndexSet::from_mask(set.ambient(), mask).expect("shift stays in range")
    } else {
        *set
    }
}

#[inline]
fn shifts(set: &IndexSet, u: usize, v: usize) -> bool {
    u != v && set.contains(u) && !set.contains(v)
}

/// Number of sets containing `u`.
pub fn multiplicity(sets: &[IndexSet], u: usize) -> Result<usize> {
    let n = common_ambient(sets)?;
    if let Some(n) = n {
        if u == 0 || u > n {
            return Err(Error::OutOfRange { index: u, n });
        }
    }
    Ok(sets.iter().filter(|s| s.contains(u)).count())
}

/// Number of sets containing `u` but not `v`.
pub fn shift_multiplicity(sets: &[IndexSet], u: usize, v: usize) -> Result<usize> {
    let n = common_ambient(sets)?;
    if let Some(n) = n {
        check_pair(n, u, v)?;
        if u == v {
            return Err(Error::NonConsecutive { u, v });
        }
    }
    Ok(sets.iter().filter(|s| shifts(s, u, v)).count())
}

fn common_ambient(sets: &[IndexSet]) -> Result<Option<usize>> {
    let mut n = None;
    for s in sets {
        match n {
            None => n = Some(s.ambient()),
            Some(m) if m != s.ambient() => {
                return Err(Error::AmbientMismatch {
                    expected: m,
                    found: s.ambient(),
                })
            }
            _ => {}
        }
    }
    Ok(n)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Axis {
    Row,
    Col,
}

/// A row or column operation `R_(u,v)` / `C_(u,v)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct OpSpec {
    pub axis: Axis,
    pub u: usize,
    pub v: usize,
}

impl OpSpec {
    pub fn row(u: usize, v: usize) -> Self {
        OpSpec { axis: Axis::Row, u, v }
    }

    pub fn col(u: usize, v: usize) -> Self {
        OpSpec { axis: Axis::Col, u, v }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        check_pair(n, self.u, self.v)
    }

    pub fn is_identity(&self) -> bool {
        self.u == self.v
    }

    /// The op with `u` and `v` exchanged.
    pub fn swapped(&self) -> Self {
        OpSpec {
            axis: self.axis,
            u: self.v,
            v: self.u,
        }
    }

    /// Every non-identity op on `[n]` in canonical order: rows before
    /// columns, ascending `u`, and for equal `u` the move to `u-1` first.
    pub fn all_nontrivial(n: usize) -> Vec<OpSpec> {
        let mut out = Vec::new();
        for axis in [Axis::Row, Axis::Col] {
            for u in 1..=n {
                if u > 1 {
                    out.push(OpSpec { axis, u, v: u - 1 });
                }
                if u < n {
                    out.push(OpSpec { axis, u, v: u + 1 });
                }
            }
        }
        out
    }

    /// Parses `"R1,2;C3,4"` (whitespace tolerated, `;` separated).
    pub fn parse_list(s: &str) -> Result<Vec<OpSpec>> {
        let mut out = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (axis, rest) = match part.chars().next() {
                Some('R') | Some('r') => (Axis::Row, &part[1..]),
                Some('C') | Some('c') => (Axis::Col, &part[1..]),
                _ => return Err(Error::Parse(format!("op {part:?} must start with R or C"))),
            };
            let rest = rest.trim().trim_start_matches('(').trim_end_matches(')');
            let nums: Vec<&str> = rest.split(',').map(str::trim).collect();
            if nums.len() != 2 {
                return Err(Error::Parse(format!("op {part:?} needs two indices")));
            }
            let parse = |x: &str| {
                x.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad index {x:?} in {part:?}")))
            };
            out.push(OpSpec {
                axis,
                u: parse(nums[0])?,
                v: parse(nums[1])?,
            });
        }
        Ok(out)
    }
}

impl fmt::Display for OpSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = match self.axis {
            Axis::Row => 'R',
            Axis::Col => 'C',
        };
        write!(f, "{a}({},{})", self.u, self.v)
    }
}

/// What an op did to each term of the input.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OpApplicationReport {
    pub shift_counts: Vec<usize>,
    pub max_count: usize,
    pub survivors: Vec<usize>,
}

fn axis_set(m: &Minor, axis: Axis) -> &IndexSet {
    match axis {
        Axis::Row => &m.rows,
        Axis::Col => &m.cols,
    }
}

/// Number of minors in `t` whose `axis` set moves under the op.
pub fn term_shift_count(t: &Term, op: &OpSpec) -> usize {
    t.minors
        .iter()
        .filter(|m| shifts(axis_set(m, op.axis), op.u, op.v))
        .count()
}

fn shift_minor(m: &Minor, op: &OpSpec) -> Minor {
    match op.axis {
        Axis::Row => Minor {
            rows: shift_unchecked(&m.rows, op.u, op.v),
            cols: m.cols,
        },
        Axis::Col => Minor {
            rows: m.rows,
            cols: shift_unchecked(&m.cols, op.u, op.v),
        },
    }
}

/// Applies the op to the term list as given, without merging afterwards.
/// Term order and the order of minors in each product are preserved.
pub fn apply_op_unmerged(e: &DetExpr, op: &OpSpec) -> Result<(DetExpr, OpApplicationReport)> {
    op.validate(e.n())?;
    let shift_counts: Vec<usize> = e.terms().iter().map(|t| term_shift_count(t, op)).collect();
    let max_count = shift_counts.iter().copied().max().unwrap_or(0);
    let survivors: Vec<usize> = (0..shift_counts.len())
        .filter(|&i| shift_counts[i] == max_count)
        .collect();
    let terms: Vec<Term> = survivors
        .iter()
        .map(|&i| {
            let t = &e.terms()[i];
            Term::new(t.coeff.clone(), t.minors.iter().map(|m| shift_minor(m, op)).collect())
        })
        .collect();
    let out = DetExpr::new_unmerged(e.n(), terms, e.relation())?;
    Ok((
        out,
        OpApplicationReport {
            shift_counts,
            max_count,
            survivors,
        },
    ))
}

/// Applies one row/column operation. Shift counts are taken on the input
/// term list; the surviving terms are merged afterwards. The relation is
/// carried over unchanged.
pub fn apply_op(e: &DetExpr, op: &OpSpec) -> Result<(DetExpr, OpApplicationReport)> {
    let (out, report) = apply_op_unmerged(e, op)?;
    Ok((out.merged(), report))
}

/// Applies `ops` left to right.
pub fn apply_sequence(e: &DetExpr, ops: &[OpSpec]) -> Result<DetExpr> {
    let mut cur = e.clone();
    for op in ops {
        cur = apply_op(&cur, op)?.0;
    }
    Ok(cur)
}

/// Same as [`apply_sequence`] without merging between steps.
pub fn apply_sequence_unmerged(e: &DetExpr, ops: &[OpSpec]) -> Result<DetExpr> {
    let mut cur = e.clone();
    for op in ops {
        cur = apply_op_unmerged(&cur, op)?.0;
    }
    Ok(cur)
}

/// The formal inverse: reversed order, each pair swapped.
pub fn inverse_sequence(ops: &[OpSpec]) -> Vec<OpSpec> {
    ops.iter().rev().map(OpSpec::swapped).collect()
}

/// True when a `>= 0` expression has at least one term and only negative
/// coefficients; such an expression is negative on every totally positive
/// matrix. Other relations never certify.
pub fn is_certifiably_false(e: &DetExpr) -> bool {
    e.relation() == super::expr::Relation::GeqZero
        && !e.terms().is_empty()
        && e.terms().iter().all(|t| t.coeff.is_negative())
}

#[cfg(test)]
mod tests {
    use super::super::expr::{int, Relation};
    use super::*;

    fn s(n: usize, e: &[usize]) -> IndexSet {
        IndexSet::new(n, e).unwrap()
    }

    fn m(n: usize, r: &[usize], c: &[usize]) -> Minor {
        Minor::from_lists(n, r, c).unwrap()
    }

    #[test]
    fn shift_set_cases() {
        assert_eq!(shift_set(&s(3, &[1, 3]), 1, 2).unwrap(), s(3, &[2, 3]));
        assert_eq!(shift_set(&s(3, &[1, 2]), 1, 2).unwrap(), s(3, &[1, 2]));
        assert_eq!(shift_set(&s(3, &[3]), 1, 2).unwrap(), s(3, &[3]));
        assert_eq!(shift_set(&s(3, &[1]), 1, 1).unwrap(), s(3, &[1]));
        assert!(shift_set(&s(3, &[1]), 1, 3).is_err());
        assert!(shift_set(&s(3, &[1]), 3, 4).is_err());
        assert!(shift_set(&s(3, &[1]), 0, 1).is_err());
    }

    #[test]
    fn multiplicities() {
        let sets = [s(6, &[1, 2, 3, 6]), s(6, &[3, 4])];
        assert_eq!(multiplicity(&sets, 3).unwrap(), 2);
        assert_eq!(multiplicity(&sets, 5).unwrap(), 0);
        assert_eq!(multiplicity(&[s(1, &[1]), s(1, &[1]), s(1, &[1])], 1).unwrap(), 3);
        assert_eq!(shift_multiplicity(&[s(6, &[1, 3, 6]), s(6, &[2, 3, 4])], 1, 2).unwrap(), 1);
        assert_eq!(shift_multiplicity(&sets, 1, 2).unwrap(), 0);
        assert_eq!(shift_multiplicity(&[s(2, &[1]), s(2, &[1])], 1, 2).unwrap(), 2);
        assert!(shift_multiplicity(&sets, 1, 3).is_err());
        assert!(multiplicity(&sets, 7).is_err());
    }

    #[test]
    fn identity_op_is_noop() {
        let e = DetExpr::new(
            2,
            vec![
                Term::new(int(1), vec![m(2, &[1], &[1])]),
                Term::new(int(-1), vec![m(2, &[2], &[2])]),
            ],
            Relation::GeqZero,
        )
        .unwrap();
        let (out, rep) = apply_op(&e, &OpSpec::row(2, 2)).unwrap();
        assert_eq!(out, e);
        assert_eq!(rep.max_count, 0);
        assert_eq!(rep.survivors, vec![0, 1]);
    }

    #[test]
    fn single_term_moves() {
        let e = DetExpr::new(2, vec![Term::new(int(1), vec![m(2, &[1], &[1])])], Relation::GeqZero).unwrap();
        let (out, _) = apply_op(&e, &OpSpec::row(1, 2)).unwrap();
        assert_eq!(out.terms()[0].minors, vec![m(2, &[2], &[1])]);
        let (out, _) = apply_op(&e, &OpSpec::col(1, 2)).unwrap();
        assert_eq!(out.terms()[0].minors, vec![m(2, &[1], &[2])]);
    }

    #[test]
    fn counts_taken_before_merge() {
        // Two copies of the same product that would cancel if merged first.
        let a = m(2, &[1], &[1]);
        let b = m(2, &[2], &[1]);
        let e = DetExpr::new_unmerged(
            2,
            vec![Term::new(int(1), vec![a]), Term::new(int(-1), vec![a]), Term::new(int(5), vec![b])],
            Relation::Unasserted,
        )
        .unwrap();
        let (out, rep) = apply_op(&e, &OpSpec::row(1, 2)).unwrap();
        assert_eq!(rep.shift_counts, vec![1, 1, 0]);
        assert_eq!(rep.survivors, vec![0, 1]);
        assert!(out.is_zero());
    }

    #[test]
    fn certifiable_falsity() {
        let neg = DetExpr::new(2, vec![Term::new(int(-1), vec![m(2, &[1], &[1])])], Relation::GeqZero).unwrap();
        assert!(is_certifiably_false(&neg));
        assert!(!is_certifiably_false(&DetExpr::zero(2, Relation::GeqZero).unwrap()));
        let mixed = DetExpr::new(
            2,
            vec![Term::new(int(1), vec![m(2, &[1], &[1])]), Term::new(int(-1), vec![m(2, &[2], &[2])])],
            Relation::GeqZero,
        )
        .unwrap();
        assert!(!is_certifiably_false(&mixed));
        assert!(!is_certifiably_false(&neg.clone().with_relation(Relation::Unasserted)));
    }

    #[test]
    fn op_parsing() {
        let ops = OpSpec::parse_list("R1,2; C3,4").unwrap();
        assert_eq!(ops, vec![OpSpec::row(1, 2), OpSpec::col(3, 4)]);
        assert!(OpSpec::parse_list("X1,2").is_err());
        assert!(OpSpec::parse_list("R1").is_err());
        assert_eq!(OpSpec::parse_list("").unwrap(), vec![]);
    }

    #[test]
    fn canonical_op_order() {
        let ops = OpSpec::all_nontrivial(3);
        let shown: Vec<String> = ops.iter().map(|o| o.to_string()).collect();
        assert_eq!(
            shown,
            vec!["R(1,2)", "R(2,1)", "R(2,3)", "R(3,2)", "C(1,2)", "C(2,1)", "C(2,3)", "C(3,2)"]
        );
    }

    #[test]
    fn inverse_reverses_and_swaps() {
        let ops = vec![OpSpec::row(3, 2), OpSpec::col(4, 3)];
        assert_eq!(inverse_sequence(&ops), vec![OpSpec::col(3, 4), OpSpec::row(2, 3)]);
    }
}
