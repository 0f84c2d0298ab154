use super::{decide, SmallestMultQuery};
use crate::error::{Error, Result};
use crate::expr_core::{apply_sequence_unmerged, shift_set, IndexSet, OpSpec};

/// A complementary query plus the op sequences leading from it back to the
/// original query. Apply `col_ops` first, then `row_ops`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Reduction {
    pub ancestor: SmallestMultQuery,
    pub row_ops: Vec<OpSpec>,
    pub col_ops: Vec<OpSpec>,
}

/// Finds a complementary query from which `q` follows by row and column
/// operations. Requires `decide(q)` to hold.
///
/// Each round removes one index shared by the two row sets of each side:
/// the smallest shared index is pulled down to 1, position 2 is emptied,
/// and one set on each side gives up 1 for 2. Columns are handled the same
/// way on the transposed query.
pub fn reduce_to_complementary(q: &SmallestMultQuery) -> Result<Reduction> {
    if !decide(q).holds() {
        return Err(Error::Precondition(
            "complementary reduction needs a query that holds".into(),
        ));
    }
    let (after_rows, row_pairs) = reduce_rows(q)?;
    let (after_cols_t, col_pairs) = reduce_rows(&after_rows.transposed())?;
    Ok(Reduction {
        ancestor: after_cols_t.transposed(),
        row_ops: row_pairs.into_iter().map(|(u, v)| OpSpec::row(u, v)).collect(),
        col_ops: col_pairs.into_iter().map(|(u, v)| OpSpec::col(u, v)).collect(),
    })
}

/// Applies the reduction's sequences to the ancestor's index families
/// (without merging) and returns the resulting query, or `None` if a side
/// vanished along the way.
pub fn replay_reduction(r: &Reduction) -> Result<Option<SmallestMultQuery>> {
    let mut ops = r.col_ops.clone();
    ops.extend_from_slice(&r.row_ops);
    let e = apply_sequence_unmerged(&r.ancestor.canonical_expr_unmerged(), &ops)?;
    if e.terms().len() != 2 {
        return Ok(None);
    }
    let hi = &e.terms()[0].minors;
    let lo = &e.terms()[1].minors;
    Ok(Some(SmallestMultQuery::new(
        r.ancestor.n(),
        lo[0].rows,
        lo[1].rows,
        lo[0].cols,
        lo[1].cols,
        hi[0].rows,
        hi[1].rows,
        hi[0].cols,
        hi[1].cols,
    )?))
}

type Pair = (usize, usize);

fn shift_rows(q: &mut SmallestMultQuery, u: usize, v: usize) -> Result<()> {
    for s in [&mut q.p1, &mut q.p2, &mut q.i1, &mut q.i2] {
        *s = shift_set(s, u, v)?;
    }
    Ok(())
}

fn inverse_pairs(forward: &[Pair]) -> Vec<Pair> {
    forward.iter().rev().map(|&(u, v)| (v, u)).collect()
}

fn mult(q: &SmallestMultQuery, k: usize) -> usize {
    q.p1.contains(k) as usize + q.p2.contains(k) as usize
}

/// Row phase. Returns the query with complementary row sets and the row
/// pairs (ancestor-to-original order).
fn reduce_rows(q: &SmallestMultQuery) -> Result<(SmallestMultQuery, Vec<Pair>)> {
    let n = q.n();
    let mut cur = *q;
    let mut rounds: Vec<Vec<Pair>> = Vec::new();
    loop {
        let common = cur.p1.intersection(&cur.p2)?;
        let Some(u) = common.first() else { break };
        if cur.i1.intersection(&cur.i2)?.len() != common.len() {
            return Err(Error::Precondition("row multiplicities differ between sides".into()));
        }
        // Pull the smallest shared index down to 1.
        let mut n1: Vec<Pair> = Vec::new();
        for k in (2..=u).rev() {
            shift_rows(&mut cur, k, k - 1)?;
            n1.push((k, k - 1));
        }
        // Empty position 2 by pushing a run upward into the first gap.
        let mut n2: Vec<Pair> = Vec::new();
        if mult(&cur, 2) != 0 {
            let a = (3..=n)
                .find(|&k| mult(&cur, k) == 0)
                .ok_or_else(|| Error::Precondition("no free row index to open a gap".into()))?;
            for k in (3..=a).rev() {
                shift_rows(&mut cur, k - 1, k)?;
                n2.push((k - 1, k));
            }
        }
        // Split 1 into 1 and 2, alternating with the smallest element of M.
        let pf = cur.to_principal_form();
        let (x_idx, y_idx) = match pf.m.first() {
            None => (1, 1),
            Some(m) => (
                if pf.r1.contains(m) { 1 } else { 0 },
                if pf.k1.contains(m) { 1 } else { 0 },
            ),
        };
        let pick = |idx: usize, a: &mut IndexSet, b: &mut IndexSet| -> Result<()> {
            let s = if idx == 0 { a } else { b };
            *s = shift_set(s, 1, 2)?;
            Ok(())
        };
        pick(x_idx, &mut cur.p1, &mut cur.p2)?;
        pick(y_idx, &mut cur.i1, &mut cur.i2)?;
        let mut round = vec![(2, 1)];
        round.extend(inverse_pairs(&n2));
        round.extend(inverse_pairs(&n1));
        rounds.push(round);
    }
    let pairs = rounds.into_iter().rev().flatten().collect();
    Ok((cur, pairs))
}
