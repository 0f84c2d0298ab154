use std::collections::HashSet;

use num_rational::BigRational;

use super::SmallestMultQuery;
use crate::error::Result;
use crate::expr_core::{apply_op, is_certifiably_false, DetExpr, Minor, OpSpec};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SearchStatus {
    /// A falsifying sequence was found.
    Found,
    /// Every expandable state was visited without success.
    Exhausted,
    /// The depth limit stopped the search first.
    DepthLimit,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub witness: Option<Vec<OpSpec>>,
    /// Number of BFS levels completed or reached.
    pub depth: usize,
    pub states_visited: usize,
}

type StateKey = Vec<(Vec<Minor>, BigRational)>;

fn state_key(e: &DetExpr) -> StateKey {
    let mut k: StateKey = e.terms().iter().map(|t| (t.key(), t.coeff.clone())).collect();
    k.sort();
    k
}

/// Outcome of one op on a search state.
enum Step {
    Hit,
    Expand(DetExpr),
    Skip,
}

fn step(cur: &DetExpr, op: &OpSpec) -> Result<Step> {
    let (child, report) = apply_op(cur, op)?;
    if report.max_count == 0 {
        return Ok(Step::Skip);
    }
    if is_certifiably_false(&child) {
        return Ok(Step::Hit);
    }
    if child.has_positive_term() && child.has_negative_term() {
        Ok(Step::Expand(child))
    } else {
        Ok(Step::Skip)
    }
}

/// Breadth-first search for an op sequence turning the `>= 0` expression
/// into a certifiably false one. Only ops that move some minor and keep
/// terms of both signs are expanded further. Ops are tried in
/// [`OpSpec::all_nontrivial`] order, so the witness is deterministic.
pub fn falsify_search_expr(e: &DetExpr, max_depth: usize) -> Result<SearchOutcome> {
    let ops = OpSpec::all_nontrivial(e.n());
    let mut visited: HashSet<StateKey> = HashSet::new();
    visited.insert(state_key(e));
    let mut frontier: Vec<(DetExpr, Vec<OpSpec>)> = vec![(e.clone(), Vec::new())];
    for depth in 1..=max_depth {
        let mut next = Vec::new();
        for (cur, path) in &frontier {
            for op in &ops {
                match step(cur, op)? {
                    Step::Hit => {
                        let mut w = path.clone();
                        w.push(*op);
                        return Ok(SearchOutcome {
                            status: SearchStatus::Found,
                            witness: Some(w),
                            depth,
                            states_visited: visited.len(),
                        });
                    }
                    Step::Expand(child) => {
                        if visited.insert(state_key(&child)) {
                            let mut p = path.clone();
                            p.push(*op);
                            next.push((child, p));
                        }
                    }
                    Step::Skip => {}
                }
            }
        }
        if next.is_empty() {
            return Ok(SearchOutcome {
                status: SearchStatus::Exhausted,
                witness: None,
                depth,
                states_visited: visited.len(),
            });
        }
        frontier = next;
    }
    Ok(SearchOutcome {
        status: if frontier.is_empty() { SearchStatus::Exhausted } else { SearchStatus::DepthLimit },
        witness: None,
        depth: max_depth,
        states_visited: visited.len(),
    })
}

/// [`falsify_search_expr`] on the query's canonical expression.
pub fn falsify_search(q: &SmallestMultQuery, max_depth: usize) -> Result<SearchOutcome> {
    falsify_search_expr(&q.canonical_expr(), max_depth)
}

/// Every falsifying sequence of the minimal length (no state merging), in
/// canonical op order. Empty when none exists within `max_depth`.
pub fn falsify_search_all_minimal(e: &DetExpr, max_depth: usize) -> Result<Vec<Vec<OpSpec>>> {
    let first = falsify_search_expr(e, max_depth)?;
    if first.status != SearchStatus::Found {
        return Ok(Vec::new());
    }
    let depth = first.depth;
    let ops = OpSpec::all_nontrivial(e.n());
    let mut out = Vec::new();
    let mut path = Vec::new();
    collect(e, depth, &ops, &mut path, &mut out)?;
    Ok(out)
}

fn collect(
    cur: &DetExpr,
    remaining: usize,
    ops: &[OpSpec],
    path: &mut Vec<OpSpec>,
    out: &mut Vec<Vec<OpSpec>>,
) -> Result<()> {
    for op in ops {
        match step(cur, op)? {
            Step::Hit if remaining == 1 => {
                let mut w = path.clone();
                w.push(*op);
                out.push(w);
            }
            Step::Expand(child) if remaining > 1 => {
                path.push(*op);
                collect(&child, remaining - 1, ops, path, out)?;
                path.pop();
            }
            _ => {}
        }
    }
    Ok(())
}
