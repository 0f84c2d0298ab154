use std::collections::{HashMap, VecDeque};

use super::{decide_principal, Outcome, SmallestMultQuery, Verdict, Witness};
use crate::error::{Error, Result};
use crate::expr_core::OpSpec;

/// Default cap on explored `(R1, R2, K1, K2)` states.
pub const DEFAULT_STATE_BUDGET: usize = 2_000_000;

type State = [u64; 4];

#[inline]
fn shift_mask(m: u64, u: usize, v: usize) -> u64 {
    let bu = 1u64 << (u - 1);
    let bv = 1u64 << (v - 1);
    if m & bu != 0 && m & bv == 0 {
        (m & !bu) | bv
    } else {
        m
    }
}

/// Decides the query by exploring every state reachable from
/// `((R1, R2), (K1, K2))` under row set operations on `[2n]`. A step that
/// shifts more R-sets than K-sets leaves only the negative product and
/// fails the query. A step that shifts more K-sets leaves only the positive
/// product and ends that branch. Equal nonzero counts shift both pairs.
pub fn decide_via_setops(q: &SmallestMultQuery) -> Result<Verdict> {
    decide_via_setops_with_budget(q, DEFAULT_STATE_BUDGET)
}

pub fn decide_via_setops_with_budget(q: &SmallestMultQuery, budget: usize) -> Result<Verdict> {
    let pf = q.to_principal_form();
    if !pf.multisets_equal() {
        return Ok(decide_principal(&pf));
    }
    let m = pf.ambient();
    let ops: Vec<(usize, usize)> = OpSpec::all_nontrivial(m)
        .into_iter()
        .filter(|o| o.axis == crate::expr_core::Axis::Row)
        .map(|o| (o.u, o.v))
        .collect();
    let start: State = [pf.r1.mask(), pf.r2.mask(), pf.k1.mask(), pf.k2.mask()];
    // state -> (parent, op index) for witness reconstruction
    let mut parent: HashMap<State, Option<(State, usize)>> = HashMap::new();
    parent.insert(start, None);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for (idx, &(u, v)) in ops.iter().enumerate() {
            let t = [
                shift_mask(s[0], u, v),
                shift_mask(s[1], u, v),
                shift_mask(s[2], u, v),
                shift_mask(s[3], u, v),
            ];
            let moved = |a: usize, b: usize| (t[a] != s[a]) as u8 + (t[b] != s[b]) as u8;
            let (r_count, k_count) = (moved(0, 1), moved(2, 3));
            if r_count > k_count {
                let mut path = Vec::new();
                let mut cur = s;
                while let Some(Some((p, i))) = parent.get(&cur) {
                    path.push(OpSpec::row(ops[*i].0, ops[*i].1));
                    cur = *p;
                }
                path.reverse();
                return Ok(Verdict {
                    outcome: Outcome::Fails,
                    witness: Witness::SetOpPath {
                        path,
                        step: OpSpec::row(u, v),
                    },
                });
            }
            if r_count < k_count || r_count == 0 {
                // Only the K-product survives, or nothing moved.
                continue;
            }
            if !parent.contains_key(&t) {
                if parent.len() >= budget {
                    return Err(Error::BudgetExceeded(format!(
                        "more than {budget} reachable set-op states"
                    )));
                }
                parent.insert(t, Some((s, idx)));
                queue.push_back(t);
            }
        }
    }
    Ok(Verdict {
        outcome: Outcome::Holds,
        witness: Witness::StatesExplored { count: parent.len() },
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::{example_one, example_two};
    use super::super::{decide, Outcome, SmallestMultQuery, Witness};
    use super::*;

    #[test]
    fn second_example_fails() {
        let v = decide_via_setops(&example_two()).unwrap();
        assert_eq!(v.outcome, Outcome::Fails);
        assert!(matches!(v.witness, Witness::SetOpPath { .. }));
    }

    #[test]
    fn identity_query_holds() {
        let q = SmallestMultQuery::from_lists(3, [&[1, 2], &[3], &[2, 3], &[1], &[1, 2], &[3], &[2, 3], &[1]]).unwrap();
        assert!(decide_via_setops(&q).unwrap().holds());
    }

    #[test]
    fn agrees_with_decide_on_examples() {
        for q in [example_one(), example_one().reversed(), example_two(), example_two().reversed()] {
            assert_eq!(decide_via_setops(&q).unwrap().outcome, decide(&q).outcome);
        }
    }

    #[test]
    fn budget_refusal() {
        let q = SmallestMultQuery::from_lists(3, [&[1, 2], &[3], &[2, 3], &[1], &[1, 2], &[3], &[2, 3], &[1]]).unwrap();
        assert!(matches!(decide_via_setops_with_budget(&q, 1), Err(Error::BudgetExceeded(_))));
    }
}
