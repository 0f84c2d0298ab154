//! Smallest multiplicative inequalities: two minors against two minors.
//!
//! A [`SmallestMultQuery`] asserts
//! `det A(P1|Q1) det A(P2|Q2) <= det A(I1|J1) det A(I2|J2)` on `n x n` TN
//! matrices. It is decided through its principal-minor encoding on `[2n]`.

mod reduce;
mod search;
mod setops;

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr_core::json::OpJson;
use crate::expr_core::{int, multiplicity, shift_multiplicity, DetExpr, IndexSet, Minor, OpSpec, Relation, Term};

pub use reduce::{reduce_to_complementary, replay_reduction, Reduction};
pub use search::{
    falsify_search, falsify_search_all_minimal, falsify_search_expr, SearchOutcome, SearchStatus,
};
pub use setops::{decide_via_setops, decide_via_setops_with_budget, DEFAULT_STATE_BUDGET};

/// `det A(P1|Q1) det A(P2|Q2) <= det A(I1|J1) det A(I2|J2)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SmallestMultQuery {
    n: usize,
    pub p1: IndexSet,
    pub p2: IndexSet,
    pub q1: IndexSet,
    pub q2: IndexSet,
    pub i1: IndexSet,
    pub i2: IndexSet,
    pub j1: IndexSet,
    pub j2: IndexSet,
}

impl SmallestMultQuery {
    /// Lower side `(P1|Q1)(P2|Q2)`, upper side `(I1|J1)(I2|J2)`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        p1: IndexSet,
        p2: IndexSet,
        q1: IndexSet,
        q2: IndexSet,
        i1: IndexSet,
        i2: IndexSet,
        j1: IndexSet,
        j2: IndexSet,
    ) -> Result<Self> {
        if 2 * n > crate::expr_core::MAX_AMBIENT {
            return Err(Error::DimensionTooLarge { n, limit: 32 });
        }
        for s in [&p1, &p2, &q1, &q2, &i1, &i2, &j1, &j2] {
            if s.ambient() != n {
                return Err(Error::AmbientMismatch {
                    expected: n,
                    found: s.ambient(),
                });
            }
            if s.is_empty() {
                return Err(Error::InvalidQuery("all eight index sets must be nonempty".into()));
            }
        }
        for (a, b, name) in [(&p1, &q1, "P1/Q1"), (&p2, &q2, "P2/Q2"), (&i1, &j1, "I1/J1"), (&i2, &j2, "I2/J2")] {
            if a.len() != b.len() {
                return Err(Error::InvalidQuery(format!("{name} differ in size")));
            }
        }
        if p1.len() + p2.len() != n || i1.len() + i2.len() != n {
            return Err(Error::OutOfScope(format!(
                "|P1|+|P2| = {} and |I1|+|I2| = {} must both equal n = {n}",
                p1.len() + p2.len(),
                i1.len() + i2.len()
            )));
        }
        Ok(SmallestMultQuery {
            n,
            p1,
            p2,
            q1,
            q2,
            i1,
            i2,
            j1,
            j2,
        })
    }

    /// Builds from element lists.
    pub fn from_lists(n: usize, sets: [&[usize]; 8]) -> Result<Self> {
        let s = |k: usize| IndexSet::new(n, sets[k]);
        SmallestMultQuery::new(n, s(0)?, s(1)?, s(2)?, s(3)?, s(4)?, s(5)?, s(6)?, s(7)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The opposite assertion (`>=`), written as a `<=` query.
    pub fn reversed(&self) -> Self {
        SmallestMultQuery {
            n: self.n,
            p1: self.i1,
            p2: self.i2,
            q1: self.j1,
            q2: self.j2,
            i1: self.p1,
            i2: self.p2,
            j1: self.q1,
            j2: self.q2,
        }
    }

    /// Rows and columns exchanged (the same inequality for `A^T`).
    pub fn transposed(&self) -> Self {
        SmallestMultQuery {
            n: self.n,
            p1: self.q1,
            p2: self.q2,
            q1: self.p1,
            q2: self.p2,
            i1: self.j1,
            i2: self.j2,
            j1: self.i1,
            j2: self.i2,
        }
    }

    /// The two minors of each side relabelled.
    pub fn relabelled(&self) -> Self {
        SmallestMultQuery {
            n: self.n,
            p1: self.p2,
            p2: self.p1,
            q1: self.q2,
            q2: self.q1,
            i1: self.i2,
            i2: self.i1,
            j1: self.j2,
            j2: self.j1,
        }
    }

    /// `det(I1|J1) det(I2|J2) - det(P1|Q1) det(P2|Q2) >= 0`.
    pub fn canonical_expr(&self) -> DetExpr {
        let terms = vec![
            Term::new(
                int(1),
                vec![Minor { rows: self.i1, cols: self.j1 }, Minor { rows: self.i2, cols: self.j2 }],
            ),
            Term::new(
                int(-1),
                vec![Minor { rows: self.p1, cols: self.q1 }, Minor { rows: self.p2, cols: self.q2 }],
            ),
        ];
        DetExpr::new(self.n, terms, Relation::GeqZero).expect("valid query")
    }

    /// Same as [`Self::canonical_expr`] without merging, so both terms stay
    /// addressable even when the two sides coincide.
    pub fn canonical_expr_unmerged(&self) -> DetExpr {
        let terms = vec![
            Term::new(
                int(1),
                vec![Minor { rows: self.i1, cols: self.j1 }, Minor { rows: self.i2, cols: self.j2 }],
            ),
            Term::new(
                int(-1),
                vec![Minor { rows: self.p1, cols: self.q1 }, Minor { rows: self.p2, cols: self.q2 }],
            ),
        ];
        DetExpr::new_unmerged(self.n, terms, Relation::GeqZero).expect("valid query")
    }

    /// True when the two lower minors and the two upper minors are
    /// complementary (disjoint rows and disjoint columns on each side).
    pub fn is_complementary(&self) -> bool {
        self.p1.is_disjoint(&self.p2)
            && self.q1.is_disjoint(&self.q2)
            && self.i1.is_disjoint(&self.i2)
            && self.j1.is_disjoint(&self.j2)
    }

    pub fn to_principal_form(&self) -> PrincipalForm {
        let m = 2 * self.n;
        let flip = |s: &IndexSet| s.reflect_into(m).expect("n <= 32");
        let lift = |s: &IndexSet| s.lift(m).expect("n <= 32");
        let r1 = lift(&self.p1).union(&flip(&self.q2)).expect("same ambient");
        let r2 = lift(&self.p2).union(&flip(&self.q1)).expect("same ambient");
        let k1 = lift(&self.i1).union(&flip(&self.j2)).expect("same ambient");
        let k2 = lift(&self.i2).union(&flip(&self.j1)).expect("same ambient");
        PrincipalForm::new(r1, r2, k1, k2).expect("same ambient")
    }

    /// Every valid query on `[n]` (nonempty sets, sizes compatible, both
    /// sides of total size `n`). Grows like `C(2n, n)^2`; intended for `n <= 3`.
    pub fn enumerate(n: usize) -> Result<Vec<SmallestMultQuery>> {
        if n == 0 || n > 4 {
            return Err(Error::DimensionTooLarge { n, limit: 4 });
        }
        let sides = Self::enumerate_sides(n)?;
        let mut out = Vec::with_capacity(sides.len() * sides.len());
        for lo in &sides {
            for hi in &sides {
                out.push(SmallestMultQuery {
                    n,
                    p1: lo.0,
                    q1: lo.1,
                    p2: lo.2,
                    q2: lo.3,
                    i1: hi.0,
                    j1: hi.1,
                    i2: hi.2,
                    j2: hi.3,
                });
            }
        }
        Ok(out)
    }

    /// Every `(rows1, cols1, rows2, cols2)` with nonempty sets,
    /// `|rows_k| = |cols_k|` and `|rows1| + |rows2| = n`.
    pub fn enumerate_sides(n: usize) -> Result<Vec<(IndexSet, IndexSet, IndexSet, IndexSet)>> {
        let mut out = Vec::new();
        for a in 1..n {
            let first = IndexSet::all_of_size(n, a)?;
            let second = IndexSet::all_of_size(n, n - a)?;
            for r1 in &first {
                for c1 in &first {
                    for r2 in &second {
                        for c2 in &second {
                            out.push((*r1, *c1, *r2, *c2));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "n": self.n,
            "P1": self.p1.elements(), "P2": self.p2.elements(),
            "Q1": self.q1.elements(), "Q2": self.q2.elements(),
            "I1": self.i1.elements(), "I2": self.i2.elements(),
            "J1": self.j1.elements(), "J2": self.j2.elements(),
            "direction": "le",
        })
    }

    /// Parses a query; `"direction": "ge"` reverses the assertion.
    pub fn from_json(s: &str) -> Result<Self> {
        let j: QueryJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let q = SmallestMultQuery::from_lists(
            j.n,
            [&j.p1, &j.p2, &j.q1, &j.q2, &j.i1, &j.i2, &j.j1, &j.j2],
        )?;
        match j.direction.as_deref().unwrap_or("le") {
            "le" => Ok(q),
            "ge" => Ok(q.reversed()),
            other => Err(Error::Parse(format!("direction must be \"le\" or \"ge\", got {other:?}"))),
        }
    }
}

impl fmt::Display for SmallestMultQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "det({}|{})det({}|{}) <= det({}|{})det({}|{})",
            self.p1, self.q1, self.p2, self.q2, self.i1, self.j1, self.i2, self.j2
        )
    }
}

#[derive(Deserialize, Serialize)]
struct QueryJson {
    n: usize,
    #[serde(rename = "P1")]
    p1: Vec<usize>,
    #[serde(rename = "P2")]
    p2: Vec<usize>,
    #[serde(rename = "Q1")]
    q1: Vec<usize>,
    #[serde(rename = "Q2")]
    q2: Vec<usize>,
    #[serde(rename = "I1")]
    i1: Vec<usize>,
    #[serde(rename = "I2")]
    i2: Vec<usize>,
    #[serde(rename = "J1")]
    j1: Vec<usize>,
    #[serde(rename = "J2")]
    j2: Vec<usize>,
    direction: Option<String>,
}

/// Principal-minor encoding on `[2n]`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PrincipalForm {
    pub r1: IndexSet,
    pub r2: IndexSet,
    pub k1: IndexSet,
    pub k2: IndexSet,
    pub m: IndexSet,
}

impl PrincipalForm {
    pub fn new(r1: IndexSet, r2: IndexSet, k1: IndexSet, k2: IndexSet) -> Result<Self> {
        let m = r1.symmetric_difference(&r2)?;
        k1.union(&k2)?;
        r1.union(&k1)?;
        Ok(PrincipalForm { r1, r2, k1, k2, m })
    }

    pub fn ambient(&self) -> usize {
        self.r1.ambient()
    }

    /// `det B(K1) det B(K2) - det B(R1) det B(R2) >= 0` on `[2n]`.
    pub fn to_expr(&self) -> DetExpr {
        let p = Minor::principal;
        DetExpr::new(
            self.ambient(),
            vec![
                Term::new(int(1), vec![p(self.k1), p(self.k2)]),
                Term::new(int(-1), vec![p(self.r1), p(self.r2)]),
            ],
            Relation::GeqZero,
        )
        .expect("valid principal form")
    }

    /// Multisets `R1 + R2` and `K1 + K2` agree.
    pub fn multisets_equal(&self) -> bool {
        self.r1.mask() & self.r2.mask() == self.k1.mask() & self.k2.mask()
            && self.r1.mask() | self.r2.mask() == self.k1.mask() | self.k2.mask()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Outcome {
    Holds,
    Fails,
}

/// Evidence attached to a [`Verdict`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Witness {
    /// Every even contiguous window of `M` passed.
    WindowsChecked { count: usize },
    /// `R1 + R2` and `K1 + K2` differ as multisets.
    MultisetMismatch { r: Vec<usize>, k: Vec<usize> },
    /// An even contiguous `S` with `max|S n R_i| < max|S n K_i|`.
    EvenContiguous { s: IndexSet, r_max: usize, k_max: usize },
    /// An op sequence whose result is certifiably false.
    Ops(Vec<OpSpec>),
    /// A reachable set-op path followed by a step that shifts more R-sets
    /// than K-sets.
    SetOpPath { path: Vec<OpSpec>, step: OpSpec },
    /// The whole reachable state space passed.
    StatesExplored { count: usize },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Verdict {
    pub outcome: Outcome,
    pub witness: Witness,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }

    pub fn to_json_value(&self) -> Value {
        let ops = |v: &[OpSpec]| v.iter().map(OpJson::from).collect::<Vec<_>>();
        let witness = match &self.witness {
            Witness::WindowsChecked { count } => json!({ "windows_checked": count }),
            Witness::MultisetMismatch { r, k } => json!({ "multiset_mismatch": { "R": r, "K": k } }),
            Witness::EvenContiguous { s, r_max, k_max } => {
                json!({ "S": s.elements(), "r_max": r_max, "k_max": k_max })
            }
            Witness::Ops(v) => json!({ "ops": ops(v) }),
            Witness::SetOpPath { path, step } => {
                let mut all = path.clone();
                all.push(*step);
                json!({ "ops": ops(&all), "setop_path": true })
            }
            Witness::StatesExplored { count } => json!({ "states_explored": count }),
        };
        json!({
            "verdict": match self.outcome { Outcome::Holds => "holds", Outcome::Fails => "fails" },
            "witness": witness,
        })
    }
}

fn multiset(a: &IndexSet, b: &IndexSet) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b.iter()).collect();
    v.sort_unstable();
    v
}

/// Decides the query with the even-contiguous-subset criterion on its
/// principal form. Windows are scanned by length, then by start position.
pub fn decide(q: &SmallestMultQuery) -> Verdict {
    decide_principal(&q.to_principal_form())
}

/// The same criterion on an arbitrary principal form.
pub fn decide_principal(pf: &PrincipalForm) -> Verdict {
    if !pf.multisets_equal() {
        return Verdict {
            outcome: Outcome::Fails,
            witness: Witness::MultisetMismatch {
                r: multiset(&pf.r1, &pf.r2),
                k: multiset(&pf.k1, &pf.k2),
            },
        };
    }
    let elems = pf.m.elements();
    let amb = pf.ambient();
    let mut count = 0;
    for len in (2..=elems.len()).step_by(2) {
        for start in 0..=elems.len() - len {
            count += 1;
            let s = IndexSet::new(amb, &elems[start..start + len]).expect("elements of M");
            let meet = |x: &IndexSet| (s.mask() & x.mask()).count_ones() as usize;
            let r_max = meet(&pf.r1).max(meet(&pf.r2));
            let k_max = meet(&pf.k1).max(meet(&pf.k2));
            if r_max < k_max {
                return Verdict {
                    outcome: Outcome::Fails,
                    witness: Witness::EvenContiguous { s, r_max, k_max },
                };
            }
        }
    }
    Verdict {
        outcome: Outcome::Holds,
        witness: Witness::WindowsChecked { count },
    }
}

/// A failed multiplicity requirement.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ConditionViolation {
    /// `m_P(u) != m_I(u)` (rows) or `m_Q(u) != m_J(u)` (columns).
    Multiplicity { rows: bool, u: usize },
    /// `m_P(u,v) > m_I(u,v)` (rows) or `m_Q(u,v) > m_J(u,v)` (columns).
    ShiftMultiplicity { rows: bool, u: usize, v: usize },
}

/// Checks the pointwise multiplicity equalities and the shift-multiplicity
/// inequalities that every valid query satisfies.
pub fn necessary_conditions(q: &SmallestMultQuery) -> std::result::Result<(), ConditionViolation> {
    let n = q.n;
    for (rows, lo, hi) in [(true, [q.p1, q.p2], [q.i1, q.i2]), (false, [q.q1, q.q2], [q.j1, q.j2])] {
        for u in 1..=n {
            if multiplicity(&lo, u).expect("in range") != multiplicity(&hi, u).expect("in range") {
                return Err(ConditionViolation::Multiplicity { rows, u });
            }
        }
        for u in 1..=n {
            for v in [u.wrapping_sub(1), u + 1] {
                if v == 0 || v > n {
                    continue;
                }
                let a = shift_multiplicity(&lo, u, v).expect("consecutive");
                let b = shift_multiplicity(&hi, u, v).expect("consecutive");
                if a > b {
                    return Err(ConditionViolation::ShiftMultiplicity { rows, u, v });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn example_one() -> SmallestMultQuery {
        SmallestMultQuery::from_lists(
            6,
            [&[1, 2, 3, 6], &[3, 4], &[1, 2, 4, 5], &[2, 5], &[1, 3, 6], &[2, 3, 4], &[1, 2, 5], &[2, 4, 5]],
        )
        .unwrap()
    }

    // Column sets of the larger side are ordered so that they pair with the
    // listed twelve-element encoding.
    pub(crate) fn example_two() -> SmallestMultQuery {
        SmallestMultQuery::from_lists(
            6,
            [&[1, 3, 4], &[2, 5, 6], &[1, 2, 3], &[4, 5, 6], &[1, 3, 4], &[2, 5, 6], &[3, 5, 6], &[1, 2, 4]],
        )
        .unwrap()
    }

    fn koteljanskii() -> SmallestMultQuery {
        SmallestMultQuery::from_lists(4, [&[1, 2, 3], &[2], &[1, 2, 3], &[2], &[1, 2], &[2, 3], &[1, 2], &[2, 3]]).unwrap()
    }

    fn set(n: usize, e: &[usize]) -> IndexSet {
        IndexSet::new(n, e).unwrap()
    }

    #[test]
    fn principal_form_of_second_example() {
        let pf = example_two().to_principal_form();
        assert_eq!(pf.r1, set(12, &[1, 3, 4, 7, 8, 9]));
        assert_eq!(pf.r2, set(12, &[2, 5, 6, 10, 11, 12]));
        assert_eq!(pf.k1, set(12, &[1, 3, 4, 9, 11, 12]));
        assert_eq!(pf.k2, set(12, &[2, 5, 6, 7, 8, 10]));
    }

    #[test]
    fn principal_form_of_koteljanskii_instance() {
        let pf = koteljanskii().to_principal_form();
        assert_eq!(pf.r1, set(8, &[1, 2, 3, 7]));
        assert_eq!(pf.r2, set(8, &[2, 6, 7, 8]));
        assert_eq!(pf.k1, set(8, &[1, 2, 6, 7]));
        assert_eq!(pf.k2, set(8, &[2, 3, 7, 8]));
    }

    #[test]
    fn identical_sides_give_identical_pairs() {
        let q = SmallestMultQuery::from_lists(3, [&[1], &[2, 3], &[2], &[1, 3], &[1], &[2, 3], &[2], &[1, 3]]).unwrap();
        let pf = q.to_principal_form();
        assert_eq!((pf.r1, pf.r2), (pf.k1, pf.k2));
        assert!(decide(&q).holds());
    }

    #[test]
    fn decide_examples() {
        let v = decide(&example_two());
        assert_eq!(v.outcome, Outcome::Fails);
        assert_eq!(
            v.witness,
            Witness::EvenContiguous { s: set(12, &[6, 7]), r_max: 1, k_max: 2 }
        );
        let v = decide(&example_two().reversed());
        match v.witness {
            Witness::EvenContiguous { s, .. } => assert_eq!(s, set(12, &[8, 9])),
            other => panic!("unexpected witness {other:?}"),
        }
        assert_eq!(decide(&example_one()).outcome, Outcome::Fails);
        assert_eq!(decide(&example_one().reversed()).outcome, Outcome::Fails);
        assert!(decide(&koteljanskii()).holds());
    }

    #[test]
    fn query_validation() {
        assert!(matches!(
            SmallestMultQuery::from_lists(3, [&[1], &[2], &[1], &[2], &[1], &[2, 3], &[1], &[2, 3]]),
            Err(Error::OutOfScope(_))
        ));
        assert!(SmallestMultQuery::from_lists(3, [&[], &[1, 2, 3], &[], &[1, 2, 3], &[1], &[2, 3], &[1], &[2, 3]]).is_err());
        assert!(SmallestMultQuery::from_lists(3, [&[1], &[2, 3], &[1, 2], &[3], &[1], &[2, 3], &[1], &[2, 3]]).is_err());
    }

    #[test]
    fn json_roundtrip_and_direction() {
        let q = example_one();
        let s = q.to_json_value().to_string();
        assert_eq!(SmallestMultQuery::from_json(&s).unwrap(), q);
        let ge = s.replace("\"le\"", "\"ge\"");
        assert_eq!(SmallestMultQuery::from_json(&ge).unwrap(), q.reversed());
        assert!(SmallestMultQuery::from_json(&s.replace("\"le\"", "\"lt\"")).is_err());
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(SmallestMultQuery::enumerate(2).unwrap().len(), 256);
        assert_eq!(SmallestMultQuery::enumerate(3).unwrap().len(), 162 * 162);
    }

    #[test]
    fn verdict_json() {
        let v = decide(&example_two());
        let j = v.to_json_value();
        assert_eq!(j["verdict"], "fails");
        assert_eq!(j["witness"]["S"], json!([6, 7]));
    }

    #[test]
    fn necessary_conditions_on_examples() {
        assert!(necessary_conditions(&koteljanskii()).is_ok());
        // First example: row multiplicities agree, but shifting 1 -> 2 moves
        // the upper side only; the reverse direction breaks the inequality.
        assert!(matches!(
            necessary_conditions(&example_one().reversed()),
            Err(ConditionViolation::ShiftMultiplicity { rows: true, u: 1, v: 2 })
        ));
    }
}
