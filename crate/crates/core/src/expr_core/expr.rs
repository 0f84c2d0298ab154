use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::index_set::IndexSet;
use crate::error::{Error, Result};

/// `det A(rows | cols)`; the empty minor is 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Minor {
    pub rows: IndexSet,
    pub cols: IndexSet,
}

impl Minor {
    pub fn new(rows: IndexSet, cols: IndexSet) -> Result<Self> {
        if rows.ambient() != cols.ambient() {
            return Err(Error::AmbientMismatch {
                expected: rows.ambient(),
                found: cols.ambient(),
            });
        }
        if rows.len() != cols.len() {
            return Err(Error::SizeMismatch(format!(
                "minor rows {rows} and cols {cols} differ in size"
            )));
        }
        Ok(Minor { rows, cols })
    }

    /// Convenience constructor from element lists.
    pub fn from_lists(n: usize, rows: &[usize], cols: &[usize]) -> Result<Self> {
        Minor::new(IndexSet::new(n, rows)?, IndexSet::new(n, cols)?)
    }

    /// Principal minor `det A(s | s)`.
    pub fn principal(s: IndexSet) -> Self {
        Minor { rows: s, cols: s }
    }

    pub fn ambient(&self) -> usize {
        self.rows.ambient()
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }
}

impl fmt::Debug for Minor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Minor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "det({}|{})", self.rows, self.cols)
    }
}

/// `coeff * prod(minors)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Term {
    pub coeff: BigRational,
    pub minors: Vec<Minor>,
}

impl Term {
    pub fn new(coeff: BigRational, minors: Vec<Minor>) -> Self {
        Term { coeff, minors }
    }

    /// Sorted minor list; two terms merge iff their keys agree.
    pub fn key(&self) -> Vec<Minor> {
        let mut k = self.minors.clone();
        k.sort();
        k
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Relation {
    /// The expression is asserted nonnegative on TN matrices.
    GeqZero,
    /// The expression is asserted to vanish.
    EqZero,
    /// Nothing is asserted.
    Unasserted,
}

impl Relation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Relation::GeqZero => "geq0",
            Relation::EqZero => "eq0",
            Relation::Unasserted => "none",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "geq0" => Ok(Relation::GeqZero),
            "eq0" => Ok(Relation::EqZero),
            "none" => Ok(Relation::Unasserted),
            other => Err(Error::Parse(format!("unknown relation {other:?}"))),
        }
    }
}

/// A signed rational combination of products of minors over `[n]`, plus
/// the relation it asserts against zero.
///
/// Construction normalizes: terms with the same minor multiset are merged in
/// first-occurrence order and zero coefficients dropped.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DetExpr {
    n: usize,
    terms: Vec<Term>,
    relation: Relation,
}

impl DetExpr {
    pub fn zero(n: usize, relation: Relation) -> Result<Self> {
        IndexSet::empty(n)?;
        Ok(DetExpr {
            n,
            terms: Vec::new(),
            relation,
        })
    }

    /// Validates, merges and drops zeros.
    pub fn new(n: usize, terms: Vec<Term>, relation: Relation) -> Result<Self> {
        let raw = Self::new_unmerged(n, terms, relation)?;
        Ok(raw.merged())
    }

    /// Validates but keeps the term list exactly as given (zeros removed only
    /// when merging later).
    pub fn new_unmerged(n: usize, terms: Vec<Term>, relation: Relation) -> Result<Self> {
        IndexSet::empty(n)?;
        for t in &terms {
            if t.minors.is_empty() {
                return Err(Error::SizeMismatch("a term needs at least one minor".into()));
            }
            for m in &t.minors {
                if m.ambient() != n {
                    return Err(Error::AmbientMismatch {
                        expected: n,
                        found: m.ambient(),
                    });
                }
                if m.rows.len() != m.cols.len() {
                    return Err(Error::SizeMismatch(format!("{m}")));
                }
            }
        }
        Ok(DetExpr { n, terms, relation })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn with_relation(mut self, relation: Relation) -> Self {
        self.relation = relation;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Merges equal minor multisets and drops zero coefficients.
    pub fn merged(self) -> Self {
        let mut index: HashMap<Vec<Minor>, usize> = HashMap::new();
        let mut out: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            let key = t.key();
            match index.get(&key) {
                Some(&i) => out[i].coeff += t.coeff,
                None => {
                    index.insert(key, out.len());
                    out.push(t);
                }
            }
        }
        out.retain(|t| !t.coeff.is_zero());
        DetExpr {
            n: self.n,
            terms: out,
            relation: self.relation,
        }
    }

    /// `self - other` with the given relation.
    pub fn minus(&self, other: &DetExpr, relation: Relation) -> Result<DetExpr> {
        if self.n != other.n {
            return Err(Error::AmbientMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(
            other
                .terms
                .iter()
                .map(|t| Term::new(-t.coeff.clone(), t.minors.clone())),
        );
        DetExpr::new(self.n, terms, relation)
    }

    /// `c * self`.
    pub fn scaled(&self, c: &BigRational) -> DetExpr {
        let terms = self
            .terms
            .iter()
            .map(|t| Term::new(&t.coeff * c, t.minors.clone()))
            .collect();
        DetExpr {
            n: self.n,
            terms,
            relation: self.relation,
        }
        .merged()
    }

    /// True when both expressions hold the same terms, ignoring term order
    /// and the order of minors inside a product.
    pub fn same_terms(&self, other: &DetExpr) -> bool {
        if self.n != other.n || self.terms.len() != other.terms.len() {
            return false;
        }
        let mut a: Vec<(Vec<Minor>, BigRational)> =
            self.terms.iter().map(|t| (t.key(), t.coeff.clone())).collect();
        let mut b: Vec<(Vec<Minor>, BigRational)> =
            other.terms.iter().map(|t| (t.key(), t.coeff.clone())).collect();
        a.sort();
        b.sort();
        a == b
    }

    pub fn has_positive_term(&self) -> bool {
        self.terms.iter().any(|t| t.coeff.is_positive())
    }

    pub fn has_negative_term(&self) -> bool {
        self.terms.iter().any(|t| t.coeff.is_negative())
    }

    /// Largest number of minors in any term.
    pub fn max_degree(&self) -> usize {
        self.terms.iter().map(|t| t.minors.len()).max().unwrap_or(0)
    }
}

impl fmt::Display for DetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, t) in self.terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            let mag = t.coeff.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            for (j, m) in t.minors.iter().enumerate() {
                if j > 0 {
                    write!(f, "*")?;
                }
                write!(f, "{m}")?;
            }
        }
        match self.relation {
            Relation::GeqZero => write!(f, " >= 0"),
            Relation::EqZero => write!(f, " = 0"),
            Relation::Unasserted => Ok(()),
        }
    }
}

/// Shorthand for an integer coefficient.
pub fn int(c: i64) -> BigRational {
    BigRational::from_integer(c.into())
}
