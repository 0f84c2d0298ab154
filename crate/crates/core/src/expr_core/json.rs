//! JSON forms of expressions, index sets and ops.

use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{Axis, DetExpr, IndexSet, Minor, OpSpec, Relation, Term};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct MinorJson {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct TermJson {
    pub coeff: String,
    pub minors: Vec<MinorJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct DetExprJson {
    pub n: usize,
    pub relation: String,
    pub terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct OpJson {
    pub axis: String,
    pub u: usize,
    pub v: usize,
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if t.contains('.') || t.contains('e') || t.contains('E') {
        return Err(Error::Parse(format!("{s:?} is not an exact p/q rational")));
    }
    BigRational::from_str(t).map_err(|_| Error::Parse(format!("bad rational {s:?}")))
}

pub fn rational_string(q: &BigRational) -> String {
    q.to_string()
}

pub fn set_elements(s: &IndexSet) -> Vec<usize> {
    s.elements()
}

impl From<&DetExpr> for DetExprJson {
    fn from(e: &DetExpr) -> Self {
        DetExprJson {
            n: e.n(),
            relation: e.relation().as_str().to_string(),
            terms: e
                .terms()
                .iter()
                .map(|t| TermJson {
                    coeff: rational_string(&t.coeff),
                    minors: t
                        .minors
                        .iter()
                        .map(|m| MinorJson {
                            rows: m.rows.elements(),
                            cols: m.cols.elements(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<&DetExprJson> for DetExpr {
    type Error = Error;

    fn try_from(j: &DetExprJson) -> Result<DetExpr> {
        let relation = Relation::parse(&j.relation)?;
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            let coeff = parse_rational(&t.coeff)?;
            let minors = t
                .minors
                .iter()
                .map(|m| Minor::from_lists(j.n, &m.rows, &m.cols))
                .collect::<Result<Vec<_>>>()?;
            terms.push(Term::new(coeff, minors));
        }
        DetExpr::new(j.n, terms, relation)
    }
}

impl From<&OpSpec> for OpJson {
    fn from(o: &OpSpec) -> Self {
        OpJson {
            axis: match o.axis {
                Axis::Row => "row".into(),
                Axis::Col => "col".into(),
            },
            u: o.u,
            v: o.v,
        }
    }
}

impl TryFrom<&OpJson> for OpSpec {
    type Error = Error;

    fn try_from(j: &OpJson) -> Result<OpSpec> {
        let axis = match j.axis.as_str() {
            "row" => Axis::Row,
            "col" => Axis::Col,
            other => return Err(Error::Parse(format!("unknown axis {other:?}"))),
        };
        Ok(OpSpec { axis, u: j.u, v: j.v })
    }
}

impl DetExpr {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&DetExprJson::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<DetExpr> {
        let j: DetExprJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        DetExpr::try_from(&j)
    }
}
