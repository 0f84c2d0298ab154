//! Sampled exact verification, counterexample hunting and oracle checks.
//!
//! Every check is exact: a reported violation is a definite counterexample.
//! Only the coverage of the sampled matrices is random.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr_core::json::rational_string;
use crate::expr_core::{apply_sequence, DetExpr, IndexSet, OpSpec, Relation};
use crate::planar_net::{build_network, path_weight_sum};
use crate::tn_matrix::{
    compose, evaluate, minor, minor_cofactor, perturbed_matrix, sample_factorization_fractional,
    sample_factorization_indexed,
    BidiagFactorization, Matrix, MinorTable, Scalar,
};

/// Integer weight bounds tried in turn by [`verify_escalating`].
pub const WEIGHT_ESCALATION: [u64; 3] = [1, 3, 10];

/// One sampling stage of a counterexample hunt: weights `k / denominator`
/// with `k` in `{0..=weight_bound * denominator}`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct HuntStage {
    pub weight_bound: u64,
    pub denominator: u64,
}

impl HuntStage {
    pub const fn integer(weight_bound: u64) -> Self {
        HuntStage { weight_bound, denominator: 1 }
    }

    fn sample(&self, n: usize, seed: u64, index: u64) -> Result<BidiagFactorization> {
        sample_factorization_fractional(n, seed, index, self.weight_bound, self.denominator, false)
    }
}

/// The integer bounds 1, 3, 10 and then weights in steps of 1/6 up to 3.
/// Integer weights make `a_1j` a multiple of `a_11`, and similar divisibility
/// holds elsewhere, so some violations need a fractional stage.
pub const HUNT_ESCALATION: [HuntStage; 4] = [
    HuntStage::integer(1),
    HuntStage::integer(3),
    HuntStage::integer(10),
    HuntStage { weight_bound: 3, denominator: 6 },
];

/// Violations kept in a report; the total count is tracked separately.
pub const MAX_STORED_VIOLATIONS: usize = 32;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct VerifyConfig {
    pub n: usize,
    pub samples: u64,
    pub weight_bound: u64,
    pub seed: u64,
    pub nonsingular_only: bool,
}

impl VerifyConfig {
    pub fn new(n: usize, samples: u64, weight_bound: u64, seed: u64) -> Result<Self> {
        let cfg = VerifyConfig {
            n,
            samples,
            weight_bound,
            seed,
            nonsingular_only: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.samples == 0 || self.weight_bound == 0 {
            return Err(Error::InvalidParameter("n, samples and weight_bound must be at least 1".into()));
        }
        Ok(())
    }
}

/// A sampled factorization on which an expression broke its relation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub sample_index: u64,
    pub weight_bound: u64,
    /// Weight denominator of the sampling stage; 1 for integer weights.
    pub denominator: u64,
    pub factorization: BidiagFactorization,
    pub value: Scalar,
    /// Ops applied to the checked expression before evaluation (empty for a plain check).
    pub ops: Vec<OpSpec>,
}

impl Violation {
    /// Re-composes the matrix and re-evaluates `e` after `self.ops`.
    pub fn recheck(&self, e: &DetExpr) -> Result<bool> {
        let e = apply_sequence(e, &self.ops)?;
        let v = evaluate(&e, &compose(&self.factorization))?;
        Ok(v == self.value && breaks(e.relation(), &v))
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "sample_index": self.sample_index,
            "weight_bound": self.weight_bound,
            "denominator": self.denominator,
            "value": rational_string(&self.value),
            "ops": self.ops.iter().map(|o| o.to_string()).collect::<Vec<_>>(),
            "factorization": serde_json::from_str::<Value>(&self.factorization.to_json()).expect("valid json"),
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct VerifyReport {
    pub checked: u64,
    pub violation_count: u64,
    /// The first violations in sample order, at most [`MAX_STORED_VIOLATIONS`].
    pub violations: Vec<Violation>,
    pub min_value_seen: Option<Scalar>,
    pub max_value_seen: Option<Scalar>,
}

impl VerifyReport {
    pub fn holds(&self) -> bool {
        self.violation_count == 0
    }

    fn record(&mut self, value: Scalar, violation: Option<Violation>) {
        self.checked += 1;
        if self.min_value_seen.as_ref().is_none_or(|m| value < *m) {
            self.min_value_seen = Some(value.clone());
        }
        if self.max_value_seen.as_ref().is_none_or(|m| value > *m) {
            self.max_value_seen = Some(value);
        }
        if let Some(v) = violation {
            self.violation_count += 1;
            if self.violations.len() < MAX_STORED_VIOLATIONS {
                self.violations.push(v);
            }
        }
    }

    /// Folds another report into this one.
    pub fn absorb(&mut self, other: VerifyReport) {
        self.checked += other.checked;
        self.violation_count += other.violation_count;
        for v in other.violations {
            if self.violations.len() < MAX_STORED_VIOLATIONS {
                self.violations.push(v);
            }
        }
        if let Some(x) = other.min_value_seen {
            if self.min_value_seen.as_ref().is_none_or(|m| x < *m) {
                self.min_value_seen = Some(x);
            }
        }
        if let Some(x) = other.max_value_seen {
            if self.max_value_seen.as_ref().is_none_or(|m| x > *m) {
                self.max_value_seen = Some(x);
            }
        }
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "checked": self.checked,
            "violation_count": self.violation_count,
            "min_value_seen": self.min_value_seen.as_ref().map(rational_string),
            "max_value_seen": self.max_value_seen.as_ref().map(rational_string),
            "violations": self.violations.iter().map(Violation::to_json_value).collect::<Vec<_>>(),
        })
    }
}

fn breaks(rel: Relation, v: &Scalar) -> bool {
    match rel {
        Relation::GeqZero => v.is_negative(),
        Relation::EqZero => !v.is_zero(),
        Relation::Unasserted => false,
    }
}

fn require_asserted(e: &DetExpr) -> Result<()> {
    if e.relation() == Relation::Unasserted {
        return Err(Error::Precondition("expression carries no relation to verify".into()));
    }
    Ok(())
}

fn check_ambient(e: &DetExpr, n: usize) -> Result<()> {
    if e.n() != n {
        return Err(Error::AmbientMismatch { expected: n, found: e.n() });
    }
    Ok(())
}

/// Samples `cfg.samples` factorizations and evaluates `e` exactly on each.
pub fn verify(e: &DetExpr, cfg: &VerifyConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    require_asserted(e)?;
    check_ambient(e, cfg.n)?;
    let mut report = VerifyReport::default();
    for idx in 0..cfg.samples {
        let f = sample_factorization_indexed(cfg.n, cfg.seed, idx, cfg.weight_bound, cfg.nonsingular_only)?;
        let v = evaluate(e, &compose(&f))?;
        let bad = breaks(e.relation(), &v).then(|| Violation {
            sample_index: idx,
            weight_bound: cfg.weight_bound,
            denominator: 1,
            factorization: f,
            value: v.clone(),
            ops: Vec::new(),
        });
        report.record(v, bad);
    }
    Ok(report)
}

/// Runs [`verify`] once per weight bound and merges the reports.
pub fn verify_escalating(e: &DetExpr, cfg: &VerifyConfig, bounds: &[u64]) -> Result<VerifyReport> {
    let mut total = VerifyReport::default();
    for &w in bounds {
        total.absorb(verify(e, &VerifyConfig { weight_bound: w, ..*cfg })?);
    }
    Ok(total)
}

/// A fixed set of sampled factorizations with all their minors tabulated, so
/// that many expressions can be checked against the same matrices cheaply.
pub struct SamplePool {
    cfg: VerifyConfig,
    samples: Vec<(BidiagFactorization, MinorTable)>,
}

impl SamplePool {
    pub fn new(cfg: &VerifyConfig) -> Result<Self> {
        cfg.validate()?;
        let mut samples = Vec::with_capacity(cfg.samples as usize);
        for idx in 0..cfg.samples {
            let f = sample_factorization_indexed(cfg.n, cfg.seed, idx, cfg.weight_bound, cfg.nonsingular_only)?;
            let t = MinorTable::new(&compose(&f))?;
            samples.push((f, t));
        }
        Ok(SamplePool { cfg: *cfg, samples })
    }

    pub fn config(&self) -> &VerifyConfig {
        &self.cfg
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Same report as [`verify`] with this pool's configuration.
    pub fn verify(&self, e: &DetExpr) -> Result<VerifyReport> {
        require_asserted(e)?;
        check_ambient(e, self.cfg.n)?;
        let mut report = VerifyReport::default();
        for (idx, (f, t)) in self.samples.iter().enumerate() {
            let v = t.evaluate(e)?;
            let bad = breaks(e.relation(), &v).then(|| Violation {
                sample_index: idx as u64,
                weight_bound: self.cfg.weight_bound,
                denominator: 1,
                factorization: f.clone(),
                value: v.clone(),
                ops: Vec::new(),
            });
            report.record(v, bad);
        }
        Ok(report)
    }
}

/// Random op sequences of length `1..=max_len` over all ops valid for `n`,
/// identity ops included.
pub fn random_op_sequences(n: usize, count: usize, max_len: usize, seed: u64) -> Vec<Vec<OpSpec>> {
    let mut ops = OpSpec::all_nontrivial(n);
    ops.push(OpSpec::row(1, 1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=max_len.max(1));
            (0..len).map(|_| ops[rng.gen_range(0..ops.len())]).collect()
        })
        .collect()
}

/// Applies each sequence to `e` and verifies the result. Since the ops
/// preserve valid inequalities, any violation points at an implementation
/// error.
pub fn soundness_sweep(e: &DetExpr, sequences: &[Vec<OpSpec>], cfg: &VerifyConfig) -> Result<VerifyReport> {
    let mut total = VerifyReport::default();
    for seq in sequences {
        let derived = apply_sequence(e, seq)?;
        let mut r = verify(&derived, cfg)?;
        for v in &mut r.violations {
            v.ops = seq.clone();
        }
        total.absorb(r);
    }
    Ok(total)
}

/// Searches for a violation of `e`, trying `per_stage` samples at each
/// stage in turn.
pub fn hunt_counterexample(e: &DetExpr, seed: u64, per_stage: u64, stages: &[HuntStage]) -> Result<Option<Violation>> {
    require_asserted(e)?;
    for stage in stages {
        let mut pool = LazyPool::new(e.n(), seed, *stage)?;
        if let Some(v) = pool.find_violation(e, per_stage)? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// A sample stream whose minor tables are built on first use and kept, for
/// hunting counterexamples to many expressions of the same size.
pub struct LazyPool {
    n: usize,
    seed: u64,
    stage: HuntStage,
    samples: Vec<(BidiagFactorization, MinorTable)>,
}

impl LazyPool {
    pub fn new(n: usize, seed: u64, stage: HuntStage) -> Result<Self> {
        if n == 0 || n > MinorTable::MAX_N || stage.weight_bound == 0 || stage.denominator == 0 {
            return Err(Error::InvalidParameter(
                "need 1 <= n <= 8, weight_bound >= 1 and denominator >= 1".into(),
            ));
        }
        Ok(LazyPool { n, seed, stage, samples: Vec::new() })
    }

    pub fn built(&self) -> usize {
        self.samples.len()
    }

    /// First violation of `e` among the first `limit` samples.
    pub fn find_violation(&mut self, e: &DetExpr, limit: u64) -> Result<Option<Violation>> {
        require_asserted(e)?;
        check_ambient(e, self.n)?;
        for idx in 0..limit as usize {
            if idx == self.samples.len() {
                let f = self.stage.sample(self.n, self.seed, idx as u64)?;
                let t = MinorTable::new(&compose(&f))?;
                self.samples.push((f, t));
            }
            let (f, t) = &self.samples[idx];
            let v = t.evaluate(e)?;
            if breaks(e.relation(), &v) {
                return Ok(Some(Violation {
                    sample_index: idx as u64,
                    weight_bound: self.stage.weight_bound,
                    denominator: self.stage.denominator,
                    factorization: f.clone(),
                    value: v,
                    ops: Vec::new(),
                }));
            }
        }
        Ok(None)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct OracleReport {
    pub pairs_checked: usize,
    /// `(rows, cols)` pairs on which the three minor values disagree.
    pub mismatches: Vec<(IndexSet, IndexSet)>,
}

/// Compares elimination, cofactor expansion and planar path sums on every
/// pair of equal-size row and column sets.
pub fn oracle_compare_detailed(f: &BidiagFactorization) -> Result<OracleReport> {
    let n = f.n();
    if n > 5 {
        return Err(Error::DimensionTooLarge { n, limit: 5 });
    }
    let a = compose(f);
    let net = build_network(f);
    let mut report = OracleReport::default();
    for rows in IndexSet::all_subsets(n)? {
        for cols in IndexSet::all_of_size(n, rows.len())? {
            let x = minor(&a, &rows, &cols)?;
            let y = minor_cofactor(&a, &rows, &cols)?;
            let z = path_weight_sum(&net, &rows, &cols)?;
            report.pairs_checked += 1;
            if x != y || x != z {
                report.mismatches.push((rows, cols));
            }
        }
    }
    Ok(report)
}

pub fn oracle_compare(f: &BidiagFactorization) -> Result<bool> {
    Ok(oracle_compare_detailed(f)?.mismatches.is_empty())
}

/// Coefficients of `w -> evaluate(e, perturbed(a, op, w))`, recovered by
/// exact interpolation at `w = 0, 1, ..., deg`.
pub fn perturbation_coefficients(e: &DetExpr, a: &Matrix, op: &OpSpec) -> Result<Vec<Scalar>> {
    let deg = e.max_degree();
    let xs: Vec<Scalar> = (0..=deg).map(|k| Scalar::from_integer(k.into())).collect();
    let ys = xs
        .iter()
        .map(|w| evaluate(e, &perturbed_matrix(a, op, w)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(newton_to_monomial(&xs, &ys))
}

/// Divided differences, then expansion of the Newton form into powers of `w`.
fn newton_to_monomial(xs: &[Scalar], ys: &[Scalar]) -> Vec<Scalar> {
    let m = xs.len();
    let mut dd = ys.to_vec();
    for j in 1..m {
        for i in (j..m).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    let mut coeffs = vec![Scalar::zero(); m];
    for i in (0..m).rev() {
        // coeffs = coeffs * (w - xs[i]) + dd[i]
        let mut next = vec![Scalar::zero(); m];
        for k in 0..m {
            if coeffs[k].is_zero() {
                continue;
            }
            if k + 1 < m {
                next[k + 1] += &coeffs[k];
            }
            next[k] -= &coeffs[k] * &xs[i];
        }
        next[0] += &dd[i];
        coeffs = next;
    }
    coeffs
}

/// Predicted coefficients: every minor that the op shifts contributes
/// `m + w * m(shifted)`, every other minor stays constant; the powers of
/// `w` are collected term by term.
pub fn predicted_coefficients(e: &DetExpr, a: &Matrix, op: &OpSpec) -> Result<Vec<Scalar>> {
    op.validate(a.n())?;
    check_ambient(e, a.n())?;
    let deg = e.max_degree();
    let mut total = vec![Scalar::zero(); deg + 1];
    for t in e.terms() {
        let mut poly = vec![t.coeff.clone()];
        for m in &t.minors {
            let base = minor(a, &m.rows, &m.cols)?;
            let (set, shifts) = match op.axis {
                crate::expr_core::Axis::Row => (&m.rows, true),
                crate::expr_core::Axis::Col => (&m.cols, false),
            };
            let moves = !op.is_identity() && set.contains(op.u) && !set.contains(op.v);
            if !moves {
                for c in &mut poly {
                    *c *= &base;
                }
                continue;
            }
            let shifted = crate::expr_core::shift_set(set, op.u, op.v)?;
            let lin = if shifts { minor(a, &shifted, &m.cols)? } else { minor(a, &m.rows, &shifted)? };
            let mut next = vec![Scalar::zero(); poly.len() + 1];
            for (k, c) in poly.iter().enumerate() {
                next[k] += c * &base;
                next[k + 1] += c * &lin;
            }
            poly = next;
        }
        for (k, c) in poly.into_iter().enumerate() {
            total[k] += c;
        }
    }
    Ok(total)
}

/// Rational in `[0, bound]` with denominator up to `den`, for perturbation weights.
pub fn random_weight(rng: &mut ChaCha8Rng, bound: i64, den: i64) -> Scalar {
    let d = rng.gen_range(1..=den.max(1));
    let num = rng.gen_range(0..=bound * d);
    BigRational::new(num.into(), d.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{gantmacher_krein, karlin_identity, KarlinParams};
    use crate::expr_core::apply_op;
    use crate::tn_matrix::sample_integer_matrix;

    #[test]
    fn gk_has_no_violations_and_is_deterministic() {
        let cfg = VerifyConfig::new(4, 200, 3, 7).unwrap();
        for l in 1..=4 {
            let e = gantmacher_krein(4, l).unwrap();
            let r = verify(&e, &cfg).unwrap();
            assert!(r.holds());
            assert_eq!(r.checked, 200);
            assert_eq!(r, verify(&e, &cfg).unwrap());
        }
    }

    #[test]
    fn pool_matches_direct_verify() {
        let cfg = VerifyConfig::new(3, 50, 3, 1).unwrap();
        let pool = SamplePool::new(&cfg).unwrap();
        let e = gantmacher_krein(3, 2).unwrap();
        assert_eq!(pool.verify(&e).unwrap(), verify(&e, &cfg).unwrap());
    }

    #[test]
    fn fractional_stage_reaches_integer_blind_spot() {
        // det(1|1) det(1|2) <= det(1|2)^2 fails, but never with integer weights
        let q = crate::multiplicative::SmallestMultQuery::from_lists(2, [&[1], &[1], &[1], &[2], &[1], &[1], &[2], &[2]]).unwrap();
        let e = q.canonical_expr();
        assert!(hunt_counterexample(&e, 5, 2000, &HUNT_ESCALATION[..3]).unwrap().is_none());
        let v = hunt_counterexample(&e, 5, 2000, &HUNT_ESCALATION).unwrap().expect("fractional counterexample");
        assert_eq!(v.denominator, 6);
        assert!(v.recheck(&e).unwrap());
    }

    #[test]
    fn violations_recheck() {
        // det(1|2) det(2|1) >= det(1|1) det(2|2) is false
        let q = crate::multiplicative::SmallestMultQuery::from_lists(2, [&[1], &[2], &[2], &[1], &[1], &[2], &[1], &[2]]).unwrap();
        let e = q.reversed().canonical_expr();
        let found = hunt_counterexample(&e, 3, 100, &HUNT_ESCALATION).unwrap().expect("counterexample");
        assert!(found.value.is_negative());
        assert!(found.recheck(&e).unwrap());
        let r = verify(&e, &VerifyConfig::new(2, 20, 3, 3).unwrap()).unwrap();
        assert!(!r.holds());
        for v in &r.violations {
            assert!(v.recheck(&e).unwrap());
        }
    }

    #[test]
    fn identity_reports_zero_range() {
        let p = KarlinParams::new(4, &[2], &[1, 3], 2).unwrap();
        let r = verify(&karlin_identity(&p).unwrap(), &VerifyConfig::new(4, 30, 5, 2).unwrap()).unwrap();
        assert!(r.holds());
        assert_eq!(r.min_value_seen, Some(Scalar::zero()));
        assert_eq!(r.max_value_seen, Some(Scalar::zero()));
    }

    #[test]
    fn unasserted_is_rejected() {
        let e = gantmacher_krein(2, 1).unwrap().with_relation(Relation::Unasserted);
        assert!(verify(&e, &VerifyConfig::new(2, 1, 1, 0).unwrap()).is_err());
        assert!(VerifyConfig::new(2, 0, 1, 0).is_err());
    }

    #[test]
    fn empty_sequence_sweep_equals_verify() {
        let cfg = VerifyConfig::new(3, 40, 3, 9).unwrap();
        let e = gantmacher_krein(3, 1).unwrap();
        assert_eq!(soundness_sweep(&e, &[vec![]], &cfg).unwrap(), verify(&e, &cfg).unwrap());
        let seqs = random_op_sequences(3, 10, 4, 1);
        assert!(soundness_sweep(&e, &seqs, &cfg).unwrap().holds());
    }

    #[test]
    fn oracles_agree() {
        assert!(oracle_compare(&BidiagFactorization::identity(3).unwrap()).unwrap());
        for idx in 0..5 {
            let f = sample_factorization_indexed(4, 1, idx, 3, false).unwrap();
            let r = oracle_compare_detailed(&f).unwrap();
            assert_eq!(r.pairs_checked, 70);
            assert!(r.mismatches.is_empty());
        }
    }

    #[test]
    fn interpolation_matches_prediction() {
        let e = gantmacher_krein(4, 2).unwrap();
        let a = sample_integer_matrix(4, 3, 0, 4).unwrap();
        for op in OpSpec::all_nontrivial(4) {
            let got = perturbation_coefficients(&e, &a, &op).unwrap();
            let want = predicted_coefficients(&e, &a, &op).unwrap();
            assert_eq!(got, want, "{op}");
            let (img, rep) = apply_op(&e, &op).unwrap();
            assert_eq!(got[rep.max_count], evaluate(&img, &a).unwrap());
            assert!(got[rep.max_count + 1..].iter().all(Zero::is_zero));
            assert_eq!(got[0], evaluate(&e, &a).unwrap());
        }
    }

    #[test]
    fn newton_recovers_cubic() {
        let xs: Vec<Scalar> = (0..4).map(|k| Scalar::from_integer(k.into())).collect();
        // 2 - w + 3 w^3
        let ys: Vec<Scalar> = xs.iter().map(|w| Scalar::from_integer(2.into()) - w + Scalar::from_integer(3.into()) * w * w * w).collect();
        let c = newton_to_monomial(&xs, &ys);
        let want: Vec<Scalar> = [2, -1, 0, 3].iter().map(|&k: &i64| Scalar::from_integer(k.into())).collect();
        assert_eq!(c, want);
    }
}
