//! Exact matrices, bidiagonal factorizations, minors and expression evaluation.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr_core::json::{parse_rational, rational_string};
use crate::expr_core::{Axis, DetExpr, IndexSet, Minor, OpSpec};

pub type Scalar = BigRational;

fn q(x: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(x))
}

/// Square matrix over exact rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    n: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::SizeMismatch("matrix dimension must be at least 1".into()));
        }
        Ok(Matrix {
            n,
            entries: vec![Scalar::zero(); n * n],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Matrix::zeros(n)?;
        for i in 0..n {
            m.entries[i * n + i] = Scalar::one();
        }
        Ok(m)
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::SizeMismatch("matrix dimension must be at least 1".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::SizeMismatch("matrix must be square".into()));
            }
            entries.extend(r);
        }
        Ok(Matrix { n, entries })
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Result<Self> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[(i - 1) * self.n + (j - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        let n = self.n;
        self.entries[(i - 1) * n + (j - 1)] = x;
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        self.entries.chunks(self.n).map(|c| c.to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(format!(
                "cannot multiply {0}x{0} by {1}x{1}",
                self.n, other.n
            )));
        }
        let n = self.n;
        let mut out = Matrix::zeros(n)?;
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.entries[k * n + j];
                    if !b.is_zero() {
                        out.entries[i * n + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix {
            n: self.n,
            entries: self.entries.iter().map(|x| x * c).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        if self.n != other.n {
            return Err(Error::SizeMismatch("dimension mismatch".into()));
        }
        Ok(Matrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Entrywise product.
    pub fn hadamard(&self, other: &Matrix) -> Result<Matrix> {
        if self.n != other.n {
            return Err(Error::SizeMismatch("dimension mismatch".into()));
        }
        Ok(Matrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// Row-major rational strings.
    pub fn to_json_value(&self) -> Vec<Vec<String>> {
        self.entries
            .chunks(self.n)
            .map(|r| r.iter().map(rational_string).collect())
            .collect()
    }

    pub fn from_json_value(rows: &[Vec<String>]) -> Result<Matrix> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(&self.to_json_value()).unwrap())
    }
}

fn check_minor_args(a: &Matrix, rows: &IndexSet, cols: &IndexSet) -> Result<()> {
    if rows.len() != cols.len() {
        return Err(Error::SizeMismatch(format!(
            "minor rows {rows} and cols {cols} differ in size"
        )));
    }
    for s in [rows, cols] {
        if let Some(k) = s.last() {
            if k > a.n {
                return Err(Error::OutOfRange { index: k, n: a.n });
            }
        }
    }
    Ok(())
}

/// `det A(rows | cols)` by fraction-free elimination. Each selected row is
/// first cleared of denominators so the elimination runs over integers.
pub fn minor(a: &Matrix, rows: &IndexSet, cols: &IndexSet) -> Result<Scalar> {
    check_minor_args(a, rows, cols)?;
    let r: Vec<usize> = rows.elements();
    let c: Vec<usize> = cols.elements();
    let k = r.len();
    if k == 0 {
        return Ok(Scalar::one());
    }
    let mut scale = BigInt::one();
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(k);
    for &i in &r {
        let mut l = BigInt::one();
        for &j in &c {
            l = l.lcm(a.get(i, j).denom());
        }
        scale *= &l;
        m.push(
            c.iter()
                .map(|&j| {
                    let x = a.get(i, j);
                    x.numer() * (&l / x.denom())
                })
                .collect(),
        );
    }
    let d = bareiss_det(m);
    Ok(Scalar::new(d, scale))
}

/// Determinant of an integer matrix by Bareiss elimination with row swaps.
fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let k = m.len();
    let mut negate = false;
    let mut prev = BigInt::one();
    for p in 0..k {
        if m[p][p].is_zero() {
            match (p + 1..k).find(|&i| !m[i][p].is_zero()) {
                Some(i) => {
                    m.swap(p, i);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in p + 1..k {
            for j in p + 1..k {
                let t = &m[i][j] * &m[p][p] - &m[i][p] * &m[p][j];
                m[i][j] = t / &prev;
            }
        }
        prev = m[p][p].clone();
    }
    let d = m[k - 1][k - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// `det A(rows | cols)` by cofactor expansion along the first selected row.
/// Exponential; used as an independent oracle for small minors.
pub fn minor_cofactor(a: &Matrix, rows: &IndexSet, cols: &IndexSet) -> Result<Scalar> {
    check_minor_args(a, rows, cols)?;
    Ok(cofactor_rec(a, &rows.elements(), &cols.elements()))
}

fn cofactor_rec(a: &Matrix, r: &[usize], c: &[usize]) -> Scalar {
    if r.is_empty() {
        return Scalar::one();
    }
    let mut acc = Scalar::zero();
    for (t, &j) in c.iter().enumerate() {
        let x = a.get(r[0], j);
        if x.is_zero() {
            continue;
        }
        let rest: Vec<usize> = c.iter().copied().filter(|&y| y != j).collect();
        let sub = x * cofactor_rec(a, &r[1..], &rest);
        if t % 2 == 0 {
            acc += sub;
        } else {
            acc -= sub;
        }
    }
    acc
}

pub fn det(a: &Matrix) -> Scalar {
    let full = IndexSet::full(a.n).expect("n <= 64");
    minor(a, &full, &full).expect("square")
}

/// Exact value of `e` at `a`; minors are computed once per call.
pub fn evaluate(e: &DetExpr, a: &Matrix) -> Result<Scalar> {
    if e.n() != a.n {
        return Err(Error::AmbientMismatch {
            expected: e.n(),
            found: a.n,
        });
    }
    let mut cache: HashMap<Minor, Scalar> = HashMap::new();
    let mut total = Scalar::zero();
    for t in e.terms() {
        let mut p = t.coeff.clone();
        for m in &t.minors {
            if !cache.contains_key(m) {
                cache.insert(*m, minor(a, &m.rows, &m.cols)?);
            }
            p *= &cache[m];
            if p.is_zero() {
                break;
            }
        }
        total += p;
    }
    Ok(total)
}

/// Every minor of a matrix, filled by memoized expansion along the first row
/// of each submatrix. Indexed by `(row mask, col mask)`.
pub struct MinorTable {
    n: usize,
    values: Vec<Scalar>,
}

impl MinorTable {
    pub const MAX_N: usize = 8;

    pub fn new(a: &Matrix) -> Result<Self> {
        let n = a.n;
        if n > Self::MAX_N {
            return Err(Error::DimensionTooLarge {
                n,
                limit: Self::MAX_N,
            });
        }
        let size = 1usize << n;
        let mut values = vec![Scalar::zero(); size * size];
        values[0] = Scalar::one();
        let mut by_size: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for m in 0..size {
            by_size[m.count_ones() as usize].push(m);
        }
        for group in by_size.iter().skip(1) {
            for &rm in group {
                let i = rm.trailing_zeros() as usize;
                let rest_r = rm & (rm - 1);
                for &cm in group {
                    let mut acc = Scalar::zero();
                    let mut bits = cm;
                    let mut t = 0;
                    while bits != 0 {
                        let j = bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        let x = &a.entries[i * n + j];
                        if !x.is_zero() {
                            let sub = &values[rest_r * size + (cm & !(1 << j))];
                            if !sub.is_zero() {
                                let p = x * sub;
                                if t % 2 == 0 {
                                    acc += p;
                                } else {
                                    acc -= p;
                                }
                            }
                        }
                        t += 1;
                    }
                    values[rm * size + cm] = acc;
                }
            }
        }
        Ok(MinorTable { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, rows: &IndexSet, cols: &IndexSet) -> &Scalar {
        &self.values[(rows.mask() as usize) * (1 << self.n) + cols.mask() as usize]
    }

    pub fn evaluate(&self, e: &DetExpr) -> Result<Scalar> {
        if e.n() != self.n {
            return Err(Error::AmbientMismatch {
                expected: e.n(),
                found: self.n,
            });
        }
        let mut total = Scalar::zero();
        for t in e.terms() {
            let mut p = t.coeff.clone();
            for m in &t.minors {
                let v = self.get(&m.rows, &m.cols);
                if v.is_zero() {
                    p = Scalar::zero();
                    break;
                }
                p *= v;
            }
            total += p;
        }
        Ok(total)
    }
}

/// Transposed matrix of cofactors.
pub fn adjugate(a: &Matrix) -> Matrix {
    let n = a.n;
    let mut out = Matrix::zeros(n).expect("n >= 1");
    if n == 1 {
        out.entries[0] = Scalar::one();
        return out;
    }
    let full = IndexSet::full(n).expect("n <= 64");
    for i in 1..=n {
        for j in 1..=n {
            // adj[i][j] = (-1)^(i+j) det A with row j and column i removed
            let m = minor(a, &full.without(j), &full.without(i)).expect("square");
            out.set(i, j, if (i + j) % 2 == 0 { m } else { -m });
        }
    }
    out
}

/// `A o adj(A)^T - det(A) I`.
pub fn a_star(a: &Matrix) -> Matrix {
    let adj_t = adjugate(a).transpose();
    let prod = a.hadamard(&adj_t).expect("same size");
    let d = Matrix::identity(a.n).expect("n >= 1").scale(&det(a));
    prod.sub(&d).expect("same size")
}

/// One elementary factor: `I + w E_{k+1,k}`, `I + w E_{k,k+1}` or a diagonal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BidiagFactor {
    Lower { k: usize, w: Scalar },
    Upper { k: usize, w: Scalar },
    Diag { d: Vec<Scalar> },
}

impl BidiagFactor {
    fn validate(&self, n: usize) -> Result<()> {
        match self {
            BidiagFactor::Lower { k, w } | BidiagFactor::Upper { k, w } => {
                if *k == 0 || *k >= n {
                    return Err(Error::InvalidFactorization(format!(
                        "factor index {k} outside [1, {}]",
                        n.saturating_sub(1)
                    )));
                }
                if w.is_negative() {
                    return Err(Error::InvalidFactorization(format!("negative weight {w}")));
                }
            }
            BidiagFactor::Diag { d } => {
                if d.len() != n {
                    return Err(Error::InvalidFactorization(format!(
                        "diagonal has {} entries, expected {n}",
                        d.len()
                    )));
                }
                if let Some(x) = d.iter().find(|x| !x.is_positive()) {
                    return Err(Error::InvalidFactorization(format!(
                        "diagonal entry {x} is not positive"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Right-multiplies `m` by this factor in place.
    fn apply_right(&self, m: &mut Matrix) {
        let n = m.n;
        match self {
            BidiagFactor::Lower { k, w } => {
                // column k += w * column k+1
                if w.is_zero() {
                    return;
                }
                for i in 0..n {
                    let add = &m.entries[i * n + *k] * w;
                    m.entries[i * n + (k - 1)] += add;
                }
            }
            BidiagFactor::Upper { k, w } => {
                // column k+1 += w * column k
                if w.is_zero() {
                    return;
                }
                for i in 0..n {
                    let add = &m.entries[i * n + (k - 1)] * w;
                    m.entries[i * n + *k] += add;
                }
            }
            BidiagFactor::Diag { d } => {
                for i in 0..n {
                    for (j, dj) in d.iter().enumerate() {
                        m.entries[i * n + j] *= dj;
                    }
                }
            }
        }
    }
}

/// Lower factors, one positive diagonal, upper factors, multiplied in order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BidiagFactorization {
    n: usize,
    factors: Vec<BidiagFactor>,
}

/// Index pairs `k` of the lower factors in the full layout, in product order.
pub fn lower_layout(n: usize) -> Vec<usize> {
    let mut ks = Vec::new();
    for j in 1..n {
        for k in (j..n).rev() {
            ks.push(k);
        }
    }
    ks
}

/// Index pairs `k` of the upper factors in the full layout, in product order
/// (the transpose mirror of [`lower_layout`]).
pub fn upper_layout(n: usize) -> Vec<usize> {
    let mut ks = Vec::new();
    for j in (1..n).rev() {
        for k in j..n {
            ks.push(k);
        }
    }
    ks
}

impl BidiagFactorization {
    pub fn new(n: usize, factors: Vec<BidiagFactor>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidFactorization("n must be at least 1".into()));
        }
        let mut seen_diag = false;
        for f in &factors {
            f.validate(n)?;
            match f {
                BidiagFactor::Diag { .. } => {
                    if seen_diag {
                        return Err(Error::InvalidFactorization("more than one diagonal factor".into()));
                    }
                    seen_diag = true;
                }
                BidiagFactor::Lower { .. } if seen_diag => {
                    return Err(Error::InvalidFactorization("lower factor after the diagonal".into()))
                }
                BidiagFactor::Upper { .. } if !seen_diag => {
                    return Err(Error::InvalidFactorization("upper factor before the diagonal".into()))
                }
                _ => {}
            }
        }
        if !seen_diag {
            return Err(Error::InvalidFactorization("missing diagonal factor".into()));
        }
        Ok(BidiagFactorization { n, factors })
    }

    /// Full layout from explicit weights (`lower.len() == upper.len() == n(n-1)/2`).
    pub fn from_weights(n: usize, lower: Vec<Scalar>, d: Vec<Scalar>, upper: Vec<Scalar>) -> Result<Self> {
        let lk = lower_layout(n);
        let uk = upper_layout(n);
        if lower.len() != lk.len() || upper.len() != uk.len() {
            return Err(Error::InvalidFactorization(format!(
                "expected {} lower and upper weights",
                lk.len()
            )));
        }
        let mut factors: Vec<BidiagFactor> = lk
            .into_iter()
            .zip(lower)
            .map(|(k, w)| BidiagFactor::Lower { k, w })
            .collect();
        factors.push(BidiagFactor::Diag { d });
        factors.extend(uk.into_iter().zip(upper).map(|(k, w)| BidiagFactor::Upper { k, w }));
        BidiagFactorization::new(n, factors)
    }

    pub fn identity(n: usize) -> Result<Self> {
        BidiagFactorization::new(n, vec![BidiagFactor::Diag { d: vec![Scalar::one(); n] }])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn factors(&self) -> &[BidiagFactor] {
        &self.factors
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&FactorizationJson::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: FactorizationJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        BidiagFactorization::try_from(&j)
    }
}

/// Product of an arbitrary factor sequence (no layout constraint).
pub fn compose_factors(n: usize, factors: &[BidiagFactor]) -> Result<Matrix> {
    let mut m = Matrix::identity(n)?;
    for f in factors {
        f.validate(n)?;
        f.apply_right(&mut m);
    }
    Ok(m)
}

pub fn compose(f: &BidiagFactorization) -> Matrix {
    compose_factors(f.n, &f.factors).expect("validated at construction")
}

/// Deterministic sample with the full layout: weights uniform in
/// `{0..=weight_bound}`, diagonal uniform in `{1..=weight_bound}`.
pub fn sample_factorization(n: usize, seed: u64, weight_bound: u64) -> Result<BidiagFactorization> {
    sample_factorization_indexed(n, seed, 0, weight_bound, false)
}

/// Sample number `index` of the stream selected by `seed`. With
/// `nonsingular_only` the off-diagonal weights are drawn from
/// `{1..=weight_bound}`, so every minor is positive.
pub fn sample_factorization_indexed(
    n: usize,
    seed: u64,
    index: u64,
    weight_bound: u64,
    nonsingular_only: bool,
) -> Result<BidiagFactorization> {
    sample_factorization_fractional(n, seed, index, weight_bound, 1, nonsingular_only)
}

/// Like [`sample_factorization_indexed`] with weights `k / denominator`,
/// `k` uniform in `{0..=weight_bound * denominator}` (diagonal from 1).
/// With `denominator = 1` the stream is the integer one.
pub fn sample_factorization_fractional(
    n: usize,
    seed: u64,
    index: u64,
    weight_bound: u64,
    denominator: u64,
    nonsingular_only: bool,
) -> Result<BidiagFactorization> {
    if n == 0 || weight_bound == 0 || denominator == 0 {
        return Err(Error::InvalidParameter("n, weight_bound and denominator must be at least 1".into()));
    }
    let top = weight_bound
        .checked_mul(denominator)
        .ok_or_else(|| Error::InvalidParameter("weight_bound * denominator overflows".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let lo = if nonsingular_only { 1 } else { 0 };
    let count = n * (n - 1) / 2;
    let den = BigInt::from(denominator);
    let mut draw = |lo: u64| Scalar::new(BigInt::from(rng.gen_range(lo..=top)), den.clone());
    let lower: Vec<Scalar> = (0..count).map(|_| draw(lo)).collect();
    let d: Vec<Scalar> = (0..n).map(|_| draw(1)).collect();
    let upper: Vec<Scalar> = (0..count).map(|_| draw(lo)).collect();
    BidiagFactorization::from_weights(n, lower, d, upper)
}

/// Matrix with independent integer entries in `[-bound, bound]`; not TN in general.
pub fn sample_integer_matrix(n: usize, seed: u64, index: u64, bound: i64) -> Result<Matrix> {
    if n == 0 || bound < 0 {
        return Err(Error::InvalidParameter("n >= 1 and bound >= 0 required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let rows = (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(-bound..=bound)).collect())
        .collect::<Vec<Vec<i64>>>();
    Matrix::from_ints(&rows)
}

/// True iff every minor is nonnegative.
pub fn is_tn_bruteforce(a: &Matrix) -> Result<bool> {
    let table = MinorTable::new(a)?;
    let size = 1usize << a.n;
    for rm in 0..size {
        for cm in 0..size {
            if rm.count_ones() == cm.count_ones() && table.values[rm * size + cm].is_negative() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `(I + w E_uv) A` for a row op `R_(u,v)`; `A (I + w E_vu)` for `C_(u,v)`.
/// Under it a minor whose `axis` set contains `u` but not `v` gains
/// `w` times the shifted minor.
pub fn perturbed_matrix(a: &Matrix, op: &OpSpec, w: &Scalar) -> Result<Matrix> {
    op.validate(a.n)?;
    let mut b = a.clone();
    if op.is_identity() {
        return Ok(b);
    }
    let n = a.n;
    match op.axis {
        Axis::Row => {
            for j in 1..=n {
                let x = b.get(op.u, j) + w * a.get(op.v, j);
                b.set(op.u, j, x);
            }
        }
        Axis::Col => {
            for i in 1..=n {
                let x = b.get(i, op.u) + w * a.get(i, op.v);
                b.set(i, op.u, x);
            }
        }
    }
    Ok(b)
}

/// Checks `det((I + w E_uv) A)(I|J) = det A(I|J) + w det A(I(u,v)|J)` when
/// `u` is in `I` and `v` is not, and equality of the two minors otherwise.
pub fn elementary_shift_identity_check(
    a: &Matrix,
    u: usize,
    v: usize,
    w: &Scalar,
    rows: &IndexSet,
    cols: &IndexSet,
) -> Result<bool> {
    if u.abs_diff(v) != 1 {
        return Err(Error::NonConsecutive { u, v });
    }
    let op = OpSpec::row(u, v);
    let b = perturbed_matrix(a, &op, w)?;
    let lhs = minor(&b, rows, cols)?;
    let base = minor(a, rows, cols)?;
    let rhs = if rows.contains(u) && !rows.contains(v) {
        let shifted = crate::expr_core::shift_set(rows, u, v)?;
        base + w * minor(a, &shifted, cols)?
    } else {
        base
    };
    Ok(lhs == rhs)
}

#[derive(Serialize, Deserialize, Debug, Clone)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FactorJson {
    Lower { k: usize, w: String },
    Upper { k: usize, w: String },
    Diag { d: Vec<String> },
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct FactorizationJson {
    pub n: usize,
    pub factors: Vec<FactorJson>,
}

impl From<&BidiagFactorization> for FactorizationJson {
    fn from(f: &BidiagFactorization) -> Self {
        FactorizationJson {
            n: f.n,
            factors: f
                .factors
                .iter()
                .map(|x| match x {
                    BidiagFactor::Lower { k, w } => FactorJson::Lower {
                        k: *k,
                        w: rational_string(w),
                    },
                    BidiagFactor::Upper { k, w } => FactorJson::Upper {
                        k: *k,
                        w: rational_string(w),
                    },
                    BidiagFactor::Diag { d } => FactorJson::Diag {
                        d: d.iter().map(rational_string).collect(),
                    },
                })
                .collect(),
        }
    }
}

impl TryFrom<&FactorizationJson> for BidiagFactorization {
    type Error = Error;

    fn try_from(j: &FactorizationJson) -> Result<Self> {
        let factors = j
            .factors
            .iter()
            .map(|x| {
                Ok(match x {
                    FactorJson::Lower { k, w } => BidiagFactor::Lower {
                        k: *k,
                        w: parse_rational(w)?,
                    },
                    FactorJson::Upper { k, w } => BidiagFactor::Upper {
                        k: *k,
                        w: parse_rational(w)?,
                    },
                    FactorJson::Diag { d } => BidiagFactor::Diag {
                        d: d.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?,
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        BidiagFactorization::new(j.n, factors)
    }
}
