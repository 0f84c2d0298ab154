//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tn_ineq::expr_core::{apply_sequence, is_certifiably_false, IndexSet, OpSpec};
use tn_ineq::families::{karlin_identity, laplace_identity, Family, KarlinParams};
use tn_ineq::harness::{
    oracle_compare_detailed, predicted_coefficients, random_weight, LazyPool, SamplePool, VerifyConfig,
    HUNT_ESCALATION,
};
use tn_ineq::multiplicative::{
    decide, decide_via_setops, falsify_search, falsify_search_all_minimal, falsify_search_expr,
    necessary_conditions, reduce_to_complementary, replay_reduction, Outcome, SmallestMultQuery,
};
use tn_ineq::tn_matrix::{
    det, elementary_shift_identity_check, evaluate, perturbed_matrix, sample_factorization_indexed,
    sample_integer_matrix, MinorTable,
};
use tn_ineq::Scalar;

// Pinned limits. Every comparison is exact, so there is no numeric tolerance.
const EXAMPLE_TIME_LIMIT: Duration = Duration::from_secs(1);
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(120);
const FAMILY_TIME_LIMIT: Duration = Duration::from_secs(600);
const DECIDE_TIME_LIMIT: Duration = Duration::from_secs(300);
const FAMILY_SAMPLES: u64 = 200;
const FAMILY_WEIGHT_BOUNDS: [u64; 2] = [1, 3];
const IDENTITY_MATRICES: u64 = 1000;
const PERTURBATION_DRAWS: u64 = 50;
// Stricter than the allowed 100_000 samples per query.
const HUNT_TOTAL_SAMPLES: u64 = 8_000;
const SHIFT_DRAWS: u64 = 50;

type Check = Result<String, String>;
type Criterion = (usize, &'static str, fn() -> Check);

fn set(n: usize, e: &[usize]) -> IndexSet {
    IndexSet::new(n, e).unwrap()
}

fn example_one() -> SmallestMultQuery {
    SmallestMultQuery::from_lists(6, [&[1, 2, 3, 6], &[3, 4], &[1, 2, 4, 5], &[2, 5], &[1, 3, 6], &[2, 3, 4], &[1, 2, 5], &[2, 4, 5]])
        .unwrap()
}

fn example_two() -> SmallestMultQuery {
    SmallestMultQuery::from_lists(6, [&[1, 3, 4], &[2, 5, 6], &[1, 2, 3], &[4, 5, 6], &[1, 3, 4], &[2, 5, 6], &[3, 5, 6], &[1, 2, 4]])
        .unwrap()
}

fn timed(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    if t > limit {
        Err(format!("took {t:?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn criterion_1() -> Check {
    let r = OpSpec::row;
    for (name, q) in [("ex1", example_one()), ("ex2", example_two())] {
        for (dir, q) in [("le", q), ("ge", q.reversed())] {
            ensure(decide(&q).outcome == Outcome::Fails, format!("{name} {dir} not FAILS"))?;
        }
    }

    let start = Instant::now();
    let ge = falsify_search(&example_one().reversed(), 6).map_err(|e| e.to_string())?;
    ensure(ge.witness == Some(vec![r(1, 2)]), format!("ex1 ge witness {:?}", ge.witness))?;
    timed(EXAMPLE_TIME_LIMIT, start)?;

    let start = Instant::now();
    let q = example_one();
    let le = falsify_search(&q, 6).map_err(|e| e.to_string())?;
    let w = le.witness.ok_or("ex1 le: no witness")?;
    let e = q.canonical_expr();
    ensure(w.len() == 2, "ex1 le: witness depth is not 2")?;
    ensure(is_certifiably_false(&apply_sequence(&e, &w).unwrap()), "ex1 le: witness invalid")?;
    let reference = vec![r(3, 2), r(4, 3)];
    ensure(is_certifiably_false(&apply_sequence(&e, &reference).unwrap()), "ex1 le: reference sequence invalid")?;
    let all = falsify_search_all_minimal(&e, 2).map_err(|e| e.to_string())?;
    ensure(all.contains(&reference), "ex1 le: reference sequence not among minimal witnesses")?;
    timed(EXAMPLE_TIME_LIMIT, start)?;

    let start = Instant::now();
    let pf = falsify_search_expr(&example_two().to_principal_form().to_expr(), 8).map_err(|e| e.to_string())?;
    ensure(pf.witness == Some(vec![r(6, 7)]), format!("ex2 principal witness {:?}", pf.witness))?;
    timed(EXAMPLE_TIME_LIMIT, start)?;

    let shown = w.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(",");
    Ok(format!("both examples FAIL both ways; witnesses [R(1,2)], [{shown}] (reference [R(3,2),R(4,3)] also minimal), [R(6,7)]"))
}

fn criterion_2() -> Check {
    let pf = example_two().to_principal_form();
    ensure(pf.r1 == set(12, &[1, 3, 4, 7, 8, 9]), "R1")?;
    ensure(pf.r2 == set(12, &[2, 5, 6, 10, 11, 12]), "R2")?;
    ensure(pf.k1 == set(12, &[1, 3, 4, 9, 11, 12]), "K1")?;
    ensure(pf.k2 == set(12, &[2, 5, 6, 7, 8, 10]), "K2")?;
    Ok("R1, R2, K1, K2 match the expected sets".into())
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let mut pairs = 0;
    for (n, trials) in [(2, 100), (3, 100), (4, 100), (5, 10)] {
        for idx in 0..trials {
            let f = sample_factorization_indexed(n, 31, idx, 5, false).map_err(|e| e.to_string())?;
            let rep = oracle_compare_detailed(&f).map_err(|e| e.to_string())?;
            pairs += rep.pairs_checked;
            ensure(rep.mismatches.is_empty(), format!("n={n} trial {idx}: {:?}", rep.mismatches))?;
        }
    }
    timed(ORACLE_TIME_LIMIT, start)?;
    Ok(format!("{pairs} (I,J) pairs agree across three oracles in {:?}", start.elapsed()))
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let mut instances = 0;
    let mut evaluations = 0u64;
    for n in 1..=5 {
        let fams = Family::admissible(n, 3).map_err(|e| e.to_string())?;
        let exprs = fams.iter().map(|f| f.expr().map(|e| (f, e))).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
        instances += exprs.len();
        for wb in FAMILY_WEIGHT_BOUNDS {
            let cfg = VerifyConfig::new(n, FAMILY_SAMPLES, wb, 1000 + n as u64).map_err(|e| e.to_string())?;
            let pool = SamplePool::new(&cfg).map_err(|e| e.to_string())?;
            for (f, e) in &exprs {
                let rep = pool.verify(e).map_err(|e| e.to_string())?;
                evaluations += rep.checked;
                ensure(rep.holds(), format!("{} {:?} W={wb}: {} violations", f.name(), f.to_params(), rep.violation_count))?;
            }
        }
    }
    timed(FAMILY_TIME_LIMIT, start)?;
    Ok(format!("{instances} family instances, {evaluations} exact evaluations, zero violations in {:?}", start.elapsed()))
}

fn criterion_5() -> Check {
    let mut checked = 0;
    for idx in 0..IDENTITY_MATRICES {
        let n = 2 + (idx % 4) as usize;
        let a = sample_integer_matrix(n, 77, idx, 9).map_err(|e| e.to_string())?;
        let t = MinorTable::new(&a).map_err(|e| e.to_string())?;
        let d = det(&a);
        for i in 1..=n {
            for j in 1..=n {
                let e = laplace_identity(n, i, j).map_err(|e| e.to_string())?;
                ensure(t.evaluate(&e).unwrap() == Scalar::from_integer(0.into()), format!("Laplace n={n} i={i} j={j} matrix {idx}"))?;
                // The expansion part alone equals det A on the diagonal and 0 off it.
                let expansion: Scalar = e
                    .terms()
                    .iter()
                    .filter(|term| term.minors.len() == 2)
                    .map(|term| &term.coeff * t.get(&term.minors[0].rows, &term.minors[0].cols) * t.get(&term.minors[1].rows, &term.minors[1].cols))
                    .sum();
                let want = if i == j { d.clone() } else { Scalar::from_integer(0.into()) };
                ensure(expansion == want, format!("Laplace expansion n={n} i={i} j={j} matrix {idx}"))?;
                checked += 1;
            }
        }
        for p in KarlinParams::enumerate(n).map_err(|e| e.to_string())? {
            let e = karlin_identity(&p).map_err(|e| e.to_string())?;
            ensure(t.evaluate(&e).unwrap() == Scalar::from_integer(0.into()), format!("Karlin {p:?} matrix {idx}"))?;
            checked += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for draw in 0..PERTURBATION_DRAWS {
        let n = rng.gen_range(2..=5usize);
        let params = KarlinParams::enumerate(n).map_err(|e| e.to_string())?;
        let p = params[rng.gen_range(0..params.len())];
        let e = karlin_identity(&p).map_err(|e| e.to_string())?;
        let a = sample_integer_matrix(n, 78, draw, 9).map_err(|e| e.to_string())?;
        let u = rng.gen_range(1..=n);
        let v = if u == 1 || (u < n && rng.gen_bool(0.5)) { u + 1 } else { u - 1 };
        let op = if rng.gen_bool(0.5) { OpSpec::row(u, v) } else { OpSpec::col(u, v) };
        let w = random_weight(&mut rng, 5, 7);
        let coeffs = predicted_coefficients(&e, &a, &op).map_err(|e| e.to_string())?;
        ensure(coeffs.iter().all(|c| c == &Scalar::from_integer(0.into())), format!("H coefficients nonzero for {p:?} {op}"))?;
        let b = perturbed_matrix(&a, &op, &w).map_err(|e| e.to_string())?;
        ensure(evaluate(&e, &b).unwrap() == Scalar::from_integer(0.into()), format!("perturbed Karlin {p:?} {op} w={w}"))?;
    }
    Ok(format!("{checked} identity evaluations exact on {IDENTITY_MATRICES} integer matrices; {PERTURBATION_DRAWS} perturbations with vanishing coefficients"))
}

fn all_queries(max_n: usize) -> Result<Vec<SmallestMultQuery>, String> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        out.extend(SmallestMultQuery::enumerate(n).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let mut count = 0;
    let mut holds = 0;
    for n in [2, 3] {
        for q in SmallestMultQuery::enumerate(n).map_err(|e| e.to_string())? {
            let a = decide(&q);
            let b = decide_via_setops(&q).map_err(|e| e.to_string())?;
            ensure(a.outcome == b.outcome, format!("disagreement on {}", q.to_json_value()))?;
            count += 1;
            holds += a.holds() as usize;
        }
    }
    timed(DECIDE_TIME_LIMIT, start)?;
    Ok(format!("{count} queries ({holds} HOLDS), zero disagreements in {:?}", start.elapsed()))
}

fn criterion_7() -> Check {
    let per_bound = HUNT_TOTAL_SAMPLES / HUNT_ESCALATION.len() as u64;
    let mut targets: Vec<SmallestMultQuery> = all_queries(3)?.into_iter().filter(|q| !decide(q).holds()).collect();
    let fails_small = targets.len();
    targets.extend([example_one(), example_one().reversed(), example_two(), example_two().reversed()]);
    let mut pools: Vec<Vec<LazyPool>> = (0..=6)
        .map(|n| if n == 0 { Vec::new() } else { HUNT_ESCALATION.iter().map(|&st| LazyPool::new(n, 4242, st).unwrap()).collect() })
        .collect();
    let mut worst = 0u64;
    // Queries that differ only in factor order share an expression.
    let mut seen = std::collections::HashSet::new();
    for q in &targets {
        let e = q.canonical_expr();
        if !seen.insert(e.to_json()) {
            continue;
        }
        let mut found = None;
        let mut spent = 0;
        for pool in pools[q.n()].iter_mut() {
            if let Some(v) = pool.find_violation(&e, per_bound).map_err(|e| e.to_string())? {
                spent += v.sample_index + 1;
                found = Some(v);
                break;
            }
            spent += per_bound;
        }
        let v = found.ok_or_else(|| format!("no counterexample for {}", q.to_json_value()))?;
        ensure(v.recheck(&e).unwrap(), "counterexample does not recheck")?;
        worst = worst.max(spent);
    }
    Ok(format!("{fails_small} FAILS queries with n <= 3 ({} distinct expressions) plus both examples in both directions all refuted; worst case {worst} samples", seen.len() - 4))
}

fn criterion_8() -> Check {
    let mut holds = 0;
    for q in all_queries(4)? {
        if decide(&q).holds() {
            necessary_conditions(&q).map_err(|v| format!("{v:?} on {}", q.to_json_value()))?;
            holds += 1;
        }
    }
    Ok(format!("{holds} HOLDS verdicts (n <= 4) satisfy the multiplicity conditions"))
}

fn criterion_9() -> Check {
    let mut holds = 0;
    for q in SmallestMultQuery::enumerate(3).map_err(|e| e.to_string())? {
        if !decide(&q).holds() {
            continue;
        }
        holds += 1;
        let r = reduce_to_complementary(&q).map_err(|e| e.to_string())?;
        ensure(r.ancestor.is_complementary(), format!("ancestor not complementary for {}", q.to_json_value()))?;
        ensure(decide(&r.ancestor).holds(), format!("ancestor fails for {}", q.to_json_value()))?;
        let back = replay_reduction(&r).map_err(|e| e.to_string())?;
        ensure(back.as_ref() == Some(&q), format!("round trip gave {back:?} for {}", q.to_json_value()))?;
    }
    Ok(format!("{holds} HOLDS queries at n = 3 round-trip through complementary ancestors"))
}

fn criterion_10() -> Check {
    let n = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let subsets = IndexSet::all_subsets(n).unwrap();
    let mut checks = 0;
    for draw in 0..SHIFT_DRAWS {
        let a = sample_integer_matrix(n, 410, draw, 9).map_err(|e| e.to_string())?;
        let at = a.transpose();
        let w = random_weight(&mut rng, 5, 7);
        for u in 1..n {
            for (u, v) in [(u, u + 1), (u + 1, u)] {
                for rows in &subsets {
                    for cols in subsets.iter().filter(|c| c.len() == rows.len()) {
                        ensure(elementary_shift_identity_check(&a, u, v, &w, rows, cols).unwrap(), format!("row ({u},{v}) {rows:?} {cols:?}"))?;
                        ensure(elementary_shift_identity_check(&at, u, v, &w, cols, rows).unwrap(), format!("col ({u},{v}) {rows:?} {cols:?}"))?;
                        checks += 2;
                    }
                }
            }
        }
    }
    Ok(format!("{checks} exact row and column shift identities at n = 4"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "worked examples", criterion_1),
        (2, "principal form of the second example", criterion_2),
        (3, "triple minor oracle", criterion_3),
        (4, "additive family soundness", criterion_4),
        (5, "identity suite", criterion_5),
        (6, "decision cross-validation", criterion_6),
        (7, "FAILS soundness", criterion_7),
        (8, "HOLDS necessary conditions", criterion_8),
        (9, "complementary reduction", criterion_9),
        (10, "elementary shift identity", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (k, name, run) in criteria {
        let label = format!("criterion {k}: {name}");
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        match run() {
            Ok(msg) => println!("PASS {label}: {msg} [{:.2?}]", start.elapsed()),
            Err(msg) => {
                failed += 1;
                println!("FAIL {label}: {msg} [{:.2?}]", start.elapsed());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
