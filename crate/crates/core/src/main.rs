use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use tn_ineq::error::Error;
use tn_ineq::families::{Family, FamilyParamsJson, FAMILY_NAMES};
use tn_ineq::harness::{oracle_compare_detailed, verify, VerifyConfig};
use tn_ineq::multiplicative::{
    decide, decide_via_setops, falsify_search_expr, SearchStatus, SmallestMultQuery,
};
use tn_ineq::tn_matrix::sample_factorization_indexed;
use tn_ineq::{apply_sequence, DetExpr, OpSpec};

const EXIT_HOLDS: u8 = 0;
const EXIT_FALSIFIED: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_BAD_INPUT: u8 = 64;

#[derive(Parser)]
#[command(name = "tn-ineq", version, about = "Determinantal inequalities over totally nonnegative matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an expression exactly on sampled TN matrices.
    Verify(VerifyArgs),
    /// Decide a smallest multiplicative inequality.
    Decide(DecideArgs),
    /// Search for ops turning an inequality into a certifiably false one.
    Falsify(FalsifyArgs),
    /// Apply set row/column operations to an expression.
    Apply(ApplyArgs),
    /// Generate a member of an inequality family.
    Family(FamilyArgs),
    /// Compare the three minor oracles on random factorizations.
    Oracle(OracleArgs),
}

#[derive(Args, Default)]
struct FamilyFlags {
    /// Family name: gk, laplace-diag, laplace-offdiag, karlin, karlin-id, genlaplace, bj, bj-shifted.
    #[arg(long)]
    family: Option<String>,
    /// JSON file with the family parameters.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    u: Option<usize>,
    #[arg(long)]
    v: Option<usize>,
    /// Comma-separated lists.
    #[arg(long = "T", value_delimiter = ',')]
    t: Option<Vec<usize>>,
    #[arg(long = "S", value_delimiter = ',')]
    s: Option<Vec<usize>>,
    #[arg(long = "P1", value_delimiter = ',')]
    p1: Option<Vec<usize>>,
    #[arg(long = "P2", value_delimiter = ',')]
    p2: Option<Vec<usize>>,
    #[arg(long = "Q1", value_delimiter = ',')]
    q1: Option<Vec<usize>>,
    #[arg(long = "Q2", value_delimiter = ',')]
    q2: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    mu: Option<Vec<usize>>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    fam: FamilyFlags,
    /// Expression JSON file (instead of a family).
    #[arg(long)]
    expr: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    weight_bound: u64,
    /// Draw strictly positive weights only.
    #[arg(long)]
    nonsingular_only: bool,
}

#[derive(Args)]
struct DecideArgs {
    #[arg(long)]
    query: PathBuf,
    /// Use the set-operation search instead of the window criterion.
    #[arg(long)]
    setops: bool,
}

#[derive(Args)]
struct FalsifyArgs {
    #[arg(long, conflicts_with = "query")]
    expr: Option<PathBuf>,
    #[arg(long)]
    query: Option<PathBuf>,
    /// Search the query's twelve-set principal encoding instead.
    #[arg(long, requires = "query")]
    principal: bool,
    #[arg(long, default_value_t = 6)]
    max_depth: usize,
}

#[derive(Args)]
struct ApplyArgs {
    #[arg(long)]
    expr: PathBuf,
    /// Ops such as "R1,2;C3,4".
    #[arg(long)]
    ops: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long)]
    name: String,
    #[command(flatten)]
    fam: FamilyFlags,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    weight_bound: u64,
}

enum Failure {
    BadInput(String),
    Inconclusive(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded(_) => Failure::Inconclusive(e.to_string()),
            other => Failure::BadInput(other.to_string()),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::BadInput(format!("{}: {e}", path.display())))
}

fn emit(v: &Value, out: Option<&PathBuf>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).expect("serializable");
    match out {
        Some(p) => fs::write(p, text + "\n").map_err(|e| Failure::BadInput(format!("{}: {e}", p.display()))),
        None => {
            // A closed pipe on stdout is not an input error.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}

fn expr_value(e: &DetExpr) -> Value {
    serde_json::from_str(&e.to_json()).expect("valid json")
}

fn family_from_flags(name: &str, f: &FamilyFlags) -> Result<Family, Failure> {
    let mut j = match &f.params {
        Some(p) => serde_json::from_str::<FamilyParamsJson>(&read(p)?)
            .map_err(|e| Failure::BadInput(format!("params: {e}")))?,
        None => FamilyParamsJson::default(),
    };
    macro_rules! take {
        ($($field:ident),*) => {
            $(if f.$field.is_some() { j.$field = f.$field.clone(); })*
        };
    }
    take!(n, i, j, l, p, u, v, t, s, p1, p2, q1, q2, lambda, mu);
    if !FAMILY_NAMES.contains(&name) {
        return Err(Failure::BadInput(format!("unknown family {name}; expected one of {}", FAMILY_NAMES.join(", "))));
    }
    Ok(Family::from_params(name, &j)?)
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let (label, e) = match (&a.expr, &a.fam.family) {
        (Some(p), None) => (json!({"expr": p.display().to_string()}), DetExpr::from_json(&read(p)?)?),
        (None, Some(name)) => {
            let fam = family_from_flags(name, &a.fam)?;
            (json!({"family": fam.name(), "params": fam.to_params()}), fam.expr()?)
        }
        _ => return Err(Failure::BadInput("give exactly one of --expr or --family".into())),
    };
    let cfg = VerifyConfig {
        nonsingular_only: a.nonsingular_only,
        ..VerifyConfig::new(e.n(), a.samples, a.weight_bound, a.seed)?
    };
    let report = verify(&e, &cfg)?;
    emit(&json!({"source": label, "holds": report.holds(), "report": report.to_json_value()}), None)?;
    Ok(if report.holds() { EXIT_HOLDS } else { EXIT_FALSIFIED })
}

fn cmd_decide(a: &DecideArgs) -> CmdResult {
    let q = SmallestMultQuery::from_json(&read(&a.query)?)?;
    let v = if a.setops { decide_via_setops(&q)? } else { decide(&q) };
    let pf = q.to_principal_form();
    emit(
        &json!({
            "verdict": v.to_json_value(),
            "principal_form": {"R1": pf.r1.elements(), "R2": pf.r2.elements(), "K1": pf.k1.elements(), "K2": pf.k2.elements(), "M": pf.m.elements()},
        }),
        None,
    )?;
    Ok(if v.holds() { EXIT_HOLDS } else { EXIT_FALSIFIED })
}

fn cmd_falsify(a: &FalsifyArgs) -> CmdResult {
    let e = match (&a.expr, &a.query) {
        (Some(p), None) => DetExpr::from_json(&read(p)?)?,
        (None, Some(p)) => {
            let q = SmallestMultQuery::from_json(&read(p)?)?;
            if a.principal {
                q.to_principal_form().to_expr()
            } else {
                q.canonical_expr()
            }
        }
        _ => return Err(Failure::BadInput("give exactly one of --expr or --query".into())),
    };
    let out = falsify_search_expr(&e, a.max_depth)?;
    let status = match out.status {
        SearchStatus::Found => "found",
        SearchStatus::Exhausted => "exhausted",
        SearchStatus::DepthLimit => "depth_limit",
    };
    let mut v = json!({"status": status, "depth": out.depth, "states_visited": out.states_visited});
    if let Some(w) = &out.witness {
        v["witness"] = json!(w.iter().map(|o| o.to_string()).collect::<Vec<_>>());
        v["result"] = expr_value(&apply_sequence(&e, w)?);
    }
    emit(&v, None)?;
    Ok(if out.status == SearchStatus::Found { EXIT_FALSIFIED } else { EXIT_INCONCLUSIVE })
}

fn cmd_apply(a: &ApplyArgs) -> CmdResult {
    let e = DetExpr::from_json(&read(&a.expr)?)?;
    let ops = OpSpec::parse_list(&a.ops)?;
    let out = apply_sequence(&e, &ops)?;
    emit(&expr_value(&out), a.out.as_ref())?;
    Ok(EXIT_HOLDS)
}

fn cmd_family(a: &FamilyArgs) -> CmdResult {
    let fam = family_from_flags(&a.name, &a.fam)?;
    emit(&expr_value(&fam.expr()?), a.out.as_ref())?;
    Ok(EXIT_HOLDS)
}

fn cmd_oracle(a: &OracleArgs) -> CmdResult {
    let mut mismatches = Vec::new();
    let mut pairs = 0;
    for idx in 0..a.trials {
        let f = sample_factorization_indexed(a.n, a.seed, idx, a.weight_bound, false)?;
        let r = oracle_compare_detailed(&f)?;
        pairs += r.pairs_checked;
        for (rows, cols) in r.mismatches {
            mismatches.push(json!({"trial": idx, "rows": rows.elements(), "cols": cols.elements()}));
        }
    }
    let ok = mismatches.is_empty();
    emit(&json!({"n": a.n, "trials": a.trials, "pairs_checked": pairs, "agree": ok, "mismatches": mismatches}), None)?;
    Ok(if ok { EXIT_HOLDS } else { EXIT_FALSIFIED })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_HOLDS });
        }
    };
    let result = match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Decide(a) => cmd_decide(a),
        Command::Falsify(a) => cmd_falsify(a),
        Command::Apply(a) => cmd_apply(a),
        Command::Family(a) => cmd_family(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::BadInput(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_BAD_INPUT)
        }
        Err(Failure::Inconclusive(msg)) => {
            eprintln!("inconclusive: {msg}");
            ExitCode::from(EXIT_INCONCLUSIVE)
        }
    }
}
