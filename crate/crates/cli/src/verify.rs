use clap::{Args, ValueEnum};
use dpow_core::cartan::{stable_homology_st, stable_homology_words};
use dpow_core::closedform::{
    char2_recursion_check, integral_gamma2, integral_gamma3, integral_gamma4_direct, integral_gamma4_recursive,
    integral_n1, uct_check,
};
use dpow_core::conjecture::{conjecture_check, n1_orders};
use dpow_core::doldkan::{derived_functor_graded, EngineConfig};
use dpow_core::koszul::{cycles, koszul_weight_complex, skew_koszul_weight_complex, WeightComplex};
use dpow_core::polyfunc::FunctorExpr;
use serde_json::{json, Value};

use crate::config::EngineFlags;
use crate::{CliError, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Koszul,
    Closedform,
    Stable,
    Conjecture,
    BruteCross,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// largest rank r of A = Z^r to check
    #[arg(long)]
    pub max_rank: Option<usize>,
    /// weight, for the conjecture suite (default: every d ≤ 4)
    #[arg(long)]
    pub d: Option<u32>,
    #[command(flatten)]
    pub flags: EngineFlags,
}

#[derive(Default)]
struct Report {
    checks: Vec<Value>,
}

impl Report {
    fn record(&mut self, check: &str, params: Value, outcome: Result<bool, String>) {
        let (pass, detail) = match outcome {
            Ok(p) => (p, None),
            Err(e) => (false, Some(e)),
        };
        let mut v = json!({ "check": check, "params": params, "pass": pass });
        if let Some(d) = detail {
            v["detail"] = json!(d);
        }
        self.checks.push(v);
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c["pass"] == json!(true))
    }
}

fn lambda_homology(w: Result<WeightComplex, impl ToString>) -> Result<bool, String> {
    let w = w.map_err(|e| e.to_string())?;
    let top = dpow_core::polyfunc::eval_dim(&FunctorExpr::Lambda(w.weight), w.r).map_err(|e| e.to_string())?;
    let dims = w.homology_dims().map_err(|e| e.to_string())?;
    Ok(dims.iter().all(|&(i, h)| h == if i == w.weight as i64 { top } else { 0 }))
}

fn koszul(max_rank: usize, rep: &mut Report) {
    for d in 1..=8u32 {
        for r in 1..=max_rank {
            for p in [2u64, 3, 5] {
                rep.record("koszul homology is Λ^d at the top", json!({"p": p, "d": d, "r": r}), lambda_homology(koszul_weight_complex(p, d, r)));
            }
            rep.record("skew-Koszul homology is Λ^d at the top", json!({"d": d, "r": r}), lambda_homology(skew_koszul_weight_complex(d, r)));
        }
    }
    for d in 1..=6u32 {
        for r in 1..=max_rank.min(3) {
            let out = (|| {
                let sk = skew_koszul_weight_complex(d, r).map_err(|e| e.to_string())?;
                let k = koszul_weight_complex(2, d, r).map_err(|e| e.to_string())?;
                for i in 0..=d as i64 {
                    if cycles(&sk, i).map_err(|e| e.to_string())?.dim != cycles(&k, i).map_err(|e| e.to_string())?.dim {
                        return Ok(false);
                    }
                }
                Ok(true)
            })();
            rep.record("skew-Koszul and Koszul cycles agree", json!({"d": d, "r": r}), out);
        }
    }
}

fn brute(f: FunctorExpr, r: usize, n: usize, cfg: &EngineConfig) -> Result<dpow_core::GradedGroup, String> {
    derived_functor_graded(&f, r, n, cfg).map_err(|e| e.to_string())
}

fn closedform(max_rank: usize, cfg: &EngineConfig, rep: &mut Report) {
    for r in 1..=max_rank.min(2) {
        for n in 1..=3 {
            let out = brute(FunctorExpr::Gamma(2), r, n, cfg).map(|b| b == integral_gamma2(n, r));
            rep.record("Γ² closed form = brute force", json!({"n": n, "r": r}), out);
        }
        for n in 1..=2 {
            let out = brute(FunctorExpr::Gamma(3), r, n, cfg).map(|b| b == integral_gamma3(n, r));
            rep.record("Γ³ closed form = brute force", json!({"n": n, "r": r}), out);
        }
    }
    for n in 1..=8 {
        for r in 1..=max_rank {
            let out = match (integral_gamma4_direct(n, r), integral_gamma4_recursive(n, r)) {
                (Ok(a), Ok(b)) => Ok(a == b),
                (Err(e), _) | (_, Err(e)) => Err(e.to_string()),
            };
            rep.record("Γ⁴ displays = recursion", json!({"n": n, "r": r}), out);
        }
    }
    for n in 1..=4 {
        for r in 1..=max_rank.min(3) {
            rep.record("universal coefficients for Γ⁴", json!({"n": n, "r": r}), uct_check(n, r).map_err(|e| e.to_string()));
        }
    }
    rep.record("mod 2 recursion for Γ⁴", json!({"n_max": 6}), char2_recursion_check(6).map_err(|e| e.to_string()));
}

fn stable(max_rank: usize, rep: &mut Report) {
    for r in 1..=max_rank {
        let out = Ok(stable_homology_words(r, 30) == stable_homology_st(r, 30));
        rep.record("admissible words = St(A)", json!({"r": r, "i_max": 30}), out);
    }
}

fn conjecture(d: Option<u32>, max_rank: usize, rep: &mut Report) {
    let weights: Vec<u32> = d.map_or_else(|| (1..=4).collect(), |d| vec![d]);
    for d in weights {
        for r in 1..=max_rank {
            let out = conjecture_check(d, 5, r).map(|c| c.passed()).map_err(|e| e.to_string());
            rep.record("conjecture = closed forms", json!({"d": d, "r": r, "n_max": 5}), out);
            let out = n1_orders(d, r)
                .map(|m| m.values().all(|[a, b, c]| a == b && b == c))
                .map_err(|e| e.to_string());
            rep.record("conjecture = n=1 complex", json!({"d": d, "r": r}), out);
        }
    }
}

fn brute_cross(max_rank: usize, cfg: &EngineConfig, rep: &mut Report) {
    for d in 1..=4u32 {
        for r in 1..=max_rank {
            let out = match (integral_n1(d, r), brute(FunctorExpr::Gamma(d), r, 1, cfg)) {
                (Ok(c), Ok(b)) => Ok(c == b),
                (Err(e), _) => Err(e.to_string()),
                (_, Err(e)) => Err(e),
            };
            rep.record("integral_n1 = brute force", json!({"d": d, "r": r}), out);
        }
    }
}

pub fn run(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let (cfg, _) = args.flags.resolve()?;
    let mut rep = Report::default();
    let default_rank = match args.suite {
        Suite::Koszul => 4,
        Suite::Closedform | Suite::Stable => 3,
        Suite::Conjecture | Suite::BruteCross => 2,
    };
    let max_rank = args.max_rank.unwrap_or(default_rank);
    if max_rank == 0 {
        return Err(CliError::Usage("--max-rank must be positive".into()));
    }
    match args.suite {
        Suite::Koszul => koszul(max_rank, &mut rep),
        Suite::Closedform => closedform(max_rank, &cfg, &mut rep),
        Suite::Stable => stable(max_rank, &mut rep),
        Suite::Conjecture => conjecture(args.d, max_rank, &mut rep),
        Suite::BruteCross => brute_cross(max_rank, &cfg, &mut rep),
    }
    let passed = rep.passed();
    let suite = args.suite.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let out = json!({ "suite": suite, "passed": passed, "checks": rep.checks });
    Ok(if passed { Outcome::Pass(out) } else { Outcome::Fail(out) })
}
