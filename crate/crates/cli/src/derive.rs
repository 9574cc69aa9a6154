use clap::{Args, ValueEnum};
use dpow_core::closedform::{integral_gamma, integral_n1, ENGINE_DK, ENGINE_GAMMA_N, ENGINE_N1};
use dpow_core::doldkan::{derived_dims_mod_p, derived_functor_graded, derived_functor_with, DkError, EngineConfig};
use dpow_core::polyfunc::FunctorExpr;
use dpow_core::{AbGroupType, GradedGroup};
use serde_json::{json, Value};

use crate::config::{parse_primes, EngineFlags};
use crate::render::{graded_json, predicted_json};
use crate::{CliError, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Integer,
    ModP,
    ClosedForm,
    Both,
}

#[derive(Args, Debug)]
pub struct DeriveArgs {
    /// gamma, lambda, sym, or a functor expression such as "G2*L1+S2"
    #[arg(long)]
    pub functor: String,
    /// weight, for gamma, lambda and sym
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    /// a single degree instead of the whole range
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long, value_enum, default_value_t = Engine::Integer)]
    pub engine: Engine,
    /// primes for the mod-p engine (comma separated)
    #[arg(long)]
    pub primes: Option<String>,
    #[command(flatten)]
    pub flags: EngineFlags,
}

struct Job {
    expr: FunctorExpr,
    name: String,
    gamma_weight: Option<u32>,
}

fn job(args: &DeriveArgs) -> Result<Job, CliError> {
    let named = |name: &str, make: fn(u32) -> FunctorExpr| -> Result<Job, CliError> {
        let d = args.d.ok_or_else(|| CliError::Usage(format!("--d is required for --functor {name}")))?;
        Ok(Job { expr: make(d), name: format!("{name}^{d}"), gamma_weight: (name == "Gamma").then_some(d) })
    };
    match args.functor.to_ascii_lowercase().as_str() {
        "gamma" => named("Gamma", FunctorExpr::Gamma),
        "lambda" => named("Lambda", FunctorExpr::Lambda),
        "sym" => named("Sym", FunctorExpr::Sym),
        _ => {
            let expr: FunctorExpr = args.functor.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
            let gamma_weight = match expr {
                FunctorExpr::Gamma(d) => Some(d),
                _ => None,
            };
            Ok(Job { name: expr.to_string(), expr, gamma_weight })
        }
    }
}

fn degrees(h: &GradedGroup, n: usize, job: &Job, single: Option<usize>) -> Vec<i64> {
    if let Some(i) = single {
        return vec![i as i64];
    }
    match job.expr.max_weight() {
        Ok(w) if job.expr.is_integral() => (n as i64..=(n as u64 * w) as i64).collect(),
        _ => h.degrees(),
    }
}

fn integer(job: &Job, args: &DeriveArgs, cfg: &EngineConfig) -> Result<GradedGroup, DkError> {
    match args.degree {
        Some(i) => {
            let a = derived_functor_with(&job.expr, args.rank, args.n, i, cfg)?;
            Ok([(i as i64, a)].into_iter().collect())
        }
        None => derived_functor_graded(&job.expr, args.rank, args.n, cfg),
    }
}

fn closed(job: &Job, args: &DeriveArgs) -> Result<(GradedGroup, &'static str), CliError> {
    let d = job.gamma_weight.ok_or_else(|| CliError::Usage("closed forms exist for gamma only".into()))?;
    if args.n == 1 {
        return Ok((integral_n1(d, args.rank)?, ENGINE_N1));
    }
    Ok((integral_gamma(d, args.n, args.rank)?, ENGINE_GAMMA_N))
}

fn refusal(job: &Job, args: &DeriveArgs, e: DkError) -> Result<Outcome, CliError> {
    match e {
        DkError::Budget { predicted, rank_cap, nnz, nnz_cap } => Ok(Outcome::Refused(json!({
            "error": "budget",
            "functor": job.name,
            "n": args.n,
            "rank": args.rank,
            "predicted_ranks": predicted_json(&predicted),
            "rank_cap": rank_cap,
            "predicted_nonzeros": nnz.to_string(),
            "nnz_cap": nnz_cap.to_string(),
        }))),
        other => Err(other.into()),
    }
}

pub fn run(args: &DeriveArgs) -> Result<Outcome, CliError> {
    let (cfg, file) = args.flags.resolve()?;
    let job = job(args)?;
    let header = |engine: &str, h: &GradedGroup| -> Value {
        json!({
            "functor": job.name,
            "n": args.n,
            "rank": args.rank,
            "groups": graded_json(h, degrees(h, args.n, &job, args.degree)),
            "engine": engine,
        })
    };
    match args.engine {
        Engine::Integer => match integer(&job, args, &cfg) {
            Ok(h) => Ok(Outcome::Pass(header(ENGINE_DK, &h))),
            Err(e) => refusal(&job, args, e),
        },
        Engine::ClosedForm => {
            let (h, engine) = closed(&job, args)?;
            let h = match args.degree {
                Some(i) => [(i as i64, h.get(i as i64))].into_iter().collect(),
                None => h,
            };
            Ok(Outcome::Pass(header(engine, &h)))
        }
        Engine::Both => {
            let (c, engine) = closed(&job, args)?;
            let b = match integer(&job, args, &cfg) {
                Ok(h) => h,
                Err(e) => return refusal(&job, args, e),
            };
            let mut out = header(&format!("{ENGINE_DK}+{engine}"), &b);
            let window = degrees(&b, args.n, &job, args.degree);
            let agree = window.iter().all(|&i| b.get(i) == c.get(i));
            out["closed_form"] = graded_json(&c, window);
            out["agree"] = json!(agree);
            Ok(if agree { Outcome::Pass(out) } else { Outcome::Fail(out) })
        }
        Engine::ModP => {
            let primes = match &args.primes {
                Some(s) => parse_primes(s).map_err(CliError::Usage)?,
                None => file.primes.clone().unwrap_or_else(|| vec![2]),
            };
            let mut per_prime = Vec::new();
            for p in primes {
                let dims = match derived_dims_mod_p(&job.expr, args.rank, args.n, p, &cfg) {
                    Ok(d) => d,
                    Err(e) => return refusal(&job, args, e),
                };
                let h: GradedGroup = dims
                    .dims
                    .into_iter()
                    .filter(|&(i, _)| args.degree.map_or(true, |d| d as i64 == i))
                    .map(|(i, k)| (i, AbGroupType::elementary(p, k)))
                    .collect();
                let mut out = header(&format!("dold-kan-mod-{p}"), &h);
                out["prime"] = json!(p);
                per_prime.push(out);
            }
            Ok(Outcome::Pass(if per_prime.len() == 1 { per_prime.remove(0) } else { Value::Array(per_prime) }))
        }
    }
}
