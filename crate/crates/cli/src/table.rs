use std::ops::RangeInclusive;

use clap::{Args, ValueEnum};
use dpow_core::closedform::{integral_gamma4, integral_n1, kan_homology, ENGINE_DK, ENGINE_GAMMA_N, ENGINE_N1};
use dpow_core::doldkan::derived_functor_graded;
use dpow_core::polyfunc::FunctorExpr;
use dpow_core::AbGroupType;

use crate::config::EngineFlags;
use crate::render::group_string;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    /// H_{n+i}(K(A,n)) for 1 ≤ n ≤ 11, 0 ≤ i ≤ 10
    AppendixB,
    /// L_{n+i}Γ^4(A,n) for 1 ≤ n ≤ 4, 0 ≤ i ≤ 12
    AppendixC,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableEngine {
    ClosedForm,
    Integer,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(value_enum)]
    pub which: Which,
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    /// a value such as 3 or a range such as 1..11
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub i: Option<String>,
    /// appendix-c only: integer brute force instead of the closed forms
    #[arg(long, value_enum, default_value_t = TableEngine::ClosedForm)]
    pub engine: TableEngine,
    #[command(flatten)]
    pub flags: EngineFlags,
}

pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>, CliError> {
    let bad = || CliError::Usage(format!("not a value or range: {s}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let (lo, hi) = match s.split_once("..").or_else(|| s.split_once('-')) {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => (num(s)?, num(s)?),
    };
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

fn within(what: &str, got: &RangeInclusive<usize>, allowed: RangeInclusive<usize>) -> Result<(), CliError> {
    if allowed.contains(got.start()) && allowed.contains(got.end()) {
        Ok(())
    } else {
        Err(CliError::OutOfRange(format!(
            "{what} must lie in {}..{}, got {}..{}",
            allowed.start(),
            allowed.end(),
            got.start(),
            got.end()
        )))
    }
}

type Row = (usize, usize, AbGroupType, String);

fn kan_grid(ns: &RangeInclusive<usize>, is: &RangeInclusive<usize>, r: usize, exec: dpow_core::Exec) -> Result<Vec<Row>, CliError> {
    let cells: Vec<(usize, usize)> = ns.clone().flat_map(|n| is.clone().map(move |i| (n, i))).collect();
    exec.map(cells, |(n, i)| kan_homology(n, i, r).map(|(g, e)| (n, i, g, e.join("+"))))
        .into_iter()
        .map(|x| x.map_err(CliError::from))
        .collect()
}

fn gamma_grid(args: &TableArgs, ns: &RangeInclusive<usize>, is: &RangeInclusive<usize>) -> Result<Vec<Row>, CliError> {
    let (cfg, _) = args.flags.resolve()?;
    let mut rows = Vec::new();
    for n in ns.clone() {
        let (h, engine) = match args.engine {
            TableEngine::Integer => (derived_functor_graded(&FunctorExpr::Gamma(4), args.rank, n, &cfg)?, ENGINE_DK),
            TableEngine::ClosedForm if n == 1 => (integral_n1(4, args.rank)?, ENGINE_N1),
            TableEngine::ClosedForm => (integral_gamma4(n, args.rank)?, ENGINE_GAMMA_N),
        };
        for i in is.clone() {
            rows.push((n, i, h.get((n + i) as i64), engine.to_string()));
        }
    }
    Ok(rows)
}

pub fn run(args: &TableArgs) -> Result<String, CliError> {
    let (n_max, i_max) = match args.which {
        Which::AppendixB => (11, 10),
        Which::AppendixC => (4, 12),
    };
    let ns = args.n.as_deref().map(parse_range).transpose()?.unwrap_or(1..=n_max);
    let is = args.i.as_deref().map(parse_range).transpose()?.unwrap_or(0..=i_max);
    within("n", &ns, 1..=n_max)?;
    within("i", &is, 0..=i_max)?;
    let rows = match args.which {
        Which::AppendixB => {
            if args.engine == TableEngine::Integer {
                return Err(CliError::Usage("appendix-b is assembled from closed forms only".into()));
            }
            let (cfg, _) = args.flags.resolve()?;
            kan_grid(&ns, &is, args.rank, cfg.exec)?
        }
        Which::AppendixC => gamma_grid(args, &ns, &is)?,
    };
    let mut out = String::from("n,i,group,engine\n");
    for (n, i, g, engine) in rows {
        out.push_str(&format!("{n},{i},{},{engine}\n", group_string(&g)));
    }
    Ok(out)
}
