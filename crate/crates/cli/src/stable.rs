use clap::Args;
use dpow_core::cartan::{stable_homology, stable_words};
use dpow_core::AbGroupType;
use serde_json::{json, Value};

use crate::render::{graded_json, group_string};
use crate::CliError;

#[derive(Args, Debug)]
pub struct StableArgs {
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    #[arg(long, default_value_t = 10)]
    pub i_max: i64,
}

pub fn run(args: &StableArgs) -> Result<Value, CliError> {
    if !(0..=40).contains(&args.i_max) {
        return Err(CliError::OutOfRange(format!("i_max must lie in 0..40, got {}", args.i_max)));
    }
    let h = stable_homology(args.rank, args.i_max)?;
    let words: Vec<Value> = stable_words(args.i_max)
        .into_iter()
        .map(|(w, st)| {
            json!({
                "word": w.to_string(),
                "p": w.p(),
                "degree": st.degree,
                "height": st.height,
                "weight": st.weight,
                "stable_degree": st.stable_degree(),
                "contributes": group_string(&AbGroupType::elementary(w.p(), args.rank)),
            })
        })
        .collect();
    Ok(json!({
        "rank": args.rank,
        "i_max": args.i_max,
        "groups": graded_json(&h, 0..=args.i_max),
        "words": words,
    }))
}
