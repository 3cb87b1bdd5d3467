//! Command line, JSON formats and parallel drivers over `lie3-core`.

pub mod cli;
pub mod json;

pub use lie3_core as core;

use lie3_core::classify::{summarize, theorem_draw, ClassifyError, TheoremReport};
use rayon::prelude::*;

/// Same report as the sequential suite; draws run on the rayon pool.
pub fn theorem_suite_parallel(seed: u64, draws: u64) -> Result<TheoremReport, ClassifyError> {
    let jobs: Vec<(u8, u64)> = (1..=4u8).flat_map(|c| (0..draws).map(move |i| (c, i))).collect();
    let outcomes = jobs
        .into_par_iter()
        .map(|(case, index)| theorem_draw(seed, case, index))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(summarize(seed, draws, outcomes))
}
