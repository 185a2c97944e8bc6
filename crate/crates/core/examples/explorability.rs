//! Reachability between every ordered pair of feasible schedules of the
//! two-job instance stretched to four time slots.

use std::time::Instant;

use fjsp_mixer::circuit::MixerMode;
use fjsp_mixer::fixtures;
use fjsp_mixer::qaoa::{verification_betas, verify_all_pairs, LayerChain, PathSource, Problem};

fn main() -> fjsp_mixer::Result<()> {
    let problem = Problem::new(fixtures::two_jobs().with_horizon(4)?);
    let chain = LayerChain::new(&problem, MixerMode::Corrected);
    let start = Instant::now();
    let results = verify_all_pairs(&chain, &verification_betas(), 2 * problem.graph.mark_count())?;
    let hits = results.iter().filter(|r| r.hit).count();
    let two_phase = results.iter().filter(|r| r.path == PathSource::TwoPhase).count();
    let max_k = results.iter().map(|r| r.k).max().unwrap_or(0);
    let min_overlap = results
        .iter()
        .map(|r| r.overlap)
        .fold(f64::INFINITY, f64::min);
    println!(
        "pairs={} hits={} two_phase_plans={} max_k={} min_overlap={:.3e} elapsed={:.2?}",
        results.len(),
        hits,
        two_phase,
        max_k,
        min_overlap,
        start.elapsed()
    );
    let worst = results
        .iter()
        .min_by(|a, b| a.overlap.total_cmp(&b.overlap))
        .expect("nonempty");
    println!(
        "weakest pair {} -> {}: k={} beta={:?} overlap={:.3e} path_probability={:.3e}",
        worst.source, worst.target, worst.k, worst.beta, worst.overlap, worst.path_probability
    );
    Ok(())
}
