//! CSV rendering for trajectories, summaries, comparisons, and the census.
//!
//! All output is rendered to strings with fixed formatting so reruns are
//! byte-identical. Headers are part of the file contract:
//!
//! - trajectory: `seed,generation,best_fitness,best_states,population_size`
//! - summary: `generation,mean_best,min_best,max_best,stddev_best,n_runs`
//! - comparison (long form): `sampler,seed,generation,best_fitness`
//! - census: `max_len,total,members,percent`

use std::fmt::Write as _;

use crate::fsm::Fsm;
use crate::sampling::SampleMethod;
use crate::witness::census;

use super::{CampaignSummary, RunTrajectory};

pub fn trajectory_csv(traj: &RunTrajectory) -> String {
    let mut out = String::from("seed,generation,best_fitness,best_states,population_size\n");
    for p in &traj.points {
        writeln!(
            out,
            "{},{},{},{},{}",
            traj.seed, p.generation, p.best_fitness, p.best_states, p.population_size
        )
        .unwrap();
    }
    out
}

pub fn summary_csv(summary: &CampaignSummary) -> String {
    let mut out = String::from("generation,mean_best,min_best,max_best,stddev_best,n_runs\n");
    for row in &summary.rows {
        writeln!(
            out,
            "{},{:.2},{},{},{:.2},{}",
            row.generation, row.mean_best, row.min_best, row.max_best, row.stddev_best, row.n_runs
        )
        .unwrap();
    }
    out
}

/// Long-form merge of several campaigns, one row per (sampler, seed,
/// checkpoint), ready for plotting.
pub fn long_csv(campaigns: &[(SampleMethod, Vec<RunTrajectory>)]) -> String {
    let mut out = String::from("sampler,seed,generation,best_fitness\n");
    for (method, trajectories) in campaigns {
        for traj in trajectories {
            for p in &traj.points {
                writeln!(
                    out,
                    "{},{},{},{}",
                    method.label(),
                    traj.seed,
                    p.generation,
                    p.best_fitness
                )
                .unwrap();
            }
        }
    }
    out
}

/// Side-by-side per-checkpoint mean best fitness, one column per sampler.
pub fn mean_table_csv(results: &[(SampleMethod, CampaignSummary)]) -> String {
    let mut out = String::from("generation");
    for (method, _) in results {
        write!(out, ",{}", method.label()).unwrap();
    }
    out.push('\n');
    let generations: Vec<u64> = results
        .first()
        .map(|(_, s)| s.rows.iter().map(|r| r.generation).collect())
        .unwrap_or_default();
    for (i, generation) in generations.iter().enumerate() {
        write!(out, "{generation}").unwrap();
        for (_, summary) in results {
            write!(out, ",{:.2}", summary.rows[i].mean_best).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn census_csv(machine: &Fsm, max_len: usize) -> String {
    let mut out = String::from("max_len,total,members,percent\n");
    for row in census(machine, max_len) {
        writeln!(
            out,
            "{},{},{},{}",
            row.max_len,
            row.total_strings,
            row.members,
            row.percent()
        )
        .unwrap();
    }
    out
}
