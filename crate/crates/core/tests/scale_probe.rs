//! Manual probes for the heavy acceptance paths (run with --ignored).

use std::time::Instant;

use ihc_core::clock::NullClock;
use ihc_core::forest::{build_forest, ForestParams};
use ihc_core::generators::{gen_random_circulant, gen_random_system, SyntheticRegularSystem};
use ihc_core::pipeline::{solve, Outcome, PipelineParams};

#[test]
#[ignore]
fn probe_forest_4096() {
    for seed in 0..2u64 {
        let t0 = Instant::now();
        let g = gen_random_circulant(4096, 3072, seed).unwrap();
        let f = SyntheticRegularSystem::new(&g, 1024, seed).unwrap();
        let build = Instant::now();
        let p = ForestParams::new(8, seed).with_slack(3.0);
        let run = build_forest(&g, &f, &p).unwrap();
        println!(
            "seed {seed}: gen {:?}, forest {:?}; edges {} ({:.3} n), components {} ({:.3} n), covered {}, odd {}, even {}, width {}, min class {}",
            build - t0,
            build.elapsed(),
            run.stats.edges,
            run.stats.edges as f64 / 4096.0,
            run.stats.components,
            run.stats.components as f64 / 4096.0,
            run.stats.covered_vertices,
            run.stats.odd_edges,
            run.stats.even_edges,
            run.stats.width_used,
            run.stats.min_class_size,
        );
    }
}

#[test]
#[ignore]
fn probe_pipeline_300() {
    let mut wins = 0;
    for seed in 0..5u64 {
        let t0 = Instant::now();
        let g = gen_random_circulant(300, 210, seed).unwrap();
        let f = gen_random_system(&g, 45, seed);
        let params = PipelineParams {
            seed,
            ..PipelineParams::default()
        };
        let report = solve(&g, &f, &params, &NullClock);
        println!(
            "seed {seed}: {:?} in {:?} (failure: {:?})",
            report.outcome,
            t0.elapsed(),
            report.failure
        );
        for s in &report.stages {
            println!("    {}: {}", s.name, s.detail);
        }
        if report.outcome == Outcome::Cycle {
            wins += 1;
        }
    }
    println!("wins: {wins}/5");
}
