//! Seeded sweep over planted PSD instances, run with one and with four
//! worker threads to show the summary does not change.
//!
//! cargo run --release --example random_sweep -- [count] [seed]

use lcp_bounds::report::TextReport;
use lcp_bounds::sweep::{run_sweep, RankPolicy, SweepConfig};

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let cfg = SweepConfig {
        count: args.first().copied().unwrap_or(200) as usize,
        seed: args.get(1).copied().unwrap_or(7),
        dim_min: 1,
        dim_max: 12,
        rank_policy: RankPolicy::Mixed,
        threads: 1,
        ..SweepConfig::default()
    };
    let single = run_sweep(&cfg);
    let multi = run_sweep(&SweepConfig {
        threads: 4,
        ..cfg.clone()
    });
    print!("{}", single.to_text());
    println!("\nidentical across thread counts: {}", single == multi);
}
