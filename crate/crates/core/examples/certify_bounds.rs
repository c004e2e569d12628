//! Solve a random PSD instance and print the full bound certificate.
//!
//! cargo run --example certify_bounds -- [n] [rank] [seed]

use lcp_bounds::bounds::certify;
use lcp_bounds::gallery::{random_psd_instance, BPolicy};
use lcp_bounds::lcp::{default_max_pivots, solve_lemke, DEFAULT_TOL};
use lcp_bounds::report::TextReport;
use lcp_bounds::sweep::range_representative;

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let n = args.first().copied().unwrap_or(8) as usize;
    let r = args.get(1).copied().unwrap_or(5) as usize;
    let seed = args.get(2).copied().unwrap_or(3);

    let ri = random_psd_instance(n, r, 0.1, 10.0, seed, BPolicy::Planted).expect("valid parameters");
    let inst = ri.instance;
    let sol = solve_lemke(&inst, DEFAULT_TOL, default_max_pivots(n)).expect("planted instances are solvable");
    // take the R(T) representative so the range-restricted bounds apply
    let sol = range_representative(&inst, &sol, DEFAULT_TOL);
    let cert = certify(&inst, &sol, DEFAULT_TOL).expect("verified solution");
    print!("{}", cert.to_text());
}
