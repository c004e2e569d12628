//! Orthogonal projection T = diag(1 (k times), 0 (n - k times)) with
//! b = (-1/3, 2, 0, ...): the certified distance and identity against the
//! closed forms, confirmed by enumerating every complementary basis.
//!
//! cargo run --example projection_example -- [k] [n]

use lcp_bounds::bounds::{certify, Bound, Theorem};
use lcp_bounds::gallery::projection_example;
use lcp_bounds::lcp::{enumerate_solutions, solve_lemke, DEFAULT_TOL};

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let k = args.first().copied().unwrap_or(4);
    let n = args.get(1).copied().unwrap_or(6);
    let ex = projection_example(k, n).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(3);
    });
    let inst = &ex.instance;

    let sol = solve_lemke(inst, DEFAULT_TOL, 50 * n).unwrap();
    println!("lemke z          = {:?}", sol.z.as_slice());
    println!("known z          = {:?}", ex.known_solution.as_slice());

    let en = enumerate_solutions(inst, 12, DEFAULT_TOL).unwrap();
    println!("basic solutions  = {}", en.solutions.len());
    println!("known z in oracle list: {}", en.contains(&ex.known_solution, 1e-9));

    let cert = certify(inst, &sol, DEFAULT_TOL).unwrap();
    let annulus = cert.check(Theorem::Annulus);
    let id = cert.check(Theorem::Identity);
    println!(
        "||z - x_b||      = {:.16e} (expected {:.16e})",
        annulus.lhs, ex.expected_distance
    );
    if let Bound::Value(rhs) = id.rhs {
        println!(
            "identity lhs/rhs = {:.16e} / {:.16e} (expected {:.16e})",
            id.lhs, rhs, ex.expected_identity
        );
    }
    println!("certificate      = {}", if cert.passes() { "pass" } else { "fail" });
}
