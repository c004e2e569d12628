//! The three solvers on the same instances, side by side.
//!
//! cargo run --example solve_lcp

use lcp_bounds::lcp::{solve, LcpInstance, SolverChoice, DEFAULT_DIM_LIMIT, DEFAULT_TOL};
use lcp_bounds::operator::SymOperator;
use nalgebra::DVector;

fn main() {
    let cases = [
        (
            "coupled 2x2",
            SymOperator::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]], None).unwrap(),
            vec![-5.0, -6.0],
        ),
        ("identity", SymOperator::identity(3).unwrap(), vec![-1.0, 0.0, 2.0]),
        (
            "singular diag(1, 0)",
            SymOperator::from_diagonal(&[1.0, 0.0]).unwrap(),
            vec![-1.0, 1.0],
        ),
        ("zero operator", SymOperator::zeros(2).unwrap(), vec![-1.0, 1.0]),
    ];
    let solvers = [
        SolverChoice::Lemke { max_pivots: None },
        SolverChoice::Pgs { max_iters: 10_000 },
        SolverChoice::Enumeration {
            dim_limit: DEFAULT_DIM_LIMIT,
        },
    ];
    for (name, op, b) in cases {
        let inst = LcpInstance::new(op, DVector::from_vec(b)).unwrap();
        println!("== {name}");
        for choice in solvers {
            match solve(&inst, choice, DEFAULT_TOL) {
                Ok(sol) => println!(
                    "  {:<12} z = {:?}  comp = {:.2e}  iters = {}",
                    sol.solver.to_string(),
                    sol.z.as_slice(),
                    sol.comp_residual,
                    sol.iterations
                ),
                Err(e) => println!("  {choice:?}: {e}"),
            }
        }
    }
}
