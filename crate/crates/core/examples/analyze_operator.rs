//! Spectral functionals, sup variants and pseudoinverse duality of a few
//! symmetric operators.
//!
//! cargo run --example analyze_operator

use lcp_bounds::gallery::{random_symmetric_operator, SignPolicy};
use lcp_bounds::operator::SymOperator;
use lcp_bounds::report::{Analysis, TextReport};

fn show(name: &str, op: &SymOperator) {
    let a = Analysis::of(op);
    println!("== {name}");
    print!("{}", a.to_text());
    println!();
}

fn main() {
    show("diag(3, 1, 0)", &SymOperator::from_diagonal(&[3.0, 1.0, 0.0]).unwrap());
    show(
        "rank-one [[1,1],[1,1]]",
        &SymOperator::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]], None).unwrap(),
    );
    show(
        "indefinite diag(-1, 2)",
        &SymOperator::from_diagonal(&[-1.0, 2.0]).unwrap(),
    );

    let (op, spectrum) = random_symmetric_operator(6, 4, 0.5, 5.0, SignPolicy::Positive, 11).unwrap();
    println!("generating spectrum: {spectrum:?}");
    show("random PSD, n=6, rank 4", &op);
}
