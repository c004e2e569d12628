//! Unbounded solution sets: nonnegative null directions orthogonal to b
//! extend any solution to a ray z + t d.
//!
//! cargo run --example null_ray

use lcp_bounds::gallery::random_ray_instance;
use lcp_bounds::lcp::{detect_null_ray, solve_lemke, LcpInstance, DEFAULT_TOL};
use lcp_bounds::operator::SymOperator;
use nalgebra::DVector;

fn report(name: &str, inst: &LcpInstance) {
    let sol = solve_lemke(inst, DEFAULT_TOL, 50 * inst.dim()).unwrap();
    println!("== {name}");
    println!("  z = {:?}", sol.z.as_slice());
    match detect_null_ray(inst, &sol, DEFAULT_TOL) {
        Some(ray) => {
            println!("  d = {:?}", ray.direction.as_slice());
            println!("  |Td| = {:.2e}  <d,b> = {:.2e}", ray.null_residual, ray.b_inner);
            for (t, rep) in &ray.checks {
                println!("  t = {t:>5}: pass = {}  comp = {:.2e}", rep.pass, rep.complementarity);
            }
        }
        None => println!("  no ray"),
    }
}

fn main() {
    let diag = LcpInstance::new(
        SymOperator::from_diagonal(&[1.0, 0.0]).unwrap(),
        DVector::from_vec(vec![-1.0, 0.0]),
    )
    .unwrap();
    report("diag(1, 0), b = (-1, 0)", &diag);

    let full = LcpInstance::new(SymOperator::identity(2).unwrap(), DVector::from_vec(vec![-1.0, 0.5])).unwrap();
    report("identity (bounded)", &full);

    let ri = random_ray_instance(9, 2, 5).unwrap();
    report("random, n=9, two null directions", &ri.instance);
}
