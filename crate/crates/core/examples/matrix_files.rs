//! Writing and reading operator and instance files, including
//! MatrixMarket input.
//!
//! cargo run --example matrix_files

use lcp_bounds::gallery::projection_example;
use lcp_bounds::io::{load_instance, load_operator, parse_operator, save_instance, write_operator};

const MM: &str = "%%MatrixMarket matrix coordinate real symmetric
% tridiagonal
3 3 5
1 1 2.0
2 1 -1.0
2 2 2.0
3 2 -1.0
3 3 2.0
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let op = parse_operator(MM)?;
    println!("MatrixMarket eigenvalues: {:?}", op.eigenvalues().as_slice());
    print!("native form:\n{}", write_operator(&op));

    let dir = std::env::temp_dir().join("lcp-bounds-matrix-files");
    std::fs::create_dir_all(&dir)?;
    let op_path = dir.join("tridiag.op");
    std::fs::write(&op_path, write_operator(&op))?;
    let back = load_operator(&op_path)?;
    println!("operator round trip exact: {}", back.matrix() == op.matrix());

    let ex = projection_example(2, 3)?;
    let inst_path = dir.join("projection.lcp");
    save_instance(&inst_path, &ex.instance)?;
    println!("\n{}:\n{}", inst_path.display(), std::fs::read_to_string(&inst_path)?);
    let inst = load_instance(&inst_path)?;
    println!("instance round trip exact: {}", inst.b() == ex.instance.b());
    Ok(())
}
