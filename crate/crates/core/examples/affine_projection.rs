//! Projection to the affine quotient: flow with the zero parameter.

use quiverflow::correspondence::affine_project;
use quiverflow::fixtures;
use quiverflow::linalg::c;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = fixtures::jordan_extension(c(1.0, 0.5), c(0.3, 0.0));
    let p = affine_project(&x)?;
    println!("input norm {:.4}, limit norm {:.4}", x.norm(), p.limit.norm());
    println!("status {:?}, residual energy {:.2e}", p.flow.status, p.flow.final_energy);
    Ok(())
}
