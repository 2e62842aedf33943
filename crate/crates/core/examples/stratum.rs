//! Codimension of the incoming image at a vertex, and the restriction to it.

use quiverflow::critical::{grassmann_project, stratum_codim};
use quiverflow::fixtures;
use quiverflow::linalg::{c, CMat};
use quiverflow::{DimVector, Representation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = fixtures::framed_a1_quiver(2);
    let col = |a: f64, b: f64| CMat::from_column_slice(2, 1, &[c(a, 0.0), c(b, 0.0)]);
    let zero_row = CMat::zeros(1, 2);
    // Both framing maps land on the same line, so the image has codimension one.
    let x = Representation::new(q, DimVector(vec![1, 2]), vec![col(1.0, 2.0), col(-0.5, -1.0), zero_row.clone(), zero_row])?;
    let k = 1;
    let codim = stratum_codim(&x, k, 1e-9)?;
    let y = grassmann_project(&x, k, codim, 1e-9)?;
    println!("codimension {codim}, restricted dims {:?}", y.dims.0);
    Ok(())
}
