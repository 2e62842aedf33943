//! Run the gradient flow of the moment-map energy from a random point and
//! print the energy along the way.

use quiverflow::flow::{flow_f64, FlowOptions};
use quiverflow::rep::{energy, grad_energy};
use quiverflow::{fixtures, DimVector, Representation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let q = fixtures::framed_a1_quiver(2);
    let x = Representation::random(q, DimVector(vec![1, 2]), &mut rng);
    let alpha = [-2.0, 1.0];
    let g = grad_energy(&x, &alpha);
    println!("start: energy {:.6}, |grad| {:.3e}", energy(&x, &alpha), quiverflow::linalg::frob_all(&g));

    // A random start is off the complex level set, so no constraint is monitored.
    let opts = FlowOptions { sample_stride: 200, ..FlowOptions::default() };
    let r = flow_f64(&x, &alpha, &opts)?;
    print!("{}", r.trajectory_csv());
    println!("status {:?} after t = {:.2}, final energy {:.6}", r.status, r.final_time, r.final_energy);
    Ok(())
}
