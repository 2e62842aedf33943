//! Handsaw quiver, its adjoint transform and the relation residuals.

use std::sync::Arc;

use quiverflow::quiver::handsaw_to_quiver;
use quiverflow::handsaw::{handsaw_adjoint, handsaw_constraint};
use quiverflow::Representation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (q, d) = handsaw_to_quiver(3, &[1, 2], &[1, 1, 1])?;
    let q = Arc::new(q);
    for e in q.edges() {
        println!("{:>6}: {} -> {}", e.label, q.vertices()[e.tail], q.vertices()[e.head]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = Representation::random(q, d, &mut rng);
    let y = handsaw_adjoint(&x)?;
    let back = handsaw_adjoint(&y)?;
    println!("constraint norm {:.3e}", handsaw_constraint(&x)?.norm());
    println!("adjoint applied twice moves the point by {:.2e}", back.distance(&x));
    Ok(())
}
