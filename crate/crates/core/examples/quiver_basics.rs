//! Build a quiver, validate it, and derive its canonical stability parameter.

use quiverflow::quiver::{canonical_stability, validate_quiver};
use quiverflow::{fixtures, DimVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = fixtures::framed_a1_quiver(2);
    let spec = q.to_spec();
    let (_, summary) = validate_quiver(&spec).map_err(|e| format!("{e:?}"))?;
    println!("validation: {}", serde_json::to_string(&summary)?);

    let dims = DimVector(vec![1, 2]);
    let alpha = canonical_stability(&q, &dims)?;
    println!("canonical weights for {:?}: {:?}", dims.0, alpha.to_map(&q));
    Ok(())
}
