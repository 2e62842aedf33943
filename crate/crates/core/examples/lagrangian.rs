//! Lagrangian membership of a Hecke pair and of a generic pair.

use quiverflow::correspondence::lagrangian_check;
use quiverflow::selfcheck::{flow_from_slice, hecke_setups};
use quiverflow::Representation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let s = hecke_setups()?.remove(1);
    let x2 = flow_from_slice(&s, &vec![0.9; s.basis.len()])?;
    let r = lagrangian_check(&s.x1, &x2, 3)?;
    println!("{} pair: member {}", s.name, r.member);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let other = Representation::random(x2.quiver.clone(), x2.dims.clone(), &mut rng);
    let r = lagrangian_check(&s.x1, &other, 3)?;
    println!("random partner: member {}", r.member);
    Ok(())
}
