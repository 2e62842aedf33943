//! Compare the critical type reached by the flow with the exact
//! Harder-Narasimhan type of a thin representation.

use quiverflow::critical::{classify_critical, CriticalTols};
use quiverflow::fixtures;
use quiverflow::flow::flow_f64;
use quiverflow::oracles::{group_by_slope, thin_hn_type, thin_jh};
use quiverflow::selfcheck::classification_flow_options;
use quiverflow::StabilityParameter;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = quiverflow::Representation::random(fixtures::a3_quiver(), quiverflow::DimVector(vec![1, 1, 1]), &mut rng);
    let alpha = StabilityParameter::from_ints(&[2, -3, 1]);
    let hn = thin_hn_type(&x, &alpha)?;
    println!("HN factors {:?}", hn.factors.iter().map(|d| &d.0).collect::<Vec<_>>());
    println!("grouped JH {:?}", group_by_slope(&thin_jh(&x, &alpha)?).iter().map(|d| &d.0).collect::<Vec<_>>());

    let r = flow_f64(&x, &alpha.to_f64(), &classification_flow_options())?;
    let p = classify_critical(&r.limit, &alpha.to_f64(), &CriticalTols::default())?;
    println!("flow type {:?}", p.critical_type.iter().map(|d| &d.0).collect::<Vec<_>>());
    Ok(())
}
