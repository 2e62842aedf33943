//! Negative slice at a two-block critical point, and a flow started inside it.

use quiverflow::critical::{classify_critical, negative_slice_from_profile, CriticalTols};
use quiverflow::flow::{flow_f64, Constraint, FlowOptions};
use quiverflow::quiver::canonical_stability;
use quiverflow::selfcheck::hecke_setups;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for s in hecke_setups()? {
        let alpha = canonical_stability(&s.critical.quiver, &s.critical.dims)?.to_f64();
        let p = classify_critical(&s.critical, &alpha, &CriticalTols::default())?;
        let basis = negative_slice_from_profile(&s.critical, &p)?;
        println!("{}: slice dimension {}", s.name, basis.len());
        let start = s.critical.displaced(&basis[0], 0.5);
        let opts = FlowOptions::default().with_constraint(Constraint::DoubledMomentC);
        let r = flow_f64(&start, &alpha, &opts)?;
        println!("  flow from the slice: {:?}, energy {:.6}", r.status, r.final_energy);
    }
    Ok(())
}
