//! Classify the limit of a flow: eigenvalue blocks, critical type and the
//! Hessian spectrum.

use quiverflow::critical::{classify_critical, hessian_spectrum, CriticalTols};
use quiverflow::fixtures;
use quiverflow::flow::{flow_f64, FlowOptions};
use quiverflow::linalg::c;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = fixtures::f1_rep(c(0.4, 0.2), c(0.0, 0.0));
    let alpha = fixtures::f1_alpha();
    let limit = flow_f64(&x, &alpha, &FlowOptions::default())?.limit;
    let p = classify_critical(&limit, &alpha, &CriticalTols::default())?;
    println!("eigenvalues {:?}", p.eigenvalues);
    println!("critical type {:?}", p.critical_type.iter().map(|d| &d.0).collect::<Vec<_>>());
    for e in hessian_spectrum(&limit, &alpha, 1e-6) {
        println!("hessian eigenvalue {:+.4} with multiplicity {}", e.value, e.multiplicity);
    }
    Ok(())
}
