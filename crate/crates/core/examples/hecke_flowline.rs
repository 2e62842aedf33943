//! Hecke pair to flow line and back.

use quiverflow::correspondence::{flowline_to_hecke, hecke_check, hecke_to_flowline, HeckeOptions};
use quiverflow::selfcheck::{flow_from_slice, hecke_setups};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for s in hecke_setups()? {
        let coeffs = vec![0.7; s.basis.len()];
        let x2 = flow_from_slice(&s, &coeffs)?;
        let h = hecke_check(&s.x1, &x2, s.k, 1, &HeckeOptions::default())?;
        println!("{}: member {}, residual {:.2e}", s.name, h.member, h.residual);
        let Some(xi) = h.xi else { continue };
        let pair = hecke_to_flowline(&s.x1, &x2, &xi, s.k)?;
        println!("  flow line residual {:.2e}, slice defect {:.2e}", pair.residual, pair.slice_defect);
        let back = flowline_to_hecke(&pair, s.k)?;
        println!("  recovered intertwiner with {} blocks", back.blocks.len());
    }
    Ok(())
}
