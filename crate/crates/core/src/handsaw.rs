//! Handsaw data as labelled representations: the handsaw constraint, the
//! adjoint transform and Hecke membership through that transform.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::correspondence::{solve_pinned_injective, HeckeOptions, Intertwiner};
use crate::error::{CorrespondenceError, RepError};
use crate::linalg::{frob, CMat};
use crate::quiver::{DimVector, HandsawRole};
use crate::rep::{adjoint_rep, Representation};

/// Components of the handsaw constraint keyed by `(source, target)` vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct HandsawConstraint {
    pub components: BTreeMap<(usize, usize), CMat>,
}

impl HandsawConstraint {
    pub fn norm(&self) -> f64 {
        self.components.values().fold(0.0, |s, m| s + frob(m).powi(2)).sqrt()
    }
}

fn roles(x: &Representation) -> Result<Vec<HandsawRole>, RepError> {
    x.quiver
        .edges()
        .iter()
        .map(|e| HandsawRole::parse(&e.label).ok_or_else(|| RepError::MissingLabel(format!("unrecognised label '{}'", e.label))))
        .collect()
}

/// `Σ (B1 B2 − B2 B1) + Σ a_k b_k`, each term composed along the quiver and
/// grouped by the pair of vertices it maps between. Works for a handsaw and
/// for its adjoint transform.
pub fn handsaw_constraint(x: &Representation) -> Result<HandsawConstraint, RepError> {
    let roles = roles(x)?;
    let edges = x.quiver.edges();
    let inf = x.quiver.infinity().ok_or_else(|| RepError::MissingLabel("infinity vertex".into()))?;
    let mut loops: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, r) in roles.iter().enumerate() {
        if let HandsawRole::B2(_) = r {
            loops.insert(edges[i].tail, i);
        }
    }
    let mut out: BTreeMap<(usize, usize), CMat> = BTreeMap::new();
    for (i, r) in roles.iter().enumerate() {
        if let HandsawRole::B1(k) = r {
            let (p, q) = (edges[i].tail, edges[i].head);
            let lp = loops.get(&p).ok_or_else(|| RepError::MissingLabel(format!("B2 loop at the tail of B1_{k}")))?;
            let lq = loops.get(&q).ok_or_else(|| RepError::MissingLabel(format!("B2 loop at the head of B1_{k}")))?;
            let term = &x.mats[i] * &x.mats[*lp] - &x.mats[*lq] * &x.mats[i];
            *out.entry((p, q)).or_insert_with(|| CMat::zeros(term.nrows(), term.ncols())) += term;
        }
    }
    let find = |want: HandsawRole| roles.iter().position(|r| *r == want);
    for (i, r) in roles.iter().enumerate() {
        if let HandsawRole::A(k, j) = *r {
            let Some(b) = find(HandsawRole::B(k, j)) else { continue };
            // Compose the edge entering infinity with the edge leaving it.
            let (into, from) = if edges[i].tail == inf { (b, i) } else { (i, b) };
            let term = &x.mats[from] * &x.mats[into];
            let key = (edges[into].tail, edges[from].head);
            *out.entry(key).or_insert_with(|| CMat::zeros(term.nrows(), term.ncols())) += term;
        }
    }
    Ok(HandsawConstraint { components: out })
}

/// Reverses the quiver, takes adjoints of every matrix and negates the
/// `b`-labelled ones. Applying it twice restores the input.
pub fn handsaw_adjoint(x: &Representation) -> Result<Representation, RepError> {
    let roles = roles(x)?;
    let mut y = adjoint_rep(x);
    for (m, r) in y.mats.iter_mut().zip(&roles) {
        if let HandsawRole::B(..) = r {
            *m = -m.clone();
        }
    }
    Ok(y)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationResiduals {
    pub b1: f64,
    pub b2: f64,
    pub a: f64,
    pub b: f64,
}

impl RelationResiduals {
    pub fn max(&self) -> f64 {
        self.b1.max(self.b2).max(self.a).max(self.b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HandsawHeckeReport {
    pub member: bool,
    /// Surjective maps `ξ_i : V²_i → V¹_i` with `ξ_∞ = 1`.
    pub xi: Option<Intertwiner>,
    pub residuals: Option<RelationResiduals>,
    pub diagnostic: Option<String>,
}

/// Residuals of `ξB1² = B1¹ξ`, `ξB2² = B2¹ξ`, `ξa² = a¹`, `b² = b¹ξ`,
/// each relative to the size of the data.
pub fn handsaw_relation_residuals(
    x1: &Representation,
    x2: &Representation,
    xi: &[CMat],
) -> Result<RelationResiduals, RepError> {
    let roles = roles(x1)?;
    let mut res = RelationResiduals { b1: 0.0, b2: 0.0, a: 0.0, b: 0.0 };
    let scale = 1.0 + x1.norm() + x2.norm();
    for (i, (e, r)) in x1.quiver.edges().iter().zip(&roles).enumerate() {
        let d = frob(&(&xi[e.head] * &x2.mats[i] - &x1.mats[i] * &xi[e.tail])) / scale;
        let slot = match r {
            HandsawRole::B1(_) => &mut res.b1,
            HandsawRole::B2(_) => &mut res.b2,
            HandsawRole::A(..) => &mut res.a,
            HandsawRole::B(..) => &mut res.b,
        };
        *slot = slot.max(d);
    }
    Ok(res)
}

/// Hecke membership for handsaw data with `dims(x2) = dims(x1) + e_k`,
/// decided on the adjoint transforms and transported back.
pub fn handsaw_hecke_check(
    x1: &Representation,
    x2: &Representation,
    k: usize,
    seed: u64,
    opts: &HeckeOptions,
) -> Result<HandsawHeckeReport, CorrespondenceError> {
    let inf = x1
        .quiver
        .infinity()
        .ok_or_else(|| CorrespondenceError::DimensionMismatch("quiver has no infinity vertex".into()))?;
    if *x1.quiver != *x2.quiver {
        return Err(CorrespondenceError::DimensionMismatch("representations of different quivers".into()));
    }
    if k == inf || k >= x1.dims.len() || x1.dims.add(&DimVector::unit(x1.dims.len(), k)) != x2.dims {
        return Err(CorrespondenceError::DimensionMismatch(format!(
            "{} and {} do not differ by a unit at vertex {k}",
            x1.dims, x2.dims
        )));
    }
    if x1.dims.0[inf] != 1 {
        return Err(CorrespondenceError::DimensionMismatch("dimension at infinity must be 1".into()));
    }
    let y1 = handsaw_adjoint(x1)?;
    let y2 = handsaw_adjoint(x2)?;
    let report = solve_pinned_injective(&y1, &y2, seed, opts);
    if !report.member {
        return Ok(HandsawHeckeReport { member: false, xi: None, residuals: None, diagnostic: report.diagnostic });
    }
    let eta = report.xi.expect("member has a map");
    let xi: Vec<CMat> = eta.blocks.iter().map(|b| b.adjoint()).collect();
    let residuals = handsaw_relation_residuals(x1, x2, &xi)?;
    Ok(HandsawHeckeReport {
        member: true,
        xi: Some(Intertwiner { blocks: xi, normalized: true }),
        residuals: Some(residuals),
        diagnostic: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::c;
    use crate::quiver::handsaw_to_quiver;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    #[test]
    fn hs2_constraint_vanishes() {
        let (q, d) = fixtures::hs2_quiver();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Representation::random(q, d, &mut rng);
        assert_eq!(handsaw_constraint(&x).unwrap().norm(), 0.0);
    }

    #[test]
    fn n3_constraint_matches_direct_evaluation() {
        let (q, d) = handsaw_to_quiver(3, &[2, 1], &[1, 2, 1]).unwrap();
        let q = Arc::new(q);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = Representation::random(q.clone(), d, &mut rng);
        let m = |l: &str| &x.mats[q.edge_by_label(l).unwrap()];
        let mut expected = m("B1_1") * m("B2_1") - m("B2_2") * m("B1_1");
        for j in 1..=2 {
            expected += m(&format!("a_2^{j}")) * m(&format!("b_2^{j}"));
        }
        let got = handsaw_constraint(&x).unwrap();
        assert_eq!(got.components.len(), 1);
        assert!(frob(&(&got.components[&(1, 2)] - expected)) < 1e-12);
        let zero = Representation::zero(q, x.dims.clone());
        assert_eq!(handsaw_constraint(&zero).unwrap().norm(), 0.0);
    }

    #[test]
    fn adjoint_is_an_involution_and_conjugates_the_constraint() {
        let (q, d) = handsaw_to_quiver(3, &[2, 1], &[1, 2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = Representation::random(Arc::new(q), d, &mut rng);
        let y = handsaw_adjoint(&x).unwrap();
        let b = x.quiver.edge_by_label("b_2^1").unwrap();
        assert_eq!(y.mats[b], -x.mats[b].adjoint());
        assert_eq!(handsaw_adjoint(&y).unwrap(), x);
        let cx = handsaw_constraint(&x).unwrap();
        let cy = handsaw_constraint(&y).unwrap();
        for (&(p, q), m) in &cx.components {
            assert!(frob(&(&cy.components[&(q, p)] + m.adjoint())) < 1e-12);
        }
    }

    #[test]
    fn hs2_hecke_reduces_to_a_scalar_condition() {
        let (q, d2) = fixtures::hs2_quiver();
        let d1 = DimVector(vec![1, 0]);
        let x1 = Representation::zero(q.clone(), d1);
        let one = |z| CMat::from_element(1, 1, z);
        let x2 = Representation::new(q.clone(), d2.clone(), vec![one(c(0.4, 0.0)), one(c(1.0, 0.0)), one(c(0.0, 0.0))]).unwrap();
        let r = handsaw_hecke_check(&x1, &x2, 1, 0, &HeckeOptions::default()).unwrap();
        assert!(r.member);
        assert!(r.residuals.unwrap().max() < 1e-12);
        let x3 = Representation::new(q, d2, vec![one(c(0.4, 0.0)), one(c(1.0, 0.0)), one(c(0.5, 0.0))]).unwrap();
        assert!(!handsaw_hecke_check(&x1, &x3, 1, 0, &HeckeOptions::default()).unwrap().member);
    }
}
