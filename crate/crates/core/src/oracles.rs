//! Independent checks: central finite differences, exact subset
//! enumeration for thin representations, and polystability by flowing.

use nalgebra::DMatrix;
use num_rational::Rational64;
use num_traits::Zero;
use serde::Serialize;

use crate::correspondence::{intertwiner_space, is_isomorphic, zero_energy_flow_options, IsoOptions};
use crate::error::OracleError;
use crate::flow::{flow_f64, FlowOptions, FlowStatus};
use crate::linalg;
use crate::quiver::{DimVector, Quiver, StabilityParameter};
use crate::rep::{energy, grad_energy, Representation, TangentVector};

/// Coordinates are treated as zero below this magnitude.
pub const THIN_ZERO: f64 = 1e-12;
pub const POLY_TOL: f64 = 1e-10;
const MAX_THIN_VERTICES: usize = 20;

fn real_coords(x: &Representation) -> Vec<f64> {
    linalg::flatten_r(&x.mats).as_slice().to_vec()
}

fn with_coords(x: &Representation, v: &[f64]) -> Representation {
    x.with_mats(linalg::unflatten_r(v, &x.shapes()))
}

/// Central differences of the energy in each real coordinate.
pub fn fd_gradient(x: &Representation, alpha: &[f64], h: f64) -> TangentVector {
    let mut v = real_coords(x);
    let mut g = vec![0.0; v.len()];
    for i in 0..v.len() {
        let v0 = v[i];
        v[i] = v0 + h;
        let ep = energy(&with_coords(x, &v), alpha);
        v[i] = v0 - h;
        let em = energy(&with_coords(x, &v), alpha);
        v[i] = v0;
        g[i] = (ep - em) / (2.0 * h);
    }
    linalg::unflatten_r(&g, &x.shapes())
}

/// Second central differences of the energy, real coordinates.
pub fn fd_hessian(x: &Representation, alpha: &[f64], h: f64) -> DMatrix<f64> {
    let mut v = real_coords(x);
    let n = v.len();
    let e = |v: &[f64]| energy(&with_coords(x, v), alpha);
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let (vi, vj) = (v[i], v[j]);
            let mut corner = |si: f64, sj: f64| {
                v[i] = vi + si * h;
                v[j] += sj * h;
                let r = e(&v);
                v[i] = vi;
                v[j] = vj;
                r
            };
            let val = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0)) / (4.0 * h * h);
            out[(i, j)] = val;
            out[(j, i)] = val;
        }
    }
    out
}

/// Central differences of the analytic gradient, one column per real
/// coordinate.
pub fn fd_hessian_from_gradient(x: &Representation, alpha: &[f64], h: f64) -> DMatrix<f64> {
    let mut v = real_coords(x);
    let n = v.len();
    let mut out = DMatrix::zeros(n, n);
    for j in 0..n {
        let v0 = v[j];
        v[j] = v0 + h;
        let gp = linalg::flatten_r(&grad_energy(&with_coords(x, &v), alpha));
        v[j] = v0 - h;
        let gm = linalg::flatten_r(&grad_energy(&with_coords(x, &v), alpha));
        v[j] = v0;
        out.set_column(j, &((gp - gm) / (2.0 * h)));
    }
    out
}

/// Closed vertex subsets of a thin representation, encoded as bit masks
/// over vertex indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinSubrepLattice {
    /// Vertices of dimension one.
    pub support: u32,
    /// Admissible subsets with their exact slopes (`None` for the empty set).
    pub subsets: Vec<(u32, Option<Rational64>)>,
    /// `(tail, head)` of every edge carrying a nonzero map.
    live_edges: Vec<(usize, usize)>,
}

fn mask_dims(mask: u32, n: usize) -> DimVector {
    DimVector((0..n).map(|v| ((mask >> v) & 1) as usize).collect())
}

fn mask_slope(alpha: &StabilityParameter, mask: u32) -> Option<Rational64> {
    let rank = mask.count_ones() as i64;
    (rank > 0).then(|| {
        let deg: Rational64 = (0..alpha.0.len()).filter(|v| mask >> v & 1 == 1).map(|v| alpha.0[v]).sum();
        deg / Rational64::from_integer(rank)
    })
}

fn submasks(of: u32) -> impl Iterator<Item = u32> {
    // All subsets of `of`, including the empty one, in increasing order.
    let mut cur: Option<u32> = Some(0);
    std::iter::from_fn(move || {
        let out = cur?;
        cur = if out == of { None } else { Some(((out | !of).wrapping_add(1)) & of) };
        Some(out)
    })
}

fn check_thin(x: &Representation) -> Result<u32, OracleError> {
    let n = x.dims.len();
    if n > MAX_THIN_VERTICES {
        return Err(OracleError::TooLarge(n));
    }
    let mut support = 0u32;
    for (v, &d) in x.dims.0.iter().enumerate() {
        match d {
            0 => {}
            1 => support |= 1 << v,
            _ => return Err(OracleError::NonThin(x.quiver.vertices()[v].clone())),
        }
    }
    Ok(support)
}

impl ThinSubrepLattice {
    pub fn new(x: &Representation, alpha: &StabilityParameter) -> Result<Self, OracleError> {
        let support = check_thin(x)?;
        let live_edges = live_edges(x);
        let subsets = submasks(support)
            .filter(|&s| is_closed(&live_edges, s, support))
            .map(|s| (s, mask_slope(alpha, s)))
            .collect();
        Ok(ThinSubrepLattice { support, subsets, live_edges })
    }

    pub fn is_admissible(&self, mask: u32) -> bool {
        is_closed(&self.live_edges, mask, self.support)
    }
}

fn live_edges(x: &Representation) -> Vec<(usize, usize)> {
    x.quiver
        .edges()
        .iter()
        .zip(&x.mats)
        .filter(|(_, m)| m.iter().any(|z| z.norm() > THIN_ZERO))
        .map(|(e, _)| (e.tail, e.head))
        .collect()
}

/// `mask` is closed inside the quotient supported on `within`.
fn is_closed(edges: &[(usize, usize)], mask: u32, within: u32) -> bool {
    edges.iter().all(|&(t, h)| mask >> t & 1 == 0 || within >> h & 1 == 0 || mask >> h & 1 == 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThinHn {
    /// Harder-Narasimhan factors, strictly decreasing slopes.
    pub factors: Vec<DimVector>,
    #[serde(serialize_with = "ser_rationals")]
    pub slopes: Vec<Rational64>,
    /// Ties between distinct maximal destabilizing subsets.
    pub warnings: Vec<String>,
    #[serde(skip)]
    masks: Vec<u32>,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(crate::quiver::format_weight))
}

fn vertex_list(mask: u32) -> Vec<usize> {
    (0..32).filter(|v| mask >> v & 1 == 1).collect()
}

/// Harder-Narasimhan type by peeling off maximal-slope, maximal-rank
/// closed subsets from successive quotients.
pub fn thin_hn_type(x: &Representation, alpha: &StabilityParameter) -> Result<ThinHn, OracleError> {
    let support = check_thin(x)?;
    let edges = live_edges(x);
    let n = x.dims.len();
    let mut rest = support;
    let mut out = ThinHn { factors: vec![], slopes: vec![], warnings: vec![], masks: vec![] };
    while rest != 0 {
        let mut best: Vec<(u32, Rational64)> = Vec::new();
        for s in submasks(rest).filter(|&s| s != 0 && is_closed(&edges, s, rest)) {
            let sl = mask_slope(alpha, s).expect("nonempty");
            let key = |m: u32, q: Rational64| (q, m.count_ones());
            match best.first() {
                Some(&(m, q)) if key(s, sl) < key(m, q) => {}
                Some(&(m, q)) if key(s, sl) == key(m, q) => best.push((s, sl)),
                _ => best = vec![(s, sl)],
            }
        }
        best.sort_by_key(|&(m, _)| vertex_list(m));
        if best.len() > 1 {
            out.warnings.push(format!(
                "{} maximal destabilizing subsets tie; keeping vertices {:?}",
                best.len(),
                vertex_list(best[0].0)
            ));
        }
        let (m, sl) = best[0];
        out.factors.push(mask_dims(m, n));
        out.slopes.push(sl);
        out.masks.push(m);
        rest &= !m;
    }
    Ok(out)
}

/// Stable factors refining each Harder-Narasimhan factor, in order, paired
/// with their slopes.
pub fn thin_jh(x: &Representation, alpha: &StabilityParameter) -> Result<Vec<(DimVector, Rational64)>, OracleError> {
    let hn = thin_hn_type(x, alpha)?;
    let edges = live_edges(x);
    let n = x.dims.len();
    let mut out = Vec::new();
    for (&factor, &sl) in hn.masks.iter().zip(&hn.slopes) {
        let mut rest = factor;
        while rest != 0 {
            // A minimal-rank equal-slope subrepresentation of a semistable
            // representation is stable.
            let s = submasks(rest)
                .filter(|&s| s != 0 && is_closed(&edges, s, rest) && mask_slope(alpha, s) == Some(sl))
                .min_by_key(|&s| (s.count_ones(), vertex_list(s)))
                .expect("the whole factor qualifies");
            out.push((mask_dims(s, n), sl));
            rest &= !s;
        }
    }
    Ok(out)
}

/// Merges consecutive parts of equal slope into one dimension vector.
pub fn group_by_slope(parts: &[(DimVector, Rational64)]) -> Vec<DimVector> {
    let mut out: Vec<(DimVector, Rational64)> = Vec::new();
    for (d, s) in parts {
        match out.last_mut() {
            Some((acc, last)) if last == s => *acc = acc.add(d),
            _ => out.push((d.clone(), *s)),
        }
    }
    out.into_iter().map(|(d, _)| d).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThinStability {
    Stable,
    SemistableOnly,
    Unstable,
}

/// Compares every proper nonzero closed subset against the slope of the
/// whole representation.
pub fn thin_is_stable(x: &Representation, alpha: &StabilityParameter) -> Result<ThinStability, OracleError> {
    let lattice = ThinSubrepLattice::new(x, alpha)?;
    let whole = mask_slope(alpha, lattice.support).unwrap_or_else(Rational64::zero);
    let mut result = ThinStability::Stable;
    for &(m, sl) in &lattice.subsets {
        let Some(sl) = sl else { continue };
        if m == lattice.support {
            continue;
        }
        if sl > whole {
            return Ok(ThinStability::Unstable);
        }
        if sl == whole {
            result = ThinStability::SemistableOnly;
        }
    }
    Ok(result)
}

/// Reverses the quiver and conjugate-transposes every map.
pub fn adjoint_pair(x: &Representation, alpha: &StabilityParameter) -> (Representation, StabilityParameter) {
    (crate::rep::adjoint_rep(x), alpha.neg())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolyVerdict {
    Polystable,
    NotPolystable,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolystabilityReport {
    pub verdict: PolyVerdict,
    pub final_energy: f64,
    /// Residual of the best isomorphism from the limit to `x`.
    pub iso_residual: Option<f64>,
    pub flow_status: FlowStatus,
    /// Whether the limit was refined with the zero-energy preset.
    pub refined: bool,
    /// Dimensions of the endomorphism spaces of `x` and of the limit.
    pub stabilizer_dims: Option<(usize, usize)>,
}

/// Flows from `x`; polystable when the limit has energy below `POLY_TOL`
/// and is isomorphic to `x`.
pub fn polystable_by_flow(
    x: &Representation,
    alpha: &[f64],
    opts: &FlowOptions,
    seed: u64,
) -> Result<PolystabilityReport, OracleError> {
    let first = flow_f64(x, alpha, opts)?;
    if first.final_energy >= POLY_TOL && first.converged() {
        return Ok(PolystabilityReport {
            verdict: PolyVerdict::NotPolystable,
            final_energy: first.final_energy,
            iso_residual: None,
            flow_status: first.status,
            refined: false,
            stabilizer_dims: None,
        });
    }
    // Near zero energy the flow slows to a polynomial rate; finish with the
    // quartic preset so that a degenerating orbit shows up as a tiny limit.
    let second = flow_f64(&first.limit, alpha, &zero_energy_flow_options(&first.limit))?;
    let report = |verdict, iso_residual| PolystabilityReport {
        verdict,
        final_energy: second.final_energy,
        iso_residual,
        flow_status: second.status,
        refined: true,
        stabilizer_dims: None,
    };
    if second.final_energy >= POLY_TOL {
        let verdict =
            if second.final_grad_norm <= opts.grad_tol { PolyVerdict::NotPolystable } else { PolyVerdict::Indeterminate };
        return Ok(report(verdict, None));
    }
    if second.status == FlowStatus::MaxSteps || second.status == FlowStatus::StepUnderflow {
        return Ok(report(PolyVerdict::Indeterminate, None));
    }
    // A limit on the boundary of the orbit has a strictly larger stabilizer,
    // which is robust where a near-singular witness is not.
    let iso_opts = IsoOptions::flow_limits();
    let end_x = intertwiner_space(x, x, iso_opts.null_tol)?.len();
    let end_limit = intertwiner_space(&second.limit, &second.limit, iso_opts.null_tol)?.len();
    let iso = is_isomorphic(&second.limit, x, seed, &iso_opts)?;
    let verdict = if iso.isomorphic && end_x == end_limit { PolyVerdict::Polystable } else { PolyVerdict::NotPolystable };
    let mut r = report(verdict, iso.residual.is_finite().then_some(iso.residual));
    r.stabilizer_dims = Some((end_x, end_limit));
    Ok(r)
}

/// Subsets of `q`'s vertices as dimension vectors, for diagnostics.
pub fn lattice_dims(q: &Quiver, lattice: &ThinSubrepLattice) -> Vec<DimVector> {
    lattice.subsets.iter().map(|&(m, _)| mask_dims(m, q.vertices().len())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::{c, frob_all};
    use crate::quiver::reverse_quiver;

    fn q(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    #[test]
    fn a2_closed_forms() {
        // E(a) = (a²/2 − 1)² up to the overall normalisation used by `energy`.
        let a = 1.3;
        let x = fixtures::a2_rep(c(a, 0.0));
        let e = energy(&x, &fixtures::a2_alpha());
        let e_closed = (a * a / 2.0 - 1.0).powi(2);
        assert!((e - e_closed).abs() < 1e-12, "{e} vs {e_closed}");
        let g = fd_gradient(&x, &fixtures::a2_alpha(), 1e-5);
        let g_closed = 2.0 * a * (a * a / 2.0 - 1.0);
        assert!((g[0][(0, 0)].re - g_closed).abs() < 1e-8);
    }

    #[test]
    fn fd_at_minimum_and_symmetry() {
        let x = fixtures::f1_rep(c(0.0, 0.0), c(2f64.sqrt(), 0.0));
        assert!(frob_all(&fd_gradient(&x, &fixtures::f1_alpha(), 1e-5)) < 1e-8);
        let h = fd_hessian(&x, &fixtures::f1_alpha(), 1e-4);
        assert!((&h - h.transpose()).abs().max() < 1e-8);
    }

    #[test]
    fn hn_examples() {
        let alpha = fixtures::a2_stability();
        let zero = fixtures::a2_rep(c(0.0, 0.0));
        assert_eq!(thin_hn_type(&zero, &alpha).unwrap().factors, vec![DimVector(vec![1, 0]), DimVector(vec![0, 1])]);
        let x = fixtures::a2_rep(c(0.7, -0.2));
        let hn = thin_hn_type(&x, &alpha).unwrap();
        assert_eq!(hn.factors, vec![DimVector(vec![1, 1])]);
        assert!(hn.warnings.is_empty());
        let f = fixtures::f1_rep(c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(
            thin_hn_type(&f, &fixtures::f1_stability()).unwrap().factors,
            vec![DimVector(vec![0, 1]), DimVector(vec![1, 0])]
        );
    }

    #[test]
    fn stability_examples() {
        let alpha = fixtures::f1_stability();
        assert_eq!(thin_is_stable(&fixtures::f1_rep(c(0.0, 0.0), c(1.0, 0.0)), &alpha).unwrap(), ThinStability::Stable);
        assert_eq!(thin_is_stable(&fixtures::f1_rep(c(1.0, 0.0), c(0.0, 0.0)), &alpha).unwrap(), ThinStability::Unstable);
        assert_eq!(thin_is_stable(&fixtures::f1_rep(c(0.0, 0.0), c(0.0, 0.0)), &alpha).unwrap(), ThinStability::Unstable);
        let a2 = fixtures::a2_rep(c(1.0, 0.0));
        assert_eq!(thin_is_stable(&a2, &StabilityParameter::zero(2)).unwrap(), ThinStability::SemistableOnly);
    }

    #[test]
    fn adjoint_duality_on_a3() {
        let alpha = StabilityParameter(vec![q(2), q(-1), q(-1)]);
        for mask in 0..4u32 {
            let a = if mask & 1 == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) };
            let b = if mask & 2 == 2 { c(0.5, 0.5) } else { c(0.0, 0.0) };
            let x = Representation::new(
                fixtures::a3_quiver(),
                DimVector(vec![1, 1, 1]),
                vec![nalgebra::DMatrix::from_element(1, 1, a), nalgebra::DMatrix::from_element(1, 1, b)],
            )
            .unwrap();
            let (y, neg) = adjoint_pair(&x, &alpha);
            assert_eq!(*y.quiver, reverse_quiver(&x.quiver));
            assert_eq!(thin_is_stable(&x, &alpha).unwrap(), thin_is_stable(&y, &neg).unwrap());
        }
    }

    #[test]
    fn jh_refines_semistable_factor() {
        // A3 with the first map nonzero and α = 0: everything has slope 0.
        let x = Representation::new(
            fixtures::a3_quiver(),
            DimVector(vec![1, 1, 1]),
            vec![nalgebra::DMatrix::from_element(1, 1, c(1.0, 0.0)), nalgebra::DMatrix::zeros(1, 1)],
        )
        .unwrap();
        let alpha = StabilityParameter::zero(3);
        let jh = thin_jh(&x, &alpha).unwrap();
        assert_eq!(jh.len(), 3);
        assert_eq!(group_by_slope(&jh), vec![DimVector(vec![1, 1, 1])]);
    }

    #[test]
    fn non_thin_is_rejected() {
        let x = Representation::zero(fixtures::f1_quiver(), DimVector(vec![1, 2]));
        assert!(matches!(thin_hn_type(&x, &fixtures::f1_stability()), Err(OracleError::NonThin(_))));
    }

    #[test]
    fn polystability_examples() {
        let opts = FlowOptions { max_time: 100.0, ..FlowOptions::default() };
        let x = fixtures::f1_rep(c(0.0, 0.0), c(2f64.sqrt(), 0.0));
        assert_eq!(polystable_by_flow(&x, &fixtures::f1_alpha(), &opts, 1).unwrap().verdict, PolyVerdict::Polystable);
        for a in [0.8, 0.1, 3.0] {
            let a = fixtures::a2_rep(c(a, 0.0));
            assert_eq!(polystable_by_flow(&a, &[0.0, 0.0], &opts, 1).unwrap().verdict, PolyVerdict::NotPolystable);
        }
        let z = fixtures::a2_rep(c(0.0, 0.0));
        assert_eq!(polystable_by_flow(&z, &[0.0, 0.0], &opts, 1).unwrap().verdict, PolyVerdict::Polystable);
        let unstable = fixtures::f1_rep(c(1.0, 0.0), c(0.0, 0.0));
        assert_eq!(
            polystable_by_flow(&unstable, &fixtures::f1_alpha(), &opts, 1).unwrap().verdict,
            PolyVerdict::NotPolystable
        );
    }
}
