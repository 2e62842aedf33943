//! Intertwiners and isomorphisms between representations, Hecke membership
//! in both directions, affine projection and Lagrangian membership.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::CorrespondenceError;
use crate::flow::{flow_f64, Constraint, FlowOptions, FlowResult, FlowStatus};
use crate::linalg::{self, c, frob, frob_all, CMat, C64};
use crate::quiver::DimVector;
use crate::rep::{
    d_moment_complex, direct_sum, group_act, inf_action_adjoint, pad, Flavor, GroupElement, Representation,
    TangentVector,
};

/// Per-vertex maps `ξ_i : V¹_i → V²_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Intertwiner {
    pub blocks: Vec<CMat>,
    /// Whether the block at the infinity vertex is pinned to `1`.
    pub normalized: bool,
}

impl Intertwiner {
    /// `Σ_a ‖ξ_h x1_a − x2_a ξ_t‖`, the defect of the intertwining relation.
    pub fn residual(&self, x1: &Representation, x2: &Representation) -> f64 {
        frob_all(&apply_intertwiner(&self.blocks, x1, x2))
    }

    /// Smallest singular value over all blocks divided by the largest.
    /// Zero when some block is not injective.
    pub fn injectivity_ratio(&self) -> f64 {
        let mut smin = f64::INFINITY;
        let mut smax: f64 = 0.0;
        for b in &self.blocks {
            if b.ncols() == 0 {
                continue;
            }
            if b.nrows() < b.ncols() {
                return 0.0;
            }
            let s = linalg::singular_values(b);
            smax = smax.max(s.iter().cloned().fold(0.0, f64::max));
            smin = smin.min(s.iter().cloned().fold(f64::INFINITY, f64::min));
        }
        if smax == 0.0 {
            return if smin.is_infinite() { 1.0 } else { 0.0 };
        }
        if smin.is_infinite() {
            1.0
        } else {
            smin / smax
        }
    }
}

fn apply_intertwiner(xi: &[CMat], x1: &Representation, x2: &Representation) -> Vec<CMat> {
    x1.quiver
        .edges()
        .iter()
        .enumerate()
        .map(|(a, e)| &xi[e.head] * &x1.mats[a] - &x2.mats[a] * &xi[e.tail])
        .collect()
}

fn unknown_shapes(x1: &Representation, x2: &Representation) -> Vec<(usize, usize)> {
    x1.dims.0.iter().zip(&x2.dims.0).map(|(&d1, &d2)| (d2, d1)).collect()
}

/// Matrix of `ξ ↦ (ξ_h x1_a − x2_a ξ_t)_a` in row-major block coordinates.
fn intertwiner_operator(x1: &Representation, x2: &Representation) -> CMat {
    let ushapes = unknown_shapes(x1, x2);
    let nu = linalg::complex_len(&ushapes);
    let no: usize = x1.quiver.edges().iter().map(|e| x2.dims.0[e.head] * x1.dims.0[e.tail]).sum();
    let mut m = CMat::zeros(no, nu);
    let mut e = vec![c(0.0, 0.0); nu];
    for j in 0..nu {
        e[j] = c(1.0, 0.0);
        let xi = linalg::unflatten_c(&e, &ushapes);
        m.set_column(j, &linalg::flatten_c(&apply_intertwiner(&xi, x1, x2)));
        e[j] = c(0.0, 0.0);
    }
    m
}

fn same_quiver(x1: &Representation, x2: &Representation) -> bool {
    std::sync::Arc::ptr_eq(&x1.quiver, &x2.quiver) || *x1.quiver == *x2.quiver
}

fn scale_of(x1: &Representation, x2: &Representation) -> f64 {
    1.0f64.max(x1.norm() + x2.norm())
}

/// Orthonormal basis of `Hom(x1, x2)`; singular values at most
/// `null_tol·max(1, ‖x1‖+‖x2‖)` count as zero.
pub fn intertwiner_space(
    x1: &Representation,
    x2: &Representation,
    null_tol: f64,
) -> Result<Vec<Intertwiner>, CorrespondenceError> {
    if !same_quiver(x1, x2) {
        return Err(CorrespondenceError::DimensionMismatch("representations of different quivers".into()));
    }
    let ushapes = unknown_shapes(x1, x2);
    let m = intertwiner_operator(x1, x2);
    let n = linalg::nullspace(&m, null_tol * scale_of(x1, x2));
    Ok((0..n.ncols())
        .map(|j| {
            let col: Vec<C64> = n.column(j).iter().copied().collect();
            Intertwiner { blocks: linalg::unflatten_c(&col, &ushapes), normalized: false }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsoOptions {
    /// Relative threshold for the intertwiner nullspace.
    pub null_tol: f64,
    /// Relative threshold on `‖g·x1 − x2‖`.
    pub residual_tol: f64,
    /// Largest accepted per-block condition number of a witness.
    pub cond_max: f64,
    pub trials: usize,
    /// Also require `dim Hom(x1, x2) = dim Hom(x1, x1)`.
    pub strict: bool,
}

impl Default for IsoOptions {
    fn default() -> Self {
        IsoOptions { null_tol: 1e-9, residual_tol: 1e-8, cond_max: 1e12, trials: 8, strict: false }
    }
}

impl IsoOptions {
    /// Tolerances for comparing limits of numerical flows, which carry
    /// residual errors well above machine precision.
    pub fn flow_limits() -> Self {
        IsoOptions { null_tol: 1e-6, residual_tol: 1e-6, cond_max: 1e6, trials: 8, strict: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsoReport {
    pub isomorphic: bool,
    pub witness: Option<GroupElement>,
    /// `‖g·x1 − x2‖` for the best candidate (infinite when none was invertible).
    pub residual: f64,
    pub hom_dim: usize,
    pub condition: f64,
}

/// Decides `x1 ≅ x2` by trying random elements of `Hom(x1, x2)`.
///
/// A negative answer is probabilistic: it means none of `opts.trials` random
/// combinations of a basis was an invertible intertwiner.
pub fn is_isomorphic(
    x1: &Representation,
    x2: &Representation,
    seed: u64,
    opts: &IsoOptions,
) -> Result<IsoReport, CorrespondenceError> {
    let no = |hom_dim| IsoReport { isomorphic: false, witness: None, residual: f64::INFINITY, hom_dim, condition: f64::INFINITY };
    if !same_quiver(x1, x2) || x1.dims != x2.dims {
        return Ok(no(0));
    }
    let basis = intertwiner_space(x1, x2, opts.null_tol)?;
    if x1.dims.rank() == 0 {
        return Ok(IsoReport {
            isomorphic: true,
            witness: Some(GroupElement::identity(&x1.dims)),
            residual: 0.0,
            hom_dim: 0,
            condition: 1.0,
        });
    }
    if basis.is_empty() {
        return Ok(no(0));
    }
    if opts.strict {
        let endo = intertwiner_space(x1, x1, opts.null_tol)?;
        if endo.len() != basis.len() {
            return Ok(no(basis.len()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = opts.residual_tol * 1.0f64.max(x2.norm());
    let mut best = no(basis.len());
    for _ in 0..opts.trials.max(1) {
        let coeffs: Vec<C64> = basis.iter().map(|_| linalg::gaussian(&mut rng)).collect();
        let blocks: Vec<CMat> = (0..x1.dims.len())
            .map(|v| basis.iter().zip(&coeffs).fold(CMat::zeros(x1.dims.0[v], x1.dims.0[v]), |acc, (b, &z)| acc + &b.blocks[v] * z))
            .collect();
        let g = GroupElement { blocks };
        let cond = g.condition_number();
        if !(cond < opts.cond_max) {
            continue;
        }
        let Ok(moved) = group_act(&g, x1) else { continue };
        let residual = moved.distance(x2);
        if residual < best.residual {
            best = IsoReport { isomorphic: residual <= tol, witness: Some(g), residual, hom_dim: basis.len(), condition: cond };
            if best.isomorphic {
                break;
            }
        }
    }
    if !best.isomorphic {
        best.witness = None;
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeckeOptions {
    /// Relative residual allowed for the pinned linear system.
    pub solve_tol: f64,
    /// Relative threshold for the homogeneous solution space.
    pub null_tol: f64,
    /// Injectivity threshold on singular values, relative to the largest.
    pub inj_tol: f64,
    pub trials: usize,
}

impl Default for HeckeOptions {
    fn default() -> Self {
        HeckeOptions { solve_tol: 1e-8, null_tol: 1e-9, inj_tol: 1e-9, trials: 16 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeckeReport {
    pub member: bool,
    pub xi: Option<Intertwiner>,
    /// Defect of the intertwining relation for the returned map.
    pub residual: f64,
    /// Smallest over largest singular value of the returned map.
    pub injectivity: f64,
    /// Dimension of the affine solution space.
    pub solution_dim: usize,
    pub diagnostic: Option<String>,
}

fn check_hecke_dims(x1: &Representation, x2: &Representation, k: usize) -> Result<usize, CorrespondenceError> {
    if !same_quiver(x1, x2) {
        return Err(CorrespondenceError::DimensionMismatch("representations of different quivers".into()));
    }
    let inf = x1
        .quiver
        .infinity()
        .ok_or_else(|| CorrespondenceError::DimensionMismatch("quiver has no infinity vertex".into()))?;
    if k >= x1.dims.len() || k == inf {
        return Err(CorrespondenceError::DimensionMismatch(format!("vertex {k} is not an ordinary vertex")));
    }
    if x1.dims.0[inf] != 1 || x2.dims.0[inf] != 1 {
        return Err(CorrespondenceError::DimensionMismatch("dimension at infinity must be 1".into()));
    }
    let expected = x1.dims.add(&DimVector::unit(x1.dims.len(), k));
    if expected != x2.dims {
        return Err(CorrespondenceError::DimensionMismatch(format!(
            "second dimension vector {} is not the first {} plus a unit at vertex {k}",
            x2.dims, x1.dims
        )));
    }
    Ok(inf)
}

/// Decides whether some intertwiner `ξ : x1 → x2` with `ξ_∞ = 1` and all
/// blocks injective exists, for `dims(x2) = dims(x1) + e_k` on a loop-free quiver.
pub fn hecke_check(
    x1: &Representation,
    x2: &Representation,
    k: usize,
    seed: u64,
    opts: &HeckeOptions,
) -> Result<HeckeReport, CorrespondenceError> {
    if !x1.quiver.loop_free() {
        return Err(CorrespondenceError::HasLoops);
    }
    check_hecke_dims(x1, x2, k)?;
    Ok(solve_pinned_injective(x1, x2, seed, opts))
}

/// Solves `ξ x1 = x2 ξ` with `ξ_∞ = 1` pinned as an affine constraint, then
/// searches the solution space for an injective member. No loop check.
pub(crate) fn solve_pinned_injective(
    x1: &Representation,
    x2: &Representation,
    seed: u64,
    opts: &HeckeOptions,
) -> HeckeReport {
    let inf = x1.quiver.infinity().expect("checked by caller");
    let ushapes = unknown_shapes(x1, x2);
    let m = intertwiner_operator(x1, x2);
    let pin: usize = ushapes[..inf].iter().map(|(r, cc)| r * cc).sum();
    let keep: Vec<usize> = (0..m.ncols()).filter(|&j| j != pin).collect();
    let rest = m.select_columns(&keep);
    let rhs: DVector<C64> = -m.column(pin).into_owned();
    let scale = scale_of(x1, x2);
    let null_abs = opts.null_tol * scale;
    let particular = linalg::lstsq(&rest, &rhs, null_abs);
    let fit = (&rest * &particular - &rhs).norm();
    let assemble = |coords: &DVector<C64>| {
        let mut full = Vec::with_capacity(m.ncols());
        let mut it = coords.iter();
        for j in 0..m.ncols() {
            full.push(if j == pin { c(1.0, 0.0) } else { *it.next().expect("coordinate") });
        }
        Intertwiner { blocks: linalg::unflatten_c(&full, &ushapes), normalized: true }
    };
    let homogeneous = linalg::nullspace(&rest, null_abs);
    let solution_dim = homogeneous.ncols();
    let candidate = assemble(&particular);
    if fit > opts.solve_tol * scale * (1.0 + particular.norm()) {
        return HeckeReport {
            member: false,
            xi: None,
            residual: fit,
            injectivity: 0.0,
            solution_dim: 0,
            diagnostic: Some("no intertwiner with the infinity block equal to 1".into()),
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = candidate;
    let mut best_inj = best.injectivity_ratio();
    for _ in 0..opts.trials {
        if best_inj > opts.inj_tol || solution_dim == 0 {
            break;
        }
        let coeffs = DVector::from_fn(solution_dim, |_, _| linalg::gaussian(&mut rng));
        let trial = assemble(&(&particular + &homogeneous * coeffs));
        let inj = trial.injectivity_ratio();
        if inj > best_inj {
            best = trial;
            best_inj = inj;
        }
    }
    let residual = best.residual(x1, x2);
    let member = best_inj > opts.inj_tol;
    HeckeReport {
        member,
        diagnostic: (!member).then(|| format!("intertwiners exist but none is injective (best ratio {best_inj:e})")),
        xi: Some(best),
        residual,
        injectivity: best_inj,
        solution_dim,
    }
}

/// Two critical points joined by a displacement in the negative slice of
/// the first: `g·((x1 ⊕ 0) + delta) = x2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowLinePair {
    pub x1: Representation,
    pub x2: Representation,
    /// Tangent vector at `x1 ⊕ 0` in the ambient dimension `dims(x2)`.
    pub delta: TangentVector,
    pub g: GroupElement,
    /// `‖g·((x1 ⊕ 0) + delta) − x2‖`.
    pub residual: f64,
    /// Largest of `‖(ρ^C)* delta‖` and `‖dμ_C(delta)‖`.
    pub slice_defect: f64,
}

/// `x1 ⊕ 0` in the dimension vector `dims`.
pub fn embed(x1: &Representation, dims: &DimVector) -> Result<Representation, CorrespondenceError> {
    let extra = dims
        .checked_sub(&x1.dims)
        .ok_or_else(|| CorrespondenceError::DimensionMismatch(format!("{} does not fit in {}", x1.dims, dims)))?;
    Ok(pad(x1, &extra))
}

/// Defect of `delta` as an element of the slice at `x`.
pub fn slice_defect(x: &Representation, delta: &[CMat]) -> f64 {
    let adj = inf_action_adjoint(x, delta, Flavor::Full).norm();
    let dmu = d_moment_complex(x, delta).map(|m| m.norm()).unwrap_or(0.0);
    adj.max(dmu)
}

/// Builds a flow-line pair from an injective intertwiner. The extra
/// coordinate at vertex `k` is placed last.
pub fn hecke_to_flowline(
    x1: &Representation,
    x2: &Representation,
    xi: &Intertwiner,
    k: usize,
) -> Result<FlowLinePair, CorrespondenceError> {
    if !x1.quiver.loop_free() {
        return Err(CorrespondenceError::HasLoops);
    }
    check_hecke_dims(x1, x2, k)?;
    let n = x1.dims.len();
    let xk = &xi.blocks[k];
    let comp = linalg::orthogonal_complement(xk, 1e-9 * frob(xk).max(1e-300));
    if comp.ncols() != 1 || linalg::rank(xk, 1e-9) != xk.ncols() {
        return Err(CorrespondenceError::NotInjective(format!("block at vertex {k}")));
    }
    let cvec = comp.column(0).into_owned();
    let mut inverses: Vec<Option<CMat>> = vec![None; n];
    for v in (0..n).filter(|&v| v != k) {
        let b = &xi.blocks[v];
        if b.nrows() == 0 {
            inverses[v] = Some(b.clone());
            continue;
        }
        let cond = linalg::condition_number(b);
        if !(cond < 1e12) {
            return Err(CorrespondenceError::NotInjective(format!("block at vertex {v} (condition {cond:e})")));
        }
        inverses[v] = b.clone().try_inverse();
    }
    let ambient = embed(x1, &x2.dims)?;
    let d1k = x1.dims.0[k];
    // Columns ξ_h⁻¹ x2_a c for edges leaving k, then the least-squares
    // correction v removing the component along x1_a v.
    let leaving: Vec<usize> = (0..x1.quiver.num_edges()).filter(|&a| x1.quiver.edges()[a].tail == k).collect();
    let raw: Vec<DVector<C64>> = leaving
        .iter()
        .map(|&a| {
            let h = x1.quiver.edges()[a].head;
            inverses[h].as_ref().expect("inverse") * (&x2.mats[a] * &cvec)
        })
        .collect();
    let rows: usize = leaving.iter().map(|&a| x1.mats[a].nrows()).sum();
    let mut stacked = CMat::zeros(rows, d1k);
    let mut rhs = DVector::zeros(rows);
    let mut r0 = 0;
    for (i, &a) in leaving.iter().enumerate() {
        let m = &x1.mats[a];
        stacked.view_mut((r0, 0), m.shape()).copy_from(m);
        rhs.rows_mut(r0, m.nrows()).copy_from(&raw[i]);
        r0 += m.nrows();
    }
    let v = linalg::lstsq(&stacked, &rhs, 1e-12 * frob(&stacked).max(1.0));
    let mut delta: Vec<CMat> = ambient.shapes().iter().map(|&(r, cc)| CMat::zeros(r, cc)).collect();
    for (i, &a) in leaving.iter().enumerate() {
        let col = &raw[i] - &x1.mats[a] * &v;
        let last = delta[a].ncols() - 1;
        delta[a].set_column(last, &col);
    }
    let mut blocks = xi.blocks.clone();
    let mut gk = CMat::zeros(d1k + 1, d1k + 1);
    gk.view_mut((0, 0), (d1k + 1, d1k)).copy_from(xk);
    gk.set_column(d1k, &(&cvec - xk * &v));
    blocks[k] = gk;
    let g = GroupElement { blocks };
    let start = ambient.displaced(&delta, 1.0);
    let residual = group_act(&g, &start)?.distance(x2);
    let slice_defect = slice_defect(&ambient, &delta);
    Ok(FlowLinePair { x1: x1.clone(), x2: x2.clone(), delta, g, residual, slice_defect })
}

/// Restricts the gauge element of a flow-line pair to the leading
/// `dims(x1)` coordinates and normalizes the infinity block to `1`.
pub fn flowline_to_hecke(pair: &FlowLinePair, k: usize) -> Result<Intertwiner, CorrespondenceError> {
    check_hecke_dims(&pair.x1, &pair.x2, k)?;
    let inf = pair.x1.quiver.infinity().expect("checked");
    let restricted: Vec<CMat> =
        pair.g.blocks.iter().zip(&pair.x1.dims.0).map(|(b, &d)| b.columns(0, d).into_owned()).collect();
    let scale = restricted[inf][(0, 0)];
    let size = frob_all(&restricted);
    if scale.norm() < 1e-12 || size < 1e-12 {
        return Err(CorrespondenceError::Degenerate(scale.norm().min(size)));
    }
    Ok(Intertwiner { blocks: restricted.into_iter().map(|b| b / scale).collect(), normalized: true })
}

/// Flow settings for limits known to have zero energy, where convergence can
/// be algebraic rather than exponential: steps are error-controlled and may
/// grow without practical bound, and the run stops on energy.
pub fn zero_energy_flow_options(x: &Representation) -> FlowOptions {
    let s = 1.0 + x.norm() * x.norm();
    FlowOptions {
        dt_init: 1e25,
        dt_min: 1e-12,
        grad_tol: f64::MIN_POSITIVE,
        energy_tol: 1e-28 * s * s,
        max_time: 1e30,
        max_steps: 200_000,
        drift_tol: 1.0,
        sample_stride: 1,
        constraint: Constraint::None,
        step_tol: 1e-10,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub limit: Representation,
    pub flow: FlowResult,
}

/// Limit of the flow with the zero parameter.
pub fn affine_project(x: &Representation) -> Result<Projection, CorrespondenceError> {
    let opts = zero_energy_flow_options(x);
    let alpha = vec![0.0; x.dims.len()];
    let flow = flow_f64(x, &alpha, &opts)?;
    // A roundoff floor above `energy_tol` lets the time budget run out at a
    // stationary state; accept it when the energy is negligible.
    let ok = flow.converged() || (flow.status == FlowStatus::MaxTime && flow.final_energy < 1e-20 * (1.0 + x.norm()).powi(4));
    if !ok {
        return Err(CorrespondenceError::NotConverged(format!(
            "affine projection stopped with status {:?} at energy {:e}",
            flow.status, flow.final_energy
        )));
    }
    Ok(Projection { limit: flow.limit.clone(), flow })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianReport {
    pub member: bool,
    pub projection1: Representation,
    pub projection2: Representation,
    pub iso: IsoReport,
}

/// Compares the affine projections of `x1` and `x2` after zero-padding both
/// into `dims(x1) + dims(x2)`, with the `x1` block first.
pub fn lagrangian_check(
    x1: &Representation,
    x2: &Representation,
    seed: u64,
) -> Result<LagrangianReport, CorrespondenceError> {
    if !same_quiver(x1, x2) {
        return Err(CorrespondenceError::DimensionMismatch("representations of different quivers".into()));
    }
    let p1 = affine_project(x1)?.limit;
    let p2 = affine_project(x2)?.limit;
    let left = pad(&p1, &x2.dims);
    let right = direct_sum(&Representation::zero(x1.quiver.clone(), x1.dims.clone()), &p2);
    let iso = is_isomorphic(&left, &right, seed, &IsoOptions::flow_limits())?;
    Ok(LagrangianReport { member: iso.isomorphic, projection1: p1, projection2: p2, iso })
}
