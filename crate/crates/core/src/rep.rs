//! Representations as edge-indexed complex matrices, the gauge actions on
//! them, the real and complex moment maps, and the energy `½‖μ_I − α‖²`
//! with its gradient and Hessian.
//!
//! Conventions: the metric on tangent vectors and on the Lie algebra is
//! `Re Tr(X Y*)`; the central element of a weight vector `α` is `i α_j · id`.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::error::RepError;
use crate::linalg::{self, c, frob2, frob_all, CMat, C64, I};
use crate::quiver::{reverse_quiver, DimVector, Quiver};

/// One complex matrix per edge, of shape `dims[head] × dims[tail]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    pub quiver: Arc<Quiver>,
    pub dims: DimVector,
    pub mats: Vec<CMat>,
}

/// Tangent vectors share the shape family of [`Representation::mats`].
pub type TangentVector = Vec<CMat>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// Anti-Hermitian blocks.
    Compact,
    /// Arbitrary blocks.
    Full,
}

/// Per-vertex square matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct LieElement {
    pub blocks: Vec<CMat>,
    pub flavor: Flavor,
}

/// Per-vertex invertible matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub blocks: Vec<CMat>,
}

pub fn edge_shapes(q: &Quiver, dims: &DimVector) -> Vec<(usize, usize)> {
    q.edges().iter().map(|e| (dims.0[e.head], dims.0[e.tail])).collect()
}

impl Representation {
    pub fn new(quiver: Arc<Quiver>, dims: DimVector, mats: Vec<CMat>) -> Result<Representation, RepError> {
        if dims.len() != quiver.num_vertices() {
            return Err(RepError::Shape(format!(
                "dimension vector has {} entries for {} vertices",
                dims.len(),
                quiver.num_vertices()
            )));
        }
        if mats.len() != quiver.num_edges() {
            return Err(RepError::Shape(format!("{} matrices for {} edges", mats.len(), quiver.num_edges())));
        }
        for (i, (m, s)) in mats.iter().zip(edge_shapes(&quiver, &dims)).enumerate() {
            if m.shape() != s {
                return Err(RepError::Shape(format!("edge {i}: matrix {:?}, expected {:?}", m.shape(), s)));
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(RepError::NonFinite(format!("edge {i}")));
            }
        }
        Ok(Representation { quiver, dims, mats })
    }

    pub fn zero(quiver: Arc<Quiver>, dims: DimVector) -> Representation {
        let mats = linalg::zeros_like(&edge_shapes(&quiver, &dims));
        Representation { quiver, dims, mats }
    }

    /// Independent standard complex Gaussian entries.
    pub fn random<R: Rng + ?Sized>(quiver: Arc<Quiver>, dims: DimVector, rng: &mut R) -> Representation {
        let mats = edge_shapes(&quiver, &dims).iter().map(|&(r, cc)| linalg::gaussian_cmat(rng, r, cc)).collect();
        Representation { quiver, dims, mats }
    }

    pub fn shapes(&self) -> Vec<(usize, usize)> {
        edge_shapes(&self.quiver, &self.dims)
    }

    pub fn vertex_dims(&self) -> &[usize] {
        &self.dims.0
    }

    pub fn with_mats(&self, mats: Vec<CMat>) -> Representation {
        Representation { quiver: self.quiver.clone(), dims: self.dims.clone(), mats }
    }

    /// `x + t X`.
    pub fn displaced(&self, dir: &[CMat], t: f64) -> Representation {
        self.with_mats(self.mats.iter().zip(dir).map(|(m, d)| m + d.scale(t)).collect())
    }

    pub fn norm(&self) -> f64 {
        frob_all(&self.mats)
    }

    pub fn distance(&self, other: &Representation) -> f64 {
        self.mats.iter().zip(&other.mats).fold(0.0, |s, (a, b)| s + frob2(&(a - b))).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.mats.iter().all(|m| m.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    pub fn scaled(&self, s: f64) -> Representation {
        self.with_mats(self.mats.iter().map(|m| m.scale(s)).collect())
    }
}

impl LieElement {
    pub fn zero(dims: &DimVector, flavor: Flavor) -> LieElement {
        LieElement { blocks: dims.0.iter().map(|&d| CMat::zeros(d, d)).collect(), flavor }
    }

    pub fn norm(&self) -> f64 {
        frob_all(&self.blocks)
    }

    pub fn sub(&self, other: &LieElement) -> LieElement {
        LieElement { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a - b).collect(), flavor: self.flavor }
    }

    pub fn scale(&self, s: C64) -> LieElement {
        LieElement { blocks: self.blocks.iter().map(|b| b * s).collect(), flavor: self.flavor }
    }

    /// Sum of all block traces.
    pub fn trace(&self) -> C64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    /// Largest Frobenius norm of `u_i + u_i*` over the blocks.
    pub fn hermitian_defect(&self) -> f64 {
        self.blocks.iter().map(|b| linalg::frob(&(b + b.adjoint()))).fold(0.0, f64::max)
    }

    pub fn dims(&self) -> DimVector {
        DimVector(self.blocks.iter().map(|b| b.nrows()).collect())
    }
}

/// Blockwise commutator `[u, v]`.
pub fn bracket(u: &LieElement, v: &LieElement) -> LieElement {
    LieElement {
        blocks: u.blocks.iter().zip(&v.blocks).map(|(a, b)| a * b - b * a).collect(),
        flavor: if u.flavor == v.flavor { u.flavor } else { Flavor::Full },
    }
}

/// `(u − u*) / 2` in every block.
pub fn anti_hermitian_part(u: &LieElement) -> LieElement {
    LieElement {
        blocks: u.blocks.iter().map(|b| (b - b.adjoint()).scale(0.5)).collect(),
        flavor: Flavor::Compact,
    }
}

pub fn lie_inner(u: &LieElement, v: &LieElement) -> f64 {
    linalg::re_inner_all(&u.blocks, &v.blocks)
}

pub fn tangent_inner(x: &[CMat], y: &[CMat]) -> f64 {
    linalg::re_inner_all(x, y)
}

impl GroupElement {
    pub fn identity(dims: &DimVector) -> GroupElement {
        GroupElement { blocks: dims.0.iter().map(|&d| CMat::identity(d, d)).collect() }
    }

    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement { blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect() }
    }

    pub fn inverse(&self) -> Result<GroupElement, RepError> {
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(v, b)| invert_block(b, v))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GroupElement { blocks })
    }

    /// Largest singular value over the smallest, taken across all blocks
    /// together, so relative scalings between vertices count as well.
    pub fn condition_number(&self) -> f64 {
        let s: Vec<f64> = self.blocks.iter().flat_map(linalg::singular_values).collect();
        if s.is_empty() {
            return 1.0;
        }
        let max = s.iter().cloned().fold(0.0, f64::max);
        let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// Largest `‖g*g − 1‖` over the blocks.
    pub fn unitarity_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| linalg::frob(&(b.adjoint() * b - CMat::identity(b.ncols(), b.ncols()))))
            .fold(0.0, f64::max)
    }

    pub fn exp(u: &LieElement) -> GroupElement {
        GroupElement { blocks: u.blocks.iter().map(linalg::matrix_exp).collect() }
    }
}

fn invert_block(b: &CMat, vertex: usize) -> Result<CMat, RepError> {
    if b.nrows() != b.ncols() {
        return Err(RepError::Shape(format!("group block {vertex} is not square")));
    }
    if b.nrows() == 0 {
        return Ok(b.clone());
    }
    let cond = linalg::condition_number(b);
    if !cond.is_finite() || cond > 1e14 {
        return Err(RepError::Singular { vertex, cond });
    }
    b.clone().try_inverse().ok_or(RepError::Singular { vertex, cond })
}

fn check_group(g: &GroupElement, x: &Representation) -> Result<(), RepError> {
    if g.blocks.len() != x.dims.len() || g.blocks.iter().zip(&x.dims.0).any(|(b, &d)| b.shape() != (d, d)) {
        return Err(RepError::Shape("group element does not match the dimension vector".into()));
    }
    Ok(())
}

/// `(g·x)_a = g_h x_a g_t⁻¹`.
pub fn group_act(g: &GroupElement, x: &Representation) -> Result<Representation, RepError> {
    check_group(g, x)?;
    let inv = g.inverse()?;
    let mats = x
        .quiver
        .edges()
        .iter()
        .zip(&x.mats)
        .map(|(e, m)| &g.blocks[e.head] * m * &inv.blocks[e.tail])
        .collect();
    Ok(x.with_mats(mats))
}

/// `ρ_x(u)_a = u_h x_a − x_a u_t`.
pub fn inf_action(x: &Representation, u: &[CMat]) -> TangentVector {
    x.quiver.edges().iter().zip(&x.mats).map(|(e, m)| &u[e.head] * m - m * &u[e.tail]).collect()
}

/// The same formula with the roles swapped: `u_h X_a − X_a u_t` for a
/// tangent vector `X`.
pub fn delta_rho(q: &Quiver, u: &[CMat], dir: &[CMat]) -> TangentVector {
    q.edges().iter().zip(dir).map(|(e, m)| &u[e.head] * m - m * &u[e.tail]).collect()
}

/// Adjoint of [`inf_action`] for the `Re Tr` pairing:
/// `(ρ*X)_i = Σ_{h(a)=i} X_a x_a* − Σ_{t(a)=i} x_a* X_a`,
/// projected to anti-Hermitian blocks for the compact flavor.
pub fn inf_action_adjoint(x: &Representation, dir: &[CMat], flavor: Flavor) -> LieElement {
    let mut blocks: Vec<CMat> = x.dims.0.iter().map(|&d| CMat::zeros(d, d)).collect();
    for ((e, m), d) in x.quiver.edges().iter().zip(&x.mats).zip(dir) {
        blocks[e.head] += d * m.adjoint();
        blocks[e.tail] -= m.adjoint() * d;
    }
    let u = LieElement { blocks, flavor: Flavor::Full };
    match flavor {
        Flavor::Full => u,
        Flavor::Compact => anti_hermitian_part(&u),
    }
}

/// `μ_I(x) = (1/2i) Σ_a [x_a, x_a*]`: the head of `a` receives `x_a x_a*`,
/// the tail receives `−x_a* x_a`.
pub fn moment_real(x: &Representation) -> LieElement {
    let mut blocks: Vec<CMat> = x.dims.0.iter().map(|&d| CMat::zeros(d, d)).collect();
    for (e, m) in x.quiver.edges().iter().zip(&x.mats) {
        blocks[e.head] += m * m.adjoint();
        blocks[e.tail] -= m.adjoint() * m;
    }
    let half_over_i = c(0.0, -0.5);
    LieElement { blocks: blocks.into_iter().map(|b| b * half_over_i).collect(), flavor: Flavor::Compact }
}

/// Derivative of [`moment_real`] along `X`.
pub fn d_moment_real(x: &Representation, dir: &[CMat]) -> LieElement {
    let mut blocks: Vec<CMat> = x.dims.0.iter().map(|&d| CMat::zeros(d, d)).collect();
    for ((e, m), d) in x.quiver.edges().iter().zip(&x.mats).zip(dir) {
        blocks[e.head] += d * m.adjoint() + m * d.adjoint();
        blocks[e.tail] -= d.adjoint() * m + m.adjoint() * d;
    }
    let half_over_i = c(0.0, -0.5);
    LieElement { blocks: blocks.into_iter().map(|b| b * half_over_i).collect(), flavor: Flavor::Compact }
}

/// `μ_C = Σ [A_a, B_ā]` over doubled pairs: `A B` at the head of `a`,
/// `−B A` at its tail.
pub fn moment_complex(x: &Representation) -> Result<LieElement, RepError> {
    let pairs = x.quiver.pairs().ok_or(RepError::Unpaired)?;
    let mut blocks: Vec<CMat> = x.dims.0.iter().map(|&d| CMat::zeros(d, d)).collect();
    for &(a, r) in pairs {
        let e = &x.quiver.edges()[a];
        let (am, bm) = (&x.mats[a], &x.mats[r]);
        blocks[e.head] += am * bm;
        blocks[e.tail] -= bm * am;
    }
    Ok(LieElement { blocks, flavor: Flavor::Full })
}

/// `dμ_C(X) = Σ [X_a, B_ā] + [A_a, X_ā]`.
pub fn d_moment_complex(x: &Representation, dir: &[CMat]) -> Result<LieElement, RepError> {
    let pairs = x.quiver.pairs().ok_or(RepError::Unpaired)?;
    let mut blocks: Vec<CMat> = x.dims.0.iter().map(|&d| CMat::zeros(d, d)).collect();
    for &(a, r) in pairs {
        let e = &x.quiver.edges()[a];
        let (am, bm) = (&x.mats[a], &x.mats[r]);
        let (da, db) = (&dir[a], &dir[r]);
        blocks[e.head] += da * bm + am * db;
        blocks[e.tail] -= bm * da + db * am;
    }
    Ok(LieElement { blocks, flavor: Flavor::Full })
}

/// `i α_j · id` at every vertex.
pub fn central_element(alpha: &[f64], dims: &DimVector) -> LieElement {
    LieElement {
        blocks: alpha.iter().zip(&dims.0).map(|(&a, &d)| CMat::identity(d, d) * c(0.0, a)).collect(),
        flavor: Flavor::Compact,
    }
}

/// `μ_I(x) − α` as a compact element.
pub fn moment_residual(x: &Representation, alpha: &[f64]) -> LieElement {
    moment_real(x).sub(&central_element(alpha, &x.dims))
}

/// `½‖μ_I(x) − α‖²`.
pub fn energy(x: &Representation, alpha: &[f64]) -> f64 {
    let w = moment_residual(x, alpha);
    0.5 * linalg::frob2_all(&w.blocks)
}

/// `I ρ_x(μ_I(x) − α)`.
pub fn grad_energy(x: &Representation, alpha: &[f64]) -> TangentVector {
    let w = moment_residual(x, alpha);
    inf_action(x, &w.blocks).into_iter().map(|m| m * I).collect()
}

/// Energy and gradient sharing one moment-map evaluation.
pub fn energy_and_grad(x: &Representation, alpha: &[f64]) -> (f64, TangentVector) {
    let w = moment_residual(x, alpha);
    let f = 0.5 * linalg::frob2_all(&w.blocks);
    let g = inf_action(x, &w.blocks).into_iter().map(|m| m * I).collect();
    (f, g)
}

/// `H(X) = I δρ_x(μ−α)(X) − I ρ_x ρ_x* (I X)`.
pub fn hessian_apply(x: &Representation, alpha: &[f64], dir: &[CMat]) -> TangentVector {
    let w = moment_residual(x, alpha);
    hessian_apply_with(x, &w, dir)
}

fn hessian_apply_with(x: &Representation, w: &LieElement, dir: &[CMat]) -> TangentVector {
    let first = delta_rho(&x.quiver, &w.blocks, dir);
    let idir: Vec<CMat> = dir.iter().map(|m| m * I).collect();
    let adj = inf_action_adjoint(x, &idir, Flavor::Compact);
    let second = inf_action(x, &adj.blocks);
    first.iter().zip(&second).map(|(a, b)| (a - b) * I).collect()
}

/// The Hessian as a real matrix on interleaved real coordinates.
pub fn hessian_matrix(x: &Representation, alpha: &[f64]) -> DMatrix<f64> {
    let w = moment_residual(x, alpha);
    let shapes = x.shapes();
    let n = 2 * linalg::complex_len(&shapes);
    let mut h = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let dir = linalg::unflatten_r(&e, &shapes);
        let col = linalg::flatten_r(&hessian_apply_with(x, &w, &dir));
        h.set_column(j, &col);
        e[j] = 0.0;
    }
    h
}

/// `ω_C(X, Y) = Σ Tr(A_Y B_X − B_Y A_X)` over doubled pairs.
pub fn holomorphic_symplectic_pairing(q: &Quiver, x_dir: &[CMat], y_dir: &[CMat]) -> Result<C64, RepError> {
    let pairs = q.pairs().ok_or(RepError::Unpaired)?;
    let mut total = c(0.0, 0.0);
    for &(a, r) in pairs {
        total += (&y_dir[a] * &x_dir[r]).trace() - (&y_dir[r] * &x_dir[a]).trace();
    }
    Ok(total)
}

/// Block-diagonal direct sum, `x` occupying the leading coordinates.
pub fn direct_sum(x: &Representation, y: &Representation) -> Representation {
    let dims = x.dims.add(&y.dims);
    let mats = x
        .quiver
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let (xr, xc) = (x.dims.0[e.head], x.dims.0[e.tail]);
            let mut m = CMat::zeros(dims.0[e.head], dims.0[e.tail]);
            m.view_mut((0, 0), (xr, xc)).copy_from(&x.mats[i]);
            m.view_mut((xr, xc), y.mats[i].shape()).copy_from(&y.mats[i]);
            m
        })
        .collect();
    Representation { quiver: x.quiver.clone(), dims, mats }
}

/// `x ⊕ 0` with the zero summand of dimension `extra`.
pub fn pad(x: &Representation, extra: &DimVector) -> Representation {
    direct_sum(x, &Representation::zero(x.quiver.clone(), extra.clone()))
}

/// Transport to the reversed quiver by taking adjoints of every matrix.
pub fn adjoint_rep(x: &Representation) -> Representation {
    Representation {
        quiver: Arc::new(reverse_quiver(&x.quiver)),
        dims: x.dims.clone(),
        mats: x.mats.iter().map(|m| m.adjoint()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar(z: C64) -> CMat {
        CMat::from_element(1, 1, z)
    }

    #[test]
    fn group_action_on_f1() {
        let x = fixtures::f1_rep(c(0.0, 0.0), c(1.0, 0.0));
        let id = GroupElement::identity(&x.dims);
        assert_eq!(group_act(&id, &x).unwrap(), x);
        let g = GroupElement { blocks: vec![scalar(c(1.0, 0.0)), scalar(c(2.0, 0.0))] };
        let y = group_act(&g, &x).unwrap();
        assert!((y.mats[1][(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        let sing = GroupElement { blocks: vec![scalar(c(1.0, 0.0)), scalar(c(0.0, 0.0))] };
        assert!(matches!(group_act(&sing, &x), Err(RepError::Singular { .. })));
    }

    #[test]
    fn group_action_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = fixtures::random_doubled(&mut rng, 3, 3);
        let mk = |rng: &mut ChaCha8Rng| GroupElement {
            blocks: x.dims.0.iter().map(|&d| linalg::gaussian_cmat(rng, d, d) + CMat::identity(d, d) * c(3.0, 0.0)).collect(),
        };
        let (g, h) = (mk(&mut rng), mk(&mut rng));
        let lhs = group_act(&g.compose(&h), &x).unwrap();
        let rhs = group_act(&g, &group_act(&h, &x).unwrap()).unwrap();
        assert!(lhs.distance(&rhs) < 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn infinitesimal_action_examples() {
        let x = fixtures::a2_rep(c(1.0, 0.0));
        let u = vec![scalar(c(0.0, 1.0)), scalar(c(0.0, 0.0))];
        let r = inf_action(&x, &u);
        assert!((r[0][(0, 0)] - c(0.0, -1.0)).norm() < 1e-15);
        let z = Representation::zero(x.quiver.clone(), x.dims.clone());
        assert!(frob_all(&inf_action(&z, &u)) == 0.0);
        let zero_u = LieElement::zero(&x.dims, Flavor::Compact);
        assert!(frob_all(&inf_action(&x, &zero_u.blocks)) == 0.0);
        let dir = vec![scalar(c(0.3, 0.2))];
        assert_eq!(inf_action_adjoint(&z, &dir, Flavor::Full).norm(), 0.0);
    }

    #[test]
    fn adjoint_pairing_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let x = fixtures::random_doubled(&mut rng, 3, 3);
            let dir: Vec<CMat> = x.shapes().iter().map(|&(r, cc)| linalg::gaussian_cmat(&mut rng, r, cc)).collect();
            let u_full: Vec<CMat> = x.dims.0.iter().map(|&d| linalg::gaussian_cmat(&mut rng, d, d)).collect();
            let u = anti_hermitian_part(&LieElement { blocks: u_full.clone(), flavor: Flavor::Full });
            let lhs = tangent_inner(&inf_action(&x, &u.blocks), &dir);
            let rhs = lie_inner(&u, &inf_action_adjoint(&x, &dir, Flavor::Compact));
            assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
            let lhs = tangent_inner(&inf_action(&x, &u_full), &dir);
            let rhs = linalg::re_inner_all(&u_full, &inf_action_adjoint(&x, &dir, Flavor::Full).blocks);
            assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
            assert!(inf_action_adjoint(&x, &dir, Flavor::Compact).hermitian_defect() < 1e-12);
            assert!(inf_action_adjoint(&x, &dir, Flavor::Full).norm() > 0.0);
        }
    }

    #[test]
    fn real_moment_map_examples() {
        let a2 = fixtures::a2_rep(c(1.0, 0.0));
        let mu = moment_real(&a2);
        assert!((mu.blocks[0][(0, 0)] - c(0.0, 0.5)).norm() < 1e-15);
        assert!((mu.blocks[1][(0, 0)] - c(0.0, -0.5)).norm() < 1e-15);

        let jordan = Quiver::new(&["1"], &[("1", "1", "l")], None).unwrap();
        let m = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let x = Representation::new(Arc::new(jordan), DimVector(vec![2]), vec![m]).unwrap();
        let mu = moment_real(&x);
        let expected = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]) * c(0.0, -0.5);
        assert!(linalg::frob(&(&mu.blocks[0] - expected)) < 1e-15);

        let z = Representation::zero(a2.quiver.clone(), a2.dims.clone());
        assert_eq!(moment_real(&z).norm(), 0.0);
    }

    #[test]
    fn complex_moment_map_examples() {
        let x = fixtures::f1_rep(c(1.0, 0.0), c(1.0, 0.0));
        let mu = moment_complex(&x).unwrap();
        assert!((mu.blocks[1][(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((mu.blocks[0][(0, 0)] - c(-1.0, 0.0)).norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let y = fixtures::random_doubled(&mut rng, 3, 3);
        let mut a_only = y.clone();
        for &(_, r) in y.quiver.pairs().unwrap() {
            a_only.mats[r].fill(c(0.0, 0.0));
        }
        assert_eq!(moment_complex(&a_only).unwrap().norm(), 0.0);
        let t = 1.7;
        let lhs = moment_complex(&y.scaled(t)).unwrap();
        let rhs = moment_complex(&y).unwrap().scale(c(t * t, 0.0));
        assert!(lhs.sub(&rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        assert!(moment_complex(&fixtures::a2_rep(c(1.0, 0.0))).is_err());
    }

    #[test]
    fn complex_moment_derivative_matches_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = fixtures::f1_rep(linalg::gaussian(&mut rng), linalg::gaussian(&mut rng));
        let dir: Vec<CMat> = x.shapes().iter().map(|&(r, cc)| linalg::gaussian_cmat(&mut rng, r, cc)).collect();
        let h = 1e-4;
        let plus = moment_complex(&x.displaced(&dir, h)).unwrap();
        let minus = moment_complex(&x.displaced(&dir, -h)).unwrap();
        let fd = plus.sub(&minus).scale(c(0.5 / h, 0.0));
        let an = d_moment_complex(&x, &dir).unwrap();
        assert!(fd.sub(&an).norm() < 1e-7);
        let z = Representation::zero(x.quiver.clone(), x.dims.clone());
        assert_eq!(d_moment_complex(&z, &dir).unwrap().norm(), 0.0);
    }

    #[test]
    fn energy_examples() {
        let a = fixtures::a2_alpha();
        assert!(energy(&fixtures::a2_rep(c(2f64.sqrt(), 0.0)), &a).abs() < 1e-15);
        assert!((energy(&fixtures::a2_rep(c(1.0, 0.0)), &a) - 0.25).abs() < 1e-15);
        let z = fixtures::f1_rep(c(0.0, 0.0), c(0.0, 0.0));
        assert!((energy(&z, &fixtures::f1_alpha()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gradient_closed_form_on_a2() {
        for a in [0.3, 1.0, 2.0] {
            let g = grad_energy(&fixtures::a2_rep(c(a, 0.0)), &fixtures::a2_alpha());
            let expected = 2.0 * a * (a * a / 2.0 - 1.0);
            assert!((g[0][(0, 0)] - c(expected, 0.0)).norm() < 1e-14);
        }
        let g = grad_energy(&fixtures::f1_rep(c(0.0, 0.0), c(0.7, 0.4)), &fixtures::f1_alpha());
        assert_eq!(g[0][(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn hessian_at_origin() {
        let z = fixtures::a2_rep(c(0.0, 0.0));
        let h = hessian_matrix(&z, &fixtures::a2_alpha());
        assert!((h + DMatrix::identity(2, 2) * 2.0).norm() < 1e-14);
        let z = fixtures::f1_rep(c(0.0, 0.0), c(0.0, 0.0));
        let h = hessian_matrix(&z, &fixtures::f1_alpha());
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 2.0, -2.0, -2.0]));
        assert!((h - expected).norm() < 1e-14);
    }

    #[test]
    fn symplectic_pairing_examples() {
        let x = fixtures::f1_rep(c(0.0, 0.0), c(0.0, 0.0));
        let xv = vec![scalar(c(1.0, 0.0)), scalar(c(0.0, 0.0))];
        let yv = vec![scalar(c(0.0, 0.0)), scalar(c(1.0, 0.0))];
        let w = holomorphic_symplectic_pairing(&x.quiver, &xv, &yv).unwrap();
        assert!((w - c(-1.0, 0.0)).norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let y = fixtures::random_doubled(&mut rng, 3, 2);
        let d: Vec<CMat> = y.shapes().iter().map(|&(r, cc)| linalg::gaussian_cmat(&mut rng, r, cc)).collect();
        let e: Vec<CMat> = y.shapes().iter().map(|&(r, cc)| linalg::gaussian_cmat(&mut rng, r, cc)).collect();
        assert!(holomorphic_symplectic_pairing(&y.quiver, &d, &d).unwrap().norm() < 1e-12);
        let s = holomorphic_symplectic_pairing(&y.quiver, &d, &e).unwrap()
            + holomorphic_symplectic_pairing(&y.quiver, &e, &d).unwrap();
        assert!(s.norm() < 1e-12);
    }

    #[test]
    fn direct_sum_and_adjoint() {
        let x = fixtures::f1_rep(c(1.0, 0.0), c(0.0, 2.0));
        let s = direct_sum(&x, &x);
        assert_eq!(s.dims, DimVector(vec![2, 2]));
        assert!((energy(&s, &[0.0, 0.0]) - 2.0 * energy(&x, &[0.0, 0.0])).abs() < 1e-12);
        let adj = adjoint_rep(&adjoint_rep(&x));
        assert_eq!(adj.mats, x.mats);
    }
}
