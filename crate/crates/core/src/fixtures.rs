//! Small named quivers and representations used by the examples, the
//! self-check and the tests.

use std::sync::Arc;

use rand::Rng;

use crate::linalg::{self, c, CMat, C64};
use crate::quiver::{double_quiver, handsaw_to_quiver, DimVector, Quiver, StabilityParameter};
use crate::rep::Representation;

fn scalar(z: C64) -> CMat {
    CMat::from_element(1, 1, z)
}

/// Doubled framed A1: vertices `inf, 1`, edges `a: inf -> 1` and `b: 1 -> inf`.
pub fn f1_quiver() -> Arc<Quiver> {
    let q = Quiver::new(&["inf", "1"], &[("inf", "1", "a"), ("1", "inf", "b")], Some("inf"))
        .and_then(|q| q.with_pairs(vec![(0, 1)]))
        .expect("fixture quiver");
    Arc::new(q)
}

pub fn f1_rep(a: C64, b: C64) -> Representation {
    Representation { quiver: f1_quiver(), dims: DimVector(vec![1, 1]), mats: vec![scalar(a), scalar(b)] }
}

/// Canonical parameter `(-1, 1)` for dimension `(1, 1)`.
pub fn f1_stability() -> StabilityParameter {
    StabilityParameter::from_ints(&[-1, 1])
}

pub fn f1_alpha() -> Vec<f64> {
    f1_stability().to_f64()
}

/// Single edge `1 -> 2`.
pub fn a2_quiver() -> Arc<Quiver> {
    Arc::new(Quiver::new(&["1", "2"], &[("1", "2", "a")], None).expect("fixture quiver"))
}

pub fn a2_rep(a: C64) -> Representation {
    Representation { quiver: a2_quiver(), dims: DimVector(vec![1, 1]), mats: vec![scalar(a)] }
}

pub fn a2_stability() -> StabilityParameter {
    StabilityParameter::from_ints(&[1, -1])
}

pub fn a2_alpha() -> Vec<f64> {
    a2_stability().to_f64()
}

/// `1 -> 2 -> 3`.
pub fn a3_quiver() -> Arc<Quiver> {
    Arc::new(Quiver::new(&["1", "2", "3"], &[("1", "2", "a"), ("2", "3", "b")], None).expect("fixture quiver"))
}

/// Doubled framed A1 with `w` framing edges: `a1..aw: inf -> 1` followed by
/// their reversals `b1..bw`.
pub fn framed_a1_quiver(w: usize) -> Arc<Quiver> {
    let mut edges: Vec<(String, String, String)> =
        (1..=w).map(|j| ("inf".to_string(), "1".to_string(), format!("a{j}"))).collect();
    edges.extend((1..=w).map(|j| ("1".to_string(), "inf".to_string(), format!("b{j}"))));
    let q = Quiver::new(&["inf".to_string(), "1".to_string()], &edges, Some("inf"))
        .and_then(|q| q.with_pairs((0..w).map(|j| (j, j + w)).collect()))
        .expect("fixture quiver");
    Arc::new(q)
}

/// Doubled one-loop quiver: loops `x` and `y` paired with each other.
pub fn doubled_jordan_quiver() -> Arc<Quiver> {
    let q = Quiver::new(&["1"], &[("1", "1", "x"), ("1", "1", "y")], None)
        .and_then(|q| q.with_pairs(vec![(0, 1)]))
        .expect("fixture quiver");
    Arc::new(q)
}

/// A non-split extension of `(λ, μ) ⊕ (λ, μ)` on the doubled Jordan quiver:
/// `x = [[λ, 1], [0, λ]]`, `y = μ·id`. Its semisimplification is diagonal.
pub fn jordan_extension(lambda: C64, mu: C64) -> Representation {
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let x = CMat::from_row_slice(2, 2, &[lambda, one, zero, lambda]);
    let y = CMat::identity(2, 2) * mu;
    Representation { quiver: doubled_jordan_quiver(), dims: DimVector(vec![2]), mats: vec![x, y] }
}

/// The handsaw with one V-vertex and two one-dimensional W-spaces.
pub fn hs2_quiver() -> (Arc<Quiver>, DimVector) {
    let (q, d) = handsaw_to_quiver(2, &[1], &[1, 1]).expect("fixture quiver");
    (Arc::new(q), d)
}

/// A random doubled quiver on `n` vertices with two to four base edges
/// (no loops) and dimensions in `1..=max_dim`, carrying a Gaussian
/// representation.
pub fn random_doubled<R: Rng + ?Sized>(rng: &mut R, n: usize, max_dim: usize) -> Representation {
    let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let m = rng.random_range(2..=4);
    let mut edges = Vec::with_capacity(m);
    for e in 0..m {
        let t = rng.random_range(0..n);
        let mut h = rng.random_range(0..n - 1);
        if h >= t {
            h += 1;
        }
        edges.push((names[t].clone(), names[h].clone(), format!("e{e}")));
    }
    let base = Quiver::new(&names, &edges, None).expect("random quiver");
    let q = Arc::new(double_quiver(&base));
    let dims = DimVector((0..n).map(|_| rng.random_range(1..=max_dim)).collect());
    Representation::random(q, dims, rng)
}

/// A Gaussian tangent vector at `x`.
pub fn random_tangent<R: Rng + ?Sized>(rng: &mut R, x: &Representation) -> Vec<CMat> {
    x.shapes().iter().map(|&(r, cc)| linalg::gaussian_cmat(rng, r, cc)).collect()
}
