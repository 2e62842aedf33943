//! Critical points of the energy: eigenspace splitting of `i(μ_I − α)`,
//! Hessian spectra, negative slices, local slice coordinates and the
//! codimension strata at a vertex.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::CriticalError;
use crate::linalg::{self, c, frob, frob2, frob_all, CMat, C64, I};
use crate::quiver::DimVector;
use crate::rep::{
    d_moment_complex, energy_and_grad, group_act, hessian_matrix, inf_action, inf_action_adjoint, moment_real, Flavor,
    GroupElement, LieElement, Representation, TangentVector,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalTols {
    pub grad_tol: f64,
    pub cluster_tol: f64,
    pub block_tol: f64,
    pub rank_tol: f64,
}

impl Default for CriticalTols {
    fn default() -> Self {
        CriticalTols { grad_tol: 1e-8, cluster_tol: 1e-6, block_tol: 1e-8, rank_tol: 1e-9 }
    }
}

/// Splitting of a critical point into eigenspaces of `i(μ_I − α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalProfile {
    /// Distinct eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Dimension vector of each eigenspace, aligned with `eigenvalues`.
    pub blocks: Vec<DimVector>,
    /// Per block, per vertex: orthonormal columns spanning the eigenspace.
    pub block_bases: Vec<Vec<CMat>>,
    /// Slope of each block under `α`.
    pub slopes: Vec<f64>,
    /// Block dimension vectors ordered by decreasing eigenvalue.
    pub critical_type: Vec<DimVector>,
    /// Norm of all components of `x` mapping one eigenspace into another.
    pub offdiag_residual: f64,
    pub grad_norm: f64,
    /// Negative Hessian eigenvalues with real multiplicities.
    pub neg_spectrum: Vec<(f64, usize)>,
    /// Complex-orthonormal negative slice basis, when the point has the
    /// two-block shape required for it.
    pub neg_slice_basis: Option<Vec<TangentVector>>,
}

impl CriticalProfile {
    /// Index of the block containing vertex `v`, if unique.
    pub fn block_of_vertex(&self, v: usize) -> Option<usize> {
        let hits: Vec<usize> = (0..self.blocks.len()).filter(|&j| self.blocks[j].0[v] > 0).collect();
        (hits.len() == 1).then(|| hits[0])
    }
}

/// Hermitian per-vertex matrices `i μ_I(x) + α_i·id`.
fn shifted_moment(x: &Representation, alpha: &[f64]) -> Vec<CMat> {
    moment_real(x)
        .blocks
        .iter()
        .zip(alpha)
        .map(|(m, &a)| m * I + CMat::identity(m.nrows(), m.nrows()) * c(a, 0.0))
        .collect()
}

fn slope_f64(alpha: &[f64], d: &DimVector) -> f64 {
    alpha.iter().zip(&d.0).map(|(a, &n)| a * n as f64).sum::<f64>() / d.rank() as f64
}

/// Eigen-splitting and consistency checks at a critical point.
pub fn classify_critical(x: &Representation, alpha: &[f64], tols: &CriticalTols) -> Result<CriticalProfile, CriticalError> {
    let (_, grad) = energy_and_grad(x, alpha);
    let grad_norm = frob_all(&grad);
    let limit = 10.0 * tols.grad_tol;
    if grad_norm > limit {
        return Err(CriticalError::NotCritical { grad_norm, limit });
    }
    let n = x.dims.len();
    let mut entries: Vec<(f64, usize, DVector<C64>)> = Vec::new();
    for (v, h) in shifted_moment(x, alpha).iter().enumerate() {
        let (vals, vecs) = linalg::hermitian_eigen(h);
        for (j, val) in vals.into_iter().enumerate() {
            entries.push((val, v, vecs.column(j).into_owned()));
        }
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..entries.len() {
        match clusters.last_mut() {
            Some(cl) if entries[i].0 - entries[cl[cl.len() - 1]].0 <= tols.cluster_tol => cl.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    let mut eigenvalues = Vec::new();
    let mut blocks = Vec::new();
    let mut block_bases = Vec::new();
    let mut slopes = Vec::new();
    for cl in &clusters {
        let mean = cl.iter().map(|&i| entries[i].0).sum::<f64>() / cl.len() as f64;
        let mut dims = vec![0usize; n];
        let mut cols: Vec<Vec<DVector<C64>>> = vec![Vec::new(); n];
        for &i in cl {
            dims[entries[i].1] += 1;
            cols[entries[i].1].push(entries[i].2.clone());
        }
        let bases = (0..n)
            .map(|v| if cols[v].is_empty() { CMat::zeros(x.dims.0[v], 0) } else { CMat::from_columns(&cols[v]) })
            .collect();
        let d = DimVector(dims);
        let s = slope_f64(alpha, &d);
        if (mean - s).abs() >= tols.cluster_tol {
            return Err(CriticalError::SlopeMismatch { eigenvalue: mean, slope: s });
        }
        eigenvalues.push(mean);
        slopes.push(s);
        blocks.push(d);
        block_bases.push(bases);
    }
    let offdiag_residual = offdiag_residual(x, &block_bases);
    if offdiag_residual > tols.block_tol * x.norm().max(1.0) {
        return Err(CriticalError::BlockStructure(offdiag_residual));
    }
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]));
    let critical_type = order.iter().map(|&j| blocks[j].clone()).collect();
    let neg_spectrum = hessian_spectrum(x, alpha, tols.cluster_tol)
        .into_iter()
        .filter(|s| s.value < -neg_threshold(grad_norm))
        .map(|s| (s.value, s.multiplicity))
        .collect();
    let mut profile = CriticalProfile {
        eigenvalues,
        blocks,
        block_bases,
        slopes,
        critical_type,
        offdiag_residual,
        grad_norm,
        neg_spectrum,
        neg_slice_basis: None,
    };
    if x.quiver.pairs().is_some() && x.quiver.infinity().is_some() {
        profile.neg_slice_basis = negative_slice_from_profile(x, &profile).ok();
    }
    Ok(profile)
}

fn neg_threshold(grad_norm: f64) -> f64 {
    1e-7f64.max(100.0 * grad_norm)
}

fn offdiag_residual(x: &Representation, bases: &[Vec<CMat>]) -> f64 {
    let mut total = 0.0;
    for (a, e) in x.quiver.edges().iter().enumerate() {
        for (j, bj) in bases.iter().enumerate() {
            for (k, bk) in bases.iter().enumerate() {
                if j != k {
                    total += frob2(&(bk[e.head].adjoint() * &x.mats[a] * &bj[e.tail]));
                }
            }
        }
    }
    total.sqrt()
}

/// Norm of the component of `dir` mapping block `j` (at tails) into block
/// `k` (at heads), for every ordered pair `(j, k)`.
pub fn block_components(profile: &CriticalProfile, x: &Representation, dir: &[CMat]) -> Vec<Vec<f64>> {
    let nb = profile.blocks.len();
    let mut out = vec![vec![0.0; nb]; nb];
    for (a, e) in x.quiver.edges().iter().enumerate() {
        for j in 0..nb {
            for k in 0..nb {
                let bj = &profile.block_bases[j][e.tail];
                let bk = &profile.block_bases[k][e.head];
                out[j][k] += frob2(&(bk.adjoint() * &dir[a] * bj));
            }
        }
    }
    out.iter_mut().for_each(|row| row.iter_mut().for_each(|v| *v = v.sqrt()));
    out
}

/// `max(‖ρ*X‖, ‖ρ*(iX)‖)` with the compact adjoint: zero exactly when `X`
/// is orthogonal to the complexified orbit.
pub fn orbit_defect(x: &Representation, dir: &[CMat]) -> f64 {
    let idir: Vec<CMat> = dir.iter().map(|m| m * I).collect();
    inf_action_adjoint(x, dir, Flavor::Compact).norm().max(inf_action_adjoint(x, &idir, Flavor::Compact).norm())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HessianEigenspace {
    pub value: f64,
    /// Real multiplicity.
    pub multiplicity: usize,
    pub vectors: Vec<TangentVector>,
}

/// Spectrum of the Hessian on real coordinates, eigenvalues within
/// `cluster_tol·(1+|λ|)` grouped, ascending.
pub fn hessian_spectrum(x: &Representation, alpha: &[f64], cluster_tol: f64) -> Vec<HessianEigenspace> {
    let h = hessian_matrix(x, alpha);
    let (vals, vecs) = linalg::symmetric_eigen(&h);
    let shapes = x.shapes();
    let mut out: Vec<HessianEigenspace> = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        let col: Vec<f64> = vecs.column(i).iter().copied().collect();
        let t = linalg::unflatten_r(&col, &shapes);
        match out.last_mut() {
            Some(last) if (v - last.value).abs() <= cluster_tol * (1.0 + v.abs()) => {
                let m = last.multiplicity as f64;
                last.value = (last.value * m + v) / (m + 1.0);
                last.multiplicity += 1;
                last.vectors.push(t);
            }
            _ => out.push(HessianEigenspace { value: v, multiplicity: 1, vectors: vec![t] }),
        }
    }
    out
}

/// Complex-orthonormal basis of the negative slice at a two-block critical
/// point: maps from the positive block into the block containing infinity
/// that are killed by `(ρ^C)*` and `dμ_C`.
pub fn negative_slice_basis(
    x: &Representation,
    alpha: &[f64],
    tols: &CriticalTols,
) -> Result<Vec<TangentVector>, CriticalError> {
    let profile = classify_critical(x, alpha, tols)?;
    negative_slice_from_profile(x, &profile)
}

pub fn negative_slice_from_profile(x: &Representation, profile: &CriticalProfile) -> Result<Vec<TangentVector>, CriticalError> {
    let inf = x.quiver.infinity().ok_or_else(|| CriticalError::NotTwoBlock("quiver has no infinity vertex".into()))?;
    if x.quiver.pairs().is_none() {
        return Err(CriticalError::NotTwoBlock("quiver is not doubled".into()));
    }
    let low = profile
        .block_of_vertex(inf)
        .ok_or_else(|| CriticalError::NotTwoBlock("infinity is not in a single block".into()))?;
    match profile.blocks.len() {
        1 => return Ok(Vec::new()),
        2 if low == 0 => {}
        2 => return Err(CriticalError::NotTwoBlock("infinity lies in the block of larger eigenvalue".into())),
        nb => return Err(CriticalError::NotTwoBlock(format!("{nb} eigenvalue blocks"))),
    }
    let high = 1;
    let lb = &profile.block_bases[low];
    let hb = &profile.block_bases[high];
    let coord_shapes: Vec<(usize, usize)> =
        x.quiver.edges().iter().map(|e| (lb[e.head].ncols(), hb[e.tail].ncols())).collect();
    let nz = linalg::complex_len(&coord_shapes);
    if nz == 0 {
        return Ok(Vec::new());
    }
    let assemble = |z: &[C64]| -> Vec<CMat> {
        let zs = linalg::unflatten_c(z, &coord_shapes);
        x.quiver.edges().iter().zip(&zs).map(|(e, zm)| &lb[e.head] * zm * hb[e.tail].adjoint()).collect()
    };
    let mut cols = Vec::with_capacity(nz);
    let mut unit = vec![c(0.0, 0.0); nz];
    for j in 0..nz {
        unit[j] = c(1.0, 0.0);
        let dir = assemble(&unit);
        let adj = inf_action_adjoint(x, &dir, Flavor::Full);
        let dmu = d_moment_complex(x, &dir)?;
        let mut col = linalg::flatten_c(&adj.blocks).as_slice().to_vec();
        col.extend_from_slice(linalg::flatten_c(&dmu.blocks).as_slice());
        cols.push(DVector::from_vec(col));
        unit[j] = c(0.0, 0.0);
    }
    let m = CMat::from_columns(&cols);
    // Entries of the size of the criticality residual are noise: a numerically
    // computed critical point must keep the slice of the exact one nearby.
    let noise = 100.0 * (profile.offdiag_residual + profile.grad_norm);
    let null = linalg::nullspace(&m, (1e-9 * x.norm().max(1.0)).max(noise));
    Ok((0..null.ncols())
        .map(|j| {
            let z: Vec<C64> = null.column(j).iter().copied().collect();
            assemble(&z)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NewtonOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { max_iter: 50, tol: 1e-12, max_halvings: 30 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceDecomposition {
    /// Lie algebra element orthogonal to the stabilizer of `x`.
    pub u: LieElement,
    /// Displacement in `ker (ρ_x^C)*`.
    pub dx: TangentVector,
    /// `‖exp(u)·(x + dx) − y‖`.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Writes `y = exp(u)·(x + dx)` near `x` by damped Newton iteration in
/// complex slice coordinates, starting from `(0, y − x)` projected.
pub fn slice_decompose(
    x: &Representation,
    y: &Representation,
    opts: &NewtonOptions,
) -> Result<SliceDecomposition, CriticalError> {
    if x.dims != y.dims || *x.quiver != *y.quiver {
        return Err(CriticalError::Rep(crate::error::RepError::Shape("slice target has a different shape".into())));
    }
    let gshapes: Vec<(usize, usize)> = x.dims.0.iter().map(|&d| (d, d)).collect();
    let tshapes = x.shapes();
    let ng = linalg::complex_len(&gshapes);
    let nt = linalg::complex_len(&tshapes);
    let mut rho = CMat::zeros(nt, ng);
    let mut unit = vec![c(0.0, 0.0); ng];
    for j in 0..ng {
        unit[j] = c(1.0, 0.0);
        let u = linalg::unflatten_c(&unit, &gshapes);
        rho.set_column(j, &linalg::flatten_c(&inf_action(x, &u)));
        unit[j] = c(0.0, 0.0);
    }
    let tol = 1e-10 * frob(&rho).max(1.0);
    let ubasis = linalg::range(&rho.adjoint(), tol);
    let dbasis = linalg::orthogonal_complement(&rho, tol);
    let (nu, nd) = (ubasis.ncols(), dbasis.ncols());
    let x_flat = linalg::flatten_c(&x.mats);
    let y_flat = linalg::flatten_c(&y.mats);
    let split = |p: &DVector<C64>| -> (Vec<CMat>, Vec<CMat>) {
        let u = &ubasis * p.rows(0, nu);
        let d = &dbasis * p.rows(nu, nd);
        (linalg::unflatten_c(u.as_slice(), &gshapes), linalg::unflatten_c(d.as_slice(), &tshapes))
    };
    let eval = |p: &DVector<C64>| -> Result<DVector<C64>, CriticalError> {
        let (u, d) = split(p);
        let g = GroupElement::exp(&LieElement { blocks: u, flavor: Flavor::Full });
        let moved = group_act(&g, &x.displaced(&d, 1.0))?;
        Ok(linalg::flatten_c(&moved.mats) - &y_flat)
    };
    let mut p = DVector::zeros(nu + nd);
    p.rows_mut(nu, nd).copy_from(&(dbasis.adjoint() * (&y_flat - &x_flat)));
    let mut f = eval(&p)?;
    let scale = 1.0 + y.norm();
    let mut iterations = 0;
    while f.norm() > opts.tol * scale && iterations < opts.max_iter {
        iterations += 1;
        let h = 1e-6;
        let mut jac = CMat::zeros(nt, nu + nd);
        for j in 0..nu + nd {
            let mut pp = p.clone();
            let mut pm = p.clone();
            pp[j] += c(h, 0.0);
            pm[j] -= c(h, 0.0);
            jac.set_column(j, &((eval(&pp)? - eval(&pm)?) / c(2.0 * h, 0.0)));
        }
        let step = linalg::lstsq(&jac, &(-&f), 1e-12 * frob(&jac).max(1.0));
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..=opts.max_halvings {
            let cand = &p + &step * c(t, 0.0);
            let fc = eval(&cand)?;
            if fc.norm() < f.norm() {
                p = cand;
                f = fc;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let (u, dx) = split(&p);
    let residual = f.norm();
    Ok(SliceDecomposition {
        u: LieElement { blocks: u, flavor: Flavor::Full },
        dx,
        residual,
        iterations,
        converged: residual <= opts.tol * scale,
    })
}

/// Incoming maps at `k` stacked side by side.
fn incoming_span(x: &Representation, k: usize) -> CMat {
    let cols: usize = x.quiver.incoming(k).map(|a| x.mats[a].ncols()).sum();
    let mut m = CMat::zeros(x.dims.0[k], cols);
    let mut c0 = 0;
    for a in x.quiver.incoming(k) {
        let xa = &x.mats[a];
        m.view_mut((0, c0), xa.shape()).copy_from(xa);
        c0 += xa.ncols();
    }
    m
}

/// Codimension of the sum of the images of all edges into `k`.
pub fn stratum_codim(x: &Representation, k: usize, rank_tol: f64) -> Result<usize, CriticalError> {
    if x.quiver.infinity() == Some(k) {
        return Err(CriticalError::InfinityVertex(k));
    }
    let span = incoming_span(x, k);
    Ok(x.dims.0[k] - linalg::rank(&span, rank_tol))
}

/// Restriction of `x` to the image of the incoming maps at `k`, which has
/// dimension vector `dims − r·e_k`.
pub fn grassmann_project(x: &Representation, k: usize, r: usize, rank_tol: f64) -> Result<Representation, CriticalError> {
    let found = stratum_codim(x, k, rank_tol)?;
    if found != r {
        return Err(CriticalError::CodimMismatch { expected: r, found });
    }
    if r == 0 {
        return Ok(x.clone());
    }
    let span = incoming_span(x, k);
    let smax = linalg::singular_values(&span).into_iter().fold(0.0, f64::max);
    let p = linalg::range(&span, rank_tol * smax);
    let mut dims = x.dims.clone();
    dims.0[k] -= r;
    let mats = x
        .quiver
        .edges()
        .iter()
        .zip(&x.mats)
        .map(|(e, m)| {
            let left = if e.head == k { p.adjoint() * m } else { m.clone() };
            if e.tail == k {
                left * &p
            } else {
                left
            }
        })
        .collect();
    Ok(Representation::new(x.quiver.clone(), dims, mats)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rep::{energy, moment_complex};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn f1_saddle_profile() {
        let x = fixtures::f1_rep(c(0.0, 0.0), c(0.0, 0.0));
        let p = classify_critical(&x, &fixtures::f1_alpha(), &CriticalTols::default()).unwrap();
        assert_eq!(p.eigenvalues.len(), 2);
        assert!((p.eigenvalues[0] + 1.0).abs() < 1e-12 && (p.eigenvalues[1] - 1.0).abs() < 1e-12);
        assert_eq!(p.blocks, vec![DimVector(vec![1, 0]), DimVector(vec![0, 1])]);
        assert_eq!(p.critical_type, vec![DimVector(vec![0, 1]), DimVector(vec![1, 0])]);
        assert_eq!(p.neg_spectrum.len(), 1);
        assert!((p.neg_spectrum[0].0 + 2.0).abs() < 1e-12);
        assert_eq!(p.neg_spectrum[0].1, 2);
        let basis = p.neg_slice_basis.unwrap();
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0][0][(0, 0)], c(0.0, 0.0));
        assert!((basis[0][1][(0, 0)].norm() - 1.0).abs() < 1e-12);
        let moved = x.displaced(&basis[0], 0.3);
        assert!(moment_complex(&moved).unwrap().norm() < 1e-12);
        assert!(energy(&moved, &fixtures::f1_alpha()) < energy(&x, &fixtures::f1_alpha()));
    }

    #[test]
    fn f1_minimum_profile() {
        let x = fixtures::f1_rep(c(0.0, 0.0), c(2f64.sqrt(), 0.0));
        let p = classify_critical(&x, &fixtures::f1_alpha(), &CriticalTols::default()).unwrap();
        assert_eq!(p.eigenvalues.len(), 1);
        assert!(p.eigenvalues[0].abs() < 1e-12);
        assert_eq!(p.critical_type, vec![DimVector(vec![1, 1])]);
        assert!(p.neg_spectrum.is_empty());
        assert_eq!(p.neg_slice_basis, Some(vec![]));
    }

    #[test]
    fn non_critical_is_rejected() {
        let x = fixtures::f1_rep(c(0.0, 0.0), c(1.0, 0.0));
        assert!(matches!(
            classify_critical(&x, &fixtures::f1_alpha(), &CriticalTols::default()),
            Err(CriticalError::NotCritical { .. })
        ));
    }

    #[test]
    fn a2_origin_spectrum() {
        let x = fixtures::a2_rep(c(0.0, 0.0));
        let s = hessian_spectrum(&x, &fixtures::a2_alpha(), 1e-6);
        assert_eq!(s.len(), 1);
        assert!((s[0].value + 2.0).abs() < 1e-12);
        assert_eq!(s[0].multiplicity, 2);
    }

    #[test]
    fn slice_decomposition_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = fixtures::f1_rep(c(0.0, 0.0), c(2f64.sqrt(), 0.0));
        let same = slice_decompose(&x, &x, &NewtonOptions::default()).unwrap();
        assert!(same.converged && same.u.norm() < 1e-14 && frob_all(&same.dx) < 1e-14);

        // Build (u0, δ0) in the slice coordinates and recover them.
        let gshapes = [(1, 1), (1, 1)];
        let raw: Vec<CMat> = gshapes.iter().map(|&(r, cc)| linalg::gaussian_cmat(&mut rng, r, cc) * c(1e-2, 0.0)).collect();
        // For F1 at (0, b) the stabilizer is the diagonal; take the anti-diagonal part.
        let t = (raw[0][(0, 0)] - raw[1][(0, 0)]) * c(0.5, 0.0);
        let u0 = vec![CMat::from_element(1, 1, t), CMat::from_element(1, 1, -t)];
        let tangent = inf_action(&x, &u0);
        let mut delta0 = fixtures::random_tangent(&mut rng, &x);
        delta0.iter_mut().for_each(|m| *m *= c(1e-2, 0.0));
        // Remove the component along the orbit direction.
        let num = linalg::herm_inner_all(&delta0, &tangent);
        let den = linalg::herm_inner_all(&tangent, &tangent);
        for (d, tg) in delta0.iter_mut().zip(&tangent) {
            *d -= tg * (num / den);
        }
        let g = GroupElement::exp(&LieElement { blocks: u0.clone(), flavor: Flavor::Full });
        let y = group_act(&g, &x.displaced(&delta0, 1.0)).unwrap();
        let dec = slice_decompose(&x, &y, &NewtonOptions::default()).unwrap();
        assert!(dec.converged, "residual {:e}", dec.residual);
        assert!(dec.residual < 1e-9);
        assert!(dec.u.sub(&LieElement { blocks: u0, flavor: Flavor::Full }).norm() < 1e-8);
        let dd: Vec<CMat> = dec.dx.iter().zip(&delta0).map(|(a, b)| a - b).collect();
        assert!(frob_all(&dd) < 1e-8);
    }

    #[test]
    fn stratum_examples() {
        let x = fixtures::f1_rep(c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(stratum_codim(&x, 1, 1e-9).unwrap(), 1);
        let p = grassmann_project(&x, 1, 1, 1e-9).unwrap();
        assert_eq!(p.dims, DimVector(vec![1, 0]));
        assert_eq!(grassmann_project(&x, 1, 0, 1e-9), Err(CriticalError::CodimMismatch { expected: 0, found: 1 }));
        let y = fixtures::f1_rep(c(1.0, 0.0), c(0.0, 0.0));
        assert_eq!(stratum_codim(&y, 1, 1e-9).unwrap(), 0);
        assert_eq!(grassmann_project(&y, 1, 0, 1e-9).unwrap(), y);
        assert!(matches!(stratum_codim(&x, 0, 1e-9), Err(CriticalError::InfinityVertex(0))));
        let empty = Representation::zero(fixtures::f1_quiver(), DimVector(vec![1, 0]));
        assert_eq!(stratum_codim(&empty, 1, 1e-9).unwrap(), 0);
    }
}
