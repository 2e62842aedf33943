//! Small dense linear-algebra helpers over complex matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;

pub const I: C64 = Complex { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn frob2(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

pub fn frob(m: &CMat) -> f64 {
    frob2(m).sqrt()
}

pub fn frob2_all(ms: &[CMat]) -> f64 {
    ms.iter().fold(0.0, |s, m| s + frob2(m))
}

pub fn frob_all(ms: &[CMat]) -> f64 {
    frob2_all(ms).sqrt()
}

/// `Re Tr(a b*)`.
pub fn re_inner(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x * y.conj()).re).sum()
}

pub fn re_inner_all(a: &[CMat], b: &[CMat]) -> f64 {
    a.iter().zip(b).map(|(x, y)| re_inner(x, y)).sum()
}

/// `Tr(a b*)`, complex-linear in `a`.
pub fn herm_inner_all(a: &[CMat], b: &[CMat]) -> C64 {
    a.iter().zip(b).flat_map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| p * q.conj())).sum()
}

pub fn shapes(ms: &[CMat]) -> Vec<(usize, usize)> {
    ms.iter().map(|m| m.shape()).collect()
}

pub fn zeros_like(shapes: &[(usize, usize)]) -> Vec<CMat> {
    shapes.iter().map(|&(r, c)| CMat::zeros(r, c)).collect()
}

pub fn complex_len(shapes: &[(usize, usize)]) -> usize {
    shapes.iter().map(|(r, c)| r * c).sum()
}

/// Row-major complex coordinates of a matrix list.
pub fn flatten_c(ms: &[CMat]) -> DVector<C64> {
    let mut out = Vec::with_capacity(ms.iter().map(|m| m.len()).sum());
    for m in ms {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out.push(m[(i, j)]);
            }
        }
    }
    DVector::from_vec(out)
}

pub fn unflatten_c(v: &[C64], shapes: &[(usize, usize)]) -> Vec<CMat> {
    let mut k = 0;
    shapes
        .iter()
        .map(|&(r, c)| {
            let m = CMat::from_fn(r, c, |i, j| v[k + i * c + j]);
            k += r * c;
            m
        })
        .collect()
}

/// Real coordinates: row-major entries with interleaved real and imaginary parts.
pub fn flatten_r(ms: &[CMat]) -> DVector<f64> {
    let z = flatten_c(ms);
    DVector::from_iterator(2 * z.len(), z.iter().flat_map(|w| [w.re, w.im]))
}

pub fn unflatten_r(v: &[f64], shapes: &[(usize, usize)]) -> Vec<CMat> {
    let z: Vec<C64> = v.chunks(2).map(|p| c(p[0], p[1])).collect();
    unflatten_c(&z, shapes)
}

/// Pads with zero rows so that SVD returns a full right basis.
fn padded<T: nalgebra::ComplexField + Copy>(a: &DMatrix<T>) -> DMatrix<T> {
    if a.nrows() >= a.ncols() {
        a.clone()
    } else {
        let mut p = DMatrix::from_element(a.ncols(), a.ncols(), T::zero());
        p.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
        p
    }
}

/// Singular values of `a` (empty for an empty matrix).
pub fn singular_values<T: nalgebra::ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return vec![];
    }
    a.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Orthonormal basis of the nullspace of `a`, as columns. A singular value
/// counts as zero when it is at most `abs_tol`.
pub fn nullspace<T: nalgebra::ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>, abs_tol: f64) -> DMatrix<T> {
    let n = a.ncols();
    if n == 0 {
        return DMatrix::from_element(0, 0, T::zero());
    }
    if a.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    let p = padded(a);
    let svd = p.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors");
    let mut cols = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= abs_tol {
            cols.push(vt.row(i).adjoint());
        }
    }
    if cols.is_empty() {
        DMatrix::from_element(n, 0, T::zero())
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis of the column space, singular values above `abs_tol`.
pub fn range<T: nalgebra::ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>, abs_tol: f64) -> DMatrix<T> {
    let m = a.nrows();
    if a.ncols() == 0 || m == 0 {
        return DMatrix::from_element(m, 0, T::zero());
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors");
    let cols: Vec<_> =
        svd.singular_values.iter().enumerate().filter(|(_, s)| **s > abs_tol).map(|(i, _)| u.column(i).into_owned()).collect();
    if cols.is_empty() {
        DMatrix::from_element(m, 0, T::zero())
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Numerical rank with singular values above `rel_tol * sigma_max`.
pub fn rank<T: nalgebra::ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>, rel_tol: f64) -> usize {
    let s = singular_values(a);
    let max = s.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * max).count()
}

/// Moore-Penrose pseudo-inverse with a relative cutoff.
pub fn pinv<T: nalgebra::ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>, rel_tol: f64) -> DMatrix<T> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return DMatrix::from_element(a.ncols(), a.nrows(), T::zero());
    }
    let svd = a.clone().svd(true, true);
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = (rel_tol * max).max(f64::MIN_POSITIVE);
    svd.pseudo_inverse(eps).expect("pseudo inverse")
}

/// Minimum-norm least-squares solution of `a x = b`, ignoring singular
/// values at or below `abs_tol`.
pub fn lstsq(a: &CMat, b: &DVector<C64>, abs_tol: f64) -> DVector<C64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return DVector::zeros(a.ncols());
    }
    a.clone().svd(true, true).solve(b, abs_tol.max(f64::MIN_POSITIVE)).expect("svd solve")
}

/// Condition number `sigma_max / sigma_min`; infinite when singular.
pub fn condition_number(a: &CMat) -> f64 {
    if a.nrows() == 0 {
        return 1.0;
    }
    let s = singular_values(a);
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    if n == 0 {
        return (vec![], CMat::zeros(0, 0));
    }
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
    (vals, vecs)
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
pub fn symmetric_eigen(h: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = h.nrows();
    if n == 0 {
        return (vec![], DMatrix::zeros(0, 0));
    }
    let sym = (h + h.transpose()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>());
    (vals, vecs)
}

/// Orthonormal basis (columns) of the orthogonal complement of the span of `a`'s columns.
pub fn orthogonal_complement(a: &CMat, abs_tol: f64) -> CMat {
    nullspace(&a.adjoint(), abs_tol)
}

pub fn matrix_exp(u: &CMat) -> CMat {
    if u.nrows() == 0 {
        return u.clone();
    }
    u.exp()
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

pub fn gaussian_cmat<R: Rng + ?Sized>(rng: &mut R, r: usize, cols: usize) -> CMat {
    CMat::from_fn(r, cols, |_, _| gaussian(rng))
}

/// Haar-ish random unitary from the QR factorisation of a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let g = gaussian_cmat(rng, n, n);
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = CMat::from_diagonal(&DVector::from_iterator(
        n,
        (0..n).map(|i| {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                c(1.0, 0.0)
            }
        }),
    ));
    q * phases
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flatten_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ms = vec![gaussian_cmat(&mut rng, 2, 3), gaussian_cmat(&mut rng, 0, 2), gaussian_cmat(&mut rng, 1, 1)];
        let s = shapes(&ms);
        assert_eq!(unflatten_c(flatten_c(&ms).as_slice(), &s), ms);
        assert_eq!(unflatten_r(flatten_r(&ms).as_slice(), &s), ms);
        assert!((flatten_r(&ms).norm_squared() - frob2_all(&ms)).abs() < 1e-12);
    }

    #[test]
    fn nullspace_of_wide_matrix() {
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let n = nullspace(&a, 1e-12);
        assert_eq!(n.ncols(), 2);
        assert!((&a * &n).norm() < 1e-12);
        assert!((n.transpose() * &n - DMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = random_unitary(&mut rng, 4);
        assert!((u.adjoint() * &u - CMat::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn hermitian_eigen_sorted() {
        let h = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let (vals, vecs) = hermitian_eigen(&h);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        let recon = &vecs * CMat::from_diagonal(&DVector::from_iterator(2, vals.iter().map(|&v| c(v, 0.0)))) * vecs.adjoint();
        assert!((recon - h).norm() < 1e-12);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = CMat::zeros(3, 3);
        assert!((matrix_exp(&z) - CMat::identity(3, 3)).norm() < 1e-14);
    }
}
