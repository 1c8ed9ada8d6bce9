//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;
pub type RMat = DMatrix<f64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

/// `‖a - b‖_F / max(‖b‖_F, tiny)`.
pub fn relative_error(a: &CMat, b: &CMat) -> f64 {
    let denom = b.norm().max(f64::MIN_POSITIVE);
    (a - b).norm() / denom
}

/// Largest `|A - A^H|` entry.
pub fn hermitian_asymmetry(a: &CMat) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Square root of a real symmetric PSD matrix with negative eigenvalues
/// clipped to zero. Returns the root and the magnitude of the clipped part.
///
/// Fails when an eigenvalue is more negative than `tol * max|eigenvalue|`.
pub fn psd_sqrt(m: &RMat, tol: f64) -> Result<(RMat, f64)> {
    let eig = m.clone().symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let mut clipped = 0.0f64;
    let mut roots = eig.eigenvalues.clone();
    for x in roots.iter_mut() {
        if *x < 0.0 {
            if *x < -tol * scale.max(1.0) {
                return Err(Error::NotPsd { min_eigenvalue: *x });
            }
            clipped = clipped.max(-*x);
            *x = 0.0;
        } else {
            *x = x.sqrt();
        }
    }
    let q = &eig.eigenvectors;
    Ok((q * RMat::from_diagonal(&roots) * q.transpose(), clipped))
}

/// Hermitian eigendecomposition, eigenvalues in descending order.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let eig = a.clone().symmetric_eigen();
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn min_eigenvalue(a: &CMat) -> f64 {
    a.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |m, &x| m.min(x))
}

/// Real symmetric embedding `[[Re, -Im], [Im, Re]]` of a complex matrix.
pub fn real_embedding(a: &CMat) -> RMat {
    let (r, c) = a.shape();
    let mut out = RMat::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = a[(i, j)];
            out[(i, j)] = z.re;
            out[(i + r, j + c)] = z.re;
            out[(i, j + c)] = -z.im;
            out[(i + r, j)] = z.im;
        }
    }
    out
}

/// Inverse of [`real_embedding`] after averaging the two copies of each block.
pub fn from_real_embedding(m: &RMat) -> CMat {
    let n = m.nrows() / 2;
    let c = m.ncols() / 2;
    CMat::from_fn(n, c, |i, j| {
        let re = 0.5 * (m[(i, j)] + m[(i + n, j + c)]);
        let im = 0.5 * (m[(i + n, j)] - m[(i, j + c)]);
        Complex64::new(re, im)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_squares_back() {
        let m = RMat::from_row_slice(3, 3, &[2.0, 0.5, 0.1, 0.5, 1.0, 0.2, 0.1, 0.2, 1.5]);
        let (r, clipped) = psd_sqrt(&m, 1e-9).unwrap();
        assert_eq!(clipped, 0.0);
        assert!((&r * &r - &m).norm() < 1e-12);
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let m = RMat::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(psd_sqrt(&m, 1e-9).is_err());
    }

    #[test]
    fn embedding_round_trip() {
        let a = CMat::from_fn(3, 3, |i, j| Complex64::new(i as f64 - j as f64, (i * j) as f64));
        assert!(relative_error(&from_real_embedding(&real_embedding(&a)), &a) < 1e-15);
        let b = CMat::from_fn(3, 3, |i, j| Complex64::new((i + j) as f64, 1.0 - i as f64));
        let prod = real_embedding(&(&a * &b));
        assert!((prod - real_embedding(&a) * real_embedding(&b)).norm() < 1e-12);
    }

    #[test]
    fn eigen_sorted() {
        let a = CMat::from_fn(3, 3, |i, j| if i == j { Complex64::new(i as f64, 0.0) } else { Complex64::new(0.0, 0.0) });
        let (vals, _) = hermitian_eigen(&a);
        assert_eq!(vals, vec![2.0, 1.0, 0.0]);
    }
}
