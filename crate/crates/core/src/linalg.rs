//! Small complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `max |U^dag U - I|` over all entries.
pub fn unitarity_residual(u: &CMat) -> f64 {
    let n = u.nrows();
    let g = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

pub fn check_unitary(u: &CMat, tol: f64) -> Result<()> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    let residual = unitarity_residual(u);
    if residual > tol || !residual.is_finite() {
        return Err(Error::NotUnitary { residual });
    }
    Ok(())
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermiticity_residual(a: &CMat) -> f64 {
    max_abs_diff(a, &a.adjoint())
}

pub fn hermitize(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

pub fn trace(a: &CMat) -> C64 {
    a.diagonal().iter().sum()
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending, columns of the
/// returned matrix are the matching eigenvectors.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let eig = hermitize(a).symmetric_eigen();
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

/// Rebuilds `V f(diag) V^dag`.
pub fn from_spectrum(values: &[C64], vectors: &CMat) -> CMat {
    let n = vectors.nrows();
    let mut scaled = vectors.clone();
    for k in 0..n {
        let v = values[k];
        scaled.column_mut(k).iter_mut().for_each(|x| *x *= v);
    }
    scaled * vectors.adjoint()
}

/// `exp(i h)` for Hermitian `h`.
pub fn expi_hermitian(h: &CMat) -> CMat {
    let (vals, vecs) = hermitian_eigen(h);
    let phases: Vec<C64> = vals.iter().map(|&l| C64::from_polar(1.0, l)).collect();
    from_spectrum(&phases, &vecs)
}

/// Square root of a positive semidefinite Hermitian matrix; tiny negative
/// eigenvalues are clamped to zero.
pub fn psd_sqrt(a: &CMat) -> CMat {
    let (vals, vecs) = hermitian_eigen(a);
    let roots: Vec<C64> = vals.iter().map(|&l| C64::new(l.max(0.0).sqrt(), 0.0)).collect();
    from_spectrum(&roots, &vecs)
}

/// Hermitian generator `h` with `u = exp(i h)` and spectrum in `(-pi, pi]`.
///
/// Eigenvalues of `u` too close to `-1` make the branch ambiguous and are rejected.
pub fn unitary_log(u: &CMat) -> Result<CMat> {
    check_unitary(u, 1e-8)?;
    let n = u.nrows();
    let (q, t) = u.clone().schur().unpack();
    for i in 0..n {
        for j in 0..n {
            if i != j && t[(i, j)].norm() > 1e-8 {
                return Err(Error::BranchAmbiguity(
                    "Schur form of a unitary is not diagonal".into(),
                ));
            }
        }
    }
    let mut angles = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        if (lambda + C64::new(1.0, 0.0)).norm() < 1e-6 {
            return Err(Error::BranchAmbiguity(format!(
                "eigenvalue {lambda:.3} sits on the branch cut at -1"
            )));
        }
        angles.push(C64::new(lambda.arg(), 0.0));
    }
    Ok(hermitize(&from_spectrum(&angles, &q)))
}

/// Haar-random unitary: QR decomposition of a complex Gaussian matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    use rand_distr::StandardNormal;
    let g = CMat::from_fn(n, n, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let (q, r) = g.qr().unpack();
    let mut q = q;
    for k in 0..n {
        let d = r[(k, k)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q.column_mut(k).iter_mut().for_each(|x| *x *= ph);
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_then_exp_round_trips() {
        let h = CMat::from_row_slice(
            2,
            2,
            &[c(0.3, 0.0), c(0.1, -0.4), c(0.1, 0.4), c(-0.7, 0.0)],
        );
        let u = expi_hermitian(&h);
        assert!(unitarity_residual(&u) < 1e-13);
        let back = unitary_log(&u).unwrap();
        assert!(max_abs_diff(&back, &h) < 1e-12);
    }

    #[test]
    fn log_rejects_minus_one() {
        let u = CMat::from_diagonal_element(2, 2, c(-1.0, 0.0));
        assert!(matches!(unitary_log(&u), Err(Error::BranchAmbiguity(_))));
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let a = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let s = psd_sqrt(&a);
        assert!(max_abs_diff(&(&s * &s), &a) < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in 1..6 {
            assert!(unitarity_residual(&random_unitary(&mut rng, n)) < 1e-12);
        }
    }
}
