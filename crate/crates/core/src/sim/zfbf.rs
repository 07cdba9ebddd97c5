use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Zero-forcing precoder for a `K × N_t` matrix whose rows are the
/// conjugated user channels `h_k^H`. Returns the `N_t × K` matrix of
/// unit-norm beams, `H^H (H H^H)^{-1}` with normalized columns, so that
/// `h_j^H w_k = 0` for `j ≠ k`.
pub fn zfbf_precoder(channels: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let (k, n_t) = channels.shape();
    if k == 0 || k > n_t {
        return Err(Error::domain("zfbf_precoder", format!("{k} users for {n_t} antennas")));
    }
    let hh = channels.adjoint();
    let gram = channels * &hh;
    let inv = gram.try_inverse().ok_or(Error::RankDeficient)?;
    let mut w = hh * inv;
    for mut col in w.column_iter_mut() {
        let norm = col.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::RankDeficient);
        }
        col /= Complex64::new(norm, 0.0);
    }
    Ok(w)
}

/// Circularly-symmetric complex Gaussian with unit variance.
#[inline]
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows × cols` matrix of i.i.d. `CN(0, 1)` entries, filled row by row.
pub fn rayleigh_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Complex64> {
    let data: Vec<Complex64> = (0..rows * cols).map(|_| complex_normal(rng)).collect();
    DMatrix::from_row_slice(rows, cols, &data)
}
