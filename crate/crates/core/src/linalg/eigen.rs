use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Eigenvalues in ascending order, with optional eigenvectors as columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Spectrum<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Option<CMatrix<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn min(&self) -> T {
        self.eigenvalues.first().copied().unwrap_or_else(T::nan)
    }

    pub fn max(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or_else(T::nan)
    }

    /// Largest modulus, i.e. the spectral norm of the input.
    pub fn max_abs(&self) -> T {
        self.min().abs().max(self.max().abs())
    }

    /// `U diag(λ) U†`; `None` when eigenvectors were not requested.
    pub fn reconstruct(&self) -> Option<CMatrix<T>> {
        let u = self.eigenvectors.as_ref()?;
        let n = u.rows();
        Some(CMatrix::from_fn(n, n, |r, c| {
            (0..n)
                .map(|k| u[(r, k)] * u[(c, k)].conj() * self.eigenvalues[k])
                .sum()
        }))
    }
}

/// Hermitian eigendecomposition.
///
/// The input must satisfy `‖M − M†‖_max ≤ 1e-10·max(‖M‖_max, 1)`; it is then
/// symmetrized and handed to the backend. Eigenvalues come back ascending.
/// Each eigenvector's first non-negligible component is rotated to the
/// positive real axis so repeated calls produce identical output.
pub fn eig_hermitian<T: Real>(m: &CMatrix<T>, vectors: bool) -> Result<Spectrum<T>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let scale = m.max_abs().max(T::one());
    let tolerance = T::tol(1e-10) * scale;
    let violation = m.hermiticity_violation();
    if violation > tolerance {
        return Err(Error::NotHermitian {
            violation: violation.to_f64().unwrap_or(f64::NAN),
            tolerance: tolerance.to_f64().unwrap_or(f64::NAN),
        });
    }
    let n = m.rows();
    let sym = m.hermitian_part();
    let (vals, vecs) = T::hermitian_eigen(n, sym.as_slice(), vectors);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).expect("finite eigenvalues"));
    let eigenvalues = order.iter().map(|&k| vals[k]).collect();

    let eigenvectors = vecs.map(|buf| {
        let phase_floor = T::tol(1e-10);
        let mut u = CMatrix::zeros(n, n);
        for (new_col, &old_col) in order.iter().enumerate() {
            let mut col: Vec<Complex<T>> = (0..n).map(|r| buf[r * n + old_col]).collect();
            if let Some(lead) = col.iter().copied().find(|z| z.norm() > phase_floor) {
                let phase = lead.conj() / lead.norm();
                col.iter_mut().for_each(|z| *z = *z * phase);
            }
            u.set_column(new_col, &col);
        }
        u
    });

    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_spectrum() {
        let m = CMatrix::<f64>::from_real_diagonal(&[0.5, 0.0, 0.5]);
        let s = eig_hermitian(&m, false).unwrap();
        assert_eq!(s.eigenvalues.len(), 3);
        for (a, b) in s.eigenvalues.iter().zip([0.0, 0.5, 0.5]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn pauli_x() {
        let m = CMatrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let s = eig_hermitian(&m, true).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-14);
        let u = s.eigenvectors.as_ref().unwrap();
        // phase convention: leading component positive real
        assert!(u[(0, 0)].re > 0.0 && u[(0, 0)].im == 0.0);
        assert!(s.reconstruct().unwrap().max_abs_diff(&m) < 1e-14);
    }

    #[test]
    fn rejects_non_square_and_non_hermitian() {
        let rect = CMatrix::<f64>::zeros(2, 3);
        assert!(matches!(
            eig_hermitian(&rect, false),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
        let skew = CMatrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        match eig_hermitian(&skew, false) {
            Err(Error::NotHermitian { violation, .. }) => assert!((violation - 2.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn complex_hermitian_reconstruction() {
        let mut m = CMatrix::<f64>::zeros(3, 3);
        m[(0, 0)] = Complex::new(2.0, 0.0);
        m[(1, 1)] = Complex::new(-1.0, 0.0);
        m[(0, 1)] = Complex::new(0.3, 0.7);
        m[(1, 0)] = Complex::new(0.3, -0.7);
        m[(1, 2)] = Complex::new(0.0, -1.1);
        m[(2, 1)] = Complex::new(0.0, 1.1);
        let s = eig_hermitian(&m, true).unwrap();
        assert!(s.reconstruct().unwrap().max_abs_diff(&m) < 1e-13);
        let again = eig_hermitian(&m, true).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn single_precision_backend() {
        let m = CMatrix::<f32>::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let s = eig_hermitian(&m, false).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-5);
        assert!((s.eigenvalues[1] - 3.0).abs() < 1e-5);
    }
}
