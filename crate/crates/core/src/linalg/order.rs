use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{eig_hermitian, CMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Outcome of a positivity test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PsdWitness<T> {
    pub is_psd: bool,
    pub min_eigenvalue: T,
    /// The acceptance threshold `−tol·max(1, ‖M‖₂)` actually applied.
    pub threshold: T,
    /// Eigenvector of the most negative eigenvalue, present when the test fails.
    pub offending_vector: Option<Vec<Complex<T>>>,
}

/// Positive-semidefiniteness with a relative tolerance.
pub fn is_psd<T: Real>(m: &CMatrix<T>, tol: T) -> Result<PsdWitness<T>> {
    let spec = eig_hermitian(m, true)?;
    let min = spec.min();
    let scale = spec.max_abs().max(T::one());
    let threshold = -tol * scale;
    let is_psd = m.rows() == 0 || min >= threshold;
    let offending_vector = (!is_psd)
        .then(|| spec.eigenvectors.as_ref().map(|u| u.column(0)))
        .flatten();
    Ok(PsdWitness {
        is_psd,
        min_eigenvalue: if m.rows() == 0 { T::zero() } else { min },
        threshold,
        offending_vector,
    })
}

/// Loewner order `A ≤ B`, i.e. `B − A ⪰ 0`.
pub fn matrix_leq<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>, tol: T) -> Result<bool> {
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{}", a.rows(), a.cols()),
            actual: format!("{}x{}", b.rows(), b.cols()),
        });
    }
    Ok(is_psd(&b.sub(a), tol)?.is_psd)
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = CMatrix<f64>;

    #[test]
    fn diagonal_cases() {
        let w = is_psd(&M::from_real_diagonal(&[1.0, 0.0]), 1e-9).unwrap();
        assert!(w.is_psd);
        assert_eq!(w.min_eigenvalue, 0.0);
        assert!(w.offending_vector.is_none());

        let w = is_psd(&M::from_real_diagonal(&[1.0, -1.0]), 1e-9).unwrap();
        assert!(!w.is_psd);
        assert!((w.min_eigenvalue + 1.0).abs() < 1e-15);
        let v = w.offending_vector.unwrap();
        assert!((v[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = M::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(is_psd(&m, 1e-9), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn loewner_order() {
        let a = M::from_real_diagonal(&[1.0, 0.0]);
        assert!(matrix_leq(&a, &a, 1e-9).unwrap());
        assert!(matrix_leq(&a, &M::identity(2), 1e-9).unwrap());
        assert!(!matrix_leq(&M::identity(2), &a, 1e-9).unwrap());
        assert!(matrix_leq(&a, &M::identity(3), 1e-9).is_err());
    }

    #[test]
    fn tolerance_is_relative_to_norm() {
        // −1e-8 against a norm-100 matrix is within 1e-9·100
        let m = M::from_real_diagonal(&[100.0, -1e-8]);
        assert!(is_psd(&m, 1e-9).unwrap().is_psd);
        let m = M::from_real_diagonal(&[1.0, -1e-8]);
        assert!(!is_psd(&m, 1e-9).unwrap().is_psd);
    }
}
