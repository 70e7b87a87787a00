//! Reduced states, von Neumann entropy (base 2) and the eigenvalue and
//! entropy floors for states supported on the antisymmetric subspace.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::antisym::{a_factors, check_dimension, check_power, embed_coordinates, AntisymBasis};
use crate::budget::{saturating_pow, SizeBudget};
use crate::certificates::lambda_tilde;
use crate::channel::{lambda_map, map_tensor_power};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, DimSignature};
use crate::scalar::Real;
use crate::state::{DensityMatrix, Ket};

/// Reduction of an `N`-copy bipartite ket (interleaved signature
/// `[d; 2N]`) onto `A₁…A_N`.
pub fn reduced_state<T: Real>(psi: &Ket<T>, n: usize) -> Result<DensityMatrix<T>> {
    check_power(n)?;
    let dims = psi.sig().factor_dims();
    let d = dims[0];
    if dims.len() != 2 * n || dims.iter().any(|&f| f != d) {
        return Err(Error::SignatureMismatch {
            signature: dims.to_vec(),
            side: psi.dim(),
        });
    }
    if !psi.is_normalized(T::tol(1e-10)) {
        return Err(Error::NotNormalized {
            norm: psi.norm().to_f64().unwrap_or(f64::NAN),
        });
    }
    let rho = psi.reduced(&a_factors(n))?;
    DensityMatrix::new(rho, DimSignature::new(vec![d; n])?)
}

/// Same as [`reduced_state`] for a ket given by its `D'^N` coordinates.
pub fn reduced_state_from_coordinates<T: Real>(
    coords: &[Complex<T>],
    d: usize,
    n: usize,
    budget: &SizeBudget,
) -> Result<DensityMatrix<T>> {
    reduced_state(&embed_coordinates(coords, d, n, budget)?, n)
}

/// `−Σ λ log₂ λ` over a spectrum.
///
/// Eigenvalues in `[−1e-9, 0)` count as zero; anything below that, or above
/// `1 + 1e-9`, is rejected.
pub fn entropy_from_eigenvalues<T: Real>(eigs: &[T]) -> Result<T> {
    let slack = T::tol(1e-9);
    let mut h = T::zero();
    for &l in eigs {
        if l < -slack || l > T::one() + slack {
            return Err(Error::InvalidDensity(format!("eigenvalue {l:e} outside [0, 1]")));
        }
        if l > T::zero() {
            h -= l * l.log2();
        }
    }
    Ok(h)
}

pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    entropy_from_eigenvalues(&rho.spectrum(false).eigenvalues)
}

/// `((d−1)/d)^N`.
pub fn eigenvalue_cap<T: Real>(d: usize, n: usize) -> T {
    lambda_tilde::<T>(d).powi(n as i32)
}

/// `N·log₂(d/(d−1))`.
pub fn entropy_floor<T: Real>(d: usize, n: usize) -> T {
    T::lit(n as f64) * (T::lit(d as f64) / T::lit((d - 1) as f64)).log2()
}

/// `log₂(d/(d−1))`, the per-copy entanglement-cost floor.
pub fn ec_lower_bound<T: Real>(d: usize) -> T {
    entropy_floor(d, 1)
}

/// Floors implied for a state supported on `N` copies of the antisymmetric
/// subspace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CostBounds<T> {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub ec_lower: T,
    pub ef_floor: T,
}

pub fn cost_bounds<T: Real>(d: usize, n: usize) -> Result<CostBounds<T>> {
    check_dimension(d)?;
    check_power(n)?;
    Ok(CostBounds {
        d,
        n,
        ec_lower: ec_lower_bound(d),
        ef_floor: entropy_floor(d, n),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BoundReport<T> {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub max_reduced_eig: T,
    pub entropy: T,
    pub eig_cap: T,
    pub entropy_floor: T,
    pub eig_bound_holds: bool,
    pub entropy_bound_holds: bool,
    pub pass: bool,
}

impl<T: Real> BoundReport<T> {
    /// Builds the verdicts from raw values; the entropy tolerance is fixed at
    /// 1e-8 bits.
    pub fn from_values(d: usize, n: usize, max_reduced_eig: T, entropy: T, tol: T) -> Self {
        let eig_cap = eigenvalue_cap(d, n);
        let floor = entropy_floor(d, n);
        let eig_bound_holds = max_reduced_eig <= eig_cap + tol;
        let entropy_bound_holds = entropy >= floor - T::tol(1e-8);
        Self {
            d,
            n,
            max_reduced_eig,
            entropy,
            eig_cap,
            entropy_floor: floor,
            eig_bound_holds,
            entropy_bound_holds,
            pass: eig_bound_holds && entropy_bound_holds,
        }
    }

    pub const CSV_HEADER: &'static str = "d,N,max_eig,cap,entropy,floor,pass";
}

/// Checks `Λ^⊗N(X) ≤ ((d−1)/d)^N·id` for a density matrix `X` on `D'^N`
/// coordinates. The reported entropy is that of `Λ^⊗N(X)`.
pub fn check_eigenvalue_bound<T: Real>(
    x: &DensityMatrix<T>,
    d: usize,
    n: usize,
    tol: T,
    budget: &SizeBudget,
) -> Result<BoundReport<T>> {
    check_dimension(d)?;
    check_power(n)?;
    let p = AntisymBasis::new(d)?.dim();
    let side = saturating_pow(p, n);
    if x.dim() != side {
        return Err(Error::Unsupported(format!(
            "expected a {side}x{side} operator on D'^{n} (d = {d}), got {0}x{0}",
            x.dim()
        )));
    }
    let power = map_tensor_power(&lambda_map::<T>(d)?, n, budget)?;
    let reduced = power.apply(x.matrix())?;
    let spec = eig_hermitian(&reduced, false)?;
    let entropy = entropy_from_eigenvalues(&spec.eigenvalues)?;
    Ok(BoundReport::from_values(d, n, spec.max(), entropy, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antisym::{antisym_ket, counterexample_coordinates, counterexample_state};
    use crate::linalg::CMatrix;

    #[test]
    fn single_pair_reduction() {
        let rho = reduced_state(&antisym_ket::<f64>(1, 2, 3).unwrap(), 1).unwrap();
        assert!(rho.matrix().max_abs_diff(&CMatrix::from_real_diagonal(&[0.5, 0.5, 0.0])) < 1e-15);
        assert!((von_neumann_entropy(&rho).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn counterexample_reduction() {
        let rho = reduced_state(&counterexample_state::<f64>(), 2).unwrap();
        assert_eq!(rho.dim(), 9);
        let spec = rho.spectrum(false);
        assert!((spec.max() - 1.0 / 3.0).abs() < 1e-12);
        let h = von_neumann_entropy(&rho).unwrap();
        assert!(h >= entropy_floor::<f64>(3, 2));
    }

    #[test]
    fn product_state_has_zero_entropy() {
        let sig = DimSignature::bipartite_copies(2, 1).unwrap();
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        let ket = Ket::new(vec![zero, one, zero, zero], sig).unwrap();
        assert_eq!(von_neumann_entropy(&reduced_state(&ket, 1).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn rejects_unnormalized_and_malformed() {
        let sig = DimSignature::bipartite_copies(2, 1).unwrap();
        let ket = Ket::new(vec![Complex::new(1.0f64, 0.0); 4], sig).unwrap();
        assert!(matches!(reduced_state(&ket, 1), Err(Error::NotNormalized { .. })));
        let odd = Ket::new(vec![Complex::new(1.0f64, 0.0); 3], DimSignature::new(vec![3]).unwrap()).unwrap();
        assert!(reduced_state(&odd, 1).is_err());
    }

    #[test]
    fn entropy_clamping() {
        assert_eq!(entropy_from_eigenvalues(&[-5e-10f64, 1.0]).unwrap(), 0.0);
        assert!(entropy_from_eigenvalues(&[-1e-6f64, 1.0]).is_err());
        assert!(entropy_from_eigenvalues(&[1.1f64]).is_err());
        assert!((entropy_from_eigenvalues(&[0.5f64, 0.5, 0.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn floors() {
        assert!((entropy_floor::<f64>(3, 1) - 0.584_962_500_721_156_2).abs() < 1e-15);
        assert_eq!(entropy_floor::<f64>(2, 1), 1.0);
        assert!((entropy_floor::<f64>(3, 2) - 1.169_925_001_442_312_4).abs() < 1e-15);
        assert!((ec_lower_bound::<f64>(10) - (10f64 / 9.0).log2()).abs() < 1e-16);
        assert!((ec_lower_bound::<f64>(10) - 0.152_003).abs() < 1e-6);
        let b = cost_bounds::<f64>(3, 2).unwrap();
        assert!((b.ef_floor - 2.0 * b.ec_lower).abs() < 1e-15);
    }

    #[test]
    fn eigenvalue_bound_examples() {
        let budget = SizeBudget::default();
        let sig1 = DimSignature::new(vec![3]).unwrap();
        let x = DensityMatrix::new(CMatrix::<f64>::unit(3, 3, 0, 0), sig1).unwrap();
        let r = check_eigenvalue_bound(&x, 3, 1, 1e-10f64, &budget).unwrap();
        assert!((r.max_reduced_eig - 0.5).abs() < 1e-15 && r.pass);

        let coords = counterexample_coordinates::<f64>();
        let sig2 = DimSignature::new(vec![3, 3]).unwrap();
        let x = DensityMatrix::new(CMatrix::outer(&coords, &coords), sig2).unwrap();
        let r = check_eigenvalue_bound(&x, 3, 2, 1e-10, &budget).unwrap();
        assert!((r.max_reduced_eig - 1.0 / 3.0).abs() < 1e-12);
        assert!((r.eig_cap - 4.0 / 9.0).abs() < 1e-15 && r.pass);

        let wrong = DensityMatrix::<f64>::maximally_mixed(DimSignature::new(vec![4]).unwrap());
        assert!(matches!(
            check_eigenvalue_bound(&wrong, 3, 1, 1e-10, &budget),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn two_reduction_paths_agree() {
        let budget = SizeBudget::default();
        let coords: Vec<Complex<f64>> = (0..9)
            .map(|k| Complex::new((k as f64 * 1.3).sin(), (k as f64 * 0.4).cos()))
            .collect();
        let norm = crate::linalg::vec_norm(&coords);
        let coords: Vec<_> = coords.iter().map(|z| z / norm).collect();
        let direct = reduced_state_from_coordinates(&coords, 3, 2, &budget).unwrap();
        let via_map = map_tensor_power(&lambda_map::<f64>(3).unwrap(), 2, &budget)
            .unwrap()
            .apply(&CMatrix::outer(&coords, &coords))
            .unwrap();
        assert!(direct.matrix().max_abs_diff(&via_map) < 1e-12);
    }
}
