//! Pure and mixed states carrying their tensor-factor signature.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, inner, permute_vector, vec_norm, CMatrix, DimSignature, Spectrum};
use crate::scalar::Real;

/// Complex amplitude vector over a tensor-product space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Ket<T> {
    amplitudes: Vec<Complex<T>>,
    sig: DimSignature,
}

impl<T: Real> Ket<T> {
    pub fn new(amplitudes: Vec<Complex<T>>, sig: DimSignature) -> Result<Self> {
        sig.check_side(amplitudes.len())?;
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        Ok(Self { amplitudes, sig })
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn sig(&self) -> &DimSignature {
        &self.sig
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> T {
        vec_norm(&self.amplitudes)
    }

    pub fn is_normalized(&self, tol: T) -> bool {
        (self.norm() - T::one()).abs() <= tol
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n <= T::epsilon() {
            return Err(Error::NotNormalized {
                norm: n.to_f64().unwrap_or(f64::NAN),
            });
        }
        self.amplitudes.iter_mut().for_each(|z| *z = *z / n);
        Ok(self)
    }

    pub fn inner(&self, other: &Self) -> Complex<T> {
        inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|&a| other.amplitudes.iter().map(move |&b| a * b))
            .collect();
        Self {
            amplitudes,
            sig: self.sig.concat(&other.sig),
        }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> CMatrix<T> {
        CMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let (amplitudes, sig) = permute_vector(&self.amplitudes, &self.sig, perm)?;
        Ok(Self { amplitudes, sig })
    }

    /// Reduced operator on the `keep` factors, `Tr_rest |ψ⟩⟨ψ|`, computed by
    /// reshaping the amplitudes rather than forming the full projector.
    pub fn reduced(&self, keep: &[usize]) -> Result<CMatrix<T>> {
        let mut kept = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if kept.is_empty() || kept.len() != keep.len() || kept.iter().any(|&k| k >= self.sig.len()) {
            return Err(Error::InvalidFactors(format!(
                "keep set {keep:?} is not a non-empty subset of 0..{}",
                self.sig.len()
            )));
        }
        let traced: Vec<usize> = (0..self.sig.len()).filter(|f| !kept.contains(f)).collect();
        let keep_offs = self.sig.offsets(&kept);
        let trace_offs = self.sig.offsets(&traced);
        Ok(reduce_offsets(&self.amplitudes, &keep_offs, &trace_offs))
    }
}

/// `ρ[r, c] = Σ_t ψ[r + t] ψ*[c + t]` over precomputed index offsets.
pub(crate) fn reduce_offsets<T: Real>(
    amps: &[Complex<T>],
    keep_offs: &[usize],
    trace_offs: &[usize],
) -> CMatrix<T> {
    let n = keep_offs.len();
    let mut out = CMatrix::zeros(n, n);
    for r in 0..n {
        for c in r..n {
            let z: Complex<T> = trace_offs
                .iter()
                .map(|&t| amps[keep_offs[r] + t] * amps[keep_offs[c] + t].conj())
                .sum();
            out[(r, c)] = z;
            out[(c, r)] = z.conj();
        }
    }
    out
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DensityMatrix<T> {
    matrix: CMatrix<T>,
    sig: DimSignature,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity (1e-10), trace (1e-10) and positivity (−1e-9).
    pub fn new(matrix: CMatrix<T>, sig: DimSignature) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        sig.check_side(matrix.rows())?;
        let herm = matrix.hermiticity_violation();
        if herm > T::tol(1e-10) {
            return Err(Error::InvalidDensity(format!("not Hermitian (violation {herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > T::tol(1e-10) || tr.im.abs() > T::tol(1e-10) {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let min = eig_hermitian(&matrix, false)?.min();
        if min < -T::tol(1e-9) {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
            sig,
        })
    }

    /// `|ψ⟩⟨ψ|` for a unit ket.
    pub fn from_ket(ket: &Ket<T>) -> Result<Self> {
        if !ket.is_normalized(T::tol(1e-10)) {
            return Err(Error::NotNormalized {
                norm: ket.norm().to_f64().unwrap_or(f64::NAN),
            });
        }
        Self::new(ket.projector(), ket.sig().clone())
    }

    /// `I / dim`.
    pub fn maximally_mixed(sig: DimSignature) -> Self {
        let n = sig.total();
        Self {
            matrix: CMatrix::identity(n).scale(T::one() / T::lit(n as f64)),
            sig,
        }
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn sig(&self) -> &DimSignature {
        &self.sig
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn spectrum(&self, vectors: bool) -> Spectrum<T> {
        eig_hermitian(&self.matrix, vectors).expect("validated Hermitian")
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::partial_trace;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn reduced_matches_dense_partial_trace() {
        let sig = DimSignature::new(vec![2, 3, 2]).unwrap();
        let amps: Vec<_> = (0..12).map(|k| c((k as f64).sin(), (k as f64 * 0.7).cos())).collect();
        let ket = Ket::new(amps, sig.clone()).unwrap().normalized().unwrap();
        for keep in [vec![0], vec![1], vec![0, 2], vec![1, 2]] {
            let fast = ket.reduced(&keep).unwrap();
            let dense = partial_trace(&ket.projector(), &sig, &keep).unwrap();
            assert!(fast.max_abs_diff(&dense) < 1e-14, "keep {keep:?}");
        }
    }

    #[test]
    fn density_validation() {
        let sig = DimSignature::new(vec![2]).unwrap();
        assert!(DensityMatrix::new(CMatrix::<f64>::identity(2).scale(0.5), sig.clone()).is_ok());
        assert!(DensityMatrix::new(CMatrix::<f64>::identity(2), sig.clone()).is_err());
        let neg = CMatrix::<f64>::from_real_diagonal(&[1.5, -0.5]);
        assert!(DensityMatrix::new(neg, sig.clone()).is_err());
        let unnormalized = Ket::new(vec![c(1.0, 0.0), c(1.0, 0.0)], sig).unwrap();
        assert!(DensityMatrix::from_ket(&unnormalized).is_err());
    }

    #[test]
    fn zero_ket_cannot_be_normalized() {
        let sig = DimSignature::new(vec![2]).unwrap();
        let zero = Ket::<f64>::new(vec![c(0.0, 0.0); 2], sig).unwrap();
        assert!(zero.normalized().is_err());
    }
}
