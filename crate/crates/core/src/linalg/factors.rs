//! Tensor-factor bookkeeping: Kronecker products, partial traces and factor
//! permutations. Factor 0 is the most significant index (row-major layout).

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Ordered tensor-factor dimensions of a space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DimSignature(Vec<usize>);

impl DimSignature {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() || factor_dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidFactors(format!(
                "factor dimensions must be positive and non-empty, got {factor_dims:?}"
            )));
        }
        Ok(Self(factor_dims))
    }

    /// `[d, d, …]` with `2n` entries: `n` interleaved copies of `A ⊗ B`.
    pub fn bipartite_copies(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![d; 2 * n])
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut dims = self.0.clone();
        dims.extend_from_slice(&other.0);
        Self(dims)
    }

    /// Row-major strides of each factor.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.0.len()];
        for k in (0..self.0.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.0[k + 1];
        }
        strides
    }

    pub(crate) fn check_side(&self, side: usize) -> Result<()> {
        if self.total() != side {
            return Err(Error::SignatureMismatch {
                signature: self.0.clone(),
                side,
            });
        }
        Ok(())
    }

    pub(crate) fn check_permutation(&self, perm: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.0.len()];
        if perm.len() != self.0.len() {
            return Err(Error::InvalidPermutation(perm.to_vec()));
        }
        for &p in perm {
            if p >= seen.len() || seen[p] {
                return Err(Error::InvalidPermutation(perm.to_vec()));
            }
            seen[p] = true;
        }
        Ok(())
    }

    /// For every index of the permuted space, the matching index of the
    /// original space. `perm[k]` names the original factor placed at `k`.
    pub(crate) fn permutation_map(&self, perm: &[usize]) -> Vec<usize> {
        let old_strides = self.strides();
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.0[p]).collect();
        let total = self.total();
        let mut map = Vec::with_capacity(total);
        let mut digits = vec![0usize; perm.len()];
        for _ in 0..total {
            map.push(
                digits
                    .iter()
                    .zip(perm)
                    .map(|(&digit, &p)| digit * old_strides[p])
                    .sum(),
            );
            for k in (0..digits.len()).rev() {
                digits[k] += 1;
                if digits[k] < new_dims[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
        map
    }

    /// Offsets contributed by the listed factors, enumerated in row-major
    /// order over those factors alone.
    pub(crate) fn offsets(&self, factors: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut offs = vec![0usize];
        for &f in factors {
            let mut next = Vec::with_capacity(offs.len() * self.0[f]);
            for &o in &offs {
                for digit in 0..self.0[f] {
                    next.push(o + digit * strides[f]);
                }
            }
            offs = next;
        }
        offs
    }
}

/// Kronecker product `A ⊗ B`.
pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let (br, bc) = (b.rows(), b.cols());
    CMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Traces out every factor not listed in `keep`; the kept factors stay in
/// their original relative order.
pub fn partial_trace<T: Real>(
    m: &CMatrix<T>,
    sig: &DimSignature,
    keep: &[usize],
) -> Result<CMatrix<T>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    sig.check_side(m.rows())?;
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.iter().any(|&k| k >= sig.len()) {
        return Err(Error::InvalidFactors(format!(
            "keep set {keep:?} is not a subset of 0..{}",
            sig.len()
        )));
    }
    if kept.is_empty() {
        return Err(Error::InvalidFactors("keep set must be non-empty".into()));
    }
    let traced: Vec<usize> = (0..sig.len()).filter(|f| !kept.contains(f)).collect();
    let keep_offs = sig.offsets(&kept);
    let trace_offs = sig.offsets(&traced);
    let n = keep_offs.len();
    Ok(CMatrix::from_fn(n, n, |r, c| {
        let (ro, co) = (keep_offs[r], keep_offs[c]);
        trace_offs
            .iter()
            .map(|&t| m[(ro + t, co + t)])
            .sum::<Complex<T>>()
    }))
}

/// Reorders tensor factors: `P M P†` where `P` sends original factor
/// `perm[k]` to position `k`. Returns the permuted matrix and signature.
pub fn permute_factors<T: Real>(
    m: &CMatrix<T>,
    sig: &DimSignature,
    perm: &[usize],
) -> Result<(CMatrix<T>, DimSignature)> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    sig.check_side(m.rows())?;
    sig.check_permutation(perm)?;
    let map = sig.permutation_map(perm);
    let n = map.len();
    let out = CMatrix::from_fn(n, n, |r, c| m[(map[r], map[c])]);
    let new_sig = DimSignature(perm.iter().map(|&p| sig.0[p]).collect());
    Ok((out, new_sig))
}

/// Vector counterpart of [`permute_factors`].
pub fn permute_vector<T: Real>(
    v: &[Complex<T>],
    sig: &DimSignature,
    perm: &[usize],
) -> Result<(Vec<Complex<T>>, DimSignature)> {
    sig.check_side(v.len())?;
    sig.check_permutation(perm)?;
    let map = sig.permutation_map(perm);
    let new_sig = DimSignature(perm.iter().map(|&p| sig.0[p]).collect());
    Ok((map.iter().map(|&i| v[i]).collect(), new_sig))
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = CMatrix<f64>;

    #[test]
    fn kron_of_identities_and_units() {
        assert_eq!(kron(&M::identity(2), &M::identity(2)), M::identity(4));
        let e = kron(&M::unit(2, 2, 0, 0), &M::unit(2, 2, 1, 1));
        let mut expected = M::zeros(4, 4);
        expected[(1, 1)] = Complex::new(1.0, 0.0);
        assert_eq!(e, expected);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = M::from_real_rows(&[&[0.75, 0.0], &[0.0, 0.25]]);
        let b = M::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let sig = DimSignature::new(vec![2, 2]).unwrap();
        let ab = kron(&a, &b);
        assert!(partial_trace(&ab, &sig, &[0]).unwrap().max_abs_diff(&a) < 1e-15);
        assert!(partial_trace(&ab, &sig, &[1]).unwrap().max_abs_diff(&b) < 1e-15);
        let both = partial_trace(&ab, &sig, &[0, 1]).unwrap();
        assert!(both.max_abs_diff(&ab) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_input() {
        let sig = DimSignature::new(vec![2, 3]).unwrap();
        assert!(matches!(
            partial_trace(&M::identity(5), &sig, &[0]),
            Err(Error::SignatureMismatch { .. })
        ));
        assert!(partial_trace(&M::identity(6), &sig, &[]).is_err());
        assert!(partial_trace(&M::identity(6), &sig, &[2]).is_err());
        assert!(DimSignature::new(vec![2, 0]).is_err());
    }

    #[test]
    fn swap_then_trace_commutes() {
        let sig = DimSignature::new(vec![2, 3]).unwrap();
        let m = M::from_fn(6, 6, |r, c| Complex::new((r * 7 + c) as f64, 0.0));
        let (swapped, swapped_sig) = permute_factors(&m, &sig, &[1, 0]).unwrap();
        assert_eq!(swapped_sig.factor_dims(), &[3, 2]);
        let lhs = partial_trace(&swapped, &swapped_sig, &[1]).unwrap();
        let rhs = partial_trace(&m, &sig, &[0]).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn identity_permutation_and_invalid_permutations() {
        let sig = DimSignature::new(vec![2, 2, 2]).unwrap();
        let m = M::from_fn(8, 8, |r, c| Complex::new(r as f64, c as f64));
        assert_eq!(permute_factors(&m, &sig, &[0, 1, 2]).unwrap().0, m);
        assert!(permute_factors(&m, &sig, &[0, 0, 1]).is_err());
        assert!(permute_factors(&m, &sig, &[0, 1]).is_err());
        assert!(permute_factors(&m, &sig, &[0, 1, 3]).is_err());
    }

    #[test]
    fn permute_vector_moves_basis_states() {
        // |0⟩⊗|1⟩⊗|2⟩ in dims (2,2,3) has index 0*6 + 1*3 + 2 = 5
        let sig = DimSignature::new(vec![2, 2, 3]).unwrap();
        let mut v = vec![Complex::new(0.0, 0.0); 12];
        v[5] = Complex::new(1.0, 0.0);
        // new order (3,2,2) holds factors (2,0,1): |2⟩⊗|0⟩⊗|1⟩ → 2*4 + 0*2 + 1 = 9
        let (w, s) = permute_vector(&v, &sig, &[2, 0, 1]).unwrap();
        assert_eq!(s.factor_dims(), &[3, 2, 2]);
        assert_eq!(w[9], Complex::new(1.0, 0.0));
    }
}
