//! The antisymmetric subspace of `C^d ⊗ C^d` and its tensor powers.
//!
//! Pair labels `(i, j)` are 1-based with `i < j`; storage indices are 0-based.
//! States on `N` copies are stored interleaved (`A₁B₁A₂B₂…`), matching the
//! natural Kronecker order of per-copy kets.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::budget::{saturating_pow, SizeBudget};
use crate::error::{Error, Result};
use crate::linalg::{kron, CMatrix, DimSignature};
use crate::scalar::Real;
use crate::state::Ket;

/// The ordered pair basis `D' = {(i, j) : 1 ≤ i < j ≤ d}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AntisymBasis {
    d: usize,
    pairs: Vec<(usize, usize)>,
}

impl AntisymBasis {
    pub fn new(d: usize) -> Result<Self> {
        check_dimension(d)?;
        let pairs = (1..=d)
            .flat_map(|i| (i + 1..=d).map(move |j| (i, j)))
            .collect();
        Ok(Self { d, pairs })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `d(d−1)/2`.
    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Position of the 1-based pair `(i, j)` in the basis.
    pub fn index_of(&self, i: usize, j: usize) -> Option<usize> {
        if i == 0 || i >= j || j > self.d {
            return None;
        }
        // pairs with first index < i come first
        let before: usize = (1..i).map(|k| self.d - k).sum();
        Some(before + (j - i - 1))
    }

    pub fn kets<T: Real>(&self) -> Vec<Ket<T>> {
        self.pairs
            .iter()
            .map(|&(i, j)| antisym_ket(i, j, self.d).expect("valid pair"))
            .collect()
    }
}

pub(crate) fn check_dimension(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("local dimension d must be ≥ 2, got {d}")));
    }
    Ok(())
}

pub(crate) fn check_power(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("tensor power N must be ≥ 1".into()));
    }
    Ok(())
}

/// `(|i⟩_A|j⟩_B − |j⟩_A|i⟩_B)/√2` with 1-based `i < j ≤ d`.
pub fn antisym_ket<T: Real>(i: usize, j: usize, d: usize) -> Result<Ket<T>> {
    check_dimension(d)?;
    if i == 0 || j > d || i >= j {
        return Err(Error::InvalidIndex(format!(
            "pair ({i},{j}) must satisfy 1 ≤ i < j ≤ {d}"
        )));
    }
    let h = T::one() / T::lit(2.0).sqrt();
    let mut amps = vec![Complex::new(T::zero(), T::zero()); d * d];
    amps[(i - 1) * d + (j - 1)] = Complex::new(h, T::zero());
    amps[(j - 1) * d + (i - 1)] = Complex::new(-h, T::zero());
    Ket::new(amps, DimSignature::bipartite_copies(d, 1)?)
}

/// Isometry `V` of shape `(d²)^N × (d(d−1)/2)^N` whose columns are the
/// product kets `|(i₁,j₁)⟩⊗…⊗|(i_N,j_N)⟩`, in lexicographic multi-index
/// order, written in the interleaved factor order.
pub fn embedding_isometry<T: Real>(d: usize, n: usize, budget: &SizeBudget) -> Result<CMatrix<T>> {
    check_dimension(d)?;
    check_power(n)?;
    let basis = AntisymBasis::new(d)?;
    let entries = saturating_pow(basis.dim(), n).saturating_mul(saturating_pow(d * d, n));
    SizeBudget::check("embedding isometry entries", entries, budget.max_isometry_entries)?;

    let mut single = CMatrix::zeros(d * d, basis.dim());
    for (col, ket) in basis.kets::<T>().iter().enumerate() {
        single.set_column(col, ket.amplitudes());
    }
    let mut v = single.clone();
    for _ in 1..n {
        v = kron(&v, &single);
    }
    Ok(v)
}

/// Projector onto the antisymmetric subspace of `C^d ⊗ C^d`.
pub fn antisym_projector<T: Real>(d: usize) -> Result<CMatrix<T>> {
    let v = embedding_isometry::<T>(d, 1, &SizeBudget::default())?;
    Ok(v.matmul(&v.adjoint()))
}

/// Factor permutation taking `A₁B₁…A_NB_N` to `A₁…A_N B₁…B_N`.
pub fn interleaved_to_blocked(n: usize) -> Vec<usize> {
    (0..n).map(|k| 2 * k).chain((0..n).map(|k| 2 * k + 1)).collect()
}

/// Positions of the `A` factors in the interleaved order.
pub fn a_factors(n: usize) -> Vec<usize> {
    (0..n).map(|k| 2 * k).collect()
}

/// Embeds a coordinate vector on `D'^N` into the interleaved full space.
pub fn embed_coordinates<T: Real>(
    coords: &[Complex<T>],
    d: usize,
    n: usize,
    budget: &SizeBudget,
) -> Result<Ket<T>> {
    let v = embedding_isometry::<T>(d, n, budget)?;
    if coords.len() != v.cols() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} coordinates", v.cols()),
            actual: format!("{}", coords.len()),
        });
    }
    Ket::new(v.matvec(coords), DimSignature::bipartite_copies(d, n)?)
}

/// The two-copy `d = 3` state `(1/√3) Σ_{i<j} |(i,j)⟩⊗|(i,j)⟩`, whose
/// reduction onto `A₁A₂` has largest eigenvalue 1/3.
pub fn counterexample_state<T: Real>() -> Ket<T> {
    let basis = AntisymBasis::new(3).expect("d = 3");
    let w = T::one() / T::lit(3.0).sqrt();
    let mut amps = vec![Complex::new(T::zero(), T::zero()); 81];
    for ket in basis.kets::<T>() {
        let doubled = ket.kron(&ket);
        for (a, b) in amps.iter_mut().zip(doubled.amplitudes()) {
            *a += *b * w;
        }
    }
    Ket::new(amps, DimSignature::bipartite_copies(3, 2).expect("valid")).expect("81 amplitudes")
}

/// Coordinates of [`counterexample_state`] on `D'^2`.
pub fn counterexample_coordinates<T: Real>() -> Vec<Complex<T>> {
    let w = T::one() / T::lit(3.0).sqrt();
    let mut coords = vec![Complex::new(T::zero(), T::zero()); 9];
    for k in 0..3 {
        coords[k * 3 + k] = Complex::new(w, T::zero());
    }
    coords
}
