//! Linear maps between matrix spaces, stored as superoperator matrices.
//!
//! With the row-major vectorization `vec(X)[a·n + b] = X[a, b]`, a map acts
//! as `vec(Φ(X)) = L·vec(X) + A·vec(X†)`. The second term carries
//! conjugate-linear maps such as `X ↦ Λ(X†)`; purely linear maps have no `A`.
//!
//! Choi matrices use input indices as the outer block index and output
//! indices as the inner one: block `(I, J)` is `Φ(𝔈_IJ)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::antisym::{check_dimension, check_power, embedding_isometry, AntisymBasis};
use crate::budget::{saturating_pow, SizeBudget};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, partial_trace, CMatrix, DimSignature, Spectrum};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ChannelMap<T> {
    in_side: usize,
    out_side: usize,
    linear: CMatrix<T>,
    adjoint_part: Option<CMatrix<T>>,
}

/// Block matrix `[Φ(𝔈_IJ)]_{I,J}` together with its layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ChoiMatrix<T> {
    pub matrix: CMatrix<T>,
    pub in_side: usize,
    pub out_side: usize,
}

impl<T: Real> ChoiMatrix<T> {
    pub fn side(&self) -> usize {
        self.matrix.rows()
    }

    /// The `(I, J)` block, i.e. `Φ(𝔈_IJ)`.
    pub fn block(&self, i: usize, j: usize) -> CMatrix<T> {
        let o = self.out_side;
        CMatrix::from_fn(o, o, |c, e| self.matrix[(i * o + c, j * o + e)])
    }

    pub fn spectrum(&self) -> Result<Spectrum<T>> {
        eig_hermitian(&self.matrix, false)
    }
}

/// Complete-positivity verdict with its Choi eigenvalue certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CpCertificate<T> {
    pub is_cp: bool,
    pub min_choi_eig: T,
    pub threshold: T,
    pub choi_side: usize,
}

fn vec_index(side: usize, r: usize, c: usize) -> usize {
    r * side + c
}

impl<T: Real> ChannelMap<T> {
    /// Wraps a linear superoperator of shape `out² × in²`.
    pub fn from_superoperator(in_side: usize, out_side: usize, linear: CMatrix<T>) -> Result<Self> {
        Self::check_superop_shape(in_side, out_side, &linear)?;
        Ok(Self {
            in_side,
            out_side,
            linear,
            adjoint_part: None,
        })
    }

    /// Map `X ↦ A·vec(X†)`.
    pub fn from_adjoint_superoperator(
        in_side: usize,
        out_side: usize,
        adjoint: CMatrix<T>,
    ) -> Result<Self> {
        Self::check_superop_shape(in_side, out_side, &adjoint)?;
        Ok(Self {
            in_side,
            out_side,
            linear: CMatrix::zeros(out_side * out_side, in_side * in_side),
            adjoint_part: Some(adjoint),
        })
    }

    fn check_superop_shape(in_side: usize, out_side: usize, s: &CMatrix<T>) -> Result<()> {
        if (s.rows(), s.cols()) != (out_side * out_side, in_side * in_side) {
            return Err(Error::ShapeMismatch {
                expected: format!("{}x{}", out_side * out_side, in_side * in_side),
                actual: format!("{}x{}", s.rows(), s.cols()),
            });
        }
        Ok(())
    }

    /// Tabulates a linear action on the matrix units.
    pub fn from_linear_action(
        in_side: usize,
        out_side: usize,
        mut action: impl FnMut(&CMatrix<T>) -> Result<CMatrix<T>>,
    ) -> Result<Self> {
        let mut s = CMatrix::zeros(out_side * out_side, in_side * in_side);
        for a in 0..in_side {
            for b in 0..in_side {
                let y = action(&CMatrix::unit(in_side, in_side, a, b))?;
                let col = vec_index(in_side, a, b);
                for c in 0..out_side {
                    for e in 0..out_side {
                        s[(vec_index(out_side, c, e), col)] = y[(c, e)];
                    }
                }
            }
        }
        Self::from_superoperator(in_side, out_side, s)
    }

    pub fn in_side(&self) -> usize {
        self.in_side
    }

    pub fn out_side(&self) -> usize {
        self.out_side
    }

    pub fn linear_part(&self) -> &CMatrix<T> {
        &self.linear
    }

    pub fn adjoint_part(&self) -> Option<&CMatrix<T>> {
        self.adjoint_part.as_ref()
    }

    pub fn is_linear(&self) -> bool {
        self.adjoint_part.is_none()
    }

    pub fn apply(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        if (x.rows(), x.cols()) != (self.in_side, self.in_side) {
            return Err(Error::ShapeMismatch {
                expected: format!("{0}x{0}", self.in_side),
                actual: format!("{}x{}", x.rows(), x.cols()),
            });
        }
        let mut y = self.linear.matvec(x.as_slice());
        if let Some(a) = &self.adjoint_part {
            let ya = a.matvec(x.adjoint().as_slice());
            y.iter_mut().zip(ya).for_each(|(p, q)| *p += q);
        }
        CMatrix::from_vec(self.out_side, self.out_side, y)
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            in_side: self.in_side,
            out_side: self.out_side,
            linear: self.linear.scale(s),
            adjoint_part: self.adjoint_part.as_ref().map(|a| a.scale(s)),
        }
    }

    /// `Σ cₖ Φₖ` over maps of identical shape.
    pub fn linear_combination(terms: &[(T, &Self)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty linear combination".into()))?;
        let (in_side, out_side) = (first.in_side, first.out_side);
        let mut linear = CMatrix::zeros(out_side * out_side, in_side * in_side);
        let mut adjoint: Option<CMatrix<T>> = None;
        for (coef, map) in terms {
            if (map.in_side, map.out_side) != (in_side, out_side) {
                return Err(Error::ShapeMismatch {
                    expected: format!("map {in_side}→{out_side}"),
                    actual: format!("map {}→{}", map.in_side, map.out_side),
                });
            }
            linear = linear.add(&map.linear.scale(*coef));
            if let Some(a) = &map.adjoint_part {
                let term = a.scale(*coef);
                adjoint = Some(match adjoint {
                    Some(acc) => acc.add(&term),
                    None => term,
                });
            }
        }
        Ok(Self {
            in_side,
            out_side,
            linear,
            adjoint_part: adjoint,
        })
    }

    /// The linear map agreeing with `self` on every matrix unit `𝔈_ab`.
    ///
    /// Since `𝔈_ab† = 𝔈_ba`, the conjugate-linear part becomes `A∘T`. Both maps
    /// share the same Choi matrix.
    pub fn matrix_unit_extension(&self) -> Self {
        let mut linear = self.linear.clone();
        if let Some(a) = &self.adjoint_part {
            let n = self.in_side;
            for row in 0..linear.rows() {
                for p in 0..n {
                    for q in 0..n {
                        linear[(row, vec_index(n, p, q))] += a[(row, vec_index(n, q, p))];
                    }
                }
            }
        }
        Self {
            in_side: self.in_side,
            out_side: self.out_side,
            linear,
            adjoint_part: None,
        }
    }

    /// `Φ ⊗ Ψ`, formed from the matrix-unit extensions of both factors so
    /// that `choi(Φ ⊗ Ψ)` is the reordered `choi(Φ) ⊗ choi(Ψ)`.
    pub fn tensor(&self, other: &Self, budget: &SizeBudget) -> Result<Self> {
        let (i1, o1, i2, o2) = (self.in_side, self.out_side, other.in_side, other.out_side);
        let (in_side, out_side) = (i1 * i2, o1 * o2);
        SizeBudget::check("superoperator rows", out_side * out_side, budget.max_superop_side)?;
        SizeBudget::check("superoperator columns", in_side * in_side, budget.max_superop_side)?;
        let s1 = self.matrix_unit_extension().linear;
        let s2 = other.matrix_unit_extension().linear;
        let zero = Complex::new(T::zero(), T::zero());
        let mut s = CMatrix::zeros(out_side * out_side, in_side * in_side);
        for r1 in 0..s1.rows() {
            let (c1, e1) = (r1 / o1, r1 % o1);
            for k1 in 0..s1.cols() {
                let v1 = s1[(r1, k1)];
                if v1 == zero {
                    continue;
                }
                let (a1, b1) = (k1 / i1, k1 % i1);
                for r2 in 0..s2.rows() {
                    let (c2, e2) = (r2 / o2, r2 % o2);
                    let row = vec_index(out_side, c1 * o2 + c2, e1 * o2 + e2);
                    for k2 in 0..s2.cols() {
                        let v2 = s2[(r2, k2)];
                        if v2 == zero {
                            continue;
                        }
                        let (a2, b2) = (k2 / i2, k2 % i2);
                        let col = vec_index(in_side, a1 * i2 + a2, b1 * i2 + b2);
                        s[(row, col)] += v1 * v2;
                    }
                }
            }
        }
        Self::from_superoperator(in_side, out_side, s)
    }

    pub fn choi(&self) -> ChoiMatrix<T> {
        let (n, o) = (self.in_side, self.out_side);
        let m = CMatrix::from_fn(n * o, n * o, |r, c| {
            let (i, ci) = (r / o, r % o);
            let (j, ej) = (c / o, c % o);
            let row = vec_index(o, ci, ej);
            let mut z = self.linear[(row, vec_index(n, i, j))];
            if let Some(a) = &self.adjoint_part {
                z += a[(row, vec_index(n, j, i))];
            }
            z
        });
        ChoiMatrix {
            matrix: m,
            in_side: n,
            out_side: o,
        }
    }

    /// Choi criterion: CP iff the Choi matrix is positive semidefinite.
    pub fn is_cp(&self, tol: T) -> Result<CpCertificate<T>> {
        let choi = self.choi();
        let spec = choi.spectrum()?;
        let scale = spec.max_abs().max(T::one());
        let threshold = -tol * scale;
        let min = spec.min();
        Ok(CpCertificate {
            is_cp: min >= threshold,
            min_choi_eig: min,
            threshold,
            choi_side: choi.side(),
        })
    }
}

/// `Λ : 𝔐(D') → 𝔐(D)`, `X ↦ Tr_B Σ X_IJ |I⟩⟨J|`.
pub fn lambda_map<T: Real>(d: usize) -> Result<ChannelMap<T>> {
    check_dimension(d)?;
    let p = AntisymBasis::new(d)?.dim();
    let v = embedding_isometry::<T>(d, 1, &SizeBudget::default())?;
    let sig = DimSignature::bipartite_copies(d, 1)?;
    ChannelMap::from_linear_action(p, d, |x| {
        let embedded = v.matmul(x).matmul(&v.adjoint());
        partial_trace(&embedded, &sig, &[0])
    })
}

/// `M† : X ↦ Λ(X†)`.
pub fn lambda_dagger_map<T: Real>(d: usize) -> Result<ChannelMap<T>> {
    let lambda = lambda_map::<T>(d)?;
    ChannelMap::from_adjoint_superoperator(lambda.in_side, lambda.out_side, lambda.linear)
}

/// `x·Λ + y·M†`.
pub fn lambda_combination<T: Real>(d: usize, x: T, y: T) -> Result<ChannelMap<T>> {
    let lambda = lambda_map::<T>(d)?;
    let dagger = lambda_dagger_map::<T>(d)?;
    ChannelMap::linear_combination(&[(x, &lambda), (y, &dagger)])
}

/// `M̃ = (1/d)·Λ + ((d−1)/d)·M†`.
pub fn tilde_map<T: Real>(d: usize) -> Result<ChannelMap<T>> {
    check_dimension(d)?;
    let df = T::lit(d as f64);
    lambda_combination(d, T::one() / df, (df - T::one()) / df)
}

/// `Id# : X ↦ (Tr X)·id`.
pub fn id_sharp<T: Real>(in_side: usize, out_side: usize) -> Result<ChannelMap<T>> {
    if in_side == 0 || out_side == 0 {
        return Err(Error::InvalidParameter("map sides must be ≥ 1".into()));
    }
    let one = Complex::new(T::one(), T::zero());
    let mut s = CMatrix::zeros(out_side * out_side, in_side * in_side);
    for a in 0..in_side {
        for c in 0..out_side {
            s[(vec_index(out_side, c, c), vec_index(in_side, a, a))] = one;
        }
    }
    ChannelMap::from_superoperator(in_side, out_side, s)
}

/// `Φ^⊗N`. For `N = 1` this is `Φ` itself; higher powers are built with
/// [`ChannelMap::tensor`].
pub fn map_tensor_power<T: Real>(
    map: &ChannelMap<T>,
    n: usize,
    budget: &SizeBudget,
) -> Result<ChannelMap<T>> {
    check_power(n)?;
    let in_side = saturating_pow(map.in_side, n);
    let out_side = saturating_pow(map.out_side, n);
    SizeBudget::check(
        "superoperator rows",
        out_side.saturating_mul(out_side),
        budget.max_superop_side,
    )?;
    SizeBudget::check(
        "superoperator columns",
        in_side.saturating_mul(in_side),
        budget.max_superop_side,
    )?;
    let mut acc = map.clone();
    for _ in 1..n {
        acc = acc.tensor(map, budget)?;
    }
    Ok(acc)
}

pub fn choi<T: Real>(map: &ChannelMap<T>) -> ChoiMatrix<T> {
    map.choi()
}

pub fn is_cp<T: Real>(map: &ChannelMap<T>, tol: T) -> Result<CpCertificate<T>> {
    map.is_cp(tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = CMatrix<f64>;

    fn half_unit(d: usize, r: usize, c: usize) -> M {
        M::unit(d, d, r, c).scale(0.5)
    }

    #[test]
    fn lambda_on_basis_units_d3() {
        let lam = lambda_map::<f64>(3).unwrap();
        // D' order: (1,2), (1,3), (2,3)
        let y = lam.apply(&M::unit(3, 3, 0, 0)).unwrap();
        assert!(y.max_abs_diff(&M::from_real_diagonal(&[0.5, 0.5, 0.0])) < 1e-15);
        let y = lam.apply(&M::unit(3, 3, 0, 1)).unwrap();
        assert!(y.max_abs_diff(&half_unit(3, 1, 2)) < 1e-15);
    }

    #[test]
    fn dagger_on_basis_unit_d3() {
        let dag = lambda_dagger_map::<f64>(3).unwrap();
        let y = dag.apply(&M::unit(3, 3, 0, 1)).unwrap();
        assert!(y.max_abs_diff(&half_unit(3, 2, 1)) < 1e-15);
        assert!(!dag.is_linear());
    }

    #[test]
    fn id_sharp_action_and_choi() {
        let s = id_sharp::<f64>(3, 3).unwrap();
        assert!(s.apply(&M::unit(3, 3, 0, 0)).unwrap().max_abs_diff(&M::identity(3)) < 1e-15);
        let traceless = M::from_real_rows(&[&[1.0, 2.0, 0.0], &[0.0, -1.0, 0.0], &[3.0, 0.0, 0.0]]);
        assert_eq!(s.apply(&traceless).unwrap().max_abs(), 0.0);
        let choi = s.choi();
        assert_eq!(choi.matrix, M::identity(9));
        assert!(s.is_cp(1e-9).unwrap().is_cp);
    }

    #[test]
    fn identity_map_choi_is_maximally_entangled() {
        let id = ChannelMap::<f64>::from_linear_action(2, 2, |x| Ok(x.clone())).unwrap();
        let choi = id.choi();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(choi.block(i, j), M::unit(2, 2, i, j));
            }
        }
        let spec = choi.spectrum().unwrap();
        for (v, e) in spec.eigenvalues.iter().zip([0.0, 0.0, 0.0, 2.0]) {
            assert!((v - e).abs() < 1e-14);
        }
    }

    #[test]
    fn choi_of_lambda_d2() {
        let c = lambda_map::<f64>(2).unwrap().choi();
        assert!(c.matrix.max_abs_diff(&M::identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn cp_verdicts() {
        let lam = lambda_map::<f64>(3).unwrap();
        let cert = lam.is_cp(1e-9).unwrap();
        assert!(cert.is_cp && cert.min_choi_eig.abs() < 1e-12);
        let tilde = tilde_map::<f64>(3).unwrap();
        let cert = tilde.is_cp(1e-9).unwrap();
        assert!(!cert.is_cp);
        assert!((cert.min_choi_eig + 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_power_shapes_and_budget() {
        let tilde = tilde_map::<f64>(3).unwrap();
        let budget = SizeBudget::default();
        assert_eq!(map_tensor_power(&tilde, 1, &budget).unwrap(), tilde);
        let sq = map_tensor_power(&tilde, 2, &budget).unwrap();
        assert_eq!(sq.choi().side(), 81);
        let tight = SizeBudget {
            max_superop_side: 80,
            ..budget
        };
        assert!(matches!(
            map_tensor_power(&tilde, 2, &tight),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(map_tensor_power(&tilde, 0, &budget).is_err());
    }

    #[test]
    fn apply_rejects_wrong_shape() {
        let lam = lambda_map::<f64>(3).unwrap();
        assert!(lam.apply(&M::identity(4)).is_err());
    }
}
