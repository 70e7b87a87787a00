//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All algorithms are written against [`Real`]; the Hermitian eigensolver is
//! the only piece that needs a concrete backend, so it lives on the trait and
//! is implemented per float type.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar usable throughout the crate (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Eigen-decomposition of a Hermitian matrix stored row-major.
    ///
    /// Returns unsorted eigenvalues and, when requested, the eigenvectors as
    /// the columns of a row-major `n × n` buffer.
    fn hermitian_eigen(
        n: usize,
        data: &[Complex<Self>],
        vectors: bool,
    ) -> (Vec<Self>, Option<Vec<Complex<Self>>>);

    /// Converts an `f64` literal. Panics only for values the type cannot hold.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Tolerance floor for this precision: `max(nominal, 64·ε)`.
    #[inline]
    fn tol(nominal: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(64.0);
        Self::lit(nominal).max(floor)
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn hermitian_eigen(
                n: usize,
                data: &[Complex<Self>],
                vectors: bool,
            ) -> (Vec<Self>, Option<Vec<Complex<Self>>>) {
                if n == 0 {
                    return (Vec::new(), vectors.then(Vec::new));
                }
                let m = nalgebra::DMatrix::<Complex<$t>>::from_row_slice(n, n, data);
                if vectors {
                    let eig = m.symmetric_eigen();
                    let vals = eig.eigenvalues.iter().copied().collect();
                    let mut vecs = Vec::with_capacity(n * n);
                    for r in 0..n {
                        for c in 0..n {
                            vecs.push(eig.eigenvectors[(r, c)]);
                        }
                    }
                    (vals, Some(vecs))
                } else {
                    let vals = m.symmetric_eigenvalues().iter().copied().collect();
                    (vals, None)
                }
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);
