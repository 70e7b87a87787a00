//! Upper bounds on entanglement of formation by local search over
//! decomposition ensembles.
//!
//! With `ρ = Σ_j λ_j |e_j⟩⟨e_j|` of rank `r`, every `m×r` isometry `V`
//! yields the decomposition `|Φ̃_i⟩ = Σ_j V*_ij √λ_j |e_j⟩`. The search moves
//! `V` by Givens rotations acting on pairs of rows, which keeps it isometric.
//! Bipartite structure is read from the signature: factors at even
//! positions are the `A` side.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antisym::{a_factors, embedding_isometry};
use crate::bounds::{entropy_floor, entropy_from_eigenvalues};
use crate::budget::SizeBudget;
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, isometry_deviation, vec_norm, CMatrix, DimSignature};
use crate::sampler::{haar_isometry, StreamRng};
use crate::scalar::Real;
use crate::state::{reduce_offsets, DensityMatrix, Ket};

/// A decomposition `ρ = Σ p_i |Φ_i⟩⟨Φ_i|` into unit kets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Ensemble<T> {
    members: Vec<(T, Ket<T>)>,
    source: DensityMatrix<T>,
}

impl<T: Real> Ensemble<T> {
    /// Checks positive weights summing to one (1e-10), unit members and
    /// reconstruction of `source` (1e-9).
    pub fn new(members: Vec<(T, Ket<T>)>, source: DensityMatrix<T>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidDensity("empty ensemble".into()));
        }
        let mut total = T::zero();
        for (p, ket) in &members {
            if *p <= T::zero() {
                return Err(Error::InvalidDensity(format!("non-positive weight {p:e}")));
            }
            if ket.sig() != source.sig() {
                return Err(Error::SignatureMismatch {
                    signature: ket.sig().factor_dims().to_vec(),
                    side: source.dim(),
                });
            }
            if !ket.is_normalized(T::tol(1e-10)) {
                return Err(Error::NotNormalized {
                    norm: ket.norm().to_f64().unwrap_or(f64::NAN),
                });
            }
            total += *p;
        }
        if (total - T::one()).abs() > T::tol(1e-10) {
            return Err(Error::InvalidDensity(format!("weights sum to {total}")));
        }
        let e = Self { members, source };
        let err = e.reconstruct().max_abs_diff(e.source.matrix());
        if err > T::tol(1e-9) {
            return Err(Error::InvalidDensity(format!("ensemble misses its source by {err:e}")));
        }
        Ok(e)
    }

    pub fn members(&self) -> &[(T, Ket<T>)] {
        &self.members
    }

    pub fn source(&self) -> &DensityMatrix<T> {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        let n = self.source.dim();
        let mut out = CMatrix::zeros(n, n);
        for (p, ket) in &self.members {
            out = out.add(&ket.projector().scale(*p));
        }
        out
    }
}

/// Eigenpairs of `ρ` above the rank threshold, largest first.
struct Support<T> {
    values: Vec<T>,
    vectors: Vec<Vec<Complex<T>>>,
}

fn support<T: Real>(rho: &DensityMatrix<T>) -> Support<T> {
    let spec = rho.spectrum(true);
    let vecs = spec.eigenvectors.as_ref().expect("requested");
    let cut = T::tol(1e-12);
    let (mut values, mut vectors) = (Vec::new(), Vec::new());
    for k in (0..spec.eigenvalues.len()).rev() {
        if spec.eigenvalues[k] > cut {
            values.push(spec.eigenvalues[k]);
            vectors.push(vecs.column(k));
        }
    }
    Support { values, vectors }
}

/// Numerical rank of `ρ`.
pub fn rank<T: Real>(rho: &DensityMatrix<T>) -> usize {
    support(rho).values.len()
}

/// `B = E·diag(√λ)`, the map from conjugated isometry rows to unnormalized
/// members.
fn weighted_basis<T: Real>(s: &Support<T>, dim: usize) -> CMatrix<T> {
    CMatrix::from_fn(dim, s.values.len(), |a, j| s.vectors[j][a] * s.values[j].sqrt())
}

fn check_isometry_shape<T: Real>(v: &CMatrix<T>, r: usize) -> Result<()> {
    if v.cols() != r {
        return Err(Error::ShapeMismatch {
            expected: format!("{r} isometry columns (rank of ρ)"),
            actual: format!("{}", v.cols()),
        });
    }
    if v.rows() < r {
        return Err(Error::EnsembleTooSmall { size: v.rows(), rank: r });
    }
    let deviation = isometry_deviation(v);
    if deviation > T::tol(1e-10) {
        return Err(Error::NotIsometry {
            deviation: deviation.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// The decomposition of `ρ` selected by the `m×r` isometry `V`.
/// Members with zero weight are dropped.
pub fn ensemble_from_isometry<T: Real>(rho: &DensityMatrix<T>, v: &CMatrix<T>) -> Result<Ensemble<T>> {
    let s = support(rho);
    check_isometry_shape(v, s.values.len())?;
    let b = weighted_basis(&s, rho.dim());
    let mut members = Vec::new();
    for i in 0..v.rows() {
        let row: Vec<_> = (0..v.cols()).map(|j| v[(i, j)].conj()).collect();
        let amps = b.matvec(&row);
        let norm = vec_norm(&amps);
        let p = norm * norm;
        if p > T::tol(1e-15) {
            let unit = amps.iter().map(|z| z / norm).collect();
            members.push((p, Ket::new(unit, rho.sig().clone())?));
        }
    }
    Ensemble::new(members, rho.clone())
}

fn bipartite_offsets(sig: &DimSignature) -> Result<(Vec<usize>, Vec<usize>)> {
    if sig.len() % 2 != 0 {
        return Err(Error::InvalidFactors(format!(
            "signature {:?} is not a sequence of A/B pairs",
            sig.factor_dims()
        )));
    }
    let keep = a_factors(sig.len() / 2);
    let rest: Vec<usize> = (0..sig.len()).filter(|f| f % 2 == 1).collect();
    Ok((sig.offsets(&keep), sig.offsets(&rest)))
}

/// Entropy of the `A` reduction of a unit ket, in bits.
fn reduction_entropy<T: Real>(amps: &[Complex<T>], offs: &(Vec<usize>, Vec<usize>)) -> Result<T> {
    let reduced = reduce_offsets(amps, &offs.0, &offs.1);
    entropy_from_eigenvalues(&eig_hermitian(&reduced, false)?.eigenvalues)
}

/// `Σ p_i E(Φ_i)` with `E` the entropy of the `A` reduction.
pub fn average_entanglement<T: Real>(e: &Ensemble<T>) -> Result<T> {
    let offs = bipartite_offsets(e.source.sig())?;
    let mut total = T::zero();
    for (p, ket) in &e.members {
        total += *p * reduction_entropy(ket.amplitudes(), &offs)?;
    }
    Ok(total)
}

/// True iff every member lies in the range of `ρ` up to `tol` in norm.
pub fn range_check<T: Real>(e: &Ensemble<T>, rho: &DensityMatrix<T>, tol: T) -> bool {
    let s = support(rho);
    e.members.iter().all(|(_, ket)| {
        let mut residual = ket.amplitudes().to_vec();
        for v in &s.vectors {
            let c = crate::linalg::inner(v, ket.amplitudes());
            residual.iter_mut().zip(v).for_each(|(r, b)| *r -= *b * c);
        }
        vec_norm(&residual) <= tol
    })
}

/// `V X V†` for `X` on `D'^N` coordinates.
pub fn embed_density<T: Real>(
    x: &DensityMatrix<T>,
    d: usize,
    n: usize,
    budget: &SizeBudget,
) -> Result<DensityMatrix<T>> {
    let v = embedding_isometry::<T>(d, n, budget)?;
    if x.dim() != v.cols() {
        return Err(Error::ShapeMismatch {
            expected: format!("{0}x{0} coordinate operator", v.cols()),
            actual: format!("{0}x{0}", x.dim()),
        });
    }
    let full = v.matmul(x.matrix()).matmul(&v.adjoint());
    DensityMatrix::new(full, DimSignature::bipartite_copies(d, n)?)
}

/// `(d, N)` when `ρ` lives on `N` copies of `C^d ⊗ C^d` and is supported
/// on the antisymmetric subspace of each copy.
pub fn antisymmetric_support<T: Real>(rho: &DensityMatrix<T>, budget: &SizeBudget) -> Result<Option<(usize, usize)>> {
    let dims = rho.sig().factor_dims();
    let d = dims[0];
    if d < 2 || dims.len() % 2 != 0 || dims.iter().any(|&f| f != d) {
        return Ok(None);
    }
    let n = dims.len() / 2;
    let v = embedding_isometry::<T>(d, n, budget)?;
    let weight = v.adjoint().matmul(rho.matrix()).matmul(&v).trace().re;
    Ok(((T::one() - weight).abs() <= T::tol(1e-9)).then_some((d, n)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfOptions {
    /// Ensemble size `m`; `None` means `r²`.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    /// Maximum number of full sweeps per restart.
    pub iterations: usize,
    pub seed: u64,
    /// Initial rotation angle in radians.
    pub step: f64,
    pub min_step: f64,
    pub decay: f64,
    /// A sweep whose relative improvement is below this shrinks the step.
    pub stall_tol: f64,
}

impl Default for EfOptions {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            restarts: 16,
            iterations: 200,
            seed: 0,
            step: 0.5,
            min_step: 1e-6,
            decay: 0.5,
            stall_tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct EfResult<T> {
    pub upper_bound: T,
    /// `N·log₂(d/(d−1))` for states supported on `H₋^⊗N`, otherwise 0.
    pub lower_bound: T,
    pub rank: usize,
    pub ensemble_size: usize,
    pub best_restart: usize,
    pub restart_values: Vec<T>,
    /// Objective after each sweep of the best restart; non-increasing.
    pub trace: Vec<T>,
    pub best_ensemble: Ensemble<T>,
}

struct Search<'a, T> {
    basis: &'a CMatrix<T>,
    offs: &'a (Vec<usize>, Vec<usize>),
}

impl<T: Real> Search<'_, T> {
    fn contribution(&self, row: &[Complex<T>]) -> Result<T> {
        let conj: Vec<_> = row.iter().map(|z| z.conj()).collect();
        let amps = self.basis.matvec(&conj);
        let norm = vec_norm(&amps);
        let p = norm * norm;
        if p <= T::tol(1e-15) {
            return Ok(T::zero());
        }
        let unit: Vec<_> = amps.iter().map(|z| z / norm).collect();
        Ok(p * reduction_entropy(&unit, self.offs)?)
    }

    /// Rotates rows `p`, `q` by angle `t`; `phase` selects the imaginary
    /// generator.
    fn rotate(a: &[Complex<T>], b: &[Complex<T>], t: T, phase: bool) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
        let (c, s) = (t.cos(), t.sin());
        let k = if phase {
            Complex::new(T::zero(), -s)
        } else {
            Complex::new(s, T::zero())
        };
        let ra = a.iter().zip(b).map(|(&x, &y)| x * c - y * k.conj()).collect();
        let rb = a.iter().zip(b).map(|(&x, &y)| x * k + y * c).collect();
        (ra, rb)
    }

    fn descend(&self, mut rows: Vec<Vec<Complex<T>>>, opts: &EfOptions) -> Result<(Vec<Vec<Complex<T>>>, Vec<T>)> {
        let m = rows.len();
        let mut parts = rows.iter().map(|r| self.contribution(r)).collect::<Result<Vec<T>>>()?;
        let mut value: T = parts.iter().copied().sum();
        let mut trace = vec![value];
        let mut step = T::lit(opts.step);
        for _ in 0..opts.iterations {
            if step < T::lit(opts.min_step) {
                break;
            }
            let before = value;
            for p in 0..m {
                for q in p + 1..m {
                    for phase in [false, true] {
                        for sign in [T::one(), -T::one()] {
                            let (ra, rb) = Self::rotate(&rows[p], &rows[q], sign * step, phase);
                            let (fa, fb) = (self.contribution(&ra)?, self.contribution(&rb)?);
                            let delta = fa + fb - parts[p] - parts[q];
                            if delta < T::zero() {
                                rows[p] = ra;
                                rows[q] = rb;
                                parts[p] = fa;
                                parts[q] = fb;
                                value = parts.iter().copied().sum();
                                break;
                            }
                        }
                    }
                }
            }
            // resumming can drift by an ulp; keep the recorded history monotone
            value = value.min(before);
            trace.push(value);
            if before - value <= T::lit(opts.stall_tol) * before.abs().max(T::one()) {
                step *= T::lit(opts.decay);
            }
        }
        Ok((rows, trace))
    }
}

fn rows_of<T: Real>(v: &CMatrix<T>) -> Vec<Vec<Complex<T>>> {
    (0..v.rows()).map(|i| (0..v.cols()).map(|j| v[(i, j)]).collect()).collect()
}

/// Best decomposition found by multi-start local descent. Restart 0 starts
/// from the eigen-decomposition; restart `k ≥ 1` starts from a Haar isometry
/// drawn from substream `k` of `seed`. The result is an upper bound on `E_f`.
pub fn minimize_ef<T: Real>(rho: &DensityMatrix<T>, opts: &EfOptions, budget: &SizeBudget) -> Result<EfResult<T>> {
    if opts.restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be ≥ 1".into()));
    }
    if !(opts.step > 0.0 && opts.min_step > 0.0 && opts.decay > 0.0 && opts.decay < 1.0) {
        return Err(Error::InvalidParameter("step, min_step and decay ∈ (0, 1) must be positive".into()));
    }
    let s = support(rho);
    let r = s.values.len();
    let m = opts.ensemble_size.unwrap_or(r * r);
    if m < r {
        return Err(Error::EnsembleTooSmall { size: m, rank: r });
    }
    let offs = bipartite_offsets(rho.sig())?;
    let basis = weighted_basis(&s, rho.dim());
    let search = Search { basis: &basis, offs: &offs };

    let outcomes = (0..opts.restarts)
        .into_par_iter()
        .map(|k| {
            let start = if k == 0 {
                CMatrix::from_fn(m, r, |i, j| {
                    if i == j {
                        Complex::new(T::one(), T::zero())
                    } else {
                        Complex::new(T::zero(), T::zero())
                    }
                })
            } else {
                haar_isometry(m, r, &mut StreamRng::new(opts.seed, k as u64))?
            };
            search.descend(rows_of(&start), opts)
        })
        .collect::<Result<Vec<_>>>()?;

    let restart_values: Vec<T> = outcomes.iter().map(|(_, t)| *t.last().expect("non-empty")).collect();
    let best = (0..restart_values.len())
        .min_by(|&a, &b| restart_values[a].partial_cmp(&restart_values[b]).expect("finite"))
        .expect("restarts ≥ 1");
    let (rows, trace) = outcomes.into_iter().nth(best).expect("in range");
    let v = CMatrix::from_fn(m, r, |i, j| rows[i][j]);
    let best_ensemble = ensemble_from_isometry(rho, &v)?;

    let lower_bound = match antisymmetric_support(rho, budget)? {
        Some((d, n)) => entropy_floor(d, n),
        None => T::zero(),
    };
    Ok(EfResult {
        upper_bound: restart_values[best],
        lower_bound,
        rank: r,
        ensemble_size: m,
        best_restart: best,
        restart_values,
        trace,
        best_ensemble,
    })
}
