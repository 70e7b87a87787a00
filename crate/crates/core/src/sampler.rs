//! Seeded Haar-random pure states on a subspace and batch Monte-Carlo runs
//! of the reduced-eigenvalue and entropy bounds.
//!
//! The random source is ChaCha8 (`rand_chacha`), keyed by
//! `seed_from_u64(seed)` with the word stream set to the substream index.
//! Uniforms are `(next_u64 >> 11)·2⁻⁵³`; Gaussians use the Marsaglia polar
//! method on those uniforms, emitting both values of each accepted pair.

use num_complex::Complex;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antisym::{check_dimension, check_power, counterexample_state, embedding_isometry};
use crate::bounds::{eigenvalue_cap, entropy_floor, entropy_from_eigenvalues, reduced_state};
use crate::budget::SizeBudget;
use crate::error::{Error, Result};
use crate::linalg::{isometry_deviation, vec_norm, CMatrix, DimSignature};
use crate::scalar::Real;
use crate::state::Ket;

/// One substream of the generator.
#[derive(Clone, Debug)]
pub struct StreamRng {
    inner: ChaCha8Rng,
    spare: Option<f64>,
}

impl StreamRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner, spare: None }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }

    /// Real and imaginary parts drawn in that order, each standard normal.
    pub fn complex_gaussian<T: Real>(&mut self) -> Complex<T> {
        let re = self.gaussian();
        let im = self.gaussian();
        Complex::new(T::lit(re), T::lit(im))
    }

    pub fn gaussian_vector<T: Real>(&mut self, len: usize) -> Vec<Complex<T>> {
        (0..len).map(|_| self.complex_gaussian()).collect()
    }
}

fn check_isometry<T: Real>(v: &CMatrix<T>) -> Result<()> {
    let deviation = isometry_deviation(v);
    if v.cols() == 0 || v.cols() > v.rows() || deviation > T::tol(1e-10) {
        return Err(Error::NotIsometry {
            deviation: deviation.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// `V·g/‖g‖` for complex Gaussian `g` drawn from `rng`.
pub fn sample_pure_with<T: Real>(v: &CMatrix<T>, sig: DimSignature, rng: &mut StreamRng) -> Result<Ket<T>> {
    check_isometry(v)?;
    let g = rng.gaussian_vector::<T>(v.cols());
    let norm = vec_norm(&g);
    let coords: Vec<_> = g.iter().map(|z| z / norm).collect();
    Ket::new(v.matvec(&coords), sig)
}

/// Uniformly random unit vector in the column span of `V`, from substream 0
/// of `seed`.
pub fn sample_pure_in_subspace<T: Real>(v: &CMatrix<T>, sig: DimSignature, seed: u64) -> Result<Ket<T>> {
    sample_pure_with(v, sig, &mut StreamRng::new(seed, 0))
}

/// Haar-distributed `m×r` isometry: Gram–Schmidt (two passes) on a complex
/// Gaussian matrix.
pub fn haar_isometry<T: Real>(m: usize, r: usize, rng: &mut StreamRng) -> Result<CMatrix<T>> {
    if r == 0 || r > m {
        return Err(Error::InvalidParameter(format!("cannot build a {m}x{r} isometry")));
    }
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(r);
    while cols.len() < r {
        let mut g = rng.gaussian_vector::<T>(m);
        for _ in 0..2 {
            for q in &cols {
                let overlap = crate::linalg::inner(q, &g);
                g.iter_mut().zip(q).for_each(|(a, b)| *a -= *b * overlap);
            }
        }
        let norm = vec_norm(&g);
        if norm > T::tol(1e-8) {
            cols.push(g.iter().map(|z| z / norm).collect());
        }
    }
    Ok(CMatrix::from_fn(m, r, |i, j| cols[j][i]))
}

/// Parameters of a Monte-Carlo bound experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub eig_tol: f64,
    pub entropy_tol: f64,
    pub bins: usize,
    /// Adds the two-copy `d = 3` counterexample as an extra trial; requires
    /// `(d, N) = (3, 2)`.
    pub inject_counterexample: bool,
    /// Keep every trial's spectrum in the report.
    pub record_trials: bool,
}

impl ExperimentConfig {
    pub fn new(d: usize, n: usize, trials: usize, seed: u64) -> Self {
        Self {
            d,
            n,
            trials,
            seed,
            eig_tol: 1e-10,
            entropy_tol: 1e-8,
            bins: 20,
            inject_counterexample: false,
            record_trials: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_dimension(self.d)?;
        check_power(self.n)?;
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be ≥ 1".into()));
        }
        if self.bins == 0 {
            return Err(Error::InvalidParameter("bins must be ≥ 1".into()));
        }
        if !(self.eig_tol >= 0.0 && self.entropy_tol >= 0.0) {
            return Err(Error::InvalidParameter("tolerances must be non-negative".into()));
        }
        if self.inject_counterexample && (self.d, self.n) != (3, 2) {
            return Err(Error::InvalidParameter(
                "the counterexample trial exists only for d = 3, N = 2".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TrialRecord<T> {
    pub trial: usize,
    pub max_eig: T,
    pub entropy: T,
    /// Ascending reduced spectrum; present only when trials are recorded.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spectrum: Option<Vec<T>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    EigenvalueCap,
    EntropyFloor,
}

/// A failed trial and the `(seed, stream)` pair that regenerates it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Violation<T> {
    pub trial: usize,
    pub seed: u64,
    pub stream: u64,
    pub kind: ViolationKind,
    pub value: T,
    pub limit: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct HistogramBin<T> {
    pub bin_lower: T,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ExperimentReport<T> {
    pub config: ExperimentConfig,
    pub eig_cap: T,
    pub entropy_floor: T,
    pub worst_max_eig: T,
    pub worst_max_eig_trial: usize,
    pub worst_entropy: T,
    pub worst_entropy_trial: usize,
    pub mean_max_eig: T,
    /// Max-eigenvalue histogram over `[0, 1]` for the random trials.
    pub histogram: Vec<HistogramBin<T>>,
    pub violations: Vec<Violation<T>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<TrialRecord<T>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trials: Option<Vec<TrialRecord<T>>>,
}

impl<T: Real> ExperimentReport<T> {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }

    /// Histogram rows under a `bin_lower,count` header.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("bin_lower,count\n");
        for b in &self.histogram {
            out.push_str(&format!("{:.16e},{}\n", b.bin_lower, b.count));
        }
        out
    }
}

fn evaluate_trial<T: Real>(psi: &Ket<T>, n: usize, trial: usize, keep_spectrum: bool) -> Result<TrialRecord<T>> {
    let spec = reduced_state(psi, n)?.spectrum(false);
    let entropy = entropy_from_eigenvalues(&spec.eigenvalues)?;
    Ok(TrialRecord {
        trial,
        max_eig: spec.max(),
        entropy,
        spectrum: keep_spectrum.then(|| spec.eigenvalues.clone()),
    })
}

/// Samples `trials` Haar-random states of `H₋^⊗N` and checks each reduced
/// state against the eigenvalue cap and entropy floor. Trial `t` draws from
/// substream `t` of `seed`, so the report does not depend on thread count.
pub fn run_bound_experiment<T: Real>(cfg: &ExperimentConfig, budget: &SizeBudget) -> Result<ExperimentReport<T>> {
    cfg.validate()?;
    let v = embedding_isometry::<T>(cfg.d, cfg.n, budget)?;
    let sig = DimSignature::bipartite_copies(cfg.d, cfg.n)?;
    let records: Vec<TrialRecord<T>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let psi = sample_pure_with(&v, sig.clone(), &mut StreamRng::new(cfg.seed, t as u64))?;
            evaluate_trial(&psi, cfg.n, t, cfg.record_trials)
        })
        .collect::<Result<_>>()?;

    let cap = eigenvalue_cap::<T>(cfg.d, cfg.n);
    let floor = entropy_floor::<T>(cfg.d, cfg.n);
    let eig_limit = cap + T::lit(cfg.eig_tol);
    let entropy_limit = floor - T::lit(cfg.entropy_tol);

    let mut violations = Vec::new();
    let mut histogram: Vec<HistogramBin<T>> = (0..cfg.bins)
        .map(|k| HistogramBin {
            bin_lower: T::lit(k as f64 / cfg.bins as f64),
            count: 0,
        })
        .collect();
    let (mut worst_eig, mut worst_eig_trial) = (T::neg_infinity(), 0);
    let (mut worst_ent, mut worst_ent_trial) = (T::infinity(), 0);
    let mut sum = T::zero();
    for r in &records {
        if r.max_eig > worst_eig {
            (worst_eig, worst_eig_trial) = (r.max_eig, r.trial);
        }
        if r.entropy < worst_ent {
            (worst_ent, worst_ent_trial) = (r.entropy, r.trial);
        }
        sum += r.max_eig;
        let bin = (r.max_eig.to_f64().unwrap_or(0.0) * cfg.bins as f64).floor();
        histogram[(bin.max(0.0) as usize).min(cfg.bins - 1)].count += 1;
        if r.max_eig > eig_limit {
            violations.push(Violation {
                trial: r.trial,
                seed: cfg.seed,
                stream: r.trial as u64,
                kind: ViolationKind::EigenvalueCap,
                value: r.max_eig,
                limit: cap,
            });
        }
        if r.entropy < entropy_limit {
            violations.push(Violation {
                trial: r.trial,
                seed: cfg.seed,
                stream: r.trial as u64,
                kind: ViolationKind::EntropyFloor,
                value: r.entropy,
                limit: floor,
            });
        }
    }

    let counterexample = if cfg.inject_counterexample {
        let r = evaluate_trial(&counterexample_state::<T>(), 2, cfg.trials, true)?;
        if r.max_eig > eig_limit || r.entropy < entropy_limit {
            return Err(Error::InvalidDensity(format!(
                "counterexample trial broke a bound (max eig {:e}, entropy {:e})",
                r.max_eig, r.entropy
            )));
        }
        Some(r)
    } else {
        None
    };

    Ok(ExperimentReport {
        config: cfg.clone(),
        eig_cap: cap,
        entropy_floor: floor,
        worst_max_eig: worst_eig,
        worst_max_eig_trial: worst_eig_trial,
        worst_entropy: worst_ent,
        worst_entropy_trial: worst_ent_trial,
        mean_max_eig: sum / T::lit(cfg.trials as f64),
        histogram,
        violations,
        counterexample,
        trials: cfg.record_trials.then_some(records),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antisym::antisym_ket;

    #[test]
    fn uniform_and_gaussian_are_reproducible() {
        let mut a = StreamRng::new(42, 3);
        let mut b = StreamRng::new(42, 3);
        let xs: Vec<f64> = (0..64).map(|_| a.gaussian()).collect();
        let ys: Vec<f64> = (0..64).map(|_| b.gaussian()).collect();
        assert_eq!(xs, ys);
        let mut c = StreamRng::new(42, 4);
        assert_ne!(xs[0], c.gaussian());
        let mut u = StreamRng::new(1, 0);
        assert!((0..1000).map(|_| u.uniform()).all(|x| (0.0..1.0).contains(&x)));
    }

    #[test]
    fn gaussian_moments() {
        let mut rng = StreamRng::new(9, 0);
        let xs: Vec<f64> = (0..20_000).map(|_| rng.gaussian()).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.03 && (var - 1.0).abs() < 0.05);
    }

    #[test]
    fn one_dimensional_subspace_returns_the_singlet() {
        let v = embedding_isometry::<f64>(2, 1, &SizeBudget::default()).unwrap();
        let singlet = antisym_ket::<f64>(1, 2, 2).unwrap();
        for seed in 0..5 {
            let sig = DimSignature::bipartite_copies(2, 1).unwrap();
            let psi = sample_pure_in_subspace(&v, sig, seed).unwrap();
            assert!((psi.inner(&singlet).norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn fixed_seed_fixed_ket() {
        let v = embedding_isometry::<f64>(3, 1, &SizeBudget::default()).unwrap();
        let sig = DimSignature::bipartite_copies(3, 1).unwrap();
        let a = sample_pure_in_subspace(&v, sig.clone(), 11).unwrap();
        let b = sample_pure_in_subspace(&v, sig, 11).unwrap();
        assert_eq!(a, b);
        assert!((a.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_isometry() {
        let v = CMatrix::<f64>::identity(3).scale(2.0);
        let sig = DimSignature::new(vec![3]).unwrap();
        assert!(matches!(sample_pure_in_subspace(&v, sig, 0), Err(Error::NotIsometry { .. })));
    }

    #[test]
    fn haar_isometry_is_isometric() {
        let mut rng = StreamRng::new(5, 0);
        let v = haar_isometry::<f64>(9, 4, &mut rng).unwrap();
        assert!(isometry_deviation(&v) < 1e-13);
        assert!(haar_isometry::<f64>(2, 3, &mut rng).is_err());
    }

    #[test]
    fn single_copy_d3_spectra_are_half_half_zero() {
        let mut cfg = ExperimentConfig::new(3, 1, 500, 42);
        cfg.record_trials = true;
        let rep = run_bound_experiment::<f64>(&cfg, &SizeBudget::default()).unwrap();
        assert!(rep.pass());
        for t in rep.trials.as_ref().unwrap() {
            let s = t.spectrum.as_ref().unwrap();
            assert!(s[0].abs() < 1e-10 && (s[1] - 0.5).abs() < 1e-10 && (s[2] - 0.5).abs() < 1e-10);
        }
        assert!((rep.worst_entropy - 1.0).abs() < 1e-9);
        assert!((rep.mean_max_eig - 0.5).abs() < 1e-10);
        assert_eq!(rep.histogram.iter().map(|b| b.count).sum::<usize>(), 500);
    }

    #[test]
    fn two_copy_experiment_with_counterexample() {
        let mut cfg = ExperimentConfig::new(3, 2, 300, 7);
        cfg.inject_counterexample = true;
        let rep = run_bound_experiment::<f64>(&cfg, &SizeBudget::default()).unwrap();
        assert!(rep.pass());
        assert!(rep.worst_max_eig <= 4.0 / 9.0 + 1e-10);
        let ce = rep.counterexample.as_ref().unwrap();
        assert_eq!(ce.trial, 300);
        assert!((ce.max_eig - 1.0 / 3.0).abs() < 1e-12);
        let worst = rep.worst_max_eig;
        assert!(rep.histogram.iter().map(|b| b.count).sum::<usize>() == 300 && worst > 0.0);
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = ExperimentConfig::new(2, 2, 200, 3);
        let a = run_bound_experiment::<f64>(&cfg, &SizeBudget::default()).unwrap();
        let b = run_bound_experiment::<f64>(&cfg, &SizeBudget::default()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.worst_max_eig <= 0.25 + 1e-10);
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::new(3, 1, 0, 0).validate().is_err());
        let mut cfg = ExperimentConfig::new(4, 2, 10, 0);
        cfg.inject_counterexample = true;
        assert!(cfg.validate().is_err());
        let tiny = SizeBudget {
            max_isometry_entries: 10,
            ..SizeBudget::default()
        };
        assert!(matches!(
            run_bound_experiment::<f64>(&ExperimentConfig::new(3, 2, 1, 0), &tiny),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
