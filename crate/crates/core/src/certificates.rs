//! Spectra of the Choi matrix of `x·Λ + y·M†`, the `λ(x, y)` objective, the
//! two-sided bound on `choi(M̃)` and the positivity certificate for
//! `λ̃ᴺ·Id# − M̃^⊗N`.
//!
//! The Choi matrix of `x·Λ + y·M†` splits into blocks labelled by
//! `(pair, level)`:
//!
//! * for every triple `i < j < k`, the 3×3 block on
//!   `((i,j),k), ((i,k),j), ((j,k),i)` equal to `(y/2)·[[0,1,−1],[1,0,1],[−1,1,0]]`
//!   with spectrum `{−y, y/2, y/2}`;
//! * for every level `s`, the `(d−1)`-dimensional block on `({a,s}, a)`, `a ≠ s`,
//!   equal to `(x/2)·u uᵀ + (y/2)·I` with `u_a = +1` for `a < s` and `−1` for
//!   `a > s`, whose spectrum is `(d−1)x/2 + y/2` once and `y/2` with
//!   multiplicity `d − 2`.

use serde::{Deserialize, Serialize};

use crate::antisym::{check_dimension, check_power, AntisymBasis};
use crate::budget::{saturating_pow, SizeBudget};
use crate::channel::{id_sharp, lambda_combination, map_tensor_power, tilde_map, ChannelMap};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Spectrum};
use crate::scalar::Real;

/// Basis label of a Choi row: pair `(i, j)` and output level, all 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XiLabel {
    pub pair: (usize, usize),
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleBlock {
    pub triple: (usize, usize, usize),
    pub labels: [XiLabel; 3],
}

impl TripleBlock {
    /// The fixed sign pattern shared by every triple block.
    pub const PATTERN: [[i8; 3]; 3] = [[0, 1, -1], [1, 0, 1], [-1, 1, 0]];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarBlock {
    pub level: usize,
    pub labels: Vec<XiLabel>,
    /// `+1` for partners below `level`, `−1` above.
    pub signs: Vec<i8>,
}

/// Block-diagonal form of the Choi matrix of `x·Λ + y·M†`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XiDecomposition {
    pub d: usize,
    pub triple_blocks: Vec<TripleBlock>,
    pub star_blocks: Vec<StarBlock>,
}

impl XiDecomposition {
    pub fn new(d: usize) -> Result<Self> {
        check_dimension(d)?;
        let mut triple_blocks = Vec::new();
        for i in 1..=d {
            for j in i + 1..=d {
                for k in j + 1..=d {
                    triple_blocks.push(TripleBlock {
                        triple: (i, j, k),
                        labels: [
                            XiLabel { pair: (i, j), level: k },
                            XiLabel { pair: (i, k), level: j },
                            XiLabel { pair: (j, k), level: i },
                        ],
                    });
                }
            }
        }
        let star_blocks = (1..=d)
            .map(|s| {
                let partners: Vec<usize> = (1..=d).filter(|&a| a != s).collect();
                StarBlock {
                    level: s,
                    labels: partners
                        .iter()
                        .map(|&a| XiLabel {
                            pair: (a.min(s), a.max(s)),
                            level: a,
                        })
                        .collect(),
                    signs: partners.iter().map(|&a| if a < s { 1 } else { -1 }).collect(),
                }
            })
            .collect();
        Ok(Self {
            d,
            triple_blocks,
            star_blocks,
        })
    }

    /// `d·|D'| = d²(d−1)/2`.
    pub fn total_dim(&self) -> usize {
        3 * self.triple_blocks.len() + self.star_blocks.iter().map(|b| b.labels.len()).sum::<usize>()
    }

    /// Every label in block order.
    pub fn labels(&self) -> Vec<XiLabel> {
        self.triple_blocks
            .iter()
            .flat_map(|b| b.labels.iter().copied())
            .chain(self.star_blocks.iter().flat_map(|b| b.labels.iter().copied()))
            .collect()
    }

    /// Row indices of the Choi matrix (input pair outer, level inner), in
    /// block order.
    pub fn choi_order(&self) -> Vec<usize> {
        let basis = AntisymBasis::new(self.d).expect("validated d");
        self.labels()
            .iter()
            .map(|l| {
                let p = basis.index_of(l.pair.0, l.pair.1).expect("valid pair");
                p * self.d + (l.level - 1)
            })
            .collect()
    }

    /// `(y/2)·Ξ₁ ⊕ ((x/2)·Ξ₂ + (y/2)·Ξ₃)` in block order.
    pub fn assemble<T: Real>(&self, x: T, y: T) -> CMatrix<T> {
        let n = self.total_dim();
        let half = T::lit(0.5);
        let mut m = CMatrix::zeros(n, n);
        let mut offset = 0;
        for _ in &self.triple_blocks {
            for (r, row) in TripleBlock::PATTERN.iter().enumerate() {
                for (c, &s) in row.iter().enumerate() {
                    m[(offset + r, offset + c)].re = y * half * T::lit(s as f64);
                }
            }
            offset += 3;
        }
        for block in &self.star_blocks {
            let k = block.labels.len();
            for r in 0..k {
                for c in 0..k {
                    let sign = T::lit((block.signs[r] * block.signs[c]) as f64);
                    let mut v = x * half * sign;
                    if r == c {
                        v += y * half;
                    }
                    m[(offset + r, offset + c)].re = v;
                }
            }
            offset += k;
        }
        m
    }
}

fn binomial3(d: usize) -> usize {
    if d < 3 {
        0
    } else {
        d * (d - 1) * (d - 2) / 6
    }
}

/// Merges values closer than `tol` (relative to `max(1, |v|)`), summing
/// multiplicities, and sorts ascending.
fn merge_values<T: Real>(mut values: Vec<(T, usize)>, tol: T) -> Vec<(T, usize)> {
    values.retain(|&(_, m)| m > 0);
    values.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    let mut merged: Vec<(T, usize)> = Vec::new();
    for (v, m) in values {
        match merged.last_mut() {
            Some((last, count)) if (v - *last).abs() <= tol * T::one().max(v.abs()) => *count += m,
            _ => merged.push((v, m)),
        }
    }
    merged
}

/// Predicted Choi spectrum of `x·Λ + y·M†` as `(value, multiplicity)`,
/// ascending, coincident values merged.
pub fn xi_spectrum_analytic<T: Real>(d: usize, x: T, y: T) -> Result<Vec<(T, usize)>> {
    check_dimension(d)?;
    let c3 = binomial3(d);
    let half = T::lit(0.5);
    let top = T::lit((d - 1) as f64) * x * half + y * half;
    Ok(merge_values(
        vec![(-y, c3), (y * half, 2 * c3 + d * (d - 2)), (top, d)],
        T::lit(1e-14),
    ))
}

/// Dense Choi matrix of `x·Λ + y·M†`.
pub fn xi_choi<T: Real>(d: usize, x: T, y: T, budget: &SizeBudget) -> Result<CMatrix<T>> {
    check_dimension(d)?;
    let side = d * AntisymBasis::new(d)?.dim();
    SizeBudget::check("Choi side", side, budget.max_choi_side)?;
    Ok(lambda_combination(d, x, y)?.choi().matrix)
}

/// Dense eigenvalues of the Choi matrix of `x·Λ + y·M†`.
pub fn xi_spectrum_numeric<T: Real>(d: usize, x: T, y: T, budget: &SizeBudget) -> Result<Spectrum<T>> {
    crate::linalg::eig_hermitian(&xi_choi(d, x, y, budget)?, false)
}

/// Numeric-versus-analytic comparison for one `(d, x, y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SpectralCertificate<T> {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub x: T,
    pub y: T,
    pub analytic: Vec<(T, usize)>,
    pub numeric: Vec<T>,
    pub max_deviation: T,
    pub verdict: bool,
    pub assumption: String,
}

/// Greedy nearest-value assignment of `numeric` onto `analytic`, then
/// multiplicity reconciliation. Returns `(max_deviation, ok)`.
pub fn reconcile<T: Real>(analytic: &[(T, usize)], numeric: &[T], tol: T) -> (T, bool) {
    let targets = merge_values(analytic.to_vec(), tol);
    let mut counts = vec![0usize; targets.len()];
    let mut max_dev = T::zero();
    let mut ok = true;
    for &v in numeric {
        let (idx, dist) = targets
            .iter()
            .enumerate()
            .map(|(k, &(t, _))| (k, (v - t).abs()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite"))
            .unwrap_or((usize::MAX, T::infinity()));
        max_dev = max_dev.max(dist);
        if dist > tol || idx == usize::MAX {
            ok = false;
        } else {
            counts[idx] += 1;
        }
    }
    ok &= targets.iter().zip(&counts).all(|(&(_, m), &c)| m == c);
    (max_dev, ok)
}

pub const REAL_PARAMETER_ASSUMPTION: &str = "x and y are real parameters";

pub fn certify_xi_spectrum<T: Real>(
    d: usize,
    x: T,
    y: T,
    tol: T,
    budget: &SizeBudget,
) -> Result<SpectralCertificate<T>> {
    let analytic = xi_spectrum_analytic(d, x, y)?;
    let numeric = xi_spectrum_numeric(d, x, y, budget)?.eigenvalues;
    let (max_deviation, verdict) = reconcile(&analytic, &numeric, tol);
    Ok(SpectralCertificate {
        d,
        n: 1,
        x,
        y,
        analytic,
        numeric,
        max_deviation,
        verdict,
        assumption: REAL_PARAMETER_ASSUMPTION.into(),
    })
}

/// `λ(x, y) = max{|−y|, |y/2|, |(d−1)x/2 + y/2|}`.
pub fn lambda_xy<T: Real>(d: usize, x: T, y: T) -> T {
    let half = T::lit(0.5);
    let top = T::lit(d as f64 - 1.0) * x * half + y * half;
    y.abs().max((y * half).abs()).max(top.abs())
}

/// `λ̃ = (d−1)/d`.
pub fn lambda_tilde<T: Real>(d: usize) -> T {
    T::lit((d - 1) as f64) / T::lit(d as f64)
}

/// Search grid on the line `x + y = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub step: f64,
}

impl Default for LineGrid {
    fn default() -> Self {
        Self {
            x_min: -2.0,
            x_max: 3.0,
            step: 1e-3,
        }
    }
}

impl LineGrid {
    pub fn points(&self) -> usize {
        ((self.x_max - self.x_min) / self.step + 1e-9).floor() as usize + 1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LambdaMinimum<T> {
    pub d: usize,
    pub x: T,
    pub y: T,
    pub value: T,
    pub grid: LineGrid,
    pub grid_min: T,
    pub grid_argmin_x: T,
    /// `value − grid_min`; positive means the grid found a better point.
    pub grid_advantage: T,
    pub assumption: String,
}

/// Closed-form minimizer `(1/d, (d−1)/d)` of `λ` on `x + y = 1`, checked
/// against an exhaustive grid.
pub fn minimize_lambda<T: Real>(d: usize, grid: LineGrid) -> Result<LambdaMinimum<T>> {
    check_dimension(d)?;
    if !(grid.step > 0.0) || !(grid.x_max >= grid.x_min) {
        return Err(Error::InvalidParameter(format!("invalid grid {grid:?}")));
    }
    let x = T::one() / T::lit(d as f64);
    let y = T::one() - x;
    let value = lambda_xy(d, x, y);
    let (mut grid_min, mut grid_argmin_x) = (T::infinity(), T::nan());
    for k in 0..grid.points() {
        let gx = T::lit(grid.x_min + k as f64 * grid.step);
        let v = lambda_xy(d, gx, T::one() - gx);
        if v < grid_min {
            grid_min = v;
            grid_argmin_x = gx;
        }
    }
    Ok(LambdaMinimum {
        d,
        x,
        y,
        value,
        grid,
        grid_min,
        grid_argmin_x,
        grid_advantage: value - grid_min,
        assumption: REAL_PARAMETER_ASSUMPTION.into(),
    })
}

/// `−λ̃·id ≤ choi(M̃) ≤ λ̃·id`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SandwichCertificate<T> {
    pub d: usize,
    pub lambda_tilde: T,
    pub min_eig: T,
    pub max_eig: T,
    pub max_abs_eig: T,
    pub holds: bool,
    pub offending_eigenvalue: Option<T>,
}

pub fn check_sandwich<T: Real>(d: usize, tol: T, budget: &SizeBudget) -> Result<SandwichCertificate<T>> {
    let lt = lambda_tilde::<T>(d);
    let spec = xi_spectrum_numeric(d, T::one() / T::lit(d as f64), lt, budget)?;
    let offending = spec
        .eigenvalues
        .iter()
        .copied()
        .filter(|v| v.abs() > lt + tol)
        .max_by(|a, b| a.abs().partial_cmp(&b.abs()).expect("finite"));
    Ok(SandwichCertificate {
        d,
        lambda_tilde: lt,
        min_eig: spec.min(),
        max_eig: spec.max(),
        max_abs_eig: spec.max_abs(),
        holds: offending.is_none(),
        offending_eigenvalue: offending,
    })
}

/// Positivity certificate for `λ̃ᴺ·Id# − M̃^⊗N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CpReport<T> {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub choi_side: usize,
    pub lambda_tilde_pow: T,
    pub min_choi_eig: T,
    pub threshold: T,
    pub is_cp: bool,
}

/// `λ̃ᴺ·Id# − M̃^⊗N` from `𝔐(D')^⊗N` to `𝔐(D)^⊗N`.
pub fn cp_gap_map<T: Real>(d: usize, n: usize, budget: &SizeBudget) -> Result<ChannelMap<T>> {
    check_dimension(d)?;
    check_power(n)?;
    let p = AntisymBasis::new(d)?.dim();
    let in_side = saturating_pow(p, n);
    let out_side = saturating_pow(d, n);
    SizeBudget::check("Choi side", in_side.saturating_mul(out_side), budget.max_choi_side)?;
    let power = map_tensor_power(&tilde_map::<T>(d)?, n, budget)?;
    let sharp = id_sharp::<T>(in_side, out_side)?;
    let lt_pow = lambda_tilde::<T>(d).powi(n as i32);
    ChannelMap::linear_combination(&[(lt_pow, &sharp), (-T::one(), &power)])
}

pub fn cp_certificate<T: Real>(d: usize, n: usize, tol: T, budget: &SizeBudget) -> Result<CpReport<T>> {
    let cert = cp_gap_map::<T>(d, n, budget)?.is_cp(tol)?;
    Ok(CpReport {
        d,
        n,
        choi_side: cert.choi_side,
        lambda_tilde_pow: lambda_tilde::<T>(d).powi(n as i32),
        min_choi_eig: cert.min_choi_eig,
        threshold: cert.threshold,
        is_cp: cert.is_cp,
    })
}
