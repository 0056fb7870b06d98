//! Local-realist bounds on the CH mean, skewness and fourth central
//! moment, their timelike-corrected versions, and brute-force oracles.

use core::f64::consts::SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bell::{ch_functional, ChParams, ChProbabilities, MeasurementSettings};
use crate::error::{Error, Result};
use crate::moments::{central_moments, cumulants, MomentVector};
use crate::montecarlo::EstimatorResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BoundKind {
    ChMean,
    Skewness,
    Mu4,
}

/// `lower ≤ quantity ≤ upper`. `beta` is set for timelike-modified bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundSet {
    pub lower: f64,
    pub upper: f64,
    pub kind: BoundKind,
    pub modified: bool,
    pub beta: Option<f64>,
}

impl BoundSet {
    fn plain(kind: BoundKind, lower: f64, upper: f64) -> Self {
        BoundSet {
            lower,
            upper,
            kind,
            modified: false,
            beta: None,
        }
    }

    fn modified(kind: BoundKind, lower: f64, upper: f64, beta: f64) -> Self {
        BoundSet {
            lower,
            upper,
            kind,
            modified: true,
            beta: Some(beta),
        }
    }

    /// Strictly outside `[lower, upper]`.
    pub fn is_violated_by(&self, value: f64) -> bool {
        value > self.upper || value < self.lower
    }
}

/// Hyperon speed `β = v/c` and `k = (1 + β)/(1 − β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelKinematics {
    beta: f64,
    k: f64,
}

impl ChannelKinematics {
    pub fn new(beta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::OutOfRange {
                name: "beta",
                value: beta,
            });
        }
        Ok(ChannelKinematics {
            beta,
            k: (1.0 + beta) / (1.0 - beta),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&beta) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "beta",
            value: beta,
        })
    }
}

/// `−|α_aα_b| ≤ ⟨B_CH⟩ ≤ 0`.
pub fn ch_bounds(alpha_a: f64, alpha_b: f64) -> BoundSet {
    BoundSet::plain(BoundKind::ChMean, -(alpha_a * alpha_b).abs(), 0.0)
}

/// `|κ₃| ≤ |α_aα_b|³/8`.
pub fn skewness_bound(alpha_a: f64, alpha_b: f64) -> f64 {
    libm::pow((alpha_a * alpha_b).abs(), 3.0) / 8.0
}

/// `μ₄ ≤ α⁸/12`.
pub fn mu4_bound(alpha: f64) -> f64 {
    libm::pow(alpha, 8.0) / 12.0
}

pub fn skewness_bounds(alpha_a: f64, alpha_b: f64) -> BoundSet {
    let b = skewness_bound(alpha_a, alpha_b);
    BoundSet::plain(BoundKind::Skewness, -b, b)
}

pub fn mu4_bounds(alpha: f64) -> BoundSet {
    BoundSet::plain(BoundKind::Mu4, 0.0, mu4_bound(alpha))
}

/// Fraction of decay-vertex pairs at spacelike separation, `(k − 1)/(k + 1)`.
pub fn spacelike_fraction(kin: &ChannelKinematics) -> f64 {
    (kin.k - 1.0) / (kin.k + 1.0)
}

/// Sampled estimate of the spacelike fraction: proper decay times
/// `x₁, x₂ ~ Exp(1)`, spacelike when `1/k ≤ x₁/x₂ ≤ k`.
pub fn mc_spacelike_fraction(beta: f64, n_samples: usize, seed: u64) -> Result<EstimatorResult> {
    const MIN_SAMPLES: usize = 10_000;
    let kin = ChannelKinematics::new(beta)?;
    if n_samples < MIN_SAMPLES {
        return Err(Error::BatchTooSmall {
            size: n_samples,
            required: MIN_SAMPLES,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut exp1 = || -libm::log(1.0 - rng.random::<f64>());
    let mut hits = 0usize;
    for _ in 0..n_samples {
        let (x1, x2) = (exp1(), exp1());
        if x1 * kin.k >= x2 && x1 <= kin.k * x2 {
            hits += 1;
        }
    }
    let p = hits as f64 / n_samples as f64;
    Ok(EstimatorResult {
        value: p,
        stderr: libm::sqrt(p * (1.0 - p) / n_samples as f64),
        n_used: n_samples,
    })
}

/// `(max, min)` of `B_CH` for timelike-separated decays:
/// `(α²/2, −3α²/2)`.
pub fn timelike_extremes(alpha: f64) -> (f64, f64) {
    let a2 = alpha * alpha;
    (a2 / 2.0, -1.5 * a2)
}

/// `β`-weighted mixture of the LHV bounds and the timelike extremes:
/// `−(3 − β)α²/2 ≤ B_CH ≤ (1 − β)α²/2`.
pub fn modified_ch_bounds(alpha: f64, beta: f64) -> Result<BoundSet> {
    check_beta(beta)?;
    let lhv = ch_bounds(alpha, alpha);
    let (tmax, tmin) = timelike_extremes(alpha);
    Ok(BoundSet::modified(
        BoundKind::ChMean,
        beta * lhv.lower + (1.0 - beta) * tmin,
        beta * lhv.upper + (1.0 - beta) * tmax,
        beta,
    ))
}

/// `|κ₃| ≤ (2 − β)³ α⁶/8`.
pub fn modified_skewness_bound(alpha: f64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(libm::pow(2.0 - beta, 3.0) * libm::pow(alpha, 6.0) / 8.0)
}

/// `μ₄ ≤ (2 − β)⁴ α⁸/12`.
pub fn modified_mu4_bound(alpha: f64, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(libm::pow(2.0 - beta, 4.0) * libm::pow(alpha, 8.0) / 12.0)
}

pub fn modified_skewness_bounds(alpha: f64, beta: f64) -> Result<BoundSet> {
    let b = modified_skewness_bound(alpha, beta)?;
    Ok(BoundSet::modified(BoundKind::Skewness, -b, b, beta))
}

pub fn modified_mu4_bounds(alpha: f64, beta: f64) -> Result<BoundSet> {
    Ok(BoundSet::modified(
        BoundKind::Mu4,
        0.0,
        modified_mu4_bound(alpha, beta)?,
        beta,
    ))
}

/// Smallest `β` for which the singlet CH maximum `(√2 − 1)α²/2` beats
/// the modified upper bound: `2 − √2`.
pub fn ch_violation_threshold() -> f64 {
    2.0 - SQRT_2
}

/// Smallest `β` for which `√6/9 α⁶` beats `(2 − β)³α⁶/8`:
/// `2 − ∛(8√6/9)`.
pub fn skewness_violation_threshold() -> f64 {
    2.0 - libm::cbrt(8.0 * libm::sqrt(6.0) / 9.0)
}

/// `β + √(1 + α_ψ²) − 2`; positive means the J/ψ channel can beat the
/// modified CH bound at `ϑ = π/2`.
pub fn jpsi_ch_condition(alpha_psi: f64, beta: f64) -> f64 {
    beta + libm::sqrt(1.0 + alpha_psi * alpha_psi) - 2.0
}

/// `(min, max)` of the CH functional over local hidden-variable models.
///
/// Each local response `P₊(n, λ)` lies between the POVM effect
/// eigenvalues; the four responses `A(a), A(a′), B(b), B(b′)` are
/// enumerated over `grid_n` evenly spaced values in their intervals
/// (`grid_n = 2` is the 16 vertices) and joints factorize. The
/// functional is multilinear so the vertices already give the extrema.
/// The settings only label the responses.
pub fn lhv_extremal_scan(
    _s: &MeasurementSettings,
    params: &ChParams,
    grid_n: usize,
) -> Result<(f64, f64)> {
    if grid_n < 2 {
        return Err(Error::OutOfRange {
            name: "grid_n",
            value: grid_n as f64,
        });
    }
    let interval = |alpha: f64, eta: f64| -> [f64; 2] {
        [
            (1.0 + eta - alpha.abs()) / 2.0,
            (1.0 + eta + alpha.abs()) / 2.0,
        ]
    };
    let ia = interval(params.alpha_a, params.eta_a);
    let ib = interval(params.alpha_b, params.eta_b);
    let point = |iv: [f64; 2], k: usize| iv[0] + (iv[1] - iv[0]) * k as f64 / (grid_n - 1) as f64;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..grid_n {
        for j in 0..grid_n {
            for k in 0..grid_n {
                for l in 0..grid_n {
                    let v = lhv_value(
                        [point(ia, i), point(ia, j)],
                        [point(ib, k), point(ib, l)],
                        params,
                    )?;
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
        }
    }
    Ok((lo, hi))
}

/// CH functional for factorized local responses `[A(a), A(a′)]`,
/// `[B(b), B(b′)]`.
pub fn lhv_value(a: [f64; 2], b: [f64; 2], params: &ChParams) -> Result<f64> {
    let p = ChProbabilities {
        p_ab: a[0] * b[0],
        p_ab_prime: a[0] * b[1],
        p_a_prime_b: a[1] * b[0],
        p_a_prime_b_prime: a[1] * b[1],
        p_a_prime: a[1],
        p_b: b[0],
    };
    ch_functional(&p, params)
}

/// Largest `|κ₃|` (`order = 3`) or `μ₄` (`order = 4`) over two-point
/// distributions on `{0, L}` with weight `p` on a grid of `grid_n + 1`
/// points in `[0, 1]`.
pub fn bounded_moment_oracle(length: f64, order: u32, grid_n: usize) -> Result<f64> {
    if !(order == 3 || order == 4) {
        return Err(Error::OutOfRange {
            name: "order",
            value: order as f64,
        });
    }
    if grid_n < 1000 {
        return Err(Error::OutOfRange {
            name: "grid_n",
            value: grid_n as f64,
        });
    }
    let mut best = 0.0f64;
    for i in 0..=grid_n {
        let p = i as f64 / grid_n as f64;
        let m = MomentVector::from_distribution(&[(0.0, 1.0 - p), (length, p)]);
        let v = if order == 3 {
            cumulants(&m).k3.abs()
        } else {
            central_moments(&m).mu4
        };
        best = best.max(v);
    }
    Ok(best)
}
