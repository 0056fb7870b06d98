//! Moments, central moments and cumulants of a Bell operator, plus the
//! closed forms for singlet and X-state pairs.

use core::f64::consts::{FRAC_PI_4, SQRT_2};

use crate::linalg::Mat4;
use crate::states::{DensityMatrix4, XStateParams};

/// Raw moments `m_n = ⟨Bⁿ⟩`, `n = 1..4`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentVector {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
}

impl MomentVector {
    pub fn new(m1: f64, m2: f64, m3: f64, m4: f64) -> Self {
        MomentVector { m1, m2, m3, m4 }
    }

    /// Moments of a discrete distribution given as `(value, weight)` pairs.
    /// Weights are taken as given; they should sum to one.
    pub fn from_distribution(points: &[(f64, f64)]) -> Self {
        let mut m = [0.0; 4];
        for &(x, w) in points {
            let mut p = w;
            for mi in m.iter_mut() {
                p *= x;
                *mi += p;
            }
        }
        MomentVector::new(m[0], m[1], m[2], m[3])
    }

    pub fn is_finite(&self) -> bool {
        [self.m1, self.m2, self.m3, self.m4]
            .iter()
            .all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CumulantVector {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CentralMoments {
    pub mu2: f64,
    pub mu3: f64,
    pub mu4: f64,
}

/// `m_n = Re Tr(ρ opⁿ)` by explicit matrix powers.
pub fn operator_moments(rho: &DensityMatrix4, op: &Mat4) -> MomentVector {
    let mut m = [0.0; 4];
    let mut p = *op;
    for (i, mi) in m.iter_mut().enumerate() {
        if i > 0 {
            p = p * *op;
        }
        *mi = rho.expectation(&p);
    }
    MomentVector::new(m[0], m[1], m[2], m[3])
}

pub fn cumulants(m: &MomentVector) -> CumulantVector {
    let MomentVector { m1, m2, m3, m4 } = *m;
    let m1sq = m1 * m1;
    CumulantVector {
        k1: m1,
        k2: m2 - m1sq,
        k3: m3 - 3.0 * m1 * m2 + 2.0 * m1sq * m1,
        k4: m4 - 4.0 * m1 * m3 - 3.0 * m2 * m2 + 12.0 * m1sq * m2 - 6.0 * m1sq * m1sq,
    }
}

pub fn central_moments(m: &MomentVector) -> CentralMoments {
    let MomentVector { m1, m2, m3, m4 } = *m;
    let m1sq = m1 * m1;
    CentralMoments {
        mu2: m2 - m1sq,
        mu3: m3 - 3.0 * m1 * m2 + 2.0 * m1sq * m1,
        mu4: m4 - 4.0 * m1 * m3 + 6.0 * m1sq * m2 - 3.0 * m1sq * m1sq,
    }
}

/// Everything derived from one operator/state pair.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OperatorStatistics {
    pub moments: MomentVector,
    pub cumulants: CumulantVector,
    pub central: CentralMoments,
}

pub fn operator_statistics(rho: &DensityMatrix4, op: &Mat4) -> OperatorStatistics {
    let moments = operator_moments(rho, op);
    OperatorStatistics {
        moments,
        cumulants: cumulants(&moments),
        central: central_moments(&moments),
    }
}

/// κ₃ of `B_CH(settings_phi(φ))` on the singlet with `ᾱ = −α`:
/// `−√2/8 α⁶ [sin(φ + π/4) − sin(3φ − π/4)]`.
pub fn skewness_singlet_closed(phi: f64, alpha: f64) -> f64 {
    -SQRT_2 / 8.0
        * libm::pow(alpha, 6.0)
        * (libm::sin(phi + FRAC_PI_4) - libm::sin(3.0 * phi - FRAC_PI_4))
}

/// `|κ₃|` on an X-state with `settings_jpsi`:
/// `√2 α⁶/16 |(t₂ − t₃)((t₂ − t₃)² − 3t₁ − 1)|`.
pub fn skewness_xstate_closed(x: &XStateParams, alpha: f64) -> f64 {
    let d = x.t2 - x.t3;
    SQRT_2 * libm::pow(alpha, 6.0) / 16.0 * (d * (d * d - 3.0 * x.t1 - 1.0)).abs()
}

/// `μ₄ = α⁸/16 [2 − 2 sin 2φ + 3 cos² 2φ]` on the singlet.
pub fn mu4_singlet_closed(phi: f64, alpha: f64) -> f64 {
    let (s, c) = libm::sincos(2.0 * phi);
    libm::pow(alpha, 8.0) / 16.0 * (2.0 - 2.0 * s + 3.0 * c * c)
}

/// `μ₄ = α⁸/64 [−3(t₂−t₃)⁴ + 4(3t₁−1)(t₂−t₃)² + 8(1+t₁)]` on an X-state
/// with `settings_jpsi`.
pub fn mu4_xstate_closed(x: &XStateParams, alpha: f64) -> f64 {
    let d2 = (x.t2 - x.t3) * (x.t2 - x.t3);
    libm::pow(alpha, 8.0) / 64.0
        * (-3.0 * d2 * d2 + 4.0 * (3.0 * x.t1 - 1.0) * d2 + 8.0 * (1.0 + x.t1))
}
