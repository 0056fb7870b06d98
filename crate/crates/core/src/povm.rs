//! Unsharp, biased two-outcome spin measurements and their realization by
//! hyperon weak decays.

use crate::error::{Error, Result};
use crate::linalg::{kron, sigma_dot, Complex, Direction3, Mat2};
use crate::states::{DensityMatrix2, DensityMatrix4};

/// Outcome of a dichotomic measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }
}

/// Two-outcome POVM `E± = ((1 ± η) I ± α σ·n) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralPovm {
    direction: Direction3,
    alpha: f64,
    eta: f64,
}

impl GeneralPovm {
    /// Requires a unit direction and `|η ± α| ≤ 1`, which makes both
    /// effects positive.
    pub fn new(direction: Direction3, alpha: f64, eta: f64) -> Result<Self> {
        let direction = direction.require_unit()?;
        if !(alpha.is_finite() && eta.is_finite())
            || (eta + alpha).abs() > 1.0
            || (eta - alpha).abs() > 1.0
        {
            return Err(Error::InvalidPovm { alpha, eta });
        }
        Ok(GeneralPovm {
            direction,
            alpha,
            eta,
        })
    }

    pub fn direction(&self) -> Direction3 {
        self.direction
    }

    /// Unsharpness α.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Bias η.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn effect(&self, outcome: Outcome) -> Mat2 {
        let s = outcome.sign();
        (Mat2::identity().scale(1.0 + s * self.eta)
            + sigma_dot(self.direction).scale(s * self.alpha))
        .scale(0.5)
    }

    /// Spectrum of the effect, `(1 ± η ± |α|)/2`, ascending.
    pub fn effect_eigenvalues(&self, outcome: Outcome) -> [f64; 2] {
        let base = 1.0 + outcome.sign() * self.eta;
        [
            (base - self.alpha.abs()) / 2.0,
            (base + self.alpha.abs()) / 2.0,
        ]
    }
}

pub fn povm_effect(p: &GeneralPovm, outcome: Outcome) -> Mat2 {
    p.effect(outcome)
}

/// Decay of a hyperon with asymmetry `alpha_y` read out along `n`:
/// an unbiased POVM with unsharpness `alpha_y`.
pub fn decay_povm(n: Direction3, alpha_y: f64) -> Result<GeneralPovm> {
    if !(alpha_y.abs() <= 1.0) {
        return Err(Error::OutOfRange {
            name: "alpha_y",
            value: alpha_y,
        });
    }
    GeneralPovm::new(n, alpha_y, 0.0)
}

/// Decay parameter of the CP-conjugate (antihyperon) decay, `ᾱ = −α`.
pub fn cp_conjugate_alpha(alpha_y: f64) -> f64 {
    -alpha_y
}

/// s- and p-wave amplitudes of a two-body hyperon decay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayAmplitudes {
    pub s_wave: Complex,
    pub p_wave: Complex,
}

impl DecayAmplitudes {
    fn intensity(&self) -> Result<f64> {
        let n = self.s_wave.norm_sqr() + self.p_wave.norm_sqr();
        if n > 0.0 && n.is_finite() {
            Ok(n)
        } else {
            Err(Error::ZeroAmplitudes)
        }
    }
}

/// `α = 2 Re(S* P) / (|S|² + |P|²)`.
pub fn alpha_from_amplitudes(a: &DecayAmplitudes) -> Result<f64> {
    let n = a.intensity()?;
    Ok((2.0 * (a.s_wave.conj() * a.p_wave).re / n).clamp(-1.0, 1.0))
}

/// Kraus operators `M± = (S ± P σ·n) / √(2(|S|² + |P|²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausPair {
    pub m_plus: Mat2,
    pub m_minus: Mat2,
}

impl KrausPair {
    /// `M†M` for the chosen outcome.
    pub fn effect(&self, outcome: Outcome) -> Mat2 {
        let m = match outcome {
            Outcome::Plus => self.m_plus,
            Outcome::Minus => self.m_minus,
        };
        m.dagger() * m
    }
}

pub fn kraus_from_amplitudes(a: &DecayAmplitudes, n: Direction3) -> Result<KrausPair> {
    let norm = libm::sqrt(2.0 * a.intensity()?);
    let sn = sigma_dot(n.require_unit()?);
    let s = Mat2::identity().scale_complex(a.s_wave);
    let p = sn.scale_complex(a.p_wave);
    Ok(KrausPair {
        m_plus: (s + p).scale(1.0 / norm),
        m_minus: (s - p).scale(1.0 / norm),
    })
}

/// `Tr(ρ E±) = (1 ± η ± α P·n)/2`.
pub fn single_prob(rho: &DensityMatrix2, p: &GeneralPovm, outcome: Outcome) -> f64 {
    rho.matrix().trace_product(&p.effect(outcome)).re
}

/// `Tr(ρ E_j(a) ⊗ E_k(b))`.
pub fn joint_prob(
    rho: &DensityMatrix4,
    pa: &GeneralPovm,
    pb: &GeneralPovm,
    ja: Outcome,
    jb: Outcome,
) -> f64 {
    rho.expectation(&kron(&pa.effect(ja), &pb.effect(jb)))
}
