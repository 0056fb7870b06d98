//! Generalized Clauser-Horne and CHSH operators.
//!
//! With unbiased POVMs the CH operator reduces to
//! `B_CH = −|α_aα_b|/2 · I + α_aα_b/4 · (ab − ab′ + a′b + a′b′)`, where
//! `uv` stands for `σ·u ⊗ σ·v`; the single-site terms cancel. The
//! implementation below still assembles it term by term so that biased
//! measurements are covered too.

use core::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{kron, sigma_dot, Direction3, Mat2, Mat4, Vec3};
use crate::povm::{cp_conjugate_alpha, joint_prob, single_prob, GeneralPovm, Outcome};
use crate::states::{DensityMatrix4, XStateParams};

/// Orthogonality tolerance for `a·a′` and `b·b′`.
pub const ORTHO_TOL: f64 = 1e-12;

/// Two directions per side: `a, a′` for the hyperon, `b, b′` for the
/// antihyperon.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeasurementSettings {
    pub a: Direction3,
    pub a_prime: Direction3,
    pub b: Direction3,
    pub b_prime: Direction3,
}

impl MeasurementSettings {
    pub fn new(
        a: Direction3,
        a_prime: Direction3,
        b: Direction3,
        b_prime: Direction3,
    ) -> Result<Self> {
        Ok(MeasurementSettings {
            a: a.require_unit()?,
            a_prime: a_prime.require_unit()?,
            b: b.require_unit()?,
            b_prime: b_prime.require_unit()?,
        })
    }

    pub fn is_orthogonal(&self) -> bool {
        self.a.dot(self.a_prime).abs() <= ORTHO_TOL && self.b.dot(self.b_prime).abs() <= ORTHO_TOL
    }

    pub fn require_orthogonal(&self) -> Result<()> {
        if self.is_orthogonal() {
            Ok(())
        } else {
            Err(Error::NonOrthogonalSettings)
        }
    }
}

/// `a = x̂`, `a′ = ŷ`, `b = (cos φ, sin φ, 0)`, `b′ = (−sin φ, cos φ, 0)`.
pub fn settings_phi(phi: f64) -> MeasurementSettings {
    let (s, c) = libm::sincos(phi);
    MeasurementSettings {
        a: Vec3::X,
        a_prime: Vec3::Y,
        b: Vec3::new(c, s, 0.0),
        b_prime: Vec3::new(-s, c, 0.0),
    }
}

/// Fixed settings for J/ψ pairs: `a = ẑ`, `a′ = ŷ`,
/// `b = (0, 1, −1)/√2`, `b′ = (0, 1, 1)/√2`.
pub fn settings_jpsi() -> MeasurementSettings {
    MeasurementSettings {
        a: Vec3::Z,
        a_prime: Vec3::Y,
        b: Vec3::new(0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
        b_prime: Vec3::new(0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2),
    }
}

/// Unsharpness and bias on each side.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChParams {
    pub alpha_a: f64,
    pub alpha_b: f64,
    pub eta_a: f64,
    pub eta_b: f64,
}

impl ChParams {
    pub fn unbiased(alpha_a: f64, alpha_b: f64) -> Self {
        ChParams {
            alpha_a,
            alpha_b,
            eta_a: 0.0,
            eta_b: 0.0,
        }
    }

    /// Hyperon decay on side A and the CP-conjugate decay on side B.
    pub fn hyperon_pair(alpha_y: f64) -> Self {
        Self::unbiased(alpha_y, cp_conjugate_alpha(alpha_y))
    }

    /// `|α_a α_b|`.
    pub fn alpha_product_abs(&self) -> f64 {
        (self.alpha_a * self.alpha_b).abs()
    }

    pub fn is_unbiased(&self) -> bool {
        self.eta_a == 0.0 && self.eta_b == 0.0
    }

    fn povms(&self, s: &MeasurementSettings) -> Result<[GeneralPovm; 4]> {
        Ok([
            GeneralPovm::new(s.a, self.alpha_a, self.eta_a)?,
            GeneralPovm::new(s.a_prime, self.alpha_a, self.eta_a)?,
            GeneralPovm::new(s.b, self.alpha_b, self.eta_b)?,
            GeneralPovm::new(s.b_prime, self.alpha_b, self.eta_b)?,
        ])
    }

    /// Constant term `((1+η_a)(1+η_b) − |α_aα_b|)/2`.
    fn constant(&self) -> f64 {
        ((1.0 + self.eta_a) * (1.0 + self.eta_b) - self.alpha_product_abs()) / 2.0
    }
}

/// The generalized CH operator for the `(+, +)` outcome pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChOperator {
    pub matrix: Mat4,
    pub params: ChParams,
    pub settings: MeasurementSettings,
}

pub fn ch_operator(s: &MeasurementSettings, params: &ChParams) -> Result<ChOperator> {
    let [pa, pap, pb, pbp] = params.povms(s)?;
    let plus = Outcome::Plus;
    let (ea, eap, eb, ebp) = (
        pa.effect(plus),
        pap.effect(plus),
        pb.effect(plus),
        pbp.effect(plus),
    );
    let id = Mat2::identity();
    let m = kron(&ea, &eb) - kron(&ea, &ebp) + kron(&eap, &eb) + kron(&eap, &ebp)
        - kron(&eap, &id).scale(1.0 + params.eta_b)
        - kron(&id, &eb).scale(1.0 + params.eta_a)
        + Mat4::identity().scale(params.constant());
    Ok(ChOperator {
        matrix: m,
        params: *params,
        settings: *s,
    })
}

/// The six probabilities entering the CH functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChProbabilities {
    pub p_ab: f64,
    pub p_ab_prime: f64,
    pub p_a_prime_b: f64,
    pub p_a_prime_b_prime: f64,
    pub p_a_prime: f64,
    pub p_b: f64,
}

impl ChProbabilities {
    /// Quantum predictions for `(+, +)` outcomes in state `rho`.
    pub fn from_state(
        rho: &DensityMatrix4,
        s: &MeasurementSettings,
        params: &ChParams,
    ) -> Result<Self> {
        let [pa, pap, pb, pbp] = params.povms(s)?;
        let plus = Outcome::Plus;
        let j = |x: &GeneralPovm, y: &GeneralPovm| joint_prob(rho, x, y, plus, plus);
        Ok(ChProbabilities {
            p_ab: j(&pa, &pb),
            p_ab_prime: j(&pa, &pbp),
            p_a_prime_b: j(&pap, &pb),
            p_a_prime_b_prime: j(&pap, &pbp),
            p_a_prime: single_prob(&rho.reduced_first(), &pap, plus),
            p_b: single_prob(&rho.reduced_second(), &pb, plus),
        })
    }

    fn all(&self) -> [f64; 6] {
        [
            self.p_ab,
            self.p_ab_prime,
            self.p_a_prime_b,
            self.p_a_prime_b_prime,
            self.p_a_prime,
            self.p_b,
        ]
    }
}

/// The CH functional over measured probabilities, `(+, +)` outcomes.
pub fn ch_functional(p: &ChProbabilities, params: &ChParams) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    if let Some(bad) = p
        .all()
        .into_iter()
        .find(|v| !(-SLACK..=1.0 + SLACK).contains(v))
    {
        return Err(Error::InvalidProbability(bad));
    }
    Ok(p.p_ab - p.p_ab_prime + p.p_a_prime_b + p.p_a_prime_b_prime
        - (1.0 + params.eta_b) * p.p_a_prime
        - (1.0 + params.eta_a) * p.p_b
        + params.constant())
}

/// `⟨B_CH⟩ = Tr(ρ B_CH)`.
pub fn ch_expectation(rho: &DensityMatrix4, op: &ChOperator) -> f64 {
    rho.expectation(&op.matrix)
}

/// `C = [σ·a, σ·a′] ⊗ [σ·b, σ·b′] / 16`.
pub fn commutator_term(s: &MeasurementSettings) -> Mat4 {
    let ca = sigma_dot(s.a).commutator(&sigma_dot(s.a_prime));
    let cb = sigma_dot(s.b).commutator(&sigma_dot(s.b_prime));
    kron(&ca, &cb).scale(1.0 / 16.0)
}

/// Max-norm of `B² + |α_aα_b| B − α_a²α_b² C`.
///
/// This combination vanishes identically for unbiased POVMs and
/// orthogonal settings, so `κ₂(B) = −|α_aα_b|⟨B⟩ − ⟨B⟩² + α_a²α_b²⟨C⟩`.
pub fn square_identity_residual(op: &ChOperator) -> Result<f64> {
    op.settings.require_orthogonal()?;
    if !op.params.is_unbiased() {
        return Err(Error::InvalidPovm {
            alpha: op.params.alpha_a,
            eta: op.params.eta_a,
        });
    }
    let b = op.matrix;
    let ab = op.params.alpha_product_abs();
    let c = commutator_term(&op.settings);
    Ok((b * b + b.scale(ab) - c.scale(ab * ab)).max_abs())
}

/// `a ⊗ (b + b′) + a′ ⊗ (b − b′)` in Pauli form.
pub fn chsh_operator(s: &MeasurementSettings) -> Result<Mat4> {
    s.require_orthogonal()?;
    Ok(kron(&sigma_dot(s.a), &sigma_dot(s.b + s.b_prime))
        + kron(&sigma_dot(s.a_prime), &sigma_dot(s.b - s.b_prime)))
}

/// `B⁴_CHSH = 16 I + K² − 8 K` with `K = [a, a′] ⊗ [b, b′]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshFourthPower {
    pub identity_coeff: f64,
    /// `[a, a′]² ⊗ [b, b′]²`.
    pub comm_sq_term: Mat4,
    /// `[a, a′] ⊗ [b, b′]`.
    pub comm_term: Mat4,
    pub comm_coeff: f64,
}

impl ChshFourthPower {
    pub fn sum(&self) -> Mat4 {
        Mat4::identity().scale(self.identity_coeff)
            + self.comm_sq_term
            + self.comm_term.scale(self.comm_coeff)
    }
}

pub fn chsh_fourth_power(s: &MeasurementSettings) -> Result<ChshFourthPower> {
    s.require_orthogonal()?;
    let ca = sigma_dot(s.a).commutator(&sigma_dot(s.a_prime));
    let cb = sigma_dot(s.b).commutator(&sigma_dot(s.b_prime));
    Ok(ChshFourthPower {
        identity_coeff: 16.0,
        comm_sq_term: kron(&(ca * ca), &(cb * cb)),
        comm_term: kron(&ca, &cb),
        comm_coeff: -8.0,
    })
}

/// Settings maximizing `⟨B_CH⟩` on an X-state for the given POVM
/// parameters (Horodecki construction in the plane of the two largest
/// `|t_i|`).
///
/// `a, a′` come out orthogonal; `b, b′` in general do not.
pub fn optimal_ch_settings(x: &XStateParams, params: &ChParams) -> MeasurementSettings {
    let t = x.t();
    let mut axes = [0usize, 1, 2];
    axes.sort_by(|&i, &j| t[j].abs().total_cmp(&t[i].abs()));
    let (i1, i2) = (axes[0], axes[1]);
    let unit =
        |i: usize| Vec3::from_array(core::array::from_fn(|k| if k == i { 1.0 } else { 0.0 }));
    let (e1, e2) = (unit(i1), unit(i2));
    let r = libm::hypot(t[i1], t[i2]);
    let (cos_t, sin_t) = if r > 0.0 {
        (t[i1].abs() / r, t[i2].abs() / r)
    } else {
        (FRAC_1_SQRT_2, FRAC_1_SQRT_2)
    };
    let sign = |v: f64| if v < 0.0 { -1.0 } else { 1.0 };
    let s = sign(params.alpha_a * params.alpha_b);
    MeasurementSettings {
        a: e1.scale(s * sign(t[i1])),
        a_prime: e2.scale(s * sign(t[i2])),
        b: e1.scale(cos_t) + e2.scale(sin_t),
        b_prime: e1.scale(-cos_t) + e2.scale(sin_t),
    }
}
