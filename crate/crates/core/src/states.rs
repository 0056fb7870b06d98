//! Two-qubit spin states of hyperon-antihyperon pairs.
//!
//! Pairs from spin-0 charmonium (η_c, χ_c0) are produced in the singlet.
//! Pairs from J/ψ are described, after local unitaries, by a symmetric
//! X-state whose coefficients follow from the production parameters
//! (α_ψ, ΔΦ) and the scattering angle ϑ.

use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{kron, paulis, sigma_dot, Complex, Mat2, Mat4, Real3, Vec3, HERMITIAN_TOL};

/// Tolerance on `Tr ρ = 1`.
pub const TRACE_TOL: f64 = 1e-9;
/// Boundary slack for the X-state square-root discriminant.
pub const DISCRIMINANT_TOL: f64 = 1e-12;

/// A validated two-qubit density matrix: Hermitian, unit trace, PSD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4(Mat4);

impl DensityMatrix4 {
    pub fn new(m: Mat4) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::InvalidState("non-finite entries"));
        }
        if !m.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::InvalidState("not Hermitian"));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState("trace differs from 1"));
        }
        if m.hermitian_eigenvalues()[0] < -HERMITIAN_TOL {
            return Err(Error::InvalidState("not positive semidefinite"));
        }
        Ok(DensityMatrix4(m))
    }

    /// `I/4`.
    pub fn maximally_mixed() -> Self {
        DensityMatrix4(Mat4::identity().scale(0.25))
    }

    /// `ρ_a ⊗ ρ_b`.
    pub fn product(a: &DensityMatrix2, b: &DensityMatrix2) -> Self {
        DensityMatrix4(kron(a.matrix(), b.matrix()))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    /// `Re Tr(ρ · op)`.
    pub fn expectation(&self, op: &Mat4) -> f64 {
        self.0.trace_product(op).re
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.expectation(&self.0)
    }

    /// Reduced state of the first qubit (the hyperon).
    pub fn reduced_first(&self) -> DensityMatrix2 {
        let m = &self.0 .0;
        let mut r = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                r.0[i][j] = m[2 * i][2 * j] + m[2 * i + 1][2 * j + 1];
            }
        }
        DensityMatrix2(r)
    }

    /// Reduced state of the second qubit (the antihyperon).
    pub fn reduced_second(&self) -> DensityMatrix2 {
        let m = &self.0 .0;
        let mut r = Mat2::zero();
        for k in 0..2 {
            for l in 0..2 {
                r.0[k][l] = m[k][l] + m[2 + k][2 + l];
            }
        }
        DensityMatrix2(r)
    }
}

/// A validated single-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2(Mat2);

impl DensityMatrix2 {
    pub fn new(m: Mat2) -> Result<Self> {
        if !m.is_finite() || !m.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::InvalidState("not Hermitian"));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState("trace differs from 1"));
        }
        if m.hermitian_eigenvalues()[0] < -HERMITIAN_TOL {
            return Err(Error::InvalidState("not positive semidefinite"));
        }
        Ok(DensityMatrix2(m))
    }

    /// `(I + P·σ)/2` for a Bloch vector with `|P| ≤ 1`.
    pub fn from_bloch(p: Vec3) -> Result<Self> {
        if !p.is_finite() || p.norm() > 1.0 + HERMITIAN_TOL {
            return Err(Error::InvalidState("Bloch vector longer than 1"));
        }
        Ok(DensityMatrix2((Mat2::identity() + sigma_dot(p)).scale(0.5)))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    /// Polarization vector `P_i = Tr(ρ σ_i)`.
    pub fn bloch(&self) -> Vec3 {
        let [sx, sy, sz] = paulis();
        Vec3::new(
            self.0.trace_product(&sx).re,
            self.0.trace_product(&sy).re,
            self.0.trace_product(&sz).re,
        )
    }
}

/// Polarizations and spin correlations of a two-qubit state:
/// `ρ = [I⊗I + P·σ⊗I + I⊗P̄·σ + Σ C_ij σ_i⊗σ_j] / 4`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TwoQubitDecomposition {
    pub p_y: Vec3,
    pub p_ybar: Vec3,
    pub c: Real3,
}

impl TwoQubitDecomposition {
    /// Reassembles the matrix. The result is not checked for positivity;
    /// estimated decompositions need not describe a physical state.
    pub fn recompose(&self) -> Mat4 {
        let id = Mat2::identity();
        let s = paulis();
        let mut m = Mat4::identity();
        m += kron(&sigma_dot(self.p_y), &id);
        m += kron(&id, &sigma_dot(self.p_ybar));
        for i in 0..3 {
            for j in 0..3 {
                if self.c[i][j] != 0.0 {
                    m += kron(&s[i], &s[j]).scale(self.c[i][j]);
                }
            }
        }
        m.scale(0.25)
    }

    /// Largest singular value of `C`.
    pub fn correlation_norm(&self) -> f64 {
        let ev = crate::linalg::sym3_eigenvalues(&gram(&self.c)).expect("CᵀC is symmetric");
        libm::sqrt(ev[0].max(0.0))
    }
}

/// `CᵀC`, exactly symmetric.
fn gram(c: &Real3) -> Real3 {
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let v = (0..3).map(|k| c[k][i] * c[k][j]).sum();
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    g
}

/// `P_i = Tr(ρ σ_i⊗I)`, `P̄_j = Tr(ρ I⊗σ_j)`, `C_ij = Tr(ρ σ_i⊗σ_j)`.
pub fn decompose(rho: &DensityMatrix4) -> TwoQubitDecomposition {
    let id = Mat2::identity();
    let s = paulis();
    let p = |i: usize| rho.expectation(&kron(&s[i], &id));
    let q = |j: usize| rho.expectation(&kron(&id, &s[j]));
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = rho.expectation(&kron(&s[i], &s[j]));
        }
    }
    TwoQubitDecomposition {
        p_y: Vec3::new(p(0), p(1), p(2)),
        p_ybar: Vec3::new(q(0), q(1), q(2)),
        c,
    }
}

/// `|ψ_s⟩ = (|+−⟩ − |−+⟩)/√2` as a density matrix.
pub fn singlet_state() -> DensityMatrix4 {
    let mut m = Mat4::zero();
    let h = Complex::new(0.5, 0.0);
    m.0[1][1] = h;
    m.0[2][2] = h;
    m.0[1][2] = -h;
    m.0[2][1] = -h;
    DensityMatrix4(m)
}

/// Coefficients of the symmetric X-state
/// `ρ = [I⊗I + a σz⊗I + a I⊗σz + Σ t_i σ_i⊗σ_i] / 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct XStateParams {
    pub a: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
}

impl XStateParams {
    pub const SINGLET: XStateParams = XStateParams {
        a: 0.0,
        t1: -1.0,
        t2: -1.0,
        t3: -1.0,
    };

    pub fn t(&self) -> [f64; 3] {
        [self.t1, self.t2, self.t3]
    }

    pub fn correlation_matrix(&self) -> Real3 {
        [
            [self.t1, 0.0, 0.0],
            [0.0, self.t2, 0.0],
            [0.0, 0.0, self.t3],
        ]
    }

    pub fn decomposition(&self) -> TwoQubitDecomposition {
        TwoQubitDecomposition {
            p_y: Vec3::new(0.0, 0.0, self.a),
            p_ybar: Vec3::new(0.0, 0.0, self.a),
            c: self.correlation_matrix(),
        }
    }
}

/// J/ψ → YȲ production parameters at a given scattering angle.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProductionParams {
    pub alpha_psi: f64,
    pub delta_phi: f64,
    pub theta_scatter: f64,
}

impl ProductionParams {
    pub fn new(alpha_psi: f64, delta_phi: f64, theta_scatter: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&alpha_psi) {
            return Err(Error::OutOfRange {
                name: "alpha_psi",
                value: alpha_psi,
            });
        }
        if !(delta_phi > -PI && delta_phi <= PI) {
            return Err(Error::OutOfRange {
                name: "delta_phi",
                value: delta_phi,
            });
        }
        if !(0.0..=PI).contains(&theta_scatter) {
            return Err(Error::OutOfRange {
                name: "theta_scatter",
                value: theta_scatter,
            });
        }
        Ok(ProductionParams {
            alpha_psi,
            delta_phi,
            theta_scatter,
        })
    }

    /// `γ_ψ = √(1 − α_ψ²) sin ΔΦ`.
    pub fn gamma_psi(&self) -> f64 {
        libm::sqrt(1.0 - self.alpha_psi * self.alpha_psi) * libm::sin(self.delta_phi)
    }
}

/// X-state coefficients from the J/ψ decay kinematics.
pub fn xstate_coeffs(p: &ProductionParams) -> Result<XStateParams> {
    let p = ProductionParams::new(p.alpha_psi, p.delta_phi, p.theta_scatter)?;
    let ap = p.alpha_psi;
    let g = p.gamma_psi();
    let (s, c) = libm::sincos(p.theta_scatter);
    let den = 1.0 + ap * c * c;
    if den <= 0.0 {
        // α_ψ = −1 at ϑ ∈ {0, π}: the production amplitude vanishes.
        return Err(Error::OutOfRange {
            name: "theta_scatter",
            value: p.theta_scatter,
        });
    }
    let s2 = 2.0 * s * c;
    let c2 = c * c - s * s;
    let mut disc = (1.0 + ap * c2) * (1.0 + ap * c2) - g * g * s2 * s2;
    if disc < 0.0 {
        if disc < -DISCRIMINANT_TOL {
            return Err(Error::NegativeDiscriminant(disc));
        }
        disc = 0.0;
    }
    let root = libm::sqrt(disc);
    Ok(XStateParams {
        a: g * s * c / den,
        t1: (1.0 + ap + root) / (2.0 * den),
        t2: (1.0 + ap - root) / (2.0 * den),
        t3: -ap * s * s / den,
    })
}

/// Density matrix of an X-state; fails if the coefficients are not a state.
pub fn build_xstate(x: &XStateParams) -> Result<DensityMatrix4> {
    for (name, v) in [("a", x.a), ("t1", x.t1), ("t2", x.t2), ("t3", x.t3)] {
        if !(v.abs() <= 1.0) {
            return Err(Error::OutOfRange { name, value: v });
        }
    }
    DensityMatrix4::new(x.decomposition().recompose())
}

/// Maximal CHSH expectation `2√(λ₁+λ₂)` over all settings, with `λ₁ ≥ λ₂`
/// the two largest eigenvalues of `CᵀC`.
pub fn horodecki_max_correlation(c: &Real3) -> f64 {
    let ev = crate::linalg::sym3_eigenvalues(&gram(c)).expect("CᵀC is symmetric");
    2.0 * libm::sqrt((ev[0] + ev[1]).max(0.0))
}

/// Horodecki CHSH maximum of an X-state (`T = diag(t1, t2, t3)`).
pub fn horodecki_max(x: &XStateParams) -> f64 {
    horodecki_max_correlation(&x.correlation_matrix())
}

/// Electromagnetic form factors at centre-of-mass energy squared `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormFactors {
    pub g_e: Complex,
    pub g_m: Complex,
    /// GeV².
    pub s: f64,
    /// Baryon mass in GeV.
    pub mass: f64,
}

/// `α_ψ = (s|G_M|² − 4M²|G_E|²) / (s|G_M|² + 4M²|G_E|²)`.
pub fn alpha_from_formfactors(ff: &FormFactors) -> Result<f64> {
    let four_m2 = 4.0 * ff.mass * ff.mass;
    if !(ff.s > four_m2) {
        return Err(Error::OutOfRange {
            name: "s",
            value: ff.s,
        });
    }
    let magnetic = ff.s * ff.g_m.norm_sqr();
    let electric = four_m2 * ff.g_e.norm_sqr();
    let den = magnetic + electric;
    if den == 0.0 {
        return Err(Error::ZeroFormFactors);
    }
    Ok(((magnetic - electric) / den).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;

    const EPS: f64 = 1e-12;

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn singlet_structure() {
        let s = singlet_state();
        assert!(DensityMatrix4::new(*s.matrix()).is_ok());
        approx(s.purity(), 1.0, EPS);
        let d = decompose(&s);
        assert_eq!(d.p_y, Vec3::ZERO);
        assert_eq!(d.p_ybar, Vec3::ZERO);
        for i in 0..3 {
            for j in 0..3 {
                approx(d.c[i][j], if i == j { -1.0 } else { 0.0 }, EPS);
            }
        }
        let sz_i = kron(&crate::linalg::pauli_z(), &Mat2::identity());
        approx(s.expectation(&sz_i), 0.0, EPS);
    }

    #[test]
    fn maximally_mixed_decomposes_to_zero() {
        let d = decompose(&DensityMatrix4::maximally_mixed());
        assert_eq!(d, TwoQubitDecomposition::default());
    }

    #[test]
    fn xstate_limits() {
        let singlet = build_xstate(&XStateParams::SINGLET).unwrap();
        assert!(singlet.matrix().max_abs_diff(singlet_state().matrix()) < EPS);
        let mixed = build_xstate(&XStateParams {
            a: 0.0,
            t1: 0.0,
            t2: 0.0,
            t3: 0.0,
        })
        .unwrap();
        assert!(
            mixed
                .matrix()
                .max_abs_diff(DensityMatrix4::maximally_mixed().matrix())
                < EPS
        );
    }

    #[test]
    fn xstate_round_trip() {
        let x = XStateParams {
            a: 0.3,
            t1: 0.5,
            t2: 0.2,
            t3: 0.1,
        };
        let d = decompose(&build_xstate(&x).unwrap());
        let want = x.decomposition();
        for i in 0..3 {
            approx(d.p_y[i], want.p_y[i], EPS);
            approx(d.p_ybar[i], want.p_ybar[i], EPS);
            for j in 0..3 {
                approx(d.c[i][j], want.c[i][j], EPS);
            }
        }
    }

    #[test]
    fn build_xstate_rejects_non_psd() {
        // t = (1, 1, 1) has eigenvalue (1 - 1 - 1 - 1)/4 < 0.
        let x = XStateParams {
            a: 0.0,
            t1: 1.0,
            t2: 1.0,
            t3: 1.0,
        };
        assert_eq!(
            build_xstate(&x),
            Err(Error::InvalidState("not positive semidefinite"))
        );
        // Smallest eigenvalue (1 + t3)/4 - √(a² + (t1 - t2)²/4)/2 ≈ -0.018.
        let x = XStateParams {
            a: 0.3,
            t1: 0.5,
            t2: 0.2,
            t3: -0.4,
        };
        assert!(build_xstate(&x).is_err());
    }

    #[test]
    fn coeffs_at_right_angle() {
        for (ap, dp) in [(0.475, 0.752), (-0.508, -0.27), (0.0, 1.0)] {
            let x = xstate_coeffs(&ProductionParams::new(ap, dp, FRAC_PI_2).unwrap()).unwrap();
            approx(x.a, 0.0, EPS);
            approx(x.t1, 1.0, EPS);
            approx(x.t2, ap, EPS);
            approx(x.t3, -ap, EPS);
        }
    }

    #[test]
    fn coeffs_at_zero_angle() {
        let x = xstate_coeffs(&ProductionParams::new(0.475, 0.752, 0.0).unwrap()).unwrap();
        approx(x.a, 0.0, EPS);
        approx(x.t1, 1.0, EPS);
        approx(x.t2, 0.0, EPS);
        approx(x.t3, 0.0, EPS);
    }

    #[test]
    fn production_params_ranges() {
        assert!(ProductionParams::new(1.2, 0.0, 0.0).is_err());
        assert!(ProductionParams::new(0.0, -PI, 0.0).is_err());
        assert!(ProductionParams::new(0.0, PI, 0.0).is_ok());
        assert!(ProductionParams::new(0.0, 0.0, 3.5).is_err());
    }

    #[test]
    fn horodecki_examples() {
        approx(
            horodecki_max(&XStateParams::SINGLET),
            2.0 * core::f64::consts::SQRT_2,
            EPS,
        );
        let ap = 0.475;
        let x = xstate_coeffs(&ProductionParams::new(ap, 0.752, FRAC_PI_2).unwrap()).unwrap();
        approx(horodecki_max(&x), 2.0 * libm::sqrt(1.0 + ap * ap), EPS);
        approx(
            horodecki_max(&XStateParams {
                a: 0.0,
                t1: 0.0,
                t2: 0.0,
                t3: 0.0,
            }),
            0.0,
            EPS,
        );
    }

    #[test]
    fn form_factor_limits() {
        let ff = |ge: f64, gm: f64| FormFactors {
            g_e: Complex::new(ge, 0.0),
            g_m: Complex::new(0.0, gm),
            s: 9.59,
            mass: 1.115683,
        };
        approx(alpha_from_formfactors(&ff(0.0, 1.0)).unwrap(), 1.0, EPS);
        approx(alpha_from_formfactors(&ff(1.0, 0.0)).unwrap(), -1.0, EPS);
        let m = 1.115683f64;
        let ge = libm::sqrt(9.59) / (2.0 * m);
        approx(alpha_from_formfactors(&ff(ge, 1.0)).unwrap(), 0.0, EPS);
        assert_eq!(
            alpha_from_formfactors(&ff(0.0, 0.0)),
            Err(Error::ZeroFormFactors)
        );
        let below = FormFactors {
            s: 1.0,
            ..ff(1.0, 1.0)
        };
        assert!(alpha_from_formfactors(&below).is_err());
    }

    #[test]
    fn partial_traces_of_product() {
        let a = DensityMatrix2::from_bloch(Vec3::new(0.1, -0.3, 0.5)).unwrap();
        let b = DensityMatrix2::from_bloch(Vec3::new(0.0, 0.6, -0.2)).unwrap();
        let rho = DensityMatrix4::product(&a, &b);
        assert!(rho.reduced_first().matrix().max_abs_diff(a.matrix()) < EPS);
        assert!(rho.reduced_second().matrix().max_abs_diff(b.matrix()) < EPS);
    }
}
