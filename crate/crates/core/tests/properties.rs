use hyqc_core::bell::{
    ch_expectation, ch_operator, settings_phi, square_identity_residual, ChParams,
    MeasurementSettings,
};
use hyqc_core::bounds::{
    lhv_extremal_scan, lhv_value, modified_ch_bounds, modified_mu4_bound, modified_skewness_bound,
    mu4_bound, skewness_bound,
};
use hyqc_core::linalg::{kron, pauli_dot, Complex, Mat2, Mat4, Vec3};
use hyqc_core::moments::{central_moments, cumulants, operator_statistics, MomentVector};
use hyqc_core::states::{decompose, DensityMatrix4};
use proptest::prelude::*;

fn unit() -> impl Strategy<Value = Vec3> {
    (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(z, p)| {
        let r = (1.0 - z * z).sqrt();
        Vec3::new(r * p.cos(), r * p.sin(), z)
    })
}

fn orthonormal_pair() -> impl Strategy<Value = (Vec3, Vec3)> {
    (unit(), unit()).prop_filter_map("parallel draw", |(u, v)| {
        let w = (v - u.scale(u.dot(v))).normalized()?;
        (u.cross(v).norm() > 1e-3).then_some((u, w))
    })
}

fn complex() -> impl Strategy<Value = Complex> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex::new(re, im))
}

fn mat2() -> impl Strategy<Value = Mat2> {
    proptest::array::uniform2(proptest::array::uniform2(complex()))
        .prop_map(hyqc_core::linalg::Matrix)
}

/// `M M† / Tr(M M†)` for a random complex 4×4 `M`.
fn state() -> impl Strategy<Value = DensityMatrix4> {
    proptest::array::uniform4(proptest::array::uniform4(complex())).prop_filter_map(
        "degenerate",
        |rows| {
            let m = hyqc_core::linalg::Matrix(rows);
            let g: Mat4 = m * m.dagger();
            let tr = g.trace().re;
            (tr > 1e-6)
                .then(|| DensityMatrix4::new(g.scale(1.0 / tr)).ok())
                .flatten()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn anticommutation(n in unit(), m in unit()) {
        let (a, b) = (pauli_dot(n).unwrap(), pauli_dot(m).unwrap());
        let lhs = a * b + b * a;
        prop_assert!(lhs.max_abs_diff(&Mat2::identity().scale(2.0 * n.dot(m))) < 1e-12);
    }

    #[test]
    fn commutator_of_orthonormal_pair((a, b) in orthonormal_pair()) {
        let c = pauli_dot(a).unwrap().commutator(&pauli_dot(b).unwrap());
        let want = pauli_dot(a.cross(b)).unwrap().scale_complex(Complex::new(0.0, 2.0));
        prop_assert!(c.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn kron_mixed_product(a in mat2(), b in mat2(), c in mat2(), d in mat2()) {
        let lhs = kron(&a, &b) * kron(&c, &d);
        prop_assert!(lhs.max_abs_diff(&kron(&(a * c), &(b * d))) < 1e-12);
        let tr = kron(&a, &b).trace() - a.trace() * b.trace();
        prop_assert!(tr.norm() < 1e-12);
    }

    #[test]
    fn square_identity_on_random_frames(
        (a, ap) in orthonormal_pair(),
        (b, bp) in orthonormal_pair(),
        alpha_a in -1.0f64..1.0,
        alpha_b in -1.0f64..1.0,
    ) {
        let s = MeasurementSettings::new(a, ap, b, bp).unwrap();
        let op = ch_operator(&s, &ChParams::unbiased(alpha_a, alpha_b)).unwrap();
        prop_assert!(square_identity_residual(&op).unwrap() < 1e-12);
    }

    #[test]
    fn variance_of_ch_is_nonnegative(rho in state(), phi in -3.2f64..3.2, alpha in -1.0f64..1.0) {
        let op = ch_operator(&settings_phi(phi), &ChParams::hyperon_pair(alpha)).unwrap();
        let st = operator_statistics(&rho, &op.matrix);
        prop_assert!(st.cumulants.k2 >= -1e-12);
        prop_assert!(st.central.mu4 >= st.central.mu2 * st.central.mu2 - 1e-12);
    }

    #[test]
    fn decomposition_round_trip(rho in state()) {
        let d = decompose(&rho);
        prop_assert!(d.recompose().max_abs_diff(rho.matrix()) < 1e-10);
        prop_assert!(d.p_y.norm() <= 1.0 + 1e-12 && d.p_ybar.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn quantum_ch_within_operator_spectrum(rho in state(), phi in -3.2f64..3.2, alpha in -1.0f64..1.0) {
        let op = ch_operator(&settings_phi(phi), &ChParams::hyperon_pair(alpha)).unwrap();
        let ev = op.matrix.hermitian_eigenvalues();
        let v = ch_expectation(&rho, &op);
        prop_assert!(v >= ev[0] - 1e-12 && v <= ev[3] + 1e-12);
    }

    #[test]
    fn interior_responses_never_beat_vertices(
        alpha in 0.0f64..1.0,
        r in proptest::array::uniform4(0.0f64..1.0),
    ) {
        let p = ChParams::unbiased(alpha, alpha);
        let (lo, hi) = lhv_extremal_scan(&settings_phi(0.0), &p, 2).unwrap();
        let map = |u: f64| (1.0 - alpha) / 2.0 + alpha * u;
        let v = lhv_value([map(r[0]), map(r[1])], [map(r[2]), map(r[3])], &p).unwrap();
        prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
        prop_assert!((lo + alpha * alpha).abs() < 1e-12 && hi.abs() < 1e-12);
    }

    #[test]
    fn modified_bounds_widen_as_beta_drops(alpha in -1.0f64..1.0, b1 in 0.0f64..1.0, b2 in 0.0f64..1.0) {
        let (lo, hi) = if b1 < b2 { (b1, b2) } else { (b2, b1) };
        let (wide, narrow) = (modified_ch_bounds(alpha, lo).unwrap(), modified_ch_bounds(alpha, hi).unwrap());
        prop_assert!(wide.lower <= narrow.lower + 1e-15 && wide.upper >= narrow.upper - 1e-15);
        prop_assert!(modified_skewness_bound(alpha, lo).unwrap() >= modified_skewness_bound(alpha, hi).unwrap());
        prop_assert!(modified_mu4_bound(alpha, lo).unwrap() >= modified_mu4_bound(alpha, hi).unwrap());
        prop_assert!((modified_skewness_bound(alpha, 1.0).unwrap() - skewness_bound(alpha, alpha)).abs() < 1e-15);
        prop_assert!((modified_mu4_bound(alpha, 1.0).unwrap() - mu4_bound(alpha)).abs() < 1e-15);
    }

    /// Cumulants of a sum of independent variables add up.
    #[test]
    fn cumulant_additivity(p in 0.05f64..0.95, q in 0.05f64..0.95, x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let dx = [(0.0, 1.0 - p), (x, p)];
        let dy = [(0.0, 1.0 - q), (y, q)];
        let sum: Vec<(f64, f64)> =
            dx.iter().flat_map(|&(a, wa)| dy.iter().map(move |&(b, wb)| (a + b, wa * wb))).collect();
        let (kx, ky) = (cumulants(&MomentVector::from_distribution(&dx)), cumulants(&MomentVector::from_distribution(&dy)));
        let ks = cumulants(&MomentVector::from_distribution(&sum));
        prop_assert!((ks.k2 - kx.k2 - ky.k2).abs() < 1e-12);
        prop_assert!((ks.k3 - kx.k3 - ky.k3).abs() < 1e-12);
        prop_assert!((ks.k4 - kx.k4 - ky.k4).abs() < 1e-11);
        let c = central_moments(&MomentVector::from_distribution(&dx));
        prop_assert!((kx.k4 - (c.mu4 - 3.0 * c.mu2 * c.mu2)).abs() < 1e-12);
    }
}

/// Fourth-order central differences of `ln⟨e^{sB}⟩` at `s = 0`, one
/// Richardson step from `h = 1e-2` to `h/2`.
#[test]
fn cumulants_match_cgf_derivatives() {
    let rho = DensityMatrix4::new(
        hyqc_core::states::singlet_state().matrix().scale(0.7) + Mat4::identity().scale(0.3 / 4.0),
    )
    .unwrap();
    let op = ch_operator(&settings_phi(-0.4), &ChParams::hyperon_pair(0.9))
        .unwrap()
        .matrix;
    // e^{sB} by Taylor series; the operator norm is below 2.
    let cgf = |s: f64| {
        let mut term = Mat4::identity();
        let mut sum = Mat4::identity();
        for k in 1..40 {
            term = (term * op).scale(s / k as f64);
            sum += term;
        }
        rho.expectation(&sum).ln()
    };
    let derivs = |h: f64| {
        let f: Vec<f64> = (-3..=3).map(|i| cgf(i as f64 * h)).collect();
        let d1 = (f[1] - 8.0 * f[2] + 8.0 * f[4] - f[5]) / (12.0 * h);
        let d2 = (-f[1] + 16.0 * f[2] - 30.0 * f[3] + 16.0 * f[4] - f[5]) / (12.0 * h * h);
        let d3 =
            (f[0] - 8.0 * f[1] + 13.0 * f[2] - 13.0 * f[4] + 8.0 * f[5] - f[6]) / (8.0 * h.powi(3));
        let d4 = (-f[0] + 12.0 * f[1] - 39.0 * f[2] + 56.0 * f[3] - 39.0 * f[4] + 12.0 * f[5]
            - f[6])
            / (6.0 * h.powi(4));
        [d1, d2, d3, d4]
    };
    let (coarse, fine) = (derivs(1e-2), derivs(5e-3));
    let k = cumulants(&operator_statistics(&rho, &op).moments);
    for (i, want) in [k.k1, k.k2, k.k3, k.k4].into_iter().enumerate() {
        let rich = (16.0 * fine[i] - coarse[i]) / 15.0;
        assert!((rich - want).abs() < 1e-5, "κ{}: {rich} vs {want}", i + 1);
    }
}
