//! Parameter scans, extremum search and violation reports.
//!
//! η_c and χ_c0 pairs are singlets scanned over the setting angle φ of
//! `settings_phi`. J/ψ pairs are X-states scanned over the scattering
//! angle ϑ; the CH mean there uses the optimal settings for each ϑ and
//! the higher moments use `settings_jpsi`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::bell::{
    ch_operator, optimal_ch_settings, settings_jpsi, settings_phi, ChParams, MeasurementSettings,
};
use crate::bounds::{
    ch_bounds, modified_ch_bounds, modified_mu4_bound, modified_skewness_bound, mu4_bound,
    skewness_bound,
};
use crate::channels::{ChannelConfig, Parent};
use crate::error::{Error, Result};
use crate::moments::operator_statistics;
use crate::montecarlo::{
    estimate_ch, feature_replicates, sample_events, EstimatorResult, EventBatch, FeatureReplicates,
    MIN_BATCH_HIGH_ORDER,
};
use crate::states::{
    build_xstate, decompose, singlet_state, xstate_coeffs, DensityMatrix4, TwoQubitDecomposition,
};

pub const DEFAULT_STEPS: usize = 721;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_RESAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ScanVariable {
    Phi,
    Vartheta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Quantity {
    ChMean,
    Kappa3,
    Mu4,
}

impl Quantity {
    pub const ALL: [Quantity; 3] = [Quantity::ChMean, Quantity::Kappa3, Quantity::Mu4];

    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::ChMean => "ch_mean",
            Quantity::Kappa3 => "kappa3",
            Quantity::Mu4 => "mu4",
        }
    }

    pub fn parse(s: &str) -> Option<Quantity> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.as_str().eq_ignore_ascii_case(s))
    }

    /// What gets maximized: `|κ₃|` for the skewness, the value otherwise.
    pub fn objective(self, value: f64) -> f64 {
        match self {
            Quantity::Kappa3 => value.abs(),
            _ => value,
        }
    }
}

/// Evenly spaced grid. With `open` set the endpoints are dropped and the
/// `steps` points sit at `start + (i + 1)·(stop − start)/(steps + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanSpec {
    pub variable: ScanVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
    pub open: bool,
}

impl ScanSpec {
    pub fn new(variable: ScanVariable, start: f64, stop: f64, steps: usize) -> Result<Self> {
        let s = ScanSpec {
            variable,
            start,
            stop,
            steps,
            open: false,
        };
        s.validate()?;
        Ok(s)
    }

    /// φ ∈ [0, π/2] or ϑ ∈ (0, π), 721 points.
    pub fn default_for(variable: ScanVariable) -> Self {
        match variable {
            ScanVariable::Phi => ScanSpec {
                variable,
                start: 0.0,
                stop: FRAC_PI_2,
                steps: DEFAULT_STEPS,
                open: false,
            },
            ScanVariable::Vartheta => ScanSpec {
                variable,
                start: 0.0,
                stop: PI,
                steps: DEFAULT_STEPS,
                open: true,
            },
        }
    }

    /// Bracket used by reports: φ ∈ [−π/4, π/2] holds a single maximum of
    /// each singlet quantity; ϑ as in `default_for`.
    pub fn extremum_default(variable: ScanVariable) -> Self {
        match variable {
            ScanVariable::Phi => ScanSpec {
                variable,
                start: -FRAC_PI_4,
                stop: FRAC_PI_2,
                steps: DEFAULT_STEPS,
                open: false,
            },
            ScanVariable::Vartheta => Self::default_for(variable),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(Error::InvalidScan(format!(
                "need start < stop, got {} .. {}",
                self.start, self.stop
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidScan(format!(
                "need at least 2 steps, got {}",
                self.steps
            )));
        }
        if self.variable == ScanVariable::Vartheta && (self.start < 0.0 || self.stop > PI) {
            return Err(Error::InvalidScan(format!(
                "vartheta range {} .. {} leaves [0, pi]",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    pub fn point(&self, i: usize) -> f64 {
        let w = self.stop - self.start;
        if self.open {
            self.start + w * (i + 1) as f64 / (self.steps + 1) as f64
        } else if i + 1 == self.steps {
            self.stop
        } else {
            self.start + w * i as f64 / (self.steps - 1) as f64
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.point(i)).collect()
    }
}

/// Bound interval; `None` marks a one-sided bound.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl Interval {
    pub fn excludes(&self, v: f64) -> bool {
        self.lo.is_some_and(|lo| v < lo) || self.hi.is_some_and(|hi| v > hi)
    }

    /// The bound a maximum is compared with.
    pub fn upper(&self) -> f64 {
        self.hi.unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanRow {
    pub x: f64,
    pub quantum: f64,
    pub classical: Interval,
    pub modified: Interval,
}

impl ScanRow {
    pub fn violates_classical(&self) -> bool {
        self.classical.excludes(self.quantum)
    }

    pub fn violates_modified(&self) -> bool {
        self.modified.excludes(self.quantum)
    }
}

/// A channel, a parent and a quantity: everything a scan point needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub channel: ChannelConfig,
    pub parent: Parent,
    pub quantity: Quantity,
}

impl Scenario {
    pub fn new(channel: &ChannelConfig, parent: Parent, quantity: Quantity) -> Self {
        Scenario {
            channel: channel.clone(),
            parent,
            quantity,
        }
    }

    pub fn variable(&self) -> ScanVariable {
        if self.parent.is_singlet() {
            ScanVariable::Phi
        } else {
            ScanVariable::Vartheta
        }
    }

    pub fn params(&self) -> ChParams {
        ChParams::hyperon_pair(self.channel.alpha_y)
    }

    /// Rejects grids over the wrong variable.
    pub fn check(&self, spec: &ScanSpec) -> Result<()> {
        spec.validate()?;
        if spec.variable != self.variable() {
            return Err(Error::InvalidScan(format!(
                "{} pairs are scanned over {:?}, not {:?}",
                self.parent.as_str(),
                self.variable(),
                spec.variable
            )));
        }
        Ok(())
    }

    /// State and settings at grid coordinate `x`.
    pub fn setup(&self, x: f64) -> Result<(DensityMatrix4, MeasurementSettings)> {
        if self.parent.is_singlet() {
            return Ok((singlet_state(), settings_phi(x)));
        }
        let xs = xstate_coeffs(&self.channel.production(x)?)?;
        let settings = match self.quantity {
            Quantity::ChMean => optimal_ch_settings(&xs, &self.params()),
            _ => settings_jpsi(),
        };
        Ok((build_xstate(&xs)?, settings))
    }

    /// Operator-pipeline value: `⟨B_CH⟩`, signed `κ₃` or `μ₄`.
    pub fn quantum(&self, x: f64) -> Result<f64> {
        let (rho, s) = self.setup(x)?;
        let op = ch_operator(&s, &self.params())?;
        let st = operator_statistics(&rho, &op.matrix);
        let v = match self.quantity {
            Quantity::ChMean => st.moments.m1,
            Quantity::Kappa3 => st.cumulants.k3,
            Quantity::Mu4 => st.central.mu4,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::InvalidState("non-finite moment"))
        }
    }

    pub fn classical(&self) -> Interval {
        let (a, ab) = (self.channel.alpha_y, self.channel.alpha_ybar());
        match self.quantity {
            Quantity::ChMean => {
                let b = ch_bounds(a, ab);
                Interval {
                    lo: Some(b.lower),
                    hi: Some(b.upper),
                }
            }
            Quantity::Kappa3 => {
                let b = skewness_bound(a, ab);
                Interval {
                    lo: Some(-b),
                    hi: Some(b),
                }
            }
            Quantity::Mu4 => Interval {
                lo: None,
                hi: Some(mu4_bound(a)),
            },
        }
    }

    pub fn modified(&self) -> Result<Interval> {
        let (a, beta) = (self.channel.alpha_y, self.channel.beta(self.parent));
        Ok(match self.quantity {
            Quantity::ChMean => {
                let b = modified_ch_bounds(a, beta)?;
                Interval {
                    lo: Some(b.lower),
                    hi: Some(b.upper),
                }
            }
            Quantity::Kappa3 => {
                let b = modified_skewness_bound(a, beta)?;
                Interval {
                    lo: Some(-b),
                    hi: Some(b),
                }
            }
            Quantity::Mu4 => Interval {
                lo: None,
                hi: Some(modified_mu4_bound(a, beta)?),
            },
        })
    }

    pub fn row(&self, x: f64) -> Result<ScanRow> {
        Ok(ScanRow {
            x,
            quantum: self.quantum(x)?,
            classical: self.classical(),
            modified: self.modified()?,
        })
    }
}

/// One row per grid point, in grid order.
pub fn scan(sc: &Scenario, spec: &ScanSpec) -> Result<Vec<ScanRow>> {
    sc.check(spec)?;
    spec.points().into_iter().map(|x| sc.row(x)).collect()
}

/// Location and value of the maximum of `sc.quantity.objective`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Extremum {
    pub argmax: f64,
    pub value: f64,
}

/// Coarse grid, then golden-section search in the cell pair around the
/// first grid maximum, then bisection on the sign of a central difference
/// (comparisons of nearly equal values stall near `√ε`).
pub fn find_extremum(sc: &Scenario, spec: &ScanSpec, tol: f64) -> Result<Extremum> {
    sc.check(spec)?;
    let f = |x: f64| sc.quantum(x).map(|v| sc.quantity.objective(v));
    maximize(f, spec, tol)
}

/// Maximizer shared by `find_extremum`; `f` must be unimodal in the
/// bracket around its best grid point.
pub fn maximize(f: impl Fn(f64) -> Result<f64>, spec: &ScanSpec, tol: f64) -> Result<Extremum> {
    let pts = spec.points();
    let mut best = 0;
    let mut vals = Vec::with_capacity(pts.len());
    for (i, &x) in pts.iter().enumerate() {
        let v = f(x)?;
        if v > vals.get(best).copied().unwrap_or(f64::NEG_INFINITY) {
            best = i;
        }
        vals.push(v);
    }
    if best == 0 || best + 1 == pts.len() {
        return Err(Error::NoInteriorMaximum);
    }
    let (mut a, mut b) = (pts[best - 1], pts[best + 1]);
    let g = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > 1e-6_f64.max(tol) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let h = 1e-5;
    let slope = |x: f64| -> Result<f64> { Ok(f(x + h)? - f(x - h)?) };
    while b - a > tol {
        let m = 0.5 * (a + b);
        if slope(m)? > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let x = 0.5 * (a + b);
    Ok(Extremum {
        argmax: x,
        value: f(x)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunReport {
    pub channel_id: String,
    pub parent: Parent,
    pub quantity: Quantity,
    pub quantum_max: f64,
    pub argmax: f64,
    pub classical_bound: f64,
    pub modified_bound: f64,
    pub violates_classical: bool,
    pub violates_modified: bool,
}

/// Maximum of each quantity against its upper bounds (the `|κ₃|` bound
/// for the skewness).
pub fn report(channel: &ChannelConfig, parent: Parent) -> Result<Vec<RunReport>> {
    Quantity::ALL
        .into_iter()
        .map(|q| {
            let sc = Scenario::new(channel, parent, q);
            let spec = ScanSpec::extremum_default(sc.variable());
            let ext = find_extremum(&sc, &spec, DEFAULT_TOL)?;
            let classical_bound = sc.classical().upper();
            let modified_bound = sc.modified()?.upper();
            Ok(RunReport {
                channel_id: channel.channel_id.clone(),
                parent,
                quantity: q,
                quantum_max: ext.value,
                argmax: ext.argmax,
                classical_bound,
                modified_bound,
                violates_classical: ext.value > classical_bound,
                violates_modified: ext.value > modified_bound,
            })
        })
        .collect()
}

/// Monte Carlo run parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    pub n_events: usize,
    pub seed: u64,
    pub resamples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct McRow {
    pub x: f64,
    pub analytic: f64,
    pub estimate: EstimatorResult,
    /// `|estimate − analytic| > 3·stderr`.
    pub flagged: bool,
}

impl Scenario {
    /// Singlet scans share one batch across the grid; J/ψ scans need a
    /// batch per ϑ.
    pub fn shares_batch(&self) -> bool {
        self.parent.is_singlet()
    }

    pub fn truth(&self, x: f64) -> Result<TwoQubitDecomposition> {
        Ok(decompose(&self.setup(x)?.0))
    }

    /// MC estimate at `x` from a batch sampled at `x` (or the shared
    /// batch). `reps` is needed for `kappa3` and `mu4`.
    pub fn mc_point(
        &self,
        x: f64,
        batch: &EventBatch,
        reps: Option<&FeatureReplicates>,
    ) -> Result<McRow> {
        let analytic = self.quantum(x)?;
        let (_, s) = self.setup(x)?;
        let estimate = match (self.quantity, reps) {
            (Quantity::ChMean, _) => estimate_ch(batch, &s, &self.params())?,
            (q, Some(r)) => {
                if r.n_events < MIN_BATCH_HIGH_ORDER {
                    return Err(Error::BatchTooSmall {
                        size: r.n_events,
                        required: MIN_BATCH_HIGH_ORDER,
                    });
                }
                let c = r.cumulants(&ch_operator(&s, &self.params())?.matrix);
                if q == Quantity::Kappa3 {
                    c.k(3)
                } else {
                    c.mu(4)
                }
            }
            (_, None) => return Err(Error::TooFewResamples(0)),
        };
        Ok(McRow {
            x,
            analytic,
            estimate,
            flagged: !estimate.within(analytic, 3.0),
        })
    }
}

/// Seed of the batch for grid point `i` when batches are not shared.
pub fn point_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Analytic values with Monte Carlo estimates alongside.
pub fn mc_scan(sc: &Scenario, spec: &ScanSpec, opts: &McOptions) -> Result<Vec<McRow>> {
    sc.check(spec)?;
    let needs_reps = sc.quantity != Quantity::ChMean;
    let sample = |x: f64, seed: u64| -> Result<(EventBatch, Option<FeatureReplicates>)> {
        let batch = sample_events(
            &sc.truth(x)?,
            sc.channel.alpha_y,
            sc.channel.alpha_ybar(),
            opts.n_events,
            seed,
        )?;
        let reps = if needs_reps {
            Some(feature_replicates(&batch, opts.resamples, seed)?)
        } else {
            None
        };
        Ok((batch, reps))
    };
    let pts = spec.points();
    if sc.shares_batch() {
        let (batch, reps) = sample(pts[0], opts.seed)?;
        pts.iter()
            .map(|&x| sc.mc_point(x, &batch, reps.as_ref()))
            .collect()
    } else {
        pts.iter()
            .enumerate()
            .map(|(i, &x)| {
                let (batch, reps) = sample(x, point_seed(opts.seed, i))?;
                sc.mc_point(x, &batch, reps.as_ref())
            })
            .collect()
    }
}
