//! Hyperon-pair channels: decay asymmetries, hyperon speeds per
//! charmonium parent and J/ψ production parameters.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::states::ProductionParams;
use crate::Result;

/// Charmonium state the pair is produced from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Parent {
    EtaC,
    ChiC0,
    Jpsi,
}

impl Parent {
    pub const ALL: [Parent; 3] = [Parent::EtaC, Parent::ChiC0, Parent::Jpsi];

    pub fn as_str(self) -> &'static str {
        match self {
            Parent::EtaC => "eta_c",
            Parent::ChiC0 => "chi_c0",
            Parent::Jpsi => "jpsi",
        }
    }

    pub fn parse(s: &str) -> Option<Parent> {
        match s.to_ascii_lowercase().replace(['-', '/'], "_").as_str() {
            "eta_c" | "etac" => Some(Parent::EtaC),
            "chi_c0" | "chic0" => Some(Parent::ChiC0),
            "jpsi" | "j_psi" => Some(Parent::Jpsi),
            _ => None,
        }
    }

    /// η_c and χ_c0 are spin-0 and yield the pair in a singlet.
    pub fn is_singlet(self) -> bool {
        !matches!(self, Parent::Jpsi)
    }
}

/// One hyperon-antihyperon channel. Percentages and `×10⁻⁴` units as
/// tabulated; `_err` fields carry quoted uncertainties and are not
/// propagated.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChannelConfig {
    pub channel_id: String,
    pub decay_mode: String,
    pub alpha_y: f64,
    pub alpha_y_err: Option<f64>,
    /// Percent.
    pub br_dec: f64,
    pub beta_etac: f64,
    pub beta_chic0: f64,
    pub beta_jpsi: f64,
    /// Units of 10⁻⁴.
    pub br_prod: f64,
    pub br_prod_err: Option<f64>,
    pub alpha_psi: f64,
    pub alpha_psi_err: Option<f64>,
    /// Radians.
    pub delta_phi: f64,
    pub delta_phi_err: Option<f64>,
    pub refs: String,
}

impl ChannelConfig {
    pub fn beta(&self, parent: Parent) -> f64 {
        match parent {
            Parent::EtaC => self.beta_etac,
            Parent::ChiC0 => self.beta_chic0,
            Parent::Jpsi => self.beta_jpsi,
        }
    }

    /// Antihyperon asymmetry, `−α_Y`.
    pub fn alpha_ybar(&self) -> f64 {
        crate::povm::cp_conjugate_alpha(self.alpha_y)
    }

    pub fn production(&self, theta: f64) -> Result<ProductionParams> {
        ProductionParams::new(self.alpha_psi, self.delta_phi, theta)
    }

    /// Every violated invariant, one message each.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let id = &self.channel_id;
        let mut bad =
            |field: &str, v: f64, rule: &str| out.push(format!("{id}: {field} = {v} {rule}"));
        if !(self.alpha_y.abs() <= 1.0) {
            bad("alpha_y", self.alpha_y, "must satisfy |alpha_y| <= 1");
        }
        for (f, v) in [
            ("beta_etac", self.beta_etac),
            ("beta_chic0", self.beta_chic0),
            ("beta_jpsi", self.beta_jpsi),
        ] {
            if !(v > 0.0 && v < 1.0) {
                bad(f, v, "must lie in (0, 1)");
            }
        }
        if !(self.alpha_psi.abs() <= 1.0) {
            bad("alpha_psi", self.alpha_psi, "must satisfy |alpha_psi| <= 1");
        }
        if !(self.delta_phi > -PI && self.delta_phi <= PI) {
            bad("delta_phi", self.delta_phi, "must lie in (-pi, pi]");
        }
        for (f, v) in [("br_dec", self.br_dec), ("br_prod", self.br_prod)] {
            if !(v >= 0.0 && v.is_finite()) {
                bad(f, v, "must be a nonnegative number");
            }
        }
        for (f, v) in [
            ("alpha_y_err", self.alpha_y_err),
            ("br_prod_err", self.br_prod_err),
            ("alpha_psi_err", self.alpha_psi_err),
            ("delta_phi_err", self.delta_phi_err),
        ] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    bad(f, v, "must be a nonnegative number");
                }
            }
        }
        if self.channel_id.is_empty() {
            out.push("channel_id must not be empty".to_string());
        }
        out
    }
}

#[allow(clippy::too_many_arguments)]
fn row(
    id: &str,
    mode: &str,
    alpha_y: (f64, f64),
    br_dec: f64,
    betas: [f64; 3],
    br_prod: (f64, f64),
    alpha_psi: (f64, f64),
    delta_phi: (f64, f64),
    refs: &str,
) -> ChannelConfig {
    ChannelConfig {
        channel_id: id.to_string(),
        decay_mode: mode.to_string(),
        alpha_y: alpha_y.0,
        alpha_y_err: Some(alpha_y.1),
        br_dec,
        beta_etac: betas[0],
        beta_chic0: betas[1],
        beta_jpsi: betas[2],
        br_prod: br_prod.0,
        br_prod_err: Some(br_prod.1),
        alpha_psi: alpha_psi.0,
        alpha_psi_err: Some(alpha_psi.1),
        delta_phi: delta_phi.0,
        delta_phi_err: Some(delta_phi.1),
        refs: refs.to_string(),
    }
}

/// Λ, Σ⁺, Ξ⁻ and Ξ⁰ pairs.
pub fn builtin_table() -> Vec<ChannelConfig> {
    alloc::vec![
        row(
            "Lambda-Lambdabar",
            "Lambda -> p pi-",
            (0.755, 0.003),
            64.0,
            [0.664, 0.757, 0.693],
            (19.43, 0.33),
            (0.475, 0.004),
            (0.752, 0.008),
            "BESIII 2017, 2019, 2022",
        ),
        row(
            "SigmaP-SigmabarM",
            "Sigma+ -> p pi0",
            (-0.994, 0.004),
            52.0,
            [0.604, 0.718, 0.640],
            (15.0, 2.4),
            (-0.508, 0.007),
            (-0.270, 0.015),
            "BESIII 2008, 2020",
        ),
        row(
            "XiM-XibarP",
            "Xi- -> Lambda pi-",
            (-0.379, 0.004),
            100.0,
            [0.464, 0.633, 0.521],
            (9.7, 0.8),
            (0.586, 0.016),
            (1.213, 0.049),
            "BESIII 2022; PDG 2022",
        ),
        row(
            "Xi0-Xibar0",
            "Xi0 -> Lambda pi0",
            (-0.375, 0.003),
            96.0,
            [0.473, 0.638, 0.528],
            (11.65, 0.04),
            (0.514, 0.016),
            (1.168, 0.026),
            "PDG 2022; BESIII 2017, 2023",
        ),
    ]
}

/// Looks a channel up by id or short alias (`lambda`, `sigma+`, `xi-`,
/// `xi0`), ignoring case.
pub fn find_channel<'a>(table: &'a [ChannelConfig], name: &str) -> Option<&'a ChannelConfig> {
    let key = name.to_ascii_lowercase();
    let canonical = match key.as_str() {
        "lambda" | "l" => "lambda-lambdabar",
        "sigma" | "sigma+" | "sigmap" => "sigmap-sigmabarm",
        "xi" | "xi-" | "xim" => "xim-xibarp",
        "xi0" => "xi0-xibar0",
        other => other,
    };
    table
        .iter()
        .find(|c| c.channel_id.to_ascii_lowercase() == canonical)
}
