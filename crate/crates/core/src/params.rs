//! System-model constants.
//!
//! All powers, including the noise floor, are in mW. Distances are in metres,
//! densities in nodes per m², and time in frames of length `t_frame`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::ops::Deref;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Primary transmitter density (nodes/m²).
    pub lambda_pt: f64,
    /// Secondary user density (nodes/m²).
    pub lambda_su: f64,
    /// Primary transmit power (mW).
    pub p_pt: f64,
    /// Secondary transmit power (mW).
    pub p_su: f64,
    /// Background noise power (mW).
    pub noise: f64,
    pub eta_pr: f64,
    pub eta_su: f64,
    pub alpha: f64,
    /// PT–PR link distance (m).
    pub r_pt: f64,
    pub eps_pr: f64,
    /// Carried for completeness; no closed form consumes it.
    pub eps_su: f64,
    /// Avoidance-region radius coefficient (the physical radius is `rho * r_pt`).
    pub rho: f64,
    pub t_frame: f64,
    /// Side of the square deployment region (m).
    pub region_side: f64,
}

/// Config keys, in canonical order.
pub const KEYS: [&str; 14] = [
    "lambda_pt",
    "lambda_su",
    "p_pt",
    "p_su",
    "noise",
    "eta_pr",
    "eta_su",
    "alpha",
    "r_pt",
    "eps_pr",
    "eps_su",
    "rho",
    "t_frame",
    "region_side",
];

impl Default for SystemParams {
    fn default() -> Self {
        Self::reference()
    }
}

impl SystemParams {
    /// Reference deployment: 800 m × 800 m, α = 4, η = 3.
    pub fn reference() -> Self {
        Self {
            lambda_pt: 1e-5,
            lambda_su: 1e-3,
            p_pt: 0.3,
            p_su: 0.1,
            noise: 1e-9,
            eta_pr: 3.0,
            eta_su: 3.0,
            alpha: 4.0,
            r_pt: 15.0,
            eps_pr: 0.05,
            eps_su: 0.1,
            rho: 2.0,
            t_frame: 1.0,
            region_side: 800.0,
        }
    }

    fn field(&self, key: &str) -> Option<f64> {
        Some(match key {
            "lambda_pt" => self.lambda_pt,
            "lambda_su" => self.lambda_su,
            "p_pt" => self.p_pt,
            "p_su" => self.p_su,
            "noise" => self.noise,
            "eta_pr" => self.eta_pr,
            "eta_su" => self.eta_su,
            "alpha" => self.alpha,
            "r_pt" => self.r_pt,
            "eps_pr" => self.eps_pr,
            "eps_su" => self.eps_su,
            "rho" => self.rho,
            "t_frame" => self.t_frame,
            "region_side" => self.region_side,
            _ => return None,
        })
    }

    fn field_mut(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "lambda_pt" => &mut self.lambda_pt,
            "lambda_su" => &mut self.lambda_su,
            "p_pt" => &mut self.p_pt,
            "p_su" => &mut self.p_su,
            "noise" => &mut self.noise,
            "eta_pr" => &mut self.eta_pr,
            "eta_su" => &mut self.eta_su,
            "alpha" => &mut self.alpha,
            "r_pt" => &mut self.r_pt,
            "eps_pr" => &mut self.eps_pr,
            "eps_su" => &mut self.eps_su,
            "rho" => &mut self.rho,
            "t_frame" => &mut self.t_frame,
            "region_side" => &mut self.region_side,
            _ => return None,
        })
    }

    /// Parses a flat `key = value` config. Blank lines and `#` comments are
    /// ignored; keys absent from the file keep their reference values.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut params = Self::reference();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            let slot = params.field_mut(key).ok_or_else(|| {
                Error::Config(format!("line {}: unknown key `{key}`", lineno + 1))
            })?;
            *slot = value
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("line {}: `{key}`: {e}", lineno + 1)))?;
        }
        Ok(params)
    }

    pub fn from_config_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_config_str(&text)
    }

    /// Canonical `key = value` rendering; round-trips through
    /// [`SystemParams::from_config_str`].
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let _ = writeln!(out, "{key} = {:e}", self.field(key).unwrap_or_default());
        }
        out
    }

    /// Noise-only outage probability at a PR: `1 - exp(-η_PR N r_PT^α / P_PT)`.
    pub fn noise_only_pr_outage(&self) -> f64 {
        -(-self.pr_noise_exponent()).exp_m1()
    }

    pub(crate) fn pr_noise_exponent(&self) -> f64 {
        self.eta_pr * self.noise * self.r_pt.powf(self.alpha) / self.p_pt
    }

    pub fn validate(self) -> Result<ValidatedParams> {
        let positive = [
            ("lambda_su", self.lambda_su),
            ("p_pt", self.p_pt),
            ("p_su", self.p_su),
            ("noise", self.noise),
            ("eta_pr", self.eta_pr),
            ("eta_su", self.eta_su),
            ("r_pt", self.r_pt),
            ("t_frame", self.t_frame),
            ("region_side", self.region_side),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositive { name, value });
            }
        }
        // λ_PT = 0 is a primary system with no PT interference.
        if !(self.lambda_pt >= 0.0 && self.lambda_pt.is_finite()) {
            return Err(Error::NonPositive {
                name: "lambda_pt",
                value: self.lambda_pt,
            });
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(Error::NonPositive {
                name: "rho",
                value: self.rho,
            });
        }
        for (name, value) in [("eps_pr", self.eps_pr), ("eps_su", self.eps_su)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::OutageOutOfRange { name, value });
            }
        }
        if !(self.alpha > 2.0 && self.alpha.is_finite()) {
            return Err(Error::AlphaTooSmall(self.alpha));
        }
        let outage = self.noise_only_pr_outage();
        if outage >= self.eps_pr {
            return Err(Error::Infeasible(format!(
                "noise alone drives PR outage to {outage:.4e} >= eps_pr = {} (powers are in mW)",
                self.eps_pr
            )));
        }
        Ok(ValidatedParams {
            pathloss: PathlossConstants::new(self.alpha),
            params: self,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathlossConstants {
    /// δ = 2/α.
    pub delta: f64,
    /// K_α = 2π² / (α sin(2π/α)).
    pub k_alpha: f64,
}

impl PathlossConstants {
    pub fn new(alpha: f64) -> Self {
        Self {
            delta: 2.0 / alpha,
            k_alpha: 2.0 * PI * PI / (alpha * (2.0 * PI / alpha).sin()),
        }
    }
}

/// Parameters that passed [`SystemParams::validate`], with the path-loss
/// constants attached. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidatedParams {
    params: SystemParams,
    pathloss: PathlossConstants,
}

impl Deref for ValidatedParams {
    type Target = SystemParams;

    fn deref(&self) -> &SystemParams {
        &self.params
    }
}

impl ValidatedParams {
    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn pathloss(&self) -> PathlossConstants {
        self.pathloss
    }

    pub fn region_area(&self) -> f64 {
        self.region_side * self.region_side
    }

    /// Relay population M: expected SU count in the region minus the destination.
    pub fn relay_population(&self) -> u32 {
        ((self.lambda_su * self.region_area()).round() as u32)
            .saturating_sub(1)
            .max(1)
    }

    /// Re-validates with one field changed.
    pub fn with(&self, edit: impl FnOnce(&mut SystemParams)) -> Result<ValidatedParams> {
        let mut p = self.params;
        edit(&mut p);
        p.validate()
    }

    /// Short hex digest of the canonical config, used to tag output files.
    pub fn config_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.params.to_config_string().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Global-timer constraint: `P(T) >= 1 - eps_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryPolicy {
    pub timer: f64,
    pub eps_t: f64,
}

impl RecoveryPolicy {
    pub fn new(timer: f64, eps_t: f64) -> Result<Self> {
        if !(timer > 0.0 && timer.is_finite()) {
            return Err(Error::NonPositive {
                name: "timer",
                value: timer,
            });
        }
        if !(eps_t > 0.0 && eps_t < 1.0) {
            return Err(Error::OutageOutOfRange {
                name: "eps_t",
                value: eps_t,
            });
        }
        Ok(Self { timer, eps_t })
    }
}
