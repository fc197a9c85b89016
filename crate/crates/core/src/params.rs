//! Physical model parameters and their reduction to dimensionless units.
//!
//! All internal computations run in units of the pumping amplitude Δ:
//! frequencies are divided by Δ, times are multiplied by Δ, and ħ = k_B = 1.
//! Physical inputs (GHz, kelvin) are converted at this boundary; the only
//! combination in which the temperature ever appears is the dimensionless
//! βħΔ.

use thiserror::Error;

/// Reduced Planck constant, J·s (CODATA).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact SI).
pub const KB: f64 = 1.380_649e-23;

/// How the numeric field values are to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitMode {
    /// `delta`, `omega_drive`, `omega_cutoff` in GHz, `temperature` in kelvin.
    Physical,
    /// Frequencies in units of Δ (so `delta` must be exactly 1),
    /// `temperature` is 1/(βħΔ).
    DimensionlessInDelta,
}

/// Whether a frequency-valued input of `x` GHz means `x·10⁹ rad/s`
/// (angular) or `2π·x·10⁹ rad/s` (ordinary). Angular is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyConvention {
    Angular,
    Ordinary,
}

/// Model parameters of the driven qubit coupled to an Ohmic bath.
#[derive(Debug, Clone, Copy)]
pub struct ModelParams {
    /// Pumping amplitude Δ.
    pub delta: f64,
    /// Drive (pumping) frequency Ω.
    pub omega_drive: f64,
    /// Dimensionless system–bath coupling λ.
    pub lambda_coupling: f64,
    /// Bath temperature.
    pub temperature: f64,
    /// Ohmic cutoff frequency ω_c.
    pub omega_cutoff: f64,
    pub unit_mode: UnitMode,
    pub frequency_convention: FrequencyConvention,
}

/// Everything downstream works on this reduced set (ħ = k_B = Δ = 1).
#[derive(Debug, Clone, Copy)]
pub struct ReducedParams {
    /// Ω/Δ.
    pub omega: f64,
    /// ω_c/Δ.
    pub omega_c: f64,
    /// βħΔ.
    pub beta: f64,
    /// λ.
    pub lambda: f64,
}

impl ReducedParams {
    /// Effective frequency ω_eff/Δ = √(1 + (Ω/Δ)²).
    pub fn omega_eff(&self) -> f64 {
        (1.0 + self.omega * self.omega).sqrt()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamsError {
    #[error("parameter {name} must be positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("omega_drive must be non-negative, got {0}")]
    NegativeDrive(f64),
    #[error("parameter {name} must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },
    #[error("dimensionless mode requires delta = 1 exactly, got {0}")]
    DimensionlessDelta(f64),
}

impl ModelParams {
    /// Parameters in dimensionless units of Δ.
    pub fn dimensionless(omega: f64, omega_c: f64, beta: f64, lambda: f64) -> Self {
        ModelParams {
            delta: 1.0,
            omega_drive: omega,
            lambda_coupling: lambda,
            temperature: 1.0 / beta,
            omega_cutoff: omega_c,
            unit_mode: UnitMode::DimensionlessInDelta,
            frequency_convention: FrequencyConvention::Angular,
        }
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        for (name, value) in [
            ("delta", self.delta),
            ("omega_drive", self.omega_drive),
            ("lambda_coupling", self.lambda_coupling),
            ("temperature", self.temperature),
            ("omega_cutoff", self.omega_cutoff),
        ] {
            if !value.is_finite() {
                return Err(ParamsError::NotFinite { name, value });
            }
        }
        for (name, value) in [
            ("delta", self.delta),
            ("temperature", self.temperature),
            ("omega_cutoff", self.omega_cutoff),
        ] {
            if value <= 0.0 {
                return Err(ParamsError::NotPositive { name, value });
            }
        }
        if self.omega_drive < 0.0 {
            return Err(ParamsError::NegativeDrive(self.omega_drive));
        }
        if self.unit_mode == UnitMode::DimensionlessInDelta && self.delta != 1.0 {
            return Err(ParamsError::DimensionlessDelta(self.delta));
        }
        Ok(())
    }

    /// Δ as an angular frequency in rad/s (physical mode only).
    fn delta_rad_per_s(&self) -> f64 {
        match self.frequency_convention {
            FrequencyConvention::Angular => self.delta * 1e9,
            FrequencyConvention::Ordinary => self.delta * 1e9 * std::f64::consts::TAU,
        }
    }

    /// Reduce to units of Δ. Fails on invalid parameters.
    pub fn reduced(&self) -> Result<ReducedParams, ParamsError> {
        self.validate()?;
        let r = match self.unit_mode {
            UnitMode::DimensionlessInDelta => ReducedParams {
                omega: self.omega_drive,
                omega_c: self.omega_cutoff,
                beta: 1.0 / self.temperature,
                lambda: self.lambda_coupling,
            },
            UnitMode::Physical => ReducedParams {
                omega: self.omega_drive / self.delta,
                omega_c: self.omega_cutoff / self.delta,
                beta: HBAR * self.delta_rad_per_s() / (KB * self.temperature),
                lambda: self.lambda_coupling,
            },
        };
        Ok(r)
    }

    /// ω_eff/Δ.
    pub fn omega_eff_ratio(&self) -> f64 {
        let omega = match self.unit_mode {
            UnitMode::DimensionlessInDelta => self.omega_drive,
            UnitMode::Physical => self.omega_drive / self.delta,
        };
        (1.0 + omega * omega).sqrt()
    }
}
