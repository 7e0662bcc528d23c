//! Physical single-machine infinite-bus (SMIB) model and its reduction to a
//! forced quadratic oscillator.
//!
//! The swing dynamics are
//!
//! ```text
//! 2H dΔω/dt = Pm - Pmax sin δ - D Δω + Pd cos(ωt)
//!    dδ/dt  = ω_base Δω
//! ```
//!
//! With τ = t√(D/2H), x = δ, y = dx/dτ and the scaled constants
//! a₁ = ω_base·Pm/D, b = ω_base·Pmax/D, c = √(D/2H), f = ω_base·Pd/D,
//! Ω = ω√(2H/D), this becomes dy/dτ = a₁ - b sin x - cy + f cos(Ωτ).
//! Expanding around the equilibrium x₁ = arcsin(a₁/b) and truncating at
//! second order gives the reduced oscillator
//!
//! ```text
//! ẍ + cẋ + ω₀²x - αx² = f cos(Ωτ),   ω₀² = b cos x₁,  α = (b/2) sin x₁
//! ```
//!
//! where x is now the angle deviation from x₁.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no stable equilibrium: p_m = {p_m} must be below p_max = {p_max}")]
    NoEquilibrium { p_m: f64, p_max: f64 },
    #[error("tau scaling requires d > 0 (got d = {0}); run in seconds instead")]
    DegenerateScaling(f64),
}

/// Physical machine, line and disturbance parameters, all per-unit except
/// where noted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmibParams {
    /// System angular frequency reference, rad/s (100π for a 50 Hz system).
    pub omega_base: f64,
    /// Mechanical input power, p.u.
    pub p_m: f64,
    /// Maximum electrical power V_G·V_B/X_G, p.u.
    pub p_max: f64,
    /// Equivalent damping coefficient, p.u.
    pub d: f64,
    /// Inertia time constant, seconds.
    pub h: f64,
    /// Disturbance amplitude, p.u.
    pub p_d: f64,
    /// Disturbance frequency, Hz (real time).
    pub f_dist_hz: f64,
}

impl SmibParams {
    /// The canonical 50 Hz test configuration.
    pub fn canonical() -> Self {
        SmibParams {
            omega_base: 100.0 * std::f64::consts::PI,
            p_m: 0.5,
            p_max: 0.6,
            d: 4.0,
            h: 4.0,
            p_d: 0.01,
            f_dist_hz: 0.55,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let err = |m: String| Err(ModelError::InvalidParameter(m));
        if !(self.omega_base > 0.0) {
            return err(format!("omega_base must be > 0 (got {})", self.omega_base));
        }
        if !(self.p_max > 0.0) {
            return err(format!("p_max must be > 0 (got {})", self.p_max));
        }
        if !(self.h > 0.0) {
            return err(format!("h must be > 0 (got {})", self.h));
        }
        if !(self.d >= 0.0) {
            return err(format!("d must be >= 0 (got {})", self.d));
        }
        if !(self.p_d >= 0.0) {
            return err(format!("p_d must be >= 0 (got {})", self.p_d));
        }
        if !(self.p_m >= 0.0) {
            return err(format!("p_m must be >= 0 (got {})", self.p_m));
        }
        if !(self.f_dist_hz > 0.0) {
            return err(format!("f_dist_hz must be > 0 (got {})", self.f_dist_hz));
        }
        if self.p_m >= self.p_max {
            return Err(ModelError::NoEquilibrium {
                p_m: self.p_m,
                p_max: self.p_max,
            });
        }
        Ok(())
    }

    /// Equilibrium power angle x₁ = arcsin(Pm/Pmax) ∈ [0, π/2).
    pub fn equilibrium(&self) -> Result<f64, ModelError> {
        self.validate()?;
        Ok((self.p_m / self.p_max).asin())
    }

    /// Reduce to the dimensionless quadratic-oscillator coefficients.
    ///
    /// Requires d > 0: the τ rescaling degenerates for an undamped machine,
    /// which must then be simulated in seconds.
    pub fn to_oscillator(&self) -> Result<OscillatorParams, ModelError> {
        let x_eq = self.equilibrium()?;
        if self.d == 0.0 {
            return Err(ModelError::DegenerateScaling(self.d));
        }
        let b = self.omega_base * self.p_max / self.d;
        let c = (self.d / (2.0 * self.h)).sqrt();
        let omega0 = (b * x_eq.cos()).sqrt();
        let alpha = b / 2.0 * x_eq.sin();
        let f = self.omega_base * self.p_d / self.d;
        let tau_per_sec = (self.d / (2.0 * self.h)).sqrt();
        let omega_drive = 2.0 * std::f64::consts::PI * self.f_dist_hz / tau_per_sec;
        OscillatorParams::new(omega0, alpha, c, f, omega_drive, x_eq, tau_per_sec)
    }

    /// Electromechanical mode of the Jacobian at the equilibrium, in real
    /// time. Works for d = 0 (undamped pure oscillation).
    pub fn linearize(&self) -> Result<ModalInfo, ModelError> {
        let x_eq = self.equilibrium()?;
        // Jacobian of (δ, Δω) dynamics: λ² + (D/2H)λ + ω_base·Pmax·cos(x₁)/2H = 0
        let re = -self.d / (4.0 * self.h);
        let k = self.omega_base * self.p_max * x_eq.cos() / (2.0 * self.h);
        let disc = re * re - k;
        if disc >= 0.0 {
            let s = disc.sqrt();
            return Ok(ModalInfo::Overdamped {
                roots: [re - s, re + s],
            });
        }
        let im = (-disc).sqrt();
        Ok(ModalInfo::Oscillatory {
            eigen_real: re,
            eigen_imag: im,
            natural_freq_hz: im / (2.0 * std::f64::consts::PI),
            damping_ratio: -re / (re * re + im * im).sqrt(),
        })
    }
}

/// Reduced quadratic-oscillator coefficients in τ time.
///
/// `sigma` is derived (Ω² - ω₀²) and kept consistent by construction; all
/// mutation goes through the `with_*` methods, which recompute it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    omega0: f64,
    alpha: f64,
    c: f64,
    f: f64,
    omega_drive: f64,
    sigma: f64,
    x_eq: f64,
    tau_per_sec: f64,
}

impl OscillatorParams {
    /// Build a coefficient set, enforcing the domain invariants.
    ///
    /// `tau_per_sec` is dτ/dt, i.e. √(D/2H) when derived from physical
    /// parameters; it carries the unit conversion for Hz reporting.
    pub fn new(
        omega0: f64,
        alpha: f64,
        c: f64,
        f: f64,
        omega_drive: f64,
        x_eq: f64,
        tau_per_sec: f64,
    ) -> Result<Self, ModelError> {
        let err = |m: String| Err(ModelError::InvalidParameter(m));
        if !(omega0 > 0.0) {
            return err(format!("omega0 must be > 0 (got {omega0})"));
        }
        if !(c >= 0.0) {
            return err(format!("c must be >= 0 (got {c})"));
        }
        if !(f >= 0.0) {
            return err(format!("f must be >= 0 (got {f})"));
        }
        if !(omega_drive > 0.0) {
            return err(format!("omega_drive must be > 0 (got {omega_drive})"));
        }
        if !(tau_per_sec > 0.0) {
            return err(format!("tau_per_sec must be > 0 (got {tau_per_sec})"));
        }
        Ok(OscillatorParams {
            omega0,
            alpha,
            c,
            f,
            omega_drive,
            sigma: omega_drive * omega_drive - omega0 * omega0,
            x_eq,
            tau_per_sec,
        })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn f(&self) -> f64 {
        self.f
    }
    pub fn omega_drive(&self) -> f64 {
        self.omega_drive
    }
    /// Detuning σ = Ω² - ω₀².
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn x_eq(&self) -> f64 {
        self.x_eq
    }
    /// dτ/dt conversion factor.
    pub fn tau_per_sec(&self) -> f64 {
        self.tau_per_sec
    }

    /// Drive frequency in real-time Hz.
    pub fn drive_hz(&self) -> f64 {
        self.omega_drive * self.tau_per_sec / (2.0 * std::f64::consts::PI)
    }

    /// Undamped natural frequency in real-time Hz.
    pub fn natural_hz(&self) -> f64 {
        self.omega0 * self.tau_per_sec / (2.0 * std::f64::consts::PI)
    }

    /// Convert a real-time frequency to the τ-time angular drive frequency.
    pub fn omega_tau_of_hz(&self, f_hz: f64) -> f64 {
        2.0 * std::f64::consts::PI * f_hz / self.tau_per_sec
    }

    /// Same coefficients at detuning σ, with Ω = √(ω₀² + σ).
    pub fn with_sigma(&self, sigma: f64) -> Result<Self, ModelError> {
        let om2 = self.omega0 * self.omega0 + sigma;
        if !(om2 > 0.0) {
            return Err(ModelError::InvalidParameter(format!(
                "sigma = {sigma} puts the squared drive frequency at {om2} <= 0"
            )));
        }
        OscillatorParams::new(
            self.omega0,
            self.alpha,
            self.c,
            self.f,
            om2.sqrt(),
            self.x_eq,
            self.tau_per_sec,
        )
    }

    /// Same coefficients driven at `f_hz` (real time).
    pub fn with_drive_hz(&self, f_hz: f64) -> Result<Self, ModelError> {
        OscillatorParams::new(
            self.omega0,
            self.alpha,
            self.c,
            self.f,
            self.omega_tau_of_hz(f_hz),
            self.x_eq,
            self.tau_per_sec,
        )
    }

    /// Override individual coefficients (used by parameter studies and the
    /// config-level oscillator override). σ is recomputed.
    pub fn with_overrides(
        &self,
        alpha: Option<f64>,
        c: Option<f64>,
        omega0: Option<f64>,
        f: Option<f64>,
    ) -> Result<Self, ModelError> {
        OscillatorParams::new(
            omega0.unwrap_or(self.omega0),
            alpha.unwrap_or(self.alpha),
            c.unwrap_or(self.c),
            f.unwrap_or(self.f),
            self.omega_drive,
            self.x_eq,
            self.tau_per_sec,
        )
    }

    /// Forcing amplitude for a disturbance of `p_d` p.u. under the same
    /// scaling that produced these coefficients requires the physical ratio
    /// f = ω_base·p_d/D, so it is set at reduction time; this helper swaps
    /// the forcing amplitude only.
    pub fn with_forcing(&self, f: f64) -> Result<Self, ModelError> {
        self.with_overrides(None, None, None, Some(f))
    }
}

/// Linearized electromechanical mode, real-time units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModalInfo {
    Oscillatory {
        /// Re λ, 1/s. Equals -D/4H exactly for this model.
        eigen_real: f64,
        /// Im λ, rad/s.
        eigen_imag: f64,
        natural_freq_hz: f64,
        damping_ratio: f64,
    },
    /// ω₀² ≤ c²/4: both eigenvalues real.
    Overdamped { roots: [f64; 2] },
}
