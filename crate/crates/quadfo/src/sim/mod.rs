//! Direct time-domain integration of the swing dynamics and the reduced
//! quadratic oscillator: the independent check on every averaged prediction.
//!
//! Three systems are integrable, all as first-order pairs (x, y = dx/dt):
//!
//! * the full swing equation in seconds (works for D = 0),
//! * the scaled sine-nonlinearity form in τ time,
//! * the reduced quadratic oscillator (x is the deviation from x₁).
//!
//! The default integrator is fixed-step classical RK4 with the time grid
//! generated as i·h, so reruns are bitwise identical. An embedded
//! Fehlberg 4(5) mode with step control is available as a cross-check; it
//! lands exactly on the same uniform output grid.

pub mod measure;
pub mod sweep;

use crate::model::{OscillatorParams, SmibParams};
use thiserror::Error;

/// |x| beyond this bound means loss of synchronism or departure from the
/// model's validity; integration aborts.
pub const DIVERGENCE_BOUND: f64 = 10.0 * std::f64::consts::PI;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("state diverged (|x| > 10π) at t = {t}")]
    Divergence { t: f64 },
    #[error("invalid integration setup: {0}")]
    InvalidSetup(String),
    #[error("trace too short: {0}")]
    TraceTooShort(String),
    #[error("too few zero crossings ({found}, need {need})")]
    TooFewCrossings { found: usize, need: usize },
    #[error("fewer than 3 envelope peaks (found {0})")]
    TooFewEnvelopePeaks(usize),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

/// Time base of a trace; `Tau` carries dτ/dt for Hz conversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeBase {
    Seconds,
    Tau { tau_per_sec: f64 },
}

impl TimeBase {
    /// Multiply a native-base frequency by this to get real-time Hz.
    pub fn hz_factor(&self) -> f64 {
        match self {
            TimeBase::Seconds => 1.0,
            TimeBase::Tau { tau_per_sec } => *tau_per_sec,
        }
    }
}

/// Which equation produced a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceEq {
    FullSwingSeconds,
    FullSineTau,
    ReducedQuadratic,
}

impl SourceEq {
    pub fn name(&self) -> &'static str {
        match self {
            SourceEq::FullSwingSeconds => "full_swing_seconds",
            SourceEq::FullSineTau => "full_sine_tau",
            SourceEq::ReducedQuadratic => "reduced_quadratic_tau",
        }
    }
}

/// An integrable system. The drive is amp·cos(ω·t + phase) in the system's
/// native time.
#[derive(Debug, Clone, Copy)]
pub struct System {
    kind: SystemKind,
    pub drive_omega: f64,
    pub drive_phase: f64,
}

#[derive(Debug, Clone, Copy)]
enum SystemKind {
    /// dδ/dt = y; dy/dt = ω_base(Pm - Pmax sin δ + Pd cos)/2H - (D/2H)y
    FullSwing {
        k: f64,
        p_m: f64,
        p_max: f64,
        damp: f64,
        amp: f64,
    },
    /// dy/dτ = a₁ - b sin x - cy + f cos
    FullSineTau {
        a1: f64,
        b: f64,
        c: f64,
        f: f64,
        tau_per_sec: f64,
    },
    /// ẍ + cẋ + ω₀²x - αx² = f cos
    Quadratic {
        omega0_sq: f64,
        alpha: f64,
        c: f64,
        f: f64,
        time_base: TimeBase,
    },
}

impl System {
    /// Full swing equation in seconds. Valid for d = 0.
    pub fn full_swing(p: &SmibParams) -> Result<Self, SimError> {
        p.validate().map_err(SimError::Model)?;
        Ok(System {
            kind: SystemKind::FullSwing {
                k: p.omega_base / (2.0 * p.h),
                p_m: p.p_m,
                p_max: p.p_max,
                damp: p.d / (2.0 * p.h),
                amp: p.p_d,
            },
            drive_omega: 2.0 * std::f64::consts::PI * p.f_dist_hz,
            drive_phase: 0.0,
        })
    }

    /// Scaled sine-nonlinearity form in τ time. Requires d > 0.
    pub fn full_sine_tau(p: &SmibParams) -> Result<Self, SimError> {
        let osc = p.to_oscillator().map_err(SimError::Model)?;
        Ok(System {
            kind: SystemKind::FullSineTau {
                a1: p.omega_base * p.p_m / p.d,
                b: p.omega_base * p.p_max / p.d,
                c: osc.c(),
                f: osc.f(),
                tau_per_sec: osc.tau_per_sec(),
            },
            drive_omega: osc.omega_drive(),
            drive_phase: 0.0,
        })
    }

    /// Reduced quadratic oscillator; x is interpreted as deviation from x₁.
    pub fn quadratic(osc: &OscillatorParams) -> Self {
        System {
            kind: SystemKind::Quadratic {
                omega0_sq: osc.omega0() * osc.omega0(),
                alpha: osc.alpha(),
                c: osc.c(),
                f: osc.f(),
                time_base: TimeBase::Tau {
                    tau_per_sec: osc.tau_per_sec(),
                },
            },
            drive_omega: osc.omega_drive(),
            drive_phase: 0.0,
        }
    }

    /// Quadratic coefficients supplied directly in seconds (for d = 0
    /// experiments the τ map is degenerate and the reduction is done in t).
    pub fn quadratic_seconds(p: &SmibParams) -> Result<Self, SimError> {
        let x_eq = p.equilibrium().map_err(SimError::Model)?;
        let k = p.omega_base / (2.0 * p.h);
        Ok(System {
            kind: SystemKind::Quadratic {
                omega0_sq: k * p.p_max * x_eq.cos(),
                alpha: k * p.p_max * x_eq.sin() / 2.0,
                c: p.d / (2.0 * p.h),
                f: k * p.p_d,
                time_base: TimeBase::Seconds,
            },
            drive_omega: 2.0 * std::f64::consts::PI * p.f_dist_hz,
            drive_phase: 0.0,
        })
    }

    pub fn with_drive_phase(mut self, phase: f64) -> Self {
        self.drive_phase = phase;
        self
    }

    pub fn with_drive_omega(mut self, omega: f64) -> Self {
        self.drive_omega = omega;
        self
    }

    pub fn time_base(&self) -> TimeBase {
        match self.kind {
            SystemKind::FullSwing { .. } => TimeBase::Seconds,
            SystemKind::FullSineTau { tau_per_sec, .. } => TimeBase::Tau { tau_per_sec },
            SystemKind::Quadratic { time_base, .. } => time_base,
        }
    }

    pub fn source(&self) -> SourceEq {
        match self.kind {
            SystemKind::FullSwing { .. } => SourceEq::FullSwingSeconds,
            SystemKind::FullSineTau { .. } => SourceEq::FullSineTau,
            SystemKind::Quadratic { .. } => SourceEq::ReducedQuadratic,
        }
    }

    #[inline]
    fn deriv(&self, t: f64, x: f64, y: f64) -> (f64, f64) {
        let drive = (self.drive_omega * t + self.drive_phase).cos();
        match self.kind {
            SystemKind::FullSwing {
                k,
                p_m,
                p_max,
                damp,
                amp,
            } => (y, k * (p_m - p_max * x.sin() + amp * drive) - damp * y),
            SystemKind::FullSineTau { a1, b, c, f, .. } => {
                (y, a1 - b * x.sin() - c * y + f * drive)
            }
            SystemKind::Quadratic {
                omega0_sq,
                alpha,
                c,
                f,
                ..
            } => (y, -c * y - omega0_sq * x + alpha * x * x + f * drive),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceMeta {
    pub integrator: &'static str,
    pub step: f64,
    pub source: SourceEq,
    pub time_base: TimeBase,
}

/// Uniformly sampled (t, x, y) triples.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub meta: TraceMeta,
    pub samples: Vec<(f64, f64, f64)>,
}

impl SimTrace {
    pub fn duration(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.0)
    }

    pub fn step(&self) -> f64 {
        self.meta.step
    }

    pub fn x(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.1)
    }
}

#[inline]
fn rk4_step(sys: &System, t: f64, x: f64, y: f64, h: f64) -> (f64, f64) {
    let (k1x, k1y) = sys.deriv(t, x, y);
    let (k2x, k2y) = sys.deriv(t + 0.5 * h, x + 0.5 * h * k1x, y + 0.5 * h * k1y);
    let (k3x, k3y) = sys.deriv(t + 0.5 * h, x + 0.5 * h * k2x, y + 0.5 * h * k2y);
    let (k4x, k4y) = sys.deriv(t + h, x + h * k3x, y + h * k3y);
    (
        x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
    )
}

/// Fixed-step RK4 trace of `duration` at step `step`, sampled at i·step.
pub fn integrate(
    sys: &System,
    initial: (f64, f64),
    duration: f64,
    step: f64,
) -> Result<SimTrace, SimError> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(SimError::InvalidSetup(format!("step must be > 0, got {step}")));
    }
    if duration < step {
        return Err(SimError::InvalidSetup(format!(
            "duration {duration} shorter than one step {step}"
        )));
    }
    let n = (duration / step).round() as usize;
    let mut samples = Vec::with_capacity(n + 1);
    let (mut x, mut y) = initial;
    samples.push((0.0, x, y));
    for i in 0..n {
        let t = i as f64 * step;
        let (nx, ny) = rk4_step(sys, t, x, y, step);
        x = nx;
        y = ny;
        if x.abs() > DIVERGENCE_BOUND || !x.is_finite() {
            return Err(SimError::Divergence { t: t + step });
        }
        samples.push(((i + 1) as f64 * step, x, y));
    }
    Ok(SimTrace {
        meta: TraceMeta {
            integrator: "rk4",
            step,
            source: sys.source(),
            time_base: sys.time_base(),
        },
        samples,
    })
}

// Fehlberg 4(5) coefficients.
const B21: f64 = 0.25;
const B31: f64 = 3.0 / 32.0;
const B32: f64 = 9.0 / 32.0;
const B41: f64 = 1932.0 / 2197.0;
const B42: f64 = -7200.0 / 2197.0;
const B43: f64 = 7296.0 / 2197.0;
const B51: f64 = 439.0 / 216.0;
const B52: f64 = -8.0;
const B53: f64 = 3680.0 / 513.0;
const B54: f64 = -845.0 / 4104.0;
const B61: f64 = -8.0 / 27.0;
const B62: f64 = 2.0;
const B63: f64 = -3544.0 / 2565.0;
const B64: f64 = 1859.0 / 4104.0;
const B65: f64 = -11.0 / 40.0;
const C5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];
const C4: [f64; 6] = [
    25.0 / 216.0,
    0.0,
    1408.0 / 2565.0,
    2197.0 / 4104.0,
    -1.0 / 5.0,
    0.0,
];

/// Adaptive Fehlberg 4(5) integration resampled onto the uniform grid
/// i·out_step. Relative tolerance 1e-9, absolute 1e-12 by default; internal
/// steps are clipped to land exactly on each output time.
pub fn integrate_adaptive(
    sys: &System,
    initial: (f64, f64),
    duration: f64,
    out_step: f64,
) -> Result<SimTrace, SimError> {
    const RTOL: f64 = 1e-9;
    const ATOL: f64 = 1e-12;
    if !(out_step > 0.0) || duration < out_step {
        return Err(SimError::InvalidSetup(format!(
            "bad adaptive setup: duration {duration}, out_step {out_step}"
        )));
    }
    let n_out = (duration / out_step).round() as usize;
    let (mut x, mut y) = initial;
    let mut t = 0.0;
    let mut h = out_step / 4.0;
    let mut samples = Vec::with_capacity(n_out + 1);
    samples.push((0.0, x, y));
    for i in 0..n_out {
        let t_target = (i + 1) as f64 * out_step;
        while t < t_target - 1e-14 * t_target.max(1.0) {
            let h_try = h.min(t_target - t);
            let (k1x, k1y) = sys.deriv(t, x, y);
            let (k2x, k2y) = sys.deriv(t + 0.25 * h_try, x + h_try * B21 * k1x, y + h_try * B21 * k1y);
            let (k3x, k3y) = sys.deriv(
                t + 0.375 * h_try,
                x + h_try * (B31 * k1x + B32 * k2x),
                y + h_try * (B31 * k1y + B32 * k2y),
            );
            let (k4x, k4y) = sys.deriv(
                t + 12.0 / 13.0 * h_try,
                x + h_try * (B41 * k1x + B42 * k2x + B43 * k3x),
                y + h_try * (B41 * k1y + B42 * k2y + B43 * k3y),
            );
            let (k5x, k5y) = sys.deriv(
                t + h_try,
                x + h_try * (B51 * k1x + B52 * k2x + B53 * k3x + B54 * k4x),
                y + h_try * (B51 * k1y + B52 * k2y + B53 * k3y + B54 * k4y),
            );
            let (k6x, k6y) = sys.deriv(
                t + 0.5 * h_try,
                x + h_try * (B61 * k1x + B62 * k2x + B63 * k3x + B64 * k4x + B65 * k5x),
                y + h_try * (B61 * k1y + B62 * k2y + B63 * k3y + B64 * k4y + B65 * k5y),
            );
            let kx = [k1x, k2x, k3x, k4x, k5x, k6x];
            let ky = [k1y, k2y, k3y, k4y, k5y, k6y];
            let sum = |c: &[f64; 6], k: &[f64; 6]| {
                c.iter().zip(k).map(|(ci, ki)| ci * ki).sum::<f64>()
            };
            let x5 = x + h_try * sum(&C5, &kx);
            let y5 = y + h_try * sum(&C5, &ky);
            let x4 = x + h_try * sum(&C4, &kx);
            let y4 = y + h_try * sum(&C4, &ky);
            let sc_x = ATOL + RTOL * x.abs().max(x5.abs());
            let sc_y = ATOL + RTOL * y.abs().max(y5.abs());
            let err = ((x5 - x4) / sc_x).abs().max(((y5 - y4) / sc_y).abs());
            if err <= 1.0 {
                t += h_try;
                x = x5;
                y = y5;
                if x.abs() > DIVERGENCE_BOUND || !x.is_finite() {
                    return Err(SimError::Divergence { t });
                }
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h_try * factor).min(duration);
            if h < 1e-12 * out_step {
                return Err(SimError::InvalidSetup(
                    "adaptive step underflow".to_string(),
                ));
            }
        }
        t = t_target;
        samples.push((t_target, x, y));
    }
    Ok(SimTrace {
        meta: TraceMeta {
            integrator: "rkf45",
            step: out_step,
            source: sys.source(),
            time_base: sys.time_base(),
        },
        samples,
    })
}
