//! First-order waveform reconstruction and the unforced impulse response.
//!
//! A steady state (a, φ) reconstructs to
//!
//! ```text
//! x(τ) = a cos(Ωτ+φ) + αa²/2Ω² - αa²/6Ω² cos(2Ωτ+2φ)
//! ```
//!
//! i.e. fundamental, a rectified positive DC shift, and a second harmonic.
//! With f = 0 and σ = 0 the slow flow decays as a(τ) = a₀e^{-cτ/2} and the
//! cycle-count deviation is Δf(τ) = -5α²a₀²/(24πΩ³)·e^{-cτ} with Ω at ω₀.

use super::{MultiscaleError, SteadyState};
use crate::model::OscillatorParams;

/// First-order steady waveform split into its named components.
#[derive(Debug, Clone, Copy)]
pub struct ReconstructedWave {
    pub fundamental_amp: f64,
    pub dc_offset: f64,
    pub second_harmonic_amp: f64,
    pub a: f64,
    pub phi: f64,
    pub omega_drive: f64,
}

impl ReconstructedWave {
    pub fn fundamental(&self, tau: f64) -> f64 {
        self.fundamental_amp * (self.omega_drive * tau + self.phi).cos()
    }

    pub fn dc(&self) -> f64 {
        self.dc_offset
    }

    pub fn second_harmonic(&self, tau: f64) -> f64 {
        -self.second_harmonic_amp * (2.0 * self.omega_drive * tau + 2.0 * self.phi).cos()
    }

    /// Total first-order waveform at τ.
    pub fn eval(&self, tau: f64) -> f64 {
        self.fundamental(tau) + self.dc() + self.second_harmonic(tau)
    }
}

/// Reconstruct the waveform of a steady state and sample it on `tau_grid`.
pub fn reconstruct(
    state: &SteadyState,
    osc: &OscillatorParams,
    tau_grid: &[f64],
) -> (ReconstructedWave, Vec<(f64, f64)>) {
    let om2 = osc.omega_drive() * osc.omega_drive();
    let a2 = state.a * state.a;
    let wave = ReconstructedWave {
        fundamental_amp: state.a,
        dc_offset: osc.alpha() * a2 / (2.0 * om2),
        second_harmonic_amp: osc.alpha() * a2 / (6.0 * om2),
        a: state.a,
        phi: state.phi,
        omega_drive: osc.omega_drive(),
    };
    let samples = tau_grid.iter().map(|&t| (t, wave.eval(t))).collect();
    (wave, samples)
}

/// One sample of the analytic ring-down.
#[derive(Debug, Clone, Copy)]
pub struct ImpulsePoint {
    pub tau: f64,
    /// Envelope a(τ) = a₀e^{-cτ/2}.
    pub amplitude: f64,
    /// Frequency deviation in cycles per τ unit.
    pub delta_f_tau: f64,
    /// The same deviation converted to real-time Hz.
    pub delta_f_hz: f64,
}

/// Analytic impulse response over `tau_grid`. Requires a₀ > 0 and an
/// unforced coefficient set; Ω is evaluated at ω₀.
pub fn impulse_response(
    a0: f64,
    osc: &OscillatorParams,
    tau_grid: &[f64],
) -> Result<Vec<ImpulsePoint>, MultiscaleError> {
    if !(a0 > 0.0) {
        return Err(MultiscaleError::NonPositiveAmplitude(a0));
    }
    if osc.f() != 0.0 {
        return Err(MultiscaleError::OriginUnderForcing(osc.f()));
    }
    let om = osc.omega0();
    let df0 = -5.0 * osc.alpha().powi(2) * a0 * a0 / (24.0 * std::f64::consts::PI * om.powi(3));
    Ok(tau_grid
        .iter()
        .map(|&t| {
            let df = df0 * (-osc.c() * t).exp();
            ImpulsePoint {
                tau: t,
                amplitude: a0 * (-osc.c() * t / 2.0).exp(),
                delta_f_tau: df,
                delta_f_hz: df * osc.tau_per_sec(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiscale::Stability;

    fn rounded_osc(f: f64) -> OscillatorParams {
        OscillatorParams::new(5.10381, 19.635, 0.70711, f, 5.10381, 0.0, 1.0).unwrap()
    }

    #[test]
    fn linear_reconstruction_is_pure_sinusoid() {
        let osc = OscillatorParams::new(5.0, 0.0, 0.7, 0.5, 5.1, 0.0, 1.0).unwrap();
        let st = SteadyState {
            a: 0.2,
            phi: -1.0,
            stability: Stability::Stable,
        };
        let (wave, _) = reconstruct(&st, &osc, &[]);
        assert_eq!(wave.dc_offset, 0.0);
        assert_eq!(wave.second_harmonic_amp, 0.0);
        assert!((wave.eval(0.3) - 0.2 * (5.1 * 0.3 - 1.0).cos()).abs() < 1e-15);
    }

    #[test]
    fn frozen_component_amplitudes() {
        let osc = rounded_osc(0.78540);
        let st = SteadyState {
            a: 0.2,
            phi: 0.0,
            stability: Stability::Stable,
        };
        let (wave, _) = reconstruct(&st, &osc, &[]);
        assert!((wave.dc_offset - 0.015075506222208256).abs() < 1e-12);
        assert!((wave.second_harmonic_amp - 0.005025168740736085).abs() < 1e-12);
        assert!(wave.dc_offset >= 0.0);
    }

    #[test]
    fn decomposition_identity() {
        let osc = rounded_osc(0.78540);
        let st = SteadyState {
            a: 0.31,
            phi: 2.2,
            stability: Stability::Stable,
        };
        let grid: Vec<f64> = (0..500).map(|i| i as f64 * 0.01).collect();
        let (wave, samples) = reconstruct(&st, &osc, &grid);
        for (t, x) in samples {
            let sum = wave.fundamental(t) + wave.dc() + wave.second_harmonic(t);
            assert!((sum - x).abs() < 1e-12);
        }
    }

    #[test]
    fn impulse_envelope_exponential_identity() {
        let osc = rounded_osc(0.0);
        let c = osc.c();
        let pts = impulse_response(0.3, &osc, &[2.0 / c]).unwrap();
        assert!((pts[0].amplitude - 0.3 / std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn impulse_frozen_deviation() {
        let osc = rounded_osc(0.0);
        let pts = impulse_response(0.3, &osc, &[0.0]).unwrap();
        assert!((pts[0].delta_f_tau - (-0.01730731567825479)).abs() < 1e-10);
        assert!((pts[0].delta_f_hz - pts[0].delta_f_tau * osc.tau_per_sec()).abs() < 1e-15);
    }

    #[test]
    fn impulse_ratio_law() {
        let osc = rounded_osc(0.0);
        let grid = [0.4, 1.7, 3.9];
        let pts = impulse_response(0.25, &osc, &grid).unwrap();
        for w in pts.windows(2) {
            let expect = (-osc.c() * (w[1].tau - w[0].tau)).exp();
            assert!((w[1].delta_f_tau / w[0].delta_f_tau - expect).abs() < 1e-12);
        }
        // log a(τ) affine in τ with slope -c/2 exactly
        for w in pts.windows(2) {
            let slope = (w[1].amplitude.ln() - w[0].amplitude.ln()) / (w[1].tau - w[0].tau);
            assert!((slope + osc.c() / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn impulse_rejects_bad_inputs() {
        let osc = rounded_osc(0.0);
        assert!(impulse_response(0.0, &osc, &[0.0]).is_err());
        assert!(impulse_response(-0.1, &osc, &[0.0]).is_err());
        let forced = rounded_osc(0.5);
        assert!(impulse_response(0.3, &forced, &[0.0]).is_err());
    }
}
