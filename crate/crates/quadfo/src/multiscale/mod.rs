//! Slow-flow dynamics and steady states of the forced quadratic oscillator.
//!
//! The averaged amplitude/phase equations on the slow time scale are
//!
//! ```text
//! ȧ = -(c/2)a - (f/2Ω) sin φ
//! φ̇ = -5α²a²/(12Ω³) - σ/(2Ω) - (f/2Ωa) cos φ
//! ```
//!
//! Setting ȧ = φ̇ = 0 and eliminating φ gives the steady-state relation
//!
//! ```text
//! (caΩ)² + (-5α²a³/6Ω² - σa)² = f²
//! ```
//!
//! which in u = a² is the cubic
//! (25α⁴/36Ω⁴)u³ + (5α²σ/3Ω²)u² + (c²Ω² + σ²)u - f² = 0.

pub mod curve;
pub mod wave;

use crate::cubic;
use crate::model::OscillatorParams;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MultiscaleError {
    #[error("slow flow undefined at a = 0 under forcing (f = {0})")]
    OriginUnderForcing(f64),
    #[error("amplitude must be positive (got {0})")]
    NonPositiveAmplitude(f64),
    #[error("grid must be strictly monotone")]
    GridNotMonotone,
    #[error("empty curve")]
    EmptyCurve,
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

/// Slow amplitude/phase pair. Canonical form keeps a >= 0 by absorbing a
/// sign flip into the phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowFlowState {
    pub a: f64,
    pub phi: f64,
}

impl SlowFlowState {
    pub fn new(a: f64, phi: f64) -> Self {
        if a < 0.0 {
            SlowFlowState {
                a: -a,
                phi: wrap_phase(phi + std::f64::consts::PI),
            }
        } else {
            SlowFlowState {
                a,
                phi: wrap_phase(phi),
            }
        }
    }
}

/// Wrap into (-π, π].
pub(crate) fn wrap_phase(phi: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut p = phi % two_pi;
    if p <= -std::f64::consts::PI {
        p += two_pi;
    } else if p > std::f64::consts::PI {
        p -= two_pi;
    }
    p
}

/// Right-hand side of the slow flow, (da/dT, dφ/dT).
///
/// a = 0 is permitted only when f = 0; the phase term f/(2Ωa) is singular at
/// the origin under forcing.
pub fn slow_flow_rhs(
    state: SlowFlowState,
    osc: &OscillatorParams,
) -> Result<(f64, f64), MultiscaleError> {
    let (a, phi) = (state.a, state.phi);
    let (c, f, om, al, sig) = (osc.c(), osc.f(), osc.omega_drive(), osc.alpha(), osc.sigma());
    if a == 0.0 && f > 0.0 {
        return Err(MultiscaleError::OriginUnderForcing(f));
    }
    let da = -0.5 * c * a - f / (2.0 * om) * phi.sin();
    let mut dphi = -5.0 * al * al * a * a / (12.0 * om.powi(3)) - sig / (2.0 * om);
    if f > 0.0 {
        dphi -= f / (2.0 * om * a) * phi.cos();
    }
    Ok((da, dphi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Stability {
    Stable,
    Unstable,
    /// Slow-flow Jacobian determinant within tolerance of zero (fold) or
    /// zero trace (undamped): excluded from stable-branch maxima.
    Marginal,
}

/// One steady oscillation: fixed point of the slow flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub a: f64,
    pub phi: f64,
    pub stability: Stability,
}

impl SteadyState {
    pub fn is_stable(&self) -> bool {
        self.stability == Stability::Stable
    }
}

/// The steady-state cubic in u = a²: returns (A, B, C, D) of
/// Au³ + Bu² + Cu + D.
pub fn steady_cubic(osc: &OscillatorParams) -> (f64, f64, f64, f64) {
    let (c, f, om, al, sig) = (osc.c(), osc.f(), osc.omega_drive(), osc.alpha(), osc.sigma());
    let om2 = om * om;
    (
        25.0 * al.powi(4) / (36.0 * om2 * om2),
        5.0 * al * al * sig / (3.0 * om2),
        c * c * om2 + sig * sig,
        -f * f,
    )
}

/// All steady states at the current drive, sorted ascending by amplitude.
///
/// f = 0 yields the single rest state a = 0 (phase reported as 0), stable
/// whenever c > 0.
pub fn steady_states(osc: &OscillatorParams) -> Vec<SteadyState> {
    if osc.f() == 0.0 {
        let stability = if osc.c() > 0.0 {
            Stability::Stable
        } else {
            Stability::Marginal
        };
        return vec![SteadyState {
            a: 0.0,
            phi: 0.0,
            stability,
        }];
    }
    let (pa, pb, pc, pd) = steady_cubic(osc);
    let roots = cubic::real_roots(pa, pb, pc, pd);
    let mut out = Vec::new();
    for u in roots {
        if u <= 0.0 {
            continue;
        }
        let a = u.sqrt();
        // f sinφ = -caΩ, f cosφ = -5α²a³/6Ω² - σa
        let s = -osc.c() * a * osc.omega_drive();
        let co = -5.0 * osc.alpha().powi(2) * a.powi(3) / (6.0 * osc.omega_drive().powi(2))
            - osc.sigma() * a;
        let mut phi = s.atan2(co);
        if phi <= -std::f64::consts::PI {
            phi = std::f64::consts::PI;
        }
        let mut st = SteadyState {
            a,
            phi,
            stability: Stability::Stable,
        };
        st.stability = branch_stability(&st, osc);
        out.push(st);
    }
    out.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap());
    out
}

/// Classify a fixed point through the 2x2 Jacobian of the slow flow.
///
/// Stable iff trace < 0 and determinant > 0; |det| < 1e-12 (or zero trace,
/// the undamped case) is fold-marginal.
pub fn branch_stability(state: &SteadyState, osc: &OscillatorParams) -> Stability {
    let (a, phi) = (state.a, state.phi);
    let (c, f, om, al) = (osc.c(), osc.f(), osc.omega_drive(), osc.alpha());
    if a == 0.0 {
        // Rest state of the unforced flow; classified by the amplitude
        // equation alone.
        return if c > 0.0 {
            Stability::Stable
        } else {
            Stability::Marginal
        };
    }
    let da_da = -0.5 * c;
    let da_dphi = -f / (2.0 * om) * phi.cos();
    let dphi_da = -5.0 * al * al * a / (6.0 * om.powi(3)) + f * phi.cos() / (2.0 * om * a * a);
    let dphi_dphi = f * phi.sin() / (2.0 * om * a);
    let trace = da_da + dphi_dphi;
    let det = da_da * dphi_dphi - da_dphi * dphi_da;
    if det.abs() < 1e-12 {
        Stability::Marginal
    } else if det < 0.0 {
        Stability::Unstable
    } else if trace < 0.0 {
        Stability::Stable
    } else if trace == 0.0 {
        Stability::Marginal
    } else {
        Stability::Unstable
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SmibParams;

    fn canonical_osc() -> OscillatorParams {
        SmibParams::canonical().to_oscillator().unwrap()
    }

    /// Independent root oracle: sign-scan plus bisection on the cubic.
    pub(crate) fn bisect_positive_roots(pa: f64, pb: f64, pc: f64, pd: f64) -> Vec<f64> {
        let p = |u: f64| ((pa * u + pb) * u + pc) * u + pd;
        // Cauchy bound on root magnitude
        let bound = 1.0 + (pb.abs().max(pc.abs()).max(pd.abs())) / pa.abs();
        let n = 20000;
        let mut roots = Vec::new();
        let mut prev = p(0.0);
        for i in 1..=n {
            let u = bound * i as f64 / n as f64;
            let cur = p(u);
            if prev == 0.0 {
                roots.push(bound * (i - 1) as f64 / n as f64);
            } else if prev * cur < 0.0 {
                let (mut lo, mut hi) = (bound * (i - 1) as f64 / n as f64, u);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if p(lo) * p(mid) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
            prev = cur;
        }
        roots
    }

    #[test]
    fn rhs_frozen_example() {
        // Rounded coefficient set evaluated by hand.
        let osc = OscillatorParams::new(5.10381, 19.635, 0.70711, 0.0, 5.10381, 0.0, 1.0).unwrap();
        let osc = osc.with_sigma(0.0).unwrap();
        let (da, dphi) = slow_flow_rhs(SlowFlowState::new(1.0, 0.0), &osc).unwrap();
        assert!((da - (-0.353555)).abs() < 1e-9);
        assert!((dphi - (-1.2082785730703267)).abs() < 1e-9);
    }

    #[test]
    fn rhs_unforced_origin() {
        let osc = OscillatorParams::new(5.0, 10.0, 0.5, 0.0, 5.0, 0.0, 1.0)
            .unwrap()
            .with_sigma(1.5)
            .unwrap();
        let (da, dphi) = slow_flow_rhs(SlowFlowState::new(0.0, 0.3), &osc).unwrap();
        assert_eq!(da, 0.0);
        assert!((dphi - (-1.5 / (2.0 * osc.omega_drive()))).abs() < 1e-12);
    }

    #[test]
    fn rhs_origin_under_forcing_is_singular() {
        let osc = canonical_osc();
        assert!(matches!(
            slow_flow_rhs(SlowFlowState::new(0.0, 0.0), &osc),
            Err(MultiscaleError::OriginUnderForcing(_))
        ));
    }

    #[test]
    fn negative_amplitude_canonicalized() {
        let s = SlowFlowState::new(-0.3, 0.1);
        assert!(s.a == 0.3);
        assert!((s.phi - (0.1 - std::f64::consts::PI)).abs() < 1e-12 || s.phi > 0.0);
    }

    #[test]
    fn linear_steady_state_closed_form() {
        // α = 0, σ = 0: a = f/(cΩ)
        let osc =
            OscillatorParams::new(5.10381, 0.0, 0.70711, 0.78540, 5.10381, 0.0, 1.0).unwrap();
        let states = steady_states(&osc);
        assert_eq!(states.len(), 1);
        assert!((states[0].a - 0.21762531830116588).abs() < 1e-10);
        assert!(states[0].is_stable());
    }

    #[test]
    fn unforced_steady_state_is_rest() {
        let osc = OscillatorParams::new(5.0, 19.0, 0.7, 0.0, 5.0, 0.0, 1.0)
            .unwrap()
            .with_sigma(-3.0)
            .unwrap();
        let states = steady_states(&osc);
        assert_eq!(states.len(), 1);
        assert_eq!(states[0].a, 0.0);
        assert!(states[0].is_stable());
    }

    #[test]
    fn cubic_root_set_at_resonance_pd_025() {
        // Frozen from the bisection oracle with the rounded inputs.
        let osc =
            OscillatorParams::new(5.10381, 19.635, 0.70711, 1.9635, 5.10381, 0.0, 1.0).unwrap();
        let states = steady_states(&osc);
        assert_eq!(states.len(), 1);
        assert!((states[0].a - 0.44840463894319216).abs() < 1e-8);
        // cross-check against the independent oracle
        let (pa, pb, pc, pd) = steady_cubic(&osc);
        let oracle = bisect_positive_roots(pa, pb, pc, pd);
        assert_eq!(oracle.len(), 1);
        assert!((oracle[0].sqrt() - states[0].a).abs() < 1e-6);
    }

    #[test]
    fn steady_states_zero_slow_flow() {
        let osc = canonical_osc();
        for f_hz in [0.45, 0.50, 0.55, 0.574, 0.62] {
            let o = osc.with_drive_hz(f_hz).unwrap();
            for st in steady_states(&o) {
                let (da, dphi) =
                    slow_flow_rhs(SlowFlowState::new(st.a, st.phi), &o).unwrap();
                assert!(
                    da.abs() < 1e-10 && dphi.abs() < 1e-10,
                    "residual ({da}, {dphi}) at f_hz={f_hz}, a={}",
                    st.a
                );
            }
        }
    }

    #[test]
    fn three_root_band_middle_unstable() {
        // P_d = 0.025 near 0.49 Hz has three roots; Jacobian eigenvalues
        // (finite differences) confirm the middle one is the saddle.
        let p = SmibParams {
            p_d: 0.025,
            ..SmibParams::canonical()
        };
        let osc = p.to_oscillator().unwrap().with_drive_hz(0.49).unwrap();
        let states = steady_states(&osc);
        assert_eq!(states.len(), 3);
        assert_eq!(states[0].stability, Stability::Stable);
        assert_eq!(states[1].stability, Stability::Unstable);
        assert_eq!(states[2].stability, Stability::Stable);

        for st in &states {
            let eps = 1e-7;
            let j = |da: f64, dphi: f64| {
                slow_flow_rhs(SlowFlowState::new(st.a + da, st.phi + dphi), &osc).unwrap()
            };
            let (fp, _) = (j(eps, 0.0), ());
            let (fm, _) = (j(-eps, 0.0), ());
            let (gp, _) = (j(0.0, eps), ());
            let (gm, _) = (j(0.0, -eps), ());
            let j11 = (fp.0 - fm.0) / (2.0 * eps);
            let j12 = (gp.0 - gm.0) / (2.0 * eps);
            let j21 = (fp.1 - fm.1) / (2.0 * eps);
            let j22 = (gp.1 - gm.1) / (2.0 * eps);
            let tr = j11 + j22;
            let det = j11 * j22 - j12 * j21;
            let expect_stable = tr < 0.0 && det > 0.0;
            assert_eq!(
                st.is_stable(),
                expect_stable,
                "fd-Jacobian disagrees at a={}",
                st.a
            );
        }
    }

    #[test]
    fn undamped_fixed_point_marginal() {
        let osc = OscillatorParams::new(5.0, 0.0, 0.0, 0.5, 5.2, 0.0, 1.0).unwrap();
        let states = steady_states(&osc);
        assert!(!states.is_empty());
        for st in states {
            assert_eq!(st.stability, Stability::Marginal);
        }
    }

    #[test]
    fn phases_in_half_open_interval() {
        let p = SmibParams {
            p_d: 0.02,
            ..SmibParams::canonical()
        };
        let osc = p.to_oscillator().unwrap();
        for f_hz in [0.42, 0.50, 0.574, 0.65] {
            for st in steady_states(&osc.with_drive_hz(f_hz).unwrap()) {
                assert!(st.phi > -std::f64::consts::PI && st.phi <= std::f64::consts::PI);
            }
        }
    }
}
