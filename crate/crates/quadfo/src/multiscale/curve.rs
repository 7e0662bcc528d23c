//! Amplitude-frequency curves: steady-state branches over a detuning grid,
//! fold (saddle-node) points located on the cubic's discriminant, and the
//! stable-branch peak.

use super::{steady_cubic, steady_states, MultiscaleError, SteadyState};
use crate::model::OscillatorParams;

/// One grid point of a resonance curve.
#[derive(Debug, Clone)]
pub struct CurvePoint {
    pub sigma: f64,
    pub omega_tau: f64,
    pub freq_hz: f64,
    pub states: Vec<SteadyState>,
}

/// A saddle-node point where two branches merge.
#[derive(Debug, Clone, Copy)]
pub struct Fold {
    pub sigma: f64,
    pub freq_hz: f64,
    pub a: f64,
}

#[derive(Debug, Clone)]
pub struct ResonanceCurve {
    pub points: Vec<CurvePoint>,
    pub folds: Vec<Fold>,
}

/// Stable-branch maximum of a curve.
#[derive(Debug, Clone, Copy)]
pub struct CurvePeak {
    pub amplitude: f64,
    pub omega_tau: f64,
    pub freq_hz: f64,
}

fn discriminant(osc: &OscillatorParams, sigma: f64) -> Option<f64> {
    let o = osc.with_sigma(sigma).ok()?;
    let (a, b, c, d) = steady_cubic(&o);
    Some(
        18.0 * a * b * c * d - 4.0 * b.powi(3) * d + b * b * c * c
            - 4.0 * a * c.powi(3)
            - 27.0 * a * a * d * d,
    )
}

fn positive_root_count(osc: &OscillatorParams, sigma: f64) -> usize {
    match osc.with_sigma(sigma) {
        Ok(o) => steady_states(&o).iter().filter(|s| s.a > 0.0).count(),
        Err(_) => 0,
    }
}

/// Steady states over a strictly monotone σ grid, with folds refined by
/// bisection on the discriminant to |Δσ| < 1e-8.
pub fn resonance_curve(
    osc_base: &OscillatorParams,
    sigma_grid: &[f64],
) -> Result<ResonanceCurve, MultiscaleError> {
    if sigma_grid.len() < 2 {
        return Err(MultiscaleError::EmptyCurve);
    }
    let increasing = sigma_grid[1] > sigma_grid[0];
    for w in sigma_grid.windows(2) {
        if (w[1] > w[0]) != increasing || w[1] == w[0] {
            return Err(MultiscaleError::GridNotMonotone);
        }
    }

    let mut points = Vec::with_capacity(sigma_grid.len());
    for &sigma in sigma_grid {
        let o = osc_base.with_sigma(sigma)?;
        points.push(CurvePoint {
            sigma,
            omega_tau: o.omega_drive(),
            freq_hz: o.drive_hz(),
            states: steady_states(&o),
        });
    }

    let mut folds = Vec::new();
    for w in points.windows(2) {
        let (s0, s1) = (w[0].sigma, w[1].sigma);
        let n0 = w[0].states.iter().filter(|s| s.a > 0.0).count();
        let n1 = w[1].states.iter().filter(|s| s.a > 0.0).count();
        if n0 == n1 {
            continue;
        }
        if let Some(fold) = refine_fold(osc_base, s0, s1) {
            folds.push(fold);
        }
    }
    folds.sort_by(|x, y| x.sigma.partial_cmp(&y.sigma).unwrap());

    // Consistency: with a single branch everywhere there is nothing to fold.
    let max_branches = points
        .iter()
        .map(|p| p.states.iter().filter(|s| s.a > 0.0).count())
        .max()
        .unwrap_or(0);
    if max_branches <= 1 {
        folds.clear();
    }

    Ok(ResonanceCurve { points, folds })
}

/// Bisection on the discriminant sign change, 60 iterations max,
/// σ tolerance 1e-8.
fn refine_fold(osc: &OscillatorParams, mut s0: f64, mut s1: f64) -> Option<Fold> {
    let mut d0 = discriminant(osc, s0)?;
    let d1 = discriminant(osc, s1)?;
    if d0 == 0.0 {
        return fold_at(osc, s0);
    }
    if d1 == 0.0 {
        return fold_at(osc, s1);
    }
    if d0.signum() == d1.signum() {
        // Root count changed without a discriminant crossing in between
        // (e.g. a root slid through u = 0); not a saddle-node.
        return None;
    }
    for _ in 0..60 {
        let sm = 0.5 * (s0 + s1);
        let dm = discriminant(osc, sm)?;
        if dm == 0.0 {
            return fold_at(osc, sm);
        }
        if dm.signum() == d0.signum() {
            s0 = sm;
            d0 = dm;
        } else {
            s1 = sm;
        }
        if (s1 - s0).abs() < 1e-8 {
            break;
        }
    }
    fold_at(osc, 0.5 * (s0 + s1))
}

/// Amplitude of the double root at a refined fold: the critical point of the
/// cubic with the smallest residual.
fn fold_at(osc: &OscillatorParams, sigma: f64) -> Option<Fold> {
    let o = osc.with_sigma(sigma).ok()?;
    let (pa, pb, pc, pd) = steady_cubic(&o);
    // P'(u) = 3Au² + 2Bu + C
    let disc = 4.0 * pb * pb - 12.0 * pa * pc;
    if disc < 0.0 || pa == 0.0 {
        return None;
    }
    let s = disc.sqrt();
    let candidates = [(-2.0 * pb + s) / (6.0 * pa), (-2.0 * pb - s) / (6.0 * pa)];
    let eval = |u: f64| ((pa * u + pb) * u + pc) * u + pd;
    let best = candidates
        .iter()
        .copied()
        .filter(|u| *u > 0.0)
        .min_by(|x, y| eval(*x).abs().partial_cmp(&eval(*y).abs()).unwrap())?;
    Some(Fold {
        sigma,
        freq_hz: o.drive_hz(),
        a: best.sqrt(),
    })
}

/// Maximum amplitude over the stable (non-marginal) states of the grid.
pub fn peak_of_curve(curve: &ResonanceCurve) -> Result<CurvePeak, MultiscaleError> {
    let mut best: Option<CurvePeak> = None;
    for p in &curve.points {
        for s in &p.states {
            if !s.is_stable() {
                continue;
            }
            if best.map_or(true, |b| s.a > b.amplitude) {
                best = Some(CurvePeak {
                    amplitude: s.a,
                    omega_tau: p.omega_tau,
                    freq_hz: p.freq_hz,
                });
            }
        }
    }
    best.ok_or(MultiscaleError::EmptyCurve)
}

/// Uniform σ grid spanning a real-time frequency window.
pub fn sigma_grid_from_hz(osc: &OscillatorParams, start_hz: f64, end_hz: f64, points: usize) -> Vec<f64> {
    let sig = |f_hz: f64| {
        let om = osc.omega_tau_of_hz(f_hz);
        om * om - osc.omega0() * osc.omega0()
    };
    let (s0, s1) = (sig(start_hz), sig(end_hz));
    (0..points)
        .map(|i| s0 + (s1 - s0) * i as f64 / (points - 1) as f64)
        .collect()
}
