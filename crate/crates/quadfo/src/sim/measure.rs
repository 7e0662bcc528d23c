//! Steady-state and frequency measurements on simulated traces.

use super::{SimError, SimTrace};

/// Steady amplitude measured two ways over the last 8 full drive periods:
/// a DFT fundamental bin (the reported value) and the half peak-to-peak
/// range. Disagreement beyond 5% flags strong harmonic content.
#[derive(Debug, Clone, Copy)]
pub struct AmplitudeEstimate {
    /// Fundamental-bin magnitude; DC and even harmonics reject exactly over
    /// an integer number of periods.
    pub amplitude: f64,
    /// (max - min)/2 over the same window.
    pub extremal: f64,
    pub strong_harmonics: bool,
}

pub(crate) const MEASURE_PERIODS: usize = 8;

fn window_start(
    trace: &SimTrace,
    skip_periods: usize,
    drive_period: f64,
) -> Result<usize, SimError> {
    let needed = (skip_periods + MEASURE_PERIODS) as f64 * drive_period;
    if trace.duration() + 1e-9 * drive_period < needed {
        return Err(SimError::TraceTooShort(format!(
            "have {:.3} time units, need {:.3} ({} skip + {} measure periods)",
            trace.duration(),
            needed,
            skip_periods,
            MEASURE_PERIODS
        )));
    }
    let per_period = (drive_period / trace.step()).round() as usize;
    if per_period < 8 {
        return Err(SimError::TraceTooShort(format!(
            "only {per_period} samples per drive period"
        )));
    }
    Ok(trace.samples.len() - MEASURE_PERIODS * per_period - 1)
}

/// Fundamental amplitude after discarding `skip_periods` of transient.
pub fn steady_amplitude(
    trace: &SimTrace,
    skip_periods: usize,
    drive_period: f64,
) -> Result<AmplitudeEstimate, SimError> {
    let fourier = harmonic_amplitude(trace, 1, skip_periods, drive_period)?;
    let start = window_start(trace, skip_periods, drive_period)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in &trace.samples[start..] {
        lo = lo.min(s.1);
        hi = hi.max(s.1);
    }
    let extremal = (hi - lo) / 2.0;
    let strong_harmonics = if fourier > 0.0 {
        (extremal - fourier).abs() / fourier > 0.05
    } else {
        extremal > 0.0
    };
    Ok(AmplitudeEstimate {
        amplitude: fourier,
        extremal,
        strong_harmonics,
    })
}

/// Magnitude of the k-th drive harmonic over the measurement window.
pub fn harmonic_amplitude(
    trace: &SimTrace,
    k: u32,
    skip_periods: usize,
    drive_period: f64,
) -> Result<f64, SimError> {
    let start = window_start(trace, skip_periods, drive_period)?;
    let omega = 2.0 * std::f64::consts::PI * k as f64 / drive_period;
    let window = &trace.samples[start..trace.samples.len() - 1];
    let n = window.len() as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for (t, x, _) in window {
        let ph = omega * t;
        re += x * ph.cos();
        im += x * ph.sin();
    }
    Ok(2.0 * (re * re + im * im).sqrt() / n)
}

/// Mean of x over the last 8 full drive periods.
pub fn dc_offset(
    trace: &SimTrace,
    skip_periods: usize,
    drive_period: f64,
) -> Result<f64, SimError> {
    let start = window_start(trace, skip_periods, drive_period)?;
    let window = &trace.samples[start..trace.samples.len() - 1];
    Ok(window.iter().map(|s| s.1).sum::<f64>() / window.len() as f64)
}

/// Per-cycle instantaneous frequency.
#[derive(Debug, Clone, Copy)]
pub struct CycleFreq {
    /// Midpoint of the crossing pair, native time.
    pub time: f64,
    /// Cycles per native time unit.
    pub freq: f64,
    /// Converted to real-time Hz.
    pub freq_hz: f64,
}

/// Per-cycle frequency from successive rising zero crossings of the locally
/// detrended signal (centered running mean over one estimated period), with
/// linear interpolation between samples. Needs at least 6 crossings.
pub fn instantaneous_frequency(trace: &SimTrace) -> Result<Vec<CycleFreq>, SimError> {
    let xs: Vec<f64> = trace.x().collect();
    let n = xs.len();
    let h = trace.step();
    if n < 8 {
        return Err(SimError::TooFewCrossings { found: 0, need: 6 });
    }
    // Period estimate from global crossing count of the mean-removed signal.
    let mean = xs.iter().sum::<f64>() / n as f64;
    let mut count = 0usize;
    for w in xs.windows(2) {
        if ((w[0] - mean) < 0.0) != ((w[1] - mean) < 0.0) {
            count += 1;
        }
    }
    if count < 6 {
        return Err(SimError::TooFewCrossings {
            found: count,
            need: 6,
        });
    }
    let est_freq = count as f64 / (2.0 * trace.duration());
    let mut wlen = (1.0 / (est_freq * h)).round() as usize;
    wlen = wlen.max(3);
    if wlen % 2 == 0 {
        wlen += 1;
    }
    let hw = wlen / 2;
    if n < 2 * hw + 3 {
        return Err(SimError::TooFewCrossings { found: 0, need: 6 });
    }

    // Prefix sums for the centered running mean; only interior points where
    // the full window fits are used, so edges cannot bias the crossings.
    let mut cum = Vec::with_capacity(n + 1);
    cum.push(0.0);
    for &x in &xs {
        cum.push(cum.last().unwrap() + x);
    }
    let detrended = |i: usize| xs[i] - (cum[i + hw + 1] - cum[i - hw]) / (wlen as f64);

    let mut crossings = Vec::new();
    let mut prev = detrended(hw);
    for i in hw..(n - hw - 2) {
        let cur = detrended(i + 1);
        if prev < 0.0 && cur >= 0.0 {
            crossings.push(i as f64 * h + h * prev / (prev - cur));
        }
        prev = cur;
    }
    if crossings.len() < 2 {
        return Err(SimError::TooFewCrossings {
            found: crossings.len(),
            need: 6,
        });
    }
    let hz = trace.meta.time_base.hz_factor();
    Ok(crossings
        .windows(2)
        .map(|w| {
            let f = 1.0 / (w[1] - w[0]);
            CycleFreq {
                time: 0.5 * (w[0] + w[1]),
                freq: f,
                freq_hz: f * hz,
            }
        })
        .collect())
}

/// Outcome of envelope analysis on an undamped forced trace.
#[derive(Debug, Clone)]
pub enum BeatOutcome {
    Beats {
        /// Envelope cycles per native time unit.
        frequency: f64,
        frequency_hz: f64,
        peak_times: Vec<f64>,
    },
    /// Resonant undamped growth: the envelope climbs monotonically instead
    /// of beating.
    SecularGrowth { growth_ratio: f64 },
}

/// Beat frequency from envelope peak spacing; the envelope is the per-cycle
/// half range of x. `drive_period` defines the cycle chunks.
pub fn beat_analysis(trace: &SimTrace, drive_period: f64) -> Result<BeatOutcome, SimError> {
    let per_cycle = (drive_period / trace.step()).round() as usize;
    if per_cycle < 8 {
        return Err(SimError::TraceTooShort(
            "need at least 8 samples per drive cycle".into(),
        ));
    }
    let n_cycles = (trace.samples.len() - 1) / per_cycle;
    if n_cycles < 6 {
        return Err(SimError::TraceTooShort(format!(
            "only {n_cycles} full drive cycles"
        )));
    }
    let mut env = Vec::with_capacity(n_cycles);
    for k in 0..n_cycles {
        let seg = &trace.samples[k * per_cycle..=(k + 1) * per_cycle];
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in seg {
            lo = lo.min(s.1);
            hi = hi.max(s.1);
        }
        env.push((hi - lo) / 2.0);
    }
    let env_max = env.iter().cloned().fold(0.0, f64::max);
    let mut peaks = Vec::new();
    for i in 1..env.len() - 1 {
        if env[i] >= env[i - 1] && env[i] > env[i + 1] && env[i] > 0.2 * env_max {
            peaks.push(i);
        }
    }
    if peaks.len() >= 3 {
        let spans: Vec<f64> = peaks
            .windows(2)
            .map(|w| (w[1] - w[0]) as f64 * drive_period)
            .collect();
        let mean_span = spans.iter().sum::<f64>() / spans.len() as f64;
        let freq = 1.0 / mean_span;
        return Ok(BeatOutcome::Beats {
            frequency: freq,
            frequency_hz: freq * trace.meta.time_base.hz_factor(),
            peak_times: peaks
                .iter()
                .map(|i| (*i as f64 + 0.5) * drive_period)
                .collect(),
        });
    }
    // Monotone climb means secular growth, not beating.
    let rising = env.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9));
    if rising && env.last().unwrap() > &(2.0 * env[0].max(1e-12)) {
        return Ok(BeatOutcome::SecularGrowth {
            growth_ratio: env.last().unwrap() / env[0].max(1e-12),
        });
    }
    Err(SimError::TooFewEnvelopePeaks(peaks.len()))
}
