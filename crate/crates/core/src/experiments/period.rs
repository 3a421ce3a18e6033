use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::dynamics::ConcurrenceTrace;
use crate::error::{domain, Error, Result};

/// Largest fitted minimum that still counts as C = 0.
pub const ZERO_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeriodMethod {
    ZeroCrossing,
    SpectralPeak,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodEstimate {
    pub period: f64,
    pub method: PeriodMethod,
    /// Relative disagreement between the zero-spacing and spectral estimates, or
    /// the relative frequency resolution when only the spectral peak is usable.
    pub confidence: f64,
    pub zeros: usize,
}

/// Oscillation period of a concurrence trace.
///
/// Zeros are the local minima whose symmetric V-fit through the neighbouring
/// samples has an apex below [`ZERO_THRESHOLD`]; the period is their mean
/// spacing. A discrete Fourier peak of C(t) is the cross-check, and the
/// fallback when fewer than three zeros are present.
pub fn estimate_period(trace: &ConcurrenceTrace) -> Result<PeriodEstimate> {
    let (t, c) = (&trace.times, &trace.values);
    if t.len() != c.len() || t.len() < 4 {
        return Err(domain("trace needs at least 4 samples with matching times"));
    }
    let span = t[t.len() - 1] - t[0];
    let amplitude = trace.max() - trace.min();
    if !(span > 0.0) || amplitude < 1e-6 {
        return Err(Error::TooFewOscillations { found: 0 });
    }

    let zeros = locate_zeros(t, c);
    let by_zeros = (zeros.len() >= 3).then(|| (zeros[zeros.len() - 1] - zeros[0]) / (zeros.len() - 1) as f64);
    let peak = spectral_peak(t, c, by_zeros.map(|p| 1.0 / p));

    match (by_zeros, peak) {
        (Some(period), Some(freq)) => Ok(PeriodEstimate {
            period,
            method: PeriodMethod::ZeroCrossing,
            confidence: (period - 1.0 / freq).abs() / period,
            zeros: zeros.len(),
        }),
        (Some(period), None) => Ok(PeriodEstimate {
            period,
            method: PeriodMethod::ZeroCrossing,
            confidence: f64::NAN,
            zeros: zeros.len(),
        }),
        (None, Some(freq)) if freq * span >= 2.0 => Ok(PeriodEstimate {
            period: 1.0 / freq,
            method: PeriodMethod::SpectralPeak,
            confidence: 1.0 / (2.0 * freq * span),
            zeros: zeros.len(),
        }),
        (None, peak) => Err(Error::TooFewOscillations {
            found: peak.map_or(0, |f| (f * span).floor() as usize),
        }),
    }
}

/// Times of C = 0 located to sub-grid accuracy.
fn locate_zeros(t: &[f64], c: &[f64]) -> Vec<f64> {
    let mut zeros = Vec::new();
    if c[0] < ZERO_THRESHOLD && c[1] > c[0] {
        zeros.push(t[0]);
    }
    for i in 1..c.len() - 1 {
        let (cm, c0, cp) = (c[i - 1], c[i], c[i + 1]);
        // strict on one side so a two-sample plateau yields one minimum
        if !(c0 <= cm && c0 < cp) {
            continue;
        }
        let (hm, hp) = (t[i] - t[i - 1], t[i + 1] - t[i]);
        // |slope| from the steeper (far) side, apex from the other two samples
        let zero = if cp >= cm {
            let s = (cp - c0) / hp;
            let apex = 0.5 * (cm + c0 - s * hm);
            (apex < ZERO_THRESHOLD && s > 0.0).then(|| t[i] - (c0 - apex) / s)
        } else {
            let s = (cm - c0) / hm;
            let apex = 0.5 * (cp + c0 - s * hp);
            (apex < ZERO_THRESHOLD && s > 0.0).then(|| t[i] + (c0 - apex) / s)
        };
        zeros.extend(zero);
    }
    let last = c.len() - 1;
    if c[last] < ZERO_THRESHOLD && c[last - 1] > c[last] {
        zeros.push(t[last]);
    }
    zeros
}

/// Hann-windowed DFT power of C(t) − mean at `freq`.
fn dft_power(t: &[f64], c: &[f64], mean: f64, freq: f64) -> f64 {
    let (t0, span) = (t[0], t[t.len() - 1] - t[0]);
    let (mut re, mut im) = (0.0, 0.0);
    for (&tk, &ck) in t.iter().zip(c) {
        let w = 0.5 * (1.0 - (TAU * (tk - t0) / span).cos());
        let (s, co) = (TAU * freq * tk).sin_cos();
        re += w * (ck - mean) * co;
        im -= w * (ck - mean) * s;
    }
    re * re + im * im
}

/// Frequency of the strongest nonzero Fourier component of C(t).
///
/// With a prior frequency the search is confined to [prior/2, 2·prior].
fn spectral_peak(t: &[f64], c: &[f64], prior: Option<f64>) -> Option<f64> {
    let n = t.len();
    let span = t[n - 1] - t[0];
    let mean = c.iter().sum::<f64>() / n as f64;
    let nyquist = 0.5 * (n - 1) as f64 / span;
    let df = 0.5 / span;
    let (lo, hi) = match prior {
        Some(f) => ((0.5 * f).max(df), (2.0 * f).min(nyquist)),
        None => (df, nyquist),
    };
    if !(hi > lo) {
        return None;
    }
    let bins = ((hi - lo) / df).ceil() as usize;
    let (best, _) = (0..=bins)
        .map(|k| {
            let f = lo + k as f64 * df;
            (f, dft_power(t, c, mean, f))
        })
        .fold((lo, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });

    // golden-section refinement inside the neighbouring bins
    let (mut a, mut b) = ((best - df).max(lo * 0.5), best + df);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut p1, mut p2) = (dft_power(t, c, mean, x1), dft_power(t, c, mean, x2));
    while b - a > 1e-9 * best.max(df) {
        if p1 > p2 {
            b = x2;
            x2 = x1;
            p2 = p1;
            x1 = b - g * (b - a);
            p1 = dft_power(t, c, mean, x1);
        } else {
            a = x1;
            x1 = x2;
            p1 = p2;
            x2 = a + g * (b - a);
            p2 = dft_power(t, c, mean, x2);
        }
    }
    Some(0.5 * (a + b))
}
