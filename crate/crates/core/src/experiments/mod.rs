//! Field sweeps, period measurement and critical-field scaling built on the
//! spectra / effective / dynamics pipeline.

mod gcompare;
mod period;
mod scaling;
mod sweep;

pub use gcompare::{g_comparison, GComparisonRow};
pub use period::{estimate_period, PeriodEstimate, PeriodMethod, ZERO_THRESHOLD};
pub use scaling::{
    check_period_scaling, check_period_scaling_with, critical_field_scaling, measure_period, region_structure, BcFit, PeriodScalingReport,
    PeriodScalingRow, RegionReport, PERIOD_RATIO_TOLERANCE,
};
pub use sweep::{effective_at, sweep_concurrence, InitialState, SweepResult};

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count).map(|i| if i + 1 == count { stop } else { start + i as f64 * step }).collect()
        }
    }
}

/// Points `start, start + step, …` not exceeding `stop` (within half a step of round-off).
pub fn stepped(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || stop < start {
        return Vec::new();
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| start + i as f64 * step).collect()
}
