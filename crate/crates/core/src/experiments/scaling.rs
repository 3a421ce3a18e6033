use serde::{Deserialize, Serialize};

use super::period::{estimate_period, PeriodEstimate};
use super::sweep::{effective_at, InitialState};
use crate::dynamics::concurrence_trace;
use crate::error::{domain, Error, Result};
use crate::operators::{build_interaction, Boundary, ChainSpec, CouplingSpec, DEFAULT_MAX_TOTAL_SPINS};
use crate::spectra::{ChainSectors, Crossing, CrossingSearch};

/// Allowed relative deviation of the measured period ratio from √(N(N+1)).
pub const PERIOD_RATIO_TOLERANCE: f64 = 0.2;

/// Field window searched for critical fields.
const FIELD_RANGE: (f64, f64) = (0.0, 4.0);

/// Samples per trace when measuring a period.
const PERIOD_SAMPLES: usize = 4000;

fn template(sites: usize, delta: f64, boundary: Option<Boundary>) -> ChainSpec {
    let spec = ChainSpec::new(sites, delta, 0.0);
    match boundary {
        Some(b) => spec.with_boundary(b),
        None => spec,
    }
}

/// Period of C(t) from |01⟩ under the effective Hamiltonian at `field`.
///
/// The time window starts at [0, 200] and doubles until at least two
/// oscillations fit.
pub fn measure_period(sectors: &ChainSectors, coupling: &CouplingSpec, field: f64) -> Result<PeriodEstimate> {
    let interaction = build_interaction(sectors.template(), coupling)?;
    let h = effective_at(sectors, &interaction, field)?;
    let psi0 = InitialState::Basis01.vector();
    let mut t_max = 200.0;
    for _ in 0..12 {
        let times = super::linspace(0.0, t_max, PERIOD_SAMPLES);
        match estimate_period(&concurrence_trace(&h, &psi0, &times)?) {
            Err(Error::TooFewOscillations { .. }) => t_max *= 2.0,
            other => return other,
        }
    }
    Err(Error::TooFewOscillations { found: 0 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodScalingRow {
    pub sites: usize,
    pub first_critical_field: f64,
    pub field_below: f64,
    pub field_above: f64,
    pub period_below: f64,
    pub period_above: f64,
    pub measured_ratio: f64,
    /// √(N(N+1))
    pub predicted_ratio: f64,
    pub relative_error: f64,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodScalingReport {
    pub anisotropy: f64,
    pub coupling: CouplingSpec,
    pub rows: Vec<PeriodScalingRow>,
}

/// Compare the below/above-B_C period ratio with √(N(N+1)).
///
/// Below B_C the field is half the first critical field; above, it is the
/// middle of the second region (or halfway to the top of the window when there
/// is only one crossing).
pub fn check_period_scaling(sizes: &[usize], delta: f64, coupling: &CouplingSpec) -> Result<PeriodScalingReport> {
    check_period_scaling_with(sizes, delta, coupling, None)
}

/// [`check_period_scaling`] with an explicit chain boundary.
pub fn check_period_scaling_with(
    sizes: &[usize],
    delta: f64,
    coupling: &CouplingSpec,
    boundary: Option<Boundary>,
) -> Result<PeriodScalingReport> {
    let rows = sizes
        .iter()
        .map(|&n| {
            if n % 2 != 0 || n + 2 > DEFAULT_MAX_TOTAL_SPINS {
                return Err(domain(format!("period scaling needs even N with N + 2 <= 12, got {n}")));
            }
            let sectors = ChainSectors::new(&template(n, delta, boundary))?;
            let crossings = sectors.level_crossings(FIELD_RANGE, &CrossingSearch::default())?;
            let first = crossings
                .first()
                .ok_or_else(|| domain(format!("no critical field in B ∈ (0, 4] for N = {n}")))?
                .field;
            let second = crossings.get(1).map_or(FIELD_RANGE.1, |c| c.field);
            let (field_below, field_above) = (0.5 * first, 0.5 * (first + second));
            let below = measure_period(&sectors, coupling, field_below)?.period;
            let above = measure_period(&sectors, coupling, field_above)?.period;
            let measured_ratio = below / above;
            let predicted_ratio = ((n * (n + 1)) as f64).sqrt();
            let relative_error = (measured_ratio - predicted_ratio).abs() / predicted_ratio;
            Ok(PeriodScalingRow {
                sites: n,
                first_critical_field: first,
                field_below,
                field_above,
                period_below: below,
                period_above: above,
                measured_ratio,
                predicted_ratio,
                relative_error,
                within_tolerance: relative_error <= PERIOD_RATIO_TOLERANCE,
            })
        })
        .collect::<Result<_>>()?;
    Ok(PeriodScalingReport {
        anisotropy: delta,
        coupling: coupling.clone(),
        rows,
    })
}

/// Least-squares line through (1/N, B_C(N)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcFit {
    /// (1/N, first critical field)
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

impl BcFit {
    pub fn fit(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 3 {
            return Err(domain(format!("need at least 3 points for the B_C fit, got {}", points.len())));
        }
        let n = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx == 0.0 {
            return Err(domain("B_C fit needs at least two distinct chain sizes"));
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let max_residual = points
            .iter()
            .map(|p| (p.1 - slope * p.0 - intercept).abs())
            .fold(0.0, f64::max);
        Ok(Self {
            points,
            slope,
            intercept,
            max_residual,
        })
    }
}

/// First critical field for each chain size, fitted against 1/N.
///
/// `boundary: None` uses the default (open) boundary.
pub fn critical_field_scaling(sizes: &[usize], delta: f64, boundary: Option<Boundary>) -> Result<BcFit> {
    let points = sizes
        .iter()
        .map(|&n| {
            let sectors = ChainSectors::new(&template(n, delta, boundary))?;
            let crossings = sectors.level_crossings(FIELD_RANGE, &CrossingSearch::default())?;
            let first = crossings
                .first()
                .ok_or_else(|| domain(format!("no critical field in B ∈ (0, 4] for N = {n}")))?;
            Ok((1.0 / n as f64, first.field))
        })
        .collect::<Result<Vec<_>>>()?;
    BcFit::fit(points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub sites: usize,
    pub boundary: Boundary,
    pub crossings: Vec<Crossing>,
    /// Distinct ground-state sectors over the field range.
    pub regions: usize,
    /// N/2 + 1
    pub expected_regions: usize,
}

impl RegionReport {
    pub fn matches_expected(&self) -> bool {
        self.regions == self.expected_regions
    }
}

/// Count the ground-state magnetization regions of `template` over `range`.
pub fn region_structure(template: &ChainSpec, range: (f64, f64)) -> Result<RegionReport> {
    let sectors = ChainSectors::new(template)?;
    let crossings = sectors.level_crossings(range, &CrossingSearch::default())?;
    Ok(RegionReport {
        sites: template.sites,
        boundary: template.boundary,
        regions: crossings.len() + 1,
        crossings,
        expected_regions: template.sites / 2 + 1,
    })
}
