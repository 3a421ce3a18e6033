use anyhow::Result;
use xxz_core::dynamics::{concurrence_trace, full_vs_effective};
use xxz_core::effective::{effective_hamiltonian, extract_g, two_site_g, EffectiveHamiltonian};
use xxz_core::experiments::{check_period_scaling_with, critical_field_scaling, sweep_concurrence};
use xxz_core::operators::build_interaction;
use xxz_core::spectra::{chain_spectrum, find_level_crossings_with, CrossingSearch};
use xxz_core::Error;

use crate::config::{Command, RunConfig};
use crate::output::{num, OutputDir, Table};

pub fn run(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    match cfg.command {
        Command::Spectrum => spectrum(cfg, out),
        Command::Effective => effective(cfg, out),
        Command::Evolve => evolve(cfg, out),
        Command::Sweep => sweep(cfg, out),
        Command::Critical => critical(cfg, out),
        Command::Scaling => scaling(cfg, out),
        Command::Fullcheck => fullcheck(cfg, out),
    }
}

/// The core reports the field as unknown when it only sees a spectrum.
fn with_field(e: Error, field: f64) -> Error {
    match e {
        Error::DegenerateGroundState { gap, .. } => Error::DegenerateGroundState { field, gap },
        other => other,
    }
}

fn effective_of(cfg: &RunConfig) -> Result<EffectiveHamiltonian> {
    let chain = cfg.chain_spec();
    let spectrum = chain_spectrum(&chain)?;
    let interaction = build_interaction(&chain, &cfg.coupling_spec())?;
    Ok(effective_hamiltonian(&spectrum, &interaction, cfg.effective.exclude_degenerate)
        .map_err(|e| with_field(e, chain.field))?)
}

fn spectrum(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let s = chain_spectrum(&cfg.chain_spec())?;
    let mut t = Table::new(&["index", "energy", "total_sigma_z"]);
    for (j, e) in s.eigenvalues().iter().enumerate() {
        let m = s.magnetization(j).map_or(String::new(), |m| m.to_string());
        t.push(vec![j.to_string(), num(*e), m]);
    }
    out.write("spectrum.csv", &t)
}

fn effective(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let heff = effective_of(cfg)?;
    let m = heff.operator.matrix();
    let mut t = Table::new(&["row", "col", "re", "im"]);
    for r in 0..4 {
        for c in 0..4 {
            t.push(vec![r.to_string(), c.to_string(), num(m[(r, c)].re), num(m[(r, c)].im)]);
        }
    }
    out.write("effective.csv", &t)?;

    let g = extract_g(&heff.operator);
    let chain = cfg.chain_spec();
    let target = if chain.sites == 2 {
        num(two_site_g(cfg.coupling.strength, chain.anisotropy, chain.field))
    } else {
        String::new()
    };
    let excluded: Vec<String> = heff.excluded.iter().map(|j| j.to_string()).collect();
    let mut t = Table::new(&[
        "g_diag",
        "g_offdiag",
        "z_field",
        "residual",
        "residual_without_z",
        "two_site_g",
        "hermiticity_error",
        "z_commutator",
        "ground_energy",
        "excluded_levels",
    ]);
    t.push(vec![
        num(g.g_diag),
        num(g.g_offdiag),
        num(g.z_field),
        num(g.residual),
        num(g.residual_without_z),
        target,
        num(heff.operator.hermiticity_error()),
        num(heff.operator.z_commutator_norm()),
        num(heff.ground_energy),
        excluded.join(" "),
    ]);
    out.write("g_extraction.csv", &t)
}

fn evolve(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let heff = effective_of(cfg)?;
    let times = cfg.grids.times.points();
    let trace = concurrence_trace(&heff.operator, &cfg.initial_state.vector(), &times)?;
    let mut t = Table::new(&["time", "concurrence"]);
    for (time, c) in trace.times.iter().zip(&trace.values) {
        t.push(vec![num(*time), num(*c)]);
    }
    out.write("trace.csv", &t)
}

fn sweep(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let result = sweep_concurrence(
        &cfg.chain_spec(),
        &cfg.coupling_spec(),
        cfg.initial_state,
        &cfg.grids.fields.points(),
        &cfg.grids.times.points(),
    )?;
    let mut t = Table::new(&["field", "time", "concurrence"]);
    for (b, row) in result.fields.iter().zip(&result.concurrence) {
        for (time, c) in result.times.iter().zip(row) {
            t.push(vec![num(*b), num(*time), num(*c)]);
        }
    }
    out.write("sweep.csv", &t)?;
    let mut skipped = Table::new(&["field"]);
    for b in &result.skipped {
        skipped.push(vec![num(*b)]);
    }
    out.write("skipped_fields.csv", &skipped)
}

fn critical(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let k = &cfg.critical;
    let search = CrossingSearch {
        grid_step: k.grid_step,
        bracket_tol: k.bracket_tol,
        ..CrossingSearch::default()
    };
    let scan = find_level_crossings_with(&cfg.chain_spec(), (k.range[0], k.range[1]), &search)?;
    let mut t = Table::new(&["index", "field", "sector_below", "sector_above"]);
    for (i, c) in scan.crossings.iter().enumerate() {
        t.push(vec![
            i.to_string(),
            num(c.field),
            c.sector_below.to_string(),
            c.sector_above.to_string(),
        ]);
    }
    out.write("critical.csv", &t)
}

fn scaling(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let chain = &cfg.chain;
    let fit = critical_field_scaling(&cfg.scaling.sizes, chain.anisotropy, Some(chain.boundary))?;
    let mut t = Table::new(&["sites", "inverse_sites", "critical_field", "fitted", "residual"]);
    for (&n, &(x, y)) in cfg.scaling.sizes.iter().zip(&fit.points) {
        let fitted = fit.slope * x + fit.intercept;
        t.push(vec![n.to_string(), num(x), num(y), num(fitted), num(y - fitted)]);
    }
    out.write("bc_points.csv", &t)?;
    let mut t = Table::new(&["slope", "intercept", "max_residual"]);
    t.push(vec![num(fit.slope), num(fit.intercept), num(fit.max_residual)]);
    out.write("bc_fit.csv", &t)?;

    if cfg.scaling.period_sizes.is_empty() {
        return Ok(());
    }
    let report = check_period_scaling_with(
        &cfg.scaling.period_sizes,
        chain.anisotropy,
        &cfg.coupling_spec(),
        Some(chain.boundary),
    )?;
    let mut t = Table::new(&[
        "sites",
        "first_critical_field",
        "field_below",
        "field_above",
        "period_below",
        "period_above",
        "measured_ratio",
        "predicted_ratio",
        "relative_error",
        "within_tolerance",
    ]);
    for r in &report.rows {
        t.push(vec![
            r.sites.to_string(),
            num(r.first_critical_field),
            num(r.field_below),
            num(r.field_above),
            num(r.period_below),
            num(r.period_above),
            num(r.measured_ratio),
            num(r.predicted_ratio),
            num(r.relative_error),
            r.within_tolerance.to_string(),
        ]);
    }
    out.write("period_ratio.csv", &t)
}

fn fullcheck(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let chain = cfg.chain_spec();
    let times = cfg.grids.times.points();
    let cmp = full_vs_effective(&chain, &cfg.coupling_spec(), &cfg.initial_state.vector(), &times)?;
    let mut t = Table::new(&["time", "concurrence_full", "concurrence_effective", "abs_deviation"]);
    for ((time, f), e) in times.iter().zip(&cmp.full.values).zip(&cmp.effective.values) {
        t.push(vec![num(*time), num(*f), num(*e), num((f - e).abs())]);
    }
    out.write("fullcheck.csv", &t)?;
    let mut t = Table::new(&["max_deviation"]);
    t.push(vec![num(cmp.max_deviation)]);
    out.write("fullcheck_summary.csv", &t)
}
