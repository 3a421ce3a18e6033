use nalgebra::Vector4;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{basis_state, bell_0011, bell_0110, check_times, concurrence_trace};
use crate::effective::{effective_hamiltonian, TwoQubitOperator};
use crate::error::{domain, Error, Result};
use crate::operators::{build_interaction, ChainSpec, CouplingSpec, OperatorMatrix, C64};
use crate::spectra::{ChainSectors, DEGENERACY_TOL};

/// Initial probe state; the chain always starts in its ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InitialState {
    /// |01⟩
    #[serde(rename = "basis01")]
    Basis01,
    /// (|01⟩ + |10⟩)/√2
    #[serde(rename = "bell_0110")]
    BellPlus0110,
    /// (|00⟩ + |11⟩)/√2
    #[serde(rename = "bell_0011")]
    BellPlus0011,
}

impl InitialState {
    pub fn vector(self) -> Vector4<C64> {
        match self {
            InitialState::Basis01 => basis_state(0, 1),
            InitialState::BellPlus0110 => bell_0110(),
            InitialState::BellPlus0011 => bell_0011(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            InitialState::Basis01 => "basis01",
            InitialState::BellPlus0110 => "bell_0110",
            InitialState::BellPlus0011 => "bell_0011",
        }
    }
}

/// Concurrence over a (B, t) grid. Rows follow `fields`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub fields: Vec<f64>,
    pub times: Vec<f64>,
    pub concurrence: Vec<Vec<f64>>,
    /// Requested fields dropped because they sit on a level crossing.
    pub skipped: Vec<f64>,
    pub chain: ChainSpec,
    pub coupling: CouplingSpec,
    pub initial: InitialState,
}

impl SweepResult {
    pub fn row(&self, field: f64) -> Option<&[f64]> {
        self.fields.iter().position(|&b| b == field).map(|i| self.concurrence[i].as_slice())
    }
}

/// Effective probe Hamiltonian at `field`, reusing a sector decomposition.
pub fn effective_at(sectors: &ChainSectors, interaction: &OperatorMatrix, field: f64) -> Result<TwoQubitOperator> {
    let spectrum = sectors.spectrum_at(field);
    effective_hamiltonian(&spectrum, interaction, false)
        .map(|h| h.operator)
        .map_err(|e| match e {
            Error::DegenerateGroundState { gap, .. } => Error::DegenerateGroundState { field, gap },
            other => other,
        })
}

pub fn sweep_concurrence(
    template: &ChainSpec,
    coupling: &CouplingSpec,
    initial: InitialState,
    fields: &[f64],
    times: &[f64],
) -> Result<SweepResult> {
    if fields.is_empty() || times.is_empty() {
        return Err(domain("sweep grids must be nonempty"));
    }
    check_times(times)?;
    let sectors = ChainSectors::new(template)?;
    let interaction = build_interaction(template, coupling)?;
    let psi0 = initial.vector();

    let rows: Vec<Option<Vec<f64>>> = fields
        .par_iter()
        .map(|&b| {
            if sectors.spectrum_at(b).ground_gap() < 10.0 * DEGENERACY_TOL {
                return Ok(None);
            }
            let h = effective_at(&sectors, &interaction, b)?;
            Ok(Some(concurrence_trace(&h, &psi0, times)?.values))
        })
        .collect::<Result<_>>()?;

    let mut result = SweepResult {
        fields: Vec::new(),
        times: times.to_vec(),
        concurrence: Vec::new(),
        skipped: Vec::new(),
        chain: template.clone(),
        coupling: coupling.clone(),
        initial,
    };
    for (&b, row) in fields.iter().zip(rows) {
        match row {
            Some(values) => {
                result.fields.push(b);
                result.concurrence.push(values);
            }
            None => result.skipped.push(b),
        }
    }
    if result.fields.is_empty() {
        return Err(Error::NoValidGridPoints);
    }
    Ok(result)
}
