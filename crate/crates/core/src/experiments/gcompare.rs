use serde::{Deserialize, Serialize};

use crate::effective::{effective_hamiltonian, extract_g, two_site_g, GExtraction};
use crate::error::Result;
use crate::operators::{build_interaction, ChainSpec, Convention, CouplingSpec, Topology};
use crate::spectra::chain_spectrum;

/// One coupling variant of the two-site effective Hamiltonian against the
/// closed-form g.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GComparisonRow {
    pub topology: Topology,
    pub convention: Convention,
    pub extraction: GExtraction,
    /// The closed-form g for the same parameters.
    pub target_g: f64,
    pub hermiticity_error: f64,
    /// max |[H_eff, σᶻ_a + σᶻ_b]|
    pub z_commutator: f64,
    /// Largest entry outside the diagonal and the |01⟩,|10⟩ pair.
    pub off_structure: f64,
}

impl GComparisonRow {
    /// Off-diagonal only between |01⟩ and |10⟩, hence X-form preserving.
    pub fn structure_holds(&self, tol: f64) -> bool {
        self.hermiticity_error <= tol && self.z_commutator <= tol && self.off_structure <= tol
    }

    pub fn matches_target(&self, rel_tol: f64) -> bool {
        let close = |v: f64| (v - self.target_g).abs() <= rel_tol * self.target_g.abs();
        close(self.extraction.g_offdiag) && close(self.extraction.g_diag) && self.extraction.residual <= rel_tol
    }
}

/// Two-site chain, every (topology, convention) pair.
pub fn g_comparison(delta: f64, field: f64, jp: f64) -> Result<Vec<GComparisonRow>> {
    let chain = ChainSpec::new(2, delta, field);
    let spectrum = chain_spectrum(&chain)?;
    let mut rows = Vec::new();
    for topology in [Topology::EndSites, Topology::AllSites] {
        for convention in [Convention::PauliDot, Convention::SpinHalfDot] {
            let coupling = CouplingSpec::new(jp, topology.clone(), convention);
            let interaction = build_interaction(&chain, &coupling)?;
            let h = effective_hamiltonian(&spectrum, &interaction, false)?.operator;
            let m = h.matrix();
            let mut off_structure = 0.0f64;
            for r in 0..4 {
                for c in 0..4 {
                    if r != c && !matches!((r, c), (1, 2) | (2, 1)) {
                        off_structure = off_structure.max(m[(r, c)].norm());
                    }
                }
            }
            rows.push(GComparisonRow {
                topology: topology.clone(),
                convention,
                extraction: extract_g(&h),
                target_g: two_site_g(jp, delta, field),
                hermiticity_error: h.hermiticity_error(),
                z_commutator: h.z_commutator_norm(),
                off_structure,
            });
        }
    }
    Ok(rows)
}
