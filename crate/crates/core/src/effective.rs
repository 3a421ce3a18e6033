//! Second-order effective Hamiltonian of the two probe qubits.
//!
//! With the chain in its ground state |ψ₀⟩, the probe dynamics is generated by
//!
//! ```text
//! H_eff = − Σ_{j ≠ 0} A_j† A_j / (E_j − E₀),   A_j = (⟨ψ_j| ⊗ I₄) H_I (|ψ₀⟩ ⊗ I₄)
//! ```
//!
//! where each A_j is a 4×4 operator on the probes. This is the operator form of
//! the usual m_α n_β expansion and holds for any coupling topology.

use nalgebra::{DMatrix, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::operators::{OperatorMatrix, C64, ZERO};
use crate::spectra::{ground_state, Spectrum};

pub type Matrix4c = Matrix4<C64>;

/// Operator on the probes in the basis {|00⟩, |01⟩, |10⟩, |11⟩} of (a, b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitOperator(pub Matrix4c);

impl TwoQubitOperator {
    pub fn zero() -> Self {
        Self(Matrix4c::zeros())
    }

    pub fn identity() -> Self {
        Self(Matrix4c::identity())
    }

    /// σˣ_a σˣ_b + σʸ_a σʸ_b: 2 on the |01⟩↔|10⟩ off-diagonal.
    pub fn flip_flop() -> Self {
        let mut m = Matrix4c::zeros();
        m[(1, 2)] = C64::from(2.0);
        m[(2, 1)] = C64::from(2.0);
        Self(m)
    }

    /// σᶻ_a + σᶻ_b
    pub fn total_z() -> Self {
        Self(Matrix4c::from_diagonal(&nalgebra::Vector4::new(
            C64::from(2.0),
            ZERO,
            ZERO,
            C64::from(-2.0),
        )))
    }

    /// g (I + σˣσˣ + σʸσʸ)
    pub fn exchange_form(g: f64) -> Self {
        Self((Self::identity().0 + Self::flip_flop().0).scale(g))
    }

    pub fn matrix(&self) -> &Matrix4c {
        &self.0
    }

    pub fn hermiticity_error(&self) -> f64 {
        (self.0 - self.0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Coupling between |01⟩ and |10⟩, the part that creates entanglement from |01⟩.
    pub fn entangling_element(&self) -> C64 {
        self.0[(1, 2)]
    }

    /// max-entry norm of [H, σᶻ_a + σᶻ_b]. Zero means the X form of a state is preserved.
    pub fn z_commutator_norm(&self) -> f64 {
        let z = Self::total_z().0;
        (self.0 * z - z * self.0).iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn to_operator(&self) -> OperatorMatrix {
        OperatorMatrix::from_matrix(DMatrix::from_fn(4, 4, |r, c| self.0[(r, c)])).expect("4x4 is a valid register")
    }

    /// Largest |eigenvalue|, i.e. the spectral norm of a Hermitian operator.
    pub fn spectral_norm(&self) -> f64 {
        let h = (self.0 + self.0.adjoint()).scale(0.5);
        h.symmetric_eigenvalues().iter().map(|l| l.abs()).fold(0.0, f64::max)
    }
}

/// Result of the perturbative elimination of the chain.
#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    pub operator: TwoQubitOperator,
    pub ground_energy: f64,
    /// Chain levels within the degeneracy tolerance of E₀ that were left out of the sum.
    pub excluded: Vec<usize>,
}

/// Effective two-qubit Hamiltonian from the chain spectrum and H_I.
///
/// A degenerate chain ground state is an error unless `exclude_degenerate` is
/// set, in which case the degenerate partners are dropped and listed in
/// [`EffectiveHamiltonian::excluded`].
pub fn effective_hamiltonian(
    chain_spectrum: &Spectrum,
    interaction: &OperatorMatrix,
    exclude_degenerate: bool,
) -> Result<EffectiveHamiltonian> {
    let dim = chain_spectrum.len();
    if interaction.dim() != 4 * dim {
        return Err(domain(format!(
            "interaction has dimension {} but the chain register needs {}",
            interaction.dim(),
            4 * dim
        )));
    }
    let ground = ground_state(chain_spectrum);
    if ground.degenerate && !exclude_degenerate {
        return Err(Error::DegenerateGroundState {
            field: f64::NAN,
            gap: ground.gap,
        });
    }

    // W[:, q] = H_I (|ψ₀⟩ ⊗ |q⟩), reshaped to M[c, 4 q' + q] = W[4 c + q', q]
    let mut lifted = DMatrix::from_element(4 * dim, 4, ZERO);
    for c in 0..dim {
        for q in 0..4 {
            lifted[(4 * c + q, q)] = ground.vector[c];
        }
    }
    let w = interaction.matrix() * lifted;
    let reshaped = DMatrix::from_fn(dim, 16, |c, k| w[(4 * c + k / 4, k % 4)]);
    // row j of V† M holds A_j in row-major order
    let projected = chain_spectrum.eigenvectors().adjoint() * reshaped;

    let e0 = ground.energy;
    let mut acc = Matrix4c::zeros();
    let mut excluded = Vec::new();
    for j in 1..dim {
        let gap = chain_spectrum.eigenvalues()[j] - e0;
        if gap < chain_spectrum.degeneracy_tol {
            excluded.push(j);
            continue;
        }
        let a = Matrix4c::from_fn(|r, c| projected[(j, 4 * r + c)]);
        acc -= (a.adjoint() * a).unscale(gap);
    }
    // exact hermiticity for downstream eigensolves
    let operator = TwoQubitOperator((acc + acc.adjoint()).scale(0.5));
    Ok(EffectiveHamiltonian {
        operator,
        ground_energy: e0,
        excluded,
    })
}

/// Fit of an effective Hamiltonian to g_d I + g_o (σˣσˣ + σʸσʸ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GExtraction {
    pub g_diag: f64,
    pub g_offdiag: f64,
    /// Coefficient of σᶻ_a + σᶻ_b, reported separately from the fit.
    pub z_field: f64,
    /// Spectral norm of H − g_d I − g_o (σˣσˣ + σʸσʸ).
    pub residual: f64,
    /// Same, after also removing the σᶻ_a + σᶻ_b component.
    pub residual_without_z: f64,
}

/// Frobenius-orthogonal projection onto span{I, σˣσˣ + σʸσʸ}.
pub fn extract_g(h: &TwoQubitOperator) -> GExtraction {
    let project = |basis: &TwoQubitOperator| {
        (basis.0.adjoint() * h.0).trace().re / (basis.0.adjoint() * basis.0).trace().re
    };
    let (id, ff, z) = (TwoQubitOperator::identity(), TwoQubitOperator::flip_flop(), TwoQubitOperator::total_z());
    let g_diag = project(&id);
    let g_offdiag = project(&ff);
    let z_field = project(&z);
    let fitted = id.0.scale(g_diag) + ff.0.scale(g_offdiag);
    let residual = TwoQubitOperator(h.0 - fitted).spectral_norm();
    let residual_without_z = TwoQubitOperator(h.0 - fitted - z.0.scale(z_field)).spectral_norm();
    GExtraction {
        g_diag,
        g_offdiag,
        z_field,
        residual,
        residual_without_z,
    }
}

/// g = J_p² (Δ − B) / ((B − Δ + 1)(B − Δ − 1)) for the two-site chain above B_C.
pub fn two_site_g(jp: f64, delta: f64, field: f64) -> f64 {
    let x = field - delta;
    jp * jp * (delta - field) / ((x + 1.0) * (x - 1.0))
}
