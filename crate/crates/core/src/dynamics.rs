//! Pure-state evolution, reduced probe states and concurrence.

use nalgebra::{DMatrix, DVector, Vector4};
use serde::{Deserialize, Serialize};

use crate::effective::{effective_hamiltonian, Matrix4c, TwoQubitOperator};
use crate::error::{domain, Error, Result};
use crate::operators::{build_full_hamiltonian, build_interaction, ChainSpec, CouplingSpec, OperatorMatrix, C64, ZERO};
use crate::spectra::{chain_spectrum, eig_hermitian, ground_state, Spectrum};

const NORM_TOL: f64 = 1e-10;
const X_FORM_TOL: f64 = 1e-12;
const X_AGREEMENT_TOL: f64 = 1e-10;

/// exp(−iHt) applied to a fixed initial state, through the eigenbasis of H.
#[derive(Debug, Clone)]
pub struct Propagator {
    spectrum: Spectrum,
    /// V† ψ₀
    coefficients: DVector<C64>,
}

impl Propagator {
    pub fn new(h: &OperatorMatrix, psi0: &DVector<C64>) -> Result<Self> {
        if psi0.len() != h.dim() {
            return Err(domain(format!("state has length {} but H has dimension {}", psi0.len(), h.dim())));
        }
        let norm = psi0.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(domain(format!("initial state is not normalized (norm {norm})")));
        }
        let spectrum = eig_hermitian(h)?;
        let coefficients = spectrum.eigenvectors().adjoint() * psi0;
        Ok(Self { spectrum, coefficients })
    }

    pub fn at(&self, t: f64) -> DVector<C64> {
        let phased = DVector::from_iterator(
            self.coefficients.len(),
            self.coefficients
                .iter()
                .zip(self.spectrum.eigenvalues())
                .map(|(c, &l)| c * C64::from_polar(1.0, -l * t)),
        );
        self.spectrum.eigenvectors() * phased
    }
}

/// ψ(t) = V diag(e^{−iλt}) V† ψ₀
pub fn evolve_state(h: &OperatorMatrix, psi0: &DVector<C64>, t: f64) -> Result<DVector<C64>> {
    Ok(Propagator::new(h, psi0)?.at(t))
}

/// |ψ⟩⟨ψ|
pub fn density_from_state(psi: &DVector<C64>) -> DMatrix<C64> {
    psi * psi.adjoint()
}

/// 4×4 density matrix of the probes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitDensity(Matrix4c);

impl TwoQubitDensity {
    /// Validates hermiticity (1e-12), unit trace (1e-10) and positivity (−1e-10).
    pub fn new(m: Matrix4c) -> Result<Self> {
        let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > 1e-12 {
            return Err(domain(format!("density matrix is not Hermitian ({herm:e})")));
        }
        let tr = m.trace();
        if (tr - C64::from(1.0)).norm() > 1e-10 {
            return Err(domain(format!("density matrix trace is {tr}, expected 1")));
        }
        let h = (m + m.adjoint()).scale(0.5);
        let min = h.symmetric_eigenvalues().min();
        if min < -1e-10 {
            return Err(domain(format!("density matrix has negative eigenvalue {min:e}")));
        }
        Ok(Self(h))
    }

    pub fn from_state(psi: &Vector4<C64>) -> Result<Self> {
        Self::new(psi * psi.adjoint())
    }

    pub fn matrix(&self) -> &Matrix4c {
        &self.0
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// Largest entry outside the diagonal and the |01⟩,|10⟩ coherence.
    pub fn off_x_magnitude(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                let kept = r == c || (r, c) == (1, 2) || (r, c) == (2, 1);
                if !kept {
                    worst = worst.max(self.0[(r, c)].norm());
                }
            }
        }
        worst
    }

    pub fn x_elements(&self) -> Option<XStateElements> {
        (self.off_x_magnitude() < X_FORM_TOL).then(|| XStateElements {
            u: self.0[(0, 0)].re,
            w1: self.0[(1, 1)].re,
            w2: self.0[(2, 2)].re,
            v: self.0[(3, 3)].re,
            y: self.0[(1, 2)],
        })
    }
}

/// Nonzero entries of a density matrix with only the central coherence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XStateElements {
    pub u: f64,
    pub w1: f64,
    pub w2: f64,
    pub v: f64,
    pub y: C64,
}

impl XStateElements {
    pub fn validate(&self) -> Result<()> {
        let sum = self.u + self.w1 + self.w2 + self.v;
        if (sum - 1.0).abs() > 1e-10 {
            return Err(domain(format!("populations sum to {sum}")));
        }
        if [self.u, self.w1, self.w2, self.v].iter().any(|&p| p < -1e-10) {
            return Err(domain("negative population"));
        }
        if self.y.norm_sqr() > self.w1 * self.w2 + 1e-10 {
            return Err(domain("coherence exceeds the positivity bound |y|² ≤ w1 w2"));
        }
        Ok(())
    }

    pub fn to_density(&self) -> Result<TwoQubitDensity> {
        let mut m = Matrix4c::zeros();
        m[(0, 0)] = C64::from(self.u);
        m[(1, 1)] = C64::from(self.w1);
        m[(2, 2)] = C64::from(self.w2);
        m[(3, 3)] = C64::from(self.v);
        m[(1, 2)] = self.y;
        m[(2, 1)] = self.y.conj();
        TwoQubitDensity::new(m)
    }
}

/// Trace out the N chain sites of a density matrix on (chain, a, b).
pub fn partial_trace_chain(rho_full: &DMatrix<C64>, chain_sites: usize) -> Result<TwoQubitDensity> {
    let dim = 4usize << chain_sites;
    if rho_full.shape() != (dim, dim) {
        return Err(domain(format!(
            "expected a {dim}x{dim} density matrix for {chain_sites} chain sites, got {:?}",
            rho_full.shape()
        )));
    }
    let mut m = Matrix4c::zeros();
    for c in 0..(1 << chain_sites) {
        let block = rho_full.fixed_view::<4, 4>(4 * c, 4 * c);
        m += block;
    }
    TwoQubitDensity::new(m)
}

/// Reduced probe state of a pure state on (chain, a, b) without forming |ψ⟩⟨ψ|.
pub fn reduced_probe_state(psi: &DVector<C64>, chain_sites: usize) -> Result<TwoQubitDensity> {
    let dim = 4usize << chain_sites;
    if psi.len() != dim {
        return Err(domain(format!("state length {} does not match {chain_sites} chain sites", psi.len())));
    }
    let mut m = Matrix4c::zeros();
    for c in 0..(1 << chain_sites) {
        let amp = psi.fixed_rows::<4>(4 * c);
        m += amp * amp.adjoint();
    }
    TwoQubitDensity::new(m)
}

/// σʸ ⊗ σʸ
fn sigma_yy() -> Matrix4c {
    let mut m = Matrix4c::zeros();
    // σʸ⊗σʸ = antidiag(−1, 1, 1, −1)
    m[(0, 3)] = C64::from(-1.0);
    m[(1, 2)] = C64::from(1.0);
    m[(2, 1)] = C64::from(1.0);
    m[(3, 0)] = C64::from(-1.0);
    m
}

/// Eigenvalues of ρ below this are treated as round-off.
const RANK_FLOOR: f64 = 1e-13;

/// Wootters concurrence from the spin-flipped state ρ̃ = (σʸ⊗σʸ) ρ* (σʸ⊗σʸ).
///
/// The λᵢ (square roots of the eigenvalues of ρρ̃) are computed as the singular
/// values of τ = X† (σʸ⊗σʸ) X*, where ρ = X X† comes from the eigendecomposition
/// of ρ. This avoids square roots of round-off eigenvalues of ρρ̃, which would
/// otherwise cost about eight digits on pure states.
pub fn concurrence_general(rho: &TwoQubitDensity) -> f64 {
    let eig = rho.0.symmetric_eigen();
    let mut x = eig.eigenvectors;
    for (k, &p) in eig.eigenvalues.iter().enumerate() {
        let w = if p > RANK_FLOOR { p.sqrt() } else { 0.0 };
        x.column_mut(k).scale_mut(w);
    }
    let tau = x.adjoint() * sigma_yy() * x.conjugate();
    let mut lambdas: Vec<f64> = tau.singular_values().iter().copied().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

/// C = 2 max(|y| − √(u v), 0)
pub fn concurrence_xstate(x: &XStateElements) -> f64 {
    2.0 * (x.y.norm() - (x.u * x.v).max(0.0).sqrt()).max(0.0)
}

/// Concurrence of the probes over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl ConcurrenceTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(domain("time grid contains non-finite values"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(domain("time grid must be ascending"));
    }
    Ok(())
}

/// Concurrence under exp(−iHt) for each time; X-form states are cross-checked
/// against the closed form.
pub fn concurrence_trace(h: &TwoQubitOperator, psi0: &Vector4<C64>, times: &[f64]) -> Result<ConcurrenceTrace> {
    check_times(times)?;
    let psi0 = DVector::from_column_slice(psi0.as_slice());
    let prop = Propagator::new(&h.to_operator(), &psi0)?;
    let values = times
        .iter()
        .map(|&t| {
            let psi = prop.at(t);
            let rho = TwoQubitDensity::from_state(&Vector4::from_column_slice(psi.as_slice()))?;
            concurrence_checked(&rho)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConcurrenceTrace {
        times: times.to_vec(),
        values,
    })
}

fn concurrence_checked(rho: &TwoQubitDensity) -> Result<f64> {
    let c = concurrence_general(rho);
    if let Some(x) = rho.x_elements() {
        let cx = concurrence_xstate(&x);
        if (c - cx).abs() > X_AGREEMENT_TOL {
            return Err(Error::Inconsistent(format!("Wootters concurrence {c} vs X-state formula {cx}")));
        }
    }
    Ok(c)
}

#[derive(Debug, Clone)]
pub struct FullVsEffective {
    pub full: ConcurrenceTrace,
    pub effective: ConcurrenceTrace,
    pub max_deviation: f64,
}

/// Exact reduced dynamics of |φ₀⟩ ⊗ ψ_ab under the full Hamiltonian against the
/// effective two-qubit model.
pub fn full_vs_effective(
    chain: &ChainSpec,
    coupling: &CouplingSpec,
    psi0_ab: &Vector4<C64>,
    times: &[f64],
) -> Result<FullVsEffective> {
    check_times(times)?;
    let spectrum = chain_spectrum(chain)?;
    let ground = ground_state(&spectrum);
    if ground.degenerate {
        return Err(Error::DegenerateGroundState {
            field: chain.field,
            gap: ground.gap,
        });
    }
    let interaction = build_interaction(chain, coupling)?;
    let heff = effective_hamiltonian(&spectrum, &interaction, false)?.operator;
    let effective = concurrence_trace(&heff, psi0_ab, times)?;

    let h = build_full_hamiltonian(chain, coupling)?;
    let initial = ground.vector.kronecker(&DVector::from_column_slice(psi0_ab.as_slice()));
    let prop = Propagator::new(&h, &initial)?;
    let values = times
        .iter()
        .map(|&t| reduced_probe_state(&prop.at(t), chain.sites).and_then(|rho| concurrence_checked(&rho)))
        .collect::<Result<Vec<_>>>()?;
    let full = ConcurrenceTrace {
        times: times.to_vec(),
        values,
    };
    let max_deviation = full
        .values
        .iter()
        .zip(&effective.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(FullVsEffective {
        full,
        effective,
        max_deviation,
    })
}

/// Computational basis state |ab⟩ of the probes.
pub fn basis_state(a: u8, b: u8) -> Vector4<C64> {
    let mut v = Vector4::from_element(ZERO);
    v[(2 * (a & 1) + (b & 1)) as usize] = C64::from(1.0);
    v
}

/// (|01⟩ + |10⟩)/√2
pub fn bell_0110() -> Vector4<C64> {
    (basis_state(0, 1) + basis_state(1, 0)).unscale(2f64.sqrt())
}

/// (|00⟩ + |11⟩)/√2
pub fn bell_0011() -> Vector4<C64> {
    (basis_state(0, 0) + basis_state(1, 1)).unscale(2f64.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::total_sz;

    fn werner(p: f64) -> TwoQubitDensity {
        let bell = bell_0110();
        TwoQubitDensity::new((bell * bell.adjoint()).scale(p) + Matrix4c::identity().scale((1.0 - p) / 4.0)).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let h = total_sz(2);
        let psi = DVector::from_column_slice(bell_0011().as_slice());
        let out = evolve_state(&h, &psi, 0.0).unwrap();
        assert!((out - psi).norm() < 1e-14);
    }

    #[test]
    fn stationary_phases() {
        let h = OperatorMatrix::from_matrix(DMatrix::from_diagonal(&DVector::from_vec(vec![
            C64::from(0.3),
            C64::from(-1.1),
        ])))
        .unwrap();
        let psi = DVector::from_vec(vec![ZERO, C64::from(1.0)]);
        let out = evolve_state(&h, &psi, 2.0).unwrap();
        assert!((out[1] - C64::from_polar(1.0, 2.2)).norm() < 1e-14);
    }

    #[test]
    fn exchange_form_amplitudes() {
        // e^{−igt} cos 2gt on |01⟩ and −i e^{−igt} sin 2gt on |10⟩
        let g = -0.0753;
        let h = TwoQubitOperator::exchange_form(g).to_operator();
        let psi = DVector::from_column_slice(basis_state(0, 1).as_slice());
        for t in [0.5, 3.0, 17.0] {
            let out = evolve_state(&h, &psi, t).unwrap();
            let phase = C64::from_polar(1.0, -g * t);
            assert!((out[1] - phase * (2.0 * g * t).cos()).norm() < 1e-12);
            assert!((out[2] + C64::i() * phase * (2.0 * g * t).sin()).norm() < 1e-12);
        }
    }

    #[test]
    fn unnormalized_state_rejected() {
        let h = total_sz(1);
        let psi = DVector::from_vec(vec![C64::from(1.0), C64::from(1.0)]);
        assert!(matches!(evolve_state(&h, &psi, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn density_examples() {
        let rho = density_from_state(&DVector::from_column_slice(basis_state(0, 1).as_slice()));
        assert_eq!(rho[(1, 1)], C64::from(1.0));
        assert_eq!(rho.iter().filter(|z| z.norm() > 0.0).count(), 1);
        let rho = density_from_state(&DVector::from_column_slice(bell_0110().as_slice()));
        for (r, c) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            assert!((rho[(r, c)] - C64::from(0.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_examples() {
        // product state
        let chain = DVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        let ab = DVector::from_column_slice(bell_0011().as_slice());
        let full = density_from_state(&chain.kronecker(&ab));
        let red = partial_trace_chain(&full, 1).unwrap();
        let expect = density_from_state(&ab);
        assert!((0..4).all(|r| (0..4).all(|c| (red.matrix()[(r, c)] - expect[(r, c)]).norm() < 1e-15)));

        let mixed = DMatrix::<C64>::identity(16, 16).unscale(16.0);
        let red = partial_trace_chain(&mixed, 2).unwrap();
        assert!((red.matrix() - Matrix4c::identity().unscale(4.0)).norm() < 1e-15);

        assert!(partial_trace_chain(&mixed, 3).is_err());
    }

    #[test]
    fn concurrence_examples() {
        let product = TwoQubitDensity::from_state(&basis_state(0, 1)).unwrap();
        assert!(concurrence_general(&product).abs() < 1e-12);
        let bell = TwoQubitDensity::from_state(&bell_0110()).unwrap();
        assert!((concurrence_general(&bell) - 1.0).abs() < 1e-12);
        assert!((concurrence_general(&werner(0.5)) - 0.25).abs() < 1e-10);
        assert!(concurrence_general(&werner(0.3)).abs() < 1e-10);
    }

    #[test]
    fn xstate_examples() {
        let bell = XStateElements {
            u: 0.0,
            w1: 0.5,
            w2: 0.5,
            v: 0.0,
            y: C64::from(0.5),
        };
        assert_eq!(concurrence_xstate(&bell), 1.0);
        let mixed = XStateElements {
            u: 0.25,
            w1: 0.25,
            w2: 0.25,
            v: 0.25,
            y: ZERO,
        };
        assert_eq!(concurrence_xstate(&mixed), 0.0);
        let g: f64 = -0.07536;
        for t in [0.3, 4.0, 11.0] {
            let y = (C64::from_polar(1.0, 4.0 * g * t) - C64::from_polar(1.0, -4.0 * g * t)) / 4.0;
            let x = XStateElements {
                u: 0.0,
                w1: 0.5 + 0.5 * (4.0 * g * t).cos(),
                w2: 0.5 - 0.5 * (4.0 * g * t).cos(),
                v: 0.0,
                y,
            };
            x.validate().unwrap();
            assert!((concurrence_xstate(&x) - (4.0 * g * t).sin().abs()).abs() < 1e-14);
            let general = concurrence_general(&x.to_density().unwrap());
            assert!((general - concurrence_xstate(&x)).abs() < 1e-10);
        }
    }

    #[test]
    fn invalid_densities() {
        assert!(TwoQubitDensity::new(Matrix4c::identity()).is_err());
        let mut m = Matrix4c::identity().unscale(4.0);
        m[(0, 1)] = C64::from(0.1);
        assert!(TwoQubitDensity::new(m).is_err());
        let m = Matrix4c::from_diagonal(&Vector4::new(1.5, -0.5, 0.0, 0.0).map(C64::from));
        assert!(TwoQubitDensity::new(m).is_err());
    }

    #[test]
    fn trace_with_zero_hamiltonian() {
        let times: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let tr = concurrence_trace(&TwoQubitOperator::zero(), &basis_state(0, 1), &times).unwrap();
        assert!(tr.values.iter().all(|&c| c.abs() < 1e-12));
        let tr = concurrence_trace(&TwoQubitOperator::zero(), &bell_0110(), &times).unwrap();
        assert!(tr.values.iter().all(|&c| (c - 1.0).abs() < 1e-12));
        assert!(concurrence_trace(&TwoQubitOperator::zero(), &bell_0110(), &[1.0, 0.0]).is_err());
    }

    #[test]
    fn full_vs_effective_decoupled() {
        let chain = ChainSpec::new(2, 0.25, 2.0);
        let times: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let out = full_vs_effective(&chain, &CouplingSpec::default().with_strength(0.0), &basis_state(0, 1), &times)
            .unwrap();
        assert!(out.max_deviation < 1e-12);
    }
}
