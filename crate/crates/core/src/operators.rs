//! Dense spin-1/2 operators and the chain / probe Hamiltonians.
//!
//! Basis convention: site 1 is the most significant bit of the basis index,
//! bit value 0 is spin up (σᶻ = +1) and bit value 1 is spin down. The full
//! register is ordered (chain sites 1..N, qubit a, qubit b), so the two probe
//! qubits occupy the two least significant bits.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Largest register (chain + probes) the full Hamiltonian builder accepts.
pub const DEFAULT_MAX_TOTAL_SPINS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// Parameters of the XXZ environment chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub sites: usize,
    /// Exchange coupling J.
    pub exchange: f64,
    /// Anisotropy Δ of the σᶻσᶻ term.
    pub anisotropy: f64,
    /// Magnetic field B along z.
    pub field: f64,
    pub boundary: Boundary,
}

impl ChainSpec {
    /// J = 1, open boundary.
    pub fn new(sites: usize, anisotropy: f64, field: f64) -> Self {
        Self {
            sites,
            exchange: 1.0,
            anisotropy,
            field,
            boundary: Boundary::default(),
        }
    }

    pub fn with_field(&self, field: f64) -> Self {
        Self {
            field,
            ..self.clone()
        }
    }

    pub fn with_boundary(self, boundary: Boundary) -> Self {
        Self { boundary, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(domain(format!("chain needs at least 2 sites, got {}", self.sites)));
        }
        if self.exchange == 0.0 || !self.exchange.is_finite() {
            return Err(domain("exchange coupling J must be finite and nonzero"));
        }
        if !self.anisotropy.is_finite() || !self.field.is_finite() {
            return Err(domain("anisotropy and field must be finite"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    /// Nearest-neighbour bonds as 1-based site pairs.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut bonds: Vec<_> = (1..self.sites).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic && self.sites > 2 {
            bonds.push((self.sites, 1));
        }
        bonds
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Topology {
    /// Both probes couple to every chain site.
    AllSites,
    /// Probe a couples to site 1, probe b to site N.
    EndSites,
    /// 1-based chain sites for each probe.
    Explicit { a: Vec<usize>, b: Vec<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// σ_a·σ_i
    PauliDot,
    /// s_a·s_i with s = σ/2
    SpinHalfDot,
}

impl Convention {
    fn dot_scale(self) -> f64 {
        match self {
            Convention::PauliDot => 1.0,
            Convention::SpinHalfDot => 0.25,
        }
    }
}

/// Probe–chain coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    /// J_p
    pub strength: f64,
    pub topology: Topology,
    pub convention: Convention,
}

impl Default for CouplingSpec {
    fn default() -> Self {
        Self {
            strength: 0.2,
            topology: Topology::AllSites,
            convention: Convention::PauliDot,
        }
    }
}

impl CouplingSpec {
    pub fn new(strength: f64, topology: Topology, convention: Convention) -> Self {
        Self {
            strength,
            topology,
            convention,
        }
    }

    pub fn with_strength(&self, strength: f64) -> Self {
        Self {
            strength,
            ..self.clone()
        }
    }

    /// Chain sites coupled to probe a and probe b.
    pub fn sites(&self, chain_sites: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        let (a, b) = match &self.topology {
            Topology::AllSites => ((1..=chain_sites).collect(), (1..=chain_sites).collect()),
            Topology::EndSites => (vec![1], vec![chain_sites]),
            Topology::Explicit { a, b } => (a.clone(), b.clone()),
        };
        if a.is_empty() || b.is_empty() {
            return Err(domain("each probe must couple to at least one chain site"));
        }
        if let Some(&bad) = a.iter().chain(&b).find(|&&s| s == 0 || s > chain_sites) {
            return Err(domain(format!(
                "coupling site {bad} outside the chain range [1, {chain_sites}]"
            )));
        }
        Ok((a, b))
    }

    pub fn validate(&self, chain_sites: usize) -> Result<()> {
        if !self.strength.is_finite() {
            return Err(domain("coupling strength J_p must be finite"));
        }
        self.sites(chain_sites).map(|_| ())
    }
}

/// Dense complex square matrix acting on a register of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn from_matrix(entries: DMatrix<C64>) -> Result<Self> {
        let (r, c) = entries.shape();
        if r != c || !r.is_power_of_two() {
            return Err(domain(format!("operator must be square with power-of-two size, got {r}x{c}")));
        }
        Ok(Self { entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.entries
    }

    pub fn kron(&self, other: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix {
            entries: self.entries.kronecker(&other.entries),
        }
    }

    /// max |H − H†| over entries.
    pub fn hermiticity_error(&self) -> f64 {
        max_abs_diff(&self.entries, &self.entries.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// max-entry norm of [self, other].
    pub fn commutator_norm(&self, other: &OperatorMatrix) -> f64 {
        let ab = &self.entries * &other.entries;
        let ba = &other.entries * &self.entries;
        max_abs_diff(&ab, &ba)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }
}

impl std::ops::Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix {
            entries: &self.entries + &rhs.entries,
        }
    }
}

impl std::ops::Mul<&OperatorMatrix> for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix {
            entries: &self.entries * &rhs.entries,
        }
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Bit position of a 1-based site in an `n`-site register.
#[inline]
fn shift(site: usize, n: usize) -> usize {
    n - site
}

/// σᶻ eigenvalue (+1 for bit 0, −1 for bit 1) of `site` in basis state `k`.
#[inline]
pub(crate) fn spin_z(k: usize, site: usize, n: usize) -> f64 {
    if (k >> shift(site, n)) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Total σᶻ of basis state `k` in an `n`-site register.
#[inline]
pub fn magnetization_of(k: usize, n: usize) -> i32 {
    n as i32 - 2 * (k.count_ones() as i32)
}

/// Single-site Pauli operator embedded in an `total_sites`-qubit register.
pub fn pauli_on_site(axis: Axis, site: usize, total_sites: usize) -> Result<OperatorMatrix> {
    if total_sites == 0 || site == 0 || site > total_sites {
        return Err(domain(format!("site {site} outside [1, {total_sites}]")));
    }
    let dim = 1usize << total_sites;
    let bit = 1usize << shift(site, total_sites);
    let mut m = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        let up = k & bit == 0;
        match axis {
            Axis::X => m[(k ^ bit, k)] = ONE,
            // σʸ|0⟩ = i|1⟩, σʸ|1⟩ = −i|0⟩
            Axis::Y => m[(k ^ bit, k)] = if up { C64::i() } else { -C64::i() },
            Axis::Z => m[(k, k)] = if up { ONE } else { -ONE },
        }
    }
    Ok(OperatorMatrix { entries: m })
}

/// Σ_α σᵅ_i σᵅ_j over all three axes, times `scale`, added into `m`.
///
/// The xx+yy part is 2(σ⁺σ⁻ + σ⁻σ⁺): it swaps antiparallel spins with
/// amplitude 2 and annihilates parallel ones.
fn add_dot(m: &mut DMatrix<C64>, n: usize, i: usize, j: usize, scale_xy: f64, scale_z: f64) {
    let bi = 1usize << shift(i, n);
    let bj = 1usize << shift(j, n);
    for k in 0..m.nrows() {
        let zz = spin_z(k, i, n) * spin_z(k, j, n);
        m[(k, k)] += C64::from(scale_z * zz);
        if zz < 0.0 {
            m[(k ^ bi ^ bj, k)] += C64::from(2.0 * scale_xy);
        }
    }
}

/// H₀ = J Σ_bonds (σˣσˣ + σʸσʸ + Δ σᶻσᶻ) + B Σᵢ σᶻᵢ
pub fn build_chain_hamiltonian(spec: &ChainSpec) -> Result<OperatorMatrix> {
    spec.validate()?;
    let n = spec.sites;
    let mut m = DMatrix::zeros(spec.dim(), spec.dim());
    for (i, j) in spec.bonds() {
        add_dot(&mut m, n, i, j, spec.exchange, spec.exchange * spec.anisotropy);
    }
    for k in 0..spec.dim() {
        m[(k, k)] += C64::from(spec.field * magnetization_of(k, n) as f64);
    }
    Ok(OperatorMatrix { entries: m })
}

/// H_I on the (chain, a, b) register.
pub fn build_interaction(chain: &ChainSpec, coupling: &CouplingSpec) -> Result<OperatorMatrix> {
    chain.validate()?;
    coupling.validate(chain.sites)?;
    let (sites_a, sites_b) = coupling.sites(chain.sites)?;
    let n = chain.sites + 2;
    let (qa, qb) = (chain.sites + 1, chain.sites + 2);
    let scale = coupling.strength * coupling.convention.dot_scale();
    let mut m = DMatrix::zeros(1 << n, 1 << n);
    if coupling.strength != 0.0 {
        for &i in &sites_a {
            add_dot(&mut m, n, qa, i, scale, scale);
        }
        for &i in &sites_b {
            add_dot(&mut m, n, qb, i, scale, scale);
        }
    }
    Ok(OperatorMatrix { entries: m })
}

pub fn build_full_hamiltonian(chain: &ChainSpec, coupling: &CouplingSpec) -> Result<OperatorMatrix> {
    build_full_hamiltonian_with_limit(chain, coupling, DEFAULT_MAX_TOTAL_SPINS)
}

/// H = H₀ ⊗ I₄ + H_I, refusing registers above `max_spins`.
pub fn build_full_hamiltonian_with_limit(
    chain: &ChainSpec,
    coupling: &CouplingSpec,
    max_spins: usize,
) -> Result<OperatorMatrix> {
    let spins = chain.sites + 2;
    if spins > max_spins {
        return Err(Error::DimensionTooLarge { spins, max: max_spins });
    }
    let h0 = build_chain_hamiltonian(chain)?.kron(&OperatorMatrix::identity(4));
    let hi = build_interaction(chain, coupling)?;
    Ok(&h0 + &hi)
}

/// Σᵢ σᶻᵢ over an `n`-site register.
pub fn total_sz(n: usize) -> OperatorMatrix {
    let dim = 1 << n;
    OperatorMatrix {
        entries: DMatrix::from_fn(dim, dim, |r, c| {
            if r == c {
                C64::from(magnetization_of(r, n) as f64)
            } else {
                ZERO
            }
        }),
    }
}
