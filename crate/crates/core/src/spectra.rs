//! Hermitian eigendecomposition, ground states and ground-state level crossings.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::operators::{build_chain_hamiltonian, magnetization_of, ChainSpec, OperatorMatrix, C64, ZERO};

/// Absolute gap (J = 1 units) below which two levels count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

const HERMITIAN_INPUT_TOL: f64 = 1e-10;
const PHASE_PIVOT_TOL: f64 = 1e-10;

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
    /// Total σᶻ of each eigenvector, when known from a sector decomposition.
    magnetization: Option<Vec<i32>>,
    pub degeneracy_tol: f64,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, j: usize) -> DVector<C64> {
        self.eigenvectors.column(j).into_owned()
    }

    pub fn magnetization(&self, j: usize) -> Option<i32> {
        self.magnetization.as_ref().map(|m| m[j])
    }

    /// E₁ − E₀, or infinity for a one-level spectrum.
    pub fn ground_gap(&self) -> f64 {
        match self.eigenvalues.as_slice() {
            [e0, e1, ..] => e1 - e0,
            _ => f64::INFINITY,
        }
    }

    /// V diag(λ) V†
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(l);
        }
        scaled * v.adjoint()
    }
}

/// Full eigendecomposition of a Hermitian operator.
///
/// Columns are sorted by ascending eigenvalue and each is phase-fixed so that
/// its first non-negligible component is real and positive.
pub fn eig_hermitian(h: &OperatorMatrix) -> Result<Spectrum> {
    let err = h.hermiticity_error();
    let scale = h.max_abs().max(1.0);
    if err > HERMITIAN_INPUT_TOL * scale {
        return Err(domain(format!("matrix is not Hermitian (max |H - H†| = {err:e})")));
    }
    // symmetrize away round-off so the solver sees an exactly Hermitian input
    let m = h.matrix();
    let sym = (m + m.adjoint()).scale(0.5);
    let (values, vectors) = hermitian_eig_raw(sym)?;
    Ok(sorted_spectrum(values, vectors, None))
}

fn hermitian_eig_raw(m: DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let n = m.nrows();
    if n == 1 {
        return Ok((vec![m[(0, 0)].re], DMatrix::from_element(1, 1, C64::new(1.0, 0.0))));
    }
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 10_000 * n)
        .ok_or_else(|| Error::Inconsistent("Hermitian eigensolver did not converge".into()))?;
    Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
}

fn sorted_spectrum(values: Vec<f64>, vectors: DMatrix<C64>, magnetization: Option<Vec<i32>>) -> Spectrum {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    let n = vectors.nrows();
    let mut sorted = DMatrix::zeros(n, order.len());
    for (dst, &src) in order.iter().enumerate() {
        let mut col = vectors.column(src).into_owned();
        fix_phase(&mut col);
        sorted.set_column(dst, &col);
    }
    Spectrum {
        eigenvalues: order.iter().map(|&i| values[i]).collect(),
        eigenvectors: sorted,
        magnetization: magnetization.map(|m| order.iter().map(|&i| m[i]).collect()),
        degeneracy_tol: DEGENERACY_TOL,
    }
}

fn fix_phase(v: &mut DVector<C64>) {
    if let Some(pivot) = v.iter().find(|z| z.norm() > PHASE_PIVOT_TOL).copied() {
        let phase = pivot.conj() / pivot.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub vector: DVector<C64>,
    pub degenerate: bool,
    pub gap: f64,
}

pub fn ground_state(s: &Spectrum) -> GroundState {
    let gap = s.ground_gap();
    GroundState {
        energy: s.eigenvalues[0],
        vector: s.vector(0),
        degenerate: gap < s.degeneracy_tol,
        gap,
    }
}

#[derive(Debug, Clone)]
struct Sector {
    magnetization: i32,
    basis: Vec<usize>,
    /// Field-free block energies, ascending.
    energies: Vec<f64>,
    vectors: DMatrix<C64>,
}

/// Field-free chain spectrum resolved by total magnetization.
///
/// H₀ commutes with Σσᶻ and the field term is B·M inside the sector of
/// magnetization M, so one decomposition yields the spectrum at every B.
#[derive(Debug, Clone)]
pub struct ChainSectors {
    template: ChainSpec,
    sectors: Vec<Sector>,
}

impl ChainSectors {
    pub fn new(template: &ChainSpec) -> Result<Self> {
        let h = build_chain_hamiltonian(&template.with_field(0.0))?;
        let n = template.sites;
        let mut sectors = Vec::new();
        for m in (-(n as i32)..=n as i32).rev().step_by(2) {
            let basis: Vec<usize> = (0..template.dim()).filter(|&k| magnetization_of(k, n) == m).collect();
            let block = DMatrix::from_fn(basis.len(), basis.len(), |r, c| h.matrix()[(basis[r], basis[c])]);
            let (values, vectors) = hermitian_eig_raw(block)?;
            let local = sorted_spectrum(values, vectors, None);
            sectors.push(Sector {
                magnetization: m,
                basis,
                energies: local.eigenvalues,
                vectors: local.eigenvectors,
            });
        }
        Ok(Self {
            template: template.clone(),
            sectors,
        })
    }

    pub fn template(&self) -> &ChainSpec {
        &self.template
    }

    /// Magnetization labels in the order sectors are stored (descending).
    pub fn magnetizations(&self) -> Vec<i32> {
        self.sectors.iter().map(|s| s.magnetization).collect()
    }

    /// Lowest field-free energy of each sector.
    pub fn sector_minima(&self) -> Vec<(i32, f64)> {
        self.sectors.iter().map(|s| (s.magnetization, s.energies[0])).collect()
    }

    /// Full spectrum of H₀ at the given field.
    pub fn spectrum_at(&self, field: f64) -> Spectrum {
        let dim = self.template.dim();
        let mut values = Vec::with_capacity(dim);
        let mut labels = Vec::with_capacity(dim);
        let mut vectors = DMatrix::from_element(dim, dim, ZERO);
        let mut col = 0;
        for s in &self.sectors {
            for (j, e) in s.energies.iter().enumerate() {
                values.push(e + field * s.magnetization as f64);
                labels.push(s.magnetization);
                for (r, &k) in s.basis.iter().enumerate() {
                    vectors[(k, col)] = s.vectors[(r, j)];
                }
                col += 1;
            }
        }
        sorted_spectrum(values, vectors, Some(labels))
    }

    /// Magnetization and energy of the lowest level at `field`.
    ///
    /// Exact ties resolve to the sector stored first (largest M).
    pub fn ground_sector_at(&self, field: f64) -> (i32, f64) {
        self.sectors
            .iter()
            .map(|s| (s.magnetization, s.energies[0] + field * s.magnetization as f64))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
    }

    pub fn level_crossings(&self, range: (f64, f64), search: &CrossingSearch) -> Result<Vec<Crossing>> {
        let (lo, hi) = range;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(domain(format!("field range ({lo}, {hi}) must be ordered and finite")));
        }
        if !(search.grid_step > 0.0) || !(search.bracket_tol > 0.0) {
            return Err(domain("grid step and bracket tolerance must be positive"));
        }
        let steps = ((hi - lo) / search.grid_step).ceil() as usize;
        let grid: Vec<f64> = (0..=steps).map(|i| (lo + i as f64 * search.grid_step).min(hi)).collect();
        let mut crossings = Vec::new();
        let mut prev = (grid[0], self.ground_sector_at(grid[0]).0);
        for &b in &grid[1..] {
            let cur = (b, self.ground_sector_at(b).0);
            if cur.1 != prev.1 {
                self.resolve(prev, cur, search, 0, &mut crossings)?;
            }
            prev = cur;
        }
        Ok(crossings)
    }

    fn resolve(
        &self,
        (mut lo, below): (f64, i32),
        (mut hi, above): (f64, i32),
        search: &CrossingSearch,
        depth: usize,
        out: &mut Vec<Crossing>,
    ) -> Result<()> {
        if (below - above).abs() > 2 {
            // possibly several crossings packed into one interval
            if depth >= search.max_depth || hi - lo <= search.bracket_tol {
                return Err(Error::AmbiguousCrossing { lo, hi });
            }
            let step = (hi - lo) / 10.0;
            let mut prev = (lo, below);
            for i in 1..=10 {
                let b = if i == 10 { hi } else { lo + i as f64 * step };
                let cur = (b, if i == 10 { above } else { self.ground_sector_at(b).0 });
                if cur.1 != prev.1 {
                    self.resolve(prev, cur, search, depth + 1, out)?;
                }
                prev = cur;
            }
            return Ok(());
        }
        while hi - lo > search.bracket_tol {
            let mid = 0.5 * (lo + hi);
            match self.ground_sector_at(mid).0 {
                m if m == below => lo = mid,
                m if m == above => hi = mid,
                _ => return Err(Error::AmbiguousCrossing { lo, hi }),
            }
        }
        out.push(Crossing {
            field: 0.5 * (lo + hi),
            sector_below: below,
            sector_above: above,
        });
        Ok(())
    }
}

/// Chain spectrum at `spec.field`, with magnetization labels.
pub fn chain_spectrum(spec: &ChainSpec) -> Result<Spectrum> {
    Ok(ChainSectors::new(spec)?.spectrum_at(spec.field))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingSearch {
    pub grid_step: f64,
    pub bracket_tol: f64,
    /// How many times a grid interval may be subdivided to split crossings.
    pub max_depth: usize,
}

impl Default for CrossingSearch {
    fn default() -> Self {
        Self {
            grid_step: 0.01,
            bracket_tol: 1e-6,
            max_depth: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub field: f64,
    pub sector_below: i32,
    pub sector_above: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalFieldScan {
    pub template: ChainSpec,
    pub range: (f64, f64),
    pub crossings: Vec<Crossing>,
    pub bracket_tol: f64,
}

impl CriticalFieldScan {
    pub fn fields(&self) -> Vec<f64> {
        self.crossings.iter().map(|c| c.field).collect()
    }
}

/// Every field in `range` where the ground state changes magnetization sector.
pub fn find_level_crossings(template: &ChainSpec, range: (f64, f64), bracket_tol: f64) -> Result<CriticalFieldScan> {
    let search = CrossingSearch {
        bracket_tol,
        ..CrossingSearch::default()
    };
    find_level_crossings_with(template, range, &search)
}

pub fn find_level_crossings_with(
    template: &ChainSpec,
    range: (f64, f64),
    search: &CrossingSearch,
) -> Result<CriticalFieldScan> {
    let sectors = ChainSectors::new(template)?;
    let crossings = sectors.level_crossings(range, search)?;
    Ok(CriticalFieldScan {
        template: template.clone(),
        range,
        crossings,
        bracket_tol: search.bracket_tol,
    })
}
