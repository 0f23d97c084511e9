//! Dense Hermitian diagonalization of sector Hamiltonians and ground-state
//! extraction.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::fock::{SectorBasis, SectorKey};
use crate::hamiltonian::{bandstructure, build_momentum_hamiltonian, Bandstructure, HubbardParams};
use crate::reference_values::DETERMINANTS;
use crate::scalar::{cabs, cabs2, czero, real, Cplx, Real};
use crate::sparse::SparseOperator;
use crate::state::StateVector;

/// Ground levels closer than this (Hartree) are reported as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;
/// Largest tolerated `|H_ij - conj(H_ji)|` before diagonalizing.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;

/// Ascending eigenvalues with orthonormal eigenvectors stored as columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition<T: Real> {
    pub sector: SectorKey,
    pub eigenvalues: Vec<T>,
    pub eigenvectors: DMatrix<Cplx<T>>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, i: usize) -> StateVector<T> {
        StateVector::from_amplitudes(
            self.sector,
            self.eigenvectors.column(i).iter().copied().collect(),
        )
    }

    pub fn ground_energy(&self) -> T {
        self.eigenvalues[0]
    }

    /// `E_1 - E_0`, or `None` for a one-dimensional sector.
    pub fn gap(&self) -> Option<T> {
        (self.dim() > 1).then(|| self.eigenvalues[1] - self.eigenvalues[0])
    }

    /// Expansion coefficients `⟨v_m|ψ⟩` of a state in the eigenbasis.
    pub fn coefficients(&self, state: &StateVector<T>) -> Result<Vec<Cplx<T>>> {
        if state.sector() != self.sector {
            return Err(Error::domain(format!(
                "state in sector {} but decomposition is for {}",
                state.sector(),
                self.sector
            )));
        }
        let amps = state.amplitudes();
        Ok((0..self.dim())
            .map(|m| {
                self.eigenvectors
                    .column(m)
                    .iter()
                    .zip(amps)
                    .fold(czero(), |acc, (v, &a)| acc + v.conj() * a)
            })
            .collect())
    }

    /// Rebuilds a state from eigenbasis coefficients.
    pub fn synthesize(&self, coeffs: &[Cplx<T>]) -> StateVector<T> {
        let n = self.dim();
        let mut amps = vec![czero(); n];
        for (m, &c) in coeffs.iter().enumerate() {
            if c == czero() {
                continue;
            }
            for (i, a) in amps.iter_mut().enumerate() {
                *a += self.eigenvectors[(i, m)] * c;
            }
        }
        StateVector::from_amplitudes(self.sector, amps)
    }

    /// `Σ λ_i v_i v_i†`.
    pub fn reconstruct(&self) -> DMatrix<Cplx<T>> {
        let v = &self.eigenvectors;
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            v[(i, j)] * Cplx::new(self.eigenvalues[j], T::zero())
        });
        &scaled * v.adjoint()
    }

    /// Largest `‖H v − λ v‖` over all pairs.
    pub fn max_residual(&self, h: &SparseOperator<T>) -> T {
        (0..self.dim())
            .map(|m| {
                let v: Vec<Cplx<T>> = self.eigenvectors.column(m).iter().copied().collect();
                let hv = h.matvec(&v);
                let lam = Cplx::new(self.eigenvalues[m], T::zero());
                hv.iter()
                    .zip(&v)
                    .fold(T::zero(), |acc, (&a, &b)| acc + cabs2(a - lam * b))
                    .sqrt()
            })
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Largest entry of `|V†V − 1|`.
    pub fn orthonormality_error(&self) -> T {
        let g = self.eigenvectors.adjoint() * &self.eigenvectors;
        let mut worst = T::zero();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let target = if i == j { T::one() } else { T::zero() };
                let d = cabs(g[(i, j)] - Cplx::new(target, T::zero()));
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }
}

/// Diagonalizes a dense Hermitian matrix, eigenvalues ascending.
pub fn diagonalize_dense<T: Real>(sector: SectorKey, m: DMatrix<Cplx<T>>) -> EigenDecomposition<T> {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("finite eigenvalues")
    });
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    EigenDecomposition {
        sector,
        eigenvalues,
        eigenvectors,
    }
}

/// Full eigendecomposition of a Hermitian sector operator.
pub fn diagonalize<T: Real>(h: &SparseOperator<T>) -> Result<EigenDecomposition<T>> {
    if !h.is_square() {
        return Err(Error::domain("diagonalize needs a square operator"));
    }
    let asym = h.hermiticity_residual();
    if asym > real(HERMITICITY_TOLERANCE) {
        return Err(Error::domain(format!(
            "operator is not Hermitian (residual {asym:e})"
        )));
    }
    Ok(diagonalize_dense(h.src(), h.to_dense()))
}

/// Everything known about one sector of a model: basis, Hamiltonian and spectrum.
#[derive(Debug)]
pub struct SectorSystem<T: Real> {
    pub basis: SectorBasis,
    pub hamiltonian: SparseOperator<T>,
    pub eigen: EigenDecomposition<T>,
}

/// A parameter set together with a per-run store of sector decompositions.
///
/// Sectors are built lazily. The store is filled by idempotent insert: a
/// sector computed concurrently by two callers keeps the first result.
#[derive(Debug)]
pub struct HubbardModel<T: Real> {
    params: HubbardParams<T>,
    band: Bandstructure<T>,
    cache: Mutex<HashMap<SectorKey, Arc<SectorSystem<T>>>>,
}

impl<T: Real> HubbardModel<T> {
    pub fn new(params: HubbardParams<T>) -> Result<Self> {
        let band = bandstructure(&params)?;
        Ok(HubbardModel {
            params,
            band,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn params(&self) -> &HubbardParams<T> {
        &self.params
    }

    pub fn band(&self) -> &Bandstructure<T> {
        &self.band
    }

    pub fn sites(&self) -> usize {
        self.params.sites
    }

    pub fn key(&self, n_up: usize, n_down: usize) -> SectorKey {
        SectorKey::new(self.params.sites, n_up, n_down)
    }

    pub fn sector(&self, key: SectorKey) -> Result<Arc<SectorSystem<T>>> {
        if key.sites != self.params.sites {
            return Err(Error::domain(format!(
                "sector {key} has {} sites, model has {}",
                key.sites, self.params.sites
            )));
        }
        if let Some(s) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(s));
        }
        let basis = SectorBasis::new(key)?;
        let hamiltonian = build_momentum_hamiltonian(&self.params, &basis)?;
        let eigen = diagonalize(&hamiltonian)?;
        let built = Arc::new(SectorSystem {
            basis,
            hamiltonian,
            eigen,
        });
        let mut cache = self.cache.lock().expect("cache lock");
        Ok(Arc::clone(cache.entry(key).or_insert(built)))
    }

    /// Number of sectors currently stored.
    pub fn cached_sectors(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }

    pub fn ground_state(&self, key: SectorKey) -> Result<GroundStateReport<T>> {
        let sys = self.sector(key)?;
        Ok(GroundStateReport::from_system(&sys))
    }
}

/// Amplitude of a ground state on one of the ten tabulated determinants.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedCoefficient<T> {
    pub label: String,
    pub index: usize,
    pub value: Cplx<T>,
}

#[derive(Clone, Debug)]
pub struct GroundStateReport<T: Real> {
    pub energy: T,
    pub state: StateVector<T>,
    /// Empty unless the sector is the half-filled four-site (2,2) sector.
    pub named_coefficients: Vec<NamedCoefficient<T>>,
    pub degenerate: bool,
    pub gap: Option<T>,
}

/// Basis index used to fix the global phase: the lowest-label filling when it
/// carries weight, otherwise the dominant amplitude.
fn phase_anchor<T: Real>(basis: &SectorBasis, state: &StateVector<T>) -> usize {
    let k = basis.key();
    let up: Vec<usize> = (0..k.n_up).collect();
    let down: Vec<usize> = (0..k.n_down).collect();
    match basis.index_of_labels(&up, &down) {
        Some(i) if cabs(state.amplitude(i)) > real(1e-8) => i,
        _ => state.dominant_index(),
    }
}

/// Amplitudes of `state` on the tabulated determinants, when they exist in its sector.
pub fn named_coefficients<T: Real>(
    basis: &SectorBasis,
    state: &StateVector<T>,
) -> Vec<NamedCoefficient<T>> {
    let k = basis.key();
    if k.sites != 4 || k.n_up != 2 || k.n_down != 2 {
        return Vec::new();
    }
    DETERMINANTS
        .iter()
        .map(|d| {
            let index = basis
                .index_of_labels(&d.up, &d.down)
                .expect("determinant in (2,2) sector");
            NamedCoefficient {
                label: d.label(),
                index,
                value: state.amplitude(index),
            }
        })
        .collect()
}

impl<T: Real> GroundStateReport<T> {
    pub fn from_system(sys: &SectorSystem<T>) -> Self {
        let raw = sys.eigen.eigenvector(0);
        let state = raw.phase_fixed_at(phase_anchor(&sys.basis, &raw));
        let gap = sys.eigen.gap();
        let degenerate = gap.is_some_and(|g| g < real(DEGENERACY_TOLERANCE));
        GroundStateReport {
            energy: sys.eigen.ground_energy(),
            named_coefficients: named_coefficients(&sys.basis, &state),
            state,
            degenerate,
            gap,
        }
    }

    pub fn coefficient(&self, label: &str) -> Option<Cplx<T>> {
        self.named_coefficients
            .iter()
            .find(|c| c.label == label)
            .map(|c| c.value)
    }
}

/// Phase-fixed ground state of the momentum Hamiltonian in one sector.
pub fn ground_state<T: Real>(
    params: &HubbardParams<T>,
    sector: SectorKey,
) -> Result<GroundStateReport<T>> {
    HubbardModel::new(*params)?.ground_state(sector)
}

/// `⟨a|b⟩`.
pub fn overlap<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<Cplx<T>> {
    a.inner(b)
}
