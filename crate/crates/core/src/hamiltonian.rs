//! Hubbard ring Hamiltonian in site and momentum representations.
//!
//! The hopping matrix is translation invariant: `t_ij` depends only on the
//! ring distance `min(|i-j|, V-|i-j|)`, with `t0` on the diagonal, `t1` at
//! distance one and `t2` at distance two. On the four-site ring the
//! distance-two pair is a single bond, so its element is `t2`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{build_operator, orbital, Ladder, SectorBasis, Spin, Term, MAX_SITES};
use crate::reference_values as refv;
use crate::scalar::{cis, from_usize, real, to_f64, Cplx, Real};
use crate::sparse::SparseOperator;

/// Model parameters, all energies in Hartree.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HubbardParams<T> {
    pub u: T,
    pub t0: T,
    pub t1: T,
    pub t2: T,
    pub sites: usize,
}

impl<T: Real> Default for HubbardParams<T> {
    /// The fitted four-site hydrogen-ring parameters.
    fn default() -> Self {
        HubbardParams {
            u: real(refv::U),
            t0: real(refv::T0),
            t1: real(refv::T1),
            t2: real(refv::T2),
            sites: 4,
        }
    }
}

impl<T: Real> HubbardParams<T> {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.u, self.t0, self.t1, self.t2]
            .iter()
            .all(|x| to_f64(*x).is_finite());
        if !finite {
            return Err(Error::domain("Hubbard parameters must be finite"));
        }
        if self.sites < 2 || self.sites > MAX_SITES {
            return Err(Error::domain(format!(
                "site count {} outside 2..={MAX_SITES}",
                self.sites
            )));
        }
        Ok(())
    }

    pub fn with_u(mut self, u: T) -> Self {
        self.u = u;
        self
    }

    /// Hopping amplitude between two sites a ring distance `d` apart.
    pub fn hopping(&self, d: usize) -> T {
        match d {
            0 => self.t0,
            1 => self.t1,
            2 => self.t2,
            _ => T::zero(),
        }
    }

    pub fn ring_distance(&self, i: usize, j: usize) -> usize {
        let d = i.abs_diff(j) % self.sites;
        d.min(self.sites - d)
    }

    /// Converts the parameter set to `f64` (used as a cache/report key).
    pub fn to_f64(&self) -> HubbardParams<f64> {
        HubbardParams {
            u: to_f64(self.u),
            t0: to_f64(self.t0),
            t1: to_f64(self.t1),
            t2: to_f64(self.t2),
            sites: self.sites,
        }
    }
}

/// Crystal momentum `2πn/V` of label `n`.
pub fn momentum_value<T: Real>(label: usize, sites: usize) -> T {
    T::two_pi() * from_usize(label) / from_usize(sites)
}

/// Real symmetric `V×V` hopping matrix `t_ij`.
pub fn single_particle_matrix<T: Real>(params: &HubbardParams<T>) -> DMatrix<T> {
    let v = params.sites;
    DMatrix::from_fn(v, v, |i, j| params.hopping(params.ring_distance(i, j)))
}

/// Single-particle energies indexed by momentum label.
#[derive(Clone, Debug, PartialEq)]
pub struct Bandstructure<T> {
    pub energies: Vec<T>,
}

impl<T: Real> Bandstructure<T> {
    pub fn energy(&self, label: usize) -> T {
        self.energies[label]
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Noninteracting ground energy: fill the lowest `n_up` and `n_down` levels.
    pub fn filled_energy(&self, n_up: usize, n_down: usize) -> T {
        let mut sorted = self.energies.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite band energies"));
        let sum = |n: usize| sorted.iter().take(n).fold(T::zero(), |a, &e| a + e);
        sum(n_up) + sum(n_down)
    }
}

/// `ε_n = Σ_d t_{0d} e^{i 2π n d / V}` from row zero of the hopping matrix.
pub fn bandstructure<T: Real>(params: &HubbardParams<T>) -> Result<Bandstructure<T>> {
    params.validate()?;
    let v = params.sites;
    let t = single_particle_matrix(params);
    let scale: f64 = t.iter().map(|x| to_f64(*x).abs()).sum();
    let tolerance = 1e-10f64.max(100.0 * to_f64(T::default_epsilon()) * scale);
    let mut energies = Vec::with_capacity(v);
    for n in 0..v {
        let k: T = momentum_value(n, v);
        let e = (0..v).fold(Cplx::new(T::zero(), T::zero()), |acc, d| {
            acc + cis(k * from_usize(d)) * t[(0, d)]
        });
        if to_f64(e.im).abs() > tolerance {
            return Err(Error::numerical(format!(
                "band energy for label {n} has imaginary part {:e}",
                e.im
            )));
        }
        energies.push(e.re);
    }
    Ok(Bandstructure { energies })
}

/// Second-quantized terms of the momentum-space Hamiltonian, in the order
/// one-body terms first, then the `V³` interaction strings
/// `ĉ†_{k↑} ĉ_{k'↑} ĉ†_{q↓} ĉ_{k-k'+q ↓}`.
pub fn momentum_terms<T: Real>(params: &HubbardParams<T>) -> Result<Vec<Term<T>>> {
    let band = bandstructure(params)?;
    let v = params.sites;
    let up = |n| orbital(Spin::Up, n, v);
    let dn = |n| orbital(Spin::Down, n, v);
    let mut terms = Vec::with_capacity(2 * v + v * v * v);
    for n in 0..v {
        for p in [up(n), dn(n)] {
            terms.push(Term::real(
                band.energy(n),
                vec![Ladder::create(p), Ladder::annihilate(p)],
            ));
        }
    }
    let g = params.u / from_usize(v);
    for k in 0..v {
        for kp in 0..v {
            for q in 0..v {
                let last = (k + q + v - kp) % v;
                terms.push(Term::real(
                    g,
                    vec![
                        Ladder::create(up(k)),
                        Ladder::annihilate(up(kp)),
                        Ladder::create(dn(q)),
                        Ladder::annihilate(dn(last)),
                    ],
                ));
            }
        }
    }
    Ok(terms)
}

/// Terms of the site-space Hamiltonian `Σ t_ij ĉ†_iσ ĉ_jσ + U Σ n_i↑ n_i↓`.
pub fn real_space_terms<T: Real>(params: &HubbardParams<T>) -> Result<Vec<Term<T>>> {
    params.validate()?;
    let v = params.sites;
    let t = single_particle_matrix(params);
    let mut terms = Vec::new();
    for spin in [Spin::Up, Spin::Down] {
        for i in 0..v {
            for j in 0..v {
                if t[(i, j)] != T::zero() {
                    terms.push(Term::real(
                        t[(i, j)],
                        vec![
                            Ladder::create(orbital(spin, i, v)),
                            Ladder::annihilate(orbital(spin, j, v)),
                        ],
                    ));
                }
            }
        }
    }
    for i in 0..v {
        let (a, b) = (orbital(Spin::Up, i, v), orbital(Spin::Down, i, v));
        terms.push(Term::real(
            params.u,
            vec![
                Ladder::create(a),
                Ladder::annihilate(a),
                Ladder::create(b),
                Ladder::annihilate(b),
            ],
        ));
    }
    Ok(terms)
}

fn check_sites<T: Real>(params: &HubbardParams<T>, sector: &SectorBasis) -> Result<()> {
    if sector.sites() != params.sites {
        return Err(Error::domain(format!(
            "sector has {} sites but the model has {}",
            sector.sites(),
            params.sites
        )));
    }
    Ok(())
}

/// Momentum-space Hamiltonian restricted to one sector.
pub fn build_momentum_hamiltonian<T: Real>(
    params: &HubbardParams<T>,
    sector: &SectorBasis,
) -> Result<SparseOperator<T>> {
    check_sites(params, sector)?;
    build_operator(&momentum_terms(params)?, sector)
}

/// Site-space Hamiltonian restricted to one sector (orbitals labelled by site).
pub fn build_real_space_hamiltonian<T: Real>(
    params: &HubbardParams<T>,
    sector: &SectorBasis,
) -> Result<SparseOperator<T>> {
    check_sites(params, sector)?;
    build_operator(&real_space_terms(params)?, sector)
}
