//! Complex amplitude vectors over a sector basis.

use crate::error::{Error, Result};
use crate::fock::SectorKey;
use crate::scalar::{cabs, cabs2, cone, conj, czero, Cplx, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    sector: SectorKey,
    amps: Vec<Cplx<T>>,
}

impl<T: Real> StateVector<T> {
    pub fn zeros(sector: SectorKey) -> Self {
        StateVector {
            sector,
            amps: vec![czero(); sector.dimension()],
        }
    }

    /// Unit amplitude on basis index `index`.
    pub fn basis(sector: SectorKey, index: usize) -> Self {
        let mut s = Self::zeros(sector);
        s.amps[index] = cone();
        s
    }

    pub fn from_amplitudes(sector: SectorKey, amps: Vec<Cplx<T>>) -> Self {
        assert_eq!(
            amps.len(),
            sector.dimension(),
            "amplitude count must match sector {sector}"
        );
        StateVector { sector, amps }
    }

    pub fn sector(&self) -> SectorKey {
        self.sector
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Cplx<T>] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Cplx<T> {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, &a| acc + cabs2(a))
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == T::zero() {
            return Err(Error::domain("cannot normalize the zero vector"));
        }
        Ok(self.scaled(Cplx::new(T::one() / n, T::zero())))
    }

    pub fn scaled(&self, factor: Cplx<T>) -> Self {
        StateVector {
            sector: self.sector,
            amps: self.amps.iter().map(|&a| a * factor).collect(),
        }
    }

    /// `⟨self|other⟩`, conjugating `self`.
    pub fn inner(&self, other: &Self) -> Result<Cplx<T>> {
        if self.sector != other.sector {
            return Err(Error::domain(format!(
                "overlap between sectors {} and {}",
                self.sector, other.sector
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(czero(), |acc, (&a, &b)| acc + conj(a) * b))
    }

    /// Multiplies by a global phase so the amplitude at `index` is real and
    /// non-negative. Leaves the state untouched when that amplitude vanishes.
    pub fn phase_fixed_at(&self, index: usize) -> Self {
        let a = self.amps[index];
        let m = cabs(a);
        if m == T::zero() {
            return self.clone();
        }
        self.scaled(Cplx::new(a.re / m, -a.im / m))
    }

    /// Index of the largest-magnitude amplitude (first on ties).
    pub fn dominant_index(&self) -> usize {
        let mut best = 0;
        let mut best_mag = T::zero();
        for (i, &a) in self.amps.iter().enumerate() {
            let m = cabs2(a);
            if m > best_mag {
                best = i;
                best_mag = m;
            }
        }
        best
    }

    pub fn distance(&self, other: &Self) -> T {
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(T::zero(), |acc, (&a, &b)| acc + cabs2(a - b))
            .sqrt()
    }
}
