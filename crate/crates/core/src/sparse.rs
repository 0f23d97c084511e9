//! Compressed-row complex operators between sector bases.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::SectorKey;
use crate::scalar::{cabs, conj, czero, Cplx, Real};
use crate::state::StateVector;

/// Complex sparse matrix mapping amplitudes on `src` to amplitudes on `dst`.
///
/// Assembled from coordinate triplets (duplicates summed, exact zeros dropped)
/// and stored row-compressed.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator<T: Real> {
    src: SectorKey,
    dst: SectorKey,
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Cplx<T>>,
}

impl<T: Real> SparseOperator<T> {
    pub fn from_triplets(
        src: SectorKey,
        dst: SectorKey,
        triplets: impl IntoIterator<Item = (usize, usize, Cplx<T>)>,
    ) -> Self {
        let nrows = dst.dimension();
        let ncols = src.dimension();
        let mut rows: Vec<BTreeMap<usize, Cplx<T>>> = vec![BTreeMap::new(); nrows];
        for (r, c, v) in triplets {
            assert!(
                r < nrows && c < ncols,
                "triplet ({r}, {c}) outside {nrows}x{ncols}"
            );
            *rows[r].entry(c).or_insert_with(czero) += v;
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if v.re != T::zero() || v.im != T::zero() {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseOperator {
            src,
            dst,
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(key: SectorKey) -> Self {
        let n = key.dimension();
        Self::from_triplets(key, key, (0..n).map(|i| (i, i, crate::scalar::cone())))
    }

    pub fn src(&self) -> SectorKey {
        self.src
    }

    pub fn dst(&self) -> SectorKey {
        self.dst
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.src == self.dst
    }

    /// Stored entries as `(row, col, value)`, row-major.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Cplx<T>)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1])
                .map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> Cplx<T> {
        let span = &self.col_idx[self.row_ptr[row]..self.row_ptr[row + 1]];
        match span.binary_search(&col) {
            Ok(k) => self.values[self.row_ptr[row] + k],
            Err(_) => czero(),
        }
    }

    pub fn matvec(&self, x: &[Cplx<T>]) -> Vec<Cplx<T>> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .fold(czero(), |acc, k| acc + self.values[k] * x[self.col_idx[k]])
            })
            .collect()
    }

    /// Applies the operator to a state living on its source sector.
    pub fn apply(&self, state: &StateVector<T>) -> Result<StateVector<T>> {
        if state.sector() != self.src {
            return Err(Error::domain(format!(
                "operator acts on sector {} but state lives in {}",
                self.src,
                state.sector()
            )));
        }
        Ok(StateVector::from_amplitudes(
            self.dst,
            self.matvec(state.amplitudes()),
        ))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.dst,
            self.src,
            self.triplets().map(|(r, c, v)| (c, r, conj(v))),
        )
    }

    pub fn scaled(&self, factor: Cplx<T>) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.src != other.src || self.dst != other.dst {
            return Err(Error::domain("operator sum over different sectors"));
        }
        Ok(Self::from_triplets(
            self.src,
            self.dst,
            self.triplets().chain(other.triplets()),
        ))
    }

    /// `self ∘ rhs`: applies `rhs` first.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if rhs.dst != self.src {
            return Err(Error::domain(format!(
                "cannot compose: inner operator ends in {}, outer starts in {}",
                rhs.dst, self.src
            )));
        }
        let mut triplets = Vec::new();
        for (r, k, a) in self.triplets() {
            for m in rhs.row_ptr[k]..rhs.row_ptr[k + 1] {
                triplets.push((r, rhs.col_idx[m], a * rhs.values[m]));
            }
        }
        Ok(Self::from_triplets(rhs.src, self.dst, triplets))
    }

    pub fn to_dense(&self) -> DMatrix<Cplx<T>> {
        let mut m = DMatrix::from_element(self.nrows, self.ncols, czero());
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// Largest `|A_ij - conj(A_ji)|`; infinite for non-square operators.
    pub fn hermiticity_residual(&self) -> T {
        if !self.is_square() {
            return T::max_value().unwrap_or_else(T::one);
        }
        let mut worst = T::zero();
        for (r, c, v) in self.triplets() {
            let d = cabs(v - conj(self.get(c, r)));
            if d > worst {
                worst = d;
            }
        }
        worst
    }

    pub fn trace(&self) -> Cplx<T> {
        (0..self.nrows.min(self.ncols)).fold(czero(), |acc, i| acc + self.get(i, i))
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, &v| {
            let a = cabs(v);
            if a > m {
                a
            } else {
                m
            }
        })
    }
}
