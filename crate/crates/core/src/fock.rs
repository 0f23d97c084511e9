//! Occupation-number basis and exact fermionic operator application.
//!
//! Spin-orbital `p` of a `V`-site system lives at bit `p` of a [`FockState`].
//! Orbitals `0..V` are spin-up, `V..2V` spin-down; within each block the
//! label is either a momentum index `n` (k = 2πn/V) or a site index,
//! depending on which Hamiltonian the basis is used with.
//!
//! A determinant is the product of creation operators in ascending orbital
//! order acting on the vacuum. With that convention `ĉ†_p` picks up
//! `(-1)^(number of occupied orbitals below p)`, and so does `ĉ_p`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};
use crate::sparse::SparseOperator;

/// Largest supported ring; keeps a determinant inside a `u32`.
pub const MAX_SITES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Spin::Up => "up",
            Spin::Down => "dn",
        }
    }
}

/// Spin-orbital index of `label` with spin `spin` on a `sites`-site ring.
#[inline]
pub fn orbital(spin: Spin, label: usize, sites: usize) -> usize {
    match spin {
        Spin::Up => label,
        Spin::Down => label + sites,
    }
}

/// Splits a spin-orbital index back into (spin, label).
#[inline]
pub fn split_orbital(orbital: usize, sites: usize) -> (Spin, usize) {
    if orbital < sites {
        (Spin::Up, orbital)
    } else {
        (Spin::Down, orbital - sites)
    }
}

/// One Slater determinant, bit `p` set when spin-orbital `p` is occupied.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState(pub u32);

impl FockState {
    pub const VACUUM: FockState = FockState(0);

    /// Determinant with the listed up and down labels occupied.
    pub fn from_labels(up: &[usize], down: &[usize], sites: usize) -> FockState {
        let mut bits = 0u32;
        for &n in up {
            bits |= 1 << orbital(Spin::Up, n, sites);
        }
        for &n in down {
            bits |= 1 << orbital(Spin::Down, n, sites);
        }
        FockState(bits)
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_occupied(self, orbital: usize) -> bool {
        self.0 >> orbital & 1 == 1
    }

    #[inline]
    pub fn up_bits(self, sites: usize) -> u32 {
        self.0 & ((1u32 << sites) - 1)
    }

    #[inline]
    pub fn down_bits(self, sites: usize) -> u32 {
        self.0 >> sites
    }

    pub fn n_up(self, sites: usize) -> usize {
        self.up_bits(sites).count_ones() as usize
    }

    pub fn n_down(self, sites: usize) -> usize {
        self.down_bits(sites).count_ones() as usize
    }

    /// Occupied spin-orbitals in ascending order.
    pub fn orbitals(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let p = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(p)
            }
        })
    }

    /// Sum of occupied labels (both spins) modulo `sites`.
    pub fn total_momentum(self, sites: usize) -> usize {
        self.orbitals().map(|p| p % sites).sum::<usize>() % sites
    }

    /// `+1` or `-1`: parity of the occupied orbitals strictly below `orbital`.
    #[inline]
    pub fn sign_below(self, orbital: usize) -> i8 {
        let mask = (1u32 << orbital) - 1;
        if (self.0 & mask).count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// `ĉ†_p |self⟩`, or `None` when `p` is already occupied.
    #[inline]
    pub fn create(self, orbital: usize) -> Option<(FockState, i8)> {
        if self.is_occupied(orbital) {
            None
        } else {
            Some((FockState(self.0 | 1 << orbital), self.sign_below(orbital)))
        }
    }

    /// `ĉ_p |self⟩`, or `None` when `p` is empty.
    #[inline]
    pub fn annihilate(self, orbital: usize) -> Option<(FockState, i8)> {
        if self.is_occupied(orbital) {
            Some((
                FockState(self.0 & !(1 << orbital)),
                self.sign_below(orbital),
            ))
        } else {
            None
        }
    }

    /// Applies an operator string right to left, tracking the fermionic sign.
    pub fn apply_string(self, ops: &[Ladder]) -> Option<(FockState, i8)> {
        let mut state = self;
        let mut sign = 1i8;
        for op in ops.iter().rev() {
            let (next, s) = match op.kind {
                LadderKind::Create => state.create(op.orbital)?,
                LadderKind::Annihilate => state.annihilate(op.orbital)?,
            };
            state = next;
            sign *= s;
        }
        Some((state, sign))
    }
}

impl fmt::Debug for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FockState({:#b})", self.0)
    }
}

/// Identifies a fixed-(N↑, N↓) sector of a ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorKey {
    pub sites: usize,
    pub n_up: usize,
    pub n_down: usize,
}

impl SectorKey {
    pub fn new(sites: usize, n_up: usize, n_down: usize) -> Self {
        SectorKey {
            sites,
            n_up,
            n_down,
        }
    }

    pub fn validate(self) -> Result<Self> {
        if self.sites == 0 || self.sites > MAX_SITES {
            return Err(Error::domain(format!(
                "site count {} outside 1..={MAX_SITES}",
                self.sites
            )));
        }
        if self.n_up > self.sites || self.n_down > self.sites {
            return Err(Error::domain(format!(
                "electron counts ({}, {}) exceed {} sites",
                self.n_up, self.n_down, self.sites
            )));
        }
        Ok(self)
    }

    /// Number of determinants, C(V, N↑)·C(V, N↓).
    pub fn dimension(self) -> usize {
        binomial(self.sites, self.n_up) * binomial(self.sites, self.n_down)
    }

    pub fn n_electrons(self) -> usize {
        self.n_up + self.n_down
    }

    pub fn count(self, spin: Spin) -> usize {
        match spin {
            Spin::Up => self.n_up,
            Spin::Down => self.n_down,
        }
    }

    /// Sector reached by adding `delta` electrons of `spin`, if it exists.
    pub fn shifted(self, spin: Spin, delta: isize) -> Option<SectorKey> {
        let count = self.count(spin) as isize + delta;
        if count < 0 || count > self.sites as isize {
            return None;
        }
        let mut out = self;
        match spin {
            Spin::Up => out.n_up = count as usize,
            Spin::Down => out.n_down = count as usize,
        }
        Some(out)
    }

    pub fn spin_flipped(self) -> SectorKey {
        SectorKey::new(self.sites, self.n_down, self.n_up)
    }
}

impl fmt::Display for SectorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n_up, self.n_down)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All determinants of a sector in ascending bit order, with reverse lookup.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    key: SectorKey,
    states: Vec<FockState>,
    index: HashMap<FockState, usize>,
}

impl SectorBasis {
    pub fn new(key: SectorKey) -> Result<Self> {
        let key = key.validate()?;
        let v = key.sites;
        let masks = |n: usize| (0u32..1 << v).filter(move |m| m.count_ones() as usize == n);
        let mut states: Vec<FockState> = masks(key.n_down)
            .flat_map(|dn| masks(key.n_up).map(move |up| FockState(up | dn << v)))
            .collect();
        states.sort_unstable();
        let index = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        Ok(SectorBasis { key, states, index })
    }

    pub fn key(&self) -> SectorKey {
        self.key
    }

    pub fn sites(&self) -> usize {
        self.key.sites
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> FockState {
        self.states[i]
    }

    pub fn index_of(&self, state: FockState) -> Option<usize> {
        self.index.get(&state).copied()
    }

    /// Position of the determinant with the given up/down labels occupied.
    pub fn index_of_labels(&self, up: &[usize], down: &[usize]) -> Option<usize> {
        self.index_of(FockState::from_labels(up, down, self.key.sites))
    }
}

/// Builds the basis of sector (N↑, N↓) on `sites` sites.
pub fn build_sector(sites: usize, n_up: usize, n_down: usize) -> Result<SectorBasis> {
    SectorBasis::new(SectorKey::new(sites, n_up, n_down))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LadderKind {
    Create,
    Annihilate,
}

/// A single creation or annihilation operator on one spin-orbital.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ladder {
    pub kind: LadderKind,
    pub orbital: usize,
}

impl Ladder {
    pub const fn create(orbital: usize) -> Self {
        Ladder {
            kind: LadderKind::Create,
            orbital,
        }
    }

    pub const fn annihilate(orbital: usize) -> Self {
        Ladder {
            kind: LadderKind::Annihilate,
            orbital,
        }
    }

    pub fn adjoint(self) -> Self {
        match self.kind {
            LadderKind::Create => Ladder::annihilate(self.orbital),
            LadderKind::Annihilate => Ladder::create(self.orbital),
        }
    }
}

/// Hermitian conjugate of an operator string: reversed order, each factor adjointed.
pub fn adjoint_string(ops: &[Ladder]) -> Vec<Ladder> {
    ops.iter().rev().map(|op| op.adjoint()).collect()
}

/// Net change in (N↑, N↓) produced by an operator string.
pub fn particle_shift(ops: &[Ladder], sites: usize) -> (isize, isize) {
    ops.iter().fold((0, 0), |(up, dn), op| {
        let d = match op.kind {
            LadderKind::Create => 1,
            LadderKind::Annihilate => -1,
        };
        match split_orbital(op.orbital, sites).0 {
            Spin::Up => (up + d, dn),
            Spin::Down => (up, dn + d),
        }
    })
}

/// `coeff · (product of ladder operators)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term<T: Real> {
    pub coeff: Cplx<T>,
    pub ops: Vec<Ladder>,
}

impl<T: Real> Term<T> {
    pub fn new(coeff: Cplx<T>, ops: Vec<Ladder>) -> Self {
        Term { coeff, ops }
    }

    pub fn real(coeff: T, ops: Vec<Ladder>) -> Self {
        Term {
            coeff: Cplx::new(coeff, T::zero()),
            ops,
        }
    }

    pub fn adjoint(&self) -> Self {
        Term {
            coeff: crate::scalar::conj(self.coeff),
            ops: adjoint_string(&self.ops),
        }
    }
}

/// Action of a single ladder operator from one sector into another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedAmplitudeMap {
    pub src: SectorKey,
    pub dst: SectorKey,
    /// Per source index: `(target index, sign)`, or `None` when annihilated.
    pub entries: Vec<Option<(usize, i8)>>,
}

impl SignedAmplitudeMap {
    pub fn to_operator<T: Real>(&self) -> SparseOperator<T> {
        let triplets = self.entries.iter().enumerate().filter_map(|(col, e)| {
            e.map(|(row, s)| (row, col, Cplx::new(T::from_i8(s).unwrap(), T::zero())))
        });
        SparseOperator::from_triplets(self.src, self.dst, triplets)
    }
}

fn check_pair(orbital: usize, src: &SectorBasis, dst: &SectorBasis, delta: isize) -> Result<()> {
    let sites = src.sites();
    if orbital >= 2 * sites {
        return Err(Error::domain(format!(
            "orbital {orbital} outside 0..{}",
            2 * sites
        )));
    }
    let spin = split_orbital(orbital, sites).0;
    if src.key().shifted(spin, delta) != Some(dst.key()) {
        return Err(Error::domain(format!(
            "sector mismatch: {} -> {} for orbital {orbital}",
            src.key(),
            dst.key()
        )));
    }
    Ok(())
}

fn ladder_map(op: Ladder, src: &SectorBasis, dst: &SectorBasis) -> SignedAmplitudeMap {
    let entries = src
        .states()
        .iter()
        .map(|s| {
            s.apply_string(&[op]).map(|(t, sign)| {
                let row = dst
                    .index_of(t)
                    .expect("target determinant inside destination sector");
                (row, sign)
            })
        })
        .collect();
    SignedAmplitudeMap {
        src: src.key(),
        dst: dst.key(),
        entries,
    }
}

/// `ĉ†_orbital` from `src` into `dst` (one more electron of the orbital's spin).
pub fn apply_creation(
    orbital: usize,
    src: &SectorBasis,
    dst: &SectorBasis,
) -> Result<SignedAmplitudeMap> {
    check_pair(orbital, src, dst, 1)?;
    Ok(ladder_map(Ladder::create(orbital), src, dst))
}

/// `ĉ_orbital` from `src` into `dst` (one fewer electron of the orbital's spin).
pub fn apply_annihilation(
    orbital: usize,
    src: &SectorBasis,
    dst: &SectorBasis,
) -> Result<SignedAmplitudeMap> {
    check_pair(orbital, src, dst, -1)?;
    Ok(ladder_map(Ladder::annihilate(orbital), src, dst))
}

/// Assembles `Σ terms` as a square operator on a particle-conserving sector.
pub fn build_operator<T: Real>(
    terms: &[Term<T>],
    basis: &SectorBasis,
) -> Result<SparseOperator<T>> {
    build_transition(terms, basis, basis)
}

/// Assembles `Σ terms` as a map `src -> dst`; every term must shift the
/// particle numbers by exactly `dst - src`.
pub fn build_transition<T: Real>(
    terms: &[Term<T>],
    src: &SectorBasis,
    dst: &SectorBasis,
) -> Result<SparseOperator<T>> {
    let sites = src.sites();
    if dst.sites() != sites {
        return Err(Error::domain(
            "source and destination sectors have different site counts",
        ));
    }
    let want = (
        dst.key().n_up as isize - src.key().n_up as isize,
        dst.key().n_down as isize - src.key().n_down as isize,
    );
    let mut triplets = Vec::new();
    for term in terms {
        if let Some(op) = term.ops.iter().find(|op| op.orbital >= 2 * sites) {
            return Err(Error::domain(format!(
                "orbital {} outside 0..{}",
                op.orbital,
                2 * sites
            )));
        }
        if particle_shift(&term.ops, sites) != want {
            return Err(Error::domain(format!(
                "term {:?} does not map sector {} to {}",
                term.ops,
                src.key(),
                dst.key()
            )));
        }
        if term.coeff.re == T::zero() && term.coeff.im == T::zero() {
            continue;
        }
        for (col, state) in src.states().iter().enumerate() {
            if let Some((target, sign)) = state.apply_string(&term.ops) {
                let row = dst.index_of(target).expect("particle shift checked above");
                let value = if sign > 0 { term.coeff } else { -term.coeff };
                triplets.push((row, col, value));
            }
        }
    }
    Ok(SparseOperator::from_triplets(
        src.key(),
        dst.key(),
        triplets,
    ))
}
