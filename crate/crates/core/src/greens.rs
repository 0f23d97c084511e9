//! Zero-temperature retarded Green's function in the time domain.
//!
//! For a normalized state ψ in sector (N↑, N↓),
//!
//! `G_ij(t) = −i [⟨ψ| e^{iHt} ĉ_i e^{−iHt} ĉ†_j |ψ⟩ + ⟨ψ| ĉ†_j e^{iHt} ĉ_i e^{−iHt} |ψ⟩]`
//!
//! for `t ≥ 0`. Both terms are evaluated by exact propagation in the
//! eigenbases of the N, N+1 and N−1 sectors, so ψ need not be an eigenstate.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fock::{build_transition, orbital, Ladder, SectorBasis, SectorKey, Spin, Term};
use crate::groundstate::{EigenDecomposition, HubbardModel, SectorSystem};
use crate::hamiltonian::momentum_value;
use crate::scalar::{cabs, cabs2, cis, conj, czero, from_usize, real, Cplx, Real};
use crate::sparse::SparseOperator;
use crate::state::StateVector;

/// Which operator pair the Green's function is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    /// `ĉ_{kσ}`, `ĉ†_{kσ}` with `k = 2πn/V`.
    Momentum(usize),
    /// `ĉ_{iσ}`, `ĉ†_{jσ}` on sites `i`, `j`.
    SitePair(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Channel {
    pub kind: ChannelKind,
    pub spin: Spin,
}

impl Channel {
    pub fn momentum(label: usize, spin: Spin) -> Self {
        Channel {
            kind: ChannelKind::Momentum(label),
            spin,
        }
    }

    pub fn site_pair(i: usize, j: usize, spin: Spin) -> Self {
        Channel {
            kind: ChannelKind::SitePair(i, j),
            spin,
        }
    }

    /// Site-diagonal channel `G_00`.
    pub fn local(spin: Spin) -> Self {
        Self::site_pair(0, 0, spin)
    }

    pub fn momentum_label(&self) -> Option<usize> {
        match self.kind {
            ChannelKind::Momentum(n) => Some(n),
            ChannelKind::SitePair(..) => None,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        match self.kind {
            ChannelKind::Momentum(_) => true,
            ChannelKind::SitePair(i, j) => i == j,
        }
    }

    pub fn validate(&self, sites: usize) -> Result<()> {
        let ok = match self.kind {
            ChannelKind::Momentum(n) => n < sites,
            ChannelKind::SitePair(i, j) => i < sites && j < sites,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "channel {self} has a label outside 0..{sites}"
            )))
        }
    }

    pub fn spin_flipped(&self) -> Self {
        Channel {
            kind: self.kind,
            spin: self.spin.flipped(),
        }
    }

    /// Annihilation operator `ĉ_i` of the channel as momentum-orbital terms.
    pub fn annihilator<T: Real>(&self, sites: usize) -> Vec<Term<T>> {
        match self.kind {
            ChannelKind::Momentum(n) => {
                vec![Term::real(
                    T::one(),
                    vec![Ladder::annihilate(orbital(self.spin, n, sites))],
                )]
            }
            ChannelKind::SitePair(i, _) => site_annihilator(i, self.spin, sites),
        }
    }

    /// Creation operator `ĉ†_j` of the channel as momentum-orbital terms.
    pub fn creator<T: Real>(&self, sites: usize) -> Vec<Term<T>> {
        match self.kind {
            ChannelKind::Momentum(n) => {
                vec![Term::real(
                    T::one(),
                    vec![Ladder::create(orbital(self.spin, n, sites))],
                )]
            }
            ChannelKind::SitePair(_, j) => site_annihilator(j, self.spin, sites)
                .iter()
                .map(Term::adjoint)
                .collect(),
        }
    }
}

/// `ĉ_{jσ} = V^{-1/2} Σ_k e^{ikj} ĉ_{kσ}`.
fn site_annihilator<T: Real>(site: usize, spin: Spin, sites: usize) -> Vec<Term<T>> {
    let norm = T::one() / from_usize::<T>(sites).sqrt();
    (0..sites)
        .map(|n| {
            let k: T = momentum_value(n, sites);
            Term::new(
                cis(k * from_usize(site)) * norm,
                vec![Ladder::annihilate(orbital(spin, n, sites))],
            )
        })
        .collect()
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ChannelKind::Momentum(n) => write!(f, "k{n}_{}", self.spin.symbol()),
            ChannelKind::SitePair(i, j) => write!(f, "r{i}-{j}_{}", self.spin.symbol()),
        }
    }
}

impl FromStr for Channel {
    type Err = Error;

    /// Accepts `k1`, `k1_dn`, `r0-2_up` and `local` (spin defaults to up).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Config(format!(
                "cannot parse channel '{s}' (expected k<n>[_up|_dn], r<i>-<j>[_up|_dn] or local)"
            ))
        };
        let (body, spin) = match s.rsplit_once('_') {
            Some((b, "up")) => (b, Spin::Up),
            Some((b, "dn")) | Some((b, "down")) => (b, Spin::Down),
            Some(_) => return Err(bad()),
            None => (s, Spin::Up),
        };
        if body == "local" {
            return Ok(Channel::local(spin));
        }
        if let Some(n) = body.strip_prefix('k') {
            let n = n.parse().map_err(|_| bad())?;
            return Ok(Channel::momentum(n, spin));
        }
        if let Some(pair) = body.strip_prefix('r') {
            let (i, j) = pair.split_once('-').ok_or_else(bad)?;
            return Ok(Channel::site_pair(
                i.parse().map_err(|_| bad())?,
                j.parse().map_err(|_| bad())?,
                spin,
            ));
        }
        Err(bad())
    }
}

/// Uniform grid `t_m = m·dt`, `m = 0..=steps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid<T> {
    pub dt: T,
    pub steps: usize,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(t_max: T, dt: T) -> Result<Self> {
        if dt.partial_cmp(&T::zero()) != Some(Ordering::Greater)
            || t_max.partial_cmp(&T::zero()) != Some(Ordering::Greater)
        {
            return Err(Error::domain("time grid needs t_max > 0 and dt > 0"));
        }
        let steps = crate::scalar::to_f64(t_max / dt).round() as usize;
        Ok(TimeGrid { dt, steps })
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, m: usize) -> T {
        self.dt * from_usize(m)
    }

    pub fn t_max(&self) -> T {
        self.time(self.steps)
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.len()).map(|m| self.time(m))
    }
}

impl<T: Real> Default for TimeGrid<T> {
    fn default() -> Self {
        TimeGrid {
            dt: real(0.02),
            steps: 2000,
        }
    }
}

/// Which state a series was computed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateTag {
    Exact,
    Ucc,
}

impl StateTag {
    pub fn as_str(self) -> &'static str {
        match self {
            StateTag::Exact => "exact",
            StateTag::Ucc => "ucc",
        }
    }
}

impl FromStr for StateTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(StateTag::Exact),
            "ucc" => Ok(StateTag::Ucc),
            _ => Err(Error::Config(format!("unknown state '{s}' (exact | ucc)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreensSeries<T> {
    pub channel: Channel,
    pub grid: TimeGrid<T>,
    pub values: Vec<Cplx<T>>,
    pub state: StateTag,
}

/// Time evolution of one state in a precomputed eigenbasis.
pub struct Propagator<'a, T: Real> {
    eigen: &'a EigenDecomposition<T>,
    coeffs: Vec<Cplx<T>>,
}

impl<'a, T: Real> Propagator<'a, T> {
    pub fn new(state: &StateVector<T>, eigen: &'a EigenDecomposition<T>) -> Result<Self> {
        Ok(Propagator {
            coeffs: eigen.coefficients(state)?,
            eigen,
        })
    }

    /// `e^{−iHt}|ψ⟩`.
    pub fn at(&self, t: T) -> StateVector<T> {
        let phased: Vec<Cplx<T>> = self
            .coeffs
            .iter()
            .zip(&self.eigen.eigenvalues)
            .map(|(&c, &e)| c * cis(-e * t))
            .collect();
        self.eigen.synthesize(&phased)
    }
}

/// `e^{−iHt}|state⟩`, exact in the eigenbasis.
pub fn propagate<T: Real>(
    state: &StateVector<T>,
    eigen: &EigenDecomposition<T>,
    t: T,
) -> Result<StateVector<T>> {
    Ok(Propagator::new(state, eigen)?.at(t))
}

fn dot<T: Real>(a: &[Cplx<T>], b: &[Cplx<T>]) -> Cplx<T> {
    a.iter()
        .zip(b)
        .fold(czero(), |acc, (&x, &y)| acc + conj(x) * y)
}

/// One branch (particle addition or removal) of the Green's function.
struct Branch<T: Real> {
    system: Arc<SectorSystem<T>>,
    /// `ĉ†_j ψ` (addition) or `ĉ_j ψ` (removal) in the neighbouring sector.
    excited: StateVector<T>,
    /// `ĉ_i`, mapping the neighbouring sector to ψ's sector (addition)
    /// or ψ's sector to the neighbouring one (removal).
    probe: SparseOperator<T>,
}

fn neighbour<T: Real>(
    model: &HubbardModel<T>,
    key: SectorKey,
    spin: Spin,
    delta: isize,
) -> Result<Option<Arc<SectorSystem<T>>>> {
    key.shifted(spin, delta)
        .map(|k| model.sector(k))
        .transpose()
}

/// Retarded Green's function of `psi` in `channel` on `grid`.
pub fn retarded_gf<T: Real>(
    psi: &StateVector<T>,
    model: &HubbardModel<T>,
    channel: Channel,
    grid: &TimeGrid<T>,
    tag: StateTag,
) -> Result<GreensSeries<T>> {
    let sites = model.sites();
    channel.validate(sites)?;
    let key = psi.sector();
    let home = model.sector(key)?;
    let basis: &SectorBasis = &home.basis;
    let annihilator = channel.annihilator::<T>(sites);
    let creator = channel.creator::<T>(sites);
    let create_j_adj: Vec<Term<T>> = creator.iter().map(Term::adjoint).collect();

    let addition = match neighbour(model, key, channel.spin, 1)? {
        Some(sys) => {
            let excited = build_transition(&creator, basis, &sys.basis)?.apply(psi)?;
            let probe = build_transition(&annihilator, &sys.basis, basis)?;
            Some(Branch {
                system: sys,
                excited,
                probe,
            })
        }
        None => None,
    };
    let removal = match neighbour(model, key, channel.spin, -1)? {
        Some(sys) => {
            let excited = build_transition(&create_j_adj, basis, &sys.basis)?.apply(psi)?;
            let probe = build_transition(&annihilator, basis, &sys.basis)?;
            Some(Branch {
                system: sys,
                excited,
                probe,
            })
        }
        None => None,
    };

    let home_prop = Propagator::new(psi, &home.eigen)?;
    let add_prop = addition
        .as_ref()
        .map(|b| Propagator::new(&b.excited, &b.system.eigen))
        .transpose()?;
    let rem_prop = removal
        .as_ref()
        .map(|b| Propagator::new(&b.excited, &b.system.eigen))
        .transpose()?;
    let minus_i = Cplx::new(T::zero(), -T::one());

    let values = grid
        .times()
        .map(|t| {
            let psi_t = home_prop.at(t);
            let mut acc = czero();
            if let (Some(b), Some(p)) = (&addition, &add_prop) {
                let x_t = p.at(t);
                acc += dot(psi_t.amplitudes(), &b.probe.matvec(x_t.amplitudes()));
            }
            if let (Some(b), Some(p)) = (&removal, &rem_prop) {
                let z_t = p.at(t);
                acc += dot(z_t.amplitudes(), &b.probe.matvec(psi_t.amplitudes()));
            }
            minus_i * acc
        })
        .collect();
    Ok(GreensSeries {
        channel,
        grid: *grid,
        values,
        state: tag,
    })
}

/// Evaluates several channels concurrently over the shared model.
pub fn retarded_gf_channels<T: Real>(
    psi: &StateVector<T>,
    model: &HubbardModel<T>,
    channels: &[Channel],
    grid: &TimeGrid<T>,
    tag: StateTag,
) -> Result<Vec<GreensSeries<T>>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = channels
            .iter()
            .map(|&c| s.spawn(move || retarded_gf(psi, model, c, grid, tag)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("channel worker panicked"))
            .collect()
    })
}

/// `|⟨a|b⟩|² / (‖a‖² ‖b‖²)`.
pub fn fidelity<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<T> {
    let (na, nb) = (a.norm_sqr(), b.norm_sqr());
    if na == T::zero() || nb == T::zero() {
        return Err(Error::domain("fidelity of a zero vector"));
    }
    Ok(cabs2(a.inner(b)?) / (na * nb))
}

/// Pointwise differences between two series on the same grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesMetrics<T> {
    pub max_abs_diff: T,
    pub rms_diff: T,
    pub max_re_diff: T,
    pub max_im_diff: T,
}

/// Compares two sampled complex curves of equal length.
pub fn compare_values<T: Real>(a: &[Cplx<T>], b: &[Cplx<T>]) -> Result<SeriesMetrics<T>> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::domain(format!(
            "series lengths differ ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let mut m = SeriesMetrics {
        max_abs_diff: T::zero(),
        rms_diff: T::zero(),
        max_re_diff: T::zero(),
        max_im_diff: T::zero(),
    };
    let mut sq = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        m.max_abs_diff = m.max_abs_diff.max(cabs(d));
        m.max_re_diff = m.max_re_diff.max(d.re.abs());
        m.max_im_diff = m.max_im_diff.max(d.im.abs());
        sq += cabs2(d);
    }
    m.rms_diff = (sq / from_usize(a.len())).sqrt();
    Ok(m)
}

pub fn compare_series<T: Real>(
    a: &GreensSeries<T>,
    b: &GreensSeries<T>,
) -> Result<SeriesMetrics<T>> {
    if a.channel != b.channel {
        return Err(Error::domain(format!(
            "channels differ ({} vs {})",
            a.channel, b.channel
        )));
    }
    if a.grid != b.grid {
        return Err(Error::domain("time grids differ"));
    }
    compare_values(&a.values, &b.values)
}
