//! Frequency-domain stage: windowed Fourier transform of `G(t)`, Lehmann
//! pole expansion, bare propagator and Dyson self-energy.
//!
//! A finite system has a pure pole spectrum, so transforming a time series
//! cut at `T_max` leaves ringing of size up to `e^{−η T_max}/η` around each
//! pole. The transform here keeps that distortion visible; the Lehmann
//! expansion is the reference it is measured against.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fock::SectorKey;
use crate::fock::{build_transition, Term};
use crate::greens::{Channel, ChannelKind, GreensSeries};
use crate::groundstate::HubbardModel;
use crate::hamiltonian::Bandstructure;
use crate::scalar::{cabs, cinv, cis, conj, czero, from_usize, real, to_f64, Cplx, Real};

/// Points where `|G(ω)|` falls below this are not inverted.
pub const DYSON_MIN_MAGNITUDE: f64 = 1e-10;

/// Uniform grid `ω_m = min + m·step`, `m = 0..count`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencyGrid<T> {
    pub min: T,
    pub step: T,
    pub count: usize,
}

impl<T: Real> FrequencyGrid<T> {
    pub fn new(min: T, max: T, step: T) -> Result<Self> {
        if step.partial_cmp(&T::zero()) != Some(Ordering::Greater)
            || max.partial_cmp(&min) != Some(Ordering::Greater)
        {
            return Err(Error::domain("frequency grid needs max > min and step > 0"));
        }
        let count = to_f64((max - min) / step).round() as usize + 1;
        Ok(FrequencyGrid { min, step, count })
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn omega(&self, m: usize) -> T {
        self.min + self.step * from_usize(m)
    }

    pub fn max(&self) -> T {
        self.omega(self.count - 1)
    }

    pub fn omegas(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.count).map(|m| self.omega(m))
    }
}

impl<T: Real> Default for FrequencyGrid<T> {
    fn default() -> Self {
        FrequencyGrid {
            min: real(-3.0),
            step: real(0.005),
            count: 1201,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpectralSource {
    Transformed,
    Lehmann,
    Noninteracting,
    SelfEnergy,
}

impl SpectralSource {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectralSource::Transformed => "transformed",
            SpectralSource::Lehmann => "lehmann",
            SpectralSource::Noninteracting => "noninteracting",
            SpectralSource::SelfEnergy => "selfenergy",
        }
    }
}

impl fmt::Display for SpectralSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SpectralSource {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transformed" | "fourier" => Ok(SpectralSource::Transformed),
            "lehmann" => Ok(SpectralSource::Lehmann),
            "noninteracting" => Ok(SpectralSource::Noninteracting),
            _ => Err(Error::Config(format!(
                "unknown spectral source '{s}' (transformed | lehmann | noninteracting)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencySeries<T> {
    pub channel: Channel,
    pub grid: FrequencyGrid<T>,
    pub values: Vec<Cplx<T>>,
    pub eta: T,
    pub source: SpectralSource,
}

impl<T: Real> FrequencySeries<T> {
    /// `−(1/π) ∫ Im G(ω) dω` by the trapezoid rule over the grid.
    pub fn spectral_weight(&self) -> T {
        let n = self.values.len();
        if n < 2 {
            return T::zero();
        }
        let half: T = real(0.5);
        let interior = self.values[1..n - 1]
            .iter()
            .fold(T::zero(), |a, v| a + v.im);
        let sum = interior + half * (self.values[0].im + self.values[n - 1].im);
        -sum * self.grid.step / T::pi()
    }
}

fn check_eta<T: Real>(eta: T) -> Result<()> {
    if eta > T::zero() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "damping eta must be positive, got {eta}"
        )))
    }
}

/// `G(ω) = ∫₀^{T_max} e^{iωt − ηt} G(t) dt` by the trapezoid rule.
pub fn fourier_transform<T: Real>(
    g: &GreensSeries<T>,
    eta: T,
    grid: &FrequencyGrid<T>,
) -> Result<FrequencySeries<T>> {
    check_eta(eta)?;
    let n = g.values.len();
    let dt = g.grid.dt;
    let half: T = real(0.5);
    let damped: Vec<Cplx<T>> = g
        .values
        .iter()
        .enumerate()
        .map(|(m, &v)| {
            let t = g.grid.time(m);
            let w = if m == 0 || m + 1 == n { half * dt } else { dt };
            v * ((-eta * t).exp() * w)
        })
        .collect();
    let values = grid
        .omegas()
        .map(|omega| {
            damped.iter().enumerate().fold(czero(), |acc, (m, &v)| {
                acc + v * cis(omega * g.grid.time(m))
            })
        })
        .collect();
    Ok(FrequencySeries {
        channel: g.channel,
        grid: *grid,
        values,
        eta,
        source: SpectralSource::Transformed,
    })
}

/// One pole `residue / (ω − energy + iη)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pole<T> {
    pub energy: T,
    pub residue: Cplx<T>,
    /// `true` for particle addition (N+1 sector), `false` for removal.
    pub addition: bool,
}

/// Exact pole representation of a zero-temperature Green's function.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleExpansion<T> {
    pub channel: Channel,
    pub ground_energy: T,
    pub poles: Vec<Pole<T>>,
}

impl<T: Real> PoleExpansion<T> {
    pub fn evaluate(&self, omega: T, eta: T) -> Cplx<T> {
        self.poles.iter().fold(czero(), |acc, p| {
            acc + p.residue * cinv(Cplx::new(omega - p.energy, eta))
        })
    }

    /// `G(t) = −i Σ r e^{−iEt}` for `t ≥ 0`.
    pub fn time_value(&self, t: T) -> Cplx<T> {
        let s = self
            .poles
            .iter()
            .fold(czero(), |acc, p| acc + p.residue * cis(-p.energy * t));
        Cplx::new(s.im, -s.re)
    }

    pub fn total_residue(&self) -> Cplx<T> {
        self.poles.iter().fold(czero(), |acc, p| acc + p.residue)
    }

    /// Poles carrying at least `min_weight` of residue magnitude, by energy.
    pub fn significant(&self, min_weight: T) -> Vec<Pole<T>> {
        let mut out: Vec<Pole<T>> = self
            .poles
            .iter()
            .copied()
            .filter(|p| cabs(p.residue) >= min_weight)
            .collect();
        out.sort_by(|a, b| {
            a.energy
                .partial_cmp(&b.energy)
                .expect("finite pole energies")
        });
        out
    }

    /// Real part rebuilt from the Lorentzian spectral density of each pole
    /// through its principal-value Hilbert transform.
    pub fn kramers_kronig_real(&self, omega: T, eta: T) -> T {
        self.poles.iter().fold(T::zero(), |acc, p| {
            // -Im of the pole term is w·η/((ω−E)²+η²); its Hilbert partner:
            let x = omega - p.energy;
            acc + p.residue.re * x / (x * x + eta * eta)
        })
    }

    pub fn to_series(&self, grid: &FrequencyGrid<T>, eta: T) -> Result<FrequencySeries<T>> {
        check_eta(eta)?;
        Ok(FrequencySeries {
            channel: self.channel,
            grid: *grid,
            values: grid.omegas().map(|w| self.evaluate(w, eta)).collect(),
            eta,
            source: SpectralSource::Lehmann,
        })
    }

    /// Integrates `−Im G/π` over a window reaching `400 η` past the outermost poles.
    pub fn sum_rule(&self, eta: T) -> Result<T> {
        check_eta(eta)?;
        let (lo, hi) = self
            .poles
            .iter()
            .fold((T::zero(), T::zero()), |(lo, hi), p| {
                (lo.min(p.energy), hi.max(p.energy))
            });
        let margin = eta * real(400.0);
        let grid = FrequencyGrid::new(lo - margin, hi + margin, eta / real(20.0))?;
        Ok(self.to_series(&grid, eta)?.spectral_weight())
    }
}

fn ground_sector_eigen<T: Real>(
    model: &HubbardModel<T>,
    key: SectorKey,
) -> Result<(T, crate::state::StateVector<T>)> {
    let sys = model.sector(key)?;
    Ok((sys.eigen.ground_energy(), sys.eigen.eigenvector(0)))
}

/// Poles of the retarded Green's function of the `ground`-sector ground state.
pub fn lehmann_poles<T: Real>(
    model: &HubbardModel<T>,
    channel: Channel,
    ground: SectorKey,
) -> Result<PoleExpansion<T>> {
    let sites = model.sites();
    channel.validate(sites)?;
    let home = model.sector(ground)?;
    let (e0, psi) = ground_sector_eigen(model, ground)?;
    let annihilator = channel.annihilator::<T>(sites);
    let creator = channel.creator::<T>(sites);
    let creator_adj: Vec<Term<T>> = creator.iter().map(Term::adjoint).collect();
    let annihilator_adj: Vec<Term<T>> = annihilator.iter().map(Term::adjoint).collect();
    let mut poles = Vec::new();

    if let Some(k) = ground.shifted(channel.spin, 1) {
        let sys = model.sector(k)?;
        // ⟨m|ĉ†_j|0⟩ and ⟨m|ĉ†_i|0⟩ (the latter conjugated gives ⟨0|ĉ_i|m⟩)
        let right = sys
            .eigen
            .coefficients(&build_transition(&creator, &home.basis, &sys.basis)?.apply(&psi)?)?;
        let left = sys.eigen.coefficients(
            &build_transition(&annihilator_adj, &home.basis, &sys.basis)?.apply(&psi)?,
        )?;
        for (m, (&r, &l)) in right.iter().zip(&left).enumerate() {
            poles.push(Pole {
                energy: sys.eigen.eigenvalues[m] - e0,
                residue: conj(l) * r,
                addition: true,
            });
        }
    }
    if let Some(k) = ground.shifted(channel.spin, -1) {
        let sys = model.sector(k)?;
        // ⟨m|ĉ_i|0⟩ and ⟨m|ĉ_j|0⟩ (the latter conjugated gives ⟨0|ĉ†_j|m⟩)
        let right = sys
            .eigen
            .coefficients(&build_transition(&annihilator, &home.basis, &sys.basis)?.apply(&psi)?)?;
        let left = sys
            .eigen
            .coefficients(&build_transition(&creator_adj, &home.basis, &sys.basis)?.apply(&psi)?)?;
        for (m, (&r, &l)) in right.iter().zip(&left).enumerate() {
            poles.push(Pole {
                energy: e0 - sys.eigen.eigenvalues[m],
                residue: conj(l) * r,
                addition: false,
            });
        }
    }
    Ok(PoleExpansion {
        channel,
        ground_energy: e0,
        poles,
    })
}

/// Lehmann-representation Green's function broadened by `eta`.
pub fn exact_lehmann_gf<T: Real>(
    model: &HubbardModel<T>,
    channel: Channel,
    ground: SectorKey,
    grid: &FrequencyGrid<T>,
    eta: T,
) -> Result<FrequencySeries<T>> {
    check_eta(eta)?;
    lehmann_poles(model, channel, ground)?.to_series(grid, eta)
}

/// Bare propagator `1/(ω − ε_k + iη)`; momentum channels only.
pub fn noninteracting_gf<T: Real>(
    band: &Bandstructure<T>,
    channel: Channel,
    grid: &FrequencyGrid<T>,
    eta: T,
) -> Result<FrequencySeries<T>> {
    check_eta(eta)?;
    let n = match channel.kind {
        ChannelKind::Momentum(n) if n < band.len() => n,
        ChannelKind::Momentum(n) => {
            return Err(Error::domain(format!("momentum label {n} out of range")))
        }
        ChannelKind::SitePair(..) => {
            return Err(Error::domain(
                "noninteracting propagator supports momentum channels only",
            ))
        }
    };
    let e = band.energy(n);
    Ok(FrequencySeries {
        channel,
        grid: *grid,
        values: grid.omegas().map(|w| cinv(Cplx::new(w - e, eta))).collect(),
        eta,
        source: SpectralSource::Noninteracting,
    })
}

/// Dyson self-energy with the points where `G` could not be inverted.
#[derive(Clone, Debug, PartialEq)]
pub struct SelfEnergy<T> {
    /// Invalid points hold NaN.
    pub series: FrequencySeries<T>,
    pub invalid: Vec<usize>,
}

impl<T: Real> SelfEnergy<T> {
    /// Largest `|Σ|` over valid points.
    pub fn sup_norm(&self) -> T {
        self.series
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.invalid.contains(i))
            .fold(T::zero(), |m, (_, &v)| m.max(cabs(v)))
    }
}

/// `Σ(ω) = 1/G₀(ω) − 1/G(ω)` pointwise.
pub fn self_energy<T: Real>(
    g: &FrequencySeries<T>,
    g0: &FrequencySeries<T>,
) -> Result<SelfEnergy<T>> {
    if g.grid != g0.grid || g.values.len() != g0.values.len() {
        return Err(Error::domain(
            "self-energy needs G and G0 on the same frequency grid",
        ));
    }
    if g.channel != g0.channel {
        return Err(Error::domain(format!(
            "channels differ ({} vs {})",
            g.channel, g0.channel
        )));
    }
    if g.eta != g0.eta {
        return Err(Error::domain("G and G0 were broadened with different eta"));
    }
    let floor: T = real(DYSON_MIN_MAGNITUDE);
    let nan = T::from_f64(f64::NAN).unwrap();
    let mut invalid = Vec::new();
    let values = g
        .values
        .iter()
        .zip(&g0.values)
        .enumerate()
        .map(|(i, (&gi, &g0i))| {
            if cabs(gi) < floor || cabs(g0i) < floor {
                invalid.push(i);
                Cplx::new(nan, nan)
            } else {
                cinv(g0i) - cinv(gi)
            }
        })
        .collect();
    Ok(SelfEnergy {
        series: FrequencySeries {
            channel: g.channel,
            grid: g.grid,
            values,
            eta: g.eta,
            source: SpectralSource::SelfEnergy,
        },
        invalid,
    })
}

/// Largest pointwise `|a − b|` between two frequency series on one grid.
pub fn sup_distance<T: Real>(a: &FrequencySeries<T>, b: &FrequencySeries<T>) -> Result<T> {
    if a.grid != b.grid {
        return Err(Error::domain("frequency grids differ"));
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .fold(T::zero(), |m, (&x, &y)| m.max(cabs(x - y))))
}

/// Real part from `−Im G/π` by a discrete principal-value Hilbert transform
/// on the series' own grid, using samples at odd offsets with weight `2Δω`.
pub fn hilbert_real_part<T: Real>(g: &FrequencySeries<T>) -> Vec<T> {
    let n = g.values.len();
    let two_dw = g.grid.step * real(2.0);
    (0..n)
        .map(|i| {
            let wi = g.grid.omega(i);
            let start = if i % 2 == 0 { 1 } else { 0 };
            let s = (start..n).step_by(2).fold(T::zero(), |acc, j| {
                let a = -g.values[j].im / T::pi();
                acc + a / (wi - g.grid.omega(j))
            });
            s * two_dw
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Spin;
    use crate::greens::{StateTag, TimeGrid};
    use crate::hamiltonian::{bandstructure, HubbardParams};

    #[test]
    fn single_pole_transform() {
        let (w0, eta, tmax) = (0.4f64, 0.1, 80.0);
        let grid = TimeGrid::new(tmax, 0.01).unwrap();
        let g = GreensSeries {
            channel: Channel::momentum(0, Spin::Up),
            grid,
            values: grid
                .times()
                .map(|t| Cplx::new(0.0, -1.0) * cis(-w0 * t))
                .collect(),
            state: StateTag::Exact,
        };
        let fg = FrequencyGrid::new(-1.0, 1.0, 0.05).unwrap();
        let f = fourier_transform(&g, eta, &fg).unwrap();
        let bound = (-eta * tmax).exp() / eta;
        for (w, v) in fg.omegas().zip(&f.values) {
            let exact = cinv(Cplx::new(w - w0, eta));
            assert!((v - exact).norm() <= bound + 1e-4, "ω={w}");
        }
        assert!(fourier_transform(&g, 0.0, &fg).is_err());
    }

    #[test]
    fn bare_propagator_rules() {
        let band = bandstructure(&HubbardParams::<f64>::default()).unwrap();
        let eta = 0.1;
        let e1 = band.energy(1);
        let fg = FrequencyGrid {
            min: e1,
            step: 0.01,
            count: 300,
        };
        let g0 = noninteracting_gf(&band, Channel::momentum(1, Spin::Up), &fg, eta).unwrap();
        assert!((g0.values[0] - Cplx::new(0.0, -1.0 / eta)).norm() < 1e-12);
        assert!(g0.values.iter().all(|v| v.norm() <= 1.0 / eta + 1e-12));
        assert!(noninteracting_gf(&band, Channel::local(Spin::Up), &fg, eta).is_err());
    }

    #[test]
    fn dyson_identity_and_flags() {
        let band = bandstructure(&HubbardParams::<f64>::default()).unwrap();
        let fg = FrequencyGrid::<f64>::default();
        let g0 = noninteracting_gf(&band, Channel::momentum(0, Spin::Up), &fg, 0.1).unwrap();
        let s = self_energy(&g0, &g0).unwrap();
        assert!(s.invalid.is_empty());
        assert_eq!(s.sup_norm(), 0.0);
        let mut g = g0.clone();
        g.values[5] = Cplx::new(0.0, 0.0);
        let s = self_energy(&g, &g0).unwrap();
        assert_eq!(s.invalid, vec![5]);
        assert!(s.series.values[5].re.is_nan());
        let other = FrequencySeries {
            eta: 0.2,
            ..g0.clone()
        };
        assert!(self_energy(&other, &g0).is_err());
    }

    #[test]
    fn lehmann_weights_are_positive_and_normalized() {
        let m = HubbardModel::new(HubbardParams::<f64>::default()).unwrap();
        for n in 0..4 {
            let p = lehmann_poles(&m, Channel::momentum(n, Spin::Up), m.key(2, 2)).unwrap();
            assert!(p
                .poles
                .iter()
                .all(|p| p.residue.re >= -1e-14 && p.residue.im.abs() < 1e-14));
            assert!((p.total_residue() - Cplx::new(1.0, 0.0)).norm() < 1e-12);
        }
    }
}
