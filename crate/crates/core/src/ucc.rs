//! Factorized unitary coupled-cluster doubles ansatz on the half-filled
//! four-site ring.
//!
//! The reference fills momentum levels 0 and 1 for both spins. Eight
//! exponentiated doubles generators are applied in a fixed order; their
//! angles follow from the exact ground-state amplitudes (α, β, γ). Angle
//! names skip θ2, which belongs to a quadruple excitation left out of this
//! ansatz.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{build_operator, orbital, Ladder, SectorBasis, SectorKey, Spin, Term};
use crate::groundstate::diagonalize_dense;
use crate::reference_values as refv;
use crate::scalar::{cis, czero, real, to_f64, Cplx, Real};
use crate::sparse::SparseOperator;
use crate::state::StateVector;

const SITES: usize = 4;

/// The only sector the ansatz is defined on.
pub fn ucc_sector() -> SectorKey {
    SectorKey::new(SITES, 2, 2)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UccAngles<T> {
    pub theta1: T,
    pub theta3: T,
    pub theta4: T,
}

impl<T: Real> UccAngles<T> {
    pub fn new(theta1: T, theta3: T, theta4: T) -> Self {
        UccAngles {
            theta1,
            theta3,
            theta4,
        }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    /// Angles derived from the tabulated exact amplitudes.
    pub fn from_reference_amplitudes() -> Result<Self> {
        compute_angles(real(refv::ALPHA), real(refv::BETA), real(refv::GAMMA))
    }

    pub fn value(&self, angle: FactorAngle) -> T {
        match angle {
            FactorAngle::Theta1 => self.theta1,
            FactorAngle::QuarterPi => T::frac_pi_4(),
            FactorAngle::Theta3 => self.theta3,
            FactorAngle::Theta4 => self.theta4,
        }
    }
}

/// Angles from exact amplitudes:
/// `θ1 = ½ asin(4β)`, `θ3 = ½ asin(2√2 β / cos²θ1)`,
/// `θ4 = atan(γ/α) − atan(tan²θ3)`.
pub fn compute_angles<T: Real>(alpha: T, beta: T, gamma: T) -> Result<UccAngles<T>> {
    if alpha == T::zero() {
        return Err(Error::domain("alpha must be nonzero"));
    }
    let half: T = real(0.5);
    let arg1 = beta * real(4.0);
    if arg1.abs() > T::one() {
        return Err(Error::domain(format!(
            "asin argument 4β = {arg1} outside [-1, 1]"
        )));
    }
    let theta1 = half * arg1.asin();
    let c1 = theta1.cos();
    let arg3 = real::<T>(2.0) * real::<T>(2.0).sqrt() * beta / (c1 * c1);
    if arg3.abs() > T::one() {
        return Err(Error::domain(format!(
            "asin argument 2√2β/cos²θ1 = {arg3} outside [-1, 1]"
        )));
    }
    let theta3 = half * arg3.asin();
    let t3 = theta3.tan();
    let theta4 = (gamma / alpha).atan() - (t3 * t3).atan();
    Ok(UccAngles {
        theta1,
        theta3,
        theta4,
    })
}

/// Which angle multiplies a factor's generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorAngle {
    Theta1,
    QuarterPi,
    Theta3,
    Theta4,
}

/// One factor `exp(θ (s·A − s·A†))`, stored as the two signed strings
/// exactly in the order they are written.
#[derive(Clone, Debug, PartialEq)]
pub struct UccFactor {
    pub ordinal: usize,
    pub angle: FactorAngle,
    /// `(sign, string)` of the excitation then the de-excitation.
    pub strings: [(i8, [Ladder; 4]); 2],
}

fn cu(n: usize) -> Ladder {
    Ladder::create(orbital(Spin::Up, n, SITES))
}
fn cd(n: usize) -> Ladder {
    Ladder::create(orbital(Spin::Down, n, SITES))
}
fn au(n: usize) -> Ladder {
    Ladder::annihilate(orbital(Spin::Up, n, SITES))
}
fn ad(n: usize) -> Ladder {
    Ladder::annihilate(orbital(Spin::Down, n, SITES))
}

/// The eight factors in application order.
pub fn factor_sequence() -> Vec<UccFactor> {
    use FactorAngle::*;
    let f = |ordinal, angle, s: i8, exc: [Ladder; 4], deexc: [Ladder; 4]| UccFactor {
        ordinal,
        angle,
        strings: [(s, exc), (-s, deexc)],
    };
    vec![
        f(
            1,
            Theta1,
            -1,
            [cu(2), cd(3), ad(0), au(1)],
            [cu(1), cd(0), ad(3), au(2)],
        ),
        f(
            2,
            Theta1,
            -1,
            [cu(3), cd(2), ad(1), au(0)],
            [cu(0), cd(1), ad(2), au(3)],
        ),
        f(
            3,
            QuarterPi,
            -1,
            [cu(3), cd(3), ad(1), au(1)],
            [cu(1), cd(1), ad(3), au(3)],
        ),
        f(
            4,
            Theta3,
            1,
            [cu(2), cu(3), au(1), au(0)],
            [cu(0), cu(1), au(3), au(2)],
        ),
        f(
            5,
            Theta3,
            1,
            [cd(2), cd(3), ad(1), ad(0)],
            [cd(0), cd(1), ad(3), ad(2)],
        ),
        f(
            6,
            Theta3,
            -1,
            [cu(1), cu(2), au(3), au(0)],
            [cu(0), cu(3), au(2), au(1)],
        ),
        f(
            7,
            Theta3,
            -1,
            [cd(1), cd(2), ad(3), ad(0)],
            [cd(0), cd(3), ad(2), ad(1)],
        ),
        f(
            8,
            Theta4,
            -1,
            [cu(2), cd(2), ad(0), au(0)],
            [cu(0), cd(0), ad(2), au(2)],
        ),
    ]
}

impl UccFactor {
    /// Second-quantized terms of the anti-Hermitian generator at the given angles.
    pub fn generator_terms<T: Real>(&self, angles: &UccAngles<T>) -> Vec<Term<T>> {
        let theta = angles.value(self.angle);
        self.strings
            .iter()
            .map(|(s, ops)| Term::real(theta * T::from_i8(*s).unwrap(), ops.to_vec()))
            .collect()
    }

    pub fn generator<T: Real>(
        &self,
        angles: &UccAngles<T>,
        basis: &SectorBasis,
    ) -> Result<SparseOperator<T>> {
        build_operator(&self.generator_terms(angles), basis)
    }

    /// Dense `exp(G)` from the Hermitian eigendecomposition of `iG`.
    pub fn unitary<T: Real>(
        &self,
        angles: &UccAngles<T>,
        basis: &SectorBasis,
    ) -> Result<DMatrix<Cplx<T>>> {
        let g = self.generator(angles, basis)?;
        let ig = g.scaled(Cplx::new(T::zero(), T::one()));
        if ig.hermiticity_residual() > real(1e-12) {
            return Err(Error::numerical(format!(
                "factor {} generator is not anti-Hermitian",
                self.ordinal
            )));
        }
        let eig = diagonalize_dense(basis.key(), ig.to_dense());
        let n = eig.dim();
        let w = &eig.eigenvectors;
        let phased = DMatrix::from_fn(n, n, |i, j| w[(i, j)] * cis(-eig.eigenvalues[j]));
        Ok(&phased * w.adjoint())
    }
}

/// Unit amplitude on the determinant with levels 0 and 1 doubly occupied.
pub fn build_reference<T: Real>(basis: &SectorBasis) -> Result<StateVector<T>> {
    if basis.key() != ucc_sector() {
        return Err(Error::domain(format!(
            "reference state needs the four-site (2,2) sector, got {} on {} sites",
            basis.key(),
            basis.sites()
        )));
    }
    let i = basis
        .index_of_labels(&[0, 1], &[0, 1])
        .expect("reference determinant present");
    Ok(StateVector::basis(basis.key(), i))
}

/// `exp(G_factor) |state⟩`.
pub fn apply_factor<T: Real>(
    state: &StateVector<T>,
    factor: &UccFactor,
    angles: &UccAngles<T>,
    basis: &SectorBasis,
) -> Result<StateVector<T>> {
    if state.sector() != basis.key() {
        return Err(Error::domain("state and basis sectors differ"));
    }
    let u = factor.unitary(angles, basis)?;
    let amps = state.amplitudes();
    let out = (0..u.nrows())
        .map(|r| (0..u.ncols()).fold(czero(), |acc, c| acc + u[(r, c)] * amps[c]))
        .collect();
    Ok(StateVector::from_amplitudes(state.sector(), out))
}

/// Applies the full factor sequence to the reference determinant.
pub fn prepare_ucc_state<T: Real>(
    angles: &UccAngles<T>,
    basis: &SectorBasis,
) -> Result<StateVector<T>> {
    let reference = build_reference(basis)?;
    factor_sequence()
        .iter()
        .try_fold(reference, |psi, f| apply_factor(&psi, f, angles, basis))
}

/// Closed-form amplitudes on the ten tabulated determinants
/// (order of [`refv::DETERMINANTS`]).
pub fn analytic_coefficients<T: Real>(angles: &UccAngles<T>) -> [T; 10] {
    let (s1, c1) = angles.theta1.sin_cos();
    let (s3, c3) = angles.theta3.sin_cos();
    let (s4, c4) = angles.theta4.sin_cos();
    let r = real::<T>(2.0).sqrt();
    let (c1s, s1s, c3s, s3s) = (c1 * c1, s1 * s1, c3 * c3, s3 * s3);
    let mixed = (c1s - s1s) * s3 * c3 / r;
    let pair = c3 * s3 / r;
    [
        c4 / r * (c1s * c3s + s1s * s3s) + s4 / r * (s1s * c3s - c1s * s3s),
        c4 / r * (s1s * s3s - c1s * c3s) + s4 / r * (s1s * c3s + c1s * s3s),
        mixed,
        pair,
        pair,
        mixed,
        c1 * s1,
        c1 * s1,
        c4 / r * (s1s * c3s + c1s * s3s) + s4 / r * (c1s * c3s - s1s * s3s),
        c4 / r * (s1s * c3s - c1s * s3s) - s4 / r * (c1s * c3s + s1s * s3s),
    ]
}

/// Amplitudes of `state` on the tabulated determinants.
pub fn tabulated_amplitudes<T: Real>(state: &StateVector<T>, basis: &SectorBasis) -> Vec<Cplx<T>> {
    refv::DETERMINANTS
        .iter()
        .map(|d| {
            state.amplitude(
                basis
                    .index_of_labels(&d.up, &d.down)
                    .expect("determinant in sector"),
            )
        })
        .collect()
}

/// Largest amplitude magnitude outside the tabulated determinants.
pub fn off_support_weight<T: Real>(state: &StateVector<T>, basis: &SectorBasis) -> f64 {
    let support: Vec<usize> = refv::DETERMINANTS
        .iter()
        .filter_map(|d| basis.index_of_labels(&d.up, &d.down))
        .collect();
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| !support.contains(i))
        .map(|(_, a)| to_f64(a.re).hypot(to_f64(a.im)))
        .fold(0.0, f64::max)
}
