//! Published values for the four-site hydrogen ring, used as defaults and
//! validation targets. Energies in Hartree.

/// On-site repulsion.
pub const U: f64 = 0.6830907036;
/// Diagonal hopping element.
pub const T0: f64 = -0.3025;
/// Nearest-neighbour hopping.
pub const T1: f64 = -0.380776;
/// Second-neighbour hopping.
pub const T2: f64 = 0.03035031;

/// Exact ground-state amplitude on the reference pair.
pub const ALPHA: f64 = 0.6895316741725;
/// Exact ground-state amplitude on the singly-excited-pair determinants.
pub const BETA: f64 = 0.059610737681519;
/// Exact ground-state amplitude on the doubly excited pair.
pub const GAMMA: f64 = 0.056792869544809;

/// Squared overlap between the exact and factorized-UCC ground states.
pub const FIDELITY: f64 = 0.99979;

/// A determinant `ĉ†_{a↑} ĉ†_{b↑} ĉ†_{c↓} ĉ†_{d↓}|0⟩` on the momentum ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NamedDeterminant {
    pub up: [usize; 2],
    pub down: [usize; 2],
}

impl NamedDeterminant {
    pub const fn new(up: [usize; 2], down: [usize; 2]) -> Self {
        NamedDeterminant { up, down }
    }

    /// Short label such as `0u1u0d1d`.
    pub fn label(&self) -> String {
        format!(
            "{}u{}u{}d{}d",
            self.up[0], self.up[1], self.down[0], self.down[1]
        )
    }

    pub fn spin_flipped(&self) -> Self {
        NamedDeterminant {
            up: self.down,
            down: self.up,
        }
    }
}

/// The ten determinants supporting both ground states, in reference order.
pub const DETERMINANTS: [NamedDeterminant; 10] = [
    NamedDeterminant::new([0, 1], [0, 1]),
    NamedDeterminant::new([0, 3], [0, 3]),
    NamedDeterminant::new([0, 1], [2, 3]),
    NamedDeterminant::new([0, 3], [1, 2]),
    NamedDeterminant::new([1, 2], [0, 3]),
    NamedDeterminant::new([2, 3], [0, 1]),
    NamedDeterminant::new([1, 3], [0, 2]),
    NamedDeterminant::new([0, 2], [1, 3]),
    NamedDeterminant::new([2, 3], [2, 3]),
    NamedDeterminant::new([1, 2], [1, 2]),
];

/// Exact ground-state amplitudes on [`DETERMINANTS`] built from α, β, γ.
pub fn exact_coefficients() -> [f64; 10] {
    [
        ALPHA,
        -ALPHA,
        BETA,
        BETA,
        BETA,
        BETA,
        2.0 * BETA,
        2.0 * BETA,
        GAMMA,
        -GAMMA,
    ]
}

/// Factorized-UCC amplitudes on [`DETERMINANTS`].
pub const UCC_COEFFICIENTS: [f64; 10] = [
    0.6902877166375496,
    -0.6886258223794277,
    0.05873846703927717,
    0.06048300832376081,
    0.06048300832376081,
    0.05873846703927717,
    0.11922147536303802,
    0.11922147536303802,
    0.06687536735226934,
    -0.04669803278042805,
];

/// Fidelity recomputed from the printed amplitudes alone.
pub fn printed_digit_fidelity() -> f64 {
    let a = exact_coefficients();
    let norm_a: f64 = a.iter().map(|x| x * x).sum();
    let norm_b: f64 = UCC_COEFFICIENTS.iter().map(|x| x * x).sum();
    let dot: f64 = a.iter().zip(UCC_COEFFICIENTS).map(|(x, y)| x * y).sum();
    dot * dot / (norm_a * norm_b)
}
