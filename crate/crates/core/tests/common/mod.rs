//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use hubbard_gf::fock::{
    build_transition, orbital, split_orbital, LadderKind, SectorBasis, SectorKey, Spin, Term,
};
use hubbard_gf::{build_sector, HubbardParams, Ladder};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Jordan-Wigner annihilators on the full `2^n` Fock space, built from
/// Kronecker products: `I ⊗ … ⊗ σ⁻ ⊗ Z ⊗ … ⊗ Z` with orbital `p` at bit `p`.
pub struct JordanWigner {
    pub annihilators: Vec<DMatrix<f64>>,
    /// Per orbital and column, the single nonzero `(row, value)` of the
    /// annihilator and of the creator.
    lower: Vec<Vec<Option<(usize, f64)>>>,
    raise: Vec<Vec<Option<(usize, f64)>>>,
}

fn column_action(m: &DMatrix<f64>) -> Vec<Option<(usize, f64)>> {
    (0..m.ncols())
        .map(|c| {
            let nz: Vec<(usize, f64)> = (0..m.nrows())
                .filter(|&r| m[(r, c)] != 0.0)
                .map(|r| (r, m[(r, c)]))
                .collect();
            assert!(nz.len() <= 1, "ladder matrices have one entry per column");
            nz.first().copied()
        })
        .collect()
}

impl JordanWigner {
    pub fn new(n_orbitals: usize) -> Self {
        let id = DMatrix::<f64>::identity(2, 2);
        let z = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let sigma_minus = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let annihilators: Vec<DMatrix<f64>> = (0..n_orbitals)
            .map(|p| {
                // Leftmost factor is the highest orbital.
                let mut m = DMatrix::<f64>::identity(1, 1);
                for q in (0..n_orbitals).rev() {
                    let f = if q > p {
                        &id
                    } else if q == p {
                        &sigma_minus
                    } else {
                        &z
                    };
                    m = m.kronecker(f);
                }
                m
            })
            .collect();
        let lower = annihilators.iter().map(column_action).collect();
        let raise = annihilators
            .iter()
            .map(|a| column_action(&a.transpose()))
            .collect();
        JordanWigner {
            annihilators,
            lower,
            raise,
        }
    }

    pub fn dim(&self) -> usize {
        self.annihilators[0].nrows()
    }

    pub fn ladder(&self, op: Ladder) -> DMatrix<f64> {
        let a = &self.annihilators[op.orbital];
        match op.kind {
            LadderKind::Annihilate => a.clone(),
            LadderKind::Create => a.transpose(),
        }
    }

    /// Image of basis vector `col` under a ladder string (rightmost acts first).
    pub fn apply(&self, ops: &[Ladder], col: usize) -> Option<(usize, f64)> {
        ops.iter().rev().try_fold((col, 1.0), |(c, s), op| {
            let table = match op.kind {
                LadderKind::Annihilate => &self.lower[op.orbital],
                LadderKind::Create => &self.raise[op.orbital],
            };
            table[c].map(|(r, v)| (r, s * v))
        })
    }

    /// `⟨m| Σ terms |n⟩` restricted to one sector.
    pub fn sector_matrix(&self, terms: &[Term<f64>], basis: &SectorBasis) -> DMatrix<Complex64> {
        let n = basis.len();
        let mut out = DMatrix::<Complex64>::zeros(n, n);
        for (col, s) in basis.states().iter().enumerate() {
            for t in terms {
                if let Some((r, v)) = self.apply(&t.ops, s.bits() as usize) {
                    let row = basis.states().iter().position(|x| x.bits() as usize == r);
                    out[(row.expect("term conserves the sector"), col)] += t.coeff * v;
                }
            }
        }
        out
    }
}

/// `exp(a)` by scaling and squaring with a truncated Taylor series.
pub fn taylor_expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    let norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * n as f64;
    let mut squarings = 0;
    while norm / 2f64.powi(squarings) > 0.5 {
        squarings += 1;
    }
    let scaled = a / Complex64::new(2f64.powi(squarings), 0.0);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Site-space Hamiltonian assembled directly from the parameters and
/// evaluated with the Jordan-Wigner oracle.
pub fn site_hamiltonian(
    jw: &JordanWigner,
    p: &HubbardParams<f64>,
    basis: &SectorBasis,
) -> DMatrix<Complex64> {
    let v = p.sites;
    let mut terms = Vec::new();
    for spin in [Spin::Up, Spin::Down] {
        for i in 0..v {
            for j in 0..v {
                let d = (i as isize - j as isize).unsigned_abs();
                let t = match d.min(v - d) {
                    0 => p.t0,
                    1 => p.t1,
                    2 => p.t2,
                    _ => 0.0,
                };
                if t != 0.0 {
                    terms.push(Term::real(
                        t,
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
        let (up, dn) = (orbital(Spin::Up, i, v), orbital(Spin::Down, i, v));
        terms.push(Term::real(
            p.u,
            vec![
                Ladder::create(up),
                Ladder::annihilate(up),
                Ladder::create(dn),
                Ladder::annihilate(dn),
            ],
        ));
    }
    jw.sector_matrix(&terms, basis)
}

pub fn sorted_eigenvalues(m: DMatrix<Complex64>) -> Vec<f64> {
    let mut e: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e
}

pub fn max_entry_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `{c_p, c†_q}` on one sector, composed through the neighbouring sectors;
/// `None` when the orbitals have different spins.
pub fn anticommutator(
    sites: usize,
    key: SectorKey,
    p: usize,
    q: usize,
) -> Option<DMatrix<Complex64>> {
    let (sp, _) = split_orbital(p, sites);
    let (sq, _) = split_orbital(q, sites);
    if sp != sq {
        return None;
    }
    let one = |op: Ladder| [Term::real(1.0, vec![op])];
    let home = build_sector(sites, key.n_up, key.n_down).unwrap();
    let mut total = DMatrix::<Complex64>::zeros(home.len(), home.len());
    if let Some(up) = key.shifted(sp, 1) {
        let mid = build_sector(sites, up.n_up, up.n_down).unwrap();
        let cq = build_transition(&one(Ladder::create(q)), &home, &mid).unwrap();
        let ap = build_transition(&one(Ladder::annihilate(p)), &mid, &home).unwrap();
        total += ap.compose(&cq).unwrap().to_dense();
    }
    if let Some(dn) = key.shifted(sp, -1) {
        let mid = build_sector(sites, dn.n_up, dn.n_down).unwrap();
        let ap = build_transition(&one(Ladder::annihilate(p)), &home, &mid).unwrap();
        let cq = build_transition(&one(Ladder::create(q)), &mid, &home).unwrap();
        total += cq.compose(&ap).unwrap().to_dense();
    }
    Some(total)
}
