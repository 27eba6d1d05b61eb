//! Minimal Dirac sector: spinor matrices, Jordan–Wigner fermionic Fock
//! spaces, and the canonical spin and orbital operators.
//!
//! Sign-string convention: channel 0 is the most significant bit of the
//! basis index, and `c_α` picks up `(−1)^(occupied channels before α)`.
//! Channels are orbital-major: `(orbital, spinor)` with spinor fastest.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::OperatorMatrix;
use crate::mode_space::{orbital_matrices, ModeLabel};

type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Largest fermionic space built by default (2^20).
pub const DEFAULT_FERMION_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SpinorBasis {
    pub beta: Matrix4<C64>,
    pub alpha: [Matrix4<C64>; 3],
    pub gamma0: Matrix4<C64>,
    pub gamma: [Matrix4<C64>; 3],
    /// `Σ̂_i = diag(σ_i, σ_i)`.
    pub sigma: [Matrix4<C64>; 3],
}

fn pauli() -> [[[C64; 2]; 2]; 3] {
    [
        [[ZERO, ONE], [ONE, ZERO]],
        [[ZERO, -I], [I, ZERO]],
        [[ONE, ZERO], [ZERO, -ONE]],
    ]
}

fn blocks(tl: [[C64; 2]; 2], tr: [[C64; 2]; 2], bl: [[C64; 2]; 2], br: [[C64; 2]; 2]) -> Matrix4<C64> {
    let mut m = Matrix4::zeros();
    for r in 0..2 {
        for c in 0..2 {
            m[(r, c)] = tl[r][c];
            m[(r, c + 2)] = tr[r][c];
            m[(r + 2, c)] = bl[r][c];
            m[(r + 2, c + 2)] = br[r][c];
        }
    }
    m
}

/// Dirac representation: `β = [[I,0],[0,−I]]`, `α_i = [[0,σ_i],[σ_i,0]]`,
/// `γ⁰ = β`, `γ^i = βα_i`.
pub fn spinor_matrices() -> SpinorBasis {
    let z = [[ZERO; 2]; 2];
    let id = [[ONE, ZERO], [ZERO, ONE]];
    let mid = [[-ONE, ZERO], [ZERO, -ONE]];
    let p = pauli();
    let beta = blocks(id, z, z, mid);
    let alpha = p.map(|s| blocks(z, s, s, z));
    let gamma = alpha.map(|a| beta * a);
    let sigma = p.map(|s| blocks(s, z, z, s));
    SpinorBasis { beta, alpha, gamma0: beta, gamma, sigma }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FermionChannel {
    /// `Shell{l, m}` for orbital channels, `Grid(i)` for point labels.
    pub orbital: ModeLabel,
    pub spinor: u8,
}

impl std::fmt::Display for FermionChannel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:s{}", self.orbital, self.spinor)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FermionFockSpace {
    channels: Vec<FermionChannel>,
    /// Orbital labels in channel order.
    orbitals: Vec<ModeLabel>,
}

impl FermionFockSpace {
    /// `orbitals × {0,1,2,3}` channels, orbital-major.
    pub fn new(orbitals: &[ModeLabel], dim_cap: usize) -> Result<Self> {
        let n = orbitals.len() * 4;
        if n >= 64 || (1usize << n) > dim_cap {
            return Err(Error::DimensionCapExceeded { dim: 1u128 << n.min(127), cap: dim_cap });
        }
        let channels = orbitals
            .iter()
            .flat_map(|&o| (0..4u8).map(move |s| FermionChannel { orbital: o, spinor: s }))
            .collect();
        Ok(Self { channels, orbitals: orbitals.to_vec() })
    }

    /// Orbital labels `(l, m)` for `0 ≤ l ≤ l_max`, m ascending.
    pub fn shell(l_max: i64, dim_cap: usize) -> Result<Self> {
        if l_max < 0 {
            return Err(Error::NegativeLmax(l_max));
        }
        let labels: Vec<ModeLabel> = (0..=l_max as u32)
            .flat_map(|l| (-(l as i32)..=l as i32).map(move |m| ModeLabel::Shell { l, m }))
            .collect();
        Self::new(&labels, dim_cap)
    }

    pub fn channels(&self) -> &[FermionChannel] {
        &self.channels
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.channels.len()
    }

    pub fn channel_index(&self, ch: FermionChannel) -> Result<usize> {
        self.channels.iter().position(|&c| c == ch).ok_or_else(|| Error::UnknownChannel(ch.to_string()))
    }

    fn bit(&self, alpha: usize) -> usize {
        1 << (self.channels.len() - 1 - alpha)
    }

    /// Occupation bits of basis state `i`, in channel order.
    pub fn occupations(&self, i: usize) -> Vec<u8> {
        (0..self.channels.len()).map(|a| ((i & self.bit(a)) != 0) as u8).collect()
    }

    /// `(−1)^(occupied channels before α)` in basis state `i`.
    fn sign_before(&self, i: usize, alpha: usize) -> f64 {
        let above = !((self.bit(alpha) << 1) - 1) & (self.dim() - 1);
        if (i & above).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Basis index with the given channels occupied.
    pub fn basis_index(&self, occupied: &[usize]) -> usize {
        occupied.iter().fold(0, |acc, &a| acc | self.bit(a))
    }

    fn annihilator_index(&self, alpha: usize) -> OperatorMatrix {
        let b = self.bit(alpha);
        let trip: Vec<(usize, usize, C64)> = (0..self.dim())
            .filter(|i| i & b != 0)
            .map(|i| (i ^ b, i, C64::new(self.sign_before(i, alpha), 0.0)))
            .collect();
        OperatorMatrix::from_triplets(self.dim(), trip)
    }

    /// `Σ c†_α M_αβ c_β`.
    pub fn fermionic_lift(&self, m: &DMatrix<C64>) -> Result<OperatorMatrix> {
        let n = self.channels.len();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: m.nrows() });
        }
        let mut trip = Vec::new();
        for beta in 0..n {
            let bb = self.bit(beta);
            for alpha in 0..n {
                let v = m[(alpha, beta)];
                if v == ZERO {
                    continue;
                }
                let ba = self.bit(alpha);
                for i in 0..self.dim() {
                    if i & bb == 0 {
                        continue;
                    }
                    let j = i ^ bb;
                    if j & ba != 0 {
                        continue;
                    }
                    let s = self.sign_before(i, beta) * self.sign_before(j, alpha);
                    trip.push((j | ba, i, v * s));
                }
            }
        }
        Ok(OperatorMatrix::from_triplets(self.dim(), trip))
    }

    fn orbital_block(&self, orb: &DMatrix<C64>, spin: &Matrix4<C64>) -> DMatrix<C64> {
        let no = self.orbitals.len();
        let mut m = DMatrix::zeros(no * 4, no * 4);
        for a in 0..no {
            for b in 0..no {
                let o = orb[(a, b)];
                if o == ZERO {
                    continue;
                }
                for s in 0..4 {
                    for t in 0..4 {
                        m[(a * 4 + s, b * 4 + t)] = o * spin[(s, t)];
                    }
                }
            }
        }
        m
    }

    /// Position of each shell label in `orbital_matrices(l_max)` order.
    fn shell_positions(&self) -> Result<(i64, Vec<usize>)> {
        let mut l_max = 0i64;
        let mut lm = Vec::with_capacity(self.orbitals.len());
        for o in &self.orbitals {
            match *o {
                ModeLabel::Shell { l, m } => {
                    l_max = l_max.max(l as i64);
                    lm.push((l, m));
                }
                ModeLabel::Grid(_) => {
                    return Err(Error::ChannelMismatch("orbital operators need (l, m) channels".into()));
                }
            }
        }
        let pos = lm.iter().map(|&(l, m)| ((l * l) as i64 + (m + l as i32) as i64) as usize).collect();
        Ok((l_max, pos))
    }
}

/// `(c_α, c†_α)`.
pub fn fermion_ladder(ffs: &FermionFockSpace, ch: FermionChannel) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let a = ffs.annihilator_index(ffs.channel_index(ch)?);
    let c = a.adjoint();
    Ok((a, c))
}

/// `S_D = Σ c† (1 ⊗ Σ̂/2) c`.
pub fn dirac_sam(ffs: &FermionFockSpace) -> Result<[OperatorMatrix; 3]> {
    let sp = spinor_matrices();
    let id = DMatrix::identity(ffs.orbitals.len(), ffs.orbitals.len());
    let half = C64::new(0.5, 0.0);
    let comp = |i: usize| ffs.fermionic_lift(&ffs.orbital_block(&id, &(sp.sigma[i] * half)));
    Ok([comp(0)?, comp(1)?, comp(2)?])
}

/// `L_D = Σ c† (ℓ ⊗ 1₄) c` on `(l, m) × spinor` channels.
pub fn dirac_oam(ffs: &FermionFockSpace) -> Result<[OperatorMatrix; 3]> {
    let (l_max, pos) = ffs.shell_positions()?;
    let full = orbital_matrices(l_max)?;
    let id4 = Matrix4::identity();
    let comp = |i: usize| {
        let sub = DMatrix::from_fn(pos.len(), pos.len(), |r, c| full[i][(pos[r], pos[c])]);
        ffs.fermionic_lift(&ffs.orbital_block(&sub, &id4))
    };
    Ok([comp(0)?, comp(1)?, comp(2)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{self, Norm};

    fn close(a: &Matrix4<C64>, b: &Matrix4<C64>) -> bool {
        (a - b).norm() == 0.0
    }

    #[test]
    fn spinor_identities() {
        let s = spinor_matrices();
        let id = Matrix4::<C64>::identity();
        assert!(close(&(s.beta * s.beta), &id));
        for i in 0..3 {
            for j in 0..3 {
                let anti = s.alpha[i] * s.alpha[j] + s.alpha[j] * s.alpha[i];
                let want = if i == j { id * C64::new(2.0, 0.0) } else { Matrix4::zeros() };
                assert!(close(&anti, &want));
            }
            assert!(close(&s.gamma[i], &(s.beta * s.alpha[i])));
        }
        let ev: Vec<f64> = (0..4).map(|d| s.sigma[2][(d, d)].re).collect();
        assert_eq!(ev, [1.0, -1.0, 1.0, -1.0]);
        let h = C64::new(0.5, 0.0);
        let (x, y, z) = (s.sigma[0] * h, s.sigma[1] * h, s.sigma[2] * h);
        assert!(close(&(x * y - y * x), &(z * I)));
    }

    #[test]
    fn anticommutation_relations() {
        let ffs = FermionFockSpace::new(&[ModeLabel::Grid(0)], 1 << 10).unwrap();
        let ladders: Vec<_> = ffs.channels().iter().map(|&c| fermion_ladder(&ffs, c).unwrap()).collect();
        let id = OperatorMatrix::identity(ffs.dim());
        for (i, (ai, ci)) in ladders.iter().enumerate() {
            assert_eq!(ai.mul(ai).unwrap().nnz(), 0);
            for (j, (aj, cj)) in ladders.iter().enumerate() {
                let ac = ai.anticommutator(cj).unwrap();
                let want = if i == j { id.clone() } else { OperatorMatrix::zeros(ffs.dim()) };
                assert_eq!(ac.sub(&want).unwrap().frobenius_norm(), 0.0);
                assert_eq!(ai.anticommutator(aj).unwrap().frobenius_norm(), 0.0);
                assert_eq!(ci.anticommutator(cj).unwrap().frobenius_norm(), 0.0);
            }
        }
    }

    #[test]
    fn lift_matches_ladder_products() {
        let ffs = FermionFockSpace::new(&[ModeLabel::Grid(0)], 1 << 10).unwrap();
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 2)] = C64::new(0.3, -1.0);
        m[(3, 1)] = C64::new(2.0, 0.5);
        m[(1, 1)] = C64::new(-0.7, 0.0);
        let lifted = ffs.fermionic_lift(&m).unwrap();
        let lad: Vec<_> = ffs.channels().iter().map(|&c| fermion_ladder(&ffs, c).unwrap()).collect();
        let mut want = OperatorMatrix::zeros(ffs.dim());
        for a in 0..4 {
            for b in 0..4 {
                if m[(a, b)] != ZERO {
                    want = want.add(&lad[a].1.mul(&lad[b].0).unwrap().scale(m[(a, b)])).unwrap();
                }
            }
        }
        assert!(lifted.sub(&want).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn single_electron_spin_up() {
        let ffs = FermionFockSpace::new(&[ModeLabel::Grid(0)], 1 << 10).unwrap();
        let s = dirac_sam(&ffs).unwrap();
        let i = ffs.basis_index(&[0]);
        let mut v = vec![ZERO; ffs.dim()];
        v[i] = ONE;
        let out = s[2].apply(&v).unwrap();
        assert_eq!(out[i], C64::new(0.5, 0.0));
    }

    #[test]
    fn spin_and_orbit_close_and_commute() {
        let ffs = FermionFockSpace::shell(1, 1 << 16).unwrap();
        assert_eq!(ffs.dim(), 65536);
        let mask = vec![true; ffs.dim()];
        let s = dirac_sam(&ffs).unwrap();
        let l = dirac_oam(&ffs).unwrap();
        assert!(algebra::su2_residual(&s, &mask, Norm::Frobenius).unwrap() <= 1e-12);
        assert!(algebra::su2_residual(&l, &mask, Norm::Frobenius).unwrap() <= 1e-12);
        assert!(algebra::cross_residual(&s, &l, &mask, Norm::Frobenius).unwrap() <= 1e-12);
    }

    #[test]
    fn errors() {
        let ffs = FermionFockSpace::new(&[ModeLabel::Grid(0)], 1 << 10).unwrap();
        let bad = FermionChannel { orbital: ModeLabel::Grid(3), spinor: 0 };
        assert!(matches!(fermion_ladder(&ffs, bad), Err(Error::UnknownChannel(_))));
        assert!(matches!(dirac_oam(&ffs), Err(Error::ChannelMismatch(_))));
        assert!(matches!(ffs.fermionic_lift(&DMatrix::zeros(3, 3)), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(FermionFockSpace::shell(2, 1 << 20), Err(Error::DimensionCapExceeded { .. })));
    }
}
