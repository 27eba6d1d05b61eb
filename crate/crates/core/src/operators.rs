//! Photon observables as normal-ordered bilinears and their Fock lifts.
//!
//! Grid operators act per wave vector through the polarization frame; the
//! orbital operators act on spherical-shell channels, where `k × ∇_k` is
//! represented exactly by `iℓ`. On the shell the spin is taken in the fixed
//! frame `(ε1, ε2, ε3) = (x̂, ŷ, ẑ)`, which realizes the tensor split between
//! polarization and orbital labels.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockSpace, Ladder, QuadraticForm, Term};
use crate::matrix::OperatorMatrix;
use crate::mode_space::{
    frame_curl, orbital_matrices, spin_matrices, CartesianGrid, ModeLabel, ModeSet, SphericalShell,
};

type C64 = Complex64;

/// Three Cartesian components of a vector operator.
pub type VectorOp = [OperatorMatrix; 3];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub(crate) fn grid_of(ms: &ModeSet) -> Result<&CartesianGrid> {
    ms.as_grid().ok_or_else(|| Error::ChannelMismatch("operator requires a Cartesian grid mode set".into()))
}

pub(crate) fn shell_of(ms: &ModeSet) -> Result<&SphericalShell> {
    ms.as_shell().ok_or_else(|| Error::ChannelMismatch("operator requires a spherical-shell mode set".into()))
}

/// Channel index of `(mode, λ)`, reported as a channel mismatch when absent.
pub(crate) fn chan(fs: &FockSpace, mode: ModeLabel, pol: u8) -> Result<usize> {
    fs.find(crate::fock::Channel::new(mode, pol))
        .ok_or_else(|| Error::ChannelMismatch(format!("Fock space lacks channel {mode}:λ{pol}")))
}

fn zeros(fs: &FockSpace) -> DMatrix<C64> {
    DMatrix::zeros(fs.n_channels(), fs.n_channels())
}

fn lift3(fs: &FockSpace, forms: [DMatrix<C64>; 3]) -> Result<VectorOp> {
    let [x, y, z] = forms;
    Ok([lift(fs, x)?, lift(fs, y)?, lift(fs, z)?])
}

fn lift(fs: &FockSpace, m: DMatrix<C64>) -> Result<OperatorMatrix> {
    fs.lift_bilinear(&QuadraticForm::on(fs, m)?)
}

fn build3(fs: &FockSpace, terms: [Vec<Term>; 3]) -> Result<VectorOp> {
    let [x, y, z] = terms;
    Ok([fs.build_operator(&x)?, fs.build_operator(&y)?, fs.build_operator(&z)?])
}

/// `Σ_λλ' P_λλ' ⊗ O` on the combined `(l, m) × λ` labeling, with `O` indexed
/// by the shell's label order. Only channels touched by nonzero entries must
/// be present in `fs`.
pub fn shell_tensor_form(
    ms: &ModeSet,
    fs: &FockSpace,
    pol: &[[C64; 4]; 4],
    orb: &DMatrix<C64>,
) -> Result<DMatrix<C64>> {
    let shell = shell_of(ms)?;
    let labels = shell.labels();
    if orb.nrows() != labels.len() || orb.ncols() != labels.len() {
        return Err(Error::DimensionMismatch { expected: labels.len(), got: orb.nrows() });
    }
    let mut m = zeros(fs);
    for (p, row) in pol.iter().enumerate() {
        for (q, &pv) in row.iter().enumerate() {
            if pv == ZERO {
                continue;
            }
            for (i, &(l, mm)) in labels.iter().enumerate() {
                for (j, &(l2, m2)) in labels.iter().enumerate() {
                    let ov = orb[(i, j)];
                    if ov == ZERO {
                        continue;
                    }
                    let a = chan(fs, ModeLabel::Shell { l, m: mm }, p as u8)?;
                    let b = chan(fs, ModeLabel::Shell { l: l2, m: m2 }, q as u8)?;
                    m[(a, b)] += pv * ov;
                }
            }
        }
    }
    Ok(m)
}

fn pol_diag(d: [f64; 4]) -> [[C64; 4]; 4] {
    let mut p = [[ZERO; 4]; 4];
    for (i, v) in d.iter().enumerate() {
        p[i][i] = C64::new(*v, 0.0);
    }
    p
}

fn pol_entries(entries: &[(usize, usize, C64)]) -> [[C64; 4]; 4] {
    let mut p = [[ZERO; 4]; 4];
    for &(r, c, v) in entries {
        p[r][c] += v;
    }
    p
}

/// `ŝ_i` embedded on λ = 1, 2, 3 of a 4×4 polarization block.
fn spin_pol(i: usize) -> [[C64; 4]; 4] {
    let s = spin_matrices()[i];
    let mut p = [[ZERO; 4]; 4];
    for r in 0..3 {
        for c in 0..3 {
            p[r + 1][c + 1] = s[(r, c)];
        }
    }
    p
}

fn orbital(ms: &ModeSet) -> Result<[DMatrix<C64>; 3]> {
    orbital_matrices(shell_of(ms)?.l_max() as i64)
}

fn shell_forms(ms: &ModeSet, fs: &FockSpace, pol: &[[C64; 4]; 4]) -> Result<[DMatrix<C64>; 3]> {
    let l = orbital(ms)?;
    Ok([
        shell_tensor_form(ms, fs, pol, &l[0])?,
        shell_tensor_form(ms, fs, pol, &l[1])?,
        shell_tensor_form(ms, fs, pol, &l[2])?,
    ])
}

/// `H_M = Σ_k ω_k (n₁ + n₂ + n₃ − n₀)` as the lift of `ω·I` over all four
/// polarizations.
pub fn hamiltonian_form(ms: &ModeSet, fs: &FockSpace) -> Result<DMatrix<C64>> {
    let mut m = zeros(fs);
    for label in ms.mode_labels() {
        let w = ms.omega(label).expect("label from this mode set");
        for pol in 0..4 {
            let a = chan(fs, label, pol)?;
            m[(a, a)] = C64::new(w, 0.0);
        }
    }
    Ok(m)
}

pub fn hamiltonian(ms: &ModeSet, fs: &FockSpace) -> Result<OperatorMatrix> {
    lift(fs, hamiltonian_form(ms, fs)?)
}

/// `P_M = Σ_k k (n₁ + n₂ + n₃ − n₀)`.
pub fn momentum(ms: &ModeSet, fs: &FockSpace) -> Result<VectorOp> {
    let grid = grid_of(ms)?;
    let mut forms = [zeros(fs), zeros(fs), zeros(fs)];
    for (idx, k) in grid.modes().iter().enumerate() {
        let kc = k.components();
        for pol in 0..4 {
            let a = chan(fs, ModeLabel::Grid(idx), pol)?;
            for i in 0..3 {
                forms[i][(a, a)] = C64::new(kc[i], 0.0);
            }
        }
    }
    lift3(fs, forms)
}

/// Per-k 3×3 blocks `Σ_λ ŝ_λ ε_i(k, λ)` on channels `(k;1), (k;2), (k;3)`.
pub fn spin_total_forms(ms: &ModeSet, fs: &FockSpace) -> Result<[DMatrix<C64>; 3]> {
    let grid = grid_of(ms)?;
    let s = spin_matrices();
    let mut forms = [zeros(fs), zeros(fs), zeros(fs)];
    for idx in 0..grid.len() {
        let frame = grid.frame(idx);
        let ch: Vec<usize> = (1..=3).map(|p| chan(fs, ModeLabel::Grid(idx), p)).collect::<Result<_>>()?;
        for (i, form) in forms.iter_mut().enumerate() {
            for (lam, sl) in s.iter().enumerate() {
                let e = frame.spatial(lam + 1)[i];
                if e == 0.0 {
                    continue;
                }
                for r in 0..3 {
                    for c in 0..3 {
                        form[(ch[r], ch[c])] += sl[(r, c)] * e;
                    }
                }
            }
        }
    }
    Ok(forms)
}

/// `S_M`.
pub fn spin_total(ms: &ModeSet, fs: &FockSpace) -> Result<VectorOp> {
    lift3(fs, spin_total_forms(ms, fs)?)
}

fn helicity_block(fs: &FockSpace, m: &mut DMatrix<C64>, mode: ModeLabel, weight: f64) -> Result<()> {
    if weight == 0.0 {
        return Ok(());
    }
    let a1 = chan(fs, mode, 1)?;
    let a2 = chan(fs, mode, 2)?;
    m[(a2, a1)] += I * weight;
    m[(a1, a2)] -= I * weight;
    Ok(())
}

/// `S^obs_M = Σ_k i(creator₂a₁ − creator₁a₂) ε(k,3)`.
pub fn spin_obs_forms(ms: &ModeSet, fs: &FockSpace) -> Result<[DMatrix<C64>; 3]> {
    let grid = grid_of(ms)?;
    let mut forms = [zeros(fs), zeros(fs), zeros(fs)];
    for idx in 0..grid.len() {
        let e3 = grid.frame(idx).spatial(3);
        for i in 0..3 {
            helicity_block(fs, &mut forms[i], ModeLabel::Grid(idx), e3[i])?;
        }
    }
    Ok(forms)
}

pub fn spin_obs(ms: &ModeSet, fs: &FockSpace) -> Result<VectorOp> {
    lift3(fs, spin_obs_forms(ms, fs)?)
}

/// `Λ_M = Σ_k i(creator₂a₁ − creator₁a₂)`.
pub fn helicity(ms: &ModeSet, fs: &FockSpace) -> Result<OperatorMatrix> {
    let grid = grid_of(ms)?;
    let mut m = zeros(fs);
    for idx in 0..grid.len() {
        helicity_block(fs, &mut m, ModeLabel::Grid(idx), 1.0)?;
    }
    lift(fs, m)
}

/// Quantum Stokes operators `Σ₀..Σ₃` on the transverse channels.
pub fn stokes_operators(ms: &ModeSet, fs: &FockSpace) -> Result<[OperatorMatrix; 4]> {
    let grid = grid_of(ms)?;
    let mut forms = [zeros(fs), zeros(fs), zeros(fs), zeros(fs)];
    for idx in 0..grid.len() {
        let a1 = chan(fs, ModeLabel::Grid(idx), 1)?;
        let a2 = chan(fs, ModeLabel::Grid(idx), 2)?;
        forms[0][(a1, a1)] = ONE;
        forms[0][(a2, a2)] = ONE;
        forms[1][(a1, a2)] = ONE;
        forms[1][(a2, a1)] = ONE;
        forms[2][(a2, a1)] = I;
        forms[2][(a1, a2)] = -I;
        forms[3][(a1, a1)] = ONE;
        forms[3][(a2, a2)] = -ONE;
    }
    let [f0, f1, f2, f3] = forms;
    Ok([lift(fs, f0)?, lift(fs, f1)?, lift(fs, f2)?, lift(fs, f3)?])
}

/// `L_M = i Σ_λ g^{λλ} creator (k×∇_k) a`, i.e. the lift of `G ⊗ ℓ` with
/// `G = diag(−1, +1, +1, +1)` the channel signs.
pub fn oam_total_forms(ms: &ModeSet, fs: &FockSpace) -> Result<[DMatrix<C64>; 3]> {
    shell_forms(ms, fs, &pol_diag([-1.0, 1.0, 1.0, 1.0]))
}

pub fn oam_total(ms: &ModeSet, fs: &FockSpace) -> Result<VectorOp> {
    lift3(fs, oam_total_forms(ms, fs)?)
}

/// `L^obs_M`: the orbital lift on λ = 1, 2 only.
pub fn oam_obs_forms(ms: &ModeSet, fs: &FockSpace) -> Result<[DMatrix<C64>; 3]> {
    shell_forms(ms, fs, &pol_diag([0.0, 1.0, 1.0, 0.0]))
}

pub fn oam_obs(ms: &ModeSet, fs: &FockSpace) -> Result<VectorOp> {
    lift3(fs, oam_obs_forms(ms, fs)?)
}

/// `L_pure = i Σ (creator₀ (k×∇) a₀ − creator₃ (k×∇) a₃)`.
pub fn l_pure_forms(ms: &ModeSet, fs: &FockSpace) -> Result<[DMatrix<C64>; 3]> {
    shell_forms(ms, fs, &pol_diag([-1.0, 0.0, 0.0, 1.0]))
}

pub fn l_pure(ms: &ModeSet, fs: &FockSpace) -> Result<VectorOp> {
    lift3(fs, l_pure_forms(ms, fs)?)
}

/// Fixed-frame spin `ŝ_i ⊗ 1` on the combined shell labeling.
pub fn shell_spin_forms(ms: &ModeSet, fs: &FockSpace) -> Result<[DMatrix<C64>; 3]> {
    let n = shell_of(ms)?.labels().len();
    let id = DMatrix::identity(n, n);
    Ok([
        shell_tensor_form(ms, fs, &spin_pol(0), &id)?,
        shell_tensor_form(ms, fs, &spin_pol(1), &id)?,
        shell_tensor_form(ms, fs, &spin_pol(2), &id)?,
    ])
}

pub fn shell_spin(ms: &ModeSet, fs: &FockSpace) -> Result<VectorOp> {
    lift3(fs, shell_spin_forms(ms, fs)?)
}

/// Fixed-frame observable spin on the shell: `(0, 0, i(creator₂a₁ − creator₁a₂))`.
pub fn shell_spin_obs_forms(ms: &ModeSet, fs: &FockSpace) -> Result<[DMatrix<C64>; 3]> {
    let n = shell_of(ms)?.labels().len();
    let id = DMatrix::identity(n, n);
    let hel = pol_entries(&[(2, 1, I), (1, 2, -I)]);
    Ok([zeros(fs), zeros(fs), shell_tensor_form(ms, fs, &hel, &id)?])
}

pub fn shell_spin_obs(ms: &ModeSet, fs: &FockSpace) -> Result<VectorOp> {
    lift3(fs, shell_spin_obs_forms(ms, fs)?)
}

/// The two addends of `L_pure,S` built from their mode expansions. The sum
/// vanishes on negation-closed grids.
pub fn l_pure_s_parts(ms: &ModeSet, fs: &FockSpace) -> Result<(VectorOp, VectorOp)> {
    let grid = grid_of(ms)?;
    if !grid.is_negation_closed() {
        return Err(Error::AsymmetricGrid);
    }
    let mut ps1: [Vec<Term>; 3] = Default::default();
    let mut ps2: [Vec<Term>; 3] = Default::default();
    let half_i = C64::new(0.0, 0.5);
    for idx in 0..grid.len() {
        let k = grid.modes()[idx];
        let neg = grid.negation(idx);
        let kmag = k.omega();
        let kc = k.components();
        let nkc = grid.modes()[neg].components();
        let c3 = chan(fs, ModeLabel::Grid(idx), 3)?;
        for lam in 1..=2u8 {
            let al = chan(fs, ModeLabel::Grid(idx), lam)?;
            let al_neg = chan(fs, ModeLabel::Grid(neg), lam)?;
            let d = frame_curl(&k, lam as usize);
            // ∇_k × ε(−k, λ) = −(curl ε_λ)(−k)
            let dn = frame_curl(&grid.modes()[neg], lam as usize).map(|v| -v);
            let same = [
                (ONE, vec![(Ladder::Create, c3), (Ladder::Annihilate, al)]),
                (-ONE, vec![(Ladder::Annihilate, c3), (Ladder::Create, al)]),
            ];
            let paired = [
                (ONE, vec![(Ladder::Create, c3), (Ladder::Create, al_neg)]),
                (-ONE, vec![(Ladder::Annihilate, c3), (Ladder::Annihilate, al_neg)]),
            ];
            // (k·k′)/|k| at k′ = k and k′ = −k
            let w_same = dot(kc, kc) / kmag;
            let w_pair = dot(kc, nkc) / kmag;
            for i in 0..3 {
                for (sgn, word) in &same {
                    push(&mut ps1[i], half_i * kmag * d[i] * sgn, word);
                    push(&mut ps2[i], -half_i * w_same * d[i] * sgn, word);
                }
                for (sgn, word) in &paired {
                    push(&mut ps1[i], half_i * kmag * dn[i] * sgn, word);
                    // The k′ = −k delta flips the sign pattern of the paired terms.
                    push(&mut ps2[i], half_i * w_pair * dn[i] * sgn, word);
                }
            }
        }
    }
    Ok((build3(fs, ps1)?, build3(fs, ps2)?))
}

/// `L_pure,S` = sum of the two addends.
pub fn l_pure_s_cancellation(ms: &ModeSet, fs: &FockSpace) -> Result<VectorOp> {
    let (a, b) = l_pure_s_parts(ms, fs)?;
    Ok([a[0].add(&b[0])?, a[1].add(&b[1])?, a[2].add(&b[2])?])
}

fn push(terms: &mut Vec<Term>, coeff: C64, word: &[(Ladder, usize)]) {
    if coeff != ZERO {
        terms.push(Term::new(coeff, word.to_vec()));
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterRotatingTarget {
    Spin,
    Momentum,
}

/// Only the `a·a` and `creator·creator` terms of the spin or momentum mode
/// expansion, with `ε(−k, λ)` taken from the frame rule at `−k`.
pub fn counter_rotating_part(ms: &ModeSet, fs: &FockSpace, target: CounterRotatingTarget) -> Result<VectorOp> {
    let grid = grid_of(ms)?;
    if !grid.is_negation_closed() {
        return Err(Error::AsymmetricGrid);
    }
    let mut terms: [Vec<Term>; 3] = Default::default();
    let pols: &[u8] = match target {
        CounterRotatingTarget::Spin => &[1, 2, 3],
        CounterRotatingTarget::Momentum => &[0, 1, 2, 3],
    };
    for idx in 0..grid.len() {
        let neg = grid.negation(idx);
        let f = grid.frame(idx);
        let fneg = grid.frame(neg);
        let kc = grid.modes()[idx].components();
        for &l in pols {
            for &lp in pols {
                let a = chan(fs, ModeLabel::Grid(idx), l)?;
                let b = chan(fs, ModeLabel::Grid(neg), lp)?;
                let aa = [(Ladder::Annihilate, a), (Ladder::Annihilate, b)];
                let cc = [(Ladder::Create, a), (Ladder::Create, b)];
                match target {
                    CounterRotatingTarget::Spin => {
                        let x = crate::mode_space::cross3(f.spatial(l as usize), fneg.spatial(lp as usize));
                        for i in 0..3 {
                            push(&mut terms[i], C64::new(0.0, 0.5 * x[i]), &aa);
                            push(&mut terms[i], C64::new(0.0, -0.5 * x[i]), &cc);
                        }
                    }
                    CounterRotatingTarget::Momentum => {
                        let g = crate::mode_space::minkowski(&f.eps[l as usize], &fneg.eps[lp as usize]);
                        for i in 0..3 {
                            push(&mut terms[i], C64::new(0.5 * kc[i] * g, 0.0), &aa);
                            push(&mut terms[i], C64::new(0.5 * kc[i] * g, 0.0), &cc);
                        }
                    }
                }
            }
        }
    }
    build3(fs, terms)
}

/// Checks that `ξ` has one entry per shell label.
pub(crate) fn check_xi(ms: &ModeSet, xi: &[C64]) -> Result<()> {
    let n = shell_of(ms)?.labels().len();
    if xi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: xi.len() });
    }
    Ok(())
}

/// Linear terms `Σ_αβ [ conj(u_α) O_αβ a_{β,λ} + creator_{α,λ} O_αβ u_β ]`
/// over the shell labels for one polarization.
pub(crate) fn linear_terms(
    ms: &ModeSet,
    fs: &FockSpace,
    pol: u8,
    orb: &DMatrix<C64>,
    u: &[C64],
    scale: C64,
) -> Result<Vec<Term>> {
    let labels = shell_of(ms)?.labels();
    let mut out = Vec::new();
    for (a, &(l, m)) in labels.iter().enumerate() {
        for (b, &(l2, m2)) in labels.iter().enumerate() {
            let o = orb[(a, b)];
            if o == ZERO {
                continue;
            }
            let ca = chan(fs, ModeLabel::Shell { l, m }, pol)?;
            let cb = chan(fs, ModeLabel::Shell { l: l2, m: m2 }, pol)?;
            push(&mut out, scale * u[a].conj() * o, &[(Ladder::Annihilate, cb)]);
            push(&mut out, scale * o * u[b], &[(Ladder::Create, ca)]);
        }
    }
    Ok(out)
}

/// Photon part of Chen's Dirac OAM: `Σ (ξ* ℓ a₃ + creator₃ ℓ ξ)`.
pub fn l_d_chen_photon(ms: &ModeSet, fs: &FockSpace, xi: &[C64]) -> Result<VectorOp> {
    check_xi(ms, xi)?;
    let l = orbital(ms)?;
    build3(
        fs,
        [
            linear_terms(ms, fs, 3, &l[0], xi, ONE)?,
            linear_terms(ms, fs, 3, &l[1], xi, ONE)?,
            linear_terms(ms, fs, 3, &l[2], xi, ONE)?,
        ],
    )
}

/// Jaffe–Manohar photon spin on the combined shell labeling.
pub fn spin_jaffe_manohar_forms(ms: &ModeSet, fs: &FockSpace) -> Result<[DMatrix<C64>; 3]> {
    let h = C64::new(0.0, 0.5);
    let x = pol_entries(&[(3, 2, I), (0, 2, -h), (2, 3, -I), (2, 0, h)]);
    let y = pol_entries(&[(1, 3, I), (1, 0, -h), (3, 1, -I), (0, 1, h)]);
    let z = pol_entries(&[(2, 1, I), (1, 2, -I)]);
    tensor_identity3(ms, fs, [x, y, z])
}

/// Chen et al. photon spin on the combined shell labeling.
pub fn spin_chen_forms(ms: &ModeSet, fs: &FockSpace) -> Result<[DMatrix<C64>; 3]> {
    let h = C64::new(0.0, 0.5);
    let x = pol_entries(&[(3, 2, h), (0, 2, -h), (2, 3, -h), (2, 0, h)]);
    let y = pol_entries(&[(1, 3, h), (1, 0, -h), (3, 1, -h), (0, 1, h)]);
    let z = pol_entries(&[(2, 1, I), (1, 2, -I)]);
    tensor_identity3(ms, fs, [x, y, z])
}

fn tensor_identity3(ms: &ModeSet, fs: &FockSpace, pols: [[[C64; 4]; 4]; 3]) -> Result<[DMatrix<C64>; 3]> {
    let n = shell_of(ms)?.labels().len();
    let id = DMatrix::identity(n, n);
    Ok([
        shell_tensor_form(ms, fs, &pols[0], &id)?,
        shell_tensor_form(ms, fs, &pols[1], &id)?,
        shell_tensor_form(ms, fs, &pols[2], &id)?,
    ])
}

/// Jaffe–Manohar photon OAM: `W ⊗ ℓ` with `W` the transverse identity plus
/// the half-weighted longitudinal/scalar mixing block.
pub fn oam_jaffe_manohar_forms(ms: &ModeSet, fs: &FockSpace) -> Result<[DMatrix<C64>; 3]> {
    let h = C64::new(-0.5, 0.0);
    let w = pol_entries(&[(1, 1, ONE), (2, 2, ONE), (3, 3, ONE), (0, 3, h), (3, 0, h)]);
    shell_forms(ms, fs, &w)
}

/// Extra Wakamatsu OAM term sourced by the prescribed charge through `ξ`,
/// in the fixed frame: only the z component survives.
pub fn wakamatsu_extra(ms: &ModeSet, fs: &FockSpace, xi: &[C64]) -> Result<VectorOp> {
    check_xi(ms, xi)?;
    let l = orbital(ms)?;
    let mut z = linear_terms(ms, fs, 1, &l[0], xi, -ONE)?;
    z.extend(linear_terms(ms, fs, 2, &l[1], xi, -ONE)?);
    build3(fs, [Vec::new(), Vec::new(), z])
}

/// Belinfante/Ji photon total angular momentum: `L^obs_M` plus the
/// longitudinal/scalar–transverse mixing of the `E × B` expansion.
pub fn j_belinfante_ji_forms(ms: &ModeSet, fs: &FockSpace) -> Result<[DMatrix<C64>; 3]> {
    let l = orbital(ms)?;
    let obs = oam_obs_forms(ms, fs)?;
    let h = C64::new(0.5, 0.0);
    let py = pol_entries(&[(2, 3, h), (2, 0, -h), (3, 2, h), (0, 2, -h)]);
    let px = pol_entries(&[(1, 3, -h), (1, 0, h), (3, 1, -h), (0, 1, h)]);
    let xz = shell_tensor_form(ms, fs, &py, &l[1])? + shell_tensor_form(ms, fs, &px, &l[0])?;
    let [ox, oy, oz] = obs;
    Ok([ox, oy, oz + xz])
}

/// Lifts a triple of forms.
pub fn lift_forms(fs: &FockSpace, forms: [DMatrix<C64>; 3]) -> Result<VectorOp> {
    lift3(fs, forms)
}

/// Componentwise sum of two vector operators.
pub fn add_vec(a: &VectorOp, b: &VectorOp) -> Result<VectorOp> {
    Ok([a[0].add(&b[0])?, a[1].add(&b[1])?, a[2].add(&b[2])?])
}

/// Componentwise difference of two vector operators.
pub fn sub_vec(a: &VectorOp, b: &VectorOp) -> Result<VectorOp> {
    Ok([a[0].sub(&b[0])?, a[1].sub(&b[1])?, a[2].sub(&b[2])?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_fock, channels_for, Channel, FockOptions};
    use crate::mode_space::{build_cartesian_modeset, build_shell_modeset, WaveVector};

    fn zgrid() -> ModeSet {
        build_cartesian_modeset(&[WaveVector::new(0.0, 0.0, 1.0).unwrap()]).unwrap()
    }

    fn grid_space(ms: &ModeSet, n_max: u32) -> FockSpace {
        build_fock(&channels_for(ms, &[0, 1, 2, 3]), n_max).unwrap()
    }

    fn one_photon(fs: &FockSpace, mode: ModeLabel, pol: u8) -> crate::fock::StateVector {
        fs.vacuum().apply(&fs.creator(Channel::new(mode, pol)).unwrap()).unwrap()
    }

    fn eig(fs: &FockSpace, op: &OperatorMatrix, psi: &crate::fock::StateVector) -> C64 {
        let out = psi.apply(op).unwrap();
        let i = psi.amps.iter().position(|a| a.norm() > 0.5).unwrap();
        let lambda = out.amps[i] / psi.amps[i];
        let resid: f64 = out.amps.iter().zip(&psi.amps).map(|(o, p)| (o - lambda * p).norm()).sum();
        assert!(resid < 1e-12, "not an eigenvector (residual {resid})");
        let _ = fs;
        lambda
    }

    #[test]
    fn hamiltonian_eigenvalues() {
        let ms = zgrid();
        let fs = grid_space(&ms, 1);
        let h = hamiltonian(&ms, &fs).unwrap();
        let g0 = ModeLabel::Grid(0);
        assert_eq!(eig(&fs, &h, &fs.vacuum()), ZERO);
        assert_eq!(eig(&fs, &h, &one_photon(&fs, g0, 1)), ONE);
        assert_eq!(eig(&fs, &h, &one_photon(&fs, g0, 0)), -ONE);
    }

    #[test]
    fn momentum_eigenvalues() {
        let ms = zgrid();
        let fs = grid_space(&ms, 1);
        let p = momentum(&ms, &fs).unwrap();
        let g0 = ModeLabel::Grid(0);
        assert_eq!(eig(&fs, &p[2], &one_photon(&fs, g0, 1)), ONE);
        assert_eq!(eig(&fs, &p[2], &one_photon(&fs, g0, 0)), -ONE);
        assert_eq!(eig(&fs, &p[2], &one_photon(&fs, ModeLabel::Grid(1), 2)), -ONE);
    }

    #[test]
    fn spin_z_on_circular_photon() {
        let ms = zgrid();
        let fs = grid_space(&ms, 1);
        let s = spin_total(&ms, &fs).unwrap();
        let so = spin_obs(&ms, &fs).unwrap();
        let g0 = ModeLabel::Grid(0);
        let plus = one_photon(&fs, g0, 1).add(&one_photon(&fs, g0, 2).scale(I)).unwrap();
        let minus = one_photon(&fs, g0, 1).sub(&one_photon(&fs, g0, 2).scale(I)).unwrap();
        assert!((eig(&fs, &s[2], &plus) - ONE).norm() < 1e-15);
        assert!((eig(&fs, &s[2], &minus) + ONE).norm() < 1e-15);
        assert!((eig(&fs, &so[2], &plus) - ONE).norm() < 1e-15);
    }

    #[test]
    fn spin_z_embeds_s3() {
        let ms = zgrid();
        let fs = grid_space(&ms, 1);
        let forms = spin_total_forms(&ms, &fs).unwrap();
        let s3 = spin_matrices()[2];
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(forms[2][(r + 1, c + 1)], s3[(r, c)]);
            }
        }
    }

    #[test]
    fn helicity_and_stokes() {
        let ms = zgrid();
        let fs = grid_space(&ms, 2);
        let hel = helicity(&ms, &fs).unwrap();
        let st = stokes_operators(&ms, &fs).unwrap();
        assert_eq!(hel, st[2]);
        let lhs = st[1].commutator(&st[2]).unwrap();
        assert!(lhs.sub(&st[3].scale(C64::new(0.0, 2.0))).unwrap().frobenius_on(&fs.bounded_mask()) < 1e-12);
        let g0 = ModeLabel::Grid(0);
        let lin = one_photon(&fs, g0, 1);
        assert!(fs.expectation(&hel, &lin).unwrap().norm() < 1e-15);
    }

    #[test]
    fn non_grid_mode_set_rejected() {
        let ms = build_shell_modeset(1.0, 0).unwrap();
        let fs = build_fock(&channels_for(&ms, &[0, 1, 2, 3]), 1).unwrap();
        assert!(matches!(spin_total(&ms, &fs), Err(Error::ChannelMismatch(_))));
        assert!(matches!(oam_total(&zgrid(), &grid_space(&zgrid(), 1)), Err(Error::ChannelMismatch(_))));
    }

    #[test]
    fn missing_polarization_rejected() {
        let ms = zgrid();
        let fs = build_fock(&channels_for(&ms, &[1, 2]), 1).unwrap();
        assert!(matches!(hamiltonian(&ms, &fs), Err(Error::ChannelMismatch(_))));
        assert!(helicity(&ms, &fs).is_ok());
    }

    fn shell_space(l_max: i64, n_max: u32, total: Option<u32>) -> (ModeSet, FockSpace) {
        let ms = build_shell_modeset(1.0, l_max).unwrap();
        let fs = FockSpace::new(
            &channels_for(&ms, &[0, 1, 2, 3]),
            n_max,
            FockOptions { total_cap: total, ..Default::default() },
        )
        .unwrap();
        (ms, fs)
    }

    #[test]
    fn oam_eigenvalues() {
        let (ms, fs) = shell_space(1, 1, Some(1));
        let l = oam_total(&ms, &fs).unwrap();
        let lp = l_pure(&ms, &fs).unwrap();
        let lobs = oam_obs(&ms, &fs).unwrap();
        let m11 = ModeLabel::Shell { l: 1, m: 1 };
        assert_eq!(eig(&fs, &l[2], &one_photon(&fs, m11, 1)), ONE);
        assert_eq!(eig(&fs, &lobs[2], &one_photon(&fs, m11, 3)), ZERO);
        // The scalar channel picks up g^{00} twice (metric weight and creator sign).
        assert_eq!(eig(&fs, &l[2], &one_photon(&fs, m11, 0)), ONE);
        assert_eq!(eig(&fs, &lp[2], &one_photon(&fs, m11, 0)), ONE);
        for comp in &l {
            assert_eq!(eig(&fs, comp, &one_photon(&fs, ModeLabel::Shell { l: 0, m: 0 }, 2)), ZERO);
        }
        for i in 0..3 {
            assert_eq!(l[i].sub(&lobs[i]).unwrap().sub(&lp[i]).unwrap().nnz(), 0);
        }
    }

    #[test]
    fn l_pure_vanishes_on_transverse_states() {
        let (ms, fs) = shell_space(1, 1, Some(2));
        let lp = l_pure(&ms, &fs).unwrap();
        let m = ModeLabel::Shell { l: 1, m: 0 };
        let psi = one_photon(&fs, m, 1).add(&one_photon(&fs, ModeLabel::Shell { l: 1, m: 1 }, 2)).unwrap();
        for c in &lp {
            assert_eq!(fs.expectation(c, &psi).unwrap(), ZERO);
        }
    }

    #[test]
    fn counter_rotating_parts_cancel() {
        let ms = build_cartesian_modeset(&[WaveVector::new(0.3, -0.4, 1.1).unwrap()]).unwrap();
        let fs = grid_space(&ms, 1);
        for t in [CounterRotatingTarget::Spin, CounterRotatingTarget::Momentum] {
            for c in counter_rotating_part(&ms, &fs, t).unwrap() {
                assert!(c.frobenius_norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn asymmetric_grid_rejected() {
        let g = CartesianGrid::from_modes_unchecked(&[WaveVector::new(0.0, 0.0, 1.0).unwrap()]);
        let ms = ModeSet::CartesianGrid(g);
        let fs = grid_space(&ms, 1);
        assert_eq!(counter_rotating_part(&ms, &fs, CounterRotatingTarget::Spin).err(), Some(Error::AsymmetricGrid));
        assert_eq!(l_pure_s_parts(&ms, &fs).err(), Some(Error::AsymmetricGrid));
    }

    #[test]
    fn l_pure_s_addends_cancel() {
        let ms = build_cartesian_modeset(&[WaveVector::new(0.6, 0.2, 0.9).unwrap()]).unwrap();
        let fs = grid_space(&ms, 1);
        let (a, b) = l_pure_s_parts(&ms, &fs).unwrap();
        assert!(a.iter().any(|c| c.frobenius_norm() > 0.1));
        assert!(b.iter().any(|c| c.frobenius_norm() > 0.1));
        for c in l_pure_s_cancellation(&ms, &fs).unwrap() {
            assert!(c.frobenius_norm() <= 1e-12);
        }
    }
}
