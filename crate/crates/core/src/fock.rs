//! Truncated bosonic Fock spaces over (mode, polarization) channels with an
//! indefinite metric.
//!
//! Basis order is channel-major lexicographic: channel 0 is the most
//! significant digit of the occupation tuple, so the basis index of an
//! untruncated-total space is the base-`(n_max+1)` number formed by the
//! occupations. With a total-occupation cap the surviving tuples keep the
//! same relative order.
//!
//! The creator on channel α is `s_α · bᵀ` where `b` is the lowering matrix
//! and `s_α` the channel sign, so `[a_α, creator_α] = s_α` below the
//! truncation edge. Every operator built here is the product of these
//! truncated ladder matrices, word by word.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::OperatorMatrix;
use crate::mode_space::{channel_sign, ModeLabel, ModeSet};

type C64 = Complex64;

/// Default upper bound on the Fock dimension.
pub const DEFAULT_DIM_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Channel {
    pub mode: ModeLabel,
    pub pol: u8,
}

impl Channel {
    pub fn new(mode: ModeLabel, pol: u8) -> Self {
        Self { mode, pol }
    }
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:λ{}", self.mode, self.pol)
    }
}

/// All `(mode, λ)` channels of a mode set, mode-major, λ in the given order.
pub fn channels_for(ms: &ModeSet, pols: &[u8]) -> Vec<Channel> {
    ms.mode_labels().into_iter().flat_map(|m| pols.iter().map(move |&p| Channel::new(m, p))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Annihilate,
    Create,
}

/// A coefficient times a word of ladder operators, written in operator order
/// (the rightmost letter acts first). The empty word is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: C64,
    pub word: Vec<(Ladder, usize)>,
}

impl Term {
    pub fn new(coeff: C64, word: Vec<(Ladder, usize)>) -> Self {
        Self { coeff, word }
    }

    pub fn identity(coeff: C64) -> Self {
        Self { coeff, word: Vec::new() }
    }

    /// `coeff · creator_α · a_β`.
    pub fn bilinear(coeff: C64, alpha: usize, beta: usize) -> Self {
        Self { coeff, word: vec![(Ladder::Create, alpha), (Ladder::Annihilate, beta)] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockOptions {
    pub dim_cap: usize,
    /// Optional cap on the total occupation summed over channels.
    pub total_cap: Option<u32>,
}

impl Default for FockOptions {
    fn default() -> Self {
        Self { dim_cap: DEFAULT_DIM_CAP, total_cap: None }
    }
}

#[derive(Debug, Clone)]
pub struct FockSpace {
    channels: Vec<Channel>,
    signs: Vec<f64>,
    n_max: u32,
    total_cap: Option<u32>,
    dim: usize,
    occ: Vec<u8>,
    index: Option<HashMap<u128, usize>>,
}

impl PartialEq for FockSpace {
    fn eq(&self, other: &Self) -> bool {
        self.channels == other.channels && self.n_max == other.n_max && self.total_cap == other.total_cap
    }
}

pub fn build_fock(channels: &[Channel], n_max: u32) -> Result<FockSpace> {
    FockSpace::new(channels, n_max, FockOptions::default())
}

impl FockSpace {
    pub fn new(channels: &[Channel], n_max: u32, opts: FockOptions) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::InvalidConfig("Fock space needs at least one channel".into()));
        }
        if n_max < 1 || n_max > u8::MAX as u32 - 1 {
            return Err(Error::InvalidConfig(format!("n_max must lie in 1..=254, got {n_max}")));
        }
        for (i, c) in channels.iter().enumerate() {
            if c.pol > 3 {
                return Err(Error::UnknownChannel(c.to_string()));
            }
            if channels[..i].contains(c) {
                return Err(Error::InvalidConfig(format!("duplicate channel {c}")));
            }
        }
        let nc = channels.len();
        let total_cap = opts.total_cap.filter(|&t| (t as u64) < n_max as u64 * nc as u64);
        let dim = count_states(nc, n_max, total_cap);
        if dim > opts.dim_cap as u128 {
            return Err(Error::DimensionCapExceeded { dim, cap: opts.dim_cap });
        }
        let dim = dim as usize;
        let base = n_max as u128 + 1;
        if total_cap.is_some() && (nc as f64) * (base as f64).log2() >= 127.0 {
            return Err(Error::InvalidConfig("occupation key overflows 128 bits".into()));
        }
        let mut occ = Vec::with_capacity(dim * nc);
        let mut index = total_cap.map(|_| HashMap::with_capacity(dim));
        let mut cur = vec![0u8; nc];
        enumerate(&mut cur, 0, n_max as u8, total_cap.unwrap_or(u32::MAX), &mut |t| {
            if let Some(map) = index.as_mut() {
                map.insert(radix_key(t, base), map.len());
            }
            occ.extend_from_slice(t);
        });
        debug_assert_eq!(occ.len(), dim * nc);
        let signs = channels.iter().map(|c| channel_sign(c.pol)).collect();
        Ok(Self { channels: channels.to_vec(), signs, n_max, total_cap, dim, occ, index })
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn total_cap(&self) -> Option<u32> {
        self.total_cap
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Channel signs `s_α = −g_λλ`.
    pub fn metric_signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn channel_index(&self, ch: Channel) -> Result<usize> {
        self.find(ch).ok_or_else(|| Error::UnknownChannel(ch.to_string()))
    }

    pub fn find(&self, ch: Channel) -> Option<usize> {
        self.channels.iter().position(|c| *c == ch)
    }

    /// Occupation tuple of basis state `i`.
    pub fn occupations(&self, i: usize) -> &[u8] {
        let nc = self.channels.len();
        &self.occ[i * nc..(i + 1) * nc]
    }

    pub fn total_occupation(&self, i: usize) -> u32 {
        self.occupations(i).iter().map(|&n| n as u32).sum()
    }

    /// Basis index of an occupation tuple, if it lies inside the space.
    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        if occ.len() != self.channels.len() || occ.iter().any(|&n| n as u32 > self.n_max) {
            return None;
        }
        let base = self.n_max as u128 + 1;
        match &self.index {
            None => Some(radix_key(occ, base) as usize),
            Some(map) => map.get(&radix_key(occ, base)).copied(),
        }
    }

    /// Columns whose total occupation is at most `max_total`.
    pub fn mask_total_le(&self, max_total: u32) -> Vec<bool> {
        (0..self.dim).map(|i| self.total_occupation(i) <= max_total).collect()
    }

    /// The subspace on which number-conserving bilinears and their products
    /// are free of truncation effects: total occupation ≤ n_max − 1.
    pub fn bounded_mask(&self) -> Vec<bool> {
        self.mask_total_le(self.n_max - 1)
    }

    /// Applies a ladder word to basis state `col`; `None` if the image leaves
    /// the truncated space at any step.
    fn apply_word(&self, col: usize, word: &[(Ladder, usize)], scratch: &mut Vec<u8>) -> Option<(usize, f64)> {
        scratch.clear();
        scratch.extend_from_slice(self.occupations(col));
        // Accumulate the integer product under the square root so that
        // bilinears like creator_α a_α come out exact.
        let mut radicand: u128 = 1;
        let mut sign = 1.0;
        let mut total: u32 = scratch.iter().map(|&n| n as u32).sum();
        let tcap = self.total_cap.unwrap_or(u32::MAX);
        for &(kind, ch) in word.iter().rev() {
            let n = scratch[ch] as u32;
            match kind {
                Ladder::Annihilate => {
                    if n == 0 {
                        return None;
                    }
                    radicand *= n as u128;
                    scratch[ch] -= 1;
                    total -= 1;
                }
                Ladder::Create => {
                    if n + 1 > self.n_max || total + 1 > tcap {
                        return None;
                    }
                    radicand *= (n + 1) as u128;
                    sign *= self.signs[ch];
                    scratch[ch] += 1;
                    total += 1;
                }
            }
        }
        self.index_of(scratch).map(|row| (row, sign * (radicand as f64).sqrt()))
    }

    /// Matrix of a sum of ladder words.
    pub fn build_operator(&self, terms: &[Term]) -> Result<OperatorMatrix> {
        for t in terms {
            if let Some(&(_, ch)) = t.word.iter().find(|(_, ch)| *ch >= self.channels.len()) {
                return Err(Error::UnknownChannel(format!("channel index {ch}")));
            }
        }
        let mut entries = Vec::new();
        let mut scratch = Vec::with_capacity(self.channels.len());
        for col in 0..self.dim {
            for t in terms {
                if let Some((row, amp)) = self.apply_word(col, &t.word, &mut scratch) {
                    entries.push((row, col, t.coeff * amp));
                }
            }
        }
        Ok(OperatorMatrix::from_triplets(self.dim, entries))
    }

    pub fn annihilator(&self, ch: Channel) -> Result<OperatorMatrix> {
        let i = self.channel_index(ch)?;
        self.build_operator(&[Term::new(C64::new(1.0, 0.0), vec![(Ladder::Annihilate, i)])])
    }

    /// Metric-adjoint creation operator: `s_α · (lowering)ᵀ`.
    pub fn creator(&self, ch: Channel) -> Result<OperatorMatrix> {
        let i = self.channel_index(ch)?;
        self.build_operator(&[Term::new(C64::new(1.0, 0.0), vec![(Ladder::Create, i)])])
    }

    /// η = diag((−1)^(scalar occupation)).
    pub fn metric_operator(&self) -> OperatorMatrix {
        OperatorMatrix::diagonal(&self.metric_diagonal())
    }

    pub fn metric_diagonal(&self) -> Vec<C64> {
        let scalar: Vec<usize> = (0..self.channels.len()).filter(|&c| self.channels[c].pol == 0).collect();
        (0..self.dim)
            .map(|i| {
                let n: u32 = scalar.iter().map(|&c| self.occupations(i)[c] as u32).sum();
                C64::new(if n.is_multiple_of(2) { 1.0 } else { -1.0 }, 0.0)
            })
            .collect()
    }

    /// `Σ_αβ creator_α M_αβ a_β`.
    pub fn lift_bilinear(&self, q: &QuadraticForm) -> Result<OperatorMatrix> {
        if q.dim() != self.channels.len() {
            return Err(Error::DimensionMismatch { expected: self.channels.len(), got: q.dim() });
        }
        self.build_operator(&q.terms())
    }

    pub fn vacuum(&self) -> StateVector {
        self.basis_state(&vec![0; self.channels.len()]).expect("vacuum is always present")
    }

    pub fn basis_state(&self, occ: &[u8]) -> Result<StateVector> {
        let i = self.index_of(occ).ok_or_else(|| Error::InvalidConfig(format!("occupation {occ:?} outside space")))?;
        let mut amps = vec![C64::new(0.0, 0.0); self.dim];
        amps[i] = C64::new(1.0, 0.0);
        Ok(StateVector { amps })
    }

    /// `φ† η ψ`.
    pub fn indefinite_inner(&self, phi: &StateVector, psi: &StateVector) -> Result<C64> {
        self.check_state(phi)?;
        self.check_state(psi)?;
        let eta = self.metric_diagonal();
        Ok(phi.amps.iter().zip(&psi.amps).zip(&eta).map(|((a, b), e)| a.conj() * e * b).sum())
    }

    /// `(ψ†ηOψ)/(ψ†ηψ)`.
    pub fn expectation(&self, op: &OperatorMatrix, psi: &StateVector) -> Result<C64> {
        let norm = self.indefinite_inner(psi, psi)?;
        if norm.norm() <= 1e-12 * psi.euclidean_norm_sqr().max(f64::MIN_POSITIVE) {
            return Err(Error::ZeroNormState);
        }
        let o_psi = StateVector { amps: op.apply(&psi.amps)? };
        Ok(self.indefinite_inner(psi, &o_psi)? / norm)
    }

    fn check_state(&self, s: &StateVector) -> Result<()> {
        if s.amps.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: s.amps.len() });
        }
        Ok(())
    }
}

fn radix_key(t: &[u8], base: u128) -> u128 {
    t.iter().fold(0u128, |acc, &n| acc * base + n as u128)
}

fn enumerate(cur: &mut [u8], pos: usize, n_max: u8, budget: u32, visit: &mut impl FnMut(&[u8])) {
    if pos == cur.len() {
        visit(cur);
        return;
    }
    for n in 0..=n_max.min(budget.min(255) as u8) {
        cur[pos] = n;
        enumerate(cur, pos + 1, n_max, budget - n as u32, visit);
    }
    cur[pos] = 0;
}

/// Number of occupation tuples with per-channel cap `n_max` and optional total cap.
fn count_states(nc: usize, n_max: u32, total_cap: Option<u32>) -> u128 {
    match total_cap {
        None => (0..nc).try_fold(1u128, |acc, _| acc.checked_mul(n_max as u128 + 1)).unwrap_or(u128::MAX),
        Some(t) => {
            let t = t as usize;
            let mut ways = vec![0u128; t + 1];
            ways[0] = 1;
            for _ in 0..nc {
                let mut next = vec![0u128; t + 1];
                for (s, w) in ways.iter().enumerate() {
                    for n in 0..=(n_max as usize).min(t - s) {
                        next[s + n] = next[s + n].saturating_add(*w);
                    }
                }
                ways = next;
            }
            ways.iter().fold(0u128, |a, b| a.saturating_add(*b))
        }
    }
}

/// Single-particle matrix over channels together with the channel signs.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub m: DMatrix<C64>,
    pub g: Vec<f64>,
}

impl QuadraticForm {
    pub fn new(m: DMatrix<C64>, g: Vec<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        if g.len() != m.nrows() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), got: g.len() });
        }
        Ok(Self { m, g })
    }

    /// Form over the channels of `fs`.
    pub fn on(fs: &FockSpace, m: DMatrix<C64>) -> Result<Self> {
        Self::new(m, fs.metric_signs().to_vec())
    }

    pub fn zeros(fs: &FockSpace) -> Self {
        let n = fs.n_channels();
        Self { m: DMatrix::zeros(n, n), g: fs.metric_signs().to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    fn g_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(self.g.len(), self.g.iter().map(|&s| C64::new(s, 0.0))))
    }

    /// The form whose lift equals `[lift(self), lift(other)]`: `MGN − NGM`.
    pub fn lifted_commutator(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        let g = self.g_matrix();
        let m = &self.m * &g * &other.m - &other.m * &g * &self.m;
        Ok(Self { m, g: self.g.clone() })
    }

    pub fn terms(&self) -> Vec<Term> {
        let n = self.dim();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let v = self.m[(a, b)];
                if v != C64::new(0.0, 0.0) {
                    out.push(Term::bilinear(v, a, b));
                }
            }
        }
        out
    }
}

/// Complex amplitudes over the occupation basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Self {
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn euclidean_norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&self, op: &OperatorMatrix) -> Result<Self> {
        Ok(Self { amps: op.apply(&self.amps)? })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { amps: self.amps.iter().map(|a| a * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(Self { amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn grid_channels(n: usize, pols: &[u8]) -> Vec<Channel> {
        (0..n).flat_map(|m| pols.iter().map(move |&p| Channel::new(ModeLabel::Grid(m), p))).collect()
    }

    #[test]
    fn dimensions() {
        assert_eq!(build_fock(&grid_channels(2, &[0, 1, 2, 3]), 1).unwrap().dim(), 256);
        assert_eq!(build_fock(&grid_channels(2, &[0, 1, 2, 3]), 2).unwrap().dim(), 6561);
        let err = build_fock(&grid_channels(10, &[1, 2, 3]), 2).unwrap_err();
        assert!(matches!(err, Error::DimensionCapExceeded { .. }));
    }

    #[test]
    fn total_cap_counts() {
        let ch = grid_channels(9, &[0, 1, 2, 3]);
        let fs = FockSpace::new(&ch, 1, FockOptions { total_cap: Some(2), ..Default::default() }).unwrap();
        assert_eq!(fs.dim(), 1 + 36 + 36 * 35 / 2);
        let fs = FockSpace::new(&ch[..3], 2, FockOptions { total_cap: Some(2), ..Default::default() }).unwrap();
        assert_eq!(fs.dim(), 10);
        for i in 0..fs.dim() {
            assert_eq!(fs.index_of(fs.occupations(i)), Some(i));
        }
    }

    #[test]
    fn basis_order_is_lexicographic() {
        let fs = build_fock(&grid_channels(1, &[1, 2]), 2).unwrap();
        assert_eq!(fs.occupations(0), &[0, 0]);
        assert_eq!(fs.occupations(1), &[0, 1]);
        assert_eq!(fs.occupations(3), &[1, 0]);
        assert_eq!(fs.occupations(8), &[2, 2]);
    }

    #[test]
    fn transverse_commutator_is_identity_below_edge() {
        let ch = Channel::new(ModeLabel::Grid(0), 1);
        let fs = build_fock(&[ch], 2).unwrap();
        let a = fs.annihilator(ch).unwrap();
        let cr = fs.creator(ch).unwrap();
        let comm = a.commutator(&cr).unwrap().to_dense();
        let want = [1.0, 1.0, -2.0]; // the top state sits on the truncation edge
        for (i, w) in want.iter().enumerate() {
            assert!((comm[(i, i)] - c(*w)).norm() < 1e-14);
        }
    }

    #[test]
    fn scalar_channel_negative_norm() {
        let ch = Channel::new(ModeLabel::Grid(0), 0);
        let fs = build_fock(&[ch], 1).unwrap();
        let a = fs.annihilator(ch).unwrap();
        let cr = fs.creator(ch).unwrap();
        let vac = fs.vacuum();
        let one = vac.apply(&cr).unwrap();
        assert_eq!(fs.indefinite_inner(&vac, &one.apply(&a).unwrap()).unwrap(), c(-1.0));
        assert_eq!(fs.indefinite_inner(&one, &one).unwrap(), c(-1.0));
        let eta = fs.metric_operator().to_dense();
        assert_eq!(eta[(0, 0)], c(1.0));
        assert_eq!(eta[(1, 1)], c(-1.0));
    }

    #[test]
    fn creator_is_metric_adjoint() {
        let ch = grid_channels(1, &[0, 1, 2, 3]);
        let fs = build_fock(&ch, 2).unwrap();
        let eta = fs.metric_operator();
        assert_eq!(eta.mul(&eta).unwrap(), OperatorMatrix::identity(fs.dim()));
        for &c in &ch {
            let via_eta = eta.mul(&fs.annihilator(c).unwrap().adjoint()).unwrap().mul(&eta).unwrap();
            assert_eq!(via_eta, fs.creator(c).unwrap());
        }
    }

    #[test]
    fn distinct_channels_commute() {
        let ch = grid_channels(1, &[0, 1]);
        let fs = build_fock(&ch, 2).unwrap();
        let comm = fs.annihilator(ch[0]).unwrap().commutator(&fs.creator(ch[1]).unwrap()).unwrap();
        assert_eq!(comm.nnz(), 0);
    }

    #[test]
    fn null_norm_state_rejected() {
        let ch = vec![Channel::new(ModeLabel::Grid(0), 3), Channel::new(ModeLabel::Grid(0), 0)];
        let fs = build_fock(&ch, 1).unwrap();
        let c3 = fs.creator(ch[0]).unwrap();
        let c0 = fs.creator(ch[1]).unwrap();
        let psi = fs.vacuum().apply(&c3.sub(&c0).unwrap()).unwrap();
        assert_eq!(fs.indefinite_inner(&psi, &psi).unwrap(), c(0.0));
        let id = OperatorMatrix::identity(fs.dim());
        assert_eq!(fs.expectation(&id, &psi), Err(Error::ZeroNormState));
        assert_eq!(fs.expectation(&id, &fs.vacuum()).unwrap(), c(1.0));
    }

    #[test]
    fn number_operator_lift() {
        let ch = grid_channels(1, &[1, 2]);
        let fs = build_fock(&ch, 2).unwrap();
        let q = QuadraticForm::on(&fs, DMatrix::identity(2, 2)).unwrap();
        let n = fs.lift_bilinear(&q).unwrap().to_dense();
        for i in 0..fs.dim() {
            assert_eq!(n[(i, i)], c(fs.total_occupation(i) as f64));
        }
        let bad = QuadraticForm::new(DMatrix::identity(3, 3), vec![1.0; 3]).unwrap();
        assert!(matches!(fs.lift_bilinear(&bad), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn lift_matches_ladder_products() {
        let ch = grid_channels(1, &[0, 3]);
        let fs = build_fock(&ch, 2).unwrap();
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(0.3, -0.7);
        m[(1, 1)] = c(2.0);
        let lifted = fs.lift_bilinear(&QuadraticForm::on(&fs, m).unwrap()).unwrap();
        let a1 = fs.annihilator(ch[1]).unwrap();
        let c0 = fs.creator(ch[0]).unwrap();
        let c1 = fs.creator(ch[1]).unwrap();
        let manual = c0
            .mul(&a1)
            .unwrap()
            .scale(C64::new(0.3, -0.7))
            .add(&c1.mul(&a1).unwrap().scale(c(2.0)))
            .unwrap();
        assert!(lifted.sub(&manual).unwrap().frobenius_norm() < 1e-14);
    }

    #[test]
    fn unknown_channel() {
        let fs = build_fock(&grid_channels(1, &[1]), 1).unwrap();
        let ch = Channel::new(ModeLabel::Grid(3), 1);
        assert!(matches!(fs.annihilator(ch), Err(Error::UnknownChannel(_))));
    }
}
