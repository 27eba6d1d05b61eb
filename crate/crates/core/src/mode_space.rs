//! Discrete mode sets, polarization frames, the metric signature and the
//! exact single-particle spin and orbital generators.
//!
//! Units are natural (ħ = c = ε₀ = 1); angular momenta come out in units of ħ.

use std::fmt::Write as _;

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;

use crate::error::{Error, Result};

type C64 = Complex64;

/// Diagonal of the Minkowski metric, diag(+1, −1, −1, −1).
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Threshold below which |ẑ × k̂| is treated as zero by the frame rule.
pub const FRAME_AXIS_EPS: f64 = 1e-8;

/// Metric signature and the per-polarization commutator sign.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MetricSignature;

impl MetricSignature {
    pub fn g(&self, mu: usize, nu: usize) -> f64 {
        if mu == nu {
            METRIC[mu]
        } else {
            0.0
        }
    }

    /// Sign `s` with `[a_λ, a‡_λ] = s·I`; equals `−g_λλ`.
    pub fn channel_sign(&self, lambda: u8) -> f64 {
        channel_sign(lambda)
    }
}

pub fn channel_sign(lambda: u8) -> f64 {
    -METRIC[lambda as usize]
}

/// A nonzero wave vector together with its frequency ω = |k|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveVector {
    k: [f64; 3],
    omega: f64,
}

impl WaveVector {
    pub fn new(kx: f64, ky: f64, kz: f64) -> Result<Self> {
        Self::from_array([kx, ky, kz])
    }

    pub fn from_array(k: [f64; 3]) -> Result<Self> {
        let omega = norm3(k);
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::ZeroWaveVector);
        }
        Ok(Self { k, omega })
    }

    pub fn components(&self) -> [f64; 3] {
        self.k
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn unit(&self) -> [f64; 3] {
        scale3(self.k, 1.0 / self.omega)
    }

    pub fn negated(&self) -> Self {
        Self { k: scale3(self.k, -1.0), omega: self.omega }
    }
}

/// Four polarization four-vectors ε(k,λ), indexed `eps[λ][μ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationFrame {
    pub eps: [[f64; 4]; 4],
}

impl PolarizationFrame {
    /// Spatial part of ε(k,λ).
    pub fn spatial(&self, lambda: usize) -> [f64; 3] {
        let e = self.eps[lambda];
        [e[1], e[2], e[3]]
    }

    /// ε_μ(k,λ) ε^μ(k,λ′).
    pub fn minkowski(&self, lambda: usize, lambda2: usize) -> f64 {
        minkowski(&self.eps[lambda], &self.eps[lambda2])
    }
}

pub fn minkowski(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

/// Deterministic frame: ε1 ∝ ẑ×k̂ (x̂ on the z axis), ε2 = k̂×ε1, ε3 = k̂.
pub fn polarization_frame(k: &WaveVector) -> PolarizationFrame {
    let khat = k.unit();
    let zk = cross3([0.0, 0.0, 1.0], khat);
    let nzk = norm3(zk);
    let e1 = if nzk > FRAME_AXIS_EPS { scale3(zk, 1.0 / nzk) } else { [1.0, 0.0, 0.0] };
    let e2 = cross3(khat, e1);
    let four = |v: [f64; 3]| [0.0, v[0], v[1], v[2]];
    PolarizationFrame { eps: [[1.0, 0.0, 0.0, 0.0], four(e1), four(e2), four(khat)] }
}

/// Curl in k-space of the spatial polarization vector, ∇_k × ε(k,λ).
///
/// Off the z axis ε1 = φ̂ and ε2 = −θ̂, so the curls are ẑ/ρ and −φ̂/|k|.
/// On the axis the frame rule is not smooth and zero is returned.
pub fn frame_curl(k: &WaveVector, lambda: usize) -> [f64; 3] {
    let [kx, ky, _] = k.components();
    let rho = (kx * kx + ky * ky).sqrt();
    if rho <= FRAME_AXIS_EPS * k.omega() {
        return [0.0; 3];
    }
    match lambda {
        1 => [0.0, 0.0, 1.0 / rho],
        2 => {
            let phi = [-ky / rho, kx / rho, 0.0];
            scale3(phi, -1.0 / k.omega())
        }
        _ => [0.0; 3],
    }
}

/// Channel label for the orbital/mode part of a Fock channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeLabel {
    /// Index into a Cartesian grid.
    Grid(usize),
    /// Spherical-harmonic channel on a single shell.
    Shell { l: u32, m: i32 },
}

impl std::fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModeLabel::Grid(i) => write!(f, "k{i}"),
            ModeLabel::Shell { l, m } => write!(f, "l{l}m{m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CartesianGrid {
    modes: Vec<WaveVector>,
    frames: Vec<PolarizationFrame>,
    negation: Vec<usize>,
}

impl CartesianGrid {
    pub fn modes(&self) -> &[WaveVector] {
        &self.modes
    }

    pub fn frame(&self, i: usize) -> &PolarizationFrame {
        &self.frames[i]
    }

    /// Index of −k for mode `i`.
    pub fn negation(&self, i: usize) -> usize {
        self.negation[i]
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Builds a grid from an explicit list without negation completion.
    /// The negation map points each mode at its partner when present and
    /// at `usize::MAX` otherwise; operations that need closure check it.
    pub fn from_modes_unchecked(list: &[WaveVector]) -> Self {
        let modes = list.to_vec();
        let frames = modes.iter().map(polarization_frame).collect();
        let negation = (0..modes.len())
            .map(|i| {
                let nk = modes[i].negated().components();
                modes.iter().position(|m| approx_eq3(m.components(), nk)).unwrap_or(usize::MAX)
            })
            .collect();
        Self { modes, frames, negation }
    }

    pub fn is_negation_closed(&self) -> bool {
        self.negation.iter().enumerate().all(|(i, &j)| j < self.len() && self.negation[j] == i)
    }

    /// Modes listed once per ± pair (the lower index of each pair).
    pub fn half_list(&self) -> Vec<WaveVector> {
        (0..self.len()).filter(|&i| self.negation[i] > i).map(|i| self.modes[i]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphericalShell {
    radius: f64,
    l_max: u32,
    labels: Vec<(u32, i32)>,
}

impl SphericalShell {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    /// `(l, m)` in increasing l, then increasing m.
    pub fn labels(&self) -> &[(u32, i32)] {
        &self.labels
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModeSet {
    CartesianGrid(CartesianGrid),
    SphericalShell(SphericalShell),
}

impl ModeSet {
    pub fn mode_labels(&self) -> Vec<ModeLabel> {
        match self {
            ModeSet::CartesianGrid(g) => (0..g.len()).map(ModeLabel::Grid).collect(),
            ModeSet::SphericalShell(s) => {
                s.labels.iter().map(|&(l, m)| ModeLabel::Shell { l, m }).collect()
            }
        }
    }

    pub fn as_grid(&self) -> Option<&CartesianGrid> {
        match self {
            ModeSet::CartesianGrid(g) => Some(g),
            _ => None,
        }
    }

    pub fn as_shell(&self) -> Option<&SphericalShell> {
        match self {
            ModeSet::SphericalShell(s) => Some(s),
            _ => None,
        }
    }

    /// Frequency of a mode label.
    pub fn omega(&self, label: ModeLabel) -> Option<f64> {
        match (self, label) {
            (ModeSet::CartesianGrid(g), ModeLabel::Grid(i)) => g.modes.get(i).map(|k| k.omega()),
            (ModeSet::SphericalShell(s), ModeLabel::Shell { .. }) => Some(s.radius),
            _ => None,
        }
    }
}

/// Completes a half list with the negated vectors: output order is
/// `k_0, −k_0, k_1, −k_1, ...`.
pub fn build_cartesian_modeset(half_list: &[WaveVector]) -> Result<ModeSet> {
    if half_list.is_empty() {
        return Err(Error::InvalidConfig("empty mode list".into()));
    }
    let mut modes: Vec<WaveVector> = Vec::with_capacity(2 * half_list.len());
    for k in half_list {
        let kc = k.components();
        if modes.iter().any(|m| approx_eq3(m.components(), kc)) {
            return Err(Error::DuplicateMode(kc));
        }
        modes.push(*k);
        modes.push(k.negated());
    }
    let frames = modes.iter().map(polarization_frame).collect();
    let negation = (0..modes.len()).map(|i| i ^ 1).collect();
    Ok(ModeSet::CartesianGrid(CartesianGrid { modes, frames, negation }))
}

pub fn build_shell_modeset(radius: f64, l_max: i64) -> Result<ModeSet> {
    if l_max < 0 {
        return Err(Error::NegativeLmax(l_max));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::ZeroWaveVector);
    }
    let l_max = l_max as u32;
    let labels = shell_labels(l_max);
    Ok(ModeSet::SphericalShell(SphericalShell { radius, l_max, labels }))
}

fn shell_labels(l_max: u32) -> Vec<(u32, i32)> {
    (0..=l_max).flat_map(|l| (-(l as i32)..=l as i32).map(move |m| (l, m))).collect()
}

/// The SO(3) generators acting on the (ε1, ε2, ε3) polarization triple.
pub fn spin_matrices() -> [Matrix3<C64>; 3] {
    let o = C64::new(0.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        Matrix3::new(o, o, o, o, o, -i, o, i, o),
        Matrix3::new(o, o, i, o, o, o, -i, o, o),
        Matrix3::new(o, -i, o, i, o, o, o, o, o),
    ]
}

/// Orbital generators ℓ_x, ℓ_y, ℓ_z on the `(l, m)` channels of a shell,
/// block-diagonal in l with the standard ladder elements.
pub fn orbital_matrices(l_max: i64) -> Result<[DMatrix<C64>; 3]> {
    if l_max < 0 {
        return Err(Error::NegativeLmax(l_max));
    }
    let labels = shell_labels(l_max as u32);
    let n = labels.len();
    let mut lp = DMatrix::<C64>::zeros(n, n);
    let mut lz = DMatrix::<C64>::zeros(n, n);
    for (col, &(l, m)) in labels.iter().enumerate() {
        lz[(col, col)] = C64::from(m as f64);
        if m < l as i32 {
            let lf = l as f64;
            let mf = m as f64;
            // ℓ₊|l,m⟩ = √(l(l+1) − m(m+1)) |l,m+1⟩; channels are contiguous in m.
            lp[(col + 1, col)] = C64::from((lf * (lf + 1.0) - mf * (mf + 1.0)).sqrt());
        }
    }
    let lm = lp.adjoint();
    let half = C64::new(0.5, 0.0);
    let lx = (&lp + &lm) * half;
    let ly = (&lp - &lm) * C64::new(0.0, -0.5);
    Ok([lx, ly, lz])
}

/// Parses the flat mode-set text format: either `shell <|k|> <lmax>` or one
/// `kx ky kz` line per mode of the half list. `#` starts a comment.
pub fn parse_modeset(text: &str) -> Result<ModeSet> {
    let mut half = Vec::new();
    let mut shell: Option<ModeSet> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
        let bad = || Error::Parse(format!("mode set line {}: '{}'", lineno + 1, raw));
        if toks[0] == "shell" {
            if toks.len() != 3 || shell.is_some() || !half.is_empty() {
                return Err(bad());
            }
            let r: f64 = toks[1].parse().map_err(|_| bad())?;
            let l: i64 = toks[2].parse().map_err(|_| bad())?;
            shell = Some(build_shell_modeset(r, l)?);
        } else {
            if toks.len() != 3 || shell.is_some() {
                return Err(bad());
            }
            let mut k = [0.0; 3];
            for (dst, t) in k.iter_mut().zip(&toks) {
                *dst = t.parse().map_err(|_| bad())?;
            }
            half.push(WaveVector::from_array(k)?);
        }
    }
    match shell {
        Some(s) => Ok(s),
        None => build_cartesian_modeset(&half),
    }
}

/// Inverse of [`parse_modeset`]; grids are written as their half list.
pub fn serialize_modeset(ms: &ModeSet) -> String {
    let mut out = String::new();
    match ms {
        ModeSet::SphericalShell(s) => {
            let _ = writeln!(out, "shell {} {}", s.radius, s.l_max);
        }
        ModeSet::CartesianGrid(g) => {
            for k in g.half_list() {
                let [x, y, z] = k.components();
                let _ = writeln!(out, "{x} {y} {z}");
            }
        }
    }
    out
}

pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub(crate) fn scale3(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn approx_eq3(a: [f64; 3], b: [f64; 3]) -> bool {
    let scale = norm3(a).max(norm3(b)).max(1.0);
    (0..3).all(|i| (a[i] - b[i]).abs() <= 1e-12 * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comm(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
        a * b - b * a
    }

    #[test]
    fn frame_on_z_axis() {
        let k = WaveVector::new(0.0, 0.0, 1.0).unwrap();
        let f = polarization_frame(&k);
        assert_eq!(f.eps[0], [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(f.spatial(1), [1.0, 0.0, 0.0]);
        assert_eq!(f.spatial(2), [0.0, 1.0, 0.0]);
        assert_eq!(f.spatial(3), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn frame_orthonormal_and_complete() {
        let k = WaveVector::new(0.3, -1.2, 0.7).unwrap();
        let f = polarization_frame(&k);
        for a in 0..4 {
            for b in 0..4 {
                let want = if a == b { METRIC[a] } else { 0.0 };
                assert!((f.minkowski(a, b) - want).abs() <= 1e-14);
            }
        }
        for mu in 0..4 {
            for nu in 0..4 {
                let s: f64 = (0..4).map(|l| METRIC[l] * f.eps[l][mu] * f.eps[l][nu]).sum();
                let want = if mu == nu { METRIC[mu] } else { 0.0 };
                assert!((s - want).abs() <= 1e-14);
            }
        }
        let c = cross3(f.spatial(1), f.spatial(2));
        for i in 0..3 {
            assert!((c[i] - f.spatial(3)[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_vector_rejected() {
        assert_eq!(WaveVector::new(0.0, 0.0, 0.0), Err(Error::ZeroWaveVector));
    }

    #[test]
    fn cartesian_completion() {
        let ms = build_cartesian_modeset(&[WaveVector::new(0.0, 0.0, 1.0).unwrap()]).unwrap();
        let g = ms.as_grid().unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.modes()[1].components(), [0.0, 0.0, -1.0]);
        assert_eq!(g.modes()[1].omega(), 1.0);
        assert!(g.is_negation_closed());
    }

    #[test]
    fn duplicate_negation_rejected() {
        let list = [WaveVector::new(1.0, 0.0, 0.0).unwrap(), WaveVector::new(-1.0, 0.0, 0.0).unwrap()];
        assert!(matches!(build_cartesian_modeset(&list), Err(Error::DuplicateMode(_))));
    }

    #[test]
    fn spin_matrix_entries() {
        let s = spin_matrices();
        assert_eq!(s[2][(0, 1)], C64::new(0.0, -1.0));
        assert_eq!(s[2][(1, 0)], C64::new(0.0, 1.0));
        let c = s[0] * s[1] - s[1] * s[0];
        assert_eq!(c, s[2] * C64::new(0.0, 1.0));
    }

    #[test]
    fn spin_z_eigenvalues() {
        let s3 = spin_matrices()[2];
        // ŝ₃ is Hermitian; its spectrum from the 2x2 block [[0,−i],[i,0]] plus a zero.
        let h = DMatrix::from_iterator(3, 3, s3.iter().cloned());
        let eig = nalgebra::SymmetricEigen::new(h).eigenvalues;
        let mut ev: Vec<f64> = eig.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in ev.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn orbital_lmax0_is_zero() {
        let l = orbital_matrices(0).unwrap();
        for m in &l {
            assert_eq!(m.shape(), (1, 1));
            assert_eq!(m[(0, 0)], C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn orbital_lz_l1_block() {
        let l = orbital_matrices(1).unwrap();
        let d: Vec<f64> = (1..4).map(|i| l[2][(i, i)].re).collect();
        assert_eq!(d, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn orbital_su2_and_casimir() {
        let l = orbital_matrices(3).unwrap();
        let i = C64::new(0.0, 1.0);
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            let r = comm(&l[a], &l[b]) - &l[c] * i;
            assert!(r.norm() <= 1e-14, "{}", r.norm());
        }
        let cas = &l[0] * &l[0] + &l[1] * &l[1] + &l[2] * &l[2];
        for (idx, (ll, _)) in shell_labels(3).iter().enumerate() {
            let want = (*ll as f64) * (*ll as f64 + 1.0);
            assert!((cas[(idx, idx)].re - want).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_lmax() {
        assert_eq!(orbital_matrices(-1).err(), Some(Error::NegativeLmax(-1)));
    }

    #[test]
    fn frame_curl_matches_finite_differences() {
        let k0 = [0.4, -0.9, 0.6];
        let h = 1e-5;
        for lambda in 1..=2 {
            let eps_at = |k: [f64; 3]| polarization_frame(&WaveVector::from_array(k).unwrap()).spatial(lambda);
            let d = |j: usize, i: usize| {
                let mut p = k0;
                let mut m = k0;
                p[j] += h;
                m[j] -= h;
                (eps_at(p)[i] - eps_at(m)[i]) / (2.0 * h)
            };
            let fd = [d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0)];
            let an = frame_curl(&WaveVector::from_array(k0).unwrap(), lambda);
            for i in 0..3 {
                assert!((fd[i] - an[i]).abs() < 1e-7, "λ={lambda} i={i}: {} vs {}", fd[i], an[i]);
            }
        }
    }

    #[test]
    fn text_roundtrip() {
        let ms = parse_modeset("# grid\n0 0 1\n1 0 0\n").unwrap();
        assert_eq!(ms.as_grid().unwrap().len(), 4);
        let again = parse_modeset(&serialize_modeset(&ms)).unwrap();
        assert_eq!(ms, again);
        let sh = parse_modeset("shell 1.5 2").unwrap();
        assert_eq!(sh.as_shell().unwrap().labels().len(), 9);
        assert_eq!(parse_modeset(&serialize_modeset(&sh)).unwrap(), sh);
    }
}
