//! Classical fields on a periodic box.
//!
//! Coherent amplitudes `α(k, λ)` replace the ladder operators in the plane-wave
//! expansions, with box normalization `N_k = 1/√(2ωV)` in place of the
//! continuum prefactor. Sample points sit at cell centres
//! `x_j = −L/2 + (j + ½)h`, symmetric about the origin. Products of two
//! band-limited fields are trigonometric polynomials of twice the bandwidth,
//! so `N ≥ 2·max|n| + 1` makes every Riemann sum below exact up to rounding.

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

use crate::constraints::numeric_records;
use crate::error::{Error, Result};
use crate::fock::{build_fock, Channel, StateVector};
use crate::mode_space::{cross3, dot3, polarization_frame, CartesianGrid, ModeLabel, ModeSet, PolarizationFrame, WaveVector};
use crate::operators;

type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

/// Neumaier-compensated accumulator; fixed summation order keeps reports
/// byte-stable.
#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    sum: f64,
    comp: f64,
}

impl Acc {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeAmplitude {
    pub k: WaveVector,
    /// Reciprocal-lattice index `n` with `k = 2πn/L`.
    pub lattice: [i64; 3],
    /// `α(k, λ)` for λ = 0..3.
    pub alpha: [C64; 4],
    pub frame: PolarizationFrame,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalFieldState {
    box_side: f64,
    n: usize,
    modes: Vec<ModeAmplitude>,
}

fn lattice_index(k: [f64; 3], box_side: f64) -> Result<[i64; 3]> {
    let mut n = [0i64; 3];
    for a in 0..3 {
        let s = k[a] * box_side / (2.0 * PI);
        if (s - s.round()).abs() > 1e-9 * s.abs().max(1.0) {
            return Err(Error::OffLatticeMode(k));
        }
        n[a] = s.round() as i64;
    }
    Ok(n)
}

impl ClassicalFieldState {
    /// Amplitudes given per wave vector; repeated wave vectors are merged.
    pub fn new(box_side: f64, n: usize, entries: &[([f64; 3], [C64; 4])]) -> Result<Self> {
        if !(box_side > 0.0) || n == 0 {
            return Err(Error::InvalidConfig("box side and grid resolution must be positive".into()));
        }
        let mut modes: Vec<ModeAmplitude> = Vec::new();
        for &(kc, alpha) in entries {
            let lattice = lattice_index(kc, box_side)?;
            if let Some(m) = modes.iter_mut().find(|m| m.lattice == lattice) {
                for l in 0..4 {
                    m.alpha[l] += alpha[l];
                }
                continue;
            }
            let k = WaveVector::from_array(kc)?;
            modes.push(ModeAmplitude { frame: polarization_frame(&k), k, lattice, alpha });
        }
        let state = Self { box_side, n, modes };
        let max = state.max_lattice_index();
        if (n as i64) < 2 * max + 1 {
            return Err(Error::BandLimitViolation { n, max_index: max, needed: 2 * max + 1 });
        }
        Ok(state)
    }

    /// Reads `kx ky kz lambda re im` records.
    pub fn from_csv<R: Read>(mut input: R, box_side: f64, n: usize) -> Result<Self> {
        let mut text = String::new();
        input.read_to_string(&mut text)?;
        let mut entries = Vec::new();
        for r in numeric_records(&text, 6)? {
            let lam = r[3];
            if lam.fract() != 0.0 || !(0.0..=3.0).contains(&lam) {
                return Err(Error::Parse(format!("polarization index {lam} not in 0..=3")));
            }
            let mut alpha = [C64::new(0.0, 0.0); 4];
            alpha[lam as usize] = C64::new(r[4], r[5]);
            entries.push(([r[0], r[1], r[2]], alpha));
        }
        Self::new(box_side, n, &entries)
    }

    pub fn box_side(&self) -> f64 {
        self.box_side
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn modes(&self) -> &[ModeAmplitude] {
        &self.modes
    }

    pub fn volume(&self) -> f64 {
        self.box_side.powi(3)
    }

    pub fn max_lattice_index(&self) -> i64 {
        self.modes.iter().flat_map(|m| m.lattice.iter().map(|x| x.abs())).max().unwrap_or(0)
    }

    /// Sample point for flat index `(i·n + j)·n + l`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        grid_point(self.box_side, self.n, idx)
    }

    fn norm_factor(&self, k: &WaveVector) -> f64 {
        1.0 / (2.0 * k.omega() * self.volume()).sqrt()
    }

    /// Keeps only the selected polarizations.
    fn filtered(&self, keep: [bool; 4]) -> Self {
        let mut out = self.clone();
        for m in &mut out.modes {
            for l in 0..4 {
                if !keep[l] {
                    m.alpha[l] = C64::new(0.0, 0.0);
                }
            }
        }
        out
    }

    /// `(λ = 1, 2 part, λ = 0, 3 part)`; the two sum to the input.
    pub fn transverse_split(&self) -> (Self, Self) {
        (self.filtered([false, true, true, false]), self.filtered([true, false, false, true]))
    }
}

fn grid_point(box_side: f64, n: usize, idx: usize) -> [f64; 3] {
    let h = box_side / n as f64;
    let c = |j: usize| -box_side / 2.0 + (j as f64 + 0.5) * h;
    [c(idx / (n * n)), c((idx / n) % n), c(idx % n)]
}

/// A real 3-vector field sampled on the `n³` cell-centre grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub box_side: f64,
    pub n: usize,
    pub data: Vec<[f64; 3]>,
}

impl VectorField {
    pub fn zeros(box_side: f64, n: usize) -> Self {
        Self { box_side, n, data: vec![[0.0; 3]; n * n * n] }
    }

    pub fn cell_volume(&self) -> f64 {
        (self.box_side / self.n as f64).powi(3)
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        grid_point(self.box_side, self.n, idx)
    }

    /// `h³ Σ F`.
    pub fn integral(&self) -> [f64; 3] {
        let mut acc = [Acc::default(); 3];
        for v in &self.data {
            for a in 0..3 {
                acc[a].add(v[a]);
            }
        }
        let dv = self.cell_volume();
        [acc[0].value() * dv, acc[1].value() * dv, acc[2].value() * dv]
    }

    /// `h³ Σ F·G`.
    pub fn inner(&self, other: &VectorField) -> f64 {
        let mut acc = Acc::default();
        for (a, b) in self.data.iter().zip(&other.data) {
            acc.add(dot3(*a, *b));
        }
        acc.value() * self.cell_volume()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().flat_map(|v| v.iter().map(|x| x.abs())).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| [a[0] - b[0], a[1] - b[1], a[2] - b[2]]).collect();
        VectorField { box_side: self.box_side, n: self.n, data }
    }

    /// Writes `x y z sx sy sz` records.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().delimiter(b' ').from_writer(out);
        w.write_record(["x", "y", "z", "sx", "sy", "sz"])?;
        for (idx, v) in self.data.iter().enumerate() {
            let p = self.point(idx);
            w.write_record([p[0], p[1], p[2], v[0], v[1], v[2]].iter().map(|x| format!("{x:e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GriddedFields {
    pub e: VectorField,
    pub b: VectorField,
    /// Spatial part of `A^μ`.
    pub a: VectorField,
    pub a0: Vec<f64>,
    /// Spatial part of `π^μ`.
    pub pi: VectorField,
    pub pi0: Vec<f64>,
}

/// `Σ_k [u(k) e^{ik·x} + c.c.]` for complex 3-vector coefficients `u`.
fn synthesize(state: &ClassicalFieldState, coeff: impl Fn(&ModeAmplitude) -> [C64; 3]) -> VectorField {
    let n = state.n;
    let mut out = VectorField::zeros(state.box_side, n);
    let coeffs: Vec<[C64; 3]> = state.modes.iter().map(&coeff).collect();
    for (idx, slot) in out.data.iter_mut().enumerate() {
        let x = state.point(idx);
        let mut acc = [Acc::default(); 3];
        for (m, u) in state.modes.iter().zip(&coeffs) {
            let ph = dot3(m.k.components(), x);
            let e = C64::new(ph.cos(), ph.sin());
            for a in 0..3 {
                acc[a].add(2.0 * (u[a] * e).re);
            }
        }
        *slot = [acc[0].value(), acc[1].value(), acc[2].value()];
    }
    out
}

fn scalar_part(f: VectorField) -> Vec<f64> {
    f.data.into_iter().map(|v| v[0]).collect()
}

fn combo(frame: &PolarizationFrame, w: [C64; 4]) -> [C64; 3] {
    let mut u = [C64::new(0.0, 0.0); 3];
    for (l, &wl) in w.iter().enumerate().skip(1) {
        let e = frame.spatial(l);
        for a in 0..3 {
            u[a] += wl * e[a];
        }
    }
    u
}

pub fn eval_fields(state: &ClassicalFieldState) -> GriddedFields {
    let zero = C64::new(0.0, 0.0);
    let a = synthesize(state, |m| {
        let nk = state.norm_factor(&m.k);
        combo(&m.frame, m.alpha).map(|x| x * nk)
    });
    let a0 = scalar_part(synthesize(state, |m| [m.alpha[0] * state.norm_factor(&m.k), zero, zero]));
    // π = i Σ ωN [α ε e^{ikx} − c.c.] = Σ [iωN α ε e^{ikx} + c.c.]
    let pi = synthesize(state, |m| {
        let f = I * m.k.omega() * state.norm_factor(&m.k);
        combo(&m.frame, m.alpha).map(|x| x * f)
    });
    let pi0 = scalar_part(synthesize(state, |m| {
        [I * m.k.omega() * state.norm_factor(&m.k) * m.alpha[0], zero, zero]
    }));
    let e = synthesize(state, |m| {
        let f = I * m.k.omega() * state.norm_factor(&m.k);
        let [a0, a1, a2, a3] = m.alpha;
        combo(&m.frame, [zero, a1, a2, a3 - a0]).map(|x| x * f)
    });
    let b = synthesize(state, |m| {
        let f = I * m.k.omega() * state.norm_factor(&m.k);
        let [_, a1, a2, _] = m.alpha;
        combo(&m.frame, [zero, -a2, a1, zero]).map(|x| x * f)
    });
    GriddedFields { e, b, a, a0, pi, pi0 }
}

/// FFT projection of a gridded field onto its transverse (`k·F̂ = 0`) and
/// longitudinal parts.
pub fn transverse_split_field(field: &VectorField) -> Result<(VectorField, VectorField)> {
    let n = field.n;
    let mut spec: Vec<Vec<C64>> = (0..3).map(|a| field.data.iter().map(|v| C64::new(v[a], 0.0)).collect()).collect();
    for s in &mut spec {
        fft3(s, n, false);
    }
    let total: f64 = spec.iter().flat_map(|s| s.iter().map(|x| x.norm_sqr())).sum();
    let freq = |j: usize| if 2 * j < n { j as i64 } else { j as i64 - n as i64 };
    let mut long: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n * n * n]; 3];
    for idx in 0..n * n * n {
        let js = [idx / (n * n), (idx / n) % n, idx % n];
        let q = js.map(|j| freq(j) as f64);
        let v = [spec[0][idx], spec[1][idx], spec[2][idx]];
        let nyquist = n.is_multiple_of(2) && js.iter().any(|&j| 2 * j == n);
        if nyquist {
            let e: f64 = v.iter().map(|x| x.norm_sqr()).sum();
            if e > 1e-24 * total.max(f64::MIN_POSITIVE) {
                let max_index = (n / 2) as i64;
                return Err(Error::BandLimitViolation { n, max_index, needed: 2 * max_index + 1 });
            }
            continue;
        }
        let qq = dot3(q, q);
        if qq == 0.0 {
            // The uniform component has no direction; it is kept transverse.
            continue;
        }
        let proj = (v[0] * q[0] + v[1] * q[1] + v[2] * q[2]) / qq;
        for a in 0..3 {
            long[a][idx] = proj * q[a];
        }
    }
    for s in &mut long {
        fft3(s, n, true);
    }
    let mut l = VectorField::zeros(field.box_side, n);
    for (idx, slot) in l.data.iter_mut().enumerate() {
        *slot = [long[0][idx].re, long[1][idx].re, long[2][idx].re];
    }
    Ok((field.sub(&l), l))
}

/// Largest `|k·F̂(k)|` over the spectrum: the spectral divergence.
pub fn spectral_divergence(field: &VectorField) -> f64 {
    let n = field.n;
    let mut spec: Vec<Vec<C64>> = (0..3).map(|a| field.data.iter().map(|v| C64::new(v[a], 0.0)).collect()).collect();
    for s in &mut spec {
        fft3(s, n, false);
    }
    let freq = |j: usize| if 2 * j < n { j as i64 } else { j as i64 - n as i64 };
    let scale = 2.0 * PI / field.box_side / (n * n * n) as f64;
    (0..n * n * n)
        .map(|idx| {
            let q = [idx / (n * n), (idx / n) % n, idx % n].map(|j| freq(j) as f64);
            ((spec[0][idx] * q[0] + spec[1][idx] * q[1] + spec[2][idx] * q[2]) * scale).norm()
        })
        .fold(0.0, f64::max)
}

/// In-place 3-D DFT on an `n³` array; the inverse is normalized.
fn fft3(data: &mut [C64], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let mut line = vec![C64::new(0.0, 0.0); n];
    for axis in 0..3 {
        let stride = n.pow(2 - axis as u32);
        for base in 0..n * n * n {
            // Visit each line once, from its first element.
            if !(base / stride).is_multiple_of(n) {
                continue;
            }
            for (t, slot) in line.iter_mut().enumerate() {
                *slot = data[base + t * stride];
            }
            fft.process(&mut line);
            for (t, v) in line.iter().enumerate() {
                data[base + t * stride] = *v;
            }
        }
    }
    if inverse {
        let s = 1.0 / (n * n * n) as f64;
        data.iter_mut().for_each(|x| *x *= s);
    }
}

/// Pointwise `E⊥ × A⊥`.
pub fn spin_density_map(state: &ClassicalFieldState) -> VectorField {
    let (t, _) = state.transverse_split();
    let f = eval_fields(&t);
    let mut out = VectorField::zeros(state.box_side, state.n);
    for (slot, (e, a)) in out.data.iter_mut().zip(f.e.data.iter().zip(&f.a.data)) {
        *slot = cross3(*e, *a);
    }
    out
}

/// `∫ d³x E⊥ × A⊥` as a Riemann sum.
pub fn spatial_spin_integral(state: &ClassicalFieldState) -> [f64; 3] {
    spin_density_map(state).integral()
}

/// `Σ_k i(conj α₂ α₁ − conj α₁ α₂) ε(k,3)`.
pub fn mode_spin(state: &ClassicalFieldState) -> [f64; 3] {
    let mut acc = [Acc::default(); 3];
    for m in &state.modes {
        let [_, a1, a2, _] = m.alpha;
        let h = (I * (a2.conj() * a1 - a1.conj() * a2)).re;
        let e3 = m.frame.spatial(3);
        for a in 0..3 {
            acc[a].add(h * e3[a]);
        }
    }
    acc.map(|x| x.value())
}

/// `∫ d³x E⊥^j (x × ∇) A⊥^j`. The weight `x` is not periodic, so the sum is
/// only meaningful when all wave vectors are collinear (fields then depend
/// on one coordinate and boundary terms cancel by symmetry).
pub fn spatial_oam_integral(state: &ClassicalFieldState) -> Result<[f64; 3]> {
    if let Some(first) = state.modes.first() {
        let d = first.k.unit();
        for m in &state.modes[1..] {
            let c = cross3(d, m.k.unit());
            if c.iter().any(|x| x.abs() > 1e-12) {
                return Err(Error::OamNotPeriodic);
            }
        }
    }
    let (t, _) = state.transverse_split();
    let f = eval_fields(&t);
    // ∂_b A^j = Σ [i k_b u^j e^{ikx} + c.c.]
    let grads: Vec<VectorField> = (0..3)
        .map(|b| {
            synthesize(&t, |m| {
                let nk = t.norm_factor(&m.k);
                combo(&m.frame, m.alpha).map(|x| x * nk * I * m.k.components()[b])
            })
        })
        .collect();
    let mut acc = [Acc::default(); 3];
    for idx in 0..f.e.data.len() {
        let x = t.point(idx);
        let e = f.e.data[idx];
        for j in 0..3 {
            let g = [grads[0].data[idx][j], grads[1].data[idx][j], grads[2].data[idx][j]];
            let xg = cross3(x, g);
            for a in 0..3 {
                acc[a].add(e[j] * xg[a]);
            }
        }
    }
    let dv = f.e.cell_volume();
    Ok(acc.map(|x| x.value() * dv))
}

/// `½ ∫ d³x (E² + B²)`.
pub fn grid_energy(state: &ClassicalFieldState) -> f64 {
    let f = eval_fields(state);
    0.5 * (f.e.inner(&f.e) + f.b.inner(&f.b))
}

/// `Σ_k ω (|α₁|² + |α₂|²)`.
pub fn mode_energy_transverse(state: &ClassicalFieldState) -> f64 {
    let mut acc = Acc::default();
    for m in &state.modes {
        acc.add(m.k.omega() * (m.alpha[1].norm_sqr() + m.alpha[2].norm_sqr()));
    }
    acc.value()
}

/// Largest coherent amplitude accepted by the truncated-Fock cross-check.
pub const COHERENT_MAX_ALPHA: f64 = 0.3;
pub const COHERENT_MIN_NMAX: u32 = 4;

/// `⟨S^obs_M⟩` in a truncated product of transverse coherent states.
pub fn coherent_fock_spin(state: &ClassicalFieldState, n_max: u32) -> Result<[f64; 3]> {
    if n_max < COHERENT_MIN_NMAX {
        return Err(Error::InvalidConfig(format!("coherent cross-check needs n_max ≥ {COHERENT_MIN_NMAX}")));
    }
    let (t, _) = state.transverse_split();
    if t.modes.iter().any(|m| m.alpha[1].norm() > COHERENT_MAX_ALPHA || m.alpha[2].norm() > COHERENT_MAX_ALPHA) {
        return Err(Error::InvalidConfig(format!("coherent cross-check needs |α| ≤ {COHERENT_MAX_ALPHA}")));
    }
    let ks: Vec<WaveVector> = t.modes.iter().map(|m| m.k).collect();
    let ms = ModeSet::CartesianGrid(CartesianGrid::from_modes_unchecked(&ks));
    let channels: Vec<Channel> =
        (0..ks.len()).flat_map(|i| [1u8, 2].map(|p| Channel::new(ModeLabel::Grid(i), p))).collect();
    let fs = build_fock(&channels, n_max)?;
    let amp_of = |ch: usize| {
        let m = &t.modes[ch / 2];
        m.alpha[1 + ch % 2]
    };
    let mut fact = vec![1.0f64; n_max as usize + 1];
    for j in 1..fact.len() {
        fact[j] = fact[j - 1] * j as f64;
    }
    let amps: Vec<C64> = (0..fs.dim())
        .map(|i| {
            fs.occupations(i)
                .iter()
                .enumerate()
                .map(|(ch, &occ)| amp_of(ch).powu(occ as u32) / fact[occ as usize].sqrt())
                .product()
        })
        .collect();
    let psi = StateVector::new(amps);
    let s = operators::spin_obs(&ms, &fs)?;
    let mut out = [0.0; 3];
    for a in 0..3 {
        out[a] = fs.expectation(&s[a], &psi)?.re;
    }
    Ok(out)
}

/// Random state with `n_modes` distinct lattice modes, indices in
/// `[-max_index, max_index]`, and amplitudes in the unit square per λ.
/// `with_gauge` also fills λ = 0, 3.
pub fn random_state(seed: u64, box_side: f64, n: usize, max_index: i64, n_modes: usize, with_gauge: bool) -> Result<ClassicalFieldState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: Vec<[i64; 3]> = Vec::new();
    let side = (2 * max_index + 1).pow(3) as usize - 1;
    if n_modes > side {
        return Err(Error::InvalidConfig(format!("only {side} nonzero lattice vectors with |n| ≤ {max_index}")));
    }
    let mut entries = Vec::new();
    while entries.len() < n_modes {
        let l = [(); 3].map(|_| rng.gen_range(-max_index..=max_index));
        if l == [0, 0, 0] || seen.contains(&l) {
            continue;
        }
        seen.push(l);
        let k = l.map(|x| 2.0 * PI * x as f64 / box_side);
        let mut alpha = [C64::new(0.0, 0.0); 4];
        for (lam, slot) in alpha.iter_mut().enumerate() {
            if with_gauge || lam == 1 || lam == 2 {
                *slot = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        entries.push((k, alpha));
    }
    ClassicalFieldState::new(box_side, n, &entries)
}
