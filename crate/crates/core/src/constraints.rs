//! Gupta–Bleuler constraint, its numerical kernel, and gauge-hiding checks.
//!
//! The physical subspace is the kernel of the stacked constraint operators
//! `a₃ − a₀ + ξ₀` (one per mode), computed from a dense SVD. Zero-norm
//! physical states (pure gauge excitations) are kept in the subspace but
//! skipped, and counted, by the expectation checks.

use std::f64::consts::PI;
use std::io::Read;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fock::{FockSpace, Ladder, StateVector, Term};
use crate::matrix::OperatorMatrix;
use crate::mode_space::ModeSet;
use crate::operators::{chan, grid_of, linear_terms, shell_of, VectorOp};

type C64 = Complex64;

/// Largest Fock dimension accepted by the dense kernel computation.
pub const MAX_KERNEL_DIM: usize = 2048;

/// Required ratio between the smallest excluded and largest included
/// singular value.
pub const GAP_FACTOR: f64 = 1e3;

pub const DEFAULT_KERNEL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum ChargeSource {
    /// Samples on an `n³` periodic grid of side `box_side`; point `(i, j, l)`
    /// sits at `(i, j, l)·h` with `h = box_side / n` and is stored at
    /// `rho[(i·n + j)·n + l]`.
    Density { box_side: f64, n: usize, rho: Vec<f64> },
    /// ξ₀ given directly per wave vector.
    XiTable(Vec<([f64; 3], C64)>),
}

impl ChargeSource {
    /// Reads `x y z rho` records (comma or whitespace separated, `#` comments)
    /// on a declared box; points must sit on the sampling lattice.
    pub fn from_density_csv<R: Read>(mut input: R, box_side: f64, n: usize) -> Result<Self> {
        if n == 0 || !(box_side > 0.0) {
            return Err(Error::InvalidConfig("box side and resolution must be positive".into()));
        }
        let mut text = String::new();
        input.read_to_string(&mut text)?;
        let h = box_side / n as f64;
        let mut rho = vec![0.0; n * n * n];
        for rec in numeric_records(&text, 4)? {
            let mut idx = [0usize; 3];
            for a in 0..3 {
                let s = rec[a] / h;
                let r = s.round();
                if (s - r).abs() > 1e-9 * s.abs().max(1.0) {
                    return Err(Error::Parse(format!("point {:?} is off the sampling lattice", &rec[..3])));
                }
                idx[a] = (r as i64).rem_euclid(n as i64) as usize;
            }
            rho[(idx[0] * n + idx[1]) * n + idx[2]] += rec[3];
        }
        Ok(ChargeSource::Density { box_side, n, rho })
    }

    /// Reads `kx ky kz re im` records.
    pub fn from_xi_csv<R: Read>(mut input: R) -> Result<Self> {
        let mut text = String::new();
        input.read_to_string(&mut text)?;
        let table = numeric_records(&text, 5)?
            .into_iter()
            .map(|r| ([r[0], r[1], r[2]], C64::new(r[3], r[4])))
            .collect();
        Ok(ChargeSource::XiTable(table))
    }
}

/// Parses lines of `width` numbers; a first line that fails to parse is
/// treated as a header.
pub(crate) fn numeric_records(text: &str, width: usize) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).collect();
        let parsed: std::result::Result<Vec<f64>, _> = toks.iter().map(|t| t.parse::<f64>()).collect();
        match parsed {
            Ok(v) if v.len() == width => out.push(v),
            Err(_) if out.is_empty() && lineno == first_content_line(text) => continue,
            _ => return Err(Error::Parse(format!("line {}: expected {width} numbers: '{raw}'", lineno + 1))),
        }
    }
    Ok(out)
}

fn first_content_line(text: &str) -> usize {
    text.lines().position(|l| !l.split('#').next().unwrap_or("").trim().is_empty()).unwrap_or(0)
}

/// `ξ₀(k) = (1/ω) √(1/(2ω(2π)³)) Σ_x ρ(x) e^{−ik·x} ΔV` per grid mode.
pub fn xi0_from_charge(source: &ChargeSource, ms: &ModeSet) -> Result<Vec<C64>> {
    let grid = grid_of(ms)?;
    match source {
        ChargeSource::XiTable(table) => {
            let lookup = |k: [f64; 3]| {
                table
                    .iter()
                    .find(|(q, _)| (0..3).all(|i| (q[i] - k[i]).abs() <= 1e-12 * k[i].abs().max(1.0)))
                    .map(|(_, v)| *v)
            };
            let mut out = Vec::with_capacity(grid.len());
            for k in grid.modes() {
                let v = lookup(k.components())
                    .ok_or_else(|| Error::InvalidConfig(format!("ξ₀ table lacks mode {:?}", k.components())))?;
                out.push(v);
            }
            for i in 0..grid.len() {
                let j = grid.negation(i);
                if (out[j] - out[i].conj()).norm() > 1e-12 * out[i].norm().max(1.0) {
                    return Err(Error::InvalidConfig("ξ₀ table violates ξ₀(−k) = conj ξ₀(k)".into()));
                }
            }
            Ok(out)
        }
        ChargeSource::Density { box_side, n, rho } => {
            let n = *n;
            if rho.len() != n * n * n {
                return Err(Error::DimensionMismatch { expected: n * n * n, got: rho.len() });
            }
            let h = box_side / n as f64;
            let dv = h * h * h;
            let mut out = Vec::with_capacity(grid.len());
            for k in grid.modes() {
                let kc = k.components();
                for &kj in &kc {
                    let s = kj * box_side / (2.0 * PI);
                    if (s - s.round()).abs() > 1e-9 * s.abs().max(1.0) {
                        return Err(Error::IncommensurateGrid(kc));
                    }
                }
                // Separable phases e^{−i k_a x_a} on each axis; integer lattice
                // indices keep the phases exactly conjugate between ±k.
                let phases: Vec<Vec<C64>> = (0..3)
                    .map(|a| {
                        let m = (kc[a] * box_side / (2.0 * PI)).round() as i64;
                        (0..n)
                            .map(|j| {
                                let t = -2.0 * PI * ((m * j as i64).rem_euclid(n as i64)) as f64 / n as f64;
                                C64::new(t.cos(), t.sin())
                            })
                            .collect()
                    })
                    .collect();
                let mut sum = C64::new(0.0, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        let pij = phases[0][i] * phases[1][j];
                        for l in 0..n {
                            let r = rho[(i * n + j) * n + l];
                            if r != 0.0 {
                                sum += pij * phases[2][l] * r;
                            }
                        }
                    }
                }
                let w = k.omega();
                let pref = (1.0 / w) * (1.0 / (2.0 * w * (2.0 * PI).powi(3))).sqrt();
                out.push(sum * dv * pref);
            }
            Ok(out)
        }
    }
}

/// One operator `a₃ − a₀ + ξ₀·I` per mode label; `xi` is indexed like
/// `ms.mode_labels()`.
pub fn gb_constraints(ms: &ModeSet, fs: &FockSpace, xi: &[C64]) -> Result<Vec<OperatorMatrix>> {
    let labels = ms.mode_labels();
    if xi.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: labels.len(), got: xi.len() });
    }
    labels
        .iter()
        .zip(xi)
        .map(|(&m, &x)| {
            let a3 = chan(fs, m, 3)?;
            let a0 = chan(fs, m, 0)?;
            let terms = [
                Term::new(C64::new(1.0, 0.0), vec![(Ladder::Annihilate, a3)]),
                Term::new(C64::new(-1.0, 0.0), vec![(Ladder::Annihilate, a0)]),
                Term::identity(x),
            ];
            fs.build_operator(&terms)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct PhysicalSubspace {
    /// Euclidean-orthonormal kernel basis.
    pub basis: Vec<StateVector>,
    pub tol: f64,
    /// Largest singular value kept in the kernel.
    pub included_max: f64,
    /// Smallest singular value above the cut, if any.
    pub excluded_min: Option<f64>,
    /// Largest constraint residual `‖C v‖` over basis vectors and constraints.
    pub certificate: f64,
}

impl PhysicalSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Euclidean distance from `v` to the subspace.
    pub fn distance(&self, v: &StateVector) -> f64 {
        let mut r = v.amps.clone();
        for b in &self.basis {
            let c: C64 = b.amps.iter().zip(&v.amps).map(|(x, y)| x.conj() * y).sum();
            for (ri, bi) in r.iter_mut().zip(&b.amps) {
                *ri -= c * bi;
            }
        }
        r.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Singular values (ascending) and matching right singular vectors of the
/// stacked constraint map.
fn stacked_svd(fs: &FockSpace, constraints: &[OperatorMatrix]) -> Result<Vec<(f64, Vec<C64>)>> {
    let dim = fs.dim();
    if dim > MAX_KERNEL_DIM {
        return Err(Error::DimensionCapExceeded { dim: dim as u128, cap: MAX_KERNEL_DIM });
    }
    let mut a = DMatrix::<C64>::zeros(constraints.len() * dim, dim);
    for (ci, c) in constraints.iter().enumerate() {
        if c.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: c.dim() });
        }
        for (r, col, v) in c.entries() {
            a[(ci * dim + r, col)] = v;
        }
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let mut pairs: Vec<(f64, Vec<C64>)> = svd
        .singular_values
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, vt.row(i).iter().map(|x| x.conj()).collect()))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(pairs)
}

pub fn physical_subspace(fs: &FockSpace, constraints: &[OperatorMatrix], tol: f64) -> Result<PhysicalSubspace> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig("kernel tolerance must be positive".into()));
    }
    if constraints.is_empty() {
        let basis = (0..fs.dim())
            .map(|i| {
                let mut amps = vec![C64::new(0.0, 0.0); fs.dim()];
                amps[i] = C64::new(1.0, 0.0);
                StateVector::new(amps)
            })
            .collect();
        return Ok(PhysicalSubspace { basis, tol, included_max: 0.0, excluded_min: None, certificate: 0.0 });
    }
    let pairs = stacked_svd(fs, constraints)?;
    let split = pairs.iter().position(|(s, _)| *s > tol).unwrap_or(pairs.len());
    let excluded_min = pairs.get(split).map(|p| p.0);
    if split == 0 {
        return Err(Error::NoKernel(tol));
    }
    let included_max = pairs[split - 1].0;
    if let Some(above) = excluded_min {
        let floor = f64::EPSILON * pairs.last().map(|p| p.0).unwrap_or(1.0);
        if above < GAP_FACTOR * included_max.max(floor) {
            return Err(Error::ToleranceAmbiguous { tol, below: included_max, above });
        }
    }
    let basis: Vec<StateVector> = pairs[..split].iter().map(|(_, v)| StateVector::new(v.clone())).collect();
    let mut certificate = 0.0f64;
    for b in &basis {
        for c in constraints {
            let r: f64 = c.apply(&b.amps)?.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            certificate = certificate.max(r);
        }
    }
    Ok(PhysicalSubspace { basis, tol, included_max, excluded_min, certificate })
}

/// The right singular vector with the smallest singular value: the best
/// approximation to a physical state when the truncated kernel is empty.
pub fn least_violating_state(fs: &FockSpace, constraints: &[OperatorMatrix]) -> Result<(f64, StateVector)> {
    let pairs = stacked_svd(fs, constraints)?;
    let (s, v) = pairs.into_iter().next().ok_or(Error::EmptySubspace)?;
    Ok((s, StateVector::new(v)))
}

/// Two vector operators whose expectations should agree on physical states.
#[derive(Debug, Clone)]
pub struct ExpectationPair {
    pub name: String,
    pub lhs: Vec<OperatorMatrix>,
    pub rhs: Vec<OperatorMatrix>,
}

impl ExpectationPair {
    pub fn new(name: &str, lhs: Vec<OperatorMatrix>, rhs: Vec<OperatorMatrix>) -> Self {
        Self { name: name.to_string(), lhs, rhs }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeHidingOutcome {
    /// `(pair name, max |⟨lhs_i⟩ − ⟨rhs_i⟩|)` in input order.
    pub max_diff: Vec<(String, f64)>,
    pub evaluated: usize,
    pub skipped_zero_norm: usize,
}

/// Evaluates every pair on each basis state and on `n_random` random unit
/// combinations of the basis; zero-norm states are skipped and counted.
pub fn verify_gauge_hiding(
    fs: &FockSpace,
    subspace: &PhysicalSubspace,
    pairs: &[ExpectationPair],
    n_random: usize,
    seed: u64,
) -> Result<GaugeHidingOutcome> {
    if subspace.basis.is_empty() {
        return Err(Error::EmptySubspace);
    }
    let mut states: Vec<StateVector> = subspace.basis.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_random {
        let mut amps = vec![C64::new(0.0, 0.0); fs.dim()];
        for b in &subspace.basis {
            let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            for (a, x) in amps.iter_mut().zip(&b.amps) {
                *a += c * x;
            }
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        states.push(StateVector::new(amps.iter().map(|a| a / norm).collect()));
    }
    let mut max_diff: Vec<(String, f64)> = pairs.iter().map(|p| (p.name.clone(), 0.0)).collect();
    let mut evaluated = 0;
    let mut skipped = 0;
    for psi in &states {
        let norm = fs.indefinite_inner(psi, psi)?;
        if norm.norm() <= 1e-10 * psi.euclidean_norm_sqr() {
            skipped += 1;
            continue;
        }
        evaluated += 1;
        for (p, slot) in pairs.iter().zip(max_diff.iter_mut()) {
            for (l, r) in p.lhs.iter().zip(&p.rhs) {
                let d = (fs.expectation(l, psi)? - fs.expectation(r, psi)?).norm();
                slot.1 = slot.1.max(d);
            }
        }
    }
    Ok(GaugeHidingOutcome { max_diff, evaluated, skipped_zero_norm: skipped })
}

/// `ω (creator₃a₃ − creator₀a₀)` summed over modes: the gauge-sector energy,
/// whose expectation vanishes on free physical states.
pub fn gauge_sector_energy(ms: &ModeSet, fs: &FockSpace) -> Result<OperatorMatrix> {
    let mut terms = Vec::new();
    for m in ms.mode_labels() {
        let w = ms.omega(m).expect("label from this mode set");
        let a3 = chan(fs, m, 3)?;
        let a0 = chan(fs, m, 0)?;
        terms.push(Term::bilinear(C64::new(w, 0.0), a3, a3));
        terms.push(Term::bilinear(C64::new(-w, 0.0), a0, a0));
    }
    fs.build_operator(&terms)
}

/// The ξ₀-bilinear that `L_pure` reduces to on physical states:
/// `−Σ [ξ* ℓ a₃ + creator₃ ℓ ξ + ξ* ℓ ξ]`.
pub fn l_pure_reduction(ms: &ModeSet, fs: &FockSpace, xi: &[C64]) -> Result<VectorOp> {
    crate::operators::check_xi(ms, xi)?;
    let l = crate::mode_space::orbital_matrices(shell_of(ms)?.l_max() as i64)?;
    let mut out = Vec::with_capacity(3);
    for li in &l {
        let mut terms = linear_terms(ms, fs, 3, li, xi, C64::new(-1.0, 0.0))?;
        let xv = nalgebra::DVector::from_column_slice(xi);
        let c = (xv.adjoint() * li * &xv)[(0, 0)];
        terms.push(Term::identity(-c));
        out.push(fs.build_operator(&terms)?);
    }
    let [x, y, z]: [OperatorMatrix; 3] = out.try_into().expect("three components");
    Ok([x, y, z])
}
