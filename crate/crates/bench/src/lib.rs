//! Shared fixtures for the benchmarks.

use photon_am::fields::{self, ClassicalFieldState};
use photon_am::{build_cartesian_modeset, channels_for, FockOptions, FockSpace, ModeSet, WaveVector};

/// The negation-closed grid `{±ẑ}` with all four polarizations.
pub fn symmetric_grid(n_max: u32) -> (ModeSet, FockSpace) {
    let ms = build_cartesian_modeset(&[WaveVector::new(0.0, 0.0, 1.0).unwrap()]).unwrap();
    let fs = FockSpace::new(&channels_for(&ms, &[0, 1, 2, 3]), n_max, FockOptions::default()).unwrap();
    (ms, fs)
}

/// A seeded random classical state on a `n³` grid over a 2π box.
pub fn classical_state(n: usize) -> ClassicalFieldState {
    fields::random_state(1, 2.0 * std::f64::consts::PI, n, 2, 6, true).unwrap()
}
