//! Rival decompositions of the photon angular momentum and their claimed
//! commutator algebras.
//!
//! Claimed outcomes are data (`data/decompositions.json`); this module maps
//! every family name in that table to an operator builder. All families are
//! built on the combined `(l, m) × λ` shell labeling.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::mode_space::ModeSet;
use crate::operators::{self as ops, add_vec, lift_forms, shell_of, VectorOp};

type C64 = Complex64;

const TABLE: &str = include_str!("../data/decompositions.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedAlgebra {
    /// `[A_i, A_j] = iε_ijk A_k`.
    Su2,
    /// `[A_i, A_j] = 0`.
    Commuting,
    /// The su(2) relation fails.
    ViolatesSu2,
    /// `[A_i, A_j] = iε_ijk B_k` for the named family `B`.
    ClosesOnto(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyClaim {
    pub name: String,
    pub algebra: ExpectedAlgebra,
    pub anchor: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossClaim {
    pub a: String,
    pub b: String,
    pub commute: bool,
    pub anchor: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSpec {
    pub name: String,
    pub anchor: String,
    pub families: Vec<FamilyClaim>,
    pub cross: Vec<CrossClaim>,
}

#[derive(Debug, Deserialize)]
struct Table {
    decompositions: Vec<DecompositionSpec>,
}

/// All decompositions in table order.
pub fn decomposition_specs() -> &'static [DecompositionSpec] {
    static SPECS: OnceLock<Vec<DecompositionSpec>> = OnceLock::new();
    SPECS.get_or_init(|| {
        let t: Table = serde_json::from_str(TABLE).expect("embedded decomposition table is valid");
        t.decompositions
    })
}

pub fn decomposition_spec(name: &str) -> Result<&'static DecompositionSpec> {
    decomposition_specs()
        .iter()
        .find(|d| d.name == name)
        .ok_or_else(|| Error::UnknownDecomposition(name.to_string()))
}

#[derive(Debug, Clone)]
pub struct OperatorFamily {
    pub name: String,
    pub anchor: String,
    pub components: VectorOp,
    pub expected: ExpectedAlgebra,
}

/// A ξ₀ table on the shell satisfying `ξ_{l,−m} = (−1)^{l+m} conj ξ_{lm}`,
/// nonzero only for `l ≤ 1`.
pub fn default_xi(ms: &ModeSet) -> Result<Vec<C64>> {
    let shell = shell_of(ms)?;
    Ok(shell
        .labels()
        .iter()
        .map(|&(l, m)| match (l, m) {
            (0, 0) => C64::new(0.3, 0.0),
            (1, 0) => C64::new(0.0, 0.4),
            (1, 1) => C64::new(0.2, 0.1),
            (1, -1) => C64::new(0.2, -0.1),
            _ => C64::new(0.0, 0.0),
        })
        .collect())
}

/// Builds one family by name; `xi` feeds the source-dependent families.
pub fn build_family(name: &str, ms: &ModeSet, fs: &FockSpace, xi: &[C64]) -> Result<VectorOp> {
    match name {
        "S_M" => ops::shell_spin(ms, fs),
        "L_M" => ops::oam_total(ms, fs),
        "S_obs" => ops::shell_spin_obs(ms, fs),
        "L_obs" | "L_Chen" => ops::oam_obs(ms, fs),
        "L_pure" => ops::l_pure(ms, fs),
        "J_obs" => add_vec(&ops::oam_obs(ms, fs)?, &ops::shell_spin_obs(ms, fs)?),
        "S_JM" => lift_forms(fs, ops::spin_jaffe_manohar_forms(ms, fs)?),
        "L_JM" => lift_forms(fs, ops::oam_jaffe_manohar_forms(ms, fs)?),
        "S_Chen" | "S_Wak" => lift_forms(fs, ops::spin_chen_forms(ms, fs)?),
        "L_D_Chen" => ops::l_d_chen_photon(ms, fs, xi),
        "L_Wak" => add_vec(&ops::oam_obs(ms, fs)?, &ops::wakamatsu_extra(ms, fs, xi)?),
        "J_BJ" => lift_forms(fs, ops::j_belinfante_ji_forms(ms, fs)?),
        other => Err(Error::UnknownDecomposition(format!("family '{other}'"))),
    }
}

pub fn build_decomposition(spec: &DecompositionSpec, ms: &ModeSet, fs: &FockSpace) -> Result<Vec<OperatorFamily>> {
    build_decomposition_with_source(spec, ms, fs, &default_xi(ms)?)
}

pub fn build_decomposition_with_source(
    spec: &DecompositionSpec,
    ms: &ModeSet,
    fs: &FockSpace,
    xi: &[C64],
) -> Result<Vec<OperatorFamily>> {
    spec.families
        .iter()
        .map(|f| {
            Ok(OperatorFamily {
                name: f.name.clone(),
                anchor: f.anchor.clone(),
                components: build_family(&f.name, ms, fs, xi)?,
                expected: f.algebra.clone(),
            })
        })
        .collect()
}

/// Families indexed by name, for resolving cross claims.
pub fn by_name(families: &[OperatorFamily]) -> BTreeMap<&str, &OperatorFamily> {
    families.iter().map(|f| (f.name.as_str(), f)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{self, Norm};
    use crate::fock::{channels_for, FockOptions};
    use crate::mode_space::build_shell_modeset;

    fn space() -> (ModeSet, FockSpace) {
        let ms = build_shell_modeset(1.0, 1).unwrap();
        let fs = FockSpace::new(
            &channels_for(&ms, &[0, 1, 2, 3]),
            3,
            FockOptions { total_cap: Some(3), ..Default::default() },
        )
        .unwrap();
        (ms, fs)
    }

    #[test]
    fn table_parses_and_names_resolve() {
        let names: Vec<_> = decomposition_specs().iter().map(|d| d.name.as_str()).collect();
        assert_eq!(names, ["canonical", "gauge_invariant", "jaffe_manohar", "chen", "wakamatsu", "belinfante_ji"]);
        let (ms, fs) = space();
        for d in decomposition_specs() {
            let fams = build_decomposition(d, &ms, &fs).unwrap();
            let idx = by_name(&fams);
            for c in &d.cross {
                assert!(idx.contains_key(c.a.as_str()) && idx.contains_key(c.b.as_str()));
            }
        }
    }

    #[test]
    fn expected_algebra_metadata() {
        let alg = |d: &str, f: &str| {
            decomposition_spec(d).unwrap().families.iter().find(|x| x.name == f).unwrap().algebra.clone()
        };
        assert_eq!(alg("canonical", "S_M"), ExpectedAlgebra::Su2);
        assert_eq!(alg("jaffe_manohar", "S_JM"), ExpectedAlgebra::ViolatesSu2);
        assert_eq!(alg("gauge_invariant", "S_obs"), ExpectedAlgebra::Commuting);
    }

    #[test]
    fn unknown_decomposition() {
        assert_eq!(decomposition_spec("nope").err(), Some(Error::UnknownDecomposition("nope".into())));
    }

    #[test]
    fn default_xi_is_conjugate_symmetric() {
        let ms = build_shell_modeset(1.0, 2).unwrap();
        let xi = default_xi(&ms).unwrap();
        let labels = ms.as_shell().unwrap().labels().to_vec();
        for (i, &(l, m)) in labels.iter().enumerate() {
            let j = labels.iter().position(|&x| x == (l, -m)).unwrap();
            let sign = if (l as i32 + m).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            assert_eq!(xi[j], xi[i].conj() * sign);
        }
    }

    #[test]
    fn jaffe_manohar_spin_violates() {
        let (ms, fs) = space();
        let s = build_family("S_JM", &ms, &fs, &default_xi(&ms).unwrap()).unwrap();
        let r = algebra::su2_residual(&s, &fs.mask_total_le(1), Norm::MaxColumn).unwrap();
        assert!(r >= 0.1, "{r}");
    }
}
