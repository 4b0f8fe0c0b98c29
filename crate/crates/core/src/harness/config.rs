use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::fixtures::{CoverSource, SchemeSource};
use crate::resonance::ZetaMethod;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    WeylScaling,
    BoxCounts,
    GrowthBound,
    Factorization,
    CongruenceL0,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::WeylScaling,
        ExperimentKind::BoxCounts,
        ExperimentKind::GrowthBound,
        ExperimentKind::Factorization,
        ExperimentKind::CongruenceL0,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::WeylScaling => "weyl_scaling",
            ExperimentKind::BoxCounts => "box_counts",
            ExperimentKind::GrowthBound => "growth_bound",
            ExperimentKind::Factorization => "factorization",
            ExperimentKind::CongruenceL0 => "congruence_l0",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown experiment `{s}`")))
    }
}

/// Numerical settings shared by every experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Knobs {
    /// Monomial order per disk, 4..=120.
    pub q: usize,
    /// Disk refinement level, 0..=4.
    pub level: usize,
    pub method: ZetaMethod,
    /// Euler-product word cutoff, 1..=16.
    pub word_cutoff: usize,
    /// Root-finder tolerance, in `[1e−14, 1e−2]`.
    pub tol: f64,
    /// Word-length budget for geodesic and subgroup searches, 1..=14.
    pub max_word_len: usize,
    /// Skip the dimension computation and use this `δ`.
    pub delta: Option<f64>,
}

impl Default for Knobs {
    fn default() -> Self {
        Knobs {
            q: 40,
            level: 0,
            method: ZetaMethod::Auto,
            word_cutoff: 12,
            tol: 1e-6,
            max_word_len: 8,
            delta: None,
        }
    }
}

/// Per-experiment sweep parameters; each experiment reads only its own fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub radii: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub heights: Vec<f64>,
    pub grid_radius: f64,
    pub grid_n: usize,
    /// `[re_min, re_max, im_min, im_max]` for factorization samples.
    pub sample_rect: [f64; 4],
    pub samples: usize,
    pub moduli: Vec<u64>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            radii: vec![10.0, 20.0, 40.0],
            sigmas: vec![-2.0, -1.0, 0.0, 0.5],
            heights: vec![0.0, 5.0, 10.0],
            grid_radius: 20.0,
            grid_n: 9,
            sample_rect: [-0.5, 1.5, -6.0, 6.0],
            samples: 20,
            moduli: vec![2, 3, 5],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    /// The sidecar goes to the same path with `.json` appended.
    pub csv: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: SchemeSource,
    #[serde(default = "default_covers")]
    pub covers: Vec<CoverSource>,
    #[serde(default)]
    pub knobs: Knobs,
    #[serde(default)]
    pub params: Params,
    pub output: OutputPaths,
}

fn default_covers() -> Vec<CoverSource> {
    vec![CoverSource::Trivial]
}

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(what.to_string()))
    }
}

impl ExperimentConfig {
    pub fn new(scheme: SchemeSource, covers: Vec<CoverSource>, csv: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            scheme,
            covers,
            knobs: Knobs::default(),
            params: Params::default(),
            output: OutputPaths { csv: csv.into() },
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let k = &self.knobs;
        let p = &self.params;
        check((4..=120).contains(&k.q), "knobs.q must be in 4..=120")?;
        check(k.level <= 4, "knobs.level must be at most 4")?;
        check((1..=16).contains(&k.word_cutoff), "knobs.word_cutoff must be in 1..=16")?;
        check((1e-14..=1e-2).contains(&k.tol), "knobs.tol must be in [1e-14, 1e-2]")?;
        check((1..=14).contains(&k.max_word_len), "knobs.max_word_len must be in 1..=14")?;
        check(k.delta.map_or(true, |d| (0.0..1.0).contains(&d)), "knobs.delta must be in [0, 1)")?;
        check(!self.covers.is_empty(), "at least one cover is required")?;
        check(p.radii.iter().all(|r| (1.0..=200.0).contains(r)), "radii must be in [1, 200]")?;
        check(p.sigmas.iter().all(|s| s.is_finite()), "sigmas must be finite")?;
        check(p.heights.iter().all(|t| t.is_finite()), "heights must be finite")?;
        check(p.grid_radius > 0.0 && p.grid_radius <= 50.0, "grid_radius must be in (0, 50]")?;
        check((2..=101).contains(&p.grid_n), "grid_n must be in 2..=101")?;
        let [x0, x1, y0, y1] = p.sample_rect;
        check(
            p.sample_rect.iter().all(|v| v.is_finite()) && x0 <= x1 && y0 <= y1,
            "sample_rect must be ordered and finite",
        )?;
        check((1..=1000).contains(&p.samples), "samples must be in 1..=1000")?;
        check(p.moduli.iter().all(|q| (1..=200).contains(q)), "moduli must be in 1..=200")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kinds_parse() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.name().parse::<ExperimentKind>().unwrap(), k);
        }
        assert_eq!("weyl-scaling".parse::<ExperimentKind>().unwrap(), ExperimentKind::WeylScaling);
        assert!("weyl".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ExperimentConfig::from_json(
            r#"{"scheme": {"type": "fixture", "spec": "cylinder"}, "output": {"csv": "out.csv"}}"#,
        )
        .unwrap();
        assert_eq!(cfg.covers, vec![CoverSource::Trivial]);
        assert_eq!(cfg.knobs, Knobs::default());
        assert!(ExperimentConfig::from_json(
            r#"{"scheme": {"type": "fixture", "spec": "cylinder"}, "output": {"csv": "o"}, "knobs": {"q": 2}}"#
        )
        .is_err());
        assert!(ExperimentConfig::from_json(
            r#"{"scheme": {"type": "fixture", "spec": "cylinder"}, "output": {"csv": "o"}, "knobs": {"qq": 8}}"#
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn config_round_trips(
            q in 4usize..=120,
            tol in 1e-14f64..1e-2,
            radii in proptest::collection::vec(1.0f64..200.0, 0..4),
            delta in proptest::option::of(0.0f64..1.0),
            modulus in 1u64..=200,
            kind in 0u8..3,
        ) {
            let mut cfg = ExperimentConfig::new(
                SchemeSource::Fixture { spec: "pants:2,2,8".into() },
                vec![
                    CoverSource::Trivial,
                    CoverSource::Regular { spec: "Z2xZ2:1,0;0,1".into() },
                    CoverSource::Congruence { q: modulus, kind },
                ],
                "runs/out.csv",
            );
            cfg.knobs.q = q;
            cfg.knobs.tol = tol;
            cfg.knobs.delta = delta;
            cfg.params.radii = radii;
            let back = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
