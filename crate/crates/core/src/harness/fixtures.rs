//! Named schemes and cover sources.
//!
//! Scheme fixtures: `cylinder[:ℓ]`, `pants[:ℓ₁,ℓ₂,sep]`, `integral[:a,b,c,d;a,b,c,d]`.
//! Regular covers: `Z6:1`, `Z2xZ2:1,0;0,1`, or `perm:2,1,3;1,3,2` (1-indexed generator images).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::representations::{
    congruence_action, induced_permutation_rep, integral_generators, integral_scheme, regular_action,
    search_integral_fixture, AbelianCover, CongruenceKind, CosetAction, IntMatrix, UnitaryRep,
};
use crate::scheme::{cylinder_scheme, pants_scheme, SchottkyScheme};

pub const CYLINDER_LENGTH: f64 = 2.0;
/// `(ℓ₁, ℓ₂, separation)` of the default pants.
pub const PANTS: (f64, f64, f64) = (2.0, 2.0, 8.0);
/// Search parameters for the default integral fixture.
pub const INTEGRAL_SEARCH: (i64, f64, [u64; 3]) = (16, 1.5, [2, 3, 5]);

fn numbers(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad number `{x}`")))
        })
        .collect()
}

fn integers(text: &str) -> Result<Vec<i64>> {
    text.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| Error::InvalidParameter(format!("bad integer `{x}`")))
        })
        .collect()
}

/// Integral generators of the default integral fixture.
pub fn integral_fixture_generators() -> Result<Vec<IntMatrix>> {
    let (max_entry, gap, qs) = INTEGRAL_SEARCH;
    search_integral_fixture(max_entry, gap, &qs)
        .map(|g| g.to_vec())
        .ok_or_else(|| Error::Infeasible("integral fixture search found nothing".into()))
}

/// Resolves a fixture name such as `pants:2,2,8`.
pub fn fixture(spec: &str) -> Result<SchottkyScheme<f64>> {
    let (name, args) = match spec.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a)),
        None => (spec.trim(), None),
    };
    match (name, args) {
        ("cylinder", None) => cylinder_scheme(CYLINDER_LENGTH),
        ("cylinder", Some(a)) => match numbers(a)?.as_slice() {
            [ell] => cylinder_scheme(*ell),
            _ => Err(Error::InvalidParameter("cylinder takes one length".into())),
        },
        ("pants", None) => pants_scheme(PANTS.0, PANTS.1, PANTS.2),
        ("pants", Some(a)) => match numbers(a)?.as_slice() {
            [l1, l2, sep] => pants_scheme(*l1, *l2, *sep),
            _ => Err(Error::InvalidParameter("pants takes ℓ₁,ℓ₂,separation".into())),
        },
        ("integral", None) => integral_scheme(&integral_fixture_generators()?),
        ("integral", Some(a)) => {
            let gens = a
                .split(';')
                .map(|m| match integers(m)?.as_slice() {
                    [a, b, c, d] => IntMatrix::new(*a, *b, *c, *d),
                    _ => Err(Error::InvalidParameter(format!("matrix `{m}` needs four entries"))),
                })
                .collect::<Result<Vec<_>>>()?;
            integral_scheme(&gens)
        }
        _ => Err(Error::InvalidParameter(format!("unknown fixture `{spec}`"))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SchemeSource {
    File { path: PathBuf },
    Fixture { spec: String },
}

impl SchemeSource {
    pub fn load(&self) -> Result<SchottkyScheme<f64>> {
        match self {
            SchemeSource::File { path } => SchottkyScheme::load(path)?.validated(),
            SchemeSource::Fixture { spec } => fixture(spec),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CoverSource {
    Trivial,
    File { path: PathBuf },
    Regular { spec: String },
    Congruence { q: u64, kind: u8 },
}

/// A cover ready for use: its action and, for abelian regular covers, the group.
#[derive(Clone, Debug)]
pub struct Cover {
    pub label: String,
    pub action: CosetAction,
    pub abelian: Option<AbelianCover>,
}

impl Cover {
    pub fn degree(&self) -> usize {
        self.action.degree()
    }

    /// Permutation twist, or the trivial character for degree 1.
    pub fn rep(&self) -> UnitaryRep {
        if self.degree() == 1 {
            UnitaryRep::trivial(self.action.rank(), 1)
        } else {
            induced_permutation_rep(&self.action)
        }
    }
}

/// Parses a regular cover spec against a rank-`m` scheme.
pub fn regular_cover(spec: &str) -> Result<(CosetAction, Option<AbelianCover>)> {
    if let Some(perms) = spec.strip_prefix("perm:") {
        let images = perms
            .split(';')
            .map(|p| {
                integers(p)?
                    .into_iter()
                    .map(|x| {
                        usize::try_from(x - 1)
                            .map_err(|_| Error::InvalidParameter("permutation images are 1-indexed".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((regular_action(&images, None)?.action, None))
    } else {
        let g = AbelianCover::parse(spec)?;
        Ok((g.action.clone(), Some(g)))
    }
}

impl CoverSource {
    pub fn label(&self) -> String {
        match self {
            CoverSource::Trivial => "trivial".into(),
            CoverSource::File { path } => format!("file:{}", path.display()),
            CoverSource::Regular { spec } => format!("regular:{spec}"),
            CoverSource::Congruence { q, kind } => format!("congruence:{q},{kind}"),
        }
    }

    pub fn resolve(&self, scheme: &SchottkyScheme<f64>) -> Result<Cover> {
        let m = scheme.rank();
        let (action, abelian) = match self {
            CoverSource::Trivial => {
                let g = AbelianCover::new(vec![1], vec![vec![0]; m])?;
                (g.action.clone(), Some(g))
            }
            CoverSource::File { path } => (CosetAction::load(Path::new(path))?, None),
            CoverSource::Regular { spec } => regular_cover(spec)?,
            CoverSource::Congruence { q, kind } => {
                let gens = integral_generators(scheme)?;
                let cover = congruence_action(&gens, *q, CongruenceKind::from_index(*kind)?)?;
                (cover.action, None)
            }
        };
        if action.rank() != m {
            return Err(Error::InvalidParameter(format!(
                "cover has {} generators, scheme has rank {m}",
                action.rank()
            )));
        }
        Ok(Cover {
            label: self.label(),
            action,
            abelian,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_resolve() {
        assert_eq!(fixture("cylinder").unwrap().rank(), 1);
        assert_eq!(fixture("cylinder:3.5").unwrap().rank(), 1);
        assert_eq!(fixture("pants").unwrap().rank(), 2);
        assert!(fixture("pants:2,2").is_err());
        assert!(fixture("torus").is_err());
        let int = fixture("integral").unwrap();
        assert!(integral_generators(&int).is_ok());
    }

    #[test]
    fn cover_sources() {
        let pants = fixture("pants").unwrap();
        let z3 = CoverSource::Regular { spec: "Z3:1;0".into() }.resolve(&pants).unwrap();
        assert_eq!(z3.degree(), 3);
        assert!(z3.abelian.is_some());
        let s3 = CoverSource::Regular { spec: "perm:2,1,3;1,3,2".into() }.resolve(&pants).unwrap();
        assert_eq!(s3.degree(), 6);
        assert!(s3.abelian.is_none());
        assert!(CoverSource::Regular { spec: "Z3:1".into() }.resolve(&pants).is_err());
        assert!(CoverSource::Congruence { q: 3, kind: 0 }.resolve(&pants).is_err());
        let int = fixture("integral").unwrap();
        let c = CoverSource::Congruence { q: 3, kind: 0 }.resolve(&int).unwrap();
        assert_eq!(c.degree(), 4);
        assert_eq!(CoverSource::Trivial.resolve(&pants).unwrap().rep().dim(), 1);
    }
}
