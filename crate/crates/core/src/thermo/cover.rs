use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scheme::{Disk, SchottkyScheme};
use crate::words::inv;

pub const DEFAULT_DISK_CAP: usize = 200_000;

/// A disk `E = γ_{x₀}⁻¹⋯γ_{x_{n−1}}⁻¹(𝒟_{x_n})` identified by its address `[x₀, …, x_n]`,
/// a reduced word of length `level + 1`. It lies inside `𝒟_{x₀}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverDisk {
    pub disk: Disk<f64>,
    pub address: Vec<usize>,
}

impl CoverDisk {
    pub fn parent(&self) -> usize {
        self.address[0]
    }
}

/// Level-`n` refinement of the scheme disks by admissible inverse branches.
#[derive(Clone, Debug, Serialize)]
pub struct DiskCover {
    level: usize,
    rank: usize,
    disks: Vec<CoverDisk>,
    /// `transitions[u][a] = Some(v)` when branch `a` is admissible on disk `u`
    /// and maps it into disk `v`.
    transitions: Vec<Vec<Option<usize>>>,
}

impl DiskCover {
    /// The `2m` scheme disks.
    pub fn base(scheme: &SchottkyScheme<f64>) -> Self {
        Self::refine(scheme, 0).expect("level 0 never overflows")
    }

    pub fn refine(scheme: &SchottkyScheme<f64>, level: usize) -> Result<Self> {
        Self::refine_with_cap(scheme, level, DEFAULT_DISK_CAP)
    }

    pub fn refine_with_cap(scheme: &SchottkyScheme<f64>, level: usize, cap: usize) -> Result<Self> {
        let m = scheme.rank();
        let count = (2 * m) as f64 * ((2 * m - 1) as f64).powi(level as i32);
        if count > cap as f64 {
            return Err(Error::RefinementOverflow {
                count: count.min(usize::MAX as f64) as usize,
                cap,
            });
        }
        let mut disks: Vec<CoverDisk> = scheme
            .disks()
            .iter()
            .enumerate()
            .map(|(k, d)| CoverDisk {
                disk: *d,
                address: vec![k],
            })
            .collect();
        for _ in 0..level {
            let mut next = Vec::with_capacity(disks.len() * (2 * m - 1));
            for e in &disks {
                for a in 0..2 * m {
                    if a == inv(e.parent(), m) {
                        continue;
                    }
                    let image = e.disk.image_under(scheme.branch(a)).ok_or(Error::BranchPoleInDisk {
                        disk: e.parent(),
                    })?;
                    let mut address = Vec::with_capacity(e.address.len() + 1);
                    address.push(a);
                    address.extend_from_slice(&e.address);
                    next.push(CoverDisk { disk: image, address });
                }
            }
            disks = next;
        }
        disks.sort_by(|x, y| x.address.cmp(&y.address));
        let index: HashMap<&[usize], usize> =
            disks.iter().enumerate().map(|(i, e)| (e.address.as_slice(), i)).collect();
        let transitions = disks
            .iter()
            .map(|e| {
                (0..2 * m)
                    .map(|a| {
                        if a == inv(e.parent(), m) {
                            return None;
                        }
                        let mut target = Vec::with_capacity(e.address.len());
                        target.push(a);
                        target.extend_from_slice(&e.address[..e.address.len() - 1]);
                        index.get(target.as_slice()).copied()
                    })
                    .collect()
            })
            .collect();
        Ok(DiskCover {
            level,
            rank: m,
            disks,
            transitions,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.disks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disks.is_empty()
    }

    pub fn disks(&self) -> &[CoverDisk] {
        &self.disks
    }

    pub fn intervals(&self) -> Vec<(f64, f64)> {
        self.disks.iter().map(|e| e.disk.interval()).collect()
    }

    pub fn transition(&self, u: usize, a: usize) -> Option<usize> {
        self.transitions[u][a]
    }

    /// Index of the level-`(n−1)` disk containing disk `u` (drop the last address letter).
    pub fn coarser_address(&self, u: usize) -> Option<&[usize]> {
        let a = &self.disks[u].address;
        (a.len() > 1).then(|| &a[..a.len() - 1])
    }

    /// Smallest containment margin of branch images inside their target disks.
    pub fn branch_margin(&self, scheme: &SchottkyScheme<f64>) -> Option<f64> {
        let mut margin = f64::INFINITY;
        for (u, e) in self.disks.iter().enumerate() {
            for a in 0..2 * self.rank {
                if let Some(v) = self.transitions[u][a] {
                    let image = e.disk.image_under(scheme.branch(a))?;
                    let t = &self.disks[v].disk;
                    let gap = t.radius - (image.center - t.center).abs() - image.radius;
                    margin = margin.min(gap);
                }
            }
        }
        Some(margin)
    }
}
