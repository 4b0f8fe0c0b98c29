//! Finite covers as transitive permutation actions of the free group.

use std::collections::{HashMap, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::inv;

/// Action of the free generators on `n` cosets.
///
/// `perms[a][x]` is the image of coset `x` under letter `a` (all `2m`
/// letters stored, inverses derived). Words act on the left:
/// `γ_{α₁}⋯γ_{α_N}·x = σ_{α₁}(⋯σ_{α_N}(x))`, so the permutation
/// representation is a homomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetAction {
    degree: usize,
    rank: usize,
    perms: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct CoverFile {
    degree: usize,
    generator_perms: Vec<Vec<usize>>,
}

fn invert_perm(p: &[usize]) -> Vec<usize> {
    let mut out = vec![0; p.len()];
    for (x, &y) in p.iter().enumerate() {
        out[y] = x;
    }
    out
}

impl CosetAction {
    /// Builds and checks a transitive action from `m` generator permutations (0-based images).
    pub fn new(images: Vec<Vec<usize>>) -> Result<Self> {
        let rank = images.len();
        if rank == 0 {
            return Err(Error::MalformedAction("no generator images".into()));
        }
        let degree = images[0].len();
        if degree == 0 {
            return Err(Error::MalformedAction("degree must be positive".into()));
        }
        for (j, p) in images.iter().enumerate() {
            if p.len() != degree {
                return Err(Error::MalformedAction(format!(
                    "generator {j} permutes {} points, expected {degree}",
                    p.len()
                )));
            }
            let mut seen = vec![false; degree];
            for &y in p {
                if y >= degree || seen[y] {
                    return Err(Error::MalformedAction(format!("generator {j} image is not a bijection")));
                }
                seen[y] = true;
            }
        }
        let mut perms = images.clone();
        perms.extend(images.iter().map(|p| invert_perm(p)));
        let action = CosetAction { degree, rank, perms };
        let orbit = action.orbit_size(0);
        if orbit != degree {
            return Err(Error::Intransitive { orbit, degree });
        }
        Ok(action)
    }

    /// The trivial one-sheeted cover.
    pub fn trivial(rank: usize) -> Self {
        CosetAction {
            degree: 1,
            rank,
            perms: vec![vec![0]; 2 * rank],
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letter_perm(&self, a: usize) -> &[usize] {
        &self.perms[a]
    }

    pub fn generator_perms(&self) -> &[Vec<usize>] {
        &self.perms[..self.rank]
    }

    fn orbit_size(&self, start: usize) -> usize {
        let mut seen = vec![false; self.degree];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for p in &self.perms {
                let y = p[x];
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count
    }

    /// Image of a single coset under a word.
    pub fn act(&self, word: &[usize], x: usize) -> usize {
        word.iter().rev().fold(x, |y, &a| self.perms[a][y])
    }

    /// The permutation of a word.
    pub fn word_perm(&self, word: &[usize]) -> Vec<usize> {
        (0..self.degree).map(|x| self.act(word, x)).collect()
    }

    /// `χ_λ(w)`: the number of cosets fixed by `w`.
    pub fn character(&self, word: &[usize]) -> usize {
        (0..self.degree).filter(|&x| self.act(word, x) == x).count()
    }

    /// Whether `w` lies in the subgroup stabilising the base coset 0.
    pub fn in_subgroup(&self, word: &[usize]) -> bool {
        self.act(word, 0) == 0
    }

    /// Regular iff the permutation group generated has exactly `degree` elements.
    pub fn is_regular(&self) -> bool {
        let identity: Vec<usize> = (0..self.degree).collect();
        let mut seen = HashMap::new();
        seen.insert(identity.clone(), ());
        let mut queue = VecDeque::from([identity]);
        while let Some(g) = queue.pop_front() {
            for p in &self.perms[..self.rank] {
                let h: Vec<usize> = g.iter().map(|&x| p[x]).collect();
                if !seen.contains_key(&h) {
                    if seen.len() >= self.degree {
                        return false;
                    }
                    seen.insert(h.clone(), ());
                    queue.push_back(h);
                }
            }
        }
        seen.len() == self.degree
    }

    pub fn to_json(&self) -> Result<String> {
        let file = CoverFile {
            degree: self.degree,
            generator_perms: self.perms[..self.rank]
                .iter()
                .map(|p| p.iter().map(|&y| y + 1).collect())
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Parses the cover file format (1-indexed images).
    pub fn from_json(text: &str) -> Result<Self> {
        let file: CoverFile = serde_json::from_str(text)?;
        let images = file
            .generator_perms
            .into_iter()
            .map(|p| {
                if p.len() != file.degree {
                    return Err(Error::MalformedAction("permutation length differs from degree".into()));
                }
                p.into_iter()
                    .map(|y| {
                        y.checked_sub(1)
                            .ok_or_else(|| Error::MalformedAction("images are 1-indexed".into()))
                    })
                    .collect()
            })
            .collect::<Result<Vec<Vec<usize>>>>()?;
        Self::new(images)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn inverse_letter(&self, a: usize) -> usize {
        inv(a, self.rank)
    }
}

/// A finite group given by generating permutations, together with its regular action.
#[derive(Clone, Debug)]
pub struct RegularCover {
    pub elements: Vec<Vec<usize>>,
    pub action: CosetAction,
}

fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    // (p ∘ q)(x) = p(q(x))
    q.iter().map(|&x| p[x]).collect()
}

/// Regular cover for the group generated by `generator_images` (permutations of any
/// fixed point set). Cosets are the group elements; letter `j` acts by
/// `x ↦ π(γ_j)·x`, the left-regular form of the right-multiplication Cayley action.
pub fn regular_action(generator_images: &[Vec<usize>], expected_order: Option<usize>) -> Result<RegularCover> {
    if generator_images.is_empty() {
        return Err(Error::MalformedAction("no generator images".into()));
    }
    let n = generator_images[0].len();
    let identity: Vec<usize> = (0..n).collect();
    let mut inverses: Vec<Vec<usize>> = generator_images.iter().map(|g| invert_perm(g)).collect();
    let mut gens = generator_images.to_vec();
    gens.append(&mut inverses);

    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut elements = vec![identity.clone()];
    index.insert(identity, 0);
    let mut head = 0;
    while head < elements.len() {
        let g = elements[head].clone();
        head += 1;
        for s in &gens {
            let h = compose(&g, s);
            if !index.contains_key(&h) {
                index.insert(h.clone(), elements.len());
                elements.push(h);
                if elements.len() > 10_000_000 {
                    return Err(Error::BudgetExceeded("group closure above 10^7 elements".into()));
                }
            }
        }
    }
    if let Some(order) = expected_order {
        if order != elements.len() {
            return Err(Error::Intransitive {
                orbit: elements.len(),
                degree: order,
            });
        }
    }
    let images = generator_images
        .iter()
        .map(|s| elements.iter().map(|x| index[&compose(s, x)]).collect())
        .collect();
    let action = CosetAction::new(images)?;
    Ok(RegularCover { elements, action })
}

/// Finite abelian group `ℤ/n₁ × ⋯ × ℤ/n_r` with generator images given as residue vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianCover {
    pub orders: Vec<usize>,
    pub images: Vec<Vec<usize>>,
    pub action: CosetAction,
}

impl AbelianCover {
    pub fn new(orders: Vec<usize>, images: Vec<Vec<i64>>) -> Result<Self> {
        if orders.is_empty() || orders.iter().any(|&n| n == 0) {
            return Err(Error::InvalidParameter("group orders must be positive".into()));
        }
        let images: Vec<Vec<usize>> = images
            .into_iter()
            .map(|v| {
                if v.len() != orders.len() {
                    return Err(Error::InvalidParameter("image has the wrong number of components".into()));
                }
                Ok(v.iter()
                    .zip(&orders)
                    .map(|(&x, &n)| x.rem_euclid(n as i64) as usize)
                    .collect())
            })
            .collect::<Result<_>>()?;
        let size: usize = orders.iter().product();
        let encode = |v: &[usize]| v.iter().zip(&orders).fold(0, |acc, (&x, &n)| acc * n + x);
        let decode = |mut k: usize| {
            let mut v = vec![0; orders.len()];
            for i in (0..orders.len()).rev() {
                v[i] = k % orders[i];
                k /= orders[i];
            }
            v
        };
        let perms = images
            .iter()
            .map(|g| {
                (0..size)
                    .map(|x| {
                        let v = decode(x);
                        let w: Vec<usize> = v
                            .iter()
                            .zip(g)
                            .zip(&orders)
                            .map(|((&a, &b), &n)| (a + b) % n)
                            .collect();
                        encode(&w)
                    })
                    .collect()
            })
            .collect();
        let action = CosetAction::new(perms)?;
        Ok(AbelianCover {
            orders,
            images,
            action,
        })
    }

    /// Cyclic cover `ℤ/n` with `γ_j ↦ residues[j]`.
    pub fn cyclic(n: usize, residues: &[i64]) -> Result<Self> {
        Self::new(vec![n], residues.iter().map(|&r| vec![r]).collect())
    }

    pub fn order(&self) -> usize {
        self.orders.iter().product()
    }

    /// All characters, indexed by dual elements; entry `[χ][j]` is `χ(γ_j)` as a unit complex number.
    pub fn characters(&self) -> Vec<Vec<num_complex::Complex64>> {
        let size = self.order();
        let mut out = Vec::with_capacity(size);
        for k in 0..size {
            let mut dual = vec![0; self.orders.len()];
            let mut r = k;
            for i in (0..self.orders.len()).rev() {
                dual[i] = r % self.orders[i];
                r /= self.orders[i];
            }
            let values = self
                .images
                .iter()
                .map(|g| {
                    let phase: f64 = g
                        .iter()
                        .zip(&dual)
                        .zip(&self.orders)
                        .map(|((&x, &c), &n)| (x * c) as f64 / n as f64)
                        .sum();
                    num_complex::Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase)
                })
                .collect();
            out.push(values);
        }
        out
    }

    /// Parses `Z6:1` or `Z2xZ2:1,0;0,1` (components per generator separated by `;`).
    pub fn parse(spec: &str) -> Result<Self> {
        let (group, gens) = spec
            .split_once(':')
            .ok_or_else(|| Error::InvalidParameter(format!("regular spec `{spec}` lacks `:`")))?;
        let orders = group
            .split(['x', 'X', '*'])
            .map(|f| {
                f.trim()
                    .trim_start_matches(['Z', 'z'])
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidParameter(format!("bad group factor `{f}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let images = gens
            .split(';')
            .map(|g| {
                g.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<i64>()
                            .map_err(|_| Error::InvalidParameter(format!("bad residue `{x}`")))
                    })
                    .collect()
            })
            .collect::<Result<Vec<Vec<i64>>>>()?;
        Self::new(orders, images)
    }
}
