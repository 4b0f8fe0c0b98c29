//! Reductions of integral Schottky groups modulo `q` and the covers `Γ₀(q)`, `Γ₁(q)`, `Γ(q)`.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::Moebius;
use crate::representations::action::CosetAction;
use crate::scheme::{Disk, SchottkyScheme};

const CLOSURE_CAP: usize = 10_000_000;

/// Exact integer matrix of determinant one, sign-normalised so the first nonzero
/// entry of `(a, b, c, d)` is positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntMatrix {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::InvalidParameter(format!(
                "integer matrix [[{a},{b}],[{c},{d}]] does not have determinant 1"
            )));
        }
        let first = [a, b, c, d].into_iter().find(|&x| x != 0).unwrap_or(1);
        Ok(if first < 0 {
            IntMatrix { a: -a, b: -b, c: -c, d: -d }
        } else {
            IntMatrix { a, b, c, d }
        })
    }

    /// Recovers exact entries from a floating-point generator.
    pub fn from_moebius(g: &Moebius<f64>, index: usize) -> Result<Self> {
        let r = |x: f64| {
            let k = x.round();
            if (x - k).abs() > 1e-9 * x.abs().max(1.0) {
                Err(Error::NotIntegral { index })
            } else {
                Ok(k as i64)
            }
        };
        Self::new(r(g.a)?, r(g.b)?, r(g.c)?, r(g.d)?).map_err(|_| Error::NotIntegral { index })
    }

    pub fn to_moebius(&self) -> Moebius<f64> {
        Moebius::new(self.a as f64, self.b as f64, self.c as f64, self.d as f64)
            .expect("determinant one")
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn inverse(&self) -> Self {
        IntMatrix::new(self.d, -self.b, -self.c, self.a).expect("determinant one")
    }

    fn reduce(&self, q: u64) -> Mat {
        let r = |x: i64| x.rem_euclid(q as i64) as u32;
        [r(self.a), r(self.b), r(self.c), r(self.d)]
    }
}

type Mat = [u32; 4];

fn mul(x: &Mat, y: &Mat, q: u64) -> Mat {
    let m = |p: u32, r: u32, s: u32, t: u32| ((p as u64 * r as u64 + s as u64 * t as u64) % q) as u32;
    [
        m(x[0], y[0], x[1], y[2]),
        m(x[0], y[1], x[1], y[3]),
        m(x[2], y[0], x[3], y[2]),
        m(x[2], y[1], x[3], y[3]),
    ]
}

/// `|SL₂(ℤ/q)| = q³ ∏_{p | q} (1 − p⁻²)`.
pub fn sl2_order(q: u64) -> u64 {
    let mut order = q * q * q;
    let mut n = q;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            order = order / (p * p) * (p * p - 1);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        order = order / (n * n) * (n * n - 1);
    }
    order
}

/// BFS closure of the generator images in `SL₂(ℤ/q)`.
pub fn image_group(gens: &[IntMatrix], q: u64) -> Result<Vec<[u32; 4]>> {
    if q < 2 {
        return Err(Error::InvalidParameter("congruence level q must be at least 2".into()));
    }
    let mut step: Vec<Mat> = gens.iter().map(|g| g.reduce(q)).collect();
    step.extend(gens.iter().map(|g| g.inverse().reduce(q)));
    let id: Mat = [1 % q as u32, 0, 0, 1 % q as u32];
    let mut seen: HashMap<Mat, ()> = HashMap::from([(id, ())]);
    let mut elements = vec![id];
    let mut head = 0;
    while head < elements.len() {
        let g = elements[head];
        head += 1;
        for s in &step {
            let h = mul(&g, s, q);
            if seen.insert(h, ()).is_none() {
                elements.push(h);
                if elements.len() > CLOSURE_CAP {
                    return Err(Error::BudgetExceeded(format!(
                        "image group mod {q} exceeds {CLOSURE_CAP} elements"
                    )));
                }
            }
        }
    }
    Ok(elements)
}

/// Which subgroup `H` of `SL₂(ℤ/q)` defines the cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CongruenceKind {
    /// `Γ₀(q)`: lower-left entry `≡ 0`.
    Gamma0 = 0,
    /// `Γ₁(q)`: additionally `a ≡ d ≡ 1`.
    Gamma1 = 1,
    /// `Γ(q)`: trivial image.
    Gamma = 2,
}

impl CongruenceKind {
    pub fn from_index(k: u8) -> Result<Self> {
        match k {
            0 => Ok(Self::Gamma0),
            1 => Ok(Self::Gamma1),
            2 => Ok(Self::Gamma),
            _ => Err(Error::InvalidParameter(format!("congruence kind {k} not in {{0,1,2}}"))),
        }
    }

    fn contains(&self, g: &Mat) -> bool {
        match self {
            Self::Gamma0 => g[2] == 0,
            Self::Gamma1 => g[2] == 0 && g[0] == 1 && g[3] == 1,
            Self::Gamma => g[0] == 1 && g[1] == 0 && g[2] == 0 && g[3] == 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CongruenceCover {
    pub q: u64,
    pub kind: CongruenceKind,
    pub action: CosetAction,
    /// `|π_q(Γ)|`.
    pub image_order: usize,
    /// `|H ∩ π_q(Γ)|`.
    pub stabilizer_order: usize,
    /// Whether `−I ∈ π_q(Γ)`; the SL-level cover then double-counts `±g` in PSL.
    pub contains_minus_identity: bool,
}

impl CongruenceCover {
    pub fn degree(&self) -> usize {
        self.action.degree()
    }

    pub fn is_surjective(&self) -> bool {
        self.image_order as u64 == sl2_order(self.q)
    }
}

/// Canonical representative of the projective line through `(x, y)` modulo units.
fn canonical_line(x: u32, y: u32, q: u64, units: &[u32]) -> [u32; 2] {
    units
        .iter()
        .map(|&u| {
            [
                ((u as u64 * x as u64) % q) as u32,
                ((u as u64 * y as u64) % q) as u32,
            ]
        })
        .min()
        .expect("1 is a unit")
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// The coset action of `Γ` on `Γ / Γ_kind(q)`.
///
/// Cosets are realised as the orbit of a base object under the left action of
/// `π_q(Γ)`: the line `[1:0]` for `Γ₀`, the vector `(1,0)` for `Γ₁`, the identity
/// matrix for `Γ(q)`. The orbit size is cross-checked against `|G_q| / |H ∩ G_q|`.
pub fn congruence_action(gens: &[IntMatrix], q: u64, kind: CongruenceKind) -> Result<CongruenceCover> {
    let group = image_group(gens, q)?;
    let stabilizer_order = group.iter().filter(|g| kind.contains(g)).count();
    let minus_id: Mat = [(q - 1) as u32, 0, 0, (q - 1) as u32];
    let contains_minus_identity = q > 2 && group.contains(&minus_id);
    let units: Vec<u32> = (1..q as u32).filter(|&u| gcd(u as u64, q) == 1).collect();

    let act = |g: &Mat, x: &Mat| -> Mat {
        match kind {
            CongruenceKind::Gamma0 => {
                let v = mul(g, &[x[0], 0, x[1], 0], q);
                let l = canonical_line(v[0], v[2], q, &units);
                [l[0], l[1], 0, 0]
            }
            CongruenceKind::Gamma1 => {
                let v = mul(g, &[x[0], 0, x[1], 0], q);
                [v[0], v[2], 0, 0]
            }
            CongruenceKind::Gamma => mul(g, x, q),
        }
    };
    let base: Mat = match kind {
        CongruenceKind::Gamma => [1, 0, 0, 1],
        _ => [1, 0, 0, 0],
    };
    let letters: Vec<Mat> = gens
        .iter()
        .map(|g| g.reduce(q))
        .chain(gens.iter().map(|g| g.inverse().reduce(q)))
        .collect();

    let mut index: HashMap<Mat, usize> = HashMap::from([(base, 0)]);
    let mut orbit = vec![base];
    let mut queue = VecDeque::from([base]);
    while let Some(x) = queue.pop_front() {
        for g in &letters {
            let y = act(g, &x);
            if !index.contains_key(&y) {
                index.insert(y, orbit.len());
                orbit.push(y);
                queue.push_back(y);
            }
        }
    }
    if orbit.len() * stabilizer_order != group.len() {
        return Err(Error::NonConvergence(format!(
            "orbit size {} and index {}/{} disagree",
            orbit.len(),
            group.len(),
            stabilizer_order
        )));
    }
    let images = letters[..gens.len()]
        .iter()
        .map(|g| orbit.iter().map(|x| index[&act(g, x)]).collect())
        .collect();
    Ok(CongruenceCover {
        q,
        kind,
        action: CosetAction::new(images)?,
        image_order: group.len(),
        stabilizer_order,
        contains_minus_identity,
    })
}

/// Exact integral generators of a scheme, or `NotIntegral`.
pub fn integral_generators(scheme: &SchottkyScheme<f64>) -> Result<Vec<IntMatrix>> {
    scheme
        .generators()
        .iter()
        .enumerate()
        .map(|(i, g)| IntMatrix::from_moebius(g, i))
        .collect()
}

fn isometric_disks(g: &IntMatrix) -> Option<(Disk<f64>, Disk<f64>)> {
    if g.c == 0 {
        return None;
    }
    let r = 1.0 / (g.c as f64).abs();
    let src = Disk::new(-(g.d as f64) / g.c as f64, r).ok()?;
    let dst = Disk::new(g.a as f64 / g.c as f64, r).ok()?;
    Some((src, dst))
}

/// Scheme whose disks are the isometric circles of the generators and their inverses.
pub fn integral_scheme(gens: &[IntMatrix]) -> Result<SchottkyScheme<f64>> {
    let mut sources = Vec::new();
    let mut targets = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        let (s, t) = isometric_disks(g).ok_or(Error::Infeasible(format!(
            "generator {i} has c = 0 and no isometric circle"
        )))?;
        sources.push(s);
        targets.push(t);
    }
    sources.extend(targets);
    SchottkyScheme::new(sources, gens.iter().map(|g| g.to_moebius()).collect())?.validated()
}

/// Searches small integer matrices for a rank-2 pair with isometric circles separated by
/// at least `min_gap` whose reductions are onto `SL₂(ℤ/q)` for every `q` in `surjective_mod`.
/// Candidates are visited by increasing total entry size, so the result is deterministic.
pub fn search_integral_fixture(max_entry: i64, min_gap: f64, surjective_mod: &[u64]) -> Option<[IntMatrix; 2]> {
    let mut candidates = Vec::new();
    for c in 1..=max_entry {
        for a in -max_entry..=max_entry {
            for d in -max_entry..=max_entry {
                if (a * d - 1) % c != 0 || (a + d).abs() <= 2 {
                    continue;
                }
                let b = (a * d - 1) / c;
                if b.abs() > 8 * max_entry {
                    continue;
                }
                if let Ok(g) = IntMatrix::new(a, b, c, d) {
                    candidates.push(g);
                }
            }
        }
    }
    let size = |g: &IntMatrix| g.a.abs() + g.b.abs() + g.c.abs() + g.d.abs();
    candidates.sort_by_key(|g| (size(g), g.c, g.a, g.d));
    let mut pairs = Vec::new();
    for (i, g) in candidates.iter().enumerate() {
        let (g1, g2) = isometric_disks(g).expect("c > 0");
        for h in &candidates[i + 1..] {
            let (h1, h2) = isometric_disks(h).expect("c > 0");
            let disks = [g1, g2, h1, h2];
            let separated = (0..4).all(|x| (x + 1..4).all(|y| disks[x].gap(&disks[y]) >= min_gap));
            if separated {
                pairs.push((size(g) + size(h), *g, *h));
            }
        }
    }
    pairs.sort_by_key(|p| p.0);
    pairs.into_iter().map(|(_, g, h)| [g, h]).find(|pair| {
        surjective_mod
            .iter()
            .all(|&q| image_group(pair, q).map_or(false, |grp| grp.len() as u64 == sl2_order(q)))
    })
}
