//! Zero location by recursive bisection and contour-moment polishing.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resonance::winding::{circle_moments, winding_count, winding_count_strict, CircleMoments, Rect};
use crate::resonance::zeta::ZetaFunction;

const MAX_DEPTH: usize = 80;
const SPLIT_FRACTIONS: [f64; 6] = [0.5, 0.4, 0.6, 0.3, 0.7, 0.45];
/// Moment tolerances for locating and then polishing.
const COARSE_TOL: f64 = 1e-7;
const FINE_TOL: f64 = 1e-12;
/// Zeros closer than this are merged.
pub const DEDUP_RADIUS: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocateOptions {
    /// Cells smaller than this that still hold more than `cell_cap` zeros are reported unresolved.
    pub tol: f64,
    /// Largest winding polished in one cell (at most 2).
    pub cell_cap: usize,
    /// Initial circle quadrature nodes.
    pub nodes: usize,
    /// Nudge the outer rectangle off boundary zeros.
    pub nudge: bool,
    /// Drop zeros at `0, −1/2, −1, …`, where zeta multiplicity may exceed resonance multiplicity.
    pub exclude_special: bool,
}

impl Default for LocateOptions {
    fn default() -> Self {
        LocateOptions {
            tol: 1e-6,
            cell_cap: 2,
            nodes: 64,
            nudge: true,
            exclude_special: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Zero {
    pub location: Complex64,
    pub multiplicity: usize,
    /// `|f|` at the polished location.
    pub residual: f64,
    /// Reported as a zero of the zeta function; resonances are contained in this set.
    pub zeta_zero: bool,
    /// Lies at one of `0, −1/2, −1, …`.
    pub special_point: bool,
    #[serde(skip)]
    cell_center: Complex64,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnresolvedCell {
    pub rect: Rect,
    pub winding: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LocateDiagnostics {
    pub source: String,
    pub cells: usize,
    pub nudges: usize,
    /// Smallest `ln|f|` on the outer contour.
    pub boundary_margin: f64,
    /// Zeros whose circle moments did not settle under node doubling.
    pub unconverged_polish: usize,
    /// Total multiplicity dropped by `exclude_special`.
    pub excluded_special: usize,
    pub precision_warning: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResonanceReport {
    pub zeros: Vec<Zero>,
    /// Rectangle whose winding was counted (the requested one, possibly nudged).
    pub rect: Rect,
    pub requested: Rect,
    pub winding: usize,
    pub unresolved: Vec<UnresolvedCell>,
    pub diagnostics: LocateDiagnostics,
}

impl ResonanceReport {
    pub fn total_multiplicity(&self) -> usize {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }

    pub fn is_resolved(&self) -> bool {
        self.unresolved.is_empty() && self.total_multiplicity() + self.diagnostics.excluded_special == self.winding
    }
}

#[derive(Default)]
struct Partial {
    zeros: Vec<Zero>,
    unresolved: Vec<UnresolvedCell>,
    cells: usize,
    unconverged: usize,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.zeros.extend(other.zeros);
        self.unresolved.extend(other.unresolved);
        self.cells += other.cells;
        self.unconverged += other.unconverged;
        self
    }
}

fn recoverable(e: &Error) -> bool {
    matches!(e, Error::BoundaryZero { .. } | Error::PhaseTracking(_))
}

fn moments<Z: ZetaFunction + ?Sized>(
    zeta: &Z,
    c: Complex64,
    rho: f64,
    nodes: usize,
    rel_tol: f64,
) -> Result<Option<CircleMoments>> {
    match circle_moments(zeta, c, rho, nodes, rel_tol) {
        Ok(m) => Ok(Some(m)),
        Err(e) if recoverable(&e) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Roots of `t² − p₁t + (p₁² − p₂)/2` and whether they coincide to within `1e−5·ρ`.
fn quadratic_roots(m: &CircleMoments) -> (Complex64, Complex64, bool) {
    let sq = (2.0 * m.p2 - m.p1 * m.p1).sqrt();
    let a = m.center + 0.5 * (m.p1 + sq);
    let b = m.center + 0.5 * (m.p1 - sq);
    (a, b, sq.norm() < 1e-5 * m.radius)
}

/// Polished zeros `(location, multiplicity, converged)` of a cell with winding `w ≤ 2`, or `None`
/// when the circle around the cell does not isolate exactly these zeros.
fn polish<Z: ZetaFunction + ?Sized>(
    zeta: &Z,
    cell: &Rect,
    w: usize,
    nodes: usize,
) -> Result<Option<Vec<(Complex64, usize, bool)>>> {
    let c = cell.center();
    let rho = 0.525 * cell.diameter();
    let Some(m) = moments(zeta, c, rho, nodes, COARSE_TOL)? else {
        return Ok(None);
    };
    if m.count != w {
        return Ok(None);
    }
    let small = 0.25 * cell.width().min(cell.height());
    // second circle centred on the estimate, counted again so it holds the same zeros
    let recentre = |z: Complex64, r: f64, mult: usize| -> Result<Option<CircleMoments>> {
        Ok(moments(zeta, z, r, nodes, FINE_TOL)?.filter(|m2| m2.count == mult))
    };
    let mut out = Vec::new();
    if w == 1 {
        let z = c + m.p1;
        match recentre(z, small.min(rho), 1)? {
            Some(m2) => out.push((z + m2.p1, 1, m2.converged)),
            None => out.push((z, 1, m.converged)),
        }
    } else {
        let (a, b, _) = quadratic_roots(&m);
        let gap = (a - b).norm();
        if gap < 1e-3 * rho {
            let mid = c + 0.5 * m.p1;
            let r = small.min(rho).max(10.0 * gap);
            match recentre(mid, r, 2)? {
                Some(m2) => {
                    let (a2, b2, double) = quadratic_roots(&m2);
                    if double {
                        out.push((m2.center + 0.5 * m2.p1, 2, m2.converged));
                    } else {
                        out.push((a2, 1, m2.converged));
                        out.push((b2, 1, m2.converged));
                    }
                }
                None => return Ok(None),
            }
        } else {
            for z in [a, b] {
                match recentre(z, 0.4 * gap.min(small / 0.4), 1)? {
                    Some(m2) => out.push((z + m2.p1, 1, m2.converged)),
                    None => return Ok(None),
                }
            }
        }
    }
    let grown = cell.expanded(1e-9 * cell.diameter());
    if out.iter().all(|(z, _, _)| grown.contains(*z)) {
        Ok(Some(out))
    } else {
        Ok(None)
    }
}

fn process<Z: ZetaFunction + ?Sized>(zeta: &Z, cell: Rect, w: usize, depth: usize, opts: &LocateOptions) -> Result<Partial> {
    let mut part = Partial {
        cells: 1,
        ..Partial::default()
    };
    if w == 0 {
        return Ok(part);
    }
    if w <= opts.cell_cap.min(2) {
        if let Some(found) = polish(zeta, &cell, w, opts.nodes)? {
            for (z, mult, converged) in found {
                let v = zeta.eval(z)?;
                part.unconverged += usize::from(!converged);
                part.zeros.push(Zero {
                    location: z,
                    multiplicity: mult,
                    residual: v.log.re.exp(),
                    zeta_zero: true,
                    special_point: is_special(z),
                    cell_center: cell.center(),
                });
            }
            return Ok(part);
        }
    }
    if cell.diameter() < opts.tol || depth >= MAX_DEPTH {
        part.unresolved.push(UnresolvedCell { rect: cell, winding: w });
        return Ok(part);
    }
    for t in SPLIT_FRACTIONS {
        let (a, b) = cell.split(t);
        let (wa, wb) = rayon::join(|| winding_count_strict(zeta, &a), || winding_count_strict(zeta, &b));
        let (wa, wb) = match (wa, wb) {
            (Ok(x), Ok(y)) => (x.count, y.count),
            (Err(e), _) | (_, Err(e)) if !recoverable(&e) => return Err(e),
            _ => continue,
        };
        if wa + wb != w {
            continue;
        }
        let (pa, pb) = rayon::join(
            || process(zeta, a, wa, depth + 1, opts),
            || process(zeta, b, wb, depth + 1, opts),
        );
        return Ok(part.merge(pa?).merge(pb?));
    }
    part.unresolved.push(UnresolvedCell { rect: cell, winding: w });
    Ok(part)
}

/// Whether `z` is within `1e−7` of `0, −1/2, −1, …`.
pub fn is_special(z: Complex64) -> bool {
    if z.im.abs() > DEDUP_RADIUS || z.re > DEDUP_RADIUS {
        return false;
    }
    let h = (2.0 * z.re).round() / 2.0;
    (z.re - h).abs() <= DEDUP_RADIUS
}

fn lex(a: Complex64, b: Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// All zeros in `rect` with multiplicities. Cells with winding up to `cell_cap` are polished with
/// circle moments; larger windings are bisected until below `tol`.
pub fn locate_zeros<Z: ZetaFunction + ?Sized>(zeta: &Z, rect: &Rect, opts: &LocateOptions) -> Result<ResonanceReport> {
    let top = if opts.nudge {
        winding_count(zeta, rect)?
    } else {
        winding_count_strict(zeta, rect)?
    };
    let part = process(zeta, top.rect, top.count, 0, opts)?;
    let mut zeros = part.zeros;
    zeros.sort_by(|a, b| lex(a.location, b.location));
    let mut merged: Vec<Zero> = Vec::with_capacity(zeros.len());
    for z in zeros {
        match merged.iter_mut().find(|m| (m.location - z.location).norm() < DEDUP_RADIUS) {
            Some(m) => {
                if lex(z.cell_center, m.cell_center).is_lt() {
                    *m = z;
                }
            }
            None => merged.push(z),
        }
    }
    let mut excluded = 0;
    if opts.exclude_special {
        excluded = merged.iter().filter(|z| z.special_point).map(|z| z.multiplicity).sum();
        merged.retain(|z| !z.special_point);
    }
    Ok(ResonanceReport {
        zeros: merged,
        rect: top.rect,
        requested: *rect,
        winding: top.count,
        unresolved: part.unresolved,
        diagnostics: LocateDiagnostics {
            source: zeta.describe(),
            cells: part.cells,
            nudges: top.nudges,
            boundary_margin: top.boundary_margin,
            unconverged_polish: part.unconverged,
            excluded_special: excluded,
            precision_warning: top.precision_warning,
        },
    })
}
