//! Counting functions `N(r) = #{|s| ≤ r}` and `M(σ, T) = #{Re s ≥ σ, |Im s − T| ≤ 1}`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resonance::locate::{locate_zeros, LocateOptions};
use crate::resonance::winding::{winding_count, winding_count_strict, Rect};
use crate::resonance::zeta::ZetaFunction;

/// Grid offsets tried in turn when a tile edge passes through a zero.
const OFFSETS: [f64; 5] = [0.2718281828, 0.3819660113, 0.1414213562, 0.4142135624, 0.2236067977];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountOptions {
    /// Target tile side.
    pub tile: f64,
    /// The counted region stops at `Re s = δ + right_margin`.
    pub right_margin: f64,
    pub locate: LocateOptions,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            tile: 4.0,
            right_margin: 0.5,
            locate: LocateOptions {
                nudge: false,
                ..LocateOptions::default()
            },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    pub count: usize,
    pub r: f64,
    pub tiles_counted: usize,
    pub tiles_located: usize,
    /// Grid offset used; earlier offsets hit a zero on a tile edge.
    pub offset: f64,
    pub attempts: usize,
    /// Multiplicity in cells that could not be separated from the circle `|s| = r`.
    pub unresolved: usize,
    pub precision_warning: bool,
}

enum Tile {
    Skip,
    Count(Rect),
    Locate(Rect),
}

fn tiles(r: f64, right: f64, tile: f64, offset: f64) -> Vec<Tile> {
    let x0 = -r - offset * tile;
    let y0 = -r - offset * tile;
    let y1 = r + (1.0 - offset) * tile * 0.73;
    let nx = ((right - x0) / tile).ceil().max(1.0) as usize;
    let ny = ((y1 - y0) / tile).ceil().max(1.0) as usize;
    let hx = (right - x0) / nx as f64;
    let hy = (y1 - y0) / ny as f64;
    let mut out = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let rect = Rect {
                re_min: x0 + i as f64 * hx,
                re_max: if i + 1 == nx { right } else { x0 + (i + 1) as f64 * hx },
                im_min: y0 + j as f64 * hy,
                im_max: if j + 1 == ny { y1 } else { y0 + (j + 1) as f64 * hy },
            };
            let origin = Complex64::new(0.0, 0.0);
            out.push(if rect.distance_to(origin) > r {
                Tile::Skip
            } else if rect.max_modulus() <= r {
                Tile::Count(rect)
            } else {
                Tile::Locate(rect)
            });
        }
    }
    out
}

fn recoverable(e: &Error) -> bool {
    matches!(e, Error::BoundaryZero { .. } | Error::PhaseTracking(_))
}

/// `N(r)`: zeros with `|s| ≤ r`, counted with multiplicity. The half-plane `Re s > δ` is zero free,
/// so only `[−r, min(r, δ + margin)] × [−r, r]` is tiled. Tiles inside the disk contribute their
/// winding count; tiles crossing `|s| = r` are resolved into zeros and filtered.
pub fn count_n<Z: ZetaFunction + ?Sized>(zeta: &Z, delta: f64, r: f64, opts: &CountOptions) -> Result<CountReport> {
    if !(r >= 1.0) {
        return Err(Error::InvalidParameter(format!("radius must be at least 1, got {r}")));
    }
    if !(opts.tile > 0.0) {
        return Err(Error::InvalidParameter("tile side must be positive".into()));
    }
    let right = r.min(delta + opts.right_margin);
    let mut last = None;
    for (attempt, &offset) in OFFSETS.iter().enumerate() {
        let grid = tiles(r, right, opts.tile, offset);
        let results: Vec<Result<(usize, usize, bool, bool)>> = grid
            .par_iter()
            .map(|t| match t {
                Tile::Skip => Ok((0, 0, false, false)),
                Tile::Count(rect) => {
                    let w = winding_count_strict(zeta, rect)?;
                    Ok((w.count, 0, w.precision_warning, false))
                }
                Tile::Locate(rect) => {
                    let rep = locate_zeros(zeta, rect, &opts.locate)?;
                    let inside: usize = rep
                        .zeros
                        .iter()
                        .filter(|z| z.location.norm() <= r)
                        .map(|z| z.multiplicity)
                        .sum();
                    let lost: usize = rep
                        .unresolved
                        .iter()
                        .filter(|c| c.rect.distance_to(Complex64::new(0.0, 0.0)) <= r)
                        .map(|c| c.winding)
                        .sum();
                    Ok((inside, lost, rep.diagnostics.precision_warning, true))
                }
            })
            .collect();
        match results.into_iter().collect::<Result<Vec<_>>>() {
            Ok(rows) => {
                return Ok(CountReport {
                    count: rows.iter().map(|x| x.0).sum(),
                    r,
                    tiles_counted: grid.iter().filter(|t| matches!(t, Tile::Count(_))).count(),
                    tiles_located: rows.iter().filter(|x| x.3).count(),
                    offset,
                    attempts: attempt + 1,
                    unresolved: rows.iter().map(|x| x.1).sum(),
                    precision_warning: rows.iter().any(|x| x.2),
                })
            }
            Err(e) if recoverable(&e) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxOptions {
    /// The box extends to `Re s = δ + margin`.
    pub margin: f64,
    /// Largest `|T|` accepted.
    pub im_budget: f64,
}

impl Default for BoxOptions {
    fn default() -> Self {
        BoxOptions {
            margin: 0.5,
            im_budget: 50.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoxCount {
    pub count: usize,
    pub sigma: f64,
    pub t: f64,
    /// Counted rectangle (after nudging); `None` when `σ ≥ δ + margin`.
    pub rect: Option<Rect>,
    pub nudges: usize,
    pub precision_warning: bool,
}

/// `M(σ, T)` with multiplicity, as the winding count of `[σ, δ + margin] × [T − 1, T + 1]`.
pub fn count_m<Z: ZetaFunction + ?Sized>(zeta: &Z, delta: f64, sigma: f64, t: f64, opts: &BoxOptions) -> Result<BoxCount> {
    if !sigma.is_finite() || !t.is_finite() {
        return Err(Error::InvalidParameter("σ and T must be finite".into()));
    }
    if t.abs() > opts.im_budget {
        return Err(Error::PrecisionWall {
            im: t,
            budget: opts.im_budget,
        });
    }
    let right = delta + opts.margin;
    if sigma >= right {
        return Ok(BoxCount {
            count: 0,
            sigma,
            t,
            rect: None,
            nudges: 0,
            precision_warning: false,
        });
    }
    let w = winding_count(zeta, &Rect::new(sigma, right, t - 1.0, t + 1.0)?)?;
    Ok(BoxCount {
        count: w.count,
        sigma,
        t,
        rect: Some(w.rect),
        nudges: w.nudges,
        precision_warning: w.precision_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representations::{induced_permutation_rep, AbelianCover, UnitaryRep};
    use crate::resonance::zeta::EulerZeta;
    use crate::scheme::cylinder_scheme;
    use std::f64::consts::PI;

    /// Zeros `−j + 2πin/(kℓ)`, multiplicity 2, inside `|s| ≤ r`.
    fn lattice_count(ell: f64, k: usize, r: f64) -> usize {
        let step = 2.0 * PI / (k as f64 * ell);
        let mut n = 0;
        for j in 0..=(r.floor() as i64) {
            let x = j as f64;
            let m = ((r * r - x * x).max(0.0).sqrt() / step).floor() as i64;
            n += 2 * (2 * m + 1) as usize;
        }
        n
    }

    fn cylinder_cover(k: usize) -> EulerZeta {
        let sch = cylinder_scheme(2.0).unwrap();
        let rep = if k == 1 {
            UnitaryRep::trivial(1, 1)
        } else {
            induced_permutation_rep(&AbelianCover::cyclic(k, &[1]).unwrap().action)
        };
        EulerZeta::new(&sch, &rep, 1).unwrap()
    }

    #[test]
    fn cylinder_counts_match_lattice() {
        for (k, r) in [(1, 10.5), (2, 8.3)] {
            let z = cylinder_cover(k);
            let c = count_n(&z, 0.0, r, &CountOptions::default()).unwrap();
            assert_eq!(c.count, lattice_count(2.0, k, r), "k={k} r={r} {c:?}");
        }
    }

    #[test]
    fn small_radius_sees_only_real_zeros() {
        let z = cylinder_cover(1);
        let c = count_n(&z, 0.0, 2.5, &CountOptions::default()).unwrap();
        assert_eq!(c.count, 6);
        assert_eq!(c.count, lattice_count(2.0, 1, 2.5));
        assert!(count_n(&z, 0.0, 0.5, &CountOptions::default()).is_err());
    }

    #[test]
    fn box_counts() {
        let z = cylinder_cover(1);
        let opts = BoxOptions::default();
        assert_eq!(count_m(&z, 0.0, -0.5, PI, &opts).unwrap().count, 2);
        assert_eq!(count_m(&z, 0.0, 0.2, PI, &opts).unwrap().count, 0);
        assert_eq!(count_m(&z, 0.0, 0.6, PI, &opts).unwrap().rect, None);
        let mut last = usize::MAX;
        for sigma in [-3.3, -2.5, -1.7, -0.4, 0.3] {
            let m = count_m(&z, 0.0, sigma, 2.0 * PI, &opts).unwrap().count;
            assert!(m <= last);
            last = m;
        }
        assert!(matches!(count_m(&z, 0.0, -1.0, 60.0, &opts), Err(Error::PrecisionWall { .. })));
    }
}
