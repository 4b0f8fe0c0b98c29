//! Argument-principle zero counts along rectangle and circle contours.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resonance::zeta::{ZetaFunction, ZetaValue};

/// `ln 1e−6`: a contour sample with `|f|` below `1e−6` counts as a zero on the contour.
pub const BOUNDARY_ZERO_LN: f64 = -13.815510557964274;
const MAX_ROUNDS: usize = 64;
const MAX_NUDGES: usize = 3;
const MAX_CIRCLE_NODES: usize = 1 << 13;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_min < re_max && im_min < im_max) || ![re_min, re_max, im_min, im_max].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "degenerate rectangle [{re_min}, {re_max}] x [{im_min}, {im_max}]"
            )));
        }
        Ok(Rect {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    /// Distance from `z` to the closed rectangle (zero inside).
    pub fn distance_to(&self, z: Complex64) -> f64 {
        let dx = (self.re_min - z.re).max(z.re - self.re_max).max(0.0);
        let dy = (self.im_min - z.im).max(z.im - self.im_max).max(0.0);
        dx.hypot(dy)
    }

    /// Largest `|z|` over the rectangle.
    pub fn max_modulus(&self) -> f64 {
        let x = self.re_min.abs().max(self.re_max.abs());
        let y = self.im_min.abs().max(self.im_max.abs());
        x.hypot(y)
    }

    pub fn expanded(&self, by: f64) -> Self {
        Rect {
            re_min: self.re_min - by,
            re_max: self.re_max + by,
            im_min: self.im_min - by,
            im_max: self.im_max + by,
        }
    }

    /// Splits the longer side at fraction `t` of its length.
    pub fn split(&self, t: f64) -> (Self, Self) {
        if self.width() >= self.height() {
            let x = self.re_min + t * self.width();
            (Rect { re_max: x, ..*self }, Rect { re_min: x, ..*self })
        } else {
            let y = self.im_min + t * self.height();
            (Rect { im_max: y, ..*self }, Rect { im_min: y, ..*self })
        }
    }

    /// Mirror image under `s ↦ s̄`.
    pub fn conj(&self) -> Self {
        Rect {
            re_min: self.re_min,
            re_max: self.re_max,
            im_min: -self.im_max,
            im_max: -self.im_min,
        }
    }

    /// Counter-clockwise perimeter parametrised by `t ∈ [0, 1)`, starting at the lower-left corner.
    pub fn point(&self, t: f64) -> Complex64 {
        let (w, h) = (self.width(), self.height());
        let d = t * 2.0 * (w + h);
        if d < w {
            Complex64::new(self.re_min + d, self.im_min)
        } else if d < w + h {
            Complex64::new(self.re_max, self.im_min + (d - w))
        } else if d < 2.0 * w + h {
            Complex64::new(self.re_max - (d - w - h), self.im_max)
        } else {
            Complex64::new(self.re_min, self.im_max - (d - 2.0 * w - h))
        }
    }

    fn corner_params(&self) -> [f64; 4] {
        let (w, h) = (self.width(), self.height());
        let per = 2.0 * (w + h);
        [0.0, w / per, (w + h) / per, (2.0 * w + h) / per]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Winding {
    pub count: usize,
    /// The rectangle actually used, after any nudges.
    pub rect: Rect,
    pub nudges: usize,
    pub evaluations: usize,
    /// Winding sum before rounding.
    pub raw: f64,
    /// Smallest `ln|f|` seen on the contour.
    pub boundary_margin: f64,
    pub precision_warning: bool,
}

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Phase increment between neighbouring samples and whether the pair is resolved.
fn phase_step(s0: Complex64, v0: &ZetaValue, s1: Complex64, v1: &ZetaValue) -> (f64, bool) {
    let raw = v1.log.im - v0.log.im;
    match (v0.dlog, v1.dlog) {
        (Some(d0), Some(d1)) => {
            let pred = (0.5 * (d0 + d1) * (s1 - s0)).im;
            let step = pred + wrap(raw - pred);
            // a zero on or near the segment shows up as a large change of f′/f even when
            // the trapezoid prediction cancels by symmetry
            let smooth = ((d1 - d0) * (s1 - s0)).norm() < 1.0;
            (step, smooth && step.abs() < 0.5 * PI && (step - pred).abs() < 0.25 * PI)
        }
        _ => {
            let step = wrap(raw);
            (step, step.abs() < 0.5 * PI)
        }
    }
}

fn checked_eval<Z: ZetaFunction + ?Sized>(zeta: &Z, s: Complex64) -> Result<ZetaValue> {
    checked_against(zeta, s, BOUNDARY_ZERO_LN)
}

fn checked_against<Z: ZetaFunction + ?Sized>(zeta: &Z, s: Complex64, floor: f64) -> Result<ZetaValue> {
    let v = zeta.eval(s)?;
    if !(v.proximity >= floor) || !v.log.im.is_finite() || !v.log.re.is_finite() {
        return Err(Error::BoundaryZero { re: s.re, im: s.im });
    }
    Ok(v)
}

/// Mean of `f′/f` over the samples that carry it. Subtracting `D·(s − c)` from `log f` changes neither
/// winding numbers nor the moments `∮ (s − c)ᵏ f′/f ds`, `k ≥ 0`, but removes the uniform rotation.
fn mean_drift<'a>(values: impl Iterator<Item = &'a ZetaValue>) -> Option<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut n = 0usize;
    for v in values {
        let d = v.dlog?;
        if d.re.is_finite() && d.im.is_finite() {
            sum += d;
            n += 1;
        }
    }
    (n > 0).then(|| sum / n as f64)
}

fn detrend(v: &mut ZetaValue, s: Complex64, c: Complex64, drift: Option<Complex64>) {
    if let (Some(d), Some(dl)) = (drift, v.dlog.as_mut()) {
        v.log -= d * (s - c);
        *dl -= d;
    }
}

/// Closed-contour phase tracking on `path(t)`, `t ∈ [0, 1)`, refining every step until it is
/// below `π/2`. Returns the sample count, total phase change, smallest `ln|f|`, and
/// whether any sample raised a precision warning.
fn track<Z: ZetaFunction + ?Sized>(
    zeta: &Z,
    path: &(dyn Fn(f64) -> Complex64 + Sync),
    seeds: Vec<f64>,
    min_step: f64,
) -> Result<(usize, f64, f64, bool)> {
    let eval = |t: f64| checked_eval(zeta, path(t)).map(|v| (t, path(t), v));
    let mut samples: Vec<(f64, Complex64, ZetaValue)> = seeds.into_par_iter().map(eval).collect::<Result<_>>()?;
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let drift = mean_drift(samples.iter().map(|x| &x.2));
    let origin = samples[0].1;
    for (_, s, v) in samples.iter_mut() {
        detrend(v, *s, origin, drift);
    }
    for _ in 0..MAX_ROUNDS {
        let n = samples.len();
        let mut bad = Vec::new();
        let mut total = 0.0;
        for i in 0..n {
            let (t0, s0, v0) = &samples[i];
            let (t1, s1, v1) = &samples[(i + 1) % n];
            let t1 = if i + 1 == n { t1 + 1.0 } else { *t1 };
            let (step, ok) = phase_step(*s0, v0, *s1, v1);
            if ok {
                total += step;
            } else {
                if t1 - t0 < min_step {
                    return Err(Error::PhaseTracking(format!(
                        "phase step {step:.3} unresolved at parameter spacing {:e}",
                        t1 - t0
                    )));
                }
                bad.push((0.5 * (t0 + t1)).rem_euclid(1.0));
            }
        }
        if bad.is_empty() {
            let margin = samples.iter().map(|x| x.2.proximity).fold(f64::INFINITY, f64::min);
            let warn = samples.iter().any(|x| x.2.precision_warning);
            return Ok((n, total, margin, warn));
        }
        let mut fresh: Vec<_> = bad.into_par_iter().map(eval).collect::<Result<_>>()?;
        for (_, s, v) in fresh.iter_mut() {
            detrend(v, *s, origin, drift);
        }
        samples.extend(fresh);
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    Err(Error::PhaseTracking("refinement budget exhausted".into()))
}

fn round_winding(raw: f64) -> Result<usize> {
    let k = raw.round();
    if (raw - k).abs() > 0.05 || k < 0.0 {
        return Err(Error::PhaseTracking(format!("winding sum {raw} is not a nonnegative integer")));
    }
    Ok(k as usize)
}

/// Winding count of `rect` exactly as given; a zero on the boundary is an error.
pub fn winding_count_strict<Z: ZetaFunction + ?Sized>(zeta: &Z, rect: &Rect) -> Result<Winding> {
    let per = 2.0 * (rect.width() + rect.height());
    // about four samples per unit length, at least eight per edge
    let n = ((4.0 * per).ceil() as usize).max(32);
    let mut seeds: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
    seeds.extend_from_slice(&rect.corner_params());
    seeds.sort_by(f64::total_cmp);
    seeds.dedup();
    let (evaluations, total, boundary_margin, precision_warning) = track(zeta, &|t| rect.point(t), seeds, 1e-14)?;
    let raw = total / (2.0 * PI);
    Ok(Winding {
        count: round_winding(raw)?,
        rect: *rect,
        nudges: 0,
        evaluations,
        raw,
        boundary_margin,
        precision_warning,
    })
}

/// Winding count with boundary nudging: on a contour zero or a phase-tracking failure the
/// rectangle grows by `1e−4·diameter`, at most three times.
pub fn winding_count<Z: ZetaFunction + ?Sized>(zeta: &Z, rect: &Rect) -> Result<Winding> {
    let mut r = *rect;
    let mut last = None;
    for nudge in 0..=MAX_NUDGES {
        match winding_count_strict(zeta, &r) {
            Ok(mut w) => {
                w.nudges = nudge;
                return Ok(w);
            }
            Err(e @ (Error::BoundaryZero { .. } | Error::PhaseTracking(_))) => {
                last = Some(e);
                r = r.expanded(1e-4 * rect.diameter());
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Zero count and power sums `Σ(z_i − c)`, `Σ(z_i − c)²` of the zeros inside `|s − c| = ρ`.
#[derive(Clone, Copy, Debug)]
pub struct CircleMoments {
    pub count: usize,
    pub center: Complex64,
    pub radius: f64,
    pub p1: Complex64,
    pub p2: Complex64,
    pub nodes: usize,
    /// The moments changed by less than `rel_tol·ρᵏ` under the last node doubling.
    pub converged: bool,
}

/// Trapezoid rule on `|s − c| = ρ` applied to the single-valued `L̃ = log f − w·log(s − c)`.
/// Integrating `∮ (s − c)ᵏ f′/f ds` by parts gives `p₁ = −ρ⟨L̃ e^{iθ}⟩` and `p₂ = −2ρ²⟨L̃ e^{2iθ}⟩`.
/// Nodes double from `nodes` until every phase step is below `π/2` and the moments move by less
/// than `rel_tol·ρᵏ` per doubling.
/// Small circles around a zero legitimately see small `|f|`, so only exact zeros are rejected here.
pub fn circle_moments<Z: ZetaFunction + ?Sized>(
    zeta: &Z,
    c: Complex64,
    rho: f64,
    nodes: usize,
    rel_tol: f64,
) -> Result<CircleMoments> {
    let at = |k: usize, i: usize| c + Complex64::from_polar(rho, 2.0 * PI * i as f64 / k as f64);
    let mut k = nodes.max(16).next_power_of_two();
    let mut values: Vec<ZetaValue> = (0..k)
        .into_par_iter()
        .map(|i| checked_against(zeta, at(k, i), f64::MIN))
        .collect::<Result<_>>()?;
    let drift = mean_drift(values.iter());
    for (i, v) in values.iter_mut().enumerate() {
        detrend(v, at(k, i), c, drift);
    }
    let mut previous: Option<(usize, Complex64, Complex64)> = None;
    loop {
        let mut steps = Vec::with_capacity(k);
        for i in 0..k {
            let (step, ok) = phase_step(at(k, i), &values[i], at(k, (i + 1) % k), &values[(i + 1) % k]);
            if !ok {
                break;
            }
            steps.push(step);
        }
        if steps.len() == k {
            let w = round_winding(steps.iter().sum::<f64>() / (2.0 * PI))?;
            let mut arg = values[0].log.im;
            let mut s1 = Complex64::new(0.0, 0.0);
            let mut s2 = Complex64::new(0.0, 0.0);
            for i in 0..k {
                let theta = 2.0 * PI * i as f64 / k as f64;
                let lt = Complex64::new(values[i].log.re - w as f64 * rho.ln(), arg - w as f64 * theta);
                s1 += lt * Complex64::from_polar(1.0, theta);
                s2 += lt * Complex64::from_polar(1.0, 2.0 * theta);
                arg += steps[i];
            }
            let p1 = -rho * s1 / k as f64;
            let p2 = -2.0 * rho * rho * s2 / k as f64;
            let done = previous.map_or(false, |(pw, q1, q2)| {
                let tol = rel_tol * (w.max(1) as f64);
                pw == w && (p1 - q1).norm() <= tol * rho && (p2 - q2).norm() <= tol * rho * rho
            });
            if done || 2 * k > MAX_CIRCLE_NODES {
                return Ok(CircleMoments {
                    count: w,
                    center: c,
                    radius: rho,
                    p1,
                    p2,
                    nodes: k,
                    converged: done,
                });
            }
            previous = Some((w, p1, p2));
        } else if 2 * k > MAX_CIRCLE_NODES {
            return Err(Error::PhaseTracking("circle contour phase does not resolve".into()));
        }
        let mut odd: Vec<ZetaValue> = (0..k)
            .into_par_iter()
            .map(|i| checked_against(zeta, at(2 * k, 2 * i + 1), f64::MIN))
            .collect::<Result<_>>()?;
        for (i, v) in odd.iter_mut().enumerate() {
            detrend(v, at(2 * k, 2 * i + 1), c, drift);
        }
        values = values.into_iter().zip(odd).flat_map(|(a, b)| [a, b]).collect();
        k *= 2;
    }
}
