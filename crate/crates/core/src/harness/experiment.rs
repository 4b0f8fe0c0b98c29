//! Scripted sweeps: each row is one library call, rows appear in configuration order.

use std::path::PathBuf;

use num_complex::Complex64;
use serde_json::json;

use crate::covers::{factorization_check, l0_congruence_check, l0_cover};
use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, ExperimentKind};
use crate::harness::fixtures::Cover;
use crate::harness::output::{write_outputs, Cell, Sidecar, Table};
use crate::representations::integral_generators;
use crate::resonance::{count_m, count_n, zeta_source, BoxOptions, CountOptions, ZetaFunction};
use crate::scheme::SchottkyScheme;
use crate::thermo::hausdorff_dimension;

#[derive(Debug)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub table: Table,
    pub summary: serde_json::Value,
    /// The error that stopped the sweep; rows before it are kept.
    pub failure: Option<Error>,
}

impl ExperimentReport {
    pub fn succeeded(&self) -> bool {
        self.failure.is_none()
    }
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    scheme: SchottkyScheme<f64>,
    covers: Vec<Cover>,
    delta: Option<f64>,
}

impl Context<'_> {
    fn delta(&mut self) -> Result<f64> {
        if let Some(d) = self.delta {
            return Ok(d);
        }
        let d = hausdorff_dimension(&self.scheme)?.delta;
        self.delta = Some(d);
        Ok(d)
    }

    fn zeta(&self, cover: &Cover) -> Result<Box<dyn ZetaFunction>> {
        let k = &self.config.knobs;
        zeta_source(&self.scheme, &cover.rep(), k.method, k.q, k.level, k.word_cutoff)
    }
}

/// `⟨s⟩ = √(1 + |s|²)`.
pub fn japanese_bracket(s: Complex64) -> f64 {
    (1.0 + s.norm_sqr()).sqrt()
}

/// Square grid on `[−R, R]²` restricted to the closed disk `|s| ≤ R`.
pub fn disk_grid(radius: f64, n: usize) -> Vec<Complex64> {
    let step = 2.0 * radius / (n - 1) as f64;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let s = Complex64::new(-radius + i as f64 * step, -radius + j as f64 * step);
            if s.norm() <= radius * (1.0 + 1e-12) {
                out.push(s);
            }
        }
    }
    out
}

/// Low-discrepancy points in a rectangle: golden-ratio real parts, evenly spaced heights.
pub fn sample_points(rect: [f64; 4], n: usize) -> Vec<Complex64> {
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let [x0, x1, y0, y1] = rect;
    (0..n)
        .map(|j| {
            let u = (0.5 + j as f64 * golden).fract();
            let v = (j as f64 + 0.5) / n as f64;
            Complex64::new(x0 + u * (x1 - x0), y0 + v * (y1 - y0))
        })
        .collect()
}

/// Constant per degree (max of the row ratios), their median, and whether every constant is
/// within twice the median.
pub fn growth_constants(table: &Table) -> serde_json::Value {
    let (Some(dj), Some(rj)) = (table.column("degree"), table.column("ratio")) else {
        return serde_json::Value::Null;
    };
    let mut per: Vec<(i64, f64)> = Vec::new();
    for row in &table.rows {
        let (Cell::Int(d), Cell::Float(r)) = (&row[dj], &row[rj]) else { continue };
        match per.iter_mut().find(|(k, _)| k == d) {
            Some(e) => e.1 = e.1.max(*r),
            None => per.push((*d, *r)),
        }
    }
    let mut sorted: Vec<f64> = per.iter().map(|e| e.1).collect();
    sorted.sort_by(f64::total_cmp);
    let median = match sorted.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => sorted[n / 2],
        n => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
    };
    let uniform = sorted.last().copied().unwrap_or(f64::NAN);
    json!({
        "constants": per.iter().map(|(d, c)| json!({"degree": d, "constant": c})).collect::<Vec<_>>(),
        "median": median,
        "uniform_constant": uniform,
        "within_twice_median": per.iter().all(|e| e.1 <= 2.0 * median.abs()),
    })
}

fn weyl_scaling(ctx: &mut Context, table: &mut Table) -> Result<()> {
    let delta = ctx.delta()?;
    let opts = CountOptions {
        locate: crate::resonance::LocateOptions {
            tol: ctx.config.knobs.tol,
            ..CountOptions::default().locate
        },
        ..CountOptions::default()
    };
    for cover in &ctx.covers {
        let zeta = ctx.zeta(cover)?;
        for &r in &ctx.config.params.radii {
            let c = count_n(zeta.as_ref(), delta, r, &opts)?;
            let d = cover.degree();
            table.push(vec![
                cover.label.clone().into(),
                d.into(),
                r.into(),
                c.count.into(),
                (c.count as f64 / (d as f64 * r * r)).into(),
                c.unresolved.into(),
            ]);
        }
    }
    Ok(())
}

fn box_counts(ctx: &mut Context, table: &mut Table) -> Result<()> {
    let delta = ctx.delta()?;
    for cover in &ctx.covers {
        let zeta = ctx.zeta(cover)?;
        let ell0 = l0_cover(&ctx.scheme, &cover.action, ctx.config.knobs.max_word_len)?.ell0;
        for &sigma in &ctx.config.params.sigmas {
            for &t in &ctx.config.params.heights {
                let m = count_m(zeta.as_ref(), delta, sigma, t, &BoxOptions::default())?;
                table.push(vec![
                    cover.label.clone().into(),
                    sigma.into(),
                    t.into(),
                    m.count.into(),
                    cover.degree().into(),
                    ell0.into(),
                ]);
            }
        }
    }
    Ok(())
}

fn growth_bound(ctx: &mut Context, table: &mut Table) -> Result<()> {
    let grid = disk_grid(ctx.config.params.grid_radius, ctx.config.params.grid_n);
    for cover in &ctx.covers {
        let zeta = ctx.zeta(cover)?;
        let d = cover.degree() as f64;
        for &s in &grid {
            let v = zeta.eval(s)?;
            table.push(vec![
                cover.label.clone().into(),
                cover.degree().into(),
                s.re.into(),
                s.im.into(),
                v.log.re.into(),
                (v.log.re / (d * japanese_bracket(s).powi(2))).into(),
                v.precision_warning.into(),
            ]);
        }
    }
    Ok(())
}

fn factorization(ctx: &mut Context, table: &mut Table) -> Result<()> {
    let k = &ctx.config.knobs;
    let samples = sample_points(ctx.config.params.sample_rect, ctx.config.params.samples);
    for cover in &ctx.covers {
        let group = cover.abelian.as_ref().ok_or_else(|| {
            Error::InvalidParameter(format!("factorization needs an abelian regular cover, got {}", cover.label))
        })?;
        let rep = factorization_check(&ctx.scheme, group, &samples, k.q, k.level)?;
        table.push(vec![
            cover.label.clone().into(),
            rep.degree.into(),
            rep.characters.into(),
            samples.len().into(),
            rep.max_relative_error.into(),
        ]);
    }
    Ok(())
}

fn congruence_l0(ctx: &mut Context, table: &mut Table) -> Result<()> {
    let gens = integral_generators(&ctx.scheme)?;
    for &q in &ctx.config.params.moduli {
        let c = l0_congruence_check(&ctx.scheme, &gens, q, ctx.config.knobs.max_word_len)?;
        table.push(vec![
            q.into(),
            c.degree.into(),
            c.ell0.into(),
            c.certified.into(),
            c.bound.into(),
            c.holds.into(),
        ]);
    }
    Ok(())
}

fn header(kind: ExperimentKind) -> &'static [&'static str] {
    match kind {
        ExperimentKind::WeylScaling => &["cover", "degree", "r", "n", "ratio", "unresolved"],
        ExperimentKind::BoxCounts => &["cover", "sigma", "t", "m", "degree", "ell0"],
        ExperimentKind::GrowthBound => &["cover", "degree", "re_s", "im_s", "log_abs_det", "ratio", "precision_warning"],
        ExperimentKind::Factorization => &["cover", "degree", "characters", "samples", "max_relative_error"],
        ExperimentKind::CongruenceL0 => &["q", "degree", "ell0", "certified", "bound", "holds"],
    }
}

fn summarize(kind: ExperimentKind, table: &Table) -> serde_json::Value {
    let max = |c: &str| table.floats(c).into_iter().fold(f64::NEG_INFINITY, f64::max);
    let min = |c: &str| table.floats(c).into_iter().fold(f64::INFINITY, f64::min);
    let all = |c: &str| {
        let j = table.column(c).expect("column exists");
        table.rows.iter().all(|r| r[j] == Cell::Bool(true))
    };
    match kind {
        ExperimentKind::WeylScaling => json!({"ratio_min": min("ratio"), "ratio_max": max("ratio")}),
        ExperimentKind::BoxCounts => json!({"m_total": table.floats("m").iter().sum::<f64>()}),
        ExperimentKind::GrowthBound => growth_constants(table),
        ExperimentKind::Factorization => json!({"max_relative_error": max("max_relative_error")}),
        ExperimentKind::CongruenceL0 => {
            let j = table.column("certified").expect("column exists");
            let certified = table.rows.iter().any(|r| r[j] == Cell::Bool(true));
            json!({"all_hold": all("holds"), "any_certified": certified})
        }
    }
}

/// Runs one sweep. Configuration problems are returned as errors; a failure while sweeping is
/// recorded in the report together with the rows already computed.
pub fn run_experiment(config: &ExperimentConfig, kind: ExperimentKind) -> Result<ExperimentReport> {
    config.validate()?;
    let scheme = config.scheme.load()?;
    let covers = config
        .covers
        .iter()
        .map(|c| c.resolve(&scheme))
        .collect::<Result<Vec<_>>>()?;
    if kind == ExperimentKind::CongruenceL0 {
        integral_generators(&scheme)?;
    }
    let mut ctx = Context {
        config,
        scheme,
        covers,
        delta: config.knobs.delta,
    };
    let mut table = Table::new(header(kind));
    let outcome = match kind {
        ExperimentKind::WeylScaling => weyl_scaling(&mut ctx, &mut table),
        ExperimentKind::BoxCounts => box_counts(&mut ctx, &mut table),
        ExperimentKind::GrowthBound => growth_bound(&mut ctx, &mut table),
        ExperimentKind::Factorization => factorization(&mut ctx, &mut table),
        ExperimentKind::CongruenceL0 => congruence_l0(&mut ctx, &mut table),
    };
    Ok(ExperimentReport {
        kind,
        summary: summarize(kind, &table),
        table,
        failure: outcome.err(),
    })
}

/// Writes the CSV and its sidecar; returns the sidecar path.
pub fn write_experiment(config: &ExperimentConfig, report: &ExperimentReport) -> Result<PathBuf> {
    let mut side = Sidecar::new(&format!("experiment {}", report.kind.name()), config);
    side.summary = report.summary.clone();
    if let Some(e) = &report.failure {
        side = side.failed(e);
    }
    write_outputs(&config.output.csv, &report.table, &side)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::fixtures::{CoverSource, SchemeSource};

    fn cylinder_config(csv: PathBuf) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(
            SchemeSource::Fixture { spec: "cylinder".into() },
            vec![CoverSource::Trivial, CoverSource::Regular { spec: "Z2:1".into() }],
            csv,
        );
        cfg.params.radii = vec![6.5];
        cfg.params.sigmas = vec![-1.5, 0.7];
        cfg.params.heights = vec![0.0, 3.0];
        cfg.params.grid_radius = 6.0;
        cfg.params.grid_n = 5;
        cfg.params.samples = 4;
        cfg
    }

    #[test]
    fn grids() {
        let g = disk_grid(2.0, 5);
        assert_eq!(g.len(), 13);
        assert!(g.iter().all(|s| s.norm() <= 2.0 + 1e-12));
        let p = sample_points([0.0, 1.0, -1.0, 1.0], 8);
        assert!(p.iter().all(|s| (0.0..=1.0).contains(&s.re) && s.im.abs() < 1.0));
        assert_eq!(japanese_bracket(Complex64::new(0.0, 0.0)), 1.0);
    }

    #[test]
    fn weyl_rows_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = cylinder_config(dir.path().join("w.csv"));
        let a = run_experiment(&cfg, ExperimentKind::WeylScaling).unwrap();
        assert!(a.succeeded());
        assert_eq!(a.table.rows.len(), 2);
        // cylinder ℓ = 2: N(r) ≈ k·r² with zeros −j + πin/k of multiplicity 2
        for r in a.table.floats("ratio") {
            assert!((r - 1.0).abs() < 0.3, "{r}");
        }
        let b = run_experiment(&cfg, ExperimentKind::WeylScaling).unwrap();
        assert_eq!(a.table.to_csv_string(), b.table.to_csv_string());
        let side = write_experiment(&cfg, &a).unwrap();
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(side).unwrap()).unwrap();
        assert_eq!(v["status"], "ok");
        assert_eq!(v["config"]["params"]["radii"][0], 6.5);
    }

    #[test]
    fn box_counts_vanish_right_of_delta() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = cylinder_config(dir.path().join("b.csv"));
        cfg.params.sigmas = vec![0.05, 0.7];
        let rep = run_experiment(&cfg, ExperimentKind::BoxCounts).unwrap();
        assert!(rep.succeeded());
        assert!(rep.table.floats("m").iter().all(|&m| m == 0.0));
        // ℓ₀ of the double cover is 2ℓ
        assert_eq!(rep.table.floats("ell0")[4], 4.0);
    }

    #[test]
    fn growth_and_factorization() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = cylinder_config(dir.path().join("g.csv"));
        cfg.knobs.q = 24;
        let g = run_experiment(&cfg, ExperimentKind::GrowthBound).unwrap();
        assert!(g.succeeded());
        assert_eq!(g.table.rows.len(), 2 * 13);
        assert_eq!(g.table.floats("log_abs_det")[6], f64::NEG_INFINITY);
        let c = g.summary["constants"][0]["constant"].as_f64().unwrap();
        assert!(c.is_finite());
        let f = run_experiment(&cfg, ExperimentKind::Factorization).unwrap();
        assert!(f.succeeded());
        assert!(f.summary["max_relative_error"].as_f64().unwrap() < 1e-8);
    }

    #[test]
    fn failures_keep_partial_rows() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = cylinder_config(dir.path().join("f.csv"));
        cfg.covers = vec![CoverSource::Regular { spec: "Z2:1".into() }, CoverSource::Regular { spec: "perm:2,3,1".into() }];
        let rep = run_experiment(&cfg, ExperimentKind::Factorization).unwrap();
        assert_eq!(rep.table.rows.len(), 1);
        assert!(matches!(rep.failure, Some(Error::InvalidParameter(_))));
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(write_experiment(&cfg, &rep).unwrap()).unwrap()).unwrap();
        assert_eq!(v["status"], "failed");
        cfg.params.samples = 0;
        assert!(run_experiment(&cfg, ExperimentKind::Factorization).is_err());
    }

    #[test]
    fn congruence_needs_integral_scheme() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = cylinder_config(dir.path().join("c.csv"));
        assert!(matches!(
            run_experiment(&cfg, ExperimentKind::CongruenceL0),
            Err(Error::NotIntegral { .. })
        ));
        let mut cfg = ExperimentConfig::new(
            SchemeSource::Fixture { spec: "integral".into() },
            vec![CoverSource::Trivial],
            dir.path().join("c.csv"),
        );
        cfg.params.moduli = vec![1, 2, 3];
        cfg.knobs.max_word_len = 4;
        let rep = run_experiment(&cfg, ExperimentKind::CongruenceL0).unwrap();
        assert!(rep.succeeded());
        assert_eq!(rep.summary["all_hold"], true);
    }
}
