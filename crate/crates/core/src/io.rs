//! Flat-file formats: CSV schemas for estimates and curves, key=value config files and
//! run manifests, and a dependency-free SVG plot.
//!
//! Floats in CSV output carry 12 significant digits. Column order is fixed.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::simulator::{CachingSpec, SimConfig, Sweep, TradeoffEstimate};
use crate::theory::{CaseTag, CurvePoint, SourceTag, TheoryParams, TradeoffCurve};
use crate::{Error, Result};

/// Header of `simulate` output.
pub const SIMULATE_COLUMNS: [&str; 17] = [
    "n",
    "m",
    "gamma_r",
    "g_c",
    "Delta",
    "K",
    "K_overridden",
    "caching_kind",
    "trials",
    "seed",
    "p_hat",
    "p_ci95",
    "tmin_hat",
    "tmin_ci95",
    "tmin_diag_minuser",
    "analytic_outage",
    "status",
];

/// Header of `theory` output.
pub const THEORY_COLUMNS: [&str; 9] = [
    "source_tag",
    "case_tag",
    "p",
    "t_normalized",
    "gamma_r",
    "m",
    "n",
    "K",
    "Delta",
];

/// Header of the `compare` summary.
pub const COMPARE_COLUMNS: [&str; 7] = [
    "gamma_r",
    "left_source",
    "right_source",
    "p",
    "t_left",
    "t_right",
    "rel_error",
];

/// Formats `x` rounded to 12 significant digits, in the shortest form that parses
/// back to the rounded value.
pub fn fmt_float(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("valid float literal");
    let mag = rounded.abs();
    if rounded == 0.0 || (1e-5..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(writer: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> Error {
    let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Csv {
        row,
        msg: e.to_string(),
    }
}

fn estimate_record(e: &TradeoffEstimate) -> Vec<String> {
    let c = &e.config;
    vec![
        c.n.to_string(),
        c.m.to_string(),
        fmt_float(c.gamma_r),
        c.g_c.to_string(),
        fmt_float(c.delta),
        e.reuse.to_string(),
        e.reuse_overridden.to_string(),
        e.caching_kind.to_string(),
        e.trials.to_string(),
        c.seed.to_string(),
        fmt_float(e.p_hat),
        fmt_float(e.p_ci),
        fmt_float(e.t_min_hat),
        fmt_float(e.t_ci),
        fmt_float(e.t_min_diag),
        fmt_float(e.analytic_outage),
        "ok".to_string(),
    ]
}

/// One simulated sweep for a given base configuration.
pub struct SimulatedBlock<'a> {
    pub base: &'a SimConfig,
    pub sweep: &'a Sweep,
}

/// Serializes sweeps as `simulate` CSV: estimates first, then one warning row per
/// skipped point with the reason in `status`.
pub fn write_simulate_csv(blocks: &[SimulatedBlock<'_>]) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(SIMULATE_COLUMNS).map_err(csv_err)?;
    for block in blocks {
        for e in &block.sweep.estimates {
            w.write_record(estimate_record(e)).map_err(csv_err)?;
        }
    }
    for block in blocks {
        let b = block.base;
        for s in &block.sweep.skipped {
            let mut row = vec![
                b.n.to_string(),
                b.m.to_string(),
                fmt_float(b.gamma_r),
                s.g_c.to_string(),
                fmt_float(b.delta),
            ];
            row.extend(std::iter::repeat_n(String::new(), 2));
            row.push(b.caching.to_string());
            row.push(b.trials.to_string());
            row.push(b.seed.to_string());
            row.extend(std::iter::repeat_n(String::new(), 6));
            row.push(format!("skipped: {}", s.reason));
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    finish(w)
}

/// Serializes curves as `theory` CSV with normalized throughput `t / C`.
pub fn write_theory_csv(params: &TheoryParams, curve: &TradeoffCurve) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(THEORY_COLUMNS).map_err(csv_err)?;
    write_theory_rows(&mut w, params, curve)?;
    finish(w)
}

/// Several parameter sets in one `theory` CSV.
pub fn write_theory_csv_multi(blocks: &[(TheoryParams, TradeoffCurve)]) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(THEORY_COLUMNS).map_err(csv_err)?;
    for (params, curve) in blocks {
        write_theory_rows(&mut w, params, curve)?;
    }
    finish(w)
}

fn write_theory_rows(
    w: &mut csv::Writer<Vec<u8>>,
    params: &TheoryParams,
    curve: &TradeoffCurve,
) -> Result<()> {
    for pt in &curve.points {
        w.write_record([
            pt.source.to_string(),
            pt.case.to_string(),
            fmt_float(pt.p),
            fmt_float(pt.t / params.rate),
            fmt_float(params.gamma_r),
            params.m.to_string(),
            params.n.to_string(),
            fmt_float(params.reuse),
            fmt_float(params.delta),
        ])
        .map_err(csv_err)?;
    }
    Ok(())
}

/// A curve read back from CSV, normalized by `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCurve {
    pub gamma_r: f64,
    pub source: SourceTag,
    /// `(p, t / C)` sorted by `p`.
    pub points: Vec<(f64, f64)>,
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, row: usize, name: &str) -> Result<T> {
    let raw = rec.get(idx).ok_or_else(|| Error::Csv {
        row,
        msg: format!("missing column {name}"),
    })?;
    raw.trim().parse().map_err(|_| Error::Csv {
        row,
        msg: format!("cannot parse {name} = {raw:?}"),
    })
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers.iter().position(|h| h == name).ok_or_else(|| Error::Csv {
        row: 1,
        msg: format!("missing column {name}"),
    })
}

fn push_point(curves: &mut Vec<LabeledCurve>, gamma_r: f64, source: SourceTag, p: f64, t: f64) {
    match curves
        .iter_mut()
        .find(|c| c.source == source && (c.gamma_r - gamma_r).abs() < 1e-9)
    {
        Some(c) => c.points.push((p, t)),
        None => curves.push(LabeledCurve {
            gamma_r,
            source,
            points: vec![(p, t)],
        }),
    }
}

/// Reads either a `simulate` or a `theory` CSV into curves grouped by `(gamma_r, source)`.
///
/// Simulated throughput is divided by `rate`; theory rows are already normalized.
/// Warning rows of a simulate file are ignored.
pub fn read_curves(text: &str, rate: f64) -> Result<Vec<LabeledCurve>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = reader.headers().map_err(csv_err)?.clone();
    let mut curves = Vec::new();
    let is_sim = headers.iter().any(|h| h == "p_hat");
    let is_theory = headers.iter().any(|h| h == "source_tag");
    if !is_sim && !is_theory {
        return Err(Error::Csv {
            row: 1,
            msg: "header matches neither the simulate nor the theory schema".into(),
        });
    }
    if is_sim {
        let gi = column_index(&headers, "gamma_r")?;
        let pi = column_index(&headers, "p_hat")?;
        let ti = column_index(&headers, "tmin_hat")?;
        let si = column_index(&headers, "status")?;
        for (i, rec) in reader.records().enumerate() {
            let row = i + 2;
            let rec = rec.map_err(csv_err)?;
            if rec.get(si).map(str::trim) != Some("ok") {
                continue;
            }
            let g: f64 = parse_field(&rec, gi, row, "gamma_r")?;
            let p: f64 = parse_field(&rec, pi, row, "p_hat")?;
            let t: f64 = parse_field(&rec, ti, row, "tmin_hat")?;
            push_point(&mut curves, g, SourceTag::Simulated, p, t / rate);
        }
    } else {
        let srci = column_index(&headers, "source_tag")?;
        let gi = column_index(&headers, "gamma_r")?;
        let pi = column_index(&headers, "p")?;
        let ti = column_index(&headers, "t_normalized")?;
        for (i, rec) in reader.records().enumerate() {
            let row = i + 2;
            let rec = rec.map_err(csv_err)?;
            let source: SourceTag = parse_field(&rec, srci, row, "source_tag")?;
            let g: f64 = parse_field(&rec, gi, row, "gamma_r")?;
            let p: f64 = parse_field(&rec, pi, row, "p")?;
            let t: f64 = parse_field(&rec, ti, row, "t_normalized")?;
            push_point(&mut curves, g, source, p, t);
        }
    }
    for c in &mut curves {
        c.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    Ok(curves)
}

/// Reads a theory CSV back into curve points (throughput stays normalized).
pub fn read_theory_points(text: &str) -> Result<Vec<(f64, CurvePoint)>> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = reader.headers().map_err(csv_err)?.clone();
    let idx: Vec<usize> = THEORY_COLUMNS
        .iter()
        .map(|c| column_index(&headers, c))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(csv_err)?;
        let source: SourceTag = parse_field(&rec, idx[0], row, "source_tag")?;
        let case: CaseTag = parse_field(&rec, idx[1], row, "case_tag")?;
        let p = parse_field(&rec, idx[2], row, "p")?;
        let t = parse_field(&rec, idx[3], row, "t_normalized")?;
        let gamma_r = parse_field(&rec, idx[4], row, "gamma_r")?;
        out.push((gamma_r, CurvePoint { p, t, case, source }));
    }
    Ok(out)
}

/// Linear interpolation of `t` at `p` on points sorted by `p`; `None` outside the range.
pub fn interpolate(points: &[(f64, f64)], p: f64) -> Option<f64> {
    let first = points.first()?;
    let last = points.last()?;
    if p < first.0 || p > last.0 {
        return None;
    }
    let idx = points.partition_point(|&(x, _)| x < p);
    if idx < points.len() && points[idx].0 == p {
        return Some(points[idx].1);
    }
    let (x0, y0) = points[idx - 1];
    let (x1, y1) = points[idx];
    Some(y0 + (y1 - y0) * (p - x0) / (x1 - x0))
}

/// One matched comparison point.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub gamma_r: f64,
    pub left: SourceTag,
    pub right: SourceTag,
    pub p: f64,
    pub t_left: f64,
    pub t_right: f64,
    pub rel_error: f64,
}

/// Pairs each left curve with the right curve of the same `gamma_r` (preferring the
/// same source, else `against`) and evaluates `|left - right| / right` at every left
/// point inside the right curve's outage range.
pub fn compare_curves(
    left: &[LabeledCurve],
    right: &[LabeledCurve],
    against: SourceTag,
) -> Result<Vec<ComparisonRow>> {
    let mut rows = Vec::new();
    let mut paired = false;
    for l in left {
        let same_gamma = |c: &&LabeledCurve| (c.gamma_r - l.gamma_r).abs() < 1e-9;
        let target = right
            .iter()
            .filter(same_gamma)
            .find(|c| c.source == l.source)
            .or_else(|| right.iter().filter(same_gamma).find(|c| c.source == against));
        let Some(r) = target else { continue };
        paired = true;
        for &(p, t) in &l.points {
            if let Some(tr) = interpolate(&r.points, p) {
                let rel_error = if tr == 0.0 && t == 0.0 { 0.0 } else { (t - tr).abs() / tr };
                rows.push(ComparisonRow {
                    gamma_r: l.gamma_r,
                    left: l.source,
                    right: r.source,
                    p,
                    t_left: t,
                    t_right: tr,
                    rel_error,
                });
            }
        }
    }
    if !paired {
        return Err(Error::invalid("no curves with matching gamma_r to compare"));
    }
    if rows.is_empty() {
        return Err(Error::DisjointRanges);
    }
    Ok(rows)
}

pub fn write_comparison_csv(rows: &[ComparisonRow]) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(COMPARE_COLUMNS).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            fmt_float(r.gamma_r),
            r.left.to_string(),
            r.right.to_string(),
            fmt_float(r.p),
            fmt_float(r.t_left),
            fmt_float(r.t_right),
            fmt_float(r.rel_error),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

/// Parses flat `key = value` text. `#` starts a comment; blank lines are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::invalid(format!("config line {}: expected key=value, got {line:?}", i + 1))
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

/// Configuration echo of a command invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub seed: Option<u64>,
    pub sim: Option<SimConfig>,
    pub gammas: Vec<f64>,
    pub cluster_sizes: Vec<usize>,
    pub theory: Option<TheoryParams>,
    pub started_unix: u64,
    pub finished_unix: u64,
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(ToString::to_string).unwrap_or_default()
}

impl RunManifest {
    /// `key=value` lines; floats use exact round-trip formatting.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        kv("tool_version", self.tool_version.clone());
        kv("command", self.command.clone());
        kv("seed", opt(&self.seed));
        kv("started_unix", self.started_unix.to_string());
        kv("finished_unix", self.finished_unix.to_string());
        kv("gammas", join(&self.gammas));
        kv("cluster_sizes", join(&self.cluster_sizes));
        if let Some(c) = &self.sim {
            kv("sim.n", c.n.to_string());
            kv("sim.m", c.m.to_string());
            kv("sim.gamma_r", c.gamma_r.to_string());
            kv("sim.g_c", c.g_c.to_string());
            kv("sim.delta", c.delta.to_string());
            kv("sim.C", c.rate.to_string());
            kv("sim.K_override", opt(&c.reuse_override));
            kv("sim.caching", c.caching.to_string());
            kv("sim.trials", c.trials.to_string());
            kv("sim.seed", c.seed.to_string());
            kv("sim.allow_self_hit", c.allow_self_hit.to_string());
            kv("sim.workers", c.workers.to_string());
        }
        if let Some(t) = &self.theory {
            kv("theory.gamma_r", t.gamma_r.to_string());
            kv("theory.m", t.m.to_string());
            kv("theory.n", t.n.to_string());
            kv("theory.K", t.reuse.to_string());
            kv("theory.C", t.rate.to_string());
            kv("theory.delta", t.delta.to_string());
            kv("theory.rho1", opt(&t.rho1));
            kv("theory.rho2", opt(&t.rho2));
            kv("theory.rho3", opt(&t.rho3));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let map = parse_key_values(text)?;
        let get = |k: &str| -> Result<&str> {
            map.get(k)
                .map(String::as_str)
                .ok_or_else(|| Error::invalid(format!("manifest is missing {k}")))
        };
        fn num<T: std::str::FromStr>(k: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::invalid(format!("manifest field {k} has bad value {v:?}")))
        }
        fn opt_num<T: std::str::FromStr>(k: &str, v: &str) -> Result<Option<T>> {
            if v.is_empty() {
                Ok(None)
            } else {
                num(k, v).map(Some)
            }
        }
        fn list<T: std::str::FromStr>(k: &str, v: &str) -> Result<Vec<T>> {
            if v.is_empty() {
                return Ok(Vec::new());
            }
            v.split(',').map(|x| num(k, x)).collect()
        }
        let sim = if map.contains_key("sim.n") {
            Some(SimConfig {
                n: num("sim.n", get("sim.n")?)?,
                m: num("sim.m", get("sim.m")?)?,
                gamma_r: num("sim.gamma_r", get("sim.gamma_r")?)?,
                g_c: num("sim.g_c", get("sim.g_c")?)?,
                delta: num("sim.delta", get("sim.delta")?)?,
                rate: num("sim.C", get("sim.C")?)?,
                reuse_override: opt_num("sim.K_override", get("sim.K_override")?)?,
                caching: get("sim.caching")?.parse::<CachingSpec>()?,
                trials: num("sim.trials", get("sim.trials")?)?,
                seed: num("sim.seed", get("sim.seed")?)?,
                allow_self_hit: num("sim.allow_self_hit", get("sim.allow_self_hit")?)?,
                workers: num("sim.workers", get("sim.workers")?)?,
            })
        } else {
            None
        };
        let theory = if map.contains_key("theory.gamma_r") {
            Some(TheoryParams {
                gamma_r: num("theory.gamma_r", get("theory.gamma_r")?)?,
                m: num("theory.m", get("theory.m")?)?,
                n: num("theory.n", get("theory.n")?)?,
                reuse: num("theory.K", get("theory.K")?)?,
                rate: num("theory.C", get("theory.C")?)?,
                delta: num("theory.delta", get("theory.delta")?)?,
                rho1: opt_num("theory.rho1", get("theory.rho1")?)?,
                rho2: opt_num("theory.rho2", get("theory.rho2")?)?,
                rho3: opt_num("theory.rho3", get("theory.rho3")?)?,
            })
        } else {
            None
        };
        Ok(RunManifest {
            tool_version: get("tool_version")?.to_string(),
            command: get("command")?.to_string(),
            seed: opt_num("seed", get("seed")?)?,
            sim,
            gammas: list("gammas", get("gammas")?)?,
            cluster_sizes: list("cluster_sizes", get("cluster_sizes")?)?,
            theory,
            started_unix: num("started_unix", get("started_unix")?)?,
            finished_unix: num("finished_unix", get("finished_unix")?)?,
        })
    }
}

/// A polyline series for [`render_svg`].
#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

/// Throughput (log scale) versus outage probability, one polyline per series.
/// Non-positive throughputs cannot be drawn on the log axis and are dropped.
pub fn render_svg(title: &str, series: &[Series]) -> String {
    let (w, h) = (720.0, 480.0);
    let (left, right, top, bottom) = (80.0, 180.0, 40.0, 60.0);
    let pw = w - left - right;
    let ph = h - top - bottom;

    let ys: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .filter(|&t| t > 0.0 && t.is_finite())
        .collect();
    let (mut lo, mut hi) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| {
        (a.min(y.log10()), b.max(y.log10()))
    });
    if !lo.is_finite() {
        (lo, hi) = (-4.0, 0.0);
    }
    let (lo, hi) = (lo.floor(), hi.ceil().max(lo.floor() + 1.0));

    let x_of = |p: f64| left + p.clamp(0.0, 1.0) * pw;
    let y_of = |t: f64| top + (hi - t.log10()) / (hi - lo) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        left + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=10 {
        let p = i as f64 / 10.0;
        let x = x_of(p);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{top}" x2="{x:.2}" y2="{}" stroke="#ddd"/><text x="{x:.2}" y="{}" text-anchor="middle">{p:.1}</text>"##,
            top + ph,
            top + ph + 16.0
        );
    }
    let mut decade = lo;
    while decade <= hi + 1e-9 {
        let y = y_of(10f64.powf(decade));
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end">1e{}</text>"##,
            left + pw,
            left - 6.0,
            y + 4.0,
            decade as i64
        );
        decade += 1.0;
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">outage probability</text>"#,
        left + pw / 2.0,
        h - 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">min throughput per user / C</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );

    for (i, series) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = series
            .points
            .iter()
            .filter(|&&(_, t)| t > 0.0 && t.is_finite())
            .map(|&(p, t)| format!("{:.2},{:.2}", x_of(p), y_of(t)))
            .collect();
        let dash = if series.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
            coords.join(" ")
        );
        if coords.len() == 1 {
            let (x, y) = coords[0].split_once(',').unwrap();
            let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>"#);
        }
        let ly = top + 14.0 + 18.0 * i as f64;
        let lx = left + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/><text x="{}" y="{}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            escape(&series.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn float_format() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(2.5e-3), "0.0025");
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_float(1e-11), "1e-11");
        assert_eq!(fmt_float(10_000.0), "10000");
    }

    #[test]
    fn interpolation() {
        let pts = [(0.0, 1.0), (0.5, 2.0), (1.0, 4.0)];
        assert_eq!(interpolate(&pts, 0.25), Some(1.5));
        assert_eq!(interpolate(&pts, 0.5), Some(2.0));
        assert_eq!(interpolate(&pts, 1.0), Some(4.0));
        assert_eq!(interpolate(&pts, 1.1), None);
        assert_eq!(interpolate(&[(0.3, 7.0)], 0.3), Some(7.0));
        assert_eq!(interpolate(&[], 0.3), None);
    }

    #[test]
    fn key_value_parsing() {
        let map = parse_key_values("# comment\nn = 100\n\nseed=4 # trailing\n").unwrap();
        assert_eq!(map["n"], "100");
        assert_eq!(map["seed"], "4");
        assert!(parse_key_values("justakey\n").is_err());
    }

    #[test]
    fn malformed_theory_csv_names_row() {
        let text = "source_tag,case_tag,p,t_normalized,gamma_r,m,n,K,Delta\n\
                    achievable,achievable_case2,0.5,0.01,0.6,1000,10000,4,1\n\
                    achievable,achievable_case2,oops,0.01,0.6,1000,10000,4,1\n";
        match read_curves(text, 1.0) {
            Err(Error::Csv { row, .. }) => assert_eq!(row, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(read_curves("a,b\n1,2\n", 1.0).is_err());
    }

    #[test]
    fn svg_has_one_polyline_per_series() {
        let svg = render_svg(
            "t",
            &[
                Series { label: "a".into(), points: vec![(0.1, 0.01), (0.5, 0.001)], dashed: false },
                Series { label: "b<c".into(), points: vec![(0.2, 0.02)], dashed: true },
            ],
        );
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("b&lt;c"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    fn arb_sim() -> impl Strategy<Value = SimConfig> {
        (
            1usize..100_000,
            1usize..5000,
            0.0f64..1.0,
            1usize..1000,
            0.01f64..5.0,
            proptest::option::of(1usize..64),
            any::<u64>(),
            any::<bool>(),
            prop_oneof![
                Just(CachingSpec::Optimal),
                Just(CachingSpec::Uniform),
                (0.0f64..2.0).prop_map(|gamma_c| CachingSpec::Zipf { gamma_c })
            ],
        )
            .prop_map(|(n, m, gamma_r, g_c, delta, k, seed, self_hit, caching)| SimConfig {
                n,
                m,
                gamma_r,
                g_c,
                delta,
                rate: delta * 3.0,
                reuse_override: k,
                caching,
                trials: g_c + 1,
                seed,
                allow_self_hit: self_hit,
                workers: 0,
            })
    }

    proptest! {
        #[test]
        fn manifest_round_trip(sim in proptest::option::of(arb_sim()), gamma in 0.01f64..0.99, rho in proptest::option::of(0.01f64..3.0), t0 in any::<u32>()) {
            let theory = TheoryParams { rho3: rho, rho1: rho.map(|r| r + 1.0), ..TheoryParams::new(gamma, 1000, 10_000) };
            let manifest = RunManifest {
                tool_version: "0.1.0".into(),
                command: "simulate".into(),
                seed: sim.as_ref().map(|s| s.seed),
                sim,
                gammas: vec![gamma, 0.25],
                cluster_sizes: vec![4, 16, 25],
                theory: Some(theory),
                started_unix: t0 as u64,
                finished_unix: t0 as u64 + 5,
            };
            let back = RunManifest::from_text(&manifest.to_text()).unwrap();
            prop_assert_eq!(back, manifest);
        }

        #[test]
        fn theory_csv_round_trip(ps in proptest::collection::vec((0.0f64..1.0, 1e-9f64..10.0, 1u8..4), 0..40)) {
            let params = TheoryParams::new(0.6, 1000, 10_000);
            let curve = TradeoffCurve::new(ps.iter().map(|&(p, t, k)| CurvePoint {
                p, t, case: CaseTag::Outer(k), source: SourceTag::Outer,
            }).collect());
            let text = write_theory_csv(&params, &curve).unwrap();
            let back = read_theory_points(&text).unwrap();
            prop_assert_eq!(back.len(), curve.points.len());
            let rebuilt = TradeoffCurve::new(back.iter().map(|(_, pt)| *pt).collect());
            // Parsing recovers the 12-digit values exactly, so re-serializing is stable.
            prop_assert_eq!(write_theory_csv(&params, &rebuilt).unwrap(), text);
            for ((_, b), a) in back.iter().zip(&curve.points) {
                prop_assert!((b.p - a.p).abs() <= 1e-11 * a.p.abs().max(1e-300));
                prop_assert!((b.t - a.t).abs() <= 1e-11 * a.t);
                prop_assert_eq!(b.case, a.case);
            }
        }
    }
}
