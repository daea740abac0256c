use serde_json::{json, Map, Value};

use fbtiling::analysis::{
    asymptotic_sweep, classical_l, classical_l_direct, dirichlet_l_adaptive, dirichlet_series,
    moment_with, Arithmetic, MomentRequest, MomentValue, SeriesValue,
};
use fbtiling::census::{census, Census};
use fbtiling::classical::brocot;
use fbtiling::render::{render_svg, RenderOptions};
use fbtiling::tiling::locate;
use fbtiling::verify::{run_checks, Status};
use fbtiling::{Algorithm, Error, Execution};

use crate::args::{
    AsymArgs, CensusArgs, ClassicalArgs, Command, DirichletArgs, LocateArgs, MomentArgs,
    RenderArgs, VerifyArgs,
};
use crate::output::{num, Outcome, Table};

/// Relative tail used by `dirichlet` when neither a cut-off nor a tolerance is given.
const DEFAULT_RELATIVE_TAIL: f64 = 1e-3;

/// Largest classical level whose fractions are listed.
const LISTED_LEVEL: u32 = 6;

#[derive(Debug)]
pub enum Failure {
    Library(Error),
    Io(std::io::Error),
}

impl Failure {
    pub fn kind(&self) -> &'static str {
        match self {
            Failure::Library(e) => e.kind(),
            Failure::Io(_) => "io",
        }
    }

    /// 2 for malformed requests, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Library(Error::InvalidInput(_)) => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Library(e) => e.fmt(f),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type Result<T> = std::result::Result<T, Failure>;

pub fn name(command: &Command) -> &'static str {
    match command {
        Command::Census(_) => "census",
        Command::Moments(_) => "moments",
        Command::Dirichlet(_) => "dirichlet",
        Command::Asym(_) => "asym",
        Command::Locate(_) => "locate",
        Command::Verify(_) => "verify",
        Command::Classical(_) => "classical",
        Command::Render(_) => "render",
    }
}

pub fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Census(a) => census_cmd(a),
        Command::Moments(a) => moments_cmd(a),
        Command::Dirichlet(a) => dirichlet_cmd(a),
        Command::Asym(a) => asym_cmd(a),
        Command::Locate(a) => locate_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Classical(a) => classical_cmd(a),
        Command::Render(a) => render_cmd(a),
    }
}

fn outcome(parameters: Value, result: Value, provenance: Value, table: Table) -> Outcome {
    Outcome {
        parameters,
        result,
        provenance,
        table,
        raw: None,
        failed: false,
    }
}

fn depth_param(r: &std::ops::RangeInclusive<u32>) -> Value {
    if r.start() == r.end() {
        json!(r.start())
    } else {
        json!(format!("{}..{}", r.start(), r.end()))
    }
}

fn degrees_json(c: &Census) -> Value {
    let m: Map<String, Value> = c
        .degree_histogram
        .iter()
        .map(|(d, n)| (d.to_string(), json!(n)))
        .collect();
    Value::Object(m)
}

fn census_cmd(a: &CensusArgs) -> Result<Outcome> {
    let range = a.depths.range();
    let mut table = Table::new(&["depth", "f", "r", "v", "degrees"]);
    let mut items = Vec::new();
    for n in range.clone() {
        let c = census(a.algo, n)?;
        let hist: Vec<String> = c
            .degree_histogram
            .iter()
            .map(|(d, k)| format!("{d}:{k}"))
            .collect();
        table.push(vec![
            n.to_string(),
            c.f.to_string(),
            c.r.to_string(),
            c.v.to_string(),
            hist.join(" "),
        ]);
        items.push((n, c));
    }
    let body = |c: &Census| json!({"f": c.f, "r": c.r, "v": c.v, "degrees": degrees_json(c)});
    let result = if range.start() == range.end() {
        body(&items[0].1)
    } else {
        Value::Array(
            items
                .iter()
                .map(|(n, c)| {
                    let mut m = Map::new();
                    m.insert("depth".into(), json!(n));
                    if let Value::Object(rest) = body(c) {
                        m.extend(rest);
                    }
                    Value::Object(m)
                })
                .collect(),
        )
    };
    Ok(outcome(
        json!({"algo": a.algo, "depth": depth_param(&range)}),
        result,
        json!({"arithmetic": "exact"}),
        table,
    ))
}

fn sigma_json(m: &MomentValue) -> Value {
    match &m.exact {
        Some(r) => json!(r.to_string()),
        None => json!(m.value),
    }
}

fn sigma_text(m: &MomentValue) -> String {
    match &m.exact {
        Some(r) => r.to_string(),
        None => num(m.value),
    }
}

fn mode_name(mode: Arithmetic) -> Value {
    serde_json::to_value(mode).expect("unit enum")
}

fn moments_cmd(a: &MomentArgs) -> Result<Outcome> {
    let range = a.depths.range();
    let request = MomentRequest {
        arithmetic: if a.exact {
            Arithmetic::Exact
        } else {
            Arithmetic::Auto
        },
        execution: Execution::Parallel,
    };
    let mut table = Table::new(&["depth", "beta", "cells", "sigma", "value", "mode"]);
    let mut values = Vec::new();
    for n in range.clone() {
        let m = moment_with(a.algo, n, a.beta, request)?;
        table.push(vec![
            n.to_string(),
            a.beta.to_string(),
            m.cells.to_string(),
            sigma_text(&m),
            num(m.value),
            mode_name(m.mode).as_str().unwrap_or_default().to_string(),
        ]);
        values.push(m);
    }
    let body =
        |m: &MomentValue| json!({"sigma": sigma_json(m), "value": m.value, "cells": m.cells});
    let modes: Vec<Value> = values.iter().map(|m| mode_name(m.mode)).collect();
    let (result, arithmetic) = if values.len() == 1 {
        (body(&values[0]), modes[0].clone())
    } else {
        let rows = values
            .iter()
            .map(|m| {
                let mut v = body(m);
                v.as_object_mut()
                    .expect("object")
                    .insert("depth".into(), json!(m.depth));
                v
            })
            .collect();
        (Value::Array(rows), Value::Array(modes))
    };
    Ok(outcome(
        json!({"algo": a.algo, "depth": depth_param(&range), "beta": a.beta.to_string(), "exact": a.exact}),
        result,
        json!({"arithmetic": arithmetic}),
        table,
    ))
}

fn series_json(s: &SeriesValue) -> Value {
    json!({"L_value": s.value, "L_tail_bound": s.tail_bound, "terms": s.terms_used})
}

fn dirichlet_cmd(a: &DirichletArgs) -> Result<Outcome> {
    let beta = a.beta.value();
    let parameters = json!({
        "algo": a.algo,
        "beta": a.beta.to_string(),
        "qmax": a.qmax,
        "tolerance": a.tolerance,
    });
    let mut table = Table::new(&["q", "weight"]);
    let (mut result, series) = if a.algo == Algorithm::Classical {
        let s = match a.qmax {
            Some(q) => classical_l_direct(beta, q)?,
            None => classical_l(beta)?,
        };
        (series_json(&s), s)
    } else {
        let d = match (a.qmax, a.tolerance) {
            (Some(q), _) => dirichlet_series(a.algo, beta, q)?,
            (None, t) => dirichlet_l_adaptive(a.algo, beta, t.unwrap_or(DEFAULT_RELATIVE_TAIL))?,
        };
        let mut r = series_json(&d.series);
        let weights: Map<String, Value> = d
            .weights
            .iter()
            .map(|(q, w)| (q.to_string(), json!(w)))
            .collect();
        for (q, w) in &d.weights {
            table.push(vec![q.to_string(), w.to_string()]);
        }
        let obj = r.as_object_mut().expect("object");
        obj.insert("max_q".into(), json!(d.max_q));
        obj.insert("weights".into(), Value::Object(weights));
        (r, d.series)
    };
    if table.rows.is_empty() {
        table = Table::new(&["L_value", "L_tail_bound", "terms"]);
        table.push(vec![
            num(series.value),
            num(series.tail_bound),
            series.terms_used.to_string(),
        ]);
    }
    result
        .as_object_mut()
        .expect("object")
        .insert("L_upper".into(), json!(series.upper()));
    Ok(outcome(
        parameters,
        result,
        json!({"arithmetic": "compensated-float", "tail_bound": series.tail_bound}),
        table,
    ))
}

fn asym_cmd(a: &AsymArgs) -> Result<Outcome> {
    let range = a.depths.range();
    let points = asymptotic_sweep(a.algo, range.clone(), a.beta, Execution::Parallel)?;
    let mut table = Table::new(&[
        "n",
        "beta",
        "sigma",
        "main_term",
        "ratio",
        "L_value",
        "L_tail_bound",
    ]);
    let mut rows = Vec::new();
    for p in &points {
        table.push(vec![
            p.n.to_string(),
            a.beta.to_string(),
            num(p.sigma),
            num(p.main_term),
            num(p.ratio),
            num(p.l_value),
            num(p.l_tail_bound),
        ]);
        rows.push(json!({
            "n": p.n,
            "sigma": p.sigma,
            "main_term": p.main_term,
            "ratio": p.ratio,
            "L_value": p.l_value,
            "L_tail_bound": p.l_tail_bound,
        }));
    }
    let modes: Vec<Value> = points.iter().map(|p| mode_name(p.sigma_mode)).collect();
    let tail = points.first().map(|p| p.l_tail_bound);
    Ok(outcome(
        json!({"algo": a.algo, "n": depth_param(&range), "beta": a.beta.to_string()}),
        Value::Array(rows),
        json!({"arithmetic": modes, "series_arithmetic": "compensated-float", "tail_bound": tail}),
        table,
    ))
}

fn locate_cmd(a: &LocateArgs) -> Result<Outcome> {
    let chain = locate(a.algo, a.point, a.depth)?;
    let mut table = Table::new(&[
        "depth",
        "index",
        "code",
        "vertices",
        "coefficients",
        "diameter",
    ]);
    let mut steps = Vec::new();
    for s in &chain.steps {
        let vertices: Vec<String> = s.basis.vectors.iter().map(|v| v.label()).collect();
        let coefficients: Vec<String> = s.coefficients.iter().map(|c| c.to_string()).collect();
        let diameter = s.basis.triangle().diameter()?;
        table.push(vec![
            s.basis.depth.to_string(),
            s.index.to_string(),
            s.code.to_string(),
            vertices.join(" "),
            coefficients.join(" "),
            num(diameter),
        ]);
        steps.push(json!({
            "depth": s.basis.depth,
            "index": s.index,
            "code": s.code,
            "vertices": vertices,
            "coefficients": coefficients,
            "diameter": diameter,
        }));
    }
    Ok(outcome(
        json!({"algo": a.algo, "depth": a.depth, "point": a.point.to_string()}),
        json!({"target": chain.target.to_string(), "vertex_depth": chain.vertex_depth(), "steps": steps}),
        json!({"arithmetic": "exact", "diameter": "rounded from the exact square"}),
        table,
    ))
}

fn verify_cmd(a: &VerifyArgs) -> Result<Outcome> {
    let selection: Vec<&str> = a
        .checks
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .collect();
    let reports = run_checks(a.algo, a.depth, &selection)?;
    let mut table = Table::new(&["check", "status", "depth", "checked", "witness"]);
    for r in &reports {
        table.push(vec![
            r.name.to_string(),
            serde_json::to_value(r.status)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default(),
            r.depth_checked.map(|d| d.to_string()).unwrap_or_default(),
            r.checked.to_string(),
            r.witness.clone().unwrap_or_default(),
        ]);
    }
    let failed = reports.iter().any(|r| r.status == Status::Fail);
    let mut out = outcome(
        json!({"algo": a.algo, "depth": a.depth, "checks": a.checks}),
        serde_json::to_value(&reports).expect("reports serialize"),
        json!({"arithmetic": "exact"}),
        table,
    );
    out.failed = failed;
    Ok(out)
}

fn classical_cmd(a: &ClassicalArgs) -> Result<Outcome> {
    let range = a.depths.range();
    let mut table = Table::new(&["n", "intervals", "sigma", "mode", "main_term", "ratio"]);
    let mut rows = Vec::new();
    let mut modes = Vec::new();
    let ratios = match a.beta {
        Some(b) if b.value() > 1.0 && *range.start() >= 2 => Some(asymptotic_sweep(
            Algorithm::Classical,
            range.clone(),
            b,
            Execution::Parallel,
        )?),
        _ => None,
    };
    for (i, n) in range.clone().enumerate() {
        let mut row = Map::new();
        row.insert("n".into(), json!(n));
        row.insert("intervals".into(), json!(1u64 << n.min(63)));
        let mut cells = vec![n.to_string(), (1u64 << n.min(63)).to_string()];
        if let Some(b) = a.beta {
            let m = moment_with(Algorithm::Classical, n, b, MomentRequest::default())?;
            row.insert("sigma".into(), sigma_json(&m));
            cells.push(sigma_text(&m));
            let mode = mode_name(m.mode);
            cells.push(mode.as_str().unwrap_or_default().to_string());
            modes.push(mode);
        } else {
            cells.extend([String::new(), String::new()]);
        }
        match ratios.as_ref().map(|r| &r[i]) {
            Some(p) => {
                row.insert("main_term".into(), json!(p.main_term));
                row.insert("ratio".into(), json!(p.ratio));
                cells.extend([num(p.main_term), num(p.ratio)]);
            }
            None => cells.extend([String::new(), String::new()]),
        }
        if n <= LISTED_LEVEL {
            let fractions: Vec<String> = brocot(n)?.iter().map(|f| f.to_string()).collect();
            row.insert("fractions".into(), json!(fractions));
        }
        table.push(cells);
        rows.push(Value::Object(row));
    }
    let mut provenance = Map::new();
    provenance.insert("arithmetic".into(), Value::Array(modes));
    if let Some(p) = ratios.as_ref().and_then(|r| r.first()) {
        provenance.insert("tail_bound".into(), json!(p.l_tail_bound));
    }
    Ok(outcome(
        json!({"n": depth_param(&range), "beta": a.beta.map(|b| b.to_string())}),
        Value::Array(rows),
        Value::Object(provenance),
        table,
    ))
}

fn render_cmd(a: &RenderArgs) -> Result<Outcome> {
    let svg = render_svg(
        a.algo,
        a.depth,
        RenderOptions {
            size: a.size,
            label_cap: a.labels,
        },
    )?;
    let polygons = svg.matches("<polygon").count();
    let mut table = Table::new(&["polygons", "bytes", "out"]);
    let mut out = outcome(
        json!({"algo": a.algo, "depth": a.depth, "labels": a.labels, "size": a.size}),
        json!({"polygons": polygons, "bytes": svg.len()}),
        json!({"arithmetic": "exact", "coordinates": "rounded to 3 decimals"}),
        Table::default(),
    );
    match &a.out {
        Some(path) => {
            std::fs::write(path, &svg)?;
            let shown = path.display().to_string();
            table.push(vec![
                polygons.to_string(),
                svg.len().to_string(),
                shown.clone(),
            ]);
            out.result
                .as_object_mut()
                .expect("object")
                .insert("out".into(), json!(shown));
        }
        None => out.raw = Some(svg),
    }
    out.table = table;
    Ok(out)
}
