//! Report rows for `eval` and `scan`, rendered as CSV or line-delimited JSON.

use std::fmt::Write as _;

use serde::ser::{Serialize, SerializeStruct, Serializer};
use serde_json::value::RawValue;

use crate::error::Result;
use crate::exec::Execution;
use crate::gamma::TruncationPolicy;
use crate::moments::{f_gamma, f_product_estimate, kuperberg_check, monotonicity_scan, Regime};
use crate::montecarlo::{estimate_f_with, MCConfig};
use crate::pball::{Dimension, Exponent};

/// CSV column order.
pub const COLUMNS: [&str; 12] = [
    "n",
    "p",
    "t",
    "f_gamma",
    "f_product",
    "f_mc",
    "mc_std_error",
    "bound",
    "margin",
    "bound_ok",
    "routes_agree",
    "mc_agrees",
];

/// Relative slack added to the product's tail bound when comparing routes.
pub const ROUTE_REL_TOL: f64 = 1e-10;
/// Standard errors allowed between the Monte Carlo and closed-form values.
pub const MC_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub n: Dimension,
    pub p: Exponent,
    pub t: f64,
    pub f_gamma: f64,
    pub f_product: f64,
    /// Absolute truncation bound of `f_product`; not part of the output.
    pub f_product_error: f64,
    pub f_mc: Option<f64>,
    pub mc_std_error: Option<f64>,
    pub bound: f64,
    pub margin: f64,
    pub bound_ok: bool,
    pub routes_agree: bool,
    pub mc_agrees: Option<bool>,
}

impl ReportRow {
    pub fn passes(&self) -> bool {
        self.bound_ok && self.routes_agree && self.mc_agrees.unwrap_or(true)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RowOptions {
    pub policy: TruncationPolicy,
    pub mc: Option<MCConfig>,
    pub exec: Execution,
}

pub fn evaluate_row(n: Dimension, p: Exponent, opts: &RowOptions) -> ReportRow {
    let fg = f_gamma(n, p).value;
    let fp = f_product_estimate(n, p, &opts.policy, opts.exec);
    let check = kuperberg_check(n, p);
    let routes_agree = (fg - fp.value).abs() <= fp.error_estimate + ROUTE_REL_TOL * fp.value;
    let mc = opts.mc.map(|cfg| estimate_f_with(n, p, &cfg, opts.exec));
    ReportRow {
        n,
        p,
        t: p.t(),
        f_gamma: fg,
        f_product: fp.value,
        f_product_error: fp.error_estimate,
        f_mc: mc.map(|m| m.mean),
        mc_std_error: mc.map(|m| m.std_error),
        bound: check.bound,
        margin: check.margin,
        bound_ok: check.holds,
        routes_agree,
        mc_agrees: mc.map(|m| m.within(fg, MC_SIGMAS)),
    }
}

/// Monotonicity of `f` in `p` for one dimension over one side of `p = 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotoneSummary {
    pub n: Dimension,
    pub regime: Regime,
    pub points: usize,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub rows: Vec<ReportRow>,
    pub monotonicity: Vec<MonotoneSummary>,
}

impl ScanReport {
    pub fn passes(&self) -> bool {
        self.rows.iter().all(ReportRow::passes) && self.monotonicity.iter().all(|m| m.verdict)
    }
}

/// Rows in `ns`-major, `ps`-minor order, plus per-`n` monotonicity verdicts
/// over the `[1, 2]` and `[2, ∞]` parts of the grid that hold two or more points.
pub fn scan(ns: &[Dimension], ps: &[Exponent], opts: &RowOptions) -> Result<ScanReport> {
    let cells: Vec<(Dimension, Exponent)> = ns.iter().flat_map(|&n| ps.iter().map(move |&p| (n, p))).collect();
    let rows = opts.exec.map(&cells, |&(n, p)| evaluate_row(n, p, opts));

    let mut sorted = ps.to_vec();
    sorted.sort_by(|a, b| a.p().total_cmp(&b.p()));
    sorted.dedup_by(|a, b| a.p() == b.p());
    let lower: Vec<Exponent> = sorted.iter().copied().filter(|e| e.p() <= 2.0).collect();
    let upper: Vec<Exponent> = sorted.iter().copied().filter(|e| e.p() >= 2.0).collect();

    let mut monotonicity = Vec::new();
    for &n in ns {
        for side in [&lower, &upper] {
            if side.len() < 2 {
                continue;
            }
            let s = monotonicity_scan(n, side)?;
            monotonicity.push(MonotoneSummary { n, regime: s.regime, points: side.len(), verdict: s.verdict(n) });
        }
    }
    Ok(ScanReport { rows, monotonicity })
}

/// Formats like C's `%.17g`.
pub fn format_g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn format_p(p: Exponent) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format_g17(p.p())
    }
}

pub fn csv_header() -> String {
    COLUMNS.join(",")
}

pub fn csv_line(row: &ReportRow) -> String {
    let opt = |v: Option<f64>| v.map(format_g17).unwrap_or_default();
    let mut s = String::new();
    write!(
        s,
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        row.n,
        format_p(row.p),
        format_g17(row.t),
        format_g17(row.f_gamma),
        format_g17(row.f_product),
        opt(row.f_mc),
        opt(row.mc_std_error),
        format_g17(row.bound),
        format_g17(row.margin),
        row.bound_ok,
        row.routes_agree,
        row.mc_agrees.map(|b| b.to_string()).unwrap_or_default(),
    )
    .expect("writing to a String");
    s
}

fn raw(text: String) -> Box<RawValue> {
    RawValue::from_string(text).expect("formatted number is valid JSON")
}

fn raw_num(v: f64) -> Box<RawValue> {
    if v.is_finite() {
        raw(format_g17(v))
    } else {
        raw("null".into())
    }
}

impl Serialize for ReportRow {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ReportRow", COLUMNS.len())?;
        s.serialize_field("n", &self.n.get())?;
        if self.p.is_infinite() {
            s.serialize_field("p", "inf")?;
        } else {
            s.serialize_field("p", &raw_num(self.p.p()))?;
        }
        s.serialize_field("t", &raw_num(self.t))?;
        s.serialize_field("f_gamma", &raw_num(self.f_gamma))?;
        s.serialize_field("f_product", &raw_num(self.f_product))?;
        s.serialize_field("f_mc", &self.f_mc.map(raw_num))?;
        s.serialize_field("mc_std_error", &self.mc_std_error.map(raw_num))?;
        s.serialize_field("bound", &raw_num(self.bound))?;
        s.serialize_field("margin", &raw_num(self.margin))?;
        s.serialize_field("bound_ok", &self.bound_ok)?;
        s.serialize_field("routes_agree", &self.routes_agree)?;
        s.serialize_field("mc_agrees", &self.mc_agrees)?;
        s.end()
    }
}

pub fn json_line(row: &ReportRow) -> String {
    serde_json::to_string(row).expect("report rows serialize")
}

/// Render rows (with a header for CSV), one per line.
pub fn render(rows: &[ReportRow], format: Format) -> String {
    let mut out = String::new();
    if format == Format::Csv {
        out.push_str(&csv_header());
        out.push('\n');
    }
    for row in rows {
        out.push_str(&match format {
            Format::Csv => csv_line(row),
            Format::Json => json_line(row),
        });
        out.push('\n');
    }
    out
}
