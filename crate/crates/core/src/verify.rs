//! Named verification suites behind `lpball verify`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::gamma::{gamma_ratio_estimate, ln_abs_gamma, ln_gamma, TruncationPolicy};
use crate::moments::{
    bound_comparator_with, derivative_sign_series_with, f_endpoint, f_gamma, f_gamma_in_t, f_product_estimate,
    kuperberg_bound, kuperberg_check, monotonicity_scan, per_term_positivity, remark_limit_check, remark_limit_target,
    Sign, SIGN_ZERO_TOL,
};
use crate::montecarlo::{estimate_f_with, sampler_moments, MCConfig};
use crate::pball::{conjugate, normalized_second_moment, Dimension, Exponent};
use crate::report::ROUTE_REL_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Routes,
    Endpoints,
    Monotonicity,
    Ineq3,
    RemarkLimit,
    Corollaries,
    Mc,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 8] =
        ["routes", "endpoints", "monotonicity", "ineq3", "remark-limit", "corollaries", "mc", "all"];

    fn expand(self) -> Vec<Suite> {
        use Suite::*;
        match self {
            All => vec![Routes, Endpoints, Monotonicity, Ineq3, RemarkLimit, Corollaries, Mc],
            s => vec![s],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "routes" => Suite::Routes,
            "endpoints" => Suite::Endpoints,
            "monotonicity" => Suite::Monotonicity,
            "ineq3" => Suite::Ineq3,
            "remark-limit" => Suite::RemarkLimit,
            "corollaries" => Suite::Corollaries,
            "mc" => Suite::Mc,
            "all" => Suite::All,
            other => {
                return Err(Error::Argument(format!(
                    "unknown suite {other:?}; expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = match self {
            Suite::Routes => 0,
            Suite::Endpoints => 1,
            Suite::Monotonicity => 2,
            Suite::Ineq3 => 3,
            Suite::RemarkLimit => 4,
            Suite::Corollaries => 5,
            Suite::Mc => 6,
            Suite::All => 7,
        };
        f.write_str(Suite::NAMES[i])
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub policy: TruncationPolicy,
    pub mc: MCConfig,
    pub exec: Execution,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            policy: TruncationPolicy::default(),
            mc: MCConfig::new(1_000_000, 42, 8).expect("valid default"),
            exec: Execution::default(),
        }
    }
}

pub fn run(suite: Suite, opts: &VerifyOptions) -> Vec<Check> {
    suite.expand().into_iter().flat_map(|s| run_one(s, opts)).collect()
}

fn run_one(suite: Suite, opts: &VerifyOptions) -> Vec<Check> {
    let mut out = Checks { suite, list: Vec::new() };
    match suite {
        Suite::Routes => routes(&mut out, opts),
        Suite::Endpoints => endpoints(&mut out),
        Suite::Monotonicity => monotonicity(&mut out, opts),
        Suite::Ineq3 => ineq3(&mut out),
        Suite::RemarkLimit => remark(&mut out),
        Suite::Corollaries => corollaries(&mut out, opts),
        Suite::Mc => mc(&mut out, opts),
        Suite::All => unreachable!("expanded above"),
    }
    out.list
}

struct Checks {
    suite: Suite,
    list: Vec<Check>,
}

impl Checks {
    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.list.push(Check { suite: self.suite, name: name.into(), passed, detail });
    }
}

fn dim(n: u32) -> Dimension {
    Dimension::new(n).expect("dimension in range")
}

fn ex(p: f64) -> Exponent {
    Exponent::new(p).expect("exponent >= 1")
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// `n` points equispaced on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
}

fn routes(out: &mut Checks, opts: &VerifyOptions) {
    let ps = [1.0, 1.1, 1.25, 1.5, 1.75, 2.0];
    let cells: Vec<(u32, f64)> = (1..=50).flat_map(|n| ps.iter().map(move |&p| (n, p))).collect();
    let worst = opts.exec.map(&cells, |&(n, p)| {
        let (n, e) = (dim(n), ex(p));
        let fg = f_gamma(n, e).value;
        let fp = f_product_estimate(n, e, &opts.policy, Execution::Sequential);
        let excess = (fg - fp.value).abs() - (fp.error_estimate + ROUTE_REL_TOL * fp.value);
        (excess, n.get(), p)
    });
    let failed = worst.iter().filter(|w| w.0 > 0.0).count();
    let (excess, n, p) = worst.iter().copied().fold((f64::NEG_INFINITY, 0, 0.0), |a, b| if b.0 > a.0 { b } else { a });
    out.push(
        "gamma vs product, n 1..50 x 6 p",
        failed == 0,
        format!("{failed} cells outside bound; largest excess {excess:.3e} at n={n}, p={p}"),
    );

    let xs = [0.1, 0.5, 1.0, 2.0, 10.0, 100.0];
    let as_ = [-0.9, -0.5, 0.0, 0.25, 0.5, 0.9];
    let mut bad = 0;
    let mut skipped = 0;
    for &x in &xs {
        for &a in &as_ {
            let Ok(v) = gamma_ratio_estimate(x, a, &opts.policy, opts.exec) else {
                skipped += 1;
                continue;
            };
            let (lg, sign) = ln_abs_gamma(x + a).expect("pole excluded above");
            let direct = sign * (ln_gamma(1.0 - a).unwrap() + lg - ln_gamma(x).unwrap()).exp();
            if rel(v.value, direct) > v.rel_bound.max(opts.policy.rel_tol()) {
                bad += 1;
            }
        }
    }
    out.push(
        "gamma ratio product, 6x6 (x, a) grid",
        bad == 0,
        format!("{bad} mismatches, {skipped} grid points rejected by the domain check"),
    );
}

fn endpoints(out: &mut Checks) {
    let worst = (1..=100u32)
        .map(|n| {
            let n = dim(n);
            let e = f_endpoint(n);
            rel(f_gamma(n, Exponent::ONE).value, e).max(rel(f_gamma(n, Exponent::INFINITY).value, e))
        })
        .fold(0.0, f64::max);
    out.push("f(n,1) = f(n,inf) = 2n/(3(n+1)(n+2)), n 1..100", worst <= 1e-12, format!("max rel err {worst:.3e}"));

    let worst =
        (1..=100u32).map(|n| rel(f_gamma(dim(n), Exponent::TWO).value, kuperberg_bound(dim(n)))).fold(0.0, f64::max);
    out.push("f(n,2) = n/(n+2)^2, n 1..100", worst <= 1e-12, format!("max rel err {worst:.3e}"));

    let mut worst = 0.0f64;
    for n in [1u32, 2, 3, 5, 8, 13, 21, 34, 55, 89] {
        for p in [1.07, 1.61] {
            let e = ex(p);
            let q = ex(e.q());
            worst = worst.max(rel(f_gamma(dim(n), e).value, f_gamma(dim(n), q).value));
            worst = worst.max(rel(f_gamma(dim(n), e).value, f_gamma(dim(n), conjugate(e)).value));
        }
    }
    out.push("f(n,p) = f(n,q), 20 pairs", worst <= 1e-12, format!("max rel err {worst:.3e}"));

    let worst =
        (1..=100u32).map(|n| rel(f_gamma(dim(n), ex(1.0 + 1e-6)).value, f_endpoint(dim(n)))).fold(0.0, f64::max);
    out.push("f(n, 1 + 1e-6) near endpoint value", worst <= 1e-4, format!("max rel err {worst:.3e}"));
}

/// The 40 exponents of the bound grid: 20 on `[1, 2]`, 19 conjugates on
/// `(2, ∞]`, and `10⁶`.
pub fn bound_grid() -> Vec<Exponent> {
    let lower: Vec<Exponent> = linspace(1.0, 2.0, 20).into_iter().map(ex).collect();
    let mut grid = lower.clone();
    grid.extend(lower[..19].iter().map(|&e| conjugate(e)));
    grid.push(ex(1e6));
    grid
}

/// Sign of the central difference of the closed form in `t`.
pub fn finite_difference_sign(n: Dimension, t: f64, h: f64) -> Sign {
    let d = (f_gamma_in_t(n, t + h).unwrap() - f_gamma_in_t(n, t - h).unwrap()) / (2.0 * h);
    if d > 0.0 {
        Sign::Positive
    } else if d < 0.0 {
        Sign::Negative
    } else {
        Sign::Zero
    }
}

fn monotonicity(out: &mut Checks, opts: &VerifyOptions) {
    let lower: Vec<Exponent> = linspace(1.0, 2.0, 21).into_iter().map(ex).collect();
    let mut upper: Vec<Exponent> = linspace(2.0, 100.0, 20).into_iter().map(ex).collect();
    upper.push(Exponent::INFINITY);
    let mut bad = Vec::new();
    for n in 2..=20u32 {
        for grid in [&lower, &upper] {
            let s = monotonicity_scan(dim(n), grid).expect("valid grid");
            if !(s.monotone && s.strict) {
                bad.push(n);
            }
        }
    }
    out.push("strict monotonicity on [1,2] and [2,100]+inf, n 2..20", bad.is_empty(), format!("failing n: {bad:?}"));
    let flat = monotonicity_scan(dim(1), &lower).unwrap();
    let dev = flat.points.iter().map(|(_, f)| rel(*f, 1.0 / 9.0)).fold(0.0, f64::max);
    out.push("f(1,p) = 1/9", flat.monotone && dev <= 1e-12, format!("max rel dev {dev:.3e}"));

    let grid = bound_grid();
    let mut fails = 0;
    let mut min_margin = f64::INFINITY;
    for n in 1..=100u32 {
        for &p in &grid {
            let c = kuperberg_check(dim(n), p);
            fails += usize::from(!c.holds);
            min_margin = min_margin.min(c.margin);
        }
    }
    out.push("f <= n/(n+2)^2 on 100 x 40 grid", fails == 0, format!("{fails} violations; min margin {min_margin:.3e}"));

    let ts = [0.01, 0.05, 0.1, 0.2, 0.25];
    let mut mismatches = Vec::new();
    for n in 2..=20u32 {
        for &t in &ts {
            let sign = match derivative_sign_series_with(dim(n), t, &opts.policy, opts.exec) {
                Ok(r) => r.sign,
                Err(_) => Sign::Zero,
            };
            if sign != finite_difference_sign(dim(n), t, 1e-5) {
                mismatches.push((n, t));
            }
        }
    }
    out.push(
        "series sign = finite-difference sign, n 2..20",
        mismatches.is_empty(),
        format!("mismatches {mismatches:?}"),
    );
    let worst = ts
        .iter()
        .map(|&t| match derivative_sign_series_with(dim(1), t, &opts.policy, opts.exec) {
            Ok(r) => r.series_value.abs(),
            Err(_) => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    out.push("series vanishes for n = 1", worst < SIGN_ZERO_TOL, format!("max |series| {worst:.3e}"));
}

fn ineq3(out: &mut Checks) {
    let mut failures = Vec::new();
    let mut count = 0u64;
    for n in 2..=50u32 {
        for &t in &[0.01, 0.25, 1.0, 10.0] {
            for k in 1..=10_000u64 {
                count += 1;
                if !per_term_positivity(k, dim(n), t).expect("valid arguments") {
                    failures.push((k, n, t));
                }
            }
        }
    }
    let shown: Vec<_> = failures.iter().take(5).collect();
    out.push(
        "inequality (3) as printed, k 1..1e4, n 2..50, t in {0.01,0.25,1,10}",
        failures.is_empty(),
        format!("{} of {count} evaluations failed; first: {shown:?}", failures.len()),
    );
}

fn remark(out: &mut Checks) {
    let dev = |target: &dyn Fn(u32) -> f64| {
        (1..=20u32).map(|n| (remark_limit_check(dim(n), 1e6).unwrap() - target(n)).abs()).fold(0.0, f64::max)
    };
    // stated target; the ratio only approaches it at n = 1
    let stated = dev(&|n| (n as f64 + 2.0) / 3.0);
    out.push("ratio at q = 1e6 within 1e-4 of (n+2)/3, n 1..20", stated <= 1e-4, format!("max abs dev {stated:.3e}"));
    let derived = dev(&|n| remark_limit_target(dim(n)));
    out.push(
        "ratio at q = 1e6 within 1e-4 of (n+2)/(3n), n 1..20",
        derived <= 1e-4,
        format!("max abs dev {derived:.3e}"),
    );
}

pub type ExponentPairs = Vec<(Exponent, Exponent)>;

/// The ten `(r, s)` pairs used per comparator regime.
pub fn comparator_pairs() -> (ExponentPairs, ExponentPairs) {
    let lower = [
        (1.0, 2.0),
        (1.0, 1.5),
        (1.05, 1.06),
        (1.1, 1.2),
        (1.2, 1.9),
        (1.3, 1.35),
        (1.4, 1.6),
        (1.5, 1.99),
        (1.7, 1.8),
        (1.9, 1.95),
    ];
    let upper = [
        (2.0, 3.0),
        (2.0, f64::INFINITY),
        (2.01, 2.02),
        (2.5, 4.0),
        (3.0, 10.0),
        (4.0, 5.0),
        (5.0, 100.0),
        (10.0, f64::INFINITY),
        (20.0, 30.0),
        (50.0, 1000.0),
    ];
    let conv = |v: &[(f64, f64)]| v.iter().map(|&(r, s)| (ex(r), ex(s))).collect();
    (conv(&lower), conv(&upper))
}

fn corollaries(out: &mut Checks, opts: &VerifyOptions) {
    let (lower, upper) = comparator_pairs();
    for (label, pairs) in [("r < s in [1,2]: P(R) < P(S)", &lower), ("r < s in [2,inf]: P(R) > P(S)", &upper)] {
        let mut bad = Vec::new();
        for n in [2u32, 5, 20] {
            for &(r, s) in pairs.iter() {
                let a = bound_comparator_with(dim(n), r, s, &opts.policy, opts.exec).expect("valid pair");
                let b = bound_comparator_with(dim(n), r, s, &opts.policy.doubled(), opts.exec).expect("valid pair");
                if !(a.verdict && b.verdict) {
                    bad.push((n, r.to_string(), s.to_string()));
                }
            }
        }
        out.push(label, bad.is_empty(), format!("failing (n, r, s): {bad:?}"));
    }
}

fn mc(out: &mut Checks, opts: &VerifyOptions) {
    let cfg = &opts.mc;
    let mut bad = Vec::new();
    for n in 1..=5u32 {
        for p in [1.0, 1.4, 2.0, 3.0, f64::INFINITY] {
            let e = ex(p);
            let est = estimate_f_with(dim(n), e, cfg, opts.exec);
            let fg = f_gamma(dim(n), e).value;
            if !est.within(fg, 3.0) {
                bad.push(format!("n={n} p={e}: {:.6} vs {fg:.6} (se {:.2e})", est.mean, est.std_error));
            }
        }
    }
    out.push("estimate_f within 3 se of f_gamma, n 1..5 x 5 p", bad.is_empty(), format!("{bad:?}"));

    let mut bad = Vec::new();
    for n in [1u32, 2, 3, 5] {
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            let e = ex(p);
            let m = sampler_moments(dim(n), e, cfg, opts.exec);
            let target = normalized_second_moment(dim(n), e);
            let exch = m
                .second_alt
                .is_none_or(|alt| (alt.mean - m.second.mean).abs() <= 4.0 * alt.std_error.hypot(m.second.std_error));
            if !(m.second.within(target, 4.0) && m.first.within(0.0, 4.0) && exch && m.max_norm <= 1.0 + 1e-12) {
                bad.push(format!("n={n} p={e}"));
            }
        }
    }
    out.push("sampler moments at 4 se, n in {1,2,3,5} x 5 p", bad.is_empty(), format!("failing: {bad:?}"));
}
