//! The moment functional `f(n, p) = ∫∫⟨x, y⟩² dx dy / (|B_p^n|·|B_q^n|)`
//! over `B_p^n × B_q^n`, evaluated by gamma closed form and by infinite
//! product in `t = 1/(pq)`, plus the monotonicity and bound machinery built
//! on top of it.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::gamma::{ln_gamma, ln_gamma_complex, ln_gamma_unchecked as lg, ProductValue, TruncationPolicy};
use crate::pball::{Dimension, Exponent};
use crate::truncation::truncated_sum;

/// Slack allowed above the bound `n/(n+2)²`.
pub const BOUND_SLACK: f64 = 1e-12;
/// Tolerance for adjacent comparisons in monotonicity scans.
pub const MONOTONE_TOL: f64 = 1e-12;
/// Relative zero tolerance for the derivative-sign series.
pub const SIGN_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    GammaClosedForm,
    InfiniteProduct,
    MonteCarlo,
}

/// A value of `f(n, p)` with the route that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentResult {
    pub value: f64,
    pub route: Route,
    /// Absolute error estimate: truncation bound, standard error, or 0.
    pub error_estimate: f64,
    pub n: Dimension,
    pub exponent: Exponent,
}

/// `k² + m·k + m²·t`.
pub fn g_term(k: u64, m: f64, t: f64) -> f64 {
    let k = k as f64;
    k * k + m * k + m * m * t
}

/// The conjectured maximum `n/(n+2)²`, attained at `p = 2`.
pub fn kuperberg_bound(n: Dimension) -> f64 {
    let m = n.as_f64();
    m / ((m + 2.0) * (m + 2.0))
}

/// `f(n, 1) = f(n, ∞) = 2n / (3(n+1)(n+2))`.
pub fn f_endpoint(n: Dimension) -> f64 {
    let m = n.as_f64();
    2.0 * m / (3.0 * (m + 1.0) * (m + 2.0))
}

/// Half of `ln f − ln n` contributed by one member `u ∈ {1/p, 1/q}` of the pair.
fn half_log_ratio(n: f64, u: f64) -> f64 {
    lg(3.0 * u) + lg(1.0 + n * u) - lg(u) - lg(1.0 + (n + 2.0) * u)
}

/// `f(n, p)` from the gamma closed form.
pub fn f_gamma(n: Dimension, p: Exponent) -> MomentResult {
    let m = n.as_f64();
    // for n = 1 each gamma ratio collapses to 1/3 via Γ(1 + u) = uΓ(u)
    let value = if p.is_endpoint() || n.get() == 1 {
        f_endpoint(n)
    } else if p.p() == 2.0 {
        kuperberg_bound(n)
    } else {
        (m.ln() + (half_log_ratio(m, p.inv_p()) + half_log_ratio(m, p.inv_q()))).exp()
    };
    MomentResult { value, route: Route::GammaClosedForm, error_estimate: 0.0, n, exponent: p }
}

/// The gamma closed form as a function of `t`, for `t ≥ 0`.
///
/// For `t ≤ 1/4` this is `f_gamma` at the `p ∈ [1, 2]` with `(p − 1)/p² = t`.
/// Past `1/4` the pair `1/p, 1/q` becomes `1/2 ± i·√(4t − 1)/2` and the
/// formula is continued analytically; the result stays real.
pub fn f_gamma_in_t(n: Dimension, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("t must be finite and nonnegative, got {t}")));
    }
    let m = n.as_f64();
    if t == 0.0 {
        return Ok(f_endpoint(n));
    }
    let disc = 1.0 - 4.0 * t;
    if disc >= 0.0 {
        let u = 0.5 * (1.0 + disc.sqrt());
        // 1 − u computed as t/u keeps accuracy for small t
        let v = t / u;
        return Ok((m.ln() + half_log_ratio(m, u) + half_log_ratio(m, v)).exp());
    }
    let u = Complex64::new(0.5, 0.5 * (-disc).sqrt());
    let one = Complex64::new(1.0, 0.0);
    let half = ln_gamma_complex(u * 3.0) + ln_gamma_complex(one + u * m)
        - ln_gamma_complex(u)
        - ln_gamma_complex(one + u * (m + 2.0));
    // the conjugate member contributes the complex conjugate
    Ok((m.ln() + 2.0 * half.re).exp())
}

/// `ln` of the `k`-th product factor `g_k(1)g_k(n+2) / (g_k(3)g_k(n))`.
///
/// Uses `g_k(1)g_k(n+2) − g_k(3)g_k(n) = −2(n−1)[(1−2t)k² + t(n+3)k + 2t²(2n+1)]`.
pub fn ln_product_factor(k: u64, n: f64, t: f64) -> f64 {
    let kf = k as f64;
    let gap = -2.0 * (n - 1.0) * ((1.0 - 2.0 * t) * kf * kf + t * (n + 3.0) * kf + 2.0 * t * t * (2.0 * n + 1.0));
    (gap / (g_term(k, 3.0, t) * g_term(k, n, t))).ln_1p()
}

/// `Π_k g_k(1,τ)g_k(n+2,τ) / (g_k(3,τ)g_k(n,τ))`, telescoped at `τ = 0` and `τ = 1/4`.
pub fn product_value(n: Dimension, tau: f64, policy: &TruncationPolicy, exec: Execution) -> Result<ProductValue> {
    if !(0.0..=0.25).contains(&tau) {
        return Err(Error::Domain(format!("product parameter must lie in [0, 1/4], got {tau}")));
    }
    let m = n.as_f64();
    if tau == 0.0 {
        return Ok(ProductValue::exact(6.0 / ((m + 1.0) * (m + 2.0))));
    }
    if tau == 0.25 {
        return Ok(ProductValue::exact(9.0 / ((m + 2.0) * (m + 2.0))));
    }
    if n.get() == 1 {
        return Ok(ProductValue::exact(1.0));
    }
    let tol = policy.rel_tol();
    let summed = truncated_sum(|k| ln_product_factor(k, m, tau), policy, exec, |_, b| b.exp_m1() <= tol);
    Ok(ProductValue::from_sum(1.0, &summed))
}

/// `f(n, p) = (n/9)·Π_k …` from the infinite product, returning the best
/// value even when the tolerance was missed.
pub fn f_product_estimate(n: Dimension, p: Exponent, policy: &TruncationPolicy, exec: Execution) -> MomentResult {
    let product = product_value(n, p.t(), policy, exec).expect("t(p) lies in [0, 1/4]");
    product_result(n, p, &product)
}

fn product_result(n: Dimension, p: Exponent, product: &ProductValue) -> MomentResult {
    // the telescoped forms simplify further; use them to avoid a rounding step
    let value = match p.t() {
        0.0 => f_endpoint(n),
        0.25 => kuperberg_bound(n),
        _ => n.as_f64() / 9.0 * product.value,
    };
    MomentResult { value, route: Route::InfiniteProduct, error_estimate: value * product.rel_bound, n, exponent: p }
}

/// `f(n, p)` from the infinite product.
///
/// Fails with [`Error::Truncation`] (best value and relative bound) when the
/// policy tolerance is not met within the term budget.
pub fn f_product(n: Dimension, p: Exponent, policy: &TruncationPolicy) -> Result<MomentResult> {
    let product = product_value(n, p.t(), policy, Execution::default())?;
    let result = product_result(n, p, &product);
    if product.converged {
        Ok(result)
    } else {
        Err(Error::Truncation { best: result.value, bound: product.rel_bound, terms: product.terms })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// Truncated value and sign of `d/dt ln f(n, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignReport {
    pub series_value: f64,
    pub sign: Sign,
    pub terms_used: u64,
    pub all_terms_positive: bool,
    pub tail_bound: f64,
}

/// `k`-th term of `d/dt ln f`: `1/g_k(1) + (n+2)²/g_k(n+2) − 9/g_k(3) − n²/g_k(n)`.
pub fn derivative_term(k: u64, n: f64, t: f64) -> f64 {
    let n2 = n + 2.0;
    // grouped so that n = 1 cancels exactly
    (1.0 / g_term(k, 1.0, t) - n * n / g_term(k, n, t)) + (n2 * n2 / g_term(k, n2, t) - 9.0 / g_term(k, 3.0, t))
}

/// Sign of `df/dt` from the term-by-term logarithmic derivative of the product.
///
/// Summation stops once the tail bound is below the relative tolerance or
/// below `|partial sum|`, which fixes the sign.
pub fn derivative_sign_series(n: Dimension, t: f64, policy: &TruncationPolicy) -> Result<SignReport> {
    derivative_sign_series_with(n, t, policy, Execution::default())
}

pub fn derivative_sign_series_with(
    n: Dimension,
    t: f64,
    policy: &TruncationPolicy,
    exec: Execution,
) -> Result<SignReport> {
    if !(t > 0.0 && t <= 0.25) {
        return Err(Error::Domain(format!("t must lie in (0, 1/4], got {t}")));
    }
    let m = n.as_f64();
    let tol = policy.rel_tol();
    let term = |k| derivative_term(k, m, t);
    let summed = truncated_sum(term, policy, exec, |s, b| b <= tol * s.abs() || b < s.abs());
    let abs_sum = exec.sum_terms(1, summed.terms + 1, |k| term(k).abs());
    let nonpositive = exec.sum_terms(1, summed.terms + 1, |k| if term(k) > 0.0 { 0.0 } else { 1.0 });
    let s = summed.sum;
    let sign = if s.abs() <= SIGN_ZERO_TOL * (1.0 + abs_sum) {
        Sign::Zero
    } else if s > 0.0 {
        Sign::Positive
    } else {
        Sign::Negative
    };
    let report = SignReport {
        series_value: s,
        sign,
        terms_used: summed.terms,
        all_terms_positive: nonpositive == 0.0,
        tail_bound: summed.tail_bound,
    };
    if summed.converged {
        Ok(report)
    } else {
        Err(Error::Truncation { best: s, bound: summed.tail_bound, terms: summed.terms })
    }
}

/// Evaluates
/// `n²·g_k(3)·g_k(n+2)·[g_k(n) − g_k(1)] + g_k(n)·[(n+2)²·g_k(1)·g_k(3) − 9·g_k(n+2)] > 0`
/// exactly in this printed form.
pub fn per_term_positivity(k: u64, n: Dimension, t: f64) -> Result<bool> {
    if k == 0 || n.get() < 2 || !(t > 0.0) {
        return Err(Error::Argument(format!("need k >= 1, n >= 2, t > 0; got ({k}, {n}, {t})")));
    }
    let m = n.as_f64();
    let (g1, g3, gn, gn2) = (g_term(k, 1.0, t), g_term(k, 3.0, t), g_term(k, m, t), g_term(k, m + 2.0, t));
    let lhs = m * m * g3 * gn2 * (gn - g1) + gn * ((m + 2.0) * (m + 2.0) * g1 * g3 - 9.0 * gn2);
    Ok(lhs > 0.0)
}

/// Which side of `p = 2` a scan covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `p ∈ [1, 2]`: `f` should be nondecreasing.
    Increasing,
    /// `p ∈ [2, ∞]`: `f` should be nonincreasing.
    Decreasing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityScan {
    pub regime: Regime,
    pub points: Vec<(Exponent, f64)>,
    /// Every adjacent pair moves in the expected direction within tolerance.
    pub monotone: bool,
    /// Every adjacent pair away from `p = 2` moves by more than the tolerance.
    pub strict: bool,
}

impl MonotonicityScan {
    /// Monotone, and strictly so when `n ≥ 2`.
    pub fn verdict(&self, n: Dimension) -> bool {
        self.monotone && (n.get() == 1 || self.strict)
    }
}

/// `f_gamma` along an increasing grid lying entirely in `[1, 2]` or in `[2, ∞]`.
pub fn monotonicity_scan(n: Dimension, grid: &[Exponent]) -> Result<MonotonicityScan> {
    if grid.is_empty() {
        return Err(Error::Argument("empty grid".into()));
    }
    if grid.windows(2).any(|w| !(w[0].p() < w[1].p())) {
        return Err(Error::Argument("grid must be strictly increasing".into()));
    }
    let regime = if grid.iter().all(|e| e.p() <= 2.0) {
        Regime::Increasing
    } else if grid.iter().all(|e| e.p() >= 2.0) {
        Regime::Decreasing
    } else {
        return Err(Error::Argument("grid straddles p = 2".into()));
    };
    let points: Vec<(Exponent, f64)> = grid.iter().map(|&e| (e, f_gamma(n, e).value)).collect();
    let mut monotone = true;
    let mut strict = true;
    for w in points.windows(2) {
        let ((pa, fa), (pb, fb)) = (w[0], w[1]);
        let (rise, away_from_two) = match regime {
            Regime::Increasing => (fb - fa, pb.p() < 2.0),
            Regime::Decreasing => (fa - fb, pa.p() > 2.0),
        };
        monotone &= rise >= -MONOTONE_TOL;
        if away_from_two {
            strict &= rise > MONOTONE_TOL;
        }
    }
    Ok(MonotonicityScan { regime, points, monotone, strict })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub holds: bool,
    /// `n/(n+2)² − f(n, p)`.
    pub margin: f64,
    pub value: f64,
    pub bound: f64,
}

/// Checks `f(n, p) ≤ n/(n+2)²` up to [`BOUND_SLACK`].
pub fn kuperberg_check(n: Dimension, p: Exponent) -> BoundCheck {
    let value = f_gamma(n, p).value;
    let bound = kuperberg_bound(n);
    BoundCheck { holds: value <= bound + BOUND_SLACK, margin: bound - value, value, bound }
}

/// Product parameter `(r − 1)/r²`, zero at `r = ∞`.
pub fn comparator_parameter(r: Exponent) -> f64 {
    if r.is_infinite() {
        0.0
    } else if r.p() == 2.0 {
        0.25
    } else {
        (r.p() - 1.0) / (r.p() * r.p())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub regime: Regime,
    pub r_param: f64,
    pub s_param: f64,
    pub at_r: ProductValue,
    pub at_s: ProductValue,
    /// `P(R) < P(S)` on `[1, 2]`, `P(R) > P(S)` on `[2, ∞]`.
    pub verdict: bool,
    /// The gap exceeds the combined truncation bounds.
    pub certified: bool,
}

/// Compares the products at `R = (r−1)/r²` and `S = (s−1)/s²` for
/// `1 ≤ r < s ≤ 2` (expects `P(R) < P(S)`) or `2 ≤ r < s ≤ ∞` (expects the
/// reverse).
pub fn bound_comparator(n: Dimension, r: Exponent, s: Exponent, policy: &TruncationPolicy) -> Result<Comparison> {
    bound_comparator_with(n, r, s, policy, Execution::default())
}

pub fn bound_comparator_with(
    n: Dimension,
    r: Exponent,
    s: Exponent,
    policy: &TruncationPolicy,
    exec: Execution,
) -> Result<Comparison> {
    if n.get() < 2 {
        return Err(Error::Argument("comparators need n >= 2".into()));
    }
    if !(r.p() < s.p()) {
        return Err(Error::Argument(format!("need r < s, got r = {r}, s = {s}")));
    }
    let regime = if s.p() <= 2.0 {
        Regime::Increasing
    } else if r.p() >= 2.0 {
        Regime::Decreasing
    } else {
        return Err(Error::Argument(format!("r = {r} and s = {s} straddle 2")));
    };
    let (r_param, s_param) = (comparator_parameter(r), comparator_parameter(s));
    let at_r = product_value(n, r_param, policy, exec)?;
    let at_s = product_value(n, s_param, policy, exec)?;
    let verdict = match regime {
        Regime::Increasing => at_r.value < at_s.value,
        Regime::Decreasing => at_r.value > at_s.value,
    };
    let slack = at_r.value * at_r.rel_bound + at_s.value * at_s.rel_bound;
    let certified = (at_r.value - at_s.value).abs() > slack;
    Ok(Comparison { regime, r_param, s_param, at_r, at_s, verdict, certified })
}

/// `Γ(3/q)Γ(n/q) / (Γ(1/q)Γ((n+2)/q))` at a large `q`.
///
/// Since `Γ(ε) ~ 1/ε`, the ratio tends to `(n+2)/(3n)` as `q → ∞`; this is the
/// limit that makes the closed form continuous at `p = 1`. See
/// [`remark_limit_target`].
pub fn remark_limit_check(n: Dimension, q_large: f64) -> Result<f64> {
    if !(q_large >= 1e3) || !q_large.is_finite() {
        return Err(Error::Domain(format!("q must be finite and at least 1e3, got {q_large}")));
    }
    let m = n.as_f64();
    let iq = 1.0 / q_large;
    let ln_ratio = ln_gamma(3.0 * iq)? + ln_gamma(m * iq)? - ln_gamma(iq)? - ln_gamma((m + 2.0) * iq)?;
    Ok(ln_ratio.exp())
}

/// Limit of [`remark_limit_check`] as `q → ∞`: `(n+2)/(3n)`.
pub fn remark_limit_target(n: Dimension) -> f64 {
    let m = n.as_f64();
    (m + 2.0) / (3.0 * m)
}
