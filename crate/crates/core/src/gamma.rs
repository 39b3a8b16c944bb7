#![allow(clippy::excessive_precision)]

//! Log-gamma, log-beta and the gamma-ratio infinite product.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::truncation::truncated_sum;

const EULER_GAMMA: f64 = 5.772_156_649_015_328_6e-1;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `ζ(k) − 1` for `k = 2, 3, …, 43`.
const ZETA_MINUS_ONE: [f64; 42] = [
    6.44934066848226406e-01,
    2.02056903159594292e-01,
    8.23232337111381857e-02,
    3.69277551433699266e-02,
    1.73430619844491402e-02,
    8.34927738192282713e-03,
    4.07735619794433960e-03,
    2.00839282608221426e-03,
    9.94575127818085256e-04,
    4.94188604119464529e-04,
    2.46086553308048320e-04,
    1.22713347578489145e-04,
    6.12481350587048277e-05,
    3.05882363070204933e-05,
    1.52822594086518710e-05,
    7.63719763789976257e-06,
    3.81729326499984022e-06,
    1.90821271655393897e-06,
    9.53962033872796212e-07,
    4.76932986787806447e-07,
    2.38450502727733004e-07,
    1.19219925965311064e-07,
    5.96081890512594801e-08,
    2.98035035146522793e-08,
    1.49015548283650427e-08,
    7.45071178983543006e-09,
    3.72533402478845728e-09,
    1.86265972351304914e-09,
    9.31327432419668166e-10,
    4.65662906503378366e-10,
    2.32831183367650534e-10,
    1.16415501727005193e-10,
    5.82077208790270145e-11,
    2.91038504449710001e-11,
    1.45519218910419849e-11,
    7.27595983505748180e-12,
    3.63797954737865086e-12,
    1.81898965030706607e-12,
    9.09494784026388841e-13,
    4.54747378304215422e-13,
    2.27373684582465244e-13,
    1.13686840768022791e-13,
];

// Lanczos approximation, g = 7, nine coefficients.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(2 + z)` for `|z| ≤ 1/2`, from the power series in `ζ(k) − 1`.
fn ln_gamma_two_plus(z: f64) -> f64 {
    let mut acc = 0.0;
    // (−z)^k carries the alternating sign
    let mut power = -z;
    for (i, c) in ZETA_MINUS_ONE.iter().enumerate() {
        power *= -z;
        let k = (i + 2) as f64;
        let term = c * power / k;
        acc += term;
        if term.abs() < 1e-18 * acc.abs() {
            break;
        }
    }
    z * (1.0 - EULER_GAMMA) + acc
}

fn ln_gamma_lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut series = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_2PI + (z + 0.5) * t.ln() - t + series.ln()
}

/// Natural log of the gamma function for `x > 0`.
///
/// Near the zeros at 1 and 2 a series in `x − 1` or `x − 2` keeps the
/// relative error small; elsewhere a Lanczos approximation is used.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma requires a finite x > 0, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x
        return ln_gamma_unchecked(x + 1.0) - x.ln();
    }
    if x < 1.5 {
        // ln Γ(1 + z) = ln Γ(2 + z) − ln(1 + z)
        let z = x - 1.0;
        return ln_gamma_two_plus(z) - z.ln_1p();
    }
    if x < 2.5 {
        return ln_gamma_two_plus(x - 2.0);
    }
    ln_gamma_lanczos(x)
}

/// `ln Γ(z)` for complex `z` with `Re z ≥ 1/2`; reflection handles the rest.
///
/// The imaginary part is a branch of the argument and is only meaningful up
/// to multiples of `2π`.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z)Γ(1 − z) = π / sin(πz)
        let s = (Complex64::from(PI) * z).sin();
        return Complex64::from(PI.ln()) - s.ln() - ln_gamma_complex(Complex64::new(1.0, 0.0) - z);
    }
    let w = z - 1.0;
    let mut series = Complex64::from(LANCZOS[0]);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        series += Complex64::from(*c) / (w + i as f64);
    }
    let t = w + LANCZOS_G + 0.5;
    Complex64::from(HALF_LN_2PI) + (w + 0.5) * t.ln() - t + series.ln()
}

/// `ln |Γ(x)|` and the sign of `Γ(x)` for real `x` not a nonpositive integer.
pub fn ln_abs_gamma(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() || (x <= 0.0 && x == x.floor()) {
        return Err(Error::Domain(format!("gamma has a pole at {x}")));
    }
    if x > 0.0 {
        return Ok((ln_gamma_unchecked(x), 1.0));
    }
    let s = (PI * x).sin();
    let value = PI.ln() - s.abs().ln() - ln_gamma_unchecked(1.0 - x);
    Ok((value, s.signum()))
}

/// `ln B(a, b)` for `a, b > 0`.
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!("ln_beta requires a, b > 0, got ({a}, {b})")));
    }
    Ok(ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?)
}

/// How far an infinite product or series is expanded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    max_terms: u64,
    rel_tol: f64,
    confirm_by_doubling: bool,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self { max_terms: 1_000_000, rel_tol: 1e-10, confirm_by_doubling: true }
    }
}

impl TruncationPolicy {
    pub fn new(max_terms: u64, rel_tol: f64, confirm_by_doubling: bool) -> Result<Self> {
        if max_terms == 0 {
            return Err(Error::Argument("max_terms must be at least 1".into()));
        }
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(Error::Argument(format!("rel_tol must lie in (0, 1), got {rel_tol}")));
        }
        Ok(Self { max_terms, rel_tol, confirm_by_doubling })
    }

    pub fn max_terms(&self) -> u64 {
        self.max_terms
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn confirm_by_doubling(&self) -> bool {
        self.confirm_by_doubling
    }

    /// The same policy with twice the term budget.
    pub fn doubled(&self) -> Self {
        Self { max_terms: self.max_terms * 2, ..*self }
    }
}

/// A value obtained by truncating an infinite product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductValue {
    pub value: f64,
    /// Bound on the relative deviation of `value` from the full product.
    pub rel_bound: f64,
    pub terms: u64,
    /// Whether `rel_bound` met the policy tolerance.
    pub converged: bool,
}

impl ProductValue {
    pub(crate) fn exact(value: f64) -> Self {
        Self { value, rel_bound: 0.0, terms: 0, converged: true }
    }

    pub(crate) fn from_sum(sign: f64, summed: &crate::truncation::TruncatedSum) -> Self {
        Self {
            value: sign * summed.sum.exp(),
            rel_bound: summed.tail_bound.exp_m1(),
            terms: summed.terms,
            converged: summed.converged,
        }
    }

    /// Turn a non-converged value into [`Error::Truncation`].
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::Truncation { best: self.value, bound: self.rel_bound, terms: self.terms })
        }
    }
}

/// `Γ(1 − a)·Γ(x + a)/Γ(x)` as the product over `k ≥ 1` of
/// `k(k + x − 1) / ((k − a)(k + x + a − 1))`.
///
/// Returns [`Error::Truncation`] carrying the best value and its relative
/// bound when `policy.rel_tol` is not reached within the term budget.
pub fn gamma_ratio_product(x: f64, a: f64, policy: &TruncationPolicy) -> Result<ProductValue> {
    gamma_ratio_estimate(x, a, policy, Execution::default())?.require_converged()
}

/// Like [`gamma_ratio_product`], but a value that missed the tolerance is
/// returned with `converged == false` instead of as an error.
pub fn gamma_ratio_estimate(x: f64, a: f64, policy: &TruncationPolicy, exec: Execution) -> Result<ProductValue> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    if !(a < 1.0) || !a.is_finite() {
        return Err(Error::Domain(format!("a must be below 1, got {a}")));
    }
    let shifted = x + a;
    if shifted <= 0.0 && shifted == shifted.floor() {
        return Err(Error::Domain(format!("x + a = {shifted} is a nonpositive integer")));
    }
    if a == 0.0 {
        return Ok(ProductValue::exact(1.0));
    }

    // factor_k − 1 = a(x + a − 1) / ((k − a)(k + x + a − 1))
    let c = a * (shifted - 1.0);
    let log_factor = move |k: u64| {
        let k = k as f64;
        let den = (k - a) * (k + shifted - 1.0);
        let r = c / den;
        if r > -1.0 {
            r.ln_1p()
        } else {
            (1.0 + r).abs().ln()
        }
    };
    // factors with k + x + a − 1 < 0 are negative; there are finitely many
    let negatives = if shifted < 0.0 { (1.0 - shifted).ceil() as u64 - 1 } else { 0 };
    let sign = if negatives % 2 == 1 { -1.0 } else { 1.0 };

    let tol = policy.rel_tol();
    let summed = truncated_sum(log_factor, policy, exec, |_, bound| bound.exp_m1() <= tol);
    Ok(ProductValue::from_sum(sign, &summed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn ln_gamma_known_values() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert_eq!(ln_gamma(2.0).unwrap(), 0.0);
        assert!(close(ln_gamma(0.5).unwrap(), 0.5 * PI.ln(), 1e-15));
        assert!(close(ln_gamma(5.0).unwrap(), 24f64.ln(), 1e-15));
    }

    #[test]
    fn ln_gamma_rejects_nonpositive() {
        assert!(matches!(ln_gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(ln_gamma(-1.5), Err(Error::Domain(_))));
        assert!(matches!(ln_gamma(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn branches_meet_continuously() {
        for edge in [0.5, 1.5, 2.5] {
            let lo = ln_gamma(edge - 1e-14).unwrap();
            let hi = ln_gamma(edge).unwrap();
            // slope of ln Γ is below 2 in magnitude here
            assert!((lo - hi).abs() < 3e-14, "jump at {edge}: {lo} vs {hi}");
        }
    }

    #[test]
    fn ln_beta_known_values() {
        assert!(ln_beta(1.0, 1.0).unwrap().abs() < 1e-16);
        assert!(close(ln_beta(0.5, 0.5).unwrap(), PI.ln(), 1e-15));
        assert!(close(ln_beta(2.0, 3.0).unwrap(), (1.0f64 / 12.0).ln(), 1e-14));
        assert!(ln_beta(0.0, 1.0).is_err());
        assert!(ln_beta(1.0, -2.0).is_err());
    }

    #[test]
    fn complex_matches_real_on_axis() {
        for x in [0.3, 0.7, 1.2, 3.4, 12.0, 150.0] {
            let z = ln_gamma_complex(Complex64::new(x, 0.0));
            assert!((z.re - ln_gamma(x).unwrap()).abs() < 2e-14 * (1.0 + z.re.abs()), "{x}");
        }
        // |Γ(1/2 + iy)|² = π / cosh(πy)
        let y = 0.8;
        let z = ln_gamma_complex(Complex64::new(0.5, y));
        assert!((2.0 * z.re - (PI / (PI * y).cosh()).ln()).abs() < 1e-14);
    }

    #[test]
    fn ln_abs_gamma_reflects() {
        // Γ(−1/2) = −2√π
        let (v, s) = ln_abs_gamma(-0.5).unwrap();
        assert_eq!(s, -1.0);
        assert!(close(v, (2.0 * PI.sqrt()).ln(), 1e-15));
        assert!(ln_abs_gamma(-3.0).is_err());
    }

    #[test]
    fn policy_validation() {
        assert!(TruncationPolicy::new(0, 1e-3, true).is_err());
        assert!(TruncationPolicy::new(10, 0.0, true).is_err());
        assert!(TruncationPolicy::new(10, 1.0, true).is_err());
        let p = TruncationPolicy::default();
        assert_eq!((p.max_terms(), p.rel_tol(), p.confirm_by_doubling()), (1_000_000, 1e-10, true));
        assert_eq!(p.doubled().max_terms(), 2_000_000);
    }

    #[test]
    fn ratio_product_examples() {
        let policy = TruncationPolicy::default();
        let half = gamma_ratio_estimate(1.0, 0.5, &policy, Execution::Sequential).unwrap();
        assert!(!half.converged);
        assert!(matches!(gamma_ratio_product(1.0, 0.5, &policy), Err(Error::Truncation { .. })));
        assert!((half.value / (PI / 2.0) - 1.0).abs() <= half.rel_bound);
        let one = gamma_ratio_product(2.0, 0.0, &policy).unwrap();
        assert_eq!(one.value, 1.0);
        // x + a = 1 makes every factor exactly one
        let unit = gamma_ratio_product(0.25, 0.75, &policy).unwrap();
        assert_eq!(unit.value, 1.0);
    }

    #[test]
    fn ratio_product_domain() {
        let policy = TruncationPolicy::default();
        assert!(matches!(gamma_ratio_product(0.0, 0.5, &policy), Err(Error::Domain(_))));
        assert!(matches!(gamma_ratio_product(1.0, 1.0, &policy), Err(Error::Domain(_))));
        assert!(matches!(gamma_ratio_product(0.5, -0.5, &policy), Err(Error::Domain(_))));
        assert!(matches!(gamma_ratio_product(1.5, -3.5, &policy), Err(Error::Domain(_))));
    }

    #[test]
    fn ratio_product_negative_shift() {
        // x + a < 0: Γ(x + a) is negative for x + a in (−1, 0)
        let policy = TruncationPolicy::new(200_000, 1e-10, true).unwrap();
        let (x, a) = (0.1, -0.9);
        let got = gamma_ratio_estimate(x, a, &policy, Execution::Sequential).unwrap();
        let (lg, s) = ln_abs_gamma(x + a).unwrap();
        let direct = s * (ln_gamma(1.0 - a).unwrap() + lg - ln_gamma(x).unwrap()).exp();
        assert!(got.value < 0.0);
        assert!((got.value / direct - 1.0).abs() <= got.rel_bound);
    }
}
