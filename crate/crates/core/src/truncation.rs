//! Truncated evaluation of convergent sums whose terms decay like `C/k²`.
//!
//! Infinite products are handled by summing log factors. The tail past the
//! truncation index `K` is estimated as `C/K` with `C = 2·K²·|term(K)|`, and
//! optionally validated by extending the sum to `2K`.

use crate::exec::Execution;
use crate::gamma::TruncationPolicy;

/// First checkpoint of the doubling schedule.
const FIRST_CHECKPOINT: u64 = 64;

/// Outcome of a truncated summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSum {
    pub sum: f64,
    /// Estimated bound on `|Σ_{k > terms} term(k)|`.
    pub tail_bound: f64,
    /// Number of terms actually summed.
    pub terms: u64,
    /// Whether the stopping criterion was met within the budget.
    pub converged: bool,
}

/// Sum `term(k)` for `k = 1, 2, …` until `accept(sum, bound)` holds or the
/// budget runs out.
pub(crate) fn truncated_sum<F, A>(term: F, policy: &TruncationPolicy, exec: Execution, accept: A) -> TruncatedSum
where
    F: Fn(u64) -> f64 + Sync + Send,
    A: Fn(f64, f64) -> bool,
{
    let max = policy.max_terms();
    let tail_at = |k: u64| 2.0 * k as f64 * term(k).abs();

    let mut done = 0u64;
    let mut sum = 0.0;
    let mut k = FIRST_CHECKPOINT.min(max);
    loop {
        sum += exec.sum_terms(done + 1, k + 1, &term);
        done = k;
        let bound = tail_at(k);
        let at_budget = k >= max;
        if !(accept(sum, bound) || at_budget) {
            k = (2 * k).min(max);
            continue;
        }
        if !policy.confirm_by_doubling() {
            return TruncatedSum { sum, tail_bound: bound, terms: k, converged: accept(sum, bound) };
        }
        let doubled = 2 * k;
        let extended = sum + exec.sum_terms(k + 1, doubled + 1, &term);
        let delta = (extended - sum).abs();
        let validated = delta <= bound;
        let bound2 = tail_at(doubled).max(delta);
        if validated || at_budget {
            let bound2 = if validated { bound2 } else { bound2.max(2.0 * delta) };
            return TruncatedSum {
                sum: extended,
                tail_bound: bound2,
                terms: doubled,
                converged: validated && accept(extended, bound2),
            };
        }
        // the tail estimate at k was too optimistic; keep going from 2k
        sum = extended;
        done = doubled;
        if doubled >= max {
            return TruncatedSum { sum, tail_bound: bound2.max(2.0 * delta), terms: doubled, converged: false };
        }
        k = (2 * doubled).min(max);
    }
}
