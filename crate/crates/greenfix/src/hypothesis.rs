//! Existence constants and conditions for the integral-equation fixed
//! point: the envelope suprema G and H, two contraction conditions, and
//! the invariant-ball radius.
//!
//! Two conditions are reported. `cond_A = (HT)^(1/p) tan(T/2)` is the
//! commonly stated one; `cond_B = H^(1/p) T tan(T/2)` is what careful
//! bookkeeping of the Hoelder factor T^(p/q) gives, and it also matches
//! the positivity requirement on the radius denominator. They differ by
//! T^(1-1/p), so they coincide at T = 1 (and for p = 1). The solver's
//! guarantee gate uses the stricter of the two.

use serde::{Deserialize, Serialize};

use crate::seqspace::LpParams;
use crate::system::System;

/// Envelope suprema extracted from a system.
#[derive(Debug, Clone, Copy)]
pub struct Constants {
    /// Closed-form majorant for sup_t sum g_k, when the system has one.
    pub g_majorant: Option<f64>,
    /// Numerical sup over sampled t of the partial sums plus the analytic
    /// tail bound for the discarded indices.
    pub g_numeric: f64,
    /// sup over j, t of h_j(t).
    pub h_sup: f64,
}

impl Constants {
    /// G used in the radius formula: the majorant when available.
    pub fn g_effective(&self) -> f64 {
        self.g_majorant.unwrap_or(self.g_numeric)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Guaranteed,
    StatedConditionOnly,
    Fails,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Guaranteed => "guaranteed",
            Verdict::StatedConditionOnly => "stated-condition-only",
            Verdict::Fails => "fails",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisReport {
    #[serde(rename = "G_majorant")]
    pub g_majorant: Option<f64>,
    #[serde(rename = "G_numeric")]
    pub g_numeric: f64,
    #[serde(rename = "H")]
    pub h_sup: f64,
    /// (HT)^(1/p) tan(T/2); pass iff < 2.
    #[serde(rename = "cond_A")]
    pub cond_a: f64,
    /// H^(1/p) T tan(T/2); pass iff < 2.
    #[serde(rename = "cond_B")]
    pub cond_b: f64,
    /// Strict-bookkeeping Darbo factor, max(cond_A, cond_B)/2; the solver
    /// gate requires k < 1.
    pub k_contraction: f64,
    /// Invariant-ball radius; present only while the denominator
    /// 2^p - H (T tan(T/2))^p is positive.
    pub r: Option<f64>,
    pub verdict: Verdict,
}

/// Sample the envelopes: H as the max of h_j over a t-grid and j <= J
/// combined with the analytic sup, G numerically as the max over the grid
/// of the partial sums plus the tail bound past J.
pub fn compute_constants(
    spec: &dyn System,
    t_len: f64,
    _params: LpParams,
    components: usize,
    t_samples: usize,
) -> Constants {
    let samples = t_samples.max(1);
    let mut h_sup = 0.0f64;
    let mut g_numeric = 0.0f64;
    for i in 0..samples {
        let t = if samples == 1 {
            0.0
        } else {
            t_len * i as f64 / (samples - 1) as f64
        };
        let mut g_sum = 0.0;
        for j in 1..=components {
            h_sup = h_sup.max(spec.h(j, t));
            g_sum += spec.g(j, t);
        }
        g_numeric = g_numeric.max(g_sum);
    }
    g_numeric += spec.g_tail_bound(components + 1, t_len);
    if let Some(h) = spec.analytic_h_sup(t_len) {
        h_sup = h_sup.max(h);
    }
    Constants {
        g_majorant: spec.analytic_g_majorant(t_len),
        g_numeric,
        h_sup,
    }
}

/// Evaluate both conditions and the radius for given G, H.
pub fn check_conditions(
    g_effective: f64,
    h_sup: f64,
    t_len: f64,
    params: LpParams,
) -> (f64, f64, f64, Option<f64>, Verdict) {
    let p = params.p();
    let tan_half = (0.5 * t_len).tan();
    let cond_a = (h_sup * t_len).powf(1.0 / p) * tan_half;
    let cond_b = h_sup.powf(1.0 / p) * t_len * tan_half;
    let k_contraction = 0.5 * cond_a.max(cond_b);
    let denom = 2f64.powf(p) - h_sup * (t_len * tan_half).powf(p);
    let r = (denom > 0.0)
        .then(|| g_effective.powf(1.0 / p) * t_len * tan_half / denom.powf(1.0 / p));
    let verdict = if cond_a < 2.0 && cond_b < 2.0 {
        Verdict::Guaranteed
    } else if cond_a < 2.0 {
        Verdict::StatedConditionOnly
    } else {
        Verdict::Fails
    };
    (cond_a, cond_b, k_contraction, r, verdict)
}

/// Full report for a system on [0, T].
pub fn evaluate(
    spec: &dyn System,
    t_len: f64,
    params: LpParams,
    components: usize,
    t_samples: usize,
) -> HypothesisReport {
    let constants = compute_constants(spec, t_len, params, components, t_samples);
    let (cond_a, cond_b, k_contraction, r, verdict) =
        check_conditions(constants.g_effective(), constants.h_sup, t_len, params);
    HypothesisReport {
        g_majorant: constants.g_majorant,
        g_numeric: constants.g_numeric,
        h_sup: constants.h_sup,
        cond_a,
        cond_b,
        k_contraction,
        r,
        verdict,
    }
}
