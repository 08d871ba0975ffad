//! Green's function for v'' + v with zero Dirichlet data on [0, T].
//!
//! The kernel is
//!
//! ```text
//! G(t, s) = sin(min(t, s)) * sin(T - max(t, s)) / sin(T)
//! ```
//!
//! which is symmetric, vanishes on the boundary of the square, and for
//! T < pi satisfies 0 <= G(t, s) <= (1/2) tan(T/2) with equality at
//! t = s = T/2. Fixed points of v = -integral(G f) solve v'' + v = f with
//! v(0) = v(T) = 0 (the minus sign is owned by the solver).

use crate::error::{Error, Result};

/// Default guard on |sin T|; the formula divides by sin T and degenerates
/// at every integer multiple of pi.
pub const DEFAULT_SIN_GUARD: f64 = 1e-8;

/// Which one-sided t-derivative to take on the diagonal t = s.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Limit from t < s (the `cos(t) sin(T-s)` branch).
    Below,
    /// Limit from t > s (the `-sin(s) cos(T-t)` branch).
    Above,
}

/// Green kernel on [0, T]^2 for the operator v'' + v with Dirichlet data.
#[derive(Debug, Clone)]
pub struct GreenKernel {
    t_len: f64,
    sin_t: f64,
    guard: f64,
}

impl GreenKernel {
    pub fn new(t_len: f64) -> Result<Self> {
        Self::with_guard(t_len, DEFAULT_SIN_GUARD)
    }

    /// Construct with an explicit degeneracy guard on |sin T|.
    pub fn with_guard(t_len: f64, guard: f64) -> Result<Self> {
        if !t_len.is_finite() || t_len <= 0.0 {
            return Err(Error::InvalidInterval { t_len, guard });
        }
        let sin_t = t_len.sin();
        if sin_t.abs() <= guard {
            return Err(Error::InvalidInterval { t_len, guard });
        }
        Ok(Self { t_len, sin_t, guard })
    }

    pub fn t_len(&self) -> f64 {
        self.t_len
    }

    pub fn guard(&self) -> f64 {
        self.guard
    }

    fn check_domain(&self, t: f64, s: f64) -> Result<()> {
        let ok = |x: f64| x.is_finite() && (0.0..=self.t_len).contains(&x);
        if ok(t) && ok(s) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                t,
                s,
                t_len: self.t_len,
            })
        }
    }

    /// G(t, s). Symmetric; zero whenever t or s hits {0, T}.
    pub fn eval(&self, t: f64, s: f64) -> Result<f64> {
        self.check_domain(t, s)?;
        Ok(self.eval_unchecked(t, s))
    }

    pub(crate) fn eval_unchecked(&self, t: f64, s: f64) -> f64 {
        let lo = t.min(s);
        let hi = t.max(s);
        lo.sin() * (self.t_len - hi).sin() / self.sin_t
    }

    /// Branch formula for s <= t, smooth in s across the whole interval.
    /// Used by quadrature rules whose stencil reaches past the diagonal.
    pub(crate) fn branch_lower(&self, t: f64, s: f64) -> f64 {
        s.sin() * (self.t_len - t).sin() / self.sin_t
    }

    /// Branch formula for s >= t (see `branch_lower`).
    pub(crate) fn branch_upper(&self, t: f64, s: f64) -> f64 {
        t.sin() * (self.t_len - s).sin() / self.sin_t
    }

    /// (1/2) tan(T/2); for T < pi this is the supremum of G over the
    /// square, attained at t = s = T/2.
    pub fn bound(&self) -> f64 {
        0.5 * (0.5 * self.t_len).tan()
    }

    /// [sin(t) cos(T-t) + cos(t) sin(T-t)] / sin(T), the diagonal jump
    /// contribution in the differentiated integral representation.
    /// Trigonometrically this is 1; it is kept as written so the
    /// derivative formulas stay literal.
    pub(crate) fn jump_factor(&self, t: f64) -> f64 {
        (t.sin() * (self.t_len - t).cos() + t.cos() * (self.t_len - t).sin()) / self.sin_t
    }

    /// One-sided t-derivative of G. Off the diagonal the side is
    /// irrelevant; on it, `Below`/`Above` select the branch limit.
    /// The jump `above - below` at t = s equals -1.
    pub fn dt_onesided(&self, t: f64, s: f64, side: Side) -> Result<f64> {
        self.check_domain(t, s)?;
        let below_branch = match t.partial_cmp(&s).expect("domain checked") {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => side == Side::Below,
        };
        if below_branch {
            // d/dt [sin(t) sin(T-s)] / sin T
            Ok(t.cos() * (self.t_len - s).sin() / self.sin_t)
        } else {
            // d/dt [sin(s) sin(T-t)] / sin T
            Ok(-s.sin() * (self.t_len - t).cos() / self.sin_t)
        }
    }
}
