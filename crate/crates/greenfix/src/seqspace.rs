//! Truncated lp vectors and trajectories: p-norms, tail profiles, and the
//! tail-based estimator for the Hausdorff measure of noncompactness of
//! finite families.
//!
//! A truncated family always has zero measure in the limit, so the
//! estimator reports the supremum tail norm at a chosen cutoff plus an
//! optional analytic bound for the discarded components. It is an upper
//! proxy at the truncation level, not the measure itself. For families of
//! trajectories the estimate is the maximum of the columnwise estimate
//! over mesh points; equicontinuity of the family is assumed, not checked
//! (it holds by construction for operator images).

use crate::error::{Error, Result};

/// Exponent pair (p, q) with 1/p + 1/q = 1. For p = 1 the conjugate is
/// stored as infinity and T^(p/q) = T^(p-1) = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpParams {
    p: f64,
    q: f64,
}

impl LpParams {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        let q = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
        Ok(Self { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// |x|^p with fast paths for p = 1, 2.
    pub(crate) fn pow_p(&self, x: f64) -> f64 {
        if self.p == 2.0 {
            x * x
        } else if self.p == 1.0 {
            x.abs()
        } else {
            x.abs().powf(self.p)
        }
    }

    /// x^(1/p) for x >= 0.
    pub(crate) fn root_p(&self, x: f64) -> f64 {
        if self.p == 2.0 {
            x.sqrt()
        } else if self.p == 1.0 {
            x
        } else {
            x.powf(1.0 / self.p)
        }
    }
}

/// First J components of an lp vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedVec {
    entries: Vec<f64>,
}

impl TruncatedVec {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if let Some(bad) = entries.iter().find(|x| !x.is_finite()) {
            return Err(Error::MeshMismatch(format!("non-finite entry {bad}")));
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }
}

impl std::ops::Deref for TruncatedVec {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.entries
    }
}

/// A trajectory [0, T] -> lp truncated to J components on an M-point mesh.
/// `values[j][m]` is component j+1 at mesh point m.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedState {
    mesh: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl TruncatedState {
    pub fn new(mesh: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if mesh.len() < 2 {
            return Err(Error::MeshMismatch("mesh needs at least 2 points".into()));
        }
        if !mesh.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::MeshMismatch("mesh must be strictly increasing".into()));
        }
        if values.is_empty() {
            return Err(Error::MeshMismatch("state needs at least one component".into()));
        }
        for row in &values {
            if row.len() != mesh.len() {
                return Err(Error::MeshMismatch(format!(
                    "component row has {} values for {} mesh points",
                    row.len(),
                    mesh.len()
                )));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::MeshMismatch("non-finite state value".into()));
            }
        }
        Ok(Self { mesh, values })
    }

    pub fn zero(mesh: Vec<f64>, components: usize) -> Result<Self> {
        let m = mesh.len();
        Self::new(mesh, vec![vec![0.0; m]; components])
    }

    pub fn mesh(&self) -> &[f64] {
        &self.mesh
    }

    /// Number of retained components (J).
    pub fn components(&self) -> usize {
        self.values.len()
    }

    /// Number of mesh points (M).
    pub fn mesh_points(&self) -> usize {
        self.mesh.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Component j (1-based) at mesh index m.
    pub fn value(&self, j: usize, m: usize) -> f64 {
        self.values[j - 1][m]
    }

    /// The column v(t_m) as a plain vector.
    pub fn column(&self, m: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[m]).collect()
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.components() == other.components() && self.mesh == other.mesh
    }
}

/// Supremum tail norms of a family, indexed by cutoff n = 1..=J+1:
/// `tail(n) = sup over members of (sum_{k>=n} |e_k|^p)^(1/p)`.
/// The last entry (n = J+1) is exactly zero for truncated data.
#[derive(Debug, Clone)]
pub struct TailProfile {
    tails: Vec<f64>,
}

impl TailProfile {
    /// Tail norm at 1-based cutoff n (n = J+1 allowed, always 0).
    pub fn tail(&self, n: usize) -> f64 {
        self.tails[n - 1]
    }

    /// J + 1.
    pub fn len(&self) -> usize {
        self.tails.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tails.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.tails
    }
}

/// (sum |v_k|^p)^(1/p).
pub fn p_norm(v: &[f64], params: LpParams) -> f64 {
    params.root_p(v.iter().map(|&x| params.pow_p(x)).sum())
}

/// sup over mesh points of the columnwise p-norm.
pub fn sup_norm(state: &TruncatedState, params: LpParams) -> f64 {
    (0..state.mesh_points())
        .map(|m| {
            params.root_p(
                state
                    .rows()
                    .iter()
                    .map(|row| params.pow_p(row[m]))
                    .sum::<f64>(),
            )
        })
        .fold(0.0, f64::max)
}

fn tail_profile_slices<'a, I>(family: I, dim: usize, params: LpParams) -> TailProfile
where
    I: Iterator<Item = &'a [f64]>,
{
    let mut tails = vec![0.0; dim + 1];
    for member in family {
        let mut acc = 0.0;
        // suffix sums: cutoff n covers entries k >= n (1-based)
        for n in (1..=dim).rev() {
            acc += params.pow_p(member[n - 1]);
            let t = params.root_p(acc);
            if t > tails[n - 1] {
                tails[n - 1] = t;
            }
        }
    }
    TailProfile { tails }
}

/// Tail profile of a family of equal-dimension vectors.
pub fn tail_profile(family: &[TruncatedVec], params: LpParams) -> Result<TailProfile> {
    let first = family.first().ok_or(Error::EmptyFamily)?;
    let dim = first.dim();
    if family.iter().any(|v| v.dim() != dim) {
        return Err(Error::MeshMismatch("family members differ in dimension".into()));
    }
    Ok(tail_profile_slices(
        family.iter().map(|v| &v[..]),
        dim,
        params,
    ))
}

/// Upper proxy for the measure of noncompactness of a finite family at a
/// truncation cutoff: `tail(cutoff) + analytic_tail`. The optional term
/// accounts for the components discarded by the truncation.
pub fn mnc_estimate(
    family: &[TruncatedVec],
    params: LpParams,
    cutoff: usize,
    analytic_tail: Option<f64>,
) -> Result<f64> {
    let profile = tail_profile(family, params)?;
    if cutoff == 0 || cutoff > profile.len() {
        return Err(Error::BadCutoff {
            cutoff,
            max: profile.len(),
        });
    }
    Ok(profile.tail(cutoff) + analytic_tail.unwrap_or(0.0))
}

/// Estimate for a family of trajectories: maximum over mesh points of the
/// columnwise estimate.
pub fn family_mnc(
    states: &[TruncatedState],
    params: LpParams,
    cutoff: usize,
) -> Result<f64> {
    let first = states.first().ok_or(Error::EmptyFamily)?;
    if !states.iter().all(|s| s.same_grid(first)) {
        return Err(Error::MeshMismatch(
            "family states differ in mesh or dimension".into(),
        ));
    }
    let dim = first.components();
    if cutoff == 0 || cutoff > dim + 1 {
        return Err(Error::BadCutoff {
            cutoff,
            max: dim + 1,
        });
    }
    let mut worst = 0.0f64;
    for m in 0..first.mesh_points() {
        for state in states {
            let acc: f64 = state.rows()[cutoff - 1..]
                .iter()
                .map(|row| params.pow_p(row[m]))
                .sum();
            worst = worst.max(params.root_p(acc));
        }
    }
    Ok(worst)
}
