//! Composite quadrature on a uniform mesh.
//!
//! The solver integrates over [0, t_m] and [t_m, T] separately because the
//! kernel's t-derivative jumps at s = t_m. Splitting at a mesh node leaves
//! panel counts that are not always even, so composite Simpson is padded
//! with a 3/8 block when a side has an odd number of panels (>= 3) and
//! with a one-panel rule using one exterior node when a side is a single
//! panel. All pieces are fourth order.

use serde::{Deserialize, Serialize};

/// Quadrature rule selection for the integral operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadratureRule {
    Simpson,
    GaussLegendre { order: usize },
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule::Simpson
    }
}

/// Accumulate composite weights for integrating over the node range
/// [first, last] of a uniform mesh with spacing h. Weights are added into
/// `w`, which must cover the whole mesh; the single-panel rule reaches one
/// node past the range (toward the interior), so `w.len() >= 3` is
/// required whenever first < last.
pub(crate) fn add_panel_weights(w: &mut [f64], first: usize, last: usize, h: f64) {
    debug_assert!(last < w.len());
    if last <= first {
        return;
    }
    let panels = last - first;
    if panels == 1 {
        // One panel: quadratic through the panel plus one neighbour node.
        // Integrates exactly up to degree 2; local error O(h^4).
        if last + 1 < w.len() {
            w[first] += 5.0 * h / 12.0;
            w[first + 1] += 8.0 * h / 12.0;
            w[first + 2] -= h / 12.0;
        } else {
            // mirrored stencil at the right edge of the mesh
            w[last] += 5.0 * h / 12.0;
            w[last - 1] += 8.0 * h / 12.0;
            w[last - 2] -= h / 12.0;
        }
        return;
    }
    let mut from = first;
    let mut remaining = panels;
    if remaining % 2 == 1 {
        // Simpson 3/8 on the first three panels, pairs afterwards.
        w[from] += 3.0 * h / 8.0;
        w[from + 1] += 9.0 * h / 8.0;
        w[from + 2] += 9.0 * h / 8.0;
        w[from + 3] += 3.0 * h / 8.0;
        from += 3;
        remaining -= 3;
    }
    let mut i = from;
    while i < from + remaining {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
        i += 2;
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub(crate) fn gauss_legendre_nodes(order: usize) -> Vec<(f64, f64)> {
    assert!(order >= 1, "Gauss-Legendre order must be >= 1");
    let n = order;
    let mut out = Vec::with_capacity(n);
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and its derivative via the three-term recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { p0 } else { p1 };
            dp = n as f64 * (x * pn - p0) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let wgt = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((-x, wgt));
        if 2 * (i + 1) <= n && n - i - 1 != i {
            out.push((x, wgt));
        }
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// Cubic Lagrange interpolation of mesh values at a point `s`, using the
/// four nodes nearest to the panel containing `s` (clamped at the ends).
pub(crate) fn cubic_interp(mesh: &[f64], vals: &[f64], s: f64) -> f64 {
    let m = mesh.len();
    debug_assert!(m >= 2 && vals.len() == m);
    if m < 4 {
        // linear fallback for tiny meshes
        let i = panel_index(mesh, s);
        let (a, b) = (mesh[i], mesh[i + 1]);
        let w = (s - a) / (b - a);
        return vals[i] * (1.0 - w) + vals[i + 1] * w;
    }
    let i = panel_index(mesh, s);
    let start = i.saturating_sub(1).min(m - 4);
    let xs = &mesh[start..start + 4];
    let ys = &vals[start..start + 4];
    let mut acc = 0.0;
    for a in 0..4 {
        let mut term = ys[a];
        for b in 0..4 {
            if a != b {
                term *= (s - xs[b]) / (xs[a] - xs[b]);
            }
        }
        acc += term;
    }
    acc
}

fn panel_index(mesh: &[f64], s: f64) -> usize {
    let m = mesh.len();
    match mesh.binary_search_by(|x| x.partial_cmp(&s).unwrap()) {
        Ok(i) => i.min(m - 2),
        Err(i) => i.saturating_sub(1).min(m - 2),
    }
}
