//! The integral operator F and its damped Picard iteration.
//!
//! (Fv)_j(t) = -integral_0^T G(t, s) f_j(s, v(s)) ds on a uniform mesh;
//! fixed points solve v'' + v = f(t, v) with v(0) = v(T) = 0. The minus
//! sign pairs with the min/max kernel so that the constant-forcing
//! problem reproduces its closed-form solution.
//!
//! Each integral is split at s = t because the kernel's t-derivative is
//! discontinuous there; both sides are integrated with fourth-order
//! composite rules restricted to mesh nodes (see `quadrature`). The
//! Gauss-Legendre option samples the integrand inside panels and obtains
//! state values by cubic interpolation, which is flagged in the result
//! warnings.
//!
//! Existence theory for this operator is non-constructive, so the
//! iteration is plain relaxation: v <- (1-w) v + w F(v), with w falling
//! back to 0.5 if the step size grows three times in a row. Failure to
//! converge is a first-class outcome carrying the full trace.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::GreenKernel;
use crate::quadrature::{add_panel_weights, cubic_interp, gauss_legendre_nodes, QuadratureRule};
use crate::seqspace::{p_norm, sup_norm, LpParams, TruncatedState};
use crate::system::System;

/// Uniform mesh on [0, T] with exact endpoints.
pub fn uniform_mesh(t_len: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| t_len * (i as f64 / (points - 1) as f64))
        .collect()
}

/// Initial iterate for the fixed-point loop.
#[derive(Debug, Clone, Default)]
pub enum Initial {
    /// The zero trajectory (lies in every ball around the origin).
    #[default]
    Zero,
    Custom(TruncatedState),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Truncation dimension J.
    pub components: usize,
    /// Mesh size M; odd so panel splits stay even where possible.
    pub mesh_points: usize,
    pub quadrature: QuadratureRule,
    /// Supremum-norm tolerance on successive iterates.
    pub tol: f64,
    pub max_iter: usize,
    /// Relaxation weight in (0, 1].
    pub relaxation: f64,
    pub initial: Initial,
    /// When supplied, the solve records whether every iterate stayed in
    /// the ball of this radius.
    pub ball_radius: Option<f64>,
}

impl SolverConfig {
    pub fn new(components: usize, mesh_points: usize) -> Self {
        Self {
            components,
            mesh_points,
            quadrature: QuadratureRule::Simpson,
            tol: 1e-10,
            max_iter: 200,
            relaxation: 1.0,
            initial: Initial::Zero,
            ball_radius: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.components == 0 {
            return Err(Error::InvalidSolverConfig("J must be >= 1".into()));
        }
        if self.mesh_points < 3 || self.mesh_points % 2 == 0 {
            return Err(Error::InvalidSolverConfig(format!(
                "M must be odd and >= 3, got {}",
                self.mesh_points
            )));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidSolverConfig("tol must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidSolverConfig("max_iter must be >= 1".into()));
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(Error::InvalidSolverConfig(
                "relaxation must lie in (0, 1]".into(),
            ));
        }
        if let QuadratureRule::GaussLegendre { order } = self.quadrature {
            if order == 0 || order > 32 {
                return Err(Error::InvalidSolverConfig(format!(
                    "Gauss-Legendre order must lie in 1..=32, got {order}"
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of a solve. `state` is the last iterate; the remaining fields
/// are the serializable report.
#[derive(Debug, Clone, Serialize)]
pub struct SolveResult {
    #[serde(skip)]
    pub state: TruncatedState,
    pub system: String,
    pub converged: bool,
    pub iterations: usize,
    /// Sup-norm distance between successive iterates, one per iteration.
    pub iterate_deltas: Vec<f64>,
    pub sup_norm: f64,
    /// Bound on the component-index truncation error of the right-hand
    /// side at the final state.
    pub truncation_error_bound: f64,
    /// Whether every iterate stayed inside the configured ball.
    pub stayed_in_ball: Option<bool>,
    pub warnings: Vec<String>,
}

/// Precomputed quadrature-times-kernel coefficients for one mesh. Row m
/// holds the coefficients of integral_0^T G(t_m, s) f(s) ds against the
/// integrand samples, with the split at s = t_m already folded in.
pub struct OperatorTable {
    mesh: Vec<f64>,
    coeffs: Vec<Vec<f64>>,
    /// Integrand sample points: the mesh itself for Simpson, interior
    /// Gauss points per panel otherwise.
    sample_points: Vec<f64>,
    interpolated: bool,
}

impl OperatorTable {
    pub fn new(kernel: &GreenKernel, mesh: &[f64], rule: QuadratureRule) -> Result<Self> {
        let m = mesh.len();
        if m < 3 {
            return Err(Error::MeshMismatch("mesh needs at least 3 points".into()));
        }
        let t_len = kernel.t_len();
        if (mesh[m - 1] - t_len).abs() > 1e-12 * t_len.max(1.0) || mesh[0] != 0.0 {
            return Err(Error::MeshMismatch(format!(
                "mesh spans [{}, {}] but kernel interval is [0, {}]",
                mesh[0],
                mesh[m - 1],
                t_len
            )));
        }
        let h = t_len / (m - 1) as f64;
        match rule {
            QuadratureRule::Simpson => {
                let coeffs = (0..m)
                    .into_par_iter()
                    .map(|target| {
                        let t = mesh[target];
                        let mut wl = vec![0.0; m];
                        let mut wr = vec![0.0; m];
                        add_panel_weights(&mut wl, 0, target, h);
                        add_panel_weights(&mut wr, target, m - 1, h);
                        (0..m)
                            .map(|i| {
                                let s = mesh[i];
                                wl[i] * kernel.branch_lower(t, s)
                                    + wr[i] * kernel.branch_upper(t, s)
                            })
                            .collect()
                    })
                    .collect();
                Ok(Self {
                    mesh: mesh.to_vec(),
                    coeffs,
                    sample_points: mesh.to_vec(),
                    interpolated: false,
                })
            }
            QuadratureRule::GaussLegendre { order } => {
                let nodes = gauss_legendre_nodes(order);
                let mut sample_points = Vec::with_capacity((m - 1) * order);
                let mut weights = Vec::with_capacity((m - 1) * order);
                for panel in 0..m - 1 {
                    let a = mesh[panel];
                    let b = mesh[panel + 1];
                    let mid = 0.5 * (a + b);
                    let half = 0.5 * (b - a);
                    for &(x, w) in &nodes {
                        sample_points.push(mid + half * x);
                        weights.push(half * w);
                    }
                }
                let coeffs = (0..m)
                    .into_par_iter()
                    .map(|target| {
                        let t = mesh[target];
                        sample_points
                            .iter()
                            .enumerate()
                            .map(|(idx, &s)| {
                                let panel = idx / order;
                                let g = if panel < target {
                                    kernel.branch_lower(t, s)
                                } else {
                                    kernel.branch_upper(t, s)
                                };
                                weights[idx] * g
                            })
                            .collect()
                    })
                    .collect();
                Ok(Self {
                    mesh: mesh.to_vec(),
                    coeffs,
                    sample_points,
                    interpolated: true,
                })
            }
        }
    }

    pub fn mesh(&self) -> &[f64] {
        &self.mesh
    }

    /// Whether integrand samples require state interpolation.
    pub fn interpolated(&self) -> bool {
        self.interpolated
    }

    fn check_state(&self, state: &TruncatedState) -> Result<()> {
        if state.mesh() != &self.mesh[..] {
            return Err(Error::MeshMismatch(
                "state mesh differs from operator mesh".into(),
            ));
        }
        Ok(())
    }

    /// f_j at every integrand sample point, row per component.
    fn sample_f(&self, spec: &dyn System, state: &TruncatedState) -> Vec<Vec<f64>> {
        let components = state.components();
        let columns: Vec<Vec<f64>> = if self.interpolated {
            self.sample_points
                .iter()
                .map(|&s| {
                    (0..components)
                        .map(|j| cubic_interp(&self.mesh, &state.rows()[j], s))
                        .collect()
                })
                .collect()
        } else {
            (0..self.mesh.len()).map(|i| state.column(i)).collect()
        };
        (1..=components)
            .into_par_iter()
            .map(|j| {
                self.sample_points
                    .iter()
                    .zip(&columns)
                    .map(|(&s, col)| spec.eval_component(j, s, col))
                    .collect()
            })
            .collect()
    }

    /// integral_0^T G(t_m, s) f_j(s, v(s)) ds for every component j and
    /// mesh point m.
    pub fn integral(&self, spec: &dyn System, state: &TruncatedState) -> Result<Vec<Vec<f64>>> {
        self.check_state(state)?;
        let fvals = self.sample_f(spec, state);
        Ok(fvals
            .into_par_iter()
            .map(|row| {
                self.coeffs
                    .iter()
                    .map(|c| c.iter().zip(&row).map(|(ci, fi)| ci * fi).sum())
                    .collect()
            })
            .collect())
    }

    /// F applied to a state: the negated integral with boundary columns
    /// pinned to exact zeros.
    pub fn apply(&self, spec: &dyn System, state: &TruncatedState) -> Result<TruncatedState> {
        let integral = self.integral(spec, state)?;
        let last = self.mesh.len() - 1;
        let rows: Vec<Vec<f64>> = integral
            .into_iter()
            .map(|row| {
                let mut out: Vec<f64> = row.into_iter().map(|x| -x).collect();
                out[0] = 0.0;
                out[last] = 0.0;
                out
            })
            .collect();
        TruncatedState::new(self.mesh.clone(), rows)
    }
}

/// One application of the integral operator on the config mesh.
pub fn apply_operator(
    spec: &dyn System,
    kernel: &GreenKernel,
    state: &TruncatedState,
    cfg: &SolverConfig,
) -> Result<TruncatedState> {
    cfg.validate()?;
    if state.components() != cfg.components || state.mesh_points() != cfg.mesh_points {
        return Err(Error::MeshMismatch(format!(
            "state is {}x{} but config asks {}x{}",
            state.components(),
            state.mesh_points(),
            cfg.components,
            cfg.mesh_points
        )));
    }
    let table = OperatorTable::new(kernel, state.mesh(), cfg.quadrature)?;
    table.apply(spec, state)
}

fn delta_sup_norm(a: &TruncatedState, b: &TruncatedState, params: LpParams) -> f64 {
    let mut worst = 0.0f64;
    let mut diff = vec![0.0; a.components()];
    for m in 0..a.mesh_points() {
        for (slot, (ra, rb)) in diff.iter_mut().zip(a.rows().iter().zip(b.rows())) {
            *slot = ra[m] - rb[m];
        }
        worst = worst.max(p_norm(&diff, params));
    }
    worst
}

/// Damped Picard iteration of F from the configured initial state.
///
/// Convergence means the sup-norm distance between successive iterates
/// fell below `tol`. Hitting `max_iter` returns `Error::NoConvergence`
/// with the full trace inside.
pub fn solve(
    spec: &dyn System,
    kernel: &GreenKernel,
    cfg: &SolverConfig,
    params: LpParams,
) -> Result<SolveResult> {
    cfg.validate()?;
    let mesh = uniform_mesh(kernel.t_len(), cfg.mesh_points);
    let table = OperatorTable::new(kernel, &mesh, cfg.quadrature)?;

    let mut warnings = Vec::new();
    if table.interpolated() {
        warnings.push(
            "gauss-legendre rule samples f between mesh points via cubic interpolation of the state"
                .to_string(),
        );
    }

    let mut state = match &cfg.initial {
        Initial::Zero => TruncatedState::zero(mesh.clone(), cfg.components)?,
        Initial::Custom(s) => {
            if s.components() != cfg.components || s.mesh() != &mesh[..] {
                return Err(Error::MeshMismatch(
                    "custom initial state does not match the config grid".into(),
                ));
            }
            s.clone()
        }
    };

    let mut deltas = Vec::new();
    let mut omega = cfg.relaxation;
    let mut growth_streak = 0usize;
    let mut max_sup = sup_norm(&state, params);
    let mut converged = false;
    let mut iterations = 0usize;

    for iter in 1..=cfg.max_iter {
        iterations = iter;
        let image = table.apply(spec, &state)?;
        let next = if omega == 1.0 {
            image
        } else {
            let rows = state
                .rows()
                .iter()
                .zip(image.rows())
                .map(|(old, new)| {
                    old.iter()
                        .zip(new)
                        .map(|(o, n)| (1.0 - omega) * o + omega * n)
                        .collect()
                })
                .collect();
            TruncatedState::new(mesh.clone(), rows)?
        };
        let delta = delta_sup_norm(&next, &state, params);
        if let Some(prev) = deltas.last() {
            if delta > *prev {
                growth_streak += 1;
            } else {
                growth_streak = 0;
            }
        }
        deltas.push(delta);
        state = next;
        max_sup = max_sup.max(sup_norm(&state, params));
        if delta <= cfg.tol {
            converged = true;
            break;
        }
        if growth_streak >= 3 && omega > 0.5 {
            omega = 0.5;
            growth_streak = 0;
            warnings.push(format!(
                "iterate deltas grew 3 times in a row; relaxation reduced to 0.5 at iteration {iter}"
            ));
        }
    }

    let final_sup = sup_norm(&state, params);
    let truncation_error_bound = (0..state.mesh_points())
        .map(|m| {
            let col = state.column(m);
            spec.component_tail_bound(cfg.components, mesh[m], &col)
        })
        .fold(0.0, f64::max);
    let stayed_in_ball = cfg.ball_radius.map(|r| max_sup <= r + 1e-9);
    let last_delta = deltas.last().copied().unwrap_or(0.0);

    let result = SolveResult {
        state,
        system: spec.label().to_string(),
        converged,
        iterations,
        iterate_deltas: deltas,
        sup_norm: final_sup,
        truncation_error_bound,
        stayed_in_ball,
        warnings,
    };

    if converged {
        Ok(result)
    } else {
        Err(Error::NoConvergence {
            iterations,
            last_delta,
            result: Box::new(result),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{ConstantForcing, PaperExample, TableRow, ZeroSystem};
    use std::collections::BTreeMap;

    fn l2() -> LpParams {
        LpParams::new(2.0).unwrap()
    }

    // 1 - tan(1) sin(1) - cos(1), 40-digit arithmetic
    const V_AT_1_T2: f64 = -0.850_815_717_680_925_6;

    #[test]
    fn zero_system_converges_immediately() {
        let kernel = GreenKernel::new(1.0).unwrap();
        let cfg = SolverConfig::new(4, 21);
        let result = solve(&ZeroSystem, &kernel, &cfg, l2()).unwrap();
        assert!(result.converged);
        assert_eq!(result.iterations, 1);
        assert_eq!(result.sup_norm, 0.0);
        assert!(result
            .state
            .rows()
            .iter()
            .all(|row| row.iter().all(|&x| x == 0.0)));
    }

    #[test]
    fn constant_forcing_matches_closed_form() {
        let kernel = GreenKernel::new(2.0).unwrap();
        let cfg = SolverConfig::new(1, 401);
        let result = solve(&ConstantForcing, &kernel, &cfg, l2()).unwrap();
        assert!(result.converged);
        assert!(result.iterations <= 2, "F is constant in v");
        // value at t = 1 (mesh index 200)
        let got = result.state.value(1, 200);
        assert!(
            (got - V_AT_1_T2).abs() < 1e-6,
            "got {got}, expected {V_AT_1_T2}"
        );
        // whole trajectory against the closed form
        let worst = result
            .state
            .mesh()
            .iter()
            .enumerate()
            .map(|(m, &t)| {
                (result.state.value(1, m) - ConstantForcing::exact_solution(t, 2.0)).abs()
            })
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-6, "sup error {worst}");
    }

    #[test]
    fn boundary_columns_are_exact_zeros() {
        let kernel = GreenKernel::new(1.0).unwrap();
        let cfg = SolverConfig::new(6, 41);
        let result = solve(&PaperExample::new(), &kernel, &cfg, l2()).unwrap();
        let last = cfg.mesh_points - 1;
        for j in 1..=cfg.components {
            assert_eq!(result.state.value(j, 0), 0.0);
            assert_eq!(result.state.value(j, last), 0.0);
        }
    }

    #[test]
    fn operator_is_linear_in_affine_forcing() {
        // scaling the forcing scales the image for affine-in-f systems
        let rows = BTreeMap::from([(
            1usize,
            TableRow {
                constant: 0.7,
                ..Default::default()
            },
        )]);
        let envelopes = BTreeMap::from([(1usize, (1.0, 0.0))]);
        let single = crate::system::CoefficientTable::new("single", rows, envelopes.clone());
        let rows2 = BTreeMap::from([(
            1usize,
            TableRow {
                constant: 2.0 * 0.7,
                ..Default::default()
            },
        )]);
        let doubled = crate::system::CoefficientTable::new("doubled", rows2, envelopes);

        let kernel = GreenKernel::new(1.5).unwrap();
        let cfg = SolverConfig::new(1, 31);
        let zero = TruncatedState::zero(uniform_mesh(1.5, 31), 1).unwrap();
        let a = apply_operator(&single, &kernel, &zero, &cfg).unwrap();
        let b = apply_operator(&doubled, &kernel, &zero, &cfg).unwrap();
        for m in 0..31 {
            assert!((2.0 * a.value(1, m) - b.value(1, m)).abs() < 1e-14);
        }
    }

    #[test]
    fn solve_is_deterministic() {
        let kernel = GreenKernel::new(1.0).unwrap();
        let cfg = SolverConfig::new(8, 51);
        let sys = PaperExample::new();
        let a = solve(&sys, &kernel, &cfg, l2()).unwrap();
        let b = solve(&sys, &kernel, &cfg, l2()).unwrap();
        assert_eq!(a.iterations, b.iterations);
        assert_eq!(a.iterate_deltas, b.iterate_deltas);
        assert_eq!(a.state.rows(), b.state.rows());
    }

    #[test]
    fn gauss_rule_agrees_with_simpson_and_warns() {
        let kernel = GreenKernel::new(2.0).unwrap();
        let mut cfg = SolverConfig::new(1, 201);
        let simpson = solve(&ConstantForcing, &kernel, &cfg, l2()).unwrap();
        cfg.quadrature = QuadratureRule::GaussLegendre { order: 4 };
        let gauss = solve(&ConstantForcing, &kernel, &cfg, l2()).unwrap();
        assert!(gauss.warnings.iter().any(|w| w.contains("interpolation")));
        for m in 0..201 {
            assert!((simpson.state.value(1, m) - gauss.state.value(1, m)).abs() < 1e-6);
        }
    }

    #[test]
    fn no_convergence_carries_trace() {
        let kernel = GreenKernel::new(1.0).unwrap();
        let mut cfg = SolverConfig::new(4, 21);
        cfg.max_iter = 2;
        cfg.tol = 1e-16;
        let err = solve(&PaperExample::new(), &kernel, &cfg, l2()).unwrap_err();
        match err {
            Error::NoConvergence {
                iterations, result, ..
            } => {
                assert_eq!(iterations, 2);
                assert!(!result.converged);
                assert_eq!(result.iterate_deltas.len(), 2);
            }
            other => panic!("expected NoConvergence, got {other}"),
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = SolverConfig::new(0, 21);
        assert!(cfg.validate().is_err());
        cfg.components = 1;
        cfg.mesh_points = 20;
        assert!(cfg.validate().is_err(), "even M rejected");
        cfg.mesh_points = 21;
        cfg.relaxation = 1.5;
        assert!(cfg.validate().is_err());
        cfg.relaxation = 0.5;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn mesh_mismatch_rejected() {
        let kernel = GreenKernel::new(1.0).unwrap();
        let cfg = SolverConfig::new(2, 21);
        let wrong = TruncatedState::zero(uniform_mesh(1.0, 31), 2).unwrap();
        assert!(matches!(
            apply_operator(&ZeroSystem, &kernel, &wrong, &cfg),
            Err(Error::MeshMismatch(_))
        ));
        let wrong_span = TruncatedState::zero(uniform_mesh(2.0, 21), 2).unwrap();
        assert!(matches!(
            apply_operator(&ZeroSystem, &kernel, &wrong_span, &cfg),
            Err(Error::MeshMismatch(_))
        ));
    }

    #[test]
    fn ball_tracking_reported() {
        let kernel = GreenKernel::new(1.0).unwrap();
        let mut cfg = SolverConfig::new(6, 41);
        cfg.ball_radius = Some(0.7378);
        let result = solve(&PaperExample::new(), &kernel, &cfg, l2()).unwrap();
        assert_eq!(result.stayed_in_ball, Some(true));
        cfg.ball_radius = Some(1e-6);
        let tight = solve(&PaperExample::new(), &kernel, &cfg, l2()).unwrap();
        assert_eq!(tight.stayed_in_ball, Some(false));
    }
}
