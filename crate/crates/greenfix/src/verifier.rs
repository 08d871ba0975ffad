//! Independent checks that a solved state is a genuine solution and that
//! the operator estimates used by the existence argument hold on the
//! discrete problem.
//!
//! Two residual routes: a central second difference (order h^2, fully
//! independent of the solver), and the analytic route that differentiates
//! the integral representation twice, where the only error left is
//! quadrature. The tail-contraction and equicontinuity checks probe the
//! operator on seeded random families inside the invariant ball.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis;
use crate::kernel::GreenKernel;
use crate::seqspace::{family_mnc, p_norm, sup_norm, LpParams, TruncatedState};
use crate::solver::{uniform_mesh, OperatorTable, SolverConfig};
use crate::system::System;

/// Worst pointwise residual of v'' + v - f(t, v) plus boundary sizes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    /// 1-based component of the worst residual.
    pub worst_component: usize,
    /// Mesh index of the worst residual.
    pub worst_index: usize,
    pub worst_time: f64,
    pub boundary_max: f64,
}

fn boundary_max(state: &TruncatedState) -> f64 {
    let last = state.mesh_points() - 1;
    state
        .rows()
        .iter()
        .map(|row| row[0].abs().max(row[last].abs()))
        .fold(0.0, f64::max)
}

/// Residual via central second differences at interior mesh points.
pub fn residual_fd(state: &TruncatedState, spec: &dyn System) -> ResidualReport {
    let mesh = state.mesh();
    let m_pts = state.mesh_points();
    let columns: Vec<Vec<f64>> = (0..m_pts).map(|m| state.column(m)).collect();
    let mut worst = (0.0f64, 1usize, 0usize);
    for (j0, row) in state.rows().iter().enumerate() {
        for m in 1..m_pts - 1 {
            let h1 = mesh[m] - mesh[m - 1];
            let h2 = mesh[m + 1] - mesh[m];
            let d2 = 2.0 * (h2 * row[m - 1] - (h1 + h2) * row[m] + h1 * row[m + 1])
                / (h1 * h2 * (h1 + h2));
            let f = spec.eval_component(j0 + 1, mesh[m], &columns[m]);
            let r = (d2 + row[m] - f).abs();
            if r > worst.0 {
                worst = (r, j0 + 1, m);
            }
        }
    }
    ResidualReport {
        max_residual: worst.0,
        worst_component: worst.1,
        worst_index: worst.2,
        worst_time: mesh[worst.2],
        boundary_max: boundary_max(state),
    }
}

/// Second derivative of the operator image F(state), evaluated through
/// the differentiated integral representation: the kernel contributes
/// -G under the integral and a diagonal jump that collapses to f(t, v(t)).
/// Both pieces are evaluated by quadrature/trigonometry, not differences.
pub fn second_derivative_of_image(
    spec: &dyn System,
    kernel: &GreenKernel,
    state: &TruncatedState,
    rule: crate::quadrature::QuadratureRule,
) -> Result<Vec<Vec<f64>>> {
    let table = OperatorTable::new(kernel, state.mesh(), rule)?;
    second_derivative_with_table(spec, kernel, state, &table)
}

fn second_derivative_with_table(
    spec: &dyn System,
    kernel: &GreenKernel,
    state: &TruncatedState,
    table: &OperatorTable,
) -> Result<Vec<Vec<f64>>> {
    let integral = table.integral(spec, state)?;
    let mesh = state.mesh();
    let columns: Vec<Vec<f64>> = (0..state.mesh_points()).map(|m| state.column(m)).collect();
    Ok(integral
        .into_iter()
        .enumerate()
        .map(|(j0, int_row)| {
            int_row
                .iter()
                .enumerate()
                .map(|(m, &int_val)| {
                    let t = mesh[m];
                    let jump = kernel.jump_factor(t);
                    jump * spec.eval_component(j0 + 1, t, &columns[m]) + int_val
                })
                .collect()
        })
        .collect())
}

/// Residual via the analytic derivative formulas. For a state v this
/// evaluates |(Fv)'' + v - f(t, v)| with (Fv)'' from the integral
/// representation; when v is a fixed point this is the ODE residual and
/// is limited by quadrature error and the iteration tolerance only.
pub fn residual_analytic(
    state: &TruncatedState,
    spec: &dyn System,
    kernel: &GreenKernel,
    rule: crate::quadrature::QuadratureRule,
) -> Result<ResidualReport> {
    let second = second_derivative_of_image(spec, kernel, state, rule)?;
    let mesh = state.mesh();
    let columns: Vec<Vec<f64>> = (0..state.mesh_points()).map(|m| state.column(m)).collect();
    let mut worst = (0.0f64, 1usize, 0usize);
    for (j0, row) in second.iter().enumerate() {
        for (m, &d2) in row.iter().enumerate() {
            let f = spec.eval_component(j0 + 1, mesh[m], &columns[m]);
            let r = (d2 + state.rows()[j0][m] - f).abs();
            if r > worst.0 {
                worst = (r, j0 + 1, m);
            }
        }
    }
    Ok(ResidualReport {
        max_residual: worst.0,
        worst_component: worst.1,
        worst_index: worst.2,
        worst_time: mesh[worst.2],
        boundary_max: boundary_max(state),
    })
}

/// Draw a trajectory in the ball of the given radius: component
/// amplitudes decay like 0.7^j so families have nontrivial tails, time
/// profiles are low-frequency sinusoids, and the whole state is rescaled
/// to a uniform-random fraction of the radius.
pub fn random_state_in_ball(
    rng: &mut ChaCha8Rng,
    mesh: &[f64],
    components: usize,
    radius: f64,
    params: LpParams,
) -> Result<TruncatedState> {
    let t_len = mesh[mesh.len() - 1];
    let decay: f64 = 0.7;
    let mut rows = Vec::with_capacity(components);
    for j in 1..=components {
        let amp = decay.powi(j as i32) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let freq = if rng.gen::<bool>() { 1.0 } else { 2.0 };
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        let omega = freq * std::f64::consts::PI / t_len;
        rows.push(
            mesh.iter()
                .map(|&t| amp * (omega * t + phase).sin())
                .collect::<Vec<f64>>(),
        );
    }
    let state = TruncatedState::new(mesh.to_vec(), rows)?;
    let current = sup_norm(&state, params);
    let target = radius * rng.gen_range(0.05..=1.0);
    let scale = if current > 0.0 { target / current } else { 0.0 };
    let rows = state
        .rows()
        .iter()
        .map(|row| row.iter().map(|&x| scale * x).collect())
        .collect();
    TruncatedState::new(mesh.to_vec(), rows)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MncEntry {
    pub cutoff: usize,
    /// tail_n(F E)^p
    pub lhs: f64,
    /// (T tan(T/2) / 2)^p (Gbar_n + H tail_n(E)^p)
    pub rhs: f64,
    /// rhs - lhs; the check passes while this stays above -slack.
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MncReport {
    pub family_size: usize,
    pub entries: Vec<MncEntry>,
    pub worst_margin: f64,
}

/// Tail-contraction check: draws a family E in the ball and verifies the
/// pre-supremum inequality
/// `tail_n(F E)^p <= (T tan(T/2)/2)^p [Gbar_n + H tail_n(E)^p]`
/// for every cutoff n in the range, with Gbar_n the analytic envelope
/// tail bound.
pub fn mnc_contraction_check(
    spec: &dyn System,
    kernel: &GreenKernel,
    cfg: &SolverConfig,
    params: LpParams,
    family_size: usize,
    cutoffs: std::ops::RangeInclusive<usize>,
    radius: f64,
    seed: u64,
) -> Result<MncReport> {
    cfg.validate()?;
    if family_size == 0 {
        return Err(Error::EmptyFamily);
    }
    let t_len = kernel.t_len();
    let mesh = uniform_mesh(t_len, cfg.mesh_points);
    let table = OperatorTable::new(kernel, &mesh, cfg.quadrature)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let family: Vec<TruncatedState> = (0..family_size)
        .map(|_| random_state_in_ball(&mut rng, &mesh, cfg.components, radius, params))
        .collect::<Result<_>>()?;
    let images: Vec<TruncatedState> = family
        .iter()
        .map(|state| table.apply(spec, state))
        .collect::<Result<_>>()?;

    let h_sup = hypothesis::compute_constants(spec, t_len, params, cfg.components, 201).h_sup;
    let p = params.p();
    let factor = (0.5 * t_len * (0.5 * t_len).tan()).powf(p);

    let mut entries = Vec::new();
    let mut worst = f64::INFINITY;
    for n in cutoffs {
        let lhs = family_mnc(&images, params, n)?.powf(p);
        let tail_e = family_mnc(&family, params, n)?;
        let rhs = factor * (spec.g_tail_bound(n, t_len) + h_sup * tail_e.powf(p));
        let margin = rhs - lhs;
        worst = worst.min(margin);
        entries.push(MncEntry {
            cutoff: n,
            lhs,
            rhs,
            margin,
        });
    }
    Ok(MncReport {
        family_size,
        entries,
        worst_margin: worst,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquicontinuityEntry {
    pub eps: f64,
    /// max over sampled pairs of sup_t ||F(u)(t) - F(v)(t)||_p with
    /// ||u - v|| = eps.
    pub modulus: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquicontinuityReport {
    pub entries: Vec<EquicontinuityEntry>,
    /// Whether the measured modulus is nonincreasing as eps shrinks.
    pub vanishing: bool,
}

/// Probe the modulus of continuity of F on the ball: perturb random
/// states by each eps and measure how far the images move.
pub fn equicontinuity_probe(
    spec: &dyn System,
    kernel: &GreenKernel,
    cfg: &SolverConfig,
    params: LpParams,
    eps_list: &[f64],
    pairs_per_eps: usize,
    radius: f64,
    seed: u64,
) -> Result<EquicontinuityReport> {
    cfg.validate()?;
    let mesh = uniform_mesh(kernel.t_len(), cfg.mesh_points);
    let table = OperatorTable::new(kernel, &mesh, cfg.quadrature)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut eps_sorted: Vec<f64> = eps_list.to_vec();
    eps_sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());

    let mut entries = Vec::new();
    for &eps in &eps_sorted {
        let mut modulus = 0.0f64;
        for _ in 0..pairs_per_eps.max(1) {
            let base = random_state_in_ball(&mut rng, &mesh, cfg.components, radius, params)?;
            let dir = random_state_in_ball(&mut rng, &mesh, cfg.components, 1.0, params)?;
            let dir_norm = sup_norm(&dir, params);
            let rows = base
                .rows()
                .iter()
                .zip(dir.rows())
                .map(|(b, d)| {
                    b.iter()
                        .zip(d)
                        .map(|(x, y)| x + eps * y / dir_norm)
                        .collect()
                })
                .collect();
            let perturbed = TruncatedState::new(mesh.clone(), rows)?;
            let fu = table.apply(spec, &perturbed)?;
            let fv = table.apply(spec, &base)?;
            let mut dist = 0.0f64;
            let mut diff = vec![0.0; cfg.components];
            for m in 0..mesh.len() {
                for (slot, (ru, rv)) in diff.iter_mut().zip(fu.rows().iter().zip(fv.rows())) {
                    *slot = ru[m] - rv[m];
                }
                dist = dist.max(p_norm(&diff, params));
            }
            modulus = modulus.max(dist);
        }
        entries.push(EquicontinuityEntry { eps, modulus });
    }
    let vanishing = entries
        .windows(2)
        .all(|w| w[1].modulus <= w[0].modulus + 1e-12);
    Ok(EquicontinuityReport { entries, vanishing })
}

/// Thresholds for the full verification pass; defaults match the
/// built-in oracle problems.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyThresholds {
    pub residual_fd_max: f64,
    pub residual_analytic_max: f64,
    pub boundary_max: f64,
    pub mnc_slack: f64,
    pub ball_slack: f64,
    pub family_size: usize,
    pub equicontinuity_eps: Vec<f64>,
    pub pairs_per_eps: usize,
}

impl Default for VerifyThresholds {
    fn default() -> Self {
        Self {
            residual_fd_max: 1e-3,
            residual_analytic_max: 1e-6,
            boundary_max: 1e-12,
            mnc_slack: 1e-6,
            ball_slack: 1e-6,
            family_size: 8,
            equicontinuity_eps: vec![1e-1, 1e-2, 1e-3],
            pairs_per_eps: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub residual_fd: ResidualReport,
    pub residual_analytic: ResidualReport,
    pub boundary_max: f64,
    /// Whether the state lies in the invariant ball and its image stays
    /// there; absent when no radius is defined.
    pub ball_invariance: Option<bool>,
    pub contraction_margins: Vec<f64>,
    pub equicontinuity: Vec<EquicontinuityEntry>,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Run every verifier check against a state.
#[allow(clippy::too_many_arguments)]
pub fn run_all(
    spec: &dyn System,
    kernel: &GreenKernel,
    cfg: &SolverConfig,
    params: LpParams,
    state: &TruncatedState,
    radius: Option<f64>,
    thresholds: &VerifyThresholds,
    seed: u64,
) -> Result<VerificationReport> {
    let mut failures = Vec::new();

    let fd = residual_fd(state, spec);
    if fd.max_residual > thresholds.residual_fd_max {
        failures.push(format!(
            "residual_fd {:.3e} exceeds {:.3e} at component {} mesh index {}",
            fd.max_residual, thresholds.residual_fd_max, fd.worst_component, fd.worst_index
        ));
    }

    let analytic = residual_analytic(state, spec, kernel, cfg.quadrature)?;
    if analytic.max_residual > thresholds.residual_analytic_max {
        failures.push(format!(
            "residual_analytic {:.3e} exceeds {:.3e} at component {} mesh index {}",
            analytic.max_residual,
            thresholds.residual_analytic_max,
            analytic.worst_component,
            analytic.worst_index
        ));
    }

    let boundary = fd.boundary_max;
    if boundary > thresholds.boundary_max {
        failures.push(format!(
            "boundary values reach {boundary:.3e}, threshold {:.3e}",
            thresholds.boundary_max
        ));
    }

    let mut ball_invariance = None;
    let mut contraction_margins = Vec::new();
    if let Some(r) = radius {
        let table = OperatorTable::new(kernel, state.mesh(), cfg.quadrature)?;
        let in_ball = sup_norm(state, params) <= r + thresholds.ball_slack;
        let image_in_ball =
            sup_norm(&table.apply(spec, state)?, params) <= r + thresholds.ball_slack;
        let ok = in_ball && image_in_ball;
        ball_invariance = Some(ok);
        if !ok {
            failures.push("state or its image escapes the invariant ball".to_string());
        }

        let cutoff_hi = cfg.components.min(15);
        let mnc = mnc_contraction_check(
            spec,
            kernel,
            cfg,
            params,
            thresholds.family_size,
            1..=cutoff_hi,
            r,
            seed,
        )?;
        contraction_margins = mnc.entries.iter().map(|e| e.margin).collect();
        if mnc.worst_margin < -thresholds.mnc_slack {
            failures.push(format!(
                "tail-contraction margin {:.3e} below -{:.3e}",
                mnc.worst_margin, thresholds.mnc_slack
            ));
        }
    }

    let equicontinuity = if radius.is_some() {
        let probe = equicontinuity_probe(
            spec,
            kernel,
            cfg,
            params,
            &thresholds.equicontinuity_eps,
            thresholds.pairs_per_eps,
            radius.unwrap_or(1.0),
            seed.wrapping_add(1),
        )?;
        if !probe.vanishing {
            failures.push("equicontinuity modulus did not shrink with eps".to_string());
        }
        probe.entries
    } else {
        Vec::new()
    };

    Ok(VerificationReport {
        residual_fd: fd,
        residual_analytic: analytic,
        boundary_max: boundary,
        ball_invariance,
        contraction_margins,
        equicontinuity,
        passed: failures.is_empty(),
        failures,
    })
}
