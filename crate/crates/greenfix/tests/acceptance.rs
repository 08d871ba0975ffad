//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Expected values marked "frozen" were computed beforehand with 40-digit
//! arithmetic on the closed forms; the closed forms themselves appear
//! inline as the oracles.

use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use greenfix::hypothesis;
use greenfix::seqspace::{p_norm, sup_norm, LpParams, TruncatedState, TruncatedVec};
use greenfix::solver::{solve, uniform_mesh, OperatorTable, SolverConfig};
use greenfix::state_csv::{read_state_csv, write_state_csv};
use greenfix::system::{envelope_check, ConstantForcing, PaperExample};
use greenfix::verifier::{
    mnc_contraction_check, random_state_in_ball, residual_analytic, residual_fd,
};
use greenfix::{GreenKernel, QuadratureRule, Verdict};

// Frozen 40-digit values.
const H_PAPER: f64 = 0.604_062_628_546_454_5; // 2e/9
const G_MAJ_T1: f64 = 6.967_442_607_091_477; // (2 + pi^2 e/12) pi^2/6
const COND_T1: f64 = 0.424_594_304_191_932_74; // sqrt(2e/9) tan(0.5)
const R_T1: f64 = 0.737_826_303_763_057_6;
const COND_A_T2: f64 = 1.711_820_828_527_483_8; // sqrt(2 * 2e/9) tan(1)
const COND_B_T2: f64 = 2.420_880_232_056_316; // sqrt(2e/9) * 2 tan(1)

struct Criterion {
    id: usize,
    label: &'static str,
    started: Instant,
    failures: Vec<String>,
}

impl Criterion {
    fn new(id: usize, label: &'static str) -> Self {
        Self {
            id,
            label,
            started: Instant::now(),
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }

    fn finish(mut self, budget_seconds: f64) {
        let elapsed = self.started.elapsed().as_secs_f64();
        if elapsed > budget_seconds {
            self.failures.push(format!(
                "runtime {elapsed:.2}s exceeds budget {budget_seconds}s"
            ));
        }
        let verdict = if self.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!(
            "acceptance {} [{}] {} ({elapsed:.2}s)",
            self.id, self.label, verdict
        );
        for f in &self.failures {
            println!("    - {f}");
        }
        assert!(
            self.failures.is_empty(),
            "criterion {} failed: {:?}",
            self.id,
            self.failures
        );
    }
}

fn l2() -> LpParams {
    LpParams::new(2.0).unwrap()
}

#[test]
fn criterion_1_kernel_suite() {
    let mut c = Criterion::new(1, "kernel suite");
    let n = 201;
    for t_len in [0.5f64, 1.0, 2.0] {
        let k = GreenKernel::new(t_len).unwrap();
        let bound = k.bound();
        let grid: Vec<f64> = (0..n)
            .map(|i| t_len * i as f64 / (n - 1) as f64)
            .collect();

        let mut max_sym = 0.0f64;
        let mut min_val = f64::INFINITY;
        let mut max_val = f64::NEG_INFINITY;
        for &t in &grid {
            for &s in &grid {
                let g = k.eval(t, s).unwrap();
                max_sym = max_sym.max((g - k.eval(s, t).unwrap()).abs());
                min_val = min_val.min(g);
                max_val = max_val.max(g);
            }
        }
        c.check(max_sym <= 1e-15, || {
            format!("T={t_len}: symmetry defect {max_sym:e}")
        });
        c.check(min_val >= 0.0, || format!("T={t_len}: negative value {min_val:e}"));
        c.check(max_val <= bound + 1e-15, || {
            format!("T={t_len}: {max_val} exceeds bound {bound}")
        });

        let mut boundary_exact = true;
        for &x in &grid {
            boundary_exact &= k.eval(0.0, x).unwrap() == 0.0
                && k.eval(t_len, x).unwrap() == 0.0
                && k.eval(x, 0.0).unwrap() == 0.0
                && k.eval(x, t_len).unwrap() == 0.0;
        }
        c.check(boundary_exact, || {
            format!("T={t_len}: boundary rows not exactly zero")
        });

        let mid = 0.5 * t_len;
        let diag = k.eval(mid, mid).unwrap();
        c.check((diag - bound).abs() <= 1e-15, || {
            format!("T={t_len}: diagonal midpoint {diag} vs bound {bound}")
        });

        let mut max_jump_err = 0.0f64;
        for &s in &grid[1..n - 1] {
            let jump = k.dt_onesided(s, s, greenfix::Side::Above).unwrap()
                - k.dt_onesided(s, s, greenfix::Side::Below).unwrap();
            max_jump_err = max_jump_err.max((jump + 1.0).abs());
        }
        c.check(max_jump_err <= 1e-12, || {
            format!("T={t_len}: jump defect {max_jump_err:e}")
        });
    }
    c.finish(1.0);
}

fn constant_forcing_sup_error(mesh_points: usize) -> f64 {
    let kernel = GreenKernel::new(2.0).unwrap();
    let cfg = SolverConfig::new(1, mesh_points);
    let result = solve(&ConstantForcing, &kernel, &cfg, l2()).unwrap();
    result
        .state
        .mesh()
        .iter()
        .enumerate()
        .map(|(m, &t)| (result.state.value(1, m) - ConstantForcing::exact_solution(t, 2.0)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn criterion_2_closed_form_oracle() {
    let mut c = Criterion::new(2, "closed-form oracle");
    let kernel = GreenKernel::new(2.0).unwrap();
    let cfg = SolverConfig::new(1, 401);
    let result = solve(&ConstantForcing, &kernel, &cfg, l2()).unwrap();

    let err_401 = constant_forcing_sup_error(401);
    c.check(err_401 <= 1e-6, || {
        format!("sup error at M=401 is {err_401:e}")
    });

    let analytic = residual_analytic(
        &result.state,
        &ConstantForcing,
        &kernel,
        QuadratureRule::Simpson,
    )
    .unwrap();
    c.check(analytic.max_residual <= 1e-8, || {
        format!("analytic residual {:e}", analytic.max_residual)
    });

    let err_201 = constant_forcing_sup_error(201);
    let ratio = err_201 / err_401;
    c.check(ratio >= 12.0, || {
        format!("refinement 201->401 improved error only {ratio:.1}x ({err_201:e} -> {err_401:e})")
    });
    c.finish(1.0);
}

#[test]
fn criterion_3_hypothesis_constants() {
    let mut c = Criterion::new(3, "hypothesis constants");
    let sys = PaperExample::new();

    let at_t1 = hypothesis::evaluate(&sys, 1.0, l2(), 15, 201);
    c.check((at_t1.h_sup - H_PAPER).abs() <= 1e-12, || {
        format!("H = {} vs 2e/9 = {H_PAPER}", at_t1.h_sup)
    });
    let g_maj = at_t1.g_majorant.unwrap_or(f64::NAN);
    c.check((g_maj - G_MAJ_T1).abs() <= 1e-5, || {
        format!("G_majorant = {g_maj} vs {G_MAJ_T1}")
    });
    c.check((at_t1.cond_a - COND_T1).abs() <= 1e-5, || {
        format!("cond_A(T=1) = {} vs {COND_T1}", at_t1.cond_a)
    });
    c.check((at_t1.cond_b - COND_T1).abs() <= 1e-5, || {
        format!("cond_B(T=1) = {} vs {COND_T1}", at_t1.cond_b)
    });
    c.check((at_t1.cond_a - at_t1.cond_b).abs() <= 1e-12, || {
        "cond_A and cond_B must coincide at T = 1".to_string()
    });
    let r = at_t1.r.unwrap_or(f64::NAN);
    c.check((r - R_T1).abs() <= 1e-5, || format!("r(T=1) = {r} vs {R_T1}"));
    c.check(at_t1.verdict == Verdict::Guaranteed, || {
        format!("verdict at T=1 is {}", at_t1.verdict)
    });

    let at_t2 = hypothesis::evaluate(&sys, 2.0, l2(), 15, 201);
    c.check((at_t2.cond_a - COND_A_T2).abs() <= 1e-5, || {
        format!("cond_A(T=2) = {} vs {COND_A_T2}", at_t2.cond_a)
    });
    c.check(at_t2.cond_a < 2.0, || {
        "stated condition must pass at T = 2".to_string()
    });
    c.check((at_t2.cond_b - COND_B_T2).abs() <= 1e-5, || {
        format!("cond_B(T=2) = {} vs {COND_B_T2}", at_t2.cond_b)
    });
    c.check(at_t2.cond_b > 2.0, || {
        "strict condition must fail at T = 2".to_string()
    });
    c.check(at_t2.r.is_none(), || {
        "radius must be undefined at T = 2".to_string()
    });
    c.check(at_t2.verdict == Verdict::StatedConditionOnly, || {
        format!("verdict at T=2 is {}", at_t2.verdict)
    });
    c.finish(5.0);
}

#[test]
fn criterion_4_paper_example_solve() {
    let mut c = Criterion::new(4, "paper-example solve");
    let sys = PaperExample::new();
    let kernel = GreenKernel::new(1.0).unwrap();
    let params = l2();
    let hyp = hypothesis::evaluate(&sys, 1.0, params, 15, 201);
    let r = hyp.r.expect("radius defined at T = 1");

    let mut cfg = SolverConfig::new(15, 201);
    cfg.ball_radius = Some(r);
    let result = solve(&sys, &kernel, &cfg, params).unwrap();
    c.check(result.converged && result.iterations <= 200, || {
        format!("no convergence within 200 iterations ({})", result.iterations)
    });
    let last_delta = result.iterate_deltas.last().copied().unwrap_or(f64::NAN);
    c.check(last_delta <= 1e-10, || format!("final delta {last_delta:e}"));

    let fd = residual_fd(&result.state, &sys);
    c.check(fd.boundary_max <= 1e-14, || {
        format!("boundary magnitude {:e}", fd.boundary_max)
    });
    c.check(fd.max_residual <= 1e-3, || {
        format!("fd residual {:e}", fd.max_residual)
    });

    c.check(result.sup_norm <= r, || {
        format!("sup norm {} exceeds r = {r}", result.sup_norm)
    });
    c.check(result.stayed_in_ball == Some(true), || {
        "iterates left the invariant ball".to_string()
    });

    // mesh refinement: the fd residual must shrink at least 3.5x at M=801
    let cfg_fine = SolverConfig::new(15, 801);
    let fine = solve(&sys, &kernel, &cfg_fine, params).unwrap();
    let fd_fine = residual_fd(&fine.state, &sys);
    let shrink = fd.max_residual / fd_fine.max_residual;
    c.check(shrink >= 3.5, || {
        format!(
            "fd residual shrank only {shrink:.2}x ({:e} -> {:e})",
            fd.max_residual, fd_fine.max_residual
        )
    });

    // tail honesty: doubling J moves the retained components < 1e-6
    let cfg_wide = SolverConfig::new(30, 201);
    let wide = solve(&sys, &kernel, &cfg_wide, params).unwrap();
    let mut diff = 0.0f64;
    for m in 0..201 {
        let col: Vec<f64> = (1..=15)
            .map(|j| result.state.value(j, m) - wide.state.value(j, m))
            .collect();
        diff = diff.max(p_norm(&col, params));
    }
    c.check(diff <= 1e-6, || {
        format!("J 15->30 moved the solution by {diff:e}")
    });
    c.finish(10.0);
}

#[test]
fn criterion_5_operator_norm_bound() {
    let mut c = Criterion::new(5, "operator norm bound");
    let sys = PaperExample::new();
    let params = l2();
    for t_len in [0.5f64, 1.0] {
        let kernel = GreenKernel::new(t_len).unwrap();
        let hyp = hypothesis::evaluate(&sys, t_len, params, 15, 201);
        let g = hyp.g_majorant.unwrap();
        let h = hyp.h_sup;
        let r = hyp.r.expect("radius defined");
        let mesh = uniform_mesh(t_len, 201);
        let table = OperatorTable::new(&kernel, &mesh, QuadratureRule::Simpson).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2026);
        let factor = 0.5 * t_len * (0.5 * t_len).tan();
        for i in 0..100 {
            let state = random_state_in_ball(&mut rng, &mesh, 15, r, params).unwrap();
            let image = table.apply(&sys, &state).unwrap();
            let sv = sup_norm(&state, params);
            let si = sup_norm(&image, params);
            let bound = factor * (g + h * sv * sv).sqrt();
            c.check(si <= bound + 1e-6, || {
                format!("T={t_len} state {i}: ||F v|| = {si} > bound {bound}")
            });
            c.check(si <= r + 1e-6, || {
                format!("T={t_len} state {i}: image escaped the ball ({si} > {r})")
            });
        }
    }
    c.finish(30.0);
}

#[test]
fn criterion_6_mnc_tail_contraction() {
    let mut c = Criterion::new(6, "tail contraction");
    let sys = PaperExample::new();
    let kernel = GreenKernel::new(1.0).unwrap();
    let params = l2();
    let hyp = hypothesis::evaluate(&sys, 1.0, params, 15, 201);
    let r = hyp.r.unwrap();
    let cfg = SolverConfig::new(15, 201);
    let mut worst = f64::INFINITY;
    for seed in 0..50u64 {
        let report =
            mnc_contraction_check(&sys, &kernel, &cfg, params, 6, 1..=15, r, seed).unwrap();
        worst = worst.min(report.worst_margin);
        c.check(report.worst_margin >= -1e-6, || {
            format!("family seed {seed}: margin {:e}", report.worst_margin)
        });
    }
    println!("    worst margin over 50 families: {worst:e}");
    c.finish(60.0);
}

#[test]
fn criterion_7_envelope_audit() {
    let mut c = Criterion::new(7, "envelope audit");
    let sys = PaperExample::new();
    let params = l2();
    let components = 15;
    let t_len = 1.0;
    let hyp = hypothesis::evaluate(&sys, t_len, params, components, 201);
    let r = hyp.r.unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(7_777);
    let mut samples = Vec::with_capacity(10_000);
    for _ in 0..10_000 {
        let t = rng.gen_range(0.0..=t_len);
        let raw: Vec<f64> = (1..=components)
            .map(|j| {
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                sign * 0.7f64.powi(j as i32) * rng.gen_range(0.0..=1.0)
            })
            .collect();
        let norm = p_norm(&raw, params);
        let target = r * rng.gen_range(0.0..=1.0);
        let scale = if norm > 0.0 { target / norm } else { 0.0 };
        let v: Vec<f64> = raw.iter().map(|x| scale * x).collect();
        samples.push((t, TruncatedVec::new(v).unwrap()));
    }
    let report = envelope_check(&sys, &samples, params);
    c.check(report.violations.is_empty(), || {
        format!(
            "{} violations out of {} checks; worst margin {:e}",
            report.violations.len(),
            report.samples_checked,
            report.worst.as_ref().map(|w| w.margin).unwrap_or(f64::NAN)
        )
    });
    c.finish(30.0);
}

// -------------------------------------------------------------------
// criterion 8: CLI round trip and exit codes
// -------------------------------------------------------------------

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_greenfix"))
}

fn write_config(dir: &std::path::Path, name: &str, contents: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

/// Minimal JSON-schema check: type/required/properties/items/enum/$ref
/// against #/definitions, enough for the shipped report schemas.
fn validate_schema(
    value: &serde_json::Value,
    schema: &serde_json::Value,
    root: &serde_json::Value,
    path: String,
    errors: &mut Vec<String>,
) {
    use serde_json::Value;
    if let Some(reference) = schema.get("$ref").and_then(Value::as_str) {
        let resolved = reference
            .strip_prefix("#/")
            .map(|p| {
                p.split('/').fold(root, |acc, key| {
                    acc.get(key).unwrap_or(&serde_json::Value::Null)
                })
            })
            .unwrap_or(&serde_json::Value::Null);
        validate_schema(value, resolved, root, path, errors);
        return;
    }
    if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
        if !allowed.contains(value) {
            errors.push(format!("{path}: {value} not in enum"));
        }
        return;
    }
    let type_ok = |name: &str, v: &Value| match name {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        _ => false,
    };
    match schema.get("type") {
        Some(Value::String(name)) => {
            if !type_ok(name, value) {
                errors.push(format!("{path}: expected {name}"));
                return;
            }
        }
        Some(Value::Array(names)) => {
            if !names
                .iter()
                .filter_map(Value::as_str)
                .any(|n| type_ok(n, value))
            {
                errors.push(format!("{path}: expected one of {names:?}"));
                return;
            }
        }
        _ => {}
    }
    if let Some(obj) = value.as_object() {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required.iter().filter_map(Value::as_str) {
                if !obj.contains_key(key) {
                    errors.push(format!("{path}: missing required '{key}'"));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        for (key, sub) in obj {
            match props.and_then(|p| p.get(key)) {
                Some(subschema) => {
                    validate_schema(sub, subschema, root, format!("{path}.{key}"), errors)
                }
                None => {
                    if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
                        errors.push(format!("{path}: unexpected property '{key}'"));
                    }
                }
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), value.as_array()) {
        for (i, item) in arr.iter().enumerate() {
            validate_schema(item, items, root, format!("{path}[{i}]"), errors);
        }
    }
}

fn assert_matches_schema(c: &mut Criterion, json_text: &str, schema_file: &str, what: &str) {
    let schema_path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(schema_file);
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    let value: serde_json::Value = match serde_json::from_str(json_text) {
        Ok(v) => v,
        Err(e) => {
            c.check(false, || format!("{what}: output is not JSON: {e}"));
            return;
        }
    };
    let mut errors = Vec::new();
    validate_schema(&value, &schema, &schema, "$".into(), &mut errors);
    c.check(errors.is_empty(), || {
        format!("{what}: schema violations: {errors:?}")
    });
}

#[test]
fn criterion_8_cli_round_trip_and_exit_codes() {
    let mut c = Criterion::new(8, "cli contract");
    let dir = tempfile::tempdir().unwrap();
    let dir_path = dir.path();

    let paper_t1 = write_config(
        dir_path,
        "paper_t1.json",
        r#"{"system": "paper_example", "T": 1.0, "p": 2.0, "J": 15, "M": 201}"#,
    );
    let paper_t2 = write_config(
        dir_path,
        "paper_t2.json",
        r#"{"system": "paper_example", "T": 2.0, "p": 2.0, "J": 15, "M": 201}"#,
    );
    let at_pi = write_config(
        dir_path,
        "at_pi.json",
        &format!(r#"{{"system": "zero", "T": {}}}"#, std::f64::consts::PI),
    );
    let malformed = write_config(dir_path, "malformed.json", r#"{"system": }"#);
    let zero_cfg = write_config(
        dir_path,
        "zero.json",
        r#"{"system": "zero", "T": 1.0, "J": 3, "M": 21}"#,
    );
    let forcing_cfg = write_config(
        dir_path,
        "forcing.json",
        r#"{"system": "constant_forcing", "T": 2.0, "J": 1, "M": 401}"#,
    );

    // check: guaranteed at T = 1
    let out = bin().args(["check", "--config"]).arg(&paper_t1).output().unwrap();
    c.check(out.status.code() == Some(0), || {
        format!("check T=1 exited {:?}", out.status.code())
    });
    let stdout = String::from_utf8_lossy(&out.stdout).to_string();
    assert_matches_schema(&mut c, &stdout, "hypothesis_report.schema.json", "check T=1");
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap_or_default();
    c.check(report["verdict"] == "guaranteed", || {
        format!("check T=1 verdict {}", report["verdict"])
    });

    // check: stated-condition-only at T = 2, radius absent
    let out = bin().args(["check", "--config"]).arg(&paper_t2).output().unwrap();
    c.check(out.status.code() == Some(0), || {
        format!("check T=2 exited {:?}", out.status.code())
    });
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap_or_default();
    c.check(report["verdict"] == "stated-condition-only", || {
        format!("check T=2 verdict {}", report["verdict"])
    });
    c.check(report["r"].is_null(), || {
        format!("check T=2 radius {}", report["r"])
    });

    // check: T = pi is an invalid interval -> exit 4
    let out = bin().args(["check", "--config"]).arg(&at_pi).output().unwrap();
    c.check(out.status.code() == Some(4), || {
        format!("check at T=pi exited {:?}", out.status.code())
    });

    // malformed config -> exit 64
    let out = bin().args(["check", "--config"]).arg(&malformed).output().unwrap();
    c.check(out.status.code() == Some(64), || {
        format!("malformed config exited {:?}", out.status.code())
    });

    // solve zero -> all-zero csv
    let zero_out = dir_path.join("zero_out");
    let out = bin()
        .args(["solve", "--config"])
        .arg(&zero_cfg)
        .arg("--out")
        .arg(&zero_out)
        .output()
        .unwrap();
    c.check(out.status.code() == Some(0), || {
        format!("solve zero exited {:?}", out.status.code())
    });
    let state = read_state_csv(&zero_out.join("state.csv")).unwrap();
    c.check(
        state
            .rows()
            .iter()
            .all(|row| row.iter().all(|&x| x == 0.0)),
        || "zero solve produced nonzero values".to_string(),
    );

    // solve constant forcing and compare to the closed form
    let forcing_out = dir_path.join("forcing_out");
    let out = bin()
        .args(["solve", "--config"])
        .arg(&forcing_cfg)
        .arg("--out")
        .arg(&forcing_out)
        .output()
        .unwrap();
    c.check(out.status.code() == Some(0), || {
        format!("solve constant_forcing exited {:?}", out.status.code())
    });
    assert_matches_schema(
        &mut c,
        &String::from_utf8_lossy(&out.stdout),
        "solve_report.schema.json",
        "solve constant_forcing",
    );
    let state = read_state_csv(&forcing_out.join("state.csv")).unwrap();
    let worst = state
        .mesh()
        .iter()
        .enumerate()
        .map(|(m, &t)| (state.value(1, m) - ConstantForcing::exact_solution(t, 2.0)).abs())
        .fold(0.0f64, f64::max);
    c.check(worst <= 1e-6, || {
        format!("solved csv deviates from closed form by {worst:e}")
    });

    // verify the solved state -> exit 0
    let out = bin()
        .args(["verify", "--config"])
        .arg(&forcing_cfg)
        .arg("--state")
        .arg(forcing_out.join("state.csv"))
        .output()
        .unwrap();
    c.check(out.status.code() == Some(0), || {
        format!("verify solved state exited {:?}", out.status.code())
    });
    assert_matches_schema(
        &mut c,
        &String::from_utf8_lossy(&out.stdout),
        "verify_report.schema.json",
        "verify constant_forcing",
    );

    // corrupt one value by 0.1 -> exit 5, offending location named
    let mut rows = state.rows().to_vec();
    rows[0][140] += 0.1;
    let corrupted = TruncatedState::new(state.mesh().to_vec(), rows).unwrap();
    let corrupted_path = dir_path.join("corrupted.csv");
    write_state_csv(&corrupted_path, &corrupted).unwrap();
    let out = bin()
        .args(["verify", "--config"])
        .arg(&forcing_cfg)
        .arg("--state")
        .arg(&corrupted_path)
        .output()
        .unwrap();
    c.check(out.status.code() == Some(5), || {
        format!("verify corrupted state exited {:?}", out.status.code())
    });
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stdout)).unwrap_or_default();
    c.check(
        report["residual_fd"]["worst_component"] == 1
            && report["residual_fd"]["worst_index"] == 140,
        || {
            format!(
                "corrupted location not named: component {}, index {}",
                report["residual_fd"]["worst_component"], report["residual_fd"]["worst_index"]
            )
        },
    );

    // zero state against the paper example -> exit 5
    let zero_state_path = dir_path.join("zero_state.csv");
    write_state_csv(
        &zero_state_path,
        &TruncatedState::zero(uniform_mesh(1.0, 201), 15).unwrap(),
    )
    .unwrap();
    let out = bin()
        .args(["verify", "--config"])
        .arg(&paper_t1)
        .arg("--state")
        .arg(&zero_state_path)
        .output()
        .unwrap();
    c.check(out.status.code() == Some(5), || {
        format!("verify zero state exited {:?}", out.status.code())
    });

    // full round trip on the paper example
    let paper_out = dir_path.join("paper_out");
    let out = bin()
        .args(["solve", "--config"])
        .arg(&paper_t1)
        .arg("--out")
        .arg(&paper_out)
        .output()
        .unwrap();
    c.check(out.status.code() == Some(0), || {
        format!("solve paper example exited {:?}", out.status.code())
    });
    let out = bin()
        .args(["verify", "--config"])
        .arg(&paper_t1)
        .arg("--state")
        .arg(paper_out.join("state.csv"))
        .output()
        .unwrap();
    c.check(out.status.code() == Some(0), || {
        format!(
            "verify paper example exited {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stdout)
        )
    });

    c.finish(120.0);
}
