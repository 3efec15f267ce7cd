//! Experiment runners: each kind builds its inputs, exercises the library,
//! and produces a deterministic JSON summary plus optional CSV time series.
//!
//! Summaries contain no timestamps (wall-clock data goes to a separate
//! metadata file), so identical configurations and seeds give byte-identical
//! summary output.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use catq_core::dynamics::{evolve_a, evolve_b, expand, BoundaryData, QhPropagator};
use catq_core::maximization::{build_max_pair, dominant_set, oracle_maximize};
use catq_core::models::{
    oscillator_hamiltonian, oscillator_qq_relations, random_nonnormal, triangular_demo,
    OscillatorSpec, RandomSpec,
};
use catq_core::observables::normalized_matrix_element;
use catq_core::probability::{continuity_residual, gaussian_packet, GridWavefunction};
use catq_core::spectral::eigendecompose;
use catq_core::{CMatrix, QMetric, Spectrum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, ExperimentKind, HamiltonianSource};
use crate::matfile;

pub enum RunError {
    /// Configuration or input-file problem: exit code 2.
    Config(String),
    /// Numerical failure while running: exit code 1, summary still written.
    Numerical(String),
}

pub struct ExperimentOutcome {
    pub summary: Value,
    pub pass: bool,
    pub csv_files: Vec<(String, String)>,
}

struct Check {
    name: &'static str,
    value: f64,
    threshold: f64,
    /// true: pass when value <= threshold; false: pass when value > threshold.
    upper_bound: bool,
}

impl Check {
    fn pass(&self) -> bool {
        if self.upper_bound {
            self.value <= self.threshold
        } else {
            self.value > self.threshold
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "value": self.value,
            "threshold": self.threshold,
            "comparison": if self.upper_bound { "<=" } else { ">" },
            "pass": self.pass(),
        })
    }
}

fn finish(kind: ExperimentKind, cfg: &ExperimentConfig, mut fields: Value, checks: &[Check]) -> (Value, bool) {
    let pass = checks.iter().all(Check::pass);
    let obj = fields.as_object_mut().expect("summary fields are an object");
    obj.insert("kind".into(), json!(kind.as_str()));
    obj.insert("seed".into(), json!(cfg.seed));
    obj.insert("t_a".into(), json!(cfg.t_a));
    obj.insert("t_b".into(), json!(cfg.t_b));
    obj.insert("hbar".into(), json!(cfg.hbar));
    obj.insert(
        "checks".into(),
        Value::Array(checks.iter().map(Check::to_json).collect()),
    );
    obj.insert("pass".into(), json!(pass));
    (fields, pass)
}

fn tolerance(cfg: &ExperimentConfig, name: &str, default: f64) -> f64 {
    cfg.tolerances.get(name).copied().unwrap_or(default)
}

fn param(cfg: &ExperimentConfig, name: &str, default: f64) -> f64 {
    cfg.params.get(name).copied().unwrap_or(default)
}

fn numerical(e: catq_core::Error) -> RunError {
    RunError::Numerical(format!("{e}"))
}

/// Build the Hamiltonian for kinds that take a generic source.
fn build_hamiltonian(cfg: &ExperimentConfig) -> Result<CMatrix, RunError> {
    let source = cfg
        .hamiltonian
        .as_ref()
        .ok_or_else(|| RunError::Config("this experiment needs a \"hamiltonian\" source".into()))?;
    match source {
        HamiltonianSource::Random {
            dim,
            im_upper,
            im_spread,
            cond_target,
        } => random_nonnormal(
            &RandomSpec::new(*dim, cfg.seed)
                .with_im_upper(*im_upper)
                .with_im_spread(*im_spread)
                .with_cond_target(*cond_target),
        )
        .map_err(numerical),
        HamiltonianSource::File { path } => matfile::load_hamiltonian(Path::new(path))
            .map_err(|e| RunError::Config(format!("{e}"))),
        HamiltonianSource::Oscillator {
            mass,
            omega,
            grid_max,
            n_points,
        } => {
            let spec = OscillatorSpec::new(*mass, *omega, cfg.hbar, *grid_max, *n_points)
                .map_err(numerical)?;
            if spec.im_spectrum_unbounded() {
                eprintln!(
                    "warning: Im(omega) > 0 gives a spectrum with imaginary parts unbounded \
                     from above; the finite grid bounds it artificially"
                );
            }
            oscillator_hamiltonian(&spec).map_err(numerical)
        }
        HamiltonianSource::Triangular => Ok(triangular_demo().0),
    }
}

fn decompose(cfg: &ExperimentConfig, h: &CMatrix) -> Result<(Spectrum, QMetric), RunError> {
    let cond_limit = param(cfg, "cond_limit", 1e8);
    let s = eigendecompose(h, cond_limit).map_err(numerical)?;
    let m = QMetric::from_spectrum(&s).map_err(numerical)?;
    Ok((s, m))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, RunError> {
    match cfg.kind {
        ExperimentKind::RealitySweep => reality_sweep_experiment(cfg),
        ExperimentKind::MaxBound => max_bound_experiment(cfg),
        ExperimentKind::OracleCompare => oracle_compare_experiment(cfg),
        ExperimentKind::Oscillator => oscillator_experiment(cfg),
        ExperimentKind::Continuity => continuity_experiment(cfg),
        ExperimentKind::Demo => demo_experiment(cfg),
    }
}

fn reality_sweep_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, RunError> {
    let h = build_hamiltonian(cfg)?;
    let (s, m) = decompose(cfg, &h)?;
    let n_observables = param(cfg, "n_observables", 32.0) as usize;
    let n_times = param(cfg, "n_times", 16.0) as usize;

    let (_, a_state, b_state) =
        build_max_pair(&s, &m, cfg.t_a, cfg.t_b, cfg.hbar, None, 0.0, None).map_err(numerical)?;
    let bd = BoundaryData::new(
        expand(&s, &a_state).map_err(numerical)?,
        expand(&s, &b_state).map_err(numerical)?,
        cfg.t_a,
        cfg.t_b,
        cfg.hbar,
    )
    .map_err(numerical)?;

    let times: Vec<f64> = (0..n_times)
        .map(|j| cfg.t_a + (cfg.t_b - cfg.t_a) * j as f64 / (n_times.max(2) - 1) as f64)
        .collect();

    let mut csv = String::from("observable,t,value_re,value_im,imag_residual\n");
    let mut worst = 0.0_f64;
    for k in 0..n_observables {
        let o = m.random_q_hermitian(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k as u64));
        for &t in &times {
            let a_t = evolve_a(&s, &bd, t).map_err(numerical)?;
            let b_t = evolve_b(&s, &bd, t).map_err(numerical)?;
            let rep = normalized_matrix_element(&m, &b_t, &o, &a_t, t).map_err(numerical)?;
            worst = worst.max(rep.imag_residual);
            csv.push_str(&format!(
                "{k},{t},{},{},{}\n",
                rep.value.re, rep.value.im, rep.imag_residual
            ));
        }
    }

    // Negative control: a generic (non-Q-Hermitian) operator must be flagged.
    let control = {
        let g = m.random_q_hermitian(cfg.seed ^ 0x5A5A_5A5A);
        // Break Q-hermiticity by mixing in the plain dagger.
        let broken = &g + &g.dagger().scaled(Complex64::new(0.35, 0.1));
        let mut worst_control = 0.0_f64;
        for &t in &times {
            let a_t = evolve_a(&s, &bd, t).map_err(numerical)?;
            let b_t = evolve_b(&s, &bd, t).map_err(numerical)?;
            let rep =
                normalized_matrix_element(&m, &b_t, &broken, &a_t, t).map_err(numerical)?;
            worst_control = worst_control.max(rep.imag_residual);
        }
        worst_control
    };

    let checks = [
        Check {
            name: "max_imag_residual",
            value: worst,
            threshold: tolerance(cfg, "max_imag_residual", 1e-9),
            upper_bound: true,
        },
        Check {
            name: "negative_control_residual",
            value: control,
            threshold: tolerance(cfg, "negative_control_floor", 1e-2),
            upper_bound: false,
        },
    ];
    let fields = json!({
        "dim": s.dim(),
        "cond_p": s.cond_p,
        "n_observables": n_observables,
        "n_times": n_times,
        "max_imag_residual": worst,
        "negative_control_residual": control,
    });
    let (summary, pass) = finish(ExperimentKind::RealitySweep, cfg, fields, &checks);
    Ok(ExperimentOutcome {
        summary,
        pass,
        csv_files: vec![
            ("reality_sweep.csv".into(), csv),
            ("hamiltonian.mat".into(), matfile::format_matrix(&h)),
        ],
    })
}

fn max_bound_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, RunError> {
    let h = build_hamiltonian(cfg)?;
    let (s, m) = decompose(cfg, &h)?;
    let (sol, a_state, b_state) =
        build_max_pair(&s, &m, cfg.t_a, cfg.t_b, cfg.hbar, None, 0.0, None).map_err(numerical)?;
    let bd = BoundaryData::new(
        expand(&s, &a_state).map_err(numerical)?,
        expand(&s, &b_state).map_err(numerical)?,
        cfg.t_a,
        cfg.t_b,
        cfg.hbar,
    )
    .map_err(numerical)?;

    let window = cfg.t_b - cfg.t_a;
    let bound = (sol.bound_b * window / cfg.hbar).exp();
    let n_times = param(cfg, "n_times", 41.0) as usize;
    let mut csv = String::from("t,amplitude_re,amplitude_im,modulus,bound\n");
    let mut worst_rel = 0.0_f64;
    for j in 0..n_times {
        let t = cfg.t_a + window * j as f64 / (n_times.max(2) - 1) as f64;
        let a_t = evolve_a(&s, &bd, t).map_err(numerical)?;
        let b_t = evolve_b(&s, &bd, t).map_err(numerical)?;
        let amp = m.inner(&b_t, &a_t).map_err(numerical)?;
        worst_rel = worst_rel.max((amp.norm() - bound).abs() / bound);
        csv.push_str(&format!(
            "{t},{},{},{},{bound}\n",
            amp.re,
            amp.im,
            amp.norm()
        ));
    }

    let checks = [Check {
        name: "saturation_rel_error",
        value: worst_rel,
        threshold: tolerance(cfg, "saturation_rel_error", 1e-10),
        upper_bound: true,
    }];
    let fields = json!({
        "dim": s.dim(),
        "bound_b": sol.bound_b,
        "dominant_set": sol.dominant_set,
        "attained": sol.attained,
        "bound": bound,
        "saturation_rel_error": worst_rel,
    });
    let (summary, pass) = finish(ExperimentKind::MaxBound, cfg, fields, &checks);
    Ok(ExperimentOutcome {
        summary,
        pass,
        csv_files: vec![
            ("max_bound.csv".into(), csv),
            ("hamiltonian.mat".into(), matfile::format_matrix(&h)),
        ],
    })
}

fn oracle_compare_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, RunError> {
    let h = build_hamiltonian(cfg)?;
    let (s, m) = decompose(cfg, &h)?;
    let (sol, _, _) =
        build_max_pair(&s, &m, cfg.t_a, cfg.t_b, cfg.hbar, None, 0.0, None).map_err(numerical)?;
    let restarts = param(cfg, "restarts", 64.0) as usize;
    let iters = param(cfg, "iters", 500.0) as usize;
    let outcome = oracle_maximize(
        &s,
        &m,
        cfg.t_a,
        cfg.t_b,
        cfg.hbar,
        restarts,
        iters,
        cfg.seed,
    )
    .map_err(numerical)?;

    let analytic = sol.attained;
    let excess = (outcome.best_value - analytic) / analytic;
    let shortfall = (analytic - outcome.best_value).max(0.0) / analytic;

    let checks = [
        Check {
            name: "oracle_excess_over_bound",
            value: excess,
            threshold: tolerance(cfg, "oracle_excess", 1e-9),
            upper_bound: true,
        },
        Check {
            name: "oracle_relative_shortfall",
            value: shortfall,
            threshold: tolerance(cfg, "oracle_shortfall", 1e-3),
            upper_bound: true,
        },
    ];
    let fields = json!({
        "dim": s.dim(),
        "analytic": analytic,
        "oracle_best": outcome.best_value,
        "oracle_converged": outcome.converged,
        "restarts": restarts,
        "iters": iters,
    });
    let (summary, pass) = finish(ExperimentKind::OracleCompare, cfg, fields, &checks);
    Ok(ExperimentOutcome {
        summary,
        pass,
        csv_files: vec![("hamiltonian.mat".into(), matfile::format_matrix(&h))],
    })
}

fn oscillator_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, RunError> {
    let (mass, omega, grid_max, n_points) = match &cfg.hamiltonian {
        Some(HamiltonianSource::Oscillator {
            mass,
            omega,
            grid_max,
            n_points,
        }) => (*mass, *omega, *grid_max, *n_points),
        _ => {
            return Err(RunError::Config(
                "the oscillator experiment needs an oscillator hamiltonian source".into(),
            ))
        }
    };
    let spec = OscillatorSpec::new(mass, omega, cfg.hbar, grid_max, n_points).map_err(numerical)?;
    let unbounded = spec.im_spectrum_unbounded();
    if unbounded {
        eprintln!(
            "warning: Im(omega) > 0 gives a spectrum with imaginary parts unbounded from \
             above; skip maximization-based quantities for this model"
        );
    }
    let h = oscillator_hamiltonian(&spec).map_err(numerical)?;
    let (s, m) = decompose(cfg, &h)?;
    let n_check = param(cfg, "n_check", 8.0) as usize;
    let residuals = oscillator_qq_relations(&spec, &s, &m, n_check).map_err(numerical)?;

    let (dom, bound_b) = dominant_set(&s.eigenvalues, 1e-9).map_err(numerical)?;
    let mut order: Vec<usize> = (0..s.dim()).collect();
    order.sort_by(|&a, &b| s.eigenvalues[a].re.partial_cmp(&s.eigenvalues[b].re).unwrap());
    let dominant_is_ground = dom.len() == 1 && dom[0] == order[0];

    let mut csv = String::from("n,lambda_re,lambda_im\n");
    for (k, &idx) in order.iter().take(16).enumerate() {
        csv.push_str(&format!(
            "{k},{},{}\n",
            s.eigenvalues[idx].re, s.eigenvalues[idx].im
        ));
    }

    let tol = tolerance(cfg, "qq_residual", 1e-3);
    let checks = [
        Check {
            name: "residual_q",
            value: residuals.residual_q,
            threshold: tol,
            upper_bound: true,
        },
        Check {
            name: "residual_p",
            value: residuals.residual_p,
            threshold: tol,
            upper_bound: true,
        },
        Check {
            name: "residual_h",
            value: residuals.residual_h,
            threshold: tol,
            upper_bound: true,
        },
        Check {
            name: "dominant_is_ground",
            value: if dominant_is_ground { 1.0 } else { 0.0 },
            threshold: 0.5,
            upper_bound: false,
        },
    ];
    let ground = s.eigenvalues[order[0]];
    let fields = json!({
        "n_points": n_points,
        "grid_max": grid_max,
        "theta": spec.theta(),
        "cond_p": s.cond_p,
        "n_check": n_check,
        "residual_q": residuals.residual_q,
        "residual_p": residuals.residual_p,
        "residual_h": residuals.residual_h,
        "bound_b": bound_b,
        "dominant_set_size": dom.len(),
        "dominant_is_ground": dominant_is_ground,
        "ground_eigenvalue": [ground.re, ground.im],
        "im_spectrum_unbounded": unbounded,
    });
    let (summary, pass) = finish(ExperimentKind::Oscillator, cfg, fields, &checks);
    Ok(ExperimentOutcome {
        summary,
        pass,
        csv_files: vec![
            ("oscillator_spectrum.csv".into(), csv),
            ("hamiltonian.mat".into(), matfile::format_matrix(&h)),
        ],
    })
}

fn continuity_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, RunError> {
    let one = Complex64::new(1.0, 0.0);
    let n_points = param(cfg, "grid_points", 321.0) as usize;
    let grid_max = param(cfg, "grid_max", 8.0);
    let dt = param(cfg, "dt", 1e-3);
    let steps = param(cfg, "steps", 1000.0) as usize;
    let displacement = param(cfg, "displacement", 1.0);
    let warm_time = param(cfg, "warm_time", 0.3);

    let spec = OscillatorSpec::new(one, one, cfg.hbar, grid_max, n_points).map_err(numerical)?;
    let h = oscillator_hamiltonian(&spec).map_err(numerical)?;
    let (_, dq) = spec.grid();

    let psi0 = gaussian_packet(
        spec.grid_min(),
        dq,
        n_points,
        displacement,
        1.0,
        0.0,
        1.0,
        cfg.hbar,
    )
    .map_err(numerical)?;

    // Continuity residual one step after warming up.
    let warm = QhPropagator::new(&h, warm_time, cfg.hbar).map_err(numerical)?;
    let at_t = warm.step(psi0.samples()).map_err(numerical)?;
    let stepper = QhPropagator::new(&h, dt, cfg.hbar).map_err(numerical)?;
    let stepped = stepper.step(&at_t).map_err(numerical)?;
    let before = GridWavefunction::new(at_t, spec.grid_min(), dq, warm_time, 1.0, cfg.hbar)
        .map_err(numerical)?;
    let after = GridWavefunction::new(
        stepped,
        spec.grid_min(),
        dq,
        warm_time + dt,
        1.0,
        cfg.hbar,
    )
    .map_err(numerical)?;
    let residual = continuity_residual(&before, &after).map_err(numerical)?;

    // Probability drift over the long march.
    let mut csv = String::from("step,t,total_probability\n");
    let mut samples = psi0.samples().clone();
    let mut worst_drift = 0.0_f64;
    let report_every = (steps / 20).max(1);
    for step in 1..=steps {
        samples = stepper.step(&samples).map_err(numerical)?;
        if step % report_every == 0 || step == steps {
            let total = samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * dq;
            worst_drift = worst_drift.max((total - 1.0).abs());
            csv.push_str(&format!("{step},{},{total}\n", step as f64 * dt));
        }
    }

    let checks = [
        Check {
            name: "continuity_residual",
            value: residual,
            threshold: tolerance(cfg, "continuity_residual", 1e-3),
            upper_bound: true,
        },
        Check {
            name: "probability_drift",
            value: worst_drift,
            threshold: tolerance(cfg, "probability_drift", 1e-8),
            upper_bound: true,
        },
    ];
    let fields = json!({
        "grid_points": n_points,
        "dq": dq,
        "dt": dt,
        "steps": steps,
        "displacement": displacement,
        "continuity_residual": residual,
        "probability_drift": worst_drift,
    });
    let (summary, pass) = finish(ExperimentKind::Continuity, cfg, fields, &checks);
    Ok(ExperimentOutcome {
        summary,
        pass,
        csv_files: vec![("continuity.csv".into(), csv)],
    })
}

fn demo_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, RunError> {
    let (h, q_expected) = triangular_demo();
    let s = eigendecompose(&h, 1e8).map_err(numerical)?;
    let m = QMetric::from_spectrum(&s).map_err(numerical)?;
    let q_defect = (&m.q - &q_expected).frobenius_norm();
    let adjoint_defect = {
        let adj = m.adjoint(&h).map_err(numerical)?;
        (&adj - &h).frobenius_norm()
    };
    let (_, h_qa) = m.decompose_h(&h).map_err(numerical)?;
    let h_qa_norm = h_qa.frobenius_norm();

    let render = |mat: &CMatrix| -> Vec<Vec<f64>> {
        let a = mat.as_array();
        (0..mat.dim())
            .map(|i| (0..mat.dim()).map(|j| a[[i, j]].re).collect())
            .collect()
    };
    eprintln!("H                = {:?}", render(&h));
    eprintln!("Q                = {:?}", render(&m.q));
    eprintln!("expected Q       = {:?}", render(&q_expected));
    eprintln!("|Q - expected|_F = {q_defect:.3e}");
    eprintln!("|H^+Q - H|_F     = {adjoint_defect:.3e}");
    eprintln!("|H_Qa|_F         = {h_qa_norm:.3e}");

    let checks = [
        Check {
            name: "metric_defect",
            value: q_defect,
            threshold: tolerance(cfg, "metric_defect", 1e-12),
            upper_bound: true,
        },
        Check {
            name: "adjoint_defect",
            value: adjoint_defect,
            threshold: tolerance(cfg, "adjoint_defect", 1e-12),
            upper_bound: true,
        },
        Check {
            name: "anti_part_norm",
            value: h_qa_norm,
            threshold: tolerance(cfg, "anti_part_norm", 1e-12),
            upper_bound: true,
        },
    ];
    let fields = json!({
        "hamiltonian": render(&h),
        "metric": render(&m.q),
        "expected_metric": render(&q_expected),
        "metric_defect": q_defect,
        "adjoint_defect": adjoint_defect,
        "anti_part_norm": h_qa_norm,
        "eigenvalues": s.eigenvalues.iter().map(|l| vec![l.re, l.im]).collect::<Vec<_>>(),
    });
    let (summary, pass) = finish(ExperimentKind::Demo, cfg, fields, &checks);
    Ok(ExperimentOutcome {
        summary,
        pass,
        csv_files: Vec::new(),
    })
}

/// The composite verification run: reality sweep, bound saturation and the
/// oracle cross-check on one seeded random Hamiltonian.
pub fn run_verify(dim: usize, seed: u64, window: f64) -> Result<(Value, bool), RunError> {
    let base = ExperimentConfig {
        kind: ExperimentKind::RealitySweep,
        hamiltonian: Some(HamiltonianSource::Random {
            dim,
            im_upper: 0.5,
            im_spread: 1.0,
            cond_target: 50.0,
        }),
        t_a: 0.0,
        t_b: window,
        hbar: 1.0,
        seed,
        tolerances: BTreeMap::new(),
        params: BTreeMap::new(),
        output_path: None,
    };

    let reality = run_experiment(&base)?;
    let max_bound = run_experiment(&ExperimentConfig {
        kind: ExperimentKind::MaxBound,
        ..base.clone()
    })?;
    let oracle = run_experiment(&ExperimentConfig {
        kind: ExperimentKind::OracleCompare,
        ..base.clone()
    })?;

    let all_pass = reality.pass && max_bound.pass && oracle.pass;
    let summary = json!({
        "command": "verify",
        "dim": dim,
        "seed": seed,
        "window": window,
        "reality_sweep": reality.summary,
        "max_bound": max_bound.summary,
        "oracle_compare": oracle.summary,
        "all_pass": all_pass,
    });
    Ok((summary, all_pass))
}

/// Write `bytes` to `path` through a sibling temp file and rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

/// Persist summary, metadata and CSV artifacts under `dir`.
pub fn write_outputs(outcome: &ExperimentOutcome, dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let summary_text = format!("{:#}\n", outcome.summary);
    atomic_write(&dir.join("summary.json"), summary_text.as_bytes())?;

    let unix_time = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = json!({
        "unix_time": unix_time,
        "version": env!("CARGO_PKG_VERSION"),
    });
    atomic_write(&dir.join("meta.json"), format!("{meta:#}\n").as_bytes())?;

    for (name, content) in &outcome.csv_files {
        atomic_write(&dir.join(name), content.as_bytes())?;
    }
    Ok(())
}
