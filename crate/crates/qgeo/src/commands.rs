//! One function per subcommand, each producing an [`Artifact`].

use qgeo_core::completeness::{
    cpn_constant, cpn_volume, resolve_coherent, resolve_cpn, resolve_su11, su11_constant, Method,
    ResolutionReport,
};
use qgeo_core::estimation::{bootstrap_stderr, covariance, run_estimation, EstimationOptions, EstimationRun, MleOptions};
use qgeo_core::linalg::{min_eigenvalue, sym_determinant, RMatrix};
use qgeo_core::qcri::{check_det_qcri, gap, linear_fit, weighted_trace_bounds, WeightMatrix};
use qgeo_core::state_model::{
    berry_curvature, build_model, idqs_from_metric, parse_assignments, qfm, qgt, ModelOptions,
    COHERENT_DEFAULT_CUTOFF, SU11_DEFAULT_CUTOFF,
};
use qgeo_core::statistical::{dds, frm, FrmOptions};
use qgeo_core::vertex::{fig4_sweep, mvdds, Fig4Row, Su3Plane};
use qgeo_core::{ParamPoint, Povm, StateModel};
use serde_json::{json, Value};

use crate::cli::{Cli, Command, CompletenessCmd, EstimateCmd, Fig4Cmd, MeasureCmd, ModelArgs, MvddsCmd, PointCmd};
use crate::error::CliError;
use crate::exec::Pool;
use crate::output::{complex_matrix, matrix, matrix_table, Artifact, Cell, Table};
use crate::povm_spec;

/// Seed of the bootstrap resampling, kept apart from the trial streams.
const BOOTSTRAP_STREAM: u64 = 0xb007;

pub fn run(cli: &Cli) -> Result<Artifact, CliError> {
    let pool = Pool::new(cli.global.workers)?;
    let seed = cli.global.seed;
    match &cli.command {
        Command::Qgt(c) => qgt_cmd(c),
        Command::Idqs(c) => idqs_cmd(c),
        Command::Frm(c) => frm_cmd(c),
        Command::Dds(c) => dds_cmd(c),
        Command::Qcri(c) => qcri_cmd(c, require_seed(seed, "qcri")?, &pool),
        Command::Simulate(c) => simulate_cmd(c, require_seed(seed, "simulate")?, &pool),
        Command::Mvdds(c) => mvdds_cmd(c),
        Command::Fig4(c) => fig4_cmd(c, require_seed(seed, "fig4")?, &pool),
        Command::Completeness(c) => completeness_cmd(c, seed, &pool),
    }
}

fn require_seed(seed: Option<u64>, command: &str) -> Result<u64, CliError> {
    seed.ok_or_else(|| CliError::Usage(format!("`{command}` is stochastic and needs --seed")))
}

fn model(args: &ModelArgs) -> Result<Box<dyn StateModel>, CliError> {
    let opts = ModelOptions {
        n: args.n,
        cutoff: args.cutoff,
        k: args.k,
        half_width: args.half_width,
        r_max: args.r_max,
    };
    let fixed = parse_assignments([args.fix.as_str()])?;
    Ok(build_model(&args.model, &opts, &fixed)?)
}

fn point(theta: &[f64]) -> Result<ParamPoint, CliError> {
    Ok(ParamPoint::from_slice(theta)?)
}

fn header(command: &str, m: &dyn StateModel, args: &ModelArgs, theta: &ParamPoint) -> Value {
    json!({
        "command": command,
        "model": args.model,
        "fixed": args.fix,
        "params": m.param_names(),
        "theta": theta.coords(),
    })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut base, extra) {
        a.extend(b);
    }
    base
}

fn qgt_cmd(c: &PointCmd) -> Result<Artifact, CliError> {
    let m = model(&c.model)?;
    let theta = point(&c.point.theta)?;
    let q = qgt(m.as_ref(), &theta, c.point.step)?;
    let d = q.dim();
    let berry = RMatrix::from_fn(d, d, |a, b| berry_curvature(&q, a, b));
    let density = idqs_from_metric(&q.metric)?;
    let warnings: Vec<String> = q.warning().iter().map(ToString::to_string).collect();
    let json = merge(
        header("qgt", m.as_ref(), &c.model, &theta),
        json!({
            "q": complex_matrix(&q.entries),
            "metric": matrix(&q.metric),
            "sigma": matrix(&q.berry_sigma),
            "berry_curvature": matrix(&berry),
            "idqs": density,
            "hermiticity_deviation": q.hermiticity_deviation,
            "warnings": warnings,
        }),
    );
    let re = q.entries.map(|z| z.re);
    let im = q.entries.map(|z| z.im);
    Ok(Artifact {
        json,
        table: matrix_table(&["q_re", "q_im", "metric", "sigma", "berry_curvature"], &[&re, &im, &q.metric, &q.berry_sigma, &berry]),
        warnings,
    })
}

fn idqs_cmd(c: &PointCmd) -> Result<Artifact, CliError> {
    let m = model(&c.model)?;
    let theta = point(&c.point.theta)?;
    let q = qgt(m.as_ref(), &theta, c.point.step)?;
    let det = sym_determinant(&q.metric);
    let density = idqs_from_metric(&q.metric)?;
    let warnings: Vec<String> = q.warning().iter().map(ToString::to_string).collect();
    Ok(Artifact {
        json: merge(
            header("idqs", m.as_ref(), &c.model, &theta),
            json!({ "det_metric": det, "idqs": density, "warnings": warnings }),
        ),
        table: Table::record(vec![("det_metric", det.into()), ("idqs", density.into())]),
        warnings,
    })
}

struct Measured {
    model: Box<dyn StateModel>,
    theta: ParamPoint,
    povm: Povm,
    gf: qgeo_core::MetricMatrix,
    gi: qgeo_core::MetricMatrix,
    warnings: Vec<String>,
}

fn measure(c: &MeasureCmd) -> Result<Measured, CliError> {
    let m = model(&c.model)?;
    let theta = point(&c.point.theta)?;
    let spec = povm_spec::parse(&c.povm)?;
    let povm = povm_spec::build(&spec, m.as_ref(), &theta)?;
    let opts = FrmOptions {
        step: c.point.step,
        ..FrmOptions::default()
    };
    let gi = frm(m.as_ref(), &povm, &theta, opts)?;
    let q = qgt(m.as_ref(), &theta, c.point.step)?;
    let warnings = q.warning().iter().map(ToString::to_string).collect();
    Ok(Measured {
        model: m,
        theta,
        povm,
        gf: qfm(&q),
        gi,
        warnings,
    })
}

fn frm_cmd(c: &MeasureCmd) -> Result<Artifact, CliError> {
    let r = measure(c)?;
    let gap_min = min_eigenvalue(&(&r.gf.entries - &r.gi.entries));
    let density = dds(&r.gi)?;
    Ok(Artifact {
        json: merge(
            header("frm", r.model.as_ref(), &c.model, &r.theta),
            json!({
                "povm": c.povm,
                "outcomes": r.povm.len(),
                "frm": matrix(&r.gi.entries),
                "qfm": matrix(&r.gf.entries),
                "dds": density,
                "min_eig_qfm_minus_frm": gap_min,
                "warnings": r.warnings,
            }),
        ),
        table: matrix_table(&["frm", "qfm"], &[&r.gi.entries, &r.gf.entries]),
        warnings: r.warnings,
    })
}

fn dds_cmd(c: &MeasureCmd) -> Result<Artifact, CliError> {
    let r = measure(c)?;
    let density = dds(&r.gi)?;
    let det = r.gi.determinant();
    let quantum = r.gf.density()?;
    Ok(Artifact {
        json: merge(
            header("dds", r.model.as_ref(), &c.model, &r.theta),
            json!({
                "povm": c.povm,
                "det_frm": det,
                "dds": density,
                "idqs": quantum,
                "warnings": r.warnings,
            }),
        ),
        table: Table::record(vec![("det_frm", det.into()), ("dds", density.into()), ("idqs", quantum.into())]),
        warnings: r.warnings,
    })
}

fn estimate(c: &EstimateCmd, r: &Measured, seed: u64, pool: &Pool) -> Result<EstimationRun, CliError> {
    let opts = EstimationOptions {
        mle: MleOptions {
            prior_half_width: c.prior_half_width,
            ..MleOptions::default()
        },
        mean_centred: c.mean_centred,
    };
    Ok(run_estimation(r.model.as_ref(), &r.povm, &r.theta, c.m, c.trials, seed, opts, pool)?)
}

fn qcri_cmd(c: &EstimateCmd, seed: u64, pool: &Pool) -> Result<Artifact, CliError> {
    let r = measure(&c.measure)?;
    let run = estimate(c, &r, seed, pool)?;
    let mut report = check_det_qcri(&r.gf, &r.gi, &run.covariance, c.m)?;
    let d = r.gf.dim();
    let weight = WeightMatrix::new(RMatrix::identity(d, d))?;
    report.weighted_trace = weighted_trace_bounds(&weight, &r.gf, &r.gi, &run.covariance, c.m).ok();

    let rows: Vec<Vec<f64>> = run.estimates.iter().map(|e| e.coords().to_vec()).collect();
    let centre = r.theta.coords().to_vec();
    let mean_centred = c.mean_centred;
    let se = bootstrap_stderr(&rows, c.bootstrap, seed ^ BOOTSTRAP_STREAM, |s| {
        let det4 = 4f64.powi(d as i32) * sym_determinant(&covariance(s, &centre, mean_centred));
        vec![1.0 / det4.max(f64::MIN_POSITIVE).sqrt()]
    })[0];
    let [left, mid, right] = report.det_chain;
    let within_3se = mid >= right - 3.0 * se;

    let mut warnings = r.warnings.clone();
    warnings.extend(run.warnings.iter().map(ToString::to_string));
    if report.sigma_singular {
        warnings.push("estimator covariance is singular".into());
    }
    let json = merge(
        header("qcri", r.model.as_ref(), &c.measure.model, &r.theta),
        json!({
            "povm": c.measure.povm,
            "seed": seed,
            "m": c.m,
            "trials": c.trials,
            "dropped": run.dropped,
            "mean_centred": c.mean_centred,
            "qfm": matrix(&r.gf.entries),
            "frm": matrix(&r.gi.entries),
            "covariance": matrix(&run.covariance.entries),
            "det_chain": [left, mid, right],
            "right_stderr": se,
            "chain_holds": report.holds(),
            "chain_holds_within_3se": !report.left_violated && within_3se,
            "matrix_ordering_ok": report.matrix_ordering_ok,
            "min_eig_quantum_classical": report.min_eig_quantum_classical,
            "min_eig_classical_estimator": report.min_eig_classical_estimator,
            "sigma_singular": report.sigma_singular,
            "weighted_trace": report.weighted_trace,
            "estimator_volume": run.volume,
            "warnings": warnings,
        }),
    );
    let table = Table::record(vec![
        ("m", Cell::Int(c.m)),
        ("trials", c.trials.into()),
        ("dropped", run.dropped.into()),
        ("det_left", left.into()),
        ("det_mid", mid.into()),
        ("det_right", right.into()),
        ("right_stderr", se.into()),
        ("min_eig_quantum_classical", report.min_eig_quantum_classical.into()),
        ("min_eig_classical_estimator", report.min_eig_classical_estimator.unwrap_or(f64::NAN).into()),
        ("estimator_volume", run.volume.into()),
    ]);
    Ok(Artifact { json, table, warnings })
}

fn simulate_cmd(c: &EstimateCmd, seed: u64, pool: &Pool) -> Result<Artifact, CliError> {
    let r = measure(&c.measure)?;
    let run = estimate(c, &r, seed, pool)?;
    let names = r.model.param_names();
    let mut head = vec!["trial".to_string()];
    head.extend(names.iter().cloned());
    let mut table = Table::new(&head);
    for (i, e) in run.trial_indices.iter().zip(&run.estimates) {
        let mut row = vec![Cell::from(*i)];
        row.extend(e.coords().iter().map(|&x| Cell::Num(x)));
        table.push(row);
    }
    let warnings: Vec<String> = run.warnings.iter().map(ToString::to_string).collect();
    let scaled = &run.covariance.entries * (4.0 * c.m as f64);
    let json = merge(
        header("simulate", r.model.as_ref(), &c.measure.model, &r.theta),
        json!({
            "povm": c.measure.povm,
            "seed": seed,
            "m": c.m,
            "trials": c.trials,
            "dropped": run.dropped,
            "mean_centred": c.mean_centred,
            "trial_indices": run.trial_indices,
            "estimates": run.estimates.iter().map(|e| e.coords().to_vec()).collect::<Vec<_>>(),
            "covariance": matrix(&run.covariance.entries),
            "scaled_covariance": matrix(&scaled),
            "inverse_frm": r.gi.entries.clone().try_inverse().map(|m| matrix(&m)),
            "estimator_volume": run.volume,
            "warnings": warnings,
        }),
    );
    Ok(Artifact { json, table, warnings })
}

fn mvdds_cmd(c: &MvddsCmd) -> Result<Artifact, CliError> {
    let m = model(&c.model)?;
    let theta = point(&c.theta)?;
    let res = mvdds(m.as_ref(), &theta, &c.search.config())?;
    let g = gap(m.as_ref(), &theta, res.mvdds_sq)?;
    let warnings: Vec<String> = res.warning.iter().map(ToString::to_string).collect();
    let json = merge(
        header("mvdds", m.as_ref(), &c.model, &theta),
        json!({
            "mvdds_sq": res.mvdds_sq,
            "mvdds": res.mvdds_sq.max(0.0).sqrt(),
            "argmax": { "t": res.argmax[0], "phi": res.argmax[1], "chi": res.argmax[2] },
            "radii": res.radii_used,
            "rung_values": res.rung_values,
            "extrapolation_residual": res.extrapolation_residual,
            "det_metric": g.det_gf,
            "berry_curvature": g.berry,
            "gap": g.delta,
            "predicted_gap": g.predicted,
            "warnings": warnings,
        }),
    );
    let table = Table::record(vec![
        ("mvdds_sq", res.mvdds_sq.into()),
        ("det_metric", g.det_gf.into()),
        ("berry_curvature", g.berry.into()),
        ("gap", g.delta.into()),
        ("predicted_gap", g.predicted.into()),
        ("extrapolation_residual", res.extrapolation_residual.into()),
    ]);
    Ok(Artifact { json, table, warnings })
}

fn fig4_cmd(c: &Fig4Cmd, seed: u64, pool: &Pool) -> Result<Artifact, CliError> {
    let plane = Su3Plane::parse(&c.submanifold)?;
    if c.samples < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    let (rows, warns) = fig4_sweep(plane, c.samples, seed, &c.search.config(), pool)?;
    let predicted: Vec<f64> = rows.iter().map(|r| r.predicted_gap).collect();
    let gaps: Vec<f64> = rows.iter().map(|r| r.gap).collect();
    let (slope, intercept) = linear_fit(&predicted, &gaps);
    let mut table = Table::new(&Fig4Row::HEADER);
    for r in &rows {
        table.push(r.values().iter().map(|&x| Cell::Num(x)).collect());
    }
    let warnings: Vec<String> = warns.iter().map(ToString::to_string).collect();
    let json = json!({
        "command": "fig4",
        "submanifold": plane.name(),
        "seed": seed,
        "samples": c.samples,
        "columns": Fig4Row::HEADER,
        "rows": rows.iter().map(|r| r.values().to_vec()).collect::<Vec<_>>(),
        "gap_fit": { "slope": slope, "intercept": intercept },
        "warnings": warnings,
    });
    Ok(Artifact { json, table, warnings })
}

fn completeness_cmd(c: &CompletenessCmd, seed: Option<u64>, pool: &Pool) -> Result<Artifact, CliError> {
    let param_dim = match c.space.as_str() {
        "coherent" | "su11" => 2,
        s => 2 * cpn_index(s)?,
    };
    let method = match &c.method {
        Some(m) => Method::parse(m)?,
        None => Method::default_for(param_dim),
    };
    let n_points = c.points.unwrap_or(method.default_points());
    let seed = match method {
        Method::MonteCarlo => require_seed(seed, "completeness --method monte-carlo")?,
        Method::Quadrature => seed.unwrap_or(0),
    };
    let (report, expected, expected_volume): (ResolutionReport, f64, Option<f64>) = match c.space.as_str() {
        "coherent" => {
            let cutoff = c.cutoff.unwrap_or(COHERENT_DEFAULT_CUTOFF);
            (resolve_coherent(c.radius, cutoff, n_points, method, seed, pool)?, std::f64::consts::PI, None)
        }
        "su11" => {
            let cutoff = c.cutoff.unwrap_or(SU11_DEFAULT_CUTOFF);
            (resolve_su11(c.k, cutoff, n_points, method, seed, pool)?, su11_constant(c.k), None)
        }
        s => {
            let n = cpn_index(s)?;
            (resolve_cpn(n, method, n_points, seed, pool)?, cpn_constant(n), Some(cpn_volume(n)))
        }
    };
    let rel_err = (report.fitted_constant - expected).abs() / expected;
    let mut json = json!({
        "command": "completeness",
        "space": c.space,
        "method": report.method.name(),
        "n_points": report.n_points,
        "seed": seed,
        "dim": report.dim(),
        "fit_levels": report.fit_levels,
        "fitted_constant": report.fitted_constant,
        "expected_constant": expected,
        "relative_error": rel_err,
        "off_identity_residual": report.off_identity_residual,
        "stderr": report.stderr,
        "residual_noise": report.residual_noise,
        "volume": report.volume,
        "volume_stderr": report.volume_stderr,
        "expected_volume": expected_volume,
    });
    if c.matrix {
        json["k_matrix"] = complex_matrix(&report.k_matrix);
    }
    let opt = |x: Option<f64>| Cell::Num(x.unwrap_or(f64::NAN));
    let table = Table::record(vec![
        ("space", c.space.as_str().into()),
        ("method", report.method.name().into()),
        ("n_points", report.n_points.into()),
        ("fit_levels", report.fit_levels.into()),
        ("fitted_constant", report.fitted_constant.into()),
        ("expected_constant", expected.into()),
        ("off_identity_residual", report.off_identity_residual.into()),
        ("stderr", opt(report.stderr)),
        ("volume", opt(report.volume)),
        ("volume_stderr", opt(report.volume_stderr)),
    ]);
    Ok(Artifact {
        json,
        table,
        warnings: Vec::new(),
    })
}

fn cpn_index(space: &str) -> Result<usize, CliError> {
    space
        .strip_prefix("cp")
        .and_then(|n| n.parse().ok())
        .filter(|n| (1..=3).contains(n))
        .ok_or_else(|| CliError::Usage(format!("unknown space `{space}`; expected cp1, cp2, cp3, coherent or su11")))
}
