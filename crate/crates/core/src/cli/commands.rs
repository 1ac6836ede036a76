use num_complex::Complex64;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs::File;
use std::path::Path;

use super::config::RunConfig;
use super::parse::{parse_function, parse_list, parse_point};
use super::{
    BuildGArgs, BuildMode, CertifyArgs, CertifyMode, CliError, Command, EvalUArgs, LoglogArgs, MeasureArgs,
    NevanlinnaArgs, Outcome, RecurArgs, SquareChoice, SystemArgs, VerifyShArgs, SCHEMA_VERSION,
};
use crate::dbar::{build_g, DbarError, PipelineOptions, SolveMode, SolveOptions};
use crate::ergodic::{kb_report, tail_distribution, ErgodicError, Ladder, LevelChoice, Scheme, TranslateSampler};
use crate::field::{ComplexField, GridField};
use crate::geometry::{GeometryError, Square, TernaryParams};
use crate::growth::{adi_certify, goodness_stats, levsasha_select, lower_bound_report, GrowthError};
use crate::nevanlinna::{
    compare_t_log_m, recurrence_coverage, tfr_profile, Circle, CoverageOptions, NevanlinnaError, ProfileOptions,
    SphericalDisk,
};
use crate::subharmonic::{loglog_integral, verify_sh, LoglogOptions, SubharmonicError, SubharmonicEvaluator};

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SubharmonicError> for CliError {
    fn from(e: SubharmonicError) -> Self {
        match e {
            SubharmonicError::Overflow { .. } | SubharmonicError::QuadratureFailure { .. } => {
                CliError::Internal(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<GrowthError> for CliError {
    fn from(e: GrowthError) -> Self {
        match e {
            GrowthError::ZeroBeta
            | GrowthError::GridTooCoarse { .. }
            | GrowthError::IncompleteChain { .. }
            | GrowthError::DiskOutOfRange => CliError::Internal(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<DbarError> for CliError {
    fn from(e: DbarError) -> Self {
        match e {
            DbarError::Subharmonic(inner) => inner.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ErgodicError> for CliError {
    fn from(e: ErgodicError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<NevanlinnaError> for CliError {
    fn from(e: NevanlinnaError) -> Self {
        match e {
            NevanlinnaError::CurveThroughPoint { .. }
            | NevanlinnaError::GapTooSmall { .. }
            | NevanlinnaError::InvalidArgument(_) => CliError::Usage(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn create(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(|e| CliError::Internal(format!("cannot create {}: {e}", path.display())))
}

fn csv_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Internal(format!("writing {}: {e}", path.display()))
}

/// Config echo shared by every report.
fn base_inputs(cfg: &RunConfig) -> serde_json::Map<String, Value> {
    let Value::Object(map) = to_value(cfg) else { unreachable!("config serializes to an object") };
    map
}

fn params_for(cfg: &RunConfig, min_depth: usize) -> Result<TernaryParams, CliError> {
    Ok(TernaryParams::build(cfg.epsilon_spec()?, cfg.depth.max(min_depth))?)
}

fn tolerances(items: &[(&str, f64)]) -> BTreeMap<String, f64> {
    items.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub(crate) fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cmd {
        Command::System(a) => system(a, cfg),
        Command::EvalU(a) => eval_u(a, cfg),
        Command::VerifySh(a) => verify(a, cfg),
        Command::Certify(a) => certify(a, cfg),
        Command::BuildG(a) => build(a, cfg),
        Command::Measure(a) => measure(a, cfg),
        Command::Nevanlinna(a) => nevanlinna(a, cfg),
        Command::Recur(a) => recur(a, cfg),
        Command::Loglog(a) => loglog(a, cfg),
    }
}

fn system(args: &SystemArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = params_for(cfg, 1)?;
    let depth = p.depth();
    let table: Vec<Value> = (1..=depth)
        .map(|n| json!({"n": n, "epsilon": p.epsilon(n), "a": p.a(n), "d": p.d(n), "corridor_width": 3.0 * p.d(n)}))
        .collect();
    let d = p.d_seq();
    let ratio_ok = d.windows(2).all(|w| 1.0 < w[1] / w[0] && w[1] / w[0] < 6.0);
    let exact_a: Option<Vec<String>> = p.has_exact().then(|| (0..=depth).map(|n| p.exact_a(n).unwrap().to_string()).collect());
    if let Some(path) = &args.csv {
        let mut w = csv::Writer::from_writer(create(path)?);
        w.write_record(["n", "epsilon", "a", "d"]).map_err(|e| csv_error(path, e))?;
        for n in 1..=depth {
            w.write_record([n.to_string(), p.epsilon(n).to_string(), p.a(n).to_string(), p.d(n).to_string()])
                .map_err(|e| csv_error(path, e))?;
        }
        w.flush().map_err(|e| csv_error(path, e))?;
    }
    let mut inputs = base_inputs(cfg);
    inputs.insert("csv".into(), to_value(&args.csv));
    Ok(Outcome {
        inputs: Value::Object(inputs),
        results: json!({
            "a": p.a_seq(),
            "epsilon": p.eps_seq(),
            "d": d,
            "corridor_width": d.iter().map(|v| 3.0 * v).collect::<Vec<_>>(),
            "exact_a": exact_a,
            "d_ratio_ok": ratio_ok,
            "table": table,
        }),
        tolerances: tolerances(&[("exact_arithmetic", 0.0)]),
    })
}

fn eval_u(args: &EvalUArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    if args.level == 0 {
        return Err(CliError::Usage("--level must be at least 1".into()));
    }
    let p = params_for(cfg, args.level)?;
    let square = match args.square {
        SquareChoice::Sn => p.s(args.level),
        SquareChoice::Custom => {
            let center = args.center.as_deref().ok_or_else(|| CliError::Usage("--square custom needs --center".into()))?;
            let half = args.half_side.ok_or_else(|| CliError::Usage("--square custom needs --half-side".into()))?;
            if !(half > 0.0) {
                return Err(CliError::Usage("--half-side must be positive".into()));
            }
            Square::new(parse_point("--center", center)?, half)
        }
    };
    let eval = SubharmonicEvaluator::new(p, cfg.b, args.level)?;
    let field = GridField::sample(&square, cfg.grid_n, true, |z| eval.ln_u(args.level, z).unwrap_or(f64::NAN));
    if field.values.iter().any(|v| v.is_nan()) {
        return Err(CliError::Internal("u_n evaluation failed on the grid".into()));
    }
    let (ln_max, ln_min) = (field.max(), field.min());
    if let Some(path) = &args.csv {
        let out = if args.log_domain {
            field.clone()
        } else {
            if ln_max > f64::MAX.ln() {
                return Err(CliError::Usage(format!("u_{} reaches exp({ln_max:.3e}); use --log-domain", args.level)));
            }
            GridField { values: field.values.mapv(f64::exp), log_domain: false, ..field.clone() }
        };
        out.write_csv(create(path)?).map_err(|e| csv_error(path, e))?;
    }
    let at = match &args.at {
        Some(text) => {
            let z = parse_point("--at", text)?;
            Some(json!({"z": [z.re, z.im], "ln_u": eval.ln_u(args.level, z)?}))
        }
        None => None,
    };
    let mut inputs = base_inputs(cfg);
    inputs.insert("level".into(), json!(args.level));
    inputs.insert("square".into(), to_value(&square));
    inputs.insert("log_domain".into(), json!(args.log_domain));
    Ok(Outcome {
        inputs: Value::Object(inputs),
        results: json!({"level": args.level, "ln_u_max_log": ln_max, "ln_u_min_log": ln_min, "cell": field.h, "at": at}),
        tolerances: tolerances(&[("evaluation", 0.0)]),
    })
}

fn verify(args: &VerifyShArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = params_for(cfg, args.level + 1)?;
    let eval = SubharmonicEvaluator::new(p, cfg.b, args.level)?;
    let report = verify_sh(&eval, args.level, cfg.grid_n)?;
    let mut inputs = base_inputs(cfg);
    inputs.insert("level".into(), json!(args.level));
    Ok(Outcome {
        inputs: Value::Object(inputs),
        results: to_value(&report),
        tolerances: tolerances(&[("prop_i_relative", report.prop_i_tolerance)]),
    })
}

fn certify(args: &CertifyArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    if !(args.gamma > 0.0 && args.gamma < 1.0) {
        return Err(CliError::Usage(format!("--gamma: gamma must lie in (0,1), got {}", args.gamma)));
    }
    let field = match &args.input {
        Some(path) => {
            let f = File::open(path).map_err(|e| CliError::Usage(format!("--input {}: {e}", path.display())))?;
            GridField::read_csv(f).map_err(|e| CliError::Usage(format!("--input {}: {e}", path.display())))?
        }
        None => GridField::sample(&Square::centered(8.0), cfg.grid_n, false, |z| (2.0 * PI * z).cos().re.max(0.0)),
    };
    let goodness = goodness_stats(&field, args.gamma, args.zero_tol)?;
    let p = args.p as f64;
    let adi_constant = -(1.0 - args.gamma / (PI * p * p)).ln();
    let mut results = serde_json::Map::new();
    results.insert("goodness".into(), to_value(&goodness.summary()));
    let mut certified = Vec::new();
    let mut reference = None;
    if matches!(args.mode, CertifyMode::Adi | CertifyMode::Both) {
        let chain = adi_certify(&field, &goodness, args.alpha, args.p, args.rel_tol)?;
        certified.push(chain.certified_log_growth);
        results.insert(
            "factors".into(),
            to_value(&chain.steps.iter().map(|s| s.ln_growth).collect::<Vec<_>>()),
        );
        results.insert("adi".into(), to_value(&chain));
    }
    if matches!(args.mode, CertifyMode::Levsasha | CertifyMode::Both) {
        let chain = levsasha_select(&goodness, None, None)?;
        let bound = lower_bound_report(&chain, adi_constant)?;
        certified.push(bound.certified_log_growth);
        reference = Some(bound.reference_bound_log);
        results.insert("case_labels".into(), to_value(&chain.steps.iter().map(|s| s.case).collect::<Vec<_>>()));
        results.insert("chain".into(), to_value(&chain));
        results.insert("lower_bound".into(), to_value(&bound));
    }
    results.insert("certified_log_growth".into(), json!(certified.into_iter().fold(f64::NEG_INFINITY, f64::max)));
    results.insert("paper_bound_log".into(), json!(reference));
    let mut inputs = base_inputs(cfg);
    inputs.insert("input".into(), to_value(&args.input));
    inputs.insert("gamma".into(), json!(args.gamma));
    inputs.insert("alpha".into(), json!(args.alpha));
    inputs.insert("p".into(), json!(args.p));
    inputs.insert("mode".into(), json!(format!("{:?}", args.mode).to_lowercase()));
    Ok(Outcome {
        inputs: Value::Object(inputs),
        results: Value::Object(results),
        tolerances: tolerances(&[("eq_max_relative", args.rel_tol), ("zero_tol", args.zero_tol)]),
    })
}

fn build(args: &BuildGArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = params_for(cfg, cfg.depth + 1)?;
    let mode = match args.mode {
        BuildMode::Cauchy => SolveMode::Cauchy,
        BuildMode::Refine => SolveMode::WeightedRefine,
    };
    let mut solve = SolveOptions { mode, ..SolveOptions::default() };
    if let Some(d) = args.degree {
        solve.degree = d;
    }
    let opts = PipelineOptions { solve, ..PipelineOptions::default() };
    let out = build_g(&p, cfg.b, cfg.depth, cfg.grid_n, &opts)?;
    let mut files = Vec::new();
    if let Some(dir) = &args.csv_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Internal(format!("cannot create {}: {e}", dir.display())))?;
        for g in &out.levels {
            let field = ComplexField::sample(&p.s(g.level), cfg.grid_n, |z| {
                g.eval(z).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            });
            let path = dir.join(format!("G_{}.csv", g.level));
            field.write_csv(create(&path)?).map_err(|e| csv_error(&path, e))?;
            files.push(path);
        }
    }
    let mut inputs = base_inputs(cfg);
    inputs.insert("mode".into(), json!(format!("{:?}", args.mode).to_lowercase()));
    inputs.insert("degree".into(), json!(opts.solve.degree));
    Ok(Outcome {
        inputs: Value::Object(inputs),
        results: json!({"levels": out.reports, "csv": files}),
        tolerances: tolerances(&[("fit_cutoff_log", opts.solve.fit_cutoff_log)]),
    })
}

fn measure(args: &MeasureArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let f = parse_function(&args.function)?.entire()?;
    let p = params_for(cfg, args.n)?;
    let sampler = TranslateSampler::new(p.s(args.n), Scheme::Seeded { count: args.samples, seed: cfg.seed });
    let k_max = args.k_max.unwrap_or(args.n - 1);
    let eval = |z: Complex64| f(z);
    let kb = kb_report(&eval, &p, k_max, args.n, &Ladder::Majorant { b: cfg.b }, &p.s(0), args.osc, &sampler)?;
    let tails = match &args.thresholds {
        Some(text) => {
            let ts = parse_list("--thresholds", text)?;
            let choice = args.tail_level.map_or(LevelChoice::Majorant { b: cfg.b }, LevelChoice::Fixed);
            tail_distribution(&eval, &p, args.n, &ts, choice, &sampler)?
                .into_iter()
                .map(|r| {
                    json!({
                        "t": r.t, "k": r.k, "mc_fraction": r.mc.fraction, "mc_std_error": r.mc.std_error,
                        "samples": r.mc.samples, "exact_bound": r.exact_bound, "displayed_bound": r.displayed_bound,
                    })
                })
                .collect()
        }
        None => Vec::new(),
    };
    let mut results = to_value(&kb);
    results["tails"] = Value::Array(tails);
    let mut inputs = base_inputs(cfg);
    inputs.insert("function".into(), json!(args.function));
    inputs.insert("n".into(), json!(args.n));
    inputs.insert("samples".into(), json!(args.samples));
    inputs.insert("thresholds".into(), json!(args.thresholds));
    inputs.insert("k_max".into(), json!(k_max));
    inputs.insert("osc".into(), json!(args.osc));
    Ok(Outcome {
        inputs: Value::Object(inputs),
        results,
        tolerances: tolerances(&[("binomial_std_error_per_fraction", 1.0 / (args.samples.max(1) as f64).sqrt())]),
    })
}

fn nevanlinna(args: &NevanlinnaArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = parse_function(&args.function)?;
    let h = spec.handle(args.lattice_cutoff)?;
    let opts = ProfileOptions {
        intervals: args.intervals,
        radial_order: args.radial_order,
        angular: args.angular,
        tolerance: args.tolerance,
    };
    let profile = tfr_profile(&h, args.r_max, &opts)?;
    if let Some(path) = &args.profile_out {
        profile.write_csv(create(path)?).map_err(|e| csv_error(path, e))?;
    }
    let comparison = if args.compare { Some(compare_t_log_m(&h, 0.5 * args.r_max, args.r_max, &opts)?) } else { None };
    let last = profile.radii.len() - 1;
    let mut inputs = base_inputs(cfg);
    inputs.insert("function".into(), json!(args.function));
    inputs.insert("r_max".into(), json!(args.r_max));
    inputs.insert("intervals".into(), json!(args.intervals));
    inputs.insert("radial_order".into(), json!(args.radial_order));
    inputs.insert("angular".into(), json!(args.angular));
    Ok(Outcome {
        inputs: Value::Object(inputs),
        results: json!({
            "t_rmax": profile.t[last],
            "t_error": profile.t_error[last],
            "a_rmax": profile.a[last],
            "a_error": profile.a_error[last],
            "disk_average": profile.disk_average(args.r_max),
            "monotone": profile.is_monotone(),
            "profile": profile,
            "comparison": comparison,
        }),
        tolerances: tolerances(&[("quadrature_relative", args.tolerance)]),
    })
}

fn recur(args: &RecurArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let h = parse_function(&args.function)?.handle(args.lattice_cutoff)?;
    let d = Circle::new(parse_point("--d-center", &args.d_center)?, args.d_radius);
    let target = SphericalDisk { center: parse_point("--target-center", &args.target_center)?, radius: args.target_radius };
    let w = parse_point("--w", &args.w)?;
    if !(args.d_radius > 0.0) || !(args.target_radius > 0.0 && args.target_radius < 1.0) {
        return Err(CliError::Usage("--d-radius must be positive and --target-radius in (0,1)".into()));
    }
    let opts = CoverageOptions::default();
    let report = recurrence_coverage(&h, d, target, w, &opts)?;
    let mut inputs = base_inputs(cfg);
    inputs.insert("function".into(), json!(args.function));
    inputs.insert("disk".into(), to_value(&d));
    inputs.insert("target".into(), to_value(&target));
    inputs.insert("w".into(), json!([w.re, w.im]));
    Ok(Outcome {
        inputs: Value::Object(inputs),
        results: to_value(&report),
        tolerances: tolerances(&[("gap_resolution", 1e-9), ("boundary_nodes", opts.boundary_nodes as f64)]),
    })
}

fn loglog(args: &LoglogArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let level = args.level.unwrap_or(cfg.depth);
    if level == 0 {
        return Err(CliError::Usage("--level must be at least 1".into()));
    }
    let p = params_for(cfg, level)?;
    let radii = match &args.radii {
        Some(text) => parse_list("--radii", text)?,
        None => (1..=level).map(|n| p.a(n)).collect(),
    };
    let eval = SubharmonicEvaluator::new(p, cfg.b, level)?;
    let opts = LoglogOptions::default();
    let estimates = radii
        .iter()
        .map(|&r| loglog_integral(|z| eval.ln_u(level, z).unwrap_or(f64::NAN), r, args.eps, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let increasing = estimates.windows(2).all(|w| w[1].value > w[0].value);
    let mut inputs = base_inputs(cfg);
    inputs.insert("level".into(), json!(level));
    inputs.insert("radii".into(), json!(radii));
    inputs.insert("eps".into(), json!(args.eps));
    Ok(Outcome {
        inputs: Value::Object(inputs),
        results: json!({"estimates": estimates, "strictly_increasing": increasing}),
        tolerances: tolerances(&[("rel_tol", opts.rel_tol), ("abs_tol", opts.abs_tol)]),
    })
}

/// Field names of a subcommand's report.
pub(crate) fn schema(name: &str) -> Value {
    let results: &[&str] = match name {
        "system" => &["a", "epsilon", "d", "corridor_width", "exact_a", "d_ratio_ok", "table"],
        "eval-u" => &["level", "ln_u_max_log", "ln_u_min_log", "cell", "at"],
        "verify-sh" => &[
            "level", "grid", "b", "prop_i_maxdiff", "prop_i_tolerance", "prop_ii_margin_log", "prop_ii_measured_log",
            "prop_iii_margin_log", "prop_iii_measured_log", "prop_iii_points", "gluing_margin_log", "v_upper_margin_log",
        ],
        "certify" => &["goodness", "factors", "adi", "case_labels", "chain", "lower_bound", "certified_log_growth", "paper_bound_log"],
        "build-g" => &["levels", "csv"],
        "measure" => &[
            "n", "ladder_log", "kb1_fractions", "kb1_exact_lower", "kb1prime_partial_sums", "kb2_fraction", "mu_log", "tails",
        ],
        "nevanlinna" => &["t_rmax", "t_error", "a_rmax", "a_error", "disk_average", "monotone", "profile", "comparison"],
        "recur" => &["covered", "delta", "perturbation", "guaranteed", "base_index", "translated_indices"],
        "loglog" => &["estimates", "strictly_increasing"],
        _ => &[],
    };
    json!({
        "schema_version": SCHEMA_VERSION,
        "subcommand": name,
        "report": ["schema_version", "subcommand", "inputs", "results", "provenance"],
        "inputs": ["epsilon_mode", "epsilon_path", "depth", "B", "grid_n", "seed", "params", "<subcommand flags>"],
        "results": results,
        "provenance": ["seed", "grid", "tolerances", "version"],
    })
}
