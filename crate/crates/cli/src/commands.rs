//! Subcommand implementations. Each returns the process exit code.

use clap::ArgMatches;
use rayon::prelude::*;
use serde::Serialize;
use std::path::{Path, PathBuf};

use sbm_ising::cycles::{
    cycle_stats, degree_estimate, lambda_from_counts, lambda_magnitude_estimate,
};
use sbm_ising::inference::{build_curve, cluster, cluster_with_beta, estimate_r, CurveConfig};
use sbm_ising::ising::{free_energy_exact, free_energy_ti, FreeEnergyEstimate, TiConfig};
use sbm_ising::oracle::{brute_cycles, brute_log_partition, grid_min_objective, OracleConfig};
use sbm_ising::rng::derive_seed2;
use sbm_ising::sbm::{
    read_graph, read_labels, sample_interpolation, sample_sbm, write_graph, write_labels,
};
use sbm_ising::theory::{c_r_lambda, theory_report, x_star, y_star, SbmParams};
use sbm_ising::{Error, Result};

use crate::args::*;
use crate::config::{apply, parse_grid, resolve_beta};
use crate::curvefile::{read_curve, write_curve};
use crate::output::{csv_header, emit};

/// Shared per-invocation context.
pub struct Ctx<'a> {
    pub seed: u64,
    pub json: bool,
    pub config: Option<&'a Path>,
    pub matches: &'a ArgMatches,
}

#[derive(Serialize)]
struct GenerateResult {
    n: usize,
    m: usize,
    graph: String,
    labels: Option<String>,
}

pub fn generate(args: GenerateArgs, ctx: &Ctx) -> Result<i32> {
    let args = apply(args, ctx.config, "generate", ctx.matches)?;
    let params = SbmParams::new(args.d, args.lambda, args.r, args.n)?;
    let g = sample_sbm(&params, ctx.seed)?;
    write_graph(&g, &args.out)?;
    if let Some(path) = &args.labels {
        write_labels(g.labels().expect("sampled graphs carry labels"), path)?;
    }
    let result = GenerateResult {
        n: g.node_count(),
        m: g.edge_count(),
        graph: args.out.display().to_string(),
        labels: args.labels.as_ref().map(|p| p.display().to_string()),
    };
    let human = format!(
        "generated SBM graph: n={} m={} -> {}",
        result.n, result.m, result.graph
    );
    emit(None, ctx.json, &human, ctx.seed, &args, &result)?;
    Ok(0)
}

#[derive(Serialize)]
struct InterpolateResult {
    sizes: (usize, usize, usize),
    rewire_count: usize,
    edges_gtilde: usize,
    edges_g0prime: usize,
    edges_g1prime: usize,
    files: Vec<String>,
}

pub fn interpolate(args: InterpolateArgs, ctx: &Ctx) -> Result<i32> {
    let args = apply(args, ctx.config, "interpolate", ctx.matches)?;
    let params = SbmParams::new(args.d, args.lambda, args.r, args.n)?;
    let bundle = sample_interpolation(&params, args.delta, ctx.seed)?;
    let mut files = Vec::new();
    for (tag, g) in [
        ("gtilde", &bundle.g_tilde),
        ("g0prime", &bundle.g0_prime),
        ("g1prime", &bundle.g1_prime),
    ] {
        let graph_path = PathBuf::from(format!("{}_{tag}.txt", args.out_prefix));
        let label_path = PathBuf::from(format!("{}_{tag}_labels.txt", args.out_prefix));
        write_graph(g, &graph_path)?;
        write_labels(g.labels().expect("interpolation graphs carry labels"), &label_path)?;
        files.push(graph_path.display().to_string());
        files.push(label_path.display().to_string());
    }
    let result = InterpolateResult {
        sizes: bundle.sizes,
        rewire_count: bundle.rewire_count,
        edges_gtilde: bundle.g_tilde.edge_count(),
        edges_g0prime: bundle.g0_prime.edge_count(),
        edges_g1prime: bundle.g1_prime.edge_count(),
        files,
    };
    let human = format!(
        "interpolation bundle: |N0|={} |N1|={} |NΔ|={} rewires={}",
        result.sizes.0, result.sizes.1, result.sizes.2, result.rewire_count
    );
    emit(args.out.as_deref(), ctx.json, &human, ctx.seed, &args, &result)?;
    Ok(0)
}

#[derive(Serialize)]
struct EstimateResult {
    d_hat: f64,
    k: usize,
    c_k: u64,
    lambda_hat: Option<f64>,
    lambda_hat_abs: Option<f64>,
}

pub fn estimate(args: EstimateArgs, ctx: &Ctx) -> Result<i32> {
    let args = apply(args, ctx.config, "estimate", ctx.matches)?;
    let g = read_graph(&args.input)?;
    let stats = cycle_stats(&g, args.k)?;
    if stats.d_hat == 0.0 {
        return Err(Error::DegenerateGraph("lambda estimate needs d_hat > 0".into()));
    }
    let (lambda_hat, lambda_hat_abs) = if args.k % 2 == 1 {
        (Some(lambda_from_counts(stats.c_k as f64, stats.d_hat, args.k)), None)
    } else {
        (None, Some(lambda_magnitude_estimate(&g, args.k)?))
    };
    let result = EstimateResult {
        d_hat: stats.d_hat,
        k: args.k,
        c_k: stats.c_k,
        lambda_hat,
        lambda_hat_abs,
    };
    let human = match lambda_hat {
        Some(l) => format!("d_hat={} C_{}={} lambda_hat={l}", result.d_hat, args.k, result.c_k),
        None => format!(
            "d_hat={} C_{}={} |lambda_hat|={}",
            result.d_hat,
            args.k,
            result.c_k,
            lambda_hat_abs.expect("even k")
        ),
    };
    emit(args.out.as_deref(), ctx.json, &human, ctx.seed, &args, &result)?;
    Ok(0)
}

#[derive(Serialize)]
struct FreeEnergyResult {
    n: usize,
    m: usize,
    estimate: FreeEnergyEstimate,
}

pub fn free_energy(args: FreeEnergyArgs, ctx: &Ctx) -> Result<i32> {
    let args = apply(args, ctx.config, "free-energy", ctx.matches)?;
    let g = read_graph(&args.input)?;
    let beta = resolve_beta(&args.beta, degree_estimate(&g))?;
    let estimate = match args.method {
        FeMethodArg::Exact => free_energy_exact(&g, beta)?,
        FeMethodArg::Ti => {
            let cfg = TiConfig {
                grid_points: args.grid,
                sweeps_per_point: args.sweeps,
                burn_in: args.burn_in,
                chains: args.chains,
            };
            free_energy_ti(&g, beta, &cfg, ctx.seed)?
        }
    };
    let result =
        FreeEnergyResult { n: g.node_count(), m: g.edge_count(), estimate };
    let human = format!(
        "(1/n) Z({beta:.6}, G) = {:.6} +- {:.6}",
        result.estimate.value, result.estimate.std_err
    );
    emit(args.out.as_deref(), ctx.json, &human, ctx.seed, &args, &result)?;
    Ok(0)
}

#[derive(Serialize)]
struct BuildCurveResult {
    points: usize,
    beta: f64,
    out: String,
    unreliable_points: Vec<usize>,
}

pub fn build_curve_cmd(args: BuildCurveArgs, ctx: &Ctx) -> Result<i32> {
    let args = apply(args, ctx.config, "build-curve", ctx.matches)?;
    let r_grid = parse_grid(&args.r_grid)?;
    let beta = match args.beta.trim() {
        "auto" => None,
        other => Some(resolve_beta(other, args.d)?),
    };
    let ti = TiConfig {
        grid_points: args.grid,
        sweeps_per_point: args.sweeps,
        burn_in: args.burn_in,
        chains: args.chains,
    };
    let cfg = CurveConfig { r_grid, graphs_per_point: args.graphs, ti };
    let curve = build_curve(args.d, args.lambda, beta, args.n, &cfg, ctx.seed)?;
    write_curve(&args.out, &curve, &ti, &csv_header(ctx.seed, &args))?;
    let result = BuildCurveResult {
        points: curve.points.len(),
        beta: curve.beta,
        out: args.out.display().to_string(),
        unreliable_points: curve.unreliable_points(),
    };
    let mut human = format!(
        "curve with {} points at beta={:.6} -> {}",
        result.points, result.beta, result.out
    );
    if !result.unreliable_points.is_empty() {
        human.push_str(&format!(
            "\nwarning: std_err exceeds half the neighbor gap at point(s) {:?}; \
             inversion there is unreliable",
            result.unreliable_points
        ));
    }
    emit(None, ctx.json, &human, ctx.seed, &args, &result)?;
    Ok(0)
}

#[derive(Serialize)]
struct EstimateRResult {
    r_hat: f64,
    ci: (f64, f64),
    observed: f64,
    observed_std_err: f64,
    beta: f64,
    warnings: Vec<String>,
}

pub fn estimate_r_cmd(args: EstimateRArgs, ctx: &Ctx) -> Result<i32> {
    let args = apply(args, ctx.config, "estimate-r", ctx.matches)?;
    let (curve, ti) = read_curve(&args.curve)?;
    let g = read_graph(&args.input)?;
    let est = estimate_r(&curve, &g, &ti, ctx.seed)?;
    let result = EstimateRResult {
        r_hat: est.r_hat,
        ci: est.ci,
        observed: est.observed,
        observed_std_err: est.observed_std_err,
        beta: curve.beta,
        warnings: est.warnings.clone(),
    };
    let mut human = format!(
        "r_hat = {:.4}, 95% CI [{:.4}, {:.4}]",
        result.r_hat, result.ci.0, result.ci.1
    );
    for w in &est.warnings {
        human.push_str(&format!("\nwarning: {w}"));
    }
    emit(args.out.as_deref(), ctx.json, &human, ctx.seed, &args, &result)?;
    Ok(0)
}

#[derive(Serialize)]
struct ClusterSummary {
    n: usize,
    sweeps: usize,
    l_prime: u8,
    d_hat: f64,
    beta: f64,
    tau_ones: usize,
    overlap: Option<f64>,
    x_sigma: Option<f64>,
    y_sigma: Option<f64>,
    m0_fraction: Option<f64>,
    m1_fraction: Option<f64>,
    labels_out: Option<String>,
}

pub fn cluster_cmd(args: ClusterArgs, ctx: &Ctx) -> Result<i32> {
    let args = apply(args, ctx.config, "cluster", ctx.matches)?;
    let mut g = read_graph(&args.input)?;
    if let Some(path) = &args.labels {
        g = g.with_labels(read_labels(path)?)?;
    }
    let res = match args.beta.trim() {
        "auto" => cluster(&g, args.sweeps, ctx.seed)?,
        other => cluster_with_beta(&g, resolve_beta(other, 1.0)?, args.sweeps, ctx.seed)?,
    };
    if let Some(path) = &args.out_labels {
        write_labels(&res.tau, path)?;
    }
    let result = ClusterSummary {
        n: g.node_count(),
        sweeps: args.sweeps,
        l_prime: res.l_prime,
        d_hat: res.d_hat,
        beta: res.beta,
        tau_ones: res.tau.iter().filter(|&&t| t == 1).count(),
        overlap: res.overlap,
        x_sigma: res.x_sigma,
        y_sigma: res.y_sigma,
        m0_fraction: res.m0_fraction,
        m1_fraction: res.m1_fraction,
        labels_out: args.out_labels.as_ref().map(|p| p.display().to_string()),
    };
    let mut human = format!(
        "clustered n={} at beta={:.6} (d_hat={:.4}); |tau=1| = {}",
        result.n, result.beta, result.d_hat, result.tau_ones
    );
    if let Some(o) = result.overlap {
        human.push_str(&format!(
            ", overlap={o:.4} (x={:.4}, y={:.4})",
            result.x_sigma.unwrap_or(f64::NAN),
            result.y_sigma.unwrap_or(f64::NAN)
        ));
    }
    emit(args.out.as_deref(), ctx.json, &human, ctx.seed, &args, &result)?;
    Ok(0)
}

#[derive(Serialize)]
struct VerifyTheoryResult {
    rows: usize,
    pairs_feasible: usize,
    pairs_skipped: usize,
    max_closed_form_delta: f64,
    max_argmin_delta: f64,
    tolerance: f64,
    passed: bool,
    out: Option<String>,
}

pub fn verify_theory(args: VerifyTheoryArgs, ctx: &Ctx) -> Result<i32> {
    let args = apply(args, ctx.config, "verify-theory", ctx.matches)?;
    let d_grid = parse_grid(&args.d_grid)?;
    let beta_grid = parse_grid(&args.beta_grid)?;
    let r_grid = parse_grid(&args.r_grid)?;
    let lambda_grid = parse_grid(&args.lambda_grid)?;
    for &l in &lambda_grid {
        if l >= 0.0 {
            return Err(Error::UnsupportedRegime(format!(
                "verify-theory covers the lambda < 0 closed forms only, got {l}"
            )));
        }
    }

    let mut feasible = Vec::new();
    let mut skipped = 0usize;
    for &r in &r_grid {
        for &l in &lambda_grid {
            if 1.0 + r * l >= 0.0 {
                feasible.push((r, l));
            } else {
                skipped += 1;
            }
        }
    }

    let oracle_cfg = OracleConfig { grid_resolution: args.grid_resolution, ..Default::default() };
    let checks: Vec<Result<(f64, f64, f64, f64, f64)>> = feasible
        .par_iter()
        .map(|&(r, l)| {
            let gm = grid_min_objective(r, l, &oracle_cfg)?;
            let closed = c_r_lambda(r, l)?;
            Ok((gm.value, gm.x, gm.y, (closed - gm.value).abs(), closed))
        })
        .collect();

    let mut csv = csv_header(ctx.seed, &args);
    csv.push_str(
        "d,lambda,r,beta,c_closed,c_grid,delta_c,grid_x,grid_y,x_star,y_star,varepsilon0,\
         eps0,eps1,c_d_r_lambda_beta,item1,item2a,item2b,item2c,item2d,all\n",
    );
    let mut rows = 0usize;
    let mut max_delta = 0.0f64;
    let mut max_argmin_delta = 0.0f64;
    for ((r, l), check) in feasible.iter().zip(checks) {
        let (c_grid, gx, gy, delta, c_closed) = check?;
        let ys = y_star(*r, *l)?;
        max_delta = max_delta.max(delta);
        max_argmin_delta = max_argmin_delta.max((gx - x_star()).abs().max((gy - ys).abs()));
        for &d in &d_grid {
            for &beta in &beta_grid {
                let params = SbmParams::new(d, *l, *r, 2)?;
                let rep = theory_report(&params, beta)?;
                let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
                csv.push_str(&format!(
                    "{d},{l},{r},{beta},{c_closed},{c_grid},{delta},{gx},{gy},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    rep.x_star,
                    rep.y_star,
                    opt(rep.varepsilon0),
                    opt(rep.eps0),
                    opt(rep.eps1),
                    opt(rep.c_d_r_lambda_beta),
                    rep.condition1.item1,
                    rep.condition1.item2a,
                    rep.condition1.item2b,
                    rep.condition1.item2c,
                    rep.condition1.item2d,
                    rep.condition1.all()
                ));
                rows += 1;
            }
        }
    }
    if let Some(path) = &args.out {
        std::fs::write(path, &csv)?;
    }

    let passed = max_delta <= args.tolerance;
    let result = VerifyTheoryResult {
        rows,
        pairs_feasible: feasible.len(),
        pairs_skipped: skipped,
        max_closed_form_delta: max_delta,
        max_argmin_delta,
        tolerance: args.tolerance,
        passed,
        out: args.out.as_ref().map(|p| p.display().to_string()),
    };
    let human = format!(
        "verify-theory: {} rows over {} feasible (r,lambda) pairs ({} skipped); \
         max closed-form delta {:.3e} (tolerance {:.1e}) -> {}",
        result.rows,
        result.pairs_feasible,
        result.pairs_skipped,
        result.max_closed_form_delta,
        result.tolerance,
        if passed { "PASS" } else { "FAIL" }
    );
    emit(None, ctx.json, &human, ctx.seed, &args, &result)?;
    Ok(if passed { 0 } else { 1 })
}

#[derive(Serialize)]
struct InterpolationCheckResult {
    pairs: usize,
    beta: f64,
    sizes: (usize, usize, usize),
    rewire_count: usize,
    mean_diff: f64,
    std_err: f64,
    sigma: f64,
    positive_beyond_3sigma: bool,
}

pub fn interpolation_check(args: InterpolationCheckArgs, ctx: &Ctx) -> Result<i32> {
    let args = apply(args, ctx.config, "interpolation-check", ctx.matches)?;
    if args.pairs < 2 {
        return Err(Error::InvalidParams("interpolation-check needs pairs >= 2".into()));
    }
    let params = SbmParams::new(args.d, args.lambda, args.r, args.n)?;
    let beta = resolve_beta(&args.beta, args.d)?;
    let ti = TiConfig {
        grid_points: args.grid,
        sweeps_per_point: args.sweeps,
        burn_in: args.burn_in,
        chains: args.chains,
    };

    let runs: Vec<Result<(f64, (usize, usize, usize), usize)>> = (0..args.pairs)
        .into_par_iter()
        .map(|p| {
            let bundle =
                sample_interpolation(&params, args.delta, derive_seed2(ctx.seed, 1, p as u64))?;
            // common random numbers: the paired runs share the TI seed
            let ti_seed = derive_seed2(ctx.seed, 2, p as u64);
            let z0 = free_energy_ti(&bundle.g0_prime, beta, &ti, ti_seed)?;
            let z1 = free_energy_ti(&bundle.g1_prime, beta, &ti, ti_seed)?;
            Ok((z0.value - z1.value, bundle.sizes, bundle.rewire_count))
        })
        .collect();

    let mut diffs = Vec::with_capacity(args.pairs);
    let mut sizes = (0, 0, 0);
    let mut rewire_count = 0;
    for run in runs {
        let (d, s, rw) = run?;
        diffs.push(d);
        sizes = s;
        rewire_count = rw;
    }
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let var = diffs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (diffs.len() as f64 - 1.0);
    let std_err = (var / diffs.len() as f64).sqrt();
    let sigma = if std_err > 0.0 { mean / std_err } else { f64::INFINITY };

    let result = InterpolationCheckResult {
        pairs: args.pairs,
        beta,
        sizes,
        rewire_count,
        mean_diff: mean,
        std_err,
        sigma,
        positive_beyond_3sigma: mean > 0.0 && sigma > 3.0,
    };
    let human = format!(
        "(1/n) E[Z(G'0) - Z(G'1)] = {:.6} +- {:.6} ({:.2} sigma) over {} pairs -> {}",
        mean,
        std_err,
        sigma,
        args.pairs,
        if result.positive_beyond_3sigma { "positive beyond 3 sigma" } else { "NOT significant" }
    );
    emit(args.out.as_deref(), ctx.json, &human, ctx.seed, &args, &result)?;
    Ok(0)
}

#[derive(Serialize)]
struct DevConfig<'a> {
    command: &'a str,
    input: Option<String>,
    k: Option<usize>,
    beta: Option<f64>,
    r: Option<f64>,
    lambda: Option<f64>,
    resolution: Option<usize>,
}

pub fn dev(cmd: DevCommand, ctx: &Ctx) -> Result<i32> {
    let cfg = OracleConfig::default();
    match cmd {
        DevCommand::BruteCycles { input, k, out } => {
            let g = read_graph(&input)?;
            let count = brute_cycles(&g, k, &cfg)?;
            let config = DevConfig {
                command: "brute-cycles",
                input: Some(input.display().to_string()),
                k: Some(k),
                beta: None,
                r: None,
                lambda: None,
                resolution: None,
            };
            emit(out.as_deref(), ctx.json, &format!("C_{k} = {count}"), ctx.seed, &config, &count)?;
        }
        DevCommand::BruteZ { input, beta, out } => {
            let g = read_graph(&input)?;
            let z = brute_log_partition(&g, beta, &cfg)?;
            let config = DevConfig {
                command: "brute-z",
                input: Some(input.display().to_string()),
                k: None,
                beta: Some(beta),
                r: None,
                lambda: None,
                resolution: None,
            };
            emit(out.as_deref(), ctx.json, &format!("Z({beta}, G) = {z}"), ctx.seed, &config, &z)?;
        }
        DevCommand::GridMin { r, lambda, resolution, out } => {
            let oracle_cfg = OracleConfig { grid_resolution: resolution, ..cfg };
            let gm = grid_min_objective(r, lambda, &oracle_cfg)?;
            let config = DevConfig {
                command: "grid-min",
                input: None,
                k: None,
                beta: None,
                r: Some(r),
                lambda: Some(lambda),
                resolution: Some(resolution),
            };
            #[derive(Serialize)]
            struct GridMinResult {
                value: f64,
                x: f64,
                y: f64,
            }
            let result = GridMinResult { value: gm.value, x: gm.x, y: gm.y };
            emit(
                out.as_deref(),
                ctx.json,
                &format!("min f = {} at (x, y) = ({}, {})", gm.value, gm.x, gm.y),
                ctx.seed,
                &config,
                &result,
            )?;
        }
    }
    Ok(0)
}
