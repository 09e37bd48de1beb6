//! `qf`: command-line front end over `qf-core`. Every command prints a JSON
//! report with sorted keys (CSV or a table where noted) and exits 0 on
//! success, 1 when a check fails and 2 on a usage error.

mod report;
mod weights;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qf_core::groups::{irreps, FiniteGroup, GroupSpec};
use qf_core::haarcalc::{
    convolved_moment_estimates, gram_law_check, growth_series, GrowthSystem, WeightedModel,
};
use qf_core::linalg;
use qf_core::modelspace::{enumerate_components, parse_perm_group, sparse_latin_squares};
use qf_core::reproduce::{run_all, CriterionReport, DEFAULT_SEED};
use qf_core::stationarity::{
    inner_faithfulness_certificate, kernel_intersection, solve_weights, verify_weights,
    WeightCheck,
};
use qf_core::twist::{
    fiber_model, find_cocycle, idempotence_rows, stationarity_rows, ModelState, StateRow,
    RELATION_TOL,
};
use serde_json::{json, Value};

use report::{emit, outln, print_json, to_value, tolerance, usage, Failure, Outcome};

const GRAM_TOL: f64 = 1e-10;
const STATE_TOL: f64 = 1e-10;
const IDEMPOTENCE_TOL: f64 = 1e-9;
const MOMENT_Z: f64 = 3.0;
const GROWTH_GUARD: usize = 1_000_000;
const MIN_GRID: usize = 8;

#[derive(Parser, Debug)]
#[command(name = "qf", version, about = "Quasi-flat matrix models: stationarity, moments and the O_2^-1 model")]
struct Cli {
    /// Worker threads for parallel sampling (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SeedArg {
    /// Random seed; defaults to $QF_SEED, then to a fixed value.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Group-level data.
    Group {
        #[command(subcommand)]
        action: GroupCommand,
    },
    /// Components of the model space.
    Components {
        spec: GroupSpec,
        /// Matrix size K (default: the order of the generators).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Solve for stationary weights, or verify weights read from a file.
    Stationarity {
        spec: GroupSpec,
        #[arg(long)]
        k: Option<usize>,
        /// JSON file with exact weights to verify instead of trusting the solver.
        #[arg(long, value_name = "FILE")]
        verify: Option<PathBuf>,
    },
    /// Joint kernel of the components and the inner-faithfulness certificate.
    Faithfulness { spec: GroupSpec },
    /// Moments of the main character under the stationary model.
    Moments {
        spec: GroupSpec,
        /// Highest moment order.
        #[arg(long, default_value_t = 4)]
        p: usize,
        /// Convolution power of the model state.
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        seed: SeedArg,
        /// Emit a `p,exact,estimate,stderr` table instead of JSON.
        #[arg(long)]
        csv: bool,
        /// Largest accepted z-score (at least 3).
        #[arg(long)]
        z_max: Option<f64>,
    },
    /// Both sides of the Gram-matrix law on sampled model points.
    GramCheck {
        #[arg(long, default_value = "dihedral:4")]
        group: GroupSpec,
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 3)]
        samples: usize,
        #[command(flatten)]
        seed: SeedArg,
        /// Accepted |T-side - Gram-side| (at least 1e-10).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Sparse Latin squares over a permutation group.
    Latin {
        /// `cyclic:<n>`, `klein`, `symmetric:<n>` or one-based images `2,1;1,2`.
        permgroup: String,
        /// Number of rows (default: the degree).
        #[arg(long)]
        k: Option<usize>,
        /// Include the squares themselves.
        #[arg(long)]
        list: bool,
    },
    /// Ball volumes of a word system.
    Growth {
        /// A group spec, `integers` or `dinf`.
        system: String,
        #[arg(long, default_value_t = 10)]
        radius: usize,
    },
    /// The 4x4 model for O_2^-1.
    Twist {
        #[command(subcommand)]
        action: TwistCommand,
    },
    /// Run every acceptance criterion.
    ReproduceAll {
        #[command(flatten)]
        seed: SeedArg,
        /// Print the JSON report instead of the table.
        #[arg(long)]
        json: bool,
        /// Also verify a weights file (which must name its group).
        #[arg(long, value_name = "FILE")]
        weights: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum GroupCommand {
    /// Order, classes and irreducible representations.
    Info { spec: GroupSpec },
}

#[derive(Args, Debug)]
struct StateArgs {
    #[arg(long, default_value_t = 4)]
    maxlen: usize,
    /// Quadrature grid size (default: max(8, maxlen + 2)).
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum TwistCommand {
    /// Relation residuals of the fiber model at the given angles.
    Relations {
        #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.7, 1.1])]
        theta: Vec<f64>,
    },
    /// Model state against the twisted Haar state.
    Stationarity(StateArgs),
    /// Model state against its own convolution square.
    Idempotence(StateArgs),
}

fn resolve_seed(arg: &SeedArg) -> Result<u64, Failure> {
    if let Some(s) = arg.seed {
        return Ok(s);
    }
    match std::env::var("QF_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("QF_SEED=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn build(spec: &GroupSpec) -> Result<FiniteGroup, Failure> {
    spec.build().map_err(usage)
}

fn group_info(spec: &GroupSpec) -> Outcome {
    let g = build(spec)?;
    let classes: Vec<Value> = g
        .classes()
        .iter()
        .map(|c| {
            json!({
                "representative": g.label(c[0]),
                "size": c.len(),
                "element_order": g.elem_order(c[0]),
            })
        })
        .collect();
    let reps: Vec<Value> = irreps(&g)?
        .iter()
        .map(|pi| json!({ "label": pi.label(), "dim": pi.dim() }))
        .collect();
    let gens: Vec<&str> = g.generators().iter().map(|&x| g.label(x)).collect();
    print_json(&json!({
        "group": spec.to_string(),
        "name": g.name(),
        "order": g.order(),
        "generators": gens,
        "generator_order": g.gen_order(),
        "exponent": g.exponent(),
        "abelian": g.is_abelian(),
        "classes": classes,
        "irreps": reps,
    }));
    Ok(())
}

fn components(spec: &GroupSpec, k: Option<usize>) -> Outcome {
    let g = build(spec)?;
    let k = k.unwrap_or(g.gen_order());
    let comps = enumerate_components(&g, k).map_err(usage)?;
    let list: Vec<Value> = comps.iter().map(|c| to_value(&c.summary())).collect();
    print_json(&json!({
        "group": spec.to_string(),
        "k": k,
        "count": comps.len(),
        "components": list,
    }));
    Ok(())
}

/// Reads and checks a weights file; `Err` carries the reason it was rejected.
fn check_weights_file(
    spec: &GroupSpec,
    g: &FiniteGroup,
    k: usize,
    path: &std::path::Path,
) -> Result<WeightCheck, String> {
    let file = weights::read(path)?;
    if let Some(named) = file.group.filter(|n| n != spec) {
        return Err(format!("file is for {named}, not {spec}"));
    }
    let comps = enumerate_components(g, k).map_err(|e| e.to_string())?;
    if comps.len() != file.weights.len() {
        return Err(format!(
            "{} weights for {} components",
            file.weights.len(),
            comps.len()
        ));
    }
    verify_weights(g, &comps, &file.weights).map_err(|e| e.to_string())
}

fn verification_value(path: &std::path::Path, outcome: &Result<WeightCheck, String>) -> (Value, bool) {
    let file = path.display().to_string();
    match outcome {
        Ok(chk) => (
            json!({ "file": file, "verified": chk.exact_zero, "check": to_value(chk) }),
            chk.exact_zero,
        ),
        Err(e) => (json!({ "file": file, "verified": false, "error": e }), false),
    }
}

fn stationarity(spec: &GroupSpec, k: Option<usize>, verify: Option<&std::path::Path>) -> Outcome {
    let g = build(spec)?;
    let k = k.unwrap_or(g.gen_order());
    let comps = enumerate_components(&g, k).map_err(usage)?;
    let mut v = to_value(&solve_weights(&g, &comps)?);
    v["group"] = json!(spec.to_string());
    v["k"] = json!(k);
    let Some(path) = verify else {
        print_json(&v);
        return Ok(());
    };
    let (ver, ok) = verification_value(path, &check_weights_file(spec, &g, k, path));
    v["verification"] = ver;
    emit(v, ok, || format!("weights in {} do not verify", path.display()))
}

fn faithfulness(spec: &GroupSpec) -> Outcome {
    let g = build(spec)?;
    let comps = enumerate_components(&g, g.gen_order()).map_err(usage)?;
    let kernel = kernel_intersection(&g, &comps);
    let (cert, reason) = match inner_faithfulness_certificate(&g) {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let ok = kernel.faithful && cert.as_ref().is_none_or(|c| c.faithful);
    let v = json!({
        "group": spec.to_string(),
        "kernel": to_value(&kernel),
        "certificate": cert.as_ref().map(to_value),
        "certificate_unavailable": reason,
        "faithful": ok,
    });
    emit(v, ok, || format!("{spec} is not shown inner faithful"))
}

#[allow(clippy::too_many_arguments)]
fn moments(
    spec: &GroupSpec,
    p: usize,
    r: usize,
    samples: usize,
    seed: u64,
    csv: bool,
    z_max: f64,
) -> Outcome {
    let g = build(spec)?;
    let model = WeightedModel::stationary(&g, g.gen_order()).map_err(usage)?;
    let est = convolved_moment_estimates(&g, &model, p, r, samples, seed).map_err(usage)?;
    let worst = est.iter().map(|e| e.z_score()).fold(0.0, f64::max);
    let ok = worst <= z_max;
    if csv {
        outln!("p,exact,estimate,stderr");
        for e in &est {
            outln!("{},{},{},{}", e.p, e.exact, e.estimate, e.stderr);
        }
        return if ok {
            Ok(())
        } else {
            Err(Failure::Check(format!("largest z-score {worst:.2} exceeds {z_max}")))
        };
    }
    let v = json!({
        "group": spec.to_string(),
        "r": r,
        "samples": samples,
        "seed": seed,
        "moments": to_value(&est),
        "max_z_score": worst,
    });
    emit(v, ok, || format!("largest z-score {worst:.2} exceeds {z_max}"))
}

fn gram_check(spec: &GroupSpec, p: usize, r: usize, samples: usize, seed: u64, tol: f64) -> Outcome {
    let g = build(spec)?;
    let model = WeightedModel::stationary(&g, g.gen_order()).map_err(usage)?;
    let points = (0..samples as u64)
        .map(|s| model.sample(linalg::derive_seed(seed, s)))
        .collect::<Result<Vec<_>, _>>()?;
    let chk = gram_law_check(&points, p, r).map_err(usage)?;
    let ok = chk.abs_diff < tol && chk.min_gram_eigenvalue > -tol;
    let mut v = to_value(&chk);
    v["group"] = json!(spec.to_string());
    v["seed"] = json!(seed);
    emit(v, ok, || format!("|T-side - Gram-side| = {:.2e}", chk.abs_diff))
}

fn latin(spec: &str, k: Option<usize>, list: bool) -> Outcome {
    let perms = parse_perm_group(spec).map_err(usage)?;
    let degree = perms.first().map_or(0, Vec::len);
    let k = k.unwrap_or(degree);
    let squares = sparse_latin_squares(&perms, k).map_err(usage)?;
    let mut v = json!({
        "group": spec,
        "degree": degree,
        "group_order": perms.len(),
        "k": k,
        "count": squares.len(),
    });
    if list {
        let rows: Vec<Vec<Vec<usize>>> = squares
            .iter()
            .map(|t| t.iter().map(|&s| perms[s].iter().map(|x| x + 1).collect()).collect())
            .collect();
        v["squares"] = json!(rows);
    }
    print_json(&v);
    Ok(())
}

fn growth(system: &str, radius: usize) -> Outcome {
    let owned;
    let sys = match system.trim().to_ascii_lowercase().as_str() {
        "integers" | "z" => GrowthSystem::Integers,
        "dinf" | "infinite-dihedral" => GrowthSystem::InfiniteDihedral,
        _ => {
            owned = build(&system.parse::<GroupSpec>().map_err(usage)?)?;
            GrowthSystem::Finite(&owned)
        }
    };
    let volumes = growth_series(&sys, radius, GROWTH_GUARD).map_err(usage)?;
    print_json(&json!({ "system": system, "radius": radius, "volumes": volumes }));
    Ok(())
}

fn twist_relations(thetas: &[f64]) -> Outcome {
    let sigma = find_cocycle()?;
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for &t in thetas {
        let res = fiber_model(t, &sigma).map_err(usage)?.residuals();
        worst = worst.max(res.max());
        rows.push(json!({ "theta": t, "residuals": to_value(&res), "max": res.max() }));
    }
    let v = json!({
        "sigma": to_value(&sigma),
        "angles": rows,
        "max_residual": worst,
        "tolerance": RELATION_TOL,
    });
    emit(v, worst < RELATION_TOL, || format!("relation residual {worst:.2e}"))
}

fn twist_state(args: &StateArgs, idempotence: bool) -> Outcome {
    let default_tol = if idempotence { IDEMPOTENCE_TOL } else { STATE_TOL };
    let tol = tolerance(default_tol, args.tol)?;
    let grid = args.grid.unwrap_or(MIN_GRID.max(args.maxlen + 2));
    let sigma = find_cocycle()?;
    let state = ModelState::new(&sigma, grid).map_err(usage)?;
    let rows: Vec<StateRow> = if idempotence {
        idempotence_rows(&state, args.maxlen)
    } else {
        stationarity_rows(&state, args.maxlen)
    }
    .map_err(usage)?;
    let worst = rows.iter().map(|r| r.abs_error).fold(0.0, f64::max);
    let ok = worst < tol;
    let what = || format!("max abs_error {worst:.2e} exceeds {tol:e}");
    if args.json {
        let v = json!({
            "sigma": to_value(&sigma),
            "grid": grid,
            "maxlen": args.maxlen,
            "max_abs_error": worst,
            "rows": to_value(&rows),
        });
        return emit(v, ok, what);
    }
    let width = rows.iter().map(|r| r.word.len()).max().unwrap_or(4).max(4);
    let (lhs, rhs) = if idempotence { ("phi*phi", "phi") } else { ("model", "target") };
    outln!("{:<width$}  {lhs:>12}  {rhs:>12}  {:>9}", "word", "abs_error");
    for r in &rows {
        outln!(
            "{:<width$}  {:>12.9}  {:>12.9}  {:>9.1e}",
            r.word, r.model_value, r.target_value, r.abs_error
        );
    }
    outln!("max abs_error {worst:.2e} over {} words (grid {grid})", rows.len());
    if ok {
        Ok(())
    } else {
        Err(Failure::Check(what()))
    }
}

fn reproduce_all(seed: u64, as_json: bool, weights: Option<&std::path::Path>) -> Outcome {
    let reports: Vec<CriterionReport> = run_all(seed);
    let mut ok = reports.iter().all(|r| r.passed);
    let mut extra = None;
    if let Some(path) = weights {
        let outcome = weights::read(path).and_then(|f| {
            let spec = f
                .group
                .ok_or_else(|| format!("{} does not name its group", path.display()))?;
            let g = spec.build().map_err(|e| e.to_string())?;
            check_weights_file(&spec, &g, g.gen_order(), path)
        });
        let (v, passed) = verification_value(path, &outcome);
        ok &= passed;
        extra = Some((v, passed));
    }
    if as_json {
        let mut v = json!({ "seed": seed, "criteria": to_value(&reports), "passed": ok });
        if let Some((w, _)) = &extra {
            v["weights_file"] = w.clone();
        }
        print_json(&v);
    } else {
        outln!("{:>3}  {:<34}  {:<6}  {:>8}", "id", "criterion", "result", "seconds");
        for r in &reports {
            let verdict = if r.passed { "PASS" } else { "FAIL" };
            outln!("{:>3}  {:<34}  {verdict:<6}  {:>8.2}", r.id, r.name, r.seconds);
            if !r.passed {
                for d in &r.details {
                    outln!("       {d}");
                }
            }
        }
        if let Some((w, passed)) = &extra {
            let verdict = if *passed { "PASS" } else { "FAIL" };
            outln!("{:>3}  {:<34}  {verdict:<6}", "-", "weights file");
            if let Some(e) = w.get("error").and_then(Value::as_str) {
                outln!("       {e}");
            }
        }
        let passed = reports.iter().filter(|r| r.passed).count();
        outln!("{passed}/{} criteria passed (seed {seed})", reports.len());
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Check("not every criterion passed".into()))
    }
}

fn dispatch(cli: Cli) -> Outcome {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Group {
            action: GroupCommand::Info { spec },
        } => group_info(&spec),
        Command::Components { spec, k } => components(&spec, k),
        Command::Stationarity { spec, k, verify } => stationarity(&spec, k, verify.as_deref()),
        Command::Faithfulness { spec } => faithfulness(&spec),
        Command::Moments {
            spec,
            p,
            r,
            samples,
            seed,
            csv,
            z_max,
        } => {
            let z = tolerance(MOMENT_Z, z_max)?;
            moments(&spec, p, r, samples, resolve_seed(&seed)?, csv, z)
        }
        Command::GramCheck {
            group,
            p,
            r,
            samples,
            seed,
            tol,
        } => {
            let tol = tolerance(GRAM_TOL, tol)?;
            gram_check(&group, p, r, samples, resolve_seed(&seed)?, tol)
        }
        Command::Latin { permgroup, k, list } => latin(&permgroup, k, list),
        Command::Growth { system, radius } => growth(&system, radius),
        Command::Twist { action } => match action {
            TwistCommand::Relations { theta } => twist_relations(&theta),
            TwistCommand::Stationarity(a) => twist_state(&a, false),
            TwistCommand::Idempotence(a) => twist_state(&a, true),
        },
        Command::ReproduceAll {
            seed,
            json,
            weights,
        } => reproduce_all(resolve_seed(&seed)?, json, weights.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qf: {f}");
            f.exit_code()
        }
    }
}
