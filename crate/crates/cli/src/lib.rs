//! Command-line experiment runner for `mcflab`.

pub mod config;
pub mod experiments;
pub mod presets;

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::{Config, ConfigError, Layers};
use experiments::{Ctx, Outcome};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mcflab", version, about = "Mean curvature flow laboratory")]
pub struct Cli {
    /// Output directory (default: mcflab-out/<command>).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML configuration file layered over the defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for randomized experiments.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Override a config key, e.g. `--set flow.t_end=0.1`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct Shape {
    /// Dimension of the hypersurface.
    #[arg(long)]
    pub n: Option<usize>,
    /// sphere, ellipsoid or capsule.
    #[arg(long)]
    pub shape: Option<String>,
    #[arg(long)]
    pub nodes: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a flow and record its history.
    Flow {
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        snapshot_dt: Option<f64>,
    },
    /// Shoot a translator or expander and audit it.
    Soliton {
        /// translator or expander.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        rho_max: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        tip_height: Option<f64>,
        /// Comma-separated pinching constants.
        #[arg(long)]
        alpha_list: Option<String>,
    },
    /// Audit a curvature estimate on a flow.
    Verify {
        /// umbilic, interior, pinching or barrier.
        #[arg(long)]
        estimate: Option<String>,
        /// Recorded history to audit instead of running a new flow.
        #[arg(long)]
        history: Option<PathBuf>,
        #[command(flatten)]
        shape: Shape,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        l: Option<f64>,
        #[arg(long)]
        eps_list: Option<String>,
        #[arg(long)]
        r_list: Option<String>,
        #[arg(long)]
        interior_l: Option<String>,
        #[arg(long)]
        barrier_p: Option<f64>,
    },
    /// Doubling point selection with an exhaustive certificate check.
    Pick {
        #[arg(long)]
        history: Option<PathBuf>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        fields: Option<usize>,
        #[arg(long)]
        seed_snapshot: Option<usize>,
        #[arg(long)]
        seed_node: Option<usize>,
    },
    /// Singularity-type evidence for a flow.
    Classify {
        #[arg(long)]
        history: Option<PathBuf>,
        #[command(flatten)]
        shape: Shape,
        /// Comma-separated horizons.
        #[arg(long)]
        horizons: Option<String>,
    },
    /// Approximation of an unbounded convex body by smooth compact flows.
    Existence {
        #[arg(long)]
        n: Option<usize>,
        /// paraboloid or cone.
        #[arg(long)]
        shape: Option<String>,
        #[arg(long)]
        heights: Option<String>,
        #[arg(long)]
        epss: Option<String>,
    },
    /// Run a registered preset.
    Preset {
        /// Preset name; omit to list the registry.
        name: Option<String>,
    },
}

type Pairs = Vec<(&'static str, Option<String>)>;

fn shape_pairs(s: &Shape) -> Pairs {
    vec![
        ("n", s.n.map(|v| v.to_string())),
        ("geometry.shape", s.shape.clone()),
        ("geometry.nodes", s.nodes.map(|v| v.to_string())),
    ]
}

fn some<T: ToString>(v: &Option<T>) -> Option<String> {
    v.as_ref().map(|x| x.to_string())
}

/// A resolved invocation, ready to run.
pub struct Plan {
    pub label: String,
    pub config: Config,
    pub history: Option<PathBuf>,
    pub run: presets::Pipeline,
}

/// Layers defaults, preset, config file, `--set` and subcommand flags.
pub fn plan(cli: &Cli) -> anyhow::Result<Plan> {
    let mut layers = Layers::default();
    let mut history = None;
    let (label, run, flags): (String, presets::Pipeline, Pairs) = match &cli.command {
        Command::Flow { shape, t_end, snapshot_dt } => {
            let mut p = shape_pairs(shape);
            p.push(("flow.t_end", some(t_end)));
            p.push(("flow.snapshot_dt", some(snapshot_dt)));
            ("flow".into(), experiments::flow, p)
        }
        Command::Soliton { kind, n, rho_max, step, tip_height, alpha_list } => (
            "soliton".into(),
            experiments::soliton,
            vec![
                ("soliton.kind", kind.clone()),
                ("n", some(n)),
                ("soliton.rho_max", some(rho_max)),
                ("soliton.step", some(step)),
                ("soliton.tip_height", some(tip_height)),
                ("soliton.alpha_list", alpha_list.clone()),
            ],
        ),
        Command::Verify { estimate, history: h, shape, alpha, l, eps_list, r_list, interior_l, barrier_p } => {
            history = h.clone();
            let mut p = shape_pairs(shape);
            p.extend([
                ("audit.estimate", estimate.clone()),
                ("audit.alpha", some(alpha)),
                ("audit.l", some(l)),
                ("audit.eps_list", eps_list.clone()),
                ("audit.r_list", r_list.clone()),
                ("audit.interior_l", interior_l.clone()),
                ("audit.barrier_p", some(barrier_p)),
            ]);
            ("verify".into(), experiments::verify, p)
        }
        Command::Pick { history: h, delta, fields, seed_snapshot, seed_node } => {
            history = h.clone();
            (
                "pick".into(),
                experiments::pick,
                vec![
                    ("spacetime.delta", some(delta)),
                    ("spacetime.random_fields", some(fields)),
                    ("spacetime.seed_snapshot", some(seed_snapshot)),
                    ("spacetime.seed_node", some(seed_node)),
                ],
            )
        }
        Command::Classify { history: h, shape, horizons } => {
            history = h.clone();
            let mut p = shape_pairs(shape);
            p.push(("spacetime.horizons", horizons.clone()));
            ("classify".into(), experiments::classify, p)
        }
        Command::Existence { n, shape, heights, epss } => (
            "existence".into(),
            experiments::existence,
            vec![
                ("n", some(n)),
                ("existence.shape", shape.clone()),
                ("existence.heights", heights.clone()),
                ("existence.epss", epss.clone()),
            ],
        ),
        Command::Preset { name } => {
            let name = name.as_deref().context("missing preset name")?;
            let preset = presets::find(name).with_context(|| format!("unknown preset `{name}`"))?;
            preset.apply(&mut layers)?;
            (preset.name.into(), preset.run, Vec::new())
        }
    };
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        layers.apply_document(&text)?;
    }
    for o in &cli.overrides {
        layers.apply_override(o)?;
    }
    for (k, v) in flags {
        if let Some(v) = v {
            layers.apply_override(&format!("{k}={v}"))?;
        }
    }
    Ok(Plan {
        label,
        config: layers.resolve()?,
        history,
        run,
    })
}

/// Runs a plan, writing the manifest and report into `out`.
pub fn execute(plan: &Plan, out: PathBuf, seed: u64, threads: Option<usize>) -> anyhow::Result<Outcome> {
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let start = Instant::now();
    let ctx = Ctx {
        cfg: &plan.config,
        out: out.clone(),
        seed,
        history: plan.history.clone(),
    };
    let outcome = (plan.run)(&ctx).with_context(|| format!("{} failed", plan.label))?;
    let wall = start.elapsed().as_secs_f64();
    let manifest = json!({
        "tool": "mcflab",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": plan.label,
        "seed": seed,
        "threads": threads,
        "history": plan.history,
        "config": plan.config,
        "wall_time_s": wall,
        "pass": outcome.pass(),
        "checks": outcome.checks,
    });
    fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    fs::write(out.join("config.toml"), toml::to_string(&plan.config)?)?;
    fs::write(out.join("report.json"), serde_json::to_string_pretty(&outcome)?)?;
    Ok(outcome)
}

fn is_config_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| c.downcast_ref::<ConfigError>().is_some())
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn run(cli: Cli) -> i32 {
    if let Command::Preset { name: None } = &cli.command {
        for p in presets::PRESETS {
            println!("{:<24} {}", p.name, p.about);
        }
        return EXIT_PASS;
    }
    if let Some(t) = cli.threads {
        // A second initialisation in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let plan = match plan(&cli) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_USAGE;
        }
    };
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("mcflab-out").join(&plan.label));
    match execute(&plan, out.clone(), cli.seed, cli.threads) {
        Ok(o) => {
            for c in &o.checks {
                println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            let verdict = if o.pass() { "PASS" } else { "FAIL" };
            println!("{} {verdict} ({} checks, artifacts in {})", plan.label, o.checks.len(), out.display());
            if o.pass() {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_config_error(&e) {
                EXIT_USAGE
            } else {
                EXIT_FAIL
            }
        }
    }
}
