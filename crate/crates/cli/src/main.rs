use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use entropyforge_core::delta_ext::{
    is_trivial_delta, quotient_to_gamma, sample_delta_word, schedule_scales, ScaleMode,
};
use entropyforge_core::exponents::{
    design_constant, oscillation_report, DesignTarget, ExponentProfile, OscillatingDesign, DESIGN_LEVELS,
};
use entropyforge_core::lamplighter_ref::{lamp_stats, log_log_slope};
use entropyforge_core::walker::{
    drift_bounds, entropy_exact, estimate_walk, exact_distributions, expected_support_exact, norm_oracle,
    phi_trivial_exact, plugin_entropy, return_prob_exact, sample_word, substream, Estimate, BATCH,
    DEFAULT_KEY_BUDGET,
};
use entropyforge_core::words::{
    activity_support, boundary_function, canonical_key, is_trivial, rewrite_full, CanonicalForm, WordTree,
    DEFAULT_STATE_BUDGET,
};
use entropyforge_core::{build_group, Error as CoreError, FiniteGroup, GroupConfig, GroupSpec, Ray};

mod output;
mod parse;

use output::{digest, read_table, write_json, Table, SPLITTING_RULE};

#[derive(Parser)]
#[command(name = "entropyforge", version, about = "Random walks, word problems and exponent sequences on directed groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct Common {
    /// Group configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Lengths, e.g. `16,64`, `1..8` or `2^7..2^16`.
    #[arg(long = "n")]
    n: Option<String>,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cap on rewriting nodes per word-problem call.
    #[arg(long, default_value_t = DEFAULT_STATE_BUDGET as u64, value_parser = clap::value_parser!(u64).range(1..))]
    budget_states: u64,
    /// Cap on distinct group elements held by exact enumerations.
    #[arg(long, default_value_t = DEFAULT_KEY_BUDGET as u64, value_parser = clap::value_parser!(u64).range(1..))]
    budget_keys: u64,
    /// Ball radius for the norm oracle; enables drift columns in `simulate`.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    radius: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the group and print its summary.
    Validate(Common),
    /// Monte-Carlo activity, support and phi-triviality.
    Simulate(Common),
    /// Exact laws by convolution.
    Exact(Common),
    /// Valency sequences with prescribed exponents.
    Design(DesignArgs),
    /// Word problem, canonical forms and rewriting dumps.
    Wordtest(WordArgs),
    /// Walks on the extended-valency group with free blocks at chosen scales.
    DeltaSim(DeltaArgs),
    /// Lamplighter reference over the infinite dihedral group.
    Lamplighter(LampArgs),
    /// Regression slopes over CSV outputs.
    Report(ReportArgs),
}

#[derive(Args)]
struct DesignArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long = "D", default_value_t = 16)]
    big_d: usize,
    #[arg(long, default_value_t = DESIGN_LEVELS)]
    levels: usize,
    #[arg(long, default_value_t = 1e9)]
    n_max: f64,
}

#[derive(Args)]
struct WordArgs {
    #[command(flatten)]
    common: Common,
    /// Word in the form `s1 k(1,0) s0`; repeatable. Random words of the
    /// `--n` lengths are drawn when absent.
    #[arg(long)]
    word: Vec<String>,
    #[arg(long, default_value_t = 0)]
    level: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Entropy,
    Return,
    Drift,
}

#[derive(Args)]
struct DeltaArgs {
    #[command(flatten)]
    common: Common,
    /// Increasing scale radii, e.g. `4,64`.
    #[arg(long)]
    radii: String,
    #[arg(long, value_enum, default_value = "entropy")]
    mode: ModeArg,
}

#[derive(Args)]
struct LampArgs {
    #[command(flatten)]
    common: Common,
    /// Order of the cyclic lamp group.
    #[arg(long, default_value_t = 2)]
    f_order: usize,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    common: Common,
    /// CSV files written by other commands.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value = "n")]
    x: String,
    #[arg(long, default_value = "activity_mean")]
    y: String,
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn load_config(common: &Common) -> Result<GroupConfig> {
    let path = common.config.as_ref().ok_or_else(|| anyhow!("--config is required"))?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| {
        let line = text.lines().nth(e.line().saturating_sub(1)).unwrap_or("");
        let caret = " ".repeat(e.column().saturating_sub(1));
        anyhow!("{}:{}:{}: {e}\n  {line}\n  {caret}^", path.display(), e.line(), e.column())
    })
}

fn load(common: &Common) -> Result<(GroupConfig, GroupSpec)> {
    let cfg = load_config(common)?;
    let spec = build_group(&cfg).context("building the group")?;
    Ok((cfg, spec))
}

fn grid(common: &Common) -> Result<Vec<usize>> {
    parse::grid(common.n.as_deref().ok_or_else(|| anyhow!("--n is required"))?)
}

fn walk_table(command: &str, cfg: &GroupConfig, common: &Common) -> Result<Table> {
    let mut t = Table::new(
        command,
        &[
            "n",
            "samples",
            "activity_mean",
            "activity_se",
            "support_mean",
            "support_se",
            "phi_trivial_mean",
            "phi_trivial_se",
            "phi_trivial_ln",
            "beta_n",
        ],
    );
    t.meta(format!("config sha256 {}", digest(cfg)?))
        .meta(format!("seed {}; {SPLITTING_RULE}", common.seed))
        .meta("units: n = walk steps; activity = active leaves; support = boundary points; phi_trivial = probability; beta_n = exponent");
    Ok(t)
}

fn beta_cell(profile: &ExponentProfile, n: usize) -> Result<String> {
    Ok(if n >= 2 { fmt(profile.beta_of_n(n as u128)?.value) } else { String::new() })
}

fn walk_cells(n: usize, samples: usize, activity: Estimate, support: Estimate, phi: Estimate, beta: String) -> Vec<String> {
    vec![
        n.to_string(),
        samples.to_string(),
        fmt(activity.mean),
        fmt(activity.stderr),
        fmt(support.mean),
        fmt(support.stderr),
        fmt(phi.mean),
        fmt(phi.stderr),
        fmt(phi.mean.ln()),
        beta,
    ]
}

fn validate(common: &Common) -> Result<()> {
    let (cfg, spec) = load(common)?;
    println!("ok: {}", spec.summary());
    println!("config sha256 {}", digest(&cfg)?);
    Ok(())
}

fn simulate(common: &Common) -> Result<()> {
    let (cfg, spec) = load(common)?;
    let profile = ExponentProfile::from_spec(&spec);
    let samples = common.samples as usize;
    let mut t = walk_table("simulate", &cfg, common)?;
    let oracle = match common.radius {
        Some(r) => {
            for c in ["drift_mean", "drift_se", "drift_censored", "entropy_plugin", "drift_lower", "drift_upper"] {
                t.push_header(c);
            }
            t.meta(format!("drift: norm oracle of radius {r}; entropy is the plug-in estimate"));
            Some(norm_oracle(&spec, r as usize, common.budget_keys as usize).context("norm oracle")?)
        }
        None => None,
    };
    for n in grid(common)? {
        let st = estimate_walk(&spec, n, samples, common.seed).with_context(|| format!("at n = {n}"))?;
        let mut row = walk_cells(n, samples, st.activity, st.support, st.phi_trivial, beta_cell(&profile, n)?);
        if let Some(o) = &oracle {
            let budget = common.budget_states as usize;
            let h = plugin_entropy(&spec, n, samples, common.seed, budget).with_context(|| format!("at n = {n}"))?;
            let d = drift_bounds(&spec, o, n, samples, common.seed, h, budget).with_context(|| format!("at n = {n}"))?;
            row.extend([
                fmt(d.drift.mean),
                fmt(d.drift.stderr),
                d.censored.to_string(),
                fmt(h),
                fmt(d.lower),
                fmt(d.upper),
            ]);
        }
        t.row(row);
    }
    t.write(common.out.as_deref())
}

fn exact(common: &Common) -> Result<()> {
    let (cfg, spec) = load(common)?;
    let ns = grid(common)?;
    let dists = exact_distributions(&spec, *ns.last().unwrap(), common.budget_keys as usize)?;
    let mut t = Table::new(
        "exact",
        &[
            "n",
            "support_size",
            "entropy",
            "return_prob",
            "return_prob_exact",
            "phi_trivial",
            "phi_trivial_exact",
            "expected_support",
        ],
    );
    t.meta(format!("config sha256 {}", digest(&cfg)?))
        .meta("units: entropy in nats; probabilities exact as num/den");
    for n in ns {
        let d = &dists[n];
        let ret = return_prob_exact(d);
        let phi = phi_trivial_exact(d);
        t.row(vec![
            n.to_string(),
            d.support_size().to_string(),
            fmt(entropy_exact(d)),
            fmt(ret.to_f64().unwrap_or(f64::NAN)),
            ret.to_string(),
            fmt(phi.to_f64().unwrap_or(f64::NAN)),
            phi.to_string(),
            fmt(expected_support_exact(d).to_f64().unwrap_or(f64::NAN)),
        ]);
    }
    t.write(common.out.as_deref())
}

fn design(args: &DesignArgs) -> Result<()> {
    let n_max = args.n_max.min(u128::MAX as f64) as u128;
    let mut t = Table::new("design", &["n", "k", "beta_n"]);
    t.meta(format!("target alpha {} beta {} d {} D {}", args.alpha, args.beta, args.d, args.big_d));
    let profile = if args.alpha == args.beta {
        let c = design_constant(args.beta, args.d, args.big_d)?;
        t.meta(format!("constant design, lambda {}", c.lambda));
        ExponentProfile::basic(c.valency)
    } else {
        let target = DesignTarget::from_f64(args.alpha, args.beta, args.d, args.big_d)?;
        let (p, switches) = OscillatingDesign::take_profile(target.clone(), args.levels);
        let r = oscillation_report(&p, target.alpha_f64(), target.beta_f64(), 16, n_max);
        t.meta(format!("oscillating design, switches at levels {switches:?}"));
        t.meta(format!(
            "measured C {}; beta range [{}, {}]; attains alpha {}; attains beta {}",
            r.c, r.min_beta, r.max_beta, r.attains_alpha, r.attains_beta
        ));
        p
    };
    let prefix: Vec<String> = (0..args.levels).map(|i| profile.d(i).to_string()).collect();
    t.meta(format!("valency prefix {}", prefix.join(" ")));
    t.meta(format!("sandwich constant {}", profile.sandwich_constant()));
    for pl in profile.plateaus(n_max) {
        let mut ends = vec![pl.lo.max(16), pl.hi.min(n_max)];
        ends.dedup();
        for n in ends {
            if n < 16 || n > pl.hi {
                continue;
            }
            t.row(vec![n.to_string(), pl.k.to_string(), fmt(profile.beta_of_n(n)?.value)]);
        }
    }
    t.write(args.common.out.as_deref())
}

#[derive(Serialize)]
struct WordReport {
    word: String,
    length: usize,
    trivial: bool,
    canonical: CanonicalForm,
    activity: usize,
    support: usize,
    boundary: Vec<(Ray, u32)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tree: Option<WordTree>,
}

fn wordtest(args: &WordArgs) -> Result<()> {
    let common = &args.common;
    let (cfg, spec) = load(common)?;
    let budget = common.budget_states as usize;
    let words = if args.word.is_empty() {
        let mut out = Vec::new();
        for n in grid(common)? {
            let mut rng = substream(common.seed, n, 0);
            out.extend((0..common.samples).map(|_| sample_word(&spec, n, &mut rng)));
        }
        out
    } else {
        args.word.iter().map(|w| parse::word(&spec, args.level, w)).collect::<Result<_>>()?
    };
    let reports = words
        .iter()
        .map(|w| {
            let n = w.len();
            let trivial = is_trivial(&spec, w, budget).with_context(|| format!("word problem at n = {n}"))?;
            let canonical = canonical_key(&spec, w, budget).with_context(|| format!("canonical form at n = {n}"))?;
            let (activity, support) = activity_support(&spec, w);
            Ok(WordReport {
                word: w.display(&spec),
                length: n,
                trivial,
                canonical,
                activity,
                support,
                boundary: boundary_function(&spec, w).into_iter().collect(),
                tree: (n <= 32).then(|| rewrite_full(&spec, w)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    #[derive(Serialize)]
    struct Dump<'a> {
        config_sha256: String,
        words: &'a [WordReport],
    }
    write_json(&Dump { config_sha256: digest(&cfg)?, words: &reports }, common.out.as_deref())
}

fn delta_sim(args: &DeltaArgs) -> Result<()> {
    let common = &args.common;
    let (cfg, spec) = load(common)?;
    let spec = Arc::new(spec);
    let radii = parse::grid(&args.radii)?;
    let mode = match args.mode {
        ModeArg::Entropy => ScaleMode::Entropy,
        ModeArg::Return => ScaleMode::Return,
        ModeArg::Drift => ScaleMode::Drift,
    };
    let sched = schedule_scales(spec.clone(), &radii, mode)?;
    let profile = ExponentProfile::from_spec(&spec);
    let samples = common.samples as usize;
    let mut t = walk_table("delta-sim", &cfg, common)?;
    for c in ["delta_return_mean", "delta_return_se", "delta_censored", "regime"] {
        t.push_header(c);
    }
    t.meta(format!("radii {radii:?}; mode {mode:?}; blocks {:?}", sched.spec.blocks()));
    t.meta("delta_return is a plain Monte-Carlo frequency with no exact cross-check (heuristic)");
    let inv_f = 1.0 / spec.f_order() as f64;
    for n in grid(common)? {
        let batches = samples.div_ceil(BATCH);
        let rows: Vec<(usize, usize, Option<bool>)> = (0..batches)
            .into_par_iter()
            .map(|b| {
                let mut rng = substream(common.seed, n, b);
                (0..BATCH.min(samples - b * BATCH))
                    .map(|_| {
                        let w = sample_delta_word(&spec, n, &mut rng);
                        let (a, supp) = activity_support(&spec, &quotient_to_gamma(&spec, &w));
                        let trivial = match is_trivial_delta(&sched.spec, &w) {
                            Ok(x) => Some(x),
                            Err(CoreError::BeyondRadius { .. }) => None,
                            Err(e) => return Err(e),
                        };
                        Ok((a, supp, trivial))
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .with_context(|| format!("at n = {n}"))?
            .into_iter()
            .flatten()
            .collect();
        let activity = Estimate::from_values(rows.iter().map(|r| r.0 as f64));
        let support = Estimate::from_values(rows.iter().map(|r| r.1 as f64));
        let phi = Estimate::from_values(rows.iter().map(|r| inv_f.powi(r.0 as i32)));
        let ret = Estimate::from_values(rows.iter().filter_map(|r| r.2).map(|x| x as u8 as f64));
        let censored = rows.iter().filter(|r| r.2.is_none()).count();
        let mut row = walk_cells(n, samples, activity, support, phi, beta_cell(&profile, n)?);
        row.extend([
            fmt(ret.mean),
            fmt(ret.stderr),
            censored.to_string(),
            sched.regime(n).map_or("base".to_string(), |l| format!("free-block-{l}")),
        ]);
        t.row(row);
    }
    t.write(common.out.as_deref())
}

fn lamplighter(args: &LampArgs) -> Result<()> {
    let common = &args.common;
    if args.f_order < 2 {
        bail!("--f-order must be at least 2");
    }
    let f = FiniteGroup::cyclic(args.f_order);
    let samples = common.samples as usize;
    let mut t = Table::new(
        "lamplighter",
        &["n", "samples", "norm_mean", "norm_se", "tilde_return", "tilde_return_se", "z_return", "z_return_se"],
    );
    t.meta(format!("lamps Z/{}; seed {}; {SPLITTING_RULE}", args.f_order, common.seed))
        .meta("units: n = increments h s h' f; norm = word length over s, h and lamp values");
    let mut points = Vec::new();
    for n in grid(common)? {
        let st = lamp_stats(&f, n, samples, common.seed)?;
        if n > 0 && st.norm.mean > 0.0 {
            points.push((n as f64, st.norm.mean));
        }
        t.row(vec![
            n.to_string(),
            samples.to_string(),
            fmt(st.norm.mean),
            fmt(st.norm.stderr),
            fmt(st.tilde_return.mean),
            fmt(st.tilde_return.stderr),
            fmt(st.z_return.mean),
            fmt(st.z_return.stderr),
        ]);
    }
    if points.len() >= 2 {
        t.meta(format!("drift slope {}", log_log_slope(&points)));
    }
    t.write(common.out.as_deref())
}

/// Slope, its standard error and the point count of `ln y` against `ln x`.
fn regression(points: &[(f64, f64)]) -> (f64, f64) {
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / sxx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    let se = if points.len() > 2 { (rss / (m - 2.0) / sxx).sqrt() } else { f64::NAN };
    (slope, se)
}

fn report(args: &ReportArgs) -> Result<()> {
    let mut t = Table::new(
        "report",
        &["file", "x", "y", "points", "slope", "slope_se", "ci95_lo", "ci95_hi", "mean_beta_n", "slope_minus_beta"],
    );
    t.meta("slope of ln y against ln x by least squares; ci95 uses the normal quantile 1.96");
    for path in &args.inputs {
        let (header, rows) = read_table(path)?;
        let col = |name: &str| header.iter().position(|h| h == name);
        let xi = col(&args.x).ok_or_else(|| anyhow!("{}: no column {:?}", path.display(), args.x))?;
        let yi = col(&args.y).ok_or_else(|| anyhow!("{}: no column {:?}", path.display(), args.y))?;
        let bi = col("beta_n");
        let mut points = Vec::new();
        let mut betas = Vec::new();
        for r in &rows {
            let (x, y) = (r[xi].parse::<f64>(), r[yi].parse::<f64>());
            if let (Ok(x), Ok(y)) = (x, y) {
                if x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite() {
                    points.push((x, y));
                    if let Some(b) = bi.and_then(|i| r[i].parse::<f64>().ok()) {
                        betas.push(b);
                    }
                }
            }
        }
        if points.len() < 2 {
            bail!("{}: fewer than two usable rows", path.display());
        }
        let (slope, se) = regression(&points);
        let mean_beta = (!betas.is_empty()).then(|| betas.iter().sum::<f64>() / betas.len() as f64);
        t.row(vec![
            file_label(path),
            args.x.clone(),
            args.y.clone(),
            points.len().to_string(),
            fmt(slope),
            fmt(se),
            fmt(slope - 1.96 * se),
            fmt(slope + 1.96 * se),
            mean_beta.map_or(String::new(), fmt),
            mean_beta.map_or(String::new(), |b| fmt(slope - b)),
        ]);
    }
    t.write(args.common.out.as_deref())
}

fn file_label(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned())
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("ENTROPYFORGE_THREADS") {
        let n: usize = v.parse().with_context(|| format!("ENTROPYFORGE_THREADS={v:?}"))?;
        if n == 0 {
            bail!("ENTROPYFORGE_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(&cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .any(|c| c.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe))
}

fn run(command: &Command) -> Result<()> {
    match command {
        Command::Validate(c) => validate(c),
        Command::Simulate(c) => simulate(c),
        Command::Exact(c) => exact(c),
        Command::Design(a) => design(a),
        Command::Wordtest(a) => wordtest(a),
        Command::DeltaSim(a) => delta_sim(a),
        Command::Lamplighter(a) => lamplighter(a),
        Command::Report(a) => report(a),
    }
}
