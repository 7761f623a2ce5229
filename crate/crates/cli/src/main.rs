//! Command-line front end: solve the mean field equation, enumerate
//! n-player equilibria, run Monte Carlo experiments, evaluate the
//! closed-form asymptotics, and reproduce the preset studies.
//!
//! Exit codes: 0 success, 1 failed checks or runtime errors, 2 config
//! errors (bad flags, unknown presets, malformed config files).

mod emit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use stopgame::asymptotics::AlphaStats;
use stopgame::mean_field::{find_solutions, flow, quartet, FlowKind, SolveCfg};
use stopgame::monte_carlo::{
    estimate_near, extremal_law, fatou_diagnostic, run_histogram, scaling_experiment,
    CountStat, ExperimentConfig, ExperimentReport, SetSelector,
};
use stopgame::n_player::{enumerate, SignalSample};
use stopgame::rng::sample_uniforms;
use stopgame::signal::{ModelConfig, Preset};
use stopgame::{GameParams64, SignalModel64};

#[derive(Parser)]
#[command(name = "stopgame", version, about = "Equilibria of a stopping game and its mean field limit")]
struct Cli {
    /// Worker threads for simulations (default: all cores; results do not
    /// depend on this)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory (falls back to $STOPGAME_OUT, then the cwd)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct ModelArgs {
    /// Named preset: example-5.1 | example-5.6 | example-5.7 | example-5.8 |
    /// example-6.2 | tent | uniform02
    #[arg(long)]
    preset: Option<String>,
    /// TOML model configuration file (see README for the schema)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the threshold r
    #[arg(long)]
    r: Option<f64>,
    /// Override the interaction constant c
    #[arg(long)]
    c: Option<f64>,
}

impl ModelArgs {
    fn build(&self) -> Result<(SignalModel64, GameParams64, String), CliError> {
        let (model, mut params, id) = match (&self.preset, &self.config) {
            (Some(name), None) => {
                let preset = Preset::parse(name)
                    .ok_or_else(|| CliError::Config(format!("unknown preset '{name}'")))?;
                let (m, p) = preset.build::<f64>();
                (m, p, preset.id().to_string())
            }
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                let cfg = ModelConfig::from_toml_str(&text)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                let (m, p) = cfg.build().map_err(|e| CliError::Config(e.to_string()))?;
                (m, p, format!("config:{}", path.display()))
            }
            _ => {
                return Err(CliError::Config(
                    "exactly one of --preset and --config is required".into(),
                ))
            }
        };
        if let Some(r) = self.r {
            params.r = r;
        }
        if let Some(c) = self.c {
            params = GameParams64::new(params.r, c)
                .map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok((model, params, id))
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Roots, classification, quartet, and extremal flows of the mean
    /// field equation
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        /// Time at which to solve (default 0)
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        /// Comma-separated time grid for the flow CSV
        #[arg(long, default_value = "0,0.25,0.5,0.75,1")]
        grid: String,
    },
    /// Enumerate equilibrium count sets of sampled n-player games
    Nplayer {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        samples: u64,
        /// Output format
        #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
        emit: String,
    },
    /// Monte Carlo experiments
    Simulate {
        #[command(subcommand)]
        cmd: SimCmd,
    },
    /// Closed-form limit statistics
    Asymptotics {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[command(subcommand)]
        cmd: Option<AsymCmd>,
    },
    /// Run the canonical pinned experiment for a preset and check its bounds
    Reproduce {
        preset_id: String,
    },
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    #[arg(long)]
    samples: u64,
    #[arg(long)]
    seed: u64,
    /// Equilibrium set: full condition or relaxed
    #[arg(long, default_value = "k", value_parser = ["k", "kstar"])]
    set: String,
    /// Per-sample count: minimal | maximal | all
    #[arg(long, default_value = "minimal", value_parser = ["minimal", "maximal", "all"])]
    stat: String,
    /// Also render histograms as SVG
    #[arg(long)]
    svg: bool,
}

impl SimArgs {
    fn experiment(&self) -> Result<(SignalModel64, ExperimentConfig), CliError> {
        let (model, params, id) = self.model.build()?;
        let mut cfg = ExperimentConfig::new(&id, self.n, params.r, params.c, self.samples, self.seed);
        cfg.t = self.t;
        cfg.set_selector = match self.set.as_str() {
            "kstar" => SetSelector::KStar,
            _ => SetSelector::K,
        };
        cfg.statistic = match self.stat.as_str() {
            "maximal" => CountStat::Maximal,
            "all" => CountStat::All,
            _ => CountStat::Minimal,
        };
        Ok((model, cfg))
    }
}

#[derive(Subcommand)]
enum SimCmd {
    /// Histogram of equilibrium counts k/n
    Histogram {
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Window-nonempty probability and mean count near a target root
    Near {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        eps: f64,
    },
    /// Laws of min(K)/n and max(K)/n
    Extremal {
        #[command(flatten)]
        sim: SimArgs,
        /// Neighborhood half-width for the mass-outside-roots statistic
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
    },
    /// Path-exceedance probabilities against a mean field flow across an
    /// n-ladder
    Fatou {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, default_value = "0,0.5")]
        grid: String,
        #[arg(long, default_value = "100,1000,10000")]
        n_ladder: String,
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        /// Flow to follow
        #[arg(long, default_value = "minimal", value_parser = ["minimal", "maximal"])]
        flow: String,
    },
    /// Mean counts in shrinking windows of half-width beta/sqrt(n)
    Scaling {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value = "0.5,1,2")]
        betas: String,
    },
}

#[derive(Subcommand)]
enum AsymCmd {
    /// CSV of the bound curves over an alpha grid (lo:hi:step)
    Curve {
        #[arg(long)]
        alpha_grid: String,
    },
}

enum CliError {
    Config(String),
    Check(String),
    Run(String),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Run(e.to_string())
    }
}

fn parse_f64_list(text: &str, what: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Config(format!("bad {what} '{text}': {e}")))
}

fn parse_usize_list(text: &str, what: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Config(format!("bad {what} '{text}': {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let dir = emit::out_dir(&cli.out);
    match run(cli.cmd, &dir) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Cmd, dir: &std::path::Path) -> Result<(), CliError> {
    match cmd {
        Cmd::Solve { model, t, grid } => cmd_solve(model, t, &grid, dir),
        Cmd::Nplayer { model, n, t, seed, samples, emit } => {
            cmd_nplayer(model, n, t, seed, samples, &emit, dir)
        }
        Cmd::Simulate { cmd } => cmd_simulate(cmd, dir),
        Cmd::Asymptotics { alpha, x, beta, cmd } => cmd_asymptotics(alpha, x, beta, cmd, dir),
        Cmd::Reproduce { preset_id } => cmd_reproduce(&preset_id, dir),
    }
}

fn cmd_solve(model: ModelArgs, t: f64, grid: &str, dir: &std::path::Path) -> Result<(), CliError> {
    let (model, params, id) = model.build()?;
    let grid = parse_f64_list(grid, "grid")?;
    if !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(CliError::Config("grid must be strictly increasing".into()));
    }
    let cfg = SolveCfg::default();
    let sols = find_solutions(&model, &params, t, &cfg)
        .map_err(|e| CliError::Run(e.to_string()))?;
    let q = quartet(&model, &params, t, &cfg).map_err(|e| CliError::Run(e.to_string()))?;
    let fmin =
        flow(&model, &params, FlowKind::Minimal, &grid, &cfg).map_err(|e| CliError::Run(e.to_string()))?;
    let fmax =
        flow(&model, &params, FlowKind::Maximal, &grid, &cfg).map_err(|e| CliError::Run(e.to_string()))?;

    let report = json!({
        "model": id,
        "r": params.r,
        "c": params.c,
        "t": t,
        "roots": sols,
        "quartet": q,
        "conventions": "roots at 0 and 1 are classified by probing the natural \
extension of the residual outside [0,1]",
    });
    let json_path = emit::write_json(dir, "solve.json", &report)?;
    let rows: Vec<String> = fmin
        .grid
        .iter()
        .zip(fmin.values.iter().zip(&fmax.values))
        .map(|(t, (lo, hi))| format!("{t},{lo},{hi}"))
        .collect();
    let csv_path = emit::write_csv(dir, "flow.csv", "t,rho_min,rho_max", &rows)?;
    println!("wrote {} and {}", json_path.display(), csv_path.display());
    Ok(())
}

fn cmd_nplayer(
    model: ModelArgs,
    n: usize,
    t: f64,
    seed: u64,
    samples: u64,
    emit_fmt: &str,
    dir: &std::path::Path,
) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Config("n must be >= 1".into()));
    }
    let (model, params, id) = model.build()?;
    let pn = params.with_n(n).map_err(|e| CliError::Config(e.to_string()))?;
    let sets: Vec<_> = (0..samples)
        .map(|s| {
            let us = sample_uniforms(seed, s, n);
            enumerate(&SignalSample::draw(&model, pn, t, &us))
        })
        .collect();
    match emit_fmt {
        "csv" => {
            let rows: Vec<String> = sets
                .iter()
                .enumerate()
                .map(|(s, set)| {
                    let ks: Vec<String> = set.k.iter().map(|k| k.to_string()).collect();
                    let kss: Vec<String> = set.k_star.iter().map(|k| k.to_string()).collect();
                    format!("{s},{},{},{},{}", set.min(), set.max(), ks.join(";"), kss.join(";"))
                })
                .collect();
            let path = emit::write_csv(dir, "nplayer.csv", "sample,min,max,k,k_star", &rows)?;
            println!("wrote {}", path.display());
        }
        _ => {
            let report = json!({
                "model": id,
                "n": n,
                "r": pn.r,
                "c": pn.c,
                "t": t,
                "seed": seed,
                "conventions": "0 belongs to the sets iff G(0) = 0",
                "samples": sets,
            });
            let path = emit::write_json(dir, "nplayer.json", &report)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn emit_simulation(
    dir: &std::path::Path,
    name: &str,
    report: &ExperimentReport,
    svg: bool,
) -> Result<(), CliError> {
    let json_path = emit::write_json(dir, &format!("{name}.json"), report)?;
    println!("wrote {}", json_path.display());
    for hist in &report.histograms {
        let csv = emit::write_csv(
            dir,
            &format!("{name}_{}.csv", hist.name),
            "k_over_n,count",
            &emit::histogram_rows(hist),
        )?;
        println!("wrote {}", csv.display());
        if svg {
            let path = emit::write_svg(dir, &format!("{name}_{}.svg", hist.name), hist)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn cmd_simulate(cmd: SimCmd, dir: &std::path::Path) -> Result<(), CliError> {
    match cmd {
        SimCmd::Histogram { sim } => {
            let (model, cfg) = sim.experiment()?;
            emit_simulation(dir, "histogram", &run_histogram(&model, &cfg), sim.svg)
        }
        SimCmd::Near { sim, x, eps } => {
            if eps <= 0.0 {
                return Err(CliError::Config("eps must be > 0".into()));
            }
            let (model, mut cfg) = sim.experiment()?;
            cfg.x = Some(x);
            cfg.eps = Some(eps);
            emit_simulation(dir, "near", &estimate_near(&model, &cfg), sim.svg)
        }
        SimCmd::Extremal { sim, eps } => {
            let (model, mut cfg) = sim.experiment()?;
            cfg.eps = Some(eps);
            emit_simulation(dir, "extremal", &extremal_law(&model, &cfg), sim.svg)
        }
        SimCmd::Fatou { sim, grid, n_ladder, tol, flow: which } => {
            let (model, mut cfg) = sim.experiment()?;
            let grid = parse_f64_list(&grid, "grid")?;
            let ladder = parse_usize_list(&n_ladder, "n-ladder")?;
            if !grid.windows(2).all(|w| w[0] < w[1]) {
                return Err(CliError::Config("grid must be strictly increasing".into()));
            }
            cfg.eps = Some(tol);
            cfg.grid = Some(grid.clone());
            cfg.statistic = if which == "maximal" { CountStat::Maximal } else { CountStat::Minimal };
            let params = GameParams64::new(cfg.r, cfg.c).map_err(|e| CliError::Config(e.to_string()))?;
            let kind = if which == "maximal" { FlowKind::Maximal } else { FlowKind::Minimal };
            let f = flow(&model, &params, kind, &grid, &SolveCfg::default())
                .map_err(|e| CliError::Run(e.to_string()))?;
            emit_simulation(dir, "fatou", &fatou_diagnostic(&model, &cfg, &f, &ladder), sim.svg)
        }
        SimCmd::Scaling { sim, x, betas } => {
            let (model, mut cfg) = sim.experiment()?;
            cfg.x = Some(x);
            let betas = parse_f64_list(&betas, "betas")?;
            emit_simulation(dir, "scaling", &scaling_experiment(&model, &cfg, &betas), sim.svg)
        }
    }
}

fn cmd_asymptotics(
    alpha: Option<f64>,
    x: Option<f64>,
    beta: Option<f64>,
    cmd: Option<AsymCmd>,
    dir: &std::path::Path,
) -> Result<(), CliError> {
    if let Some(AsymCmd::Curve { alpha_grid }) = cmd {
        let parts: Vec<f64> = alpha_grid
            .split(':')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Config(format!("bad --alpha-grid '{alpha_grid}': {e}")))?;
        let [lo, hi, step] = parts[..] else {
            return Err(CliError::Config("--alpha-grid must be lo:hi:step".into()));
        };
        if step <= 0.0 || hi < lo {
            return Err(CliError::Config("--alpha-grid must be lo:hi:step with step > 0".into()));
        }
        let mut rows = Vec::new();
        let mut a = lo;
        while a <= hi + 1e-12 {
            let st = AlphaStats::new(a);
            let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
            rows.push(format!(
                "{a},{},{},{},{}",
                opt(st.theta),
                opt(st.kstar_crossing_limit),
                opt(st.expected_count_limit),
                opt(st.lower_bound_l)
            ));
            a += step;
        }
        let path = emit::write_csv(
            dir,
            "asymptotics_curve.csv",
            "alpha,theta,kstar_limit,expected_count,lower_L",
            &rows,
        )?;
        println!("wrote {}", path.display());
        return Ok(());
    }
    let alpha = alpha.ok_or_else(|| CliError::Config("--alpha is required".into()))?;
    let mut report = serde_json::to_value(AlphaStats::new(alpha))
        .map_err(|e| CliError::Run(e.to_string()))?;
    if let (Some(x), Some(beta)) = (x, beta) {
        let wc = stopgame::asymptotics::window_expected_count(alpha, x, beta)
            .map_err(|e| CliError::Config(e.to_string()))?;
        report["window_expected_count"] = json!(wc);
        report["x"] = json!(x);
        report["beta"] = json!(beta);
    }
    let path = emit::write_json(dir, "asymptotics.json", &report)?;
    println!("wrote {}", path.display());
    Ok(())
}

struct Check {
    name: String,
    ok: bool,
    detail: String,
}

fn check(name: &str, ok: bool, detail: String) -> Check {
    println!("  [{}] {name}: {detail}", if ok { "ok" } else { "FAIL" });
    Check { name: name.to_string(), ok, detail }
}

fn hist_mass_frac(report: &ExperimentReport, hist: &str, lo: f64, hi: f64) -> f64 {
    let h = report.histograms.iter().find(|h| h.name == hist).expect("histogram present");
    let total = h.mass().max(1);
    let inside: u64 = h
        .bins
        .iter()
        .filter(|b| b.k_over_n >= lo && b.k_over_n <= hi)
        .map(|b| b.count)
        .sum();
    inside as f64 / total as f64
}

fn stat<'r>(report: &'r ExperimentReport, name: &str) -> &'r stopgame::monte_carlo::Statistic {
    report.statistics.iter().find(|s| s.name == name).expect("statistic present")
}

fn cmd_reproduce(preset_id: &str, dir: &std::path::Path) -> Result<(), CliError> {
    let preset = Preset::parse(preset_id)
        .ok_or_else(|| CliError::Config(format!("unknown preset '{preset_id}'")))?;
    let (model, params) = preset.build::<f64>();
    println!("reproduce {}", preset.id());
    let mut checks: Vec<Check> = Vec::new();
    let mut reports: Vec<(String, ExperimentReport)> = Vec::new();

    match preset {
        Preset::Example51 => {
            let cfg = ExperimentConfig::new(preset.id(), 2000, params.r, params.c, 4000, 510);
            let rep = extremal_law(&model, &cfg);
            let p1 = stat(&rep, "p_min_at_one").estimate;
            checks.push(check(
                "minimal count law",
                (p1 - 0.5).abs() <= 0.03,
                format!("P(min/n = 1) = {p1:.4}, want 0.5 +- 0.03"),
            ));
            let near_half = hist_mass_frac(&rep, "min_k", 0.45, 0.55);
            checks.push(check(
                "remaining mass near 1/2",
                (near_half + p1 - 1.0).abs() <= 0.01,
                format!("mass in [0.45, 0.55] = {near_half:.4}"),
            ));
            reports.push(("extremal".into(), rep));
        }
        Preset::Example56 => {
            let mut cfg = ExperimentConfig::new(preset.id(), 2000, params.r, params.c, 2000, 56);
            cfg.statistic = CountStat::Minimal;
            let rep = run_histogram(&model, &cfg);
            let at_half = hist_mass_frac(&rep, "counts", 0.45, 0.55);
            let at_one = hist_mass_frac(&rep, "counts", 0.95, 1.0);
            checks.push(check(
                "bimodal minimal law",
                (at_half - 0.5).abs() <= 0.05 && (at_one - 0.5).abs() <= 0.05,
                format!("mass near 1/2 = {at_half:.4}, near 1 = {at_one:.4}"),
            ));
            reports.push(("histogram".into(), rep));
        }
        Preset::Example57 => {
            let mut cfg = ExperimentConfig::new(preset.id(), 2000, params.r, params.c, 2000, 57);
            cfg.statistic = CountStat::Minimal;
            let rep = run_histogram(&model, &cfg);
            let inside = hist_mass_frac(&rep, "counts", 0.45, 1.0);
            let lower = hist_mass_frac(&rep, "counts", 0.45, 0.75);
            let upper = hist_mass_frac(&rep, "counts", 0.75, 1.0);
            checks.push(check(
                "mass spread across [1/2, 1]",
                inside >= 0.99 && lower >= 0.05 && upper >= 0.05,
                format!("in [0.45,1] = {inside:.4}, split {lower:.3}/{upper:.3}"),
            ));
            reports.push(("histogram".into(), rep));
        }
        Preset::Example58 => {
            let cfg = ExperimentConfig::new(preset.id(), 2000, params.r, params.c, 1000, 58);
            let rep = extremal_law(&model, &cfg);
            let min_zero = hist_mass_frac(&rep, "min_k", 0.0, 0.0);
            let max_one = hist_mass_frac(&rep, "max_k", 1.0, 1.0);
            checks.push(check(
                "exact extremes",
                min_zero == 1.0 && max_one == 1.0,
                format!("min == 0 on {min_zero:.4}, max == n on {max_one:.4}"),
            ));
            reports.push(("extremal".into(), rep));
        }
        Preset::Tent => {
            let mut cfg = ExperimentConfig::new(preset.id(), 10_000, params.r, params.c, 4000, 99);
            cfg.x = Some(0.5);
            cfg.eps = Some(0.02);
            let near = estimate_near(&model, &cfg);
            let p = stat(&near, "p_window_nonempty").estimate;
            checks.push(check(
                "window at 1/2 nonempty",
                (0.09..=0.145).contains(&p),
                format!("P = {p:.4}, want [0.09, 0.145]"),
            ));
            let mut hcfg = ExperimentConfig::new(preset.id(), 2000, params.r, params.c, 1000, 62);
            hcfg.statistic = CountStat::All;
            let hist = run_histogram(&model, &hcfg);
            let ends = hist_mass_frac(&hist, "counts", 0.0, 0.1) + hist_mass_frac(&hist, "counts", 0.9, 1.0);
            let middle = hist_mass_frac(&hist, "counts", 0.4, 0.6);
            checks.push(check(
                "modes at 0 and 1, thin mass near 1/2",
                ends >= 0.7 && middle <= 0.15,
                format!("end mass = {ends:.4}, middle mass = {middle:.4}"),
            ));
            reports.push(("near".into(), near));
            reports.push(("histogram".into(), hist));
        }
        Preset::Uniform02 => {
            let mut cfg = ExperimentConfig::new(preset.id(), 100, params.r, params.c, 20_000, 1010);
            cfg.x = Some(0.5);
            cfg.eps = Some(0.1);
            let rep = estimate_near(&model, &cfg);
            let s = stat(&rep, "mean_window_count");
            let exact = s.reference.unwrap_or(f64::NAN);
            checks.push(check(
                "mean count matches exact formula",
                (s.estimate - exact).abs() <= 3.0 * s.std_error,
                format!("MC {:.5} vs exact {exact:.5} (se {:.5})", s.estimate, s.std_error),
            ));
            reports.push(("near".into(), rep));
        }
    }

    for (name, rep) in &reports {
        emit_simulation(dir, &format!("reproduce_{}_{name}", preset.id()), rep, true)?;
    }
    let summary = json!({
        "preset": preset.id(),
        "checks": checks.iter().map(|c| json!({
            "name": c.name, "ok": c.ok, "detail": c.detail,
        })).collect::<Vec<_>>(),
    });
    emit::write_json(dir, &format!("reproduce_{}_summary.json", preset.id()), &summary)?;
    if let Some(bad) = checks.iter().find(|c| !c.ok) {
        return Err(CliError::Check(format!("{}: {}", bad.name, bad.detail)));
    }
    Ok(())
}
