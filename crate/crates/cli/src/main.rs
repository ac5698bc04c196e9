//! dsplab: exact arithmetic for signaling games over second-price
//! auctions. Generates instances, optimizes revenue over report profiles,
//! computes marginal-contribution payments, runs best-response dynamics,
//! enumerates pure equilibria, and drives the independent-set reduction.

mod doc;
mod report;

use clap::{ArgAction, Parser, Subcommand, ValueEnum};
use doc::{load_instance, load_profile, render_instance, save_instance};
use dsplab_core::rational::ratio;
use dsplab_core::{
    all_report, baseline_silent, enumerate_equilibria, gen_dspn, gen_identity, gen_mis_reduction,
    gen_random, local_expert_solve, meet, parse_rational, poa_pos, run_brd, run_mis_pipeline,
    shapley_permutation, shapley_subsets, solve_exact, Caps, DspGame, DynamicsTrace, Game, Graph,
    Instance, Partition, RandomConfig, Rational, SolveError, SolveResult, StrategyProfile,
};
use report::{render, BoundDoc, EquilibriumDoc, Num, OutputFormat, Report, StatsDoc, StepDoc};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

type CliError = Box<dyn std::error::Error>;

#[derive(Parser)]
#[command(name = "dsplab", version, about = "Exact solvers for signaling games over second-price auctions", long_about = None)]
struct Cli {
    /// Report format on standard output.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: OutputFormat,

    /// Worker threads for profile scans (default: machine parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Suppress wall-clock timings so identical runs emit identical bytes.
    #[arg(long, global = true, action = ArgAction::Set, default_value = "true")]
    deterministic: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Evaluate the revenue of one strategy profile.
    Revenue {
        #[arg(short = 'i', long)]
        instance: PathBuf,
        #[arg(short = 'p', long)]
        profile: PathBuf,
    },
    /// Optimize revenue over report profiles.
    Solve {
        #[arg(short = 'i', long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        method: MethodArg,
        #[arg(long)]
        max_profiles: Option<u64>,
        #[arg(long)]
        max_parts: Option<usize>,
    },
    /// Marginal-contribution payments for a reported profile.
    Shapley {
        #[arg(short = 'i', long)]
        instance: PathBuf,
        #[arg(short = 'p', long)]
        profile: PathBuf,
        #[arg(long, value_enum, default_value = "subset")]
        method: RuleArg,
    },
    /// Best-response dynamics from a start profile.
    Brd {
        #[arg(short = 'i', long)]
        instance: PathBuf,
        /// `silent`, `all-report`, or a profile JSON path.
        #[arg(long, default_value = "silent")]
        start: String,
        /// Comma-separated round-robin player order.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
        /// Also write the step log as CSV to this path.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        max_parts: Option<usize>,
    },
    /// Enumerate pure Nash equilibria.
    Equilibria {
        #[arg(short = 'i', long)]
        instance: PathBuf,
        /// Also report the price of anarchy.
        #[arg(long)]
        poa: bool,
        /// Also report the price of stability.
        #[arg(long)]
        pos: bool,
        #[arg(long)]
        max_profiles: Option<u64>,
        #[arg(long)]
        max_parts: Option<usize>,
    },
    /// Encode a graph, solve the instance, and decode an independent set.
    MisPipeline {
        #[arg(long)]
        graph: PathBuf,
        /// Per-node value scale (default: node count + 1).
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long, value_enum, default_value = "exact")]
        solver: MethodArg,
        #[arg(long)]
        max_profiles: Option<u64>,
        #[arg(long)]
        max_parts: Option<usize>,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Identical items of one value, one singleton-expert pair split at
    /// size 4, singleton mediators otherwise.
    Identity {
        #[arg(long)]
        size: usize,
        #[arg(long, default_value = "1")]
        value: String,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Two-expert stability-gap family.
    Dspn {
        #[arg(long)]
        n: usize,
        /// Niche-bidder valuation (default: 1/n^2).
        #[arg(long)]
        eps: Option<String>,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Independent-set reduction instance from an edge list.
    Mis {
        #[arg(long)]
        graph: PathBuf,
        /// Per-node value scale (default: node count + 1).
        #[arg(long)]
        ell: Option<usize>,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Seeded random instance.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict mediators to local experts.
        #[arg(long)]
        local_experts: bool,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exact,
    Silent,
    AllReport,
    LocalExperts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RuleArg {
    Perm,
    Subset,
}

/// The reporting game restricted to the strategies actually played: each
/// mediator either stays silent (strategy 0) or files its given report
/// (strategy 1 when the report is informative). Payment rules evaluate
/// only null-masked sub-profiles of the played profile, so the
/// restriction loses nothing.
struct ReportGame<'a> {
    inst: &'a Instance,
    reports: Vec<Partition>,
    counts: Vec<usize>,
}

impl<'a> ReportGame<'a> {
    fn new(inst: &'a Instance, profile: &StrategyProfile) -> Self {
        let reports = profile.reports().to_vec();
        let counts = reports
            .iter()
            .map(|r| if r.part_count() > 1 { 2 } else { 1 })
            .collect();
        ReportGame {
            inst,
            reports,
            counts,
        }
    }

    fn played_profile(&self) -> Vec<usize> {
        self.counts.iter().map(|&c| c - 1).collect()
    }
}

impl Game for ReportGame<'_> {
    fn strategy_counts(&self) -> &[usize] {
        &self.counts
    }

    fn value(&self, profile: &[usize]) -> Rational {
        let chosen: Vec<&Partition> = profile
            .iter()
            .zip(&self.reports)
            .filter(|&(&s, _)| s == 1)
            .map(|(_, r)| r)
            .collect();
        let joint = match meet(chosen) {
            Ok(j) => j,
            Err(_) => Partition::whole(self.inst.item_count()),
        };
        self.inst
            .revenue(&joint)
            .expect("reports cover the instance ground set")
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen { what } => {
            let (inst, out) = gen_instance(what)?;
            match out {
                Some(path) => save_instance(&inst, &path)?,
                None => print!("{}", render_instance(&inst)),
            }
            Ok(())
        }
        Command::Revenue { instance, profile } => {
            let inst = load_instance(&instance)?;
            let prof = load_profile(&profile, &inst)?;
            let joint = prof.joint();
            let revenue = inst.revenue(&joint)?;
            let report = Report {
                method: "revenue".to_string(),
                revenue: Some(Num::new(&revenue)),
                profile: Some(partition_strings(prof.reports())),
                joint: Some(joint.to_string()),
                ..Report::default()
            };
            print!("{}", render(&report, cli.format));
            Ok(())
        }
        Command::Solve {
            instance,
            method,
            max_profiles,
            max_parts,
        } => {
            let inst = load_instance(&instance)?;
            let caps = resolve_caps(max_profiles, max_parts)?;
            let result = run_solver(method, &inst, &caps)?;
            let report = solve_report(&result, cli.deterministic);
            print!("{}", render(&report, cli.format));
            Ok(())
        }
        Command::Shapley {
            instance,
            profile,
            method,
        } => {
            let inst = load_instance(&instance)?;
            let prof = load_profile(&profile, &inst)?;
            let game = ReportGame::new(&inst, &prof);
            let played = game.played_profile();
            let payments = match method {
                RuleArg::Perm => shapley_permutation(&game, &played)?,
                RuleArg::Subset => shapley_subsets(&game, &played)?,
            };
            let joint = prof.joint();
            let revenue = inst.revenue(&joint)?;
            let baseline = inst.revenue(&Partition::whole(inst.item_count()))?;
            let total: Rational = payments.iter().sum();
            let report = Report {
                method: match method {
                    RuleArg::Perm => "shapley-perm",
                    RuleArg::Subset => "shapley-subset",
                }
                .to_string(),
                revenue: Some(Num::new(&revenue)),
                baseline: Some(Num::new(&baseline)),
                profile: Some(partition_strings(prof.reports())),
                joint: Some(joint.to_string()),
                payments: Some(payments.iter().map(Num::new).collect()),
                total_payment: Some(Num::new(&total)),
                ..Report::default()
            };
            print!("{}", render(&report, cli.format));
            Ok(())
        }
        Command::Brd {
            instance,
            start,
            order,
            trace,
            max_parts,
        } => {
            let inst = load_instance(&instance)?;
            let caps = resolve_caps(None, max_parts)?;
            let game = DspGame::new(&inst, caps.max_parts)?;
            let m = inst.mediator_count();
            let start_profile: Vec<usize> = match start.as_str() {
                "silent" => vec![0; m],
                "all-report" => (0..m)
                    .map(|t| {
                        game.strategy_index(t, inst.mediator(t))
                            .expect("a base partition is one of its own coarsenings")
                    })
                    .collect(),
                path => {
                    let prof = load_profile(Path::new(path), &inst)?;
                    game.index_profile(&prof).ok_or(
                        "start profile uses a report outside the enumerated strategy space",
                    )?
                }
            };
            let order: Vec<usize> = order.unwrap_or_else(|| (0..m).collect());
            let traj = run_brd(&game, &start_profile, &order)?;
            if let Some(path) = &trace {
                write_trace(path, &traj, &game)?;
            }
            let final_prof = game.to_strategy_profile(&traj.final_profile);
            let joint = final_prof.joint();
            let revenue = inst.revenue(&joint)?;
            let steps: Vec<StepDoc> = traj
                .steps
                .iter()
                .map(|s| StepDoc {
                    player: s.player,
                    from: game.strategy(s.player, s.from).to_string(),
                    to: game.strategy(s.player, s.to).to_string(),
                    potential_before: Num::new(&s.potential_before),
                    potential_after: Num::new(&s.potential_after),
                })
                .collect();
            let report = Report {
                method: "brd".to_string(),
                revenue: Some(Num::new(&revenue)),
                profile: Some(partition_strings(final_prof.reports())),
                joint: Some(joint.to_string()),
                steps: Some(steps),
                converged: Some(traj.converged),
                ..Report::default()
            };
            print!("{}", render(&report, cli.format));
            Ok(())
        }
        Command::Equilibria {
            instance,
            poa,
            pos,
            max_profiles,
            max_parts,
        } => {
            let inst = load_instance(&instance)?;
            let caps = resolve_caps(max_profiles, max_parts)?;
            let game = DspGame::new(&inst, caps.max_parts)?;
            let started = Instant::now();
            let equilibria = enumerate_equilibria(&game, &caps)?;
            let ratios = if poa || pos {
                Some(poa_pos(&game, &caps)?)
            } else {
                None
            };
            let elapsed = started.elapsed();
            let docs: Vec<EquilibriumDoc> = equilibria
                .iter()
                .map(|e| EquilibriumDoc {
                    profile: e
                        .profile
                        .iter()
                        .enumerate()
                        .map(|(t, &s)| game.strategy(t, s).to_string())
                        .collect(),
                    value: Num::new(&e.value),
                    payments: e.payments.iter().map(Num::new).collect(),
                })
                .collect();
            let space: u128 = game
                .strategy_counts()
                .iter()
                .map(|&c| c as u128)
                .product();
            let report = Report {
                method: "equilibria".to_string(),
                equilibrium_count: Some(docs.len()),
                equilibria: Some(docs),
                opt: ratios.as_ref().map(|r| Num::new(&r.opt)),
                poa: ratios
                    .as_ref()
                    .filter(|_| poa)
                    .map(|r| BoundDoc::new(&r.poa)),
                pos: ratios
                    .as_ref()
                    .filter(|_| pos)
                    .map(|r| BoundDoc::new(&r.pos)),
                stats: Some(StatsDoc {
                    profiles_examined: space as u64,
                    elapsed_ms: (!cli.deterministic).then_some(elapsed.as_millis()),
                }),
                ..Report::default()
            };
            print!("{}", render(&report, cli.format));
            Ok(())
        }
        Command::MisPipeline {
            graph,
            ell,
            solver,
            max_profiles,
            max_parts,
        } => {
            let g = load_graph(&graph)?;
            let ell = ell.unwrap_or(g.node_count() + 1);
            let caps = resolve_caps(max_profiles, max_parts)?;
            let result = run_mis_pipeline(&g, ell, |inst| run_solver(solver, inst, &caps))?;
            let mut report = solve_report(&result.solve, cli.deterministic);
            report.method = "mis-pipeline".to_string();
            report.independent_set = Some(result.independent_set.clone());
            report.graph_nodes = Some(result.map.node_count);
            report.ell = Some(result.map.ell);
            print!("{}", render(&report, cli.format));
            Ok(())
        }
    }
}

fn gen_instance(what: GenCommand) -> Result<(Instance, Option<PathBuf>), CliError> {
    match what {
        GenCommand::Identity { size, value, out } => {
            let v = parse_rational(&value)?;
            Ok((gen_identity(size, &v)?, out))
        }
        GenCommand::Dspn { n, eps, out } => {
            let eps = match eps {
                Some(s) => parse_rational(&s)?,
                None => {
                    let sq = n
                        .checked_mul(n)
                        .and_then(|s| i64::try_from(s).ok())
                        .ok_or("size parameter too large")?;
                    ratio(1, sq)
                }
            };
            Ok((gen_dspn(n, &eps)?, out))
        }
        GenCommand::Mis { graph, ell, out } => {
            let g = load_graph(&graph)?;
            let ell = ell.unwrap_or(g.node_count() + 1);
            let (inst, _map) = gen_mis_reduction(&g, ell)?;
            Ok((inst, out))
        }
        GenCommand::Random {
            n,
            k,
            m,
            seed,
            local_experts,
            out,
        } => {
            let cfg = RandomConfig {
                local_experts,
                ..RandomConfig::default()
            };
            Ok((gen_random(n, k, m, seed, &cfg)?, out))
        }
    }
}

fn run_solver(method: MethodArg, inst: &Instance, caps: &Caps) -> Result<SolveResult, SolveError> {
    match method {
        MethodArg::Exact => solve_exact(inst, caps),
        MethodArg::Silent => baseline_silent(inst),
        MethodArg::AllReport => all_report(inst),
        MethodArg::LocalExperts => local_expert_solve(inst),
    }
}

fn solve_report(result: &SolveResult, deterministic: bool) -> Report {
    Report {
        method: result.method.to_string(),
        revenue: Some(Num::new(&result.revenue)),
        profile: Some(partition_strings(result.profile.reports())),
        joint: Some(result.joint.to_string()),
        stats: Some(StatsDoc {
            profiles_examined: result.stats.profiles_examined,
            elapsed_ms: (!deterministic).then_some(result.stats.elapsed.as_millis()),
        }),
        ..Report::default()
    }
}

/// `--max-profiles` wins over `DSPLAB_MAX_PROFILES`, which wins over the
/// built-in default.
fn resolve_caps(max_profiles: Option<u64>, max_parts: Option<usize>) -> Result<Caps, CliError> {
    let mut caps = Caps::default();
    match max_profiles {
        Some(p) => caps.max_profiles = p,
        None => {
            if let Ok(raw) = std::env::var("DSPLAB_MAX_PROFILES") {
                caps.max_profiles = raw
                    .parse()
                    .map_err(|_| format!("DSPLAB_MAX_PROFILES must be an integer, got '{raw}'"))?;
            }
        }
    }
    if let Some(q) = max_parts {
        caps.max_parts = q;
    }
    Ok(caps)
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(Graph::parse(&text)?)
}

fn partition_strings(reports: &[Partition]) -> Vec<String> {
    reports.iter().map(|p| p.to_string()).collect()
}

fn write_trace(path: &Path, traj: &DynamicsTrace, game: &DspGame) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "step",
        "player",
        "from",
        "to",
        "potential_before",
        "potential_after",
    ])?;
    for (i, s) in traj.steps.iter().enumerate() {
        w.write_record([
            i.to_string(),
            s.player.to_string(),
            game.strategy(s.player, s.from).to_string(),
            game.strategy(s.player, s.to).to_string(),
            s.potential_before.to_string(),
            s.potential_after.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
