//! `liftlab` command-line entry point.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or input error,
//! 3 numerical failure.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use liftlab::expansion::{cheeger_check, converse_eml_alpha, eml_check, eml_check_bipartite, eml_lambda, SubsetMode};
use liftlab::experiments::{
    exhaustive_signing_search, greedy_lift_growth, lemma_inequality_spot_check, run_lift_trials, ExperimentConfig,
    GraphSpec, LemmaKind, DEFAULT_MAX_VERTICES,
};
use liftlab::graph::{adjacency_matrix, RegularGraph};
use liftlab::io::{self, Assignment};
use liftlab::lift::{
    build_lift, random_k_lift, random_shift_lift, random_signing, signing_to_assignment, ShiftAssignment,
};
use liftlab::par::{init_thread_pool, Execution};
use liftlab::shift::characterize;
use liftlab::spectral::{eig_symmetric, DEFAULT_TOL};
use liftlab::Error;

#[derive(Parser)]
#[command(
    name = "liftlab",
    version,
    about = "Graph lifts, shift lifts and random-lift experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a base graph as an edge list.
    Gen(GenArgs),
    /// Lift a graph with a random or given assignment.
    Lift(LiftArgs),
    /// Adjacency spectrum, one eigenvalue per line.
    Spec(SpecArgs),
    /// Check the root-of-unity characterization of a shift lift.
    VerifyShift(VerifyShiftArgs),
    /// Expander-mixing check over subset pairs.
    Eml(EmlArgs),
    /// Exhaustive expansion against the Cheeger bounds.
    Cheeger(GraphOut),
    /// Monte-Carlo lift campaign.
    Mc(McArgs),
    /// Minimum spectral radius over all signings.
    SearchSigning(GraphOut),
    /// Greedy iterated lifts.
    Grow(GrowArgs),
    /// Spot-check a bilinear tail inequality on random signings.
    LemmaCheck(LemmaArgs),
}

#[derive(Args)]
struct GraphOut {
    /// Edge-list file or generator spec such as `complete(4)`.
    #[arg(long)]
    graph: String,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Complete,
    Bipartite,
    Cycle,
    Random,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, conflicts_with = "spec", required_unless_present = "spec")]
    family: Option<Family>,
    /// Generator spec, e.g. `copies(complete(4),25)`.
    #[arg(long)]
    spec: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum LiftKind {
    TwoLift,
    ShiftLift,
    Perm,
}

#[derive(Args)]
struct LiftArgs {
    #[arg(long)]
    graph: String,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "perm")]
    mode: LiftKind,
    /// Use this assignment file instead of drawing one.
    #[arg(long, conflicts_with = "mode")]
    assignment: Option<PathBuf>,
    /// Also write the assignment used.
    #[arg(long)]
    assignment_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long)]
    graph: String,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyShiftArgs {
    #[arg(long)]
    graph: String,
    /// Comma-separated shifts in base-edge order.
    #[arg(long, conflicts_with = "assignment", required_unless_present = "assignment")]
    shifts: Option<String>,
    #[arg(long, requires = "shifts")]
    k: Option<usize>,
    /// Assignment file made of `shift` lines.
    #[arg(long)]
    assignment: Option<PathBuf>,
    /// Relative residual tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SubsetKind {
    Exhaustive,
    Sampled,
}

#[derive(Args)]
struct EmlArgs {
    #[arg(long)]
    graph: String,
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: SubsetKind,
    /// Pairs to draw in sampled mode.
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restrict S and T to opposite colour classes and drop -d from λ.
    #[arg(long)]
    bipartite: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct McArgs {
    /// Flat `key = value` config; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    graph: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// `two_lift` or `shift_lift`.
    #[arg(long)]
    mode: Option<String>,
    /// Comma-separated bound constants.
    #[arg(long)]
    constants: Option<String>,
    /// Run trials on one thread.
    #[arg(long)]
    sequential: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-trial CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct GrowArgs {
    #[arg(long)]
    graph: String,
    #[arg(long, default_value_t = 5)]
    levels: usize,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_VERTICES)]
    max_vertices: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the final graph.
    #[arg(long)]
    graph_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Lemma3,
    Lemma4,
}

#[derive(Args)]
struct LemmaArgs {
    #[arg(long)]
    graph: String,
    #[arg(long, value_enum)]
    which: Which,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Outcome of a command that ran to completion.
enum Verdict {
    Pass,
    Fail,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CharacterizationViolation { .. } => 1,
        Error::NumericalFailure { .. }
        | Error::ResidualTooLarge { .. }
        | Error::MatchingFailure { .. }
        | Error::GenerationFailure { .. }
        | Error::SearchFailure { .. } => 3,
        _ => 2,
    }
}

fn load_graph(spec: &str) -> Result<RegularGraph, Error> {
    if Path::new(spec).exists() {
        return io::read_graph(spec);
    }
    spec.parse::<GraphSpec>()?.build()
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Summary line goes to stderr when the payload itself is on stdout.
fn summary(out: &Option<PathBuf>, line: impl Display) {
    if out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn gen(a: GenArgs) -> Result<Verdict, Error> {
    let need = |v: Option<usize>, name: &str| v.ok_or_else(|| Error::InvalidParameter(format!("--{name} is required")));
    let spec = match (a.family, a.spec) {
        (_, Some(s)) => s.parse()?,
        (Some(Family::Complete), _) => GraphSpec::Complete(need(a.m, "m")?),
        (Some(Family::Bipartite), _) => GraphSpec::Bipartite(need(a.m, "m")?),
        (Some(Family::Cycle), _) => GraphSpec::Cycle(need(a.n, "n")?),
        (Some(Family::Random), _) => GraphSpec::Random {
            n: need(a.n, "n")?,
            d: need(a.d, "d")?,
            seed: a.seed,
        },
        (None, None) => return Err(Error::InvalidParameter("--family or --spec is required".into())),
    };
    let g = spec.build()?;
    emit(&a.out, &io::graph_to_string(&g))?;
    summary(
        &a.out,
        format!("gen {spec}: n={} d={} edges={}", g.n(), g.d(), g.edge_count()),
    );
    Ok(Verdict::Pass)
}

fn lift(a: LiftArgs) -> Result<Verdict, Error> {
    let g = load_graph(&a.graph)?;
    let assignment = match &a.assignment {
        Some(p) => io::read_assignment(p)?,
        None => match a.mode {
            LiftKind::TwoLift => {
                if a.k != 2 {
                    return Err(Error::InvalidParameter("two-lift mode needs --k 2".into()));
                }
                Assignment::Perm(signing_to_assignment(&random_signing(&g, a.seed)))
            }
            LiftKind::ShiftLift => Assignment::Shift(random_shift_lift(&g, a.k, a.seed)?),
            LiftKind::Perm => Assignment::Perm(random_k_lift(&g, a.k, a.seed)?),
        },
    };
    let lifted = build_lift(&g, &assignment.to_permutations())?;
    if let Some(p) = &a.assignment_out {
        io::write_assignment(p, &assignment)?;
    }
    emit(&a.out, &io::graph_to_string(&lifted.graph))?;
    summary(
        &a.out,
        format!(
            "lift k={}: n={} components={}",
            assignment.k(),
            lifted.graph.n(),
            lifted.graph.component_count()
        ),
    );
    Ok(Verdict::Pass)
}

fn spec(a: SpecArgs) -> Result<Verdict, Error> {
    let g = load_graph(&a.graph)?;
    let s = eig_symmetric(&adjacency_matrix(&g), a.tol)?;
    emit(&a.out, &io::spectrum_to_string(&s))?;
    summary(
        &a.out,
        format!(
            "spec n={}: largest={} second={}",
            g.n(),
            io::format_value(s.largest()),
            io::format_value(s.second().unwrap_or(f64::NAN))
        ),
    );
    Ok(Verdict::Pass)
}

fn verify_shift(a: VerifyShiftArgs) -> Result<Verdict, Error> {
    let g = load_graph(&a.graph)?;
    let sa = match (&a.assignment, &a.shifts) {
        (Some(p), _) => match io::read_assignment(p)? {
            Assignment::Shift(s) => s,
            Assignment::Perm(_) => {
                return Err(Error::InvalidInput("assignment has perm lines; shifts required".into()))
            }
        },
        (None, Some(s)) => {
            let shifts = s
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidParameter(format!("bad shift {x:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let k =
                a.k.ok_or_else(|| Error::InvalidParameter("--k is required with --shifts".into()))?;
            ShiftAssignment::new(k, shifts)?
        }
        (None, None) => return Err(Error::InvalidParameter("--shifts or --assignment is required".into())),
    };
    let report = characterize(&g, &sa, a.tol)?;
    emit(&a.out, &io::report_to_string(&report)?)?;
    let verdict = match report.violation() {
        None => Verdict::Pass,
        Some(e) => {
            eprintln!("{e}");
            Verdict::Fail
        }
    };
    summary(
        &a.out,
        format!(
            "verify-shift k={} n={}: mismatch={:e} residual={:e} cross={:e}",
            report.k,
            report.n,
            report.max_multiset_mismatch,
            report.relative_residual(),
            report.max_cross_root_inner_product
        ),
    );
    Ok(verdict)
}

fn eml(a: EmlArgs) -> Result<Verdict, Error> {
    let g = load_graph(&a.graph)?;
    let mode = match a.mode {
        SubsetKind::Exhaustive => SubsetMode::Exhaustive,
        SubsetKind::Sampled => SubsetMode::Sampled {
            count: a.trials,
            seed: a.seed,
        },
    };
    let report = if a.bipartite {
        eml_check_bipartite(&g)?
    } else {
        eml_check(&g, eml_lambda(&g)?, mode)?
    };
    let converse = if a.bipartite {
        None
    } else {
        Some(converse_eml_alpha(&g, mode)?)
    };
    let mut text = io::report_to_string(&report)?;
    if let Some(c) = &converse {
        text.push_str("\n[converse]\n");
        text.push_str(&io::report_to_string(c)?);
    }
    emit(&a.out, &text)?;
    summary(
        &a.out,
        format!(
            "eml {}: max ratio {:e} vs λ {:e} over {} pairs",
            report.method, report.max_ratio, report.lambda, report.pairs_checked
        ),
    );
    Ok(if report.passed { Verdict::Pass } else { Verdict::Fail })
}

fn cheeger(a: GraphOut) -> Result<Verdict, Error> {
    let g = load_graph(&a.graph)?;
    let r = cheeger_check(&g)?;
    emit(&a.out, &io::report_to_string(&r)?)?;
    let e = &r.expansion;
    summary(
        &a.out,
        format!("cheeger: {:e} <= h={} <= {:e}", e.cheeger_lower, e.h, e.cheeger_upper),
    );
    Ok(if r.passed { Verdict::Pass } else { Verdict::Fail })
}

fn mc(a: McArgs) -> Result<Verdict, Error> {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::parse(&std::fs::read_to_string(p)?)?,
        None => ExperimentConfig::default(),
    };
    let overrides = [
        ("graph", a.graph),
        ("k", a.k.map(|x| x.to_string())),
        ("trials", a.trials.map(|x| x.to_string())),
        ("seed", a.seed.map(|x| x.to_string())),
        ("mode", a.mode),
        ("constants", a.constants),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    let exec = if a.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let start = Instant::now();
    let report = run_lift_trials(&cfg, exec)?;
    emit(&a.out, &io::report_to_string(&report)?)?;
    if let Some(p) = &a.csv {
        std::fs::write(p, io::records_to_csv(&report.rows())?)?;
    }
    eprintln!("wall time {:.3}s", start.elapsed().as_secs_f64());
    summary(
        &a.out,
        format!(
            "mc {} {} trials: completed={} failed={} median λ_new={:e}",
            cfg.graph, cfg.trials, report.completed, report.failed, report.median
        ),
    );
    Ok(if report.cross_check_failures == 0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    })
}

fn search_signing(a: GraphOut) -> Result<Verdict, Error> {
    let g = load_graph(&a.graph)?;
    let r = exhaustive_signing_search(&g, Execution::Parallel)?;
    emit(&a.out, &io::report_to_string(&r)?)?;
    summary(
        &a.out,
        format!(
            "search-signing: min ‖A_s‖ = {:e} vs 2√(d-1) = {:e} over {} signings",
            r.min_radius, r.ramanujan_bound, r.signings_checked
        ),
    );
    Ok(Verdict::Pass)
}

fn grow(a: GrowArgs) -> Result<Verdict, Error> {
    let g = load_graph(&a.graph)?;
    let t = greedy_lift_growth(
        &g,
        a.levels,
        a.samples,
        a.k,
        a.seed,
        a.max_vertices,
        Execution::Parallel,
    )?;
    emit(&a.out, &io::report_to_string(&t)?)?;
    if let Some(p) = &a.graph_out {
        io::write_graph(p, &t.graph)?;
    }
    let last = t.levels.last().expect("level 0 is always present");
    summary(
        &a.out,
        format!(
            "grow: {} levels, final n={} λ={:e}{}",
            t.levels.len() - 1,
            last.n,
            last.lambda,
            if t.truncated { " (truncated)" } else { "" }
        ),
    );
    Ok(Verdict::Pass)
}

fn lemma_check(a: LemmaArgs) -> Result<Verdict, Error> {
    let g = load_graph(&a.graph)?;
    let which = match a.which {
        Which::Lemma3 => LemmaKind::Lemma3,
        Which::Lemma4 => LemmaKind::Lemma4,
    };
    let r = lemma_inequality_spot_check(&g, a.trials, a.seed, which, Execution::Parallel)?;
    emit(&a.out, &io::report_to_string(&r)?)?;
    if !r.applicable {
        summary(
            &a.out,
            "lemma-check: not applicable, no admissible vectors for this graph",
        );
        return Ok(Verdict::Pass);
    }
    summary(
        &a.out,
        format!(
            "lemma-check: {} violations in {} draws, max ratio {:e}",
            r.violations, r.evaluated, r.max_ratio
        ),
    );
    Ok(if r.violations == 0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(t) = std::env::var("LIFTLAB_THREADS") {
        match t.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                init_thread_pool(n);
            }
            _ => {
                eprintln!("error: LIFTLAB_THREADS must be a positive integer, got {t:?}");
                return ExitCode::from(2);
            }
        }
    }
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Lift(a) => lift(a),
        Command::Spec(a) => spec(a),
        Command::VerifyShift(a) => verify_shift(a),
        Command::Eml(a) => eml(a),
        Command::Cheeger(a) => cheeger(a),
        Command::Mc(a) => mc(a),
        Command::SearchSigning(a) => search_signing(a),
        Command::Grow(a) => grow(a),
        Command::LemmaCheck(a) => lemma_check(a),
    };
    match result {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
