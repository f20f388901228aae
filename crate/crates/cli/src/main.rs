use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use owa_winner::analysis::{bound, bound_curves, iso_curves, suggested_gamma, BoundFamily, BoundQuery, Grid};
use owa_winner::gen::{generate, GenSpec, UtilityKind};
use owa_winner::ilp::{emit_lp, parse_solution, verify_solution};
use owa_winner::model::{item_labels, parse_preflib_soc};
use owa_winner::number::{format_decimal, format_rational, parse_rational, to_f64};
use owa_winner::scoring::{check_submodular_with, SubmodularMode, SubmodularityCheck};
use owa_winner::solve::{solve, Algorithm, InnerSolver, SolveOptions, SolveReport, Trace};
use owa_winner::{committee_score, parse_instance, serialize_instance, Error, Exec, Instance, OwaFamily, Rational};

/// Exact and approximate solvers for OWA-based committee selection.
#[derive(Parser)]
#[command(name = "owa-winner", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a committee.
    Solve(SolveArgs),
    /// Score a given committee.
    Score(ScoreArgs),
    /// Generate a random instance.
    Gen(GenArgs),
    /// Convert a PrefLib strict-order (.soc) file into an instance with Borda utilities.
    ImportPreflib(ImportArgs),
    /// Write the integer linear program in LP format.
    IlpExport(IlpExportArgs),
    /// Check a solver's variable assignment against the program.
    IlpVerify(IlpVerifyArgs),
    /// Evaluate approximation bounds or tabulate them over a grid.
    Bounds(BoundsArgs),
    /// Search for a violation of submodularity.
    CheckSubmodular(CheckArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    JsonLines,
    Csv,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file, or `-` for stdin.
    #[arg(default_value = "-")]
    instance: PathBuf,
    #[arg(long, default_value = "brute", value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[arg(long, value_parser = parse_fraction)]
    epsilon: Option<Rational>,
    #[arg(long, value_parser = parse_fraction)]
    gamma: Option<Rational>,
    #[arg(long)]
    ell: Option<usize>,
    /// 1-best solver used by `hurwicz`.
    #[arg(long, default_value = "greedy", value_parser = parse_inner)]
    inner: InnerSolver,
    /// Maximum number of committees brute force may enumerate.
    #[arg(long, default_value_t = owa_winner::exact::DEFAULT_BUDGET)]
    budget: u128,
    /// Also print the per-iteration trace.
    #[arg(long)]
    trace: bool,
    #[arg(long, value_enum, default_value = "plain")]
    format: Format,
    /// Run on a single thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct ScoreArgs {
    instance: PathBuf,
    /// Committee items, as `a3` or `3` (1-based).
    #[arg(required = true)]
    items: Vec<String>,
    #[arg(long, value_enum, default_value = "plain")]
    format: Format,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_parser = parse_kind)]
    kind: UtilityKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long = "K", short = 'k')]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest value for `uniform` utilities.
    #[arg(long)]
    max: Option<u32>,
    /// Approval probability for `approval` utilities.
    #[arg(long)]
    rate: Option<f64>,
    /// OWA family, e.g. `harmonic` or `aprog 0 1`. Defaults to `kbest K`.
    #[arg(long)]
    owa: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ImportArgs {
    input: PathBuf,
    #[arg(long = "K", short = 'k')]
    k: usize,
    /// OWA family. Defaults to `kbest K`.
    #[arg(long)]
    owa: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct IlpExportArgs {
    instance: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct IlpVerifyArgs {
    instance: PathBuf,
    /// `name value` pairs, one per line.
    solution: PathBuf,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, default_value = "slots", value_parser = parse_family)]
    family: BoundFamily,
    /// Grid such as `beta=0:1:5;gamma=0.1,0.5;kl=1,2;ell=1`; emits CSV.
    #[arg(long)]
    grid: Option<String>,
    /// With `--grid`: emit the slots bound's level set at this value instead.
    #[arg(long)]
    iso: Option<f64>,
    /// Print the suggested gamma for `--K`, `--ell` and `--m`.
    #[arg(long)]
    suggest_gamma: bool,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long = "K", short = 'k')]
    k: Option<usize>,
    #[arg(long, default_value_t = 1)]
    ell: usize,
    #[arg(long)]
    m: Option<usize>,
    /// OWA family for the kbest-proxy bound.
    #[arg(long)]
    owa: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    instance: PathBuf,
    /// Check this many random triples instead of all of them.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest number of triples the exhaustive check may visit.
    #[arg(long, default_value_t = SubmodularMode::DEFAULT_EXHAUSTIVE_BUDGET)]
    budget: u128,
}

fn parse_fraction(s: &str) -> Result<Rational, String> {
    parse_rational(s)
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

fn parse_inner(s: &str) -> Result<InnerSolver, String> {
    s.parse()
}

fn parse_kind(s: &str) -> Result<UtilityKind, String> {
    s.parse()
}

fn parse_family(s: &str) -> Result<BoundFamily, String> {
    s.parse()
}

enum Failure {
    Core(Error),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget_or_feasibility() { 2 } else { 1 })
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Solve(args) => cmd_solve(args),
        Command::Score(args) => cmd_score(args),
        Command::Gen(args) => cmd_gen(args),
        Command::ImportPreflib(args) => cmd_import(args),
        Command::IlpExport(args) => {
            let inst = load_instance(&args.instance)?;
            write_output(args.output.as_deref(), &emit_lp(&inst))
        }
        Command::IlpVerify(args) => cmd_ilp_verify(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::CheckSubmodular(args) => cmd_check(args),
    }
}

fn read_input(path: &Path) -> CliResult<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }
}

fn load_instance(path: &Path) -> CliResult<Instance> {
    let text = read_input(path)?;
    parse_instance(&text).map_err(|e| match e {
        Error::Parse { .. } => Failure::Input(format!("{}: {e}", path.display())),
        other => Failure::Core(other),
    })
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
        }
        _ => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn owa_family(spec: Option<&str>, k: usize) -> CliResult<OwaFamily> {
    match spec {
        None => Ok(OwaFamily::KBest(k)),
        Some(s) => {
            let tokens: Vec<&str> = s.split_whitespace().collect();
            OwaFamily::parse(&tokens).map_err(Failure::Input)
        }
    }
}

fn item_list(items: &[usize]) -> Vec<String> {
    items.iter().map(|j| format!("a{}", j + 1)).collect()
}

fn cmd_solve(args: SolveArgs) -> CliResult<()> {
    let inst = load_instance(&args.instance)?;
    let opts = SolveOptions {
        epsilon: args.epsilon,
        gamma: args.gamma,
        ell: args.ell,
        inner: args.inner,
        budget: args.budget,
        exec: if args.sequential { Exec::Sequential } else { Exec::default() },
    };
    let report = solve(&inst, args.algorithm, &opts)?;
    let mut out = String::new();
    match args.format {
        Format::Plain => {
            out += &format!("{}\n", report.winners);
            out += &format!("algorithm: {}\n", report.algorithm);
            out += &format!("guarantee: {}\n", guarantee_text(report.guarantee));
            for (key, value) in &report.details {
                out += &format!("{key}: {value}\n");
            }
            if args.trace {
                if let Some(trace) = &report.trace {
                    out += "\n";
                    out += &trace_csv(trace)?;
                }
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["winners", "score", "algorithm", "guarantee"])?;
            w.write_record([
                report.winners.labels(),
                format_rational(&report.winners.score()),
                report.algorithm.to_string(),
                guarantee_text(report.guarantee),
            ])?;
            out += &csv_string(w)?;
            if args.trace {
                if let Some(trace) = &report.trace {
                    out += "\n";
                    out += &trace_csv(trace)?;
                }
            }
        }
        Format::JsonLines => {
            out += &report_json(&report).to_string();
            out += "\n";
            if args.trace {
                for row in report.trace.iter().flat_map(trace_json) {
                    out += &row.to_string();
                    out += "\n";
                }
            }
        }
    }
    write_output(None, &out)
}

fn guarantee_text(g: Option<f64>) -> String {
    g.map_or_else(|| "none".to_string(), |v| v.to_string())
}

fn report_json(report: &SolveReport) -> Value {
    let details: Map<String, Value> = report
        .details
        .iter()
        .map(|(k, v)| (k.to_string(), Value::String(v.clone())))
        .collect();
    json!({
        "type": "result",
        "winners": item_list(report.winners.items()),
        "score": format_rational(&report.winners.score()),
        "score_value": to_f64(&report.winners.score()),
        "algorithm": report.algorithm.name(),
        "guarantee": report.guarantee,
        "details": details,
    })
}

fn opt_list(values: &[Option<Rational>]) -> String {
    values
        .iter()
        .map(|v| v.map_or_else(|| "-".to_string(), |g| format_rational(&g)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn agents(list: &[usize]) -> String {
    join(&list.iter().map(|j| j + 1).collect::<Vec<_>>())
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> CliResult<String> {
    let bytes = w.into_inner().map_err(|e| Failure::Input(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Input(e.to_string()))
}

fn trace_csv(trace: &Trace) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match trace {
        Trace::Greedy(t) => {
            w.write_record(["iteration", "chosen", "score_before", "score_after", "gains"])?;
            for it in &t.iterations {
                w.write_record([
                    it.iteration.to_string(),
                    format!("a{}", it.chosen + 1),
                    format_rational(&it.score_before),
                    format_rational(&it.score_after),
                    opt_list(&it.gains),
                ])?;
            }
        }
        Trace::Slots(its) => {
            w.write_record(["iteration", "chosen", "coverage", "free_slots", "free_total"])?;
            for it in its {
                let coverage: Vec<String> = it
                    .coverage
                    .iter()
                    .map(|c| c.map_or_else(|| "-".to_string(), |c| c.to_string()))
                    .collect();
                w.write_record([
                    it.iteration.to_string(),
                    format!("a{}", it.chosen + 1),
                    coverage.join(" "),
                    join(&it.state.free),
                    it.state.free_total().to_string(),
                ])?;
            }
        }
        Trace::Segmented(rounds) => {
            w.write_record(["round", "candidates", "picked", "survivors"])?;
            for r in rounds {
                w.write_record([
                    r.round.to_string(),
                    agents(&r.candidates),
                    item_labels(&r.picked),
                    agents(&r.survivors),
                ])?;
            }
        }
    }
    csv_string(w)
}

fn trace_json(trace: &Trace) -> Vec<Value> {
    let opt = |v: &Option<Rational>| v.map(|g| format_rational(&g));
    match trace {
        Trace::Greedy(t) => t
            .iterations
            .iter()
            .map(|it| {
                json!({
                    "type": "trace",
                    "iteration": it.iteration,
                    "chosen": format!("a{}", it.chosen + 1),
                    "score_before": format_rational(&it.score_before),
                    "score_after": format_rational(&it.score_after),
                    "gains": it.gains.iter().map(opt).collect::<Vec<_>>(),
                })
            })
            .collect(),
        Trace::Slots(its) => its
            .iter()
            .map(|it| {
                json!({
                    "type": "trace",
                    "iteration": it.iteration,
                    "chosen": format!("a{}", it.chosen + 1),
                    "coverage": it.coverage,
                    "free_slots": it.state.free,
                })
            })
            .collect(),
        Trace::Segmented(rounds) => rounds
            .iter()
            .map(|r| {
                json!({
                    "type": "trace",
                    "round": r.round,
                    "candidates": r.candidates.iter().map(|j| j + 1).collect::<Vec<_>>(),
                    "picked": item_list(&r.picked),
                    "survivors": r.survivors.iter().map(|j| j + 1).collect::<Vec<_>>(),
                })
            })
            .collect(),
    }
}

fn parse_item(s: &str, m: usize) -> CliResult<usize> {
    let digits = s.strip_prefix('a').unwrap_or(s);
    match digits.parse::<usize>() {
        Ok(i) if (1..=m).contains(&i) => Ok(i - 1),
        _ => Err(Failure::Input(format!("'{s}' is not an item in a1..a{m}"))),
    }
}

fn cmd_score(args: ScoreArgs) -> CliResult<()> {
    let inst = load_instance(&args.instance)?;
    let mut items = args
        .items
        .iter()
        .map(|s| parse_item(s, inst.m()))
        .collect::<CliResult<Vec<_>>>()?;
    items.sort_unstable();
    let breakdown = committee_score(&inst, &items, None)?;
    let labels = item_labels(&items);
    let total = format_rational(&breakdown.total);
    let out = match args.format {
        Format::Plain => {
            let mut out = format!("{labels} / {total}\n");
            for (i, (v, row)) in breakdown
                .per_agent
                .iter()
                .zip(&breakdown.per_agent_sorted_utilities)
                .enumerate()
            {
                let row: Vec<String> = row.iter().map(format_rational).collect();
                out += &format!("agent {}: {} ({})\n", i + 1, format_rational(v), row.join(" "));
            }
            out
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["agent", "value"])?;
            for (i, v) in breakdown.per_agent.iter().enumerate() {
                w.write_record([(i + 1).to_string(), format_rational(v)])?;
            }
            w.write_record(["total".to_string(), total])?;
            csv_string(w)?
        }
        Format::JsonLines => {
            let per_agent: Vec<String> = breakdown.per_agent.iter().map(format_rational).collect();
            format!(
                "{}\n",
                json!({"winners": item_list(&items), "score": total, "per_agent": per_agent})
            )
        }
    };
    write_output(None, &out)
}

fn cmd_gen(args: GenArgs) -> CliResult<()> {
    let kind = match args.kind {
        UtilityKind::Uniform { max } => UtilityKind::Uniform {
            max: args.max.unwrap_or(max),
        },
        UtilityKind::Approval { rate } => UtilityKind::Approval {
            rate: args.rate.unwrap_or(rate),
        },
        UtilityKind::Borda => UtilityKind::Borda,
    };
    let spec = GenSpec {
        kind,
        n: args.n,
        m: args.m,
        k: args.k,
        family: owa_family(args.owa.as_deref(), args.k)?,
        seed: args.seed,
    };
    let inst = generate(&spec)?;
    write_output(args.output.as_deref(), &serialize_instance(&inst))
}

fn cmd_import(args: ImportArgs) -> CliResult<()> {
    let text = read_input(&args.input)?;
    let profile = parse_preflib_soc(&text).map_err(|e| Failure::Input(format!("{}: {e}", args.input.display())))?;
    let u = profile.to_borda()?;
    let inst = Instance::with_family(u, owa_family(args.owa.as_deref(), args.k)?, args.k)?;
    write_output(args.output.as_deref(), &serialize_instance(&inst))
}

fn cmd_ilp_verify(args: IlpVerifyArgs) -> CliResult<()> {
    let inst = load_instance(&args.instance)?;
    let text = read_input(&args.solution)?;
    let asg = parse_solution(&inst, &text)?;
    let v = verify_solution(&inst, &asg)?;
    let mut out = format!("ok: {}\nobjective: {}\n", v.winners, format_rational(&v.objective));
    if !v.objective_matches_score {
        out += "note: slot order is not sorted by utility; objective is below the committee score\n";
    }
    write_output(None, &out)
}

fn cmd_bounds(args: BoundsArgs) -> CliResult<()> {
    if args.suggest_gamma {
        let (k, m) = match (args.k, args.m) {
            (Some(k), Some(m)) => (k, m),
            _ => return Err(Failure::Input("--suggest-gamma needs --K and --m".into())),
        };
        let s = suggested_gamma(k, args.ell, m)?;
        return write_output(args.output.as_deref(), &format!("gamma: {}\nx: {}\n", s.gamma, s.x));
    }
    if let Some(spec) = &args.grid {
        let grid: Grid = spec.parse().map_err(Failure::Input)?;
        let csv = match args.iso {
            Some(target) => iso_curves(target, &grid),
            None => bound_curves(args.family, &grid)?,
        };
        return write_output(args.output.as_deref(), &csv);
    }
    let k = args
        .k
        .ok_or_else(|| Failure::Input("bounds needs --grid, --suggest-gamma or --K".into()))?;
    let mut q = BoundQuery::new(args.family, args.beta, args.gamma, k, args.ell);
    if let Some(spec) = &args.owa {
        q.owa = Some(owa_winner::make_owa(&owa_family(Some(spec), k)?, k)?);
    }
    let b = bound(&q)?;
    let mut out = format!("{}\n", b.value);
    if b.vacuous {
        out += "note: vacuous (formula is negative for these parameters)\n";
    }
    write_output(args.output.as_deref(), &out)
}

fn cmd_check(args: CheckArgs) -> CliResult<()> {
    let inst = load_instance(&args.instance)?;
    let mode = match args.samples {
        Some(samples) => SubmodularMode::Sampled {
            samples,
            seed: args.seed,
        },
        None => SubmodularMode::Exhaustive { budget: args.budget },
    };
    let out = match check_submodular_with(&inst, mode, Exec::default())? {
        SubmodularityCheck::Ok { triples_checked } => {
            format!("submodular: no violation in {triples_checked} triples\n")
        }
        SubmodularityCheck::Violated(w) => format!(
            "violated: W = {{{}}}, W' = {{{}}}, a = a{}, gain(W) = {} < gain(W') = {}\n",
            item_labels(&w.w),
            item_labels(&w.w_prime),
            w.a + 1,
            format_decimal(&w.lhs),
            format_decimal(&w.rhs)
        ),
    };
    write_output(None, &out)
}
