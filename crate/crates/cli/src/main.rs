use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use qoscompose::bench::{
    emit_boxplot_data, emit_results_csv, emit_traces_csv, format_mean_std_table, group_by_level,
    parse_results_csv, read_scenario, result_rows, run_scenario, write_scenario, Metric, ResultRow,
    ScenarioSpec,
};
use qoscompose::baseline::brute_force_optimum;
use qoscompose::exec::Execution;
use qoscompose::io::{
    generate_synthetic_pool, load_service_pool_csv, read_instance, sample_instance, write_instance,
    write_service_pool_csv, ColumnMap, ColumnRef, SyntheticSpec, WorkflowShape,
};
use qoscompose::qos::{aggregate_qos, Weights};
use qoscompose::{solve, Algorithm, CompositionProblem, SolverConfig};

/// QoS-aware service composition: optimizers, instance tools and benchmarks.
#[derive(Parser)]
#[command(name = "qoscompose", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic service pool or a problem instance.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run one optimizer on one instance.
    Solve(SolveArgs),
    /// Run a benchmark scenario and write records, tables and plot data.
    Bench(BenchArgs),
    /// Summarize a records CSV as mean / std tables.
    Stats(StatsArgs),
    /// Find the exact optimum of a small instance by enumeration.
    Oracle(OracleArgs),
    /// Check an instance file for structural errors.
    Validate(ValidateArgs),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Uniformly random services written as CSV.
    Pool(GenPoolArgs),
    /// A sampled instance written as JSON.
    Instance(GenInstanceArgs),
}

#[derive(Args)]
struct Ranges {
    /// Response time range `lo,hi`.
    #[arg(long, value_parser = parse_range, default_value = "19,90")]
    rt_range: (f64, f64),
    /// Energy range `lo,hi`.
    #[arg(long, value_parser = parse_range, default_value = "33,147")]
    energy_range: (f64, f64),
    /// Cost range `lo,hi`.
    #[arg(long, value_parser = parse_range, default_value = "28,106")]
    cost_range: (f64, f64),
}

#[derive(Args)]
struct GenPoolArgs {
    #[arg(long)]
    size: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    ranges: Ranges,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenInstanceArgs {
    /// Number of abstract tasks.
    #[arg(long, default_value_t = 11)]
    tasks: usize,
    /// Candidate services per task.
    #[arg(long)]
    candidates: usize,
    /// sequence, fork, branch, loop or mixed.
    #[arg(long, default_value = "sequence")]
    shape: WorkflowShape,
    /// Weights `w_t,w_e,w_c`; must sum to 1.
    #[arg(long, value_parser = parse_weights)]
    weights: Option<Weights>,
    #[arg(long)]
    seed: u64,
    /// Sample from this CSV pool instead of a synthetic one.
    #[arg(long)]
    pool: Option<PathBuf>,
    /// Pool columns for response time, energy and cost: indices or header names.
    #[arg(long, value_parser = parse_columns, default_value = "1,2,3")]
    columns: [ColumnRef; 3],
    /// Pool column holding service ids.
    #[arg(long)]
    id_column: Option<ColumnRef>,
    /// The pool file starts with a header row.
    #[arg(long)]
    header: bool,
    #[command(flatten)]
    ranges: Ranges,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value = "sfga")]
    algo: Algorithm,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    generations: usize,
    #[arg(long, default_value_t = 50)]
    pop: usize,
    #[arg(long, default_value_t = 5)]
    memeplexes: usize,
    /// Stop once this many evaluations have been spent.
    #[arg(long)]
    budget: Option<u64>,
    /// Write the run record as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Scenario spec file (qosbench/1).
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    spec: Option<PathBuf>,
    /// Built-in scenario: scenario1 or scenario2.
    #[arg(long)]
    scenario: Option<String>,
    /// Replace the scenario's seeds with 0..N.
    #[arg(long)]
    seeds: Option<u64>,
    /// Print the resolved spec and exit without running.
    #[arg(long)]
    print_spec: bool,
    #[arg(long, required_unless_present = "print_spec")]
    out_dir: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially, 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Write NA for wall times so output is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    records: PathBuf,
    /// fitness, response_time, energy or cost; all when omitted.
    #[arg(long)]
    metric: Option<Metric>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Refuse instances with more combinations than this.
    #[arg(long, default_value_t = qoscompose::baseline::DEFAULT_COMBO_CAP)]
    cap: u128,
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected `lo,hi`")?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok((num(lo)?, num(hi)?))
}

fn parse_columns(s: &str) -> Result<[ColumnRef; 3], String> {
    let cols: Vec<ColumnRef> = s.split(',').map(|c| c.parse().expect("column refs always parse")).collect();
    cols.try_into().map_err(|_| "expected three comma-separated columns".to_owned())
}

fn parse_weights(s: &str) -> Result<Weights, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [t, e, c] => Ok(Weights::new(t, e, c)),
        _ => Err("expected three comma-separated weights".into()),
    }
}

fn synthetic(ranges: &Ranges, size: usize, seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        response_time: ranges.rt_range,
        energy: ranges.energy_range,
        cost: ranges.cost_range,
        size,
        seed,
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_instance(path: &Path) -> Result<CompositionProblem> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn gen(cmd: GenCommand) -> Result<()> {
    match cmd {
        GenCommand::Pool(a) => {
            let pool = generate_synthetic_pool(&synthetic(&a.ranges, a.size, a.seed))?;
            write_file(&a.out, &write_service_pool_csv(&pool))?;
            println!("wrote {} services to {}", pool.len(), a.out.display());
        }
        GenCommand::Instance(a) => {
            let pool = match &a.pool {
                Some(path) => {
                    let map = ColumnMap {
                        response_time: a.columns[0].clone(),
                        energy: a.columns[1].clone(),
                        cost: a.columns[2].clone(),
                        id: a.id_column.clone(),
                    };
                    load_service_pool_csv(path, &map, a.header)?
                }
                None => generate_synthetic_pool(&synthetic(&a.ranges, a.tasks * a.candidates, a.seed))?,
            };
            let weights = a.weights.unwrap_or_default();
            let problem = sample_instance(&pool, a.tasks, a.candidates, a.shape, weights, a.seed)?;
            write_file(&a.out, &write_instance(&problem))?;
            println!(
                "wrote {} tasks x {} candidates ({} combinations) to {}",
                a.tasks,
                a.candidates,
                problem.combination_count(),
                a.out.display()
            );
        }
    }
    Ok(())
}

fn run_solve(a: SolveArgs) -> Result<()> {
    let problem = load_instance(&a.instance)?;
    let config = SolverConfig {
        population_size: a.pop,
        generations: a.generations,
        memeplex_count: a.memeplexes,
        max_evaluations: a.budget,
        seed: a.seed,
        ..SolverConfig::default()
    };
    let mut record = solve(&problem, a.algo, &config)?;
    record.instance = a.instance.display().to_string();
    let agg = aggregate_qos(&problem.workflow, &problem, &record.best())?;
    println!("algorithm      {}", record.algorithm);
    println!("genome         {}", record.best());
    println!("fitness        {:.6}", record.best_fitness);
    println!("response_time  {:.6}", agg.response_time);
    println!("energy         {:.6}", agg.energy);
    println!("cost           {:.6}", agg.cost);
    println!("evaluations    {}", record.evaluations);
    if let Some(out) = &a.out {
        let mut json = serde_json::to_string_pretty(&record)?;
        json.push('\n');
        write_file(out, &json)?;
    }
    Ok(())
}

/// Mean / std tables for every level and the requested metrics.
fn summary(rows: &[ResultRow], metrics: &[Metric]) -> Result<String> {
    let mut out = String::new();
    for &metric in metrics {
        for (level, groups) in group_by_level(rows, metric) {
            let labelled: Vec<(String, Vec<f64>)> = groups
                .into_iter()
                .map(|(name, v)| (name.parse::<Algorithm>().map_or(name, |a| a.label().to_owned()), v))
                .collect();
            out.push_str(&format_mean_std_table(&format!("{} (level {level})", metric.name()), &labelled)?);
            out.push('\n');
        }
    }
    Ok(out)
}

fn bench(a: BenchArgs) -> Result<()> {
    let mut spec = match (&a.spec, &a.scenario) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let mut spec = read_scenario(&text).with_context(|| format!("parsing {}", path.display()))?;
            spec.resolve_paths(path.parent().unwrap_or(Path::new(".")));
            spec
        }
        (None, Some(name)) => match ScenarioSpec::by_name(name) {
            Some(s) => s,
            None => bail!("unknown scenario `{name}` (scenario1, scenario2)"),
        },
        (None, None) => unreachable!("clap requires --spec or --scenario"),
    };
    if let Some(n) = a.seeds {
        spec.seeds = (0..n).collect();
    }
    if a.print_spec {
        print!("{}", write_scenario(&spec));
        return Ok(());
    }
    let out_dir = a.out_dir.expect("clap requires --out-dir");
    fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;

    eprintln!("running {} cells of {}", spec.cell_count(), spec.name);
    let records = run_scenario(&spec, Execution::from_workers(a.workers))?;
    let rows = result_rows(&records);
    write_file(&out_dir.join("records.csv"), &emit_results_csv(&rows, !a.no_timing))?;
    write_file(&out_dir.join("traces.csv"), &emit_traces_csv(&records))?;
    let tables = summary(&rows, &Metric::ALL)?;
    write_file(&out_dir.join("summary.txt"), &tables)?;
    for metric in Metric::ALL {
        for (level, groups) in group_by_level(&rows, metric) {
            let name = format!("boxplot_{}_n{level}.csv", metric.name());
            write_file(&out_dir.join(name), &emit_boxplot_data(&groups)?)?;
        }
    }
    print!("{tables}");
    eprintln!("results in {}", out_dir.display());
    Ok(())
}

fn stats(a: StatsArgs) -> Result<()> {
    let text = fs::read_to_string(&a.records).with_context(|| format!("reading {}", a.records.display()))?;
    let rows = parse_results_csv(&text).with_context(|| format!("parsing {}", a.records.display()))?;
    if rows.is_empty() {
        bail!("{} has no records", a.records.display());
    }
    let metrics = a.metric.map_or(Metric::ALL.to_vec(), |m| vec![m]);
    print!("{}", summary(&rows, &metrics)?);
    Ok(())
}

fn oracle(a: OracleArgs) -> Result<()> {
    let problem = load_instance(&a.instance)?;
    problem.validate()?;
    let r = brute_force_optimum(&problem, a.cap, Execution::from_workers(a.workers))?;
    let agg = aggregate_qos(&problem.workflow, &problem, &r.genome)?;
    println!("combinations   {}", r.combinations);
    println!("genome         {}", r.genome);
    println!("fitness        {:.6}", r.fitness);
    println!("response_time  {:.6}", agg.response_time);
    println!("energy         {:.6}", agg.energy);
    println!("cost           {:.6}", agg.cost);
    Ok(())
}

fn validate(a: ValidateArgs) -> Result<()> {
    let problem = load_instance(&a.instance)?;
    match problem.validate() {
        Ok(()) => {
            println!(
                "ok: {} tasks, {} combinations",
                problem.task_count(),
                problem.combination_count()
            );
            Ok(())
        }
        Err(report) => {
            for e in &report.0 {
                eprintln!("  {e}");
            }
            bail!("{} problem(s) in {}", report.0.len(), a.instance.display())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Gen(c) => gen(c),
        Command::Solve(a) => run_solve(a),
        Command::Bench(a) => bench(a),
        Command::Stats(a) => stats(a),
        Command::Oracle(a) => oracle(a),
        Command::Validate(a) => validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
