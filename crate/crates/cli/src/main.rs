use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rmhsbm::estimation::{bic_delta, summarize};
use rmhsbm::harness::{emit_figures, run_study};
use rmhsbm::hierarchy::{build_parameter_groups, presets, GroupKind};
use rmhsbm::io::{load_population, read_graph, write_population};
use rmhsbm::sampling::{
    corrupt_parameters, draw_model_parameters, perturb_parameters, sample_conditional_sbm, BetaPrior,
};
use rmhsbm::testing::{matrix_to_csv, run_tests};
use rmhsbm::{Error, HierarchySpec, Membership, Method, PerturbationMode, Seed, StudyConfig, TestReport};

#[derive(Parser)]
#[command(name = "rmhsbm", version, about = "Repeated-motif hierarchical SBM toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation sweep from a study config and write its CSVs.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "study_out")]
        out: PathBuf,
    },
    /// Sample a population of graphs from a randomly drawn model.
    Sample {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        graphs: usize,
        /// Number of tied cells to redraw.
        #[arg(long, default_value_t = 0)]
        corrupt: usize,
        #[arg(long, default_value_t = 0.0)]
        relative_sd: f64,
        #[arg(long, default_value = "population")]
        mode: PerturbationMode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Test every parameter group on a population of graphs.
    Test {
        /// Population manifest (JSON).
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value = "wilks-aggregated")]
        method: Method,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Directory for report.json and CSVs; prints JSON when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// BIC comparison of the tied model against the free SBM for one graph.
    Bic {
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        membership: PathBuf,
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the tied parameter groups of a hierarchy.
    Groups {
        #[command(flatten)]
        spec: SpecArgs,
        /// Emit JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Convert a test report to rejection-matrix and p-profile CSVs.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SpecArgs {
    /// Hierarchy spec file (JSON).
    #[arg(long, conflicts_with = "preset")]
    spec: Option<PathBuf>,
    /// Built-in hierarchy: bnu1, bnu1-desk or three-motif.
    #[arg(long)]
    preset: Option<String>,
    /// Overrides every block size.
    #[arg(long)]
    block_size: Option<usize>,
}

impl SpecArgs {
    fn load(&self) -> Result<HierarchySpec, Failure> {
        let spec = match (&self.spec, &self.preset) {
            (Some(path), _) => HierarchySpec::from_path(path)?,
            (None, Some(name)) => presets::by_name(name, 20)
                .ok_or_else(|| Failure::Usage(format!("unknown preset {name:?}")))?,
            (None, None) => return Err(Failure::Usage("one of --spec or --preset is required".into())),
        };
        Ok(match self.block_size {
            Some(size) => spec.with_uniform_block_size(size)?,
            None => spec,
        })
    }
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Core(e) if e.is_input_error() => 2,
            Failure::Core(Error::Numeric(_) | Error::Domain(_)) => 3,
            Failure::Core(_) => 1,
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })?;
    }
    fs::write(path, text).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
    Ok(())
}

fn write_report(report: &TestReport, dir: &Path) -> Result<(), Failure> {
    write_text(&dir.join("report.json"), &report.to_json())?;
    write_text(&dir.join("rejection_matrix.csv"), &report.rejection_matrix_csv())?;
    write_text(&dir.join("p_profile.csv"), &report.p_profile_csv())
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Simulate { config, seed, out } => {
            let mut config = StudyConfig::from_path(&config)?;
            if let Some(seed) = seed {
                config.master_seed = seed;
            }
            let result = run_study(&config)?;
            emit_figures(&result, &out)?;
            write_text(&out.join("study.json"), &result.to_json())?;
            println!("wrote {} sweep points to {}", result.points.len(), out.display());
        }
        Command::Sample { spec, seed, graphs, corrupt, relative_sd, mode, out } => {
            let spec = spec.load()?;
            let groups = build_parameter_groups(&spec);
            let master = Seed::new(seed);
            let base = draw_model_parameters(&groups, BetaPrior::default(), master)?;
            let corrupted = corrupt_parameters(&base, &groups, corrupt, BetaPrior::default(), master.derive("corrupt", 0))?;
            let perturbed = perturb_parameters(&corrupted.model, relative_sd, mode, master.derive("perturb", 0))?;
            let tau = Membership::contiguous(spec.block_sizes());
            let population = (0..graphs)
                .map(|s| sample_conditional_sbm(&perturbed.realize(s), &tau, master.derive("graph", s as u64)))
                .collect::<Result<Vec<_>, _>>()?;
            let manifest = write_population(&out, &population, seed)?;
            let model = serde_json::to_string_pretty(&corrupted).expect("model serializes");
            write_text(&out.join("model.json"), &model)?;
            println!("{}", manifest.display());
        }
        Command::Test { manifest, spec, method, alpha, out } => {
            let spec = spec.load()?;
            let groups = build_parameter_groups(&spec);
            let (_, graphs) = load_population(&manifest, Some(spec.k_star()))?;
            let population = graphs.iter().map(summarize).collect::<Result<Vec<_>, _>>()?;
            let report = run_tests(&population, &groups, method, alpha)?;
            match out {
                Some(dir) => write_report(&report, &dir)?,
                None => println!("{}", report.to_json()),
            }
        }
        Command::Bic { edges, membership, spec, out } => {
            let spec = spec.load()?;
            let groups = build_parameter_groups(&spec);
            let graph = read_graph(&edges, &membership, Some(spec.k_star()))?;
            let report = bic_delta(&summarize(&graph)?, &groups)?;
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            match out {
                Some(path) => write_text(&path, &json)?,
                None => println!("{json}"),
            }
        }
        Command::Groups { spec, json } => {
            let groups = build_parameter_groups(&spec.load()?);
            if json {
                println!("{}", serde_json::to_string_pretty(&groups).expect("groups serialize"));
            } else {
                println!("group_id,kind,size,cells");
                for g in groups.groups() {
                    let cells: Vec<String> = g.cells.iter().map(|c| format!("{}-{}", c.row, c.col)).collect();
                    println!("{},{},{},{}", g.id, describe(&g.kind), g.len(), cells.join(" "));
                }
                eprintln!("{} groups, {} tied cells, total df {}", groups.len(), groups.tied_cells().len(), groups.total_df());
            }
        }
        Command::Report { input, out } => {
            let text = fs::read_to_string(&input).map_err(|e| Error::Io { path: input.clone(), source: e })?;
            let report = TestReport::from_json_str(&text)?;
            write_text(&out.join("rejection_matrix.csv"), &matrix_to_csv(&report.rejection_matrix))?;
            write_text(&out.join("p_profile.csv"), &report.p_profile_csv())?;
        }
    }
    Ok(())
}

fn describe(kind: &GroupKind) -> String {
    match kind {
        GroupKind::Motif { motif, row, col } => format!("motif {motif} ({row} {col})"),
        GroupKind::MotifPair { parent, motifs } => format!("motif-pair {} {} under {parent}", motifs.0, motifs.1),
        GroupKind::Split { node, children } => format!("split {node} ({} {})", children.0, children.1),
        GroupKind::Leaf { node } => format!("leaf {node}"),
        GroupKind::Custom => "custom".into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Core(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(failure.exit_code())
        }
    }
}
