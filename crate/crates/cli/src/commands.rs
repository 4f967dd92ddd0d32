use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use topoflow_core::analysis::{community_report, group_report, subset_stats, write_subset_stats};
use topoflow_core::dataset::{load_idx, synthetic_digits, LabeledDataset, NodeRole};
use topoflow_core::output::{read_run, write_run, GraphDoc, GRAPH_EDGES_FILE, GRAPH_JSON_FILE, TIMELINE_FILE};
use topoflow_core::protocol::{run_experiment, ExperimentOutput};
use topoflow_core::seeds::{derive_seed, Stream};
use topoflow_core::topology::{graph_summary, write_edge_list};

use crate::config::{parse_config, parse_graph_spec, DataSource, RunConfig};
use crate::error::{CliError, CliResult};
use crate::plot::{plot_lines, PlotOptions};

pub const SUBSET_STATS_FILE: &str = "subset_stats.csv";
pub const COMMUNITY_REPORT_FILE: &str = "community_report.json";
pub const GROUP_REPORT_FILE: &str = "group_report.json";
pub const DEGREE_QUANTILE: f64 = 0.9;

pub const IDX_FILES: [&str; 4] = [
    "train-images-idx3-ubyte",
    "train-labels-idx1-ubyte",
    "t10k-images-idx3-ubyte",
    "t10k-labels-idx1-ubyte",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subset {
    G1,
    Community,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Data(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn generate_graph(spec_path: &Path, out_dir: &Path) -> CliResult<()> {
    let spec = parse_graph_spec(spec_path)?;
    let graph = spec.generate()?;
    fs::create_dir_all(out_dir)?;
    let mut w = BufWriter::new(File::create(out_dir.join(GRAPH_EDGES_FILE))?);
    write_edge_list(&graph, &mut w)?;
    w.flush()?;
    let doc = GraphDoc {
        node_count: graph.node_count(),
        edges: graph.edges().collect(),
        summary: graph_summary(&graph),
        communities: spec.communities(),
    };
    write_json(&out_dir.join(GRAPH_JSON_FILE), &doc)
}

pub fn load_data(cfg: &RunConfig) -> CliResult<(LabeledDataset, LabeledDataset)> {
    match cfg.data.source {
        DataSource::Synthetic => {
            let train = cfg.data.synthetic_train_per_class.expect("resolved config");
            let test = cfg.data.synthetic_test_per_class.expect("resolved config");
            Ok((
                synthetic_digits(train, derive_seed(cfg.master_seed, Stream::Synthetic, 0)),
                synthetic_digits(test, derive_seed(cfg.master_seed, Stream::Synthetic, 1)),
            ))
        }
        DataSource::Idx => {
            let dir = cfg.data.idx_dir.as_ref().expect("resolved config");
            let path = |k: usize| dir.join(IDX_FILES[k]);
            Ok((load_idx(path(0), path(1))?, load_idx(path(2), path(3))?))
        }
    }
}

/// Parses the recipe, loads data, runs every round and writes the run
/// directory. Returns the directory used.
pub fn run(
    config_path: &Path,
    out: Option<&Path>,
    threads: Option<usize>,
    seed_override: Option<u64>,
) -> CliResult<(PathBuf, ExperimentOutput)> {
    let (resolved, experiment) = parse_config(config_path, seed_override)?;
    let out_dir = out
        .map(Path::to_path_buf)
        .or_else(|| resolved.output.dir.clone())
        .ok_or_else(|| CliError::Config("no output directory: pass --out or set output.dir".into()))?;
    let (train, test) = load_data(&resolved)?;
    let output = match threads {
        Some(0) => return Err(CliError::Config("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(|| run_experiment(&experiment, &train, &test))?,
        None => run_experiment(&experiment, &train, &test)?,
    };
    write_run(&out_dir, &output, &resolved)?;
    Ok((out_dir, output))
}

/// Writes subset curves and the matching report next to the run files.
pub fn analyze(dir: &Path, subset: Option<Subset>) -> CliResult<Vec<PathBuf>> {
    let run = read_run(dir)?;
    let is_community = run.plan.communities().is_some();
    let subset = subset.unwrap_or(if is_community { Subset::Community } else { Subset::G1 });
    let mut written = Vec::new();
    let curves = match subset {
        Subset::G1 => {
            if is_community {
                return Err(CliError::Config("run has no G1/G2 split; use --subset community".into()));
            }
            let g1 = run.plan.nodes_with_role(NodeRole::G1);
            let g2 = run.plan.nodes_with_role(NodeRole::G2);
            let all: Vec<usize> = (0..run.roles.len()).collect();
            let mut curves = vec![subset_stats(&run.timeline, &g1, "G1 nodes")?];
            if !g2.is_empty() {
                curves.push(subset_stats(&run.timeline, &g2, "G2 nodes")?);
            }
            curves.push(subset_stats(&run.timeline, &all, "all nodes")?);
            let path = dir.join(GROUP_REPORT_FILE);
            write_json(&path, &group_report(&run, DEGREE_QUANTILE)?)?;
            written.push(path);
            curves
        }
        Subset::Community => {
            let report = community_report(&run)?;
            let path = dir.join(COMMUNITY_REPORT_FILE);
            write_json(&path, &report)?;
            written.push(path);
            report.mean_curves
        }
    };
    let path = dir.join(SUBSET_STATS_FILE);
    let mut w = BufWriter::new(File::create(&path)?);
    write_subset_stats(&curves, &mut w)?;
    w.flush()?;
    written.insert(0, path);
    Ok(written)
}

pub fn plot(csv_path: &Path, svg_path: &Path, title: Option<String>) -> CliResult<()> {
    let input = File::open(csv_path).map_err(|e| CliError::Data(format!("{}: {e}", csv_path.display())))?;
    let opts = PlotOptions {
        title,
        ..PlotOptions::default()
    };
    let svg = plot_lines(input, &opts)?;
    fs::write(svg_path, svg)?;
    Ok(())
}

/// Path of the timeline inside a run directory.
pub fn timeline_path(dir: &Path) -> PathBuf {
    dir.join(TIMELINE_FILE)
}
