//! On-disk layout of a finished run and readers for it.
//!
//! A run directory holds `timeline.csv`, one `confusion_<node>.csv` per node,
//! `graph.edges`, `graph.json`, `plan.json` and `config.echo.json`.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{NodeRole, PartitionPlan, NUM_CLASSES};
use crate::protocol::{Confusion, ExperimentOutput, Timeline};
use crate::topology::{read_edge_list, write_edge_list, Graph, GraphSummary};
use crate::{Error, Result};

pub const TIMELINE_FILE: &str = "timeline.csv";
pub const GRAPH_EDGES_FILE: &str = "graph.edges";
pub const GRAPH_JSON_FILE: &str = "graph.json";
pub const PLAN_FILE: &str = "plan.json";
pub const CONFIG_ECHO_FILE: &str = "config.echo.json";

pub fn confusion_file(node: usize) -> String {
    format!("confusion_{node}.csv")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub node_count: usize,
    pub edges: Vec<(usize, usize)>,
    pub summary: GraphSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub communities: Option<Vec<usize>>,
}

/// Everything analysis needs, loaded back from a run directory.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub timeline: Timeline,
    pub roles: Vec<NodeRole>,
    /// `confusions[k][node]` belongs to `timeline.rounds[k]`.
    pub confusions: Vec<Vec<Confusion>>,
    pub graph: Graph,
    pub graph_doc: GraphDoc,
    pub plan: PartitionPlan,
}

impl RunArtifacts {
    pub fn final_confusions(&self) -> &[Confusion] {
        self.confusions.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn write_timeline<W: Write>(timeline: &Timeline, roles: &[NodeRole], mut out: W) -> Result<()> {
    writeln!(out, "round,node,role,accuracy")?;
    for (round, row) in timeline.rounds.iter().zip(&timeline.accuracy) {
        for (node, acc) in row.iter().enumerate() {
            writeln!(out, "{round},{node},{},{acc}", roles[node])?;
        }
    }
    Ok(())
}

fn write_confusions<W: Write>(rounds: &[usize], per_round: &[&Confusion], mut out: W) -> Result<()> {
    write!(out, "round,true")?;
    for c in 0..NUM_CLASSES {
        write!(out, ",pred_{c}")?;
    }
    writeln!(out)?;
    for (round, conf) in rounds.iter().zip(per_round) {
        for (t, row) in conf.iter().enumerate() {
            write!(out, "{round},{t}")?;
            for v in row {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Writes every run artifact into `dir`, creating it if needed. `echo` is the
/// resolved configuration as the caller wants it recorded.
pub fn write_run<E: Serialize>(dir: &Path, out: &ExperimentOutput, echo: &E) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = create(dir, TIMELINE_FILE)?;
    write_timeline(&out.timeline, &out.plan.node_roles, &mut w)?;
    w.flush()?;

    for node in 0..out.graph.node_count() {
        let per_round: Vec<&Confusion> = out.confusion_timeline.iter().map(|r| &r[node]).collect();
        let mut w = create(dir, &confusion_file(node))?;
        write_confusions(&out.timeline.rounds, &per_round, &mut w)?;
        w.flush()?;
    }

    let mut w = create(dir, GRAPH_EDGES_FILE)?;
    write_edge_list(&out.graph, &mut w)?;
    w.flush()?;

    let doc = GraphDoc {
        node_count: out.graph.node_count(),
        edges: out.graph.edges().collect(),
        summary: out.summary.clone(),
        communities: out.config.graph_spec.communities(),
    };
    write_json(dir, GRAPH_JSON_FILE, &doc)?;
    write_json(dir, PLAN_FILE, &out.plan)?;
    write_json(dir, CONFIG_ECHO_FILE, echo)
}

fn csv_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            lines.push((k + 1, line));
        }
    }
    Ok(lines)
}

fn field<T: std::str::FromStr>(file: &str, line: usize, name: &str, raw: Option<&str>) -> Result<T> {
    let raw = raw.ok_or_else(|| Error::format(file, format!("line {line}: missing column {name}")))?;
    raw.trim()
        .parse()
        .map_err(|_| Error::format(file, format!("line {line}: bad {name} value {raw:?}")))
}

pub fn read_timeline(path: &Path) -> Result<(Timeline, Vec<NodeRole>)> {
    let lines = csv_lines(path)?;
    let mut iter = lines.into_iter();
    match iter.next() {
        Some((_, h)) if h.trim() == "round,node,role,accuracy" => {}
        _ => return Err(Error::format(TIMELINE_FILE, "line 1: expected header round,node,role,accuracy")),
    }
    let mut timeline = Timeline::default();
    let mut roles: Vec<Option<NodeRole>> = Vec::new();
    for (line, text) in iter {
        let mut cols = text.split(',');
        let round: usize = field(TIMELINE_FILE, line, "round", cols.next())?;
        let node: usize = field(TIMELINE_FILE, line, "node", cols.next())?;
        let role: NodeRole = field(TIMELINE_FILE, line, "role", cols.next())?;
        let acc: f64 = field(TIMELINE_FILE, line, "accuracy", cols.next())?;
        if cols.next().is_some() {
            return Err(Error::format(TIMELINE_FILE, format!("line {line}: too many columns")));
        }
        if timeline.rounds.last() != Some(&round) {
            if timeline.rounds.last().is_some_and(|&r| r >= round) {
                return Err(Error::format(TIMELINE_FILE, format!("line {line}: rounds must increase")));
            }
            timeline.rounds.push(round);
            timeline.accuracy.push(Vec::new());
        }
        let row = timeline.accuracy.last_mut().expect("row pushed above");
        if node != row.len() {
            return Err(Error::format(TIMELINE_FILE, format!("line {line}: expected node {}", row.len())));
        }
        row.push(acc);
        if roles.len() <= node {
            roles.resize(node + 1, None);
        }
        match roles[node] {
            Some(r) if r != role => {
                return Err(Error::format(TIMELINE_FILE, format!("line {line}: role of node {node} changed")))
            }
            _ => roles[node] = Some(role),
        }
    }
    let n = roles.len();
    if timeline.accuracy.iter().any(|row| row.len() != n) {
        return Err(Error::format(TIMELINE_FILE, "every round must list every node"));
    }
    Ok((timeline, roles.into_iter().map(|r| r.expect("all nodes seen")).collect()))
}

pub fn read_confusions(path: &Path, rounds: &[usize]) -> Result<Vec<Confusion>> {
    let name = path.file_name().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let lines = csv_lines(path)?;
    if lines.len() != 1 + rounds.len() * NUM_CLASSES {
        return Err(Error::format(
            &name,
            format!("expected {} rows, found {}", 1 + rounds.len() * NUM_CLASSES, lines.len()),
        ));
    }
    let mut out = vec![[[0u64; NUM_CLASSES]; NUM_CLASSES]; rounds.len()];
    for (k, (line, text)) in lines.into_iter().skip(1).enumerate() {
        let (slot, t) = (k / NUM_CLASSES, k % NUM_CLASSES);
        let mut cols = text.split(',');
        let round: usize = field(&name, line, "round", cols.next())?;
        let truth: usize = field(&name, line, "true", cols.next())?;
        if round != rounds[slot] || truth != t {
            return Err(Error::format(&name, format!("line {line}: expected round {} class {t}", rounds[slot])));
        }
        for p in 0..NUM_CLASSES {
            out[slot][t][p] = field(&name, line, "count", cols.next())?;
        }
        if cols.next().is_some() {
            return Err(Error::format(&name, format!("line {line}: too many columns")));
        }
    }
    Ok(out)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

pub fn read_run(dir: &Path) -> Result<RunArtifacts> {
    let (timeline, roles) = read_timeline(&dir.join(TIMELINE_FILE))?;
    let graph = read_edge_list(BufReader::new(File::open(dir.join(GRAPH_EDGES_FILE))?))?;
    let graph_doc: GraphDoc = read_json(&dir.join(GRAPH_JSON_FILE))?;
    let plan: PartitionPlan = read_json(&dir.join(PLAN_FILE))?;
    if graph.node_count() != roles.len() || plan.node_count() != roles.len() || graph_doc.node_count != roles.len() {
        return Err(Error::format(
            "run directory",
            format!(
                "node counts disagree: timeline {}, graph {}, plan {}",
                roles.len(),
                graph.node_count(),
                plan.node_count()
            ),
        ));
    }
    let per_node = (0..roles.len())
        .map(|v| read_confusions(&dir.join(confusion_file(v)), &timeline.rounds))
        .collect::<Result<Vec<_>>>()?;
    let confusions = (0..timeline.rounds.len())
        .map(|k| per_node.iter().map(|c| c[k]).collect())
        .collect();
    Ok(RunArtifacts {
        timeline,
        roles,
        confusions,
        graph,
        graph_doc,
        plan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{synthetic_digits, CentralityFocus, DistributionStrategy, Focus, Metric};
    use crate::neuralnet::TrainConfig;
    use crate::protocol::{run_experiment, DataOptions, ExperimentConfig, ModelOptions};
    use crate::topology::{GraphKind, GraphSpec};

    fn tiny_run() -> ExperimentOutput {
        let cfg = ExperimentConfig {
            graph_spec: GraphSpec {
                kind: GraphKind::Ba { m: 1 },
                node_count: 5,
                seed: 2,
            },
            strategy: DistributionStrategy::CentralityFocus(CentralityFocus::standard(Metric::Degree, Focus::Lowest)),
            train: TrainConfig {
                local_epochs: 1,
                ..TrainConfig::default()
            },
            rounds: 2,
            eval_every: 1,
            master_seed: 8,
            data: DataOptions {
                samples_per_class: Some(2),
                test_per_class: Some(3),
                eval_classes: None,
            },
            model: ModelOptions {
                hidden_dims: vec![8],
                ..ModelOptions::default()
            },
        };
        run_experiment(&cfg, &synthetic_digits(10, 1), &synthetic_digits(3, 2)).unwrap()
    }

    #[test]
    fn run_directory_round_trips() {
        let out = tiny_run();
        let dir = tempfile::tempdir().unwrap();
        write_run(dir.path(), &out, &out.config).unwrap();
        let back = read_run(dir.path()).unwrap();
        assert_eq!(back.timeline, out.timeline);
        assert_eq!(back.roles, out.plan.node_roles);
        assert_eq!(back.confusions, out.confusion_timeline);
        assert_eq!(back.graph, out.graph);
        assert_eq!(back.plan, out.plan);
        assert_eq!(back.graph_doc.summary, out.summary);
        let echo: ExperimentConfig = read_json(&dir.path().join(CONFIG_ECHO_FILE)).unwrap();
        assert_eq!(echo, out.config);
    }

    #[test]
    fn timeline_csv_layout() {
        let t = Timeline {
            rounds: vec![0, 5],
            accuracy: vec![vec![0.5, 0.25], vec![0.75, 1.0]],
        };
        let mut buf = Vec::new();
        write_timeline(&t, &[NodeRole::G1, NodeRole::G2], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "round,node,role,accuracy\n0,0,G1,0.5\n0,1,G2,0.25\n5,0,G1,0.75\n5,1,G2,1\n"
        );
    }

    #[test]
    fn malformed_timeline_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(TIMELINE_FILE);
        fs::write(&path, "round,node,role,accuracy\n0,0,G1,0.5\n0,1,G2,oops\n").unwrap();
        let err = read_timeline(&path).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        fs::write(&path, "round,node,role,accuracy\n0,0,G1,0.5\n1,1,G1,0.5\n").unwrap();
        assert!(read_timeline(&path).is_err());
    }
}
