use std::io::{BufRead, Write};

use super::Graph;
use crate::{Error, Result};

/// Writes `# nodes=<n>` followed by one `i j` line per edge (`i < j`, sorted).
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "# nodes={}", g.node_count())?;
    for (i, j) in g.edges() {
        writeln!(out, "{i} {j}")?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph> {
    let mut lines = input.lines().enumerate();
    let node_count = match lines.next() {
        Some((_, line)) => {
            let line = line?;
            let n = line
                .trim()
                .strip_prefix("# nodes=")
                .ok_or_else(|| Error::format("line 1", "expected `# nodes=<n>` header"))?;
            n.trim()
                .parse::<usize>()
                .map_err(|e| Error::format("line 1", format!("bad node count: {e}")))?
        }
        None => return Err(Error::format("line 1", "empty edge list")),
    };
    let mut g = Graph::new(node_count);
    for (idx, line) in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = || format!("line {}", idx + 1);
        let mut parts = line.split_whitespace();
        let mut next_id = || -> Result<usize> {
            parts
                .next()
                .ok_or_else(|| Error::format(field(), "expected two node ids"))?
                .parse::<usize>()
                .map_err(|e| Error::format(field(), e.to_string()))
        };
        let (i, j) = (next_id()?, next_id()?);
        if parts.next().is_some() {
            return Err(Error::format(field(), "trailing tokens"));
        }
        match g.add_edge(i, j) {
            Ok(true) => {}
            Ok(false) => return Err(Error::format(field(), format!("duplicate edge ({i}, {j})"))),
            Err(e) => return Err(Error::format(field(), e.to_string())),
        }
    }
    Ok(g)
}
