//! Text formats: tab-separated edge lists and cascades, clock JSON, and
//! CSV result tables.
//!
//! External node ids are arbitrary strings; [`NodeMap`] interns them to
//! dense [`NodeId`]s and is saved next to the graph as `nodes.map`.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cascade::{load_cascades, CascadeSet, Time, Timeline};
use crate::clock::{Clock, ClockAssignment};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Sidecar file name for the node id mapping.
pub const NODE_MAP_FILE: &str = "nodes.map";

/// Bidirectional mapping between external node names and dense ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeMap {
    names: Vec<String>,
    ids: HashMap<String, NodeId>,
}

impl NodeMap {
    /// Identity mapping `0..n`.
    pub fn identity(n: usize) -> Self {
        let mut map = Self::default();
        for v in 0..n {
            map.intern(&v.to_string());
        }
        map
    }

    pub fn intern(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len() as NodeId;
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), id);
        id
    }

    pub fn id(&self, name: &str) -> Option<NodeId> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.names[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// `id<TAB>name` per line.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        for (id, name) in self.names.iter().enumerate() {
            writeln!(w, "{id}\t{name}")?;
        }
        w.flush()?;
        Ok(())
    }
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn data_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push((i + 1, trimmed.to_owned()));
    }
    Ok(out)
}

fn fields<'a>(path: &Path, line: usize, text: &'a str, n: usize) -> Result<Vec<&'a str>> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    if parts.len() != n {
        return Err(parse_error(
            path,
            line,
            format!("expected {n} fields, found {}", parts.len()),
        ));
    }
    Ok(parts)
}

/// Reads `src<TAB>dst` lines. Node names are interned in order of first
/// appearance.
pub fn read_edge_list(path: &Path) -> Result<(Graph, NodeMap)> {
    let mut map = NodeMap::default();
    let mut edges = Vec::new();
    let mut lines = Vec::new();
    for (line, text) in data_lines(path)? {
        let parts = fields(path, line, &text, 2)?;
        let u = map.intern(parts[0]);
        let v = map.intern(parts[1]);
        edges.push((u, v));
        lines.push(line);
    }
    let graph = Graph::with_node_count(map.len(), &edges).map_err(|e| match e {
        Error::DuplicateEdge { index, .. } | Error::SelfLoop { index, .. } => {
            parse_error(path, lines[index], e.to_string())
        }
        other => other,
    })?;
    Ok((graph, map))
}

pub fn write_edge_list(path: &Path, g: &Graph, map: &NodeMap) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (u, v) in g.edges() {
        writeln!(w, "{}\t{}", map.name(u), map.name(v))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `cascade_id<TAB>node<TAB>time` lines against a loaded graph.
/// Times are shifted so the earliest lands at 1.
pub fn read_cascades(path: &Path, g: &Graph, map: &NodeMap) -> Result<CascadeSet> {
    let mut records = Vec::new();
    for (line, text) in data_lines(path)? {
        let parts = fields(path, line, &text, 3)?;
        let cascade = parts[0]
            .parse::<u64>()
            .map_err(|e| parse_error(path, line, format!("cascade id {:?}: {e}", parts[0])))?;
        let node = map
            .id(parts[1])
            .ok_or_else(|| parse_error(path, line, format!("unknown node {:?}", parts[1])))?;
        let time = parts[2]
            .parse::<i64>()
            .map_err(|e| parse_error(path, line, format!("time {:?}: {e}", parts[2])))?;
        if time <= 0 {
            return Err(parse_error(
                path,
                line,
                format!("time {time} is not positive"),
            ));
        }
        records.push((cascade, node, time));
    }
    load_cascades(&records, g)
}

/// Writes activations with their external timestamps.
pub fn write_cascades(path: &Path, cs: &CascadeSet, map: &NodeMap) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let timeline = cs.timeline();
    for c in cs.cascades() {
        for a in c.activations() {
            writeln!(
                w,
                "{}\t{}\t{}",
                c.id(),
                map.name(a.node),
                timeline.to_external(a.time)
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Run statistics attached to a detected clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectStats {
    pub algorithm: String,
    pub policy: String,
    pub loglik: f64,
    pub loglik_max: f64,
    pub interval_count: usize,
    pub wall_time_secs: f64,
}

/// Clock in external timestamps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClockJson {
    pub boundaries: Vec<i64>,
    pub intervals: Vec<[i64; 2]>,
    pub improvement: f64,
    #[serde(flatten, default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<DetectStats>,
}

impl ClockJson {
    pub fn new(clock: &Clock, timeline: &Timeline, improvement: f64) -> Self {
        Self {
            boundaries: clock
                .cuts()
                .iter()
                .map(|&t| timeline.to_external(t))
                .collect(),
            intervals: clock
                .intervals()
                .iter()
                .map(|d| [timeline.to_external(d.start), timeline.to_external(d.end)])
                .collect(),
            improvement,
            stats: None,
        }
    }

    /// Clock over `[1, horizon]` of `timeline`. Each external boundary
    /// becomes the first internal tick at or after it; boundaries that fall
    /// outside the range are dropped.
    pub fn to_clock(&self, timeline: &Timeline, horizon: Time) -> Result<Clock> {
        let mut cuts: Vec<Time> = self
            .boundaries
            .iter()
            .map(|&b| timeline.to_internal_ceil(b))
            .filter(|&t| t >= 2 && t <= horizon as i64)
            .map(|t| t as Time)
            .collect();
        cuts.dedup();
        Clock::from_cuts(horizon.max(1), cuts)
    }
}

/// A set of clocks with gains and the node assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClockSetJson {
    pub clocks: Vec<ClockJson>,
    pub per_clock_gain: Vec<f64>,
    pub total: f64,
    /// External node name to clock index.
    pub assignment: BTreeMap<String, usize>,
}

impl ClockSetJson {
    pub fn new(
        clocks: &[Clock],
        per_clock_gain: &[f64],
        total: f64,
        assignment: &ClockAssignment,
        timeline: &Timeline,
        map: &NodeMap,
    ) -> Self {
        Self {
            clocks: clocks
                .iter()
                .zip(per_clock_gain)
                .map(|(c, &gain)| ClockJson::new(c, timeline, gain))
                .collect(),
            per_clock_gain: per_clock_gain.to_vec(),
            total,
            assignment: assignment
                .0
                .iter()
                .enumerate()
                .map(|(v, &j)| (map.name(v as NodeId).to_owned(), j))
                .collect(),
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn read_clock_json(path: &Path) -> Result<ClockJson> {
    let file = BufReader::new(File::open(path)?);
    serde_json::from_reader(file).map_err(|e| parse_error(path, e.line(), e.to_string()))
}

/// CSV with a header row derived from the field names.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidParameter(format!("csv: {other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apps::CompletionRow;

    #[test]
    fn edge_list_round_trip_with_names() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.tsv");
        std::fs::write(&path, "# comment\nalice\tbob\n\nbob\tcarol\n").unwrap();
        let (g, map) = read_edge_list(&path).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(map.id("carol"), Some(2));
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2));

        let out = dir.path().join("g2.tsv");
        write_edge_list(&out, &g, &map).unwrap();
        let (g2, map2) = read_edge_list(&out).unwrap();
        assert_eq!(
            g2.edges().collect::<Vec<_>>(),
            g.edges().collect::<Vec<_>>()
        );
        assert_eq!(map2, map);
    }

    #[test]
    fn edge_list_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.tsv");
        std::fs::write(&path, "0\t1\n# skip\n0\t1\n").unwrap();
        let err = read_edge_list(&path).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        std::fs::write(&path, "0\t1\t2\n").unwrap();
        assert!(matches!(
            read_edge_list(&path),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            read_edge_list(&dir.path().join("missing")),
            Err(Error::Io(_))
        ));
    }

    #[test]
    fn cascades_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let gpath = dir.path().join("g.tsv");
        let cpath = dir.path().join("c.tsv");
        std::fs::write(&gpath, "a\tb\nb\tc\n").unwrap();
        std::fs::write(&cpath, "7\ta\t10\n7\tb\t11\n7\tc\t12\n").unwrap();
        let (g, map) = read_edge_list(&gpath).unwrap();
        let cs = read_cascades(&cpath, &g, &map).unwrap();
        assert_eq!(cs.horizon(), 3);
        let out = dir.path().join("c2.tsv");
        write_cascades(&out, &cs, &map).unwrap();
        assert_eq!(
            std::fs::read_to_string(&out).unwrap(),
            "7\ta\t10\n7\tb\t11\n7\tc\t12\n"
        );
        std::fs::write(&cpath, "7\ta\t10\n7\tzed\t11\n").unwrap();
        assert!(matches!(
            read_cascades(&cpath, &g, &map),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn clock_json_uses_external_times() {
        let timeline = Timeline::shifted(9);
        let clock = Clock::from_cuts(3, [2, 3]).unwrap();
        let json = ClockJson::new(&clock, &timeline, 9.228260);
        assert_eq!(json.boundaries, vec![11, 12]);
        assert_eq!(json.intervals, vec![[10, 10], [11, 11], [12, 12]]);
        assert_eq!(json.to_clock(&timeline, 3).unwrap(), clock);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("clock.json");
        write_json(&path, &json).unwrap();
        assert_eq!(read_clock_json(&path).unwrap(), json);
    }

    #[test]
    fn completion_csv_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let rows = [CompletionRow {
            drop_rate: 0.1,
            success: 1.0,
            precision: 0.5,
            recall: 0.25,
            f1: 1.0 / 3.0,
        }];
        write_csv(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("drop_rate,success,precision,recall,f1\n0.1,1.0,0.5,0.25,"));
    }
}
