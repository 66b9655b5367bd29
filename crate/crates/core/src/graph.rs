//! PID triples and the directed FDO graph they span.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::pid::Pid;
use crate::record::{referencing_pairs, InformationRecord};
use crate::types::TypeRegistry;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("{0} is not a node of the graph")]
    UnknownNode(String),
    #[error("malformed triples document, line {line}: {detail}")]
    MalformedTriples { line: usize, detail: String },
}

impl GraphError {
    pub fn code(&self) -> &'static str {
        match self {
            GraphError::UnknownNode(_) => "UnknownNode",
            GraphError::MalformedTriples { .. } => "MalformedTriples",
        }
    }
}

/// `<subject, predicate, object>`, ordered field by field.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PidTriple {
    pub subject: Pid,
    pub predicate: Pid,
    pub object: Pid,
}

impl PidTriple {
    pub fn new(subject: Pid, predicate: Pid, object: Pid) -> Self {
        Self { subject, predicate, object }
    }
}

impl fmt::Display for PidTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)
    }
}

/// A referencing pair that does not point at a record in scope.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExternalEdge {
    pub subject: Pid,
    pub attribute: String,
    pub target: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extraction {
    pub triples: BTreeSet<PidTriple>,
    pub external: Vec<ExternalEdge>,
}

/// Emits a triple for every typed referencing pair whose value is the PID
/// of another record in `records`. Everything else is an external edge.
/// Records without a PID are ignored.
pub fn extract_triples(types: &TypeRegistry, records: &[InformationRecord]) -> Extraction {
    let in_scope: BTreeSet<&Pid> = records.iter().filter_map(|r| r.pid.as_ref()).collect();
    let mut out = Extraction::default();
    for record in records {
        let Some(subject) = &record.pid else { continue };
        for (key, value) in referencing_pairs(types, record) {
            let target = Pid::parse(value).ok().filter(|p| in_scope.contains(p));
            match (target, Pid::parse(key)) {
                (Some(object), Ok(predicate)) => {
                    out.triples.insert(PidTriple::new(subject.clone(), predicate, object));
                }
                _ => out.external.push(ExternalEdge {
                    subject: subject.clone(),
                    attribute: key.to_owned(),
                    target: value.to_owned(),
                }),
            }
        }
    }
    out.external.sort();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Out,
    In,
    Both,
}

/// Immutable directed graph over record PIDs with predicate-labelled edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FdoGraph {
    nodes: BTreeSet<Pid>,
    predicates: BTreeSet<Pid>,
    triples: BTreeSet<PidTriple>,
    outgoing: BTreeMap<Pid, BTreeSet<(Pid, Pid)>>,
    incoming: BTreeMap<Pid, BTreeSet<(Pid, Pid)>>,
}

/// Graph over all registered records in `records`, isolated ones included.
pub fn build_graph(types: &TypeRegistry, records: &[InformationRecord]) -> FdoGraph {
    let nodes = records.iter().filter_map(|r| r.pid.clone());
    FdoGraph::from_parts(nodes, extract_triples(types, records).triples)
}

impl FdoGraph {
    /// Builds a graph from explicit nodes and triples; triple endpoints are
    /// added to the node set.
    pub fn from_parts(nodes: impl IntoIterator<Item = Pid>, triples: impl IntoIterator<Item = PidTriple>) -> Self {
        let mut graph = FdoGraph { nodes: nodes.into_iter().collect(), ..Self::default() };
        for t in triples {
            graph.nodes.insert(t.subject.clone());
            graph.nodes.insert(t.object.clone());
            graph.predicates.insert(t.predicate.clone());
            graph.outgoing.entry(t.subject.clone()).or_default().insert((t.object.clone(), t.predicate.clone()));
            graph.incoming.entry(t.object.clone()).or_default().insert((t.subject.clone(), t.predicate.clone()));
            graph.triples.insert(t);
        }
        graph
    }

    pub fn nodes(&self) -> &BTreeSet<Pid> {
        &self.nodes
    }

    pub fn predicates(&self) -> &BTreeSet<Pid> {
        &self.predicates
    }

    pub fn triples(&self) -> &BTreeSet<PidTriple> {
        &self.triples
    }

    pub fn contains_node(&self, pid: &Pid) -> bool {
        self.nodes.contains(pid)
    }

    fn require(&self, pid: &Pid) -> Result<(), GraphError> {
        if self.nodes.contains(pid) {
            Ok(())
        } else {
            Err(GraphError::UnknownNode(pid.to_string()))
        }
    }

    pub fn neighbors(
        &self,
        pid: &Pid,
        direction: Direction,
        predicate: Option<&Pid>,
    ) -> Result<BTreeSet<Pid>, GraphError> {
        self.require(pid)?;
        let pick = |map: &BTreeMap<Pid, BTreeSet<(Pid, Pid)>>| -> Vec<Pid> {
            map.get(pid)
                .into_iter()
                .flatten()
                .filter(|(_, p)| predicate.is_none_or(|want| want == p))
                .map(|(n, _)| n.clone())
                .collect()
        };
        let mut out = BTreeSet::new();
        if matches!(direction, Direction::Out | Direction::Both) {
            out.extend(pick(&self.outgoing));
        }
        if matches!(direction, Direction::In | Direction::Both) {
            out.extend(pick(&self.incoming));
        }
        Ok(out)
    }

    /// Maximal strongly connected components (Tarjan). Members are sorted
    /// and components are ordered by their smallest member.
    pub fn strongly_connected_components(&self) -> Vec<Vec<Pid>> {
        let index_of: BTreeMap<&Pid, usize> = self.nodes.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let nodes: Vec<&Pid> = self.nodes.iter().collect();
        let adjacency: Vec<Vec<usize>> = nodes
            .iter()
            .map(|p| {
                let succ: BTreeSet<usize> =
                    self.outgoing.get(*p).into_iter().flatten().map(|(n, _)| index_of[n]).collect();
                succ.into_iter().collect()
            })
            .collect();

        let n = nodes.len();
        const UNSEEN: usize = usize::MAX;
        let mut index = vec![UNSEEN; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut next_index = 0;
        let mut components = Vec::new();

        for root in 0..n {
            if index[root] != UNSEEN {
                continue;
            }
            // (node, position of the next successor to visit)
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root] = true;

            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                if let Some(&w) = adjacency[v].get(*pos) {
                    *pos += 1;
                    if index[w] == UNSEEN {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        component.push(nodes[w].clone());
                        if w == v {
                            break;
                        }
                    }
                    component.sort();
                    components.push(component);
                }
            }
        }
        components.sort();
        components
    }

    pub fn reachable(&self, from: &Pid, to: &Pid) -> Result<bool, GraphError> {
        Ok(self.path(from, to)?.is_some())
    }

    /// Shortest path by edge count. Among equally short paths the one whose
    /// node sequence is lexicographically smallest wins; parallel edges use
    /// the smallest predicate.
    pub fn path(&self, from: &Pid, to: &Pid) -> Result<Option<Vec<PidTriple>>, GraphError> {
        self.require(from)?;
        self.require(to)?;
        if from == to {
            return Ok(Some(Vec::new()));
        }
        let mut parent: BTreeMap<&Pid, (&Pid, &Pid)> = BTreeMap::new();
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for (w, predicate) in self.outgoing.get(v).into_iter().flatten() {
                if w == from || parent.contains_key(w) {
                    continue;
                }
                parent.insert(w, (v, predicate));
                if w == to {
                    let mut hops = Vec::new();
                    let mut cur = w;
                    while let Some(&(prev, predicate)) = parent.get(cur) {
                        hops.push(PidTriple::new(prev.clone(), predicate.clone(), cur.clone()));
                        cur = prev;
                    }
                    hops.reverse();
                    return Ok(Some(hops));
                }
                queue.push_back(w);
            }
        }
        Ok(None)
    }

    /// One `<subject> <predicate> <object>` line per triple, sorted.
    pub fn export_triples(&self) -> String {
        let mut out = String::new();
        for t in &self.triples {
            let _ = writeln!(out, "{t}");
        }
        out
    }

    pub fn export_dot(&self) -> String {
        let mut out = String::from("digraph fdo {\n");
        for node in &self.nodes {
            let _ = writeln!(out, "  \"{}\";", dot_escape(node.as_str()));
        }
        for t in &self.triples {
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"{}\"];",
                dot_escape(t.subject.as_str()),
                dot_escape(t.object.as_str()),
                dot_escape(t.predicate.as_str())
            );
        }
        out.push_str("}\n");
        out
    }
}

fn dot_escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Parses the line-oriented triples format. Blank lines are skipped.
pub fn import_triples(text: &str) -> Result<BTreeSet<PidTriple>, GraphError> {
    let mut triples = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |detail: String| GraphError::MalformedTriples { line: i + 1, detail };
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [s, p, o] = parts.as_slice() else {
            return Err(malformed(format!("expected 3 fields, found {}", parts.len())));
        };
        let parse = |t: &str| Pid::parse(t).map_err(|e| malformed(e.to_string()));
        triples.insert(PidTriple::new(parse(s)?, parse(p)?, parse(o)?));
    }
    Ok(triples)
}
