//! Graph file formats.
//!
//! Text format, one item per line:
//!
//! ```text
//! # comment
//! node isolated
//! tail -> head
//! ```
//!
//! Node names are nonempty runs of `[A-Za-z0-9_]`. Node ids follow the order in
//! which names first appear. The JSON form carries the same content as
//! `{"nodes": [...], "edges": [["tail", "head"], ...]}`.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dag::Dag;
use crate::error::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: Error,
    },

    #[error(transparent)]
    Graph(#[from] Error),

    #[error("malformed JSON graph: {0}")]
    Json(#[from] serde_json::Error),
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { line, .. } | ParseError::Invalid { line, .. } => Some(*line),
            ParseError::Json(e) => Some(e.line()),
            ParseError::Graph(_) => None,
        }
    }

    /// The graph-level error, if this is not a pure syntax problem.
    pub fn graph_error(&self) -> Option<&Error> {
        match self {
            ParseError::Invalid { source, .. } | ParseError::Graph(source) => Some(source),
            _ => None,
        }
    }
}

pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Graph content as names, shared by both formats.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    #[serde(default)]
    pub nodes: Vec<String>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
}

impl GraphDocument {
    pub fn from_dag(dag: &Dag) -> Self {
        GraphDocument {
            nodes: dag.names().to_vec(),
            edges: dag
                .edges()
                .iter()
                .map(|e| (dag.name(e.tail).to_owned(), dag.name(e.head).to_owned()))
                .collect(),
        }
    }
}

/// Names in order of first appearance plus index edges.
#[derive(Default)]
struct Builder {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    edge_lines: Vec<usize>,
    seen: HashSet<(usize, usize)>,
}

impl Builder {
    fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), self.names.len() - 1);
        self.names.len() - 1
    }

    fn edge(&mut self, tail: &str, head: &str) -> Result<(), Error> {
        if tail == head {
            return Err(Error::SelfLoop { node: tail.to_owned() });
        }
        let (t, h) = (self.intern(tail), self.intern(head));
        if !self.seen.insert((t, h)) {
            return Err(Error::DuplicateEdge {
                tail: tail.to_owned(),
                head: head.to_owned(),
            });
        }
        self.edges.push((t, h));
        Ok(())
    }

    /// Builds the DAG; cycle errors are pinned to the last line among the
    /// cycle's edges.
    fn finish(self) -> Result<Dag, ParseError> {
        let Builder {
            names,
            index,
            edges,
            edge_lines,
            ..
        } = self;
        match Dag::from_named_indices(names, edges.iter().copied()) {
            Ok(dag) => Ok(dag),
            Err(Error::CycleDetected { cycle }) if !edge_lines.is_empty() => {
                let ids: Vec<usize> = cycle.iter().map(|n| index[n]).collect();
                let line = (0..ids.len())
                    .filter_map(|i| {
                        let pair = (ids[i], ids[(i + 1) % ids.len()]);
                        edges.iter().position(|&e| e == pair).map(|p| edge_lines[p])
                    })
                    .max()
                    .unwrap_or(0);
                Err(ParseError::Invalid {
                    line,
                    source: Error::CycleDetected { cycle },
                })
            }
            Err(e) => Err(ParseError::Graph(e)),
        }
    }
}

/// Parses the text edge-list format.
pub fn parse_graph(text: &str) -> Result<Dag, ParseError> {
    let mut builder = Builder::default();
    let mut declared = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let column_of = |s: &str| s.as_ptr() as usize - raw.as_ptr() as usize + 1;
        let syntax = |column: usize, message: String| ParseError::Syntax { line, column, message };
        let check_name = |name: &str, fallback: usize| -> Result<(), ParseError> {
            if is_valid_name(name) {
                Ok(())
            } else if name.is_empty() {
                Err(syntax(fallback, "expected a node name".into()))
            } else {
                Err(syntax(column_of(name), format!("invalid node name `{name}`")))
            }
        };

        if let Some(rest) = trimmed
            .strip_prefix("node")
            .filter(|r| r.starts_with(char::is_whitespace))
        {
            let name = rest.trim();
            check_name(name, column_of(trimmed))?;
            if !declared.insert(name.to_owned()) {
                return Err(ParseError::Invalid {
                    line,
                    source: Error::DuplicateNode { name: name.to_owned() },
                });
            }
            builder.intern(name);
            continue;
        }

        let Some(arrow) = trimmed.find("->") else {
            return Err(syntax(
                column_of(trimmed),
                "expected `tail -> head` or `node NAME`".into(),
            ));
        };
        let tail = trimmed[..arrow].trim();
        let head = trimmed[arrow + 2..].trim();
        let arrow_column = column_of(&trimmed[arrow..]);
        check_name(tail, column_of(trimmed))?;
        check_name(head, arrow_column + 2)?;
        builder
            .edge(tail, head)
            .map_err(|source| ParseError::Invalid { line, source })?;
        builder.edge_lines.push(line);
    }
    builder.finish()
}

/// Parses the JSON form.
pub fn parse_json(text: &str) -> Result<Dag, ParseError> {
    let doc: GraphDocument = serde_json::from_str(text)?;
    let mut builder = Builder::default();
    let mut declared = HashSet::new();
    for name in doc.nodes.iter().chain(doc.edges.iter().flat_map(|(a, b)| [a, b])) {
        if !is_valid_name(name) {
            return Err(ParseError::Graph(Error::InvalidName { name: name.clone() }));
        }
    }
    for name in &doc.nodes {
        if !declared.insert(name.as_str()) {
            return Err(ParseError::Graph(Error::DuplicateNode { name: name.clone() }));
        }
        builder.intern(name);
    }
    for (tail, head) in &doc.edges {
        builder.edge(tail, head)?;
    }
    builder.finish()
}

/// Text form: every node declared in id order, then every edge.
pub fn serialize_graph(dag: &Dag) -> String {
    let mut out = String::new();
    for name in dag.names() {
        out.push_str("node ");
        out.push_str(name);
        out.push('\n');
    }
    for e in dag.edges() {
        out.push_str(dag.name(e.tail));
        out.push_str(" -> ");
        out.push_str(dag.name(e.head));
        out.push('\n');
    }
    out
}

pub fn to_json(dag: &Dag) -> String {
    serde_json::to_string_pretty(&GraphDocument::from_dag(dag)).expect("documents always serialize")
}
