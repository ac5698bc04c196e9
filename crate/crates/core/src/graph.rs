//! Small undirected graphs: edge-list parsing and an exact independent-set
//! oracle used to judge the reduction pipeline.

use thiserror::Error;

/// Largest node count `brute_force_mis` accepts (2^20 subsets).
pub const BRUTE_FORCE_NODE_CAP: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at node {node}")]
    SelfLoop { node: usize },
    #[error("node {node} out of range for {nodes} nodes")]
    NodeOutOfRange { node: usize, nodes: usize },
    #[error("graph text has no edges and no 'p N' header")]
    EmptyDescription,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{nodes} nodes exceed the brute-force cap of {cap}")]
    TooManyNodes { nodes: usize, cap: usize },
}

/// Undirected graph on nodes `0..node_count`, edges deduplicated and stored
/// with the smaller endpoint first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    nodes: usize,
    edges: Vec<(usize, usize)>,
    adjacent: Vec<Vec<bool>>,
}

impl Graph {
    pub fn new(nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let mut normalized: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop { node: a });
            }
            for node in [a, b] {
                if node >= nodes {
                    return Err(GraphError::NodeOutOfRange { node, nodes });
                }
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        normalized.dedup();
        let mut adjacent = vec![vec![false; nodes]; nodes];
        for &(a, b) in &normalized {
            adjacent[a][b] = true;
            adjacent[b][a] = true;
        }
        Ok(Graph {
            nodes,
            edges: normalized,
            adjacent,
        })
    }

    /// Parses a plain-text edge list: one `u v` pair per line, 0-based
    /// indices, `#` starts a comment. An optional `p N` header (first
    /// significant line) fixes the node count; otherwise it is the largest
    /// index plus one.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut header: Option<usize> = None;
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut seen_edges = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = body.split_whitespace().collect();
            if tokens[0] == "p" {
                if header.is_some() || seen_edges {
                    return Err(GraphError::Parse {
                        line,
                        message: "'p N' header must be the first significant line".into(),
                    });
                }
                if tokens.len() != 2 {
                    return Err(GraphError::Parse {
                        line,
                        message: "expected 'p N'".into(),
                    });
                }
                let n = tokens[1].parse::<usize>().map_err(|_| GraphError::Parse {
                    line,
                    message: format!("bad node count '{}'", tokens[1]),
                })?;
                header = Some(n);
                continue;
            }
            if tokens.len() != 2 {
                return Err(GraphError::Parse {
                    line,
                    message: format!("expected 'u v', found '{body}'"),
                });
            }
            let mut pair = [0usize; 2];
            for (slot, token) in pair.iter_mut().zip(&tokens) {
                *slot = token.parse::<usize>().map_err(|_| GraphError::Parse {
                    line,
                    message: format!("bad node index '{token}'"),
                })?;
            }
            seen_edges = true;
            edges.push((pair[0], pair[1]));
        }
        let nodes = match header {
            Some(n) => n,
            None => match edges.iter().map(|&(a, b)| a.max(b)).max() {
                Some(top) => top + 1,
                None => return Err(GraphError::EmptyDescription),
            },
        };
        Graph::new(nodes, edges)
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacent[a][b]
    }

    /// Sorted neighbor list of `node`.
    pub fn neighbors(&self, node: usize) -> Vec<usize> {
        (0..self.nodes)
            .filter(|&other| self.adjacent[node][other])
            .collect()
    }

    /// True iff no two of the given nodes are adjacent. Duplicates are
    /// treated as a single occurrence.
    pub fn is_independent(&self, nodes: &[usize]) -> bool {
        for (pos, &a) in nodes.iter().enumerate() {
            for &b in &nodes[pos + 1..] {
                if a != b && self.has_edge(a, b) {
                    return false;
                }
            }
        }
        true
    }
}

/// Exact maximum independent set by subset enumeration. Returns the size and
/// the lexicographically-first witness of that size.
pub fn brute_force_mis(g: &Graph) -> Result<(usize, Vec<usize>), GraphError> {
    let n = g.node_count();
    if n > BRUTE_FORCE_NODE_CAP {
        return Err(GraphError::TooManyNodes {
            nodes: n,
            cap: BRUTE_FORCE_NODE_CAP,
        });
    }
    let mut best: Vec<usize> = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let candidate: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if candidate.len() < best.len() || !g.is_independent(&candidate) {
            continue;
        }
        if candidate.len() > best.len() || candidate < best {
            best = candidate;
        }
    }
    Ok((best.len(), best))
}
