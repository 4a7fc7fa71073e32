//! Classical dominating-set instances: undirected graphs, vertex subsets,
//! parsing, and brute-force enumeration.
//!
//! Everything downstream (oracle synthesis, Grover runs, solution counting)
//! is checked against this module, so it stays deliberately simple: bitmask
//! adjacency and exhaustive search.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Vertex subsets are stored as `u64` masks, so graphs are capped here.
pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("graph may have at most {MAX_VERTICES} vertices, got {0}")]
    TooManyVertices(usize),
    #[error("subset size k={k} out of range 0 < k <= {n}")]
    SizeOutOfRange { k: usize, n: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Input format accepted by [`parse_graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// DIMACS-like: optional `c` comment lines, one `p edge <n> <m>` header,
    /// then `m` lines `e <u> <v>` with 1-based endpoints.
    Dimacs,
    /// `{"n": <int>, "edges": [[u, v], ...]}` with 0-based endpoints.
    Json,
}

/// A subset of vertices `0..n-1`, canonically a bitmask with bit `i` <-> vertex `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn from_mask(mask: u64) -> Self {
        VertexSet(mask)
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(members: I) -> Self {
        let mut mask = 0u64;
        for v in members {
            assert!(v < MAX_VERTICES, "vertex {v} exceeds the mask width");
            mask |= 1 << v;
        }
        VertexSet(mask)
    }

    pub fn mask(&self) -> u64 {
        self.0
    }

    pub fn contains(&self, v: usize) -> bool {
        v < MAX_VERTICES && self.0 & (1 << v) != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..MAX_VERTICES).filter(|v| self.0 & (1 << v) != 0)
    }

    /// `n`-character bitstring, highest vertex index leftmost: `{v0, v3}` on
    /// six vertices prints as `001001`.
    pub fn bitstring(&self, n: usize) -> String {
        (0..n).rev().map(|v| if self.contains(v) { '1' } else { '0' }).collect()
    }

    /// Set notation in vertex labels: `{v0, v3}`.
    pub fn label(&self) -> String {
        let inner: Vec<String> = self.members().map(|v| format!("v{v}")).collect();
        format!("{{{}}}", inner.join(", "))
    }
}

/// An undirected simple graph on vertices `0..n-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    // closed_adj[v] = {v} | neighbors(v), as a mask
    closed_adj: Vec<u64>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops and out-of-range endpoints.
    /// Duplicate edges (in either orientation) collapse to one.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        let mut set = BTreeSet::new();
        let mut closed_adj: Vec<u64> = (0..n).map(|v| 1u64 << v).collect();
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            set.insert((u.min(v), u.max(v)));
            closed_adj[u] |= 1 << v;
            closed_adj[v] |= 1 << u;
        }
        Ok(Graph { n, edges: set, closed_adj })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as normalized `(min, max)` pairs in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn degree(&self, v: usize) -> Result<usize, GraphError> {
        self.check_vertex(v)?;
        Ok(self.closed_adj[v].count_ones() as usize - 1)
    }

    /// `N[v] = {v} | {u : (u,v) in E}`.
    pub fn closed_neighborhood(&self, v: usize) -> Result<VertexSet, GraphError> {
        self.check_vertex(v)?;
        Ok(VertexSet(self.closed_adj[v]))
    }

    /// True iff every vertex has a member of `s` in its closed neighborhood.
    pub fn is_dominating(&self, s: &VertexSet) -> bool {
        self.closed_adj.iter().all(|&nb| nb & s.mask() != 0)
    }

    /// All size-`k` dominating sets in ascending bitmask order. The length of
    /// the returned list is the solution count `M` used by the quantum side.
    pub fn enumerate_dominating_sets(&self, k: usize) -> Result<Vec<VertexSet>, GraphError> {
        if k == 0 || k > self.n {
            return Err(GraphError::SizeOutOfRange { k, n: self.n });
        }
        let limit = mask_of_width(self.n);
        let mut out = Vec::new();
        // Gosper's hack walks all k-bit masks in ascending numeric order.
        let mut mask: u64 = mask_of_width(k);
        while mask <= limit {
            let s = VertexSet(mask);
            if self.is_dominating(&s) {
                out.push(s);
            }
            let c = mask & mask.wrapping_neg();
            let r = match mask.checked_add(c) {
                Some(r) => r,
                None => break,
            };
            mask = (((r ^ mask) >> 2) / c) | r;
        }
        Ok(out)
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
        }
        Ok(())
    }
}

fn mask_of_width(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Parses a graph from text in the given format.
pub fn parse_graph(text: &str, format: GraphFormat) -> Result<Graph, GraphError> {
    match format {
        GraphFormat::Dimacs => parse_dimacs(text),
        GraphFormat::Json => parse_json(text),
    }
}

fn parse_dimacs(text: &str) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut edge_lines = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |msg: String| GraphError::Parse { line, msg };
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        match tokens.first() {
            None => continue,
            Some(&"c") => continue,
            Some(&"p") => {
                if header.is_some() {
                    return Err(err("duplicate problem line".into()));
                }
                if tokens.len() != 4 || tokens[1] != "edge" {
                    return Err(err(format!("expected `p edge <n> <m>`, got `{raw}`")));
                }
                let n = tokens[2]
                    .parse::<usize>()
                    .map_err(|_| err(format!("bad vertex count `{}`", tokens[2])))?;
                let m = tokens[3]
                    .parse::<usize>()
                    .map_err(|_| err(format!("bad edge count `{}`", tokens[3])))?;
                header = Some((n, m));
            }
            Some(&"e") => {
                let (n, _) = header.ok_or_else(|| err("edge before problem line".into()))?;
                if tokens.len() != 3 {
                    return Err(err(format!("expected `e <u> <v>`, got `{raw}`")));
                }
                let endpoint = |tok: &str| -> Result<usize, GraphError> {
                    let v =
                        tok.parse::<usize>().map_err(|_| err(format!("bad endpoint `{tok}`")))?;
                    if v == 0 || v > n {
                        return Err(err(format!("endpoint {v} out of range 1..={n}")));
                    }
                    Ok(v - 1)
                };
                let u = endpoint(tokens[1])?;
                let v = endpoint(tokens[2])?;
                if u == v {
                    return Err(err(format!("self-loop at vertex {}", tokens[1])));
                }
                edges.push((u, v));
                edge_lines += 1;
            }
            Some(other) => {
                return Err(err(format!("unrecognized line kind `{other}`")));
            }
        }
    }

    let (n, m) = header.ok_or(GraphError::Parse { line: 0, msg: "missing problem line".into() })?;
    if edge_lines != m {
        return Err(GraphError::Parse {
            line: 0,
            msg: format!("header declares {m} edges but {edge_lines} were found"),
        });
    }
    Graph::new(n, edges)
}

fn parse_json(text: &str) -> Result<Graph, GraphError> {
    #[derive(serde::Deserialize)]
    struct Raw {
        n: usize,
        edges: Vec<(usize, usize)>,
    }
    let raw: Raw = serde_json::from_str(text)
        .map_err(|e| GraphError::Parse { line: e.line(), msg: e.to_string() })?;
    Graph::new(raw.n, raw.edges)
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} vertices, {} edges", self.n, self.edges.len())
    }
}
