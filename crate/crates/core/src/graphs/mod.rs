//! Finite simple graphs, rooted trees, random generators and the
//! cycle-structure statistics used by the sandwich bound.

mod cycles;
mod gen;

pub use cycles::{cyclic_components_max, cyclic_components_max_with_budget, disjoint_cycles_max};
pub use gen::{gen_gnm, gen_gw_tree, gen_random_regular, gen_random_tree, GwSpec, OffspringDist};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("vertex index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("vertex count must be positive")]
    EmptyGraph,
    #[error("n * d = {0} is odd; no d-regular graph exists")]
    Parity(usize),
    #[error("generator gave up after {attempts} rejected pairings")]
    GenerationFailure { attempts: usize },
    #[error("enumeration budget exceeded: {what} = {size}, limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("offspring distribution invalid: {0}")]
    InvalidDistribution(String),
    #[error("graph file parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A finite simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    degrees: Vec<usize>,
}

impl Graph {
    /// Builds a graph, validating simplicity and index ranges. Endpoint order
    /// within a pair is irrelevant; `(u, v)` and `(v, u)` are duplicates.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyGraph);
        }
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        let mut degrees = vec![0usize; n];
        for &(u, v) in &edges {
            if u >= n {
                return Err(GraphError::IndexOutOfRange { index: u, n });
            }
            if v >= n {
                return Err(GraphError::IndexOutOfRange { index: v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(key.0, key.1));
            }
            degrees[u] += 1;
            degrees[v] += 1;
        }
        Ok(Graph { n, edges, degrees })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Neighbour lists, in edge-list order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Number of connected components (isolated vertices count).
    pub fn component_count(&self) -> usize {
        let mut uf = UnionFind::new(self.n);
        for &(u, v) in &self.edges {
            uf.union(u, v);
        }
        uf.component_count()
    }

    pub fn is_forest(&self) -> bool {
        // A simple graph is a forest iff m = n - #components.
        self.m() == self.n - self.component_count()
    }

    /// Induced subgraph on `keep` (in increasing vertex order), relabelled to
    /// `0..keep.len()`.
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            index[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]))
            .collect();
        Graph::new(keep.len(), edges).expect("induced subgraph of a simple graph is simple")
    }

    /// Disjoint union; the second graph's vertices are shifted by `self.n`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(u, v)| (u + self.n, v + self.n)));
        Graph::new(self.n + other.n, edges).expect("union of simple graphs is simple")
    }

    /// Parses the text format: first line `n m`, then `m` lines `u v`
    /// (0-based). Validates all graph invariants.
    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
        let (line_no, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            msg: "missing header line".into(),
        })?;
        let mut parts = header.split_whitespace();
        let parse_usize = |s: Option<&str>, line: usize| -> Result<usize, GraphError> {
            s.ok_or(GraphError::Parse {
                line,
                msg: "expected two integers".into(),
            })?
            .parse()
            .map_err(|e| GraphError::Parse {
                line,
                msg: format!("{e}"),
            })
        };
        let n = parse_usize(parts.next(), line_no + 1)?;
        let m = parse_usize(parts.next(), line_no + 1)?;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (line_no, line) = lines.next().ok_or(GraphError::Parse {
                line: 0,
                msg: format!("expected {m} edge lines"),
            })?;
            let mut parts = line.split_whitespace();
            let u = parse_usize(parts.next(), line_no + 1)?;
            let v = parse_usize(parts.next(), line_no + 1)?;
            edges.push((u, v));
        }
        Graph::new(n, edges)
    }

    /// Writes the text format parsed by [`Graph::from_text`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.m());
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// A tree with a distinguished root and parent map.
#[derive(Debug, Clone)]
pub struct RootedTree {
    graph: Graph,
    root: usize,
    parent: Vec<Option<usize>>,
}

impl RootedTree {
    pub fn new(graph: Graph, root: usize, parent: Vec<Option<usize>>) -> Self {
        debug_assert_eq!(graph.m(), graph.n() - 1);
        debug_assert_eq!(graph.component_count(), 1);
        debug_assert!(parent[root].is_none());
        RootedTree { graph, root, parent }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }
}

/// Array union-find with path halving, reused across enumeration loops.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    sizes: Vec<u32>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            sizes: vec![1; n],
            components: n,
        }
    }

    /// Resets to n singletons without reallocating.
    pub fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i as u32;
        }
        self.sizes.fill(1);
        self.components = self.parent.len();
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let gp = self.parent[self.parent[x] as usize];
            self.parent[x] = gp;
            x = gp as usize;
        }
        x
    }

    /// Returns true when the edge merged two components.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        let (big, small) = if self.sizes[ra] >= self.sizes[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big as u32;
        self.sizes[big] += self.sizes[small];
        self.components -= 1;
        true
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    /// Size of the component containing `x`.
    pub fn component_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.sizes[r] as usize
    }
}
