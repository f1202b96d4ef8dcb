//! Seeded random generators: configuration-model regular graphs, uniform
//! G(n, m), random trees, and truncated Galton-Watson trees.
//!
//! All generators are deterministic functions of their seed. The generator is
//! pinned to ChaCha8 so streams stay stable across platforms and releases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, GraphError, RootedTree};

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform simple `d`-regular graph on `n` vertices by rejection sampling of
/// the configuration model: the whole pairing is resampled on any self-loop
/// or parallel edge, which keeps the distribution exactly uniform.
pub fn gen_random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, GraphError> {
    if n * d % 2 == 1 {
        return Err(GraphError::Parity(n * d));
    }
    if d >= n {
        return Err(GraphError::IndexOutOfRange { index: d, n });
    }
    let mut rng = rng_for(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    const MAX_ATTEMPTS: usize = 100_000;
    'attempt: for _ in 0..MAX_ATTEMPTS {
        // Fisher-Yates shuffle, then pair consecutive stubs.
        for i in (1..stubs.len()).rev() {
            let j = rng.gen_range(0..=i);
            stubs.swap(i, j);
        }
        let mut seen = std::collections::HashSet::with_capacity(n * d / 2);
        let mut edges = Vec::with_capacity(n * d / 2);
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || !seen.insert((u.min(v), u.max(v))) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        return Graph::new(n, edges);
    }
    Err(GraphError::GenerationFailure {
        attempts: MAX_ATTEMPTS,
    })
}

/// Uniform simple graph with exactly `m` edges on `n` vertices.
pub fn gen_gnm(n: usize, m: usize, seed: u64) -> Result<Graph, GraphError> {
    let max_m = n * (n.saturating_sub(1)) / 2;
    if m > max_m {
        return Err(GraphError::BudgetExceeded {
            what: "requested edges",
            size: m,
            limit: max_m,
        });
    }
    let mut rng = rng_for(seed);
    let mut seen = std::collections::HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        if seen.insert((u.min(v), u.max(v))) {
            edges.push((u, v));
        }
    }
    Graph::new(n, edges)
}

/// Uniform-attachment random tree on `n` vertices.
pub fn gen_random_tree(n: usize, seed: u64) -> Result<Graph, GraphError> {
    let mut rng = rng_for(seed);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    Graph::new(n, edges)
}

/// Offspring distribution of one Galton-Watson generation.
#[derive(Debug, Clone, PartialEq)]
pub enum OffspringDist {
    Deterministic(usize),
    /// `probabilities[c]` is the probability of `c` children.
    Tabulated(Vec<f64>),
}

impl OffspringDist {
    pub fn validate(&self) -> Result<(), GraphError> {
        if let OffspringDist::Tabulated(p) = self {
            if p.is_empty() {
                return Err(GraphError::InvalidDistribution("empty table".into()));
            }
            if p.iter().any(|&x| x < 0.0) {
                return Err(GraphError::InvalidDistribution(
                    "negative probability".into(),
                ));
            }
            let total: f64 = p.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(GraphError::InvalidDistribution(format!(
                    "probabilities sum to {total}, not 1"
                )));
            }
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        match self {
            OffspringDist::Deterministic(c) => *c,
            OffspringDist::Tabulated(p) => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (c, &pc) in p.iter().enumerate() {
                    acc += pc;
                    if u < acc {
                        return c;
                    }
                }
                p.len() - 1
            }
        }
    }

    /// Smallest count with positive probability.
    pub fn min_support(&self) -> usize {
        match self {
            OffspringDist::Deterministic(c) => *c,
            OffspringDist::Tabulated(p) => p
                .iter()
                .position(|&x| x > 0.0)
                .expect("validated distribution has positive mass"),
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, OffspringDist::Deterministic(_))
    }
}

/// Galton-Watson specification with distinct root and interior offspring
/// laws. For the local limit of random d-regular graphs the root has `d`
/// children and every interior vertex `d - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GwSpec {
    pub root: OffspringDist,
    pub interior: OffspringDist,
}

impl GwSpec {
    pub fn new(root: OffspringDist, interior: OffspringDist) -> Result<Self, GraphError> {
        root.validate()?;
        interior.validate()?;
        Ok(GwSpec { root, interior })
    }

    /// Local limit of random `d`-regular graphs.
    pub fn regular(d: usize) -> Self {
        GwSpec {
            root: OffspringDist::Deterministic(d),
            interior: OffspringDist::Deterministic(d.saturating_sub(1)),
        }
    }

    /// Minimal vertex degree over the trees this spec can generate: the root
    /// has degree equal to its offspring count, every other vertex degree
    /// offspring + 1.
    pub fn min_degree(&self) -> usize {
        self.root
            .min_support()
            .min(self.interior.min_support() + 1)
    }
}

/// Samples a Galton-Watson tree truncated at `depth` generations. Vertices
/// are numbered in breadth-first order with the root at 0.
pub fn gen_gw_tree(spec: &GwSpec, depth: usize, seed: u64) -> Result<RootedTree, GraphError> {
    spec.root.validate()?;
    spec.interior.validate()?;
    let mut rng = rng_for(seed);
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    for level in 0..depth {
        let mut next = Vec::new();
        for &v in &frontier {
            let dist = if level == 0 { &spec.root } else { &spec.interior };
            let c = dist.sample(&mut rng);
            for _ in 0..c {
                let child = parent.len();
                parent.push(Some(v));
                edges.push((v, child));
                next.push(child);
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    let graph = Graph::new(parent.len(), edges)?;
    Ok(RootedTree::new(graph, 0, parent))
}
