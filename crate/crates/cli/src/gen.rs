//! Graph and tree sources for the CLI: either a file in the `n m` / `u v`
//! text format, or a generator spec string.
//!
//! Generator grammar:
//! - `regular:N,D` — random simple D-regular graph on N vertices
//! - `gw:ROOT/INTERIOR,DEPTH` — Galton-Watson tree truncated at DEPTH, where
//!   ROOT and INTERIOR are either an integer (deterministic offspring) or a
//!   colon-separated probability table `p0:p1:...`

use std::path::Path;

use rc_lab::graphs::{self, Graph, GwSpec, OffspringDist};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum GenSpec {
    Regular { n: usize, d: usize },
    GwTree { spec: GwSpec, depth: usize },
}

impl std::str::FromStr for GenSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(rest) = s.strip_prefix("regular:") {
            let (n, d) = rest
                .split_once(',')
                .ok_or_else(|| format!("`{s}`: expected regular:N,D"))?;
            return Ok(GenSpec::Regular {
                n: n.trim().parse().map_err(|e| format!("{e}"))?,
                d: d.trim().parse().map_err(|e| format!("{e}"))?,
            });
        }
        if let Some(rest) = s.strip_prefix("gw:") {
            let (spec, depth) = rest
                .rsplit_once(',')
                .ok_or_else(|| format!("`{s}`: expected gw:ROOT/INTERIOR,DEPTH"))?;
            let (root, interior) = spec
                .split_once('/')
                .ok_or_else(|| format!("`{s}`: expected ROOT/INTERIOR"))?;
            let spec = GwSpec::new(parse_dist(root)?, parse_dist(interior)?)
                .map_err(|e| e.to_string())?;
            return Ok(GenSpec::GwTree {
                spec,
                depth: depth.trim().parse().map_err(|e| format!("{e}"))?,
            });
        }
        Err(format!("`{s}`: unknown generator (use regular:... or gw:...)"))
    }
}

fn parse_dist(s: &str) -> Result<OffspringDist, String> {
    let s = s.trim();
    if s.contains(':') {
        let probs: Result<Vec<f64>, _> = s.split(':').map(|p| p.trim().parse::<f64>()).collect();
        let dist = OffspringDist::Tabulated(probs.map_err(|e| e.to_string())?);
        dist.validate().map_err(|e| e.to_string())?;
        Ok(dist)
    } else {
        Ok(OffspringDist::Deterministic(
            s.parse().map_err(|e| format!("{e}"))?,
        ))
    }
}

/// Resolves `--graph FILE` / `--gen SPEC` into a concrete graph.
pub fn load_graph(
    graph: Option<&Path>,
    gen: Option<&GenSpec>,
    seed: u64,
) -> Result<Graph, CliError> {
    match (graph, gen) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Usage(format!("cannot read graph {}: {e}", path.display()))
            })?;
            Ok(Graph::from_text(&text)?)
        }
        (None, Some(GenSpec::Regular { n, d })) => Ok(graphs::gen_random_regular(*n, *d, seed)?),
        (None, Some(GenSpec::GwTree { spec, depth })) => {
            Ok(graphs::gen_gw_tree(spec, *depth, seed)?.graph().clone())
        }
        (Some(_), Some(_)) => Err(CliError::Usage(
            "give either --graph or --gen, not both".into(),
        )),
        (None, None) => Err(CliError::Usage("need a graph: --graph FILE or --gen SPEC".into())),
    }
}
