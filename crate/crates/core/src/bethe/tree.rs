//! Monte-Carlo pressure per particle of the extended Ising model on
//! Galton-Watson trees: exact leaf-to-root cavity recursion on each sampled
//! tree, with free and plus boundary conditions at the truncation depth
//! evaluated in one pass. The two boundary conditions bracket the root
//! contribution for nonnegative fields, and the bracket collapses with depth
//! in the uniqueness regime.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::BetheError;
use crate::exact::EIsingParams;
use crate::graphs::{GwSpec, OffspringDist};
use crate::num::{log_sigmoid, logsumexp2};

/// Per-tree node cap; sampling a heavier tree aborts with a budget error
/// rather than truncating silently.
pub const TREE_NODE_BUDGET: usize = 10_000_000;

/// Bracketed estimate of the pressure per particle.
#[derive(Debug, Clone, Copy)]
pub struct TreePressureEstimate {
    /// Midpoint of the free/plus bracket, averaged over samples.
    pub estimate: f64,
    /// Standard error of the per-tree midpoints (0 for deterministic specs).
    pub std_error: f64,
    pub samples: usize,
    pub depth: usize,
    /// Free-boundary estimate (lower end of the bracket).
    pub free: f64,
    /// Plus-boundary estimate (upper end of the bracket).
    pub plus: f64,
}

impl TreePressureEstimate {
    pub fn bracket_width(&self) -> f64 {
        self.plus - self.free
    }
}

/// Log-odds contribution of one child message under the symmetric coupling
/// `psi(s, s') = e^{beta s s'}`; stable for any `lambda`, including
/// `+inf` (a forced-plus boundary spin), where it saturates at `2 beta`.
fn delta_sym(beta: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let a = lambda.abs();
    let v = 2.0 * beta + (-a - 2.0 * beta).exp().ln_1p() - (-a + 2.0 * beta).exp().ln_1p();
    if lambda > 0.0 {
        v
    } else {
        -v
    }
}

/// `log sum_{s'} e^{beta s s'} m(s')` for `s = +` and `s = -`.
fn edge_sum_sym(beta: f64, lambda: f64) -> [f64; 2] {
    let lsp = log_sigmoid(lambda);
    let lsm = log_sigmoid(-lambda);
    [
        logsumexp2(beta + lsp, -beta + lsm),
        logsumexp2(-beta + lsp, beta + lsm),
    ]
}

/// Free and plus cavity messages out of one subtree, as log-odds.
#[derive(Debug, Clone, Copy)]
struct MessagePair {
    free: f64,
    plus: f64,
}

struct Sampler<'a> {
    spec: &'a GwSpec,
    p: &'a EIsingParams,
    nodes: usize,
}

impl Sampler<'_> {
    /// Message from a non-root vertex with `remaining` generations below it.
    /// The vertex's offspring count is sampled even at the truncation level:
    /// its field uses the full-tree degree `c + 1`.
    fn subtree_message(
        &mut self,
        remaining: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<MessagePair, BetheError> {
        self.nodes += 1;
        if self.nodes > TREE_NODE_BUDGET {
            return Err(BetheError::BudgetExceeded {
                what: "sampled tree nodes",
                size: self.nodes,
                limit: TREE_NODE_BUDGET,
            });
        }
        let c = self.spec.interior.sample(rng);
        let field = self.p.field(c + 1);
        if remaining == 0 {
            return Ok(MessagePair {
                free: 2.0 * field,
                plus: f64::INFINITY,
            });
        }
        let mut free = 2.0 * field;
        let mut plus = 2.0 * field;
        for _ in 0..c {
            let child = self.subtree_message(remaining - 1, rng)?;
            free += delta_sym(self.p.beta, child.free);
            plus += delta_sym(self.p.beta, child.plus);
        }
        Ok(MessagePair { free, plus })
    }
}

/// Root functional `Phi_vx - Phi_e` given the root's children messages.
fn root_value(p: &EIsingParams, children: &[f64]) -> f64 {
    let beta = p.beta;
    let field = p.field(children.len());
    let mut sum_plus = 0.0;
    let mut sum_minus = 0.0;
    let mut total_delta = 0.0;
    for &lam in children {
        let s = edge_sum_sym(beta, lam);
        sum_plus += s[0];
        sum_minus += s[1];
        total_delta += delta_sym(beta, lam);
    }
    let phi_vx = logsumexp2(field + sum_plus, -field + sum_minus);
    let mut phi_e = 0.0;
    for &lam in children {
        // message root -> child excludes that child's contribution
        let out = 2.0 * field + total_delta - delta_sym(beta, lam);
        let term = logsumexp2(
            logsumexp2(
                beta + log_sigmoid(out) + log_sigmoid(lam),
                -beta + log_sigmoid(out) + log_sigmoid(-lam),
            ),
            logsumexp2(
                -beta + log_sigmoid(-out) + log_sigmoid(lam),
                beta + log_sigmoid(-out) + log_sigmoid(-lam),
            ),
        );
        phi_e += 0.5 * term;
    }
    phi_vx - phi_e
}

/// One sampled tree evaluated under both boundary conditions.
fn sample_tree_value(
    spec: &GwSpec,
    p: &EIsingParams,
    depth: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, f64), BetheError> {
    let c_root = spec.root.sample(rng);
    let mut sampler = Sampler { spec, p, nodes: 1 };
    let mut free_children = Vec::with_capacity(c_root);
    let mut plus_children = Vec::with_capacity(c_root);
    for _ in 0..c_root {
        let m = if depth == 0 {
            // the root is its own truncation level only in the degenerate
            // depth-0 case, which the precondition excludes; keep it total
            MessagePair {
                free: 2.0 * p.field(1),
                plus: f64::INFINITY,
            }
        } else {
            sampler.subtree_message(depth - 1, rng)?
        };
        free_children.push(m.free);
        plus_children.push(m.plus);
    }
    Ok((
        root_value(p, &free_children),
        root_value(p, &plus_children),
    ))
}

/// Deterministic offspring: one level-indexed recursion replaces the tree
/// walk, so depth 30 on a regular spec costs O(depth) instead of O(2^depth).
fn deterministic_value(spec: &GwSpec, p: &EIsingParams, depth: usize) -> (f64, f64) {
    let (OffspringDist::Deterministic(c_root), OffspringDist::Deterministic(c_int)) =
        (&spec.root, &spec.interior)
    else {
        unreachable!("caller checked determinism");
    };
    let interior_field = p.field(c_int + 1);
    let mut msg = MessagePair {
        free: 2.0 * interior_field,
        plus: f64::INFINITY,
    };
    for _ in 0..depth.saturating_sub(1) {
        msg = MessagePair {
            free: 2.0 * interior_field + *c_int as f64 * delta_sym(p.beta, msg.free),
            plus: 2.0 * interior_field + *c_int as f64 * delta_sym(p.beta, msg.plus),
        };
    }
    let free_children = vec![msg.free; *c_root];
    let plus_children = vec![msg.plus; *c_root];
    (
        root_value(p, &free_children),
        root_value(p, &plus_children),
    )
}

/// Monte-Carlo estimate of the pressure per particle on the Galton-Watson
/// tree with fixed-sign fields. Requires `k >= 0` and `k * d_min + h > 0`
/// over the spec's degree support; outside that regime the free/plus bracket
/// is not valid and the call fails with `SignCondition`.
pub fn tree_pressure(
    spec: &GwSpec,
    p: &EIsingParams,
    depth: usize,
    samples: usize,
    seed: u64,
) -> Result<TreePressureEstimate, BetheError> {
    let min_field = p.k * spec.min_degree() as f64 + p.h;
    if p.k < 0.0 || min_field <= 0.0 {
        return Err(BetheError::SignCondition { min_field });
    }
    assert!(depth >= 1, "depth must be at least 1");
    assert!(samples >= 1, "need at least one sample");

    if spec.root.is_deterministic() && spec.interior.is_deterministic() {
        let (free, plus) = deterministic_value(spec, p, depth);
        return Ok(TreePressureEstimate {
            estimate: 0.5 * (free + plus),
            std_error: 0.0,
            samples,
            depth,
            free,
            plus,
        });
    }

    let mut mids = Vec::with_capacity(samples);
    let mut sum_free = 0.0;
    let mut sum_plus = 0.0;
    for i in 0..samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let (free, plus) = sample_tree_value(spec, p, depth, &mut rng)?;
        sum_free += free;
        sum_plus += plus;
        mids.push(0.5 * (free + plus));
    }
    let n = samples as f64;
    let mean = mids.iter().sum::<f64>() / n;
    let var = if samples > 1 {
        mids.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(TreePressureEstimate {
        estimate: mean,
        std_error: (var / n).sqrt(),
        samples,
        depth,
        free: sum_free / n,
        plus: sum_plus / n,
    })
}

/// Per-tree free and plus values for `samples` sampled trees; used to check
/// the bracket ordering tree by tree rather than in expectation.
pub fn tree_pressure_samples(
    spec: &GwSpec,
    p: &EIsingParams,
    depth: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>, BetheError> {
    let min_field = p.k * spec.min_degree() as f64 + p.h;
    if p.k < 0.0 || min_field <= 0.0 {
        return Err(BetheError::SignCondition { min_field });
    }
    if spec.root.is_deterministic() && spec.interior.is_deterministic() {
        return Ok(vec![deterministic_value(spec, p, depth); samples]);
    }
    (0..samples)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            sample_tree_value(spec, p, depth, &mut rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn single_vertex_tree_is_exact() {
        let spec = GwSpec::new(OffspringDist::Deterministic(0), OffspringDist::Deterministic(0))
            .unwrap();
        let p = EIsingParams::new(0.7, 0.2, 0.9).unwrap();
        let est = tree_pressure(&spec, &p, 5, 10, 1).unwrap();
        let expect = (2.0 * 0.9f64.cosh()).ln();
        assert_eq!(est.std_error, 0.0);
        assert!((est.estimate - expect).abs() < 1e-14);
        assert!((est.free - est.plus).abs() < 1e-14);
    }

    #[test]
    fn sign_condition_enforced() {
        let spec = GwSpec::regular(3);
        // k * 3 + h < 0 at these values
        let p = EIsingParams::new(0.3, 0.05, -0.2).unwrap();
        assert!(matches!(
            tree_pressure(&spec, &p, 5, 10, 1),
            Err(BetheError::SignCondition { .. })
        ));
    }

    #[test]
    fn decoupled_at_beta_zero_matches_direct_expectation() {
        // beta = 0: phi = E[log 2 cosh(k d_o + h)] over the root offspring law
        let spec = GwSpec::new(
            OffspringDist::Tabulated(vec![0.0, 0.3, 0.5, 0.2]),
            OffspringDist::Tabulated(vec![0.4, 0.6]),
        )
        .unwrap();
        let p = EIsingParams::new(0.0, 0.15, 0.4).unwrap();
        let est = tree_pressure(&spec, &p, 4, 4000, 42).unwrap();
        let direct: f64 = [(1usize, 0.3), (2, 0.5), (3, 0.2)]
            .iter()
            .map(|&(c, pr)| pr * (2.0 * p.field(c).cosh()).ln())
            .sum();
        assert!(
            (est.estimate - direct).abs() < 4.0 * est.std_error.max(1e-4),
            "{} vs {direct} (se {})",
            est.estimate,
            est.std_error
        );
        // at beta = 0 the boundary condition is irrelevant
        assert!(est.bracket_width().abs() < 1e-12);
    }

    #[test]
    fn bracket_ordering_holds_per_tree() {
        let spec = GwSpec::new(
            OffspringDist::Tabulated(vec![0.0, 0.4, 0.4, 0.2]),
            OffspringDist::Tabulated(vec![0.2, 0.5, 0.3]),
        )
        .unwrap();
        let p = EIsingParams::new(0.5, 0.1, 0.25).unwrap();
        for (i, (free, plus)) in tree_pressure_samples(&spec, &p, 6, 200, 7)
            .unwrap()
            .iter()
            .enumerate()
        {
            assert!(free <= &(plus + 1e-12), "sample {i}: {free} > {plus}");
        }
    }

    #[test]
    fn bracket_collapses_with_depth_for_regular_spec() {
        let spec = GwSpec::regular(3);
        let p = EIsingParams::new(0.3, 0.1, 0.2).unwrap();
        let mut widths = Vec::new();
        for depth in [2usize, 5, 10, 20, 30] {
            let est = tree_pressure(&spec, &p, depth, 1, 0).unwrap();
            assert!(est.bracket_width() >= -1e-12);
            widths.push(est.bracket_width());
        }
        for pair in widths.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-15, "widths not decreasing: {widths:?}");
        }
        assert!(widths.last().unwrap() < &1e-6, "width at depth 30: {widths:?}");
    }

    #[test]
    fn deterministic_path_matches_sampled_path() {
        // a tabulated distribution with all mass on one value must reproduce
        // the collapsed deterministic recursion exactly
        let det = GwSpec::regular(3);
        let tab = GwSpec::new(
            OffspringDist::Tabulated(vec![0.0, 0.0, 0.0, 1.0]),
            OffspringDist::Tabulated(vec![0.0, 0.0, 1.0]),
        )
        .unwrap();
        let p = EIsingParams::new(0.4, 0.08, 0.3).unwrap();
        for depth in [1usize, 3, 7] {
            let a = tree_pressure(&det, &p, depth, 1, 5).unwrap();
            let b = tree_pressure(&tab, &p, depth, 3, 5).unwrap();
            assert!((a.free - b.free).abs() < 1e-12, "depth {depth}");
            assert!((a.plus - b.plus).abs() < 1e-12, "depth {depth}");
        }
    }

    #[test]
    fn delta_sym_saturates_and_is_odd() {
        let beta = 0.8;
        assert!((delta_sym(beta, f64::INFINITY) - 2.0 * beta).abs() < 1e-15);
        assert_eq!(delta_sym(beta, 0.0), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let l: f64 = rng.gen_range(-30.0..30.0);
            assert!((delta_sym(beta, l) + delta_sym(beta, -l)).abs() < 1e-12);
            assert!(delta_sym(beta, l).abs() <= 2.0 * beta + 1e-12);
        }
    }

    #[test]
    fn estimates_are_reproducible() {
        let spec = GwSpec::new(
            OffspringDist::Tabulated(vec![0.0, 0.5, 0.5]),
            OffspringDist::Tabulated(vec![0.5, 0.5]),
        )
        .unwrap();
        let p = EIsingParams::new(0.3, 0.2, 0.1).unwrap();
        let a = tree_pressure(&spec, &p, 5, 100, 3).unwrap();
        let b = tree_pressure(&spec, &p, 5, 100, 3).unwrap();
        assert_eq!(a.estimate, b.estimate);
        assert_eq!(a.std_error, b.std_error);
    }
}
