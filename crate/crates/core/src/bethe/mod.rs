//! Belief propagation on finite graphs, evaluation of the Bethe partition
//! function at fixed points, the log-supermodularity check behind the lower
//! bound, and Monte-Carlo tree pressure for the extended Ising model.
//!
//! Messages are cavity marginals stored as log-odds of the `+` spin, one per
//! directed edge. Fixed points of the sweep are stationary points of the
//! Bethe functional; for log-supermodular weights every fixed-point value is
//! a lower bound on the true log partition function.

mod tree;

pub use tree::{tree_pressure, tree_pressure_samples, TreePressureEstimate, TREE_NODE_BUDGET};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exact::{EIsingParams, TwoSpinWeights};
use crate::graphs::Graph;
use crate::num::{log_sigmoid, logsumexp2, xlogx};

#[derive(Debug, Error, PartialEq)]
pub enum BetheError {
    #[error("no initialisation produced a converged run")]
    NoConvergedRun,
    #[error("marginals are not consistent: {0}")]
    InconsistentMarginals(String),
    #[error("budget exceeded: {what} = {size}, limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("fixed-sign condition violated: min vertex field = {min_field}")]
    SignCondition { min_field: f64 },
}

/// A pairwise binary-spin model on a graph: uniform two-spin weights, or the
/// extended Ising model whose vertex fields are driven by the degrees.
#[derive(Debug, Clone, Copy)]
pub enum SpinModel {
    TwoSpin(TwoSpinWeights),
    ExtendedIsing(EIsingParams),
}

/// Log-domain weight tables for one graph.
#[derive(Debug, Clone)]
struct ModelTables {
    lpp: f64,
    lpm: f64,
    lmm: f64,
    /// `vlog[v] = [ln psibar_v(+), ln psibar_v(-)]`
    vlog: Vec<[f64; 2]>,
}

impl SpinModel {
    fn tables(&self, g: &Graph) -> ModelTables {
        match self {
            SpinModel::TwoSpin(ws) => {
                let (lpp, lpm, lmm) = ws.edge_logs();
                let (lp, lm) = ws.vertex_logs();
                ModelTables {
                    lpp,
                    lpm,
                    lmm,
                    vlog: vec![[lp, lm]; g.n()],
                }
            }
            SpinModel::ExtendedIsing(p) => ModelTables {
                lpp: p.beta,
                lpm: -p.beta,
                lmm: p.beta,
                vlog: (0..g.n())
                    .map(|v| {
                        let f = p.field(g.degree(v));
                        [f, -f]
                    })
                    .collect(),
            },
        }
    }
}

impl ModelTables {
    /// Log-odds contribution of a neighbour with message log-odds `lambda` to
    /// a `+`-vs-`-` cavity update.
    fn delta(&self, lambda: f64) -> f64 {
        let lsp = log_sigmoid(lambda);
        let lsm = log_sigmoid(-lambda);
        logsumexp2(self.lpp + lsp, self.lpm + lsm) - logsumexp2(self.lpm + lsp, self.lmm + lsm)
    }

    /// `log sum_{s'} psi(s, s') m(s')` for `s` in `{+, -}`.
    fn edge_sum(&self, lambda: f64) -> [f64; 2] {
        let lsp = log_sigmoid(lambda);
        let lsm = log_sigmoid(-lambda);
        [
            logsumexp2(self.lpp + lsp, self.lpm + lsm),
            logsumexp2(self.lpm + lsp, self.lmm + lsm),
        ]
    }
}

/// Directed-edge adjacency built once per BP call. For edge `e = (u, v)`,
/// message slot `2e` holds `u -> v` and `2e + 1` holds `v -> u`.
struct Topology {
    /// per vertex: (neighbour, incoming slot, outgoing slot)
    incident: Vec<Vec<(usize, usize, usize)>>,
    /// sender vertex of each directed slot
    sender: Vec<usize>,
}

impl Topology {
    fn new(g: &Graph) -> Self {
        let mut incident = vec![Vec::new(); g.n()];
        let mut sender = vec![0usize; 2 * g.m()];
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            incident[u].push((v, 2 * e + 1, 2 * e));
            incident[v].push((u, 2 * e, 2 * e + 1));
            sender[2 * e] = u;
            sender[2 * e + 1] = v;
        }
        Topology { incident, sender }
    }
}

/// Messages are clamped to this log-odds magnitude to keep every exponential
/// finite; a run that still clamps at convergence is flagged.
pub const LOG_ODDS_CLAMP: f64 = 40.0;
const PLUS_INIT: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitMode {
    Uniform,
    Plus,
    Minus,
    Random(u64),
}

/// One message per directed edge, as log-odds of the `+` spin in the cavity
/// model, plus sweep bookkeeping.
#[derive(Debug, Clone)]
pub struct BPState {
    log_odds: Vec<f64>,
    pub sweeps: usize,
    /// Max absolute log-odds change of the last sweep.
    pub residual: f64,
    /// Whether the clamp was active during the last sweep.
    pub clamped: bool,
}

impl BPState {
    pub fn messages(&self) -> &[f64] {
        &self.log_odds
    }
}

pub fn bp_init(g: &Graph, mode: InitMode) -> BPState {
    let slots = 2 * g.m();
    let log_odds = match mode {
        InitMode::Uniform => vec![0.0; slots],
        InitMode::Plus => vec![PLUS_INIT; slots],
        InitMode::Minus => vec![-PLUS_INIT; slots],
        InitMode::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..slots).map(|_| rng.gen_range(-2.0..2.0)).collect()
        }
    };
    BPState {
        log_odds,
        sweeps: 0,
        residual: f64::INFINITY,
        clamped: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    Synchronous,
    /// In-place updates in a freshly shuffled edge order each sweep.
    SequentialRandom(u64),
}

#[derive(Debug, Clone, Copy)]
pub struct BpOptions {
    pub max_sweeps: usize,
    pub tol: f64,
    pub damping: f64,
    pub schedule: Schedule,
}

impl Default for BpOptions {
    fn default() -> Self {
        BpOptions {
            max_sweeps: 10_000,
            tol: 1e-12,
            damping: 0.5,
            schedule: Schedule::Synchronous,
        }
    }
}

fn sweep_synchronous(
    topo: &Topology,
    tables: &ModelTables,
    state: &mut BPState,
    scratch: &mut Vec<f64>,
    damping: f64,
) {
    scratch.clear();
    scratch.extend_from_slice(&state.log_odds);
    let mut residual = 0.0f64;
    let mut clamped = false;
    for (u, inc) in topo.incident.iter().enumerate() {
        let field = tables.vlog[u][0] - tables.vlog[u][1];
        let total: f64 = inc.iter().map(|&(_, inm, _)| tables.delta(scratch[inm])).sum();
        for &(_, inm, out) in inc {
            let raw = field + total - tables.delta(scratch[inm]);
            let mut new = (1.0 - damping) * raw + damping * scratch[out];
            if new.abs() > LOG_ODDS_CLAMP {
                new = new.clamp(-LOG_ODDS_CLAMP, LOG_ODDS_CLAMP);
                clamped = true;
            }
            residual = residual.max((new - scratch[out]).abs());
            state.log_odds[out] = new;
        }
    }
    state.sweeps += 1;
    state.residual = residual;
    state.clamped = clamped;
}

fn sweep_sequential(
    topo: &Topology,
    tables: &ModelTables,
    state: &mut BPState,
    order: &[usize],
    damping: f64,
) {
    let mut residual = 0.0f64;
    let mut clamped = false;
    for &slot in order {
        let u = topo.sender[slot];
        let skip_in = slot ^ 1; // the reverse message is not part of the cavity
        let field = tables.vlog[u][0] - tables.vlog[u][1];
        let mut raw = field;
        for &(_, inm, _) in &topo.incident[u] {
            if inm != skip_in {
                raw += tables.delta(state.log_odds[inm]);
            }
        }
        let mut new = (1.0 - damping) * raw + damping * state.log_odds[slot];
        if new.abs() > LOG_ODDS_CLAMP {
            new = new.clamp(-LOG_ODDS_CLAMP, LOG_ODDS_CLAMP);
            clamped = true;
        }
        residual = residual.max((new - state.log_odds[slot]).abs());
        state.log_odds[slot] = new;
    }
    state.sweeps += 1;
    state.residual = residual;
    state.clamped = clamped;
}

/// One damped update of every message; returns the new state.
pub fn bp_step(g: &Graph, model: &SpinModel, state: &BPState, damping: f64) -> BPState {
    let topo = Topology::new(g);
    let tables = model.tables(g);
    let mut next = state.clone();
    let mut scratch = Vec::new();
    sweep_synchronous(&topo, &tables, &mut next, &mut scratch, damping);
    next
}

/// Outcome of a BP run. Non-convergence is reported, not fatal: the caller
/// may restart from another initialisation or with stronger damping.
#[derive(Debug, Clone)]
pub struct BpRun {
    pub state: BPState,
    pub converged: bool,
    /// True when the log-odds clamp was binding on the final sweep; such a
    /// run is not trusted as a fixed point.
    pub clamped_at_end: bool,
}

pub fn bp_run(g: &Graph, model: &SpinModel, init: InitMode, opts: &BpOptions) -> BpRun {
    let topo = Topology::new(g);
    let tables = model.tables(g);
    let mut state = bp_init(g, init);
    if g.m() == 0 {
        state.residual = 0.0;
        return BpRun {
            state,
            converged: true,
            clamped_at_end: false,
        };
    }
    let mut scratch = Vec::new();
    let mut seq_rng = match opts.schedule {
        Schedule::SequentialRandom(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        Schedule::Synchronous => None,
    };
    let mut order: Vec<usize> = (0..2 * g.m()).collect();
    for _ in 0..opts.max_sweeps {
        match opts.schedule {
            Schedule::Synchronous => {
                sweep_synchronous(&topo, &tables, &mut state, &mut scratch, opts.damping)
            }
            Schedule::SequentialRandom(_) => {
                let rng = seq_rng.as_mut().unwrap();
                for i in (1..order.len()).rev() {
                    let j = rng.gen_range(0..=i);
                    order.swap(i, j);
                }
                sweep_sequential(&topo, &tables, &mut state, &order, opts.damping)
            }
        }
        if state.residual < opts.tol {
            let clamped = state.clamped;
            return BpRun {
                state,
                converged: true,
                clamped_at_end: clamped,
            };
        }
    }
    let clamped = state.clamped;
    BpRun {
        state,
        converged: false,
        clamped_at_end: clamped,
    }
}

/// Vertex and edge beliefs computed from a message state. Indexed like the
/// graph: `vertex[v][s]` and `edge[e][s_u][s_v]` with `s = 0` for `+`.
#[derive(Debug, Clone)]
pub struct Beliefs {
    pub vertex: Vec<[f64; 2]>,
    pub edge: Vec<[[f64; 2]; 2]>,
}

pub fn beliefs_from_messages(g: &Graph, model: &SpinModel, state: &BPState) -> Beliefs {
    let tables = model.tables(g);
    let topo = Topology::new(g);
    let mut vertex = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        let mut lp = tables.vlog[v][0];
        let mut lm = tables.vlog[v][1];
        for &(_, inm, _) in &topo.incident[v] {
            let s = tables.edge_sum(state.log_odds[inm]);
            lp += s[0];
            lm += s[1];
        }
        let norm = logsumexp2(lp, lm);
        vertex.push([(lp - norm).exp(), (lm - norm).exp()]);
    }
    let mut edge = Vec::with_capacity(g.m());
    for e in 0..g.m() {
        let mu = state.log_odds[2 * e]; // u -> v
        let mv = state.log_odds[2 * e + 1]; // v -> u
        let lu = [log_sigmoid(mu), log_sigmoid(-mu)];
        let lv = [log_sigmoid(mv), log_sigmoid(-mv)];
        let lw = [[tables.lpp, tables.lpm], [tables.lpm, tables.lmm]];
        let mut raw = [[0.0f64; 2]; 2];
        let mut norm = f64::NEG_INFINITY;
        for su in 0..2 {
            for sv in 0..2 {
                raw[su][sv] = lu[su] + lw[su][sv] + lv[sv];
                norm = logsumexp2(norm, raw[su][sv]);
            }
        }
        let mut out = [[0.0f64; 2]; 2];
        for su in 0..2 {
            for sv in 0..2 {
                out[su][sv] = (raw[su][sv] - norm).exp();
            }
        }
        edge.push(out);
    }
    Beliefs { vertex, edge }
}

/// Marginals accepted by [`bethe_log_partition`] must be consistent to this
/// gate; converged fixed points satisfy the invariants far more tightly.
pub const CONSISTENCY_GATE: f64 = 1e-8;

/// Evaluates the Bethe functional at the given marginals: vertex energy +
/// edge energy + vertex entropy - edge correlation, with `0 log 0 = 0`.
pub fn bethe_log_partition(
    g: &Graph,
    model: &SpinModel,
    beliefs: &Beliefs,
) -> Result<f64, BetheError> {
    check_consistency(g, beliefs)?;
    let tables = model.tables(g);
    let mut total = 0.0;
    for (v, mu) in beliefs.vertex.iter().enumerate() {
        for s in 0..2 {
            total += mu[s] * tables.vlog[v][s];
            total -= xlogx(mu[s]);
        }
    }
    let lw = [[tables.lpp, tables.lpm], [tables.lpm, tables.lmm]];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let mue = &beliefs.edge[e];
        for su in 0..2 {
            for sv in 0..2 {
                let m = mue[su][sv];
                total += m * lw[su][sv];
                if m > 0.0 {
                    total -=
                        m * (m.ln() - beliefs.vertex[u][su].ln() - beliefs.vertex[v][sv].ln());
                }
            }
        }
    }
    Ok(total)
}

fn check_consistency(g: &Graph, beliefs: &Beliefs) -> Result<(), BetheError> {
    for (v, mu) in beliefs.vertex.iter().enumerate() {
        if (mu[0] + mu[1] - 1.0).abs() > CONSISTENCY_GATE {
            return Err(BetheError::InconsistentMarginals(format!(
                "vertex {v} marginal sums to {}",
                mu[0] + mu[1]
            )));
        }
        if mu.iter().any(|&x| !(-CONSISTENCY_GATE..=1.0 + CONSISTENCY_GATE).contains(&x)) {
            return Err(BetheError::InconsistentMarginals(format!(
                "vertex {v} marginal outside [0, 1]"
            )));
        }
    }
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let mue = &beliefs.edge[e];
        for sv in 0..2 {
            let col = mue[0][sv] + mue[1][sv];
            if (col - beliefs.vertex[v][sv]).abs() > CONSISTENCY_GATE {
                return Err(BetheError::InconsistentMarginals(format!(
                    "edge {e} column {sv} marginalises to {col}, vertex gives {}",
                    beliefs.vertex[v][sv]
                )));
            }
        }
        for su in 0..2 {
            let row = mue[su][0] + mue[su][1];
            if (row - beliefs.vertex[u][su]).abs() > CONSISTENCY_GATE {
                return Err(BetheError::InconsistentMarginals(format!(
                    "edge {e} row {su} marginalises to {row}, vertex gives {}",
                    beliefs.vertex[u][su]
                )));
            }
        }
    }
    Ok(())
}

/// Marginals plus the Bethe log-partition value at one fixed point.
#[derive(Debug, Clone)]
pub struct BetheEvaluation {
    pub beliefs: Beliefs,
    pub log_z_bethe: f64,
}

impl BetheEvaluation {
    pub fn from_state(g: &Graph, model: &SpinModel, state: &BPState) -> Result<Self, BetheError> {
        let beliefs = beliefs_from_messages(g, model, state);
        let log_z_bethe = bethe_log_partition(g, model, &beliefs)?;
        Ok(BetheEvaluation {
            beliefs,
            log_z_bethe,
        })
    }
}

/// Distinct fixed-point values are separated by this gap.
pub const DISTINCT_VALUE_GAP: f64 = 1e-8;

/// Best Bethe value over BP fixed points reached from multiple
/// initialisations.
#[derive(Debug, Clone)]
pub struct BetheMax {
    pub best: f64,
    /// All distinct converged fixed-point values, descending.
    pub values: Vec<f64>,
    pub runs_attempted: usize,
    pub runs_converged: usize,
}

/// Searches BP fixed points from uniform, plus, minus and `restarts` random
/// initialisations, and reports the best Bethe value found. A run that fails
/// to converge is retried once with damping 0.9 before being dropped.
pub fn bethe_max(
    g: &Graph,
    model: &SpinModel,
    restarts: usize,
    seed: u64,
    opts: &BpOptions,
) -> Result<BetheMax, BetheError> {
    let mut inits = vec![InitMode::Uniform, InitMode::Plus, InitMode::Minus];
    for i in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64 + 1);
        inits.push(InitMode::Random(rng.gen()));
    }
    let mut values = Vec::new();
    let mut attempted = 0;
    let mut converged = 0;
    for init in inits {
        attempted += 1;
        let mut run = bp_run(g, model, init, opts);
        if !run.converged {
            let heavier = BpOptions {
                damping: 0.9,
                ..*opts
            };
            run = bp_run(g, model, init, &heavier);
        }
        if !run.converged || run.clamped_at_end {
            continue;
        }
        converged += 1;
        let eval = BetheEvaluation::from_state(g, model, &run.state)?;
        values.push(eval.log_z_bethe);
    }
    if values.is_empty() {
        return Err(BetheError::NoConvergedRun);
    }
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    values.dedup_by(|a, b| (*a - *b).abs() <= DISTINCT_VALUE_GAP);
    Ok(BetheMax {
        best: values[0],
        values,
        runs_attempted: attempted,
        runs_converged: converged,
    })
}

pub const SUPERMODULAR_VERTEX_BUDGET: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSupermodularity {
    /// Brute-force check of `f(a ^ b) f(a v b) >= f(a) f(b)` over all pairs.
    pub exhaustive: bool,
    /// The per-edge predicate `psi(+,+) psi(-,-) >= psi(+,-)^2`.
    pub analytic: bool,
}

/// Checks log-supermodularity of the full weight product on `g`, both
/// exhaustively and through the analytic edge predicate.
pub fn log_supermodular_check(
    g: &Graph,
    ws: &TwoSpinWeights,
) -> Result<LogSupermodularity, BetheError> {
    let n = g.n();
    if n > SUPERMODULAR_VERTEX_BUDGET {
        return Err(BetheError::BudgetExceeded {
            what: "vertices",
            size: n,
            limit: SUPERMODULAR_VERTEX_BUDGET,
        });
    }
    let analytic = ws.psi_pp * ws.psi_mm >= ws.psi_pm * ws.psi_pm;
    let (lpp, lpm, lmm) = ws.edge_logs();
    let (lvp, lvm) = ws.vertex_logs();
    let edges = g.edges();
    // log f over all spin assignments (bit set = +)
    let table: Vec<f64> = (0u32..(1 << n))
        .map(|s| {
            let mut ln = 0.0;
            for v in 0..n {
                ln += if s & (1 << v) != 0 { lvp } else { lvm };
            }
            for &(u, v) in edges {
                let up = s & (1 << u) != 0;
                let vp = s & (1 << v) != 0;
                ln += match (up, vp) {
                    (true, true) => lpp,
                    (false, false) => lmm,
                    _ => lpm,
                };
            }
            ln
        })
        .collect();
    let mut exhaustive = true;
    'outer: for a in 0u32..(1 << n) {
        for b in a..(1 << n) {
            // with + as the set bit, coordinate min is AND and max is OR
            if table[(a & b) as usize] + table[(a | b) as usize]
                < table[a as usize] + table[b as usize] - 1e-9
            {
                exhaustive = false;
                break 'outer;
            }
        }
    }
    Ok(LogSupermodularity {
        exhaustive,
        analytic,
    })
}
