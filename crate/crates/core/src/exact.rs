//! Exhaustive, log-domain-exact partition functions for every model in the
//! toolkit, plus the sandwich-bound verifier. This layer is the ground truth
//! that everything else is checked against, so it favours directness over
//! speed: edge subsets, vertex subsets and spin assignments are enumerated in
//! full, guarded by budgets.

use thiserror::Error;

use crate::graphs::{cyclic_components_max, Graph, GraphError, UnionFind};
use crate::num::log1p_exp;
pub use crate::num::{LogSum, LogValue};

/// Edge-subset enumeration cap for [`rc_partition`] / [`rc_partition_no_field`].
pub const RC_EDGE_BUDGET: usize = 24;
/// Vertex/spin enumeration cap for the 2^n sums.
pub const SPIN_VERTEX_BUDGET: usize = 24;
/// Cap on log2(q^n) for [`potts_partition`].
pub const POTTS_LOG2_BUDGET: f64 = 24.0;

#[derive(Debug, Error, PartialEq)]
pub enum ExactError {
    #[error("enumeration budget exceeded: {what} = {size}, limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("q = {q} outside the valid range (need q {bound})")]
    InvalidQ { q: f64, bound: &'static str },
    #[error("parameter {name} = {value} outside the valid range")]
    InvalidParam { name: &'static str, value: f64 },
    #[error("weights must be strictly positive: {0}")]
    Positivity(&'static str),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Parameters of the random cluster model with external field:
/// cluster weight `q > 0`, edge weight `w = e^beta - 1 >= 0`, field `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RCParams {
    pub q: f64,
    pub w: f64,
    pub b: f64,
}

impl RCParams {
    pub fn new(q: f64, w: f64, b: f64) -> Result<Self, ExactError> {
        if !(q > 0.0) {
            return Err(ExactError::InvalidQ { q, bound: "> 0" });
        }
        if !(w >= 0.0) {
            return Err(ExactError::InvalidParam { name: "w", value: w });
        }
        Ok(RCParams { q, w, b })
    }
}

/// Edge and vertex weights of a symmetric two-spin model: edge weights for
/// `++`, `+-`/`-+` and `--`, and vertex weights for `+` and `-`. All strictly
/// positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSpinWeights {
    pub psi_pp: f64,
    pub psi_pm: f64,
    pub psi_mm: f64,
    pub psibar_p: f64,
    pub psibar_m: f64,
}

impl TwoSpinWeights {
    pub fn new(
        psi_pp: f64,
        psi_pm: f64,
        psi_mm: f64,
        psibar_p: f64,
        psibar_m: f64,
    ) -> Result<Self, ExactError> {
        for (v, name) in [
            (psi_pp, "psi(+,+)"),
            (psi_pm, "psi(+,-)"),
            (psi_mm, "psi(-,-)"),
            (psibar_p, "psibar(+)"),
            (psibar_m, "psibar(-)"),
        ] {
            if !(v > 0.0) {
                return Err(ExactError::Positivity(name));
            }
        }
        Ok(TwoSpinWeights {
            psi_pp,
            psi_pm,
            psi_mm,
            psibar_p,
            psibar_m,
        })
    }

    /// Edge log-weights `(ln psi(+,+), ln psi(+,-), ln psi(-,-))`.
    pub fn edge_logs(&self) -> (f64, f64, f64) {
        (self.psi_pp.ln(), self.psi_pm.ln(), self.psi_mm.ln())
    }

    /// Vertex log-weights `(ln psibar(+), ln psibar(-))`.
    pub fn vertex_logs(&self) -> (f64, f64) {
        (self.psibar_p.ln(), self.psibar_m.ln())
    }
}

/// Parameters of the extended Ising model: ferromagnetic pair coupling
/// `beta >= 0` and vertex fields `B_v = k * d_v + h` driven by the degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EIsingParams {
    pub beta: f64,
    pub k: f64,
    pub h: f64,
}

impl EIsingParams {
    pub fn new(beta: f64, k: f64, h: f64) -> Result<Self, ExactError> {
        if !(beta >= 0.0) {
            return Err(ExactError::InvalidParam {
                name: "beta",
                value: beta,
            });
        }
        Ok(EIsingParams { beta, k, h })
    }

    /// Field at a vertex of degree `d`.
    pub fn field(&self, d: usize) -> f64 {
        self.k * d as f64 + self.h
    }
}

fn check_edge_budget(g: &Graph) -> Result<(), ExactError> {
    if g.m() > RC_EDGE_BUDGET {
        return Err(ExactError::BudgetExceeded {
            what: "edges",
            size: g.m(),
            limit: RC_EDGE_BUDGET,
        });
    }
    Ok(())
}

fn check_vertex_budget(g: &Graph) -> Result<(), ExactError> {
    if g.n() > SPIN_VERTEX_BUDGET {
        return Err(ExactError::BudgetExceeded {
            what: "vertices",
            size: g.n(),
            limit: SPIN_VERTEX_BUDGET,
        });
    }
    Ok(())
}

/// log Z_G(q, w, B): sum over edge subsets of
/// `w^{|A|} * prod_C (1 + (q-1) e^{-B |C|})` with the product over the
/// connected components of `(V, A)`. The field may have either sign.
pub fn rc_partition(g: &Graph, p: &RCParams) -> Result<LogValue, ExactError> {
    check_edge_budget(g)?;
    let m = g.m();
    let n = g.n();
    let edges = g.edges();
    let ln_w = p.w.ln(); // -inf at w = 0; subsets with edges are skipped there
    let ln_qm1 = (p.q - 1.0).ln();
    let mut uf = UnionFind::new(n);
    let mut acc = LogSum::new();
    for mask in 0u32..(1u32 << m) {
        let bits = mask.count_ones() as usize;
        if p.w == 0.0 && bits > 0 {
            continue;
        }
        uf.reset();
        let mut rest = mask;
        while rest != 0 {
            let e = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            uf.union(edges[e].0, edges[e].1);
        }
        let mut ln_term = if bits == 0 { 0.0 } else { bits as f64 * ln_w };
        for v in 0..n {
            if uf.find(v) == v {
                let size = uf.component_size(v) as f64;
                // log(1 + (q-1) e^{-B s}), stable for any sign of B
                ln_term += log1p_exp(ln_qm1 - p.b * size);
            }
        }
        acc.push(ln_term);
    }
    Ok(LogValue::from_ln(acc.ln()))
}

/// log Z_G(q, w) = log sum over edge subsets of `q^{k(A)} w^{|A|}`.
pub fn rc_partition_no_field(g: &Graph, q: f64, w: f64) -> Result<LogValue, ExactError> {
    if !(q > 0.0) {
        return Err(ExactError::InvalidQ { q, bound: "> 0" });
    }
    if !(w >= 0.0) {
        return Err(ExactError::InvalidParam { name: "w", value: w });
    }
    check_edge_budget(g)?;
    let m = g.m();
    let edges = g.edges();
    let ln_w = w.ln();
    let ln_q = q.ln();
    let mut uf = UnionFind::new(g.n());
    let mut acc = LogSum::new();
    for mask in 0u32..(1u32 << m) {
        let bits = mask.count_ones() as usize;
        if w == 0.0 && bits > 0 {
            continue;
        }
        uf.reset();
        let mut rest = mask;
        while rest != 0 {
            let e = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            uf.union(edges[e].0, edges[e].1);
        }
        let edge_part = if bits == 0 { 0.0 } else { bits as f64 * ln_w };
        acc.push(uf.component_count() as f64 * ln_q + edge_part);
    }
    Ok(LogValue::from_ln(acc.ln()))
}

/// log of the Potts partition function with `q` colours, inverse temperature
/// `beta` and field `b` coupling to colour 1:
/// sum over colourings of `exp(beta * #monochromatic edges + b * #{sigma_v = 1})`.
pub fn potts_partition(g: &Graph, q: u32, beta: f64, b: f64) -> Result<LogValue, ExactError> {
    if q < 2 {
        return Err(ExactError::InvalidQ {
            q: q as f64,
            bound: ">= 2",
        });
    }
    let n = g.n();
    if (n as f64) * (q as f64).log2() > POTTS_LOG2_BUDGET {
        return Err(ExactError::BudgetExceeded {
            what: "q^n states (log2)",
            size: n * q as usize,
            limit: 1 << 24,
        });
    }
    let edges = g.edges();
    let mut colour = vec![0u32; n];
    let mut acc = LogSum::new();
    loop {
        let mono = edges.iter().filter(|&&(u, v)| colour[u] == colour[v]).count();
        let ones = colour.iter().filter(|&&c| c == 0).count();
        acc.push(beta * mono as f64 + b * ones as f64);
        // mixed-radix increment
        let mut i = 0;
        loop {
            if i == n {
                return Ok(LogValue::from_ln(acc.ln()));
            }
            colour[i] += 1;
            if colour[i] < q {
                break;
            }
            colour[i] = 0;
            i += 1;
        }
    }
}

/// log Z^(2)_G(q, w, B): the rank-2 vertex-subset sum
/// `sum_S (1+w)^{|E(S)|} (1 + w/(q-1))^{|E(V\S)|} ((q-1) e^{-B})^{n-|S|}`.
pub fn rank2_partition(g: &Graph, p: &RCParams) -> Result<LogValue, ExactError> {
    if p.q <= 1.0 + 1e-12 {
        return Err(ExactError::InvalidQ {
            q: p.q,
            bound: "> 1",
        });
    }
    check_vertex_budget(g)?;
    let n = g.n();
    let adj = adjacency_masks(g);
    let ln_in = p.w.ln_1p();
    let ln_out = (p.w / (p.q - 1.0)).ln_1p();
    let ln_field = (p.q - 1.0).ln() - p.b;
    let mut acc = LogSum::new();
    for s in 0u32..(1u32 << n) {
        let mut inside2 = 0u32; // twice |E(S)|
        let mut outside2 = 0u32; // twice |E(V \ S)|
        for v in 0..n {
            let hits = adj[v];
            if s & (1 << v) != 0 {
                inside2 += (hits & s).count_ones();
            } else {
                outside2 += (hits & !s).count_ones();
            }
        }
        let minus = (n as u32 - s.count_ones()) as f64;
        acc.push(
            0.5 * inside2 as f64 * ln_in + 0.5 * outside2 as f64 * ln_out + minus * ln_field,
        );
    }
    Ok(LogValue::from_ln(acc.ln()))
}

fn adjacency_masks(g: &Graph) -> Vec<u32> {
    let mut adj = vec![0u32; g.n()];
    for &(u, v) in g.edges() {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    adj
}

/// log Z_G(psi, psibar): sum over spin assignments of the product of vertex
/// and edge weights, accumulated factor by factor.
pub fn two_spin_partition(g: &Graph, ws: &TwoSpinWeights) -> Result<LogValue, ExactError> {
    check_vertex_budget(g)?;
    let n = g.n();
    let edges = g.edges();
    let (lpp, lpm, lmm) = ws.edge_logs();
    let (lvp, lvm) = ws.vertex_logs();
    let mut acc = LogSum::new();
    for s in 0u32..(1u32 << n) {
        // bit set = spin +
        let mut ln_term = 0.0;
        for v in 0..n {
            ln_term += if s & (1 << v) != 0 { lvp } else { lvm };
        }
        for &(u, v) in edges {
            let up = s & (1 << u) != 0;
            let vp = s & (1 << v) != 0;
            ln_term += match (up, vp) {
                (true, true) => lpp,
                (false, false) => lmm,
                _ => lpm,
            };
        }
        acc.push(ln_term);
    }
    Ok(LogValue::from_ln(acc.ln()))
}

/// log of the extended Ising partition function:
/// sum over `sigma in {-1,+1}^V` of
/// `exp(beta * sum_{uv} sigma_u sigma_v + sum_v (k d_v + h) sigma_v)`.
pub fn eising_partition(g: &Graph, p: &EIsingParams) -> Result<LogValue, ExactError> {
    check_vertex_budget(g)?;
    let n = g.n();
    let edges = g.edges();
    let fields: Vec<f64> = (0..n).map(|v| p.field(g.degree(v))).collect();
    let mut acc = LogSum::new();
    for s in 0u32..(1u32 << n) {
        let mut energy = 0.0;
        for (v, f) in fields.iter().enumerate() {
            energy += if s & (1 << v) != 0 { *f } else { -*f };
        }
        for &(u, v) in edges {
            let same = (s >> u ^ s >> v) & 1 == 0;
            energy += if same { p.beta } else { -p.beta };
        }
        acc.push(energy);
    }
    Ok(LogValue::from_ln(acc.ln()))
}

/// Result of checking `Z^(2) <= Z <= q^L * Z^(2)` on one graph.
#[derive(Debug, Clone)]
pub struct SandwichReport {
    pub log_z: f64,
    pub log_z2: f64,
    /// Width of the sandwich in log domain, `L * ln q`.
    pub log_bound_gap: f64,
    /// The cycle statistic L(G).
    pub cyclic_max: usize,
    pub pass: bool,
}

pub const SANDWICH_TOL: f64 = 1e-9;

/// Verifies the two-sided rank-2 bound. Requires `q >= 2` and `B >= 0`,
/// which is the regime where the upper bound is proven.
pub fn sandwich_check(g: &Graph, p: &RCParams) -> Result<SandwichReport, ExactError> {
    if p.q < 2.0 {
        return Err(ExactError::InvalidQ { q: p.q, bound: ">= 2" });
    }
    if p.b < 0.0 {
        return Err(ExactError::InvalidParam { name: "B", value: p.b });
    }
    let log_z = rc_partition(g, p)?.ln();
    let log_z2 = rank2_partition(g, p)?.ln();
    let cyclic_max = cyclic_components_max(g)?;
    let log_bound_gap = cyclic_max as f64 * p.q.ln();
    let pass = log_z2 - SANDWICH_TOL <= log_z && log_z <= log_z2 + log_bound_gap + SANDWICH_TOL;
    Ok(SandwichReport {
        log_z,
        log_z2,
        log_bound_gap,
        cyclic_max,
        pass,
    })
}
