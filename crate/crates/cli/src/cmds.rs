//! One-shot commands: exact computation with sandwich report, phase-diagram
//! scans, critical-curve tracing, and tree-pressure estimation.

use rayon::prelude::*;
use serde_json::json;

use rc_lab::bethe;
use rc_lab::exact::{self, EIsingParams, RCParams};
use rc_lab::graphs::{Graph, GwSpec};
use rc_lab::mapping;
use rc_lab::regular;

use crate::fmt::f17;
use crate::CliError;

/// `exact`: log Z, log Z^(2), the cycle statistic and the sandwich verdict.
pub fn exact_report(g: &Graph, q: f64, w: f64, b: f64) -> Result<serde_json::Value, CliError> {
    let p = RCParams::new(q, w, b)?;
    let r = exact::sandwich_check(g, &p)?;
    Ok(json!({
        "n": g.n(),
        "m": g.m(),
        "q": q,
        "w": w,
        "B": b,
        "log_z": r.log_z,
        "log_z2": r.log_z2,
        "cyclic_max": r.cyclic_max,
        "lower": r.log_z2,
        "upper": r.log_z2 + r.log_bound_gap,
        "pass": r.pass,
    }))
}

/// `scan`: pressure surface over a (w, B) grid, rows B-major then w-minor.
pub fn scan_csv(
    q: f64,
    d: usize,
    w_points: &[f64],
    b_points: &[f64],
) -> Result<String, CliError> {
    let grid: Vec<(f64, f64)> = b_points
        .iter()
        .flat_map(|&b| w_points.iter().map(move |&w| (w, b)))
        .collect();
    let rows: Result<Vec<String>, CliError> = grid
        .par_iter()
        .map(|&(w, b)| {
            let phi = regular::rc_pressure(q, w, b, d)?;
            let m = mapping::rc_to_eising(q, w, b)?;
            let z = m.eising.k * d as f64 + m.eising.h;
            let sol = regular::variational_max(m.eising.beta, z, d)?;
            let (t_plus, t_minus) = if z == 0.0 {
                (sol.t_star, 1.0 - sol.t_star)
            } else {
                (sol.t_star, sol.t_star)
            };
            // central difference, one-sided at the w = 0 boundary
            let h = 1e-4f64.min(if w > 0.0 { w / 2.0 } else { 1e-4 });
            let left = (w - h).max(0.0);
            let dphi = (regular::rc_pressure(q, w + h, b, d)?
                - regular::rc_pressure(q, left, b, d)?)
                / (w + h - left);
            Ok(format!(
                "{},{},{},{},{},{}",
                f17(w),
                f17(b),
                f17(phi),
                f17(t_plus),
                f17(t_minus),
                f17(dphi)
            ))
        })
        .collect();
    let mut out = String::from("w,B,phi,t_plus,t_minus,dphi_dw\n");
    for row in rows? {
        out.push_str(&row);
        out.push('\n');
    }
    Ok(out)
}

/// `curve`: the critical curve over a B grid clipped to `[0, B_+)`, plus the
/// endpoint `B_+` and its residual as a trailing comment line.
pub fn curve_csv(q: f64, d: usize, b_points: &[f64]) -> Result<String, CliError> {
    let b_plus = regular::find_b_plus(q, d)?;
    let clipped: Vec<f64> = b_points.iter().copied().filter(|&b| b < b_plus).collect();
    let rows: Result<Vec<String>, CliError> = clipped
        .par_iter()
        .map(|&b| {
            let w_c = regular::critical_w(b, q, d)?;
            let g = regular::g_of_w(w_c, q);
            let beta_star = 0.25 * g.ln();
            let probe = regular::transition_probe(q, d, b, regular::DERIVATIVE_STEP)?;
            Ok(format!(
                "{},{},{},{},{},{}",
                f17(b),
                f17(w_c),
                f17(beta_star),
                f17(g),
                probe.first_order,
                f17(probe.gap)
            ))
        })
        .collect();
    let mut out = String::from("B,w_c,beta_star,g,first_order,gap\n");
    for row in rows? {
        out.push_str(&row);
        out.push('\n');
    }
    let residual = (regular::g_of_w(regular::critical_w(b_plus, q, d)?, q)
        - (d as f64 / (d as f64 - 2.0)).powi(2))
    .abs();
    out.push_str(&format!(
        "# B_plus={} residual={}\n",
        f17(b_plus),
        f17(residual)
    ));
    Ok(out)
}

pub enum TreeParams {
    /// Map from random cluster parameters.
    Cluster { q: f64, w: f64, b: f64 },
    /// Direct extended Ising parameters.
    Direct { beta: f64, k: f64, h: f64 },
}

/// `tree`: bracketed Monte-Carlo pressure on a Galton-Watson tree.
pub fn tree_report(
    spec: &GwSpec,
    params: &TreeParams,
    depth: usize,
    samples: usize,
    seed: u64,
) -> Result<serde_json::Value, CliError> {
    let (eising, mapped_from) = match *params {
        TreeParams::Cluster { q, w, b } => {
            let m = mapping::rc_to_eising(q, w, b)?;
            (m.eising, Some((q, w, b)))
        }
        TreeParams::Direct { beta, k, h } => (EIsingParams::new(beta, k, h)?, None),
    };
    let est = bethe::tree_pressure(spec, &eising, depth, samples, seed)?;
    let mut report = json!({
        "phi": est.estimate,
        "phi_free": est.free,
        "phi_plus": est.plus,
        "stderr": est.std_error,
        "bracket_width": est.bracket_width(),
        "samples": est.samples,
        "depth": est.depth,
        "beta": eising.beta,
        "k": eising.k,
        "h": eising.h,
    });
    if let Some((q, w, b)) = mapped_from {
        let obj = report.as_object_mut().unwrap();
        obj.insert("q".into(), json!(q));
        obj.insert("w".into(), json!(w));
        obj.insert("B".into(), json!(b));
    }
    Ok(report)
}
