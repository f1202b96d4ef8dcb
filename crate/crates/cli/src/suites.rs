//! Verification suites behind `rc-lab verify`: randomized property checks
//! with per-case residual lines. Trials are independent and seeded per index,
//! so they parallelise without changing the report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use rc_lab::bethe::{self, BpOptions, SpinModel};
use rc_lab::exact::{self, RCParams};
use rc_lab::graphs::{self, Graph};
use rc_lab::mapping;
use rc_lab::regular;

use crate::CliError;

#[derive(Debug, Clone)]
pub struct Case {
    pub label: String,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: Vec<Case>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for case in &self.cases {
            out.push_str(&format!(
                "{}: {} residual={:.3e} {}\n",
                self.name,
                case.label,
                case.residual,
                if case.pass { "pass" } else { "FAIL" }
            ));
        }
        let passed = self.cases.iter().filter(|c| c.pass).count();
        out.push_str(&format!(
            "suite {}: {} ({passed}/{} cases)\n",
            self.name,
            if self.pass() { "PASS" } else { "FAIL" },
            self.cases.len()
        ));
        out
    }

    pub fn render_json(&self) -> serde_json::Value {
        serde_json::json!({
            "suite": self.name,
            "pass": self.pass(),
            "cases": self.cases.iter().map(|c| serde_json::json!({
                "label": c.label,
                "residual": c.residual,
                "pass": c.pass,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Fixed parameter overrides for the random draws.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub q: Option<f64>,
    pub w: Option<f64>,
    pub b: Option<f64>,
}

fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn random_graph(rng: &mut ChaCha8Rng, n_max: usize, m_max: usize) -> Graph {
    let n = rng.gen_range(1..=n_max);
    let cap = (n * (n - 1) / 2).min(m_max);
    let m = rng.gen_range(0..=cap);
    graphs::gen_gnm(n, m, rng.gen()).unwrap()
}

fn draw(rng: &mut ChaCha8Rng, fixed: Option<f64>, lo: f64, hi: f64) -> f64 {
    fixed.unwrap_or_else(|| rng.gen_range(lo..=hi))
}

pub fn sandwich_suite(
    trials: usize,
    seed: u64,
    ov: &Overrides,
) -> Result<SuiteReport, CliError> {
    let cases: Result<Vec<Case>, CliError> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let g = random_graph(&mut rng, 10, 20);
            let p = RCParams::new(
                draw(&mut rng, ov.q, 2.0, 6.0),
                draw(&mut rng, ov.w, 0.0, 5.0),
                draw(&mut rng, ov.b, 0.0, 3.0),
            )?;
            let r = exact::sandwich_check(&g, &p)?;
            let violation = (r.log_z2 - r.log_z)
                .max(r.log_z - r.log_z2 - r.log_bound_gap)
                .max(0.0);
            Ok(Case {
                label: format!(
                    "trial {i} n={} m={} q={:.3} w={:.3} B={:.3} L={}",
                    g.n(),
                    g.m(),
                    p.q,
                    p.w,
                    p.b,
                    r.cyclic_max
                ),
                residual: violation,
                pass: r.pass,
            })
        })
        .collect();
    Ok(SuiteReport {
        name: "sandwich",
        cases: cases?,
    })
}

pub fn identities_suite(
    trials: usize,
    seed: u64,
    ov: &Overrides,
) -> Result<SuiteReport, CliError> {
    const TOL: f64 = 1e-10;
    let cases: Result<Vec<Vec<Case>>, CliError> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed.wrapping_add(1), i);
            let mut out = Vec::with_capacity(3);

            // Potts vs field-shifted cluster sum at integer q
            let q_int = [2u32, 3, 4][rng.gen_range(0..3)];
            let g = random_graph(&mut rng, if q_int == 4 { 8 } else { 10 }, 14);
            let w = draw(&mut rng, ov.w, 0.0, 3.0);
            let b = draw(&mut rng, ov.b, 0.0, 2.0);
            let potts = exact::potts_partition(&g, q_int, (1.0 + w).ln(), b)?.ln();
            let rc = exact::rc_partition(&g, &RCParams::new(q_int as f64, w, b)?)?.ln();
            let resid = (potts - (b * g.n() as f64 + rc)).abs();
            out.push(Case {
                label: format!("trial {i} potts q={q_int} n={} m={}", g.n(), g.m()),
                residual: resid,
                pass: resid < TOL,
            });

            // two-spin and extended-Ising routes to the rank-2 sum
            let g = random_graph(&mut rng, 10, 16);
            let q = draw(&mut rng, ov.q, 2.0, 6.0);
            let w = draw(&mut rng, ov.w, 0.0, 4.0);
            let b = draw(&mut rng, ov.b, 0.0, 3.0);
            let r = mapping::assemble_identities(&g, q, w, b)?;
            out.push(Case {
                label: format!("trial {i} eising-route q={q:.3}"),
                residual: r.eising_route,
                pass: r.eising_route < TOL,
            });
            out.push(Case {
                label: format!("trial {i} two-spin-route q={q:.3}"),
                residual: r.two_spin_route,
                pass: r.two_spin_route < TOL,
            });

            // q = 2 collapse of the sandwich
            let g = random_graph(&mut rng, 9, 14);
            let p = RCParams::new(2.0, w, b)?;
            let gap = (exact::rc_partition(&g, &p)?.ln() - exact::rank2_partition(&g, &p)?.ln())
                .abs();
            out.push(Case {
                label: format!("trial {i} q2-equality n={} m={}", g.n(), g.m()),
                residual: gap,
                pass: gap < TOL,
            });
            Ok(out)
        })
        .collect();
    Ok(SuiteReport {
        name: "identities",
        cases: cases?.into_iter().flatten().collect(),
    })
}

pub fn bethe_suite(
    trials: usize,
    seed: u64,
    ov: &Overrides,
    bp_tol: f64,
) -> Result<SuiteReport, CliError> {
    let opts = BpOptions {
        tol: bp_tol,
        ..Default::default()
    };
    let cases: Result<Vec<Vec<Case>>, CliError> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed.wrapping_add(2), i);
            let mut out = Vec::with_capacity(2);

            // loopy graph: every converged fixed point sits below exact
            let n = rng.gen_range(4..=12);
            let m = (n + rng.gen_range(0..=6)).min(n * (n - 1) / 2).min(18);
            let g = graphs::gen_gnm(n, m, rng.gen()).unwrap();
            let q = draw(&mut rng, ov.q, 2.0, 5.0);
            let w = draw(&mut rng, ov.w, 0.0, 4.0);
            let b = draw(&mut rng, ov.b, 0.0, 2.0);
            let ws = mapping::rc_to_two_spin(q, w, b)?;
            match bethe::bethe_max(&g, &SpinModel::TwoSpin(ws), 2, rng.gen(), &opts) {
                Ok(bm) => {
                    let z2 = exact::two_spin_partition(&g, &ws)?.ln();
                    let excess = bm
                        .values
                        .iter()
                        .map(|v| v - z2)
                        .fold(f64::NEG_INFINITY, f64::max);
                    out.push(Case {
                        label: format!(
                            "trial {i} lower-bound n={n} m={m} fixed-points={}",
                            bm.values.len()
                        ),
                        residual: excess.max(0.0),
                        pass: excess <= 1e-8,
                    });
                }
                Err(bethe::BetheError::NoConvergedRun) => out.push(Case {
                    label: format!("trial {i} lower-bound n={n} m={m} (no converged run)"),
                    residual: 0.0,
                    pass: true,
                }),
                Err(e) => return Err(e.into()),
            }

            // tree: Bethe equals exact
            let t = graphs::gen_random_tree(rng.gen_range(2..=10), rng.gen()).unwrap();
            let ws = mapping::rc_to_two_spin(
                draw(&mut rng, ov.q, 2.0, 5.0),
                draw(&mut rng, ov.w, 0.0, 4.0),
                draw(&mut rng, ov.b, 0.0, 2.0),
            )?;
            let model = SpinModel::TwoSpin(ws);
            let run = bethe::bp_run(&t, &model, bethe::InitMode::Uniform, &opts);
            let gap = if run.converged {
                let eval = bethe::BetheEvaluation::from_state(&t, &model, &run.state)?;
                (eval.log_z_bethe - exact::two_spin_partition(&t, &ws)?.ln()).abs()
            } else {
                f64::INFINITY
            };
            out.push(Case {
                label: format!("trial {i} tree-exactness n={}", t.n()),
                residual: gap,
                pass: gap < 1e-8,
            });
            Ok(out)
        })
        .collect();
    Ok(SuiteReport {
        name: "bethe",
        cases: cases?.into_iter().flatten().collect(),
    })
}

pub fn regular_suite(seed: u64) -> Result<SuiteReport, CliError> {
    let mut cases = Vec::new();
    fn push(cases: &mut Vec<Case>, label: String, residual: f64, tol: f64) {
        cases.push(Case {
            label,
            residual,
            pass: residual < tol,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(3));
    for i in 0..8 {
        let z: f64 = rng.gen_range(-3.0..3.0);
        let d = 3 + (i % 3);
        let got = regular::ising_pressure(0.0, z, d)?;
        push(
            &mut cases,
            format!("free-pressure z={z:.3} d={d}"),
            (got - (2.0 * z.cosh()).ln()).abs(),
            1e-9,
        );
    }
    for i in 0..6 {
        let q: f64 = rng.gen_range(2.0..6.0);
        let b: f64 = rng.gen_range(0.0..3.0);
        let d = 3 + (i % 3);
        let got = regular::rc_pressure(q, 0.0, b, d)?;
        push(
            &mut cases,
            format!("w0-pressure q={q:.3} B={b:.3} d={d}"),
            (got - ((q - 1.0) * (-b).exp()).ln_1p()).abs(),
            1e-9,
        );
    }
    for (beta, z, d) in [(0.3, 0.4, 3), (0.7, 0.2, 3), (0.5, -0.9, 4)] {
        let sol = regular::variational_max(beta, z, d)?;
        let h = 1e-5;
        let numeric = (regular::ising_pressure(beta, z + h, d)?
            - regular::ising_pressure(beta, z - h, d)?)
            / (2.0 * h);
        push(
            &mut cases,
            format!("envelope beta={beta} z={z} d={d}"),
            (numeric - (2.0 * sol.t_star - 1.0)).abs(),
            1e-5,
        );
    }

    let (q, d) = (4.0, 3);
    let b_plus = regular::find_b_plus(q, d)?;
    let g = regular::g_of_w(regular::critical_w(b_plus, q, d)?, q);
    push(&mut cases, format!("b-plus q={q} d={d}"), (g - 9.0).abs(), 1e-10);
    push(
        &mut cases,
        "ell(2; q=3, d=4) vs sqrt2".into(),
        (regular::ell_qd(2.0, 3.0, 4)? - 2f64.sqrt()).abs(),
        1e-12,
    );
    push(
        &mut cases,
        "critical-w limit q->2 d=3".into(),
        (regular::critical_w(0.0, 2.0 + 1e-6, 3)? - 2.0).abs(),
        1e-4,
    );

    let probe = regular::transition_probe(q, d, 0.0, regular::DERIVATIVE_STEP)?;
    cases.push(Case {
        label: format!("first-order gap at B=0 (gap={:.4})", probe.gap),
        residual: probe.gap,
        pass: probe.first_order && probe.gap > 1e-3,
    });
    let off = regular::transition_probe(q, d, b_plus + 0.2, regular::DERIVATIVE_STEP)?;
    push(&mut cases, "no transition beyond B+".into(), off.gap.abs(), 1e-3);

    Ok(SuiteReport {
        name: "regular",
        cases,
    })
}
