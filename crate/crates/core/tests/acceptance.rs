//! Acceptance suite: every criterion prints one pass/fail line and asserts
//! at its pinned tolerance. Run with `--nocapture` to see the lines:
//!
//! ```text
//! cargo test -p rc-lab --test acceptance -- --nocapture
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rc_lab::bethe::{self, BpOptions, SpinModel};
use rc_lab::exact::{self, RCParams};
use rc_lab::graphs::{self, Graph, GwSpec, OffspringDist};
use rc_lab::mapping;
use rc_lab::regular;

fn report(criterion: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn random_graph(rng: &mut ChaCha8Rng, n_max: usize, m_max: usize) -> Graph {
    let n = rng.gen_range(1..=n_max);
    let cap = (n * (n - 1) / 2).min(m_max);
    let m = rng.gen_range(0..=cap);
    graphs::gen_gnm(n, m, rng.gen()).unwrap()
}

#[test]
fn criterion_1_sandwich_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst_low = 0.0f64;
    let mut worst_high = 0.0f64;
    for trial in 0..200 {
        let g = random_graph(&mut rng, 10, 20);
        let p = RCParams::new(
            rng.gen_range(2.0..=6.0),
            rng.gen_range(0.0..=5.0),
            rng.gen_range(0.0..=3.0),
        )
        .unwrap();
        let r = exact::sandwich_check(&g, &p).unwrap();
        assert!(
            r.pass,
            "trial {trial}: sandwich failed on n={} m={} {p:?}: {r:?}",
            g.n(),
            g.m()
        );
        worst_low = worst_low.max(r.log_z2 - r.log_z);
        worst_high = worst_high.max(r.log_z - r.log_z2 - r.log_bound_gap);
    }
    report(
        "1 (sandwich bounds)",
        worst_low <= 1e-9 && worst_high <= 1e-9,
        &format!("200 trials, worst lower violation {worst_low:.2e}, worst upper {worst_high:.2e}"),
    );
}

#[test]
fn criterion_2_equality_chains() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let tol = 1e-10;

    // (a) forests: log Z = log Z^(2)
    let mut worst_a = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(2..=10);
        let tree = graphs::gen_random_tree(n, rng.gen()).unwrap();
        // drop some edges to get a general forest
        let edges: Vec<_> = tree
            .edges()
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(0.8))
            .collect();
        let g = Graph::new(n, edges).unwrap();
        let p = RCParams::new(
            rng.gen_range(2.0..=6.0),
            rng.gen_range(0.0..=4.0),
            rng.gen_range(0.0..=3.0),
        )
        .unwrap();
        let z = exact::rc_partition(&g, &p).unwrap().ln();
        let z2 = exact::rank2_partition(&g, &p).unwrap().ln();
        worst_a = worst_a.max((z - z2).abs());
    }

    // (b) q = 2: log Z = log Z^(2) on all graphs
    let mut worst_b = 0.0f64;
    for _ in 0..100 {
        let g = random_graph(&mut rng, 10, 16);
        let p = RCParams::new(2.0, rng.gen_range(0.0..=4.0), rng.gen_range(0.0..=3.0)).unwrap();
        let z = exact::rc_partition(&g, &p).unwrap().ln();
        let z2 = exact::rank2_partition(&g, &p).unwrap().ln();
        worst_b = worst_b.max((z - z2).abs());
    }

    // (c) Potts partition function equals the field-shifted cluster sum
    let mut worst_c = 0.0f64;
    for _ in 0..100 {
        let q = [2u32, 3, 4][rng.gen_range(0..3)];
        let n_max = if q == 4 { 8 } else { 10 };
        let g = random_graph(&mut rng, n_max, 14);
        let w: f64 = rng.gen_range(0.0..=3.0);
        let b: f64 = rng.gen_range(-1.0..=2.0);
        let potts = exact::potts_partition(&g, q, (1.0 + w).ln(), b).unwrap().ln();
        let rc = exact::rc_partition(&g, &RCParams::new(q as f64, w, b).unwrap())
            .unwrap()
            .ln();
        worst_c = worst_c.max((potts - (b * g.n() as f64 + rc)).abs());
    }

    // (d) + (e) the two-spin / extended-Ising identity chain
    let mut worst_d = 0.0f64;
    let mut worst_e = 0.0f64;
    for _ in 0..100 {
        let g = random_graph(&mut rng, 10, 16);
        let r = mapping::assemble_identities(
            &g,
            rng.gen_range(2.0..=6.0),
            rng.gen_range(0.0..=4.0),
            rng.gen_range(0.0..=3.0),
        )
        .unwrap();
        worst_d = worst_d.max(r.eising_route);
        worst_e = worst_e.max(r.two_spin_route);
    }

    let pass = worst_a < tol && worst_b < tol && worst_c < tol && worst_d < tol && worst_e < tol;
    report(
        "2 (equality chains)",
        pass,
        &format!(
            "worst residuals: forest {worst_a:.2e}, q=2 {worst_b:.2e}, potts {worst_c:.2e}, \
             eising {worst_d:.2e}, two-spin {worst_e:.2e}"
        ),
    );
}

#[test]
fn criterion_3_pinned_values() {
    let triangle = Graph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
    let edge = Graph::new(2, vec![(0, 1)]).unwrap();

    let p3 = RCParams::new(3.0, 1.0, 0.0).unwrap();
    let z_tri = exact::rc_partition(&triangle, &p3).unwrap().ln();
    let z2_tri = exact::rank2_partition(&triangle, &p3).unwrap().ln();
    let l_tri = graphs::cyclic_components_max(&triangle).unwrap();

    let p2 = RCParams::new(2.0, 1.0, 0.0).unwrap();
    let z_edge = exact::rc_partition(&edge, &p2).unwrap().ln();
    let z2_edge = exact::rank2_partition(&edge, &p2).unwrap().ln();

    let rel = |got: f64, want: f64| ((got - want) / want).abs();
    let pass = rel(z_tri, 66f64.ln()) < 1e-12
        && rel(z2_tri, 65f64.ln()) < 1e-12
        && l_tri == 1
        && rel(z_edge, 6f64.ln()) < 1e-12
        && rel(z2_edge, 6f64.ln()) < 1e-12;
    report(
        "3 (pinned values)",
        pass,
        &format!(
            "triangle Z = {:.12}, Z2 = {:.12}, L = {l_tri}; edge Z = {:.12}",
            z_tri.exp(),
            z2_tri.exp(),
            z_edge.exp()
        ),
    );
}

#[test]
fn criterion_4_bethe_lower_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let opts = BpOptions::default();

    // loopy graphs: every converged fixed point is a lower bound
    let mut worst_gap = f64::NEG_INFINITY;
    for trial in 0..100 {
        let n = rng.gen_range(4..=12);
        let m = (n + rng.gen_range(0..=6)).min(n * (n - 1) / 2).min(18);
        let g = graphs::gen_gnm(n, m, rng.gen()).unwrap();
        let (q, w, b) = (
            rng.gen_range(2.0..=5.0),
            rng.gen_range(0.0..=4.0),
            rng.gen_range(0.0..=2.0),
        );
        let ws = mapping::rc_to_two_spin(q, w, b).unwrap();
        let bm = match bethe::bethe_max(&g, &SpinModel::TwoSpin(ws), 2, rng.gen(), &opts) {
            Ok(bm) => bm,
            Err(bethe::BetheError::NoConvergedRun) => continue,
            Err(e) => panic!("trial {trial}: {e}"),
        };
        let z2 = exact::two_spin_partition(&g, &ws).unwrap().ln();
        let z = exact::rc_partition(&g, &RCParams::new(q, w, b).unwrap()).unwrap().ln();
        for &v in &bm.values {
            worst_gap = worst_gap.max(v - z2);
            assert!(v <= z2 + 1e-8, "trial {trial}: bethe {v} > two-spin {z2}");
            assert!(v <= z + 1e-8, "trial {trial}: bethe {v} > exact {z}");
        }
    }

    // trees: equality
    let mut worst_tree = 0.0f64;
    for trial in 0..100 {
        let n = rng.gen_range(2..=10);
        let t = graphs::gen_random_tree(n, rng.gen()).unwrap();
        let ws = mapping::rc_to_two_spin(
            rng.gen_range(2.0..=5.0),
            rng.gen_range(0.0..=4.0),
            rng.gen_range(0.0..=2.0),
        )
        .unwrap();
        let model = SpinModel::TwoSpin(ws);
        let run = bethe::bp_run(&t, &model, bethe::InitMode::Uniform, &opts);
        assert!(run.converged, "tree trial {trial} did not converge");
        let eval = bethe::BetheEvaluation::from_state(&t, &model, &run.state).unwrap();
        let z = exact::two_spin_partition(&t, &ws).unwrap().ln();
        worst_tree = worst_tree.max((eval.log_z_bethe - z).abs());
    }

    report(
        "4 (Bethe lower bound)",
        worst_gap <= 1e-8 && worst_tree < 1e-8,
        &format!("worst fixed-point excess {worst_gap:.2e}, worst tree gap {worst_tree:.2e}"),
    );
}

#[test]
fn criterion_5_regular_anchors() {
    // phi_ising(0, z, d) = log(2 cosh z)
    let mut worst_free = 0.0f64;
    for d in [3usize, 5] {
        for i in 0..=24 {
            let z = -3.0 + 0.25 * i as f64;
            let got = regular::ising_pressure(0.0, z, d).unwrap();
            worst_free = worst_free.max((got - (2.0 * z.cosh()).ln()).abs());
        }
    }

    // phi_rc(q, 0, B, d) = log(1 + (q-1) e^{-B})
    let mut worst_w0 = 0.0f64;
    for (q, b, d) in [
        (2.0, 0.0, 3),
        (3.0, 0.5, 3),
        (4.0, 1.0, 4),
        (5.5, 2.0, 5),
        (2.5, 3.0, 3),
    ] {
        let got = regular::rc_pressure(q, 0.0, b, d).unwrap();
        worst_w0 = worst_w0.max((got - ((q - 1.0) * (-b).exp()).ln_1p()).abs());
    }

    // envelope: d phi / d z = 2 t* - 1 against central differences
    let mut worst_env = 0.0f64;
    for (beta, z, d) in [(0.3, 0.4, 3), (0.7, 0.2, 3), (0.5, -0.9, 4), (1.0, 1.5, 5)] {
        let sol = regular::variational_max(beta, z, d).unwrap();
        let h = 1e-5;
        let numeric = (regular::ising_pressure(beta, z + h, d).unwrap()
            - regular::ising_pressure(beta, z - h, d).unwrap())
            / (2.0 * h);
        worst_env = worst_env.max((numeric - (2.0 * sol.t_star - 1.0)).abs());
    }

    report(
        "5 (regular closed-form anchors)",
        worst_free < 1e-9 && worst_w0 < 1e-9 && worst_env < 1e-5,
        &format!("free {worst_free:.2e}, w=0 {worst_w0:.2e}, envelope {worst_env:.2e}"),
    );
}

#[test]
fn criterion_6_critical_curve() {
    let (q, d) = (4.0, 3);
    let b_plus = regular::find_b_plus(q, d).unwrap();
    let residual = (regular::g_of_w(regular::critical_w(b_plus, q, d).unwrap(), q) - 9.0).abs();

    let mut decreasing = true;
    let mut prev = f64::INFINITY;
    for i in 0..=100 {
        let b = b_plus * i as f64 / 100.0;
        let w = regular::critical_w(b, q, d).unwrap();
        decreasing &= w < prev;
        prev = w;
    }

    let mut min_gap = f64::INFINITY;
    let mut all_first_order = true;
    for i in 0..5 {
        let b = b_plus * i as f64 / 5.0;
        let probe = regular::transition_probe(q, d, b, regular::DERIVATIVE_STEP).unwrap();
        all_first_order &= probe.first_order && probe.gap > 1e-3;
        min_gap = min_gap.min(probe.gap);
    }

    let off_curve = regular::transition_probe(q, d, b_plus + 0.2, regular::DERIVATIVE_STEP).unwrap();
    let q2_probe = regular::transition_probe_at(2.0, d, 0.0, 2.0, regular::DERIVATIVE_STEP).unwrap();

    let ell_err = (regular::ell_qd(2.0, 3.0, 4).unwrap() - 2f64.sqrt()).abs();
    let limit_err = (regular::critical_w(0.0, 2.0 + 1e-6, 3).unwrap() - 2.0).abs();

    let pass = residual < 1e-10
        && decreasing
        && all_first_order
        && !off_curve.first_order
        && !q2_probe.first_order
        && ell_err < 1e-12
        && limit_err < 1e-4;
    report(
        "6 (critical curve)",
        pass,
        &format!(
            "B+ = {b_plus:.6} residual {residual:.2e}; min on-curve gap {min_gap:.3e}; \
             off-curve gap {:.2e}; q=2 gap {:.2e}; ell err {ell_err:.2e}; q->2 limit err {limit_err:.2e}",
            off_curve.gap, q2_probe.gap
        ),
    );
}

#[test]
fn criterion_7_consistency_triangle() {
    let (q, w, b, d) = (3.0, 1.0, 1.0, 3);
    let phi = regular::rc_pressure(q, w, b, d).unwrap();

    // (i) quenched finite-size means close in on the pressure
    let p = RCParams::new(q, w, b).unwrap();
    let mut gaps = Vec::new();
    for n in [8usize, 10, 12, 14, 16] {
        let mut sum = 0.0;
        for seed in 0..20u64 {
            let g = graphs::gen_random_regular(n, d, 1000 + seed).unwrap();
            sum += exact::rc_partition(&g, &p).unwrap().ln() / n as f64;
        }
        gaps.push((sum / 20.0 - phi).abs());
    }
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);

    // (ii) Bethe value per vertex on one large random regular graph
    let g = graphs::gen_random_regular(2000, d, 4242).unwrap();
    let ws = mapping::rc_to_two_spin(q, w, b).unwrap();
    let bm = bethe::bethe_max(&g, &SpinModel::TwoSpin(ws), 2, 7, &BpOptions::default()).unwrap();
    let bethe_gap = (bm.best / 2000.0 - phi).abs();

    // (iii) tree pressure against the variational Ising value; B = 2 keeps
    // the vertex fields strictly positive
    let m = mapping::rc_to_eising(q, w, 2.0).unwrap();
    let z = m.eising.k * d as f64 + m.eising.h;
    let est = bethe::tree_pressure(&GwSpec::regular(d), &m.eising, 30, 2000, 11).unwrap();
    let phi_ising = regular::ising_pressure(m.eising.beta, z, d).unwrap();
    let tree_gap = (est.estimate - phi_ising).abs();

    report(
        "7 (quenched/Bethe/tree consistency)",
        monotone && bethe_gap < 1e-3 && tree_gap < 2e-3,
        &format!(
            "finite-size gaps {:?} monotone {monotone}; bethe gap {bethe_gap:.2e}; tree gap {tree_gap:.2e}",
            gaps.iter().map(|g| format!("{g:.5}")).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_8_gks_bracket() {
    // deterministic 3-regular spec with the B = 2 mapped parameters
    let m = mapping::rc_to_eising(3.0, 1.0, 2.0).unwrap();
    let spec = GwSpec::regular(3);
    let mut widths = Vec::new();
    for depth in [5usize, 10, 20, 30] {
        let est = bethe::tree_pressure(&spec, &m.eising, depth, 1, 0).unwrap();
        assert!(est.bracket_width() >= -1e-12);
        widths.push(est.bracket_width());
    }
    let collapse = widths.windows(2).all(|w| w[1] <= w[0]) && widths[3] < 1e-6;

    // random offspring: ordering must hold for every sampled tree; fields
    // bounded below by k * d_min + h = 0.2
    let spec = GwSpec::new(
        OffspringDist::Tabulated(vec![0.0, 0.3, 0.4, 0.3]),
        OffspringDist::Tabulated(vec![0.2, 0.5, 0.3]),
    )
    .unwrap();
    let p = exact::EIsingParams::new(0.4, 0.05, 0.15).unwrap();
    let samples = bethe::tree_pressure_samples(&spec, &p, 8, 500, 21).unwrap();
    let per_tree_ordered = samples.iter().all(|&(free, plus)| free <= plus + 1e-12);
    let deep = bethe::tree_pressure(&spec, &p, 30, 50, 22).unwrap();

    report(
        "8 (GKS bracket)",
        collapse && per_tree_ordered && deep.bracket_width() < 1e-6,
        &format!(
            "regular widths {widths:?}; 500 sampled trees ordered {per_tree_ordered}; \
             random-spec width at depth 30 = {:.2e}",
            deep.bracket_width()
        ),
    );
}

#[test]
fn criterion_9_cycle_decomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut checked = 0;
    for trial in 0..50 {
        let n = rng.gen_range(4..=10);
        let m = rng.gen_range(0..=16.min(n * (n - 1) / 2));
        let g = graphs::gen_gnm(n, m, rng.gen()).unwrap();
        let l = graphs::cyclic_components_max(&g).unwrap();
        for k in [4usize, 5] {
            let sum: usize = (3..k)
                .map(|i| graphs::disjoint_cycles_max(&g, i).unwrap())
                .sum();
            // L <= n/k + sum, scaled by k to stay in integers
            assert!(
                k * l <= g.n() + k * sum,
                "trial {trial} k {k}: L = {l}, n = {}, sum = {sum}",
                g.n()
            );
            checked += 1;
        }
    }
    report(
        "9 (cycle decomposition bound)",
        checked == 100,
        &format!("{checked} integer inequalities verified"),
    );
}
