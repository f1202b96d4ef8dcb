//! Cross-module randomized invariants that sit beside the acceptance gate:
//! smoothness of the pressure away from the critical curve, and agreement of
//! the two independent first-order diagnostics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rc_lab::regular::{self, RegularModel, DERIVATIVE_STEP};

#[test]
fn pressure_is_differentiable_off_the_curve() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    while checked < 50 {
        let q = rng.gen_range(2.0..=6.0);
        let d = rng.gen_range(3..=5usize);
        let b = rng.gen_range(0.0..=2.0);
        let w = rng.gen_range(0.05..=5.0);
        // stay clearly away from the curve (and from w = 0, where only the
        // right derivative exists)
        let near_curve = match regular::critical_w(b, q, d) {
            Ok(wc) => (w - wc).abs() < 0.05,
            Err(_) => false,
        };
        if near_curve {
            continue;
        }
        let probe = regular::transition_probe_at(q, d, b, w, DERIVATIVE_STEP).unwrap();
        worst = worst.max(probe.gap.abs());
        assert!(
            probe.gap.abs() < 1e-5,
            "q={q} d={d} w={w} B={b}: one-sided derivatives differ by {}",
            probe.gap
        );
        checked += 1;
    }
    println!("off-curve differentiability: 50 points, worst gap {worst:.2e}");
}

#[test]
fn derivative_gap_and_magnetization_diagnostics_agree() {
    // on the curve the verdict must match the analytic condition
    // beta*(w_c(B)) > beta_c together with a strictly split maximiser
    let model = RegularModel::new(4.0, 3).unwrap();
    let b_plus = model.b_plus().unwrap();
    let beta_c = regular::ising_critical_beta(3);
    // six points strictly inside [0, B_+), six clearly beyond it
    let inside = (0..6).map(|i| b_plus * i as f64 / 6.5);
    let outside = (1..=6).map(|i| b_plus + 0.03 + 0.04 * i as f64);
    for (expect_first_order, b) in inside
        .map(|b| (true, b))
        .chain(outside.map(|b| (false, b)))
    {
        let w_c = model.critical_w(b).unwrap();
        let probe = model.probe(b, DERIVATIVE_STEP).unwrap();
        let beta_star = 0.25 * regular::g_of_w(w_c, 4.0).ln();
        let analytic = beta_star > beta_c && probe.magnetization_jump > 1e-6;
        assert_eq!(
            probe.first_order, analytic,
            "B={b}: gap {} vs beta* {} (beta_c {beta_c}), jump {}",
            probe.gap, beta_star, probe.magnetization_jump
        );
        assert_eq!(
            probe.first_order, expect_first_order,
            "B={b} relative to B_+={b_plus}: gap {}",
            probe.gap
        );
    }
}
