//! Pressure and phase diagram for the random cluster model on locally
//! tree-like `d`-regular graphs.
//!
//! The Ising pressure is the variational formula
//! `phi(beta, z) = beta d / 2 + sup_t [H(t) + d F_b(t) + z (2t - 1)]` with
//! `b = e^{-2 beta}` and `F_b(t)` an integral of `log f_b`; the random
//! cluster pressure follows by composing it with the parameter mapping. The
//! critical curve is where the effective field `z = k d + h` changes sign
//! while the coupling is supercritical, and the transition probe measures the
//! resulting jump of the `w`-derivative numerically.

use thiserror::Error;

use crate::mapping::{self, MappingError};
use crate::num::xlogx;

#[derive(Debug, Error, PartialEq)]
pub enum RegularError {
    #[error("argument {name} = {value} outside the valid domain")]
    Domain { name: &'static str, value: f64 },
    #[error("adaptive quadrature failed to reach the requested tolerance")]
    QuadratureFailure,
    #[error("singular point: x^(2/d) = q - 1 at x = {0}")]
    Singularity(f64),
    #[error("no sign change in the bracketing interval")]
    RootNotBracketed,
    #[error(transparent)]
    Mapping(#[from] MappingError),
}

/// `f_b(s) = (b(1-2s) + sqrt(1 + (b^2-1)(1-2s)^2)) / (2(1-s))` on `[0, 1/2]`.
pub fn f_kernel(s: f64, b: f64) -> Result<f64, RegularError> {
    if !(0.0..=0.5).contains(&s) {
        return Err(RegularError::Domain { name: "s", value: s });
    }
    if !(b > 0.0) {
        return Err(RegularError::Domain { name: "b", value: b });
    }
    let u = 1.0 - 2.0 * s;
    Ok((b * u + (1.0 + (b * b - 1.0) * u * u).sqrt()) / (2.0 * (1.0 - s)))
}

pub const QUAD_TOL: f64 = 1e-11;

/// `F_b(t) = integral of log f_b(s) ds from 0 to min(t, 1-t)`, by adaptive
/// Simpson quadrature to absolute tolerance `tol`.
pub fn kernel_integral_with_tol(t: f64, b: f64, tol: f64) -> Result<f64, RegularError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(RegularError::Domain { name: "t", value: t });
    }
    if b == 1.0 {
        return Ok(0.0); // integrand is identically zero
    }
    let upper = t.min(1.0 - t);
    if upper == 0.0 {
        return Ok(0.0);
    }
    let f = |s: f64| f_kernel(s, b).map(|v| v.ln());
    adaptive_simpson(&f, 0.0, upper, tol)
}

pub fn kernel_integral(t: f64, b: f64) -> Result<f64, RegularError> {
    kernel_integral_with_tol(t, b, QUAD_TOL)
}

fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64, RegularError>
where
    F: Fn(f64) -> Result<f64, RegularError>,
{
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64, RegularError>
where
    F: Fn(f64) -> Result<f64, RegularError>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol {
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(RegularError::QuadratureFailure);
    }
    let half = 0.5 * tol;
    Ok(simpson_step(f, a, m, fa, flm, fm, left, half, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, half, depth - 1)?)
}

/// Prefix integrals of `log f_b` on a uniform grid over `[0, 1/2]`, so a
/// dense scan of the variational objective costs one quadrature pass instead
/// of one per grid point. Off-grid values add a short adaptive tail.
struct KernelTable {
    b: f64,
    step: f64,
    prefix: Vec<f64>,
    tol: f64,
}

impl KernelTable {
    fn build(b: f64, cells: usize, tol: f64) -> Result<Self, RegularError> {
        let step = 0.5 / cells as f64;
        let mut prefix = Vec::with_capacity(cells + 1);
        prefix.push(0.0);
        if b != 1.0 {
            let f = |s: f64| f_kernel(s, b).map(|v| v.ln());
            let seg_tol = (tol * step / 0.5).max(1e-16);
            let mut acc = 0.0;
            for i in 0..cells {
                let a = i as f64 * step;
                acc += adaptive_simpson(&f, a, a + step, seg_tol)?;
                prefix.push(acc);
            }
        } else {
            prefix.resize(cells + 1, 0.0);
        }
        Ok(KernelTable { b, step, prefix, tol })
    }

    /// `F_b(t)` for `t` in `[0, 1]`.
    fn eval(&self, t: f64) -> Result<f64, RegularError> {
        if self.b == 1.0 {
            return Ok(0.0);
        }
        let upper = t.min(1.0 - t).clamp(0.0, 0.5);
        let idx = ((upper / self.step) as usize).min(self.prefix.len() - 2);
        let base = idx as f64 * self.step;
        let head = self.prefix[idx];
        if upper - base < 1e-15 {
            return Ok(head);
        }
        let f = |s: f64| f_kernel(s, self.b).map(|v| v.ln());
        Ok(head + adaptive_simpson(&f, base, upper, self.tol.max(1e-15))?)
    }
}

/// Maximiser data of the variational objective.
#[derive(Debug, Clone, Copy)]
pub struct VariationalSolution {
    pub t_star: f64,
    /// `sup_t G(beta, z, t)`.
    pub value: f64,
    pub beta: f64,
    pub z: f64,
}

const GRID_CELLS: usize = 2000;
const GOLDEN_T_TOL: f64 = 1e-12;

/// Global maximum of `G(beta, z, t) = H(t) + d F_b(t) + z(2t - 1)` over
/// `t` in `[0, 1]`: dense grid scan, golden-section refinement around every
/// grid-local peak, with a tie at `z = 0` resolved to the `t >= 1/2` branch.
pub fn variational_max(beta: f64, z: f64, d: usize) -> Result<VariationalSolution, RegularError> {
    variational_max_with_tol(beta, z, d, QUAD_TOL)
}

pub fn variational_max_with_tol(
    beta: f64,
    z: f64,
    d: usize,
    quad_tol: f64,
) -> Result<VariationalSolution, RegularError> {
    if !(beta >= 0.0) {
        return Err(RegularError::Domain {
            name: "beta",
            value: beta,
        });
    }
    let b = (-2.0 * beta).exp();
    let table = KernelTable::build(b, 1000, quad_tol)?;
    let objective = |t: f64| -> Result<f64, RegularError> {
        let entropy = -xlogx(t) - xlogx(1.0 - t);
        Ok(entropy + d as f64 * table.eval(t)? + z * (2.0 * t - 1.0))
    };
    let n = GRID_CELLS + 1;
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        values.push(objective(i as f64 / GRID_CELLS as f64)?);
    }
    // refine every grid-local peak; G can be bimodal near criticality and
    // missing the global peak would corrupt the phase diagram
    let mut candidates: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        let left_ok = i == 0 || values[i] >= values[i - 1];
        let right_ok = i == n - 1 || values[i] >= values[i + 1];
        if left_ok && right_ok {
            let lo = if i == 0 { 0.0 } else { (i - 1) as f64 / GRID_CELLS as f64 };
            let hi = if i == n - 1 {
                1.0
            } else {
                (i + 1) as f64 / GRID_CELLS as f64
            };
            candidates.push(golden_max(&objective, lo, hi)?);
        }
    }
    let best = candidates
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    // ties (the symmetric double peak at z = 0) resolve to the upper branch
    let (t_star, value) = candidates
        .into_iter()
        .filter(|&(_, v)| v >= best - 1e-12)
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .expect("grid scan always yields at least one candidate");
    Ok(VariationalSolution {
        t_star,
        value,
        beta,
        z,
    })
}

fn golden_max<F>(f: &F, mut a: f64, mut b: f64) -> Result<(f64, f64), RegularError>
where
    F: Fn(f64) -> Result<f64, RegularError>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > GOLDEN_T_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let mid = 0.5 * (a + b);
    Ok((mid, f(mid)?))
}

/// The two maximiser branches at `z = 0`: `t_{beta,0+} >= 1/2` and its mirror
/// `t_{beta,0-} = 1 - t_{beta,0+}`. They coincide at 1/2 below the Ising
/// critical coupling `beta_c = log(d/(d-2)) / 2`.
pub fn maximizer_branches(beta: f64, d: usize) -> Result<(f64, f64), RegularError> {
    let sol = variational_max(beta, 0.0, d)?;
    Ok((sol.t_star, 1.0 - sol.t_star))
}

pub fn ising_critical_beta(d: usize) -> f64 {
    0.5 * (d as f64 / (d as f64 - 2.0)).ln()
}

/// Ising pressure per particle on the d-regular tree-like limit:
/// `beta d / 2 + sup_t G(beta, z, t)`.
pub fn ising_pressure(beta: f64, z: f64, d: usize) -> Result<f64, RegularError> {
    Ok(beta * d as f64 / 2.0 + variational_max(beta, z, d)?.value)
}

pub fn ising_pressure_with_tol(
    beta: f64,
    z: f64,
    d: usize,
    quad_tol: f64,
) -> Result<f64, RegularError> {
    Ok(beta * d as f64 / 2.0 + variational_max_with_tol(beta, z, d, quad_tol)?.value)
}

/// Effective Ising field of the mapped random cluster model on a d-regular
/// graph: `z = k d + h`.
pub fn effective_field(q: f64, w: f64, b: f64, d: usize) -> Result<f64, RegularError> {
    let m = mapping::rc_to_eising(q, w, b)?;
    Ok(m.eising.k * d as f64 + m.eising.h)
}

/// Random cluster pressure per particle on locally tree-like d-regular
/// graphs: `beta* d / 2 + log(e^{-B}(q-1)) / 2 + phi^Ising(beta*, k d + h)`.
pub fn rc_pressure(q: f64, w: f64, b: f64, d: usize) -> Result<f64, RegularError> {
    rc_pressure_with_tol(q, w, b, d, QUAD_TOL)
}

pub fn rc_pressure_with_tol(
    q: f64,
    w: f64,
    b: f64,
    d: usize,
    quad_tol: f64,
) -> Result<f64, RegularError> {
    if q < 2.0 {
        return Err(RegularError::Domain { name: "q", value: q });
    }
    if !(w >= 0.0) {
        return Err(RegularError::Domain { name: "w", value: w });
    }
    if !(b >= 0.0) {
        return Err(RegularError::Domain { name: "B", value: b });
    }
    if d < 3 {
        return Err(RegularError::Domain {
            name: "d",
            value: d as f64,
        });
    }
    let m = mapping::rc_to_eising(q, w, b)?;
    let z = m.eising.k * d as f64 + m.eising.h;
    Ok(m.eising.beta * d as f64 / 2.0
        + m.log_prefactor_per_vertex
        + ising_pressure_with_tol(m.eising.beta, z, d, quad_tol)?)
}

/// `ell_{q,d}(x) = (x^{2/d} - 1) / (1 - x^{2/d}/(q-1))` for `x > 0`.
pub fn ell_qd(x: f64, q: f64, d: usize) -> Result<f64, RegularError> {
    if !(x > 0.0) {
        return Err(RegularError::Domain { name: "x", value: x });
    }
    let t = x.powf(2.0 / d as f64);
    let denom = 1.0 - t / (q - 1.0);
    if denom.abs() < 1e-12 {
        return Err(RegularError::Singularity(x));
    }
    Ok((t - 1.0) / denom)
}

/// The critical curve height `w_c(B) = ell_{q,d}((q-1) e^{-B})`. At
/// `q = 2, B = 0` the formula is 0/0; evaluate in the limit via
/// `q = 2 + epsilon` (the curve proper is defined for `q > 2`).
pub fn critical_w(b: f64, q: f64, d: usize) -> Result<f64, RegularError> {
    if !(b >= 0.0) {
        return Err(RegularError::Domain { name: "B", value: b });
    }
    ell_qd((q - 1.0) * (-b).exp(), q, d)
}

/// `g(w) = (1 + w)(1 + w/(q-1)) = e^{4 beta*}`.
pub fn g_of_w(w: f64, q: f64) -> f64 {
    (1.0 + w) * (1.0 + w / (q - 1.0))
}

pub const B_PLUS_RESIDUAL: f64 = 1e-10;

/// The endpoint `B_+` of the first-order segment: the unique positive
/// solution of `g(w_c(B)) = (d/(d-2))^2`, found by bisection on
/// `[0, log(q-1)]` (at the right end `w_c = 0` and `g = 1`).
pub fn find_b_plus(q: f64, d: usize) -> Result<f64, RegularError> {
    if q <= 2.0 {
        return Err(RegularError::Domain { name: "q", value: q });
    }
    if d < 3 {
        return Err(RegularError::Domain {
            name: "d",
            value: d as f64,
        });
    }
    let target = (d as f64 / (d as f64 - 2.0)).powi(2);
    let h = |b: f64| -> Result<f64, RegularError> { Ok(g_of_w(critical_w(b, q, d)?, q) - target) };
    let mut lo = 0.0;
    let mut hi = (q - 1.0).ln();
    if h(lo)? <= 0.0 {
        return Err(RegularError::RootNotBracketed);
    }
    // h(hi) = 1 - target < 0 always; bisect until the residual is pinned
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let val = h(mid)?;
        if val.abs() < B_PLUS_RESIDUAL {
            return Ok(mid);
        }
        if val > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(RegularError::RootNotBracketed)
}

/// A cluster model on the d-regular tree-like limit: `q >= 2`, `d >= 3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularModel {
    q: f64,
    d: usize,
}

impl RegularModel {
    pub fn new(q: f64, d: usize) -> Result<Self, RegularError> {
        if q < 2.0 {
            return Err(RegularError::Domain { name: "q", value: q });
        }
        if d < 3 {
            return Err(RegularError::Domain {
                name: "d",
                value: d as f64,
            });
        }
        Ok(RegularModel { q, d })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn pressure(&self, w: f64, b: f64) -> Result<f64, RegularError> {
        rc_pressure(self.q, w, b, self.d)
    }

    pub fn critical_w(&self, b: f64) -> Result<f64, RegularError> {
        critical_w(b, self.q, self.d)
    }

    pub fn b_plus(&self) -> Result<f64, RegularError> {
        find_b_plus(self.q, self.d)
    }

    pub fn probe(&self, b: f64, step: f64) -> Result<PhasePoint, RegularError> {
        transition_probe(self.q, self.d, b, step)
    }

    pub fn probe_at(&self, b: f64, w: f64, step: f64) -> Result<PhasePoint, RegularError> {
        transition_probe_at(self.q, self.d, b, w, step)
    }
}

/// One-sided derivative data of `w -> phi(w, B)` at a probe point.
#[derive(Debug, Clone, Copy)]
pub struct PhasePoint {
    pub w: f64,
    pub b: f64,
    pub phi: f64,
    pub dphi_dw_minus: f64,
    pub dphi_dw_plus: f64,
    /// `dphi_dw_plus - dphi_dw_minus`.
    pub gap: f64,
    pub first_order: bool,
    /// Envelope diagnostic `2 t_{beta*,0+} - 1`: the jump of the z-derivative
    /// of the Ising pressure at the probe coupling.
    pub magnetization_jump: f64,
}

pub const GAP_THRESHOLD: f64 = 1e-3;
pub const DERIVATIVE_STEP: f64 = 1e-4;

/// Probes the transition at `w = w_c(B)` (clipped at 0 when the curve has
/// fallen below the axis).
pub fn transition_probe(q: f64, d: usize, b: f64, step: f64) -> Result<PhasePoint, RegularError> {
    let w = critical_w(b, q, d)?.max(0.0);
    transition_probe_at(q, d, b, w, step)
}

/// Richardson-extrapolated one-sided derivatives of `w -> phi(w, B)` at `w`,
/// and the first-order verdict `|gap| > GAP_THRESHOLD`. At `w = 0` the left
/// derivative does not exist and both sides are taken from the right, so the
/// gap is zero by construction.
pub fn transition_probe_at(
    q: f64,
    d: usize,
    b: f64,
    w: f64,
    step: f64,
) -> Result<PhasePoint, RegularError> {
    if !(step > 0.0) {
        return Err(RegularError::Domain {
            name: "step",
            value: step,
        });
    }
    let step = if w > 0.0 { step.min(w / 4.0) } else { step };
    let phi0 = rc_pressure(q, w, b, d)?;
    let one_sided = |h: f64| -> Result<f64, RegularError> {
        // 2 D(h/2) - D(h) cancels the O(h) term of the one-sided difference
        let d1 = (rc_pressure(q, w + h, b, d)? - phi0) / h;
        let d2 = (rc_pressure(q, w + h / 2.0, b, d)? - phi0) / (h / 2.0);
        Ok(2.0 * d2 - d1)
    };
    let dphi_dw_plus = one_sided(step)?;
    let dphi_dw_minus = if w > 0.0 { one_sided(-step)? } else { dphi_dw_plus };
    let gap = dphi_dw_plus - dphi_dw_minus;
    let beta_star = 0.25 * g_of_w(w, q).ln();
    let (t_plus, _) = maximizer_branches(beta_star, d)?;
    Ok(PhasePoint {
        w,
        b,
        phi: phi0,
        dphi_dw_minus,
        dphi_dw_plus,
        gap,
        first_order: gap.abs() > GAP_THRESHOLD,
        magnetization_jump: 2.0 * t_plus - 1.0,
    })
}
