//! Parameter bridge between the random cluster model, the symmetric two-spin
//! model and the extended Ising model, with every step exposed as a checkable
//! residual.
//!
//! The chain is exact on finite graphs:
//! `log Z^(2) = log Z(psi, psibar) = n * pfx_vertex + |E| * pfx_edge + log Z^eIsing`.

use thiserror::Error;

use crate::exact::{self, EIsingParams, ExactError, TwoSpinWeights};
use crate::graphs::Graph;

#[derive(Debug, Error, PartialEq)]
pub enum MappingError {
    #[error("q = {0} outside the valid range (need q > 1)")]
    InvalidQ(f64),
    #[error("weights must be strictly positive")]
    Positivity,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Two-spin weights of the rank-2 sum: `psi(+,+) = 1 + w`, `psi(+,-) = 1`,
/// `psi(-,-) = 1 + w/(q-1)`, `psibar(+) = 1`, `psibar(-) = (q-1) e^{-B}`.
pub fn rc_to_two_spin(q: f64, w: f64, b: f64) -> Result<TwoSpinWeights, MappingError> {
    if q <= 1.0 + 1e-12 {
        return Err(MappingError::InvalidQ(q));
    }
    if !(w >= 0.0) {
        return Err(MappingError::Positivity);
    }
    TwoSpinWeights::new(
        1.0 + w,
        1.0,
        1.0 + w / (q - 1.0),
        1.0,
        (q - 1.0) * (-b).exp(),
    )
    .map_err(|_| MappingError::Positivity)
}

/// The extended Ising reformulation of a two-spin model, together with the
/// exact prefactors that make the identity
/// `Z(psi, psibar) = e^{n * pfx_vertex} e^{|E| * pfx_edge} Z^eIsing` hold.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedModel {
    pub two_spin: TwoSpinWeights,
    pub eising: EIsingParams,
    /// Constant per-edge factor `B_0`; equals `beta*` for weights that come
    /// from the random cluster mapping (where `psi(+,-) = 1`).
    pub b0: f64,
    /// `log` of the per-vertex prefactor, `(1/2) log(psibar(+) psibar(-))`.
    pub log_prefactor_per_vertex: f64,
    /// `log` of the per-edge prefactor, `B_0`.
    pub log_prefactor_per_edge: f64,
    /// Advisory: the source `q` was in (1, 2), where the mapping is finite
    /// but the sandwich/Bethe theorems do not apply.
    pub below_q2: bool,
}

/// Solves `psi(sigma, sigma') = e^{B0} e^{beta* sigma sigma'} e^{k(sigma + sigma')}`
/// and `psibar(sigma) = (psibar(+) psibar(-))^{1/2} e^{h sigma}` for
/// `(beta*, k, h, B0)`.
pub fn two_spin_to_eising(ws: &TwoSpinWeights) -> Result<MappedModel, MappingError> {
    let h = 0.5 * (ws.psibar_p / ws.psibar_m).ln();
    let k = 0.25 * (ws.psi_pp / ws.psi_mm).ln();
    let beta = 0.25 * (ws.psi_pp * ws.psi_mm / (ws.psi_pm * ws.psi_pm)).ln();
    let b0 = 0.25 * (ws.psi_pp * ws.psi_pm * ws.psi_pm * ws.psi_mm).ln();
    let eising = EIsingParams::new(beta, k, h)?;
    Ok(MappedModel {
        two_spin: *ws,
        eising,
        b0,
        log_prefactor_per_vertex: 0.5 * (ws.psibar_p * ws.psibar_m).ln(),
        log_prefactor_per_edge: b0,
        below_q2: false,
    })
}

/// Full bridge from random cluster parameters. The mapped parameters are
/// computed directly in log space from `(q, w, B)` rather than through the
/// intermediate weights, which keeps them accurate at extreme fields; the two
/// paths agree to float rounding and are tested against each other.
pub fn rc_to_eising(q: f64, w: f64, b: f64) -> Result<MappedModel, MappingError> {
    let two_spin = rc_to_two_spin(q, w, b)?;
    let ln_in = w.ln_1p(); // log(1 + w)
    let ln_out = (w / (q - 1.0)).ln_1p(); // log(1 + w/(q-1))
    let beta = 0.25 * (ln_in + ln_out);
    let k = 0.25 * (ln_in - ln_out);
    let h = 0.5 * (b - (q - 1.0).ln());
    let eising = EIsingParams::new(beta, k, h)?;
    Ok(MappedModel {
        two_spin,
        eising,
        b0: beta,
        log_prefactor_per_vertex: 0.5 * ((q - 1.0).ln() - b),
        log_prefactor_per_edge: beta,
        below_q2: q < 2.0,
    })
}

/// Residuals of the exact identity chain on one graph: the distance from
/// `log Z^(2)` to the assembled extended-Ising route and to the two-spin
/// route. Both must vanish to enumeration accuracy.
#[derive(Debug, Clone, Copy)]
pub struct IdentityResiduals {
    /// `|log Z^(2) - (n * pfx_vertex + |E| * pfx_edge + log Z^eIsing)|`
    pub eising_route: f64,
    /// `|log Z^(2) - log Z(psi, psibar)|`
    pub two_spin_route: f64,
}

pub fn assemble_identities(
    g: &Graph,
    q: f64,
    w: f64,
    b: f64,
) -> Result<IdentityResiduals, MappingError> {
    let mapped = rc_to_eising(q, w, b)?;
    let p = exact::RCParams::new(q, w, b)?;
    let log_z2 = exact::rank2_partition(g, &p)?.ln();
    let log_two_spin = exact::two_spin_partition(g, &mapped.two_spin)?.ln();
    let log_eising = exact::eising_partition(g, &mapped.eising)?.ln();
    let assembled = g.n() as f64 * mapped.log_prefactor_per_vertex
        + g.m() as f64 * mapped.log_prefactor_per_edge
        + log_eising;
    Ok(IdentityResiduals {
        eising_route: (log_z2 - assembled).abs(),
        two_spin_route: (log_z2 - log_two_spin).abs(),
    })
}
