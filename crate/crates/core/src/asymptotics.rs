//! Opaque-barrier limits and standard-QM reference formulas.
//!
//! For `b → ∞` the lattice time approaches `Γ^N ≈ τ_α + (N−1) s w_α` with
//! `w_α = 1/(2k) − 1/(α D_α k_α^{α−1})`; `w_α` vanishes at `α = 2` and is
//! negative for `1 < α < 2`, so the time shrinks with every added barrier.

use serde::{Deserialize, Serialize};

use crate::barrier::unit_cell;
use crate::error::Result;
use crate::ext::ExtFloat;
use crate::params::{derivatives, wavenumbers, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPrediction {
    pub w_alpha: f64,
    /// `(N−1) s w_α`, the predicted large-width value of `Γ^N − τ_α`.
    pub predicted_gap: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    /// `1/(qk)`; only defined for `α = 2`.
    pub tau_qm_limit: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FCoefficients {
    /// Literal `f₁`: `4ε₊cosβ + {8 + ε₊² + ε₋² + (ε₊² − ε₋²)cos2β}/32`.
    pub f1: f64,
    /// Leading `e^{2ξ}` coefficient of `v_α` from expanding `cosh`/`sinh`:
    /// `ε₊cosβ/4 + {8 + ε₊² + ε₋² + (ε₊² − ε₋²)cos2β}/32`.
    pub f1_expansion: f64,
    pub f2: f64,
    pub f3: f64,
    /// `v_α e^{−2ξ}` at the width of the supplied parameters.
    pub measured_v_prefactor: f64,
    /// `v′_α e^{−2ξ}` at the width of the supplied parameters (compare with `f₂ + b f₃`).
    pub measured_vprime_prefactor: f64,
}

impl FCoefficients {
    /// The `f₁` to report: the literal form when `paper_verbatim`, the expansion otherwise.
    pub fn f1_selected(&self, paper_verbatim: bool) -> f64 {
        if paper_verbatim {
            self.f1
        } else {
            self.f1_expansion
        }
    }
}

pub fn w_alpha(p: &ModelParams) -> Result<f64> {
    let fq = wavenumbers(p)?;
    Ok(1.0 / (2.0 * fq.k) - 1.0 / (p.alpha * p.d_alpha * fq.k_alpha.powf(p.alpha - 1.0)))
}

/// Predicted large-width `Γ^N` given the measured single-barrier plateau `tau_limit`.
pub fn gamma_limit(p: &ModelParams, tau_limit: f64) -> Result<f64> {
    let w = w_alpha(p)?;
    Ok(tau_limit + (p.n_barriers as f64 - 1.0) * p.s() * w)
}

pub fn f_coefficients(p: &ModelParams) -> Result<FCoefficients> {
    let fq = wavenumbers(p)?;
    let fd = derivatives(p)?;
    let (ep, em) = (fq.eps_plus, fq.eps_minus);
    let (sb, cb) = fq.beta.sin_cos();
    let bracket = (8.0 + ep * ep + em * em + (ep * ep - em * em) * (2.0 * fq.beta).cos()) / 32.0;
    let f1 = 4.0 * ep * cb + bracket;
    let f1_expansion = 0.25 * ep * cb + bracket;
    let f2 = (2.0 * fd.deps_plus * cb + em * fd.deps_minus * sb * sb + ep * fd.deps_plus * cb * cb)
        / 8.0;
    let f3 = fd.dq_alpha * fq.gamma_ang.sin() / 8.0
        * (4.0 * ep * cb + ep * ep * cb * cb + em * em * sb * sb + 4.0);

    let cell = unit_cell(p)?;
    let scale = ExtFloat::exp(-2.0 * fq.xi);
    Ok(FCoefficients {
        f1,
        f1_expansion,
        f2,
        f3,
        measured_v_prefactor: (cell.v_alpha * scale).to_f64(),
        measured_vprime_prefactor: (cell.v_alpha_prime * scale).to_f64(),
    })
}

pub fn predict(p: &ModelParams) -> Result<AsymptoticPrediction> {
    let w = w_alpha(p)?;
    let f = f_coefficients(p)?;
    let tau_qm_limit = if p.alpha == 2.0 {
        Some(std_qm_tau_limit(p)?)
    } else {
        None
    };
    Ok(AsymptoticPrediction {
        w_alpha: w,
        predicted_gap: (p.n_barriers as f64 - 1.0) * p.s() * w,
        f1: f.f1,
        f2: f.f2,
        f3: f.f3,
        tau_qm_limit,
    })
}

/// Standard-QM single-barrier phase time `d/dE atan((k²−q²)/(2kq) tanh qb)`,
/// differentiated analytically. The Lévy index of `p` is ignored.
pub fn std_qm_tau(p: &ModelParams) -> Result<f64> {
    p.validate_geometry()?;
    let (e, v) = (p.energy, p.v_height);
    let kq = (e * (v - e)).sqrt();
    let q = (v - e).sqrt();
    let c = (2.0 * e - v) / (2.0 * kq);
    let dc = v * v / (4.0 * kq.powi(3));
    let qb = q * p.b;
    let th = qb.tanh();
    let sech2 = 1.0 / qb.cosh().powi(2);
    let dq = -0.5 / q;
    let g = c * th;
    let dg = dc * th + c * p.b * dq * sech2;
    Ok(dg / (1.0 + g * g))
}

/// Opaque-barrier Hartman limit `1/(qk)`.
pub fn std_qm_tau_limit(p: &ModelParams) -> Result<f64> {
    p.validate_geometry()?;
    Ok(1.0 / (p.energy * (p.v_height - p.energy)).sqrt())
}
