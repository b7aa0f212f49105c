//! Single rectangular barrier (unit cell) amplitude and phase data.
//!
//! The inverse transmission amplitude of one barrier is written as
//! `M₁ = √v_α · e^{−iδ}` with `δ = θ − k_α b`. `v_α`, `θ` and the analytic
//! energy derivatives (`v′_α = v_{1α} + b q′_α v_{2α}`, `δ′ = d_α/v_α − b k′_α`)
//! are evaluated from their closed forms in terms of `ε_±`, `β`, `γ`, `η`, `ξ`.
//!
//! Every `cosh`/`sinh` of `ξ` or `2ξ` goes through [`ExtFloat`], so widths far
//! beyond the `f64` overflow point (`ξ ≈ 355`) are handled; only ratios such
//! as `d_α / v_α` are converted back to `f64`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TunnelError};
use crate::ext::ExtFloat;
use crate::params::{
    derivatives, wavenumbers, FracDerivatives, FracQuantities, FreePassage, ModelParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitCell {
    /// `|M₁|²`, the inverse single-barrier transmission probability.
    pub v_alpha: ExtFloat,
    pub theta: f64,
    pub delta: f64,
    pub d_alpha: ExtFloat,
    pub v1_alpha: ExtFloat,
    pub v2_alpha: ExtFloat,
    pub v_alpha_prime: ExtFloat,
    pub delta_prime: f64,
    pub tau_alpha: f64,
}

impl UnitCell {
    /// `M₁ = √v_α e^{−iδ}` in plain `f64`; overflows for very opaque barriers.
    pub fn m1(&self) -> Complex64 {
        Complex64::from_polar(self.v_alpha.sqrt().to_f64(), -self.delta)
    }

    /// Single-barrier transmission probability `1/v_α`.
    pub fn trans_prob(&self) -> f64 {
        (ExtFloat::ONE / self.v_alpha).to_f64()
    }
}

/// Inverse of the free-passage velocity for the given convention.
pub(crate) fn inverse_free_velocity(
    conv: FreePassage,
    fq: &FracQuantities,
    fd: &FracDerivatives,
) -> f64 {
    match conv {
        FreePassage::Standard => 1.0 / (2.0 * fq.k),
        FreePassage::Fractional => fd.dk_alpha,
    }
}

/// `v_α` from its sixteen-term bracket.
fn v_alpha(fq: &FracQuantities) -> ExtFloat {
    let (ep, em, beta) = (fq.eps_plus, fq.eps_minus, fq.beta);
    let (ep2, em2) = (ep * ep, em * em);
    let c2b = (2.0 * beta).cos();
    let cos_coef = 8.0 - em2 - ep2 - (ep2 - em2) * c2b;
    let cosh_coef = 8.0 + em2 + ep2 + (ep2 - em2) * c2b;
    let ch2 = ExtFloat::cosh(2.0 * fq.xi);
    let sh2 = ExtFloat::sinh(2.0 * fq.xi);
    (ExtFloat::from(cos_coef * (2.0 * fq.eta).cos())
        + ch2 * cosh_coef
        + ExtFloat::from(-8.0 * em * beta.sin() * (2.0 * fq.eta).sin())
        + sh2 * (8.0 * ep * beta.cos()))
        * (1.0 / 16.0)
}

/// `θ` as the full-quadrant arctangent of the numerator and denominator
/// (both scaled by `e^{−ξ}`, which leaves the angle unchanged).
fn theta(fq: &FracQuantities) -> f64 {
    let e = fq.eps_alpha;
    let (se, ce) = fq.eta.sin_cos();
    let (sb, cb) = fq.beta.sin_cos();
    let em2x = (-2.0 * fq.xi).exp();
    let sh = -0.5 * (-2.0 * fq.xi).exp_m1();
    let ch = 0.5 * (1.0 + em2x);
    let num = 2.0 * e * se * sh + (e * e + 1.0) * se * ch * cb + (e * e - 1.0) * ce * sh * sb;
    let den = 2.0 * e * ce * ch + (e * e + 1.0) * ce * sh * cb - (e * e - 1.0) * se * ch * sb;
    num.atan2(den)
}

fn d_alpha(fq: &FracQuantities, fd: &FracDerivatives, b: f64) -> ExtFloat {
    let (ep, em) = (fq.eps_plus, fq.eps_minus);
    let (epp, emp, qp) = (fd.deps_plus, fd.deps_minus, fd.dq_alpha);
    let (sb, cb) = fq.beta.sin_cos();
    let (sg, cg) = fq.gamma_ang.sin_cos();
    let (se, ce) = fq.eta.sin_cos();
    let (s2e, c2e) = (2.0 * fq.eta).sin_cos();
    let ch2 = ExtFloat::cosh(2.0 * fq.xi);
    let sh2 = ExtFloat::sinh(2.0 * fq.xi);
    let chx = ExtFloat::cosh(fq.xi);
    let shx = ExtFloat::sinh(fq.xi);
    let mix = ep * ep * cb * cb + em * em * sb * sb;

    ch2 * (0.5 * b * ep * qp * cb * cg)
        + ExtFloat::from(0.5 * b * em * qp * sb * sg * c2e)
        + ExtFloat::from(0.25 * epp * cb * s2e)
        + (sh2 * cg + ExtFloat::from(sg * s2e)) * (0.5 * b * qp)
        + (sh2 * cg - ExtFloat::from(s2e * sg)) * (0.125 * b * qp * mix)
        + (chx * chx * (se * se) + shx * shx * (ce * ce))
            * (0.125 * (2.0 * fq.beta).sin() * (ep * emp - em * epp))
        + sh2 * (0.25 * emp * sb)
}

fn v1_alpha(fq: &FracQuantities, fd: &FracDerivatives) -> ExtFloat {
    let (ep, em) = (fq.eps_plus, fq.eps_minus);
    let (epp, emp) = (fd.deps_plus, fd.deps_minus);
    let (sb, cb) = fq.beta.sin_cos();
    // cosh 2ξ − cos 2η = 2(sinh²ξ + sin²η), free of cancellation at small width
    let shx = ExtFloat::sinh(fq.xi);
    let se = fq.eta.sin();
    let ch_minus_c = (shx * shx + ExtFloat::from(se * se)) * 2.0;
    ch_minus_c * (0.25 * (ep * epp * cb * cb + em * emp * sb * sb))
        + ExtFloat::from(-0.5 * emp * sb * (2.0 * fq.eta).sin())
        + ExtFloat::sinh(2.0 * fq.xi) * (0.5 * epp * cb)
}

fn v2_alpha(fq: &FracQuantities) -> ExtFloat {
    let (ep, em) = (fq.eps_plus, fq.eps_minus);
    let (sb, cb) = fq.beta.sin_cos();
    let (sg, cg) = fq.gamma_ang.sin_cos();
    let (s2e, c2e) = (2.0 * fq.eta).sin_cos();
    let ch2 = ExtFloat::cosh(2.0 * fq.xi);
    let sh2 = ExtFloat::sinh(2.0 * fq.xi);
    let mix = ep * ep * cb * cb + em * em * sb * sb;
    (ExtFloat::from(s2e * cg) + sh2 * sg) * (0.25 * mix)
        + ch2 * (ep * cb * sg)
        + ExtFloat::from(-em * sb * c2e * cg)
        + sh2 * sg
        + ExtFloat::from(-cg * s2e)
}

pub fn unit_cell(p: &ModelParams) -> Result<UnitCell> {
    let fq = wavenumbers(p)?;
    let fd = derivatives(p)?;
    let b = p.b;

    let v = v_alpha(&fq);
    let theta = theta(&fq);
    let delta = theta - fq.k_alpha * b;
    let d = d_alpha(&fq, &fd, b);
    let v1 = v1_alpha(&fq, &fd);
    let v2 = v2_alpha(&fq);
    let v_prime = v1 + v2 * (b * fd.dq_alpha);
    let delta_prime = (d / v).to_f64() - b * fd.dk_alpha;
    let tau_alpha = delta_prime + b * inverse_free_velocity(p.free_passage, &fq, &fd);

    if !(delta_prime.is_finite() && v.is_finite() && theta.is_finite()) {
        return Err(TunnelError::NonFinite {
            what: "unit_cell",
            energy: p.energy,
        });
    }
    Ok(UnitCell {
        v_alpha: v,
        theta,
        delta,
        d_alpha: d,
        v1_alpha: v1,
        v2_alpha: v2,
        v_alpha_prime: v_prime,
        delta_prime,
        tau_alpha,
    })
}

/// Samples `τ_α` along a strictly increasing, non-negative list of widths.
pub fn tau_single_limit_check(p: &ModelParams, b_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if b_grid.iter().any(|&b| b.is_nan() || b < 0.0) {
        return Err(TunnelError::InvalidGrid(
            "widths must be non-negative".into(),
        ));
    }
    if b_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(TunnelError::InvalidGrid(
            "widths must be strictly increasing".into(),
        ));
    }
    b_grid
        .iter()
        .map(|&b| unit_cell(&p.with_b(b)).map(|c| (b, c.tau_alpha)))
        .collect()
}
