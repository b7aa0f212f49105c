//! Problem specification and the fractional wavenumber quantities derived from it.
//!
//! Units: `2m = ħ = 1`, so the standard wavenumber is `k = √E`. The free and
//! barrier fractional wavenumbers follow the power laws
//! `k_α = (E/D_α)^{1/α}` and `q_α = ((V−E)/D_α)^{1/α}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TunnelError};

/// Free-passage convention used for the `((N−1)s + b)` traversal term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FreePassage {
    /// Standard group velocity `2k`.
    #[default]
    Standard,
    /// Fractional group velocity `α D_α k_α^{α−1}`.
    Fractional,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub d_alpha: f64,
    pub v_height: f64,
    pub energy: f64,
    pub b: f64,
    pub l_gap: f64,
    pub n_barriers: u32,
    #[serde(default)]
    pub free_passage: FreePassage,
}

impl ModelParams {
    /// Parameters with `D_α = 1` and the standard free-passage convention.
    pub fn new(
        alpha: f64,
        v_height: f64,
        energy: f64,
        b: f64,
        l_gap: f64,
        n_barriers: u32,
    ) -> Self {
        ModelParams {
            alpha,
            d_alpha: 1.0,
            v_height,
            energy,
            b,
            l_gap,
            n_barriers,
            free_passage: FreePassage::Standard,
        }
    }

    /// Period of the lattice, `s = b + L`.
    pub fn s(&self) -> f64 {
        self.b + self.l_gap
    }

    pub fn with_energy(self, energy: f64) -> Self {
        ModelParams { energy, ..self }
    }

    pub fn with_b(self, b: f64) -> Self {
        ModelParams { b, ..self }
    }

    pub fn with_l_gap(self, l_gap: f64) -> Self {
        ModelParams { l_gap, ..self }
    }

    pub fn with_n(self, n_barriers: u32) -> Self {
        ModelParams { n_barriers, ..self }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        ModelParams { alpha, ..self }
    }

    /// Checks everything except the Lévy index.
    pub fn validate_geometry(&self) -> Result<()> {
        if !(self.v_height > 0.0 && self.v_height.is_finite()) {
            return Err(TunnelError::InvalidParameter {
                name: "V",
                value: self.v_height,
                reason: "barrier height must be positive and finite",
            });
        }
        if !(self.energy > 0.0 && self.energy < self.v_height) {
            return Err(TunnelError::EnergyOutOfRange {
                energy: self.energy,
                v_height: self.v_height,
            });
        }
        if !(self.b >= 0.0 && self.b.is_finite()) {
            return Err(TunnelError::InvalidParameter {
                name: "b",
                value: self.b,
                reason: "barrier width must be non-negative and finite",
            });
        }
        if !(self.l_gap >= 0.0 && self.l_gap.is_finite()) {
            return Err(TunnelError::InvalidParameter {
                name: "L",
                value: self.l_gap,
                reason: "barrier separation must be non-negative and finite",
            });
        }
        if self.n_barriers == 0 {
            return Err(TunnelError::NoBarriers);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.0 && self.alpha <= 2.0) {
            return Err(TunnelError::AlphaOutOfRange(self.alpha));
        }
        if !(self.d_alpha > 0.0 && self.d_alpha.is_finite()) {
            return Err(TunnelError::InvalidParameter {
                name: "d_alpha",
                value: self.d_alpha,
                reason: "scale constant must be positive and finite",
            });
        }
        self.validate_geometry()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracQuantities {
    /// Standard wavenumber `√E`.
    pub k: f64,
    pub k_alpha: f64,
    pub q_alpha: f64,
    pub eps_alpha: f64,
    pub eps_plus: f64,
    pub eps_minus: f64,
    /// `(α−1)π/α`
    pub beta: f64,
    /// `π/α`
    pub gamma_ang: f64,
    /// `q_α b cos(π/α)`
    pub eta: f64,
    /// `q_α b sin(π/α)`
    pub xi: f64,
}

/// Energy derivatives of the fractional quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracDerivatives {
    pub dk_alpha: f64,
    pub dq_alpha: f64,
    pub deps_plus: f64,
    pub deps_minus: f64,
}

pub fn wavenumbers(p: &ModelParams) -> Result<FracQuantities> {
    p.validate()?;
    let a = p.alpha;
    let k = p.energy.sqrt();
    let k_alpha = (p.energy / p.d_alpha).powf(1.0 / a);
    let q_alpha = ((p.v_height - p.energy) / p.d_alpha).powf(1.0 / a);
    let eps_alpha = (k_alpha / q_alpha).powf(a - 1.0);
    let gamma_ang = PI / a;
    let beta = (a - 1.0) * PI / a;
    let qb = q_alpha * p.b;
    Ok(FracQuantities {
        k,
        k_alpha,
        q_alpha,
        eps_alpha,
        eps_plus: eps_alpha + 1.0 / eps_alpha,
        eps_minus: eps_alpha - 1.0 / eps_alpha,
        beta,
        gamma_ang,
        eta: qb * gamma_ang.cos(),
        xi: qb * gamma_ang.sin(),
    })
}

pub fn derivatives(p: &ModelParams) -> Result<FracDerivatives> {
    let fq = wavenumbers(p)?;
    let a = p.alpha;
    let dk_alpha = fq.k_alpha.powf(1.0 - a) / (a * p.d_alpha);
    let dq_alpha = -fq.q_alpha.powf(1.0 - a) / (a * p.d_alpha);
    // dε_±/dE = (α−1)/α · V/(V−E)² · ε_α^{1/(1−α)} · (1 ∓ ε_α^{−2})
    let gap = p.v_height - p.energy;
    let common = (a - 1.0) / a * p.v_height / (gap * gap) * fq.eps_alpha.powf(1.0 / (1.0 - a));
    let inv_sq = fq.eps_alpha.powi(-2);
    Ok(FracDerivatives {
        dk_alpha,
        dq_alpha,
        deps_plus: common * (1.0 - inv_sq),
        deps_minus: common * (1.0 + inv_sq),
    })
}
