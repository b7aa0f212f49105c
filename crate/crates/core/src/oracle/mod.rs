//! Independent reference machinery.
//!
//! Finite differences and phase unwrapping, a complex-arithmetic evaluation of
//! `M₁` straight from its defining trigonometric form, and a from-scratch
//! standard-QM transfer-matrix product. None of these reuse the closed-form
//! amplitude or derivative code they are compared against.
//!
//! Wherever a closed-form derivative disagrees with a finite difference beyond
//! tolerance, the finite difference is treated as ground truth.

mod stdqm;
mod validate;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TunnelError};
use crate::params::ModelParams;

pub use stdqm::{std_qm_multibarrier, StdQmResult};
pub use validate::{validate, CheckRecord, GridPoint, GridSpec, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    /// Step relative to `|E|`.
    pub step_rel: f64,
    /// One level of Richardson extrapolation.
    pub richardson: bool,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            step_rel: 1e-6,
            richardson: true,
        }
    }
}

impl FdConfig {
    fn validate(&self) -> Result<()> {
        if !(self.step_rel > 0.0 && self.step_rel < 1e-2) {
            return Err(TunnelError::InvalidParameter {
                name: "step_rel",
                value: self.step_rel,
                reason: "finite-difference step must lie in (0, 1e-2)",
            });
        }
        Ok(())
    }

    fn step(&self, x: f64) -> f64 {
        if x == 0.0 {
            self.step_rel
        } else {
            self.step_rel * x.abs()
        }
    }
}

fn finite(v: f64, at: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(TunnelError::NonFinite {
            what: "finite-difference sample",
            energy: at,
        })
    }
}

/// Central differences of `f` around `x`; `lift` maps raw samples (e.g. phase
/// unwrapping relative to the centre value) before differencing.
fn central<F>(f: &F, x: f64, h: f64, richardson: bool, lift: &dyn Fn(f64) -> f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let d = |h: f64| -> Result<f64> {
        // representable step: x ± h are exact machine numbers
        let h = (x + h) - x;
        let hi = lift(finite(f(x + h)?, x + h)?);
        let lo = lift(finite(f(x - h)?, x - h)?);
        Ok((hi - lo) / (2.0 * h))
    };
    let coarse = d(h)?;
    if !richardson {
        return Ok(coarse);
    }
    let fine = d(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Derivative of a fallible scalar function.
pub fn try_fd_derivative<F>(f: F, x: f64, cfg: &FdConfig) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    cfg.validate()?;
    central(&f, x, cfg.step(x), cfg.richardson, &|v| v)
}

pub fn fd_derivative<F>(f: F, x: f64, cfg: &FdConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    try_fd_derivative(|e| Ok(f(e)), x, cfg)
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Derivative of a phase-valued function; samples are unwrapped against the
/// value at `x`, so `f` may return any branch.
pub fn fd_phase_derivative<F>(f: F, x: f64, cfg: &FdConfig) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    cfg.validate()?;
    let centre = finite(f(x)?, x)?;
    central(&f, x, cfg.step(x), cfg.richardson, &|v| {
        centre + wrap_angle(v - centre)
    })
}

/// Phase derivative with step halving until successive Richardson estimates
/// agree to `1e−7` relative. Used at band edges where the closed form is 0/0.
pub fn fd_derivative_adaptive<F>(f: F, x: f64, cfg: &FdConfig) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    cfg.validate()?;
    let centre = finite(f(x)?, x)?;
    let lift = |v: f64| centre + wrap_angle(v - centre);
    let mut h = cfg.step(x);
    let mut prev = central(&f, x, h, true, &lift)?;
    for _ in 0..12 {
        h *= 0.5;
        let next = central(&f, x, h, true, &lift)?;
        if (next - prev).abs() <= 1e-7 * next.abs().max(1e-300) {
            return Ok(next);
        }
        prev = next;
    }
    log::warn!("adaptive finite difference did not settle at x = {x}");
    Ok(prev)
}

/// Removes `2π` jumps between neighbouring samples; the first sample is kept.
pub fn unwrap(phases: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phases.len());
    let mut offset = 0.0;
    for (i, &ph) in phases.iter().enumerate() {
        if i > 0 {
            let raw = ph - phases[i - 1];
            offset += wrap_angle(raw) - raw;
        }
        out.push(ph + offset);
    }
    if out.windows(2).any(|w| (w[1] - w[0]).abs() >= PI) {
        log::warn!(
            "phase grid too coarse: a neighbouring jump of π or more remains after unwrapping"
        );
    }
    out
}

/// `M₁ = (cos k̄b − iμ sin k̄b) e^{ik_α b}` computed with complex arithmetic,
/// where `k̄ = ((E−V)/D_α)^{1/α}` is the principal complex root and
/// `μ = [(k_α/k̄)^{α−1} + (k̄/k_α)^{α−1}] / 2`.
pub fn fractional_m1(p: &ModelParams) -> Result<Complex64> {
    p.validate()?;
    let a = p.alpha;
    let k = Complex64::from((p.energy / p.d_alpha).powf(1.0 / a));
    let kbar = Complex64::new((p.energy - p.v_height) / p.d_alpha, 0.0).powf(1.0 / a);
    let ratio = (k / kbar).powf(a - 1.0);
    let mu = 0.5 * (ratio + 1.0 / ratio);
    let z = kbar * p.b;
    let i = Complex64::i();
    Ok((z.cos() - i * mu * z.sin()) * (i * k * p.b).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_and_analytic_functions() {
        let cfg = FdConfig::default();
        assert!((fd_derivative(|x| x * x, 3.0, &cfg).unwrap() - 6.0).abs() < 1e-9);
        for &x in &[0.3, 1.0, 3.0, 4.5] {
            assert_relative_eq!(
                fd_derivative(f64::exp, x, &cfg).unwrap(),
                x.exp(),
                max_relative = 1e-8
            );
            assert_relative_eq!(
                fd_derivative(f64::sin, x, &cfg).unwrap(),
                x.cos(),
                max_relative = 1e-8
            );
        }
        let plain = FdConfig {
            richardson: false,
            ..cfg
        };
        assert_relative_eq!(
            fd_derivative(f64::exp, 1.0, &plain).unwrap(),
            1f64.exp(),
            max_relative = 1e-8
        );
    }

    #[test]
    fn non_finite_samples_are_reported() {
        let r = fd_derivative(
            |x| if x > 1.0 { f64::NAN } else { x },
            1.0,
            &FdConfig::default(),
        );
        assert!(matches!(r, Err(TunnelError::NonFinite { .. })));
        let bad = FdConfig {
            step_rel: 0.5,
            richardson: true,
        };
        assert!(fd_derivative(|x| x, 1.0, &bad).is_err());
    }

    #[test]
    fn phase_derivative_across_branch_cut() {
        // phase 2x + π − 6 crosses ±π at x = 3
        let f = |x: f64| Ok(wrap_angle(2.0 * x + PI - 6.0));
        assert_relative_eq!(
            fd_phase_derivative(f, 3.0, &FdConfig::default()).unwrap(),
            2.0,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            fd_derivative_adaptive(f, 3.0, &FdConfig::default()).unwrap(),
            2.0,
            max_relative = 1e-9
        );
    }

    #[test]
    fn unwrap_examples() {
        assert_eq!(unwrap(&[0.1, 0.2]), vec![0.1, 0.2]);
        let u = unwrap(&[3.1, -3.1]);
        assert_eq!(u[0], 3.1);
        assert_relative_eq!(u[1], 2.0 * PI - 3.1, max_relative = 1e-15);
        assert!((u[1] - 3.1832).abs() < 1e-4);
        let ramp: Vec<f64> = (0..200).map(|i| wrap_angle(0.3 * i as f64)).collect();
        let un = unwrap(&ramp);
        for (i, v) in un.iter().enumerate() {
            assert!((v - 0.3 * i as f64).abs() < 1e-12);
        }
        assert!(unwrap(&[]).is_empty());
    }

    #[test]
    fn complex_m1_standard_limit() {
        // α = 2: M₁ e^{−ikb} = cosh qb + i (q²−k²)/(2kq) sinh qb
        let p = ModelParams::new(2.0, 5.0, 3.0, 1.3, 0.0, 1);
        let (k, q) = (3f64.sqrt(), 2f64.sqrt());
        let m = fractional_m1(&p).unwrap() * Complex64::from_polar(1.0, -k * 1.3);
        assert_relative_eq!(m.re, (q * 1.3).cosh(), max_relative = 1e-13);
        assert_relative_eq!(
            m.im,
            (q * q - k * k) / (2.0 * k * q) * (q * 1.3).sinh(),
            max_relative = 1e-12
        );
    }
}
