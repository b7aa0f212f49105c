//! Textbook transfer matrices for `N` rectangular barriers in standard QM
//! (`α = 2`, `D = 1`, `2m = ħ = 1`).
//!
//! Amplitudes `(A, B)` of `A e^{iκx} + B e^{−iκx}` are referenced at the left
//! edge of each segment; `κ = k` outside and `κ = iq` inside a barrier. Each
//! barrier matrix is stored divided by `e^{qb}` and the exponent is tracked
//! separately so opaque trains do not overflow.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{fd_phase_derivative, FdConfig};
use crate::error::Result;
use crate::params::ModelParams;

type Mat2 = [[Complex64; 2]; 2];

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::from(0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Maps right-side amplitudes to left-side ones across an interface at the
/// common reference point, from wavenumber `left` to `right`.
fn interface(left: Complex64, right: Complex64) -> Mat2 {
    let r = right / left;
    let one = Complex64::from(1.0);
    [
        [0.5 * (one + r), 0.5 * (one - r)],
        [0.5 * (one - r), 0.5 * (one + r)],
    ]
}

/// Propagation over `len` for wavenumber `kappa`, multiplied by `e^{−shift}`.
fn propagate(kappa: Complex64, len: f64, shift: f64) -> Mat2 {
    let i = Complex64::i();
    let zero = Complex64::from(0.0);
    [
        [(-i * kappa * len - shift).exp(), zero],
        [zero, (i * kappa * len - shift).exp()],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StdQmResult {
    /// Transmission amplitude for `ψ = t e^{ikx}` beyond the last barrier.
    pub t: Complex64,
    /// Reflection amplitude at the left edge.
    pub r: Complex64,
    pub trans_prob: f64,
    pub refl_prob: f64,
    /// `d arg t / dE + ((N−1)s + b)/(2k)`.
    pub phase_time: f64,
}

struct Amplitudes {
    t: Complex64,
    r: Complex64,
    log_scale: f64,
    m11_scaled: Complex64,
}

fn amplitudes(p: &ModelParams) -> Amplitudes {
    let k = Complex64::from(p.energy.sqrt());
    let q = (p.v_height - p.energy).sqrt();
    let kappa_in = Complex64::new(0.0, q);
    let qb = q * p.b;

    let barrier = mul(
        &mul(&interface(k, kappa_in), &propagate(kappa_in, p.b, qb)),
        &interface(kappa_in, k),
    );
    let gap = propagate(k, p.l_gap, 0.0);

    let mut total = barrier;
    for _ in 1..p.n_barriers {
        total = mul(&mul(&total, &gap), &barrier);
    }
    let log_scale = qb * p.n_barriers as f64;
    let extent = (p.n_barriers as f64 - 1.0) * p.s() + p.b;

    let m11 = total[0][0];
    let t = (-log_scale).exp() / m11 * Complex64::from_polar(1.0, -k.re * extent);
    let r = total[1][0] / m11;
    Amplitudes {
        t,
        r,
        log_scale,
        m11_scaled: m11,
    }
}

pub fn std_qm_multibarrier(p: &ModelParams) -> Result<StdQmResult> {
    p.validate_geometry()?;
    let amp = amplitudes(p);
    let extent = (p.n_barriers as f64 - 1.0) * p.s() + p.b;
    // arg t does not depend on the e^{−Nqb} scale, so use the scaled M₁₁
    let phase = |e: f64| {
        let a = amplitudes(&p.with_energy(e));
        let ext_phase = -e.sqrt() * extent;
        Ok(ext_phase - a.m11_scaled.arg())
    };
    let dphase = fd_phase_derivative(phase, p.energy, &FdConfig::default())?;
    let trans_prob = (-2.0 * amp.log_scale).exp() / amp.m11_scaled.norm_sqr();
    Ok(StdQmResult {
        t: amp.t,
        r: amp.r,
        trans_prob,
        refl_prob: amp.r.norm_sqr(),
        phase_time: dphase + extent / (2.0 * p.energy.sqrt()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn empty_structure_transmits() {
        let p = ModelParams::new(2.0, 5.0, 3.0, 0.0, 0.0, 3);
        let res = std_qm_multibarrier(&p).unwrap();
        assert_relative_eq!(res.t.re, 1.0, max_relative = 1e-14);
        assert!(res.t.im.abs() < 1e-14);
        assert!(res.r.norm() < 1e-14);
    }

    #[test]
    fn single_barrier_textbook_probability() {
        let p = ModelParams::new(2.0, 5.0, 3.0, 2.0, 0.2, 1);
        let res = std_qm_multibarrier(&p).unwrap();
        let (k, q) = (3f64.sqrt(), 2f64.sqrt());
        let v = 1.0 + (k * k + q * q).powi(2) / (4.0 * k * k * q * q) * (2.0 * q).sinh().powi(2);
        assert_relative_eq!(res.trans_prob, 1.0 / v, max_relative = 1e-12);
    }

    #[test]
    fn unitarity() {
        for n in 1..6 {
            for &b in &[0.2, 1.0, 3.0] {
                for &l in &[0.0, 0.2, 1.7] {
                    let res =
                        std_qm_multibarrier(&ModelParams::new(2.0, 5.0, 1.7, b, l, n)).unwrap();
                    assert!(
                        (res.trans_prob + res.refl_prob - 1.0).abs() < 1e-12,
                        "{n} {b} {l}"
                    );
                }
            }
        }
    }

    #[test]
    fn opaque_double_barrier_time_saturates_and_ignores_gap() {
        let base = ModelParams::new(2.0, 5.0, 3.0, 20.0, 0.2, 2);
        let t1 = std_qm_multibarrier(&base).unwrap().phase_time;
        let t2 = std_qm_multibarrier(&base.with_l_gap(1.3))
            .unwrap()
            .phase_time;
        let t3 = std_qm_multibarrier(&base.with_b(25.0)).unwrap().phase_time;
        let lim = 1.0 / 6f64.sqrt();
        for t in [t1, t2, t3] {
            assert!((t - lim).abs() < 1e-6, "{t}");
        }
    }
}
