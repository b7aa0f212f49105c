//! Composition of `N` identical unit cells.
//!
//! With `χ = √v_α cos(δ + k_α s)` the inverse amplitude of the whole train is
//! `M_N = M₁ e^{−ik_α s} U_{N−1}(χ) − U_{N−2}(χ) = P_N − iQ_N` and
//! `t_N = e^{−ik_α N s} / M_N`. The phase `Φ = arg(P_N + iQ_N)` is
//! differentiated in closed form, `dΦ/dE = A₁/A₂`, and the tunneling time is
//! `Γ_α^N = dΦ/dE − N s k′_α + ((N−1)s + b)/v_free`.
//!
//! `Q_N` uses the signed factor `√v_α sin(δ + k_α s)` everywhere a root
//! `√(v_α − χ²)` would appear, which keeps `M_N = P_N − iQ_N` exact and `Φ`
//! continuous in energy.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::barrier::{inverse_free_velocity, unit_cell, UnitCell};
use crate::error::{Result, TunnelError};
use crate::ext::ExtFloat;
use crate::oracle::{fd_derivative_adaptive, FdConfig};
use crate::params::{derivatives, wavenumbers, ModelParams};

/// `|χ² − 1|` below which the closed form is replaced by a finite difference.
pub const BAND_EDGE_TOL: f64 = 1e-9;

/// Below this `|sin(δ + k_α s)|` the removable `0/0` in `a₁` is evaluated in
/// its cancelled form.
const SIN_REGULARIZE: f64 = 1e-4;

pub trait ChebArg:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Mul<f64, Output = Self>
{
    fn from_f64(x: f64) -> Self;
}

impl ChebArg for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
}

impl ChebArg for ExtFloat {
    fn from_f64(x: f64) -> Self {
        ExtFloat::from_f64(x)
    }
}

/// `(U_{n−2}, U_{n−1}, U_n)` for `n ≥ 0`.
fn cheb_u_window<T: ChebArg>(n: i64, x: T) -> (T, T, T) {
    let (mut a, mut b, mut c) = (T::from_f64(-1.0), T::from_f64(0.0), T::from_f64(1.0));
    for _ in 0..n {
        let next = c * x * 2.0 - b;
        a = b;
        b = c;
        c = next;
    }
    (a, b, c)
}

/// Chebyshev polynomial of the second kind for any integer order, using
/// `U_{−1} = 0` and `U_{−n} = −U_{n−2}`.
pub fn chebyshev_u_generic<T: ChebArg>(n: i64, x: T) -> T {
    match n {
        -1 => T::from_f64(0.0),
        n if n < -1 => chebyshev_u_generic(-n - 2, x) * -1.0,
        n => cheb_u_window(n, x).2,
    }
}

pub fn chebyshev_t_generic<T: ChebArg>(n: u32, x: T) -> T {
    let (mut prev, mut cur) = (T::from_f64(1.0), x);
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let next = cur * x * 2.0 - prev;
        prev = cur;
        cur = next;
    }
    cur
}

pub fn chebyshev_u(n: i64, x: f64) -> f64 {
    chebyshev_u_generic(n, x)
}

pub fn chebyshev_t(n: u32, x: f64) -> f64 {
    chebyshev_t_generic(n, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeResult {
    pub chi: ExtFloat,
    pub chi_prime: ExtFloat,
    pub u_nm1: ExtFloat,
    pub u_nm2: ExtFloat,
    pub u_nm3: ExtFloat,
    pub t_n_first_kind: ExtFloat,
    pub p_n: ExtFloat,
    pub q_n: ExtFloat,
    /// `M_N` in plain `f64`; overflows for very opaque trains.
    pub m_n: Complex64,
    pub t_n: Complex64,
    pub trans_prob: f64,
    pub phi: f64,
    pub dphi_de: f64,
    pub gamma_n: f64,
    /// The point sits on a band edge and `dphi_de` came from a finite difference.
    pub band_edge: bool,
}

struct Composition {
    chi: ExtFloat,
    sq: ExtFloat,
    u_nm1: ExtFloat,
    u_nm2: ExtFloat,
    u_nm3: ExtFloat,
    p_n: ExtFloat,
    q_n: ExtFloat,
}

fn compose_amplitude(p: &ModelParams, cell: &UnitCell, k_alpha: f64) -> Composition {
    let n = p.n_barriers as i64;
    let (sn, cs) = (cell.delta + k_alpha * p.s()).sin_cos();
    let rv = cell.v_alpha.sqrt();
    let chi = rv * cs;
    let sq = rv * sn;
    let (u_nm3, u_nm2, u_nm1) = if n >= 2 {
        cheb_u_window(n - 1, chi)
    } else {
        // N = 1: U_{−2}, U_{−1}, U_0
        (ExtFloat::from(-1.0), ExtFloat::ZERO, ExtFloat::ONE)
    };
    let p_n = chi * u_nm1 - u_nm2;
    let q_n = sq * u_nm1;
    Composition {
        chi,
        sq,
        u_nm1,
        u_nm2,
        u_nm3,
        p_n,
        q_n,
    }
}

/// `Φ` alone, used by the band-edge fallback and by finite-difference checks.
pub fn phase(p: &ModelParams) -> Result<f64> {
    let fq = wavenumbers(p)?;
    let cell = unit_cell(p)?;
    let c = compose_amplitude(p, &cell, fq.k_alpha);
    Ok(c.q_n.atan2(c.p_n))
}

pub(crate) struct PhaseRateTerms {
    pub a1_literal: ExtFloat,
    pub a1_cancelled: ExtFloat,
    pub a2_small: ExtFloat,
    pub a2_big: ExtFloat,
}

#[allow(clippy::too_many_arguments)]
fn phase_rate_terms(
    n: i64,
    cell: &UnitCell,
    c: &Composition,
    chi_p: ExtFloat,
    tn: ExtFloat,
    sin_arg: f64,
    cos_arg: f64,
    phase_rate: f64,
) -> PhaseRateTerms {
    let v = cell.v_alpha;
    let vp = cell.v_alpha_prime;
    let (chi, sq, u1, u2, u3) = (c.chi, c.sq, c.u_nm1, c.u_nm2, c.u_nm3);
    let nf = n as f64;

    let a2_big = v * u1 * u1 + u2 * u2 - chi * u1 * u2 * 2.0;
    let b1 = u1 * (vp - chi * chi_p * 2.0) * tn;
    let b2 = sq * sq * chi_p * u1 * u1;
    let b3 = chi_p * u2 * (u2 * nf - chi * u1);
    let b4 = chi_p * u1 * u3 * (nf - 1.0);

    let a1_literal = (b1 - b2 * 2.0) / (sq * 2.0);
    // (v′ − 2χχ′) / (2 · signed root) = d/dE [√v sin(δ + k s)]
    let rv = v.sqrt();
    let sq_prime = vp / rv * (0.5 * sin_arg) + rv * (phase_rate * cos_arg);
    let a1_cancelled = u1 * tn * sq_prime - sq * chi_p * u1 * u1;

    let a2_small = if n == 1 {
        ExtFloat::ZERO
    } else {
        sq / (chi * chi - 1.0) * (b3 - b4)
    };
    PhaseRateTerms {
        a1_literal,
        a1_cancelled,
        a2_small,
        a2_big,
    }
}

pub fn compose(p: &ModelParams, cell: &UnitCell) -> Result<LatticeResult> {
    let fq = wavenumbers(p)?;
    let fd = derivatives(p)?;
    let n = p.n_barriers as i64;
    let s = p.s();

    let arg = cell.delta + fq.k_alpha * s;
    let (sin_arg, cos_arg) = arg.sin_cos();
    let c = compose_amplitude(p, cell, fq.k_alpha);
    let rv = cell.v_alpha.sqrt();
    let phase_rate = cell.delta_prime + fd.dk_alpha * s;
    let chi_p = cell.v_alpha_prime / rv * (0.5 * cos_arg) - rv * (phase_rate * sin_arg);
    let tn = chebyshev_t_generic(p.n_barriers, c.chi);

    let phi = c.q_n.atan2(c.p_n);
    let modulus_sq = c.p_n * c.p_n + c.q_n * c.q_n;
    let trans_prob = (ExtFloat::ONE / modulus_sq).to_f64();
    let t_n = Complex64::from_polar(trans_prob.sqrt(), phi - fq.k_alpha * n as f64 * s);
    let m_n = Complex64::new(c.p_n.to_f64(), -c.q_n.to_f64());

    let band_edge = n >= 2 && (c.chi * c.chi - 1.0).abs() < ExtFloat::from(BAND_EDGE_TOL);
    let dphi_de = if band_edge {
        log::debug!(
            "band edge at E = {}, falling back to finite differences",
            p.energy
        );
        fd_derivative_adaptive(|e| phase(&p.with_energy(e)), p.energy, &FdConfig::default())?
    } else {
        let terms = phase_rate_terms(n, cell, &c, chi_p, tn, sin_arg, cos_arg, phase_rate);
        let a1 = if sin_arg.abs() > SIN_REGULARIZE {
            terms.a1_literal
        } else {
            terms.a1_cancelled
        };
        ((a1 + terms.a2_small) / terms.a2_big).to_f64()
    };

    let gamma_n = dphi_de - n as f64 * s * fd.dk_alpha
        + ((n - 1) as f64 * s + p.b) * inverse_free_velocity(p.free_passage, &fq, &fd);
    if !gamma_n.is_finite() {
        return Err(TunnelError::NonFinite {
            what: "compose",
            energy: p.energy,
        });
    }

    Ok(LatticeResult {
        chi: c.chi,
        chi_prime: chi_p,
        u_nm1: c.u_nm1,
        u_nm2: c.u_nm2,
        u_nm3: c.u_nm3,
        t_n_first_kind: tn,
        p_n: c.p_n,
        q_n: c.q_n,
        m_n,
        t_n,
        trans_prob,
        phi,
        dphi_de,
        gamma_n,
        band_edge,
    })
}

/// Unit cell and lattice in one call.
pub fn evaluate(p: &ModelParams) -> Result<(UnitCell, LatticeResult)> {
    let cell = unit_cell(p)?;
    let lat = compose(p, &cell)?;
    Ok((cell, lat))
}

pub fn transmission(p: &ModelParams) -> Result<(Complex64, f64)> {
    let (_, lat) = evaluate(p)?;
    Ok((lat.t_n, lat.trans_prob))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub b: f64,
    pub gamma_n: f64,
    pub tau_alpha: f64,
    pub trans_prob: f64,
    pub band_edge: bool,
}

/// `Γ_α^N`, `τ_α` and `|t_N|²` along a width grid, evaluated in parallel.
pub fn gamma_curve(p: &ModelParams, b_grid: &[f64]) -> Result<Vec<CurvePoint>> {
    if b_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(TunnelError::InvalidGrid("widths must be increasing".into()));
    }
    b_grid
        .par_iter()
        .map(|&b| {
            let (cell, lat) = evaluate(&p.with_b(b))?;
            Ok(CurvePoint {
                b,
                gamma_n: lat.gamma_n,
                tau_alpha: cell.tau_alpha,
                trans_prob: lat.trans_prob,
                band_edge: lat.band_edge,
            })
        })
        .collect()
}
