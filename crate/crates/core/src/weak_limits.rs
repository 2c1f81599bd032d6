//! Weak limits of the rescaled processes and their moment generating functions.

use crate::cumulants::MeanVector;
use crate::error::Result;
use crate::mittag_leffler::{ml_eval, MLOrder};
use crate::processes::{sample_cond1, sample_cond2, Condition1Config, Condition2Config};
use crate::rng::RandomStream;
use crate::subordinators::{sample_inverse_stable, StableIndex};

/// `α_m(ν) = 1 − ν/2` when `m = 0`, `1 − ν` otherwise.
pub fn alpha_m(m: &MeanVector, nu: f64) -> f64 {
    if m.is_zero() {
        1.0 - nu / 2.0
    } else {
        1.0 - nu
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    MeanZero,
    MeanNonzero,
}

impl Branch {
    pub fn of(m: &MeanVector) -> Self {
        if m.is_zero() {
            Branch::MeanZero
        } else {
            Branch::MeanNonzero
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitSample {
    pub values: Vec<f64>,
    pub branch: Branch,
    pub condition: u8,
}

/// `(1{ν_0 ≤ ν_i}, 1{ν_i ≤ ν_0})`; both hold exactly when `ν_0 = ν_i`.
pub fn indicators(nu0: f64, nui: f64) -> (bool, bool) {
    (nu0 <= nui, nui <= nu0)
}

fn order(nu: f64) -> MLOrder {
    MLOrder::new(nu).expect("validated index")
}

fn index(nu: f64) -> StableIndex {
    StableIndex::new(nu).expect("validated index")
}

/// One draw of the Condition 1 limit: clocks `L_0(1), L_1(1), …` first, then the normals.
pub fn sample_limit_cond1(cfg: &Condition1Config, m: &MeanVector, rng: &mut RandomStream) -> Result<LimitSample> {
    let l0 = sample_inverse_stable(index(cfg.nu0()), 1.0, rng)?;
    let ls = (0..cfg.h())
        .map(|i| sample_inverse_stable(index(cfg.nu(i)), 1.0, rng))
        .collect::<Result<Vec<_>>>()?;
    let branch = Branch::of(m);
    let values = (0..cfg.h())
        .map(|i| {
            let (own, shared) = indicators(cfg.nu0(), cfg.nu(i));
            let (ci, c0) = (cfg.c()[i], cfg.c0());
            match branch {
                Branch::MeanZero => {
                    let k = cfg.components()[i].curvature();
                    let z = rng.sample_std_normal();
                    let zhat = rng.sample_std_normal();
                    let a = if own { (ci * ls[i] * k).sqrt() * z } else { 0.0 };
                    let b = if shared { (c0 * l0 * k).sqrt() * zhat } else { 0.0 };
                    a + b
                }
                Branch::MeanNonzero => {
                    let a = if own { ci * m[i] * ls[i] } else { 0.0 };
                    let b = if shared { c0 * m[i] * l0 } else { 0.0 };
                    a + b
                }
            }
        })
        .collect();
    Ok(LimitSample {
        values,
        branch,
        condition: 1,
    })
}

/// One draw of the Condition 2 limit.
pub fn sample_limit_cond2(cfg: &Condition2Config, m: &MeanVector, rng: &mut RandomStream) -> Result<LimitSample> {
    let nu = index(cfg.nu());
    let ls = (0..cfg.k())
        .map(|_| sample_inverse_stable(nu, 1.0, rng))
        .collect::<Result<Vec<_>>>()?;
    let branch = Branch::of(m);
    let values = (0..cfg.h())
        .map(|i| {
            let clock: f64 = cfg.c()[i].iter().zip(&ls).map(|(c, l)| c * l).sum();
            match branch {
                Branch::MeanZero => (clock * cfg.components()[i].curvature()).sqrt() * rng.sample_std_normal(),
                Branch::MeanNonzero => m[i] * clock,
            }
        })
        .collect();
    Ok(LimitSample {
        values,
        branch,
        condition: 2,
    })
}

/// The per-component argument of the Mittag-Leffler factors: `κ″_i θ_i²/2` or `m_i θ_i`.
fn local_exponent(m: &MeanVector, curvature: f64, i: usize, theta: f64) -> f64 {
    if m.is_zero() {
        0.5 * curvature * theta * theta
    } else {
        m[i] * theta
    }
}

/// `E[e^{⟨θ, Y⟩}]` for the Condition 1 limit `Y`.
pub fn mgf_limit_cond1(cfg: &Condition1Config, m: &MeanVector, theta: &[f64]) -> Result<f64> {
    let mut value = 1.0;
    let mut shared = 0.0;
    for i in 0..cfg.h() {
        let q = local_exponent(m, cfg.components()[i].curvature(), i, theta[i]);
        let (own, sh) = indicators(cfg.nu0(), cfg.nu(i));
        if own {
            value *= ml_eval(order(cfg.nu(i)), cfg.c()[i] * q)?;
        }
        if sh {
            shared += q;
        }
    }
    Ok(value * ml_eval(order(cfg.nu0()), cfg.c0() * shared)?)
}

/// `E[e^{⟨θ, Y⟩}]` for the Condition 2 limit `Y`.
pub fn mgf_limit_cond2(cfg: &Condition2Config, m: &MeanVector, theta: &[f64]) -> Result<f64> {
    let q: Vec<f64> = (0..cfg.h())
        .map(|i| local_exponent(m, cfg.components()[i].curvature(), i, theta[i]))
        .collect();
    let mut value = 1.0;
    for j in 0..cfg.k() {
        let s: f64 = (0..cfg.h()).map(|i| cfg.c()[i][j] * q[i]).sum();
        value *= ml_eval(order(cfg.nu()), s)?;
    }
    Ok(value)
}

/// `(t^{α_m(ν_0 ∨ ν_i)} X_i(t)/t)_i`, the Condition 1 vector that converges to the limit.
pub fn scaled_weak_vector_cond1(cfg: &Condition1Config, m: &MeanVector, t: f64, rng: &mut RandomStream) -> Result<Vec<f64>> {
    let x = sample_cond1(cfg, t, rng)?;
    Ok(x.iter()
        .enumerate()
        .map(|(i, xi)| t.powf(alpha_m(m, cfg.nu0().max(cfg.nu(i)))) * xi / t)
        .collect())
}

/// `(t^{α_m(ν)} X_i(t)/t)_i` for Condition 2.
pub fn scaled_weak_vector_cond2(cfg: &Condition2Config, m: &MeanVector, t: f64, rng: &mut RandomStream) -> Result<Vec<f64>> {
    let x = sample_cond2(cfg, t, rng)?;
    let s = t.powf(alpha_m(m, cfg.nu()) - 1.0);
    Ok(x.iter().map(|xi| s * xi).collect())
}
