//! Limit cumulant functions on `ℝ^h` with values in `[0, +∞]`.

use crate::cumulants::MeanVector;
use crate::processes::{Condition1Config, Condition2Config};

/// `a^p · 1{a ≥ 0}`, with `(+∞)^p = +∞`.
fn pos_pow(a: f64, p: f64) -> f64 {
    if a >= 0.0 {
        a.powf(p)
    } else {
        0.0
    }
}

/// `θ · 1{θ m ≥ 0}`.
fn signed_part(theta: f64, m: f64) -> f64 {
    if theta * m >= 0.0 {
        theta
    } else {
        0.0
    }
}

fn check_dim(h: usize, theta: &[f64]) {
    assert_eq!(theta.len(), h, "theta has {} entries, expected {h}", theta.len());
}

/// `Ψ(θ) = Σ_i (c_i κ_i(θ_i))_+^{1/ν_i} + (c_0 Σ_i κ_i(θ_i))_+^{1/ν_0}`.
pub fn psi_cond1(cfg: &Condition1Config, theta: &[f64]) -> f64 {
    check_dim(cfg.h(), theta);
    let kappas: Vec<f64> = cfg.components().iter().zip(theta).map(|(m, &th)| m.kappa(th)).collect();
    if kappas.iter().any(|k| k.is_infinite()) {
        return f64::INFINITY;
    }
    let own: f64 = (0..cfg.h()).map(|i| pos_pow(cfg.c()[i] * kappas[i], 1.0 / cfg.nu(i))).sum();
    own + pos_pow(cfg.c0() * kappas.iter().sum::<f64>(), 1.0 / cfg.nu0())
}

/// `Υ(θ) = Σ_j (Σ_i c_ij κ_i(θ_i))_+^{1/ν}`.
pub fn upsilon_cond2(cfg: &Condition2Config, theta: &[f64]) -> f64 {
    check_dim(cfg.h(), theta);
    let kappas: Vec<f64> = cfg.components().iter().zip(theta).map(|(m, &th)| m.kappa(th)).collect();
    if kappas.iter().any(|k| k.is_infinite()) {
        return f64::INFINITY;
    }
    (0..cfg.k())
        .map(|j| {
            let s: f64 = (0..cfg.h()).map(|i| cfg.c()[i][j] * kappas[i]).sum();
            pos_pow(s, 1.0 / cfg.nu())
        })
        .sum()
}

/// Moderate-deviation limit of Condition 1; the branch follows `m.is_zero()`.
pub fn psi_tilde(cfg: &Condition1Config, m: &MeanVector, theta: &[f64]) -> f64 {
    check_dim(cfg.h(), theta);
    let nu0 = cfg.nu0();
    let mut own = 0.0;
    let mut shared = 0.0;
    for i in 0..cfg.h() {
        let nui = cfg.nu(i);
        let q = if m.is_zero() {
            0.5 * cfg.components()[i].curvature() * theta[i] * theta[i]
        } else {
            m[i] * signed_part(theta[i], m[i])
        };
        if nu0 <= nui {
            own += pos_pow(cfg.c()[i] * q, 1.0 / nui);
        }
        if nui <= nu0 {
            shared += q;
        }
    }
    own + pos_pow(cfg.c0() * shared, 1.0 / nu0)
}

/// Moderate-deviation limit of Condition 2; the branch follows `m.is_zero()`.
pub fn upsilon_tilde(cfg: &Condition2Config, m: &MeanVector, theta: &[f64]) -> f64 {
    check_dim(cfg.h(), theta);
    let q: Vec<f64> = (0..cfg.h())
        .map(|i| {
            if m.is_zero() {
                0.5 * cfg.components()[i].curvature() * theta[i] * theta[i]
            } else {
                m[i] * signed_part(theta[i], m[i])
            }
        })
        .collect();
    (0..cfg.k())
        .map(|j| {
            let s: f64 = (0..cfg.h()).map(|i| cfg.c()[i][j] * q[i]).sum();
            pos_pow(s, 1.0 / cfg.nu())
        })
        .sum()
}

/// One of the four limit cumulant functions bound to its configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum LimitCumulant {
    Psi(Condition1Config),
    Upsilon(Condition2Config),
    PsiTilde(Condition1Config, MeanVector),
    UpsilonTilde(Condition2Config, MeanVector),
}

impl LimitCumulant {
    pub fn h(&self) -> usize {
        match self {
            LimitCumulant::Psi(c) | LimitCumulant::PsiTilde(c, _) => c.h(),
            LimitCumulant::Upsilon(c) | LimitCumulant::UpsilonTilde(c, _) => c.h(),
        }
    }

    pub fn eval(&self, theta: &[f64]) -> f64 {
        match self {
            LimitCumulant::Psi(c) => psi_cond1(c, theta),
            LimitCumulant::Upsilon(c) => upsilon_cond2(c, theta),
            LimitCumulant::PsiTilde(c, m) => psi_tilde(c, m, theta),
            LimitCumulant::UpsilonTilde(c, m) => upsilon_tilde(c, m, theta),
        }
    }

    /// Per-coordinate open intervals on which the function is finite.
    pub fn domain(&self) -> Vec<(f64, f64)> {
        let components = match self {
            LimitCumulant::Psi(c) => c.components(),
            LimitCumulant::Upsilon(c) => c.components(),
            _ => return vec![(f64::NEG_INFINITY, f64::INFINITY); self.h()],
        };
        components
            .iter()
            .map(|m| {
                let d = m.theta_domain();
                (d.lo, d.hi)
            })
            .collect()
    }

    pub fn name(&self) -> &'static str {
        match self {
            LimitCumulant::Psi(_) => "psi",
            LimitCumulant::Upsilon(_) => "upsilon",
            LimitCumulant::PsiTilde(..) => "psi-tilde",
            LimitCumulant::UpsilonTilde(..) => "upsilon-tilde",
        }
    }
}
