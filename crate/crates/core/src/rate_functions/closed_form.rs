//! Explicit moderate-deviation rate functions.

use crate::cumulants::MeanVector;
use crate::error::{Error, Result};
use crate::processes::Condition1Config;
use crate::subordinators::StableIndex;

use super::conjugate::maximize_1d;

/// `U_{ν,κ}(x) = ((ν/2)^{ν/(2−ν)} − (ν/2)^{2/(2−ν)}) (2x²/κ)^{1/(2−ν)}`,
/// the conjugate of `θ ↦ (κθ²/2)^{1/ν}`.
pub fn closed_form_u(nu: StableIndex, curvature: f64, x: f64) -> f64 {
    let nu = nu.nu();
    if curvature == 0.0 {
        return if x == 0.0 { 0.0 } else { f64::INFINITY };
    }
    let half = nu / 2.0;
    (half.powf(nu / (2.0 - nu)) - half.powf(2.0 / (2.0 - nu))) * (2.0 * x * x / curvature).powf(1.0 / (2.0 - nu))
}

/// `V_{ν,m}(x) = (ν^{ν/(1−ν)} − ν^{1/(1−ν)}) (x/m)^{1/(1−ν)}` for `x/m ≥ 0`, `+∞` otherwise,
/// the conjugate of `θ ↦ (mθ 1{θm ≥ 0})^{1/ν}`.
pub fn closed_form_v(nu: StableIndex, mean: f64, x: f64) -> f64 {
    let nu = nu.nu();
    if mean == 0.0 {
        return if x == 0.0 { 0.0 } else { f64::INFINITY };
    }
    let ratio = x / mean;
    if ratio < 0.0 {
        return f64::INFINITY;
    }
    (nu.powf(nu / (1.0 - nu)) - nu.powf(1.0 / (1.0 - nu))) * ratio.powf(1.0 / (1.0 - nu))
}

/// Maximizer of `θx − (κθ²/2)^{1/ν}` for `κ > 0`.
pub fn optimizer_u(nu: StableIndex, curvature: f64, x: f64) -> f64 {
    let nu = nu.nu();
    let mag = (2.0 / curvature).powf(1.0 / (2.0 - nu)) * (nu * x.abs() / 2.0).powf(nu / (2.0 - nu));
    mag.copysign(x)
}

/// Maximizer of `θx − (mθ 1{θm ≥ 0})^{1/ν}` for `x/m ≥ 0`, `m ≠ 0`.
pub fn optimizer_v(nu: StableIndex, mean: f64, x: f64) -> f64 {
    let nu = nu.nu();
    let mag = (nu * x.abs()).powf(nu / (1.0 - nu)) / mean.abs().powf(1.0 / (1.0 - nu));
    mag.copysign(mean)
}

/// `η = Σ θ_i m_i` at the stationary point for `x = αm`: the maximizer of `αη − (c_0η)^{1/ν_0}`.
pub fn stationary_eta(nu0: StableIndex, c0: f64, alpha: f64) -> f64 {
    let nu0 = nu0.nu();
    (alpha * nu0).powf(nu0 / (1.0 - nu0)) * c0.powf(-1.0 / (1.0 - nu0))
}

fn check_len(cfg: &Condition1Config, m: &MeanVector, x: &[f64]) -> Result<()> {
    if m.len() != cfg.h() || x.len() != cfg.h() {
        return Err(Error::Dimension(format!(
            "h = {} but m has {} and x has {} entries",
            cfg.h(),
            m.len(),
            x.len()
        )));
    }
    Ok(())
}

/// Rate for `ν_0 < min_i ν_i`: `Σ_i U_{ν_i, c_i κ″_i}(x_i)` if `m = 0`, else `Σ_i V_{ν_i, c_i m_i}(x_i)`.
pub fn md_rate_explicit_case1(cfg: &Condition1Config, m: &MeanVector, x: &[f64]) -> Result<f64> {
    check_len(cfg, m, x)?;
    let nus = cfg.nus();
    if !nus.iter().all(|&nu| cfg.nu0() < nu) {
        return Err(Error::Precondition(format!(
            "requires nu0 < min(nu_i); nu0 = {}, nu = {nus:?}",
            cfg.nu0()
        )));
    }
    let mut total = 0.0;
    for i in 0..cfg.h() {
        let nu = StableIndex::new(nus[i])?;
        total += if m.is_zero() {
            closed_form_u(nu, cfg.c()[i] * cfg.components()[i].curvature(), x[i])
        } else {
            closed_form_v(nu, cfg.c()[i] * m[i], x[i])
        };
    }
    Ok(total)
}

/// Sign compatibility `x_i m_i ≥ 0`, and `x_j = 0` wherever `m_j = 0`.
pub fn in_admissible_set(m: &MeanVector, x: &[f64]) -> bool {
    x.iter()
        .zip(m.as_slice())
        .all(|(&xi, &mi)| xi * mi >= 0.0 && (mi != 0.0 || xi == 0.0))
}

fn check_case2(cfg: &Condition1Config, m: &MeanVector, x: &[f64]) -> Result<()> {
    check_len(cfg, m, x)?;
    let nus = cfg.nus();
    if !nus.iter().all(|&nu| cfg.nu0() > nu) {
        return Err(Error::Precondition(format!(
            "requires nu0 > max(nu_i); nu0 = {}, nu = {nus:?}",
            cfg.nu0()
        )));
    }
    if m.is_zero() {
        return Err(Error::Precondition("requires a nonzero mean vector".into()));
    }
    Ok(())
}

/// Rate for `ν_0 > max_i ν_i` and `m ≠ 0`: `max_i V_{ν_0, c_0 m_i}(x_i)` on the admissible set, `+∞` off it.
pub fn md_rate_explicit_case2(cfg: &Condition1Config, m: &MeanVector, x: &[f64]) -> Result<f64> {
    check_case2(cfg, m, x)?;
    if !in_admissible_set(m, x) {
        return Ok(f64::INFINITY);
    }
    let nu0 = StableIndex::new(cfg.nu0())?;
    Ok((0..cfg.h())
        .map(|i| closed_form_v(nu0, cfg.c0() * m[i], x[i]))
        .fold(0.0, f64::max))
}

/// `sup {Σ θ_i x_i − (c_0 Σ θ_i m_i)^{1/ν_0} : θ_i x_i ≥ 0}` evaluated along the
/// stationary-point route: a scalar search in `η = Σ θ_i m_i` when `x` is a
/// non-negative multiple of `m`, otherwise the best of the faces `θ_j = 0`.
pub fn case2_restricted_supremum(cfg: &Condition1Config, m: &MeanVector, x: &[f64]) -> Result<f64> {
    check_case2(cfg, m, x)?;
    if !in_admissible_set(m, x) {
        return Ok(f64::INFINITY);
    }
    // indices with m_i = 0 carry x_i = 0 and drop out
    let active: Vec<usize> = (0..cfg.h()).filter(|&i| m[i] != 0.0).collect();
    let mut memo = std::collections::HashMap::new();
    let full = active.iter().fold(0u64, |acc, &i| acc | (1 << i));
    Ok(face_supremum(cfg, m, x, full, &mut memo))
}

fn face_supremum(
    cfg: &Condition1Config,
    m: &MeanVector,
    x: &[f64],
    set: u64,
    memo: &mut std::collections::HashMap<u64, f64>,
) -> f64 {
    if set == 0 {
        return 0.0;
    }
    if let Some(&v) = memo.get(&set) {
        return v;
    }
    let idx: Vec<usize> = (0..cfg.h()).filter(|i| set & (1 << i) != 0).collect();
    let value = match proportionality(m, x, &idx) {
        Some(alpha) => {
            let (c0, p) = (cfg.c0(), 1.0 / cfg.nu0());
            let g = |eta: f64| if eta < 0.0 { f64::NEG_INFINITY } else { alpha * eta - (c0 * eta).powf(p) };
            maximize_1d(g, 0.1, 1e-13, f64::INFINITY).map_or(f64::INFINITY, |(_, v)| v)
        }
        None => idx
            .iter()
            .map(|&j| face_supremum(cfg, m, x, set & !(1 << j), memo))
            .fold(0.0, f64::max),
    };
    memo.insert(set, value);
    value
}

/// `Some(α)` with `α ≥ 0` when `x_i = α m_i` for every `i` in `idx`.
fn proportionality(m: &MeanVector, x: &[f64], idx: &[usize]) -> Option<f64> {
    let alpha = x[idx[0]] / m[idx[0]];
    let ok = alpha >= 0.0
        && idx
            .iter()
            .all(|&i| (x[i] - alpha * m[i]).abs() <= 1e-12 * (1.0 + x[i].abs()));
    ok.then_some(alpha)
}
