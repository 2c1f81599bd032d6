//! Stable subordinators and their inverses.

use std::f64::consts::PI;


use crate::error::{domain, Error, Result};
use crate::mittag_leffler::{ml_eval, MLOrder};
pub use crate::rng::RandomStream;

/// Stability index `ν ∈ (0,1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct StableIndex(f64);

impl StableIndex {
    pub fn new(nu: f64) -> Result<Self> {
        if nu > 0.0 && nu < 1.0 {
            Ok(Self(nu))
        } else {
            domain(format!("nu out of (0,1): {nu}"))
        }
    }

    pub fn nu(self) -> f64 {
        self.0
    }

    pub fn ml_order(self) -> MLOrder {
        MLOrder::new(self.0).expect("stable index is a valid order")
    }
}

impl TryFrom<f64> for StableIndex {
    type Error = Error;

    fn try_from(nu: f64) -> Result<Self> {
        Self::new(nu)
    }
}

/// One draw of `S_ν(1)`, with Laplace transform `E[e^{−λS}] = e^{−λ^ν}` (Kanter's representation).
pub fn sample_stable_unit(nu: StableIndex, rng: &mut RandomStream) -> f64 {
    let nu = nu.0;
    let u = PI * rng.open01();
    let e = -rng.open01().ln();
    let a = ((nu * u).sin().powf(nu) * ((1.0 - nu) * u).sin().powf(1.0 - nu) / u.sin()).powf(1.0 / (1.0 - nu));
    (a / e).powf((1.0 - nu) / nu)
}

/// One draw of `L_ν(t) = inf{s ≥ 0 : S_ν(s) > t}` through `L_ν(t) =d (t / S_ν(1))^ν`.
pub fn sample_inverse_stable(nu: StableIndex, t: f64, rng: &mut RandomStream) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("time {t} must be finite and non-negative"));
    }
    let s = sample_stable_unit(nu, rng);
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok((t / s).powf(nu.0))
}

/// `E[e^{θ L_ν(t)}] = E_ν(θ t^ν)`.
pub fn mgf_inverse_stable(nu: StableIndex, theta: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("time {t} must be finite and non-negative"));
    }
    ml_eval(nu.ml_order(), theta * t.powf(nu.0))
}

/// Stable MGF `E[e^{θ S_ν(t)}]`: `e^{−t(−θ)^ν}` for `θ ≤ 0`, `+∞` otherwise.
pub fn mgf_stable(nu: StableIndex, theta: f64, t: f64) -> f64 {
    if theta > 0.0 {
        f64::INFINITY
    } else {
        (-t * (-theta).powf(nu.0)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{collect_samples, estimate_mean};
    use crate::stats::{ks_critical, ks_two_sample};
    use statrs::function::erf::{erf, erfc};
    use statrs::function::gamma::gamma;

    fn idx(nu: f64) -> StableIndex {
        StableIndex::new(nu).unwrap()
    }

    #[test]
    fn index_validation() {
        assert!(StableIndex::new(0.0).is_err());
        assert!(StableIndex::new(1.0).is_err());
        assert!(StableIndex::try_from(f64::NAN).is_err());
        assert_eq!(idx(0.3).nu(), 0.3);
    }

    #[test]
    fn stable_laplace_transform() {
        let nu = idx(0.5);
        for (lambda, target) in [(1.0f64, (-1.0f64).exp()), (4.0, (-2.0f64).exp())] {
            let est = estimate_mean(100_000, 1, 0, |rng| (-lambda * sample_stable_unit(nu, rng)).exp());
            assert!(est.within_se(target, 3.0), "λ={lambda}: {est:?}");
        }
        let mut rng = RandomStream::new(2, 0);
        for nu in [0.05, 0.3, 0.7, 0.95] {
            for _ in 0..10_000 {
                assert!(sample_stable_unit(idx(nu), &mut rng) > 0.0);
            }
        }
    }

    #[test]
    fn stable_mgf_is_infinite_for_positive_theta() {
        assert_eq!(mgf_stable(idx(0.5), 0.1, 1.0), f64::INFINITY);
        assert!((mgf_stable(idx(0.5), -4.0, 1.0) - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn inverse_stable_moments() {
        let nu = idx(0.5);
        let mut rng = RandomStream::new(0, 0);
        assert_eq!(sample_inverse_stable(nu, 0.0, &mut rng).unwrap(), 0.0);
        assert!(sample_inverse_stable(nu, -1.0, &mut rng).is_err());

        let mean = estimate_mean(100_000, 3, 0, |rng| sample_inverse_stable(nu, 1.0, rng).unwrap());
        assert!(mean.within_se(1.0 / gamma(1.5), 3.0), "{mean:?}");
        let lap = estimate_mean(100_000, 4, 0, |rng| (-sample_inverse_stable(nu, 1.0, rng).unwrap()).exp());
        assert!(lap.within_se(1f64.exp() * erfc(1.0), 3.0), "{lap:?}");
    }

    #[test]
    fn mgf_examples() {
        let nu = idx(0.5);
        assert_eq!(mgf_inverse_stable(nu, 0.0, 7.0).unwrap(), 1.0);
        let neg = mgf_inverse_stable(nu, -1.0, 1.0).unwrap();
        assert!((neg - 0.427583576155807).abs() < 1e-12, "{neg}");
        let pos = mgf_inverse_stable(nu, 1.0, 1.0).unwrap();
        assert!((pos - 1f64.exp() * (1.0 + erf(1.0))).abs() < 1e-10);
    }

    #[test]
    fn mgf_matches_simulation() {
        for (nu, t) in [(0.3, 2.0), (0.7, 1.0)] {
            let nu = idx(nu);
            for theta in [-2.0, -1.0, -0.5, 0.5] {
                let est = estimate_mean(100_000, 9, 0, |rng| {
                    (theta * sample_inverse_stable(nu, t, rng).unwrap()).exp()
                });
                let target = mgf_inverse_stable(nu, theta, t).unwrap();
                assert!(est.within_se(target, 3.0), "θ={theta}: {est:?} vs {target}");
            }
        }
    }

    #[test]
    fn self_similarity_in_distribution() {
        let nu = idx(0.6);
        let t = 5.0;
        let n = 100_000;
        let direct = collect_samples(n, 21, 0, |rng| sample_inverse_stable(nu, t, rng).unwrap());
        let scaled = collect_samples(n, 22, 0, |rng| t.powf(0.6) * sample_inverse_stable(nu, 1.0, rng).unwrap());
        let d = ks_two_sample(&direct, &scaled);
        assert!(d < ks_critical(1e-3, n, n), "KS {d}");
    }

    #[test]
    fn first_passage_oracle() {
        // oracle: walk S_ν on a grid of step Δ and stop at the first exceedance of t
        let nu = idx(0.5);
        let (t, dt, n) = (1.0, 1e-3f64, 20_000);
        let step_scale = dt.powf(1.0 / nu.nu());
        let walked = collect_samples(n, 31, 0, |rng| {
            let mut s = 0.0;
            let mut level = 0.0;
            while s <= t {
                s += step_scale * sample_stable_unit(nu, rng);
                level += dt;
            }
            level
        });
        let exact = collect_samples(n, 32, 0, |rng| sample_inverse_stable(nu, t, rng).unwrap());
        let d = ks_two_sample(&walked, &exact);
        assert!(d < 0.02, "KS {d}");
    }
}
