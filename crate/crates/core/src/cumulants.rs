//! Light-tailed Lévy components: cumulant generating functions
//! `κ(θ) = ln E[e^{θ S(1)}]`, their effective domains, and marginal samplers.

use rand_distr::{Distribution, Gamma, Normal, Poisson};

use crate::error::{domain, Result};
use crate::rng::RandomStream;

/// Open interval `(lo, hi)` containing 0 on which `κ` is finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaDomain {
    pub lo: f64,
    pub hi: f64,
}

impl ThetaDomain {
    pub const REAL_LINE: ThetaDomain = ThetaDomain {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn contains(&self, theta: f64) -> bool {
        theta > self.lo && theta < self.hi
    }
}

/// A one-dimensional Lévy process with exponential moments near the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CumulantModel {
    /// `μt + σB(t)`, with `sigma2 = σ²`.
    BrownianDrift { mu: f64, sigma2: f64 },
    Poisson { lambda: f64 },
    /// Compound Poisson with rate `lambda` and Exp(`beta`) jumps; `κ` has a pole at `beta`.
    CompoundPoissonExp { lambda: f64, beta: f64 },
    /// Gamma subordinator: `S(t) ~ Gamma(shape = a t, rate = b)`.
    GammaSubordinator { a: f64, b: f64 },
    /// `S(t) = μt`, the case `κ″(0) = 0`.
    Deterministic { mu: f64 },
}

impl CumulantModel {
    /// Checks the parameter constraints of each kind.
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            CumulantModel::BrownianDrift { mu, sigma2 } => mu.is_finite() && sigma2 >= 0.0 && sigma2.is_finite(),
            CumulantModel::Poisson { lambda } => lambda > 0.0 && lambda.is_finite(),
            CumulantModel::CompoundPoissonExp { lambda, beta } => {
                lambda > 0.0 && beta > 0.0 && lambda.is_finite() && beta.is_finite()
            }
            CumulantModel::GammaSubordinator { a, b } => a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite(),
            CumulantModel::Deterministic { mu } => mu.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            domain(format!("invalid component parameters: {self:?}"))
        }
    }

    pub fn theta_domain(&self) -> ThetaDomain {
        match *self {
            CumulantModel::CompoundPoissonExp { beta, .. } => ThetaDomain {
                lo: f64::NEG_INFINITY,
                hi: beta,
            },
            CumulantModel::GammaSubordinator { b, .. } => ThetaDomain {
                lo: f64::NEG_INFINITY,
                hi: b,
            },
            _ => ThetaDomain::REAL_LINE,
        }
    }

    /// `κ(θ)`; `+∞` outside the effective domain.
    pub fn kappa(&self, theta: f64) -> f64 {
        match *self {
            CumulantModel::BrownianDrift { mu, sigma2 } => mu * theta + 0.5 * sigma2 * theta * theta,
            CumulantModel::Poisson { lambda } => lambda * theta.exp_m1(),
            CumulantModel::CompoundPoissonExp { lambda, beta } => {
                if theta < beta {
                    lambda * theta / (beta - theta)
                } else {
                    f64::INFINITY
                }
            }
            CumulantModel::GammaSubordinator { a, b } => {
                if theta < b {
                    -a * (-theta / b).ln_1p()
                } else {
                    f64::INFINITY
                }
            }
            CumulantModel::Deterministic { mu } => mu * theta,
        }
    }

    /// `(κ′(0), κ″(0))`, the mean and variance rates.
    pub fn mean_and_curvature(&self) -> (f64, f64) {
        match *self {
            CumulantModel::BrownianDrift { mu, sigma2 } => (mu, sigma2),
            CumulantModel::Poisson { lambda } => (lambda, lambda),
            CumulantModel::CompoundPoissonExp { lambda, beta } => (lambda / beta, 2.0 * lambda / (beta * beta)),
            CumulantModel::GammaSubordinator { a, b } => (a / b, a / (b * b)),
            CumulantModel::Deterministic { mu } => (mu, 0.0),
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean_and_curvature().0
    }

    pub fn curvature(&self) -> f64 {
        self.mean_and_curvature().1
    }

    /// One draw of `S(τ)`.
    pub fn sample_at(&self, tau: f64, rng: &mut RandomStream) -> Result<f64> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return domain(format!("time {tau} must be finite and non-negative"));
        }
        if tau == 0.0 {
            return Ok(0.0);
        }
        Ok(match *self {
            CumulantModel::BrownianDrift { mu, sigma2 } => {
                let z: f64 = rng.sample_std_normal();
                mu * tau + (sigma2 * tau).sqrt() * z
            }
            CumulantModel::Poisson { lambda } => poisson(lambda * tau, rng),
            CumulantModel::CompoundPoissonExp { lambda, beta } => {
                let jumps = poisson(lambda * tau, rng);
                if jumps == 0.0 {
                    0.0
                } else {
                    // sum of `jumps` Exp(β) variables
                    Gamma::new(jumps, 1.0 / beta).expect("valid gamma").sample(rng)
                }
            }
            CumulantModel::GammaSubordinator { a, b } => Gamma::new(a * tau, 1.0 / b).expect("valid gamma").sample(rng),
            CumulantModel::Deterministic { mu } => mu * tau,
        })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            CumulantModel::BrownianDrift { .. } => "brownian",
            CumulantModel::Poisson { .. } => "poisson",
            CumulantModel::CompoundPoissonExp { .. } => "compound-poisson-exp",
            CumulantModel::GammaSubordinator { .. } => "gamma",
            CumulantModel::Deterministic { .. } => "deterministic",
        }
    }
}

fn poisson(mean: f64, rng: &mut RandomStream) -> f64 {
    if mean <= 0.0 {
        0.0
    } else {
        Poisson::new(mean).expect("positive finite mean").sample(rng)
    }
}

impl RandomStream {
    pub fn sample_std_normal(&mut self) -> f64 {
        Normal::new(0.0, 1.0).expect("unit normal").sample(self)
    }
}

/// The vector `m = (κ′_1(0), …, κ′_h(0))`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanVector(Vec<f64>);

impl MeanVector {
    pub fn new(m: Vec<f64>) -> Self {
        Self(m)
    }

    pub fn from_components(components: &[CumulantModel]) -> Self {
        Self(components.iter().map(CumulantModel::mean).collect())
    }

    /// `true` exactly when every component is 0; selects the `m = 0` branch.
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&m| m == 0.0)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Index<usize> for MeanVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}
