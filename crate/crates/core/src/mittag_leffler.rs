//! One-parameter Mittag-Leffler function `E_α(x) = Σ_k x^k / Γ(αk + 1)` for
//! `α ∈ (0, 1]` and real `x`.
//!
//! Evaluation regimes:
//!
//! * `x ≥ 0`, `x^{1/α} ≤ 30`: power series with compensated summation.
//! * `x ≥ 0`, `x^{1/α} > 30`: exponential asymptotics
//!   `E_α(x) = e^{x^{1/α}}/α − Σ_{k≥1} x^{-k}/Γ(1 − αk)`, kept on log scale.
//! * `x < 0`, `|x|^{1/α} ≤ 4`: alternating series.
//! * `x < 0`, larger `|x|`: the completely monotone integral representation
//!   `E_α(−y) = sin(απ)/(απ) ∫_0^∞ exp(−(yv)^{1/α}) / (v² + 2v cos(απ) + 1) dv`,
//!   then the algebraic asymptotic series for `|x| ≥ 1000`.
//!
//! `α = 1` takes the same paths on the positive side and uses `E_1(x) = 1/E_1(−x)`
//! on the negative side.

use std::f64::consts::PI;

use quadrature::double_exponential;
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{domain, Error, Result};

/// Crossover between the series and the exponential asymptotics, on `x^{1/α}`.
pub const SERIES_CROSSOVER: f64 = 30.0;
/// Largest `|x|^{1/α}` handled by the alternating series for negative `x`.
pub const NEGATIVE_SERIES_LIMIT: f64 = 4.0;
/// From this `|x|` on, negative arguments use the algebraic asymptotic series.
pub const NEGATIVE_ASYMPTOTIC_FROM: f64 = 1000.0;

/// Largest value of `ln E_α(x)` representable by `ml_eval`.
const LOG_OVERFLOW: f64 = 709.0;

/// Order `α ∈ (0, 1]` of the Mittag-Leffler function.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MLOrder(f64);

impl MLOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha <= 1.0 {
            Ok(Self(alpha))
        } else {
            domain(format!("Mittag-Leffler order {alpha} outside (0, 1]"))
        }
    }

    pub fn alpha(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for MLOrder {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

/// `E_α(x)`.
///
/// Fails with [`Error::Overflow`] when the value exceeds the `f64` range; use
/// [`ml_log_eval`] there.
pub fn ml_eval(order: MLOrder, x: f64) -> Result<f64> {
    check_finite(x)?;
    let alpha = order.alpha();
    if x >= 0.0 {
        let z = x.powf(1.0 / alpha);
        if z <= SERIES_CROSSOVER {
            Ok(series(alpha, x))
        } else {
            let log_value = log_positive_asymptotic(alpha, x);
            if log_value > LOG_OVERFLOW {
                Err(Error::Overflow(format!(
                    "E_{alpha}({x}) = exp({log_value:.6e}); use ml_log_eval"
                )))
            } else {
                Ok(log_value.exp())
            }
        }
    } else {
        Ok(negative(alpha, -x))
    }
}

/// `ln E_α(x)`, valid for every finite `x`.
pub fn ml_log_eval(order: MLOrder, x: f64) -> Result<f64> {
    check_finite(x)?;
    let alpha = order.alpha();
    if x >= 0.0 {
        if x.powf(1.0 / alpha) <= SERIES_CROSSOVER {
            Ok(series(alpha, x).ln())
        } else {
            Ok(log_positive_asymptotic(alpha, x))
        }
    } else if alpha == 1.0 {
        Ok(x)
    } else {
        Ok(negative(alpha, -x).ln())
    }
}

/// `lim_{s→∞} (1/s) ln E_α(s^α y)`: `y^{1/α}` for `y ≥ 0` and `0` for `y < 0`.
///
/// This is the scalar kernel from which the limit cumulant functions are built.
pub fn ml_scaled_log_limit(order: MLOrder, y: f64) -> f64 {
    if y > 0.0 {
        y.powf(1.0 / order.alpha())
    } else {
        0.0
    }
}

fn check_finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        domain(format!("Mittag-Leffler argument {x} is not finite"))
    }
}

/// `1/Γ(x)`, zero at the poles `x = 0, −1, −2, …`.
fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// `x^k / Γ(αk + 1)`.
fn series_term(alpha: f64, x: f64, k: i32) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let arg = alpha * k as f64 + 1.0;
    let power = x.powi(k);
    if arg < 170.0 && power.is_finite() && power != 0.0 {
        power / gamma(arg)
    } else {
        let magnitude = (k as f64 * x.abs().ln() - ln_gamma(arg)).exp();
        if x < 0.0 && k % 2 == 1 {
            -magnitude
        } else {
            magnitude
        }
    }
}

/// Kahan-compensated power series.
fn series(alpha: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    // Terms peak near αk ≈ |x|^{1/α}; keep going well past that.
    let peak = (x.abs().powf(1.0 / alpha) / alpha).ceil() as i32;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut scale = 0.0f64;
    for k in 0..20_000 {
        let term = series_term(alpha, x, k);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        scale = scale.max(term.abs());
        if k > peak + 4 && term.abs() <= 1e-18 * scale {
            break;
        }
    }
    sum
}

/// `ln E_α(x)` from the exponential asymptotics, for large positive `x`.
fn log_positive_asymptotic(alpha: f64, x: f64) -> f64 {
    let z = x.powf(1.0 / alpha);
    let lead = z - alpha.ln();
    // E = e^z/α · (1 + α e^{-z} R), R = −Σ x^{-k}/Γ(1 − αk).
    let mut r = 0.0;
    let mut xk = 1.0;
    for k in 1..=10 {
        xk /= x;
        r -= xk * recip_gamma(1.0 - alpha * k as f64);
    }
    lead + (alpha * (-z).exp() * r).ln_1p()
}

/// `E_α(−y)` for `y > 0`.
fn negative(alpha: f64, y: f64) -> f64 {
    if alpha == 1.0 {
        return 1.0 / log_or_series_exp(y);
    }
    if y.powf(1.0 / alpha) <= NEGATIVE_SERIES_LIMIT {
        series(alpha, -y)
    } else if y >= NEGATIVE_ASYMPTOTIC_FROM {
        negative_asymptotic(alpha, y)
    } else {
        negative_integral(alpha, y)
    }
}

/// `E_1(y) = e^y` through the generic positive-side paths.
fn log_or_series_exp(y: f64) -> f64 {
    if y <= SERIES_CROSSOVER {
        series(1.0, y)
    } else {
        log_positive_asymptotic(1.0, y).exp()
    }
}

/// `E_α(−y) ≈ Σ_{k≥1} (−1)^{k+1} y^{-k} / Γ(1 − αk)`, truncated at the smallest term.
fn negative_asymptotic(alpha: f64, y: f64) -> f64 {
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    let mut yk = 1.0;
    for k in 1..=30 {
        yk /= y;
        let term = yk * recip_gamma(1.0 - alpha * k as f64);
        if term != 0.0 && term.abs() > last {
            break;
        }
        if term != 0.0 {
            last = term.abs();
        }
        sum += if k % 2 == 1 { term } else { -term };
    }
    sum
}

/// Integral representation of `E_α(−y)` for `0 < α < 1`.
fn negative_integral(alpha: f64, y: f64) -> f64 {
    let phi = alpha * PI;
    let (s, c) = phi.sin_cos();
    let inv_alpha = 1.0 / alpha;
    let f = |v: f64| (-(y * v).powf(inv_alpha)).exp() / (v * v + 2.0 * v * c + 1.0);
    // The denominator is smallest at v = −cos(απ); split there.
    let peak = (-c).max(0.0);
    let head = if peak > 0.0 {
        double_exponential::integrate(f, 0.0, peak, 1e-14).integral
    } else {
        0.0
    };
    let tail = double_exponential::integrate(
        |u: f64| {
            let w = 1.0 - u;
            f(peak + u / w) / (w * w)
        },
        0.0,
        1.0,
        1e-14,
    )
    .integral;
    s / phi * (head + tail)
}
