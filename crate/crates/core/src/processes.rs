//! Fixed-time samplers for the two time-changed constructions.
//!
//! Condition 1: `X_i(t) = S_i(c_i L_i(t) + c_0 L_0(t))`, with `L_0` shared by every component.
//! Condition 2: `X_i(t) = S_i(Σ_j c_ij L_j(t))`, with `k` clocks of a common index shared by every component.

use crate::cumulants::{CumulantModel, MeanVector};
use crate::error::{domain, Error, Result};
use crate::rng::RandomStream;
use crate::subordinators::{sample_inverse_stable, StableIndex};

fn check_components(components: &[CumulantModel]) -> Result<()> {
    if components.is_empty() {
        return Err(Error::Dimension("at least one component is required".into()));
    }
    components.iter().try_for_each(CumulantModel::validate)
}

fn check_coefficient(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        domain(format!("coefficients must be positive, got {c}"))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        domain(format!("time {t} must be finite and non-negative"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition1Config {
    components: Vec<CumulantModel>,
    c0: f64,
    c: Vec<f64>,
    nu0: StableIndex,
    nus: Vec<StableIndex>,
}

impl Condition1Config {
    pub fn new(components: Vec<CumulantModel>, c0: f64, c: Vec<f64>, nu0: f64, nus: Vec<f64>) -> Result<Self> {
        check_components(&components)?;
        let h = components.len();
        if c.len() != h || nus.len() != h {
            return Err(Error::Dimension(format!(
                "{h} components but {} coefficients and {} indices",
                c.len(),
                nus.len()
            )));
        }
        check_coefficient(c0)?;
        c.iter().try_for_each(|&ci| check_coefficient(ci))?;
        let nu0 = StableIndex::new(nu0)?;
        let nus = nus.into_iter().map(StableIndex::new).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            components,
            c0,
            c,
            nu0,
            nus,
        })
    }

    pub fn h(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[CumulantModel] {
        &self.components
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn nu0(&self) -> f64 {
        self.nu0.nu()
    }

    pub fn nus(&self) -> Vec<f64> {
        self.nus.iter().map(|n| n.nu()).collect()
    }

    pub fn nu(&self, i: usize) -> f64 {
        self.nus[i].nu()
    }

    pub fn mean_vector(&self) -> MeanVector {
        MeanVector::from_components(&self.components)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition2Config {
    components: Vec<CumulantModel>,
    c: Vec<Vec<f64>>,
    nu: StableIndex,
}

impl Condition2Config {
    /// `c` is the `h × k` coefficient matrix, one row per component.
    pub fn new(components: Vec<CumulantModel>, c: Vec<Vec<f64>>, nu: f64) -> Result<Self> {
        check_components(&components)?;
        let h = components.len();
        if c.len() != h {
            return Err(Error::Dimension(format!("{h} components but {} coefficient rows", c.len())));
        }
        let k = c[0].len();
        if k == 0 || c.iter().any(|row| row.len() != k) {
            return Err(Error::Dimension("coefficient rows must share a positive length".into()));
        }
        c.iter().flatten().try_for_each(|&v| check_coefficient(v))?;
        Ok(Self {
            components,
            c,
            nu: StableIndex::new(nu)?,
        })
    }

    pub fn h(&self) -> usize {
        self.components.len()
    }

    pub fn k(&self) -> usize {
        self.c[0].len()
    }

    pub fn components(&self) -> &[CumulantModel] {
        &self.components
    }

    pub fn c(&self) -> &[Vec<f64>] {
        &self.c
    }

    pub fn nu(&self) -> f64 {
        self.nu.nu()
    }

    pub fn mean_vector(&self) -> MeanVector {
        MeanVector::from_components(&self.components)
    }
}

/// Either construction, for code that is generic over the condition.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Cond1(Condition1Config),
    Cond2(Condition2Config),
}

impl Model {
    pub fn h(&self) -> usize {
        match self {
            Model::Cond1(c) => c.h(),
            Model::Cond2(c) => c.h(),
        }
    }

    pub fn components(&self) -> &[CumulantModel] {
        match self {
            Model::Cond1(c) => c.components(),
            Model::Cond2(c) => c.components(),
        }
    }

    pub fn mean_vector(&self) -> MeanVector {
        MeanVector::from_components(self.components())
    }

    pub fn sample(&self, t: f64, rng: &mut RandomStream) -> Result<Vec<f64>> {
        match self {
            Model::Cond1(c) => sample_cond1(c, t, rng),
            Model::Cond2(c) => sample_cond2(c, t, rng),
        }
    }
}

/// Source of clock values `L_ν(t)`.
pub trait Clock {
    fn draw(&mut self, nu: StableIndex, t: f64, rng: &mut RandomStream) -> Result<f64>;
}

/// Exact inverse stable draws.
#[derive(Debug, Default, Clone, Copy)]
pub struct InverseStableClock;

impl Clock for InverseStableClock {
    fn draw(&mut self, nu: StableIndex, t: f64, rng: &mut RandomStream) -> Result<f64> {
        sample_inverse_stable(nu, t, rng)
    }
}

/// Draws `(L_0, L_1, …, L_h)` at time `t`, in that order.
pub fn draw_clocks_cond1(
    cfg: &Condition1Config,
    t: f64,
    clock: &mut impl Clock,
    rng: &mut RandomStream,
) -> Result<Vec<f64>> {
    check_time(t)?;
    std::iter::once(cfg.nu0)
        .chain(cfg.nus.iter().copied())
        .map(|nu| clock.draw(nu, t, rng))
        .collect()
}

/// Draws `(L_1, …, L_k)` at time `t`.
pub fn draw_clocks_cond2(
    cfg: &Condition2Config,
    t: f64,
    clock: &mut impl Clock,
    rng: &mut RandomStream,
) -> Result<Vec<f64>> {
    check_time(t)?;
    (0..cfg.k()).map(|_| clock.draw(cfg.nu, t, rng)).collect()
}

/// The random times `c_i L_i + c_0 L_0` of Condition 1, given clocks from [`draw_clocks_cond1`].
pub fn times_cond1(cfg: &Condition1Config, clocks: &[f64]) -> Vec<f64> {
    let l0 = clocks[0];
    cfg.c.iter().zip(&clocks[1..]).map(|(ci, li)| ci * li + cfg.c0 * l0).collect()
}

/// The random times `Σ_j c_ij L_j` of Condition 2.
pub fn times_cond2(cfg: &Condition2Config, clocks: &[f64]) -> Vec<f64> {
    cfg.c.iter().map(|row| row.iter().zip(clocks).map(|(c, l)| c * l).sum()).collect()
}

fn components_at(components: &[CumulantModel], times: &[f64], rng: &mut RandomStream) -> Result<Vec<f64>> {
    components.iter().zip(times).map(|(m, &tau)| m.sample_at(tau, rng)).collect()
}

pub fn sample_cond1_with(
    cfg: &Condition1Config,
    t: f64,
    clock: &mut impl Clock,
    rng: &mut RandomStream,
) -> Result<Vec<f64>> {
    let clocks = draw_clocks_cond1(cfg, t, clock, rng)?;
    components_at(&cfg.components, &times_cond1(cfg, &clocks), rng)
}

pub fn sample_cond2_with(
    cfg: &Condition2Config,
    t: f64,
    clock: &mut impl Clock,
    rng: &mut RandomStream,
) -> Result<Vec<f64>> {
    let clocks = draw_clocks_cond2(cfg, t, clock, rng)?;
    components_at(&cfg.components, &times_cond2(cfg, &clocks), rng)
}

/// One draw of `(S_i(c_i L_i(t) + c_0 L_0(t)))_i`.
pub fn sample_cond1(cfg: &Condition1Config, t: f64, rng: &mut RandomStream) -> Result<Vec<f64>> {
    sample_cond1_with(cfg, t, &mut InverseStableClock, rng)
}

/// One draw of `(S_i(Σ_j c_ij L_j(t)))_i`.
pub fn sample_cond2(cfg: &Condition2Config, t: f64, rng: &mut RandomStream) -> Result<Vec<f64>> {
    sample_cond2_with(cfg, t, &mut InverseStableClock, rng)
}
