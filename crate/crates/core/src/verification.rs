//! Monte Carlo diagnostics that compare finite-`t` simulation against the limit theory.

use std::fmt;
use std::str::FromStr;

use crate::cumulants::MeanVector;
use crate::error::{domain, Error, Result};
use crate::mc::{collect_samples, estimate_means, map_chunks};
use crate::processes::{sample_cond1, sample_cond2, Condition1Config, Condition2Config, Model};
use crate::rate_functions::closed_form::{closed_form_u, closed_form_v, in_admissible_set};
use crate::rate_functions::conjugate::maximize_1d;
use crate::rate_functions::limit::LimitCumulant;
use crate::rng::RandomStream;
use crate::stats::ks_two_sample;
use crate::subordinators::StableIndex;
use crate::weak_limits::{
    alpha_m, mgf_limit_cond1, mgf_limit_cond2, sample_limit_cond1, sample_limit_cond2, scaled_weak_vector_cond1,
    scaled_weak_vector_cond2,
};

/// Streams reserved per grid point so different `t` never share random numbers.
const STREAMS_PER_POINT: u64 = 1 << 32;

/// Moderate-deviation scaling `a_t = t^{−γ}` with `γ ∈ (0,1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFamily {
    gamma: f64,
}

impl ScalingFamily {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma > 0.0 && gamma < 1.0 {
            Ok(Self { gamma })
        } else {
            domain(format!("gamma must lie in (0,1) so that a_t -> 0 and t a_t -> inf, got {gamma}"))
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn a(&self, t: f64) -> f64 {
        t.powf(-self.gamma)
    }
}

impl Default for ScalingFamily {
    fn default() -> Self {
        Self { gamma: 0.5 }
    }
}

fn check_positive_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        domain(format!("time {t} must be positive and finite"))
    }
}

/// `((t a_t)^{α_m(ν_0 ∨ ν_i)} X_i(t)/t)_i` under Condition 1.
pub fn scaled_md_vector_cond1(
    cfg: &Condition1Config,
    m: &MeanVector,
    scaling: &ScalingFamily,
    t: f64,
    rng: &mut RandomStream,
) -> Result<Vec<f64>> {
    check_positive_time(t)?;
    let ta = t * scaling.a(t);
    let x = sample_cond1(cfg, t, rng)?;
    Ok(x.iter()
        .enumerate()
        .map(|(i, xi)| ta.powf(alpha_m(m, cfg.nu0().max(cfg.nu(i)))) * xi / t)
        .collect())
}

/// `((t a_t)^{α_m(ν)} X_i(t)/t)_i` under Condition 2.
pub fn scaled_md_vector_cond2(
    cfg: &Condition2Config,
    m: &MeanVector,
    scaling: &ScalingFamily,
    t: f64,
    rng: &mut RandomStream,
) -> Result<Vec<f64>> {
    check_positive_time(t)?;
    let factor = (t * scaling.a(t)).powf(alpha_m(m, cfg.nu())) / t;
    Ok(sample_cond2(cfg, t, rng)?.iter().map(|xi| factor * xi).collect())
}

/// A closed set: everything, or the half-space `⟨w, x⟩ ≥ r`.
#[derive(Debug, Clone, PartialEq)]
pub enum EventSet {
    Whole,
    HalfSpace { w: Vec<f64>, r: f64 },
}

impl EventSet {
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            EventSet::Whole => true,
            EventSet::HalfSpace { w, r } => w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() >= *r,
        }
    }

    /// Checks the set against the dimension `h`.
    pub fn check_dim(&self, h: usize) -> Result<()> {
        match self {
            EventSet::HalfSpace { w, .. } if w.len() > h => Err(Error::Dimension(format!(
                "set refers to x{} but the model has {h} components",
                w.len()
            ))),
            _ => Ok(()),
        }
    }

    fn padded(&self, h: usize) -> EventSet {
        match self {
            EventSet::HalfSpace { w, r } => {
                let mut w = w.clone();
                w.resize(h, 0.0);
                EventSet::HalfSpace { w, r: *r }
            }
            EventSet::Whole => EventSet::Whole,
        }
    }
}

impl fmt::Display for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventSet::Whole => write!(f, "all"),
            EventSet::HalfSpace { w, r } => {
                let mut first = true;
                for (i, &c) in w.iter().enumerate() {
                    if c == 0.0 {
                        continue;
                    }
                    let sign = if c < 0.0 { "-" } else if first { "" } else { "+" };
                    let mag = c.abs();
                    if mag == 1.0 {
                        write!(f, "{sign}x{}", i + 1)?;
                    } else {
                        write!(f, "{sign}{mag}*x{}", i + 1)?;
                    }
                    first = false;
                }
                if first {
                    write!(f, "0")?;
                }
                write!(f, ">={r}")
            }
        }
    }
}

impl FromStr for EventSet {
    type Err = Error;

    /// Parses `all`, or a linear inequality such as `x1>=0.5` or `2*x1-0.5*x2<=3`.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.eq_ignore_ascii_case("all") {
            return Ok(EventSet::Whole);
        }
        let bad = |why: &str| Error::Domain(format!("cannot parse set '{s}': {why}"));
        let (lhs, rhs, flip) = if let Some((l, r)) = s.split_once(">=") {
            (l, r, false)
        } else if let Some((l, r)) = s.split_once("<=") {
            (l, r, true)
        } else {
            return Err(bad("expected >= or <="));
        };
        let r: f64 = rhs.parse().map_err(|_| bad("right-hand side is not a number"))?;
        if lhs.is_empty() {
            return Err(bad("empty left-hand side"));
        }
        // split before every sign that is not part of an exponent
        let mut terms: Vec<String> = Vec::new();
        for ch in lhs.chars() {
            let starts_term = matches!(ch, '+' | '-')
                && terms.last().is_some_and(|t| !t.is_empty() && !t.ends_with(['e', 'E', '+', '-']));
            if starts_term || terms.is_empty() {
                terms.push(String::new());
            }
            terms.last_mut().expect("non-empty").push(ch);
        }
        let mut w: Vec<f64> = Vec::new();
        for term in &terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(b) => (-1.0, b),
                None => (1.0, term.strip_prefix('+').unwrap_or(term)),
            };
            let (coef, var) = body.split_once('x').ok_or_else(|| bad("each term needs a variable x<i>"))?;
            let coef = coef.trim_end_matches('*');
            let coef: f64 = if coef.is_empty() { 1.0 } else { coef.parse().map_err(|_| bad("bad coefficient"))? };
            let index: usize = var.parse().map_err(|_| bad("bad variable index"))?;
            if index == 0 {
                return Err(bad("variables are numbered from x1"));
            }
            if w.len() < index {
                w.resize(index, 0.0);
            }
            w[index - 1] += sign * coef;
        }
        if flip {
            w.iter_mut().for_each(|v| *v = -*v);
        }
        Ok(EventSet::HalfSpace {
            w,
            r: if flip { -r } else { r },
        })
    }
}

/// `inf_{⟨w,x⟩ ≥ r} f*(x)` through the dual `sup_{s ≥ 0} {s r − f(s w)}`; `0` when `r ≤ 0`.
pub fn half_space_infimum(f: impl Fn(&[f64]) -> f64, w: &[f64], r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let g = |s: f64| {
        if s < 0.0 {
            return f64::NEG_INFINITY;
        }
        let p: Vec<f64> = w.iter().map(|wi| s * wi).collect();
        let v = f(&p);
        if v.is_infinite() {
            f64::NEG_INFINITY
        } else {
            s * r - v
        }
    };
    maximize_1d(g, 0.05, 1e-13, 1e8).map_or(f64::INFINITY, |(_, v)| v.max(0.0))
}

/// `inf_A I_MD` for the model's moderate-deviation rate function.
pub fn md_target(model: &Model, m: &MeanVector, set: &EventSet) -> f64 {
    let (w, r) = match set.padded(model.h()) {
        EventSet::Whole => return 0.0,
        EventSet::HalfSpace { w, r } => (w, r),
    };
    if r <= 0.0 {
        return 0.0;
    }
    if let (Model::Cond1(cfg), 1) = (model, model.h()) {
        // on a ray the infimum of a convex rate vanishing at 0 sits at the boundary point
        let x = r / w[0];
        if w[0] != 0.0 {
            if cfg.nu0() < cfg.nu(0) {
                let nu = StableIndex::new(cfg.nu(0)).expect("validated");
                return if m.is_zero() {
                    closed_form_u(nu, cfg.c()[0] * cfg.components()[0].curvature(), x)
                } else {
                    closed_form_v(nu, cfg.c()[0] * m[0], x)
                };
            }
            if cfg.nu0() > cfg.nu(0) && !m.is_zero() {
                let nu0 = StableIndex::new(cfg.nu0()).expect("validated");
                return if in_admissible_set(m, &[x]) {
                    closed_form_v(nu0, cfg.c0() * m[0], x)
                } else {
                    f64::INFINITY
                };
            }
        }
    }
    let f = match model {
        Model::Cond1(c) => LimitCumulant::PsiTilde(c.clone(), m.clone()),
        Model::Cond2(c) => LimitCumulant::UpsilonTilde(c.clone(), m.clone()),
    };
    half_space_infimum(|t| f.eval(t), &w, r)
}

/// `inf_A I_LD` for the model's reference rate function.
pub fn ld_target(model: &Model, set: &EventSet) -> f64 {
    let (w, r) = match set.padded(model.h()) {
        EventSet::Whole => return 0.0,
        EventSet::HalfSpace { w, r } => (w, r),
    };
    let f = match model {
        Model::Cond1(c) => LimitCumulant::Psi(c.clone()),
        Model::Cond2(c) => LimitCumulant::Upsilon(c.clone()),
    };
    half_space_infimum(|t| f.eval(t), &w, r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticRow {
    pub t: f64,
    pub hits: u64,
    pub n: u64,
    /// `−(1/v_t) log P̂`, `+∞` with zero hits.
    pub estimate: f64,
    /// Delta-method standard error; `+∞` with zero hits.
    pub se: f64,
    /// Set when the grid point produced no hits.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdDiagnostic {
    pub set: EventSet,
    pub target: f64,
    pub rows: Vec<DiagnosticRow>,
}

/// Counts hits of `set` among `n` draws of `sample(t, rng)` at each `t`, and turns the
/// hit rate into `−(1/speed(t)) log P̂`.
pub fn estimate_rate<S, V>(
    sample: S,
    speed: V,
    set: &EventSet,
    t_grid: &[f64],
    n: u64,
    seed: u64,
    target: f64,
) -> Result<MdDiagnostic>
where
    S: Fn(f64, &mut RandomStream) -> Result<Vec<f64>> + Sync + Send,
    V: Fn(f64) -> f64,
{
    let mut rows = Vec::with_capacity(t_grid.len());
    for (k, &t) in t_grid.iter().enumerate() {
        let counts = map_chunks(n as usize, seed, k as u64 * STREAMS_PER_POINT, |rng, len| -> Result<u64> {
            let mut hits = 0;
            for _ in 0..len {
                if set.contains(&sample(t, rng)?) {
                    hits += 1;
                }
            }
            Ok(hits)
        });
        let hits = counts.into_iter().sum::<Result<u64>>()?;
        let v = speed(t);
        let p = hits as f64 / n as f64;
        let (estimate, se) = if hits == 0 {
            (f64::INFINITY, f64::INFINITY)
        } else {
            let se_p = (p * (1.0 - p) / n as f64).sqrt();
            ((-p.ln() / v).max(0.0), se_p / (p * v))
        };
        rows.push(DiagnosticRow {
            t,
            hits,
            n,
            estimate,
            se,
            flagged: hits == 0,
        });
    }
    Ok(MdDiagnostic {
        set: set.clone(),
        target,
        rows,
    })
}

/// Moderate-deviation diagnostic: speed `1/a_t`.
pub fn estimate_md_rate(
    model: &Model,
    m: &MeanVector,
    set: &EventSet,
    scaling: &ScalingFamily,
    t_grid: &[f64],
    n: u64,
    seed: u64,
) -> Result<MdDiagnostic> {
    set.check_dim(model.h())?;
    t_grid.iter().try_for_each(|&t| check_positive_time(t))?;
    let target = md_target(model, m, set);
    let sample = |t: f64, rng: &mut RandomStream| match model {
        Model::Cond1(c) => scaled_md_vector_cond1(c, m, scaling, t, rng),
        Model::Cond2(c) => scaled_md_vector_cond2(c, m, scaling, t, rng),
    };
    estimate_rate(sample, |t| 1.0 / scaling.a(t), set, t_grid, n, seed, target)
}

/// Reference large-deviation diagnostic for `X(t)/t`: speed `t`.
pub fn estimate_ld_rate(model: &Model, set: &EventSet, t_grid: &[f64], n: u64, seed: u64) -> Result<MdDiagnostic> {
    set.check_dim(model.h())?;
    t_grid.iter().try_for_each(|&t| check_positive_time(t))?;
    let target = ld_target(model, set);
    let sample = |t: f64, rng: &mut RandomStream| {
        let x = model.sample(t, rng)?;
        Ok(x.iter().map(|v| v / t).collect())
    };
    estimate_rate(sample, |t| t, set, t_grid, n, seed, target)
}

/// Weak-convergence check at one `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakRow {
    pub t: f64,
    /// Per-component two-sample KS distance between the scaled process and the limit.
    pub ks: Vec<f64>,
    /// `(MC MGF of the scaled process at θ − limit MGF) / SE`.
    pub mgf_z: f64,
}

/// Compares the rescaled process at each `t` with independent draws of its weak limit.
///
/// KS distance says nothing for a component whose limit is a point mass (a zero-mean
/// component when `m ≠ 0`): it stays near 1/2 however close the laws are.
pub fn weak_convergence(model: &Model, theta: &[f64], t_grid: &[f64], n: usize, seed: u64) -> Result<Vec<WeakRow>> {
    let h = model.h();
    if theta.len() != h {
        return Err(Error::Dimension(format!("theta has {} entries, expected {h}", theta.len())));
    }
    t_grid.iter().try_for_each(|&t| check_positive_time(t))?;
    let m = model.mean_vector();
    let limit_draw = |rng: &mut RandomStream| -> Result<Vec<f64>> {
        Ok(match model {
            Model::Cond1(c) => sample_limit_cond1(c, &m, rng)?.values,
            Model::Cond2(c) => sample_limit_cond2(c, &m, rng)?.values,
        })
    };
    let limit = collect_samples(n, seed, 0, limit_draw).into_iter().collect::<Result<Vec<_>>>()?;
    let limit_mgf = match model {
        Model::Cond1(c) => mgf_limit_cond1(c, &m, theta)?,
        Model::Cond2(c) => mgf_limit_cond2(c, &m, theta)?,
    };
    let mut rows = Vec::new();
    for (k, &t) in t_grid.iter().enumerate() {
        let base = (k as u64 + 1) * STREAMS_PER_POINT;
        let scaled = |rng: &mut RandomStream| -> Result<Vec<f64>> {
            match model {
                Model::Cond1(c) => scaled_weak_vector_cond1(c, &m, t, rng),
                Model::Cond2(c) => scaled_weak_vector_cond2(c, &m, t, rng),
            }
        };
        let draws = collect_samples(n, seed, base, scaled).into_iter().collect::<Result<Vec<_>>>()?;
        let ks = (0..h)
            .map(|i| {
                let a: Vec<f64> = draws.iter().map(|d| d[i]).collect();
                let b: Vec<f64> = limit.iter().map(|d| d[i]).collect();
                ks_two_sample(&a, &b)
            })
            .collect();
        let mgf = estimate_means(n, seed, base + STREAMS_PER_POINT / 2, 1, |rng, out| {
            let x = scaled(rng).expect("validated inputs");
            out[0] = x.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>().exp();
        })[0];
        let mgf_z = if mgf.se > 0.0 { (mgf.mean - limit_mgf) / mgf.se } else { 0.0 };
        rows.push(WeakRow { t, ks, mgf_z });
    }
    Ok(rows)
}
