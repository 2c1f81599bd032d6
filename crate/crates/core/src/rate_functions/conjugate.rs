//! Numerical Legendre–Fenchel transform `f*(x) = sup_θ {⟨θ, x⟩ − f(θ)}`.
//!
//! The objective is concave whenever `f` is convex, so the search is a coarse grid
//! scan followed by Powell's conjugate-direction ascent with golden-section line
//! searches. Unbounded suprema are detected first by walking outwards along the
//! rays `{−1, 0, 1}^h \ {0}`.

use crate::error::{domain, Result};

use super::limit::LimitCumulant;

const GOLDEN: f64 = 0.618_033_988_749_894_8;
const RESTARTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Grid,
    Ascent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateOptions {
    /// Half-width of the grid box, clipped to the function's domain.
    pub box_radius: f64,
    /// Objective values beyond this count as `+∞`.
    pub divergence_threshold: f64,
    /// Relative tolerance for the ascent stopping rule and line searches.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Skip the ascent and report the best grid point.
    pub grid_only: bool,
    /// Optional per-coordinate constraints `lo ≤ θ_i ≤ hi`.
    pub bounds: Option<Vec<(f64, f64)>>,
}

impl Default for ConjugateOptions {
    fn default() -> Self {
        Self {
            box_radius: 10.0,
            divergence_threshold: 1e8,
            tol: 1e-13,
            max_sweeps: 500,
            grid_only: false,
            bounds: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateResult {
    pub x: Vec<f64>,
    /// Best value found; `+∞` when divergence was detected.
    pub value: f64,
    /// The best probed `θ`; `None` when the supremum is infinite.
    pub argmax_theta: Option<Vec<f64>>,
    pub method: Method,
}

/// Legendre–Fenchel transform of a limit cumulant function at `x`.
pub fn conjugate(f: &LimitCumulant, x: &[f64], opts: &ConjugateOptions) -> Result<ConjugateResult> {
    conjugate_fn(|t| f.eval(t), &f.domain(), x, opts)
}

/// Legendre–Fenchel transform of an arbitrary convex `f` whose effective domain is
/// contained in the box `domain` (open intervals per coordinate).
pub fn conjugate_fn<F>(f: F, domain: &[(f64, f64)], x: &[f64], opts: &ConjugateOptions) -> Result<ConjugateResult>
where
    F: Fn(&[f64]) -> f64,
{
    let h = x.len();
    if x.iter().any(|v| !v.is_finite()) {
        return domain_err(x);
    }
    assert_eq!(domain.len(), h, "domain and x dimensions differ");
    let bounds: Vec<(f64, f64)> = match &opts.bounds {
        Some(b) => {
            assert_eq!(b.len(), h, "bounds and x dimensions differ");
            b.iter().zip(domain).map(|(&(a, b), &(lo, hi))| (a.max(lo), b.min(hi))).collect()
        }
        None => domain.to_vec(),
    };
    let objective = |t: &[f64]| -> f64 {
        if t.iter().zip(&bounds).any(|(v, &(lo, hi))| *v < lo || *v > hi) {
            return f64::NEG_INFINITY;
        }
        let fv = f(t);
        if fv.is_infinite() {
            return f64::NEG_INFINITY;
        }
        t.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - fv
    };
    let method = if opts.grid_only { Method::Grid } else { Method::Ascent };
    let infinite = || ConjugateResult {
        x: x.to_vec(),
        value: f64::INFINITY,
        argmax_theta: None,
        method,
    };

    if diverges(&objective, h, opts.divergence_threshold) {
        return Ok(infinite());
    }

    let (mut theta, mut best) = grid_scan(&objective, &bounds, opts.box_radius);
    if !opts.grid_only {
        // Kinks and active bounds can collapse Powell's direction set; restart with fresh axes
        // until a restart no longer helps.
        for _ in 0..RESTARTS {
            let Some((t, v)) = powell(&objective, theta.clone(), best, opts) else {
                return Ok(infinite());
            };
            let gain = v - best;
            theta = t;
            best = v;
            if h == 1 || gain <= opts.tol * (1.0 + best.abs()) {
                break;
            }
        }
    }
    Ok(ConjugateResult {
        x: x.to_vec(),
        value: best,
        argmax_theta: Some(theta),
        method,
    })
}

fn domain_err(x: &[f64]) -> Result<ConjugateResult> {
    domain(format!("conjugate point must be finite, got {x:?}"))
}

/// Walks outwards along each ray in `{−1,0,1}^h \ {0}` that stays feasible.
fn diverges(objective: &impl Fn(&[f64]) -> f64, h: usize, threshold: f64) -> bool {
    let total = 3usize.pow(h as u32);
    for code in 1..total {
        let mut c = code;
        let dir: Vec<f64> = (0..h)
            .map(|_| {
                let d = (c % 3) as f64 - 1.0;
                c /= 3;
                d
            })
            .collect();
        if dir.iter().all(|&d| d == 0.0) {
            continue;
        }
        let mut r = 1.0;
        while r < 1e12 {
            let p: Vec<f64> = dir.iter().map(|d| d * r).collect();
            let v = objective(&p);
            if v == f64::NEG_INFINITY {
                break;
            }
            if v > threshold {
                return true;
            }
            r *= 2.0;
        }
    }
    false
}

fn grid_points(h: usize) -> usize {
    match h {
        1 => 201,
        2 => 41,
        3 => 15,
        _ => 7,
    }
}

/// Best point of a regular grid over the box, clipped 1% inside finite domain ends.
fn grid_scan(objective: &impl Fn(&[f64]) -> f64, bounds: &[(f64, f64)], radius: f64) -> (Vec<f64>, f64) {
    let h = bounds.len();
    let n = grid_points(h);
    let axes: Vec<(f64, f64)> = bounds
        .iter()
        .map(|&(lo, hi)| {
            let a = if lo.is_finite() { lo + 0.01 * (hi.min(radius) - lo).abs().max(1e-12) } else { -radius };
            let b = if hi.is_finite() { hi - 0.01 * (hi - lo.max(-radius)).abs().max(1e-12) } else { radius };
            (a.max(-radius).min(b), b.min(radius).max(a))
        })
        .collect();
    let mut best_theta = vec![0.0; h];
    let mut best = objective(&best_theta);
    let mut idx = vec![0usize; h];
    let mut point = vec![0.0; h];
    loop {
        for i in 0..h {
            let (a, b) = axes[i];
            point[i] = if n == 1 { a } else { a + (b - a) * idx[i] as f64 / (n - 1) as f64 };
        }
        let v = objective(&point);
        if v > best {
            best = v;
            best_theta.copy_from_slice(&point);
        }
        let mut i = 0;
        while i < h {
            idx[i] += 1;
            if idx[i] < n {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == h {
            break;
        }
    }
    (best_theta, best)
}

/// Maximizes a concave scalar function `g` starting from `0` with initial step `step`.
///
/// Returns `(s*, g(s*))`, or `None` when `g` climbs past `threshold` (unbounded above).
pub fn maximize_1d(g: impl Fn(f64) -> f64, step: f64, tol: f64, threshold: f64) -> Option<(f64, f64)> {
    let g0 = g(0.0);
    // find a direction of ascent
    let (mut dir, mut s) = (1.0, step);
    let mut gs = g(s);
    if gs <= g0 {
        let gm = g(-s);
        if gm <= g0 {
            // the maximum is bracketed by [-s, s]
            return Some(golden(&g, -s, s, tol));
        }
        dir = -1.0;
        gs = gm;
    }
    let mut prev = 0.0;
    loop {
        if gs > threshold {
            return None;
        }
        let next = 2.0 * s;
        let gn = g(dir * next);
        if gn <= gs {
            let (a, b) = (dir * prev, dir * next);
            return Some(golden(&g, a.min(b), a.max(b), tol));
        }
        if next > 1e15 {
            return None;
        }
        prev = s;
        s = next;
        gs = gn;
    }
}

fn golden(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol * (1.0 + c.abs() + d.abs()) {
            break;
        }
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - GOLDEN * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + GOLDEN * (b - a);
            gd = g(d);
        }
    }
    if gc >= gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

/// Powell's method for maximization; `None` means the objective is unbounded.
fn powell(
    objective: &impl Fn(&[f64]) -> f64,
    start: Vec<f64>,
    start_value: f64,
    opts: &ConjugateOptions,
) -> Option<(Vec<f64>, f64)> {
    let h = start.len();
    let mut dirs: Vec<Vec<f64>> = (0..h)
        .map(|i| {
            let mut e = vec![0.0; h];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut p = start;
    let mut fp = start_value;
    let line = |p: &[f64], d: &[f64], scale: f64| {
        let g = |s: f64| {
            let q: Vec<f64> = p.iter().zip(d).map(|(a, b)| a + s * b).collect();
            objective(&q)
        };
        maximize_1d(g, scale, 1e-12, opts.divergence_threshold)
    };
    let step = |p: &[f64]| 0.05 * (1.0 + p.iter().map(|v| v.abs()).fold(0.0, f64::max));
    for _ in 0..opts.max_sweeps {
        let p0 = p.clone();
        let f0 = fp;
        let mut biggest = (0usize, 0.0f64);
        for (k, d) in dirs.iter().enumerate() {
            let (s, v) = line(&p, d, step(&p))?;
            if v > fp {
                if v - fp > biggest.1 {
                    biggest = (k, v - fp);
                }
                for (pi, di) in p.iter_mut().zip(d) {
                    *pi += s * di;
                }
                fp = v;
            }
        }
        if fp - f0 <= opts.tol * (1.0 + fp.abs()) {
            break;
        }
        if h > 1 {
            let new_dir: Vec<f64> = p.iter().zip(&p0).map(|(a, b)| a - b).collect();
            let norm = new_dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                let new_dir: Vec<f64> = new_dir.iter().map(|v| v / norm).collect();
                let (s, v) = line(&p, &new_dir, step(&p))?;
                if v > fp {
                    for (pi, di) in p.iter_mut().zip(&new_dir) {
                        *pi += s * di;
                    }
                    fp = v;
                }
                dirs.remove(biggest.0);
                dirs.push(new_dir);
            }
        }
    }
    if fp > opts.divergence_threshold {
        return None;
    }
    Some((p, fp))
}
