//! Browser bindings: three small operations behind a static page in `www/`.

use ncmd::mittag_leffler::{ml_log_eval, MLOrder};
use ncmd::rate_functions::{closed_form_u, conjugate_fn, ConjugateOptions};
use ncmd::subordinators::{sample_inverse_stable, StableIndex};
use ncmd::RandomStream;
use wasm_bindgen::prelude::*;

fn js_err(e: ncmd::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| lo + step * i as f64)
}

/// `log E_α(x)` on `n` evenly spaced points of `[lo, hi]`, as `[x0, y0, x1, y1, …]`.
#[wasm_bindgen]
pub fn ml_log_curve(alpha: f64, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, JsValue> {
    let order = MLOrder::new(alpha).map_err(js_err)?;
    let mut out = Vec::with_capacity(2 * n);
    for x in linspace(lo, hi, n) {
        out.push(x);
        out.push(ml_log_eval(order, x).map_err(js_err)?);
    }
    Ok(out)
}

/// The rate `U_{ν,κ}` in closed form next to the numerical conjugate of `(κθ²/2)^{1/ν}`,
/// as `[x, closed, numeric, …]` on `[−x_max, x_max]`.
#[wasm_bindgen]
pub fn md_rate_curve(nu: f64, curvature: f64, x_max: f64, n: usize) -> Result<Vec<f64>, JsValue> {
    let index = StableIndex::new(nu).map_err(js_err)?;
    if !(curvature > 0.0) {
        return Err(JsValue::from_str("curvature must be positive"));
    }
    let f = |t: &[f64]| (0.5 * curvature * t[0] * t[0]).powf(1.0 / nu);
    let dom = [(f64::NEG_INFINITY, f64::INFINITY)];
    let opts = ConjugateOptions::default();
    let mut out = Vec::with_capacity(3 * n);
    for x in linspace(-x_max, x_max, n) {
        let numeric = conjugate_fn(f, &dom, &[x], &opts).map_err(js_err)?.value;
        out.extend([x, closed_form_u(index, curvature, x), numeric]);
    }
    Ok(out)
}

/// Normalized histogram of `n` draws of `L_ν(t)` over `[0, upper]`, plus the fraction above `upper`
/// as a final entry.
#[wasm_bindgen]
pub fn inverse_stable_histogram(nu: f64, t: f64, n: usize, bins: usize, upper: f64, seed: u64) -> Result<Vec<f64>, JsValue> {
    let index = StableIndex::new(nu).map_err(js_err)?;
    if bins == 0 || !(upper > 0.0) {
        return Err(JsValue::from_str("need at least one bin and a positive upper edge"));
    }
    let mut rng = RandomStream::new(seed, 0);
    let mut counts = vec![0.0; bins + 1];
    let width = upper / bins as f64;
    for _ in 0..n {
        let l = sample_inverse_stable(index, t, &mut rng).map_err(js_err)?;
        let b = ((l / width) as usize).min(bins);
        counts[b] += 1.0;
    }
    let total = n.max(1) as f64;
    for (i, c) in counts.iter_mut().enumerate() {
        *c /= if i < bins { total * width } else { total };
    }
    Ok(counts)
}
