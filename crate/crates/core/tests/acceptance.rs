//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

use clap::Parser;
use ncmd::cli::{render, Cli};
use ncmd::cumulants::{CumulantModel, MeanVector};
use ncmd::mc::estimate_mean;
use ncmd::mittag_leffler::{ml_eval, ml_log_eval, MLOrder, NEGATIVE_ASYMPTOTIC_FROM, NEGATIVE_SERIES_LIMIT, SERIES_CROSSOVER};
use ncmd::processes::{Condition1Config, Condition2Config, Model};
use ncmd::rate_functions::{
    case2_restricted_supremum, closed_form_u, conjugate, conjugate_fn, in_admissible_set, md_rate_explicit_case1,
    md_rate_explicit_case2, optimizer_u, optimizer_v, psi_tilde, stationary_eta, ConjugateOptions, LimitCumulant,
};
use ncmd::stats::ks_critical;
use ncmd::subordinators::{mgf_inverse_stable, sample_inverse_stable, StableIndex};
use ncmd::verification::{estimate_md_rate, weak_convergence, EventSet, ScalingFamily};
use ncmd::weak_limits::{mgf_limit_cond1, mgf_limit_cond2, sample_limit_cond1, sample_limit_cond2};
use statrs::function::erf::erfc;

const ML_EXP_REL: f64 = 1e-12;
const ML_HALF_REL: f64 = 1e-8;
const ML_BRANCH_JUMP: f64 = 1e-8;
const MGF_SE: f64 = 3.0;
const CLOSED_FORM_ABS: f64 = 1e-4;
const ARGMAX_ABS: f64 = 1e-6;
const KS_MAX: f64 = 0.03;
const MD_REL: f64 = 0.25;
const ZERO_ABS: f64 = 1e-9;
const POSITIVE_MIN: f64 = 1e-6;

/// Writes through the stdout handle so the line shows up even when the harness captures output.
fn emit(line: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn report(n: u32, name: &str, failures: &[String]) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    emit(&format!("criterion {n} ({name}): {status}"));
    for f in failures {
        emit(&format!("    {f}"));
    }
    assert!(failures.is_empty(), "criterion {n} failed with {} violations", failures.len());
}

fn idx(nu: f64) -> StableIndex {
    StableIndex::new(nu).unwrap()
}

fn bm(mu: f64, sigma2: f64) -> CumulantModel {
    CumulantModel::BrownianDrift { mu, sigma2 }
}

fn cond1(components: Vec<CumulantModel>, c0: f64, c: Vec<f64>, nu0: f64, nus: Vec<f64>) -> Condition1Config {
    Condition1Config::new(components, c0, c, nu0, nus).unwrap()
}

fn cond2(components: Vec<CumulantModel>, c: Vec<Vec<f64>>, nu: f64) -> Condition2Config {
    Condition2Config::new(components, c, nu).unwrap()
}

fn grid(axis: &[f64], h: usize) -> Vec<Vec<f64>> {
    (0..h).fold(vec![Vec::new()], |acc, _| {
        acc.iter()
            .flat_map(|p| {
                axis.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect()
    })
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Jump of `ln E_α` across `x_c`, with the smooth increment removed by a one-sided difference.
fn branch_jump(order: MLOrder, xc: f64) -> f64 {
    let d = 1e-7 * xc.abs();
    let l = |x: f64| ml_log_eval(order, x).unwrap();
    let across = l(xc + d) - l(xc - d);
    let inside = if xc > 0.0 { l(xc - d) - l(xc - 3.0 * d) } else { l(xc + 3.0 * d) - l(xc + d) };
    (across - inside).abs()
}

#[test]
fn criterion_1_mittag_leffler() {
    let mut failures = Vec::new();
    let one = MLOrder::new(1.0).unwrap();
    for i in -400..=400 {
        let x = i as f64 * 0.05;
        let (v, e) = (ml_eval(one, x).unwrap(), x.exp());
        if rel(v, e) > ML_EXP_REL {
            failures.push(format!("E_1({x}) = {v}, exp = {e}"));
        }
    }
    let half = MLOrder::new(0.5).unwrap();
    for i in -300..=300 {
        let x = i as f64 * 0.01;
        // e^{x²}(1 + erf x) written through erfc to avoid cancellation for x < 0
        let oracle = (x * x).exp() * erfc(-x);
        let v = ml_eval(half, x).unwrap();
        if rel(v, oracle) > ML_HALF_REL {
            failures.push(format!("E_0.5({x}) = {v}, oracle = {oracle}"));
        }
    }
    for alpha in [0.2, 0.35, 0.5, 0.65, 0.8, 0.95] {
        let order = MLOrder::new(alpha).unwrap();
        let crossovers = [
            SERIES_CROSSOVER.powf(alpha),
            -NEGATIVE_SERIES_LIMIT.powf(alpha),
            -NEGATIVE_ASYMPTOTIC_FROM,
        ];
        for xc in crossovers {
            let jump = branch_jump(order, xc);
            if jump > ML_BRANCH_JUMP {
                failures.push(format!("alpha {alpha}: relative jump {jump:e} across x = {xc}"));
            }
        }
    }
    report(1, "Mittag-Leffler correctness", &failures);
}

#[test]
fn criterion_2_inverse_stable_mgf() {
    let mut failures = Vec::new();
    let n = 100_000;
    let mut stream = 0u64;
    let mut worst = 0.0f64;
    for nu in [0.3, 0.5, 0.8] {
        for theta in [-1.0, -0.5, 0.5, 1.0] {
            for t in [1.0, 2.0] {
                let nu = idx(nu);
                assert!((theta * f64::powf(t, nu.nu())).abs() <= 2.0);
                let est = estimate_mean(n, 1, stream << 32, |rng| (theta * sample_inverse_stable(nu, t, rng).unwrap()).exp());
                stream += 1;
                let exact = mgf_inverse_stable(nu, theta, t).unwrap();
                let z = est.z_score(exact);
                worst = worst.max(z.abs());
                if z.abs() > MGF_SE {
                    failures.push(format!("nu {} theta {theta} t {t}: mc {} exact {exact} z {z:.2}", nu.nu(), est.mean));
                }
            }
        }
    }
    emit(&format!("    largest |z| over 24 cells: {worst:.2}"));
    report(2, "inverse-stable MGF identity", &failures);
}

fn restricted_numeric(cfg: &Condition1Config, m: &MeanVector, x: &[f64]) -> f64 {
    let bounds = x
        .iter()
        .map(|&v| {
            if v > 0.0 {
                (0.0, f64::INFINITY)
            } else if v < 0.0 {
                (f64::NEG_INFINITY, 0.0)
            } else {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
        })
        .collect();
    let opts = ConjugateOptions {
        bounds: Some(bounds),
        ..Default::default()
    };
    conjugate_fn(|t| psi_tilde(cfg, m, t), &vec![(f64::NEG_INFINITY, f64::INFINITY); x.len()], x, &opts)
        .unwrap()
        .value
}

fn agree(a: f64, b: f64) -> bool {
    (a.is_infinite() && b.is_infinite() && a.signum() == b.signum()) || (a - b).abs() <= CLOSED_FORM_ABS
}

#[test]
fn criterion_3_closed_form_vs_conjugate() {
    let mut failures = Vec::new();
    let axis = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let case1 = [
        cond1(vec![bm(0.0, 2.0)], 1.0, vec![1.5], 0.2, vec![0.6]),
        cond1(vec![bm(0.7, 1.0)], 1.0, vec![1.0], 0.3, vec![0.6]),
        cond1(vec![bm(0.0, 1.0), bm(0.0, 0.5)], 1.0, vec![1.0, 2.0], 0.2, vec![0.5, 0.7]),
        cond1(
            vec![CumulantModel::Poisson { lambda: 1.0 }, bm(-0.5, 1.0)],
            1.0,
            vec![1.0, 1.5],
            0.1,
            vec![0.4, 0.6],
        ),
    ];
    for cfg in &case1 {
        let m = cfg.mean_vector();
        let f = LimitCumulant::PsiTilde(cfg.clone(), m.clone());
        for x in grid(&axis, cfg.h()) {
            let numeric = conjugate(&f, &x, &ConjugateOptions::default()).unwrap().value;
            let closed = md_rate_explicit_case1(cfg, &m, &x).unwrap();
            if !agree(numeric, closed) {
                failures.push(format!("case 1, m = {:?}, x = {x:?}: numeric {numeric} closed {closed}", m.as_slice()));
            }
        }
    }

    let case2 = [
        cond1(vec![bm(0.7, 1.0)], 1.3, vec![1.0], 0.7, vec![0.3]),
        cond1(vec![bm(1.0, 1.0), bm(-0.5, 2.0)], 0.9, vec![1.0, 1.0], 0.8, vec![0.3, 0.5]),
        cond1(
            vec![bm(1.0, 1.0), CumulantModel::Poisson { lambda: 0.5 }, bm(-2.0, 1.0)],
            1.2,
            vec![1.0; 3],
            0.75,
            vec![0.2, 0.4, 0.6],
        ),
    ];
    let mut probed = 0;
    for cfg in &case2 {
        let m = cfg.mean_vector();
        let mut points: Vec<Vec<f64>> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&a| m.as_slice().iter().map(|mi| a * mi).collect())
            .collect();
        points.extend(grid(&axis, cfg.h()));
        for x in points {
            let closed = md_rate_explicit_case2(cfg, &m, &x).unwrap();
            if !in_admissible_set(&m, &x) {
                if closed != f64::INFINITY {
                    failures.push(format!("case 2 off the admissible set at {x:?}: {closed}"));
                }
                continue;
            }
            probed += 1;
            let numeric = restricted_numeric(cfg, &m, &x);
            let faces = case2_restricted_supremum(cfg, &m, &x).unwrap();
            if !agree(numeric, closed) || !agree(faces, closed) {
                failures.push(format!("case 2 at {x:?}: closed {closed} numeric {numeric} faces {faces}"));
            }
        }
    }
    assert!(probed >= 20);
    report(3, "closed form vs numeric conjugate", &failures);
}

#[test]
fn criterion_4_stationary_points() {
    let mut failures = Vec::new();
    let argmax = |cfg: &Condition1Config, x: f64| {
        let f = LimitCumulant::PsiTilde(cfg.clone(), cfg.mean_vector());
        conjugate(&f, &[x], &ConjugateOptions::default()).unwrap().argmax_theta.unwrap()[0]
    };

    let (c1, sigma2, nu1) = (1.5, 2.0, 0.6);
    let driftless = cond1(vec![bm(0.0, sigma2)], 1.0, vec![c1], 0.2, vec![nu1]);
    for x in [-1.0, -0.3, 0.4, 1.0] {
        let (num, exact) = (argmax(&driftless, x), optimizer_u(idx(nu1), c1 * sigma2, x));
        if (num - exact).abs() > ARGMAX_ABS {
            failures.push(format!("U optimizer at x = {x}: numeric {num} exact {exact}"));
        }
    }

    let (c1, mu, nu1) = (1.2, 0.7, 0.7);
    let drifted = cond1(vec![bm(mu, 1.0)], 1.0, vec![c1], 0.3, vec![nu1]);
    for x in [0.2, 0.5, 1.0, 1.5] {
        let (num, exact) = (argmax(&drifted, x), optimizer_v(idx(nu1), c1 * mu, x));
        if (num - exact).abs() > ARGMAX_ABS {
            failures.push(format!("V optimizer at x = {x}: numeric {num} exact {exact}"));
        }
    }

    let (c0, mu, nu0) = (1.3, -0.7, 0.7);
    let shared = cond1(vec![bm(mu, 1.0)], c0, vec![1.0], nu0, vec![0.3]);
    for alpha in [0.3, 0.8, 1.5] {
        let x = alpha * mu;
        let num = argmax(&shared, x);
        let via_eta = stationary_eta(idx(nu0), c0, alpha) / mu;
        let via_v = optimizer_v(idx(nu0), c0 * mu, x);
        if (num - via_eta).abs() > ARGMAX_ABS || (num - via_v).abs() > ARGMAX_ABS {
            failures.push(format!("shared clock at alpha = {alpha}: numeric {num} eta route {via_eta} V route {via_v}"));
        }
    }
    report(4, "stationary-point identities", &failures);
}

#[test]
fn criterion_5_weak_convergence() {
    let mut failures = Vec::new();
    let (t, n) = (1e3, 20_000);
    let models = [
        Model::Cond1(cond1(vec![bm(0.0, 1.0), bm(0.0, 2.0)], 1.0, vec![1.0, 0.5], 0.2, vec![0.8, 0.2])),
        Model::Cond1(cond1(vec![bm(1.0, 1.0), bm(1.0, 1.0)], 1.0, vec![1.0, 1.0], 0.85, vec![0.85, 0.2])),
        Model::Cond2(cond2(vec![bm(0.0, 1.0), bm(0.0, 0.5)], vec![vec![1.0, 0.5], vec![0.3, 2.0]], 0.5)),
        Model::Cond2(cond2(vec![bm(1.0, 1.0), bm(-0.5, 1.0)], vec![vec![1.0, 0.5], vec![0.3, 2.0]], 0.85)),
    ];
    for (k, model) in models.iter().enumerate() {
        let rows = weak_convergence(model, &[0.3, 0.3], &[t], n, 500 + k as u64).unwrap();
        for (i, &ks) in rows[0].ks.iter().enumerate() {
            if ks > KS_MAX {
                failures.push(format!("model {k} component {}: KS {ks:.4} (5% critical {:.4})", i + 1, ks_critical(0.05, n, n)));
            }
        }

        let m = model.mean_vector();
        for theta in grid(&[-0.5, 0.5], 2) {
            let exact = match model {
                Model::Cond1(c) => mgf_limit_cond1(c, &m, &theta).unwrap(),
                Model::Cond2(c) => mgf_limit_cond2(c, &m, &theta).unwrap(),
            };
            let est = estimate_mean(100_000, 900 + k as u64, 0, |rng| {
                let y = match model {
                    Model::Cond1(c) => sample_limit_cond1(c, &m, rng).unwrap().values,
                    Model::Cond2(c) => sample_limit_cond2(c, &m, rng).unwrap().values,
                };
                (theta[0] * y[0] + theta[1] * y[1]).exp()
            });
            let z = est.z_score(exact);
            if z.abs() > MGF_SE {
                failures.push(format!("model {k} theta {theta:?}: limit MGF mc {} exact {exact} z {z:.2}", est.mean));
            }
        }
    }
    report(5, "weak convergence", &failures);
}

#[test]
fn criterion_6_moderate_deviation_trend() {
    let mut failures = Vec::new();
    let scaling = ScalingFamily::new(0.5).unwrap();
    let (nu1, c1, sigma2) = (0.6, 1.0, 3.0);
    let cfg = cond1(vec![bm(0.0, sigma2)], 1.0, vec![c1], 0.2, vec![nu1]);
    let model = Model::Cond1(cfg);
    let set = EventSet::HalfSpace { w: vec![1.0], r: 0.5 };
    let target = closed_form_u(idx(nu1), c1 * sigma2, 0.5);
    let d = estimate_md_rate(&model, &model.mean_vector(), &set, &scaling, &[1e4], 20_000_000, 61).unwrap();
    let row = &d.rows[0];
    let err = rel(row.estimate, target);
    emit(&format!(
        "    t = 1e4: hits {} of {}, estimate {:.5} (se {:.5}), target {target:.5}, relative error {err:.3}",
        row.hits, row.n, row.estimate, row.se
    ));
    if !(err <= MD_REL) {
        failures.push(format!("estimate {} vs target {target}: relative error {err:.3}", row.estimate));
    }

    // x_1 ≤ −0.5 against a positive drift under the shared clock lies off the admissible set
    let off = Model::Cond1(cond1(vec![bm(1.0, 1.0)], 1.0, vec![1.0], 0.7, vec![0.3]));
    let set = EventSet::HalfSpace { w: vec![-1.0], r: 0.5 };
    let d = estimate_md_rate(&off, &off.mean_vector(), &set, &scaling, &[1e2, 1e3, 1e4], 1_000_000, 62).unwrap();
    let last = d.rows.last().unwrap();
    emit(&format!("    impossible set: hits {:?}, target {}", d.rows.iter().map(|r| r.hits).collect::<Vec<_>>(), d.target));
    if last.hits != 0 || !last.flagged || d.target != f64::INFINITY {
        failures.push(format!("impossible set: {} hits at t = {}, target {}", last.hits, last.t, d.target));
    }
    report(6, "moderate-deviation trend", &failures);
}

#[test]
fn criterion_7_rate_function_zero_set() {
    let mut failures = Vec::new();
    let c1 = [
        cond1(vec![bm(0.0, 1.0)], 1.0, vec![1.0], 0.3, vec![0.6]),
        cond1(vec![bm(0.0, 1.0), bm(0.0, 2.0)], 1.0, vec![1.0, 0.5], 0.3, vec![0.5, 0.7]),
        cond1(
            vec![CumulantModel::Poisson { lambda: 1.5 }, CumulantModel::GammaSubordinator { a: 2.0, b: 3.0 }],
            0.8,
            vec![1.0, 1.2],
            0.6,
            vec![0.4, 0.8],
        ),
        cond1(vec![bm(0.5, 1.0), bm(-1.0, 0.5)], 1.0, vec![1.0, 1.0], 0.7, vec![0.3, 0.5]),
    ];
    let c2 = [
        cond2(vec![bm(0.0, 1.0)], vec![vec![1.0, 2.0]], 0.5),
        cond2(vec![bm(0.0, 1.0), bm(0.0, 0.5)], vec![vec![1.0, 0.5, 2.0], vec![0.3, 2.0, 1.0]], 0.4),
        cond2(
            vec![CumulantModel::CompoundPoissonExp { lambda: 1.0, beta: 2.0 }, bm(-1.0, 1.0)],
            vec![vec![1.0, 0.5], vec![0.3, 2.0]],
            0.7,
        ),
    ];
    let mut functions = Vec::new();
    for c in &c1 {
        functions.push(("LD", LimitCumulant::Psi(c.clone())));
        functions.push(("MD", LimitCumulant::PsiTilde(c.clone(), c.mean_vector())));
    }
    for c in &c2 {
        functions.push(("LD", LimitCumulant::Upsilon(c.clone())));
        functions.push(("MD", LimitCumulant::UpsilonTilde(c.clone(), c.mean_vector())));
    }
    let axis = [-1.0, -0.5, 0.0, 0.5, 1.0];
    for (kind, f) in &functions {
        for x in grid(&axis, f.h()) {
            let v = conjugate(f, &x, &ConjugateOptions::default()).unwrap().value;
            let origin = x.iter().all(|&xi| xi == 0.0);
            if origin && v.abs() > ZERO_ABS {
                failures.push(format!("{kind} {} at the origin: {v}", f.name()));
            }
            if !origin && !(v > POSITIVE_MIN) {
                failures.push(format!("{kind} {} at {x:?}: {v}", f.name()));
            }
        }
    }
    report(7, "rate-function zero set", &failures);
}

fn cli_bytes(args: &[&str]) -> Vec<u8> {
    let cli = Cli::try_parse_from(std::iter::once("ncmd").chain(args.iter().copied())).unwrap();
    render(&cli).unwrap().bytes
}

#[test]
fn criterion_8_reproducibility() {
    let mut failures = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(
        &path,
        r#"{"condition": 1,
            "components": [{"kind": "brownian", "params": {"mu": 0.0, "sigma2": 3.0}},
                           {"kind": "poisson", "params": {"lambda": 0.5}}],
            "c0": 1.0, "c": [1.0, 2.0], "nu0": 0.2, "nus": [0.6, 0.7], "seed": 17}"#,
    )
    .unwrap();
    let config = path.to_str().unwrap();
    let commands: [&[&str]; 4] = [
        &["simulate", "--config", config, "--t", "50", "--n", "9000"],
        &["simulate", "--kind", "inverse-stable", "--nu", "0.4", "--t", "1,3", "--n", "9000", "--seed", "3"],
        &["verify-md", "--config", config, "--set", "x1>=0.5", "--t-grid", "100,1000", "--n", "30000"],
        &["verify-weak", "--config", config, "--t", "100", "--n", "9000"],
    ];
    for args in commands {
        let reference = cli_bytes(&[args, &["--threads", "1"]].concat());
        for threads in ["1", "2", "7"] {
            let again = cli_bytes(&[args, &["--threads", threads]].concat());
            if again != reference {
                failures.push(format!("{} differs with {threads} threads", args[0]));
            }
        }
        let text = String::from_utf8(reference).unwrap();
        if !text.ends_with('\n') || text.contains('\r') || text.lines().count() < 2 {
            failures.push(format!("{} produced malformed CSV", args[0]));
        }
    }
    report(8, "reproducibility across thread counts", &failures);
}
