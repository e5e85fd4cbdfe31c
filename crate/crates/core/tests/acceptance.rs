//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits 0 after reporting, so the rest of the test suite still runs; set
//! `WESTERVELT_ACCEPTANCE_STRICT=1` to exit 1 when any criterion fails.

use std::time::{Duration, Instant};

use westervelt_core::exact::{
    deg4_equation, deg4_root, group_transform, make_deg2, make_deg3, make_deg4, make_similarity, psi0, Deg4Case,
    Generator, SimilarityBranch, Stencil,
};
use westervelt_core::observables::MonitorSet;
use westervelt_core::pde::{mms_convergence, observed_orders, MmsSetup};
use westervelt_core::{run_suite, ExactSolution, Outcome, Solver, SolverConfig, Suite};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn suite(s: Suite) -> (Vec<Outcome>, Duration) {
    let start = Instant::now();
    let out = run_suite(Some(s));
    (out, start.elapsed())
}

fn id(o: &Outcome) -> &str {
    &o.report.check_id
}

/// Checks whose id satisfies `select` must all have the verdict `want`.
fn expect_all(outcomes: &[Outcome], select: impl Fn(&str) -> bool, want: bool, bad: &mut Vec<String>) -> usize {
    let mut n = 0;
    for o in outcomes.iter().filter(|o| select(id(o))) {
        n += 1;
        if o.report.passed != want {
            bad.push(format!("{} is {}", id(o), if o.report.passed { "PASS" } else { "FAIL" }));
        }
    }
    n
}

fn expect_one(outcomes: &[Outcome], name: &str, want: bool, bad: &mut Vec<String>) {
    if expect_all(outcomes, |i| i == name, want, bad) != 1 {
        bad.push(format!("{name} missing"));
    }
}

fn summarize(label: &str, n: usize, bad: Vec<String>, elapsed: Duration, limit: Duration) -> Verdict {
    let mut pass = bad.is_empty();
    let mut detail = format!("{n} {label} checks in {:.2} s", elapsed.as_secs_f64());
    if elapsed > limit {
        pass = false;
        detail.push_str(&format!(", over the {} s limit", limit.as_secs()));
    }
    if !bad.is_empty() {
        detail.push_str(&format!("; {}", bad.join(", ")));
    }
    verdict(pass, detail)
}

fn c1_symmetries() -> Verdict {
    let (w, tw) = suite(Suite::Westervelt);
    let (p, tp) = suite(Suite::Potential);
    let mut bad = Vec::new();
    let sym = |i: &str| i.starts_with("symmetry.") && !i.contains("damped") && !i.ends_with("_plus_1");
    let n = expect_all(&w, sym, true, &mut bad) + expect_all(&p, sym, true, &mut bad);
    for o in w.iter().chain(&p).filter(|o| sym(id(o)) && o.report.passed && !o.report.witness.is_zero()) {
        bad.push(format!("{} passed without a zero residual", id(o)));
    }
    summarize("symmetry", n, bad, tw + tp, Duration::from_secs(60))
}

fn c2_currents() -> Verdict {
    let (w, tw) = suite(Suite::Westervelt);
    let (p, tp) = suite(Suite::Potential);
    let mut bad = Vec::new();
    let mut n = 0;
    for c in ["C1", "C2", "C3", "C4", "C5", "C6"] {
        expect_one(&w, &format!("current.{c}"), true, &mut bad);
        n += 1;
    }
    for c in ["Cv1", "Cv2", "Cv3", "Cv4", "Cv5a", "Cv5b", "Cv5f.1", "Cv5f.2", "Cv5f.3"] {
        expect_one(&p, &format!("current.{c}"), true, &mut bad);
        n += 1;
    }
    summarize("current", n, bad, tw + tp, Duration::from_secs(300))
}

fn c3_multipliers() -> Verdict {
    let (w, tw) = suite(Suite::Westervelt);
    let (p, tp) = suite(Suite::Potential);
    let mut bad = Vec::new();
    let mut n = 0;
    for q in 1..=5 {
        for kind in ["multiplier", "adjoint"] {
            expect_one(&w, &format!("{kind}.Q{q}"), true, &mut bad);
            n += 1;
        }
    }
    for q in 1..=4 {
        for kind in ["multiplier", "adjoint"] {
            expect_one(&p, &format!("{kind}.Qv{q}"), true, &mut bad);
            n += 1;
        }
    }
    expect_one(&w, "multiplier.Q5.damped", false, &mut bad);
    summarize("multiplier", n + 1, bad, tw + tp, Duration::from_secs(300))
}

fn c4_recursion() -> Verdict {
    let (r, t) = suite(Suite::Recursion);
    let mut bad = Vec::new();
    let mut n = 0;
    for k in 1..=6 {
        expect_one(&r, &format!("recursion.Pv{k}"), true, &mut bad);
        n += 1;
    }
    expect_one(&r, "recursion.Pv6.cubed", true, &mut bad);
    summarize("recursion", n + 1, bad, t, Duration::from_secs(300))
}

/// The classification exactly as claimed, including the Westervelt-level
/// combination with coefficient 3 on P4.
fn c5_variational() -> Verdict {
    let (v, t) = suite(Suite::Variational);
    let mut bad = Vec::new();
    let pass = ["Pv6_(3)", "Qv5a", "Qv5b", "Qv1", "Qv2", "Qv3_combination"];
    let fail = ["Pv6_(2)", "Pv5'_(1)", "Pv5'_(2)"];
    for k in pass {
        expect_one(&v, &format!("variational.{k}"), true, &mut bad);
    }
    for k in fail {
        expect_one(&v, &format!("variational.{k}"), false, &mut bad);
    }
    expect_one(&v, "westervelt_variational.P1", true, &mut bad);
    expect_one(&v, "westervelt_variational.P2", true, &mut bad);
    expect_one(&v, "westervelt_variational.P3", false, &mut bad);
    expect_one(&v, "westervelt_variational.P4", false, &mut bad);
    expect_one(&v, "westervelt_variational.2/beta_P3+3P4.printed", true, &mut bad);
    summarize("variational", pass.len() + fail.len() + 5, bad, t, Duration::from_secs(300))
}

fn c6_structure() -> Verdict {
    let (m, tm) = suite(Suite::Mapping);
    let (h, th) = suite(Suite::Hamiltonian);
    let mut bad = Vec::new();
    let mut n = 0;
    for (outcomes, names) in [
        (&h, &["euler_lagrange", "hamiltonian"][..]),
        (&m, &["contact_roundtrip", "self_adjoint.linear_wave", "self_adjoint.potential_undamped"][..]),
    ] {
        for name in names {
            expect_one(outcomes, name, true, &mut bad);
            n += 1;
        }
    }
    n += expect_all(&m, |i| i.starts_with("similarity."), true, &mut Vec::new());
    for o in m.iter().filter(|o| id(o).starts_with("similarity.") && !o.agrees) {
        bad.push(format!("{} disagrees with its expectation", id(o)));
    }
    summarize("structure", n, bad, tm + th, Duration::from_secs(300))
}

const PULSE: &str = "beta = 0.1\nx0 = -10\nx1 = 10\nt_end = 1\ninit.name = gaussian\ninit.amplitude = 1\ninit.width = 1\ninit.center = -1\nbc = periodic\n";

/// Monitor ids, reference values, max-over-time drifts and runtime.
type DriftRun = (Vec<String>, Vec<f64>, Vec<f64>, Duration);

fn drift_run(nx: usize) -> Result<DriftRun, String> {
    let start = Instant::now();
    let cfg = SolverConfig::parse(&format!("{PULSE}nx = {nx}\n")).map_err(|e| e.to_string())?;
    let set = MonitorSet::for_config(&cfg).map_err(|e| e.to_string())?;
    let solver = Solver::new(cfg.clone()).map_err(|e| e.to_string())?;
    let s0 = solver.initial_state().map_err(|e| e.to_string())?;
    let values = |s: &_| -> westervelt_core::Result<Vec<f64>> {
        set.values(s, &solver)?.into_iter().map(|v| v.or(Ok(f64::NAN))).collect()
    };
    let reference = values(&s0).map_err(|e| e.to_string())?;
    let mut drift = vec![0.0f64; reference.len()];
    solver
        .advance(s0, cfg.t_end, |_, s| {
            for ((d, v), r) in drift.iter_mut().zip(values(s)?).zip(&reference) {
                *d = d.max((v - r).abs());
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok((set.ids(), reference, drift, start.elapsed()))
}

fn c7_conservation() -> Verdict {
    let runs: Result<Vec<_>, _> = [256, 512, 1024].into_iter().map(drift_run).collect();
    let runs = match runs {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("run failed: {e}")),
    };
    let ids = &runs[0].0;
    let scale = runs[0].1.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["C1", "C2", "C3", "C4", "E", "M", "Tv3", "Tv4", "K", "H"] {
        let Some(k) = ids.iter().position(|i| i == name) else {
            return verdict(false, format!("monitor {name} missing"));
        };
        let gated = !matches!(name, "K" | "H");
        let rel = |r: usize| runs[r].2[k] / runs[0].1[k].abs().max(1e-3 * scale);
        let ratios = [runs[0].2[k] / runs[1].2[k], runs[1].2[k] / runs[2].2[k]];
        let ok = ratios.iter().all(|q| (3.2..=4.8).contains(q)) && rel(2) < 1e-6;
        if gated && !ok {
            pass = false;
        }
        parts.push(format!(
            "{name}{} ratios {:.2}/{:.2} rel {:.1e}{}",
            if gated { "" } else { "(info)" },
            ratios[0],
            ratios[1],
            rel(2),
            if gated && !ok { " FAIL" } else { "" }
        ));
    }
    let slowest = runs.iter().map(|r| r.3).max().unwrap_or_default();
    if slowest > Duration::from_secs(120) {
        pass = false;
    }
    parts.push(format!("slowest run {:.2} s", slowest.as_secs_f64()));
    verdict(pass, parts.join("; "))
}

fn orders_in_window(sol: &ExactSolution, setup: MmsSetup, label: &str) -> (bool, String) {
    match mms_convergence(sol, &setup, 3) {
        Ok(levels) => {
            let orders = observed_orders(&levels);
            let ok = orders.iter().all(|o| (1.8..=2.2).contains(o));
            let shown: Vec<String> = orders.iter().map(|o| format!("{o:.2}")).collect();
            (ok, format!("{label} orders {}", shown.join("/")))
        }
        Err(e) => (false, format!("{label} failed: {e}")),
    }
}

fn c8_mms() -> Verdict {
    let sim = make_similarity(SimilarityBranch::Singular, 1.0).unwrap();
    let (ok_sim, d_sim) =
        orders_in_window(&sim, MmsSetup { x0: 0.5, x1: 1.5, t0: 1.0, t1: 1.1, nx: 17, cfl: 0.5 }, "similarity");
    let deg3 = make_deg3(1.0, false, 1.0).unwrap();
    let (ok_d3, d_d3) =
        orders_in_window(&deg3, MmsSetup { x0: 0.0, x1: 1.0, t0: 0.0, t1: 0.5, nx: 17, cfl: 0.5 }, "deg3");
    let deg2 = make_deg2(0.0, 0.0, 1.0, 1.0).unwrap();
    let static_setup = MmsSetup { x0: -0.4, x1: 0.4, t0: 0.0, t1: 0.2, nx: 17, cfl: 0.5 };
    let (ok_d2, d_d2) = match mms_convergence(&deg2, &static_setup, 3) {
        Ok(levels) => {
            let worst = levels.iter().map(|l| l.max_error).fold(0.0, f64::max);
            (worst < 1e-12, format!("deg2 static max error {worst:.1e}"))
        }
        Err(e) => (false, format!("deg2 failed: {e}")),
    };
    verdict(ok_sim && ok_d3 && ok_d2, format!("{d_sim}; {d_d3}; {d_d2}"))
}

// Negated comparisons so that NaN counts as a failure.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn c9_branches() -> Verdict {
    let mut bad = Vec::new();
    let at0 = psi0(0.0, SimilarityBranch::Nonsingular);
    if !matches!(at0, Ok(v) if (v - 1.0).abs() <= 1e-12) {
        bad.push(format!("psi0(0) = {at0:?}"));
    }
    let (z0, z1) = (1e3, 1e6);
    let slope = match (psi0(z0, SimilarityBranch::Nonsingular), psi0(z1, SimilarityBranch::Nonsingular)) {
        (Ok(a), Ok(b)) => (b.ln() - a.ln()) / (z1.ln() - z0.ln()),
        _ => f64::NAN,
    };
    if !((slope + 0.875).abs() <= 0.02 * 0.875) {
        bad.push(format!("slope {slope}"));
    }
    let z = 1e-4;
    let sing = psi0(z, SimilarityBranch::Singular).map(|v| z * z * v).unwrap_or(f64::NAN);
    if !((sing + 1.0).abs() <= 0.02) {
        bad.push(format!("z^2 psi0 = {sing}"));
    }
    let mut worst = 0.0f64;
    let beta = 1.0;
    let cases = [(Deg4Case::A2Zero, 1.0), (Deg4Case::A2Zero, 2.0), (Deg4Case::A1Zero, 1.0), (Deg4Case::A1Zero, 0.5)];
    for (case, a) in cases {
        for (t, x) in [(0.1, 0.05), (0.2, -0.1), (0.05, 0.2), (0.3, 0.0)] {
            match deg4_root(case, a, beta, t, x) {
                Ok(u) => worst = worst.max(deg4_equation(case, a, beta, t, x, u).0.abs()),
                Err(e) => bad.push(format!("deg4 {case:?} a={a} at ({t}, {x}): {e}")),
            }
        }
    }
    if worst > 1e-12 {
        bad.push(format!("deg4 residual {worst:.1e}"));
    }
    let detail = format!(
        "psi0(0) = {}, slope {slope:.4}, z^2 psi0(1e-4) = {sing:.6}, deg4 max residual {worst:.1e}",
        at0.map(|v| v.to_string()).unwrap_or_else(|e| e.to_string())
    );
    let pass = bad.is_empty();
    verdict(pass, if pass { detail } else { format!("{detail}; {}", bad.join(", ")) })
}

fn c10_transforms() -> Verdict {
    let families = [
        ("deg4b", make_deg4(Deg4Case::A1Zero, 1.0, 1.0).unwrap(), (0.2, 0.1)),
        ("similarity", make_similarity(SimilarityBranch::Singular, 1.0).unwrap(), (1.05, 1.0)),
    ];
    let gens = [Generator::X1, Generator::X2, Generator::X3, Generator::X4];
    let mut bad = Vec::new();
    let mut orders = Vec::new();
    let mut identity = 0.0f64;
    for (name, sol, (t, x)) in &families {
        for g in gens {
            let same = group_transform(sol, g, 0.0);
            for (dt, dx) in [(0.0, 0.0), (0.01, -0.02), (-0.02, 0.03)] {
                match (sol.eval_p(t + dt, x + dx), same.eval_p(t + dt, x + dx)) {
                    (Ok(a), Ok(b)) => identity = identity.max((a - b).abs() / a.abs().max(1.0)),
                    _ => bad.push(format!("{name} {g:?} eps=0 evaluation failed")),
                }
            }
            let moved = group_transform(sol, g, 0.05);
            let res: Result<Vec<f64>, _> =
                [0.02, 0.01, 0.005].iter().map(|&h| moved.fd_residual(*t, *x, h, Stencil::Three)).collect();
            match res {
                Ok(r) => {
                    let o = [(r[0] / r[1]).abs().log2(), (r[1] / r[2]).abs().log2()];
                    if !o.iter().all(|q| (1.8..=2.2).contains(q)) {
                        bad.push(format!("{name} {g:?} orders {:.2}/{:.2}", o[0], o[1]));
                    }
                    orders.extend(o);
                }
                Err(e) => bad.push(format!("{name} {g:?}: {e}")),
            }
        }
    }
    if identity > 1e-14 {
        bad.push(format!("eps=0 deviation {identity:.1e}"));
    }
    let lo = orders.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = orders.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let detail = format!("{} orders in [{lo:.2}, {hi:.2}], eps=0 deviation {identity:.1e}", orders.len());
    let pass = bad.is_empty();
    verdict(pass, if pass { detail } else { format!("{detail}; {}", bad.join(", ")) })
}

fn main() {
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 10] = [
        ("symmetry suite", c1_symmetries),
        ("conservation suite", c2_currents),
        ("multiplier suite", c3_multipliers),
        ("recursion identities", c4_recursion),
        ("variational classification", c5_variational),
        ("structure checks", c6_structure),
        ("numerical conservation", c7_conservation),
        ("MMS convergence", c8_mms),
        ("exact-solution branches", c9_branches),
        ("group transforms", c10_transforms),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        if !v.pass {
            failed += 1;
        }
        println!("criterion {:>2} {:<28} {}  {}", n + 1, name, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 && std::env::var_os("WESTERVELT_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
