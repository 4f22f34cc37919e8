//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use wmw::runner::{build_pool, run_scenario};
use wmw_core::effect::estimate_effect_pairwise;
use wmw_core::rng::{open_uniform, stream, StreamRng};
use wmw_core::simulate::{population_moments, solve_target_effect, DistSpec, FreeParam, Scenario, SimulationSummary};
use wmw_core::variance::{
    var_bm, var_pm, var_shirahata, var_unbiased, var_wmw, var_wmw_integral, ShirahataForm, ShirahataKind,
};
use wmw_core::{
    degrees_of_freedom, estimate_effect, p_hat_via_ranks, run_test, DfKind, Degeneracy, TestKind, TwoSamples,
    VarianceKind,
};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

const SEED: u64 = 20_240_601;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Check {
    let t = start.elapsed();
    ensure(t <= limit, || format!("took {t:.1?}, limit {limit:?}"))
}

fn normal(sd: f64) -> DistSpec {
    DistSpec::normal(0.0, sd)
}

fn simulate(d1: DistSpec, d2: DistSpec, n1: usize, n2: usize, reps: u64, tests: Vec<TestKind>) -> SimulationSummary {
    let mut sc = Scenario::new(d1, d2, n1, n2, reps, SEED);
    sc.tests = tests;
    run_scenario(&sc, &build_pool(0).unwrap()).expect("scenario runs")
}

/// `got` within five binomial standard errors of `want`.
fn rate_close(label: &str, got: f64, want: f64, reps: u64) -> Check {
    let tol = 5.0 * (want * (1.0 - want) / reps as f64).sqrt();
    ensure((got - want).abs() <= tol, || {
        format!("{label}: {got:.5} vs {want:.5} (tolerance {tol:.5})")
    })
}

fn exhaustive_oracle() -> Check {
    let start = Instant::now();
    let mut triples = Vec::new();
    for a in 1..=3 {
        for b in 1..=3 {
            for c in 1..=3 {
                triples.push([a as f64, b as f64, c as f64]);
            }
        }
    }
    let mut total = 0.0;
    for s1 in &triples {
        for s2 in &triples {
            let d = TwoSamples::from_slices(s1, s2).unwrap();
            total += var_unbiased(&estimate_effect(&d).unwrap()).unwrap().raw;
        }
    }
    let mean = total / 729.0;
    // p = 1/2, β = 1/3, τ1 = τ2 = 35/108
    let exact = (5.0 / 12.0 + 4.0 * 35.0 / 108.0 - 5.0 / 4.0) / 9.0;
    ensure((mean - exact).abs() < 1e-12, || format!("mean {mean} vs {exact}"))?;
    let uniform = DistSpec::beta_latent(1.0, 1.0, 3);
    let pop = population_moments(&uniform, &uniform).unwrap().variance(3, 3);
    ensure((pop - exact).abs() < 1e-12, || format!("population value {pop} vs {exact}"))?;
    within_time(start, Duration::from_secs(1))
}

fn identity_suite() -> Check {
    let start = Instant::now();
    let mut rng = stream(31, 0);
    let draw = |n: usize, rng: &mut StreamRng| -> Vec<f64> { (0..n).map(|_| open_uniform(rng) * 10.0 - 5.0).collect() };
    let size = |rng: &mut StreamRng| 5 + (open_uniform(rng) * 26.0) as usize;
    for i in 0..1000 {
        let n1 = size(&mut rng);
        let n2 = size(&mut rng);
        let s1 = draw(n1, &mut rng);
        let s2 = draw(n2, &mut rng);
        let d = TwoSamples::from_slices(&s1, &s2).unwrap();
        let es = estimate_effect(&d).unwrap();
        let n = var_unbiased(&es).unwrap().raw;
        let pairs = [
            ("U = N", var_shirahata(&d, ShirahataKind::U, ShirahataForm::General).unwrap().raw, n),
            ("J = BM", var_shirahata(&d, ShirahataKind::J, ShirahataForm::General).unwrap().raw, var_bm(&es).unwrap().raw),
            ("rank p = pairwise p", p_hat_via_ranks(&d), estimate_effect_pairwise(&d).unwrap().p_hat),
            ("WMW rank = integral", var_wmw(&d).unwrap().raw, var_wmw_integral(&d).unwrap()),
            ("split sum = N", es.sigma1_given_n_sq + es.sigma2_given_n_sq, n),
        ];
        for (name, a, b) in pairs {
            ensure((a - b).abs() < 1e-12, || format!("dataset {i}: {name}: {a} vs {b}"))?;
        }
    }
    within_time(start, Duration::from_secs(5))
}

fn table1_rows() -> Check {
    let start = Instant::now();
    let reps = 20_000;
    let pm = TestKind::Pm(DfKind::Df2);
    let s = simulate(normal(1.0), normal(1.0), 15, 15, reps, vec![pm]);
    rate_close("15/15 σ(1,1) PM", s.rate(pm, false).unwrap(), 0.05012, reps)?;
    let s = simulate(normal(1.0), normal(3.0), 45, 15, reps, vec![TestKind::Wmw, pm]);
    rate_close("45/15 σ(1,3) WMW", s.rate(TestKind::Wmw, false).unwrap(), 0.12749, reps)?;
    rate_close("45/15 σ(1,3) PM", s.rate(pm, false).unwrap(), 0.05041, reps)?;
    let s = simulate(normal(1.0), normal(3.0), 15, 45, reps, vec![TestKind::Wmw]);
    rate_close("15/45 σ(1,3) WMW", s.rate(TestKind::Wmw, false).unwrap(), 0.01618, reps)?;
    within_time(start, Duration::from_secs(120))
}

fn table2_rows() -> Check {
    let start = Instant::now();
    let reps = 20_000;
    let pm = TestKind::Pm(DfKind::Df2);
    let s = simulate(
        DistSpec::beta_latent(1.2071, 1.0, 5),
        DistSpec::beta_latent(5.0, 4.0, 5),
        15,
        45,
        reps,
        vec![TestKind::Wmw, pm],
    );
    rate_close("15/45 WMW", s.rate(TestKind::Wmw, false).unwrap(), 0.10304, reps)?;
    rate_close("15/45 PM", s.rate(pm, false).unwrap(), 0.04876, reps)?;
    within_time(start, Duration::from_secs(120))
}

fn mean_variances() -> Check {
    let start = Instant::now();
    let s = simulate(normal(1.0), normal(1.0), 7, 7, 20_000, TestKind::DEFAULT_BATTERY.to_vec());
    let n = s.mean_variance(VarianceKind::N).unwrap();
    let pm = s.mean_variance(VarianceKind::Pm).unwrap();
    let sep = s.separation_frequency;
    ensure((n - 0.025510).abs() <= 0.0008, || format!("mean N variance {n:.6}"))?;
    ensure((pm - 0.027907).abs() <= 0.0008, || format!("mean PM variance {pm:.6}"))?;
    ensure((sep - 0.00057).abs() <= 0.0006, || format!("separation frequency {sep:.5}"))?;
    within_time(start, Duration::from_secs(30))
}

fn permutation_rows() -> Check {
    let start = Instant::now();
    let (reps, n_perm) = (2000, 2000);
    let run = |sd2: f64, n: usize, kind: TestKind| {
        let mut sc = Scenario::new(normal(1.0), normal(sd2), n, n, reps, SEED);
        sc.tests = vec![kind];
        sc.permutation = Some(n_perm);
        let s = run_scenario(&sc, &build_pool(0).unwrap()).expect("scenario runs");
        s.rate(kind, true).unwrap()
    };
    let pm = run(3.0, 10, TestKind::Pm(DfKind::Df2));
    ensure((pm - 0.0603).abs() <= 0.015, || format!("10/10 σ(1,3) permuted PM {pm:.4} vs 0.0603"))?;
    let n = run(1.0, 15, TestKind::N(DfKind::Df2));
    ensure((n - 0.0507).abs() <= 0.015, || format!("15/15 σ(1,1) permuted N {n:.4} vs 0.0507"))?;
    within_time(start, Duration::from_secs(600))
}

fn round_to(x: f64, digits: i32) -> f64 {
    let s = 10f64.powi(digits);
    (x * s).round() / s
}

fn solver_values() -> Check {
    let start = Instant::now();
    let cases = [
        ("normal mean", normal(1.0), FreeParam::NormalMean, normal(1.0), 4, -0.7416),
        (
            "exponential rate",
            DistSpec::exponential(1.0),
            FreeParam::ExponentialRate,
            DistSpec::exponential(1.0),
            5,
            2.33333,
        ),
        (
            "binomial prob",
            DistSpec::binomial(5, 0.5),
            FreeParam::BinomialProb,
            DistSpec::binomial(5, 0.6),
            5,
            0.43129,
        ),
        (
            "latent beta alpha",
            DistSpec::beta_latent(1.0, 4.0, 5),
            FreeParam::BetaAlpha,
            DistSpec::beta_latent(5.0, 4.0, 5),
            5,
            2.86332,
        ),
    ];
    for (name, template, free, reference, digits, want) in cases {
        let got = solve_target_effect(&template, free, &reference, 0.7).map_err(|e| format!("{name}: {e}"))?;
        ensure(round_to(got, digits) == want, || format!("{name}: {got} vs {want}"))?;
    }
    within_time(start, Duration::from_secs(1))
}

const ALL_TESTS: [TestKind; 8] = [
    TestKind::Wmw,
    TestKind::N(DfKind::Df),
    TestKind::Bm(DfKind::Df),
    TestKind::Pm(DfKind::Df),
    TestKind::Pm(DfKind::Df2),
    TestKind::NLogit,
    TestKind::BmLogit,
    TestKind::PmLogit,
];

fn degenerate_suite() -> Check {
    let (n1, n2) = (7usize, 7usize);
    let floor = 1.0 / ((n1 * n1 * n2 * n2) as f64);
    let tied = TwoSamples::from_slices(&[2.0; 7], &[2.0; 7]).unwrap();
    let lo: Vec<f64> = (0..7).map(f64::from).collect();
    let hi: Vec<f64> = (10..17).map(f64::from).collect();
    let sep = TwoSamples::from_slices(&lo, &hi).unwrap();

    let w = var_wmw(&tied).unwrap();
    ensure(w.value == 1.0 / (4.0 * (n1 * n2) as f64), || format!("all-tied WMW variance {}", w.value))?;
    ensure(w.degenerate == Degeneracy::AllTied, || format!("all-tied WMW flag {:?}", w.degenerate))?;

    for (name, data, flag) in [("all-tied", &tied, Degeneracy::AllTied), ("separated", &sep, Degeneracy::Separated)] {
        let es = estimate_effect(data).unwrap();
        for v in [var_unbiased(&es).unwrap(), var_bm(&es).unwrap()] {
            ensure(v.value == floor, || format!("{name}: floored variance {}", v.value))?;
            ensure(v.degenerate == flag, || format!("{name}: flag {:?}", v.degenerate))?;
        }
        if flag == Degeneracy::Separated {
            let v = var_pm(&es).unwrap();
            ensure(v.value == floor, || format!("separated PM variance {}", v.value))?;
        }
        for kind in [DfKind::Df, DfKind::Df4] {
            let df = degrees_of_freedom(&es, kind).unwrap();
            ensure(df == 12.0, || format!("{name}: {} fallback df {df}", kind.name()))?;
        }
        for kind in ALL_TESTS {
            let r = run_test(data, kind).map_err(|e| format!("{name} {kind}: {e}"))?;
            ensure(r.statistic.is_finite(), || format!("{name} {kind}: statistic {}", r.statistic))?;
            ensure((0.0..=1.0).contains(&r.p_value), || format!("{name} {kind}: p {}", r.p_value))?;
            if kind != TestKind::Wmw || flag == Degeneracy::AllTied {
                ensure(r.degenerate == flag, || format!("{name} {kind}: flag {:?}", r.degenerate))?;
            }
        }
    }
    Ok(())
}

fn determinism() -> Check {
    let dir = std::env::temp_dir().join(format!("wmw-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let config = dir.join("det.toml");
    std::fs::write(
        &config,
        r#"
[[scenario]]
dist1 = { family = "normal", mean = 0.0, sd = 1.0 }
dist2 = { family = "normal", mean = 0.0, sd = 3.0 }
n1 = 10
n2 = 14
n_reps = 5000

[[scenario]]
dist1 = { family = "beta_latent", alpha = 1.2071, beta = 1.0, k = 5 }
dist2 = { family = "beta_latent", alpha = 5.0, beta = 4.0, k = 5 }
n1 = 8
n2 = 9
n_reps = 300
tests = ["n", "pm"]
permutation = { n_perm = 200 }
"#,
    )
    .map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for threads in ["1", "4", "8"] {
        let out = Command::new(env!("CARGO_BIN_EXE_wmw"))
            .args(["--threads", threads, "--seed", "99", "simulate"])
            .arg(&config)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            format!("{threads} threads: {}", String::from_utf8_lossy(&out.stderr))
        })?;
        outputs.push(out.stdout);
    }
    let _ = std::fs::remove_dir_all(&dir);
    ensure(!outputs[0].is_empty(), || "empty output".into())?;
    ensure(outputs[0] == outputs[1] && outputs[0] == outputs[2], || {
        "output differs between thread counts".into()
    })
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("exhaustive unbiasedness oracle", exhaustive_oracle),
        ("identity suite on tie-free data", identity_suite),
        ("normal type I error spot rows", table1_rows),
        ("latent beta type I error spot rows", table2_rows),
        ("mean variance estimates at 7/7", mean_variances),
        ("permutation spot rows", permutation_rows),
        ("effect-targeting solver", solver_values),
        ("degenerate inputs", degenerate_suite),
        ("thread-count determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match check() {
            Ok(()) => println!("PASS criterion {}: {name} ({:.1?})", i + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
