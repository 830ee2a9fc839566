//! Acceptance criteria, one pass/fail line each. Exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use hermite_means::experiments::{
    conjecture1_scan, lemma_l3_sweep, section4_nonrepresentability, theorem_suite, PrecisionConfig, SuiteReport, Theorem,
};
use hermite_means::funcmodel::factorial;
use hermite_means::hermite::{build_interpolant, error_at, leading_coeff, InterpolantSpec, Side};
use hermite_means::identities::{identity_grid, summarize};
use hermite_means::mean::{mean_10_family, mean_410_closed, mean_510_closed, mean_closed_gap2, mean_of, mean_power, MeanSpec};
use hermite_means::{Error, FunctionModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn suite_verdict(r: &SuiteReport) -> Verdict {
    let mut detail = format!("{} cases, {} failures, worst normalized error {:e}", r.cases, r.failures.len(), r.worst_residual);
    if let Some(f) = r.failures.first() {
        detail.push_str(&format!("; first failure: {f}"));
    }
    verdict(r.passed(), detail)
}

fn timed_suite(t: Theorem, limit: Option<Duration>) -> Verdict {
    let start = Instant::now();
    let r = theorem_suite(t);
    let elapsed = start.elapsed();
    let mut v = suite_verdict(&r);
    v.detail.push_str(&format!(", {elapsed:.2?}"));
    if let Some(l) = limit.filter(|l| elapsed >= *l) {
        v.pass = false;
        v.detail.push_str(&format!("; exceeded {l:?}"));
    }
    v
}

fn arithmetic() -> Verdict {
    timed_suite(Theorem::T3, Some(Duration::from_secs(5)))
}

fn harmonic() -> Verdict {
    let mut v = timed_suite(Theorem::T4, None);
    let h = 2.0 * 2.0 * 8.0 / (2.0 + 8.0);
    let m = mean_power(-1.0, 1, 0, 2.0, 8.0).map(|r| r.value).unwrap_or(f64::NAN);
    v.pass &= h == 3.2 && (m - h).abs() <= 1e-9 * h;
    v.detail.push_str(&format!("; H(2,8) = {h}, M = {m}"));
    v
}

fn geometric() -> Verdict {
    timed_suite(Theorem::T5, None)
}

fn closed_forms() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let intervals: Vec<(f64, f64)> = (0..10)
        .map(|_| {
            let a = rng.gen_range(0.1..5.0);
            (a, a + rng.gen_range(0.1..5.0))
        })
        .collect();
    let mut models: Vec<FunctionModel> = [-2.5, 2.5, 5.0, 7.0].into_iter().map(FunctionModel::power).collect();
    models.extend((0..=3).map(FunctionModel::log_power));
    let (mut compared, mut undefined, mut worst) = (0, 0, 0.0f64);
    let mut problems = Vec::new();
    for model in &models {
        for m2 in 0..=2 {
            for &(a, b) in &intervals {
                let closed = mean_closed_gap2(model, m2, a, b);
                let solved = MeanSpec::new(model.clone(), m2 + 2, m2).and_then(|s| mean_of(&s, a, b));
                match (closed, solved) {
                    (Ok(c), Ok(s)) => {
                        compared += 1;
                        let rel = (c.value - s.value).abs() / s.value;
                        worst = worst.max(rel);
                        if rel > 1e-9 {
                            problems.push(format!("{model} m2={m2} ({a},{b}): {} vs {}", c.value, s.value));
                        }
                    }
                    (Err(Error::UndefinedMean { .. }), Err(Error::UndefinedMean { .. })) => undefined += 1,
                    (c, s) => problems.push(format!("{model} m2={m2} ({a},{b}): {:?} vs {:?}", c.err(), s.err())),
                }
            }
        }
    }
    let m410 = mean_power(4.0, 1, 0, 1.0, 2.0).map(|r| r.value).unwrap_or(f64::NAN);
    let want410 = (37f64.sqrt() - 3.0) / 2.0;
    let fam410 = mean_10_family(4.0, 1.0, 2.0).map(|r| r.value).unwrap_or(f64::NAN);
    let ok410 = (m410 - want410).abs() <= 1e-12 && (fam410 - want410).abs() <= 1e-12 && (mean_410_closed(1.0, 2.0) - want410).abs() <= 1e-15;
    let m510 = mean_power(5.0, 1, 0, 1.0, 2.0).map(|r| r.value).unwrap_or(f64::NAN);
    let want510 = mean_510_closed(1.0, 2.0);
    let ok510 = (m510 - want510).abs() <= 1e-10;
    let pass = problems.is_empty() && ok410 && ok510 && compared > 0;
    let mut detail = format!(
        "{compared} gap-2 comparisons (worst relative {worst:e}), {undefined} undefined (vanishing derivative) skipped; \
         M410 = {m410} vs {want410}; M510 = {m510} vs {want510}"
    );
    if let Some(p) = problems.first() {
        detail.push_str(&format!("; {} problems, first: {p}", problems.len()));
    }
    verdict(pass, detail)
}

fn identities() -> Verdict {
    let start = Instant::now();
    let s = summarize(&identity_grid(8));
    let elapsed = start.elapsed();
    let pass = s.equal == s.total && elapsed < Duration::from_secs(30);
    let mut detail = format!("{} of {} instances exactly equal, {:.2?}", s.equal, s.total, elapsed);
    if let Some(f) = s.failures.first() {
        detail.push_str(&format!("; first failure: {f}"));
    }
    verdict(pass, detail)
}

fn random_model(rng: &mut ChaCha8Rng) -> FunctionModel {
    match rng.gen_range(0..3) {
        0 => FunctionModel::power(rng.gen_range(-3.0..6.0)),
        1 => FunctionModel::log_power(rng.gen_range(0..=4)),
        _ => FunctionModel::exp(),
    }
}

fn interpolation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    let cases = 200;
    for case in 0..cases {
        let model = random_model(&mut rng);
        let m1 = rng.gen_range(0..=4);
        let m2 = rng.gen_range(0..=m1);
        let a = rng.gen_range(0.5..2.0);
        let b = a + rng.gen_range(0.5..2.0);
        let side = if rng.gen_bool(0.5) { Side::P } else { Side::Q };
        let spec = InterpolantSpec::new(m1, m2, a, b, side).expect("valid spec");
        let check = || -> Result<Option<String>, Error> {
            let p = build_interpolant(&model, &spec)?;
            let (ma, mb) = spec.multiplicities();
            for (x, m) in [(a, ma), (b, mb)] {
                let taylor = p.taylor_at(x);
                for j in 0..m {
                    let want = model.eval_deriv(x, j)?;
                    let got = taylor[j] * factorial(j);
                    if (got - want).abs() > 1e-9 * (1.0 + want.abs()) {
                        return Ok(Some(format!("derivative {j} at {x}: {got} vs {want}")));
                    }
                }
            }
            for i in 1..=9 {
                let x = a + (b - a) * i as f64 / 10.0;
                let e = error_at(&model, &spec, x)?;
                let fx = model.eval_deriv(x, 0)?;
                let direct = fx - p.eval(x);
                // the subtraction oracle carries a few ulps of f(x)
                if (e - direct).abs() > 1e-9 * e.abs() + 1e-13 * fx.abs().max(1.0) {
                    return Ok(Some(format!("error at {x}: {e} vs {direct}")));
                }
            }
            let c = leading_coeff(&model, &spec)?;
            let t = p.leading_coeff();
            if (c - t).abs() > 1e-9 * c.abs().max(t.abs()) && (c - t).abs() >= 1e-12 {
                return Ok(Some(format!("leading coefficient {c} vs {t}")));
            }
            Ok(None)
        };
        match check() {
            Ok(None) => {}
            Ok(Some(msg)) => failures.push(format!("case {case} {model} m=({m1},{m2}) {side} ({a},{b}): {msg}")),
            Err(e) => failures.push(format!("case {case} {model}: {e}")),
        }
    }
    let mut detail = format!("{cases} cases, {} failures", failures.len());
    if let Some(f) = failures.first() {
        detail.push_str(&format!("; first: {f}"));
    }
    verdict(failures.is_empty(), detail)
}

fn increasing() -> Verdict {
    let r = theorem_suite(Theorem::T10);
    let steps: Vec<String> = r.sweeps.iter().map(|s| format!("{} min step {:e}", s.labels[0], s.min_step)).collect();
    let mut v = suite_verdict(&r);
    v.pass &= r.sweeps.iter().all(|s| s.monotone && s.min_step > 0.0);
    v.detail.push_str(&format!("; {}", steps.join(", ")));
    v
}

fn limits() -> Verdict {
    let r = theorem_suite(Theorem::T11);
    let mut v = suite_verdict(&r);
    v.pass &= r.sweeps.len() == 4 && r.sweeps.iter().all(|s| s.monotone);
    let gaps: Vec<String> = r.sweeps.iter().map(|s| format!("{}->{}: {:?}", s.labels[0], s.limit_target.unwrap_or(f64::NAN), s.gaps)).collect();
    v.detail.push_str(&format!("; gaps {}", gaps.join("; ")));
    v
}

fn section4() -> Verdict {
    match section4_nonrepresentability() {
        Ok(s) => {
            let pass = s.estimates_pass && s.solution.p == "-7/10" && s.solution.r == "-1/2" && s.not_representable;
            verdict(pass, format!("h derivatives {:?} (exact {:?}); (p, r) = ({}, {})", s.estimates, s.exact, s.solution.p, s.solution.r))
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn lemma_l3() -> Verdict {
    let s = lemma_l3_sweep(100, 0x13);
    let mut detail = format!("{} cases, {} violations", s.cases, s.violations);
    if let Some(e) = s.errors.first() {
        detail.push_str(&format!("; first error: {e}"));
    }
    verdict(s.violations == 0 && s.rows.len() == 100, detail)
}

fn conjecture() -> Verdict {
    let precision = PrecisionConfig::default();
    let reciprocal = conjecture1_scan(-1.0, 1.0, 2.0, 21, precision);
    let power = conjecture1_scan(2.5, 1.0, 2.0, 21, precision);
    match (reciprocal, power) {
        (Ok(r), Ok(p)) => {
            let worst = r.gaps.iter().copied().fold(0.0f64, f64::max);
            let zero_gap = worst <= 1e-40;
            println!("    n  (m1,m2)  M_2.5(1,2)            gap to H");
            for i in 0..p.values.len() {
                println!("    {:<2} {:<8} {:<21} {:e}", p.values[i], p.labels[i], p.means[i], p.gaps[i]);
            }
            verdict(
                zero_gap && p.values.len() == 20,
                format!(
                    "p = -1: largest gap {worst:e} over n = 2..=21 at {} digits; p = 2.5: table emitted, gap decreased monotonically: {}",
                    precision.digits,
                    if p.monotone { "yes" } else { "no" }
                ),
            )
        }
        (r, p) => verdict(false, format!("{:?} / {:?}", r.err(), p.err())),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("arithmetic mean at p = m1+m2+2", arithmetic),
        ("harmonic mean at p = -1", harmonic),
        ("geometric mean at p = (m1+m2+1)/2", geometric),
        ("gap-2 and order-(1,0) closed forms", closed_forms),
        ("exact binomial identities", identities),
        ("interpolation contract", interpolation),
        ("monotone in p", increasing),
        ("large-|p| limits", limits),
        ("Taylor-mean non-representability", section4),
        ("Cauchy mean-value ordering", lemma_l3),
        ("harmonic limit scan", conjecture),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        println!("{} criterion {:>2} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.detail);
        if !v.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
