//! Acceptance suite: one PASS/FAIL line per criterion at the stated tolerances.
//! The full 8..81 sweep runs only with `--include-ignored` or `POLYEVAL_SLOW=1`.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use polyeval::apps::{exp_taylor_coeffs, gallery, geometric_coeffs, westreich_eval, Family, TestMatrixSpec};
use polyeval::cli::{bench_rows, trial_matrix};
use polyeval::extprec::{BigReal, PrecisionTarget};
use polyeval::matrix::{evaluate_scheme, DenseMatrix};
use polyeval::pipeline::{generate, GenerateOptions, Generated};
use polyeval::psm::{ps_cost, ps_eval, Polynomial};
use polyeval::report::ToolReport;
use polyeval::scheme::{is_refused_degree, scheme_cost, select_params, RealCoefficients, SchemeSpec, Variant};
use polyeval::solver::{solve_general, solve_s2, InnerProblem, SolverConfig};
use polyeval::stability::{scalar_probe, PROBE_BITS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const U: f64 = PrecisionTarget::DOUBLE.u;

type Criterion = (&'static str, fn() -> Verdict);

/// Outcome of one criterion: every failed check is listed.
struct Verdict {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict { failures: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if !ok {
            self.failures.push(what.clone());
        }
        self.notes.push(what);
    }

    fn budget(&mut self, start: Instant, limit: Duration) {
        let t = start.elapsed();
        self.check(t < limit, format!("runtime {:.1}s < {}s", t.as_secs_f64(), limit.as_secs()));
    }
}

fn run_generate(m: usize, s: Option<usize>) -> Generated {
    let opts = GenerateOptions { s, ..Default::default() };
    generate(&exp_taylor_coeffs(m, opts.bits().unwrap()), &opts).unwrap()
}

fn polyeval(args: &[&str]) -> (Option<i32>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_polyeval")).args(args).output().expect("binary runs");
    (out.status.code(), String::from_utf8(out.stdout).unwrap())
}

fn exp_reference(x: f64) -> (BigReal, BigReal) {
    let x = BigReal::from_f64(x, PROBE_BITS);
    (x.clone(), x.exp())
}

fn headline() -> Verdict {
    let mut v = Verdict::new();
    let t = Instant::now();
    let (code, json) = polyeval(&["generate", "--exp-taylor", "28"]);
    v.check(code == Some(0), format!("exit code {code:?} == 0"));
    match ToolReport::from_json(&json) {
        Ok(r) => {
            v.check((r.inputs.s, r.inputs.p) == (4, 12), format!("(s, p) = ({}, {}) == (4, 12)", r.inputs.s, r.inputs.p));
            v.check(r.savings == 1, format!("savings {} == 1", r.savings));
            v.check(r.er_min <= 2e-16, format!("er_min {:.3e} <= 2e-16", r.er_min));
        }
        Err(e) => v.check(false, format!("report parses: {e}")),
    }
    let g = run_generate(28, None);
    let (x, e) = exp_reference(1.0);
    let probe = scalar_probe(&g.report, &x, &e).unwrap();
    v.check(probe <= 1.2e-16, format!("probe at x=1 {probe:.3e} <= 1.2e-16"));
    v.budget(t, Duration::from_secs(120));
    v
}

fn unstable_block_size() -> Verdict {
    let mut v = Verdict::new();
    let (code, json) = polyeval(&["generate", "--exp-taylor", "28", "--s", "7"]);
    v.check(code == Some(2), format!("s=7 exit code {code:?} == 2"));
    if let Ok(r) = ToolReport::from_json(&json) {
        v.check(r.warning && r.er_min > 10.0 * U, format!("s=7 er_min {:.3e} > 10u", r.er_min));
    } else {
        v.check(false, "s=7 report parses");
    }
    let g5 = run_generate(28, Some(5));
    v.check(g5.n_real() >= 8, format!("s=5 real sets {} >= 8", g5.n_real()));
    v.check(g5.report.er_min <= 2e-16, format!("s=5 er_min {:.3e} <= 2e-16", g5.report.er_min));
    let g6 = run_generate(28, Some(6));
    v.check(g6.n_real() >= 4, format!("s=6 real sets {} >= 4", g6.n_real()));
    v.check(g6.sets.len() >= 20, format!("s=6 total sets {} >= 20", g6.sets.len()));
    v.check(g6.report.er_min <= 2e-16, format!("s=6 er_min {:.3e} <= 2e-16", g6.report.er_min));
    v
}

fn sweep(range: impl Iterator<Item = usize>, v: &mut Verdict) {
    let mut worst = (0.0f64, 0);
    for m in range.filter(|&m| !is_refused_degree(m)) {
        let g = run_generate(m, None);
        if g.report.er_min > worst.0 {
            worst = (g.report.er_min, m);
        }
        if g.report.er_min > 10.0 * U || g.report.warning {
            v.check(false, format!("m={m} er_min {:.3e} <= 10u", g.report.er_min));
        }
    }
    v.check(true, format!("worst er_min {:.3e} at m={}", worst.0, worst.1));
}

fn stability_sweep() -> Verdict {
    let mut v = Verdict::new();
    let t = Instant::now();
    sweep([8, 10].into_iter().chain(12..=40), &mut v);
    v.budget(t, Duration::from_secs(1800));
    v
}

fn full_sweep() -> Verdict {
    let mut v = Verdict::new();
    sweep(8..=81, &mut v);
    let g = run_generate(46, None);
    v.check((g.spec.s, g.spec.p) == (6, 22), format!("m=46 (s, p) = ({}, {}) == (6, 22)", g.spec.s, g.spec.p));
    v.check(g.report.er_min <= 5e-16, format!("m=46 er_min {:.3e} <= 5e-16", g.report.er_min));
    let (x, e) = exp_reference(8.40);
    let probe = scalar_probe(&g.report, &x, &e).unwrap();
    v.check(probe <= 5.0 * U, format!("m=46 probe at x=8.40 {probe:.3e} <= 5u"));
    v
}

fn geometric_series() -> Verdict {
    let mut v = Verdict::new();
    let t = Instant::now();
    let opts = GenerateOptions::default();
    let g = generate(&geometric_coeffs(17, opts.bits().unwrap()).unwrap(), &opts).unwrap();
    v.check(g.n_real() >= 4, format!("real sets {} >= 4 (of {})", g.n_real(), g.sets.len()));
    v.check(g.report.savings == 1, format!("savings {} == 1", g.report.savings));
    v.check(g.report.er_min <= 10.0 * U, format!("er_min {:.3e} <= 10u", g.report.er_min));
    let rows = bench_rows(&g.spec, &g.report.c_prec, &[100], 100, |n, k| trial_matrix(0, n, k)).unwrap();
    let r = &rows[0];
    for (name, val) in [("scheme/PS", r.scheme_vs_ps), ("scheme/Westreich", r.scheme_vs_w), ("Westreich/PS", r.w_vs_ps)] {
        v.check(val <= 20.0, format!("{name} {val:.2}u <= 20u"));
    }
    v.budget(t, Duration::from_secs(300));
    v
}

fn cost_invariants() -> Verdict {
    let mut v = Verdict::new();
    let a = DenseMatrix::from_rows(vec![vec![0.5, 0.25], vec![0.125, 0.5]]).unwrap();
    let mut bad = Vec::new();
    for m in [8, 10].into_iter().chain(12..=81) {
        let params = select_params(m, None).unwrap();
        let formula = scheme_cost(params.s, params.p);
        let ps = ps_cost(m);
        let ps_count = ps_eval(&a, &vec![1.0; m + 1], ps.s).unwrap().product_count;
        for variant in Variant::ALL {
            let spec = SchemeSpec::new(params, variant, 1);
            let coeffs = RealCoefficients { inner: vec![1.0; spec.inner_len()], tail: vec![1.0; params.p] };
            let count = evaluate_scheme(&a, &spec, &coeffs).unwrap().product_count;
            if count != formula || count + 1 != ps.cost || ps_count != ps.cost {
                bad.push(format!("m={m} variant {}: {count} vs {formula}, ps {}", variant.type_pol(), ps.cost));
            }
        }
    }
    v.check(bad.is_empty(), format!("scheme count == formula == ps_cost - 1 ({} mismatches)", bad.len()));
    v.failures.extend(bad);
    let w: Vec<usize> = [9, 13, 17].iter().map(|&n| westreich_eval(&a, n).unwrap().product_count).collect();
    v.check(w == [4, 5, 6], format!("Westreich counts {w:?} == [4, 5, 6]"));
    v
}

fn big(x: f64) -> BigReal {
    BigReal::from_f64(x, 192)
}

fn problem_m8(beta: Vec<BigReal>) -> InnerProblem {
    let spec = SchemeSpec::new(select_params(8, None).unwrap(), Variant::One, 1);
    InnerProblem::from_beta(spec, beta, Vec::new()).unwrap()
}

fn sets_agree(a: &[polyeval::scheme::CoefficientSet], b: &[polyeval::scheme::CoefficientSet]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.inner.iter().zip(&y.inner).all(|(p, q)| {
                let d = (p.re.clone() - q.re.clone()).abs().to_f64() + (p.im.clone() - q.im.clone()).abs().to_f64();
                d <= 1e-20 * p.re.abs().to_f64().max(p.im.abs().to_f64()).max(1e-3)
            })
        })
}

fn solver_soundness() -> Verdict {
    let mut v = Verdict::new();
    let t = Instant::now();
    let cfg = SolverConfig::new(32, 2);

    let mut worst: f64 = 0.0;
    for m in [8, 10, 12, 13, 14, 16, 20, 28] {
        for variant in Variant::ALL {
            let opts = GenerateOptions { variant, ..Default::default() };
            let b = exp_taylor_coeffs(m, opts.bits().unwrap());
            let Ok(g) = generate(&b, &opts) else { continue };
            let cfg = SolverConfig::new(g.ndigits, g.spec.s);
            let problem = InnerProblem::new(g.spec, &b, cfg.bits()).unwrap();
            for set in &g.sets {
                worst = worst.max(problem.residual(set).unwrap());
            }
        }
    }
    v.check(worst <= cfg.residual_tol, format!("max residual {worst:.2e} <= {:.0e}", cfg.residual_tol));

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut agree = 0;
    for _ in 0..20 {
        let mut beta: Vec<BigReal> = (0..9).map(|_| big(rng.random_range(-1.0..1.0))).collect();
        beta[8] = big(rng.random_range(0.1..1.0));
        let p = problem_m8(beta);
        let closed = solve_s2(&p, &cfg).unwrap().unwrap_or_default();
        let general = solve_general(&p, &cfg).unwrap();
        if !closed.is_empty() && sets_agree(&closed, &general) {
            agree += 1;
        }
    }
    v.check(agree == 20, format!("closed form == general on {agree}/20 random m=8 problems"));

    let mut beta: Vec<BigReal> = exp_taylor_coeffs(8, 192).coeffs;
    beta[7] = big(0.0);
    let p = problem_m8(beta);
    let sets = solve_s2(&p, &cfg).unwrap().unwrap_or_default();
    let res = sets.iter().map(|s| p.residual(s).unwrap()).fold(0.0, f64::max);
    v.check(!sets.is_empty() && res <= cfg.residual_tol, format!("singular branch: {} sets, residual {res:.1e}", sets.len()));

    let mut mono = vec![BigReal::from_f64(0.0, 192); 9];
    mono[8] = big(1.0);
    let g = generate(&Polynomial { coeffs: mono.clone() }, &GenerateOptions::default()).unwrap();
    v.check(g.report.er_min == 0.0, format!("monomial er_min {} == 0", g.report.er_min));
    let general = solve_general(&problem_m8(mono), &cfg).unwrap();
    v.check(!general.is_empty(), format!("monomial through the general path: {} sets", general.len()));
    v.budget(t, Duration::from_secs(300));
    v
}

fn norm1_rel(x: &DenseMatrix<BigReal>, reference: &DenseMatrix<BigReal>) -> f64 {
    x.sub(reference).unwrap().norm1().to_f64() / reference.norm1().to_f64()
}

fn oracle_equivalence() -> Verdict {
    let mut v = Verdict::new();
    let t = Instant::now();
    let families = [Family::Uniform01, Family::Symmetric, Family::JordanBlock, Family::NilpotentBand, Family::ScaledRandom];
    let degrees: Vec<usize> = [8, 10].into_iter().chain(12..=20).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = GenerateOptions::default();
    let bits = opts.bits().unwrap();
    let (mut done, mut skipped, mut worst) = (0, 0, 0.0f64);
    while done < 50 {
        let m = degrees[rng.random_range(0..degrees.len())];
        let coeffs = (0..=m)
            .map(|i| {
                let mag = rng.random_range(0.5..1.5) / (1..=i).map(|k| k as f64).product::<f64>();
                BigReal::from_f64(if rng.random_bool(0.3) { -mag } else { mag }, bits)
            })
            .collect();
        let b = Polynomial { coeffs };
        let g = match generate(&b, &opts) {
            Ok(g) if !g.report.warning => g,
            _ => {
                skipped += 1;
                continue;
            }
        };
        let family = families[done % families.len()];
        let mut a = gallery(TestMatrixSpec { family, n: 8, seed: rng.random() }).unwrap();
        let n1 = a.norm1();
        if n1 > 1.0 {
            a = a.scaled(&(1.0 / n1));
        }
        let ab = a.map(|x| BigReal::from_f64(*x, PROBE_BITS));
        let s_ps = ps_cost(m).s;
        let reference = ps_eval(&ab, &b.with_prec(PROBE_BITS), s_ps).unwrap().value;
        let lift = |x: &DenseMatrix<f64>| x.map(|y| BigReal::from_f64(*y, PROBE_BITS));
        let scheme = evaluate_scheme(&a, &g.spec, &g.report.c_prec).unwrap().value;
        let ps = ps_eval(&a, &b.rounded::<f64>().unwrap(), s_ps).unwrap().value;
        let (e_scheme, e_ps) = (norm1_rel(&lift(&scheme), &reference), norm1_rel(&lift(&ps), &reference));
        let bound = (200.0 * U).max(10.0 * e_ps);
        worst = worst.max(e_scheme / bound);
        if e_scheme > bound {
            v.failures.push(format!("m={m} {family:?}: scheme error {e_scheme:.2e} > {bound:.2e}"));
        }
        done += 1;
    }
    v.check(v.failures.is_empty(), format!("50 polynomials ({skipped} warned and redrawn), worst error/bound {worst:.3}"));
    v.budget(t, Duration::from_secs(300));
    v
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let slow = args.iter().any(|a| a == "--include-ignored" || a == "--ignored")
        || std::env::var("POLYEVAL_SLOW").is_ok_and(|v| v == "1");
    let criteria: [Criterion; 7] = [
        ("1 exp Taylor m=28 headline", headline),
        ("2 unstable block size warning", unstable_block_size),
        ("3 stability sweep m=8..40", stability_sweep),
        ("4 geometric series Psi(17, A)", geometric_series),
        ("5 cost invariants", cost_invariants),
        ("6 solver soundness", solver_soundness),
        ("7 oracle equivalence", oracle_equivalence),
    ];
    let mut failed = 0;
    let mut report = |name: &str, v: Verdict| {
        let status = if v.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("{status} criterion {name}: {}", v.notes.join("; "));
        for f in &v.failures {
            println!("    failed: {f}");
        }
        if !v.failures.is_empty() {
            failed += 1;
        }
    };
    for (name, f) in criteria {
        report(name, f());
    }
    if slow {
        report("3 (slow) full sweep m=8..81 and m=46 spot check", full_sweep());
    } else {
        println!("SKIP criterion 3 (slow) full sweep m=8..81: run with --include-ignored or POLYEVAL_SLOW=1");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
