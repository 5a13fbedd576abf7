//! Acceptance gate: one test per criterion, each printing a single
//! pass/fail line. A failing assertion marks the criterion failed.

use std::time::Instant;

use num::traits::{One, Zero};
use rand_core::{RngCore, SeedableRng};

use degenum::harness::{check_identity, run_suite, LambdaSpec, Status, SuiteConfig};
use degenum::kernel::{factorial_rat, rat, rat_int, LambdaPoly, Rational, Scalar};
use degenum::numbers::{
    classical_harmonic, fubini_deg, harmonic_deg, hyperharmonic_deg, sample_points,
    stirling1_deg, stirling2_deg, stirling2_r_deg,
};
use degenum::series::{PowerSeries, Var};

fn rational_grid() -> Vec<Rational> {
    vec![rat(1, 2), rat(-1, 3), rat(2, 5), rat_int(3)]
}

fn full_lambda_grid() -> Vec<LambdaSpec> {
    let mut v: Vec<LambdaSpec> = rational_grid().into_iter().map(LambdaSpec::Rational).collect();
    v.push(LambdaSpec::Symbolic);
    v
}

fn grid_config(n_max: usize, r_max: u32) -> SuiteConfig {
    let mut cfg = SuiteConfig::default_suite();
    cfg.lambdas = full_lambda_grid();
    cfg.n_max = n_max;
    cfg.r_max = r_max;
    cfg
}

fn assert_all_pass(id: &str, cfg: &SuiteConfig) {
    for rep in check_identity(id, cfg).expect(id) {
        assert_eq!(
            rep.status,
            Status::Pass,
            "{} failed at λ={}: {:?}",
            id,
            rep.grid.lambda,
            rep.detail
        );
        assert!(!rep.vacuous, "{} was vacuous at λ={}", id, rep.grid.lambda);
    }
}

fn routes_agree<S: Scalar>(lam: &S) {
    harmonic_deg(10, lam).expect("harmonic routes");
    stirling1_deg(10, lam).expect("stirling1 routes");
    stirling2_deg(10, lam).expect("stirling2 routes");
    for r in 1..=4 {
        hyperharmonic_deg(10, r, lam).expect("hyperharmonic routes");
        stirling2_r_deg(10, r, lam).expect("r-stirling routes");
    }
}

#[test]
fn criterion_1_multi_route_agreement() {
    let start = Instant::now();
    for lam in rational_grid() {
        routes_agree(&lam);
    }
    routes_agree(&LambdaPoly::lambda());
    // HF / HF^(r) against their generating functions at the sample grid.
    let cfg = grid_config(10, 4);
    assert_all_pass("THM1", &cfg);
    assert_all_pass("THM5", &cfg);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {:?}", elapsed);
    println!("criterion 1: PASS (multi-route agreement, {:?})", elapsed);
}

#[test]
fn criterion_2_full_identity_suite() {
    let report = run_suite(&SuiteConfig::default_suite()).expect("suite");
    assert!(report.expectations_met);
    assert_eq!(report.summary.unexpected_failures, 0);
    let must_pass = [
        "THM1", "THM2_CORRECTED", "THM3", "THM4", "THM4_ALT", "THM4_NOTE", "THM5", "THM6",
        "THM7", "THM8", "THM9", "THM10", "EQ38", "THM11", "THM12", "EQ3", "EQ17", "LEMMA1A",
        "EQ19", "EQ45", "EQ46",
    ];
    for id in must_pass {
        let reports: Vec<_> = report.results.iter().filter(|r| r.id == id).collect();
        assert!(!reports.is_empty(), "{} missing from suite output", id);
        for rep in reports {
            assert_eq!(rep.status, Status::Pass, "{} failed: {:?}", id, rep.detail);
        }
    }
    println!("criterion 2: PASS (full identity suite green, zero unexpected failures)");
}

#[test]
fn criterion_3_documented_misprint() {
    let mut cfg = SuiteConfig::default_suite();
    cfg.lambdas = vec![LambdaSpec::Rational(rat(1, 2)), LambdaSpec::Symbolic];
    cfg.n_max = 10;
    for rep in check_identity("THM2_PRINTED", &cfg).expect("THM2_PRINTED") {
        assert_eq!(rep.status, Status::Fail, "misprint did not reproduce at λ={}", rep.grid.lambda);
        assert_eq!(rep.grid.n, Some(2));
        let detail = rep.detail.expect("counterexample detail");
        assert_eq!(detail.index, 2, "first bad coefficient should be x^2");
        match rep.grid.lambda.as_str() {
            // (3−λ)/2 vs 3−λ at λ = 1/2
            "1/2" => {
                assert_eq!(detail.left, "5/4");
                assert_eq!(detail.right, "5/2");
            }
            "symbolic" => {
                assert_eq!(detail.left, r#"["3/2","-1/2"]"#);
                assert_eq!(detail.right, r#"["3","-1"]"#);
            }
            other => panic!("unexpected grid λ {}", other),
        }
    }
    assert_all_pass("THM2_CORRECTED", &cfg);
    println!("criterion 3: PASS (misprint reproduced exactly; corrected form passes)");
}

#[test]
fn criterion_4_degeneration_limits() {
    let zero = Rational::zero();
    // λ → 0 of the symbolic harmonic numbers is the classical partial sum.
    let sym = harmonic_deg(10, &LambdaPoly::lambda()).expect("symbolic harmonic");
    let classical = classical_harmonic(10);
    for n in 0..=10 {
        assert_eq!(sym.value(n).eval(&zero), classical.value(n), "harmonic limit at n={}", n);
    }
    // λ → 0 of the symbolic Fubini polynomials matches the classical
    // generating function 1/(1 − x(e^t − 1)), checked at sample points.
    let m = 10;
    let e_minus_one = PowerSeries::from_coeffs(
        Var::T,
        (0..=m)
            .map(|n| if n == 0 { Rational::zero() } else { rat_int(1) / factorial_rat(n as u32) })
            .collect(),
    );
    let one = PowerSeries::one(Var::T, m);
    for x0 in sample_points(6) {
        let gf = one.div(&one.sub(&e_minus_one.scale(&x0)).unwrap()).expect("unit div");
        for n in 0..=10usize {
            let oracle = gf.egf_coeff(n).expect("order");
            let poly = fubini_deg(n, &LambdaPoly::lambda()).expect("fubini");
            let at_zero = poly.map(|c| c.eval(&zero)).eval(&x0);
            assert_eq!(at_zero, oracle, "fubini limit at n={}, x={}", n, x0);
        }
    }
    // H_{k,1} = 1 for 1 ≤ k ≤ 10.
    let at_one = harmonic_deg(10, &rat_int(1)).expect("harmonic at 1");
    for k in 1..=10 {
        assert_eq!(at_one.value(k), Rational::one(), "H_{{{},1}}", k);
    }
    println!("criterion 4: PASS (classical harmonic/Fubini limits and λ=1 collapse)");
}

fn stirling_inversion<S: Scalar>(lam: &S) {
    let n = 10;
    let s1 = stirling1_deg(n, lam).expect("s1");
    let s2 = stirling2_deg(n, lam).expect("s2");
    for a in 0..=n {
        for b in 0..=n {
            let mut fwd = S::zero();
            let mut bwd = S::zero();
            for j in 0..=n {
                fwd = fwd + s2.entry(a, j) * s1.entry(j, b);
                bwd = bwd + s1.entry(a, j) * s2.entry(j, b);
            }
            let expect = if a == b { S::one() } else { S::zero() };
            assert_eq!(fwd, expect, "S2·S1 at ({},{})", a, b);
            assert_eq!(bwd, expect, "S1·S2 at ({},{})", a, b);
        }
    }
}

#[test]
fn criterion_5_stirling_inversion() {
    for lam in rational_grid() {
        stirling_inversion(&lam);
    }
    stirling_inversion(&LambdaPoly::lambda());
    println!("criterion 5: PASS (Stirling matrices invert to the identity, n ≤ 10, both modes)");
}

fn log_exp_inversion<S: Scalar>(lam: &S) {
    let m = 16;
    let t = PowerSeries::identity(Var::T, m);
    let one = PowerSeries::one(Var::T, m);
    let x1 = S::one();
    let log_t = PowerSeries::deg_log(&t, lam).expect("log");
    let exp_log = PowerSeries::deg_exp(&log_t, &x1, lam).expect("exp∘log");
    assert_eq!(exp_log, one.add(&t).expect("1+t"), "e_λ(log_λ(1+t)) = 1+t");
    let exp_t = PowerSeries::deg_exp(&t, &x1, lam).expect("exp");
    let log_exp = PowerSeries::deg_log(&exp_t.sub(&one).expect("u"), lam).expect("log∘exp");
    assert_eq!(log_exp, t, "log_λ(e_λ(t)) = t");
}

#[test]
fn criterion_6_series_engine_laws() {
    log_exp_inversion(&rat(1, 2));
    log_exp_inversion(&LambdaPoly::lambda());

    // Product/quotient rules for log_λ on 20 seeded random unit series
    // (10 pairs) of order 12.
    let m = 12;
    let lam = rat(1, 2);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let mut rand_unit = || -> PowerSeries<Rational> {
        let mut coeffs = vec![Rational::one()];
        for _ in 1..=m {
            let numer = (rng.next_u64() % 19) as i64 - 9;
            let denom = (rng.next_u64() % 9) as i64 + 1;
            coeffs.push(rat(numer, denom));
        }
        PowerSeries::from_coeffs(Var::T, coeffs)
    };
    let one = PowerSeries::one(Var::T, m);
    for pair in 0..10 {
        let a = rand_unit();
        let b = rand_unit();
        let ua = a.sub(&one).unwrap();
        let ub = b.sub(&one).unwrap();
        let log_a = PowerSeries::deg_log(&ua, &lam).unwrap();
        let log_b = PowerSeries::deg_log(&ub, &lam).unwrap();
        let a_lam = PowerSeries::binom_pow(&ua, &lam).unwrap();
        let log_ab = PowerSeries::deg_log(&a.mul(&b).unwrap().sub(&one).unwrap(), &lam).unwrap();
        assert_eq!(
            log_ab,
            a_lam.mul(&log_b).unwrap().add(&log_a).unwrap(),
            "product rule, pair {}",
            pair
        );
        let log_bdiva =
            PowerSeries::deg_log(&b.div(&a).unwrap().sub(&one).unwrap(), &lam).unwrap();
        let a_neg = PowerSeries::binom_pow(&ua, &-lam.clone()).unwrap();
        assert_eq!(
            log_bdiva,
            a_neg.mul(&log_b.sub(&log_a).unwrap()).unwrap(),
            "quotient rule, pair {}",
            pair
        );
    }
    println!("criterion 6: PASS (log/exp inversion to order 16; product/quotient rules on 20 seeded series)");
}

#[test]
fn criterion_7_infinite_sums_decidable() {
    // The checks expand the infinite sums as series in y to order n+8 for
    // n ≤ 8, r ≤ 3 and compare against the degree-n polynomial, so every
    // coefficient beyond degree n must vanish exactly on the series side.
    let cfg = grid_config(8, 3);
    for id in ["THM4", "THM4_ALT", "THM4_NOTE", "THM6"] {
        assert_all_pass(id, &cfg);
    }
    println!("criterion 7: PASS (series-in-y tail coefficients vanish exactly)");
}

#[test]
fn criterion_8_determinism() {
    let run = || {
        std::process::Command::new(env!("CARGO_BIN_EXE_degenum"))
            .args([
                "verify", "--all", "--format", "json", "--lambda", "1/2", "--lambda", "symbolic",
                "--nmax", "6", "--r", "3", "--order", "12",
            ])
            .output()
            .expect("run degenum")
    };
    let first = run();
    let second = run();
    assert!(first.status.success(), "verify --all failed: {:?}", first);
    assert!(second.status.success());
    assert!(!first.stdout.is_empty());
    assert_eq!(first.stdout, second.stdout, "JSON reports differ between runs");
    println!("criterion 8: PASS (byte-identical JSON reports across runs)");
}
