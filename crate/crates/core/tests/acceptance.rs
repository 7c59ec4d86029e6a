//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::time::{Duration, Instant};

use aqrm::constraint::{
    constraint_poly, find_crossings, tridiag_matrix, verify_conjecture, verify_identity_half, ConstraintFamily,
    Variant,
};
use aqrm::exactpoly::{count_positive_roots, int, rat, BivarPoly, Rational};
use aqrm::gfunction::{find_exceptional, g_minus, g_plus, k_series};
use aqrm::heun::{exponents, heun_direct, heun_from_K, Which};
use aqrm::sl2rep::{
    commutation_check, commutator_check, family_block, intertwiner_check, invariant_subspace_check, RepParams,
};
use aqrm::spectrum::{confirm_crossing, confirm_nondegenerate, observe_pair, ModelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn rand_rat(r: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    rat(r.gen_range(lo..=hi), r.gen_range(1..=9))
}

fn precision() -> Rational {
    rat(1, 1_000_000_000_000_000)
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn c1() -> Verdict {
    let t = Instant::now();
    let bad: Vec<u32> = (1..=15).filter(|&n| !verify_identity_half(n).passed()).collect();
    let el = t.elapsed();
    verdict(
        bad.is_empty() && el < Duration::from_secs(10),
        format!("identity exact for k <= N, N = 1..15; failing N: {bad:?}; {}", secs(el)),
    )
}

fn c2() -> Verdict {
    let bad: Vec<u32> = (1..=15)
        .filter(|&n| {
            let r = verify_conjecture(n, 1, &[]).unwrap();
            let expected = BivarPoly::from_terms([(1, 0, n as i64 + 1), (0, 1, 1)]).to_string();
            !(r.remainder_zero && r.quotient.as_deref() == Some(expected.as_str()))
        })
        .collect();
    verdict(bad.is_empty(), format!("quotient (N+1)x + d, remainder 0 for N = 1..15; failing N: {bad:?}"))
}

fn c3() -> Verdict {
    let mut failures = Vec::new();
    let mut checked = 0;
    for ell in 0..=3 {
        for n in 1..=10 {
            let r = verify_conjecture(n, ell, &[]).unwrap();
            checked += 1;
            if !r.passed() {
                failures.push(format!(
                    "(N={n}, l={ell}: rem0={}, int={}, pos={}, bad samples {:?})",
                    r.remainder_zero, r.integer_quotient, r.positive_on_grid, r.failing_samples
                ));
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!("{checked} (N, l) pairs; failures: [{}]", failures.join(", ")),
    )
}

fn c4() -> Verdict {
    let mut bad = Vec::new();
    let mut checked = 0;
    for n in 1..=6u32 {
        for two_eps in 0..=2i64 {
            let p = constraint_poly(ConstraintFamily::plain(n, two_eps as i32), n).unwrap();
            for k in 0..n as i64 {
                // midpoint of (k² + 2kε, (k+1)² + 2(k+1)ε) in Δ²
                let lo = int(k * k + k * two_eps);
                let hi = int((k + 1) * (k + 1) + (k + 1) * two_eps);
                let d = (lo + hi) * rat(1, 2);
                let count = count_positive_roots(&p.specialize(&d)).unwrap();
                checked += 1;
                if count != (n as i64 - k) as usize {
                    bad.push(format!("(N={n}, 2eps={two_eps}, k={k}: {count})"));
                }
            }
        }
    }
    verdict(bad.is_empty(), format!("{checked} windows; mismatches: [{}]", bad.join(", ")))
}

fn c5() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    let judd = find_crossings(1, 0, &rat(1, 2), &precision()).unwrap();
    match judd.as_slice() {
        [r] => match confirm_crossing(r, 60, 1e-7) {
            Ok(o) => {
                ok &= (o.lambda_star - 0.875).abs() < 1e-12;
                notes.push(format!("Judd gap {:.1e} at lambda {}", o.gap, o.lambda_star));
            }
            Err(e) => {
                ok = false;
                notes.push(e.to_string());
            }
        },
        _ => {
            ok = false;
            notes.push(format!("expected one Judd root, found {}", judd.len()));
        }
    }
    let recs = find_crossings(2, 1, &rat(1, 4), &precision()).unwrap();
    ok &= !recs.is_empty();
    for r in judd.iter().chain(&recs) {
        let eps = r.two_eps as f64 / 2.0;
        let delta = aqrm::exactpoly::to_f64(&r.d_value).sqrt();
        match confirm_crossing(r, 60, 1e-7) {
            Ok(o) => notes.push(format!("g={:.6} gap {:.1e}", r.g(), o.gap)),
            Err(e) => {
                ok = false;
                notes.push(e.to_string());
            }
        }
        let p = ModelParams::new(1.05 * r.g(), delta, eps).unwrap();
        let moved = observe_pair(&p, 60, r.n as f64 - p.g * p.g + eps).gap;
        ok &= moved > 1e-3;
        notes.push(format!("5% off: gap {moved:.2e}"));
    }
    verdict(ok, notes.join("; "))
}

fn c6() -> Verdict {
    let mut r = ChaCha8Rng::seed_from_u64(6);
    let mut bad = Vec::new();
    let mut checked = 0;
    for n in 1..=8 {
        for two_eps in -2..=3 {
            for variant in [Variant::Plain, Variant::Tilde] {
                let fam = ConstraintFamily::new(n, two_eps, variant).unwrap();
                let t = tridiag_matrix(fam, n).unwrap();
                for _ in 0..3 {
                    let (x, d) = (rand_rat(&mut r, 0, 40), rand_rat(&mut r, 0, 40));
                    checked += 1;
                    if family_block(fam, &x, &d).unwrap() != t.eval(&x, &d) {
                        bad.push(format!("{fam} at ({x}, {d})"));
                    }
                }
            }
        }
    }
    verdict(
        bad.is_empty(),
        format!("{checked} exact block comparisons (K and K~, both parities of N, N <= 8); mismatches: {bad:?}"),
    )
}

fn c7() -> Verdict {
    let mut r = ChaCha8Rng::seed_from_u64(7);
    let mut bad = 0;
    for _ in 0..20 {
        let j = r.gen_range(1..=2);
        let p = RepParams::new(j, rand_rat(&mut r, -30, 30), -8, 8).unwrap();
        let (lambda, g2, d, eps) = (
            rand_rat(&mut r, -30, 30),
            rand_rat(&mut r, 1, 30),
            rand_rat(&mut r, 1, 30),
            rand_rat(&mut r, -10, 10),
        );
        if !commutator_check(&p, &lambda, &g2, &d, &eps).unwrap().passed() {
            bad += 1;
        }
    }
    verdict(bad == 0, format!("20 random tuples, window width 17; nonzero discrepancies: {bad}"))
}

fn c8() -> Verdict {
    let mut r = ChaCha8Rng::seed_from_u64(8);
    let (mut op_bad, mut exp_bad) = (0, 0);
    for _ in 0..100 {
        let (lambda, g2, d, eps) = (
            rand_rat(&mut r, -30, 30),
            rand_rat(&mut r, 1, 30),
            rand_rat(&mut r, 1, 30),
            rand_rat(&mut r, -10, 10),
        );
        for which in [Which::One, Which::Two] {
            let direct = heun_direct(which, &lambda, &g2, &d, &eps);
            if !heun_from_K(which, &lambda, &g2, &d, &eps).same_operator(&direct) {
                op_bad += 1;
            }
            let ((z0, r0), (z1, r1)) = direct.indicial_roots();
            let ex = exponents(which, &lambda, &g2, &eps);
            let got = (z0.to_string(), r0.to_string(), z1.to_string(), r1.to_string());
            if got != (ex.at0.0, ex.at0.1, ex.at1.0, ex.at1.1) {
                exp_bad += 1;
            }
        }
    }
    verdict(
        op_bad == 0 && exp_bad == 0,
        format!("100 tuples x 2 cases; operator mismatches {op_bad}, exponent mismatches {exp_bad}"),
    )
}

fn c9() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;

    let mut worst = 0.0f64;
    for n in 1..=4 {
        for g in [0.1, 0.5, 1.0, 1.5] {
            for delta in [0.5, 1.5, 2.5] {
                let s = k_series(n, g, delta, 300).unwrap();
                worst = s.recurrence_residuals().into_iter().fold(worst, f64::max);
            }
        }
    }
    ok &= worst <= 1e-12;
    notes.push(format!("max K residual {worst:.1e}"));

    let mut refl = 0.0f64;
    for i in 0..10 {
        for j in 0..10 {
            let g = 0.05 + 0.15 * i as f64;
            let delta = 0.25 + 0.4 * j as f64;
            let m = g_minus(1, g, delta, 1e-15).unwrap().value;
            let p = g_plus(1, g, -delta, 1e-15).unwrap().value;
            refl = refl.max((m - p).abs() / m.abs().max(1.0));
        }
    }
    ok &= refl <= 4.0 * f64::EPSILON;
    notes.push(format!("max reflection discrepancy {refl:.1e}"));

    let mut errors = Vec::new();
    let mut confirm = |n: u32, delta: f64| -> usize {
        let roots = find_exceptional(n, delta, (0.01, 1.5), 1e-10).unwrap();
        for r in &roots {
            let p = ModelParams::new(r.g, delta, 0.0).unwrap();
            if r.residual >= 1e-10 {
                errors.push(format!("|G| = {:.1e} at g = {}", r.residual, r.g));
            }
            if let Err(e) = confirm_nondegenerate(&p, r.lambda, 60, 1e-6) {
                errors.push(e.to_string());
            }
        }
        roots.len()
    };
    let main = confirm(1, 2.0);
    let extra: usize = [(1, 1.5), (2, 2.5), (1, 3.5)].into_iter().map(|(n, d)| confirm(n, d)).sum();
    notes.push(format!("N=1, Delta=2: {main} roots in (0.01, 1.5)"));
    notes.push(format!("supplementary (1,1.5), (2,2.5), (1,3.5): {extra} roots"));
    ok &= errors.is_empty();
    if !errors.is_empty() {
        notes.push(format!("unconfirmed: {}", errors.join(" | ")));
    }
    ok &= extra >= 3;
    verdict(ok, notes.join("; "))
}

fn c10() -> Verdict {
    let t = Instant::now();
    let mut r = ChaCha8Rng::seed_from_u64(10);
    let mut failed = Vec::new();
    let mut count = 0;
    let mut record = |rep: aqrm::sl2rep::CheckReport| {
        count += rep.items.len();
        if !rep.passed() {
            failed.push(rep.check.clone());
        }
    };
    for j in [1, 2] {
        for _ in 0..5 {
            record(commutation_check(&RepParams::new(j, rand_rat(&mut r, -30, 30), -10, 10).unwrap()));
        }
        for m in 1..=6 {
            record(invariant_subspace_check(j, m).unwrap());
        }
    }
    for a in [rat(1, 3), int(1), int(-3), rat(-7, 5), rat(11, 2)] {
        record(intertwiner_check(&a, -10, 10).unwrap());
    }
    let el = t.elapsed();
    verdict(
        failed.is_empty() && el < Duration::from_secs(5),
        format!("{count} exact items; failing checks {failed:?}; {}", secs(el)),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("three-term identity at eps = 1/2", c1),
        ("corollary division", c2),
        ("quotient conjecture, l <= 3, N <= 10", c3),
        ("positive root counts per Delta window", c4),
        ("crossing confirmation by diagonalization", c5),
        ("tridiagonal matrices equal K blocks", c6),
        ("commutator identity", c7),
        ("reduced eigenproblem equals Heun operators", c8),
        ("G-function series and roots", c9),
        ("sl2 algebra suite", c10),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let v = f();
        all &= v.passed;
        println!(
            "criterion {:>2} {} {name}: {}",
            i + 1,
            if v.passed { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    if !all {
        std::process::exit(1);
    }
}
