use aqrm::constraint::{
    find_crossings_with_fault, verify_conjecture_with_fault, verify_identity_half_with_fault,
    ConstraintFamily, CrossingRecord, Fault, Variant,
};
use aqrm::exactpoly::{int, rat, rational_to_string};
use aqrm::gfunction::{find_exceptional_with_fault, k_series_with_fault};
use aqrm::heun::{exponents, heun_direct, heun_from_K, Which};
use aqrm::sl2rep::{
    commutation_check, commutator_check, family_block_check, intertwiner_check, invariant_subspace_check,
    CheckReport, RepParams,
};
use aqrm::spectrum::{self, confirm_crossing, confirm_nondegenerate, with_escalation, ModelParams};
use aqrm::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::{CliError, Cmd, Format, Outcome};

pub struct Ctx {
    pub format: Format,
    pub seed: u64,
    pub fault: Option<Fault>,
}

type Res = Result<Outcome, CliError>;

pub fn dispatch(cmd: &Cmd, ctx: &Ctx) -> Res {
    match cmd {
        Cmd::Poly(a) => poly(a, ctx),
        Cmd::Roots(a) => roots(a, ctx),
        Cmd::Crossings(a) => crossings(a, ctx),
        Cmd::VerifyIdentity(a) => verify_identity(a, ctx),
        Cmd::VerifyConjecture(a) => verify_conjecture(a, ctx),
        Cmd::RepCheck(a) => rep_check(a, ctx),
        Cmd::HeunCheck(a) => {
            no_fault(ctx, "heun-check")?;
            heun_check(a, ctx)
        }
        Cmd::Gfunction(a) => gfunction(a, ctx),
        Cmd::Sweep(a) => {
            no_fault(ctx, "sweep")?;
            sweep(a, ctx)
        }
    }
}

fn no_fault(ctx: &Ctx, name: &str) -> Result<(), CliError> {
    match ctx.fault {
        Some(_) => Err(CliError::Usage(format!("--inject-fault has no recurrence to perturb in {name}"))),
        None => Ok(()),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = format!("{header}\n");
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}

fn rng(ctx: &Ctx) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(ctx.seed)
}

/// Small random rational with denominator up to 7.
fn rand_rat(r: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    rat(r.gen_range(lo..=hi), r.gen_range(1..=7))
}

fn poly(a: &crate::PolyArgs, ctx: &Ctx) -> Res {
    let variant = if a.tilde { Variant::Tilde } else { Variant::Plain };
    let fam = ConstraintFamily::new(a.n, a.two_eps, variant)?;
    let k = a.k.unwrap_or(a.n);
    fam.check_step(k)?;
    let p = aqrm::constraint::constraint_sequence_with_fault(fam, ctx.fault).swap_remove(k as usize);
    let name = if a.tilde { "tilde" } else { "plain" };
    let body = match ctx.format {
        Format::Json => pretty(&json!({
            "family": fam.to_string(),
            "N": a.n,
            "two_eps": a.two_eps,
            "variant": name,
            "k": k,
            "text": p.to_string(),
            "terms": p.to_json(),
        })),
        Format::Csv => csv("N,two_eps,variant,k,poly", [format!("{},{},{name},{k},{p}", a.n, a.two_eps)]),
    };
    Ok(Outcome { body, verified: true })
}

fn record_row(r: &CrossingRecord) -> String {
    format!(
        "{},{},{},{},{},{:.17e},{:.17e}",
        r.n,
        r.two_eps,
        rational_to_string(&r.d_value),
        rational_to_string(&r.root_interval.0),
        rational_to_string(&r.root_interval.1),
        r.g(),
        r.lambda()
    )
}

const RECORD_HEADER: &str = "N,two_eps,d,x_lo,x_hi,g,lambda";

fn find(a: &crate::RootArgs, ctx: &Ctx) -> Result<Vec<CrossingRecord>, CliError> {
    Ok(find_crossings_with_fault(a.n, a.two_eps, &a.delta2, &a.precision, ctx.fault)?)
}

fn records_only(recs: &[CrossingRecord], ctx: &Ctx) -> Outcome {
    let body = match ctx.format {
        Format::Json => pretty(&to_value(&recs)),
        Format::Csv => csv(RECORD_HEADER, recs.iter().map(record_row)),
    };
    Outcome { body, verified: true }
}

fn roots(a: &crate::RootArgs, ctx: &Ctx) -> Res {
    Ok(records_only(&find(a, ctx)?, ctx))
}

fn crossings(a: &crate::CrossingArgs, ctx: &Ctx) -> Res {
    spectrum::default_n_max()?;
    let recs = find(&a.roots, ctx)?;
    if !a.confirm {
        return Ok(records_only(&recs, ctx));
    }
    let mut verified = true;
    let mut values = Vec::new();
    let mut rows = Vec::new();
    for r in &recs {
        let obs = with_escalation(|n| confirm_crossing(r, n, a.tol));
        let mut v = to_value(r);
        match &obs {
            Ok(o) => {
                v["observation"] = to_value(o);
                v["confirmed"] = json!(true);
                rows.push(format!("{},true,{:e},{}", record_row(r), o.gap, o.n_max));
            }
            Err(e) => {
                eprintln!("unconfirmed: {e}");
                verified = false;
                v["observation"] = Value::Null;
                v["confirmed"] = json!(false);
                rows.push(format!("{},false,,", record_row(r)));
            }
        }
        values.push(v);
    }
    let body = match ctx.format {
        Format::Json => pretty(&Value::Array(values)),
        Format::Csv => csv(&format!("{RECORD_HEADER},confirmed,gap,n_max"), rows),
    };
    Ok(Outcome { body, verified })
}

fn verify_identity(a: &crate::IdentityArgs, ctx: &Ctx) -> Res {
    let rep = verify_identity_half_with_fault(a.n, ctx.fault);
    let body = match ctx.format {
        Format::Json => pretty(&to_value(&rep)),
        Format::Csv => csv(
            "N,k,holds",
            (0..=a.n).map(|k| format!("{},{k},{}", a.n, !rep.failures.contains(&k))),
        ),
    };
    Ok(Outcome {
        body,
        verified: rep.passed(),
    })
}

fn verify_conjecture(a: &crate::ConjectureArgs, ctx: &Ctx) -> Res {
    let rep = verify_conjecture_with_fault(a.n, a.ell, &[], ctx.fault)?;
    let body = match ctx.format {
        Format::Json => pretty(&to_value(&rep)),
        Format::Csv => csv(
            "N,ell,remainder_zero,integer_quotient,positive_on_grid,samples_checked,quotient",
            [format!(
                "{},{},{},{},{},{},{}",
                rep.n,
                rep.ell,
                rep.remainder_zero,
                rep.integer_quotient,
                rep.positive_on_grid,
                rep.samples_checked,
                rep.quotient.as_deref().unwrap_or("")
            )],
        ),
    };
    Ok(Outcome {
        body,
        verified: rep.passed(),
    })
}

/// A random rational that is not an even integer.
fn rand_a(r: &mut ChaCha8Rng) -> Rational {
    loop {
        let a = rand_rat(r, -20, 20);
        if !(a.is_integer() && a.to_integer() % 2 == 0.into()) {
            return a;
        }
    }
}

fn rep_check(a: &crate::RepArgs, ctx: &Ctx) -> Res {
    let mut r = rng(ctx);
    let mut reports: Vec<CheckReport> = Vec::new();
    for j in [1, 2] {
        reports.push(commutation_check(&RepParams::new(j, rand_a(&mut r), -6, 6)?));
        for m in 1..=3 {
            reports.push(invariant_subspace_check(j, m)?);
        }
    }
    reports.push(intertwiner_check(&rand_a(&mut r), -6, 6)?);
    for _ in 0..a.samples {
        let j = r.gen_range(1..=2);
        let p = RepParams::new(j, rand_rat(&mut r, -20, 20), -8, 8)?;
        let (lambda, g2, d, eps) = (
            rand_rat(&mut r, -20, 20),
            rand_rat(&mut r, 1, 20),
            rand_rat(&mut r, 1, 20),
            rand_rat(&mut r, -6, 6),
        );
        reports.push(commutator_check(&p, &lambda, &g2, &d, &eps)?);
    }
    let samples: Vec<(Rational, Rational)> = (0..a.samples)
        .map(|_| (rand_rat(&mut r, 0, 30), rand_rat(&mut r, 0, 30)))
        .collect();
    for n in [a.n, a.n + 1] {
        for fam in [
            ConstraintFamily::new(n, a.two_eps, Variant::Plain)?,
            ConstraintFamily::new(n, a.two_eps, Variant::Tilde)?,
        ] {
            reports.push(family_block_check(fam, &samples, ctx.fault)?);
        }
    }
    let verified = reports.iter().all(CheckReport::passed);
    let body = match ctx.format {
        Format::Json => pretty(&to_value(&reports)),
        Format::Csv => csv(
            "check,label,passed,discrepancy",
            reports.iter().flat_map(|rep| {
                rep.items
                    .iter()
                    .map(move |i| format!("{},\"{}\",{},{}", rep.check, i.label, i.passed, i.discrepancy))
            }),
        ),
    };
    Ok(Outcome { body, verified })
}

fn heun_check(a: &crate::HeunArgs, ctx: &Ctx) -> Res {
    let mut r = rng(ctx);
    let mut rows = Vec::new();
    let mut mismatches = Vec::new();
    for idx in 0..a.count {
        let lambda = rand_rat(&mut r, -20, 20);
        let g2 = rand_rat(&mut r, 1, 20);
        let d = rand_rat(&mut r, 1, 20);
        let eps = rand_rat(&mut r, -6, 6);
        for which in [Which::One, Which::Two] {
            let direct = heun_direct(which, &lambda, &g2, &d, &eps);
            let from_k = heun_from_K(which, &lambda, &g2, &d, &eps);
            let ops = direct.same_operator(&from_k);
            let (at0, at1) = direct.indicial_roots();
            let ex = exponents(which, &lambda, &g2, &eps);
            let exps = (rational_to_string(&at0.1), rational_to_string(&at1.1)) == (ex.at0.1.clone(), ex.at1.1.clone())
                && at0.0 == int(0)
                && at1.0 == int(0);
            rows.push(format!("{idx},{},{ops},{exps}", which.number()));
            if !(ops && exps) {
                mismatches.push(json!({ "index": idx, "direct": to_value(&direct), "from_K": to_value(&from_k) }));
            }
        }
    }
    let verified = mismatches.is_empty();
    let body = match ctx.format {
        Format::Json => pretty(&json!({
            "checked": 2 * a.count,
            "seed": ctx.seed,
            "mismatches": mismatches,
        })),
        Format::Csv => csv("index,which,operator_match,exponents_match", rows),
    };
    Ok(Outcome { body, verified })
}

const RECURRENCE_TOL: f64 = 1e-12;
const RECURRENCE_TERMS: usize = 200;
const LEVEL_TOL: f64 = 1e-6;

fn gfunction(a: &crate::GArgs, ctx: &Ctx) -> Res {
    spectrum::default_n_max()?;
    let roots = find_exceptional_with_fault(a.n, a.delta, (a.g_lo, a.g_hi), a.tol, ctx.fault)?;
    let mut verified = true;
    let mut probes: Vec<f64> = roots.iter().map(|r| r.g).collect();
    probes.push(0.5 * (a.g_lo + a.g_hi));
    let mut worst = 0.0f64;
    for g in probes {
        let s = k_series_with_fault(a.n, g, a.delta, RECURRENCE_TERMS, ctx.fault)?;
        worst = s.recurrence_residuals().into_iter().fold(worst, f64::max);
    }
    if worst > RECURRENCE_TOL {
        eprintln!("K recurrence residual {worst:e} exceeds {RECURRENCE_TOL:e}");
        verified = false;
    }
    let mut items = Vec::new();
    let mut rows = Vec::new();
    for r in &roots {
        let p = ModelParams::new(r.g, a.delta, 0.0)?;
        let obs = with_escalation(|n| confirm_nondegenerate(&p, r.lambda, n, LEVEL_TOL));
        if let Err(e) = &obs {
            eprintln!("root g={} not confirmed: {e}", r.g);
            verified = false;
        }
        rows.push(format!(
            "{},{},{:.17e},{:.17e},{},{:e}",
            a.n, a.delta, r.g, r.lambda, r.parity, r.residual
        ));
        let mut v = to_value(r);
        v["observation"] = obs.as_ref().map_or(Value::Null, to_value);
        items.push(v);
    }
    let body = match ctx.format {
        Format::Json => pretty(&json!({
            "N": a.n,
            "delta": a.delta,
            "g_range": [a.g_lo, a.g_hi],
            "recurrence_max_residual": worst,
            "roots": items,
        })),
        Format::Csv => csv("N,delta,g_root,lambda,parity,G_residual", rows),
    };
    Ok(Outcome { body, verified })
}

fn sweep(a: &crate::SweepArgs, ctx: &Ctx) -> Res {
    if !(a.g_step > 0.0 && a.g_max >= a.g_min) {
        return Err(CliError::Usage("need g-step > 0 and g-max >= g-min".into()));
    }
    let count = ((a.g_max - a.g_min) / a.g_step + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..count).map(|i| a.g_min + i as f64 * a.g_step).collect();
    let n_max = match a.n_max {
        Some(n) => n,
        None => spectrum::default_n_max()?,
    };
    let s = spectrum::sweep(a.delta, a.eps, &grid, n_max)?;
    let body = if a.gaps {
        let minima = s.gap_minima(a.levels.unwrap_or(12))?;
        match ctx.format {
            Format::Json => pretty(&to_value(&minima)),
            Format::Csv => csv(
                "index,g,gap,lambda",
                minima.iter().map(|m| format!("{},{:.17e},{:e},{:.17e}", m.index, m.g, m.gap, m.lambda)),
            ),
        }
    } else {
        match ctx.format {
            Format::Json => {
                let mut v = to_value(&s);
                if let Some(k) = a.levels {
                    for p in v["points"].as_array_mut().expect("array") {
                        for key in ["eigenvalues", "converged"] {
                            p[key].as_array_mut().expect("array").truncate(k);
                        }
                    }
                }
                pretty(&v)
            }
            Format::Csv => s.to_csv(a.levels),
        }
    };
    Ok(Outcome { body, verified: true })
}
