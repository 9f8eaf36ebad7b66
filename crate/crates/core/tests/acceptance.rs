//! Acceptance suite. Runs without the libtest harness so each criterion
//! prints exactly one PASS/FAIL line; exits nonzero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use lpbound::certificate::{
    auto_select, build_certificate, build_mrrw_certificate, check_dual_feasible,
    check_feasibility_walks, exact_bound,
};
use lpbound::codes::{distance_distribution, max_code, Code};
use lpbound::delsarte::{dual_value, solve_primal, LpInstance};
use lpbound::radial::{
    binomial, dense_transform, krawtchouk_table, radial_transform, DenseFunction, LevelProfile,
};
use lpbound::report::curve;
use lpbound::walks::{asymptotic_walk_estimate, walk_counts, walk_root};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

/// `K_j(k) = Σ_i (-1)^i C(k,i) C(n-k,j-i)`, straight from the definition.
fn krawtchouk_sum(n: usize, j: usize, k: usize) -> BigInt {
    (0..=j).fold(BigInt::zero(), |acc, i| {
        let term = BigInt::from(binomial(k as u64, i as i64) * binomial((n - k) as u64, (j - i) as i64));
        if i % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    })
}

fn krawtchouk_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 0..=24usize {
        let t = krawtchouk_table(n);
        let binom: Vec<BigInt> = (0..=n).map(|k| BigInt::from(binomial(n as u64, k as i64))).collect();
        let two_n = BigInt::one() << n;
        for k in (0..=n).filter(|_| n >= 1) {
            check(*t.get(1, k) == BigInt::from(n as i64 - 2 * k as i64), || format!("K_1({k}) != n-2k at n={n}"))?;
        }
        for i in 0..=n {
            for j in 0..=n {
                check(*t.get(j, i) == krawtchouk_sum(n, j, i), || format!("K_{j}({i}) at n={n}"))?;
                let orth: BigInt = (0..=n).map(|k| &binom[k] * t.get(i, k) * t.get(j, k)).sum();
                let want = if i == j { &two_n * &binom[i] } else { BigInt::zero() };
                check(orth == want, || format!("orthogonality ({i},{j}) at n={n}"))?;
                check(&binom[i] * t.get(j, i) == &binom[j] * t.get(i, j), || {
                    format!("reciprocity ({i},{j}) at n={n}")
                })?;
            }
        }
        for _ in 0..4 {
            let values = (0..=n)
                .map(|_| BigRational::new(rng.gen_range(-1000i64..=1000).into(), rng.gen_range(1i64..=97).into()))
                .collect();
            let p = LevelProfile::new(n, values).unwrap();
            let back = radial_transform(&radial_transform(&p));
            check(back == p.scale(&q(two_n.clone())), || format!("double transform at n={n}"))?;
        }
    }
    Ok("orthogonality, reciprocity, K_1 and double transform exact for n <= 24".into())
}

/// Row `x` of `A^m` for the cube adjacency matrix, grouped by weight.
fn adjacency_power_row(adj: &[Vec<usize>], n: usize, x: usize, m: u32) -> Vec<u64> {
    let mut v = vec![0u64; adj.len()];
    v[x] = 1;
    for _ in 0..m {
        let mut next = vec![0u64; adj.len()];
        for (u, &c) in v.iter().enumerate() {
            if c != 0 {
                for &w in &adj[u] {
                    next[w] += c;
                }
            }
        }
        v = next;
    }
    let mut by_level = vec![0u64; n + 1];
    for (y, c) in v.into_iter().enumerate() {
        by_level[y.count_ones() as usize] += c;
    }
    by_level
}

fn walk_oracle() -> Outcome {
    for n in 1..=10usize {
        let adj: Vec<Vec<usize>> = (0..1usize << n).map(|x| (0..n).map(|b| x ^ (1 << b)).collect()).collect();
        for r in 0..=n {
            for m in 0..=6u32 {
                let oracle = adjacency_power_row(&adj, n, (1 << r) - 1, m);
                let dp: Vec<BigUint> = walk_counts(n, r, m).counts;
                let want: Vec<BigUint> = oracle.into_iter().map(BigUint::from).collect();
                check(dp == want, || format!("n={n} r={r} m={m}"))?;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cases: Vec<(usize, usize, u32)> = (0..1000)
        .map(|_| {
            let n = rng.gen_range(1..=200usize);
            (n, rng.gen_range(0..=n), rng.gen_range(0..=200u32))
        })
        .collect();
    let bad = cases.par_iter().find_any(|&&(n, r, m)| walk_counts(n, r, m).total() != BigUint::from(n).pow(m));
    match bad {
        Some((n, r, m)) => Err(format!("sum of counts != n^m at n={n} r={r} m={m}")),
        None => Ok("matches adjacency powers for n <= 10, m <= 6; 1000 random totals equal n^m".into()),
    }
}

fn sandwich() -> Outcome {
    let pairs: Vec<(usize, usize)> = (1..=8).flat_map(|n| (1..=n).map(move |d| (n, d))).collect();
    let results: Vec<Result<usize, String>> = pairs
        .par_iter()
        .map(|&(n, d)| {
            let (a, _) = max_code(n, d).map_err(|e| e.to_string())?;
            let inst = LpInstance::new(n, d).unwrap();
            let lp = solve_primal(&inst).map_err(|e| e.to_string())?;
            check(q(a) <= lp.value, || format!("A({n},{d}) = {a} > LP {}", lp.value))?;
            let mut duals = vec![lp.dual_profile()];
            for r in 1..=n {
                for m in [1u32, 3, 5, 7, 9] {
                    duals.push(build_certificate(n, d, m, r).unwrap().g);
                }
                duals.push(build_mrrw_certificate(n, d, r).unwrap().g);
            }
            let mut feasible = 0;
            for g in duals.iter().filter(|g| check_dual_feasible(g, d).feasible()) {
                let v = dual_value(g, &inst).map_err(|e| e.to_string())?;
                check(lp.value <= v, || format!("LP {} > dual {v} at n={n} d={d}", lp.value))?;
                feasible += 1;
            }
            check(feasible > 0, || format!("no feasible dual at n={n} d={d}"))?;
            Ok(feasible)
        })
        .collect();
    let mut total = 0;
    for r in results {
        total += r?;
    }
    Ok(format!("A(n,d) <= LP <= dual_value for all n <= 8 ({total} feasible duals checked)"))
}

fn ten_cube_instance() -> Outcome {
    let rep = check_feasibility_walks(10, 2, 3, 5).map_err(|e| e.to_string())?;
    check(rep.feasible, || "not feasible".into())?;
    check(rep.threshold == BigInt::from(217), || format!("threshold {}", rep.threshold))?;
    check(rep.walks_r == BigInt::from(440), || format!("P(5,3,-1) = {}", rep.walks_r))?;
    check(rep.walks_r_minus_1 == BigInt::from(528), || format!("P(4,3,+1) = {}", rep.walks_r_minus_1))?;
    // Step orders from level 5 to 4: UDD, DUD, DDU; from 4 to 5: UUD, UDU, DUU.
    let hand_down = 5 * 6 * 5 + 5 * 6 * 5 + 5 * 4 * 7;
    let hand_up = 6 * 5 * 6 + 6 * 5 * 6 + 4 * 7 * 6;
    check(rep.walks_r == BigInt::from(hand_down), || format!("hand count {hand_down}"))?;
    check(rep.walks_r_minus_1 == BigInt::from(hand_up), || format!("hand count {hand_up}"))?;
    let cert = build_certificate(10, 2, 3, 5).unwrap();
    let dual = check_dual_feasible(&cert.g, 2);
    check(dual.feasible(), || format!("dual check: {:?}", dual.violations))?;
    let bound = exact_bound(&cert).unwrap();
    Ok(format!("feasible, threshold 217, walks (440, 528), dual check passes, bound {bound}"))
}

/// Odd `m` nearest to `61·sqrt(n/4000)`.
fn scaled_m(n: usize) -> u32 {
    let x = 61.0 * (n as f64 / 4000.0).sqrt();
    let lo = (x.floor() as u32) | 1;
    let lo = if lo as f64 > x { lo - 2 } else { lo };
    if x - lo as f64 <= lo as f64 + 2.0 - x {
        lo
    } else {
        lo + 2
    }
}

fn deviations(n: usize) -> [f64; 2] {
    let (r, m) = (n / 4, scaled_m(n));
    let t = walk_counts(n, r, m);
    let est = asymptotic_walk_estimate(n, r, m, 1);
    [-1i64, 1].map(|j| (walk_root(&t.at_offset(j), m) / est - 1.0).abs())
}

fn walk_convergence() -> Outcome {
    check(scaled_m(4000) == 61 && scaled_m(8000) == 87, || "m scaling rule".into())?;
    let a = deviations(4000);
    let b = deviations(8000);
    check(a.iter().all(|&x| x <= 0.1), || format!("n=4000 deviations {a:?}"))?;
    check(b[0] < a[0] && b[1] < a[1], || format!("n=8000 {b:?} not below n=4000 {a:?}"))?;
    Ok(format!(
        "n=4000 m=61 deviations {:.4}/{:.4}; n=8000 m=87 deviations {:.4}/{:.4}",
        a[0], a[1], b[0], b[1]
    ))
}

fn curve_fidelity() -> Outcome {
    let rows = curve(11, None).map_err(|e| e.to_string())?;
    let at = rows.iter().find(|r| (r.delta - 0.3).abs() < 1e-12).ok_or("no row at 0.3")?;
    check((at.mrrw1 - 0.2502).abs() <= 1e-3, || format!("mrrw1(0.3) = {}", at.mrrw1))?;
    let (first, last) = (&rows[0], &rows[rows.len() - 1]);
    check(first.gv == 1.0 && first.mrrw1 == 1.0, || "delta=0 endpoint".into())?;
    check(last.gv == 0.0 && last.mrrw1 == 0.0, || "delta=1/2 endpoint".into())?;

    let inside = |r: &&lpbound::report::CurveRow| r.delta > 0.1 - 1e-9 && r.delta < 0.4 + 1e-9;
    let small = curve(11, Some(400)).map_err(|e| e.to_string())?;
    let large = curve(11, Some(800)).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (s, l) in small.iter().filter(inside).zip(large.iter().filter(inside)) {
        let gs = s.cert_exponent.ok_or(format!("no certificate at n=400 delta={}", s.delta))? - s.mrrw1;
        let gl = l.cert_exponent.ok_or(format!("no certificate at n=800 delta={}", l.delta))? - l.mrrw1;
        check(gs.abs() <= 0.15, || format!("n=400 delta={} gap {gs:.4}", s.delta))?;
        check(gl.abs() < gs.abs(), || format!("delta={} gap {gs:.4} -> {gl:.4} did not shrink", s.delta))?;
        worst = worst.max(gs.abs());
    }
    Ok(format!("mrrw1(0.3) = {:.4}, exact endpoints, worst n=400 gap {worst:.4}, shrinking at n=800", at.mrrw1))
}

fn random_code(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Code {
    let mut order: Vec<usize> = (1..1usize << n).collect();
    order.shuffle(rng);
    let keep = rng.gen_range(1..=order.len());
    let mut words = vec![0usize];
    for &u in &order[..keep] {
        if words.iter().all(|&w| (w ^ u).count_ones() as usize >= d) {
            words.push(u);
        }
    }
    Code::new(n, words).unwrap()
}

fn chain_audit() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..20 {
        let n = rng.gen_range(2..=8usize);
        let d = rng.gen_range(1..=n / 2);
        let code = random_code(&mut rng, n, d);
        let size = q(code.len());
        let f = distance_distribution(&code).unwrap();
        let two_n = q(BigInt::one() << n);
        let inv = two_n.recip();

        check(f.get(0).is_one(), || format!("code {i}: f_C(0) != 1"))?;
        check(f.values().iter().all(|v| !v.is_negative()), || format!("code {i}: f_C < 0"))?;
        check((1..1usize << n).filter(|x| (x.count_ones() as usize) < d).all(|x| f.get(x).is_zero()), || {
            format!("code {i}: f_C nonzero below distance {d}")
        })?;
        let f_hat = dense_transform(&f).unwrap().scale(&inv);
        check(f_hat.values().iter().all(|v| !v.is_negative()), || format!("code {i}: f_C transform < 0"))?;
        check(f.sum() == size, || format!("code {i}: sum of f_C != |C|"))?;

        let sel = auto_select(n, d).map_err(|e| format!("code {i}: {e}"))?;
        let g = DenseFunction::from_profile(&sel.certificate.g).unwrap();
        let g_hat = dense_transform(&g).unwrap().scale(&inv);
        let links = [
            g_hat.get(0) * &size,
            &two_n * g_hat.get(0) * f_hat.get(0),
            &two_n * g_hat.dot(&f_hat).unwrap(),
            f.dot(&g).unwrap(),
            f.get(0) * g.get(0),
            g.get(0).clone(),
        ];
        check(links[0] == links[1], || format!("code {i}: first equality"))?;
        check(links[1] <= links[2], || format!("code {i}: first inequality"))?;
        check(links[2] == links[3], || format!("code {i}: Parseval step"))?;
        check(links[3] <= links[4], || format!("code {i}: second inequality"))?;
        check(links[4] == links[5], || format!("code {i}: last equality"))?;
        check(sel.bound >= size, || format!("code {i}: bound {} < |C| = {}", sel.bound, code.len()))?;
    }
    Ok("20 random codes: every link of the chain holds exactly and f_C has all four properties".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("krawtchouk suite", krawtchouk_suite),
        ("walk-count oracle equivalence", walk_oracle),
        ("soundness sandwich", sandwich),
        ("(10,2,3,5) walk instance", ten_cube_instance),
        ("walk growth convergence", walk_convergence),
        ("curve fidelity", curve_fidelity),
        ("inequality chain audit", chain_audit),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| Err(format!("panicked: {:?}", e.downcast_ref::<String>().map(String::as_str).or(e.downcast_ref::<&str>().copied()))));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
