use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use proptest::prelude::*;

use lpbound::certificate::{
    build_certificate, check_dual_feasible, check_feasibility_walks, exact_bound, walk_bound,
};
use lpbound::codes::{distance_distribution, max_code, max_code_permuted, Code, DEFAULT_ORACLE_LIMIT};
use lpbound::delsarte::{dual_value, solve_primal, solve_primal_with_order, verify_primal, LpInstance};
use lpbound::radial::{
    dense_convolve, dense_transform, radial_transform, DenseFunction, LevelProfile,
};
use lpbound::walks::walk_counts;

fn ratio() -> impl Strategy<Value = BigRational> {
    (-60i64..=60, 1i64..=12).prop_map(|(p, q)| BigRational::new(p.into(), q.into()))
}

fn profile(max_n: usize) -> impl Strategy<Value = LevelProfile> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(ratio(), n + 1).prop_map(move |v| LevelProfile::new(n, v).unwrap())
    })
}

fn dense_pair(max_n: usize) -> impl Strategy<Value = (DenseFunction, DenseFunction)> {
    (1..=max_n).prop_flat_map(|n| {
        let len = 1usize << n;
        (proptest::collection::vec(ratio(), len), proptest::collection::vec(ratio(), len)).prop_map(
            move |(a, b)| (DenseFunction::new(n, a).unwrap(), DenseFunction::new(n, b).unwrap()),
        )
    })
}

fn pow2(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::one() << n)
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn double_transform_is_scaling(p in profile(24)) {
        let n = p.n();
        prop_assert_eq!(radial_transform(&radial_transform(&p)), p.scale(&pow2(n)));
    }

    #[test]
    fn dense_and_radial_transforms_agree(p in profile(10)) {
        let dense = DenseFunction::from_profile(&p).unwrap();
        let t = dense_transform(&dense).unwrap();
        let radial = radial_transform(&p);
        for x in 0..1usize << p.n() {
            prop_assert_eq!(t.get(x), radial.get(x.count_ones() as usize));
        }
        prop_assert_eq!(t.radialize(), radial);
    }

    #[test]
    fn parseval((f, g) in dense_pair(8)) {
        let n = f.n();
        let inv = pow2(n).recip();
        let lhs = f.dot(&g).unwrap() * &inv;
        let fh = dense_transform(&f).unwrap().scale(&inv);
        let gh = dense_transform(&g).unwrap().scale(&inv);
        prop_assert_eq!(lhs, fh.dot(&gh).unwrap());
    }

    #[test]
    fn convolution_theorem((f, g) in dense_pair(6)) {
        let n = f.n();
        let lhs = dense_transform(&dense_convolve(&f, &g).unwrap()).unwrap();
        let rhs = dense_transform(&f).unwrap().mul(&dense_transform(&g).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs.scale(&pow2(n).recip()));
    }

    #[test]
    fn walk_totals_are_powers_of_n(n in 1usize..=120, r_frac in 0.0f64..=1.0, m in 0u32..=80) {
        let r = ((n as f64) * r_frac).round() as usize;
        let t = walk_counts(n, r, m);
        prop_assert_eq!(t.total(), BigUint::from(n).pow(m));
    }

    #[test]
    fn walks_are_complement_symmetric(n in 1usize..=80, r_frac in 0.0f64..=1.0, m in 0u32..=40, j in -6i64..=6) {
        let r = ((n as f64) * r_frac).round() as usize;
        let a = walk_counts(n, r, m).at_offset(j);
        let b = walk_counts(n, n - r, m).at_offset(-j);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn lp_value_is_nonincreasing_in_d(n in 2usize..=12, d in 1usize..=11) {
        prop_assume!(d < n);
        let a = solve_primal(&LpInstance::new(n, d).unwrap()).unwrap();
        let b = solve_primal(&LpInstance::new(n, d + 1).unwrap()).unwrap();
        prop_assert!(b.value <= a.value);
        prop_assert!(verify_primal(&a.profile, &LpInstance::new(n, d).unwrap()));
    }

    #[test]
    fn lp_value_ignores_constraint_order(
        (n, d, order) in (2usize..=10).prop_flat_map(|n| (Just(n), 1..=n, permutation(n + 1)))
    ) {
        let inst = LpInstance::new(n, d).unwrap();
        let a = solve_primal(&inst).unwrap();
        let b = solve_primal_with_order(&inst, &order).unwrap();
        prop_assert_eq!(a.value, b.value);
    }

    #[test]
    fn dual_value_is_scale_free(n in 4usize..=14, m in prop::sample::select(vec![1u32, 3, 5, 7]), r_frac in 0.0f64..=1.0, c in 1i64..=50) {
        let d = 1 + n / 5;
        let r = 1 + ((n - 1) as f64 * r_frac).round() as usize;
        let cert = build_certificate(n, d, m, r).unwrap();
        prop_assume!(check_dual_feasible(&cert.g, d).feasible());
        let inst = LpInstance::new(n, d).unwrap();
        let scaled = cert.g.scale(&BigRational::new(c.into(), 7.into()));
        prop_assert_eq!(dual_value(&scaled, &inst).unwrap(), dual_value(&cert.g, &inst).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_size_ignores_coordinate_order(
        (n, d, perm) in (3usize..=7).prop_flat_map(|n| (Just(n), 2..=n, permutation(n)))
    ) {
        let (a, code) = max_code(n, d).unwrap();
        let (b, other) = max_code_permuted(n, d, &perm, DEFAULT_ORACLE_LIMIT).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(other.min_distance().is_none_or(|m| m >= d));
        let moved = code.permute(&perm).unwrap();
        prop_assert_eq!(moved.min_distance(), code.min_distance());
    }

    #[test]
    fn code_distributions_are_primal_feasible(
        (n, words, extra) in (2usize..=8).prop_flat_map(|n| {
            (Just(n), proptest::collection::vec(0usize..1 << n, 1..12), 0usize..1 << n)
        })
    ) {
        let mut set: Vec<usize> = words;
        set.push(extra);
        set.sort_unstable();
        set.dedup();
        let code = Code::new(n, set).unwrap();
        let d = code.min_distance().unwrap_or(n);
        let f = distance_distribution(&code).unwrap();
        prop_assert!(f.get(0).is_one());
        prop_assert_eq!(f.sum(), BigRational::from_integer(code.len().into()));
        prop_assert!(dense_transform(&f).unwrap().values().iter().all(|v| *v >= BigRational::zero()));
        prop_assert!(verify_primal(&f.radialize(), &LpInstance::new(n, d).unwrap()));
    }
}

/// Every walk-feasible certificate with `n ≤ 14` is dual feasible, vanishes
/// where it should, and its bound matches the closed form.
#[test]
fn walk_feasibility_implies_dual_feasibility() {
    let mut feasible = 0;
    for n in 2..=14usize {
        for d in 1..=n / 2 {
            for r in 1..=n {
                for m in [1u32, 3, 5, 7, 9] {
                    let rep = check_feasibility_walks(n, d, m, r).unwrap();
                    if !rep.feasible {
                        continue;
                    }
                    feasible += 1;
                    let cert = build_certificate(n, d, m, r).unwrap();
                    assert!(check_dual_feasible(&cert.g, d).feasible(), "n={n} d={d} m={m} r={r}");
                    assert!(cert.g.get(d).is_zero());
                    for k in 0..=n {
                        if cert.gamma.get(k).is_zero() {
                            assert!(cert.g.get(k).is_zero());
                        }
                        if k >= d {
                            assert!(*cert.g.get(k) <= BigRational::zero());
                        }
                    }
                    let closed = walk_bound(n, d, m, r, &rep.walks_r, &rep.walks_r_minus_1).unwrap();
                    assert_eq!(closed, exact_bound(&cert).unwrap());
                }
            }
        }
    }
    assert!(feasible > 50, "only {feasible} feasible grid points");
}

/// Weak duality between the LP optimum and every feasible certificate.
#[test]
fn certificates_dominate_the_lp() {
    for n in 2..=14usize {
        for d in 1..=n {
            let inst = LpInstance::new(n, d).unwrap();
            let lp = solve_primal(&inst).unwrap().value;
            for r in 1..=n {
                for m in [1u32, 3, 5] {
                    let cert = build_certificate(n, d, m, r).unwrap();
                    if let Ok(v) = dual_value(&cert.g, &inst) {
                        assert!(v >= lp, "n={n} d={d} m={m} r={r}");
                    }
                }
            }
        }
    }
}

/// A code found by the oracle never beats a feasible certificate.
#[test]
fn oracle_codes_respect_certificates() {
    for n in 2..=7usize {
        for d in 1..=n {
            let (size, _) = max_code(n, d).unwrap();
            let size = BigRational::from_integer(size.into());
            for r in 1..=n {
                for m in [1u32, 3, 5] {
                    let cert = build_certificate(n, d, m, r).unwrap();
                    if check_dual_feasible(&cert.g, d).feasible() {
                        assert!(exact_bound(&cert).unwrap() >= size, "n={n} d={d} m={m} r={r}");
                    }
                }
            }
        }
    }
}
