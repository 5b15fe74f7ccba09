use std::collections::{BTreeMap, BTreeSet};

use lagpath::combinatorics::*;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn fact(n: u32) -> BigRational {
    BigRational::from_integer(factorial(n))
}

// ---------- brute-force partition oracles ----------

fn brute_partitions_1d(n: u32, k: u32) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    let len = n as usize;
    let mut v = vec![0u32; len];
    loop {
        let s: u32 = v.iter().enumerate().map(|(i, &x)| (i as u32 + 1) * x).sum();
        let c: u32 = v.iter().sum();
        if s == n && c == k {
            out.insert(v.clone());
        }
        // odometer over {0..n}^n
        let mut i = 0;
        loop {
            if i == len {
                return out;
            }
            if v[i] < n {
                v[i] += 1;
                break;
            }
            v[i] = 0;
            i += 1;
        }
    }
}

fn nonzero_below(alpha: &MultiIndex) -> Vec<MultiIndex> {
    alpha.sub_indices().into_iter().filter(|k| !k.is_zero()).collect()
}

fn brute_partitions_multi(n: u32, alpha: &MultiIndex) -> BTreeSet<(Vec<MultiIndex>, Vec<u32>)> {
    let mut out = BTreeSet::new();
    let ks = nonzero_below(alpha);
    // every strictly increasing ℓ sequence with Σℓ ≤ n, every k assignment
    fn rec(
        n: u32,
        alpha: &MultiIndex,
        ks: &[MultiIndex],
        ls: &mut Vec<u32>,
        chosen: &mut Vec<MultiIndex>,
        out: &mut BTreeSet<(Vec<MultiIndex>, Vec<u32>)>,
    ) {
        if !chosen.is_empty() {
            let mut sum = MultiIndex::zero(alpha.dim());
            let mut cost = 0;
            for (k, l) in chosen.iter().zip(ls.iter()) {
                sum = sum.add(k);
                cost += k.order() * l;
            }
            if sum == *alpha && cost == n {
                out.insert((chosen.clone(), ls.clone()));
            }
        }
        let start = ls.last().copied().unwrap_or(0) + 1;
        let used: u32 = ls.iter().sum();
        for l in start..=n {
            if used + l > n {
                break;
            }
            for k in ks {
                ls.push(l);
                chosen.push(k.clone());
                rec(n, alpha, ks, ls, chosen, out);
                ls.pop();
                chosen.pop();
            }
        }
    }
    rec(n, alpha, &ks, &mut Vec::new(), &mut Vec::new(), &mut out);
    out
}

#[test]
fn partitions_1d_match_brute_force() {
    for n in 1..=7 {
        for k in 1..=n {
            let got: BTreeSet<Vec<u32>> = enumerate_partitions_1d(n, k).into_iter().map(|p| p.k).collect();
            assert_eq!(got, brute_partitions_1d(n, k), "n={n} k={k}");
        }
    }
}

#[test]
fn partitions_multi_match_brute_force_exhaustive_small() {
    for d in 1..=3usize {
        let max_n = if d == 3 { 6 } else { 8 };
        for n in 1..=max_n {
            for alpha in MultiIndex::up_to_order(d, n).into_iter().filter(|a| !a.is_zero()) {
                let map = enumerate_partitions_multi(n, &alpha);
                let got: BTreeSet<_> = map.values().flatten().map(|p| (p.ks.clone(), p.ls.clone())).collect();
                let count: usize = map.values().map(|v| v.len()).sum();
                assert_eq!(count, got.len(), "duplicates at n={n} α={alpha}");
                assert_eq!(got, brute_partitions_multi(n, &alpha), "n={n} α={alpha}");
                for (s, parts) in &map {
                    assert!(parts.iter().all(|p| p.s() == *s));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partitions_multi_match_brute_force_up_to_ten(
        n in 1u32..=10,
        d in 1usize..=3,
        raw in proptest::collection::vec(0u32..=4, 3),
    ) {
        let mut comps: Vec<u32> = raw[..d].to_vec();
        if comps.iter().all(|&c| c == 0) {
            comps[0] = 1;
        }
        let alpha = MultiIndex::new(comps);
        prop_assume!(alpha.order() <= n);
        let map = enumerate_partitions_multi(n, &alpha);
        for parts in map.values() {
            for p in parts {
                let mut sum = MultiIndex::zero(d);
                let mut cost = 0;
                for (w, (k, l)) in p.ks.iter().zip(&p.ls).enumerate() {
                    prop_assert!(k.order() > 0);
                    if w > 0 {
                        prop_assert!(p.ls[w - 1] < *l);
                    }
                    sum = sum.add(k);
                    cost += k.order() * l;
                }
                prop_assert_eq!(&sum, &alpha);
                prop_assert_eq!(cost, n);
            }
        }
        let got: BTreeSet<_> = map.values().flatten().map(|p| (p.ks.clone(), p.ls.clone())).collect();
        prop_assert_eq!(got, brute_partitions_multi(n, &alpha));
    }

    #[test]
    fn partitions_1d_satisfy_constraints(n in 1u32..=14, k in 1u32..=14) {
        for p in enumerate_partitions_1d(n, k) {
            let s: u32 = p.k.iter().enumerate().map(|(i, &x)| (i as u32 + 1) * x).sum();
            prop_assert_eq!(s, n);
            prop_assert_eq!(p.k.iter().sum::<u32>(), k);
        }
    }
}

// ---------- binomials and identities ----------

#[test]
fn binomial_half_sign_convention() {
    for j in 0..=60 {
        assert!(has_alternating_sign(j, &binomial_half(j)), "j={j}");
        let signed = if j % 2 == 1 { binomial_half(j) } else { -binomial_half(j) };
        assert!(!signed.is_negative());
    }
}

/// Coefficients of (1−t)^{1/2} = Σ e_j t^j by the ratio recurrence.
fn sqrt_one_minus(n: usize) -> Vec<BigRational> {
    let mut e = vec![BigRational::one()];
    for j in 1..=n {
        let prev = e[j - 1].clone();
        e.push(prev * (BigRational::from_integer(BigInt::from(j as i64)) - r(3, 2)) / r(j as i64, 1));
    }
    e
}

/// Coefficients of (1−t)^{−1/2}: C(2j, j)/4^j.
fn inv_sqrt_one_minus(n: usize) -> Vec<BigRational> {
    (0..=n)
        .map(|j| {
            let j = j as u32;
            BigRational::new(
                factorial(2 * j) / (factorial(j) * factorial(j)),
                num_traits::pow(BigInt::from(4), j as usize),
            )
        })
        .collect()
}

fn series_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().min(b.len());
    (0..n)
        .map(|k| (0..=k).fold(BigRational::zero(), |acc, i| acc + &a[i] * &b[k - i]))
        .collect()
}

#[test]
fn series_coefficients_match_generating_functions() {
    // Σ a_m t^m = (1−t)^{−1/2}, Σ b_m t^m = 2 − (1−t)^{1/2}.
    let n = 30;
    let a_gen = inv_sqrt_one_minus(n);
    let e = sqrt_one_minus(n);
    for m in 0..=n {
        let (a, b) = series_coefficients(m as u32);
        assert_eq!(a, a_gen[m], "a_{m}");
        let b_gen = if m == 0 { r(2, 1) - &e[0] } else { -e[m].clone() };
        assert_eq!(b, b_gen, "b_{m}");
        assert!(!a.is_negative() && !b.is_negative());
    }
}

#[test]
fn triple_sum_matches_generating_function_product() {
    let n = 20;
    let d = inv_sqrt_one_minus(n);
    let e = sqrt_one_minus(n);
    let two_minus: Vec<BigRational> = e
        .iter()
        .enumerate()
        .map(|(j, c)| if j == 0 { r(2, 1) - c } else { -c.clone() })
        .collect();
    let product = series_mul(&d, &series_mul(&two_minus, &two_minus));
    for k in 1..=n {
        let c = s_n_identity(k as u32);
        assert_eq!(c.triple_sum, product[k], "n={k}");
    }
}

#[test]
fn s_n_frozen_values() {
    // Frozen from the generating-function oracle above.
    assert_eq!(s_n_identity(1).triple_sum, r(3, 2));
    assert_eq!(s_n_identity(2).triple_sum, r(11, 8));
    assert_eq!(s_n_identity(3).triple_sum, r(19, 16));
}

#[test]
fn identity_ranges() {
    for n in 1..=15 {
        assert!(magic_identity_1d(n).equal, "magic n={n}");
        assert_eq!(magic_identity_multi(n, 1).ratio, r(1, 1), "multi d=1 n={n}");
    }
    for n in 1..=40 {
        let c = s_n_identity(n);
        assert!(c.equal && c.bound_holds, "S_n n={n}");
    }
    for m in 1..=40 {
        assert!(convolution_identity(m).equal, "convolution m={m}");
    }
    for j in 2..=30 {
        assert!(check_factorial_bound(j).unwrap().equal, "factorial j={j}");
    }
}

#[test]
fn convolution_closed_form_is_twice_a_m() {
    // From A·B = 2(1−t)^{−1/2} − 1: lhs_m = 2a_m − [m = 0].
    for m in 0..=25 {
        let c = convolution_identity(m);
        let (a, _) = series_coefficients(m);
        let expected = if m == 0 { r(2, 1) * &a - r(1, 1) } else { r(2, 1) * &a };
        assert_eq!(c.lhs, expected);
        assert_eq!(c.rhs, r(2, 1) * a);
    }
}

#[test]
fn multivariate_magic_ratio_is_two_at_first_order() {
    let m = magic_identity_multi(1, 2);
    assert_eq!(m.ratio, r(2, 1));
    let m = magic_identity_multi(1, 3);
    assert_eq!(m.ratio, r(3, 1));
}

// ---------- Faà di Bruno oracles ----------

/// Multivariate polynomial: exponent vector → coefficient.
type Poly = BTreeMap<Vec<u32>, BigRational>;

fn poly_derive(p: &Poly, axis: usize) -> Poly {
    let mut out = Poly::new();
    for (e, c) in p {
        if e[axis] > 0 {
            let mut e2 = e.clone();
            e2[axis] -= 1;
            *out.entry(e2).or_insert_with(BigRational::zero) += c * r(e[axis] as i64, 1);
        }
    }
    out
}

fn poly_eval(p: &Poly, y: &[BigRational]) -> BigRational {
    p.iter().fold(BigRational::zero(), |acc, (e, c)| {
        let mut t = c.clone();
        for (yi, &k) in y.iter().zip(e) {
            t *= num_traits::pow(yi.clone(), k as usize);
        }
        acc + t
    })
}

/// Univariate polynomial product.
fn upoly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// h(g(t)) expanded symbolically as a polynomial in t.
fn compose(h: &Poly, g: &[Vec<BigRational>]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero()];
    for (e, c) in h {
        let mut term = vec![c.clone()];
        for (axis, &k) in e.iter().enumerate() {
            for _ in 0..k {
                term = upoly_mul(&term, &g[axis]);
            }
        }
        if term.len() > out.len() {
            out.resize(term.len(), BigRational::zero());
        }
        for (i, v) in term.into_iter().enumerate() {
            out[i] += v;
        }
    }
    out
}

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| r(n, d))
}

fn poly_strategy(dim: usize, degree: u32) -> impl Strategy<Value = Poly> {
    let exps = MultiIndex::up_to_order(dim, degree);
    proptest::collection::vec(small_rational(), exps.len()).prop_map(move |coeffs| {
        exps.iter()
            .zip(coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e.components().to_vec(), c))
            .collect()
    })
}

fn check_composition(h: &Poly, g: &[Vec<BigRational>], n: u32) -> Result<(), TestCaseError> {
    let dim = g.len();
    let f = compose(h, g);
    let expected = if (n as usize) < f.len() { &f[n as usize] * fact(n) } else { BigRational::zero() };

    let g0: Vec<BigRational> = g.iter().map(|c| c[0].clone()).collect();
    let mut h_derivs = BTreeMap::new();
    for alpha in MultiIndex::up_to_order(dim, n) {
        let mut p = h.clone();
        for (axis, &k) in alpha.components().iter().enumerate() {
            for _ in 0..k {
                p = poly_derive(&p, axis);
            }
        }
        h_derivs.insert(alpha, poly_eval(&p, &g0));
    }
    let g_derivs: Vec<Vec<BigRational>> = (1..=n)
        .map(|l| {
            g.iter()
                .map(|c| c.get(l as usize).cloned().unwrap_or_else(BigRational::zero) * fact(l))
                .collect()
        })
        .collect();
    let got = faa_di_bruno_multi(&h_derivs, &g_derivs, n).unwrap();
    prop_assert_eq!(got, expected);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn faa_di_bruno_multi_matches_symbolic_composition(
        dim in 1usize..=3,
        n in 1u32..=8,
        seed_h in poly_strategy(3, 4),
        g_raw in proptest::collection::vec(proptest::collection::vec(small_rational(), 5), 3),
    ) {
        // restrict h to the first `dim` variables
        let h: Poly = seed_h
            .into_iter()
            .filter(|(e, _)| e[dim..].iter().all(|&k| k == 0))
            .map(|(e, c)| (e[..dim].to_vec(), c))
            .collect();
        let g: Vec<Vec<BigRational>> = g_raw[..dim].to_vec();
        check_composition(&h, &g, n)?;
    }

    #[test]
    fn faa_di_bruno_multi_reduces_to_1d(
        n in 1u32..=8,
        h in proptest::collection::vec(small_rational(), 9),
        g in proptest::collection::vec(small_rational(), 9),
    ) {
        let mut h_map = BTreeMap::new();
        for k in 0..=n {
            h_map.insert(MultiIndex::new(vec![k]), h[k as usize].clone());
        }
        let g_vecs: Vec<Vec<BigRational>> = (1..=n).map(|l| vec![g[l as usize].clone()]).collect();
        let multi = faa_di_bruno_multi(&h_map, &g_vecs, n).unwrap();
        let one = faa_di_bruno_1d(&h, &g, n).unwrap();
        prop_assert_eq!(multi, one);
    }
}

#[test]
fn plan_evaluates_in_floating_point() {
    // h = y₁ y₂, g = (t, t²) ⇒ f''' = 6.
    let plan = FaaDiBrunoPlan::new(3, 2);
    let g = vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![0.0, 0.0]];
    let v = plan
        .evaluate_with(|a| Some(if a.components() == [1, 1] { 1.0 } else { 0.0 }), &g)
        .unwrap();
    assert!((v - 6.0).abs() < 1e-14);
}
