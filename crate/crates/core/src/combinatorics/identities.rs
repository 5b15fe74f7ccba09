//! Binomials at one half and the closed-form partition-sum identities.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::multi_index::factorial;
use super::partitions::{enumerate_partitions_1d, enumerate_partitions_multi};
use super::{CombinatoricsError, MultiIndex};

/// Both sides of an exact identity.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub equal: bool,
}

impl IdentityCheck {
    fn new(lhs: BigRational, rhs: BigRational) -> Self {
        let equal = lhs == rhs;
        Self { lhs, rhs, equal }
    }
}

/// Both sides of the multivariate partition-sum identity and their ratio.
#[derive(Clone, Debug, PartialEq)]
pub struct MagicRatio {
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub ratio: BigRational,
}

/// Triple sum `S_n`, its closed form, and the bound check.
#[derive(Clone, Debug, PartialEq)]
pub struct SnCheck {
    pub triple_sum: BigRational,
    pub closed_form: BigRational,
    pub equal: bool,
    pub bound_holds: bool,
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn sign(e: u32) -> BigRational {
    if e % 2 == 0 {
        int(1)
    } else {
        int(-1)
    }
}

fn rpow(x: &BigRational, e: u32) -> BigRational {
    num_traits::pow(x.clone(), e as usize)
}

/// `(½ choose j)` with the convention `(½ choose 0) = −1`, so that
/// `(−1)^{j−1}(½ choose j) ≥ 0` for every `j`.
pub fn binomial_half(j: u32) -> BigRational {
    if j == 0 {
        return int(-1);
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut num = BigRational::one();
    for i in 0..j {
        num *= &half - int(i as i64);
    }
    num / BigRational::from_integer(factorial(j))
}

/// `m!!` with the empty product (`m ≤ 0`) equal to one.
pub fn double_factorial(m: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = m;
    while k > 1 {
        acc *= BigInt::from(k);
        k -= 2;
    }
    acc
}

/// `j!·(−1)^{j−1}(½ choose j)` against `(2j−3)!!/2^j`, for `j ≥ 2`.
pub fn check_factorial_bound(j: u32) -> Result<IdentityCheck, CombinatoricsError> {
    if j < 2 {
        return Err(CombinatoricsError::OutOfRange(format!("factorial bound needs j ≥ 2, got {j}")));
    }
    let lhs = BigRational::from_integer(factorial(j)) * sign(j - 1) * binomial_half(j);
    let rhs = BigRational::new(double_factorial(2 * j as i64 - 3), num_traits::pow(BigInt::from(2), j as usize));
    Ok(IdentityCheck::new(lhs, rhs))
}

/// `2(n+1)(½ choose n+1)`, the common right-hand side of both partition identities.
fn magic_rhs(n: u32) -> BigRational {
    int(2 * (n as i64 + 1)) * binomial_half(n + 1)
}

/// `Σ_k Σ_{P(n,k)} (−1)^k k!/𝐤! Π_j (½ choose j)^{k_j}` against `2(n+1)(½ choose n+1)`.
pub fn magic_identity_1d(n: u32) -> IdentityCheck {
    let halves: Vec<BigRational> = (0..=n).map(binomial_half).collect();
    let mut lhs = BigRational::zero();
    for k in 1..=n {
        let k_fact = BigRational::from_integer(factorial(k));
        for p in enumerate_partitions_1d(n, k) {
            let mut term = sign(k) * &k_fact;
            for (idx, &kj) in p.k.iter().enumerate() {
                if kj > 0 {
                    term = term / BigRational::from_integer(factorial(kj)) * rpow(&halves[idx + 1], kj);
                }
            }
            lhs += term;
        }
    }
    IdentityCheck::new(lhs, magic_rhs(n))
}

/// The multivariate partition sum
/// `Σ_{1≤|α|≤n} (−1)^{|α|}|α|! Σ_s Σ_{P_s(n,α)} Π_j (½ choose ℓ_j)^{|k_j|}/k_j!`
/// in dimension `dim`, reported next to `2(n+1)(½ choose n+1)`.
///
/// The two sides agree for `dim == 1` only; this function reports, it does
/// not assert.
pub fn magic_identity_multi(n: u32, dim: usize) -> MagicRatio {
    let halves: Vec<BigRational> = (0..=n).map(binomial_half).collect();
    let mut lhs = BigRational::zero();
    for order in 1..=n {
        let pref = sign(order) * BigRational::from_integer(factorial(order));
        for alpha in MultiIndex::with_order(dim, order) {
            let mut inner = BigRational::zero();
            for (_, parts) in enumerate_partitions_multi(n, &alpha) {
                for p in parts {
                    let mut term = BigRational::one();
                    for (k, &l) in p.ks.iter().zip(&p.ls) {
                        term = term * rpow(&halves[l as usize], k.order())
                            / BigRational::from_integer(k.factorial());
                    }
                    inner += term;
                }
            }
            lhs += &pref * inner;
        }
    }
    let rhs = magic_rhs(n);
    let ratio = &lhs / &rhs;
    MagicRatio { lhs, rhs, ratio }
}

/// `(a_m, b_m) = (2(m+1)(−1)^m(½ choose m+1), (−1)^{m−1}(½ choose m))`.
pub fn series_coefficients(m: u32) -> (BigRational, BigRational) {
    let a = int(2 * (m as i64 + 1)) * sign(m) * binomial_half(m + 1);
    // (−1)^{m−1} has the parity of m + 1.
    let b = sign(m + 1) * binomial_half(m);
    (a, b)
}

/// `S_n = Σ_{0≤m≤r≤n} a_m b_{r−m} b_{n−r}` by direct enumeration, against
/// `((16n−10)/(2n−1))(n+1)(−1)ⁿ(½ choose n+1)`, plus the bound
/// `S_n ≤ 8(n+1)(−1)ⁿ(½ choose n+1)`.
pub fn s_n_identity(n: u32) -> SnCheck {
    let coeffs: Vec<(BigRational, BigRational)> = (0..=n).map(series_coefficients).collect();
    let mut triple_sum = BigRational::zero();
    for r in 0..=n {
        for m in 0..=r {
            triple_sum += &coeffs[m as usize].0 * &coeffs[(r - m) as usize].1 * &coeffs[(n - r) as usize].1;
        }
    }
    let base = int(n as i64 + 1) * sign(n) * binomial_half(n + 1);
    let closed_form = BigRational::new(BigInt::from(16 * n as i64 - 10), BigInt::from(2 * n as i64 - 1)) * &base;
    let bound = int(8) * base;
    SnCheck {
        equal: triple_sum == closed_form,
        bound_holds: triple_sum <= bound,
        triple_sum,
        closed_form,
    }
}

/// `Σ_{i=0}^m a_i b_{m−i}` against `4(−1)^m(m+1)(½ choose m+1)`.
pub fn convolution_identity(m: u32) -> IdentityCheck {
    let mut lhs = BigRational::zero();
    for i in 0..=m {
        let a = int(2 * (i as i64 + 1)) * sign(i) * binomial_half(i + 1);
        // (−1)^{m−i−1} has the parity of m − i + 1.
        let b = sign(m - i + 1) * binomial_half(m - i);
        lhs += a * b;
    }
    let rhs = int(4) * sign(m) * int(m as i64 + 1) * binomial_half(m + 1);
    IdentityCheck::new(lhs, rhs)
}

/// True when `(−1)^{j−1}·x ≥ 0`.
pub fn has_alternating_sign(j: u32, x: &BigRational) -> bool {
    !(sign(j + 1) * x).is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn binomial_half_values() {
        assert_eq!(binomial_half(0), r(-1, 1));
        assert_eq!(binomial_half(1), r(1, 2));
        assert_eq!(binomial_half(2), r(-1, 8));
        assert_eq!(binomial_half(3), r(1, 16));
    }

    #[test]
    fn double_factorial_edges() {
        assert_eq!(double_factorial(-1), BigInt::one());
        assert_eq!(double_factorial(1), BigInt::one());
        assert_eq!(double_factorial(7), BigInt::from(105));
    }

    #[test]
    fn factorial_bound_small() {
        let c = check_factorial_bound(2).unwrap();
        assert_eq!((c.lhs.clone(), c.rhs.clone()), (r(1, 4), r(1, 4)));
        let c = check_factorial_bound(3).unwrap();
        assert_eq!((c.lhs.clone(), c.rhs.clone()), (r(3, 8), r(3, 8)));
        assert!(check_factorial_bound(5).unwrap().equal);
        assert!(check_factorial_bound(1).is_err());
    }

    #[test]
    fn magic_1d_small() {
        let c = magic_identity_1d(1);
        assert_eq!((c.lhs.clone(), c.equal), (r(-1, 2), true));
        let c = magic_identity_1d(2);
        assert_eq!((c.lhs.clone(), c.equal), (r(3, 8), true));
        assert!(magic_identity_1d(12).equal);
    }

    #[test]
    fn magic_multi_small() {
        let m = magic_identity_multi(1, 1);
        assert_eq!((m.lhs, m.ratio), (r(-1, 2), r(1, 1)));
        let m = magic_identity_multi(1, 2);
        assert_eq!((m.lhs, m.rhs, m.ratio), (r(-1, 1), r(-1, 2), r(2, 1)));
    }

    #[test]
    fn series_coefficient_values() {
        assert_eq!(series_coefficients(0), (r(1, 1), r(1, 1)));
        assert_eq!(series_coefficients(1), (r(1, 2), r(1, 2)));
        assert_eq!(series_coefficients(3), (r(5, 16), r(1, 16)));
    }

    #[test]
    fn s_n_small() {
        let c = s_n_identity(1);
        assert_eq!(c.triple_sum, r(3, 2));
        assert_eq!(c.closed_form, r(3, 2));
        assert!(c.equal && c.bound_holds);
    }

    #[test]
    fn convolution_small() {
        // The closed form overshoots the empty-tail case m = 0 by a factor 2.
        let c = convolution_identity(0);
        assert_eq!((c.lhs, c.rhs, c.equal), (r(1, 1), r(2, 1), false));
        assert_eq!(convolution_identity(1), IdentityCheck::new(r(1, 1), r(1, 1)));
        assert!(convolution_identity(30).equal);
    }
}
