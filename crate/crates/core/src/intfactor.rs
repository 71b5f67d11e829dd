//! Factorization of Mersenne-type integers `2^d - 1` and the Euler-phi
//! ratios behind the primitivity probability estimate.
//!
//! Strategy: numbers `2^d - 1` split algebraically into cyclotomic parts
//! `prod_{e | d} Phi_e(2)`, each of which is small enough for trial division
//! up to 10^6 followed by Pollard rho (Brent variant). Primality below 2^64
//! uses deterministic Miller-Rabin witnesses; above, a strong probabilistic
//! test. A composite that rho cannot split surfaces as an explicit error,
//! never as a wrong answer.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Trial-division bound applied before Pollard rho.
const TRIAL_BOUND: u128 = 1_000_000;

/// A complete prime factorization: `value = prod p_i^(e_i)` with the primes
/// strictly increasing and each one certified by a primality check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    value: BigUint,
    factors: Vec<(BigUint, u32)>,
}

impl Factorization {
    /// Builds a factorization, validating the invariants: exponents positive,
    /// primes strictly increasing and probably prime, product equal to value.
    pub fn new(value: BigUint, factors: Vec<(BigUint, u32)>) -> Result<Self> {
        if value.is_zero() {
            return Err(Error::ZeroValue);
        }
        let mut product = BigUint::one();
        let mut prev: Option<&BigUint> = None;
        for (p, e) in &factors {
            if *e == 0 {
                return Err(Error::InvalidFactorization(format!("zero exponent on {p}")));
            }
            if let Some(q) = prev {
                if p <= q {
                    return Err(Error::InvalidFactorization(
                        "primes must be strictly increasing".into(),
                    ));
                }
            }
            if !is_probable_prime(p) {
                return Err(Error::InvalidFactorization(format!("{p} is not prime")));
            }
            product *= p.pow(*e);
            prev = Some(p);
        }
        if product != value {
            return Err(Error::InvalidFactorization(format!(
                "prime powers multiply to {product}, expected {value}"
            )));
        }
        Ok(Self { value, factors })
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn factors(&self) -> &[(BigUint, u32)] {
        &self.factors
    }

    /// The distinct primes, in increasing order.
    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|(p, _)| p)
    }

    /// Parses the text form `N = p1^e1 * p2^e2 * ...` (`^1` may be omitted;
    /// `1 = 1` denotes the empty factorization).
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidFactorization(format!("{m}: {s}"));
        let (lhs, rhs) = s.split_once('=').ok_or_else(|| bad("missing '='"))?;
        let value = BigUint::parse_bytes(lhs.trim().as_bytes(), 10)
            .ok_or_else(|| bad("bad decimal value"))?;
        let mut factors: Vec<(BigUint, u32)> = Vec::new();
        for term in rhs.split('*') {
            let term = term.trim();
            if term == "1" && factors.is_empty() && value.is_one() {
                continue;
            }
            let (p, e) = match term.split_once('^') {
                Some((p, e)) => (
                    p.trim(),
                    e.trim().parse::<u32>().map_err(|_| bad("bad exponent"))?,
                ),
                None => (term, 1),
            };
            let p = BigUint::parse_bytes(p.as_bytes(), 10).ok_or_else(|| bad("bad prime"))?;
            factors.push((p, e));
        }
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        Self::new(value, factors)
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = ", self.value)?;
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// The number `2^d - 1`.
pub fn mersenne_number(d: usize) -> BigUint {
    (BigUint::one() << d) - 1u32
}

/// Completely factors `n >= 1`.
pub fn factor(n: &BigUint) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::ZeroValue);
    }
    let mut primes: Vec<BigUint> = Vec::new();
    split(n.clone(), &mut primes)?;
    primes.sort();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Factorization::new(n.clone(), factors)
}

/// Completely factors `2^d - 1`, pre-splitting into the cyclotomic parts
/// `Phi_e(2)` over the divisors `e` of `d` before factoring each part.
pub fn mersenne_factorization(d: usize) -> Result<Factorization> {
    if d == 0 {
        return Err(Error::InvalidParameter("mersenne exponent must be >= 1".into()));
    }
    let mut primes: Vec<BigUint> = Vec::new();
    for e in divisors(d) {
        split(cyclotomic_at_two(e), &mut primes)?;
    }
    primes.sort();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Factorization::new(mersenne_number(d), factors)
}

/// Value of the `e`-th cyclotomic polynomial at 2, via the Moebius product
/// `prod_{f | e} (2^f - 1)^(mu(e/f))`.
fn cyclotomic_at_two(e: usize) -> BigUint {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for f in divisors(e) {
        match moebius(e / f) {
            1 => num *= mersenne_number(f),
            -1 => den *= mersenne_number(f),
            _ => {}
        }
    }
    debug_assert!((&num % &den).is_zero());
    num / den
}

fn divisors(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

fn moebius(mut n: usize) -> i32 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

fn split(n: BigUint, out: &mut Vec<BigUint>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    // Values below 2^126 run entirely in native words.
    if n.bits() <= 126 {
        return split_u128(n.to_u128().unwrap(), out);
    }
    let mut n = n;
    let mut p: u64 = 2;
    while (p as u128) <= TRIAL_BOUND {
        while (&n % p).is_zero() {
            out.push(BigUint::from(p));
            n /= p;
        }
        if n.bits() <= 126 {
            return split_u128(n.to_u128().unwrap(), out);
        }
        p = if p == 2 { 3 } else { p + 2 };
    }
    let mut stack = vec![n];
    while let Some(c) = stack.pop() {
        if c.is_one() {
            continue;
        }
        if c.bits() <= 126 {
            split_u128(c.to_u128().unwrap(), out)?;
            continue;
        }
        if is_probable_prime(&c) {
            out.push(c);
            continue;
        }
        let d = rho_biguint(&c).ok_or_else(|| Error::FactoringFailed(c.to_string()))?;
        stack.push(&c / &d);
        stack.push(d);
    }
    Ok(())
}

fn split_u128(mut n: u128, out: &mut Vec<BigUint>) -> Result<()> {
    for p in [2u128, 3] {
        while n % p == 0 {
            out.push(BigUint::from(p));
            n /= p;
        }
    }
    let mut p: u128 = 5;
    while p <= TRIAL_BOUND && p * p <= n {
        while n % p == 0 {
            out.push(BigUint::from(p));
            n /= p;
        }
        p += 2;
    }
    if n == 1 {
        return Ok(());
    }
    if p * p > n {
        out.push(BigUint::from(n));
        return Ok(());
    }
    let mut stack = vec![n];
    while let Some(c) = stack.pop() {
        if c == 1 {
            continue;
        }
        if is_prime_u128(c) {
            out.push(BigUint::from(c));
            continue;
        }
        let d = rho_u128(c).ok_or_else(|| Error::FactoringFailed(c.to_string()))?;
        stack.push(c / d);
        stack.push(d);
    }
    Ok(())
}

fn addmod(a: u128, b: u128, n: u128) -> u128 {
    // n < 2^127 keeps a + b from overflowing
    let s = a + b;
    if s >= n {
        s - n
    } else {
        s
    }
}

fn mulmod(a: u128, b: u128, n: u128) -> u128 {
    if n <= u64::MAX as u128 {
        return (a % n) * (b % n) % n;
    }
    let mut r = 0u128;
    let mut a = a % n;
    let mut b = b % n;
    while b > 0 {
        if b & 1 == 1 {
            r = addmod(r, a, n);
        }
        a = addmod(a, a, n);
        b >>= 1;
    }
    r
}

fn powmod_u128(mut base: u128, mut e: u128, n: u128) -> u128 {
    let mut r = 1 % n;
    base %= n;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, base, n);
        }
        base = mulmod(base, base, n);
        e >>= 1;
    }
    r
}

/// Witnesses proving primality for all n below 3.3 * 10^24 (beyond 2^64).
const MR_WITNESSES: [u128; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn miller_rabin_u128(n: u128, a: u128) -> bool {
    // returns true if n passes the strong test to base a
    let a = a % n;
    if a == 0 {
        return true;
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    let mut x = powmod_u128(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mulmod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

fn is_prime_u128(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        if n % p == 0 {
            return n == p;
        }
    }
    if MR_WITNESSES.iter().any(|&a| !miller_rabin_u128(n, a)) {
        return false;
    }
    if n >> 80 == 0 {
        return true; // witness set is deterministic in this range
    }
    // extra pseudo-random bases for the tail of the u128 range
    let mut state = (n as u64) ^ 0x9E3779B97F4A7C15;
    for _ in 0..24 {
        state = splitmix64(state);
        let a = 2 + (state as u128) % (n - 3);
        if !miller_rabin_u128(n, a) {
            return false;
        }
    }
    true
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Strong probable-prime test: deterministic below 2^80, probabilistic above.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if n.bits() <= 126 {
        return is_prime_u128(n.to_u128().unwrap());
    }
    let two = BigUint::from(2u32);
    if n.is_even() {
        return false;
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap();
    let d = &n_minus_1 >> s;
    let check = |a: &BigUint| -> bool {
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            return true;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                return true;
            }
        }
        false
    };
    for a in MR_WITNESSES {
        if !check(&BigUint::from(a)) {
            return false;
        }
    }
    let mut state = n.to_u64_digits()[0] ^ 0x9E3779B97F4A7C15;
    for _ in 0..24 {
        state = splitmix64(state);
        let a = BigUint::from(state) % (n - 4u32) + 2u32;
        if !check(&a) {
            return false;
        }
    }
    true
}

fn rho_u128(n: u128) -> Option<u128> {
    // Brent's cycle-finding variant; n must be odd and composite
    if n % 2 == 0 {
        return Some(2);
    }
    for c in 1u128..64 {
        if let Some(d) = rho_brent_u128(n, c) {
            if d != n && d != 1 {
                return Some(d);
            }
        }
    }
    None
}

fn rho_brent_u128(n: u128, c: u128) -> Option<u128> {
    let f = |x: u128| addmod(mulmod(x, x, n), c, n);
    let mut y: u128 = 2;
    let mut r: u64 = 1;
    let mut q: u128 = 1;
    let mut g: u128 = 1;
    let mut x = y;
    let mut ys = y;
    let m: u64 = 128;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k: u64 = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mulmod(q, x.abs_diff(y), n);
            }
            g = gcd_u128(q, n);
            k += m;
        }
        r <<= 1;
        if r == 0 {
            return None;
        }
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd_u128(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    if g == n {
        None
    } else {
        Some(g)
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

fn rho_biguint(n: &BigUint) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    for c in 1u32..32 {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut x;
        let mut ys = y.clone();
        let mut r: u64 = 1;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let m: u64 = 128;
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k: u64 = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = q * diff % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r <<= 1;
            if g == *n {
                // backtrack
                let x = x.clone();
                loop {
                    ys = f(&ys);
                    let diff = if x > ys { &x - &ys } else { &ys - &x };
                    g = diff.gcd(n);
                    if !g.is_one() {
                        break;
                    }
                }
                break;
            }
        }
        if !g.is_one() && g != *n {
            return Some(g);
        }
    }
    None
}

/// An exact nonnegative rational, kept reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ratio {
    num: BigUint,
    den: BigUint,
}

impl Ratio {
    pub fn new(num: BigUint, den: BigUint) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let g = num.gcd(&den);
        Self {
            num: &num / &g,
            den: &den / &g,
        }
    }

    pub fn numer(&self) -> &BigUint {
        &self.num
    }

    pub fn denom(&self) -> &BigUint {
        &self.den
    }

    /// Multiplies by `other.den / other.num`.
    pub fn div(&self, other: &Ratio) -> Ratio {
        Ratio::new(&self.num * &other.den, &self.den * &other.num)
    }

    pub fn to_f64(&self) -> f64 {
        self.num.to_f64().unwrap() / self.den.to_f64().unwrap()
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// `phi(n)/n = prod_{p | n} (1 - 1/p)` over the distinct primes of `n`.
pub fn phi_ratio(fact: &Factorization) -> Ratio {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for p in fact.primes() {
        num *= p - 1u32;
        den *= p;
    }
    Ratio::new(num, den)
}

/// Maximum `m * n` for which `2^(mn) - 1` is factored internally.
pub const FACTOR_FEASIBILITY_BOUND: usize = 96;

/// Probability that an irreducible candidate built on a primitive `T` is
/// primitive: `(phi(|K*|)/|K*|) / (phi(|L*|)/|L*|)` with `|K*| = 2^(mn) - 1`
/// and `|L*| = 2^m - 1`.
pub fn primitivity_prob(m: usize, n: usize) -> Result<f64> {
    let mn = m.checked_mul(n).unwrap_or(usize::MAX);
    if m == 0 || n == 0 || mn > FACTOR_FEASIBILITY_BOUND {
        return Err(Error::TooLarge(format!(
            "m*n = {mn} outside 1..={FACTOR_FEASIBILITY_BOUND} (supply a factorization override)"
        )));
    }
    let k = mersenne_factorization(mn)?;
    let l = mersenne_factorization(m)?;
    Ok(primitivity_prob_from(&k, &l))
}

/// Same estimate from explicit factorizations of `|K*|` and `|L*|`.
pub fn primitivity_prob_from(k_fact: &Factorization, l_fact: &Factorization) -> f64 {
    phi_ratio(k_fact).div(&phi_ratio(l_fact)).to_f64()
}

/// Splits `|K*| = k_L * a` where `k_L` collects every prime power of `|K*|`
/// whose prime divides `|L*|`; `a` is coprime to `|L*|`.
pub fn coprime_part(k_fact: &Factorization, l_fact: &Factorization) -> (BigUint, BigUint) {
    let mut k_l = BigUint::one();
    for (p, e) in k_fact.factors() {
        if (l_fact.value() % p).is_zero() {
            k_l *= p.pow(*e);
        }
    }
    let a = k_fact.value() / &k_l;
    (k_l, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fact_of(n: u64) -> Factorization {
        factor(&BigUint::from(n)).unwrap()
    }

    #[test]
    fn factor_small_mersennes() {
        // trial-division oracle territory
        let f = fact_of(255);
        assert_eq!(
            f.factors(),
            &[
                (BigUint::from(3u32), 1),
                (BigUint::from(5u32), 1),
                (BigUint::from(17u32), 1)
            ]
        );
        let f = fact_of(65535);
        assert_eq!(f.to_string(), "65535 = 3 * 5 * 17 * 257");
    }

    #[test]
    fn factor_one_is_empty() {
        let f = fact_of(1);
        assert!(f.factors().is_empty());
        assert_eq!(f.to_string(), "1 = 1");
    }

    #[test]
    fn factor_zero_errors() {
        assert_eq!(factor(&BigUint::zero()), Err(Error::ZeroValue));
    }

    #[test]
    fn mersenne_matches_direct_factor() {
        for d in [1usize, 2, 8, 12, 16, 24, 36] {
            let direct = factor(&mersenne_number(d)).unwrap();
            let split = mersenne_factorization(d).unwrap();
            assert_eq!(direct, split, "2^{d} - 1");
        }
    }

    #[test]
    fn mersenne_72_has_known_shape() {
        let f = mersenne_factorization(72).unwrap();
        assert_eq!(
            f.to_string(),
            "4722366482869645213695 = 3^3 * 5 * 7 * 13 * 17 * 19 * 37 * 73 * 109 * 241 * 433 * 38737"
        );
    }

    #[test]
    fn rho_splits_past_trial_bound() {
        // 2^67 - 1 = 193707721 * 761838257287, both beyond the trial bound
        let f = mersenne_factorization(67).unwrap();
        assert_eq!(
            f.to_string(),
            "147573952589676412927 = 193707721 * 761838257287"
        );
    }

    #[test]
    fn phi_ratio_examples() {
        let r = phi_ratio(&fact_of(255));
        assert_eq!(r.to_string(), "128/255");
        assert!((r.to_f64() - 0.502).abs() < 1e-3);
        let r56 = phi_ratio(&mersenne_factorization(56).unwrap());
        assert!((r56.to_f64() - 0.465).abs() < 1e-3);
        assert_eq!(phi_ratio(&fact_of(1)).to_f64(), 1.0);
    }

    #[test]
    fn primitivity_prob_paper_table() {
        assert!((primitivity_prob(8, 7).unwrap() - 0.927).abs() < 1e-3);
        assert!((primitivity_prob(16, 4).unwrap() - 0.998).abs() < 1e-3);
        assert!((primitivity_prob(24, 3).unwrap() - 0.898).abs() < 1e-3);
        assert!((primitivity_prob(32, 2).unwrap() - 0.998).abs() < 1e-3);
    }

    #[test]
    fn primitivity_prob_trivial_when_n_is_one() {
        for m in [1usize, 4, 9, 16] {
            assert_eq!(primitivity_prob(m, 1).unwrap(), 1.0);
        }
    }

    #[test]
    fn primitivity_prob_bound() {
        assert!(matches!(primitivity_prob(97, 1), Err(Error::TooLarge(_))));
    }

    #[test]
    fn coprime_part_examples() {
        let k = fact_of(15);
        let l = fact_of(3);
        assert_eq!(
            coprime_part(&k, &l),
            (BigUint::from(3u32), BigUint::from(5u32))
        );
        let one = fact_of(1);
        assert_eq!(coprime_part(&k, &one), (BigUint::one(), BigUint::from(15u32)));
        assert_eq!(coprime_part(&k, &k), (BigUint::from(15u32), BigUint::one()));
    }

    #[test]
    fn parse_round_trip() {
        let f = Factorization::parse("65535 = 3 * 5 * 17 * 257").unwrap();
        assert_eq!(f, fact_of(65535));
        let f = Factorization::parse("18 = 2 * 3^2").unwrap();
        assert_eq!(f.to_string(), "18 = 2 * 3^2");
        assert!(Factorization::parse("12 = 3 * 5").is_err());
        assert!(Factorization::parse("15 = 3 * 5 * 1").is_err());
    }

    #[test]
    fn validation_rejects_composites_and_disorder() {
        assert!(Factorization::new(
            BigUint::from(16u32),
            vec![(BigUint::from(4u32), 2)]
        )
        .is_err());
        assert!(Factorization::new(
            BigUint::from(15u32),
            vec![(BigUint::from(5u32), 1), (BigUint::from(3u32), 1)]
        )
        .is_err());
    }

    #[test]
    fn probable_prime_spot_checks() {
        for p in [2u64, 3, 5, 65537, 2147483647, 6700417, 15790321] {
            assert!(is_probable_prime(&BigUint::from(p)), "{p}");
        }
        for c in [1u64, 4, 561, 65535, 6700416] {
            assert!(!is_probable_prime(&BigUint::from(c)), "{c}");
        }
        // 2^61 - 1 is prime; 2^67 - 1 is not
        assert!(is_probable_prime(&mersenne_number(61)));
        assert!(!is_probable_prime(&mersenne_number(67)));
    }
}
