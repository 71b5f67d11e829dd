//! Dense bit-packed polynomials over the two-element field.
//!
//! Bit `i` of the backing words is the coefficient of `x^i`, so a polynomial
//! doubles as a plain integer in hex: `x^4 + x + 1` is `0x13`. Every nonzero
//! polynomial over GF(2) is monic, which keeps division and gcd simple.

use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::intfactor::{mersenne_number, Factorization};

/// Degree of a polynomial. The zero polynomial has no finite degree and its
/// marker compares below every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

/// A polynomial over GF(2), little-endian bit packed with no trailing zero
/// limbs.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PolyF2 {
    limbs: Vec<u64>,
}

impl PolyF2 {
    pub fn zero() -> Self {
        Self { limbs: Vec::new() }
    }

    pub fn one() -> Self {
        Self { limbs: vec![1] }
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self { limbs: vec![2] }
    }

    /// The monomial `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut p = Self::zero();
        p.set_bit(k);
        p
    }

    pub fn from_limbs(limbs: Vec<u64>) -> Self {
        let mut p = Self { limbs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.limbs.last() == Some(&0) {
            self.limbs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.limbs == [1]
    }

    /// Coefficient of `x^i`.
    pub fn bit(&self, i: usize) -> bool {
        match self.limbs.get(i / 64) {
            Some(w) => (w >> (i % 64)) & 1 == 1,
            None => false,
        }
    }

    fn set_bit(&mut self, i: usize) {
        let limb = i / 64;
        if limb >= self.limbs.len() {
            self.limbs.resize(limb + 1, 0);
        }
        self.limbs[limb] |= 1 << (i % 64);
    }

    /// Number of coefficient bits up to and including the leading one;
    /// `degree + 1` for nonzero polynomials and 0 for the zero polynomial.
    pub fn bits(&self) -> usize {
        match self.limbs.last() {
            Some(w) => self.limbs.len() * 64 - w.leading_zeros() as usize,
            None => 0,
        }
    }

    pub fn degree(&self) -> Degree {
        match self.bits() {
            0 => Degree::NegInfinity,
            b => Degree::Finite(b - 1),
        }
    }

    pub fn finite_degree(&self) -> Option<usize> {
        match self.bits() {
            0 => None,
            b => Some(b - 1),
        }
    }

    /// `self * x^k`.
    pub fn shl(&self, k: usize) -> Self {
        let mut out = Self::zero();
        out.xor_shl(self, k);
        out
    }

    /// `self ^= other * x^k`.
    fn xor_shl(&mut self, other: &Self, k: usize) {
        if other.is_zero() {
            return;
        }
        let limb_off = k / 64;
        let bit_off = k % 64;
        let needed = other.limbs.len() + limb_off + 1;
        if self.limbs.len() < needed {
            self.limbs.resize(needed, 0);
        }
        for (i, &w) in other.limbs.iter().enumerate() {
            self.limbs[i + limb_off] ^= w << bit_off;
            if bit_off != 0 {
                self.limbs[i + limb_off + 1] ^= w >> (64 - bit_off);
            }
        }
        self.normalize();
    }

    pub fn add_assign(&mut self, other: &Self) {
        if self.limbs.len() < other.limbs.len() {
            self.limbs.resize(other.limbs.len(), 0);
        }
        for (i, &w) in other.limbs.iter().enumerate() {
            self.limbs[i] ^= w;
        }
        self.normalize();
    }

    /// Carryless product.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0u64; self.limbs.len() + other.limbs.len()];
        for (i, &a) in self.limbs.iter().enumerate() {
            for (j, &b) in other.limbs.iter().enumerate() {
                let (hi, lo) = clmul64(a, b);
                out[i + j] ^= lo;
                out[i + j + 1] ^= hi;
            }
        }
        Self::from_limbs(out)
    }

    /// Squaring in characteristic 2 just spreads the coefficient bits.
    pub fn square(&self) -> Self {
        let mut out = Vec::with_capacity(self.limbs.len() * 2);
        for &w in &self.limbs {
            out.push(spread_u32(w as u32));
            out.push(spread_u32((w >> 32) as u32));
        }
        Self::from_limbs(out)
    }

    /// Euclidean division: returns `(q, r)` with `self = q * div + r` and
    /// `deg r < deg div`.
    pub fn divrem(&self, div: &Self) -> Result<(Self, Self)> {
        let db = div.bits();
        if db == 0 {
            return Err(Error::DivisionByZero);
        }
        let mut q = Self::zero();
        let mut r = self.clone();
        while r.bits() >= db {
            let shift = r.bits() - db;
            q.set_bit(shift);
            r.xor_shl(div, shift);
        }
        Ok((q, r))
    }

    /// Remainder only; avoids building the quotient.
    pub fn rem(&self, div: &Self) -> Result<Self> {
        let db = div.bits();
        if db == 0 {
            return Err(Error::DivisionByZero);
        }
        let mut r = self.clone();
        while r.bits() >= db {
            let shift = r.bits() - db;
            r.xor_shl(div, shift);
        }
        Ok(r)
    }

    /// Greatest common divisor; monic (nonzero) whenever an input is nonzero.
    pub fn gcd(a: &Self, b: &Self) -> Result<Self> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::GcdOfZeros);
        }
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("b nonzero");
            a = b;
            b = r;
        }
        Ok(a)
    }

    fn mulmod(&self, other: &Self, modulus: &Self) -> Self {
        self.mul(other).rem(modulus).expect("modulus nonzero")
    }

    fn sqrmod(&self, modulus: &Self) -> Self {
        self.square().rem(modulus).expect("modulus nonzero")
    }

    /// `self^exp mod modulus` by square-and-multiply; the exponent may be as
    /// large as `2^(mn)`.
    pub fn powmod(&self, exp: &BigUint, modulus: &Self) -> Result<Self> {
        if modulus.bits() < 2 {
            return Err(Error::ConstantModulus);
        }
        let base = self.rem(modulus)?;
        let mut acc = Self::one();
        for i in (0..exp.bits()).rev() {
            acc = acc.sqrmod(modulus);
            if exp.bit(i) {
                acc = acc.mulmod(&base, modulus);
            }
        }
        Ok(acc)
    }

    /// Rabin's test: `f` of degree `d` is irreducible iff
    /// `x^(2^d) = x (mod f)` and `gcd(x^(2^(d/p)) - x, f) = 1` for every
    /// prime `p` dividing `d`.
    pub fn is_irreducible(&self) -> Result<bool> {
        let d = match self.finite_degree() {
            Some(d) if d >= 1 => d,
            _ => return Err(Error::ConstantPolynomial),
        };
        let x_red = Self::x().rem(self)?;
        let mut checkpoints: Vec<usize> = prime_factors_usize(d).iter().map(|p| d / p).collect();
        checkpoints.sort_unstable();
        checkpoints.dedup();
        let mut y = x_red.clone();
        let mut reached = 0usize;
        for c in checkpoints {
            for _ in reached..c {
                y = y.sqrmod(self);
            }
            reached = c;
            let mut diff = y.clone();
            diff.add_assign(&x_red);
            if diff.is_zero() || !Self::gcd(&diff, self)?.is_one() {
                return Ok(false);
            }
        }
        for _ in reached..d {
            y = y.sqrmod(self);
        }
        Ok(y == x_red)
    }

    /// Whether the class of `x` generates the full multiplicative group of
    /// `GF(2)[x]/<f>`, i.e. has order `2^d - 1`. Requires `f` irreducible and
    /// a complete factorization of `2^d - 1`.
    pub fn is_primitive(&self, fact: &Factorization) -> Result<bool> {
        if !self.is_irreducible()? {
            return Err(Error::NotIrreducible);
        }
        let d = self.finite_degree().expect("degree >= 1");
        let order = mersenne_number(d);
        if *fact.value() != order {
            return Err(Error::FactorizationMismatch(format!(
                "expected a factorization of 2^{d} - 1 = {order}, got {}",
                fact.value()
            )));
        }
        if !self.bit(0) {
            // f = x: its root is 0, which generates nothing
            return Ok(false);
        }
        let x = Self::x();
        for p in fact.primes() {
            let e = &order / p;
            if x.powmod(&e, self)?.is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Integer whose binary digits are the coefficients.
    pub fn to_biguint(&self) -> BigUint {
        let bytes: Vec<u8> = self.limbs.iter().flat_map(|w| w.to_le_bytes()).collect();
        BigUint::from_bytes_le(&bytes)
    }

    pub fn from_biguint(n: &BigUint) -> Self {
        Self::from_limbs(n.to_u64_digits())
    }

    /// Canonical hex form, e.g. `0x13` for `x^4 + x + 1`.
    pub fn to_hex(&self) -> String {
        format!("{:#x}", self.to_biguint())
    }

    /// Parses hex with or without a `0x` prefix.
    pub fn from_hex(s: &str) -> Result<Self> {
        let t = s.trim();
        let digits = t
            .strip_prefix("0x")
            .or_else(|| t.strip_prefix("0X"))
            .unwrap_or(t);
        if digits.is_empty() {
            return Err(Error::HexParse(s.into()));
        }
        let n = BigUint::parse_bytes(digits.as_bytes(), 16)
            .ok_or_else(|| Error::HexParse(s.into()))?;
        Ok(Self::from_biguint(&n))
    }
}

impl Add<&PolyF2> for &PolyF2 {
    type Output = PolyF2;
    fn add(self, rhs: &PolyF2) -> PolyF2 {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Mul<&PolyF2> for &PolyF2 {
    type Output = PolyF2;
    fn mul(self, rhs: &PolyF2) -> PolyF2 {
        PolyF2::mul(self, rhs)
    }
}

impl fmt::Display for PolyF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_hex())
    }
}

impl fmt::Debug for PolyF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyF2({})", self.to_hex())
    }
}

fn clmul64(a: u64, b: u64) -> (u64, u64) {
    let mut hi = 0u64;
    let mut lo = 0u64;
    let mut b = b;
    while b != 0 {
        let i = b.trailing_zeros();
        lo ^= a << i;
        if i != 0 {
            hi ^= a >> (64 - i);
        }
        b &= b - 1;
    }
    (hi, lo)
}

/// Interleaves the bits of `x` with zeros.
fn spread_u32(x: u32) -> u64 {
    let mut v = x as u64;
    v = (v | (v << 16)) & 0x0000_FFFF_0000_FFFF;
    v = (v | (v << 8)) & 0x00FF_00FF_00FF_00FF;
    v = (v | (v << 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    v = (v | (v << 2)) & 0x3333_3333_3333_3333;
    v = (v | (v << 1)) & 0x5555_5555_5555_5555;
    v
}

fn prime_factors_usize(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The homogeneous substitution `p_q(g, f) = g^(deg q) * q(f/g)`, i.e.
/// `sum_i q_i * f^i * g^(deg q - i)`. For `q = f_T`, `g = f_S`, `f = x^n`
/// this is the TSR characteristic polynomial.
pub fn homogeneous_compose(q: &PolyF2, g: &PolyF2, f: &PolyF2) -> Result<PolyF2> {
    let m = q.finite_degree().ok_or(Error::ConstantPolynomial)?;
    let mut g_pows = Vec::with_capacity(m + 1);
    g_pows.push(PolyF2::one());
    for i in 1..=m {
        g_pows.push(g_pows[i - 1].mul(g));
    }
    let mut acc = PolyF2::zero();
    let mut f_pow = PolyF2::one();
    for i in 0..=m {
        if q.bit(i) {
            acc.add_assign(&f_pow.mul(&g_pows[m - i]));
        }
        if i < m {
            f_pow = f_pow.mul(f);
        }
    }
    Ok(acc)
}

/// Number of distinct monic irreducible factors of `f`, multiplicities
/// ignored: the dimension of the kernel of (Frobenius - identity) acting on
/// `GF(2)[x]/<f>`. A nonzero constant has no factors.
pub fn count_distinct_irreducible_factors(f: &PolyF2) -> Result<usize> {
    let d = match f.degree() {
        Degree::NegInfinity => return Err(Error::ZeroValue),
        Degree::Finite(0) => return Ok(0),
        Degree::Finite(d) => d,
    };
    if d > 128 {
        return Err(Error::TooLarge(format!(
            "factor counting supports degree <= 128, got {d}"
        )));
    }
    let x_sq = PolyF2::monomial(2);
    let mut rows: Vec<u128> = Vec::with_capacity(d);
    let mut s = PolyF2::one(); // x^(2j) mod f
    for j in 0..d {
        if j > 0 {
            s = s.mulmod(&x_sq, f);
        }
        rows.push(poly_bits_u128(&s) ^ (1u128 << j));
    }
    Ok(d - rank_u128(&mut rows))
}

fn poly_bits_u128(p: &PolyF2) -> u128 {
    debug_assert!(p.bits() <= 128);
    let mut v = 0u128;
    for (i, &w) in p.limbs.iter().enumerate() {
        v |= (w as u128) << (64 * i);
    }
    v
}

fn rank_u128(rows: &mut [u128]) -> usize {
    let mut rank = 0;
    for col in 0..128 {
        let mask = 1u128 << col;
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] & mask != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let prow = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row & mask != 0 {
                *row ^= prow;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intfactor::factor;

    fn p(hex: u64) -> PolyF2 {
        PolyF2::from_limbs(vec![hex])
    }

    /// Schoolbook multiplication over individual bits, used as an oracle.
    fn naive_mul(a: &PolyF2, b: &PolyF2) -> PolyF2 {
        let mut out = PolyF2::zero();
        for i in 0..a.bits() {
            if a.bit(i) {
                out.add_assign(&b.shl(i));
            }
        }
        out
    }

    #[test]
    fn add_examples() {
        assert_eq!(&p(0x3) + &p(0x3), PolyF2::zero());
        assert_eq!(&p(0x5) + &p(0x2), p(0x7));
        assert_eq!(&p(0xa) + &p(0x9), p(0x3));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&p(0x3) * &p(0x3), p(0x5));
        let prod = &p(0x3) * &p(0x7);
        assert_eq!(prod, p(0x9));
        assert_eq!(prod, naive_mul(&p(0x3), &p(0x7)));
        assert_eq!(&p(0x3) * &PolyF2::zero(), PolyF2::zero());
    }

    #[test]
    fn square_matches_mul() {
        for v in [0u64, 1, 2, 0x13, 0x1f, 0xdeadbeef, u64::MAX] {
            let f = p(v);
            assert_eq!(f.square(), f.mul(&f));
        }
        let wide = PolyF2::from_limbs(vec![0x0123456789abcdef, 0xfedcba9876543210]);
        assert_eq!(wide.square(), wide.mul(&wide));
    }

    #[test]
    fn divrem_examples() {
        let (q, r) = p(0x9).divrem(&p(0x3)).unwrap();
        assert_eq!((q.clone(), r.clone()), (p(0x7), PolyF2::zero()));
        assert_eq!(&(&q * &p(0x3)) + &r, p(0x9));

        let (q, r) = p(0x5).divrem(&p(0x7)).unwrap();
        assert_eq!((q.clone(), r.clone()), (PolyF2::one(), p(0x2)));
        assert_eq!(&(&q * &p(0x7)) + &r, p(0x5));

        let a = p(0x1d);
        assert_eq!(a.divrem(&a).unwrap(), (PolyF2::one(), PolyF2::zero()));
        assert_eq!(a.divrem(&PolyF2::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(PolyF2::gcd(&p(0x5), &p(0x3)).unwrap(), p(0x3));
        // x^n is coprime to anything with a unit constant term
        assert_eq!(
            PolyF2::gcd(&PolyF2::monomial(7), &p(0x2b)).unwrap(),
            PolyF2::one()
        );
        assert_eq!(PolyF2::gcd(&p(0x1d), &PolyF2::zero()).unwrap(), p(0x1d));
        assert_eq!(
            PolyF2::gcd(&PolyF2::zero(), &PolyF2::zero()),
            Err(Error::GcdOfZeros)
        );
    }

    /// Order of x in GF(2)[x]/<f> by brute-force repeated multiplication.
    fn brute_order_of_x(f: &PolyF2) -> u64 {
        let x = PolyF2::x().rem(f).unwrap();
        let mut acc = x.clone();
        let mut t = 1u64;
        while !acc.is_one() {
            acc = acc.mulmod(&x, f);
            t += 1;
            assert!(t < 1 << 20, "order runaway");
        }
        t
    }

    #[test]
    fn powmod_examples() {
        assert_eq!(brute_order_of_x(&p(0x13)), 15);
        assert!(PolyF2::x()
            .powmod(&BigUint::from(15u32), &p(0x13))
            .unwrap()
            .is_one());
        assert_eq!(brute_order_of_x(&p(0x1f)), 5);
        assert!(PolyF2::x()
            .powmod(&BigUint::from(5u32), &p(0x1f))
            .unwrap()
            .is_one());
        let x = p(0x2b);
        let m = p(0x13);
        assert_eq!(
            x.powmod(&BigUint::from(1u32), &m).unwrap(),
            x.rem(&m).unwrap()
        );
        assert_eq!(
            x.powmod(&BigUint::from(0u32), &PolyF2::one()),
            Err(Error::ConstantModulus)
        );
    }

    #[test]
    fn irreducible_examples() {
        assert!(p(0x7).is_irreducible().unwrap());
        assert!(!p(0x5).is_irreducible().unwrap());
        assert!(p(0x13).is_irreducible().unwrap());
        assert_eq!(PolyF2::one().is_irreducible(), Err(Error::ConstantPolynomial));
        // degree-1 edge cases
        assert!(p(0x2).is_irreducible().unwrap());
        assert!(p(0x3).is_irreducible().unwrap());
    }

    #[test]
    fn primitive_examples() {
        let f15 = factor(&BigUint::from(15u32)).unwrap();
        assert!(p(0x13).is_primitive(&f15).unwrap());
        assert!(!p(0x1f).is_primitive(&f15).unwrap());
        let f1 = factor(&BigUint::from(1u32)).unwrap();
        assert!(p(0x3).is_primitive(&f1).unwrap());
        assert!(!p(0x2).is_primitive(&f1).unwrap());
        assert_eq!(p(0x5).is_primitive(&f15), Err(Error::NotIrreducible));
        let wrong = factor(&BigUint::from(7u32)).unwrap();
        assert!(matches!(
            p(0x13).is_primitive(&wrong),
            Err(Error::FactorizationMismatch(_))
        ));
    }

    #[test]
    fn homogeneous_compose_examples() {
        // g = 1 is plain composition
        assert_eq!(
            homogeneous_compose(&p(0x7), &PolyF2::one(), &PolyF2::x()).unwrap(),
            p(0x7)
        );
        // degree-1 q gives f + g
        let g = p(0x2b);
        let f = p(0x63);
        assert_eq!(homogeneous_compose(&p(0x3), &g, &f).unwrap(), &f + &g);
        // hand-expanded: f^2 + f g + g^2 with f = x^2, g = x + 1
        assert_eq!(
            homogeneous_compose(&p(0x7), &p(0x3), &p(0x4)).unwrap(),
            p(0x19)
        );
        assert!(homogeneous_compose(&PolyF2::zero(), &g, &f).is_err());
    }

    #[test]
    fn factor_count_examples() {
        assert_eq!(count_distinct_irreducible_factors(&p(0x5)).unwrap(), 1);
        assert_eq!(count_distinct_irreducible_factors(&p(0x6)).unwrap(), 2);
        assert_eq!(count_distinct_irreducible_factors(&p(0x7)).unwrap(), 1);
        assert_eq!(
            count_distinct_irreducible_factors(&PolyF2::zero()),
            Err(Error::ZeroValue)
        );
        assert_eq!(count_distinct_irreducible_factors(&PolyF2::one()).unwrap(), 0);
    }

    #[test]
    fn hex_round_trip() {
        let f = p(0x13);
        assert_eq!(f.to_hex(), "0x13");
        assert_eq!(PolyF2::from_hex("0x13").unwrap(), f);
        assert_eq!(PolyF2::from_hex("13").unwrap(), f);
        assert_eq!(PolyF2::zero().to_hex(), "0x0");
        assert_eq!(PolyF2::from_hex("0x0").unwrap(), PolyF2::zero());
        assert!(PolyF2::from_hex("0xzz").is_err());
        assert!(PolyF2::from_hex("").is_err());
        let wide = PolyF2::from_limbs(vec![0xdeadbeefcafef00d, 0x123]);
        assert_eq!(PolyF2::from_hex(&wide.to_hex()).unwrap(), wide);
    }

    #[test]
    fn degree_markers() {
        assert_eq!(PolyF2::zero().degree(), Degree::NegInfinity);
        assert_eq!(PolyF2::one().degree(), Degree::Finite(0));
        assert_eq!(p(0x13).degree(), Degree::Finite(4));
        assert!(Degree::NegInfinity < Degree::Finite(0));
    }
}
