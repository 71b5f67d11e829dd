//! The extension field `L = GF(2)[x]/<f_T>` and polynomials over it.
//!
//! `L` is represented concretely by an irreducible modulus of degree `m`;
//! the class of `x` (called alpha here) is a root of that modulus. All roots
//! are Frobenius conjugates, so irreducibility and primitivity conclusions do
//! not depend on which root is picked. Polynomials over `L` carry the
//! candidate `x^n - alpha * f_S`, whose irreducibility over `L` decides the
//! irreducibility of the degree-`nm` characteristic polynomial over GF(2).

use std::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::intfactor::{mersenne_number, Factorization};
use crate::poly2::{Degree, PolyF2};

/// The field `GF(2^m)` as a quotient by an irreducible modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtField {
    modulus: PolyF2,
    degree: usize,
    order_star: BigUint,
}

impl ExtField {
    /// Builds the field; the modulus must be irreducible.
    pub fn new(modulus: PolyF2) -> Result<Self> {
        if !modulus.is_irreducible()? {
            return Err(Error::NotIrreducible);
        }
        let degree = modulus.finite_degree().expect("irreducible implies degree >= 1");
        let order_star = mersenne_number(degree);
        Ok(Self {
            modulus,
            degree,
            order_star,
        })
    }

    pub fn modulus(&self) -> &PolyF2 {
        &self.modulus
    }

    /// Extension degree `m`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `|L*| = 2^m - 1`.
    pub fn order_star(&self) -> &BigUint {
        &self.order_star
    }

    /// Element with the given representative, reduced mod the modulus.
    pub fn elem(&self, rep: PolyF2) -> ExtElem<'_> {
        ExtElem {
            rep: rep.rem(&self.modulus).expect("modulus nonzero"),
            field: self,
        }
    }

    pub fn zero(&self) -> ExtElem<'_> {
        ExtElem {
            rep: PolyF2::zero(),
            field: self,
        }
    }

    pub fn one(&self) -> ExtElem<'_> {
        self.elem(PolyF2::one())
    }

    /// The class of `x`: the distinguished root of the modulus.
    pub fn alpha(&self) -> ExtElem<'_> {
        self.elem(PolyF2::x())
    }

    fn same_as(&self, other: &ExtField) -> bool {
        std::ptr::eq(self, other) || self.modulus == other.modulus
    }
}

/// An element of an [`ExtField`], kept reduced below the modulus degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtElem<'f> {
    rep: PolyF2,
    field: &'f ExtField,
}

impl<'f> ExtElem<'f> {
    pub fn rep(&self) -> &PolyF2 {
        &self.rep
    }

    pub fn field(&self) -> &'f ExtField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.rep.is_one()
    }

    fn check_field(&self, other: &Self) {
        assert!(
            self.field.same_as(other.field),
            "mixed extension fields: {} vs {}",
            self.field.modulus,
            other.field.modulus
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_field(other);
        Self {
            rep: &self.rep + &other.rep,
            field: self.field,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_field(other);
        Self {
            rep: self
                .rep
                .mul(&other.rep)
                .rem(&self.field.modulus)
                .expect("modulus nonzero"),
            field: self.field,
        }
    }

    pub fn square(&self) -> Self {
        Self {
            rep: self
                .rep
                .square()
                .rem(&self.field.modulus)
                .expect("modulus nonzero"),
            field: self.field,
        }
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        let (mut r0, mut r1) = (self.rep.clone(), self.field.modulus.clone());
        let (mut s0, mut s1) = (PolyF2::one(), PolyF2::zero());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).expect("r1 nonzero");
            r0 = std::mem::replace(&mut r1, r);
            let s_next = &s0 + &q.mul(&s1);
            s0 = std::mem::replace(&mut s1, s_next);
        }
        debug_assert!(r0.is_one(), "modulus is irreducible");
        Ok(self.field.elem(s0))
    }

    pub fn pow(&self, e: &BigUint) -> Self {
        Self {
            rep: self
                .rep
                .powmod(e, &self.field.modulus)
                .expect("modulus degree >= 1"),
            field: self.field,
        }
    }

    /// The base-field Frobenius `u -> u^2`.
    pub fn frobenius(&self) -> Self {
        self.square()
    }

    /// Degree over GF(2) of the subfield this element generates: the size of
    /// its Frobenius orbit.
    pub fn orbit_degree(&self) -> usize {
        let mut y = self.frobenius();
        let mut k = 1;
        while y != *self {
            y = y.frobenius();
            k += 1;
        }
        k
    }

    /// Multiplicative order; requires a complete factorization of `|L*|`.
    pub fn order(&self, fact: &Factorization) -> Result<BigUint> {
        if self.is_zero() {
            return Err(Error::ZeroElement);
        }
        if fact.value() != self.field.order_star() {
            return Err(Error::FactorizationMismatch(format!(
                "expected a factorization of {}, got {}",
                self.field.order_star(),
                fact.value()
            )));
        }
        let mut e = self.field.order_star().clone();
        for (p, k) in fact.factors() {
            for _ in 0..*k {
                let cand = &e / p;
                if self.pow(&cand).is_one() {
                    e = cand;
                } else {
                    break;
                }
            }
        }
        Ok(e)
    }

    /// The index `|L*| / ord(self)`; index 1 means the element generates
    /// `L*`.
    pub fn index(&self, fact: &Factorization) -> Result<BigUint> {
        Ok(self.field.order_star() / self.order(fact)?)
    }
}

impl fmt::Display for ExtElem<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

/// A polynomial with [`ExtElem`] coefficients; index `i` is the coefficient
/// of `x^i`, with no trailing zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyExt<'f> {
    field: &'f ExtField,
    coeffs: Vec<ExtElem<'f>>,
}

impl<'f> PolyExt<'f> {
    pub fn new(field: &'f ExtField, coeffs: Vec<ExtElem<'f>>) -> Self {
        for c in &coeffs {
            assert!(
                field.same_as(c.field),
                "mixed extension fields in polynomial"
            );
        }
        let mut p = Self { field, coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn zero(field: &'f ExtField) -> Self {
        Self {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: &'f ExtField) -> Self {
        Self::new(field, vec![field.one()])
    }

    pub fn x(field: &'f ExtField) -> Self {
        Self::new(field, vec![field.zero(), field.one()])
    }

    /// Embeds a base-field polynomial coefficientwise.
    pub fn from_base(field: &'f ExtField, p: &PolyF2) -> Self {
        let coeffs = (0..p.bits())
            .map(|i| {
                if p.bit(i) {
                    field.one()
                } else {
                    field.zero()
                }
            })
            .collect();
        Self::new(field, coeffs)
    }

    pub fn field(&self) -> &'f ExtField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n - 1),
        }
    }

    pub fn finite_degree(&self) -> Option<usize> {
        match self.coeffs.len() {
            0 => None,
            n => Some(n - 1),
        }
    }

    pub fn coeff(&self, i: usize) -> ExtElem<'f> {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn leading(&self) -> Option<&ExtElem<'f>> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| self.coeff(i).add(&other.coeff(i)))
            .collect();
        Self::new(self.field, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.field);
        }
        let mut coeffs = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Self::new(self.field, coeffs)
    }

    /// Squaring: coefficients get squared and spread to even positions.
    pub fn square(&self) -> Self {
        if self.is_zero() {
            return Self::zero(self.field);
        }
        let mut coeffs = vec![self.field.zero(); 2 * self.coeffs.len() - 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[2 * i] = c.square();
        }
        Self::new(self.field, coeffs)
    }

    pub fn scale(&self, c: &ExtElem<'f>) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.mul(c)).collect();
        Self::new(self.field, coeffs)
    }

    pub fn make_monic(&self) -> Result<Self> {
        let lead = self.leading().ok_or(Error::DivisionByZero)?;
        if lead.is_one() {
            return Ok(self.clone());
        }
        Ok(self.scale(&lead.inv()?))
    }

    pub fn divrem(&self, div: &Self) -> Result<(Self, Self)> {
        let db = div.finite_degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = div.leading().expect("nonzero").inv()?;
        let mut r = self.clone();
        let q_len = self.coeffs.len().saturating_sub(db);
        let mut q = vec![self.field.zero(); q_len];
        while let Some(dr) = r.finite_degree() {
            if dr < db {
                break;
            }
            let shift = dr - db;
            let c = r.leading().expect("nonzero").mul(&lead_inv);
            for i in 0..=db {
                let term = div.coeff(i).mul(&c);
                r.coeffs[i + shift] = r.coeffs[i + shift].add(&term);
            }
            r.normalize();
            q[shift] = c;
        }
        Ok((Self::new(self.field, q), r))
    }

    pub fn rem(&self, div: &Self) -> Result<Self> {
        Ok(self.divrem(div)?.1)
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &Self, b: &Self) -> Result<Self> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::GcdOfZeros);
        }
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = std::mem::replace(&mut b, r);
        }
        a.make_monic()
    }

    pub fn powmod(&self, exp: &BigUint, modulus: &Self) -> Result<Self> {
        match modulus.degree() {
            Degree::Finite(d) if d >= 1 => {}
            _ => return Err(Error::ConstantModulus),
        }
        let base = self.rem(modulus)?;
        let mut acc = Self::one(self.field);
        for i in (0..exp.bits()).rev() {
            acc = acc.square().rem(modulus)?;
            if exp.bit(i) {
                acc = acc.mul(&base).rem(modulus)?;
            }
        }
        Ok(acc)
    }

    pub fn eval(&self, at: &ExtElem<'f>) -> ExtElem<'f> {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(at).add(c);
        }
        acc
    }

    /// Applies the base Frobenius to every coefficient (one Galois conjugate
    /// of the polynomial).
    pub fn frobenius_coeffs(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.frobenius()).collect();
        Self::new(self.field, coeffs)
    }

    /// `self^(2^m) mod modulus`: one application of the `|L|`-power
    /// Frobenius of the quotient ring, realized as `m` squarings.
    fn q_power_mod(&self, modulus: &Self) -> Result<Self> {
        let mut y = self.clone();
        for _ in 0..self.field.degree() {
            y = y.square().rem(modulus)?;
        }
        Ok(y)
    }

    /// Rabin's irreducibility test over `L` with `q = 2^m`: `h` of degree `n`
    /// is irreducible iff `x^(q^n) = x (mod h)` and the gcd checks at `n/p`
    /// pass for every prime `p | n`.
    pub fn is_irreducible(&self) -> Result<bool> {
        let n = match self.finite_degree() {
            Some(n) if n >= 1 => n,
            _ => return Err(Error::ConstantPolynomial),
        };
        if n == 1 {
            return Ok(true);
        }
        let hm = self.make_monic()?;
        let x = Self::x(self.field);
        let mut targets: Vec<usize> = prime_factors_usize(n).iter().map(|p| n / p).collect();
        targets.sort_unstable();
        targets.dedup();
        let mut y = x.clone();
        let mut reached = 0usize;
        for c in targets {
            for _ in reached..c {
                y = y.q_power_mod(&hm)?;
            }
            reached = c;
            let diff = y.add(&x);
            if diff.is_zero() {
                return Ok(false);
            }
            let g = Self::gcd(&diff, &hm)?;
            if g.finite_degree() != Some(0) {
                return Ok(false);
            }
        }
        for _ in reached..n {
            y = y.q_power_mod(&hm)?;
        }
        Ok(y == x)
    }

    /// Number of distinct irreducible factors over `L`, multiplicities
    /// ignored: kernel dimension of (q-power Frobenius - identity) on
    /// `L[x]/<h>`.
    pub fn count_distinct_irreducible_factors(&self) -> Result<usize> {
        let n = match self.degree() {
            Degree::NegInfinity => return Err(Error::ZeroValue),
            Degree::Finite(0) => return Ok(0),
            Degree::Finite(n) => n,
        };
        let hm = self.make_monic()?;
        let t = Self::x(self.field).q_power_mod(&hm)?;
        let mut rows: Vec<Vec<ExtElem<'f>>> = Vec::with_capacity(n);
        let mut s = Self::one(self.field);
        for j in 0..n {
            if j > 0 {
                s = s.mul(&t).rem(&hm)?;
            }
            let mut row: Vec<ExtElem<'f>> = (0..n).map(|i| s.coeff(i)).collect();
            row[j] = row[j].add(&self.field.one());
            rows.push(row);
        }
        Ok(n - rank_ext(&mut rows)?)
    }

    /// The norm down to GF(2)[x]: the product of the `m` Galois conjugates.
    /// Every coefficient of the product lands in the base field.
    pub fn norm_to_base(&self) -> PolyF2 {
        if self.is_zero() {
            return PolyF2::zero();
        }
        let mut acc = self.clone();
        let mut conj = self.clone();
        for _ in 1..self.field.degree() {
            conj = conj.frobenius_coeffs();
            acc = acc.mul(&conj);
        }
        let mut out = PolyF2::zero();
        for (i, c) in acc.coeffs.iter().enumerate() {
            if c.is_one() {
                out.add_assign(&PolyF2::monomial(i));
            } else {
                assert!(
                    c.is_zero(),
                    "norm must have base-field coefficients, found {c}"
                );
            }
        }
        out
    }
}

impl fmt::Display for PolyExt<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({c})*x^{i}"))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Row rank over the extension field by Gaussian elimination.
fn rank_ext(rows: &mut [Vec<ExtElem<'_>>]) -> Result<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].inv()?;
        let prow: Vec<ExtElem<'_>> = rows[rank].iter().map(|e| e.mul(&inv)).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let factor = row[col].clone();
                for (e, p) in row.iter_mut().zip(prow.iter()) {
                    *e = e.add(&p.mul(&factor));
                }
            }
        }
        rows[rank] = prow;
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    Ok(rank)
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
