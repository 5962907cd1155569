//! Exact univariate integer polynomials.
//!
//! Two representations: [`SparsePolynomial`] holds the few-term minors and is
//! the certificate text form; [`DensePolynomial`] is where GCDs, deflation
//! and cyclotomic classification happen.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::roots;

/// Sparse to dense conversion refuses polynomials above this degree.
pub const MAX_DENSE_DEGREE: u64 = 10_000;

/// Tolerance on `|root| - 1` for the numeric stage of cyclotomic detection.
pub const UNIT_CIRCLE_TOLERANCE: f64 = 1e-10;

/// Numeric deviations beyond this are treated as a clear "not on the circle".
const UNIT_CIRCLE_REJECT: f64 = 1e-6;

// ---------------------------------------------------------------------------
// Sparse form
// ---------------------------------------------------------------------------

/// Exponent/coefficient pairs, exponents strictly increasing, no zero
/// coefficients. The zero polynomial has no terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SparsePolynomial {
    terms: Vec<(u64, BigInt)>,
}

impl SparsePolynomial {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// Builds from arbitrary terms: sorts, merges repeated exponents and
    /// drops zeros.
    pub fn from_terms<I: IntoIterator<Item = (u64, BigInt)>>(terms: I) -> Self {
        let mut t: Vec<(u64, BigInt)> = terms.into_iter().collect();
        t.sort_by_key(|(e, _)| *e);
        let mut out: Vec<(u64, BigInt)> = Vec::with_capacity(t.len());
        for (e, c) in t {
            match out.last_mut() {
                Some((le, lc)) if *le == e => *lc += c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Self { terms: out }
    }

    pub fn monomial(exponent: u64, coeff: impl Into<BigInt>) -> Self {
        Self::from_terms([(exponent, coeff.into())])
    }

    pub fn terms(&self) -> &[(u64, BigInt)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u64> {
        self.terms.last().map(|(e, _)| *e)
    }

    pub fn coefficient(&self, exponent: u64) -> BigInt {
        self.terms
            .binary_search_by_key(&exponent, |(e, _)| *e)
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| BigInt::zero())
    }

    pub fn scalar_multiply(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(),
        }
    }

    /// `p(z) -> p(z^h)`.
    pub fn substitute_power(&self, h: u64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e * h, c.clone())).collect(),
        }
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0) * pow_c(z, *e))
            .sum()
    }

    /// Sum of `|c| |z|^e`, the natural scale for a relative residual.
    pub fn magnitude_at(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN).abs() * r.powf(*e as f64))
            .sum()
    }

    pub fn to_dense(&self) -> Result<DensePolynomial> {
        let deg = match self.degree() {
            None => return Ok(DensePolynomial::zero()),
            Some(d) => d,
        };
        if deg > MAX_DENSE_DEGREE {
            return Err(Error::DegreeTooLarge {
                degree: deg,
                limit: MAX_DENSE_DEGREE,
            });
        }
        let mut coeffs = vec![BigInt::zero(); deg as usize + 1];
        for (e, c) in &self.terms {
            coeffs[*e as usize] = c.clone();
        }
        Ok(DensePolynomial { coeffs })
    }
}

fn pow_c(z: Complex64, e: u64) -> Complex64 {
    if e <= i32::MAX as u64 {
        z.powi(e as i32)
    } else {
        z.powf(e as f64)
    }
}

impl Add for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn add(self, rhs: Self) -> SparsePolynomial {
        SparsePolynomial::from_terms(self.terms.iter().chain(rhs.terms.iter()).cloned())
    }
}

impl Neg for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn neg(self) -> SparsePolynomial {
        SparsePolynomial {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Sub for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn sub(self, rhs: Self) -> SparsePolynomial {
        self + &(-rhs)
    }
}

impl Mul for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn mul(self, rhs: Self) -> SparsePolynomial {
        SparsePolynomial::from_terms(
            self.terms
                .iter()
                .flat_map(|(e1, c1)| rhs.terms.iter().map(move |(e2, c2)| (e1 + e2, c1 * c2))),
        )
    }
}

/// Certificate text form: `c0 + c1*z^e1 + ...`, ascending exponents,
/// decimal coefficients with their sign, `*z^e` written for every `e >= 1`.
/// The zero polynomial is `0`.
impl fmt::Display for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if *e == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*z^{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for SparsePolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::PolynomialParse {
            text: s.to_string(),
            reason: reason.to_string(),
        };
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut terms: Vec<(u64, BigInt)> = Vec::new();
        for part in s.split(" + ") {
            let (coeff, exp) = match part.split_once("*z^") {
                Some((c, e)) => {
                    let e: u64 = e.parse().map_err(|_| bad("bad exponent"))?;
                    if e == 0 {
                        return Err(bad("exponent 0 must be written without z"));
                    }
                    (c, e)
                }
                None => (part, 0),
            };
            let c: BigInt = coeff.parse().map_err(|_| bad("bad coefficient"))?;
            if c.is_zero() {
                return Err(bad("zero coefficient"));
            }
            if c.to_string() != coeff {
                return Err(bad("coefficient not in canonical decimal form"));
            }
            if let Some((last, _)) = terms.last() {
                if *last >= exp {
                    return Err(bad("exponents must strictly increase"));
                }
            }
            terms.push((exp, c));
        }
        Ok(Self { terms })
    }
}

impl Serialize for SparsePolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SparsePolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Dense form
// ---------------------------------------------------------------------------

/// Coefficients indexed by exponent. Leading coefficient nonzero unless the
/// polynomial is zero (empty vector).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct DensePolynomial {
    coeffs: Vec<BigInt>,
}

impl DensePolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    /// `z - 1`
    pub fn z_minus_one() -> Self {
        Self::from_i64(&[-1, 1])
    }

    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `z^n - 1`
    pub fn z_pow_minus_one(n: usize) -> Self {
        let mut c = vec![BigInt::zero(); n + 1];
        c[0] = BigInt::from(-1);
        c[n] = BigInt::one();
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.to_f64().into_iter().map(|x| Complex64::new(x, 0.0)).collect()
    }

    pub fn to_sparse(&self) -> SparsePolynomial {
        SparsePolynomial::from_terms(
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i as u64, c.clone())),
        )
    }

    pub fn scalar_multiply(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    fn scalar_div_exact(&self, k: &BigInt) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c / k).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// `z^deg p(1/z)`
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    /// Whether `z^deg p(1/z) = +-p(z)`.
    pub fn is_reciprocal(&self) -> bool {
        let mut rev = self.coeffs.clone();
        rev.reverse();
        rev == self.coeffs || rev.iter().zip(&self.coeffs).all(|(a, b)| *a == -b)
    }

    /// Positive content and primitive part with positive leading
    /// coefficient; the sign of `p` ends up in neither, so
    /// `content * primitive = +-p`.
    pub fn content_and_primitive(&self) -> Result<(BigInt, DensePolynomial)> {
        let lead = self.leading().ok_or(Error::ZeroPolynomial)?;
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        let g = if lead.is_negative() { -g } else { g };
        let prim = self.scalar_div_exact(&g);
        Ok((g.abs(), prim))
    }

    pub fn primitive_part(&self) -> Result<DensePolynomial> {
        Ok(self.content_and_primitive()?.1)
    }

    /// Pseudo-remainder of `self` by `divisor`, scaled by powers of
    /// `lc(divisor)` only as far as needed.
    pub fn pseudo_remainder(&self, divisor: &DensePolynomial) -> Result<DensePolynomial> {
        let dd = divisor.degree().ok_or(Error::ZeroPolynomial)?;
        let lc = divisor.leading().unwrap();
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let shift = r.len() - 1 - dd;
            let top = r.last().unwrap().clone();
            if !lc.is_one() {
                for c in r.iter_mut() {
                    *c *= lc;
                }
            }
            for (i, dc) in divisor.coeffs.iter().enumerate() {
                r[shift + i] -= &top * dc;
            }
            debug_assert!(r.last().unwrap().is_zero());
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Ok(DensePolynomial::new(r))
    }

    /// Quotient over the integers if `divisor` divides `self` exactly.
    pub fn div_exact(&self, divisor: &DensePolynomial) -> Result<Option<DensePolynomial>> {
        let dd = divisor.degree().ok_or(Error::ZeroPolynomial)?;
        if self.is_zero() {
            return Ok(Some(Self::zero()));
        }
        let sd = self.degree().unwrap();
        if sd < dd {
            return Ok(None);
        }
        let lc = divisor.leading().unwrap();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); sd - dd + 1];
        for k in (0..=sd - dd).rev() {
            let top = &r[k + dd];
            if top.is_zero() {
                continue;
            }
            let (qk, rem) = top.div_rem(lc);
            if !rem.is_zero() {
                return Ok(None);
            }
            for (i, dc) in divisor.coeffs.iter().enumerate() {
                r[k + i] -= &qk * dc;
            }
            q[k] = qk;
        }
        if r.iter().any(|c| !c.is_zero()) {
            return Ok(None);
        }
        Ok(Some(DensePolynomial::new(q)))
    }

    /// Whether `divisor` divides `self` with zero remainder over the rationals.
    pub fn is_divisible_by(&self, divisor: &DensePolynomial) -> Result<bool> {
        // Gauss: a primitive divisor over Q divides over Z.
        Ok(self.div_exact(&divisor.primitive_part()?)?.is_some())
    }

    /// Remainder modulo a monic polynomial.
    fn rem_monic(&self, m: &DensePolynomial) -> DensePolynomial {
        let md = m.degree().unwrap();
        let mut r = self.coeffs.clone();
        while r.len() > md {
            let shift = r.len() - 1 - md;
            let top = r.pop().unwrap();
            if !top.is_zero() {
                for (i, mc) in m.coeffs[..md].iter().enumerate() {
                    r[shift + i] -= &top * mc;
                }
            }
        }
        DensePolynomial::new(r)
    }

    /// `p = (z - 1)^k * residual` with `residual(1) != 0`.
    pub fn deflate_at_one(&self) -> Result<(u32, DensePolynomial)> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut cur = self.coeffs.clone();
        let mut k = 0u32;
        loop {
            let at_one: BigInt = cur.iter().sum();
            if !at_one.is_zero() {
                return Ok((k, DensePolynomial::new(cur)));
            }
            // Synthetic division by (z - 1), top down.
            let n = cur.len() - 1;
            let mut q = vec![BigInt::zero(); n];
            let mut carry = BigInt::zero();
            for i in (0..n).rev() {
                carry += &cur[i + 1];
                q[i] = carry.clone();
            }
            cur = q;
            k += 1;
        }
    }

    /// `p / gcd(p, p')`, primitive with positive leading coefficient.
    pub fn squarefree_part(&self) -> Result<DensePolynomial> {
        let p = self.primitive_part()?;
        if p.is_constant() {
            return Ok(p);
        }
        let g = gcd(&p, &p.derivative())?;
        let q = p
            .div_exact(&g)?
            .expect("gcd divides its argument over the integers");
        q.primitive_part()
    }

    /// Decides whether every complex root is a root of unity.
    ///
    /// Numeric roots of the squarefree part prune; the verdict is then
    /// confirmed exactly by dividing `z^N - 1` and by matching each claimed
    /// order's cyclotomic factor. A numeric pass that the exact stage cannot
    /// confirm is reported as [`Error::Inconclusive`].
    pub fn classify_cyclotomic(&self) -> Result<CyclotomicVerdict> {
        if self.is_constant() {
            return Err(Error::InvalidArgument(
                "cyclotomic classification needs a nonconstant polynomial".into(),
            ));
        }
        if self.coeffs[0].is_zero() {
            return Err(Error::InvalidArgument(
                "cyclotomic classification needs p(0) != 0".into(),
            ));
        }
        let p = self.primitive_part()?;
        // Roots of unity are units: monic, constant term +-1.
        if !p.leading().unwrap().is_one() || !p.coeffs[0].abs().is_one() {
            return Ok(CyclotomicVerdict::negative());
        }
        let sf = p.squarefree_part()?;
        let zs = roots::real_roots_of(&sf.to_f64());
        let deviation = zs.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
        if deviation > UNIT_CIRCLE_REJECT {
            return Ok(CyclotomicVerdict::negative());
        }

        let deg = sf.degree().unwrap();
        let max_order = (2 * deg * deg).max(6);
        let mut orders: Vec<u64> = Vec::new();
        for z in &zs {
            match numeric_order(*z, max_order) {
                Some(k) => orders.push(k),
                None if deviation <= UNIT_CIRCLE_TOLERANCE => {
                    return Err(Error::Inconclusive(format!(
                        "root {z} lies on the unit circle but has no order <= {max_order}"
                    )))
                }
                None => return Ok(CyclotomicVerdict::negative()),
            }
        }
        orders.sort_unstable();
        orders.dedup();

        let n = orders.iter().fold(1u64, |acc, &k| acc.lcm(&k));
        let exact = sf.divides_z_pow_minus_one(n)
            && orders
                .iter()
                .map(|&k| sf.is_divisible_by(&cyclotomic_polynomial(k)))
                .collect::<Result<Vec<bool>>>()?
                .into_iter()
                .all(|b| b)
            && orders.iter().map(|&k| euler_phi(k)).sum::<u64>() == deg as u64;
        match (exact, deviation <= UNIT_CIRCLE_TOLERANCE) {
            (true, _) => Ok(CyclotomicVerdict {
                is_product_of_cyclotomics: true,
                orders,
            }),
            (false, true) => Err(Error::Inconclusive(format!(
                "all roots within {UNIT_CIRCLE_TOLERANCE:e} of the unit circle, \
                 but the squarefree part does not divide z^{n} - 1"
            ))),
            (false, false) => Ok(CyclotomicVerdict::negative()),
        }
    }

    /// Whether this monic polynomial divides `z^n - 1`, via `z^n mod p`.
    fn divides_z_pow_minus_one(&self, n: u64) -> bool {
        if !self.leading().is_some_and(|c| c.is_one()) {
            return false;
        }
        if self.degree() == Some(0) {
            return true;
        }
        let mut result = DensePolynomial::one();
        let mut base = DensePolynomial::from_i64(&[0, 1]).rem_monic(self);
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = (&result * &base).rem_monic(self);
            }
            base = (&base * &base).rem_monic(self);
            e >>= 1;
        }
        result == DensePolynomial::one()
    }
}

impl Add for &DensePolynomial {
    type Output = DensePolynomial;
    fn add(self, rhs: Self) -> DensePolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigInt::zero();
        DensePolynomial::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Neg for &DensePolynomial {
    type Output = DensePolynomial;
    fn neg(self) -> DensePolynomial {
        DensePolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Sub for &DensePolynomial {
    type Output = DensePolynomial;
    fn sub(self, rhs: Self) -> DensePolynomial {
        self + &(-rhs)
    }
}

impl Mul for &DensePolynomial {
    type Output = DensePolynomial;
    fn mul(self, rhs: Self) -> DensePolynomial {
        if self.is_zero() || rhs.is_zero() {
            return DensePolynomial::zero();
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        DensePolynomial::new(c)
    }
}

impl fmt::Display for DensePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_sparse().fmt(f)
    }
}

impl FromStr for DensePolynomial {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.parse::<SparsePolynomial>()?.to_dense()
    }
}

impl Serialize for DensePolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DensePolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Canonical GCD: primitive, positive leading coefficient.
///
/// Primitive pseudo-remainder sequence, content stripped at every step.
pub fn gcd(p: &DensePolynomial, q: &DensePolynomial) -> Result<DensePolynomial> {
    match (p.is_zero(), q.is_zero()) {
        (true, true) => return Err(Error::ZeroPolynomial),
        (false, true) => return p.primitive_part(),
        (true, false) => return q.primitive_part(),
        _ => {}
    }
    let mut a = p.primitive_part()?;
    let mut b = q.primitive_part()?;
    if a.degree() < b.degree() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        let r = a.pseudo_remainder(&b)?;
        a = b;
        b = if r.is_zero() { r } else { r.primitive_part()? };
    }
    a.primitive_part()
}

/// Outcome of [`DensePolynomial::classify_cyclotomic`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclotomicVerdict {
    pub is_product_of_cyclotomics: bool,
    /// Distinct orders of the roots; empty when not cyclotomic.
    pub orders: Vec<u64>,
}

impl CyclotomicVerdict {
    fn negative() -> Self {
        Self {
            is_product_of_cyclotomics: false,
            orders: Vec::new(),
        }
    }
}

/// Smallest `k <= max_order` with `z^k` numerically equal to 1.
fn numeric_order(z: Complex64, max_order: usize) -> Option<u64> {
    let t = z.arg() / (2.0 * std::f64::consts::PI);
    (1..=max_order as u64).find(|&k| {
        let kt = k as f64 * t;
        (kt - kt.round()).abs() <= 1e-8 * k as f64
    })
}

pub fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn mobius(n: u64) -> i8 {
    let mut n = n;
    let mut sign = 1i8;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
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

/// The `k`-th cyclotomic polynomial, `prod_{d | k} (z^d - 1)^{mu(k/d)}`.
pub fn cyclotomic_polynomial(k: u64) -> DensePolynomial {
    assert!(k >= 1);
    let divisors: Vec<u64> = (1..=k).filter(|d| k.is_multiple_of(*d)).collect();
    let mut num = DensePolynomial::one();
    let mut den = DensePolynomial::one();
    for &d in &divisors {
        match mobius(k / d) {
            1 => num = &num * &DensePolynomial::z_pow_minus_one(d as usize),
            -1 => den = &den * &DensePolynomial::z_pow_minus_one(d as usize),
            _ => {}
        }
    }
    num.div_exact(&den)
        .expect("nonzero divisor")
        .expect("cyclotomic quotient is exact")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(c: &[i64]) -> DensePolynomial {
        DensePolynomial::from_i64(c)
    }

    #[test]
    fn ring_arithmetic() {
        let zm1 = DensePolynomial::z_minus_one();
        assert_eq!(&zm1 * &zm1, d(&[1, -2, 1]));
        assert!((&zm1 * &DensePolynomial::zero()).is_zero());
        let a = SparsePolynomial::from_terms([(4, 1.into()), (0, (-1).into())]);
        let b = SparsePolynomial::from_terms([(0, 1.into()), (4, (-1).into())]);
        assert!((&a + &b).is_zero());
        assert_eq!(
            &SparsePolynomial::monomial(3, 2) * &SparsePolynomial::monomial(1, -5),
            SparsePolynomial::monomial(4, -10)
        );
    }

    #[test]
    fn content_examples() {
        let (c, p) = d(&[-2, 6, -6, 2]).content_and_primitive().unwrap();
        assert_eq!(c, 2.into());
        assert_eq!(p, d(&[-1, 3, -3, 1]));
        let (c, p) = d(&[-1, 1]).content_and_primitive().unwrap();
        assert_eq!((c, p), (1.into(), d(&[-1, 1])));
        let (c, p) = d(&[0, -3]).content_and_primitive().unwrap();
        assert_eq!((c, p), (3.into(), d(&[0, 1])));
        assert!(matches!(
            DensePolynomial::zero().content_and_primitive(),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn gcd_examples() {
        // z^3 - 3z + 2 = (z - 1)^2 (z + 2)
        assert_eq!(gcd(&d(&[1, -2, 1]), &d(&[2, -3, 0, 1])).unwrap(), d(&[1, -2, 1]));
        assert_eq!(gcd(&d(&[-4, 0, 8]), &DensePolynomial::zero()).unwrap(), d(&[-1, 0, 2]));
        assert_eq!(gcd(&d(&[-1, 0, 1]), &d(&[-1, 0, 0, 1])).unwrap(), d(&[-1, 1]));
        assert!(gcd(&DensePolynomial::zero(), &DensePolynomial::zero()).is_err());
        // Coprime inputs give 1.
        assert_eq!(gcd(&d(&[1, 1]), &d(&[2, 1])).unwrap(), DensePolynomial::one());
    }

    #[test]
    fn deflation_examples() {
        assert_eq!(d(&[1, -2, 1]).deflate_at_one().unwrap(), (2, DensePolynomial::one()));
        assert_eq!(d(&[-1, 3, -3, 1]).deflate_at_one().unwrap(), (3, DensePolynomial::one()));
        assert_eq!(d(&[2, 1]).deflate_at_one().unwrap(), (0, d(&[2, 1])));
        assert!(DensePolynomial::zero().deflate_at_one().is_err());
    }

    #[test]
    fn cyclotomic_examples() {
        let v = d(&[1, 1, 1]).classify_cyclotomic().unwrap();
        assert!(v.is_product_of_cyclotomics);
        assert_eq!(v.orders, vec![3]);
        assert!(!d(&[-2, 1]).classify_cyclotomic().unwrap().is_product_of_cyclotomics);
        assert!(!d(&[-1, -1, 1]).classify_cyclotomic().unwrap().is_product_of_cyclotomics);
        // Repeated factors: (z + 1)^2 (z^2 + 1)
        let p = &(&d(&[1, 1]) * &d(&[1, 1])) * &d(&[1, 0, 1]);
        let v = p.classify_cyclotomic().unwrap();
        assert_eq!(v.orders, vec![2, 4]);
        assert!(d(&[0, 1]).classify_cyclotomic().is_err());
    }

    #[test]
    fn lehmer_polynomial_is_not_cyclotomic() {
        // Monic, constant term 1, reciprocal, one root outside the circle.
        let lehmer = d(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        assert!(!lehmer.classify_cyclotomic().unwrap().is_product_of_cyclotomics);
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), d(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(6), d(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), d(&[1, 0, -1, 0, 1]));
        for k in 1..40 {
            assert_eq!(cyclotomic_polynomial(k).degree().unwrap() as u64, euler_phi(k));
        }
    }

    #[test]
    fn z_pow_minus_one_is_cyclotomic_for_all_small_n() {
        for n in 1..=50usize {
            let v = DensePolynomial::z_pow_minus_one(n).classify_cyclotomic().unwrap();
            assert!(v.is_product_of_cyclotomics, "n = {n}");
            let l = v.orders.iter().fold(1u64, |a, &k| a.lcm(&k));
            assert_eq!(n as u64 % l, 0);
        }
    }

    #[test]
    fn dense_refusal_above_limit() {
        let p = SparsePolynomial::monomial(MAX_DENSE_DEGREE + 1, 1);
        assert!(matches!(p.to_dense(), Err(Error::DegreeTooLarge { .. })));
        assert!(SparsePolynomial::monomial(MAX_DENSE_DEGREE, 1).to_dense().is_ok());
    }

    #[test]
    fn text_form() {
        let p = d(&[-2, 6, -6, 2]);
        assert_eq!(p.to_string(), "-2 + 6*z^1 + -6*z^2 + 2*z^3");
        assert_eq!(DensePolynomial::zero().to_string(), "0");
        assert_eq!("-2 + 6*z^1 + -6*z^2 + 2*z^3".parse::<DensePolynomial>().unwrap(), p);
        assert!("1 + 0*z^2".parse::<SparsePolynomial>().is_err());
        assert!("1*z^3 + 2*z^1".parse::<SparsePolynomial>().is_err());
        assert!("1*z^0".parse::<SparsePolynomial>().is_err());
    }

    #[test]
    fn reciprocal_test() {
        assert!(d(&[1, 1, 1]).is_reciprocal());
        assert!(d(&[-1, 1]).is_reciprocal());
        assert!(!d(&[-1, -1, 1]).is_reciprocal());
        assert!(!d(&[-1, -1, 0, 1]).is_reciprocal());
    }

    fn small_poly() -> impl Strategy<Value = DensePolynomial> {
        prop::collection::vec(-20i64..=20, 1..8).prop_map(|c| DensePolynomial::from_i64(&c))
    }

    fn sparse_poly() -> impl Strategy<Value = SparsePolynomial> {
        prop::collection::vec((0u64..30, -1000i64..=1000), 1..5)
            .prop_map(|t| SparsePolynomial::from_terms(t.into_iter().map(|(e, c)| (e, BigInt::from(c)))))
    }

    proptest! {
        #[test]
        fn gcd_divides_both(a in small_poly(), b in small_poly(), common in small_poly()) {
            prop_assume!(!common.is_zero());
            let p = &a * &common;
            let q = &b * &common;
            prop_assume!(!(p.is_zero() && q.is_zero()));
            let g = gcd(&p, &q).unwrap();
            prop_assert!(p.div_exact(&g).unwrap().is_some() || p.is_zero());
            prop_assert!(q.div_exact(&g).unwrap().is_some() || q.is_zero());
            // common's primitive part divides the gcd
            if !common.is_constant() {
                prop_assert!(g.is_divisible_by(&common).unwrap());
            }
        }

        #[test]
        fn gcd_normalization_invariance(a in sparse_poly(), b in sparse_poly(), k in 1i64..50, s in prop::bool::ANY) {
            let (a, b) = (a.to_dense().unwrap(), b.to_dense().unwrap());
            prop_assume!(!(a.is_zero() && b.is_zero()));
            let g = gcd(&a, &b).unwrap();
            prop_assert_eq!(&g, &gcd(&b, &a).unwrap());
            let k = BigInt::from(if s { -k } else { k });
            prop_assert_eq!(&g, &gcd(&a.scalar_multiply(&k), &b).unwrap());
            prop_assert_eq!(g.leading().unwrap().is_positive(), true);
        }

        #[test]
        fn deflation_roundtrip(a in small_poly(), k in 0u32..5) {
            prop_assume!(!a.is_zero());
            let mut p = a.clone();
            for _ in 0..k { p = &p * &DensePolynomial::z_minus_one(); }
            let (m, r) = p.deflate_at_one().unwrap();
            prop_assert!(m >= k);
            prop_assert!(!r.eval_at_one().is_zero());
            let mut back = r;
            for _ in 0..m { back = &back * &DensePolynomial::z_minus_one(); }
            prop_assert_eq!(back, p);
        }

        #[test]
        fn text_roundtrip(p in sparse_poly()) {
            let s = p.to_string();
            prop_assert_eq!(s.parse::<SparsePolynomial>().unwrap(), p);
        }
    }
}
