//! Minor systems and the exact anomaly decision.
//!
//! For exponents `a_1 < ... < a_n` the augmented matrix `B(z)` has one row
//! `(1, m, m^2, ..., m^{n-2}, z^m)` for each `m` in `{0, a_1, ..., a_n}`.
//! `A(z)` has rank `< n-1` exactly when `B(z)` has rank `< n`, i.e. when all
//! `n+1` maximal minors of `B` vanish. Each minor is a sparse polynomial in
//! `z`; their GCD, deflated at `z = 1`, decides the tuple.
//!
//! Sign convention: rows ascending by exponent, Vandermonde columns first and
//! the `z^m` column last, determinant expanded along the `z^m` column. The
//! highest power therefore always carries a positive coefficient, and every
//! minor that keeps the row `m = 0` equals the corresponding maximal minor of
//! `A(z)` itself.

use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric;
use crate::polyarith::{gcd, DensePolynomial, SparsePolynomial};
use crate::roots;

/// Strictly increasing positive exponents.
///
/// [`ExponentTuple::new`] additionally demands `gcd = 1`; tuples built with
/// [`ExponentTuple::non_primitive`] skip that check and are refused by
/// [`decide`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExponentTuple {
    exponents: Vec<u64>,
}

impl ExponentTuple {
    pub fn new(exponents: Vec<u64>) -> Result<Self> {
        let t = Self::non_primitive(exponents)?;
        if t.gcd() != 1 {
            return Err(Error::InvalidTuple {
                exponents: t.exponents,
                reason: "exponents must be coprime; divide by their gcd first".into(),
            });
        }
        Ok(t)
    }

    /// Checks ordering and positivity only.
    pub fn non_primitive(exponents: Vec<u64>) -> Result<Self> {
        let reject = |reason: &str| {
            Err(Error::InvalidTuple {
                exponents: exponents.clone(),
                reason: reason.into(),
            })
        };
        if exponents.len() < 3 {
            return reject("need at least 3 exponents");
        }
        if exponents[0] == 0 {
            return reject("exponents must be positive");
        }
        if exponents.windows(2).any(|w| w[0] >= w[1]) {
            return reject("exponents must be strictly increasing");
        }
        Ok(Self { exponents })
    }

    /// Divides out the gcd. Returns the primitive tuple and the divisor `h`;
    /// a witness `xi` of the input corresponds to `xi^h` for the output.
    pub fn normalize(exponents: Vec<u64>) -> Result<(Self, u64)> {
        let t = Self::non_primitive(exponents)?;
        let h = t.gcd();
        let scaled = t.exponents.iter().map(|a| a / h).collect();
        Ok((Self::new(scaled)?, h))
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn n(&self) -> usize {
        self.exponents.len()
    }

    pub fn last(&self) -> u64 {
        *self.exponents.last().unwrap()
    }

    pub fn gcd(&self) -> u64 {
        self.exponents.iter().fold(0, |g, &a| g.gcd(&a))
    }

    pub fn is_primitive(&self) -> bool {
        self.gcd() == 1
    }

    /// `(h a_1, ..., h a_n)`, deliberately not normalized.
    pub fn scaled(&self, h: u64) -> Result<Self> {
        if h == 0 {
            return Err(Error::InvalidArgument("scale factor must be positive".into()));
        }
        Self::non_primitive(self.exponents.iter().map(|a| a * h).collect())
    }

    /// `{0, a_1, ..., a_n}`, the row labels of the augmented matrix.
    pub fn augmented_rows(&self) -> Vec<u64> {
        std::iter::once(0).chain(self.exponents.iter().copied()).collect()
    }
}

impl std::fmt::Display for ExponentTuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// `prod_{i<j} (x_j - x_i)` for ascending `x`.
pub(crate) fn vandermonde(x: &[u64]) -> BigInt {
    let mut v = BigInt::one();
    for j in 0..x.len() {
        for i in 0..j {
            v *= BigInt::from(x[j] - x[i]);
        }
    }
    v
}

/// The `n+1` maximal minors of the augmented matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorSystem {
    pub tuple: ExponentTuple,
    /// `minors[k]` omits row `k` of `{0, a_1, ..., a_n}`: index 0 drops the
    /// constant row, index `i` drops `a_i`.
    pub minors: Vec<SparsePolynomial>,
}

impl MinorSystem {
    pub fn build(tuple: &ExponentTuple) -> Self {
        let rows = tuple.augmented_rows();
        let minors = (0..rows.len())
            .map(|omit| {
                let kept: Vec<u64> = rows
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != omit)
                    .map(|(_, &m)| m)
                    .collect();
                minor_of_rows(&kept)
            })
            .collect();
        Self {
            tuple: tuple.clone(),
            minors,
        }
    }

    pub fn degrees(&self) -> Vec<u64> {
        self.minors.iter().map(|m| m.degree().unwrap_or(0)).collect()
    }
}

/// Determinant of the square matrix with rows `(1, m, ..., m^{k-2}, z^m)`
/// for the ascending labels `rows` (`k = rows.len()`).
pub fn minor_of_rows(rows: &[u64]) -> SparsePolynomial {
    let k = rows.len();
    SparsePolynomial::from_terms((0..k).map(|j| {
        let rest: Vec<u64> = rows
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, &m)| m)
            .collect();
        let v = vandermonde(&rest);
        let coeff = if (k - 1 - j).is_multiple_of(2) { v } else { -v };
        (rows[j], coeff)
    }))
}

/// How a certificate's residual was classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Residual constant: no rank drop away from `z = 1`.
    Trivial,
    /// Residual is a product of cyclotomics. Still anomalous for a coprime
    /// tuple, and a counterexample to the root-of-unity conjecture.
    RootOfUnity,
    /// Residual has a root off the unit circle.
    GenuineWitness,
    /// Numeric and exact cyclotomic tests disagreed; needs more precision.
    Inconclusive,
}

/// Per-tuple verdict, recheckable from its own fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub n: usize,
    pub exponents: Vec<u64>,
    pub minor_degrees: Vec<u64>,
    pub gcd: DensePolynomial,
    pub one_multiplicity: u32,
    pub residual: DensePolynomial,
    pub anomalous: bool,
    pub classification: Classification,
    /// The residual itself when anomalous; no irreducible factorization.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_minpoly: Option<DensePolynomial>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub orders: Vec<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub root_moduli: Vec<f64>,
    pub elapsed_ms: f64,
}

impl RankCertificate {
    pub fn tuple(&self) -> Result<ExponentTuple> {
        ExponentTuple::new(self.exponents.clone())
    }

    /// Record line without the timing field.
    pub fn canonical_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Some(o) = v.as_object_mut() {
            o.remove("elapsed_ms");
        }
        Ok(serde_json::to_string(&v)?)
    }
}

/// GCD of all minors, short-circuiting the remainder sequence whenever the
/// running GCD already divides the next minor.
pub fn minors_gcd(minors: &[DensePolynomial]) -> Result<DensePolynomial> {
    let mut order: Vec<&DensePolynomial> = minors.iter().collect();
    order.sort_by_key(|m| m.degree());
    let mut g = order[0].primitive_part()?;
    for m in &order[1..] {
        if g.is_constant() {
            break;
        }
        if !m.is_divisible_by(&g)? {
            g = gcd(&g, m)?;
        }
    }
    Ok(g)
}

/// Decides whether `tuple` is anomalous and builds its certificate.
pub fn decide(tuple: &ExponentTuple) -> Result<RankCertificate> {
    let start = Instant::now();
    if !tuple.is_primitive() {
        return Err(Error::InvalidTuple {
            exponents: tuple.exponents().to_vec(),
            reason: format!("gcd is {}; normalize before deciding", tuple.gcd()),
        });
    }
    let system = MinorSystem::build(tuple);
    let dense = system
        .minors
        .iter()
        .map(SparsePolynomial::to_dense)
        .collect::<Result<Vec<_>>>()?;
    let g = minors_gcd(&dense)?;
    let (one_multiplicity, residual) = g.deflate_at_one()?;
    let anomalous = !residual.is_constant();

    let (classification, orders, root_moduli) = if anomalous {
        let mut moduli: Vec<f64> = roots::real_roots_of(&residual.to_f64())
            .iter()
            .map(|z| z.norm())
            .collect();
        moduli.sort_by(|a, b| a.partial_cmp(b).unwrap());
        match residual.classify_cyclotomic() {
            Ok(v) if v.is_product_of_cyclotomics => (Classification::RootOfUnity, v.orders, moduli),
            Ok(_) => (Classification::GenuineWitness, Vec::new(), moduli),
            Err(Error::Inconclusive(_)) => (Classification::Inconclusive, Vec::new(), moduli),
            Err(e) => return Err(e),
        }
    } else {
        (Classification::Trivial, Vec::new(), Vec::new())
    };

    Ok(RankCertificate {
        n: tuple.n(),
        exponents: tuple.exponents().to_vec(),
        minor_degrees: system.degrees(),
        witness_minpoly: anomalous.then(|| residual.clone()),
        gcd: g,
        one_multiplicity,
        residual,
        anomalous,
        classification,
        orders,
        root_moduli,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Numeric rank of `A(z)` from its singular values.
pub fn rank_at(tuple: &ExponentTuple, z: Complex64, tolerance: f64) -> usize {
    let s = numeric::singular_values(numeric::a_matrix(tuple.exponents(), z));
    numeric::numeric_rank(&s, tolerance)
}

/// Result of [`scaling_transport`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalingCheck {
    /// `h^{(n-1)(n-2)/2}`: `h^1` for triples, `h^3` for quadruples.
    pub factor: BigInt,
    /// Indices of minors where `M_scaled(z) != factor * M(z^h)`.
    pub mismatched: Vec<usize>,
}

impl ScalingCheck {
    pub fn holds(&self) -> bool {
        self.mismatched.is_empty()
    }
}

/// Checks `M_scaled(z) = h^{(n-1)(n-2)/2} M(z^h)` minor by minor for the
/// unnormalized tuple `h * a`.
pub fn scaling_transport(tuple: &ExponentTuple, h: u64) -> Result<ScalingCheck> {
    let n = tuple.n() as u32;
    let factor: BigInt = BigInt::from(h).pow((n - 1) * (n - 2) / 2);
    let base = MinorSystem::build(tuple);
    let scaled = MinorSystem::build(&tuple.scaled(h)?);
    let mismatched = base
        .minors
        .iter()
        .zip(&scaled.minors)
        .enumerate()
        .filter(|(_, (m, ms))| m.substitute_power(h).scalar_multiply(&factor) != **ms)
        .map(|(i, _)| i)
        .collect();
    Ok(ScalingCheck { factor, mismatched })
}

/// Whether `g` divides every minor of the tuple exactly.
pub fn divides_all_minors(g: &DensePolynomial, system: &MinorSystem) -> Result<bool> {
    for m in &system.minors {
        if m.to_dense()?.div_exact(g)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}
