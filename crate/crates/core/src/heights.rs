//! Weil heights, Mahler measures, and the explicit bounds that make the
//! quadruple problem finite.
//!
//! All logarithms are natural.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyarith::DensePolynomial;
use crate::ranktest::{Classification, RankCertificate};
use crate::roots;

/// `log theta_0` where `theta_0^3 = theta_0 + 1`, rounded down.
pub const SMYTH_CONSTANT: f64 = 0.28;

/// Constant in `||lambda_1||_1 ||lambda_2||_1 <= 96 d^{2/3}`.
pub const MINKOWSKI_CONSTANT: f64 = 96.0;

/// `log(8^3 / 18)`.
pub fn step1_offset() -> f64 {
    (512.0f64 / 18.0).ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightReport {
    pub minpoly: DensePolynomial,
    pub degree: usize,
    pub mahler_measure: f64,
    /// `log M / degree`, natural-log units.
    pub weil_height: f64,
    /// Bound on `|log M_computed - log M_true|` from root inclusion disks.
    pub log_mahler_error: f64,
    /// Some inclusion disks overlapped; the error bar covers the clusters.
    pub ill_conditioned: bool,
    pub is_reciprocal: bool,
}

/// Mahler measure and Weil height from numeric roots.
pub fn weil_height(minpoly: &DensePolynomial) -> Result<HeightReport> {
    let degree = match minpoly.degree() {
        None => return Err(Error::ZeroPolynomial),
        Some(0) => {
            return Err(Error::InvalidArgument(
                "height needs a nonconstant polynomial".into(),
            ))
        }
        Some(d) => d,
    };
    let lead = minpoly.leading().unwrap().abs().to_f64().unwrap_or(f64::INFINITY);
    let rs = roots::roots_with_radii(&minpoly.to_complex());
    let mut log_m = lead.ln();
    let mut err = 0.0;
    let mut ill_conditioned = false;
    for r in &rs {
        let m = r.value.norm();
        log_m += log_plus(m);
        let hi = log_plus(m + r.radius);
        let lo = log_plus((m - r.radius).max(0.0));
        err += hi - lo;
        ill_conditioned |= r.clustered;
    }
    Ok(HeightReport {
        minpoly: minpoly.clone(),
        degree,
        mahler_measure: log_m.exp(),
        weil_height: log_m / degree as f64,
        log_mahler_error: err,
        ill_conditioned,
        is_reciprocal: minpoly.is_reciprocal(),
    })
}

fn log_plus(x: f64) -> f64 {
    if x > 1.0 {
        x.ln()
    } else {
        0.0
    }
}

/// Smyth's lower bound: a non-reciprocal integer polynomial with nonzero
/// constant term has `log M >= log theta_0 >= 0.28`. `false` means the
/// computation is wrong, not the theorem.
pub fn smyth_check(report: &HeightReport) -> bool {
    report.is_reciprocal
        || report.weil_height * report.degree as f64 + report.log_mahler_error >= SMYTH_CONSTANT
}

/// Projective height of an integer vector: `log(max |c_i| / gcd(c_i))`.
pub fn projective_height(coeffs: &[BigInt]) -> f64 {
    let g = coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if g.is_zero() {
        return 0.0;
    }
    let max = coeffs.iter().map(|c| c.abs()).max().unwrap();
    (max / g).to_f64().unwrap_or(f64::INFINITY).ln()
}

/// Vanishing-sum setting `xi^{m_0} + gamma_1 xi^{m_1} + ... + gamma_h = 0`
/// with a nonvanishing initial subsum ending at index `split`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma4Input {
    /// `m_0 > m_1 > ... > m_h = 0`
    pub exponents: Vec<u64>,
    /// `h(1 : gamma_1 : ... : gamma_h)`
    pub coefficient_height: f64,
    pub split: usize,
}

impl Lemma4Input {
    pub fn new(exponents: Vec<u64>, coefficient_height: f64, split: usize) -> Result<Self> {
        if exponents.len() < 2 {
            return Err(Error::InvalidArgument("need at least two exponents".into()));
        }
        if exponents.windows(2).any(|w| w[0] <= w[1]) || *exponents.last().unwrap() != 0 {
            return Err(Error::InvalidArgument(
                "exponents must strictly decrease to 0".into(),
            ));
        }
        if split + 1 >= exponents.len() {
            return Err(Error::InvalidArgument(format!(
                "split index {split} must be below h = {}",
                exponents.len() - 1
            )));
        }
        Ok(Self {
            exponents,
            coefficient_height,
            split,
        })
    }

    /// `h` in the statement: the number of non-leading terms.
    pub fn terms(&self) -> usize {
        self.exponents.len() - 1
    }
}

/// `(H + log max{l+1, h-l}) / (m_l - m_{l+1})`, an upper bound on `h(xi)`.
pub fn lemma4_bound(input: &Lemma4Input) -> Result<f64> {
    let l = input.split;
    let h = input.terms();
    let gap = input.exponents[l] - input.exponents[l + 1];
    if gap == 0 {
        return Err(Error::InvalidArgument("zero exponent gap".into()));
    }
    let arm = (l + 1).max(h - l) as f64;
    Ok((input.coefficient_height + arm.ln()) / gap as f64)
}

/// `(9 log d - log(512/18)) / d`: every solution has `h(xi)` at most this.
pub fn step1_bound(d: f64) -> f64 {
    (9.0 * d.ln() - step1_offset()) / d
}

/// Both sides of `0.28 d^{1/3} / 96^{2/3} <= 9 log d - log(512/18)`.
pub fn threshold_sides(d: f64) -> (f64, f64) {
    let lhs = SMYTH_CONSTANT * d.cbrt() / MINKOWSKI_CONSTANT.powf(2.0 / 3.0);
    let rhs = 9.0 * d.ln() - step1_offset();
    (lhs, rhs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    /// Largest root of `lhs(d) = rhs(d)`; solutions need `d <= d_star`.
    pub d_star: f64,
    pub bracket: (f64, f64),
    pub sides_at_bracket: ((f64, f64), (f64, f64)),
}

/// Largest `d` where the height lower bound and upper bound still cross.
///
/// Scans a geometric grid for the last sign change of `lhs - rhs`, then
/// bisects to relative tolerance `1e-9`.
pub fn final_threshold() -> Threshold {
    let f = |d: f64| {
        let (l, r) = threshold_sides(d);
        l - r
    };
    // lhs - rhs is positive for all large d; find the last grid point where
    // it is not.
    let mut last_nonpositive = None;
    let mut k = 0.5f64;
    while k <= 30.0 {
        if f(10f64.powf(k)) <= 0.0 {
            last_nonpositive = Some(k);
        }
        k += 0.01;
    }
    let k = last_nonpositive.expect("inequality holds somewhere");
    let (mut lo, mut hi) = (10f64.powf(k), 10f64.powf(k + 0.01));
    while (hi - lo) / lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let d_star = 0.5 * (lo + hi);
    Threshold {
        d_star,
        bracket: (1e12, 1e13),
        sides_at_bracket: (threshold_sides(1e12), threshold_sides(1e13)),
    }
}

/// Outcome of [`solution_consistency`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub exponents: Vec<u64>,
    pub verdict: ConsistencyVerdict,
    pub height: Option<f64>,
    pub height_bound: Option<f64>,
    pub degree: Option<usize>,
    pub degree_bound: u64,
    pub smyth_ok: Option<bool>,
    pub reciprocal: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConsistencyVerdict {
    /// Not anomalous; nothing to check.
    Vacuous,
    /// Cyclotomic residual, height 0: handled by classification.
    RoutedToClassification,
    Consistent,
    /// A theorem-backed bound failed. Either way a major finding.
    Inconsistent,
}

impl ConsistencyReport {
    pub fn is_consistent(&self) -> bool {
        self.verdict != ConsistencyVerdict::Inconsistent
    }
}

/// Checks an anomalous certificate's residual against the height bound,
/// the degree bound and Smyth's inequality.
///
/// The residual is the witness container (no factorization), so the height
/// checked is the residual's average height.
pub fn solution_consistency(cert: &RankCertificate, degree_bound: u64) -> Result<ConsistencyReport> {
    let mut report = ConsistencyReport {
        exponents: cert.exponents.clone(),
        verdict: ConsistencyVerdict::Vacuous,
        height: None,
        height_bound: None,
        degree: None,
        degree_bound,
        smyth_ok: None,
        reciprocal: None,
    };
    if !cert.anomalous || cert.residual.is_constant() {
        return Ok(report);
    }
    if cert.classification == Classification::RootOfUnity {
        report.verdict = ConsistencyVerdict::RoutedToClassification;
        return Ok(report);
    }
    let d = *cert.exponents.last().unwrap() as f64;
    let h = weil_height(&cert.residual)?;
    let bound = step1_bound(d);
    let height_ok = h.weil_height - h.log_mahler_error / h.degree as f64 <= bound;
    let degree_ok = h.degree as u64 <= degree_bound;
    let smyth_ok = smyth_check(&h);
    report.height = Some(h.weil_height);
    report.height_bound = Some(bound);
    report.degree = Some(h.degree);
    report.smyth_ok = Some(smyth_ok);
    report.reciprocal = Some(h.is_reciprocal);
    // Reciprocal witnesses are excluded by the five-distinct-zeros argument.
    report.verdict = if height_ok && degree_ok && smyth_ok && !h.is_reciprocal {
        ConsistencyVerdict::Consistent
    } else {
        ConsistencyVerdict::Inconsistent
    };
    Ok(report)
}
