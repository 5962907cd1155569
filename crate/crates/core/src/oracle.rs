//! Floating-point incidence scan for the monomial curve `t -> (t^a_1, ..., t^a_n)`.
//!
//! The point `v(w)` lies on the osculating `(n-2)`-plane at `v(t0)` exactly
//! when the `n x (n-1)` matrix with rows
//! `(t0^a a, ..., t0^a a^{n-2}, w^a - t0^a)` drops rank. At `t0 = 1` this is
//! the rank test matrix. Everything here is built from scratch in `f64`
//! (minors by cofactor expansion, roots by Aberth iteration) so it can
//! cross-check the exact pipeline; it never decides anything on its own.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{a_matrix, singular_values};
use crate::ranktest::{Classification, ExponentTuple, RankCertificate};
use crate::roots::roots;

pub const RESIDUAL_TOLERANCE: f64 = 1e-7;
pub const EXCLUSION_RADIUS: f64 = 1e-6;
const MAX_SCAN_DEGREE: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Relative residual below which every minor counts as vanishing.
    pub residual_tolerance: f64,
    /// Per unit of multiplicity, relative to `|t0|`.
    pub exclusion_radius: f64,
    /// Multiplicity of the basepoint as a root of the scanned minor, when
    /// the exact pipeline already knows it.
    pub basepoint_multiplicity: Option<u32>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            residual_tolerance: RESIDUAL_TOLERANCE,
            exclusion_radius: EXCLUSION_RADIUS,
            basepoint_multiplicity: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub z: Complex64,
    /// Smallest singular value of the incidence matrix at `z`.
    pub min_singular_value: f64,
    /// Largest relative residual over all minors.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncidenceScan {
    pub tuple: ExponentTuple,
    pub basepoint: Complex64,
    pub candidates: Vec<Candidate>,
    /// Multiplicity of the basepoint removed before root finding.
    pub basepoint_multiplicity: u32,
    pub warnings: Vec<String>,
}

/// Smallest singular value of the rank test matrix at `z`.
pub fn osculating_incidence(tuple: &ExponentTuple, z: Complex64) -> f64 {
    singular_values(a_matrix(tuple.exponents(), z))
        .last()
        .copied()
        .unwrap_or(0.0)
}

/// The incidence matrix for basepoint `t0` and curve parameter `w`.
pub fn incidence_matrix(exponents: &[u64], t0: Complex64, w: Complex64) -> DMatrix<Complex64> {
    let n = exponents.len();
    DMatrix::from_fn(n, n - 1, |i, j| {
        let a = exponents[i];
        let ta = t0.powu(a as u32);
        if j + 1 < n - 1 {
            ta * (a as f64).powi(j as i32 + 1)
        } else {
            w.powu(a as u32) - ta
        }
    })
}

/// Dense complex polynomial (ascending coefficients).
#[derive(Debug, Clone)]
struct CPoly(Vec<Complex64>);

impl CPoly {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `sum |c_m| |z|^m`, the natural scale of an evaluation.
    fn scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.0.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    fn relative(&self, z: Complex64) -> f64 {
        let s = self.scale(z);
        if s == 0.0 {
            0.0
        } else {
            self.eval(z).norm() / s
        }
    }

    /// Quotient by `(z - r)`, dropping the remainder.
    fn deflate(&self, r: Complex64) -> CPoly {
        let n = self.0.len();
        let mut q = vec![Complex64::new(0.0, 0.0); n - 1];
        let mut acc = Complex64::new(0.0, 0.0);
        for m in (1..n).rev() {
            acc = acc * r + self.0[m];
            q[m - 1] = acc;
        }
        CPoly(q)
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }
}

/// Determinant of the `(n-2) x (n-2)` matrix with rows
/// `(r, r^2, ..., r^{n-2})`, rounded to the integer it must be.
fn power_determinant(rows: &[u64], warnings: &mut Vec<String>) -> f64 {
    let k = rows.len();
    if k == 0 {
        return 1.0;
    }
    let m = DMatrix::from_fn(k, k, |i, j| (rows[i] as f64).powi(j as i32 + 1));
    let d = m.determinant();
    if d.abs() < 2f64.powi(52) {
        d.round()
    } else {
        warnings.push(format!("minor coefficient {d:.3e} exceeds exact f64 range"));
        d
    }
}

/// Maximal minors of the incidence matrix as polynomials in `w`; entry `i`
/// omits row `i`.
fn minors(exponents: &[u64], t0: Complex64, warnings: &mut Vec<String>) -> Vec<CPoly> {
    let n = exponents.len();
    let top = *exponents.iter().max().unwrap() as usize;
    let powers: Vec<Complex64> = exponents.iter().map(|&a| t0.powu(a as u32)).collect();
    (0..n)
        .map(|i| {
            let rest: Vec<usize> = (0..n).filter(|&r| r != i).collect();
            let all: Complex64 = rest.iter().map(|&r| powers[r]).product();
            let mut c = vec![Complex64::new(0.0, 0.0); top + 1];
            for (p, &row) in rest.iter().enumerate() {
                let others: Vec<u64> = rest.iter().filter(|&&r| r != row).map(|&r| exponents[r]).collect();
                let sign = if (p + rest.len() - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
                let det = sign * power_determinant(&others, warnings);
                // Row scaling of the other rows, then the last-column entry.
                let scale: Complex64 = all / powers[row];
                c[exponents[row] as usize] += scale * det;
                c[0] -= all * det;
            }
            CPoly(c)
        })
        .collect()
}

/// Removes the basepoint root: exactly when `t0 = 1` and the coefficients are
/// integers, otherwise by synthetic division while the value stays small.
fn deflate_basepoint(p: &CPoly, t0: Complex64, at_least: u32, known: Option<u32>) -> (u32, CPoly) {
    let exact = t0 == Complex64::new(1.0, 0.0)
        && p.0.iter().all(|c| c.im == 0.0 && c.re.fract() == 0.0 && c.re.abs() < 2f64.powi(100));
    if exact {
        let mut c: Vec<i128> = p.0.iter().map(|x| x.re as i128).collect();
        let mut m = 0;
        while c.len() > 1 && c.iter().sum::<i128>() == 0 {
            let mut q = vec![0i128; c.len() - 1];
            let mut acc = 0i128;
            for k in (1..c.len()).rev() {
                acc += c[k];
                q[k - 1] = acc;
            }
            c = q;
            m += 1;
        }
        return (m, CPoly(c.into_iter().map(|x| Complex64::new(x as f64, 0.0)).collect()));
    }
    let mut q = p.clone();
    let mut m = 0;
    let forced = known.unwrap_or(at_least);
    while q.degree() > 0 && (m < forced || (known.is_none() && q.relative(t0) < 1e-9)) {
        q = q.deflate(t0);
        m += 1;
    }
    (m, q)
}

/// Root scan at basepoint 1.
pub fn root_scan(tuple: &ExponentTuple) -> Result<IncidenceScan> {
    root_scan_with(tuple, Complex64::new(1.0, 0.0), &ScanOptions::default())
}

pub fn root_scan_at(tuple: &ExponentTuple, t0: Complex64) -> Result<IncidenceScan> {
    root_scan_with(tuple, t0, &ScanOptions::default())
}

/// Roots of the minor omitting `a_n`, with the basepoint deflated, kept when
/// every other minor vanishes there too.
pub fn root_scan_with(tuple: &ExponentTuple, t0: Complex64, options: &ScanOptions) -> Result<IncidenceScan> {
    if t0.norm() == 0.0 || !t0.is_finite() {
        return Err(Error::InvalidArgument("basepoint must be finite and nonzero".into()));
    }
    if tuple.last() > MAX_SCAN_DEGREE {
        return Err(Error::DegreeTooLarge {
            degree: tuple.last(),
            limit: MAX_SCAN_DEGREE,
        });
    }
    let a = tuple.exponents();
    let n = a.len();
    let mut warnings = Vec::new();
    let system = minors(a, t0, &mut warnings);
    let chosen = n - 1;
    let (mult, residual) = deflate_basepoint(
        &system[chosen],
        t0,
        (n - 1) as u32,
        options.basepoint_multiplicity,
    );
    if mult < (n - 1) as u32 {
        warnings.push(format!(
            "basepoint multiplicity {mult} below the expected {}",
            n - 1
        ));
    }
    let exclusion = options.exclusion_radius * f64::from(mult.max(1)) * t0.norm();
    let mut found: Vec<Candidate> = Vec::new();
    for w in roots(&residual.0) {
        if (w - t0).norm() <= exclusion {
            warnings.push(format!("root {w} inside the basepoint exclusion disk"));
            continue;
        }
        let worst = system
            .iter()
            .map(|p| p.relative(w))
            .fold(0.0, f64::max);
        if worst >= options.residual_tolerance {
            continue;
        }
        if let Some(prev) = found.iter_mut().find(|c| (c.z - w).norm() <= options.exclusion_radius * w.norm().max(1.0)) {
            if worst < prev.residual {
                prev.z = w;
                prev.residual = worst;
            }
            continue;
        }
        found.push(Candidate {
            z: w,
            min_singular_value: 0.0,
            residual: worst,
        });
    }
    for c in &mut found {
        c.min_singular_value = singular_values(incidence_matrix(a, t0, c.z))
            .last()
            .copied()
            .unwrap_or(0.0);
    }
    found.sort_by(|p, q| p.z.arg().total_cmp(&q.z.arg()).then(p.z.norm().total_cmp(&q.z.norm())));
    Ok(IncidenceScan {
        tuple: tuple.clone(),
        basepoint: t0,
        candidates: found,
        basepoint_multiplicity: mult,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasepointReport {
    pub basepoint: Complex64,
    /// `|w / t0 - z|` over matched candidates; infinite when the candidate
    /// sets differ in size.
    pub candidate_deviation: f64,
    /// Largest relative singular value mismatch at the sample points.
    pub spectrum_deviation: f64,
    pub scan_at_one: IncidenceScan,
    pub scan_at_basepoint: IncidenceScan,
}

impl BasepointReport {
    pub fn max_deviation(&self) -> f64 {
        self.candidate_deviation.max(self.spectrum_deviation)
    }
}

/// Compares the scan at `t0` with the scan at 1 under `w = t0 z`, and the
/// singular spectra at `(t0, t0 z)` after undoing the row scaling against
/// those at `(1, z)`.
pub fn basepoint_invariance(tuple: &ExponentTuple, t0: Complex64) -> Result<BasepointReport> {
    let one = root_scan(tuple)?;
    let moved = root_scan_at(tuple, t0)?;
    let candidate_deviation = if one.candidates.len() != moved.candidates.len() {
        f64::INFINITY
    } else {
        one.candidates
            .iter()
            .map(|c| {
                moved
                    .candidates
                    .iter()
                    .map(|m| (m.z / t0 - c.z).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };

    let a = tuple.exponents();
    let mut rng = ChaCha8Rng::seed_from_u64(a.iter().fold(0x9e37_79b9, |h, &x| h.wrapping_mul(31).wrapping_add(x)));
    let mut spectrum_deviation: f64 = 0.0;
    for _ in 0..8 {
        let z = Complex64::from_polar(rng.random_range(0.5..1.5), rng.random_range(0.0..std::f64::consts::TAU));
        let mut m = incidence_matrix(a, t0, t0 * z);
        for (i, &e) in a.iter().enumerate() {
            let s = t0.powu(e as u32).inv();
            m.row_mut(i).iter_mut().for_each(|x| *x *= s);
        }
        let lhs = singular_values(m);
        let rhs = singular_values(a_matrix(a, z));
        let scale = rhs.first().copied().unwrap_or(0.0).max(1.0);
        for (x, y) in lhs.iter().zip(&rhs) {
            spectrum_deviation = spectrum_deviation.max((x - y).abs() / scale);
        }
    }
    Ok(BasepointReport {
        basepoint: t0,
        candidate_deviation,
        spectrum_deviation,
        scan_at_one: one,
        scan_at_basepoint: moved,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub exponents: Vec<u64>,
    pub exact_anomalous: bool,
    pub candidates: usize,
    /// Residual roots with no candidate within tolerance, and vice versa.
    pub unmatched: usize,
}

impl Agreement {
    pub fn holds(&self) -> bool {
        self.unmatched == 0 && (self.exact_anomalous == (self.candidates > 0))
    }
}

/// Checks a scan against an exact certificate: no candidates for a constant
/// residual, and matching point sets otherwise.
pub fn agreement(cert: &RankCertificate, scan: &IncidenceScan) -> Agreement {
    let exact_roots: Vec<Complex64> = if cert.residual.is_constant() {
        Vec::new()
    } else {
        let mut r = roots(&cert.residual.to_complex());
        r.dedup_by(|x, y| (*x - *y).norm() < 1e-6);
        r
    };
    let found: Vec<Complex64> = scan.candidates.iter().map(|c| c.z).collect();
    let near = |x: &Complex64, set: &[Complex64]| set.iter().any(|y| (x - y).norm() < 1e-5);
    let unmatched = exact_roots.iter().filter(|r| !near(r, &found)).count()
        + found.iter().filter(|z| !near(z, &exact_roots)).count();
    Agreement {
        exponents: cert.exponents.clone(),
        exact_anomalous: cert.anomalous || cert.classification == Classification::Inconclusive,
        candidates: scan.candidates.len(),
        unmatched,
    }
}
