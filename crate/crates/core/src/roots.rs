//! Floating-point polynomial root finding.
//!
//! Simultaneous Aberth-Ehrlich iteration started from Newton-polygon radii,
//! plus Weierstrass-correction inclusion radii so callers can attach an
//! error bar to anything derived from the roots. Numbers produced here are
//! used to prune and to measure, never to decide a certificate.

use num_complex::Complex64;

const MAX_ITERATIONS: usize = 1000;

/// A root approximation together with an inclusion radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxRoot {
    pub value: Complex64,
    /// Radius of a disk around `value` that contains a true root. When
    /// disks overlap, the radius covers the whole connected cluster.
    pub radius: f64,
    /// Set when this root's disk overlaps another one.
    pub clustered: bool,
}

/// All complex roots of `sum coeffs[i] z^i`, with multiplicity.
///
/// Trailing zero coefficients are ignored, leading zero coefficients
/// contribute roots at the origin. Returns an empty vector for constants.
pub fn roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let top = match coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0)) {
        Some(t) => t,
        None => return Vec::new(),
    };
    let low = coeffs.iter().position(|c| *c != Complex64::new(0.0, 0.0)).unwrap();
    let mut out = vec![Complex64::new(0.0, 0.0); low];
    let core = &coeffs[low..=top];
    let deg = core.len() - 1;
    if deg == 0 {
        return out;
    }
    if deg == 1 {
        out.push(-core[0] / core[1]);
        return out;
    }
    let mut z = initial_guesses(core);
    aberth(core, &mut z);
    out.extend(z);
    out
}

/// Roots of an integer-coefficient polynomial given in `f64`.
pub fn real_roots_of(coeffs: &[f64]) -> Vec<Complex64> {
    let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    roots(&c)
}

/// Roots with Weierstrass inclusion radii `deg * |W_i|`.
///
/// The union of the disks contains every root; a connected component made
/// of `m` disks contains exactly `m` roots. Clustered roots get the radius of
/// their component.
pub fn roots_with_radii(coeffs: &[Complex64]) -> Vec<ApproxRoot> {
    let zs = roots(coeffs);
    let top = match coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0)) {
        Some(t) => t,
        None => return Vec::new(),
    };
    let lead = coeffs[top];
    let deg = zs.len() as f64;
    let mut radii: Vec<f64> = zs
        .iter()
        .enumerate()
        .map(|(i, &zi)| {
            let mut denom = lead;
            for (j, &zj) in zs.iter().enumerate() {
                if i != j {
                    denom *= zi - zj;
                }
            }
            // |p(z_i)| plus the rounding error bound of its Horner evaluation.
            let scale: f64 = coeffs
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * zi.norm() + c.norm());
            let pz = horner(coeffs, zi).norm() + 4.0 * deg * f64::EPSILON * scale;
            let r = deg * pz / denom.norm();
            if r.is_finite() {
                r
            } else {
                f64::INFINITY
            }
        })
        .collect();

    // Union-find over overlapping disks.
    let n = zs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut clustered = vec![false; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if (zs[i] - zs[j]).norm() <= radii[i] + radii[j] {
                clustered[i] = true;
                clustered[j] = true;
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    // A component's disks lie within (max distance to any member + its radius).
    let roots_of: Vec<usize> = (0..n).map(|i| find(&mut parent.clone(), i)).collect();
    let widened: Vec<f64> = (0..n)
        .map(|i| {
            if !clustered[i] {
                return radii[i];
            }
            (0..n)
                .filter(|&j| roots_of[j] == roots_of[i])
                .map(|j| (zs[i] - zs[j]).norm() + radii[j])
                .fold(radii[i], f64::max)
        })
        .collect();
    radii.copy_from_slice(&widened);

    zs.into_iter()
        .zip(radii)
        .zip(clustered)
        .map(|((value, radius), clustered)| ApproxRoot {
            value,
            radius,
            clustered,
        })
        .collect()
}

pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Newton correction `p(z)/p'(z)`, evaluated on the reversed polynomial
/// outside the unit disk to keep the recurrence stable.
fn newton_ratio(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let deg = coeffs.len() - 1;
    if z.norm() <= 1.0 {
        let mut p = coeffs[deg];
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in coeffs[..deg].iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        p / dp
    } else {
        let w = z.inv();
        let mut q = coeffs[0];
        let mut dq = Complex64::new(0.0, 0.0);
        for &c in coeffs[1..].iter() {
            dq = dq * w + q;
            q = q * w + c;
        }
        // p(z)/p'(z) = z / (deg - w q'(w)/q(w))
        z / (Complex64::new(deg as f64, 0.0) - w * dq / q)
    }
}

fn aberth(coeffs: &[Complex64], z: &mut [Complex64]) {
    let n = z.len();
    let mut converged = vec![false; n];
    for _ in 0..MAX_ITERATIONS {
        let mut all = true;
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let ratio = newton_ratio(coeffs, z[i]);
            if !ratio.is_finite() {
                converged[i] = true;
                continue;
            }
            let mut sum = Complex64::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    sum += (z[i] - zj).inv();
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if !step.is_finite() {
                converged[i] = true;
                continue;
            }
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE) {
                converged[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
}

/// Starting points on circles whose radii come from the upper convex hull
/// of `(i, log|c_i|)`.
fn initial_guesses(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    let pts: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(i, c)| (i, c.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(deg);
    let sigma = 0.7;
    for w in hull.windows(2) {
        let (i, li) = w[0];
        let (j, lj) = w[1];
        let k = j - i;
        let r = ((li - lj) / k as f64).exp();
        for t in 0..k {
            let angle = 2.0 * std::f64::consts::PI * (t as f64) / (k as f64)
                + 2.0 * std::f64::consts::PI * (i as f64) / (deg as f64)
                + sigma;
            out.push(Complex64::from_polar(r, angle));
        }
    }
    out
}
