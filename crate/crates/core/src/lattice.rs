//! The lattice of integer vectors orthogonal to an exponent tuple.
//!
//! `orthogonal_lattice` returns a basis whose first two vectors attain the
//! first two successive minima in the L1 norm. Short vectors are found by
//! exhaustive Fincke-Pohst enumeration over an LLL-reduced basis: every
//! vector of L1 norm at most `R` has Euclidean norm at most `R`, so a
//! Euclidean ball of radius `R` covers the L1 ball and the search is exact.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heights::MINKOWSKI_CONSTANT;
use crate::ranktest::ExponentTuple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorNorms {
    pub l1: u64,
    /// Degree of the closure of the hypersurface `x^lambda = 1`.
    pub degree: u64,
}

/// Integral basis of `{lambda in Z^n : lambda . a = 0}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeBasis {
    pub tuple: ExponentTuple,
    /// `n - 1` vectors, ascending L1 norm, first nonzero entry positive.
    pub vectors: Vec<Vec<i64>>,
    pub norms: Vec<VectorNorms>,
}

impl LatticeBasis {
    /// Gram determinant of the basis; equals `|a|_2^2` for a basis of the
    /// orthogonal lattice of a primitive vector.
    pub fn gram_determinant(&self) -> i128 {
        gram_determinant(&self.vectors)
    }

    pub fn is_orthogonal(&self) -> bool {
        let a = self.tuple.exponents();
        self.vectors.iter().all(|v| dot(v, a) == 0)
    }

    /// `|a|_2^2`
    pub fn expected_covolume_squared(&self) -> i128 {
        self.tuple.exponents().iter().map(|&x| (x as i128) * (x as i128)).sum()
    }
}

impl std::fmt::Display for LatticeBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, (v, n)) in self.vectors.iter().zip(&self.norms).enumerate() {
            let entries: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            writeln!(
                f,
                "lambda_{} = ({})  l1={} degree={}",
                i + 1,
                entries.join(","),
                n.l1,
                n.degree
            )?;
        }
        Ok(())
    }
}

pub fn l1_norm(v: &[i64]) -> u64 {
    v.iter().map(|x| x.unsigned_abs()).sum()
}

/// `max(sum of positive entries, sum of |negative entries|)`
pub fn degree_norm(v: &[i64]) -> u64 {
    let pos: u64 = v.iter().filter(|&&x| x > 0).map(|&x| x as u64).sum();
    let neg: u64 = v.iter().filter(|&&x| x < 0).map(|x| x.unsigned_abs()).sum();
    pos.max(neg)
}

fn dot(v: &[i64], a: &[u64]) -> i128 {
    v.iter().zip(a).map(|(&x, &y)| x as i128 * y as i128).sum()
}

fn norms_of(v: &[i64]) -> VectorNorms {
    VectorNorms {
        l1: l1_norm(v),
        degree: degree_norm(v),
    }
}

/// Fraction-free (Bareiss) determinant of the Gram matrix.
pub fn gram_determinant(vectors: &[Vec<i64>]) -> i128 {
    let k = vectors.len();
    let mut stack = [0i128; 64];
    let mut heap = Vec::new();
    let m: &mut [i128] = if k * k <= stack.len() {
        &mut stack[..k * k]
    } else {
        heap.resize(k * k, 0);
        &mut heap
    };
    for i in 0..k {
        for j in i..k {
            let g: i128 = vectors[i]
                .iter()
                .zip(&vectors[j])
                .map(|(&x, &y)| x as i128 * y as i128)
                .sum();
            m[i * k + j] = g;
            m[j * k + i] = g;
        }
    }
    bareiss(m, k)
}

/// Determinant of the row-major `k x k` matrix `m`, destroying it.
fn bareiss(m: &mut [i128], k: usize) -> i128 {
    if k == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for p in 0..k - 1 {
        if m[p * k + p] == 0 {
            match (p + 1..k).find(|&r| m[r * k + p] != 0) {
                Some(r) => {
                    for c in 0..k {
                        m.swap(p * k + c, r * k + c);
                    }
                    sign = -sign;
                }
                None => return 0,
            }
        }
        let pivot = m[p * k + p];
        for i in p + 1..k {
            for j in p + 1..k {
                m[i * k + j] = (m[i * k + j] * pivot - m[i * k + p] * m[p * k + j]) / prev;
            }
        }
        prev = pivot;
    }
    sign * m[k * k - 1]
}

/// Largest tuple length the lattice routines accept.
pub const MAX_LATTICE_DIM: usize = 16;

fn l1<const D: usize>(v: &[i64; D], n: usize) -> u64 {
    v[..n].iter().map(|x| x.unsigned_abs()).sum()
}

fn normalized<const D: usize>(v: &[i64; D], n: usize) -> [i64; D] {
    let mut out = *v;
    if v[..n].iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        out[..n].iter_mut().for_each(|x| *x = -*x);
    }
    out
}

/// gcd of all 2x2 minors: 0 for dependent pairs, 1 for saturated ones.
fn pair_minor_gcd(u: &[i64], v: &[i64]) -> i128 {
    let mut g = 0i128;
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            g = g.gcd(&(u[i] as i128 * v[j] as i128 - u[j] as i128 * v[i] as i128));
        }
    }
    g
}

fn independent(u: &[i64], v: &[i64]) -> bool {
    (0..u.len()).any(|i| (i + 1..u.len()).any(|j| u[i] as i128 * v[j] as i128 != u[j] as i128 * v[i] as i128))
}

/// An integral basis of the orthogonal lattice by extended-gcd column
/// operations on the `1 x n` constraint row.
pub fn kernel_basis(a: &[u64]) -> Vec<Vec<i64>> {
    let n = a.len();
    let (b, k) = kernel_arrays::<MAX_LATTICE_DIM>(a);
    b[..k].iter().map(|v| v[..n].to_vec()).collect()
}

fn kernel_arrays<const D: usize>(a: &[u64]) -> ([[i64; D]; D], usize) {
    let n = a.len();
    let mut r = [0i64; D];
    for (x, &y) in r.iter_mut().zip(a) {
        *x = y as i64;
    }
    let mut cols = [[0i64; D]; D];
    for (j, c) in cols.iter_mut().enumerate().take(n) {
        c[j] = 1;
    }
    loop {
        let pivot = (0..n)
            .filter(|&j| r[j] != 0)
            .min_by_key(|&j| r[j].abs())
            .expect("nonzero constraint");
        let mut done = true;
        for j in 0..n {
            if j != pivot && r[j] != 0 {
                let q = Integer::div_floor(&r[j], &r[pivot]);
                r[j] -= q * r[pivot];
                let p = cols[pivot];
                for (x, y) in cols[j][..n].iter_mut().zip(&p[..n]) {
                    *x -= q * y;
                }
                if r[j] != 0 {
                    done = false;
                }
            }
        }
        if done {
            let mut out = [[0i64; D]; D];
            let mut k = 0;
            for j in 0..n {
                if r[j] == 0 {
                    out[k] = cols[j];
                    k += 1;
                }
            }
            return (out, k);
        }
    }
}

/// Floating-point Gram-Schmidt data of a basis.
struct GramSchmidt<const D: usize> {
    mu: [[f64; D]; D],
    /// Squared lengths of the orthogonalized vectors.
    bstar: [f64; D],
}

impl<const D: usize> GramSchmidt<D> {
    fn new(b: &[[i64; D]], n: usize) -> Self {
        let mut star = [[0.0f64; D]; D];
        let mut mu = [[0.0; D]; D];
        let mut bstar = [0.0; D];
        for i in 0..b.len() {
            let mut v = [0.0; D];
            for t in 0..n {
                v[t] = b[i][t] as f64;
            }
            for j in 0..i {
                let m = (0..n).map(|t| b[i][t] as f64 * star[j][t]).sum::<f64>() / bstar[j];
                mu[i][j] = m;
                for t in 0..n {
                    v[t] -= m * star[j][t];
                }
            }
            bstar[i] = (0..n).map(|t| v[t] * v[t]).sum();
            star[i] = v;
        }
        GramSchmidt { mu, bstar }
    }
}

/// LLL reduction with `delta = 0.99`.
pub fn lll_reduce(b: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let Some(n) = b.first().map(Vec::len) else {
        return b;
    };
    let mut arr: Vec<[i64; MAX_LATTICE_DIM]> = b
        .iter()
        .map(|v| {
            let mut x = [0i64; MAX_LATTICE_DIM];
            x[..n].copy_from_slice(v);
            x
        })
        .collect();
    lll_in_place::<MAX_LATTICE_DIM>(&mut arr, n);
    arr.iter().map(|v| v[..n].to_vec()).collect()
}

fn lll_in_place<const D: usize>(b: &mut [[i64; D]], n: usize) {
    let k = b.len();
    if k < 2 {
        return;
    }
    let mut gs = GramSchmidt::new(b, n);
    let mut i = 1;
    let mut steps = 0;
    while i < k && steps < 100_000 {
        steps += 1;
        for j in (0..i).rev() {
            let q = gs.mu[i][j].round();
            if q != 0.0 {
                let qi = q as i64;
                let bj = b[j];
                for t in 0..n {
                    b[i][t] -= qi * bj[t];
                }
                for l in 0..j {
                    gs.mu[i][l] -= q * gs.mu[j][l];
                }
                gs.mu[i][j] -= q;
            }
        }
        let m = gs.mu[i][i - 1];
        if gs.bstar[i] >= (0.99 - m * m) * gs.bstar[i - 1] {
            i += 1;
        } else {
            b.swap(i, i - 1);
            gs = GramSchmidt::new(b, n);
            i = i.max(2) - 1;
        }
    }
}

struct Enumerator<'a, const D: usize> {
    basis: &'a [[i64; D]],
    n: usize,
    gs: GramSchmidt<D>,
    bound: f64,
    x: [i64; D],
    /// `partial[l] = sum_{j >= l} x_j b_j`
    partial: [[i64; D]; D],
}

impl<'a, const D: usize> Enumerator<'a, D> {
    fn new(basis: &'a [[i64; D]], n: usize) -> Self {
        Enumerator {
            basis,
            n,
            gs: GramSchmidt::new(basis, n),
            bound: 0.0,
            x: [0; D],
            partial: [[0i64; D]; D],
        }
    }

    /// Calls `visit(coords, vector)` for every nonzero lattice vector of
    /// Euclidean norm at most `radius`, one of each `+-v` pair, nearest
    /// coordinates first. `visit` may return a smaller radius, which then
    /// bounds the rest of the search.
    fn run(&mut self, radius: f64, visit: &mut impl FnMut(&[i64], &[i64; D]) -> Option<f64>) {
        let k = self.basis.len();
        self.bound = padded(radius);
        self.x = [0; D];
        self.partial[k] = [0i64; D];
        self.level(k - 1, 0.0, visit);
    }

    fn level(&mut self, l: usize, used: f64, visit: &mut impl FnMut(&[i64], &[i64; D]) -> Option<f64>) {
        let k = self.basis.len();
        let center = -((l + 1)..k).map(|j| self.x[j] as f64 * self.gs.mu[j][l]).sum::<f64>();
        let start = center.round() as i64;
        // Walk outward from the nearest integer, one direction at a time.
        for dir in [1i64, -1] {
            let mut xi = if dir == 1 { start } else { start - 1 };
            loop {
                let d = xi as f64 - center;
                let u = used + d * d * self.gs.bstar[l];
                if u > self.bound {
                    break;
                }
                self.x[l] = xi;
                let mut p = self.partial[l + 1];
                if xi != 0 {
                    for (pt, bt) in p.iter_mut().zip(&self.basis[l]).take(self.n) {
                        *pt += xi * bt;
                    }
                }
                self.partial[l] = p;
                if l > 0 {
                    self.level(l - 1, u, visit);
                } else if self.x[..k].iter().rev().find(|&&c| c != 0).is_some_and(|&c| c > 0) {
                    if let Some(r) = visit(&self.x[..k], &self.partial[0]) {
                        self.bound = self.bound.min(padded(r));
                    }
                }
                xi += dir;
            }
        }
        self.x[l] = 0;
    }
}

fn padded(radius: f64) -> f64 {
    radius * radius * (1.0 + 1e-6) + 1e-6
}

/// Completes the primitive rows `top` (length `k`) to a unimodular `k x k`
/// integer matrix; the first rows of the result are `top`.
fn complete_unimodular<const D: usize>(top: &[[i64; D]], k: usize) -> [[i64; D]; D] {
    let t = top.len();
    let mut x = [[0i64; D]; D];
    x[..t].copy_from_slice(top);
    // inverse of the accumulated column transform
    let mut tinv = [[0i64; D]; D];
    for (i, r) in tinv.iter_mut().enumerate().take(k) {
        r[i] = 1;
    }
    for row in 0..t {
        loop {
            let mut pivot = None;
            let mut count = 0;
            for j in row..k {
                if x[row][j] != 0 {
                    count += 1;
                    if pivot.is_none_or(|p: usize| x[row][j].abs() < x[row][p].abs()) {
                        pivot = Some(j);
                    }
                }
            }
            if count <= 1 {
                if let Some(j) = pivot.filter(|&j| j != row) {
                    for r in x.iter_mut().take(t) {
                        r.swap(row, j);
                    }
                    tinv.swap(row, j);
                }
                break;
            }
            let p = pivot.unwrap();
            for j in row..k {
                if j == p || x[row][j] == 0 {
                    continue;
                }
                let q = Integer::div_floor(&x[row][j], &x[row][p]);
                // column j -= q * column p
                for r in x.iter_mut().take(t) {
                    r[j] -= q * r[p];
                }
                // T^{-1}: row p += q * row j
                let rj = tinv[j];
                for c in 0..k {
                    tinv[p][c] += q * rj[c];
                }
            }
        }
    }
    let mut out = tinv;
    out[..t].copy_from_slice(top);
    out
}

/// Basis of the orthogonal lattice with `lambda_1`, `lambda_2` attaining
/// the first two successive L1 minima.
pub fn orthogonal_lattice(tuple: &ExponentTuple) -> Result<LatticeBasis> {
    let a = tuple.exponents();
    let n = a.len();
    if !tuple.is_primitive() {
        return Err(Error::InvalidTuple {
            exponents: a.to_vec(),
            reason: "orthogonal lattice basis needs a primitive tuple".into(),
        });
    }
    if n > MAX_LATTICE_DIM {
        return Err(Error::InvalidArgument(format!(
            "lattice routines accept at most {MAX_LATTICE_DIM} exponents, got {n}"
        )));
    }
    match n {
        0..=4 => lattice_in::<4>(tuple),
        5..=8 => lattice_in::<8>(tuple),
        _ => lattice_in::<MAX_LATTICE_DIM>(tuple),
    }
}

fn lattice_in<const D: usize>(tuple: &ExponentTuple) -> Result<LatticeBasis> {
    let a = tuple.exponents();
    let n = a.len();
    let (mut reduced, k) = kernel_arrays(a);
    let reduced = &mut reduced[..k];
    lll_in_place(reduced, n);
    let mut en = Enumerator::new(reduced, n);

    // Two independent basis vectors bound the second minimum, and some
    // vector at the second minimum completes lambda_1 to a saturated pair,
    // so one search at that radius sees both. The radius shrinks to the
    // best independent pair found so far.
    let mut radii: Vec<u64> = reduced.iter().map(|v| l1(v, n)).collect();
    radii.sort_unstable();
    let mut bound = radii[1];
    let mut found: Vec<([i64; D], [i64; D], u64)> = Vec::new();
    // index of a shortest vector found, and the shortest one independent of it
    let mut shortest = usize::MAX;
    en.run(bound as f64, &mut |x, v| {
        let norm = l1(v, n);
        if norm > bound {
            return None;
        }
        let mut c = [0; D];
        c[..k].copy_from_slice(x);
        found.push((c, normalized(v, n), norm));
        let m2 = if shortest == usize::MAX || norm < found[shortest].2 {
            shortest = found.len() - 1;
            found
                .iter()
                .filter(|f| independent(&f.1[..n], &v[..n]))
                .map(|f| f.2)
                .min()
        } else if independent(&v[..n], &found[shortest].1[..n]) {
            Some(norm)
        } else {
            None
        };
        match m2 {
            Some(m2) if m2 < bound => {
                bound = m2;
                Some(bound as f64)
            }
            _ => None,
        }
    });
    found.retain(|f| f.2 <= bound);
    found.sort_unstable_by(|p, q| (p.2, &p.1[..n]).cmp(&(q.2, &q.1[..n])));
    let (x1, lam1, _) = found[0];
    let (x2, lam2, _) = *found
        .iter()
        .find(|f| independent(&f.1[..n], &lam1[..n]) && pair_minor_gcd(&lam1[..n], &f.1[..n]) == 1)
        .expect("a saturated partner exists at the second minimum");

    let coords = complete_unimodular(&[x1, x2], k);
    let mut vectors = [[0i64; D]; D];
    vectors[0] = lam1;
    vectors[1] = lam2;
    for i in 2..k {
        let mut v = [0i64; D];
        for (c, b) in coords[i][..k].iter().zip(reduced.iter()) {
            for t in 0..n {
                v[t] += c * b[t];
            }
        }
        // Shorten against the earlier vectors.
        loop {
            let mut improved = false;
            for w in vectors.iter().take(i) {
                for s in [1i64, -1] {
                    let mut cand = v;
                    for t in 0..n {
                        cand[t] += s * w[t];
                    }
                    if l1(&cand, n) < l1(&v, n) {
                        v = cand;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        vectors[i] = normalized(&v, n);
    }
    vectors[2..k].sort_by(|p, q| (l1(p, n), &p[..n]).cmp(&(l1(q, n), &q[..n])));

    let vectors: Vec<Vec<i64>> = vectors[..k].iter().map(|v| v[..n].to_vec()).collect();
    let norms = vectors.iter().map(|v| norms_of(v)).collect();
    Ok(LatticeBasis {
        tuple: tuple.clone(),
        vectors,
        norms,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiMargin {
    pub product: u64,
    pub bound: f64,
    /// `product / bound`; at most 1 when the inequality holds.
    pub ratio: f64,
}

/// Checks `|lambda_1|_1 |lambda_2|_1 <= 96 d^{2/3}` exactly, as
/// `product^3 <= 96^3 d^2`. A violation contradicts a theorem and is an
/// error.
pub fn minkowski_check(basis: &LatticeBasis) -> Result<MinkowskiMargin> {
    if basis.tuple.n() != 4 {
        return Err(Error::InvalidArgument(
            "the quantified Minkowski bound is stated for quadruples".into(),
        ));
    }
    let d = basis.tuple.last();
    let product = basis.norms[0].l1 * basis.norms[1].l1;
    let bound = MINKOWSKI_CONSTANT * (d as f64).powf(2.0 / 3.0);
    let margin = MinkowskiMargin {
        product,
        bound,
        ratio: product as f64 / bound,
    };
    let lhs = (product as u128).pow(3);
    let rhs = 96u128.pow(3) * (d as u128) * (d as u128);
    if lhs > rhs {
        return Err(Error::BoundViolation {
            exponents: basis.tuple.exponents().to_vec(),
            detail: format!(
                "|lambda_1|_1 * |lambda_2|_1 = {product} > 96 d^(2/3) = {bound:.3}\n{basis}"
            ),
        });
    }
    Ok(margin)
}

/// `floor(96 d^{2/3})`, computed exactly as the largest `k` with
/// `k^3 <= 96^3 d^2`.
pub fn degree_bound(d: u64) -> u64 {
    let target = 96u128.pow(3) * (d as u128) * (d as u128);
    let mut k = (target as f64).cbrt() as u128;
    while k.pow(3) > target {
        k -= 1;
    }
    while (k + 1).pow(3) <= target {
        k += 1;
    }
    k as u64
}
