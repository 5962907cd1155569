//! End-to-end acceptance run. One line per criterion; nonzero exit on any
//! failure.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nalgebra::Matrix4;
use num_bigint::BigInt;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use nplet_core::heights::{solution_consistency, weil_height};
use nplet_core::lattice::{degree_bound, minkowski_check, orthogonal_lattice};
use nplet_core::oracle::{agreement, root_scan};
use nplet_core::polyarith::{DensePolynomial, SparsePolynomial};
use nplet_core::ranktest::{decide, scaling_transport, ExponentTuple, MinorSystem};
use nplet_core::search::{self, SearchConfig};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn nplet(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_nplet"))
        .args(args)
        .output()
        .expect("spawn nplet")
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn random_tuple(rng: &mut ChaCha8Rng, n: usize, max_last: u64) -> ExponentTuple {
    loop {
        let mut e: Vec<u64> = (0..n).map(|_| rng.random_range(1..=max_last)).collect();
        e.sort_unstable();
        e.dedup();
        if e.len() == n && e.iter().fold(0, |g, &x| gcd(g, x)) == 1 {
            return ExponentTuple::new(e).unwrap();
        }
    }
}

fn sweep(n: usize, max: u64, dir: &Path) -> Result<(search::SearchSummary, Vec<nplet_core::RankCertificate>), String> {
    let out = dir.join(format!("n{n}_{max}.jsonl"));
    let mut config = SearchConfig::new(n, max, &out);
    config.workers = workers();
    let summary = search::run(&config).map_err(|e| e.to_string())?;
    let report = search::verify(&out).map_err(|e| e.to_string())?;
    if !report.ok() {
        return Err(format!("verify failed: {:?}", report.failures.first()));
    }
    let (_, certs) = search::read_certificates(&out).map_err(|e| e.to_string())?;
    Ok((summary, certs))
}

fn criterion_1(dir: &Path) -> Outcome {
    let (summary, certs) = sweep(3, 60, dir)?;
    if summary.anomalous_found != 0 {
        return Err(format!("{} anomalous triples: {:?}", summary.anomalous_found, summary.discoveries));
    }
    if let Some(c) = certs.iter().find(|c| !c.residual.is_constant()) {
        return Err(format!("nonconstant residual for {:?}", c.exponents));
    }
    Ok(format!("{} coprime triples, none anomalous, store verified", certs.len()))
}

fn criterion_2(dir: &Path) -> Outcome {
    let (summary, certs) = sweep(4, 40, dir)?;
    let mut validated = 0;
    for cert in certs.iter().filter(|c| c.anomalous) {
        let tuple = cert.tuple().map_err(|e| e.to_string())?;
        search::check_certificate(cert).map_err(|e| format!("{:?}: {e}", cert.exponents))?;
        let scan = root_scan(&tuple).map_err(|e| e.to_string())?;
        if !agreement(cert, &scan).holds() {
            return Err(format!("{:?}: oracle disagrees", cert.exponents));
        }
        let bound = degree_bound(tuple.last());
        let report = solution_consistency(cert, bound).map_err(|e| e.to_string())?;
        if !report.is_consistent() {
            return Err(format!("{:?}: inconsistent with height bounds", cert.exponents));
        }
        if cert.residual.degree().unwrap_or(0) as u64 > bound {
            return Err(format!("{:?}: witness degree above {bound}", cert.exponents));
        }
        validated += 1;
    }
    if validated > 0 {
        return Ok(format!(
            "{} quadruples, {validated} validated discoveries (exit 1): {:?}",
            certs.len(),
            summary.discoveries
        ));
    }
    Ok(format!("{} coprime quadruples, none anomalous, store verified", certs.len()))
}

fn three_sig(x: f64) -> String {
    format!("{x:.2e}")
}

fn criterion_3() -> Outcome {
    let o = nplet(&["--format", "records", "bounds", "--solve"]);
    if o.status.code() != Some(0) {
        return Err(format!("exit {:?}", o.status.code()));
    }
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).map_err(|e| e.to_string())?;
    let d = v["d_star"].as_f64().ok_or("no d_star")?;
    let side = |i: usize, j: usize| v["sides_at_bracket"][i][j].as_f64().unwrap_or(f64::NAN);
    let got = [side(0, 0), side(0, 1), side(1, 0), side(1, 1)];
    let want = [133.5, 245.3, 287.5, 266.0];
    if !(1e12 < d && d < 1e13) {
        return Err(format!("d* = {d:e}"));
    }
    for (g, w) in got.iter().zip(want) {
        if three_sig(*g) != three_sig(w) {
            return Err(format!("side {g} vs {w} at 3 significant figures"));
        }
    }
    if !(got[0] < got[1] && got[2] > got[3]) {
        return Err("bracket does not change sign".into());
    }
    Ok(format!("d* = {d:.4e}, sides {got:.2?}"))
}

fn criterion_4() -> Outcome {
    let p = DensePolynomial::from_i64(&[-1, -1, 0, 1]);
    let r = weil_height(&p).map_err(|e| e.to_string())?;
    let v = 3.0 * r.weil_height;
    if (0.2811..=0.2813).contains(&v) {
        Ok(format!("3 h(theta0) = {v:.6}"))
    } else {
        Err(format!("3 h(theta0) = {v}"))
    }
}

fn criterion_5() -> Outcome {
    const MAX_D: u64 = 200;
    let failures: Vec<String> = (4..=MAX_D)
        .into_par_iter()
        .flat_map_iter(|d| {
            let mut bad = Vec::new();
            for a in 1..d {
                for b in a + 1..d {
                    let g = gcd(gcd(a, b), d);
                    for c in b + 1..d {
                        if gcd(g, c) != 1 {
                            continue;
                        }
                        let tuple = ExponentTuple::new(vec![a, b, c, d]).unwrap();
                        let basis = match orthogonal_lattice(&tuple) {
                            Ok(b) => b,
                            Err(e) => {
                                bad.push(format!("{tuple}: {e}"));
                                continue;
                            }
                        };
                        if basis.gram_determinant() != basis.expected_covolume_squared() || !basis.is_orthogonal() {
                            bad.push(format!("{tuple}: covolume identity"));
                        }
                        if let Err(e) = minkowski_check(&basis) {
                            bad.push(format!("{tuple}: {e}"));
                        }
                    }
                }
            }
            bad
        })
        .collect();
    let total: u64 = (4..=MAX_D)
        .map(|d| {
            let mut k = 0;
            for a in 1..d {
                for b in a + 1..d {
                    let g = gcd(gcd(a, b), d);
                    k += (b + 1..d).filter(|&c| gcd(g, c) == 1).count() as u64;
                }
            }
            k
        })
        .sum();
    if failures.is_empty() {
        Ok(format!("{total} quadruples, zero violations"))
    } else {
        Err(format!("{} violations, first {}", failures.len(), failures[0]))
    }
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut anomalous = 0;
    for i in 0..200 {
        let tuple = if i % 2 == 0 {
            random_tuple(&mut rng, 3, 60)
        } else {
            random_tuple(&mut rng, 4, 40)
        };
        let cert = decide(&tuple).map_err(|e| e.to_string())?;
        let scan = root_scan(&tuple).map_err(|e| e.to_string())?;
        let a = agreement(&cert, &scan);
        if !a.holds() {
            return Err(format!("{tuple}: {a:?}"));
        }
        anomalous += usize::from(cert.anomalous);
    }
    if ExponentTuple::new(vec![2, 4, 6]).is_ok() {
        return Err("(2,4,6) accepted by the exact path".into());
    }
    let planted = ExponentTuple::non_primitive(vec![2, 4, 6]).map_err(|e| e.to_string())?;
    let scan = root_scan(&planted).map_err(|e| e.to_string())?;
    let minus_one = Complex64::new(-1.0, 0.0);
    if scan.candidates.len() != 1 || (scan.candidates[0].z - minus_one).norm() > 1e-9 {
        return Err(format!("planted scan: {:?}", scan.candidates));
    }
    Ok(format!("200 tuples agree ({anomalous} anomalous); planted (2,4,6) gives z = -1 and is rejected"))
}

fn det4(rows: &[u64], z: Complex64) -> Complex64 {
    let m = Matrix4::from_fn(|i, j| {
        let r = rows[i] as f64;
        match j {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(r, 0.0),
            2 => Complex64::new(r * r, 0.0),
            _ => z.powu(rows[i] as u32),
        }
    });
    m.determinant()
}

/// `V(p,q,t) - V(0,q,t) z^p + V(0,p,t) z^q - V(0,p,q) z^t`.
fn quadrinomial(p: u64, q: u64, t: u64) -> SparsePolynomial {
    let (p, q, t) = (p as i64, q as i64, t as i64);
    SparsePolynomial::from_terms([
        (0, BigInt::from((q - p) * (t - p) * (t - q))),
        (p as u64, BigInt::from(-(t * q * (t - q)))),
        (q as u64, BigInt::from(t * p * (t - p))),
        (t as u64, BigInt::from(-(q * p * (q - p)))),
    ])
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0f64;
    for _ in 0..50 {
        let tuple = random_tuple(&mut rng, 4, 60);
        let system = MinorSystem::build(&tuple);
        let rows = tuple.augmented_rows();
        for (omit, minor) in system.minors.iter().enumerate() {
            let kept: Vec<u64> = rows.iter().enumerate().filter(|&(i, _)| i != omit).map(|(_, &m)| m).collect();
            if omit != 0 {
                let shape = quadrinomial(kept[1], kept[2], kept[3]);
                let negated = shape.scalar_multiply(&BigInt::from(-1));
                if *minor != shape && *minor != negated {
                    return Err(format!("{tuple} minor {omit} is not the quadrinomial shape"));
                }
            }
            for _ in 0..10 {
                let z = Complex64::from_polar(rng.random_range(0.8..1.2), rng.random_range(0.0..std::f64::consts::TAU));
                let exact = minor.eval_complex(z);
                let direct = det4(&kept, z);
                let scale: f64 = minor
                    .terms()
                    .iter()
                    .map(|(e, c)| c.to_string().parse::<f64>().unwrap().abs() * z.norm().powi(*e as i32))
                    .sum();
                let rel = (exact - direct).norm() / scale;
                worst = worst.max(rel);
                if rel > 1e-10 {
                    return Err(format!("{tuple} minor {omit} at z = {z}: relative {rel:e}"));
                }
            }
        }
    }
    Ok(format!("50 quadruples, 250 minors, worst relative deviation {worst:.1e}"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let tuple = random_tuple(&mut rng, 4, 40);
        for h in [2u64, 3] {
            let check = scaling_transport(&tuple, h).map_err(|e| e.to_string())?;
            if check.factor != BigInt::from(h.pow(3)) || !check.holds() {
                return Err(format!("{tuple} h={h}: mismatched minors {:?}", check.mismatched));
            }
        }
    }
    Ok("20 quadruples, h in {2,3}, exact identity".into())
}

fn criterion_9(dir: &Path) -> Outcome {
    let full = dir.join("full.jsonl");
    let cut = dir.join("cut.jsonl");
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let base = ["search", "--n", "3", "--max-d", "30", "--workers", "2"];
    let run = |extra: &[&str]| {
        let mut args: Vec<&str> = base.to_vec();
        args.extend_from_slice(extra);
        nplet(&args).status.code()
    };
    if run(&["--out", &s(&full)]) != Some(0) {
        return Err("uninterrupted run failed".into());
    }
    if run(&["--out", &s(&cut), "--stop-after-batches", "1"]) != Some(0) {
        return Err("interrupted run failed".into());
    }
    // A write torn by the kill.
    let mut text = std::fs::read(&cut).map_err(|e| e.to_string())?;
    text.extend_from_slice(b"{\"n\":3,\"exponents\":[1,2");
    std::fs::write(&cut, text).map_err(|e| e.to_string())?;
    if run(&["--out", &s(&cut), "--resume"]) != Some(0) {
        return Err("resumed run failed".into());
    }
    let a = search::canonical_hash(&full).map_err(|e| e.to_string())?;
    let b = search::canonical_hash(&cut).map_err(|e| e.to_string())?;
    if a != b {
        return Err(format!("hash {a} vs {b}"));
    }
    if nplet(&["verify", &s(&cut)]).status.code() != Some(0) {
        return Err("resumed store does not verify".into());
    }
    Ok(format!("canonical hash {}", &a[..16]))
}

fn main() {
    let dir = tempfile::tempdir().expect("tempdir");
    let criteria: Vec<Criterion<'_>> = vec![
        ("triples c <= 60 are never anomalous", Box::new(|| criterion_1(dir.path()))),
        ("quadruple search d <= 40", Box::new(|| criterion_2(dir.path()))),
        ("threshold d* bracketed in (1e12, 1e13)", Box::new(criterion_3)),
        ("Smyth constant from z^3 - z - 1", Box::new(criterion_4)),
        ("Minkowski bound and covolume for d <= 200", Box::new(criterion_5)),
        ("oracle agrees with exact decision", Box::new(criterion_6)),
        ("quadrinomial minor shape", Box::new(criterion_7)),
        ("scaling covariance", Box::new(criterion_8)),
        ("resumed search hashes identically", Box::new(|| criterion_9(dir.path()))),
    ];
    let criteria: Vec<_> = criteria
        .into_iter()
        .enumerate()
        .map(|(i, (name, f))| (i + 1, name, f))
        .collect();
    let mut failed = 0;
    for (i, name, f) in &criteria {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {i}. {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {i}. {name}: {detail} ({secs:.1}s)");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
