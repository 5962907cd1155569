use nplet_core::lattice::{l1_norm, minkowski_check, orthogonal_lattice};
use nplet_core::ExponentTuple;

/// Every nonzero orthogonal vector with L1 norm at most `r`, by direct scan
/// of the first three coordinates.
fn short_vectors(a: &[u64; 4], r: i64) -> Vec<[i64; 4]> {
    let mut out = Vec::new();
    for x1 in -r..=r {
        let r1 = r - x1.abs();
        for x2 in -r1..=r1 {
            let r2 = r1 - x2.abs();
            for x3 in -r2..=r2 {
                let s = a[0] as i64 * x1 + a[1] as i64 * x2 + a[2] as i64 * x3;
                if s % a[3] as i64 != 0 {
                    continue;
                }
                let x4 = -s / a[3] as i64;
                let v = [x1, x2, x3, x4];
                if v != [0; 4] && l1_norm(&v) as i64 <= r {
                    out.push(v);
                }
            }
        }
    }
    out
}

fn independent(u: &[i64], v: &[i64]) -> bool {
    (0..4).any(|i| (0..4).any(|j| u[i] * v[j] != u[j] * v[i]))
}

#[test]
fn minima_match_direct_scan() {
    let mut checked = 0;
    for d in 4..=30u64 {
        for c in 3..d {
            for b in 2..c {
                for a in 1..b {
                    let Ok(t) = ExponentTuple::new(vec![a, b, c, d]) else { continue };
                    let basis = orthogonal_lattice(&t).unwrap();
                    assert_eq!(basis.gram_determinant(), basis.expected_covolume_squared());
                    assert!(basis.is_orthogonal());
                    minkowski_check(&basis).unwrap();
                    let r = basis.norms[1].l1 as i64;
                    let vs = short_vectors(&[a, b, c, d], r);
                    let m1 = vs.iter().map(|v| l1_norm(v)).min().unwrap();
                    assert_eq!(basis.norms[0].l1, m1, "{t}");
                    let m2 = vs
                        .iter()
                        .filter(|v| independent(v.as_slice(), &basis.vectors[0]))
                        .map(|v| l1_norm(v))
                        .min()
                        .unwrap();
                    assert_eq!(basis.norms[1].l1, m2, "{t}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 20_000);
}
