//! Reference curve checked against a 50-digit evaluation of the closed forms
//! (`oracle/zipf_mpmath.py` regenerates the table).

use cred_core::{zipf_reference, ZipfParams};

const TABLE: &str = include_str!("oracle/zipf_reference.tsv");

fn rows() -> Vec<(usize, usize, f64)> {
    TABLE
        .lines()
        .skip(1)
        .map(|line| {
            let mut f = line.split('\t');
            let n = f.next().unwrap().parse().unwrap();
            let r = f.next().unwrap().parse().unwrap();
            let v = f.next().unwrap().parse().unwrap();
            (n, r, v)
        })
        .collect()
}

#[test]
fn table_covers_the_checked_range() {
    let rows = rows();
    assert_eq!(rows.len(), 1400);
    assert!((1..=10).all(|n| rows.iter().any(|r| r.0 == n && r.1 == 10_000)));
}

#[test]
fn curve_matches_high_precision_values() {
    let rows = rows();
    for n in 1..=10 {
        let curve = zipf_reference(n, 10_000).unwrap();
        for &(_, r, expected) in rows.iter().filter(|row| row.0 == n) {
            let got = curve[r - 1];
            let rel = ((got - expected) / expected).abs();
            assert!(rel < 1e-9, "n={n} r={r}: {got} vs {expected} (rel {rel:e})");
            assert_eq!(got, ZipfParams::default().frequency(n as f64, r as f64));
        }
    }
}

#[test]
fn strictly_decreasing_in_rank() {
    for n in 1..=10 {
        let curve = zipf_reference(n, 100_000).unwrap();
        assert!(curve.windows(2).all(|w| w[1] < w[0]), "n={n}");
    }
}

#[test]
fn exponent_decays_toward_its_floor() {
    let p = ZipfParams::default();
    assert!(p.exponent(1.0) > p.exponent(100.0));
    assert!(p.exponent(100.0) > 0.527);
    assert!((p.exponent(1e9) - 0.527).abs() < 1e-9);
}
