use std::path::PathBuf;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uc_core::system::{compute_ptdf, evaluate_flows, load_system, PowerSystem};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).join("system.json")
}

/// Solves the reduced B-theta system by conjugate gradients and returns line flows.
fn b_theta_flows(sys: &PowerSystem, inj: &[f64]) -> Vec<f64> {
    let n = sys.buses.len();
    let s = sys.slack;
    let apply = |theta: &[f64]| {
        let mut out = vec![0.0; n];
        for l in &sys.lines {
            let f = (theta[l.from] - theta[l.to]) / l.reactance;
            out[l.from] += f;
            out[l.to] -= f;
        }
        out[s] = 0.0;
        out
    };
    let mut b = inj.to_vec();
    b[s] = 0.0;
    let mut x = vec![0.0; n];
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr: f64 = r.iter().map(|v| v * v).sum();
    for _ in 0..10 * n {
        if rr.sqrt() < 1e-14 {
            break;
        }
        let ap = apply(&p);
        let alpha = rr / p.iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let next: f64 = r.iter().map(|v| v * v).sum();
        for i in 0..n {
            p[i] = r[i] + next / rr * p[i];
        }
        rr = next;
    }
    sys.lines.iter().map(|l| (x[l.from] - x[l.to]) / l.reactance).collect()
}

fn balanced(rng: &mut ChaCha8Rng, n: usize, slack: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-100.0..100.0)).collect();
    let sum: f64 = v.iter().sum();
    v[slack] -= sum;
    v
}

#[test]
fn two_bus_fixture_loads() {
    let s = load_system(&fixture("two_bus")).unwrap();
    assert_eq!(s.lines.len(), 1);
    assert_eq!(s.buses[s.slack].id, "1");
    assert_eq!(s.horizon(), 3);
}

#[test]
fn six_bus_fixture_loads() {
    let s = load_system(&fixture("six_bus")).unwrap();
    assert_eq!(s.lines.len(), 7);
    assert_eq!(s.wind_farms.len(), 1);
    assert_eq!(s.generators.len(), 3);
    assert_eq!(s.horizon(), 24);
}

#[test]
fn ptdf_matches_b_theta_oracle() {
    let s = load_system(&fixture("six_bus")).unwrap();
    let ptdf = compute_ptdf(&s, s.slack).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let inj = balanced(&mut rng, s.buses.len(), s.slack);
        let got = evaluate_flows(&ptdf, &inj);
        let want = b_theta_flows(&s, &inj);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-8, "{g} vs {w}");
        }
    }
}

#[test]
fn slack_column_is_zero_and_flows_conserve() {
    let s = load_system(&fixture("six_bus")).unwrap();
    let ptdf = compute_ptdf(&s, s.slack).unwrap();
    assert!(ptdf.rows.iter().all(|r| r[s.slack] == 0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let inj = balanced(&mut rng, s.buses.len(), s.slack);
        let flows = evaluate_flows(&ptdf, &inj);
        let mut net = vec![0.0; s.buses.len()];
        for (l, f) in s.lines.iter().zip(&flows) {
            net[l.from] += f;
            net[l.to] -= f;
        }
        for b in 0..s.buses.len() {
            if b != s.slack {
                assert!((net[b] - inj[b]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["two_bus", "six_bus", "scarcity_week"] {
        let s = load_system(&fixture(name)).unwrap();
        let out = dir.path().join(name);
        let path = s.save(&out).unwrap();
        let back = load_system(&path).unwrap();
        assert_eq!(back.to_file().buses, s.buses);
        assert_eq!(back.lines, s.lines);
        assert_eq!(back.generators, s.generators);
        assert_eq!(back.wind_farms, s.wind_farms);
        assert_eq!(back.load, s.load);
        let again = back.save(&dir.path().join(format!("{name}-2"))).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    }
}

#[test]
fn missing_load_file_reported() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("two_bus")).unwrap();
    let path = dir.path().join("system.json");
    std::fs::write(&path, text).unwrap();
    let err = load_system(&path).unwrap_err().to_string();
    assert!(err.contains("load.csv"), "{err}");
}

#[test]
fn horizon_mismatch_reported() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("two_bus"), dir.path().join("system.json")).unwrap();
    std::fs::write(dir.path().join("load.csv"), "hour,2\n1,5\n3,5\n").unwrap();
    assert!(load_system(&dir.path().join("system.json")).is_err());
}

proptest! {
    #[test]
    fn flows_are_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, seed in 0u64..1000) {
        let s = load_system(&fixture("six_bus")).unwrap();
        let ptdf = compute_ptdf(&s, s.slack).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n1 = balanced(&mut rng, 6, s.slack);
        let n2 = balanced(&mut rng, 6, s.slack);
        let mix: Vec<f64> = n1.iter().zip(&n2).map(|(x, y)| a * x + b * y).collect();
        let f1 = evaluate_flows(&ptdf, &n1);
        let f2 = evaluate_flows(&ptdf, &n2);
        let fm = evaluate_flows(&ptdf, &mix);
        for l in 0..fm.len() {
            prop_assert!((fm[l] - (a * f1[l] + b * f2[l])).abs() < 1e-9);
        }
    }
}
