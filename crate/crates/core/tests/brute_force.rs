//! Exact truncated enumeration of Poisson outcomes as an independent check
//! on the closed-form moments. The oracle multiplies out probability mass
//! term by term and never touches the implementation's formulas.

use num_complex::Complex64;
use proptest::prelude::*;
use tubescatter::statistics::{Ensemble, Species};

/// Accumulated oracle moments plus the probability mass actually covered.
struct Enumerated {
    amplitude: Complex64,
    rate: f64,
    mass: f64,
    mean_a: f64,
    mean_b: f64,
    cross_ab: f64,
}

/// Enumerate all species-count tuples with total count `<= budget`.
fn enumerate(ensemble: &Ensemble, weights: &[Complex64], budget: u64) -> Enumerated {
    let species: Vec<(Complex64, f64, f64, f64)> = ensemble
        .species()
        .iter()
        .map(|s| {
            let w: Complex64 = s
                .composition()
                .iter()
                .zip(weights)
                .map(|(&c, g)| g * f64::from(c))
                .sum();
            let a = f64::from(s.composition()[0]);
            let b = if ensemble.tube_count() > 1 {
                f64::from(s.composition()[1])
            } else {
                0.0
            };
            (w, s.mean_count(), a, b)
        })
        .collect();
    let mut acc = Enumerated {
        amplitude: Complex64::new(0.0, 0.0),
        rate: 0.0,
        mass: 0.0,
        mean_a: 0.0,
        mean_b: 0.0,
        cross_ab: 0.0,
    };
    recurse(
        &species,
        budget,
        1.0,
        Complex64::new(0.0, 0.0),
        0.0,
        0.0,
        &mut acc,
    );
    acc
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    species: &[(Complex64, f64, f64, f64)],
    budget: u64,
    prob: f64,
    amplitude: Complex64,
    n_a: f64,
    n_b: f64,
    acc: &mut Enumerated,
) {
    match species.split_first() {
        None => {
            acc.amplitude += prob * amplitude;
            acc.rate += prob * amplitude.norm_sqr();
            acc.mass += prob;
            acc.mean_a += prob * n_a;
            acc.mean_b += prob * n_b;
            acc.cross_ab += prob * n_a * n_b;
        }
        Some((&(w, lambda, ca, cb), rest)) => {
            let mut pmf = (-lambda).exp();
            for m in 0..=budget {
                let mf = m as f64;
                if m > 0 {
                    pmf *= lambda / mf;
                }
                recurse(
                    rest,
                    budget - m,
                    prob * pmf,
                    amplitude + w * mf,
                    n_a + ca * mf,
                    n_b + cb * mf,
                    acc,
                );
            }
        }
    }
}

fn check_against_enumeration(ensemble: &Ensemble, weights: &[Complex64]) {
    let oracle = enumerate(ensemble, weights, 60);
    assert!(
        oracle.mass > 1.0 - 1e-12,
        "truncation left {} mass uncovered",
        1.0 - oracle.mass
    );
    let report = ensemble.intensity(weights).unwrap();
    assert!(
        (report.photon_rate - oracle.rate).abs() < 1e-9,
        "photon rate {} vs enumerated {}",
        report.photon_rate,
        oracle.rate
    );
    assert!(
        (report.amplitude_mean - oracle.amplitude).norm() < 1e-9,
        "amplitude {} vs enumerated {}",
        report.amplitude_mean,
        oracle.amplitude
    );
}

#[test]
fn dimer_stage_matches_enumeration() {
    let e = Ensemble::new(2, vec![Species::new("dimer", vec![1, 1], 3.0).unwrap()]).unwrap();
    check_against_enumeration(&e, &[Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
}

#[test]
fn trimer_mid_stage_matches_enumeration() {
    let e = Ensemble::new(
        2,
        vec![
            Species::new("dimer", vec![1, 1], 2.0).unwrap(),
            Species::new("free_b", vec![0, 1], 2.0).unwrap(),
        ],
    )
    .unwrap();
    check_against_enumeration(&e, &[Complex64::new(1.0, 0.0), Complex64::new(-0.5, 0.0)]);
}

// Dimer counts couple the tubes: Cov(A, B) equals the mean pair number.
#[test]
fn dimer_covariance_matches_enumeration() {
    let n = 2.5;
    let e = Ensemble::new(2, vec![Species::new("dimer", vec![1, 1], n).unwrap()]).unwrap();
    let oracle = enumerate(&e, &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)], 60);
    let cov = oracle.cross_ab - oracle.mean_a * oracle.mean_b;
    assert!((cov - n).abs() < 1e-9, "enumerated covariance {cov}");
    assert!((e.number_covariance(0, 1) - cov).abs() < 1e-9);
}

#[test]
fn independent_species_covariance_vanishes() {
    let e = Ensemble::new(
        2,
        vec![
            Species::new("free_a", vec![1, 0], 2.0).unwrap(),
            Species::new("free_b", vec![0, 1], 3.0).unwrap(),
        ],
    )
    .unwrap();
    let oracle = enumerate(&e, &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)], 60);
    let cov = oracle.cross_ab - oracle.mean_a * oracle.mean_b;
    assert!(cov.abs() < 1e-9);
    assert_eq!(e.number_covariance(0, 1), 0.0);
}

fn small_species(tubes: usize) -> impl Strategy<Value = Species> {
    (
        proptest::collection::vec(0u32..=3, tubes),
        0.0f64..=3.0,
    )
        .prop_filter_map("composition must be nonzero", |(comp, lambda)| {
            Species::new("s", comp, lambda).ok()
        })
}

fn small_ensemble() -> impl Strategy<Value = Ensemble> {
    (1usize..=3).prop_flat_map(|tubes| {
        proptest::collection::vec(small_species(tubes), 1..=3)
            .prop_map(move |species| Ensemble::new(tubes, species).unwrap())
    })
}

fn weight() -> impl Strategy<Value = Complex64> {
    (-2.0f64..=2.0, -2.0f64..=2.0).prop_map(|(re, im)| Complex64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_small_ensembles_match_enumeration(
        ensemble in small_ensemble(),
        weights in proptest::collection::vec(weight(), 3),
    ) {
        check_against_enumeration(&ensemble, &weights[..ensemble.tube_count()]);
    }
}
