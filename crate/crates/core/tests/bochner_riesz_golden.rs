//! Bochner-Riesz Hankel transforms against values computed independently
//! with arbitrary-precision quadrature.

use dunklkit::multiplicity::make_multiplicity;
use dunklkit::summability::{bochner_riesz_constant, bochner_riesz_bessel_form, bochner_riesz_hankel, fit_bochner_riesz_constant};

struct Row {
    d: usize,
    kappa: Vec<f64>,
    delta: f64,
    s: f64,
    hankel: f64,
    constant: f64,
}

fn rows() -> Vec<Row> {
    include_str!("data/bochner_riesz_golden.csv")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            Row {
                d: c[0].parse().unwrap(),
                kappa: c[1].split(';').map(|k| k.parse().unwrap()).collect(),
                delta: c[2].parse().unwrap(),
                s: c[3].parse().unwrap(),
                hankel: c[4].parse().unwrap(),
                constant: c[5].parse().unwrap(),
            }
        })
        .collect()
}

#[test]
fn hankel_values_match_golden() {
    let rows = rows();
    assert_eq!(rows.len(), 18);
    for r in &rows {
        let m = make_multiplicity(r.d, &r.kappa).unwrap();
        let got = bochner_riesz_hankel(&m, r.delta, &[r.s], 120).unwrap()[0];
        assert!((got - r.hankel).abs() <= 1e-11 * (1.0 + r.hankel.abs()), "d={} κ={:?} δ={} s={}: {got} vs {}", r.d, r.kappa, r.delta, r.s, r.hankel);
        let ratio = got / bochner_riesz_bessel_form(&m, r.delta, r.s).unwrap();
        assert!((ratio - r.constant).abs() <= 1e-9 * r.constant, "{ratio} vs {}", r.constant);
    }
}

#[test]
fn fitted_constant_is_shape_independent() {
    for r in rows() {
        let m = make_multiplicity(r.d, &r.kappa).unwrap();
        let fit = fit_bochner_riesz_constant(&m, r.delta).unwrap();
        assert!(fit.spread < 1e-10);
        assert!((fit.constant - r.constant).abs() <= 1e-9 * r.constant);
        // the profile constant times 2^{-λ}
        let expected = bochner_riesz_constant(r.delta).unwrap() * 2f64.powf(-m.lambda_k);
        assert!((fit.constant - expected).abs() <= 1e-10 * expected);
    }
}
