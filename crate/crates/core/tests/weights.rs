use lattice_hardy::specfun::{bessel_i, bessel_k};
use lattice_hardy::weights::{
    log_weight, tail_mass, tail_ratio, weighted_norm_sq, WeightSpec, WeightTable, WeightedNorm,
};
use lattice_hardy::{Error, Field, LatticeWindow};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn all_specs(dim: usize) -> Vec<WeightSpec> {
    vec![
        WeightSpec::InverseBesselI { lambda: 0.1 },
        WeightSpec::BesselK { lambda: 0.2 },
        WeightSpec::Gaussian { lambda: 0.05 },
        WeightSpec::Linear { beta: vec![0.7; dim] },
        WeightSpec::Carleman { mu: 0.6, eps: 0.1, r: 50.0, t: 0.3 },
    ]
}

#[test]
fn closed_form_examples() {
    assert!((log_weight(&WeightSpec::Gaussian { lambda: 0.3 }, &[2, -1, 0]).unwrap() - 1.5).abs() < 1e-15);
    assert!((log_weight(&WeightSpec::Linear { beta: vec![0.7] }, &[3, 0, 0]).unwrap() - 2.1).abs() < 1e-15);
    let (mu, eps, r, t) = (0.6, 0.1, 50.0, 0.3);
    let s = r * t * (1.0 - t);
    let spec = WeightSpec::Carleman { mu, eps, r, t };
    let w = log_weight(&spec, &[-(s as i64), 0, 0]).unwrap();
    let frac = s - s.trunc();
    let want = mu * frac * frac - (1.0 + eps) * r * r * t * (1.0 - t) / (16.0 * mu);
    assert!((w - want).abs() < 1e-12 * want.abs());
}

#[test]
fn bessel_weights_match_scalar_functions() {
    let w = LatticeWindow::cube(2, 12).unwrap();
    let inv = WeightTable::new(&WeightSpec::InverseBesselI { lambda: 0.25 }, &w).unwrap();
    let k = WeightTable::new(&WeightSpec::BesselK { lambda: 0.25 }, &w).unwrap();
    for s in [[0, 0, 0], [3, -7, 0], [-12, 12, 0]] {
        let want_i = -(bessel_i(s[0], 2.0).unwrap().log_value + bessel_i(s[1], 2.0).unwrap().log_value);
        let want_k = bessel_k(s[0], 2.0).unwrap().log_value + bessel_k(s[1], 2.0).unwrap().log_value;
        assert!((inv.get(&s).unwrap() - want_i).abs() < 1e-13 * want_i.abs().max(1.0));
        assert!((k.get(&s).unwrap() - want_k).abs() < 1e-13 * want_k.abs().max(1.0));
    }
}

#[test]
fn norm_examples() {
    let w = LatticeWindow::cube(1, 5).unwrap();
    let g = WeightSpec::Gaussian { lambda: 0.2 };
    let z = weighted_norm_sq(&Field::zeros(w.clone()), &g).unwrap();
    assert_eq!(z, WeightedNorm::ZERO);
    assert!((weighted_norm_sq(&Field::delta(w.clone(), [0, 0, 0]).unwrap(), &g).unwrap().log_value).abs() < 1e-15);
    let n = weighted_norm_sq(&Field::delta(w, [3, 0, 0]).unwrap(), &g).unwrap();
    assert!((n.value.unwrap() - 3.6f64.exp()).abs() < 1e-14 * 3.6f64.exp());
}

#[test]
fn huge_norms_stay_in_log_domain() {
    let w = LatticeWindow::cube(1, 60).unwrap();
    let f = Field::delta(w, [60, 0, 0]).unwrap();
    let n = weighted_norm_sq(&f, &WeightSpec::Gaussian { lambda: 1.0 }).unwrap();
    assert_eq!(n.value, None);
    assert!((n.log_value - 7200.0).abs() < 1e-9);
}

#[test]
fn weight_dimension_mismatch_is_rejected() {
    let w = LatticeWindow::cube(2, 3).unwrap();
    let err = WeightTable::new(&WeightSpec::Linear { beta: vec![1.0] }, &w).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
    assert!(WeightTable::new(&WeightSpec::Gaussian { lambda: -1.0 }, &w).is_err());
}

#[test]
fn tail_mass_examples() {
    let w = LatticeWindow::cube(1, 20).unwrap();
    let g = WeightSpec::Gaussian { lambda: 0.01 };
    let inside = Field::random_compact(w.clone(), 5, 3).unwrap();
    assert!(tail_mass(&inside, &g, 5).unwrap().is_zero());
    let edge = Field::delta(w.clone(), [20, 0, 0]).unwrap();
    assert_eq!(tail_mass(&edge, &g, 10).unwrap(), weighted_norm_sq(&edge, &g).unwrap());
    assert!(tail_mass(&edge, &g, 20).is_err());

    let profile = Field::from_fn(w, |s| C::new((-0.1 * (s[0] * s[0]) as f64).exp(), 0.0)).unwrap();
    let tails: Vec<f64> = (0..20).map(|r| tail_mass(&profile, &g, r).unwrap().log_value).collect();
    assert!(tails.windows(2).all(|p| p[1] <= p[0]));
    let total = weighted_norm_sq(&profile, &g).unwrap();
    assert!(tail_ratio(tail_mass(&profile, &g, 19).unwrap(), total) < 1e-12);
}

#[test]
fn bessel_weights_dominate_every_linear_weight() {
    let radius = 5000i64;
    let w = LatticeWindow::cube(1, radius as usize).unwrap();
    for spec in [WeightSpec::InverseBesselI { lambda: 0.1 }, WeightSpec::BesselK { lambda: 0.1 }] {
        let table = WeightTable::new(&spec, &w).unwrap();
        for beta in [0.5, 1.0, 2.0, 5.0] {
            // Smallest J beyond which the Bessel log-weight exceeds β|j| on the window.
            let last_fail = (1..=radius).rev().find(|&j| table.get(&[j, 0, 0]).unwrap() <= beta * j as f64);
            assert!(last_fail.is_none_or(|j| j < radius / 2), "{spec:?}, beta {beta}: {last_fail:?}");
        }
    }
}

#[test]
fn weight_spec_json_round_trip() {
    for spec in all_specs(2) {
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<WeightSpec>(&text).unwrap(), spec);
    }
    let c: WeightSpec = serde_json::from_str(r#"{"family":"carleman","mu":1.0,"eps":0.1,"R":50.0,"t":0.5}"#).unwrap();
    assert_eq!(c, WeightSpec::Carleman { mu: 1.0, eps: 0.1, r: 50.0, t: 0.5 });
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn log_sum_exp_matches_direct_sum(seed in any::<u64>(), which in 0usize..5) {
        let w = LatticeWindow::cube(2, 8).unwrap();
        let f = Field::random_compact(w.clone(), 6, seed).unwrap();
        let spec = all_specs(2)[which].clone();
        let table = WeightTable::new(&spec, &w).unwrap();
        let direct: f64 = f.values().iter().zip(table.log_weights()).map(|(v, lw)| (2.0 * lw).exp() * v.norm_sqr()).sum();
        let n = weighted_norm_sq(&f, &spec).unwrap();
        prop_assert!((n.value.unwrap() - direct).abs() <= 1e-12 * direct);
    }

    #[test]
    fn carleman_weight_symmetric_in_time(j in -50i64..50, t in 0.0f64..1.0) {
        let a = log_weight(&WeightSpec::Carleman { mu: 0.6, eps: 0.1, r: 100.0, t }, &[j, 2, 0]).unwrap();
        let b = log_weight(&WeightSpec::Carleman { mu: 0.6, eps: 0.1, r: 100.0, t: 1.0 - t }, &[j, 2, 0]).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }
}
