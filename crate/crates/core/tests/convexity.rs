use lattice_hardy::convexity::{
    apriori_estimates, convexity_report, linear_stability, sample_series, unit_grid, CONVEXITY_TOLERANCE,
};
use lattice_hardy::evolve::{tight_kernel_cut, EvolutionConfig, FreeStep, Potential};
use lattice_hardy::weights::WeightSpec;
use lattice_hardy::{Error, Field, LatticeWindow};
use num_complex::Complex64 as C;

fn free_engine() -> EvolutionConfig {
    EvolutionConfig::convolution(1.0).with_kernel_cut(tight_kernel_cut(1.0).unwrap())
}

fn split_engine(dt: f64) -> EvolutionConfig {
    EvolutionConfig::split_step(dt)
        .with_free_step(FreeStep::Convolution)
        .with_padding(vec![tight_kernel_cut(1.0).unwrap()])
}

fn smoothed_delta(w: &LatticeWindow) -> Field {
    Field::from_fn(w.clone(), |s| {
        if s.iter().all(|c| c.abs() <= 3) {
            C::new((-(LatticeWindow::norm_sq(s) as f64)).exp(), 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    })
    .unwrap()
}

#[test]
fn zero_field_gives_sentinel_series() {
    let w = LatticeWindow::cube(1, 30).unwrap();
    let s = sample_series(&Field::zeros(w), &WeightSpec::Gaussian { lambda: 0.05 }, &unit_grid(11), &free_engine(), None)
        .unwrap();
    assert!(s.log_values.iter().all(|l| *l == f64::NEG_INFINITY));
    assert!(convexity_report(&s, CONVEXITY_TOLERANCE).unwrap().verdict);
}

#[test]
fn delta_with_inverse_bessel_weight_is_log_convex() {
    let w = LatticeWindow::cube(1, 30).unwrap();
    let f0 = Field::delta(w, [0, 0, 0]).unwrap();
    let s = sample_series(&f0, &WeightSpec::InverseBesselI { lambda: 0.1 }, &unit_grid(11), &free_engine(), None).unwrap();
    assert!(s.log_values.iter().all(|l| l.is_finite()));
    assert!(s.tail_certificates.iter().all(|c| *c <= 1e-12));
    assert!(convexity_report(&s, CONVEXITY_TOLERANCE).unwrap().verdict);
}

#[test]
fn gaussian_weight_smoothed_delta_is_log_convex() {
    for dim in [1, 2] {
        let w = LatticeWindow::cube(dim, 30).unwrap();
        let s = sample_series(&smoothed_delta(&w), &WeightSpec::Gaussian { lambda: 0.05 }, &unit_grid(21), &free_engine(), None)
            .unwrap();
        let r = convexity_report(&s, 1e-8).unwrap();
        assert!(r.verdict, "d = {dim}: {r:?}");
    }
}

#[test]
fn interpolation_bound_holds_literally() {
    let w = LatticeWindow::cube(2, 40).unwrap();
    let f0 = Field::random_compact(w, 4, 17).unwrap();
    for spec in [WeightSpec::InverseBesselI { lambda: 0.1 }, WeightSpec::BesselK { lambda: 0.1 }] {
        let s = sample_series(&f0, &spec, &unit_grid(21), &free_engine(), None).unwrap();
        let (l0, l1) = (s.log_values[0], s.log_values[20]);
        for (t, l) in s.times.iter().zip(&s.log_values) {
            assert!(*l <= (1.0 - t) * l0 + t * l1 + 1e-8 * l0.abs().max(1.0));
        }
    }
}

#[test]
fn verdicts_survive_grid_refinement() {
    let w = LatticeWindow::cube(1, 40).unwrap();
    let f0 = Field::random_compact(w, 4, 5).unwrap();
    for spec in [
        WeightSpec::InverseBesselI { lambda: 0.1 },
        WeightSpec::BesselK { lambda: 0.1 },
        WeightSpec::Gaussian { lambda: 0.05 },
    ] {
        let verdicts: Vec<bool> = [11, 21, 41]
            .iter()
            .map(|&n| {
                let s = sample_series(&f0, &spec, &unit_grid(n), &free_engine(), None).unwrap();
                convexity_report(&s, CONVEXITY_TOLERANCE).unwrap().verdict
            })
            .collect();
        assert!(verdicts.iter().all(|v| *v), "{spec:?}: {verdicts:?}");
    }
}

#[test]
fn bounded_potential_keeps_verdicts_in_one_dimension() {
    let w = LatticeWindow::cube(1, 40).unwrap();
    let f0 = Field::random_compact(w.clone(), 4, 8).unwrap();
    let v = Potential::random_smooth(2.0, 21);
    for spec in [
        WeightSpec::InverseBesselI { lambda: 0.1 },
        WeightSpec::BesselK { lambda: 0.1 },
        WeightSpec::Gaussian { lambda: 0.05 },
    ] {
        let s = sample_series(&f0, &spec, &unit_grid(21), &split_engine(1e-3), Some(&v)).unwrap();
        assert!(convexity_report(&s, CONVEXITY_TOLERANCE).unwrap().verdict, "{spec:?}");
    }
}

#[test]
fn small_window_fails_tail_certificate() {
    let w = LatticeWindow::cube(1, 8).unwrap();
    let f0 = Field::delta(w, [0, 0, 0]).unwrap();
    let cfg = EvolutionConfig::spectral(1.0);
    let err = sample_series(&f0, &WeightSpec::InverseBesselI { lambda: 0.1 }, &unit_grid(11), &cfg, None).unwrap_err();
    assert!(matches!(err, Error::TailCertificate { .. }));
    assert!(err.is_certification());
}

#[test]
fn apriori_zero_field() {
    let w = LatticeWindow::cube(1, 24).unwrap();
    let r = apriori_estimates(&Field::zeros(w), 0.05, &unit_grid(11), &free_engine(), None).unwrap();
    assert_eq!((r.lhs1, r.lhs2, r.fitted_c), (0.0, 0.0, 0.0));
}

#[test]
fn apriori_constant_is_stable() {
    let run = |n: usize, radius: usize| {
        let f0 = Field::delta(LatticeWindow::cube(1, radius).unwrap(), [0, 0, 0]).unwrap();
        apriori_estimates(&f0, 0.05, &unit_grid(n), &free_engine(), None).unwrap().fitted_c
    };
    let base = run(21, 24);
    assert!(base.is_finite() && base > 0.0);
    for c in [run(41, 24), run(21, 48)] {
        assert!((c / base - 1.0).abs() <= 0.2, "{base} vs {c}");
    }
}

#[test]
fn linear_weight_stability_constant_is_dt_stable() {
    let c0 = |dt: f64| {
        let mut c = f64::NEG_INFINITY;
        for seed in 0..3u64 {
            let f0 = Field::random_compact(LatticeWindow::cube(1, 30).unwrap(), 4, seed).unwrap();
            let v = Potential::random_smooth(2.0, 50 + seed);
            for beta in [-1.0, -0.5, 0.5, 1.0] {
                let s = linear_stability(&f0, &[beta], &unit_grid(21), &split_engine(dt), Some(&v)).unwrap();
                c = c.max(s.c0.unwrap());
            }
        }
        c
    };
    let (a, b) = (c0(2e-3), c0(1e-3));
    assert!(a.is_finite() && b.is_finite());
    assert!((a - b).abs() <= 0.5 * a.abs().max(b.abs()).max(1e-3), "{a} vs {b}");
}
