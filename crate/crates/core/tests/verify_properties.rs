use std::f64::consts::{FRAC_PI_3, TAU};

use berger_helix::verify::{curvature_residual, run_all, shape_operator_residuals, VerifyConfig};
use berger_helix::{BergerParams, HelixSurface, OrthoFamily, XiProfile};

fn surface(eps: f64, theta: f64, v_min: f64) -> HelixSurface {
    let p = BergerParams::new(eps, theta).unwrap();
    HelixSurface::new(p, OrthoFamily::new(XiProfile::example(v_min, v_min + TAU).unwrap()))
}

#[test]
fn curvature_converges_at_second_order() {
    for (eps, theta) in [(0.5, FRAC_PI_3), (1.5, 0.5), (0.8, 1.1)] {
        let s = surface(eps, theta, 0.0);
        let coarse = curvature_residual(&s, 1e-2).unwrap();
        let fine = curvature_residual(&s, 5e-3).unwrap();
        assert!(coarse / fine >= 3.0, "({eps},{theta}): {coarse:e} -> {fine:e}");
    }
}

#[test]
fn shape_operator_converges_at_second_order() {
    for (eps, theta) in [(0.5, FRAC_PI_3), (1.5, 0.5), (0.8, 1.1)] {
        let s = surface(eps, theta, 0.0);
        let (coarse, coarse_conn, _) = shape_operator_residuals(&s, 1e-2).unwrap();
        let (fine, fine_conn, _) = shape_operator_residuals(&s, 5e-3).unwrap();
        assert!(coarse / fine >= 3.0, "({eps},{theta}): {coarse:e} -> {fine:e}");
        assert!(coarse_conn / fine_conn >= 3.0, "({eps},{theta}): {coarse_conn:e} -> {fine_conn:e}");
    }
}

#[test]
fn reports_are_byte_identical() {
    let cfg = VerifyConfig { samples: 300, angle_grid: (51, 51), ..VerifyConfig::default() };
    let s = surface(1.2, 0.9, 0.0);
    assert_eq!(run_all(&s, &cfg).to_json(), run_all(&s, &cfg).to_json());
}

#[test]
fn angle_sweep_is_translation_invariant() {
    // Shifting the profile by c and the domain with it reproduces the same surface samples.
    let cfg = VerifyConfig { samples: 100, angle_grid: (61, 61), ..VerifyConfig::default() };
    let base = surface(0.8, 0.7, 0.0);
    let base_grid = base.sample_grid(61, 61).unwrap();
    let (base_dev, _) = base_grid.max_angle_deviation(0.7).unwrap();
    for shift in [0.5, -1.75, 3.0] {
        let p = BergerParams::new(0.8, 0.7).unwrap();
        let profile = XiProfile::example(0.0, TAU).unwrap().shifted(shift);
        let shifted = HelixSurface::new(p, OrthoFamily::new(profile));
        assert_eq!(shifted.v_range(), (shift, TAU + shift));
        let g = shifted.sample_grid(61, 61).unwrap();
        // Deviations sit at roundoff, so the argmax itself is noise; compare magnitudes.
        let (dev, _) = g.max_angle_deviation(0.7).unwrap();
        assert!((dev - base_dev).abs() < 1e-12, "{dev:e} vs {base_dev:e}");
        assert_eq!(g.defects.len(), base_grid.defects.len());
        for (a, b) in g.samples.iter().zip(&base_grid.samples) {
            assert!((a.position - b.position).max_abs() < 1e-12);
        }
        assert!(run_all(&shifted, &cfg).overall_pass);
    }
}
