//! Functionals against independently derived values.

use std::f64::consts::PI;

use wigner_bounds::functionals::{descent_moments, entropy, power_moment, purity, variance_of_x};
use wigner_bounds::states::*;
use wigner_bounds::{assess, check_constraints, entropy_target, PhasePoint, QuadratureConfig, WignerDensity};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn numeric() -> QuadratureConfig {
    QuadratureConfig::default().numeric_only()
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn builtins() -> Vec<WignerDensity> {
    vec![
        make_vacuum(),
        make_squeezed_vacuum(0.5).unwrap(),
        make_squeezed_vacuum(-1.2).unwrap(),
        make_thermal(0.5).unwrap(),
        make_thermal(3.0).unwrap(),
        make_coherent_mixture(&[0.3, 0.7], &[PhasePoint::new(-1.0, 0.5), PhasePoint::new(1.0, 0.0)]).unwrap(),
        make_coherent_mixture(&[0.5, 0.5], &[PhasePoint::ORIGIN, PhasePoint::ORIGIN]).unwrap(),
        make_fock01_mixture(0.25).unwrap(),
        make_fock01_mixture(0.5).unwrap(),
        make_flat_top(0.6).unwrap(),
        make_flat_top(2.0 / std::f64::consts::E).unwrap(),
    ]
}

#[test]
fn vacuum_descent_moments_are_reciprocals() {
    let m = descent_moments(&make_vacuum(), 16, &numeric()).unwrap();
    for k in 1..=16 {
        assert!((m.get(k) - 1.0 / (k as f64 + 1.0)).abs() < 1e-10, "m_{k} = {}", m.get(k));
    }
}

#[test]
fn vacuum_cubic_moment_and_variance() {
    let w3 = power_moment(&make_vacuum(), 3, &numeric()).unwrap();
    assert!((w3.value - 1.0 / (3.0 * PI * PI)).abs() < 1e-10);
    let v = variance_of_x(&make_vacuum(), &numeric()).unwrap();
    assert!((v.value - 1.0 / 12.0).abs() < 1e-9);
}

#[test]
fn thermal_entropy_and_purity() {
    for nbar in [0.25, 1.0, 4.0] {
        let s = 2.0 * nbar + 1.0;
        let d = make_thermal(nbar).unwrap();
        let e = entropy(&d, &numeric()).unwrap();
        assert!((e.value - (1.0 + PI.ln() + s.ln())).abs() < 1e-8, "nbar={nbar}");
        let mu = purity(&d, &numeric()).unwrap();
        assert!((mu.value - 1.0 / s).abs() < 1e-9);
        let v = variance_of_x(&d, &numeric()).unwrap();
        assert!((v.value - 1.0 / (12.0 * s * s)).abs() < 1e-9);
    }
}

#[test]
fn fock_half_entropy_from_gamma_law() {
    // W = u e^{-u} / π with u = r²; u ~ Gamma(2) gives S = 1 + γ + ln π.
    let d = make_fock01_mixture(0.5).unwrap();
    let e = entropy(&d, &numeric()).unwrap();
    assert!((e.value - (1.0 + EULER_GAMMA + PI.ln())).abs() < 1e-8, "S = {}", e.value);
    let mu = purity(&d, &numeric()).unwrap();
    assert!((mu.value - 0.5).abs() < 1e-9);
    assert!(e.value > entropy_target());
}

#[test]
fn fock_purity_formula() {
    for p in [0.1, 0.25, 0.4] {
        let mu = purity(&make_fock01_mixture(p).unwrap(), &numeric()).unwrap();
        assert!((mu.value - (p * p + (1.0 - p) * (1.0 - p))).abs() < 1e-9, "p={p}");
    }
}

#[test]
fn binomial_identity_on_builtins() {
    for cfg in [QuadratureConfig::default(), numeric()] {
        for d in builtins() {
            let m = descent_moments(&d, 4, &cfg).unwrap();
            for k in 1..=4u32 {
                let mut rhs = 0.0;
                for j in 0..=k {
                    let w = power_moment(&d, j + 1, &cfg).unwrap().value;
                    rhs += binomial(k, j) * (-PI).powi(j as i32) * w;
                }
                assert!(
                    (m.get(k as usize) - rhs).abs() < 1e-8,
                    "{} k={k}: {} vs {rhs}",
                    d.label(),
                    m.get(k as usize)
                );
            }
        }
    }
}

#[test]
fn closed_forms_match_quadrature() {
    for d in builtins() {
        let cf = QuadratureConfig::default();
        let nq = numeric();
        let a = purity(&d, &cf).unwrap().value;
        let b = purity(&d, &nq).unwrap().value;
        assert!((a - b).abs() < 1e-7, "{} purity {a} vs {b}", d.label());
        if d.closed_forms().entropy.is_some() {
            let a = entropy(&d, &cf).unwrap().value;
            let b = entropy(&d, &nq).unwrap().value;
            assert!((a - b).abs() < 1e-7, "{} entropy {a} vs {b}", d.label());
        }
        if d.closed_forms().variance_x.is_some() {
            let a = variance_of_x(&d, &cf).unwrap().value;
            let b = variance_of_x(&d, &nq).unwrap().value;
            assert!((a - b).abs() < 1e-7, "{} variance {a} vs {b}", d.label());
        }
    }
}

#[test]
fn rotation_leaves_functionals_unchanged() {
    let base = make_coherent_mixture(&[0.4, 0.6], &[PhasePoint::new(1.5, 0.0), PhasePoint::new(-0.5, 0.8)]).unwrap();
    let rotated_centers: Vec<PhasePoint> = [PhasePoint::new(1.5, 0.0), PhasePoint::new(-0.5, 0.8)]
        .iter()
        .map(|c| c.rotated(0.9))
        .collect();
    let rotated = make_coherent_mixture(&[0.4, 0.6], &rotated_centers).unwrap();
    let cfg = numeric();
    for (a, b) in [
        (entropy(&base, &cfg).unwrap().value, entropy(&rotated, &cfg).unwrap().value),
        (purity(&base, &cfg).unwrap().value, purity(&rotated, &cfg).unwrap().value),
        (
            variance_of_x(&base, &cfg).unwrap().value,
            variance_of_x(&rotated, &cfg).unwrap().value,
        ),
    ] {
        assert!((a - b).abs() < 1e-7, "{a} vs {b}");
    }
}

#[test]
fn flat_top_quadrature() {
    for mu in [0.3, 0.6, 1.0, 2.0] {
        let d = make_flat_top(mu).unwrap();
        let p = purity(&d, &numeric()).unwrap();
        assert!((p.value - mu).abs() < 1e-9, "mu={mu}");
        let e = entropy(&d, &numeric()).unwrap();
        assert!((e.value - (2.0 * PI / mu).ln()).abs() < 1e-9);
    }
}

#[test]
fn flat_top_hierarchy_approaches_entropy() {
    for mu in [0.5, 0.8, 1.5] {
        let r = assess(&make_flat_top(mu).unwrap(), 64, &QuadratureConfig::default()).unwrap();
        let gap = r.entropy.value - r.b(64);
        assert!((-1e-12..0.02).contains(&gap), "mu={mu} gap={gap}");
    }
}

#[test]
fn squeezed_vacuum_matches_vacuum() {
    let d = make_squeezed_vacuum(0.5).unwrap();
    let mu = purity(&d, &numeric()).unwrap();
    assert!((mu.value - 1.0).abs() < 1e-8);
    let s = entropy(&d, &numeric()).unwrap();
    assert!((s.value - entropy_target()).abs() < 1e-8);
}

#[test]
fn distant_mixture_halves_purity() {
    let d = make_coherent_mixture(&[0.5, 0.5], &[PhasePoint::new(-6.0, 0.0), PhasePoint::new(6.0, 0.0)]).unwrap();
    let mu = purity(&d, &numeric()).unwrap();
    assert!((mu.value - 0.5).abs() < 1e-9);
    let s = entropy(&d, &numeric()).unwrap();
    assert!((s.value - (entropy_target() + 2f64.ln())).abs() < 1e-8);
}

#[test]
fn every_builtin_passes_constraints() {
    for d in builtins() {
        let r = check_constraints(&d, &QuadratureConfig::default()).unwrap();
        assert!(r.all_pass(), "{}: {r:?}", d.label());
        assert!(r.purity.value <= 2.0 + 1e-9);
    }
}

#[test]
fn hierarchy_sits_below_entropy_on_builtins() {
    for d in builtins() {
        let r = assess(&d, 24, &QuadratureConfig::default()).unwrap();
        for n in 1..24 {
            assert!(r.b(n + 1) >= r.b(n) - 1e-12, "{} n={n}", d.label());
        }
        assert!(r.entropy.value >= r.b(24) - 1e-8, "{}", d.label());
        assert!(r.identity_residual <= 1e-9, "{}", d.label());
    }
}
