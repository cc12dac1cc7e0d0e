use qhlab_core::fft::Spectral;
use qhlab_core::schrodinger::*;
use qhlab_core::{build_grid, norm, to_hydro, GaussianPairParams};

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn free_gaussian_matches_closed_form() {
    let g = build_grid(-40.0, 40.0, 4096).unwrap();
    let psi = free_gaussian_oracle(1.0, 2.0, -10.0, 0.0, &g).unwrap();
    let cfg = EvolutionConfig::new(1e-3, 1000, 100).unwrap();
    let snaps = split_step_evolve(&psi, &Potential1D::free(&g), &cfg).unwrap();
    let exact = to_hydro(&free_gaussian_oracle(1.0, 2.0, -10.0, 1.0, &g).unwrap());
    let last = &snaps.last().unwrap().field;
    assert!(sup(to_hydro(last).rho(), exact.rho()) < 1e-6);
    for s in &snaps {
        assert!((norm(&s.field) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn oracle_centroid_moves_at_twice_p0() {
    let g = build_grid(-40.0, 40.0, 4096).unwrap();
    let h = to_hydro(&free_gaussian_oracle(1.0, 2.0, -3.0, 1.0, &g).unwrap());
    assert!((centroid(&h) - 1.0).abs() < 1e-10);
}

#[test]
fn strang_error_is_second_order() {
    let g = build_grid(-20.0, 20.0, 4096).unwrap();
    let psi = harmonic_ground_state(1.0, 1.0, &g).unwrap();
    let v = Potential1D::harmonic(&g, 1.0).unwrap();
    let exact = harmonic_coherent_density(1.0, 1.0, 1.0, &g).unwrap();
    let err = |dt: f64| {
        let steps = (1.0 / dt).round() as usize;
        let s = split_step_evolve(&psi, &v, &EvolutionConfig::new(dt, steps, steps).unwrap()).unwrap();
        sup(to_hydro(&s.last().unwrap().field).rho(), &exact)
    };
    let (coarse, fine) = (err(1e-3), err(5e-4));
    assert!(coarse / fine >= 3.9, "{coarse} / {fine}");
}

#[test]
fn energy_is_conserved() {
    let g = build_grid(-40.0, 40.0, 2048).unwrap();
    let psi = free_gaussian_oracle(1.0, 2.0, -10.0, 0.0, &g).unwrap();
    let free = Potential1D::free(&g);
    let e0 = energy(&psi, &free);
    for s in split_step_evolve(&psi, &free, &EvolutionConfig::new(1e-3, 1000, 100).unwrap()).unwrap() {
        assert!((energy(&s.field, &free) - e0).abs() < 1e-10);
    }

    let g = build_grid(-16.0, 16.0, 512).unwrap();
    let psi = harmonic_ground_state(1.0, 1.5, &g).unwrap();
    let v = Potential1D::harmonic(&g, 1.0).unwrap();
    let e0 = energy(&psi, &v);
    assert!((e0 - (1.0 + 1.5 * 1.5)).abs() < 1e-8);
    for s in split_step_evolve(&psi, &v, &EvolutionConfig::new(2.5e-5, 40_000, 4000).unwrap()).unwrap() {
        assert!((energy(&s.field, &v) - e0).abs() < 1e-8);
    }
}

#[test]
fn discrete_continuity_residual_shrinks_with_dt() {
    let g = build_grid(-30.0, 30.0, 2048).unwrap();
    let psi = free_gaussian_oracle(1.0, 1.5, -2.0, 0.0, &g).unwrap();
    let spectral = Spectral::new(&g);
    let residual = |dt: f64| {
        let s = split_step_evolve(&psi, &Potential1D::free(&g), &EvolutionConfig::new(dt, 2, 1).unwrap()).unwrap();
        let (a, mid, b) = (to_hydro(&s[0].field), to_hydro(&s[1].field), to_hydro(&s[2].field));
        let dj = spectral.derivative_real(mid.current());
        (0..g.len())
            .map(|i| ((b.rho()[i] - a.rho()[i]) / (2.0 * dt) + 2.0 * dj[i]).abs())
            .fold(0.0, f64::max)
    };
    let (coarse, fine) = (residual(1e-2), residual(5e-3));
    assert!(coarse < 1e-2 && coarse / fine > 3.5, "{coarse} {fine}");
}

#[test]
fn pair_interference_fringes() {
    let p = GaussianPairParams::new(10.0, 1.0, 2.0).unwrap();
    let g = build_grid(-40.0, 40.0, 4096).unwrap();
    let t = meeting_time(&p);
    let cfg = EvolutionConfig::new(1e-3, (t / 1e-3).round() as usize, 1000).unwrap();
    let snaps = evolve_pair_to_interference(&p, &g, &cfg, Drift::Approach).unwrap();
    for s in &snaps {
        assert!((s.field.mass() - 1.0).abs() < 1e-9);
    }
    let last = &snaps.last().unwrap().field;
    let spacing = fringe_spacing(last, centroid(last), 8.0).unwrap();
    assert!((spacing - std::f64::consts::PI).abs() < 0.1 * std::f64::consts::PI);
}

#[test]
fn static_pair_shows_no_interference() {
    let p = GaussianPairParams::new(10.0, 1.0, 0.0).unwrap();
    let g = build_grid(-40.0, 40.0, 4096).unwrap();
    let w = interference_weight(&p, &g, Drift::Approach, 2.5, 1e-3).unwrap();
    assert!(w < 1e-3, "{w}");
    let moving = interference_weight(&p.with_p0(2.0), &g, Drift::Approach, 5.0, 1e-3).unwrap();
    assert!(moving > 0.5, "{moving}");
}
