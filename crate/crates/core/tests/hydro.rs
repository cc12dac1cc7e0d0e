use qhlab_core::hydro::*;
use qhlab_core::schrodinger::*;
use qhlab_core::{build_grid, gaussian_pair, Error, GaussianPairParams};

#[test]
fn ground_state_potential_balances_energy() {
    let g = build_grid(-12.0, 12.0, 1024).unwrap();
    let h = qhlab_core::to_hydro(&harmonic_ground_state(1.0, 0.0, &g).unwrap());
    let q = quantum_potential(&h).unwrap();
    for (i, x) in g.points().enumerate() {
        if x.abs() <= 4.0 {
            assert!((x * x + q[i] - 1.0).abs() < 1e-6);
        }
    }
}

#[test]
fn stationary_cross_validation() {
    let g = build_grid(-12.0, 12.0, 1024).unwrap();
    let psi = harmonic_ground_state(1.0, 0.0, &g).unwrap();
    let r = cross_validate(&psi, &Potential1D::harmonic(&g, 1.0).unwrap(), 1.0, 1e-4).unwrap();
    assert!(r.failure.is_none());
    assert!(r.max_rho_diff() < 1e-8);
    assert!(r.times.len() > 900 && *r.times.last().unwrap() > 0.9999);
}

#[test]
fn displaced_cross_validation() {
    let g = build_grid(-24.0, 24.0, 2048).unwrap();
    let psi = harmonic_ground_state(1.0, 1.0, &g).unwrap();
    let r = cross_validate(&psi, &Potential1D::harmonic(&g, 1.0).unwrap(), 0.2, 1e-4).unwrap();
    assert!(r.failure.is_none());
    assert!(r.max_rho_diff() < 1e-3);
    assert!(r.max_current_diff() < 1e-3);
}

#[test]
fn madelung_drift_velocity() {
    let g = build_grid(-20.0, 20.0, 2048).unwrap();
    let p0 = 1.5;
    let psi = free_gaussian_oracle(1.0, p0, -2.0, 0.0, &g).unwrap();
    let mut m = MadelungIntegrator::new(&MadelungState::from_field(&psi).unwrap(), &Potential1D::free(&g)).unwrap();
    let dt = 5e-5;
    let c0 = centroid(&m.state().unwrap().hydro);
    for _ in 0..2000 {
        m.step(dt).unwrap();
    }
    let c1 = centroid(&m.state().unwrap().hydro);
    let v = (c1 - c0) / 0.1;
    assert!((v - 2.0 * p0).abs() < 1e-4, "{v}");
}

#[test]
fn madelung_conserves_mass() {
    let g = build_grid(-24.0, 24.0, 2048).unwrap();
    let psi = harmonic_ground_state(1.0, 1.0, &g).unwrap();
    let mut m = MadelungIntegrator::new(&MadelungState::from_field(&psi).unwrap(), &Potential1D::harmonic(&g, 1.0).unwrap()).unwrap();
    let mass = |m: &MadelungIntegrator| m.density().iter().sum::<f64>() * g.dx();
    let m0 = mass(&m);
    for _ in 0..2000 {
        m.step(1e-4).unwrap();
    }
    assert!((mass(&m) - m0).abs() < 1e-8);
}

#[test]
fn pair_forms_nodes() {
    let p = GaussianPairParams::new(10.0, 1.0, 2.0).unwrap();
    let g = build_grid(-32.0, 32.0, 2048).unwrap();
    let psi = gaussian_pair(&Drift::Approach.apply(&p), &g).unwrap();
    let r = cross_validate(&psi, &Potential1D::free(&g), 5.0, 1e-4).unwrap();
    assert!(matches!(r.failure, Some(Error::NodeFormation { .. })), "{:?}", r.failure);
    assert!(!r.times.is_empty());
}
