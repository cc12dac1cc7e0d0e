use proptest::prelude::*;
use qhlab_core::quantization::*;
use qhlab_core::schrodinger::Potential1D;
use qhlab_core::{build_grid, Grid1D};

fn rational_spec(c: [i64; 4], slope: i64, intercept: i64) -> RecurrenceSpec<Rational> {
    let r = |v: i64| Rational::new(v.into(), 7);
    RecurrenceSpec {
        c0: r(c[0]),
        c1: r(c[1]),
        c2: r(c[2]),
        c4: r(c[3]),
        b_over_alpha: BOverAlpha::Affine { slope: r(slope), intercept: r(intercept) },
    }
}

#[test]
fn hermite_terminates_at_odd_integers() {
    for j in 0..=20 {
        assert_eq!(hermite_ratio(j, Rational::from_integer(2 * j as i128 + 1)), Rational::from_integer(0));
        assert_eq!(hermite_ratio(j, (2 * j + 1) as f64), 0.0);
    }
    assert_eq!(terminating_energies(20), (0..=20).map(|j| 2 * j + 1).collect::<Vec<i64>>());
}

#[test]
fn finite_difference_spectrum() {
    let g = build_grid(-12.0, 12.0, 4096).unwrap();
    let e = discretized_spectrum(&Potential1D::harmonic(&g, 1.0).unwrap(), &g, 8).unwrap();
    for (j, ej) in e.iter().enumerate() {
        assert!((ej - (2 * j + 1) as f64).abs() < 1e-3);
    }
}

#[test]
fn spectrum_error_is_second_order() {
    let err = |n: usize| {
        let g = build_grid(-12.0, 12.0, n).unwrap();
        (discretized_spectrum(&Potential1D::harmonic(&g, 1.0).unwrap(), &g, 1).unwrap()[0] - 1.0).abs()
    };
    let ratio = err(512) / err(1024);
    assert!((ratio - 4.0).abs() < 0.1, "{ratio}");
}

#[test]
fn off_lattice_energies_blow_up() {
    let level = |e: f64| {
        let nearest = ((e - 1.0) / 2.0).round() as usize;
        let q = series_tail_diagnosis((2 * nearest + 1) as f64, 6.0, 200).unwrap();
        let d = series_tail_diagnosis(e, 6.0, 200).unwrap();
        let parity = Parity::of(nearest);
        d.branch(parity).log10_partial_sum - q.branch(parity).log10_partial_sum
    };
    for e in [1.5, 3.3, 5.3, 5.7] {
        assert!(level(e) >= 6.0, "E={e}: {}", level(e));
    }
}

#[test]
fn partial_sums_grow_past_j50() {
    for delta in [0.1, 0.5, 0.9] {
        let e = 5.0 + delta;
        let curve: Vec<f64> = (50..=120).step_by(2).map(|j| series_tail_diagnosis(e, 6.0, j).unwrap().even.log10_partial_sum).collect();
        assert!(curve.windows(2).all(|w| w[1] >= w[0]));
        assert!(curve[curve.len() - 1] - curve[0] > 1.0);
    }
}

#[test]
fn legendre_dichotomy() {
    for j in 0..=50u64 {
        let lambda = quantized_lambda(j);
        assert_eq!(legendre_ratio(j as usize, Rational::from_integer(lambda.into())), Rational::from_integer(0));
        let d = legendre_tail_diagnosis(lambda as f64 + 0.5, 200).unwrap();
        assert!(d.even.diverges() && d.odd.diverges());
        assert_eq!(legendre_tail_diagnosis(lambda as f64, 200).unwrap().branch(Parity::of(j as usize)).terminates_at, Some(j as usize));
    }
    for j in 100..400 {
        assert!((legendre_ratio(j, 6.5) - 1.0).abs() <= 3.0 / j as f64);
    }
}

#[test]
fn legendre_tail_coefficient_settles() {
    let d = legendre_tail_diagnosis(6.5, 10_000).unwrap().even;
    let scaled = 10f64.powf(d.log10_last_coefficient) * d.last_index as f64;
    assert!(scaled > 0.1 && scaled < 0.3, "{scaled}");
}

#[test]
fn radial_residuals() {
    let rs: Vec<f64> = (1..50).map(|i| 0.1 * i as f64).collect();
    for j in 0..=10 {
        for s in radial_solution(quantized_lambda(j) as f64, 1.3, &rs).unwrap() {
            assert!(s.residual_eq1 <= 1e-12 && s.residual_eq2 <= 1e-12);
        }
    }
    let cubic = radial_solution(6.0, 2.0, &[1.5]).unwrap();
    assert!((cubic[0].value - 2.0 * 1.5f64.powi(3)).abs() < 1e-12);
}

#[test]
fn bridge_holds_for_low_levels() {
    let g: Grid1D = build_grid(-12.0, 12.0, 1024).unwrap();
    for j in 0..3 {
        assert!(hermite_bridge_residual(j, &g, 3.0).unwrap() < 1e-6);
    }
}

proptest! {
    #[test]
    fn ee4_zeroes_ee3(c0 in prop_oneof![-20i64..-1, 1i64..20], c1 in -20i64..20, c2 in -20i64..20, c4 in -20i64..20,
                      slope in -20i64..20, intercept in -20i64..20, j in 0usize..=50) {
        let spec = rational_spec([c0, c1, c2, c4], slope, intercept);
        let e = ee4_energy(j, &spec).unwrap();
        prop_assert_eq!(ee3_ratio(j, e, &spec).unwrap(), Rational::from_integer(0));
    }

    #[test]
    fn hermite_spec_reproduces_hermite_ratio(j in 0usize..50, e in -40i64..40) {
        let spec = RecurrenceSpec::hermite();
        let e = Rational::from_integer(e.into());
        prop_assert_eq!(ee4_energy(j, &spec).unwrap(), Rational::from_integer(2 * j as i128 + 1));
        prop_assert_eq!(ee3_ratio(j, e, &spec).unwrap(), -hermite_ratio(j, e));
    }
}
