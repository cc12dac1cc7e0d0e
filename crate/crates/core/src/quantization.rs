//! Series solutions and the quantization that comes from forcing them to
//! terminate.
//!
//! Recurrences are generic over [`Scalar`] so termination can be checked in
//! exact rational arithmetic; tail diagnostics run in `f64` with
//! log-magnitude sums.

use alloc::vec::Vec;
use core::ops::Neg;

use num_rational::Ratio;
use num_traits::Num;

use crate::error::{Error, Result};
use crate::fields::Grid1D;
use crate::hydro::quantum_potential_of_amplitude;
use crate::numerics::{log_sum, tridiagonal_lowest_eigenvalues, LogMagnitude};
use crate::schrodinger::Potential1D;

/// Field the recurrences are evaluated in.
pub trait Scalar: Clone + PartialEq + Num + Neg<Output = Self> {
    fn from_int(v: i64) -> Self;
}

impl Scalar for f64 {
    fn from_int(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for Ratio<i128> {
    fn from_int(v: i64) -> Self {
        Ratio::from_integer(i128::from(v))
    }
}

/// Exact rational.
pub type Rational = Ratio<i128>;

/// The sequence `b_j/α_j`.
#[derive(Debug, Clone, PartialEq)]
pub enum BOverAlpha<T> {
    Zero,
    /// `slope·j + intercept`.
    Affine { slope: T, intercept: T },
    /// Explicit values for `j = 0..len`.
    Table(Vec<T>),
}

impl<T: Scalar> BOverAlpha<T> {
    pub fn at(&self, j: usize) -> Result<T> {
        match self {
            BOverAlpha::Zero => Ok(T::zero()),
            BOverAlpha::Affine { slope, intercept } => Ok(slope.clone() * T::from_int(j as i64) + intercept.clone()),
            BOverAlpha::Table(values) => values
                .get(j)
                .cloned()
                .ok_or_else(|| Error::Spec(alloc::format!("b/alpha table has no entry for j = {j}"))),
        }
    }
}

/// Coefficients `C⁽⁰⁾, C⁽¹⁾, C⁽²⁾, C⁽⁴⁾` and `b_j/α_j` of the general
/// three-term recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceSpec<T> {
    pub c0: T,
    pub c1: T,
    pub c2: T,
    pub c4: T,
    pub b_over_alpha: BOverAlpha<T>,
}

impl<T: Scalar> RecurrenceSpec<T> {
    fn check(&self) -> Result<()> {
        if self.c0 == T::zero() {
            return Err(Error::Spec("C0 must be non-zero".into()));
        }
        Ok(())
    }
}

impl RecurrenceSpec<Rational> {
    /// `C⁽⁰⁾ = 1, C⁽¹⁾ = C⁽²⁾ = −1, C⁽⁴⁾ = 0, b_j/α_j = 4j + 2`: the choice
    /// under which the energy formula gives `2j + 1`.
    pub fn hermite() -> Self {
        let int = Rational::from_int;
        RecurrenceSpec {
            c0: int(1),
            c1: int(-1),
            c2: int(-1),
            c4: int(0),
            b_over_alpha: BOverAlpha::Affine { slope: int(4), intercept: int(2) },
        }
    }
}

/// `α_{j+2}/α_j = −[C⁽²⁾ + 2jC⁽¹⁾ − (E − C⁽⁴⁾)C⁽⁰⁾ + b_j/α_j] / [(j+1)(j+2)C⁽⁰⁾]`.
pub fn ee3_ratio<T: Scalar>(j: usize, energy: T, spec: &RecurrenceSpec<T>) -> Result<T> {
    spec.check()?;
    let jj = T::from_int(j as i64);
    let numerator = spec.c2.clone() + T::from_int(2) * jj * spec.c1.clone() - (energy - spec.c4.clone()) * spec.c0.clone()
        + spec.b_over_alpha.at(j)?;
    let denominator = T::from_int(((j + 1) * (j + 2)) as i64) * spec.c0.clone();
    Ok(-(numerator / denominator))
}

/// `E_j = C⁽⁴⁾ + (C⁽²⁾ + b_j/α_j + 2C⁽¹⁾j)/C⁽⁰⁾`.
pub fn ee4_energy<T: Scalar>(j: usize, spec: &RecurrenceSpec<T>) -> Result<T> {
    spec.check()?;
    let jj = T::from_int(j as i64);
    Ok(spec.c4.clone() + (spec.c2.clone() + spec.b_over_alpha.at(j)? + T::from_int(2) * spec.c1.clone() * jj) / spec.c0.clone())
}

/// `α_{j+2}/α_j = (2j + 1 − E)/((j+1)(j+2))` for `R = (Σα_j x^j)e^{−x²/2}`
/// in `−R″ + x²R = ER`.
pub fn hermite_ratio<T: Scalar>(j: usize, energy: T) -> T {
    (T::from_int(2 * j as i64 + 1) - energy) / T::from_int(((j + 1) * (j + 2)) as i64)
}

/// `E_j = 2j + 1` for `j = 0..=j_max`.
pub fn terminating_energies(j_max: usize) -> Vec<i64> {
    (0..=j_max as i64).map(|j| 2 * j + 1).collect()
}

/// `a_{j+2}/a_j = −(−j(j+1) + λ)/((j+1)(j+2))`.
pub fn legendre_ratio<T: Scalar>(j: usize, lambda: T) -> T {
    let jj = j as i64;
    -((T::from_int(-jj * (jj + 1)) + lambda) / T::from_int((jj + 1) * (jj + 2)))
}

/// `λ = j(j+1)`.
pub fn quantized_lambda(j: u64) -> u64 {
    j * (j + 1)
}

/// Even series seeded by the index-0 coefficient, odd by the index-1 one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn seed(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn of(j: usize) -> Self {
        if j.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Coefficients of one parity branch, zero at the other parity.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesState {
    pub coefficients: Vec<f64>,
    pub termination_index: Option<usize>,
}

fn build_series(parity: Parity, j_cut: usize, ratio: impl Fn(usize) -> f64) -> SeriesState {
    let mut coefficients = alloc::vec![0.0; j_cut + 1];
    let mut termination_index = None;
    let mut j = parity.seed();
    if j <= j_cut {
        coefficients[j] = 1.0;
    }
    while j + 2 <= j_cut {
        let r = ratio(j);
        if r == 0.0 {
            termination_index = Some(j);
            break;
        }
        coefficients[j + 2] = coefficients[j] * r;
        j += 2;
    }
    SeriesState { coefficients, termination_index }
}

pub fn hermite_series(energy: f64, parity: Parity, j_cut: usize) -> SeriesState {
    build_series(parity, j_cut, |j| hermite_ratio(j, energy))
}

pub fn legendre_series(lambda: f64, parity: Parity, j_cut: usize) -> SeriesState {
    build_series(parity, j_cut, |j| legendre_ratio(j, lambda))
}

/// Outcome for one parity branch of a series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchDiagnosis {
    pub parity: Parity,
    /// Last non-zero coefficient index when the recurrence hits an exact zero.
    pub terminates_at: Option<usize>,
    /// `log₁₀|partial sum|` at the probe point.
    pub log10_partial_sum: f64,
    pub sign: f64,
    /// Last ratio evaluated before stopping.
    pub last_ratio: f64,
    /// Index of the last coefficient summed.
    pub last_index: usize,
    /// `log₁₀|coefficient|` at `last_index`.
    pub log10_last_coefficient: f64,
}

impl BranchDiagnosis {
    pub fn diverges(&self) -> bool {
        self.terminates_at.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailDiagnosis {
    pub even: BranchDiagnosis,
    pub odd: BranchDiagnosis,
}

impl TailDiagnosis {
    pub fn branch(&self, parity: Parity) -> &BranchDiagnosis {
        match parity {
            Parity::Even => &self.even,
            Parity::Odd => &self.odd,
        }
    }

    /// The branch that terminates, if either does.
    pub fn terminating_branch(&self) -> Option<&BranchDiagnosis> {
        [&self.even, &self.odd].into_iter().find(|b| b.terminates_at.is_some())
    }
}

/// Sums `Σ c_j·probe^j` over one branch in log space; `prefactor_ln` is added
/// to the log of the result.
fn diagnose_branch(parity: Parity, probe: f64, j_cut: usize, prefactor_ln: f64, ratio: impl Fn(usize) -> f64) -> BranchDiagnosis {
    let ln_probe = libm::log(probe.abs());
    let probe_sign = probe.signum();
    let mut coeff = LogMagnitude::from_f64(1.0);
    let mut j = parity.seed();
    let term = |c: LogMagnitude, j: usize| LogMagnitude {
        sign: c.sign * if j % 2 == 1 { probe_sign } else { 1.0 },
        ln_abs: c.ln_abs + j as f64 * ln_probe,
    };
    let mut terms = alloc::vec![term(coeff, j)];
    let mut terminates_at = None;
    let mut last_ratio = f64::NAN;
    while j + 2 <= j_cut {
        let r = ratio(j);
        last_ratio = r;
        if r == 0.0 {
            terminates_at = Some(j);
            break;
        }
        coeff = coeff.scaled(r);
        j += 2;
        terms.push(term(coeff, j));
    }
    let sum = log_sum(&terms);
    BranchDiagnosis {
        parity,
        terminates_at,
        log10_partial_sum: (sum.ln_abs + prefactor_ln) / core::f64::consts::LN_10,
        sign: sum.sign,
        last_ratio,
        last_index: j,
        log10_last_coefficient: coeff.log10_abs(),
    }
}

/// Both Hermite branches at energy `E`, each seeded with 1, evaluated as
/// `R(x) = Σα_j x^j·e^{−x²/2}` at `x_probe` with terms up to `j_cut`.
pub fn series_tail_diagnosis(energy: f64, x_probe: f64, j_cut: usize) -> Result<TailDiagnosis> {
    if x_probe == 0.0 || !x_probe.is_finite() {
        return Err(Error::config("x_probe must be finite and non-zero"));
    }
    if j_cut < 20 {
        return Err(Error::config("j_cut must be at least 20"));
    }
    let tail = -0.5 * x_probe * x_probe;
    let ratio = |j| hermite_ratio(j, energy);
    Ok(TailDiagnosis {
        even: diagnose_branch(Parity::Even, x_probe, j_cut, tail, ratio),
        odd: diagnose_branch(Parity::Odd, x_probe, j_cut, tail, ratio),
    })
}

/// Probe point of the angular series, next to the pole `u = 1`.
pub const LEGENDRE_PROBE: f64 = 1.0 - 1e-6;

/// Both branches of the angular series at `λ`, summed at `u = 1 − 10⁻⁶`.
///
/// Off the lattice `λ = j(j+1)` the coefficients decay only like `1/j`, so the
/// sum grows logarithmically towards the pole; `log10_last_coefficient` plus
/// `log10(last_index)` then tends to a constant instead of `−∞`.
pub fn legendre_tail_diagnosis(lambda: f64, j_cut: usize) -> Result<TailDiagnosis> {
    if j_cut < 20 {
        return Err(Error::config("j_cut must be at least 20"));
    }
    if !lambda.is_finite() {
        return Err(Error::config("lambda must be finite"));
    }
    let ratio = |j| legendre_ratio(j, lambda);
    Ok(TailDiagnosis {
        even: diagnose_branch(Parity::Even, LEGENDRE_PROBE, j_cut, 0.0, ratio),
        odd: diagnose_branch(Parity::Odd, LEGENDRE_PROBE, j_cut, 0.0, ratio),
    })
}

/// Lowest `k` eigenvalues of the second-order finite-difference
/// `−∂ₓₓ + V` with Dirichlet walls at `x_min` and `x_max`; unknowns sit at the
/// interior samples `i = 1..n`.
pub fn discretized_spectrum(v: &Potential1D, grid: &Grid1D, k: usize) -> Result<Vec<f64>> {
    if v.values().len() != grid.len() {
        return Err(Error::config("potential length does not match grid"));
    }
    if k > grid.len() / 4 {
        return Err(Error::config("at most n/4 eigenvalues can be requested"));
    }
    let inv = 1.0 / (grid.dx() * grid.dx());
    let diag: Vec<f64> = v.values()[1..].iter().map(|vi| 2.0 * inv + vi).collect();
    let off = alloc::vec![-inv; diag.len() - 1];
    Ok(tridiagonal_lowest_eigenvalues(&diag, &off, k))
}

/// Angular eigen-solution with its radial coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularSolution {
    pub j: u64,
    pub lambda: f64,
    pub radial_coeff: f64,
}

impl AngularSolution {
    pub fn quantized(j: u64, radial_coeff: f64) -> Self {
        AngularSolution { j, lambda: quantized_lambda(j) as f64, radial_coeff }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSample {
    pub r: f64,
    pub value: f64,
    /// `|2rR′ − λR|` relative to the larger of the two terms.
    pub residual_eq1: f64,
    /// `|r·S′|` with `S′ = 0`.
    pub residual_eq2: f64,
}

/// `R(r) = c₁r^{λ/2}` and the residuals of `2rR′ = λR` and `rS′ = 0`.
pub fn radial_solution(lambda: f64, c1: f64, r_samples: &[f64]) -> Result<Vec<RadialSample>> {
    r_samples
        .iter()
        .map(|&r| {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Domain(alloc::format!("radius must be positive, got {r}")));
            }
            let value = c1 * libm::pow(r, 0.5 * lambda);
            let derivative = c1 * 0.5 * lambda * libm::pow(r, 0.5 * lambda - 1.0);
            let lhs = 2.0 * r * derivative;
            let rhs = lambda * value;
            let scale = f64::max(lhs.abs(), rhs.abs());
            let residual_eq1 = if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale };
            let phase_slope = 0.0;
            Ok(RadialSample { r, value, residual_eq1, residual_eq2: (r * phase_slope).abs() })
        })
        .collect()
}

/// Largest magnitude of
/// `sinθ(cosθ·S_θ + sinθ(S_θθR + 2S_θR_θ)) + S_φφR + 2S_φR_φ`
/// for `S = mφ` and an angular profile `θ ↦ (R, R_θ)`.
pub fn angular_imaginary_residual(m: f64, profile: impl Fn(f64) -> (f64, f64), theta_samples: &[f64], phi_samples: &[f64]) -> f64 {
    let (s_theta, s_theta_theta, s_phi, s_phi_phi, r_phi) = (0.0, 0.0, m, 0.0, 0.0);
    let mut worst: f64 = 0.0;
    for &theta in theta_samples {
        let (r, r_theta) = profile(theta);
        let (sin, cos) = (libm::sin(theta), libm::cos(theta));
        for _ in phi_samples {
            let residual = sin * (cos * s_theta + sin * (s_theta_theta * r + 2.0 * s_theta * r_theta)) + s_phi_phi * r + 2.0 * s_phi * r_phi;
            worst = worst.max(residual.abs());
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WitnessReport {
    pub rho_single_valued: bool,
    pub current_single_valued: bool,
    pub wavefunction_single_valued: bool,
}

/// Checks single-valuedness of `ρ = R²`, `J_φ = mR²/r` and `ψ = R(r)e^{imφ}`
/// under `φ → φ + 2π` on the given samples.
pub fn nonquantized_m_witness(m: f64, radial: impl Fn(f64) -> f64, r_samples: &[f64], phi_samples: &[f64]) -> WitnessReport {
    const TOL: f64 = 1e-9;
    let two_pi = 2.0 * core::f64::consts::PI;
    let mut report = WitnessReport { rho_single_valued: true, current_single_valued: true, wavefunction_single_valued: true };
    for &r in r_samples {
        let big_r = radial(r);
        let rho = |_phi: f64| big_r * big_r;
        let current = |_phi: f64| m * big_r * big_r / r;
        let psi = |phi: f64| num_complex::Complex64::from_polar(big_r, m * phi);
        for &phi in phi_samples {
            let scale = big_r * big_r + 1.0;
            report.rho_single_valued &= (rho(phi + two_pi) - rho(phi)).abs() <= TOL * scale;
            report.current_single_valued &= (current(phi + two_pi) - current(phi)).abs() <= TOL * scale;
            report.wavefunction_single_valued &= (psi(phi + two_pi) - psi(phi)).norm() <= TOL * (big_r.abs() + 1.0);
        }
    }
    report
}

/// Signed amplitude `(Σα_j x^j)e^{−x²/2}` of the `j`-th terminating Hermite
/// series, sampled on `grid`.
pub fn hermite_amplitude(level: usize, grid: &Grid1D) -> Vec<f64> {
    let series = hermite_series((2 * level + 1) as f64, Parity::of(level), level);
    grid.points()
        .map(|x| {
            let poly = series.coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c);
            poly * libm::exp(-0.5 * x * x)
        })
        .collect()
}

/// `max |V + Q + (S′)² − (2j+1)|` over samples with `|x| ≤ x_max`, for the
/// real level-`j` amplitude in `V = x²` (`S′ = 0`). Exact zeros of the
/// amplitude, where `Q` is 0/0, are skipped.
pub fn hermite_bridge_residual(level: usize, grid: &Grid1D, x_max: f64) -> Result<f64> {
    let amplitude = hermite_amplitude(level, grid);
    let q = quantum_potential_of_amplitude(grid, &amplitude)?;
    let energy = (2 * level + 1) as f64;
    let phase_slope = 0.0;
    Ok(grid
        .points()
        .enumerate()
        .filter(|(i, x)| x.abs() <= x_max && amplitude[*i] != 0.0)
        .map(|(i, x)| (x * x + q[i] + phase_slope * phase_slope - energy).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::build_grid;

    fn int(v: i64) -> Rational {
        Rational::from_int(v)
    }

    #[test]
    fn ee3_examples() {
        let trivial = RecurrenceSpec { c0: 1.0, c1: 0.0, c2: 0.0, c4: 0.0, b_over_alpha: BOverAlpha::Zero };
        assert_eq!(ee3_ratio(0, 0.0, &trivial).unwrap(), 0.0);
        let h = RecurrenceSpec::hermite();
        assert_eq!(ee3_ratio(0, int(0), &h).unwrap(), Rational::new(-1, 2));
        let bad = RecurrenceSpec { c0: 0.0, ..trivial };
        assert!(matches!(ee3_ratio(0, 1.0, &bad), Err(Error::Spec(_))));
        assert!(matches!(ee4_energy(0, &bad), Err(Error::Spec(_))));
    }

    #[test]
    fn ee4_examples() {
        let constant = RecurrenceSpec { c0: int(1), c1: int(0), c2: int(0), c4: int(5), b_over_alpha: BOverAlpha::Zero };
        let h = RecurrenceSpec::hermite();
        for j in 0..20 {
            assert_eq!(ee4_energy(j, &constant).unwrap(), int(5));
            assert_eq!(ee4_energy(j, &h).unwrap(), int(2 * j as i64 + 1));
        }
    }

    #[test]
    fn table_spec_out_of_range() {
        let s = RecurrenceSpec { c0: 1.0, c1: 0.0, c2: 0.0, c4: 0.0, b_over_alpha: BOverAlpha::Table(alloc::vec![1.0, 2.0]) };
        assert_eq!(ee4_energy(1, &s).unwrap(), 2.0);
        assert!(matches!(ee4_energy(2, &s), Err(Error::Spec(_))));
    }

    #[test]
    fn hermite_ratio_examples() {
        assert_eq!(hermite_ratio(0, 1.0), 0.0);
        assert_eq!(hermite_ratio(1, 3.0), 0.0);
        assert_eq!(hermite_ratio(0, 0.0), 0.5);
        assert_eq!(terminating_energies(3), [1, 3, 5, 7]);
        assert_eq!(terminating_energies(0), [1]);
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_ratio(2, 6.0), 0.0);
        assert_eq!(legendre_ratio(0, 0.0), 0.0);
        assert_eq!(legendre_ratio(0, 2.0), -1.0);
        assert_eq!(quantized_lambda(0), 0);
        assert_eq!(quantized_lambda(3), 12);
    }

    #[test]
    fn termination_points() {
        let d = series_tail_diagnosis(5.0, 6.0, 200).unwrap();
        assert_eq!(d.even.terminates_at, Some(2));
        assert!(d.odd.diverges());
        let d = series_tail_diagnosis(1.0, 6.0, 200).unwrap();
        assert_eq!(d.even.terminates_at, Some(0));
        let l = legendre_tail_diagnosis(6.0, 100).unwrap();
        assert_eq!(l.even.terminates_at, Some(2));
        assert_eq!(legendre_tail_diagnosis(0.0, 100).unwrap().even.terminates_at, Some(0));
    }

    #[test]
    fn series_state_zero_beyond_termination() {
        let s = hermite_series(7.0, Parity::Odd, 30);
        assert_eq!(s.termination_index, Some(3));
        assert!(s.coefficients[4..].iter().all(|c| *c == 0.0));
        // H₃ ∝ 8x³ − 12x, i.e. x − (2/3)x³.
        assert_eq!(s.coefficients[1], 1.0);
        assert!((s.coefficients[3] + 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn argument_checks() {
        assert!(series_tail_diagnosis(1.5, 0.0, 200).is_err());
        assert!(series_tail_diagnosis(1.5, 6.0, 10).is_err());
        assert!(legendre_tail_diagnosis(6.5, 5).is_err());
        assert!(matches!(radial_solution(2.0, 1.0, &[1.0, -1.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn box_spectrum() {
        let g = build_grid(0.0, 2.0, 256).unwrap();
        let e = discretized_spectrum(&Potential1D::free(&g), &g, 3).unwrap();
        let dx = g.dx();
        for (k, ek) in e.iter().enumerate() {
            let s = libm::sin(core::f64::consts::PI * (k + 1) as f64 * dx / (2.0 * 2.0));
            assert!((ek - 4.0 / (dx * dx) * s * s).abs() < 1e-8 * ek);
        }
        assert!(discretized_spectrum(&Potential1D::free(&g), &g, 65).is_err());
    }

    #[test]
    fn radial_examples() {
        let s = radial_solution(2.0, 1.0, &[0.5, 1.0, 3.0]).unwrap();
        for p in &s {
            assert!((p.value - p.r).abs() < 1e-15);
            assert_eq!(p.residual_eq1, 0.0);
            assert_eq!(p.residual_eq2, 0.0);
        }
        let s = radial_solution(0.0, 2.5, &[0.1, 7.0]).unwrap();
        assert!(s.iter().all(|p| p.value == 2.5 && p.residual_eq1 == 0.0));
    }

    #[test]
    fn angular_residual_vanishes() {
        let theta: Vec<f64> = (1..20).map(|i| i as f64 * 0.15).collect();
        let phi: Vec<f64> = (0..10).map(|i| i as f64 * 0.6).collect();
        assert_eq!(angular_imaginary_residual(1.0, |t| (libm::sin(t), libm::cos(t)), &theta, &phi), 0.0);
        assert_eq!(angular_imaginary_residual(0.5, |_| (1.0, 0.0), &theta, &phi), 0.0);
        assert_eq!(angular_imaginary_residual(2.0, |t| (libm::cos(t), -libm::sin(t)), &theta, &phi), 0.0);
    }

    #[test]
    fn witness_flags() {
        let radial = |r: f64| r * libm::exp(-r * r);
        let rs = [0.3, 1.0, 2.0];
        let phis = [0.0, 1.0, 2.5];
        let all = WitnessReport { rho_single_valued: true, current_single_valued: true, wavefunction_single_valued: true };
        assert_eq!(nonquantized_m_witness(1.0, radial, &rs, &phis), all);
        assert_eq!(nonquantized_m_witness(0.0, radial, &rs, &phis), all);
        let half = nonquantized_m_witness(0.5, radial, &rs, &phis);
        assert!(half.rho_single_valued && half.current_single_valued && !half.wavefunction_single_valued);
    }

    #[test]
    fn hermite_amplitudes_have_expected_nodes() {
        let g = build_grid(-4.0, 4.0, 64).unwrap();
        let a1 = hermite_amplitude(1, &g);
        assert_eq!(a1[32], 0.0);
        let a2 = hermite_amplitude(2, &g);
        // 1 − 2x² vanishes at ±1/√2.
        let x = core::f64::consts::FRAC_1_SQRT_2;
        let poly = |x: f64| 1.0 - 2.0 * x * x;
        assert!(poly(x).abs() < 1e-15);
        assert!(a2[32] > 0.0);
    }
}
