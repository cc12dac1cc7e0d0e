//! Quantum potential and a direct integrator for the Madelung system
//!
//! ```text
//! ∂ₜρ = −2∂ₓ(S′ρ)
//! ∂ₜS = −(S′)² − V − Q,   Q = −(√ρ)″/√ρ
//! ```
//!
//! The integrator works with `u = ln ρ` instead of ρ, which turns the
//! continuity equation into `∂ₜu = −2(S″ + S′u′)` and the quantum potential
//! into `Q = −(u″/2 + u′²/4)`. It only acts on the support window, the run of
//! grid points from the first to the last with `ρ > RHO_POSITIVE_MIN`; outside
//! it the density and phase are frozen. Derivatives on the window are
//! non-periodic finite differences (fourth order inside, second order at the
//! two points next to each edge), all exact for quadratics, so Gaussian data
//! carry no spatial error.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Spectral;
use crate::fields::{to_hydro_with, unwrap_phase, ComplexField, Grid1D, HydroField};
use crate::schrodinger::{Potential1D, SplitStepper};

/// Smallest density the Madelung integrator accepts.
pub const RHO_POSITIVE_MIN: f64 = 1e-12;

const MIN_WINDOW: usize = 6;

/// First and last index with `ρ > RHO_POSITIVE_MIN`, or `None` if there are
/// none.
pub fn support_window(rho: &[f64]) -> Option<(usize, usize)> {
    let lo = rho.iter().position(|&r| r > RHO_POSITIVE_MIN)?;
    let hi = rho.iter().rposition(|&r| r > RHO_POSITIVE_MIN)?;
    Some((lo, hi))
}

fn interior_node(rho: &[f64], lo: usize, hi: usize) -> Option<usize> {
    (lo + 1..hi).find(|&i| rho[i] <= RHO_POSITIVE_MIN && rho[i] <= rho[i - 1] && rho[i] <= rho[i + 1])
}

/// `Q = −(∂ₓₓ√ρ)/√ρ`, with the second derivative taken spectrally.
///
/// Points outside the support window are returned as NaN; a density minimum
/// at or below `RHO_POSITIVE_MIN` inside the window is a node error.
pub fn quantum_potential(h: &HydroField) -> Result<Vec<f64>> {
    let rho = h.rho();
    let (lo, hi) = support_window(rho).ok_or_else(|| Error::config("density vanishes everywhere"))?;
    if let Some(i) = interior_node(rho, lo, hi) {
        return Err(h.node_error(i));
    }
    let amplitude: Vec<f64> = rho.iter().map(|r| libm::sqrt(*r)).collect();
    let d2 = Spectral::new(h.grid()).second_derivative_real(&amplitude);
    Ok((0..rho.len())
        .map(|i| if (lo..=hi).contains(&i) { -d2[i] / amplitude[i] } else { f64::NAN })
        .collect())
}

/// `−R″/R` for a signed real amplitude `R`, spectral second derivative. NaN
/// where `R` is exactly zero.
pub fn quantum_potential_of_amplitude(grid: &Grid1D, amplitude: &[f64]) -> Result<Vec<f64>> {
    if amplitude.len() != grid.len() {
        return Err(Error::config("amplitude length does not match grid"));
    }
    let d2 = Spectral::new(grid).second_derivative_real(amplitude);
    Ok(amplitude.iter().zip(&d2).map(|(r, d)| if *r == 0.0 { f64::NAN } else { -d / r }).collect())
}

/// Node-free hydrodynamic state with its unwrapped phase.
#[derive(Debug, Clone, PartialEq)]
pub struct MadelungState {
    pub hydro: HydroField,
    pub phase: Vec<f64>,
}

impl MadelungState {
    /// Density and unwrapped phase of `psi` on its support window, with the
    /// phase held at the window-edge values outside. `J = S′ρ`.
    pub fn from_field(psi: &ComplexField) -> Result<Self> {
        let rho: Vec<f64> = psi.values().iter().map(|z| z.norm_sqr()).collect();
        let (lo, hi) = support_window(&rho).ok_or_else(|| Error::config("density vanishes everywhere"))?;
        if let Some(i) = interior_node(&rho, lo, hi) {
            let x = psi.grid().x(i);
            return Err(Error::Node { index: i, x, rho: rho[i] });
        }
        let inner = unwrap_phase(psi.values(), lo, hi)?;
        let n = rho.len();
        let mut phase = alloc::vec![inner[0]; n];
        phase[lo..=hi].copy_from_slice(&inner);
        for p in &mut phase[hi + 1..] {
            *p = inner[inner.len() - 1];
        }
        let current = current_on_window(psi.grid(), &rho, &phase, lo, hi);
        Ok(MadelungState { hydro: HydroField::new(*psi.grid(), rho, current)?, phase })
    }

    /// `√ρ·e^{iS}`.
    pub fn to_field(&self) -> Result<ComplexField> {
        let values = self
            .hydro
            .rho()
            .iter()
            .zip(&self.phase)
            .map(|(r, s)| Complex64::from_polar(libm::sqrt(*r), *s))
            .collect();
        ComplexField::new(*self.hydro.grid(), values)
    }
}

fn current_on_window(grid: &Grid1D, rho: &[f64], phase: &[f64], lo: usize, hi: usize) -> Vec<f64> {
    let mut current = alloc::vec![0.0; rho.len()];
    if hi + 1 - lo >= MIN_WINDOW {
        let mut ds = alloc::vec![0.0; hi + 1 - lo];
        d1(&phase[lo..=hi], grid.dx(), &mut ds);
        for (k, i) in (lo..=hi).enumerate() {
            current[i] = ds[k] * rho[i];
        }
    }
    current
}

fn d1(f: &[f64], dx: f64, out: &mut [f64]) {
    let m = f.len();
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx);
    out[1] = (f[2] - f[0]) / (2.0 * dx);
    for i in 2..m - 2 {
        out[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * dx);
    }
    out[m - 2] = (f[m - 1] - f[m - 3]) / (2.0 * dx);
    out[m - 1] = (3.0 * f[m - 1] - 4.0 * f[m - 2] + f[m - 3]) / (2.0 * dx);
}

fn d2(f: &[f64], dx: f64, out: &mut [f64]) {
    let m = f.len();
    let h2 = dx * dx;
    out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    out[1] = (f[2] - 2.0 * f[1] + f[0]) / h2;
    for i in 2..m - 2 {
        out[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / (12.0 * h2);
    }
    out[m - 2] = (f[m - 1] - 2.0 * f[m - 2] + f[m - 3]) / h2;
    out[m - 1] = (2.0 * f[m - 1] - 5.0 * f[m - 2] + 4.0 * f[m - 3] - f[m - 4]) / h2;
}

/// Reusable RK4 integrator for the Madelung system on a fixed support window.
#[derive(Debug, Clone)]
pub struct MadelungIntegrator {
    grid: Grid1D,
    lo: usize,
    hi: usize,
    log_rho: Vec<f64>,
    phase: Vec<f64>,
    potential: Vec<f64>,
    frozen_rho: Vec<f64>,
    frozen_phase: Vec<f64>,
    scratch: [Vec<f64>; 4],
    steps: usize,
}

struct Stage {
    du: Vec<f64>,
    ds: Vec<f64>,
}

impl MadelungIntegrator {
    pub fn new(state: &MadelungState, v: &Potential1D) -> Result<Self> {
        let grid = *state.hydro.grid();
        if v.values().len() != grid.len() {
            return Err(Error::config("potential length does not match grid"));
        }
        let rho = state.hydro.rho();
        let (lo, hi) = support_window(rho).ok_or_else(|| Error::config("density vanishes everywhere"))?;
        if hi + 1 - lo < MIN_WINDOW {
            return Err(Error::config("support window too narrow for the Madelung stencils"));
        }
        if let Some(i) = interior_node(rho, lo, hi) {
            return Err(state.hydro.node_error(i));
        }
        let m = hi + 1 - lo;
        Ok(MadelungIntegrator {
            grid,
            lo,
            hi,
            log_rho: rho[lo..=hi].iter().map(|r| libm::log(*r)).collect(),
            phase: state.phase[lo..=hi].to_vec(),
            potential: v.values()[lo..=hi].to_vec(),
            frozen_rho: rho.to_vec(),
            frozen_phase: state.phase.clone(),
            scratch: [alloc::vec![0.0; m], alloc::vec![0.0; m], alloc::vec![0.0; m], alloc::vec![0.0; m]],
            steps: 0,
        })
    }

    pub fn window(&self) -> (usize, usize) {
        (self.lo, self.hi)
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// `dt ≤ dx²/4`.
    pub fn max_dt(&self) -> f64 {
        0.25 * self.grid.dx() * self.grid.dx()
    }

    fn rhs(&mut self, u: &[f64], s: &[f64]) -> Stage {
        let dx = self.grid.dx();
        let [du1, du2, ds1, ds2] = &mut self.scratch;
        d1(u, dx, du1);
        d2(u, dx, du2);
        d1(s, dx, ds1);
        d2(s, dx, ds2);
        let mut du = alloc::vec![0.0; u.len()];
        let mut ds = alloc::vec![0.0; u.len()];
        for i in 0..u.len() {
            du[i] = -2.0 * (ds2[i] + ds1[i] * du1[i]);
            let q = -(0.5 * du2[i] + 0.25 * du1[i] * du1[i]);
            ds[i] = -ds1[i] * ds1[i] - self.potential[i] - q;
        }
        Stage { du, ds }
    }

    /// One classical RK4 step.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        if !(dt >= 0.0) || dt > self.max_dt() {
            return Err(Error::config("Madelung time step must satisfy 0 <= dt <= dx^2/4"));
        }
        self.steps += 1;
        if dt == 0.0 {
            return Ok(());
        }
        let u0 = self.log_rho.clone();
        let s0 = self.phase.clone();
        let shifted = |base: &[f64], k: &[f64], h: f64| -> Vec<f64> { base.iter().zip(k).map(|(b, k)| b + h * k).collect() };
        let k1 = self.rhs(&u0, &s0);
        let k2 = self.rhs(&shifted(&u0, &k1.du, 0.5 * dt), &shifted(&s0, &k1.ds, 0.5 * dt));
        let k3 = self.rhs(&shifted(&u0, &k2.du, 0.5 * dt), &shifted(&s0, &k2.ds, 0.5 * dt));
        let k4 = self.rhs(&shifted(&u0, &k3.du, dt), &shifted(&s0, &k3.ds, dt));
        for i in 0..u0.len() {
            self.log_rho[i] = u0[i] + dt / 6.0 * (k1.du[i] + 2.0 * k2.du[i] + 2.0 * k3.du[i] + k4.du[i]);
            self.phase[i] = s0[i] + dt / 6.0 * (k1.ds[i] + 2.0 * k2.ds[i] + 2.0 * k3.ds[i] + k4.ds[i]);
        }
        if self.log_rho.iter().chain(&self.phase).any(|v| !v.is_finite()) {
            return Err(Error::Instability { step: self.steps });
        }
        let rho = self.density();
        if let Some(i) = interior_node(&rho, self.lo, self.hi) {
            return Err(Error::NodeFormation { step: self.steps, index: i, x: self.grid.x(i), rho: rho[i] });
        }
        Ok(())
    }

    /// Density on the full grid.
    pub fn density(&self) -> Vec<f64> {
        let mut rho = self.frozen_rho.clone();
        for (k, u) in self.log_rho.iter().enumerate() {
            rho[self.lo + k] = libm::exp(*u);
        }
        rho
    }

    pub fn phase(&self) -> Vec<f64> {
        let mut phase = self.frozen_phase.clone();
        phase[self.lo..=self.hi].copy_from_slice(&self.phase);
        phase
    }

    /// `J = S′ρ` on the window, zero outside.
    pub fn current(&self) -> Vec<f64> {
        current_on_window(&self.grid, &self.density(), &self.phase(), self.lo, self.hi)
    }

    pub fn state(&self) -> Result<MadelungState> {
        Ok(MadelungState { hydro: HydroField::new(self.grid, self.density(), self.current())?, phase: self.phase() })
    }
}

/// One RK4 step of the Madelung system.
pub fn madelung_step(s: &MadelungState, v: &Potential1D, dt: f64) -> Result<MadelungState> {
    let mut integrator = MadelungIntegrator::new(s, v)?;
    if dt == 0.0 {
        return Ok(s.clone());
    }
    integrator.step(dt)?;
    integrator.state()
}

/// Discrepancy between the Madelung and split-step evolutions over time.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidationReport {
    pub times: Vec<f64>,
    pub sup_rho_diff: Vec<f64>,
    pub sup_current_diff: Vec<f64>,
    /// Set when the Madelung run stopped early; the curves cover the steps
    /// completed before it.
    pub failure: Option<Error>,
}

impl CrossValidationReport {
    pub fn max_rho_diff(&self) -> f64 {
        self.sup_rho_diff.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_current_diff(&self) -> f64 {
        self.sup_current_diff.iter().copied().fold(0.0, f64::max)
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Runs the Madelung integrator and the split-step solver side by side from
/// `initial`, sampling the sup-norm differences of ρ and J about 1000 times.
pub fn cross_validate(initial: &ComplexField, v: &Potential1D, t_final: f64, dt: f64) -> Result<CrossValidationReport> {
    if !(t_final >= 0.0 && dt > 0.0) {
        return Err(Error::config("t_final must be non-negative and dt positive"));
    }
    let psi = if initial.is_normalized() { initial.clone() } else { initial.clone().normalized()? };
    let steps = libm::round(t_final / dt) as usize;
    let stride = steps.div_ceil(1000).max(1);
    let state = MadelungState::from_field(&psi)?;
    let mut madelung = MadelungIntegrator::new(&state, v)?;
    if dt > madelung.max_dt() {
        return Err(Error::config("dt exceeds the Madelung stability limit dx^2/4"));
    }
    let stepper = SplitStepper::new(psi.grid(), v, dt)?;
    let mut values = psi.values().to_vec();
    let mut report = CrossValidationReport { times: Vec::new(), sup_rho_diff: Vec::new(), sup_current_diff: Vec::new(), failure: None };
    let record = |report: &mut CrossValidationReport, step: usize, values: &[Complex64], m: &MadelungIntegrator| {
        let reference = to_hydro_with(&psi.with_values(values.to_vec(), true), stepper.spectral());
        report.times.push(step as f64 * dt);
        report.sup_rho_diff.push(sup_diff(reference.rho(), &m.density()));
        report.sup_current_diff.push(sup_diff(reference.current(), &m.current()));
    };
    record(&mut report, 0, &values, &madelung);
    for step in 1..=steps {
        stepper.step(&mut values);
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            report.failure = Some(Error::Instability { step });
            return Ok(report);
        }
        if let Err(e) = madelung.step(dt) {
            report.failure = Some(e);
            return Ok(report);
        }
        if step % stride == 0 || step == steps {
            record(&mut report, step, &values, &madelung);
        }
    }
    Ok(report)
}
