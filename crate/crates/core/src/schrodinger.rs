//! Spectral time evolution under `i∂ₜΨ = (−∂ₓₓ + V)Ψ`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Spectral;
use crate::fields::{gaussian_pair, to_hydro_with, ComplexField, GaussianPairParams, Grid1D, HydroField};
use crate::numerics::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialKind {
    Free,
    /// `V(x) = κx²`.
    Harmonic(f64),
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential1D {
    kind: PotentialKind,
    values: Vec<f64>,
}

impl Potential1D {
    pub fn free(grid: &Grid1D) -> Self {
        Potential1D { kind: PotentialKind::Free, values: alloc::vec![0.0; grid.len()] }
    }

    pub fn harmonic(grid: &Grid1D, kappa: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::config("harmonic strength must be finite"));
        }
        Ok(Potential1D { kind: PotentialKind::Harmonic(kappa), values: grid.points().map(|x| kappa * x * x).collect() })
    }

    pub fn custom(grid: &Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::config("potential length does not match grid"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("potential values must be finite"));
        }
        Ok(Potential1D { kind: PotentialKind::Custom, values })
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub steps: usize,
    pub record_every: usize,
}

impl EvolutionConfig {
    pub fn new(dt: f64, steps: usize, record_every: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::config("dt must be positive"));
        }
        if steps == 0 || record_every == 0 {
            return Err(Error::config("steps and record_every must be at least 1"));
        }
        Ok(EvolutionConfig { dt, steps, record_every })
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.steps as f64
    }

    /// True when a snapshot is taken at `step`.
    pub fn records(&self, step: usize) -> bool {
        step.is_multiple_of(self.record_every) || step == self.steps
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub field: ComplexField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HydroSnapshot {
    pub step: usize,
    pub time: f64,
    pub field: HydroField,
}

/// One Strang step: half potential kick, exact kinetic propagation in
/// wavenumber space, half potential kick.
#[derive(Debug, Clone)]
pub struct SplitStepper {
    spectral: Spectral,
    half_kick: Vec<Complex64>,
    kinetic: Vec<Complex64>,
}

impl SplitStepper {
    pub fn new(grid: &Grid1D, potential: &Potential1D, dt: f64) -> Result<Self> {
        if potential.values.len() != grid.len() {
            return Err(Error::config("potential length does not match grid"));
        }
        let spectral = Spectral::new(grid);
        let half_kick = potential.values.iter().map(|v| Complex64::from_polar(1.0, -0.5 * v * dt)).collect();
        let kinetic = spectral.wavenumbers().iter().map(|k| Complex64::from_polar(1.0, -k * k * dt)).collect();
        Ok(SplitStepper { spectral, half_kick, kinetic })
    }

    pub fn step(&self, values: &mut [Complex64]) {
        for (z, w) in values.iter_mut().zip(&self.half_kick) {
            *z *= w;
        }
        self.spectral.plan().forward(values);
        for (z, w) in values.iter_mut().zip(&self.kinetic) {
            *z *= w;
        }
        self.spectral.plan().inverse(values);
        for (z, w) in values.iter_mut().zip(&self.half_kick) {
            *z *= w;
        }
    }

    pub(crate) fn spectral(&self) -> &Spectral {
        &self.spectral
    }
}

fn all_finite(values: &[Complex64]) -> bool {
    values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Propagates `psi`, returning snapshots at step 0, every `record_every`
/// steps, and at the final step.
pub fn split_step_evolve(psi: &ComplexField, v: &Potential1D, cfg: &EvolutionConfig) -> Result<Vec<Snapshot>> {
    if !psi.is_normalized() {
        return Err(Error::config("split-step evolution expects a normalized field"));
    }
    let stepper = SplitStepper::new(psi.grid(), v, cfg.dt)?;
    let mut values = psi.values().to_vec();
    let mut out = alloc::vec![Snapshot { step: 0, time: 0.0, field: psi.clone() }];
    for step in 1..=cfg.steps {
        stepper.step(&mut values);
        if !all_finite(&values) {
            return Err(Error::Instability { step });
        }
        if cfg.records(step) {
            out.push(Snapshot { step, time: step as f64 * cfg.dt, field: psi.with_values(values.clone(), true) });
        }
    }
    Ok(out)
}

/// Closed-form free evolution of `Ψ(x,0) ∝ e^{−(x−x₀)²/4a}·e^{ip₀x}`,
/// `a = σ²/2`, renormalized on the grid:
/// `Ψ(x,t) ∝ (a+it)^{−1/2}·exp(−(x−x₀−2p₀t)²/(4(a+it)) + ip₀x − ip₀²t)`.
pub fn free_gaussian_oracle(sigma: f64, p0: f64, x0: f64, t: f64, grid: &Grid1D) -> Result<ComplexField> {
    if !(sigma > 0.0) {
        return Err(Error::config("sigma must be positive"));
    }
    let a = Complex64::new(0.5 * sigma * sigma, t);
    let prefactor = a.sqrt().inv();
    ComplexField::from_fn(*grid, |x| {
        let d = x - x0 - 2.0 * p0 * t;
        let exponent = -(d * d) / (4.0 * a) + Complex64::new(0.0, p0 * x - p0 * p0 * t);
        prefactor * exponent.exp()
    })?
    .normalized()
}

/// Density of the displaced ground state of `V = κx²` released at rest from
/// `x₀`: a rigid Gaussian `∝ exp(−√κ(x − q)²)` with `q(t) = x₀cos(2√κ·t)`.
pub fn harmonic_coherent_density(kappa: f64, x0: f64, t: f64, grid: &Grid1D) -> Result<Vec<f64>> {
    if !(kappa > 0.0) {
        return Err(Error::config("kappa must be positive"));
    }
    let root = libm::sqrt(kappa);
    let q = x0 * libm::cos(2.0 * root * t);
    let raw: Vec<f64> = grid.points().map(|x| libm::exp(-root * (x - q) * (x - q))).collect();
    let mass: CompensatedSum = raw.iter().copied().collect();
    let scale = 1.0 / (mass.value() * grid.dx());
    Ok(raw.into_iter().map(|r| r * scale).collect())
}

/// Displaced ground state of `V = κx²` at `t = 0` (real, normalized).
pub fn harmonic_ground_state(kappa: f64, x0: f64, grid: &Grid1D) -> Result<ComplexField> {
    if !(kappa > 0.0) {
        return Err(Error::config("kappa must be positive"));
    }
    let root = libm::sqrt(kappa);
    ComplexField::from_fn(*grid, |x| Complex64::new(libm::exp(-0.5 * root * (x - x0) * (x - x0)), 0.0))?.normalized()
}

/// `⟨ψ|−∂ₓₓ + V|ψ⟩ / ⟨ψ|ψ⟩`, kinetic part from the spectrum.
pub fn energy(psi: &ComplexField, v: &Potential1D) -> f64 {
    let grid = psi.grid();
    let spectral = Spectral::new(grid);
    let mut buf = psi.values().to_vec();
    spectral.plan().forward(&mut buf);
    let n = grid.len() as f64;
    let kinetic: CompensatedSum = buf.iter().zip(spectral.wavenumbers()).map(|(z, k)| k * k * z.norm_sqr()).collect();
    let potential: CompensatedSum = psi.values().iter().zip(v.values()).map(|(z, v)| v * z.norm_sqr()).collect();
    let kinetic = kinetic.value() * grid.dx() / n;
    let potential = potential.value() * grid.dx();
    (kinetic + potential) / psi.norm()
}

/// How the moving packet of the pair is launched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Drift {
    /// Use `e^{ip₀x}` exactly as written; for `p₀ > 0` the right packet moves
    /// away from its partner.
    Verbatim,
    /// Flip the sign of the drift so the right packet heads for the left one.
    Approach,
}

impl Drift {
    pub fn apply(self, params: &GaussianPairParams) -> GaussianPairParams {
        match self {
            Drift::Verbatim => *params,
            Drift::Approach => params.with_p0(-params.p0.abs()),
        }
    }
}

/// Time for the moving packet (group velocity `2|p₀|`) to cover the
/// separation `2L`, i.e. for the two packet centres to coincide.
pub fn meeting_time(params: &GaussianPairParams) -> f64 {
    if params.p0 == 0.0 {
        f64::INFINITY
    } else {
        params.half_separation / params.p0.abs()
    }
}

/// Evolves the Gaussian pair in free space, returning (ρ, J) snapshots.
pub fn evolve_pair_to_interference(
    params: &GaussianPairParams,
    grid: &Grid1D,
    cfg: &EvolutionConfig,
    drift: Drift,
) -> Result<Vec<HydroSnapshot>> {
    let launched = drift.apply(params);
    if drift == Drift::Approach && params.p0 != 0.0 && cfg.duration() < meeting_time(params) * (1.0 - 1e-12) {
        return Err(Error::config("evolution too short for the packets to meet"));
    }
    let psi = gaussian_pair(&launched, grid)?;
    let free = Potential1D::free(grid);
    let stepper = SplitStepper::new(grid, &free, cfg.dt)?;
    let mut values = psi.values().to_vec();
    let mut out = alloc::vec![HydroSnapshot { step: 0, time: 0.0, field: to_hydro_with(&psi, stepper.spectral()) }];
    for step in 1..=cfg.steps {
        stepper.step(&mut values);
        if !all_finite(&values) {
            return Err(Error::Instability { step });
        }
        if cfg.records(step) {
            let field = psi.with_values(values.clone(), true);
            out.push(HydroSnapshot { step, time: step as f64 * cfg.dt, field: to_hydro_with(&field, stepper.spectral()) });
        }
    }
    Ok(out)
}

/// The two packets of the normalized pair as separate (unnormalized) fields;
/// their sum is the launched state.
pub fn pair_components(params: &GaussianPairParams, grid: &Grid1D, drift: Drift) -> Result<(ComplexField, ComplexField)> {
    let p = drift.apply(params).normalized_on(grid)?;
    let l = p.half_separation;
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let left = ComplexField::from_fn(*grid, |x| Complex64::new(s * p.phi((x + l) / 2.0), 0.0))?;
    let right = ComplexField::from_fn(*grid, |x| Complex64::from_polar(s * p.phi((x - l) / 2.0), p.p0 * x))?;
    Ok((left, right))
}

/// `∫|ρ − ρ_left − ρ_right| dx` at time `t` for the freely evolving pair:
/// the probability carried by the interference term.
pub fn interference_weight(params: &GaussianPairParams, grid: &Grid1D, drift: Drift, t: f64, dt: f64) -> Result<f64> {
    let (left, right) = pair_components(params, grid, drift)?;
    let steps = libm::round(t / dt) as usize;
    let stepper = SplitStepper::new(grid, &Potential1D::free(grid), dt)?;
    let mut a = left.into_values();
    let mut b = right.into_values();
    for step in 1..=steps {
        stepper.step(&mut a);
        stepper.step(&mut b);
        if !(all_finite(&a) && all_finite(&b)) {
            return Err(Error::Instability { step });
        }
    }
    let acc: CompensatedSum = a.iter().zip(&b).map(|(l, r)| 2.0 * (l.conj() * r).re.abs()).collect();
    Ok(acc.value() * grid.dx())
}

/// Mean spacing of the dark fringes (local minima of ρ) within
/// `center ± half_width`. Minima are refined by a three-point parabola; dark
/// fringes are used because the envelope does not shift their positions the
/// way it pulls on the maxima. `None` if fewer than three are found.
pub fn fringe_spacing(h: &HydroField, center: f64, half_width: f64) -> Option<f64> {
    let grid = h.grid();
    let rho = h.rho();
    let n = grid.len();
    let minima: Vec<f64> = (1..n - 1)
        .filter(|&i| (grid.x(i) - center).abs() <= half_width)
        .filter(|&i| rho[i] < rho[i - 1] && rho[i] <= rho[i + 1])
        .map(|i| {
            let (a, b, c) = (rho[i - 1], rho[i], rho[i + 1]);
            let denom = a - 2.0 * b + c;
            let offset = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
            grid.x(i) + offset * grid.dx()
        })
        .collect();
    if minima.len() < 3 {
        return None;
    }
    Some((minima[minima.len() - 1] - minima[0]) / (minima.len() - 1) as f64)
}

/// Centre of mass `Σxρ/Σρ`.
pub fn centroid(h: &HydroField) -> f64 {
    let grid = h.grid();
    let num: CompensatedSum = h.rho().iter().enumerate().map(|(i, r)| grid.x(i) * r).collect();
    let den: CompensatedSum = h.rho().iter().copied().collect();
    num.value() / den.value()
}
