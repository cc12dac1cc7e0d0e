//! Lattice, field containers and the Ψ ↔ (ρ, J) transform.
//!
//! Units throughout the crate are ħ = 1, m = 1/2, so the Hamiltonian is
//! `-∂ₓₓ + V` and the continuity equation reads `∂ₜρ + 2∂ₓJ = 0` with
//! `J = S'ρ`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Spectral;

/// Densities at or below this value are treated as exact zeros.
pub const RHO_FLOOR: f64 = 1e-300;

/// Tolerance on `Σ|Ψ|²dx = 1` for fields flagged normalized.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Uniform periodic lattice `x_i = x_min + i·dx`, `i = 0..n`; `x_max` is the
/// periodic image of `x_min` and is not itself a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::config("grid bounds must be finite"));
        }
        if x_max <= x_min {
            return Err(Error::config("grid requires x_max > x_min"));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::config("grid size must be a power of two >= 16"));
        }
        Ok(Grid1D { x_min, x_max, n })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    /// Index of the grid point nearest to `x`, if `x` lies inside the box.
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        if x < self.x_min || x > self.x_max {
            return None;
        }
        let i = libm::round((x - self.x_min) / self.dx()) as usize;
        Some(i.min(self.n - 1))
    }
}

/// Convenience constructor matching [`Grid1D::new`].
pub fn build_grid(x_min: f64, x_max: f64, n: usize) -> Result<Grid1D> {
    Grid1D::new(x_min, x_max, n)
}

/// Sampled wavefunction.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid1D,
    values: Vec<Complex64>,
    normalized: bool,
}

impl ComplexField {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::config("field length does not match grid"));
        }
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::config("field contains non-finite values"));
        }
        Ok(ComplexField { grid, values, normalized: false })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid, grid.points().map(f).collect())
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        norm(self)
    }

    /// Rescales to unit norm and sets the normalized flag.
    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if n <= 0.0 {
            return Err(Error::config("cannot normalize a zero field"));
        }
        let s = 1.0 / libm::sqrt(n);
        for z in &mut self.values {
            *z *= s;
        }
        self.normalized = (self.norm() - 1.0).abs() <= NORMALIZATION_TOLERANCE;
        Ok(self)
    }

    /// Multiplies every sample by `factor`; the normalized flag survives only
    /// for unimodular factors.
    pub fn scaled(&self, factor: Complex64) -> Self {
        let values = self.values.iter().map(|z| z * factor).collect();
        let normalized = self.normalized && (factor.norm() - 1.0).abs() < 1e-15;
        ComplexField { grid: self.grid, values, normalized }
    }

    /// Replaces the samples, keeping the grid; used by the steppers.
    pub(crate) fn with_values(&self, values: Vec<Complex64>, normalized: bool) -> Self {
        ComplexField { grid: self.grid, values, normalized }
    }
}

/// `Σ|Ψᵢ|²·dx`.
pub fn norm(psi: &ComplexField) -> f64 {
    let acc: crate::numerics::CompensatedSum = psi.values.iter().map(|z| z.norm_sqr()).collect();
    acc.value() * psi.grid.dx()
}

/// Sampled density and current density.
#[derive(Debug, Clone, PartialEq)]
pub struct HydroField {
    grid: Grid1D,
    rho: Vec<f64>,
    current: Vec<f64>,
    normalized: bool,
}

impl HydroField {
    pub fn new(grid: Grid1D, rho: Vec<f64>, current: Vec<f64>) -> Result<Self> {
        if rho.len() != grid.len() || current.len() != grid.len() {
            return Err(Error::config("hydro field length does not match grid"));
        }
        if rho.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::config("density must be finite and non-negative"));
        }
        if current.iter().any(|j| !j.is_finite()) {
            return Err(Error::config("current must be finite"));
        }
        let mut h = HydroField { grid, rho, current, normalized: false };
        h.normalized = (h.mass() - 1.0).abs() <= 1e-10;
        Ok(h)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn current(&self) -> &[f64] {
        &self.current
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// `Σρᵢ·dx`.
    pub fn mass(&self) -> f64 {
        let acc: crate::numerics::CompensatedSum = self.rho.iter().copied().collect();
        acc.value() * self.grid.dx()
    }

    /// `v = J/ρ`; `None` at exact nodes.
    pub fn velocity(&self, i: usize) -> Option<f64> {
        (self.rho[i] > RHO_FLOOR).then(|| self.current[i] / self.rho[i])
    }

    /// Same density, new current.
    pub fn with_current(&self, current: Vec<f64>) -> Result<Self> {
        HydroField::new(self.grid, self.rho.clone(), current)
    }

    /// First grid index with `ρ ≤ floor` inside `lo..=hi`.
    pub(crate) fn first_at_or_below(&self, floor: f64, lo: usize, hi: usize) -> Option<usize> {
        (lo..=hi).find(|&i| self.rho[i] <= floor)
    }

    pub(crate) fn node_error(&self, i: usize) -> Error {
        Error::Node { index: i, x: self.grid.x(i), rho: self.rho[i] }
    }
}

/// Parameters of the far-apart Gaussian pair
/// `Ψ(x) = [φ((x+L)/2) + e^{ip₀x} φ((x−L)/2)]/√2`,
/// `φ(u) = e^{−u²/2σ²}/(√(2πσ)·𝒩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPairParams {
    pub half_separation: f64,
    pub sigma: f64,
    pub p0: f64,
    pub norm_const: f64,
}

impl GaussianPairParams {
    /// Validates `L > 0`, `σ > 0` and `σ ≤ L/5`; `𝒩` starts at 1 and is set by
    /// [`GaussianPairParams::normalized_on`].
    pub fn new(half_separation: f64, sigma: f64, p0: f64) -> Result<Self> {
        if !(half_separation > 0.0 && half_separation.is_finite()) {
            return Err(Error::config("half-separation L must be positive"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::config("sigma must be positive"));
        }
        if sigma > half_separation / 5.0 {
            return Err(Error::config("wavepackets must be narrow: sigma <= L/5"));
        }
        if !p0.is_finite() {
            return Err(Error::config("p0 must be finite"));
        }
        Ok(GaussianPairParams { half_separation, sigma, p0, norm_const: 1.0 })
    }

    pub fn with_p0(self, p0: f64) -> Self {
        GaussianPairParams { p0, ..self }
    }

    /// `φ(u)`.
    pub fn phi(&self, u: f64) -> f64 {
        libm::exp(-u * u / (2.0 * self.sigma * self.sigma)) / (libm::sqrt(2.0 * PI * self.sigma) * self.norm_const)
    }

    pub fn amplitude(&self, x: f64) -> Complex64 {
        let l = self.half_separation;
        let left = self.phi((x + l) / 2.0);
        let right = self.phi((x - l) / 2.0);
        let drift = Complex64::new(libm::cos(self.p0 * x), libm::sin(self.p0 * x));
        (Complex64::new(left, 0.0) + drift * right) / core::f64::consts::SQRT_2
    }

    /// Both packets, out to five effective widths, must lie inside the box.
    pub fn check_fits(&self, grid: &Grid1D) -> Result<()> {
        let reach = self.half_separation + 5.0 * (2.0 * self.sigma);
        if grid.x_min() > -reach || grid.x_max() < reach {
            return Err(Error::config("Gaussian pair does not fit inside the grid"));
        }
        Ok(())
    }

    /// Copy of the parameters with `𝒩` chosen so the sampled state has unit
    /// norm on `grid`.
    pub fn normalized_on(&self, grid: &Grid1D) -> Result<Self> {
        self.check_fits(grid)?;
        let unit = GaussianPairParams { norm_const: 1.0, ..*self };
        let field = ComplexField::from_fn(*grid, |x| unit.amplitude(x))?;
        Ok(GaussianPairParams { norm_const: libm::sqrt(field.norm()), ..unit })
    }
}

/// Samples the Gaussian pair on `grid`, normalized.
pub fn gaussian_pair(params: &GaussianPairParams, grid: &Grid1D) -> Result<ComplexField> {
    let p = params.normalized_on(grid)?;
    let field = ComplexField::from_fn(*grid, |x| p.amplitude(x))?;
    let n = field.norm();
    Ok(ComplexField { normalized: (n - 1.0).abs() <= NORMALIZATION_TOLERANCE, ..field })
}

/// `ρ = |Ψ|²`, `J = Im(Ψ*·∂ₓΨ)` with a spectral derivative.
pub fn to_hydro(psi: &ComplexField) -> HydroField {
    let spectral = Spectral::new(&psi.grid);
    to_hydro_with(psi, &spectral)
}

pub(crate) fn to_hydro_with(psi: &ComplexField, spectral: &Spectral) -> HydroField {
    let dpsi = spectral.derivative(&psi.values);
    let rho: Vec<f64> = psi.values.iter().map(|z| z.norm_sqr()).collect();
    let current = psi.values.iter().zip(&dpsi).map(|(z, d)| (z.conj() * d).im).collect();
    let mut h = HydroField { grid: psi.grid, rho, current, normalized: false };
    h.normalized = (h.mass() - 1.0).abs() <= 1e-10;
    h
}

/// Rebuilds `Ψ = √ρ·e^{iS}` with `S = anchor_phase + ∫_{x_min}^x J/ρ`.
///
/// The velocity is periodic on the grid, so its mean is integrated as a ramp
/// and the rest spectrally. Every sample must satisfy `ρ > RHO_FLOOR`.
pub fn from_hydro(h: &HydroField, anchor_phase: f64) -> Result<ComplexField> {
    if let Some(i) = h.first_at_or_below(RHO_FLOOR, 0, h.grid.len() - 1) {
        return Err(h.node_error(i));
    }
    let velocity: Vec<f64> = h.rho.iter().zip(&h.current).map(|(r, j)| j / r).collect();
    let spectral = Spectral::new(&h.grid);
    let phase = spectral.cumulative_integral(&velocity, h.grid.dx());
    let values = h
        .rho
        .iter()
        .zip(&phase)
        .map(|(r, s)| {
            let s = anchor_phase + s;
            Complex64::new(libm::cos(s), libm::sin(s)) * libm::sqrt(*r)
        })
        .collect();
    let field = ComplexField::new(h.grid, values)?;
    let normalized = (field.norm() - 1.0).abs() <= NORMALIZATION_TOLERANCE;
    Ok(ComplexField { normalized, ..field })
}

/// Largest phase increment between neighbouring samples accepted when
/// unwrapping.
pub const MAX_PHASE_STEP: f64 = core::f64::consts::FRAC_PI_2;

/// Continuous phase of `values[lo..=hi]`, starting from `arg values[lo]` and
/// accumulating principal-value increments between neighbours.
pub fn unwrap_phase(values: &[Complex64], lo: usize, hi: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(hi + 1 - lo);
    out.push(values[lo].arg());
    for i in lo..hi {
        let step = (values[i + 1] * values[i].conj()).arg();
        if step.abs() > MAX_PHASE_STEP {
            return Err(Error::Resolution { index: i, step });
        }
        let last = out[out.len() - 1];
        out.push(last + step);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_grid_examples() {
        let g = build_grid(-20.0, 20.0, 1024).unwrap();
        assert_eq!(g.dx(), 40.0 / 1024.0);
        assert_eq!(g.x(0), -20.0);
        assert!(matches!(build_grid(-20.0, 20.0, 1000), Err(Error::Config(_))));
        assert!(matches!(build_grid(0.0, 0.0, 64), Err(Error::Config(_))));
        assert!(build_grid(0.0, 1.0, 8).is_err());
    }

    #[test]
    fn norm_examples() {
        let g = build_grid(-1.0, 1.0, 64).unwrap();
        let zero = ComplexField::new(g, alloc::vec![Complex64::new(0.0, 0.0); 64]).unwrap();
        assert_eq!(norm(&zero), 0.0);
        let f = ComplexField::from_fn(g, |x| Complex64::new(1.0 + x * x, x)).unwrap();
        let doubled = f.scaled(Complex64::new(2.0, 0.0));
        assert!((norm(&doubled) - 4.0 * norm(&f)).abs() < 1e-13);
        let unit = f.normalized().unwrap();
        assert!(unit.is_normalized());
        assert!((norm(&unit) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_finite_field() {
        let g = build_grid(0.0, 1.0, 16).unwrap();
        let mut v = alloc::vec![Complex64::new(1.0, 0.0); 16];
        v[3] = Complex64::new(f64::NAN, 0.0);
        assert!(ComplexField::new(g, v).is_err());
    }

    #[test]
    fn pair_params_validation() {
        assert!(GaussianPairParams::new(10.0, 3.0, 0.0).is_err());
        assert!(GaussianPairParams::new(10.0, 2.0, 0.0).is_ok());
        assert!(GaussianPairParams::new(-1.0, 0.1, 0.0).is_err());
        let p = GaussianPairParams::new(10.0, 1.0, 2.0).unwrap();
        let small = build_grid(-15.0, 15.0, 1024).unwrap();
        assert!(gaussian_pair(&p, &small).is_err());
    }

    #[test]
    fn real_pair_has_zero_current() {
        let p = GaussianPairParams::new(10.0, 1.0, 0.0).unwrap();
        let g = build_grid(-40.0, 40.0, 2048).unwrap();
        let psi = gaussian_pair(&p, &g).unwrap();
        assert!(psi.values().iter().all(|z| z.im == 0.0));
        let h = to_hydro(&psi);
        assert!(h.current().iter().all(|j| j.abs() < 1e-14));
    }

    #[test]
    fn pair_density_at_origin_matches_direct_evaluation() {
        let p = GaussianPairParams::new(10.0, 1.0, 2.0).unwrap();
        let g = build_grid(-40.0, 40.0, 4096).unwrap();
        let psi = gaussian_pair(&p, &g).unwrap();
        assert!(psi.is_normalized());
        let i0 = g.nearest_index(0.0).unwrap();
        assert_eq!(g.x(i0), 0.0);
        // Direct evaluation: |Ψ(0)|² = ½|2φ(L/2)|² with the grid norm as 𝒩².
        let unit = GaussianPairParams { norm_const: 1.0, ..p };
        let grid_norm: f64 = g.points().map(|x| unit.amplitude(x).norm_sqr()).sum::<f64>() * g.dx();
        let phi_half = libm::exp(-25.0 / 2.0) / libm::sqrt(2.0 * PI);
        let direct = 2.0 * phi_half * phi_half / grid_norm;
        let rho0 = to_hydro(&psi).rho()[i0];
        assert!((rho0 - direct).abs() <= 1e-13 * direct, "{rho0} vs {direct}");
    }

    #[test]
    fn plane_wave_current() {
        let g = build_grid(0.0, 2.0 * PI, 64).unwrap();
        let p0 = 3.0;
        let amp = 1.0 / libm::sqrt(g.length());
        let psi = ComplexField::from_fn(g, |x| Complex64::new(libm::cos(p0 * x), libm::sin(p0 * x)) * amp).unwrap();
        let h = to_hydro(&psi);
        for (r, j) in h.rho().iter().zip(h.current()) {
            assert!((r - amp * amp).abs() < 1e-15);
            assert!((j - p0 * amp * amp).abs() < 1e-13);
        }
        assert!(h.is_normalized());
    }

    #[test]
    fn from_hydro_plane_wave() {
        let g = build_grid(-PI, PI, 128).unwrap();
        let p0 = 2.0;
        let rho = alloc::vec![0.3; 128];
        let current = alloc::vec![0.3 * p0; 128];
        let h = HydroField::new(g, rho, current).unwrap();
        let psi = from_hydro(&h, 0.0).unwrap();
        for (i, z) in psi.values().iter().enumerate() {
            let s = p0 * (g.x(i) - g.x_min());
            let expected = Complex64::new(libm::cos(s), libm::sin(s)) * libm::sqrt(0.3);
            assert!((z - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn from_hydro_rejects_nodes() {
        let g = build_grid(0.0, 1.0, 16).unwrap();
        let mut rho = alloc::vec![1.0; 16];
        rho[5] = 0.0;
        let h = HydroField::new(g, rho, alloc::vec![0.0; 16]).unwrap();
        assert!(matches!(from_hydro(&h, 0.0), Err(Error::Node { index: 5, .. })));
        assert_eq!(h.velocity(5), None);
        assert_eq!(h.velocity(4), Some(0.0));
    }

    #[test]
    fn hydro_field_validation() {
        let g = build_grid(0.0, 1.0, 16).unwrap();
        assert!(HydroField::new(g, alloc::vec![-1.0; 16], alloc::vec![0.0; 16]).is_err());
        assert!(HydroField::new(g, alloc::vec![1.0; 15], alloc::vec![0.0; 16]).is_err());
    }
}
