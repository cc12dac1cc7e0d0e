//! Phase difference across a low-density region and its response to a
//! uniform shift of the current density.
//!
//! Where `ρ ≈ ε^N` on `[−ℓ, ℓ]`, adding `ε` to `J` moves
//! `S^ℓ = ∫_{−ℓ}^{ℓ} J/ρ dx` by `ε∫1/ρ ≈ 2ℓ/ε^{N−1}`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fields::{gaussian_pair, to_hydro, GaussianPairParams, Grid1D, HydroField, RHO_FLOOR};
use crate::numerics::{trapezoid, CompensatedSum};

/// Grid indices bracketing `[−ℓ, ℓ]` after snapping to the nearest samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeInterval {
    pub lo: usize,
    pub hi: usize,
    /// Largest distance between `±ℓ` and the sample it was snapped to.
    pub snap: f64,
}

pub fn probe_interval(grid: &Grid1D, ell: f64) -> Result<ProbeInterval> {
    if !(ell >= 0.0 && ell.is_finite()) {
        return Err(Error::config("ell must be non-negative"));
    }
    let lo = grid.nearest_index(-ell).ok_or_else(|| Error::config("-ell lies outside the grid"))?;
    let hi = grid.nearest_index(ell).ok_or_else(|| Error::config("ell lies outside the grid"))?;
    let snap = f64::max((grid.x(lo) + ell).abs(), (grid.x(hi) - ell).abs());
    Ok(ProbeInterval { lo, hi, snap })
}

fn checked_interval(h: &HydroField, ell: f64) -> Result<ProbeInterval> {
    let p = probe_interval(h.grid(), ell)?;
    if let Some(i) = h.first_at_or_below(RHO_FLOOR, p.lo, p.hi) {
        return Err(h.node_error(i));
    }
    Ok(p)
}

/// `∫_{−ℓ}^{ℓ} J/ρ dx` by the trapezoid rule on the grid.
pub fn phase_difference(h: &HydroField, ell: f64) -> Result<f64> {
    let p = checked_interval(h, ell)?;
    let v: Vec<f64> = h.rho().iter().zip(h.current()).map(|(r, j)| j / r).collect();
    Ok(trapezoid(&v, p.lo, p.hi, h.grid().dx()))
}

/// `J ← J + ε`.
pub fn perturb_current(h: &HydroField, eps: f64) -> Result<HydroField> {
    h.with_current(h.current().iter().map(|j| j + eps).collect())
}

/// `ε·∫_{−ℓ}^{ℓ} 1/ρ dx`.
pub fn perturbed_phase_shift(h: &HydroField, ell: f64, eps: f64) -> Result<f64> {
    let p = checked_interval(h, ell)?;
    let inv: Vec<f64> = h.rho().iter().map(|r| 1.0 / r).collect();
    Ok(eps * trapezoid(&inv, p.lo, p.hi, h.grid().dx()))
}

/// `2ℓ/ε^{N−1}`.
pub fn predicted_shift(ell: f64, eps: f64, n_exponent: u32) -> Result<f64> {
    if !(eps > 0.0) || n_exponent < 2 {
        return Err(Error::config("predicted shift needs eps > 0 and N >= 2"));
    }
    Ok(2.0 * ell / libm::pow(eps, f64::from(n_exponent - 1)))
}

/// `(1/ε^N)·∫J dx + 2ℓ/ε^{N−1}`, the plateau approximation of the perturbed
/// phase.
pub fn general_perturbed_phase(h: &HydroField, ell: f64, eps: f64, n_exponent: u32) -> Result<f64> {
    let p = probe_interval(h.grid(), ell)?;
    let flux = trapezoid(h.current(), p.lo, p.hi, h.grid().dx());
    Ok(flux / libm::pow(eps, f64::from(n_exponent)) + predicted_shift(ell, eps, n_exponent)?)
}

/// Continuous phase of the Gaussian pair,
/// `arctan(sin(p₀x) / (φ((x+L)/2)/φ((x−L)/2) + cos(p₀x)))`, on the branch
/// that is 0 far to the left and follows `p₀x` far to the right.
pub fn analytic_pair_phase(x: f64, params: &GaussianPairParams) -> f64 {
    let (l, s, p0) = (params.half_separation, params.sigma, params.p0);
    let ln_ratio = -x * l / (2.0 * s * s);
    let (sin, cos) = (libm::sin(p0 * x), libm::cos(p0 * x));
    if ln_ratio >= 0.0 {
        let inv = libm::exp(-ln_ratio);
        libm::atan2(sin * inv, 1.0 + cos * inv)
    } else {
        let r = libm::exp(ln_ratio);
        p0 * x + libm::atan2(-r * sin, 1.0 + r * cos)
    }
}

/// Density at the origin of the unit-norm pair, in closed form:
/// `e^{−L²/4σ²} / (σ√π(1 + e^{−L²/4σ² − p₀²σ²}))`.
pub fn pair_midpoint_density(half_separation: f64, sigma: f64, p0: f64) -> f64 {
    let a = half_separation * half_separation / (4.0 * sigma * sigma);
    let c = p0 * p0 * sigma * sigma;
    1.0 / (sigma * libm::sqrt(core::f64::consts::PI) * (libm::exp(a) + libm::exp(-c)))
}

/// Half-separation `L` for which the pair density at the origin is `ε^N`.
pub fn calibrate_separation(eps: f64, n_exponent: u32, sigma: f64, ell: f64, p0: f64) -> Result<f64> {
    if !(eps > 0.0) || n_exponent < 2 || !(sigma > 0.0) {
        return Err(Error::config("calibration needs eps > 0, N >= 2 and sigma > 0"));
    }
    let target = libm::pow(eps, f64::from(n_exponent));
    let rho = |l: f64| pair_midpoint_density(l, sigma, p0);
    if !(target < rho(0.0)) {
        return Err(Error::Calibration(alloc::format!(
            "target density {target:e} is not below the largest midpoint density {:e}",
            rho(0.0)
        )));
    }
    let mut hi = 2.0 * sigma;
    while rho(hi) > target {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Calibration("target density unreachable".into()));
        }
    }
    let mut lo = 0.0;
    while hi - lo > f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if rho(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let l = if (rho(lo) - target).abs() < (rho(hi) - target).abs() { lo } else { hi };
    if l <= ell {
        return Err(Error::Calibration(alloc::format!("calibrated L = {l} does not exceed ell = {ell}")));
    }
    Ok(l)
}

/// Density `ε^N + A·g(|x| − ℓ)` with `g(d) = d⁴e^{−d²/2s²}` for `d > 0` and 0
/// otherwise; `A` makes the grid mass exactly 1, so the plateau value is
/// untouched by normalization. `J ≡ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateauDensity {
    pub epsilon: f64,
    pub n_exponent: u32,
    pub ell: f64,
    pub hydro: HydroField,
}

impl PlateauDensity {
    pub fn new(epsilon: f64, n_exponent: u32, ell: f64, shoulder: f64, grid: &Grid1D) -> Result<Self> {
        if !(epsilon > 0.0) || n_exponent < 2 || !(ell > 0.0) || !(shoulder > 0.0) {
            return Err(Error::config("plateau needs eps > 0, N >= 2, ell > 0 and a positive shoulder width"));
        }
        let base = libm::pow(epsilon, f64::from(n_exponent));
        let bump = |x: f64| {
            let d = x.abs() - ell;
            if d > 0.0 {
                let d2 = d * d;
                d2 * d2 * libm::exp(-d2 / (2.0 * shoulder * shoulder))
            } else {
                0.0
            }
        };
        let shape: Vec<f64> = grid.points().map(bump).collect();
        let shape_mass = shape.iter().copied().collect::<CompensatedSum>().value() * grid.dx();
        let deficit = 1.0 - base * grid.length();
        if !(deficit > 0.0) || !(shape_mass > 0.0) {
            return Err(Error::config("plateau density alone exceeds unit mass on this grid"));
        }
        let amp = deficit / shape_mass;
        let rho: Vec<f64> = shape.iter().map(|g| base + amp * g).collect();
        let hydro = HydroField::new(*grid, rho, alloc::vec![0.0; grid.len()])?;
        Ok(PlateauDensity { epsilon, n_exponent, ell, hydro })
    }
}

/// Initial-data family used by a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    Plateau { grid: Grid1D, shoulder: f64 },
    /// The pair with `L` calibrated per ε so that `ρ(0) = ε^N`, sampled with
    /// `n` points on the smallest power-of-two box `[−W, W]` that fits it.
    GaussianPair { sigma: f64, p0: f64, n: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstabilityConfig {
    pub ell: f64,
    pub epsilons: Vec<f64>,
    pub n_exponent: u32,
    pub profile: Profile,
}

impl InstabilityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.ell > 0.0 && self.ell.is_finite()) {
            return Err(Error::config("ell must be positive"));
        }
        if self.n_exponent < 2 {
            return Err(Error::config("N must be an integer greater than 1"));
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(Error::config("every eps must be positive"));
        }
        if let Profile::GaussianPair { sigma, .. } = self.profile {
            if !(sigma > 0.0) {
                return Err(Error::config("sigma must be positive"));
            }
            if self.epsilons.iter().any(|e| *e >= self.ell / (2.0 * sigma)) {
                return Err(Error::config("Gaussian-pair sweeps need eps < ell/(2 sigma)"));
            }
        }
        Ok(())
    }

    /// The unperturbed field at density scale `eps`.
    pub fn build_profile(&self, eps: f64) -> Result<HydroField> {
        match self.profile {
            Profile::Plateau { grid, shoulder } => Ok(PlateauDensity::new(eps, self.n_exponent, self.ell, shoulder, &grid)?.hydro),
            Profile::GaussianPair { sigma, p0, n } => {
                let l = calibrate_separation(eps, self.n_exponent, sigma, self.ell, p0)?;
                let params = GaussianPairParams::new(l, sigma, p0)?;
                let reach = l + 12.0 * sigma;
                let half_width = libm::exp2(libm::ceil(libm::log2(reach)));
                let grid = Grid1D::new(-half_width, half_width, n)?;
                Ok(to_hydro(&gaussian_pair(&params, &grid)?))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub s_base: f64,
    pub s_perturbed: f64,
    pub delta_s_exact: f64,
    pub delta_s_predicted: f64,
    pub rel_err: f64,
}

/// Least-squares line through `(ln ε, ln ΔS)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub fit: Option<PowerLawFit>,
    /// Why the fit was skipped, if it was.
    pub warning: Option<&'static str>,
}

/// One sweep point: the profile at density scale ε, perturbed by ε.
pub fn sweep_point(cfg: &InstabilityConfig, eps: f64) -> Result<SweepRow> {
    let h = cfg.build_profile(eps)?;
    let s_base = phase_difference(&h, cfg.ell)?;
    let s_perturbed = phase_difference(&perturb_current(&h, eps)?, cfg.ell)?;
    let delta_s_exact = s_perturbed - s_base;
    let delta_s_predicted = predicted_shift(cfg.ell, eps, cfg.n_exponent)?;
    Ok(SweepRow {
        epsilon: eps,
        s_base,
        s_perturbed,
        delta_s_exact,
        delta_s_predicted,
        rel_err: (delta_s_exact - delta_s_predicted).abs() / delta_s_predicted.abs(),
    })
}

/// Orders rows by ε and fits the power law when there are at least four
/// distinct ε values spanning two decades.
pub fn assemble_sweep(mut rows: Vec<SweepRow>) -> SweepTable {
    rows.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon));
    let mut distinct: Vec<f64> = rows.iter().map(|r| r.epsilon).collect();
    distinct.dedup();
    let span = match (distinct.first(), distinct.last()) {
        (Some(lo), Some(hi)) => libm::log10(hi / lo),
        _ => 0.0,
    };
    if distinct.len() < 4 {
        return SweepTable { rows, fit: None, warning: Some("fewer than 4 distinct eps values; fit skipped") };
    }
    if span < 2.0 - 1e-9 {
        return SweepTable { rows, fit: None, warning: Some("eps values span less than 2 decades; fit skipped") };
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (libm::log(r.epsilon), libm::log(r.delta_s_exact.abs()))).collect();
    let fit = fit_line(&points);
    SweepTable { rows, fit: Some(fit), warning: None }
}

pub fn fit_line(points: &[(f64, f64)]) -> PowerLawFit {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    PowerLawFit { slope, intercept, r_squared, n_points: points.len() }
}

/// Sequential sweep over `cfg.epsilons`.
pub fn epsilon_sweep(cfg: &InstabilityConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let rows = cfg.epsilons.iter().map(|&e| sweep_point(cfg, e)).collect::<Result<Vec<_>>>()?;
    Ok(assemble_sweep(rows))
}
