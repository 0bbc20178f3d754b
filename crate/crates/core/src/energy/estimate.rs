//! Finite-difference gradient checks and empirical smoothness constants.

use crate::error::{Error, Result};
use crate::sampling;
use crate::vectorspace::SpaceVector;

use super::EnergyModel;

#[derive(Clone, Debug)]
pub struct GradientCheck {
    /// `max_i |fd_i - g_i| / max(|g|_∞, |fd|_∞)` over smooth coordinates.
    pub max_rel_error: f64,
    pub worst_coord: usize,
    /// Coordinates skipped because the gradient has a kink within `h`.
    pub flagged: Vec<usize>,
}

/// Compare the analytic gradient with central differences
/// `(E(x + h e_i) - E(x - h e_i)) / (2 h w_i)`.
pub fn check_gradient(energy: &EnergyModel, x: &SpaceVector, h: f64) -> Result<GradientCheck> {
    if !(h > 0.0) {
        return Err(Error::Parameter(format!("finite-difference step {h} must be positive")));
    }
    let g = energy.gradient(x)?;
    let space = energy.space();
    let w = space.weights();
    let flagged = energy.nonsmooth_coords(x, h);
    let mut fd = vec![0.0; x.dim()];
    let mut coeffs = x.coeffs().to_vec();
    for i in 0..x.dim() {
        let xi = coeffs[i];
        coeffs[i] = xi + h;
        let ep = energy.value(&space.vector(coeffs.clone())?)?;
        coeffs[i] = xi - h;
        let em = energy.value(&space.vector(coeffs.clone())?)?;
        coeffs[i] = xi;
        fd[i] = (ep - em) / (2.0 * h * w[i]);
    }
    let scale = g
        .coeffs()
        .iter()
        .chain(&fd)
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let mut worst = (0.0, 0);
    for i in 0..x.dim() {
        if flagged.contains(&i) {
            continue;
        }
        let err = (fd[i] - g.coeffs()[i]).abs() / scale;
        if err > worst.0 {
            worst = (err, i);
        }
    }
    Ok(GradientCheck { max_rel_error: worst.0, worst_coord: worst.1, flagged })
}

#[derive(Clone, Copy, Debug)]
pub struct PairSample {
    /// `‖u - w‖`
    pub dist: f64,
    /// `‖E'(u) - E'(w)‖_*` or `⟨E'(u) - E'(w), u - w⟩`
    pub value: f64,
}

/// Log-log slope plus envelope constant over a set of random pairs.
#[derive(Clone, Debug)]
pub struct ExponentEstimate {
    pub exponent: f64,
    pub constant: f64,
    pub raw_slope: f64,
    pub samples: Vec<PairSample>,
}

impl ExponentEstimate {
    /// Smallest `L` with `value <= L dist^e` on every sample.
    pub fn upper_envelope(&self, e: f64) -> f64 {
        self.samples
            .iter()
            .map(|s| s.value / s.dist.powf(e))
            .fold(0.0, f64::max)
    }

    /// Largest `a` with `value >= a dist^e` on every sample.
    pub fn lower_envelope(&self, e: f64) -> f64 {
        self.samples
            .iter()
            .map(|s| s.value / s.dist.powf(e))
            .fold(f64::INFINITY, f64::min)
    }
}

enum Quantity {
    GradientGap,
    Monotonicity,
}

/// Pairs `u = c + ρ a`, `w = c + ρ b` with `a, b` uniform in the unit ball,
/// `c` the homogeneity center and `ρ` log-uniform on `[1e-3 R, R]`.
fn sample_pairs(
    energy: &EnergyModel,
    radius: f64,
    samples: usize,
    seed: u64,
    what: Quantity,
) -> Result<Vec<PairSample>> {
    if samples < 100 {
        return Err(Error::Parameter(format!("need at least 100 sample pairs, got {samples}")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Parameter(format!("region radius {radius} must be positive")));
    }
    let space = energy.space();
    let center = energy.homogeneity_center();
    let mut rng = sampling::rng(seed);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let rho = radius * 10f64.powf(-3.0 * rand::Rng::random::<f64>(&mut rng));
        let a = sampling::unit_ball(space, &mut rng);
        let b = sampling::unit_ball(space, &mut rng);
        let u = center.axpy(rho, &a)?;
        let w = center.axpy(rho, &b)?;
        let diff = u.sub(&w)?;
        let dist = diff.norm();
        if !(dist > 0.0 && dist.is_finite()) {
            continue;
        }
        let gdiff = energy.gradient(&u)?.sub(&energy.gradient(&w)?)?;
        let value = match what {
            Quantity::GradientGap => gdiff.dual_norm(),
            Quantity::Monotonicity => gdiff.pair(&diff)?,
        };
        if value > 0.0 && value.is_finite() {
            out.push(PairSample { dist, value });
        }
    }
    if out.len() < 2 {
        return Err(Error::Parameter("all sampled pairs were degenerate".into()));
    }
    Ok(out)
}

fn log_log_slope(samples: &[PairSample]) -> f64 {
    let n = samples.len() as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for s in samples {
        sx += s.dist.ln();
        sy += s.value.ln();
    }
    let (mx, my) = (sx / n, sy / n);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for s in samples {
        let dx = s.dist.ln() - mx;
        sxy += dx * (s.value.ln() - my);
        sxx += dx * dx;
    }
    sxy / sxx
}

/// Hölder exponent and constant of the gradient on `B_R` around the
/// homogeneity center.
///
/// The fitted slope is capped at 1: on a bounded region an exponent above
/// one implies the Lipschitz bound with a larger constant.
pub fn estimate_smoothness(
    energy: &EnergyModel,
    region_radius: f64,
    samples: usize,
    seed: u64,
) -> Result<ExponentEstimate> {
    let samples = sample_pairs(energy, region_radius, samples, seed, Quantity::GradientGap)?;
    let raw_slope = log_log_slope(&samples);
    let exponent = raw_slope.min(1.0);
    let mut est = ExponentEstimate { exponent, constant: 0.0, raw_slope, samples };
    est.constant = est.upper_envelope(exponent);
    Ok(est)
}

/// Ellipticity order and constant from `⟨E'(u) - E'(w), u - w⟩` on `B_R`.
pub fn estimate_ellipticity(
    energy: &EnergyModel,
    region_radius: f64,
    samples: usize,
    seed: u64,
) -> Result<ExponentEstimate> {
    let samples = sample_pairs(energy, region_radius, samples, seed, Quantity::Monotonicity)?;
    let raw_slope = log_log_slope(&samples);
    let mut est = ExponentEstimate { exponent: raw_slope, constant: 0.0, raw_slope, samples };
    est.constant = est.lower_envelope(raw_slope);
    Ok(est)
}

/// Default estimation radius `2‖u*‖ + 1`.
pub fn default_region_radius(energy: &EnergyModel) -> f64 {
    energy.reference_minimizer().map_or(1.0, |u| 2.0 * u.norm() + 1.0)
}
