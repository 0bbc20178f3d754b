//! Explicit descent constants, rate predictions and empirical rate fits.

use crate::error::{Error, Result};
use crate::greedy::{CheckReport, GreedyTrace};

const EXPONENT_TOL: f64 = 1e-9;

/// `p / ((p + 1) L^{1/p})`: guaranteed decrease factor under a global
/// Hölder bound.
pub fn beta_global(p: f64, lip: f64) -> f64 {
    p / ((p + 1.0) * lip.powf(1.0 / p))
}

/// `p/(p+1) · min{r / M_r^{1/p}, 1 / L_{2r}^{1/p}}` on the ball `B_r`.
pub fn beta_local(p: f64, r: f64, m_r: f64, lip_2r: f64) -> f64 {
    p / (p + 1.0) * (r / m_r.powf(1.0 / p)).min(1.0 / lip_2r.powf(1.0 / p))
}

/// `M_r = 1 + sup_{B_r} ‖E'‖_*`, bounded by `1 + ‖E'(0)‖_* + r^p L_r`.
pub fn gradient_bound_on_ball(grad0_norm: f64, p: f64, r: f64, lip_r: f64) -> f64 {
    1.0 + grad0_norm + r.powf(p) * lip_r
}

/// `gap <= c σ^exponent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapSigma {
    pub c: f64,
    pub exponent: f64,
}

/// Constant relating the energy gap to σ.
///
/// Ellipticity and norming give `‖u - u*‖ <= (C σ / α)^{1/(s-1)}`, and the
/// Hölder upper estimate at the minimizer then bounds the gap by
/// `L/(p+1) ‖u - u*‖^{p+1}`. For `s = p + 1` the exponent is `1 + 1/p`.
pub fn gap_sigma_constant(p: f64, s: f64, lip: f64, alpha: f64, norming: f64) -> Result<GapSigma> {
    if !(p > 0.0 && s > 1.0 && lip > 0.0 && alpha > 0.0 && norming > 0.0) {
        return Err(Error::Parameter(format!(
            "gap/sigma constant needs positive p, L, alpha, C and s > 1 (p={p}, s={s}, L={lip}, alpha={alpha}, C={norming})"
        )));
    }
    let exponent = (p + 1.0) / (s - 1.0);
    Ok(GapSigma { c: lip * (norming / alpha).powf(exponent) / (p + 1.0), exponent })
}

/// `gap_m <= c σ_m^e (1 + 1e-9)` at every iterate, with gaps reduced by
/// `1e-12` of the energy scale to absorb rounding in the reference energy.
pub fn check_gap_sigma(trace: &GreedyTrace, bound: GapSigma) -> CheckReport {
    let mut rep = CheckReport::new("gap_sigma");
    let scale = trace.rows[0].energy.abs() + trace.minimizer_energy.unwrap_or(0.0).abs();
    for r in &trace.rows {
        let Some(gap) = r.gap else { continue };
        let rhs = bound.c * r.sigma.powf(bound.exponent) * (1.0 + 1e-9);
        rep.record(r.m, gap - 1e-12 * scale, rhs, rhs.max(gap.abs()));
    }
    rep
}

#[derive(Clone, Debug)]
pub struct SequenceBound {
    pub sequence: Vec<f64>,
    pub bound: Vec<f64>,
    pub c2: f64,
    pub violations: usize,
    /// The recursion left the positive reals and was cut short.
    pub truncated: bool,
}

impl SequenceBound {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

/// Simulates `a_{m+1} = a_m - C1 a_m^t` for `m = 1..=M` and checks
/// `a_m <= C2 m^{-1/(t-1)}` with `C2 = max{a_1, ((t-1) C1)^{-1/(t-1)}}`.
pub fn sequence_bound(a1: f64, c1: f64, t: f64, steps: usize) -> Result<SequenceBound> {
    if !(t > 1.0 && c1 > 0.0 && a1 >= 0.0) {
        return Err(Error::Parameter(format!(
            "sequence recursion needs t > 1, C1 > 0, a1 >= 0 (t={t}, C1={c1}, a1={a1})"
        )));
    }
    let inv = 1.0 / (t - 1.0);
    let c2 = a1.max(((t - 1.0) * c1).powf(-inv));
    let mut sequence = Vec::with_capacity(steps);
    let mut bound = Vec::with_capacity(steps);
    let mut violations = 0;
    let mut truncated = false;
    let mut a = a1;
    for m in 1..=steps {
        let b = c2 * (m as f64).powf(-inv);
        if a > b {
            violations += 1;
        }
        sequence.push(a);
        bound.push(b);
        let next = a - c1 * a.powf(t);
        if a > 0.0 && next <= 0.0 {
            truncated = true;
            break;
        }
        a = next;
    }
    Ok(SequenceBound { sequence, bound, c2, violations, truncated })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Prediction {
    Exponential,
    Algebraic { exponent: f64 },
}

impl Prediction {
    pub fn kind(&self) -> &'static str {
        match self {
            Prediction::Exponential => "exponential",
            Prediction::Algebraic { .. } => "algebraic",
        }
    }

    pub fn exponent(&self) -> Option<f64> {
        match self {
            Prediction::Exponential => None,
            Prediction::Algebraic { exponent } => Some(*exponent),
        }
    }
}

/// Geometric decay when `s = p + 1`, otherwise `m^{-p/(s-1-p)}`.
pub fn predicted_rate(p: f64, s: f64) -> Result<Prediction> {
    if s < p + 1.0 - EXPONENT_TOL {
        return Err(Error::Inconsistent(format!(
            "ellipticity order s = {s} is below p + 1 = {}",
            p + 1.0
        )));
    }
    if (s - (p + 1.0)).abs() <= EXPONENT_TOL {
        Ok(Prediction::Exponential)
    } else {
        Ok(Prediction::Algebraic { exponent: p / (s - 1.0 - p) })
    }
}

/// `μ = p / (c (p+1) L^{1/p})`, clamped to `(0, 1]`; the predicted envelope
/// is `gap_m <= gap_0 (1 - μ)^m`.
pub fn exponential_factor(p: f64, lip: f64, c_gap: f64) -> f64 {
    (p / (c_gap * (p + 1.0) * lip.powf(1.0 / p))).clamp(f64::MIN_POSITIVE, 1.0)
}

/// `gap_m <= gap_0 (1 - μ)^m + 1e-12 gap_0`.
pub fn check_geometric_envelope(gaps: &[f64], mu: f64) -> CheckReport {
    let mut rep = CheckReport::new("geometric_envelope");
    let Some(&g0) = gaps.first() else { return rep };
    let log_factor = (1.0 - mu).ln();
    for (m, &g) in gaps.iter().enumerate() {
        let rhs = g0 * (m as f64 * log_factor).exp() + 1e-12 * g0.abs();
        rep.record(m, g, rhs, g0.abs());
    }
    rep
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateKind {
    Exponential,
    Algebraic,
    Undetermined,
}

impl RateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RateKind::Exponential => "exponential",
            RateKind::Algebraic => "algebraic",
            RateKind::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RateReport {
    pub kind: RateKind,
    /// `exp(slope)` of `log gap` against `m`.
    pub alpha: Option<f64>,
    /// `-slope` of `log gap` against `log m`.
    pub exponent: Option<f64>,
    /// Goodness of fit of the selected model (the better one if undetermined).
    pub r_squared: f64,
    pub r_squared_exponential: f64,
    pub r_squared_algebraic: f64,
    pub burn_in: usize,
    /// First index excluded from the fit window.
    pub floor_index: usize,
    pub window: usize,
    /// Intercepts of the exponential (`log gap` vs `m`) and algebraic
    /// (`log gap` vs `log m`) fits.
    pub log_intercepts: Option<(f64, f64)>,
    pub predicted: Option<Prediction>,
    /// Only defined for windows of at least [`MIN_WINDOW`] points.
    pub pass: Option<bool>,
}

pub const MIN_WINDOW: usize = 10;
pub const DEFAULT_BURN_IN: usize = 5;
const SELECTION_MARGIN: f64 = 0.02;

/// `1e-13 gap_0`.
pub fn default_floor(gaps: &[f64]) -> f64 {
    1e-13 * gaps.first().copied().unwrap_or(0.0)
}

/// `(slope, intercept, r²)`.
fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let ss_res = syy - slope * sxy;
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (slope, my - slope * mx, r2.clamp(0.0, 1.0))
}

/// Fit exponential and algebraic decay to `gaps[m]` over
/// `[burn_in, first m with gap < floor)` and keep the model with the higher
/// `r²` (by a margin of 0.02; closer fits are reported as undetermined).
pub fn fit_rate(gaps: &[f64], burn_in: usize, floor: f64) -> RateReport {
    let start = burn_in.max(1);
    let end = (start..gaps.len())
        .find(|&m| !(gaps[m] >= floor && gaps[m] > 0.0))
        .unwrap_or(gaps.len().max(start));
    let window = end.saturating_sub(start);
    let mut rep = RateReport {
        kind: RateKind::Undetermined,
        alpha: None,
        exponent: None,
        r_squared: 0.0,
        r_squared_exponential: 0.0,
        r_squared_algebraic: 0.0,
        burn_in,
        floor_index: end,
        window,
        log_intercepts: None,
        predicted: None,
        pass: None,
    };
    if window < MIN_WINDOW {
        return rep;
    }
    let ms: Vec<f64> = (start..end).map(|m| m as f64).collect();
    let log_ms: Vec<f64> = ms.iter().map(|m| m.ln()).collect();
    let log_gaps: Vec<f64> = gaps[start..end].iter().map(|g| g.ln()).collect();
    let (se, ie, r2e) = least_squares(&ms, &log_gaps);
    let (sa, ia, r2a) = least_squares(&log_ms, &log_gaps);
    rep.log_intercepts = Some((ie, ia));
    rep.alpha = Some(se.exp());
    rep.exponent = Some(-sa);
    rep.r_squared_exponential = r2e;
    rep.r_squared_algebraic = r2a;
    rep.r_squared = r2e.max(r2a);
    rep.kind = if r2e > r2a + SELECTION_MARGIN {
        RateKind::Exponential
    } else if r2a > r2e + SELECTION_MARGIN {
        RateKind::Algebraic
    } else {
        RateKind::Undetermined
    };
    rep
}

pub const EXPONENTIAL_MIN_R2: f64 = 0.99;
pub const ALGEBRAIC_MIN_R2: f64 = 0.95;
pub const ALGEBRAIC_EXPONENT_SLACK: f64 = 0.9;

impl RateReport {
    /// Model value of `ln gap` at `m` for the selected fit (the better `r²`
    /// when undetermined).
    pub fn model_log_gap(&self, m: f64) -> Option<f64> {
        let (ie, ia) = self.log_intercepts?;
        let exponential = match self.kind {
            RateKind::Exponential => true,
            RateKind::Algebraic => false,
            RateKind::Undetermined => self.r_squared_exponential >= self.r_squared_algebraic,
        };
        if exponential {
            Some(ie + m * self.alpha?.ln())
        } else {
            Some(ia - self.exponent? * m.ln())
        }
    }

    /// Compare with the prediction. Algebraic predictions are upper bounds,
    /// so a good exponential fit (faster decay) passes them as well.
    pub fn assess(mut self, prediction: Prediction) -> Self {
        self.predicted = Some(prediction);
        if self.window < MIN_WINDOW {
            self.pass = None;
            return self;
        }
        let exp_ok = self.kind == RateKind::Exponential && self.r_squared_exponential >= EXPONENTIAL_MIN_R2;
        self.pass = Some(match prediction {
            Prediction::Exponential => exp_ok,
            Prediction::Algebraic { exponent } => {
                let alg_ok = self.r_squared_algebraic >= ALGEBRAIC_MIN_R2
                    && self.exponent.is_some_and(|e| e >= ALGEBRAIC_EXPONENT_SLACK * exponent);
                let faster = self.r_squared_exponential >= ALGEBRAIC_MIN_R2
                    && self.kind != RateKind::Algebraic;
                alg_ok || faster
            }
        });
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_examples() {
        assert_eq!(beta_global(1.0, 1.0), 0.5);
        assert!((beta_global(0.5, 4.0) - 1.0 / 48.0).abs() < 1e-15);
        assert_eq!(beta_global(1.0, 0.25), 2.0);
        assert_eq!(beta_local(1.0, 10.0, 2.0, 1.0), 0.5);
        assert_eq!(beta_local(1.0, 0.5, 2.0, 1.0), 0.125);
        assert!(beta_local(1.0, 1e-12, 2.0, 1.0) < 1e-12);
    }

    #[test]
    fn gap_sigma_examples() {
        let g = gap_sigma_constant(1.0, 2.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(g, GapSigma { c: 0.5, exponent: 2.0 });
        let g = gap_sigma_constant(1.0, 2.0, 1.0, 1.0, 2f64.sqrt()).unwrap();
        assert!((g.c - 1.0).abs() < 1e-15);
        assert!(gap_sigma_constant(1.0, 2.0, 1.0, 1e12, 1.0).unwrap().c < 1e-20);
    }

    #[test]
    fn sequence_first_terms() {
        let sb = sequence_bound(1.0, 0.5, 2.0, 4).unwrap();
        assert_eq!(sb.sequence, vec![1.0, 0.5, 0.375, 0.3046875]);
        assert_eq!(sb.c2, 2.0);
        assert!(sb.pass());
    }

    #[test]
    fn sequence_zero_start() {
        let sb = sequence_bound(0.0, 0.5, 2.0, 100).unwrap();
        assert!(sb.sequence.iter().all(|&a| a == 0.0));
        assert!(sb.pass());
    }

    #[test]
    fn predictions() {
        assert_eq!(predicted_rate(1.0, 2.0).unwrap(), Prediction::Exponential);
        assert_eq!(predicted_rate(1.0, 3.0).unwrap(), Prediction::Algebraic { exponent: 1.0 });
        assert_eq!(predicted_rate(0.5, 2.0).unwrap(), Prediction::Algebraic { exponent: 1.0 });
        assert!(matches!(predicted_rate(1.0, 1.5), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn mu_examples() {
        assert_eq!(exponential_factor(1.0, 1.0, 0.5), 1.0);
        assert_eq!(exponential_factor(1.0, 1.0, 1.0), 0.5);
        assert!(exponential_factor(1.0, 1.0, 1e300) < 1e-299);
    }

    #[test]
    fn short_window_is_undetermined() {
        let gaps: Vec<f64> = (0..12).map(|m| 0.5f64.powi(m)).collect();
        let rep = fit_rate(&gaps, 5, 0.0).assess(Prediction::Exponential);
        assert_eq!(rep.kind, RateKind::Undetermined);
        assert_eq!(rep.pass, None);
    }
}
