//! Dictionary-restricted greedy descent.
//!
//! Starting from `u_0 = 0`, each step moves along a dictionary direction and
//! minimizes the energy on that line (`SigmaLine`: the σ-witness line) or on
//! every line/subspace of a finite union (`ExactUnion`). The run records a
//! [`GreedyTrace`] and the `check_*` functions test it against the descent
//! inequalities that hold for greedy sequences.

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::dictionary::{self, Dictionary, DictionaryKind, Subspace};
use crate::energy::EnergyModel;
use crate::error::{Error, Result};
use crate::vectorspace::SpaceVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepMode {
    SigmaLine,
    ExactUnion,
}

impl StepMode {
    pub fn as_str(self) -> &'static str {
        match self {
            StepMode::SigmaLine => "sigma-line",
            StepMode::ExactUnion => "exact-union",
        }
    }
}

#[derive(Clone, Debug)]
pub struct GreedyConfig {
    pub mode: StepMode,
    pub max_iter: usize,
    /// Stop once `σ(u_m) <= sigma_stop`.
    pub sigma_stop: f64,
    pub line_tol: f64,
    pub bracket_growth: f64,
    /// Radius of the ball the iterates must stay in; derived from
    /// coercivity when absent.
    pub ball_radius_r: Option<f64>,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        Self {
            mode: StepMode::SigmaLine,
            max_iter: 10_000,
            sigma_stop: 1e-12,
            line_tol: 1e-12,
            bracket_growth: 2.0,
            ball_radius_r: None,
        }
    }
}

impl GreedyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter < 1 {
            return Err(Error::Parameter("max_iter must be at least 1".into()));
        }
        if !(self.sigma_stop > 0.0) || !(self.line_tol > 0.0) {
            return Err(Error::Parameter("sigma_stop and line_tol must be positive".into()));
        }
        if !(self.bracket_growth > 1.0 && self.bracket_growth.is_finite()) {
            return Err(Error::Parameter(format!(
                "bracket_growth = {} must exceed 1",
                self.bracket_growth
            )));
        }
        if let Some(r) = self.ball_radius_r {
            if !(r > 0.0) {
                return Err(Error::Parameter(format!("ball_radius_r = {r} must be positive")));
            }
        }
        Ok(())
    }
}

const MAX_BRACKET: f64 = 1152921504606846976.0; // 2^60
const GOLDEN_SHRINK: f64 = 1e-2;

fn slope(energy: &EnergyModel, u: &SpaceVector, w: &SpaceVector, t: f64) -> Result<f64> {
    energy.gradient(&u.axpy(t, w)?)?.pair(w)
}

/// Minimize `t ↦ E(u + t w)` for a unit direction `w`.
///
/// Quadratic energies use the closed form. Otherwise the minimizer is
/// bracketed by doubling from `±1`, the bracket is narrowed by golden-section
/// search (to `tol` or a hundredth of its width), and the result is polished
/// by a safeguarded (Illinois) root search on the directional derivative.
/// Value comparisons alone cannot resolve the minimizer beyond roughly
/// `√ε`, while the greedy orthogonality identity needs the slope itself to
/// vanish, hence the polish to floating-point precision.
pub fn line_minimize(
    energy: &EnergyModel,
    u: &SpaceVector,
    w: &SpaceVector,
    tol: f64,
    growth: f64,
) -> Result<(f64, f64)> {
    let nw = w.norm();
    if (nw - 1.0).abs() > 1e-10 {
        return Err(Error::Parameter(format!("search direction has norm {nw}, expected 1")));
    }
    if let Some(t) = energy.closed_form_line(u, w) {
        let t = t?;
        return Ok((t, energy.value(&u.axpy(t, w)?)?));
    }
    let d0 = slope(energy, u, w, 0.0)?;
    if d0 == 0.0 {
        return Ok((0.0, energy.value(u)?));
    }
    // orient the line so the energy decreases for t > 0
    let dir = -d0.signum();
    let phi = |t: f64| -> Result<f64> { energy.value(&u.axpy(dir * t, w)?) };
    let dphi = |t: f64| -> Result<f64> { Ok(dir * slope(energy, u, w, dir * t)?) };

    let (mut lo, mut hi) = (0.0, 1.0);
    let (mut d_lo, mut d_hi) = (dir * d0, dphi(1.0)?);
    while d_hi < 0.0 {
        lo = hi;
        d_lo = d_hi;
        hi *= growth;
        if hi > MAX_BRACKET {
            return Err(Error::EllipticityViolated(format!(
                "no minimizer within |t| <= 2^60 (slope still {d_hi:e})"
            )));
        }
        d_hi = dphi(hi)?;
    }

    // golden section on values
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let width0 = b - a;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (phi(x1)?, phi(x2)?);
    while b - a > (GOLDEN_SHRINK * width0).max(tol) {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = phi(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = phi(x2)?;
        }
    }
    let (da, db) = (dphi(a)?, dphi(b)?);
    if da <= 0.0 && db >= 0.0 {
        lo = a;
        hi = b;
        d_lo = da;
        d_hi = db;
    }

    // Illinois regula falsi on the monotone slope
    let mut side = 0i8;
    let mut best = if d_lo.abs() <= d_hi.abs() { (lo, d_lo) } else { (hi, d_hi) };
    for _ in 0..200 {
        if best.1 == 0.0 || hi - lo <= 4.0 * f64::EPSILON * (1.0 + hi.abs()) {
            break;
        }
        let mut t = lo - d_lo * (hi - lo) / (d_hi - d_lo);
        if !(t > lo && t < hi) {
            t = 0.5 * (lo + hi);
        }
        if t == lo || t == hi {
            break;
        }
        let d = dphi(t)?;
        if d.abs() < best.1.abs() {
            best = (t, d);
        }
        if d < 0.0 {
            lo = t;
            d_lo = d;
            if side == -1 {
                d_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = t;
            d_hi = d;
            if side == 1 {
                d_lo *= 0.5;
            }
            side = 1;
        }
    }
    // Near a kink of a p < 1 power term the slope behaves like √|t - t_k|,
    // so floating-point t leaves a √ε residual; the kink itself is exact.
    let reach = 1e-6 * (1.0 + best.0.abs());
    for tk in energy.line_kinks(u, w) {
        let tau = dir * tk;
        if (tau - best.0).abs() <= reach {
            let d = dphi(tau)?;
            if d.abs() < best.1.abs() {
                best = (tau, d);
            }
        }
    }
    let t = dir * best.0;
    Ok((t, energy.value(&u.axpy(t, w)?)?))
}

/// Outcome of one greedy step.
#[derive(Clone, Debug)]
pub struct StepRecord {
    pub sigma: f64,
    pub step: SpaceVector,
    pub step_norm: f64,
    pub energy_before: f64,
    pub energy_after: f64,
}

fn minimize_on_subspace(
    energy: &EnergyModel,
    sub: &Subspace,
    u: &SpaceVector,
    config: &GreedyConfig,
) -> Result<SpaceVector> {
    let space = energy.space();
    let basis = sub.spanning_vectors(space);
    if let Some((op, source)) = energy.quadratic_parts() {
        // Galerkin system ⟨A V c, V_j⟩ = ⟨b - A u, V_j⟩
        let k = basis.len();
        let av: Vec<SpaceVector> = basis.iter().map(|v| op.apply(v)).collect();
        let gram = DMatrix::from_fn(k, k, |i, j| av[i].pair_unchecked(&basis[j]));
        let residual = source.sub(&op.apply(u))?;
        let rhs = DVector::from_iterator(k, basis.iter().map(|v| residual.pair_unchecked(v)));
        let c = gram
            .cholesky()
            .ok_or_else(|| Error::EllipticityViolated("subspace Gram matrix not SPD".into()))?
            .solve(&rhs);
        let mut z = space.zeros();
        for (v, ci) in basis.iter().zip(c.iter()) {
            z = z.axpy(*ci, v)?;
        }
        return Ok(z);
    }
    // restricted sigma-line iterations, warm-started at u
    let mut x = u.clone();
    let sigma0 = dictionary::subspace_witness(sub, &energy.gradient(u)?)?.sigma;
    for _ in 0..200 {
        let wit = dictionary::subspace_witness(sub, &energy.gradient(&x)?)?;
        if wit.sigma <= config.line_tol * (1.0 + sigma0) {
            break;
        }
        let (t, _) = line_minimize(energy, &x, &wit.w, config.line_tol, config.bracket_growth)?;
        let next = x.axpy(t, &wit.w)?;
        if energy.value(&next)? > energy.value(&x)? {
            break;
        }
        x = next;
    }
    x.sub(u)
}

/// One step from `u`. `grad` must be `E'(u)`.
fn step_with_gradient(
    energy: &EnergyModel,
    dict: &Dictionary,
    u: &SpaceVector,
    grad: &SpaceVector,
    config: &GreedyConfig,
) -> Result<StepRecord> {
    let e0 = energy.value(u)?;
    let witness = dictionary::sigma_witness(dict, grad)?;
    let zero = || StepRecord {
        sigma: witness.sigma,
        step: energy.space().zeros(),
        step_norm: 0.0,
        energy_before: e0,
        energy_after: e0,
    };
    let step = match config.mode {
        StepMode::SigmaLine => {
            if witness.sigma == 0.0 {
                return Ok(zero());
            }
            let (t, _) = line_minimize(energy, u, &witness.w, config.line_tol, config.bracket_growth)?;
            witness.w.scale(t)
        }
        StepMode::ExactUnion => {
            let candidates: Vec<SpaceVector> = match dict.kind() {
                DictionaryKind::FiniteAtoms(data) => data
                    .atoms()
                    .iter()
                    .map(|k| {
                        line_minimize(energy, u, k, config.line_tol, config.bracket_growth)
                            .map(|(t, _)| k.scale(t))
                    })
                    .collect::<Result<_>>()?,
                DictionaryKind::SubspaceUnion(data) => data
                    .subspaces()
                    .iter()
                    .map(|sub| minimize_on_subspace(energy, sub, u, config))
                    .collect::<Result<_>>()?,
                _ => {
                    return Err(Error::Config(format!(
                        "exact-union mode needs finite atoms or a subspace union, not {}",
                        dict.kind_name()
                    )))
                }
            };
            let mut best: Option<(f64, SpaceVector)> = None;
            for z in candidates {
                let e = energy.value(&u.add(&z)?)?;
                if best.as_ref().is_none_or(|(be, _)| e < *be) {
                    best = Some((e, z));
                }
            }
            match best {
                Some((e, z)) if e <= e0 => z,
                _ => return Ok(zero()),
            }
        }
    };
    let energy_after = energy.value(&u.add(&step)?)?;
    Ok(StepRecord {
        sigma: witness.sigma,
        step_norm: step.norm(),
        step,
        energy_before: e0,
        energy_after,
    })
}

/// One greedy step `u ↦ u + z`.
pub fn greedy_step(
    energy: &EnergyModel,
    dict: &Dictionary,
    u: &SpaceVector,
    config: &GreedyConfig,
) -> Result<(SpaceVector, StepRecord)> {
    if !u.is_finite() {
        return Err(Error::RejectedInput("iterate has non-finite coefficients".into()));
    }
    let rec = step_with_gradient(energy, dict, u, &energy.gradient(u)?, config)?;
    Ok((u.add(&rec.step)?, rec))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    SigmaStop,
    FlatStep,
    MaxIter,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::SigmaStop => "sigma_stop",
            Termination::FlatStep => "flat_step",
            Termination::MaxIter => "max_iter",
        }
    }
}

/// Row `m`: state at `u_m` and the step `z = u_{m+1} - u_m` taken from it.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub m: usize,
    pub energy: f64,
    pub gap: Option<f64>,
    pub sigma: f64,
    pub step_norm: f64,
    /// `⟨E'(u_{m+1}), z⟩`
    pub orth_residual: f64,
    /// `Σ_{k <= m} ‖z_k‖^s`
    pub cum_step_s: f64,
    /// `‖E'(u_m)‖_*`
    pub grad_norm: f64,
    pub iterate_norm: f64,
    /// `‖u_m - u*‖` when the minimizer is known.
    pub error_norm: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct GreedyTrace {
    pub rows: Vec<TraceRow>,
    pub final_iterate: SpaceVector,
    pub termination: Termination,
    /// Ellipticity exponent used for `cum_step_s`.
    pub s: f64,
    pub minimizer_energy: Option<f64>,
}

pub const TRACE_HEADER: [&str; 7] =
    ["m", "energy", "gap", "sigma", "step_norm", "orth_residual", "cum_step_s"];

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

impl GreedyTrace {
    pub fn energies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.energy).collect()
    }

    pub fn gaps(&self) -> Option<Vec<f64>> {
        self.rows.iter().map(|r| r.gap).collect()
    }

    pub fn iterations(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Config(format!("writing trace: {e}"));
        w.write_record(TRACE_HEADER).map_err(err)?;
        for r in &self.rows {
            w.write_record([
                r.m.to_string(),
                fmt17(r.energy),
                r.gap.map(fmt17).unwrap_or_default(),
                fmt17(r.sigma),
                fmt17(r.step_norm),
                fmt17(r.orth_residual),
                fmt17(r.cum_step_s),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| Error::Config(format!("writing trace: {e}")))?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

fn flat_threshold(e0: f64) -> f64 {
    1e-15 * (1.0 + e0.abs())
}

/// Greedy sequence from `u_0 = 0`.
pub fn run_greedy(energy: &EnergyModel, dict: &Dictionary, config: &GreedyConfig) -> Result<GreedyTrace> {
    config.validate()?;
    if !dict.space().same_as(energy.space()) {
        return Err(Error::Structural("dictionary and energy live in different spaces".into()));
    }
    let s = energy.params().s;
    let reference = energy.reference_minimizer().cloned();
    let e_star = reference.as_ref().map(|r| energy.value(r)).transpose()?;

    let mut u = energy.space().zeros();
    let mut grad = energy.gradient(&u)?;
    let mut energy_u = energy.value(&u)?;
    let e_first = energy_u;
    let mut cum = 0.0;
    let mut rows = Vec::new();

    let row = |m: usize, u: &SpaceVector, e: f64, grad: &SpaceVector, sigma: f64| -> Result<TraceRow> {
        Ok(TraceRow {
            m,
            energy: e,
            gap: e_star.map(|es| e - es),
            sigma,
            step_norm: 0.0,
            orth_residual: 0.0,
            cum_step_s: 0.0,
            grad_norm: grad.dual_norm(),
            iterate_norm: u.norm(),
            error_norm: reference.as_ref().map(|r| u.sub(r).map(|d| d.norm())).transpose()?,
        })
    };

    let termination = loop {
        let m = rows.len();
        let rec = step_with_gradient(energy, dict, &u, &grad, config)?;
        let mut current = row(m, &u, energy_u, &grad, rec.sigma)?;
        current.cum_step_s = cum;
        if rec.sigma <= config.sigma_stop {
            rows.push(current);
            break Termination::SigmaStop;
        }
        if m == config.max_iter {
            rows.push(current);
            break Termination::MaxIter;
        }
        if rec.energy_after > energy_u || rec.step_norm == 0.0 {
            rows.push(current);
            break Termination::FlatStep;
        }
        let next = u.add(&rec.step)?;
        let next_grad = energy.gradient(&next)?;
        cum += rec.step_norm.powf(s);
        current.step_norm = rec.step_norm;
        current.orth_residual = next_grad.pair(&rec.step)?;
        current.cum_step_s = cum;
        rows.push(current);
        let flat = energy_u - rec.energy_after < flat_threshold(e_first);
        u = next;
        grad = next_grad;
        energy_u = rec.energy_after;
        if flat {
            let sigma = dictionary::sigma_witness(dict, &grad)?.sigma;
            let mut last = row(m + 1, &u, energy_u, &grad, sigma)?;
            last.cum_step_s = cum;
            rows.push(last);
            break Termination::FlatStep;
        }
    };

    Ok(GreedyTrace { rows, final_iterate: u, termination, s, minimizer_energy: e_star })
}

/// Result of one invariant check over a trace.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub checked: usize,
    pub violations: usize,
    /// Largest normalized excess `(lhs - rhs) / scale`; `<= 0` means slack.
    pub worst_excess: f64,
    pub first_violation: Option<usize>,
}

impl CheckReport {
    pub(crate) fn new(name: &'static str) -> Self {
        Self { name, checked: 0, violations: 0, worst_excess: f64::NEG_INFINITY, first_violation: None }
    }

    pub(crate) fn record(&mut self, index: usize, lhs: f64, rhs: f64, scale: f64) {
        self.checked += 1;
        let excess = (lhs - rhs) / scale.max(f64::MIN_POSITIVE);
        if excess.is_nan() || lhs > rhs {
            self.violations += 1;
            self.first_violation.get_or_insert(index);
        }
        if excess > self.worst_excess || excess.is_nan() {
            self.worst_excess = excess;
        }
    }

    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

/// `E(u_{m+1}) <= E(u_m) - β σ(u_m)^{1+1/p}` up to `1e-10 (|E(u_0)| + |E(u_m)|)`.
pub fn check_one_step_bound(trace: &GreedyTrace, beta: f64, p: f64) -> CheckReport {
    let mut rep = CheckReport::new("one_step_bound");
    let e0 = trace.rows[0].energy;
    for pair in trace.rows.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let slack = 1e-10 * (e0.abs() + a.energy.abs());
        let bound = a.energy - beta * a.sigma.powf(1.0 + 1.0 / p);
        rep.record(a.m, b.energy, bound + slack, a.energy.abs().max(1.0));
    }
    rep
}

/// `|⟨E'(u_{m+1}), z_m⟩| <= tol (1 + ‖E'(u_{m+1})‖_*) ‖z_m‖`.
pub fn check_orthogonality(trace: &GreedyTrace, tol: f64) -> CheckReport {
    let mut rep = CheckReport::new("orthogonality");
    for pair in trace.rows.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let rhs = tol * (1.0 + b.grad_norm) * a.step_norm;
        rep.record(a.m, a.orth_residual.abs(), rhs, rhs.max(f64::MIN_POSITIVE));
    }
    rep
}

/// `Σ_{m>=l} ‖z_m‖^s <= (s/α)(E(u_l) - E(u_M))` for every `l`.
///
/// Also returns the ratio lhs/rhs at `l = 0`, which measures tightness.
pub fn check_telescoping(trace: &GreedyTrace, alpha: f64, s: f64) -> (CheckReport, f64) {
    let mut rep = CheckReport::new("telescoping");
    let e0 = trace.rows[0].energy;
    let e_last = trace.rows.last().expect("nonempty").energy;
    let mut suffix = 0.0;
    let mut tight = f64::NAN;
    for r in trace.rows.iter().rev() {
        suffix += r.step_norm.powf(s);
        let rhs = s / alpha * (r.energy - e_last);
        let slack = 1e-10 * (e0.abs() + r.energy.abs() + e_last.abs()) * s / alpha;
        rep.record(r.m, suffix, rhs + slack, rhs.abs().max(suffix).max(1e-300));
        if r.m == 0 {
            tight = if rhs > 0.0 { suffix / rhs } else { f64::NAN };
        }
    }
    (rep, tight)
}

/// Energy non-increasing and gaps not below `-1e-12` of the energy scale.
pub fn check_monotone(trace: &GreedyTrace) -> CheckReport {
    let mut rep = CheckReport::new("monotone");
    let scale = trace.rows.iter().map(|r| r.energy.abs()).fold(0.0, f64::max).max(1e-300);
    for pair in trace.rows.windows(2) {
        rep.record(pair[0].m, pair[1].energy, pair[0].energy, scale);
    }
    for r in &trace.rows {
        if let Some(g) = r.gap {
            rep.record(r.m, -g, 1e-12 * scale, scale);
        }
    }
    rep
}

/// `‖u_m - u*‖ <= (s/α)^{1/s} gap_m^{1/s} (1 + eps)`.
///
/// Gaps are floored at `1e-12` of the energy scale: both `E(u_m)` and the
/// reference energy carry rounding errors of that order.
pub fn check_iterate_error(trace: &GreedyTrace, alpha: f64, s: f64, eps: f64) -> CheckReport {
    let mut rep = CheckReport::new("iterate_error");
    let scale = trace.rows[0].energy.abs() + trace.minimizer_energy.unwrap_or(0.0).abs();
    for r in &trace.rows {
        let (Some(err), Some(gap)) = (r.error_norm, r.gap) else {
            continue;
        };
        let gap = gap.max(0.0) + 1e-12 * scale;
        let bound = (s / alpha * gap).powf(1.0 / s) * (1.0 + eps);
        rep.record(r.m, err, bound, bound.max(err));
    }
    rep
}

/// `‖u*‖ + (s (E(0) - E(u*)) / α)^{1/s}`: every iterate has energy at most
/// `E(0)`, so ellipticity confines it to this ball.
pub fn coercivity_radius(trace: &GreedyTrace, alpha: f64, s: f64) -> Option<f64> {
    let gap0 = trace.rows[0].gap?;
    let center = trace.rows.last()?.iterate_norm.max(0.0);
    let err_last = trace.rows.last()?.error_norm?;
    // ‖u*‖ <= ‖u_M‖ + ‖u_M - u*‖
    Some(center + err_last + (s / alpha * gap0.max(0.0)).powf(1.0 / s))
}

/// `max_m ‖u_m‖ <= radius`.
pub fn check_bounded(trace: &GreedyTrace, radius: f64) -> CheckReport {
    let mut rep = CheckReport::new("bounded");
    for r in &trace.rows {
        rep.record(r.m, r.iterate_norm, radius * (1.0 + 1e-12), radius);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{power_energy, quadratic_energy, SpdOperator};
    use crate::vectorspace::Space;

    fn quad_axes() -> (EnergyModel, Dictionary) {
        let s = Space::unit(2, 2.0).unwrap();
        let e = quadratic_energy(SpdOperator::identity(&s), &s.vector(vec![3.0, 4.0]).unwrap()).unwrap();
        (e, Dictionary::axes(&s).unwrap())
    }

    #[test]
    fn closed_form_line_example() {
        let (e, _) = quad_axes();
        let s = e.space().clone();
        let (t, v) = line_minimize(&e, &s.zeros(), &s.unit_coordinate(1), 1e-12, 2.0).unwrap();
        assert_eq!(t, 4.0);
        assert_eq!(v, -8.0);
    }

    #[test]
    fn two_axis_steps_reach_minimizer() {
        let (e, d) = quad_axes();
        let trace = run_greedy(&e, &d, &GreedyConfig::default()).unwrap();
        assert_eq!(trace.rows.len(), 3);
        let gaps = trace.gaps().unwrap();
        assert_eq!(gaps, vec![12.5, 4.5, 0.0]);
        assert_eq!(trace.final_iterate.coeffs(), &[3.0, 4.0]);
        assert_eq!(trace.termination, Termination::SigmaStop);
        assert_eq!(trace.rows[0].orth_residual, 0.0);
    }

    #[test]
    fn full_space_quadratic_identity_takes_one_step() {
        let (e, _) = quad_axes();
        let d = Dictionary::full_space(e.space());
        let trace = run_greedy(&e, &d, &GreedyConfig::default()).unwrap();
        assert_eq!(trace.iterations(), 1);
        assert!(trace.rows[1].gap.unwrap().abs() < 1e-14);
    }

    #[test]
    fn stationary_start_gives_zero_step() {
        let (e, d) = quad_axes();
        let u = e.reference_minimizer().unwrap().clone();
        let (next, rec) = greedy_step(&e, &d, &u, &GreedyConfig::default()).unwrap();
        assert_eq!(rec.sigma, 0.0);
        assert_eq!(next.coeffs(), u.coeffs());
    }

    #[test]
    fn line_search_matches_grid_scan() {
        let s = Space::unit(3, 1.5).unwrap();
        let target = s.vector(vec![1.0, -2.0, 0.5]).unwrap();
        let e = power_energy(&target, 0.5).unwrap();
        let u = s.vector(vec![0.2, 0.1, -0.3]).unwrap();
        let w = s.vector(vec![1.0, -1.0, 0.5]).unwrap().normalized().unwrap();
        let (t, _) = line_minimize(&e, &u, &w, 1e-12, 2.0).unwrap();
        let h = 1e-4;
        let grid = (0..100_000)
            .map(|k| -5.0 + k as f64 * h)
            .map(|t| (t, e.value(&u.axpy(t, &w).unwrap()).unwrap()))
            .fold((0.0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
        assert!((t - grid.0).abs() <= h, "{t} vs {}", grid.0);
        assert!(slope(&e, &u, &w, t).unwrap().abs() < 1e-10);
    }

    #[test]
    fn exact_union_needs_finite_union() {
        let (e, _) = quad_axes();
        let d = Dictionary::cone(e.space(), 0.5).unwrap();
        let cfg = GreedyConfig { mode: StepMode::ExactUnion, ..Default::default() };
        assert!(matches!(greedy_step(&e, &d, &e.space().zeros(), &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn csv_has_schema_header() {
        let (e, d) = quad_axes();
        let trace = run_greedy(&e, &d, &GreedyConfig::default()).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("m,energy,gap,sigma,step_norm,orth_residual,cum_step_s"));
        assert_eq!(lines.count(), 3);
        assert!(text.contains("1.2500000000000000e1"));
    }
}
