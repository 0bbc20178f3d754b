//! Convex energies with exact gradients and declared smoothness metadata.
//!
//! Three families are provided:
//!
//! * [`power_energy`]: `E(f) = (1/(p+1)) Σ w_i |f_i - t_i|^{p+1}` on a `q = p+1` space,
//! * [`quadratic_energy`]: `E(u) = ½⟨Au, u⟩ - ⟨b, u⟩` for an operator SPD w.r.t. the
//!   weighted pairing,
//! * [`plaplacian_energy`]: the 1-D finite-difference `p`-Laplacian with homogeneous
//!   Dirichlet data and a load term.
//!
//! Gradients are returned as dual coefficients, i.e. `∂E/∂u_i = w_i g_i`.

mod estimate;
mod operator;

pub use estimate::{
    check_gradient, default_region_radius, estimate_ellipticity, estimate_smoothness,
    ExponentEstimate, GradientCheck, PairSample,
};
pub use operator::SpdOperator;

use crate::error::{Error, Result};
use crate::vectorspace::{Space, SpaceVector};

/// Whether the Hölder bound on the gradient is global or only on bounded sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Global,
    Bounded,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Global => "global",
            Mode::Bounded => "bounded",
        }
    }
}

/// Exponents and constants of the smoothness and ellipticity assumptions.
///
/// `lip` and `alpha` are `None` when no certified value exists; callers then
/// fall back to the empirical estimators.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothnessParams {
    pub p: f64,
    pub s: f64,
    pub lip: Option<f64>,
    pub alpha: Option<f64>,
    pub mode: Mode,
}

const EXPONENT_TOL: f64 = 1e-9;

impl SmoothnessParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::Parameter(format!("Hölder exponent p = {} outside (0, 1]", self.p)));
        }
        if !(self.s > 1.0 && self.s.is_finite()) {
            return Err(Error::Parameter(format!("ellipticity order s = {} must exceed 1", self.s)));
        }
        if let Some(l) = self.lip {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::Parameter(format!("Hölder constant {l} must be positive")));
            }
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Parameter(format!("ellipticity constant {a} must be positive")));
            }
        }
        match self.mode {
            Mode::Bounded if self.s < self.p + 1.0 - EXPONENT_TOL => Err(Error::Inconsistent(format!(
                "s = {} < p + 1 = {}: a Hölder-smooth, elliptic energy must have s >= p + 1",
                self.s,
                self.p + 1.0
            ))),
            Mode::Global if (self.s - self.p - 1.0).abs() > EXPONENT_TOL => {
                Err(Error::Inconsistent(format!(
                    "s = {} but p + 1 = {}: a globally Hölder-smooth, elliptic energy must have s = p + 1",
                    self.s,
                    self.p + 1.0
                )))
            }
            _ => Ok(()),
        }
    }
}

/// How a stored minimizer was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverTag {
    ClosedForm,
    Cholesky,
    DampedNewton,
}

impl SolverTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverTag::ClosedForm => "closed_form",
            SolverTag::Cholesky => "cholesky",
            SolverTag::DampedNewton => "damped_newton",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Reference {
    pub point: SpaceVector,
    pub solver: SolverTag,
}

#[derive(Clone, Debug)]
enum Kind {
    Power { target: SpaceVector, p: f64 },
    Quadratic { op: SpdOperator, source: SpaceVector },
    PLaplacian { q_exp: f64, h: f64, source: SpaceVector },
}

#[derive(Clone, Debug)]
pub struct EnergyModel {
    space: Space,
    kind: Kind,
    params: SmoothnessParams,
    reference: Option<Reference>,
}

/// `(1 + 2^{1/p})^{p/(p+1)}`, the global Hölder constant of `|f|^{p-1} f`.
pub fn power_hoelder_constant(p: f64) -> f64 {
    (1.0 + 2f64.powf(1.0 / p)).powf(p / (p + 1.0))
}

/// `E(f) = (1/(p+1)) Σ w_i |f_i - t_i|^{p+1}`; minimizer `target`.
pub fn power_energy(target: &SpaceVector, p: f64) -> Result<EnergyModel> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Parameter(format!("power energy needs 0 < p <= 1, got {p}")));
    }
    let space = target.space().clone();
    if (space.q() - (p + 1.0)).abs() > 1e-12 {
        return Err(Error::Parameter(format!(
            "power energy with p = {p} lives in L^{}, but the space has q = {}",
            p + 1.0,
            space.q()
        )));
    }
    let params = SmoothnessParams {
        p,
        s: p + 1.0,
        lip: Some(power_hoelder_constant(p)),
        alpha: None,
        mode: Mode::Global,
    };
    Ok(EnergyModel {
        reference: Some(Reference { point: target.clone(), solver: SolverTag::ClosedForm }),
        space,
        kind: Kind::Power { target: target.clone(), p },
        params,
    })
}

/// `E(u) = ½⟨Au, u⟩ - ⟨source, u⟩` on a `q = 2` space.
pub fn quadratic_energy(op: SpdOperator, source: &SpaceVector) -> Result<EnergyModel> {
    let space = source.space().clone();
    if space.q() != 2.0 {
        return Err(Error::Parameter(format!(
            "quadratic energy needs a q = 2 space, got q = {}",
            space.q()
        )));
    }
    if !op.space().same_as(&space) {
        return Err(Error::Structural("operator and source live in different spaces".into()));
    }
    let params = SmoothnessParams {
        p: 1.0,
        s: 2.0,
        lip: Some(op.lambda_max()),
        alpha: Some(op.lambda_min()),
        mode: Mode::Global,
    };
    let point = op.solve(source)?;
    Ok(EnergyModel {
        space,
        kind: Kind::Quadratic { op, source: source.clone() },
        params,
        reference: Some(Reference { point, solver: SolverTag::Cholesky }),
    })
}

/// Discrete `(1/q) Σ_edges h |Du|^q - Σ h f_i u_i` with `u_0 = u_{n+1} = 0`.
///
/// `source` must live on [`Space::dirichlet_grid`]`(grid_n, q_exp)`. The
/// reference minimizer is computed eagerly with [`solve_reference`].
///
/// The declared ellipticity constant is `α = 2` for every `q >= 2`:
/// `(|a|^{q-2}a - |b|^{q-2}b)(a - b) >= 2^{2-q}|a - b|^q` edge by edge, and a
/// grid function vanishing at both ends obeys `‖v‖_q^q <= 2^{1-q}‖Dv‖_q^q`
/// (Hölder along the shorter path to the boundary, which has length at most
/// 1/2). The Hölder constant of the gradient depends on the radius and is
/// left to estimation.
pub fn plaplacian_energy(grid_n: usize, q_exp: f64, source: &SpaceVector) -> Result<EnergyModel> {
    if !(q_exp >= 2.0 && q_exp.is_finite()) {
        return Err(Error::UnsupportedExponent(format!(
            "p-Laplacian exponent {q_exp} < 2 has no certified ellipticity constant"
        )));
    }
    if grid_n < 2 {
        return Err(Error::Parameter(format!("p-Laplacian grid needs n >= 2, got {grid_n}")));
    }
    let expected = Space::dirichlet_grid(grid_n, q_exp)?;
    if !source.space().same_as(&expected) {
        return Err(Error::Structural(format!(
            "p-Laplacian source must live on the n = {grid_n} Dirichlet grid with q = {q_exp}"
        )));
    }
    let mut model = EnergyModel {
        space: source.space().clone(),
        kind: Kind::PLaplacian { q_exp, h: 1.0 / (grid_n as f64 + 1.0), source: source.clone() },
        params: SmoothnessParams { p: 1.0, s: q_exp, lip: None, alpha: Some(2.0), mode: Mode::Bounded },
        reference: None,
    };
    let point = solve_reference(&model, 1e-11)?;
    model.reference = Some(Reference { point, solver: SolverTag::DampedNewton });
    Ok(model)
}

fn edge_differences(u: &[f64], h: f64) -> Vec<f64> {
    let n = u.len();
    (0..=n)
        .map(|j| {
            let right = if j < n { u[j] } else { 0.0 };
            let left = if j > 0 { u[j - 1] } else { 0.0 };
            (right - left) / h
        })
        .collect()
}

fn signed_power(d: f64, r: f64) -> f64 {
    if d == 0.0 {
        0.0
    } else {
        d.abs().powf(r) * d.signum()
    }
}

impl EnergyModel {
    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn params(&self) -> &SmoothnessParams {
        &self.params
    }

    pub fn reference(&self) -> Option<&Reference> {
        self.reference.as_ref()
    }

    pub fn reference_minimizer(&self) -> Option<&SpaceVector> {
        self.reference.as_ref().map(|r| &r.point)
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            Kind::Power { .. } => "power",
            Kind::Quadratic { .. } => "quadratic",
            Kind::PLaplacian { .. } => "plaplacian",
        }
    }

    /// Replace the declared smoothness metadata after validating it.
    pub fn with_declared_params(mut self, params: SmoothnessParams) -> Result<Self> {
        params.validate()?;
        self.params = params;
        Ok(self)
    }

    fn check(&self, x: &SpaceVector) -> Result<()> {
        if !x.space().same_as(&self.space) {
            return Err(Error::Structural("argument lives outside the energy's space".into()));
        }
        Ok(())
    }

    pub fn value(&self, x: &SpaceVector) -> Result<f64> {
        self.check(x)?;
        let w = self.space.weights();
        let xs = x.coeffs();
        Ok(match &self.kind {
            Kind::Power { target, p } => {
                let r = p + 1.0;
                xs.iter()
                    .zip(target.coeffs())
                    .zip(w)
                    .map(|((f, t), w)| w * (f - t).abs().powf(r))
                    .sum::<f64>()
                    / r
            }
            Kind::Quadratic { op, source } => {
                let ax = op.apply(x);
                0.5 * ax.pair_unchecked(x) - source.pair_unchecked(x)
            }
            Kind::PLaplacian { q_exp, h, source } => {
                let d = edge_differences(xs, *h);
                let stored: f64 = d.iter().map(|d| h * d.abs().powf(*q_exp)).sum::<f64>() / q_exp;
                stored - source.pair_unchecked(x)
            }
        })
    }

    pub fn gradient(&self, x: &SpaceVector) -> Result<SpaceVector> {
        self.check(x)?;
        let xs = x.coeffs();
        let coeffs: Vec<f64> = match &self.kind {
            Kind::Power { target, p } => xs
                .iter()
                .zip(target.coeffs())
                .map(|(f, t)| signed_power(f - t, *p))
                .collect(),
            Kind::Quadratic { op, source } => {
                return op.apply(x).sub(source);
            }
            Kind::PLaplacian { q_exp, h, source } => {
                let d = edge_differences(xs, *h);
                let flux: Vec<f64> = d.iter().map(|d| signed_power(*d, q_exp - 1.0)).collect();
                (0..xs.len())
                    .map(|i| (flux[i] - flux[i + 1]) / h - source.coeffs()[i])
                    .collect()
            }
        };
        self.space.vector(coeffs)
    }

    /// Coordinates where the gradient is not differentiable within `h` of `x`.
    pub fn nonsmooth_coords(&self, x: &SpaceVector, h: f64) -> Vec<usize> {
        match &self.kind {
            Kind::Power { target, p } if *p < 1.0 => x
                .coeffs()
                .iter()
                .zip(target.coeffs())
                .enumerate()
                .filter(|(_, (f, t))| (*f - *t).abs() <= 2.0 * h)
                .map(|(i, _)| i)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Point about which the non-linear part of the energy is positively
    /// homogeneous (the shift for the power energy, the origin otherwise).
    pub fn homogeneity_center(&self) -> SpaceVector {
        match &self.kind {
            Kind::Power { target, .. } => target.clone(),
            _ => self.space.zeros(),
        }
    }

    /// Exact minimizer of `t ↦ E(u + t w)` when the energy is quadratic.
    pub fn closed_form_line(&self, u: &SpaceVector, w: &SpaceVector) -> Option<Result<f64>> {
        match &self.kind {
            Kind::Quadratic { op, source } => Some((|| {
                let aw = op.apply(w);
                let curv = aw.pair(w)?;
                if !(curv > 0.0) {
                    return Err(Error::EllipticityViolated(format!(
                        "non-positive curvature {curv} along search line"
                    )));
                }
                let residual = source.sub(&op.apply(u))?;
                Ok(residual.pair(w)? / curv)
            })()),
            _ => None,
        }
    }

    /// Parameters `t` at which `t ↦ E'(u + t w)` has a kink (the power
    /// energy with `p < 1` at coordinates reaching the target).
    pub fn line_kinks(&self, u: &SpaceVector, w: &SpaceVector) -> Vec<f64> {
        match &self.kind {
            Kind::Power { target, p } if *p < 1.0 => u
                .coeffs()
                .iter()
                .zip(w.coeffs())
                .zip(target.coeffs())
                .filter(|((_, wi), _)| **wi != 0.0)
                .map(|((ui, wi), ti)| (ti - ui) / wi)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// `(A, b)` when the energy is quadratic.
    pub fn quadratic_parts(&self) -> Option<(&SpdOperator, &SpaceVector)> {
        match &self.kind {
            Kind::Quadratic { op, source } => Some((op, source)),
            _ => None,
        }
    }
}

/// Minimizer with `dual_norm(E'(u)) <= tol`.
///
/// Closed form for the power energy, a Cholesky solve for quadratics, and a
/// damped Newton iteration (tridiagonal Hessian, Armijo backtracking) for the
/// `p`-Laplacian, started from the `q = 2` solution.
pub fn solve_reference(energy: &EnergyModel, tol: f64) -> Result<SpaceVector> {
    let u = match &energy.kind {
        Kind::Power { target, .. } => target.clone(),
        Kind::Quadratic { op, source } => op.solve(source)?,
        Kind::PLaplacian { q_exp, h, source } => {
            return newton_plaplacian(energy, *q_exp, *h, source, tol);
        }
    };
    let res = energy.gradient(&u)?.dual_norm();
    if res > tol {
        return Err(Error::Convergence { iterations: 0, residual: res });
    }
    Ok(u)
}

fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    // symmetric: sub = super = off
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 {
        return None;
    }
    if n > 1 {
        c[0] = off[0] / denom;
    }
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - off[i - 1] * c[i - 1];
        if denom == 0.0 || !denom.is_finite() {
            return None;
        }
        if i < n - 1 {
            c[i] = off[i] / denom;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}

fn newton_plaplacian(
    energy: &EnergyModel,
    q_exp: f64,
    h: f64,
    source: &SpaceVector,
    tol: f64,
) -> Result<SpaceVector> {
    const MAX_ITER: usize = 500;
    let space = energy.space();
    let n = space.dim();

    // q = 2 initial guess: (1/h) L u = h f with L = tridiag(-1, 2, -1)
    let rhs: Vec<f64> = source.coeffs().iter().map(|f| h * f).collect();
    let init = solve_tridiagonal(&vec![2.0 / h; n], &vec![-1.0 / h; n.saturating_sub(1)], &rhs)
        .ok_or_else(|| Error::Parameter("singular Dirichlet Laplacian".into()))?;
    let mut u = space.vector(init)?;
    let mut e = energy.value(&u)?;
    let mut g = energy.gradient(&u)?;
    let mut res = g.dual_norm();

    for it in 0..MAX_ITER {
        if res <= tol {
            return Ok(u);
        }
        let d = edge_differences(u.coeffs(), h);
        let curv: Vec<f64> = d.iter().map(|d| (q_exp - 1.0) * d.abs().powf(q_exp - 2.0)).collect();
        let cmax = curv.iter().cloned().fold(0.0_f64, f64::max).max(1.0);
        let curv: Vec<f64> = curv.iter().map(|c| c.max(1e-10 * cmax)).collect();
        let diag: Vec<f64> = (0..n).map(|i| (curv[i] + curv[i + 1]) / h).collect();
        let off: Vec<f64> = (0..n.saturating_sub(1)).map(|i| -curv[i + 1] / h).collect();
        // unweighted gradient is h * g
        let rhs: Vec<f64> = g.coeffs().iter().map(|gi| -h * gi).collect();
        let step = solve_tridiagonal(&diag, &off, &rhs)
            .ok_or(Error::Convergence { iterations: it, residual: res })?;
        let step = space.vector(step)?;
        let slope = g.pair(&step)?;

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let cand = u.axpy(t, &step)?;
            let ec = energy.value(&cand)?;
            if ec <= e + 1e-4 * t * slope {
                accepted = Some((cand, ec));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, ec)) = accepted else {
            // the energy no longer resolves the step; accept if the residual still improves
            let cand = u.axpy(t, &step)?;
            let gc = energy.gradient(&cand)?;
            if gc.dual_norm() < res {
                u = cand;
                e = energy.value(&u)?;
                g = gc;
                res = g.dual_norm();
                continue;
            }
            return Err(Error::Convergence { iterations: it, residual: res });
        };
        u = cand;
        e = ec;
        g = energy.gradient(&u)?;
        res = g.dual_norm();
    }
    if res <= tol {
        Ok(u)
    } else {
        Err(Error::Convergence { iterations: MAX_ITER, residual: res })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(space: &Space, c: &[f64]) -> SpaceVector {
        space.vector(c.to_vec()).unwrap()
    }

    #[test]
    fn power_energy_at_target_is_flat() {
        let s = Space::uniform(4, 1.5, 1.0).unwrap();
        let t = v(&s, &[0.3, -1.0, 2.0, 0.0]);
        let e = power_energy(&t, 0.5).unwrap();
        assert_eq!(e.value(&t).unwrap(), 0.0);
        assert!(e.gradient(&t).unwrap().is_zero());
    }

    #[test]
    fn power_energy_scalar_example() {
        let s = Space::unit(1, 1.5).unwrap();
        let e = power_energy(&s.zeros(), 0.5).unwrap();
        let f = v(&s, &[4.0]);
        assert!((e.value(&f).unwrap() - 16.0 / 3.0).abs() < 1e-14);
        assert!((e.gradient(&f).unwrap().coeffs()[0] - 2.0).abs() < 1e-14);
        let h = 1e-6;
        let fd = (e.value(&v(&s, &[4.0 + h])).unwrap() - e.value(&v(&s, &[4.0 - h])).unwrap())
            / (2.0 * h);
        assert!((fd - 2.0).abs() < 1e-8);
    }

    #[test]
    fn power_energy_parameter_errors() {
        let s = Space::unit(2, 2.5).unwrap();
        assert!(matches!(power_energy(&s.zeros(), 1.5), Err(Error::Parameter(_))));
        assert!(matches!(power_energy(&s.zeros(), 0.0), Err(Error::Parameter(_))));
        // q must equal p + 1
        assert!(matches!(power_energy(&s.zeros(), 0.5), Err(Error::Parameter(_))));
    }

    #[test]
    fn power_energy_declares_global_constant() {
        let s = Space::unit(2, 1.5).unwrap();
        let e = power_energy(&s.zeros(), 0.5).unwrap();
        let p = e.params();
        assert_eq!(p.mode, Mode::Global);
        assert_eq!(p.s, 1.5);
        assert!((p.lip.unwrap() - 5f64.powf(1.0 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn quadratic_identity_examples() {
        let s = Space::unit(2, 2.0).unwrap();
        let op = SpdOperator::identity(&s);
        let e = quadratic_energy(op.clone(), &s.zeros()).unwrap();
        let u = v(&s, &[3.0, 4.0]);
        assert_eq!(e.value(&u).unwrap(), 12.5);
        assert_eq!(e.gradient(&u).unwrap().coeffs(), &[3.0, 4.0]);

        let t = v(&s, &[3.0, 4.0]);
        let e = quadratic_energy(op, &t).unwrap();
        let ustar = e.reference_minimizer().unwrap();
        assert_eq!(ustar.coeffs(), &[3.0, 4.0]);
        assert_eq!(e.value(ustar).unwrap(), -0.5 * t.pair(&t).unwrap());
        let p = e.params();
        assert_eq!((p.p, p.s, p.lip, p.alpha), (1.0, 2.0, Some(1.0), Some(1.0)));
    }

    #[test]
    fn quadratic_rejects_wrong_exponent() {
        let s = Space::unit(2, 3.0).unwrap();
        let op = SpdOperator::identity(&s);
        assert!(matches!(quadratic_energy(op, &s.zeros()), Err(Error::Parameter(_))));
    }

    #[test]
    fn plaplacian_rejects_small_exponent() {
        let s = Space::dirichlet_grid(8, 1.5).unwrap();
        assert!(matches!(
            plaplacian_energy(8, 1.5, &s.zeros()),
            Err(Error::UnsupportedExponent(_))
        ));
    }

    #[test]
    fn plaplacian_zero_state() {
        let s = Space::dirichlet_grid(8, 3.0).unwrap();
        let e = plaplacian_energy(8, 3.0, &s.zeros()).unwrap();
        assert_eq!(e.value(&s.zeros()).unwrap(), 0.0);
        assert!(e.gradient(&s.zeros()).unwrap().is_zero());
        assert!(e.reference_minimizer().unwrap().is_zero());
    }

    #[test]
    fn plaplacian_reference_residual() {
        let s = Space::dirichlet_grid(16, 3.0).unwrap();
        let f = v(&s, &[1.0; 16]);
        let e = plaplacian_energy(16, 3.0, &f).unwrap();
        let u = solve_reference(&e, 1e-10).unwrap();
        assert!(e.gradient(&u).unwrap().dual_norm() <= 1e-10);
        // symmetric load gives a symmetric, positive solution
        let c = u.coeffs();
        for i in 0..16 {
            assert!(c[i] > 0.0);
            assert!((c[i] - c[15 - i]).abs() < 1e-10);
        }
    }

    #[test]
    fn exponent_relation_gate() {
        let bad = SmoothnessParams { p: 1.0, s: 1.5, lip: None, alpha: None, mode: Mode::Bounded };
        assert!(matches!(bad.validate(), Err(Error::Inconsistent(_))));
        let bad = SmoothnessParams { p: 0.5, s: 3.0, lip: None, alpha: None, mode: Mode::Global };
        assert!(matches!(bad.validate(), Err(Error::Inconsistent(_))));
        let ok = SmoothnessParams { p: 1.0, s: 3.0, lip: None, alpha: None, mode: Mode::Bounded };
        assert!(ok.validate().is_ok());
        let bad = SmoothnessParams { p: 1.2, s: 3.0, lip: None, alpha: None, mode: Mode::Bounded };
        assert!(matches!(bad.validate(), Err(Error::Parameter(_))));
    }

    #[test]
    fn tridiagonal_solver_matches_dense() {
        let diag = [4.0, 5.0, 6.0, 7.0];
        let off = [-1.0, -2.0, -0.5];
        let x = [1.0, -2.0, 0.5, 3.0];
        let rhs: Vec<f64> = (0..4)
            .map(|i| {
                let mut r = diag[i] * x[i];
                if i > 0 {
                    r += off[i - 1] * x[i - 1];
                }
                if i < 3 {
                    r += off[i] * x[i + 1];
                }
                r
            })
            .collect();
        let sol = solve_tridiagonal(&diag, &off, &rhs).unwrap();
        for i in 0..4 {
            assert!((sol[i] - x[i]).abs() < 1e-14);
        }
    }
}
