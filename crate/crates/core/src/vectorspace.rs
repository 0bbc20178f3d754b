//! Weighted sequence spaces standing in for `L^q(Ω)` and `ℓ^q`.
//!
//! A [`Space`] fixes the quadrature weights and the exponent `q`; a
//! [`SpaceVector`] is a coefficient array living in one space. Dual elements
//! (gradients, functionals) use the same type: their coefficients are taken
//! with respect to the weighted pairing `⟨f, v⟩ = Σ w_i f_i v_i`, under which
//! the dual of the weighted `q`-norm is the weighted `q'`-norm.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Quadrature weights plus exponent. Cloning shares the weight buffer.
#[derive(Clone, Debug)]
pub struct Space {
    weights: Arc<[f64]>,
    q: f64,
}

impl Space {
    pub fn new(weights: Vec<f64>, q: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::RejectedInput("space needs at least one weight".into()));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::RejectedInput(format!(
                "weight {i} is {} (must be finite and positive)",
                weights[i]
            )));
        }
        if !(q.is_finite() && q > 1.0) {
            return Err(Error::RejectedInput(format!("exponent q = {q} must lie in (1, inf)")));
        }
        Ok(Self { weights: weights.into(), q })
    }

    /// Unit weights: plain `ℓ^q` on `n` coordinates.
    pub fn unit(n: usize, q: f64) -> Result<Self> {
        Self::new(vec![1.0; n], q)
    }

    /// Uniform quadrature `h = measure / n`.
    pub fn uniform(n: usize, q: f64, measure: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::RejectedInput("space needs at least one weight".into()));
        }
        Self::new(vec![measure / n as f64; n], q)
    }

    /// Interior nodes of a Dirichlet grid on (0,1): `h = 1/(n+1)`.
    pub fn dirichlet_grid(n: usize, q: f64) -> Result<Self> {
        Self::new(vec![1.0 / (n as f64 + 1.0); n], q)
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Conjugate exponent `q' = q/(q-1)`.
    pub fn dual_exponent(&self) -> f64 {
        self.q / (self.q - 1.0)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn same_as(&self, other: &Space) -> bool {
        if Arc::ptr_eq(&self.weights, &other.weights) {
            return self.q == other.q;
        }
        self.q == other.q && self.weights[..] == other.weights[..]
    }

    pub fn zeros(&self) -> SpaceVector {
        SpaceVector {
            space: self.clone(),
            coeffs: vec![0.0; self.dim()],
        }
    }

    pub fn vector(&self, coeffs: Vec<f64>) -> Result<SpaceVector> {
        if coeffs.len() != self.dim() {
            return Err(Error::Structural(format!(
                "expected {} coefficients, got {}",
                self.dim(),
                coeffs.len()
            )));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::RejectedInput(format!("coefficient {i} is {}", coeffs[i])));
        }
        Ok(SpaceVector { space: self.clone(), coeffs })
    }

    /// Coordinate vector `e_i` scaled to unit norm.
    pub fn unit_coordinate(&self, i: usize) -> SpaceVector {
        let mut v = self.zeros();
        v.coeffs[i] = self.weights[i].powf(-1.0 / self.q);
        v
    }

    /// Same weights, different exponent.
    pub fn with_exponent(&self, q: f64) -> Result<Space> {
        if !(q.is_finite() && q > 1.0) {
            return Err(Error::RejectedInput(format!("exponent q = {q} must lie in (1, inf)")));
        }
        Ok(Space { weights: self.weights.clone(), q })
    }
}

/// Coefficients of an element (or dual element) of a [`Space`].
#[derive(Clone, Debug)]
pub struct SpaceVector {
    space: Space,
    coeffs: Vec<f64>,
}

fn weighted_power_norm(coeffs: &[f64], weights: &[f64], r: f64) -> f64 {
    let scale = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = coeffs
        .iter()
        .zip(weights)
        .map(|(c, w)| w * (c.abs() / scale).powf(r))
        .sum();
    scale * sum.powf(1.0 / r)
}

impl SpaceVector {
    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    fn check_compatible(&self, other: &SpaceVector) -> Result<()> {
        if self.space.same_as(&other.space) {
            Ok(())
        } else {
            Err(Error::Structural(format!(
                "vectors live in different spaces (n = {} / {}, q = {} / {})",
                self.dim(),
                other.dim(),
                self.space.q,
                other.space.q
            )))
        }
    }

    /// Weighted `q`-norm `(Σ w_i |x_i|^q)^{1/q}`.
    pub fn norm(&self) -> f64 {
        weighted_power_norm(&self.coeffs, self.space.weights(), self.space.q)
    }

    /// Weighted `q'`-norm; the operator norm of `self` as a functional.
    pub fn dual_norm(&self) -> f64 {
        weighted_power_norm(&self.coeffs, self.space.weights(), self.space.dual_exponent())
    }

    /// Weighted Euclidean norm, independent of `q`.
    pub fn norm2(&self) -> f64 {
        weighted_power_norm(&self.coeffs, self.space.weights(), 2.0)
    }

    /// Duality pairing `Σ w_i f_i v_i` with `self` as the functional.
    pub fn pair(&self, v: &SpaceVector) -> Result<f64> {
        self.check_compatible(v)?;
        Ok(self.pair_unchecked(v))
    }

    pub(crate) fn pair_unchecked(&self, v: &SpaceVector) -> f64 {
        self.coeffs
            .iter()
            .zip(&v.coeffs)
            .zip(self.space.weights())
            .map(|((f, x), w)| w * f * x)
            .sum()
    }

    /// Unit vector `u` attaining `⟨self, u⟩ = dual_norm(self)`.
    pub fn dual_maximizer(&self) -> Result<SpaceVector> {
        let dn = self.dual_norm();
        if dn == 0.0 {
            return Err(Error::UndefinedDirection(
                "zero functional has no norming direction".into(),
            ));
        }
        let r = self.space.dual_exponent() - 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|f| f.signum() * (f.abs() / dn).powf(r))
            .map(|c| if c.is_nan() { 0.0 } else { c })
            .collect();
        Ok(SpaceVector { space: self.space.clone(), coeffs })
    }

    pub fn scale(&self, t: f64) -> SpaceVector {
        SpaceVector {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(|c| t * c).collect(),
        }
    }

    /// `self + t * other`.
    pub fn axpy(&self, t: f64, other: &SpaceVector) -> Result<SpaceVector> {
        self.check_compatible(other)?;
        Ok(SpaceVector {
            space: self.space.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + t * b)
                .collect(),
        })
    }

    pub fn add(&self, other: &SpaceVector) -> Result<SpaceVector> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &SpaceVector) -> Result<SpaceVector> {
        self.axpy(-1.0, other)
    }

    /// Same coefficients read in another space of equal dimension.
    pub fn with_space(&self, space: &Space) -> Result<SpaceVector> {
        space.vector(self.coeffs.clone())
    }

    /// Normalized copy; errors on the zero vector.
    pub fn normalized(&self) -> Result<SpaceVector> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::UndefinedDirection("cannot normalize the zero vector".into()));
        }
        Ok(self.scale(1.0 / n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(space: &Space, c: &[f64]) -> SpaceVector {
        space.vector(c.to_vec()).unwrap()
    }

    #[test]
    fn euclidean_three_four_five() {
        let s = Space::unit(2, 2.0).unwrap();
        assert!((v(&s, &[3.0, 4.0]).norm() - 5.0).abs() < 1e-15);
    }

    #[test]
    fn quarter_weights_unit_norm() {
        let s = Space::new(vec![0.25; 4], 4.0).unwrap();
        assert!((v(&s, &[1.0; 4]).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_vector_has_zero_norm() {
        let s = Space::unit(5, 3.0).unwrap();
        assert_eq!(s.zeros().norm(), 0.0);
        assert_eq!(s.zeros().dual_norm(), 0.0);
    }

    #[test]
    fn non_finite_coefficients_rejected() {
        let s = Space::unit(2, 2.0).unwrap();
        assert!(matches!(s.vector(vec![1.0, f64::NAN]), Err(Error::RejectedInput(_))));
        assert!(matches!(s.vector(vec![f64::INFINITY, 0.0]), Err(Error::RejectedInput(_))));
    }

    #[test]
    fn invalid_spaces_rejected() {
        assert!(Space::new(vec![1.0, 0.0], 2.0).is_err());
        assert!(Space::new(vec![1.0], 1.0).is_err());
        assert!(Space::new(vec![1.0], f64::INFINITY).is_err());
        assert!(Space::new(vec![], 2.0).is_err());
    }

    #[test]
    fn pairing_examples() {
        let s = Space::unit(2, 2.0).unwrap();
        assert_eq!(v(&s, &[1.0, 0.0]).pair(&v(&s, &[0.0, 1.0])).unwrap(), 0.0);
        assert_eq!(v(&s, &[2.0, 3.0]).pair(&v(&s, &[1.0, 1.0])).unwrap(), 5.0);
    }

    #[test]
    fn mismatched_spaces_are_structural_errors() {
        let a = Space::unit(2, 2.0).unwrap();
        let b = Space::unit(3, 2.0).unwrap();
        let c = Space::unit(2, 3.0).unwrap();
        let d = Space::new(vec![1.0, 2.0], 2.0).unwrap();
        let x = a.zeros();
        assert!(matches!(x.pair(&b.zeros()), Err(Error::Structural(_))));
        assert!(matches!(x.pair(&c.zeros()), Err(Error::Structural(_))));
        assert!(matches!(x.axpy(1.0, &d.zeros()), Err(Error::Structural(_))));
        // equal weights in separate buffers are compatible
        let e = Space::unit(2, 2.0).unwrap();
        assert!(x.pair(&e.zeros()).is_ok());
    }

    #[test]
    fn dual_norm_examples() {
        let s = Space::unit(2, 2.0).unwrap();
        assert_eq!(v(&s, &[1.0, 0.0]).dual_norm(), 1.0);
        assert!((v(&s, &[1.0, 1.0]).dual_norm() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dual_maximizer_examples() {
        let s = Space::unit(2, 2.0).unwrap();
        let u = v(&s, &[1.0, 0.0]).dual_maximizer().unwrap();
        assert_eq!(u.coeffs(), &[1.0, 0.0]);
        let u = v(&s, &[3.0, 4.0]).dual_maximizer().unwrap();
        assert!((u.coeffs()[0] - 0.6).abs() < 1e-15);
        assert!((u.coeffs()[1] - 0.8).abs() < 1e-15);

        let s3 = Space::unit(2, 3.0).unwrap();
        let f = v(&s3, &[1.0, 2.0]);
        let u = f.dual_maximizer().unwrap();
        assert!((u.norm() - 1.0).abs() < 1e-12);
        assert!((f.pair(&u).unwrap() - f.dual_norm()).abs() < 1e-12);
    }

    #[test]
    fn dual_maximizer_of_zero_is_an_error() {
        let s = Space::unit(3, 2.0).unwrap();
        assert!(matches!(s.zeros().dual_maximizer(), Err(Error::UndefinedDirection(_))));
    }

    #[test]
    fn unit_coordinate_has_unit_norm() {
        let s = Space::new(vec![0.1, 0.2, 0.7], 1.5).unwrap();
        for i in 0..3 {
            assert!((s.unit_coordinate(i).norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn norm_survives_extreme_magnitudes() {
        let s = Space::unit(2, 2.0).unwrap();
        let big = v(&s, &[3e200, 4e200]);
        assert!((big.norm() / 5e200 - 1.0).abs() < 1e-14);
        let tiny = v(&s, &[3e-200, 4e-200]);
        assert!((tiny.norm() / 5e-200 - 1.0).abs() < 1e-14);
    }
}
