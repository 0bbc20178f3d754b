//! Radial dictionaries: balanced, closed cones of admissible search directions.
//!
//! Four families are supported: finitely many lines (e.g. neural feature
//! atoms or coordinate axes), the coordinate-dominance cone
//! `{x : ‖x_head‖ >= c ‖x‖}`, finite unions of subspaces, and the whole space.
//! For each one [`sigma_witness`] computes the restricted dual norm
//! `σ(g) = sup_{w ∈ D, ‖w‖ = 1} |⟨g, w⟩|` exactly, together with a maximizer.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::sampling;
use crate::vectorspace::{Space, SpaceVector};

const MEMBERSHIP_TOL: f64 = 1e-10;
const DUPLICATE_COS: f64 = 1.0 - 1e-8;
const MIN_SIGMA: f64 = 1e-10;
const CERTIFY_SAFETY: f64 = 1.05;
const CERTIFY_TRIALS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Formula,
    Certified,
    Unknown,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Formula => "formula",
            Provenance::Certified => "certified",
            Provenance::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormingConstant {
    pub value: f64,
    pub provenance: Provenance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Sigmoid,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        }
    }
}

/// Unit atoms spanning the lines of a finite dictionary.
#[derive(Clone, Debug)]
pub struct FiniteAtomData {
    atoms: Vec<SpaceVector>,
    sigma_min: f64,
    /// Input positions of the atoms that were kept.
    kept: Vec<usize>,
    // nonzero pattern of sparse atoms, so pairings cost O(nnz)
    supports: Vec<Option<Vec<usize>>>,
}

fn weighted_matrix(vectors: &[SpaceVector], space: &Space) -> DMatrix<f64> {
    let n = space.dim();
    let sw: Vec<f64> = space.weights().iter().map(|w| w.sqrt()).collect();
    DMatrix::from_fn(n, vectors.len(), |i, j| sw[i] * vectors[j].coeffs()[i])
}

fn l2_cos(a: &SpaceVector, b: &SpaceVector) -> f64 {
    let w = a.space().weights();
    let dot: f64 = a.coeffs().iter().zip(b.coeffs()).zip(w).map(|((x, y), w)| w * x * y).sum();
    dot / (a.norm2() * b.norm2())
}

impl FiniteAtomData {
    /// Drops near-duplicate lines, normalizes, and rejects dependent sets.
    pub fn new(raw: Vec<SpaceVector>) -> Result<Self> {
        let Some(first) = raw.first() else {
            return Err(Error::DictionaryDegenerate { reason: "no atoms".into(), atoms: vec![] });
        };
        let space = first.space().clone();
        let mut kept_raw: Vec<&SpaceVector> = Vec::new();
        let mut kept = Vec::new();
        for (j, v) in raw.iter().enumerate() {
            if !v.space().same_as(&space) {
                return Err(Error::Structural(format!("atom {j} lives in another space")));
            }
            if v.norm2() == 0.0 {
                return Err(Error::DictionaryDegenerate {
                    reason: "zero feature vector".into(),
                    atoms: vec![j],
                });
            }
            if kept_raw.iter().any(|k| l2_cos(k, v).abs() > DUPLICATE_COS) {
                continue;
            }
            kept_raw.push(v);
            kept.push(j);
        }
        if kept.len() > space.dim() {
            return Err(Error::DictionaryDegenerate {
                reason: format!("{} distinct atoms exceed dimension {}", kept.len(), space.dim()),
                atoms: kept,
            });
        }
        let atoms: Vec<SpaceVector> =
            kept_raw.iter().map(|v| v.normalized()).collect::<Result<_>>()?;
        let svd = weighted_matrix(&atoms, &space).svd(false, true);
        let (imin, sigma_min) = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, s)| if *s < acc.1 { (i, *s) } else { acc });
        if sigma_min < MIN_SIGMA {
            let vt = svd.v_t.expect("requested");
            let row = vt.row(imin);
            let amax = row.amax();
            let offending = row
                .iter()
                .enumerate()
                .filter(|(_, c)| c.abs() > 1e-3 * amax)
                .map(|(j, _)| kept[j])
                .collect();
            return Err(Error::DictionaryDegenerate {
                reason: format!("atoms are linearly dependent (sigma_min = {sigma_min:e})"),
                atoms: offending,
            });
        }
        let supports = atoms
            .iter()
            .map(|a| {
                let nz: Vec<usize> = (0..a.dim()).filter(|&i| a.coeffs()[i] != 0.0).collect();
                (nz.len() * 4 <= a.dim()).then_some(nz)
            })
            .collect();
        Ok(Self { atoms, sigma_min, kept, supports })
    }

    /// `⟨g, k_j⟩`.
    pub fn pair_atom(&self, j: usize, g: &SpaceVector) -> f64 {
        match &self.supports[j] {
            Some(nz) => {
                let (a, w) = (self.atoms[j].coeffs(), g.space().weights());
                nz.iter().map(|&i| w[i] * g.coeffs()[i] * a[i]).sum()
            }
            None => g.pair_unchecked(&self.atoms[j]),
        }
    }

    /// The `n` coordinate axes.
    pub fn axes(space: &Space) -> Self {
        let atoms = (0..space.dim()).map(|i| space.unit_coordinate(i)).collect();
        Self::new(atoms).expect("coordinate axes are independent")
    }

    pub fn atoms(&self) -> &[SpaceVector] {
        &self.atoms
    }

    pub fn m(&self) -> usize {
        self.atoms.len()
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma_min
    }

    pub fn kept_indices(&self) -> &[usize] {
        &self.kept
    }

    pub fn space(&self) -> &Space {
        self.atoms[0].space()
    }
}

/// Feature atoms `(φ_θ)_i = act(⟨w, x_i⟩ + b)`, one coordinate per data point.
pub fn build_neural_atoms(
    space: &Space,
    points: &[Vec<f64>],
    params: &[(Vec<f64>, f64)],
    activation: Activation,
) -> Result<FiniteAtomData> {
    if params.is_empty() {
        return Err(Error::Parameter("need at least one (w, b) parameter pair".into()));
    }
    if points.len() != space.dim() {
        return Err(Error::Structural(format!(
            "{} data points for a space of dimension {}",
            points.len(),
            space.dim()
        )));
    }
    let d = points[0].len();
    if points.iter().any(|x| x.len() != d) || params.iter().any(|(w, _)| w.len() != d) {
        return Err(Error::Structural(format!("points and weights must all have length {d}")));
    }
    let raw = params
        .iter()
        .map(|(w, b)| {
            let feat = points
                .iter()
                .map(|x| activation.apply(x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + b))
                .collect();
            space.vector(feat)
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteAtomData::new(raw)
}

/// `√m / σ_min(K)` for `m = n` atoms in a Hilbert (`q = 2`) space.
pub fn norming_constant_finite(data: &FiniteAtomData) -> Result<f64> {
    let n = data.space().dim();
    if data.m() < n {
        return Err(Error::NormingImpossible(format!(
            "{} atoms cannot norm a space of dimension {n}",
            data.m()
        )));
    }
    Ok((data.m() as f64).sqrt() / data.sigma_min)
}

#[derive(Clone, Copy, Debug)]
pub struct ConeData {
    pub c: f64,
    pub q: f64,
}

/// `1 / min{c, (1 - c^q)^{1/q}}`.
pub fn cone_norming_constant(c: f64, q: f64) -> f64 {
    1.0 / c.min((1.0 - c.powf(q)).powf(1.0 / q))
}

#[derive(Clone, Debug)]
pub enum Subspace {
    /// Span of the listed coordinates.
    Coordinates(Vec<usize>),
    /// Span of an orthonormal (weighted `L²`) basis.
    Basis(Vec<SpaceVector>),
}

impl Subspace {
    pub fn dim(&self) -> usize {
        match self {
            Subspace::Coordinates(ix) => ix.len(),
            Subspace::Basis(b) => b.len(),
        }
    }

    /// Spanning vectors: unit coordinates or the orthonormal basis.
    pub fn spanning_vectors(&self, space: &Space) -> Vec<SpaceVector> {
        match self {
            Subspace::Coordinates(ix) => ix.iter().map(|&i| space.unit_coordinate(i)).collect(),
            Subspace::Basis(b) => b.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SubspaceUnionData {
    space: Space,
    subspaces: Vec<Subspace>,
    direct_sum: bool,
    norm_one_projections: bool,
}

fn orthonormalize(space: &Space, basis: &[Vec<f64>]) -> Result<Vec<SpaceVector>> {
    let mut out: Vec<SpaceVector> = Vec::new();
    for (j, b) in basis.iter().enumerate() {
        let mut v = space.vector(b.clone())?;
        let scale = v.norm2();
        for _ in 0..2 {
            for e in &out {
                let c = l2_dot(e, &v);
                v = v.axpy(-c, e)?;
            }
        }
        let nv = v.norm2();
        if !(nv > 1e-10 * scale) {
            return Err(Error::DictionaryDegenerate {
                reason: "subspace basis is rank deficient".into(),
                atoms: vec![j],
            });
        }
        out.push(v.scale(1.0 / nv));
    }
    Ok(out)
}

fn l2_dot(a: &SpaceVector, b: &SpaceVector) -> f64 {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .zip(a.space().weights())
        .map(|((x, y), w)| w * x * y)
        .sum()
}

impl SubspaceUnionData {
    /// Disjoint coordinate blocks; valid for every `q`.
    pub fn coordinate_blocks(space: &Space, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n = space.dim();
        let mut seen = vec![0usize; n];
        for (k, b) in blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::DictionaryDegenerate {
                    reason: "empty coordinate block".into(),
                    atoms: vec![k],
                });
            }
            for &i in b {
                if i >= n {
                    return Err(Error::Structural(format!("coordinate {i} out of range for n = {n}")));
                }
                seen[i] += 1;
            }
        }
        let disjoint = seen.iter().all(|&c| c <= 1);
        let covering = seen.iter().all(|&c| c >= 1);
        Ok(Self {
            space: space.clone(),
            subspaces: blocks.into_iter().map(Subspace::Coordinates).collect(),
            direct_sum: disjoint && covering,
            norm_one_projections: disjoint,
        })
    }

    /// General subspaces from (not necessarily orthonormal) bases; `q = 2` only.
    pub fn from_bases(space: &Space, bases: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if space.q() != 2.0 {
            return Err(Error::Parameter(
                "subspaces given by general bases need a q = 2 space; use coordinate blocks".into(),
            ));
        }
        let subspaces: Vec<Vec<SpaceVector>> =
            bases.iter().map(|b| orthonormalize(space, b)).collect::<Result<_>>()?;
        let total: usize = subspaces.iter().map(Vec::len).sum();
        let all: Vec<SpaceVector> = subspaces.iter().flatten().cloned().collect();
        let rank = if all.is_empty() {
            0
        } else {
            weighted_matrix(&all, space).rank(1e-10)
        };
        let direct_sum = total == space.dim() && rank == space.dim();
        let mut orthogonal = true;
        for a in 0..subspaces.len() {
            for b in a + 1..subspaces.len() {
                for x in &subspaces[a] {
                    for y in &subspaces[b] {
                        if l2_dot(x, y).abs() > 1e-10 {
                            orthogonal = false;
                        }
                    }
                }
            }
        }
        Ok(Self {
            space: space.clone(),
            subspaces: subspaces.into_iter().map(Subspace::Basis).collect(),
            direct_sum,
            norm_one_projections: orthogonal,
        })
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    /// The subspaces span the space with trivial pairwise intersections.
    pub fn is_direct_sum(&self) -> bool {
        self.direct_sum
    }

    /// Direct sum whose coordinate projections all have norm one, which is
    /// what the `C = n` bound relies on.
    pub fn direct_sum_flag(&self) -> bool {
        self.direct_sum && self.norm_one_projections
    }

    fn spans(&self) -> bool {
        let all: Vec<SpaceVector> =
            self.subspaces.iter().flat_map(|s| s.spanning_vectors(&self.space)).collect();
        !all.is_empty() && weighted_matrix(&all, &self.space).rank(1e-10) == self.space.dim()
    }
}

#[derive(Clone, Debug)]
pub enum DictionaryKind {
    FiniteAtoms(FiniteAtomData),
    CoordinateCone(ConeData),
    SubspaceUnion(SubspaceUnionData),
    FullSpace,
}

#[derive(Clone, Debug)]
pub struct Dictionary {
    space: Space,
    kind: DictionaryKind,
    norming: NormingConstant,
}

impl Dictionary {
    pub fn full_space(space: &Space) -> Self {
        Self {
            space: space.clone(),
            kind: DictionaryKind::FullSpace,
            norming: NormingConstant { value: 1.0, provenance: Provenance::Formula },
        }
    }

    /// `{x : ‖x_0 e_0‖ >= c ‖x‖}` with the head on coordinate 0.
    pub fn cone(space: &Space, c: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::Parameter(format!("cone parameter c = {c} must lie in (0, 1)")));
        }
        Ok(Self {
            space: space.clone(),
            kind: DictionaryKind::CoordinateCone(ConeData { c, q: space.q() }),
            norming: NormingConstant {
                value: cone_norming_constant(c, space.q()),
                provenance: Provenance::Formula,
            },
        })
    }

    /// Finite atoms. The `√m/σ_min` constant applies for `q = 2`; other
    /// exponents get a Monte Carlo certified constant.
    pub fn finite(data: FiniteAtomData) -> Result<Self> {
        let space = data.space().clone();
        let mut dict = Self {
            space: space.clone(),
            kind: DictionaryKind::FiniteAtoms(data),
            norming: NormingConstant { value: f64::INFINITY, provenance: Provenance::Unknown },
        };
        let DictionaryKind::FiniteAtoms(data) = &dict.kind else { unreachable!() };
        if data.m() < space.dim() {
            return Ok(dict);
        }
        dict.norming = if space.q() == 2.0 {
            NormingConstant { value: norming_constant_finite(data)?, provenance: Provenance::Formula }
        } else {
            NormingConstant {
                value: certify_constant(&dict, CERTIFY_TRIALS, 0)? * CERTIFY_SAFETY,
                provenance: Provenance::Certified,
            }
        };
        Ok(dict)
    }

    pub fn axes(space: &Space) -> Result<Self> {
        Self::finite(FiniteAtomData::axes(space))
    }

    pub fn subspace_union(data: SubspaceUnionData) -> Result<Self> {
        let space = data.space.clone();
        let mut dict = Self {
            space,
            kind: DictionaryKind::SubspaceUnion(data),
            norming: NormingConstant { value: f64::INFINITY, provenance: Provenance::Unknown },
        };
        let DictionaryKind::SubspaceUnion(data) = &dict.kind else { unreachable!() };
        dict.norming = subspace_norming_constant(data, CERTIFY_TRIALS, 0)?;
        Ok(dict)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn kind(&self) -> &DictionaryKind {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            DictionaryKind::FiniteAtoms(_) => "finite_atoms",
            DictionaryKind::CoordinateCone(_) => "coordinate_cone",
            DictionaryKind::SubspaceUnion(_) => "subspace_union",
            DictionaryKind::FullSpace => "full_space",
        }
    }

    pub fn norming_constant(&self) -> NormingConstant {
        self.norming
    }
}

/// `σ` and a unit element of the dictionary with `⟨g, w⟩ = σ`.
#[derive(Clone, Debug)]
pub struct Witness {
    pub sigma: f64,
    pub w: SpaceVector,
}

/// Restricted dual norm of a coordinate subset, with its maximizer.
fn coordinate_block_witness(g: &SpaceVector, ix: &[usize]) -> Witness {
    let space = g.space();
    let w = space.weights();
    let qd = space.dual_exponent();
    let sub: Vec<f64> = ix.iter().map(|&i| g.coeffs()[i]).collect();
    let sub_w: Vec<f64> = ix.iter().map(|&i| w[i]).collect();
    let sigma = Space::new(sub_w.clone(), space.q())
        .and_then(|s| s.vector(sub.clone()))
        .map(|v| v.dual_norm())
        .unwrap_or(0.0);
    let mut coeffs = vec![0.0; space.dim()];
    if sigma == 0.0 {
        coeffs[ix[0]] = w[ix[0]].powf(-1.0 / space.q());
    } else {
        for (&i, gi) in ix.iter().zip(&sub) {
            coeffs[i] = gi.signum() * (gi.abs() / sigma).powf(qd - 1.0);
        }
    }
    Witness { sigma, w: space.vector(coeffs).expect("finite") }
}

fn cone_witness(g: &SpaceVector, c: f64) -> Witness {
    let space = g.space();
    let n = space.dim();
    let q = space.q();
    let qd = space.dual_exponent();
    let w0 = space.weights()[0];
    let g0 = g.coeffs()[0];
    let head = w0.powf(1.0 / qd) * g0.abs();
    let tail_ix: Vec<usize> = (1..n).collect();
    let tail = if tail_ix.is_empty() {
        None
    } else {
        Some(coordinate_block_witness(g, &tail_ix))
    };
    let tail_norm = tail.as_ref().map_or(0.0, |t| t.sigma);

    // maximize head*y + tail*b over y^q + b^q = 1, y in [c, 1]
    let y = if tail.is_none() {
        1.0
    } else {
        let (a, b) = (head.powf(qd - 1.0), tail_norm.powf(qd - 1.0));
        let y_free = if a == 0.0 && b == 0.0 {
            1.0
        } else {
            a / (a.powf(q) + b.powf(q)).powf(1.0 / q)
        };
        y_free.clamp(c, 1.0)
    };
    let b = (1.0 - y.powf(q)).max(0.0).powf(1.0 / q);
    let sigma = head * y + tail_norm * b;

    let sign = if g0 < 0.0 { -1.0 } else { 1.0 };
    let mut coeffs = vec![0.0; n];
    coeffs[0] = sign * y / w0.powf(1.0 / q);
    if let Some(t) = tail {
        for i in 1..n {
            coeffs[i] = b * t.w.coeffs()[i];
        }
    }
    Witness { sigma, w: space.vector(coeffs).expect("finite") }
}

pub fn sigma_witness(dict: &Dictionary, g: &SpaceVector) -> Result<Witness> {
    if !g.space().same_as(&dict.space) {
        return Err(Error::Structural("functional lives outside the dictionary's space".into()));
    }
    Ok(match &dict.kind {
        DictionaryKind::FullSpace => match g.dual_maximizer() {
            Ok(w) => Witness { sigma: g.dual_norm(), w },
            Err(_) => Witness { sigma: 0.0, w: dict.space.unit_coordinate(0) },
        },
        DictionaryKind::FiniteAtoms(data) => {
            let mut best = (0usize, f64::NEG_INFINITY, 0.0);
            for j in 0..data.m() {
                let v = data.pair_atom(j, g);
                // strict comparison keeps the lowest index on ties
                if v.abs() > best.1 {
                    best = (j, v.abs(), v);
                }
            }
            let atom = &data.atoms[best.0];
            let w = if best.2 < 0.0 { atom.scale(-1.0) } else { atom.clone() };
            Witness { sigma: best.1, w }
        }
        DictionaryKind::CoordinateCone(cone) => cone_witness(g, cone.c),
        DictionaryKind::SubspaceUnion(data) => {
            let mut best: Option<Witness> = None;
            for sub in &data.subspaces {
                let wit = subspace_witness(sub, g)?;
                if best.as_ref().is_none_or(|b| wit.sigma > b.sigma) {
                    best = Some(wit);
                }
            }
            best.expect("at least one subspace")
        }
    })
}

/// Restricted dual norm of `g` on one subspace and the in-subspace maximizer.
pub fn subspace_witness(sub: &Subspace, g: &SpaceVector) -> Result<Witness> {
    Ok(match sub {
        Subspace::Coordinates(ix) => coordinate_block_witness(g, ix),
        Subspace::Basis(basis) => {
            let coords: Vec<f64> = basis.iter().map(|b| g.pair_unchecked(b)).collect();
            let sigma = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
            let w = if sigma == 0.0 {
                basis[0].clone()
            } else {
                let mut acc = g.space().zeros();
                for (b, c) in basis.iter().zip(&coords) {
                    acc = acc.axpy(c / sigma, b)?;
                }
                acc
            };
            Witness { sigma, w }
        }
    })
}

/// Exact membership test with relative tolerance `1e-10`.
pub fn membership(dict: &Dictionary, x: &SpaceVector) -> bool {
    if !x.space().same_as(&dict.space) {
        return false;
    }
    let nx = x.norm();
    if nx == 0.0 {
        return true;
    }
    match &dict.kind {
        DictionaryKind::FullSpace => true,
        DictionaryKind::CoordinateCone(cone) => {
            let head = dict.space.weights()[0].powf(1.0 / dict.space.q()) * x.coeffs()[0].abs();
            head >= (cone.c - MEMBERSHIP_TOL) * nx
        }
        DictionaryKind::FiniteAtoms(data) => data.atoms.iter().any(|k| {
            let c = l2_dot(k, x) / l2_dot(k, k);
            x.axpy(-c, k).is_ok_and(|r| r.norm2() <= MEMBERSHIP_TOL * x.norm2())
        }),
        DictionaryKind::SubspaceUnion(data) => data.subspaces.iter().any(|sub| match sub {
            Subspace::Coordinates(ix) => {
                let off: f64 = (0..x.dim())
                    .filter(|i| !ix.contains(i))
                    .map(|i| x.coeffs()[i].abs())
                    .fold(0.0, f64::max);
                off <= MEMBERSHIP_TOL * x.coeffs().iter().fold(0.0_f64, |m, c| m.max(c.abs()))
            }
            Subspace::Basis(basis) => {
                let mut r = x.clone();
                for b in basis {
                    match r.axpy(-l2_dot(b, x), b) {
                        Ok(v) => r = v,
                        Err(_) => return false,
                    }
                }
                r.norm2() <= MEMBERSHIP_TOL * x.norm2()
            }
        }),
    }
}

/// Largest observed `‖φ‖_* / σ(φ)` over Gaussian functionals.
pub fn certify_constant(dict: &Dictionary, trials: usize, seed: u64) -> Result<f64> {
    let mut rng = sampling::rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let phi = sampling::gaussian(&dict.space, &mut rng);
        let sigma = sigma_witness(dict, &phi)?.sigma;
        if sigma == 0.0 {
            return Err(Error::NormingImpossible(
                "a functional annihilates the whole dictionary".into(),
            ));
        }
        worst = worst.max(phi.dual_norm() / sigma);
    }
    Ok(worst)
}

/// `n` for a direct sum with norm-one projections, otherwise a certified
/// constant (worst Monte Carlo ratio times 1.05).
pub fn subspace_norming_constant(
    data: &SubspaceUnionData,
    trials: usize,
    seed: u64,
) -> Result<NormingConstant> {
    if !data.spans() {
        return Err(Error::NormingImpossible("subspaces do not span the space".into()));
    }
    if data.direct_sum_flag() {
        return Ok(NormingConstant {
            value: data.subspaces.len() as f64,
            provenance: Provenance::Formula,
        });
    }
    let dict = Dictionary {
        space: data.space.clone(),
        kind: DictionaryKind::SubspaceUnion(data.clone()),
        norming: NormingConstant { value: f64::INFINITY, provenance: Provenance::Unknown },
    };
    Ok(NormingConstant {
        value: certify_constant(&dict, trials, seed)? * CERTIFY_SAFETY,
        provenance: Provenance::Certified,
    })
}

/// Random point of the unit slice `D ∩ S`.
pub fn random_slice_point<R: Rng + ?Sized>(dict: &Dictionary, rng: &mut R) -> SpaceVector {
    let space = &dict.space;
    match &dict.kind {
        DictionaryKind::FullSpace => sampling::unit_sphere(space, rng),
        DictionaryKind::FiniteAtoms(data) => {
            let j = rng.random_range(0..data.m());
            let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
            data.atoms[j].scale(s)
        }
        DictionaryKind::CoordinateCone(cone) => {
            let n = space.dim();
            let q = space.q();
            let y = if n == 1 { 1.0 } else { cone.c + (1.0 - cone.c) * rng.random::<f64>() };
            let b = (1.0 - y.powf(q)).max(0.0).powf(1.0 / q);
            let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let mut coeffs = vec![0.0; n];
            coeffs[0] = s * y / space.weights()[0].powf(1.0 / q);
            if n > 1 {
                let tail_space = Space::new(space.weights()[1..].to_vec(), q).expect("valid");
                let t = sampling::unit_sphere(&tail_space, rng);
                for i in 1..n {
                    coeffs[i] = b * t.coeffs()[i - 1];
                }
            }
            space.vector(coeffs).expect("finite")
        }
        DictionaryKind::SubspaceUnion(data) => {
            let k = rng.random_range(0..data.subspaces.len());
            let vecs = data.subspaces[k].spanning_vectors(space);
            loop {
                let mut acc = space.zeros();
                for v in &vecs {
                    acc = acc
                        .axpy(rng.sample::<f64, _>(rand_distr::StandardNormal), v)
                        .expect("same space");
                }
                if let Ok(u) = acc.normalized() {
                    return u;
                }
            }
        }
    }
}

/// `max |⟨φ, z⟩|` over `samples` random slice points.
pub fn brute_force_sigma<R: Rng + ?Sized>(
    dict: &Dictionary,
    phi: &SpaceVector,
    samples: usize,
    rng: &mut R,
) -> f64 {
    (0..samples)
        .map(|_| phi.pair_unchecked(&random_slice_point(dict, rng)).abs())
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct BruteForceCheck {
    pub dim: usize,
    pub functionals: usize,
    pub samples_per_functional: usize,
    /// Largest `(σ - brute)/σ`; the witness is a true sup when this is small.
    pub max_rel_gap: f64,
    /// Largest `(brute - σ)/σ`; positive values mean σ is not an upper bound.
    pub max_excess: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct NormingReport {
    pub constant: f64,
    pub trials: usize,
    pub violations: usize,
    pub worst_ratio: f64,
    pub brute_force: Option<BruteForceCheck>,
}

impl NormingReport {
    pub fn pass(&self) -> bool {
        self.violations == 0 && self.brute_force.as_ref().is_none_or(|b| b.pass)
    }
}

fn small_analog(dict: &Dictionary, n_small: usize) -> Option<Dictionary> {
    if dict.space.dim() <= n_small {
        return Some(dict.clone());
    }
    let space = Space::unit(n_small, dict.space.q()).ok()?;
    match &dict.kind {
        DictionaryKind::FullSpace => Some(Dictionary::full_space(&space)),
        DictionaryKind::CoordinateCone(cone) => Dictionary::cone(&space, cone.c).ok(),
        _ => None,
    }
}

pub const BRUTE_FORCE_SAMPLES: usize = 50_000;
const BRUTE_FORCE_FUNCTIONALS: usize = 20;
const BRUTE_FORCE_REL_TOL: f64 = 0.01;

/// Monte Carlo check of `‖φ‖_* <= C σ(φ)` plus a brute-force check, in
/// dimension `n_small` (or the dictionary's own, if smaller), that the
/// witness value is the supremum over the unit slice.
pub fn verify_norming(
    dict: &Dictionary,
    c: f64,
    trials: usize,
    seed: u64,
    n_small: usize,
) -> Result<NormingReport> {
    if trials < 100 {
        return Err(Error::Parameter(format!("need at least 100 trials, got {trials}")));
    }
    let mut rng = sampling::rng(seed);
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let phi = sampling::gaussian(&dict.space, &mut rng);
        let sigma = sigma_witness(dict, &phi)?.sigma;
        let ratio = if sigma > 0.0 { phi.dual_norm() / sigma } else { f64::INFINITY };
        if ratio > c * (1.0 + 1e-12) {
            violations += 1;
        }
        worst = worst.max(ratio);
    }

    let brute_force = small_analog(dict, n_small.clamp(1, 6)).map(|small| {
        let mut rng = sampling::rng(seed ^ 0x9e37_79b9_7f4a_7c15);
        let mut max_gap: f64 = 0.0;
        let mut max_excess = f64::NEG_INFINITY;
        for _ in 0..BRUTE_FORCE_FUNCTIONALS {
            let phi = sampling::gaussian(&small.space, &mut rng);
            let sigma = match sigma_witness(&small, &phi) {
                Ok(w) => w.sigma,
                Err(_) => continue,
            };
            let brute = brute_force_sigma(&small, &phi, BRUTE_FORCE_SAMPLES, &mut rng);
            max_gap = max_gap.max((sigma - brute) / sigma);
            max_excess = max_excess.max((brute - sigma) / sigma);
        }
        BruteForceCheck {
            dim: small.space.dim(),
            functionals: BRUTE_FORCE_FUNCTIONALS,
            samples_per_functional: BRUTE_FORCE_SAMPLES,
            max_rel_gap: max_gap,
            max_excess,
            pass: max_gap <= BRUTE_FORCE_REL_TOL && max_excess <= 1e-12,
        }
    });

    Ok(NormingReport { constant: c, trials, violations, worst_ratio: worst, brute_force })
}
