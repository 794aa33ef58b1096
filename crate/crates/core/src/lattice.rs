//! Polarized complex tori given by period matrices.
//!
//! A torus `ℂᵍ/Λ` is described by a `g × 2g` period matrix whose columns
//! generate `Λ`. For `A_{Z,D}` the periods are `[Z D]` and the polarization
//! is the alternating form with `ω(Z[i], D[i]) = dᵢ`. Homomorphisms are
//! given by their analytic representation; once the images of the source
//! generators are expressed in target lattice coordinates, kernels and
//! pulled-back polarizations are computed in exact integer arithmetic.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::{DMatrix, DVector, Matrix3};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::serde_complex;
use crate::snf::{determinant, smith_normal_form};

/// Coordinates are snapped to rationals with at most this denominator.
pub const MAX_DENOMINATOR: i64 = 64;
pub const SNAP_TOLERANCE: f64 = 1e-9;
pub const MAX_CONDITION_NUMBER: f64 = 1e12;

/// `(d₁, d₂, d₃)` with `d₁ | d₂ | d₃`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[u64; 3]", into = "[u64; 3]")]
pub struct PolarizationType([u64; 3]);

impl PolarizationType {
    pub const PRINCIPAL: PolarizationType = PolarizationType([1, 1, 1]);
    /// Type of the Prym of a non-isotropic Klein covering.
    pub const D4: PolarizationType = PolarizationType([1, 1, 4]);
    /// Type of the Prym of an isotropic Klein covering.
    pub const D2: PolarizationType = PolarizationType([1, 2, 2]);

    pub fn new(d: [u64; 3]) -> Result<Self> {
        if d.contains(&0) {
            return Err(Error::InvalidPolarizationType(format!("{d:?} has a zero entry")));
        }
        if !d[1].is_multiple_of(d[0]) || !d[2].is_multiple_of(d[1]) {
            return Err(Error::InvalidPolarizationType(format!(
                "{d:?} is not a divisibility chain"
            )));
        }
        Ok(PolarizationType(d))
    }

    pub fn d(&self) -> [u64; 3] {
        self.0
    }
}

impl TryFrom<[u64; 3]> for PolarizationType {
    type Error = Error;

    fn try_from(d: [u64; 3]) -> Result<Self> {
        PolarizationType::new(d)
    }
}

impl From<PolarizationType> for [u64; 3] {
    fn from(p: PolarizationType) -> Self {
        p.0
    }
}

impl fmt::Display for PolarizationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// A point `Z` of the Siegel space 𝔥₃ together with a polarization type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPeriodMatrix", into = "RawPeriodMatrix")]
pub struct PolarizedPeriodMatrix {
    z: Matrix3<Complex64>,
    d: PolarizationType,
}

#[derive(Serialize, Deserialize)]
struct RawPeriodMatrix {
    #[serde(rename = "Z")]
    z: [[[f64; 2]; 3]; 3],
    #[serde(rename = "D")]
    d: PolarizationType,
}

impl TryFrom<RawPeriodMatrix> for PolarizedPeriodMatrix {
    type Error = Error;

    fn try_from(raw: RawPeriodMatrix) -> Result<Self> {
        let z = Matrix3::from_fn(|i, j| serde_complex::from_pair(raw.z[i][j]));
        PolarizedPeriodMatrix::new(z, raw.d)
    }
}

impl From<PolarizedPeriodMatrix> for RawPeriodMatrix {
    fn from(p: PolarizedPeriodMatrix) -> Self {
        let mut z = [[[0.0; 2]; 3]; 3];
        for (i, row) in z.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = serde_complex::to_pair(p.z[(i, j)]);
            }
        }
        RawPeriodMatrix { z, d: p.d }
    }
}

impl PolarizedPeriodMatrix {
    pub fn new(z: Matrix3<Complex64>, d: PolarizationType) -> Result<Self> {
        if z.iter().any(|e| !(e.re.is_finite() && e.im.is_finite())) {
            return Err(Error::InvalidPeriodMatrix("non-finite entry".into()));
        }
        let scale = 1.0 + z.iter().map(|e| e.norm()).fold(0.0, f64::max);
        let asym = (z - z.transpose()).iter().map(|e| e.norm()).fold(0.0, f64::max);
        if asym >= 1e-12 * scale {
            return Err(Error::InvalidPeriodMatrix(format!("not symmetric (defect {asym:e})")));
        }
        let im = z.map(|e| e.im);
        let im = 0.5 * (im + im.transpose());
        let min_eig = im.symmetric_eigenvalues().min();
        if min_eig <= 1e-12 {
            return Err(Error::InvalidPeriodMatrix(format!(
                "imaginary part is not positive definite (least eigenvalue {min_eig:e})"
            )));
        }
        Ok(PolarizedPeriodMatrix { z, d })
    }

    pub fn z(&self) -> &Matrix3<Complex64> {
        &self.z
    }

    pub fn polarization(&self) -> PolarizationType {
        self.d
    }

    /// Same `Z`, different polarization type.
    pub fn with_polarization(&self, d: PolarizationType) -> Self {
        PolarizedPeriodMatrix { z: self.z, d }
    }

    pub fn im_determinant(&self) -> f64 {
        self.z.map(|e| e.im).determinant()
    }

    /// The `3 × 6` period matrix `[Z D]`.
    pub fn periods(&self) -> DMatrix<Complex64> {
        let mut p = DMatrix::zeros(3, 6);
        for i in 0..3 {
            for j in 0..3 {
                p[(i, j)] = self.z[(i, j)];
            }
            p[(i, 3 + i)] = Complex64::new(self.d.0[i] as f64, 0.0);
        }
        p
    }

    pub fn torus(&self) -> ComplexTorus {
        ComplexTorus { periods: self.periods() }
    }
}

/// `ℂᵍ/Λ` with `Λ` spanned by the columns of a `g × 2g` period matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTorus {
    periods: DMatrix<Complex64>,
}

impl ComplexTorus {
    pub fn new(periods: DMatrix<Complex64>) -> Result<Self> {
        if periods.ncols() != 2 * periods.nrows() || periods.nrows() == 0 {
            return Err(Error::InvalidPeriodMatrix(format!(
                "period matrix must be g × 2g, got {} × {}",
                periods.nrows(),
                periods.ncols()
            )));
        }
        let t = ComplexTorus { periods };
        t.condition_number()?;
        Ok(t)
    }

    /// The elliptic curve `ℂ/(zℤ + dℤ)`.
    pub fn elliptic(z: Complex64, d: f64) -> Result<Self> {
        Self::new(DMatrix::from_row_slice(1, 2, &[z, Complex64::new(d, 0.0)]))
    }

    /// `E₁ × … × Eₙ` with periods `[diag(z) d·I]`.
    pub fn product_of_elliptic(zs: &[Complex64], d: f64) -> Result<Self> {
        let n = zs.len();
        let mut p = DMatrix::zeros(n, 2 * n);
        for (i, &z) in zs.iter().enumerate() {
            p[(i, i)] = z;
            p[(i, n + i)] = Complex64::new(d, 0.0);
        }
        Self::new(p)
    }

    pub fn dim(&self) -> usize {
        self.periods.nrows()
    }

    pub fn periods(&self) -> &DMatrix<Complex64> {
        &self.periods
    }

    /// Real `2g × 2g` matrix stacking real and imaginary parts of the periods.
    fn real_matrix(&self) -> DMatrix<f64> {
        let g = self.dim();
        DMatrix::from_fn(2 * g, 2 * g, |i, j| {
            if i < g {
                self.periods[(i, j)].re
            } else {
                self.periods[(i - g, j)].im
            }
        })
    }

    fn condition_number(&self) -> Result<f64> {
        let sv = self.real_matrix().singular_values();
        let (max, min) = (sv.max(), sv.min());
        let cond = if min > 0.0 { max / min } else { f64::INFINITY };
        if cond > MAX_CONDITION_NUMBER {
            return Err(Error::IllConditioned(cond));
        }
        Ok(cond)
    }

    /// The point `Σ xⱼ·Λ[j]` of the universal cover.
    pub fn point(&self, coords: &[Rational64]) -> Vec<Complex64> {
        let x = DVector::from_iterator(coords.len(), coords.iter().map(|r| Complex64::new(ratio_to_f64(*r), 0.0)));
        (&self.periods * x).iter().copied().collect()
    }
}

/// A lattice coordinate: exact when it snapped to a small rational.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coordinate {
    Exact(Rational64),
    Approx(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeCoordinates(Vec<Coordinate>);

impl LatticeCoordinates {
    pub fn coordinates(&self) -> &[Coordinate] {
        &self.0
    }

    pub fn rationals(&self) -> Option<Vec<Rational64>> {
        self.0
            .iter()
            .map(|c| match c {
                Coordinate::Exact(r) => Some(*r),
                Coordinate::Approx(_) => None,
            })
            .collect()
    }

    /// Integer coordinates, if the vector lies in the lattice.
    pub fn integers(&self) -> Option<Vec<i64>> {
        self.rationals()?
            .into_iter()
            .map(|r| r.is_integer().then(|| r.to_integer()))
            .collect()
    }

    pub fn is_lattice_vector(&self) -> bool {
        self.integers().is_some()
    }
}

fn ratio_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn snap(x: f64) -> Coordinate {
    for q in 1..=MAX_DENOMINATOR {
        let p = (x * q as f64).round();
        if (x - p / q as f64).abs() < SNAP_TOLERANCE && p.abs() < 1e15 {
            return Coordinate::Exact(Rational64::new(p as i64, q));
        }
    }
    Coordinate::Approx(x)
}

/// Solves `v = Π·x` for real `x` and snaps each component to a small rational.
pub fn integer_coordinates(v: &[Complex64], torus: &ComplexTorus) -> Result<LatticeCoordinates> {
    let column = DMatrix::from_column_slice(v.len(), 1, v);
    Ok(integer_coordinates_of_columns(&column, torus)?.remove(0))
}

/// [`integer_coordinates`] for every column of `vs`, sharing one factorization.
pub fn integer_coordinates_of_columns(
    vs: &DMatrix<Complex64>,
    torus: &ComplexTorus,
) -> Result<Vec<LatticeCoordinates>> {
    let g = torus.dim();
    if vs.nrows() != g {
        return Err(Error::InvalidPeriodMatrix(format!(
            "vector of length {} in a torus of dimension {g}",
            vs.nrows()
        )));
    }
    torus.condition_number()?;
    let lu = torus.real_matrix().lu();
    vs.column_iter()
        .map(|v| {
            let rhs = DVector::from_fn(2 * g, |i, _| if i < g { v[i].re } else { v[i - g].im });
            let x = lu.solve(&rhs).ok_or(Error::IllConditioned(f64::INFINITY))?;
            Ok(LatticeCoordinates(x.iter().map(|&xi| snap(xi)).collect()))
        })
        .collect()
}

/// The alternating matrix `J_D = [[0, D], [−D, 0]]`.
pub fn omega_matrix(d: &PolarizationType) -> DMatrix<i64> {
    let mut j = DMatrix::zeros(6, 6);
    for i in 0..3 {
        j[(i, 3 + i)] = d.0[i] as i64;
        j[(3 + i, i)] = -(d.0[i] as i64);
    }
    j
}

/// `uᵀ·J_D·v` in the basis `(Z[1], Z[2], Z[3], D[1], D[2], D[3])`.
pub fn omega(u: &[Rational64], v: &[Rational64], d: &PolarizationType) -> Rational64 {
    assert_eq!(u.len(), 6, "omega expects 6 coordinates");
    assert_eq!(v.len(), 6, "omega expects 6 coordinates");
    (0..3).fold(Rational64::from_integer(0), |acc, i| {
        let di = Rational64::from_integer(d.0[i] as i64);
        acc + di * (u[i] * v[3 + i] - u[3 + i] * v[i])
    })
}

/// A homomorphism of complex tori through its analytic representation.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticHom {
    f: DMatrix<Complex64>,
    source: ComplexTorus,
    target: ComplexTorus,
}

impl AnalyticHom {
    pub fn new(f: DMatrix<Complex64>, source: ComplexTorus, target: ComplexTorus) -> Result<Self> {
        if f.nrows() != target.dim() || f.ncols() != source.dim() {
            return Err(Error::NotAHomomorphism(format!(
                "analytic representation is {} × {}, tori have dimensions {} → {}",
                f.nrows(),
                f.ncols(),
                source.dim(),
                target.dim()
            )));
        }
        Ok(AnalyticHom { f, source, target })
    }

    pub fn analytic_representation(&self) -> &DMatrix<Complex64> {
        &self.f
    }

    pub fn source(&self) -> &ComplexTorus {
        &self.source
    }

    pub fn target(&self) -> &ComplexTorus {
        &self.target
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AnalyticHom) -> Result<AnalyticHom> {
        AnalyticHom::new(&self.f * &inner.f, inner.source.clone(), self.target.clone())
    }

    /// Target lattice coordinates of the image of each source generator.
    pub fn image_coordinates(&self) -> Result<Vec<LatticeCoordinates>> {
        integer_coordinates_of_columns(&(&self.f * self.source.periods()), &self.target)
    }

    /// The integer matrix `M` with `F·Π_source = Π_target·M`.
    pub fn integer_matrix(&self) -> Result<DMatrix<i64>> {
        let coords = self.image_coordinates()?;
        let rows = 2 * self.target.dim();
        let mut m = DMatrix::zeros(rows, coords.len());
        for (j, c) in coords.iter().enumerate() {
            let ints = c.integers().ok_or_else(|| {
                Error::NotAHomomorphism(format!(
                    "image of source generator {} is not a lattice vector: {:?}",
                    j + 1,
                    c.coordinates()
                ))
            })?;
            for (i, x) in ints.into_iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        Ok(m)
    }
}

fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Type of the polarization restricted to a one-dimensional subtorus.
pub fn restricted_polarization_type(embedding: &AnalyticHom, d: &PolarizationType) -> Result<u64> {
    if embedding.source.dim() != 1 || embedding.target.dim() != 3 {
        return Err(Error::NotAHomomorphism(
            "restricted type needs an elliptic curve mapping into a threefold".into(),
        ));
    }
    let m = embedding.integer_matrix()?;
    let cols: Vec<Vec<i64>> = m.column_iter().map(|c| c.iter().copied().collect()).collect();
    for (k, c) in cols.iter().enumerate() {
        if gcd_all(c) != 1 {
            return Err(Error::NonPrimitive(format!("image of generator {} is {c:?}", k + 1)));
        }
    }
    let to_q = |c: &[i64]| c.iter().map(|&x| Rational64::from_integer(x)).collect::<Vec<_>>();
    let w = omega(&to_q(&cols[0]), &to_q(&cols[1]), d);
    if w == Rational64::from_integer(0) {
        return Err(Error::NotAHomomorphism(
            "the polarization restricts to zero on the image".into(),
        ));
    }
    Ok(w.to_integer().unsigned_abs())
}

/// A point of the source torus lying in a kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelPoint {
    /// Coordinates with respect to the source lattice generators, in `[0, 1)`.
    pub coordinates: Vec<Rational64>,
    /// The corresponding point of the universal cover.
    #[serde(with = "complex_vec")]
    pub point: Vec<Complex64>,
}

mod complex_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(|z| serde_complex::to_pair(*z)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<[f64; 2]>::deserialize(d)?.into_iter().map(serde_complex::from_pair).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsogenyKernelReport {
    pub order: u64,
    pub elementary_divisors: Vec<u64>,
    pub generators: Vec<KernelPoint>,
}

impl IsogenyKernelReport {
    /// Every element of the kernel, as source coordinates modulo 1.
    pub fn elements(&self) -> BTreeSet<Vec<Rational64>> {
        let gens: Vec<Vec<Rational64>> = self.generators.iter().map(|g| g.coordinates.clone()).collect();
        let dim = self.elementary_divisors.len();
        generated_subgroup(&gens, dim)
    }
}

/// Reduces each coordinate into `[0, 1)`.
pub fn reduce_mod_one(x: &[Rational64]) -> Vec<Rational64> {
    x.iter().map(|r| r - r.floor()).collect()
}

/// The subgroup of `(ℚ/ℤ)ⁿ` generated by `gens`.
pub fn generated_subgroup(gens: &[Vec<Rational64>], dim: usize) -> BTreeSet<Vec<Rational64>> {
    let zero = vec![Rational64::from_integer(0); dim];
    let mut group = BTreeSet::from([zero.clone()]);
    let mut frontier = vec![zero];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let sum: Vec<Rational64> = x.iter().zip(g).map(|(a, b)| a + b).collect();
            let sum = reduce_mod_one(&sum);
            if group.insert(sum.clone()) {
                frontier.push(sum);
            }
        }
    }
    group
}

/// Whether a source point with rational coordinates `x` maps into the target lattice.
pub fn maps_into_lattice(m: &DMatrix<i64>, x: &[Rational64]) -> bool {
    (0..m.nrows()).all(|i| {
        let s = (0..m.ncols()).fold(Rational64::from_integer(0), |acc, j| {
            acc + Rational64::from_integer(m[(i, j)]) * x[j]
        });
        s.is_integer()
    })
}

/// Kernel of an isogeny between tori of equal dimension.
pub fn isogeny_kernel(h: &AnalyticHom) -> Result<IsogenyKernelReport> {
    if h.source.dim() != h.target.dim() {
        return Err(Error::NotAnIsogeny("source and target dimensions differ".into()));
    }
    let m = h.integer_matrix()?;
    let det = determinant(&m)?;
    if det == 0 {
        return Err(Error::NotAnIsogeny("lattice map is singular".into()));
    }
    // U·M·V = S, so M·(V·eₖ/sₖ) = U⁻¹·eₖ is integral
    let f = smith_normal_form(&m)?;
    let divisors: Vec<u64> = f.diagonal().iter().map(|&x| x as u64).collect();
    let order: u128 = divisors.iter().map(|&x| x as u128).product();
    if order != det.unsigned_abs() {
        return Err(Error::InvariantViolated(format!(
            "kernel order {order} differs from |det M| = {}",
            det.unsigned_abs()
        )));
    }
    let mut generators = Vec::new();
    for (k, &s) in divisors.iter().enumerate() {
        if s > 1 {
            let x: Vec<Rational64> = (0..m.ncols())
                .map(|i| Rational64::new(f.v[(i, k)].rem_euclid(s as i128) as i64, s as i64))
                .collect();
            let coordinates = reduce_mod_one(&x);
            debug_assert!(maps_into_lattice(&m, &coordinates));
            let point = h.source.point(&coordinates);
            generators.push(KernelPoint { coordinates, point });
        }
    }
    Ok(IsogenyKernelReport {
        order: order as u64,
        elementary_divisors: divisors,
        generators,
    })
}

/// The pulled-back form `Mᵀ·J_D·M` on the source lattice.
pub fn pullback_form(h: &AnalyticHom, d: &PolarizationType) -> Result<DMatrix<i64>> {
    if h.target.dim() != 3 {
        return Err(Error::NotAHomomorphism("target must be a polarized threefold".into()));
    }
    let m = h.integer_matrix()?;
    Ok(m.transpose() * omega_matrix(d) * m)
}

/// Elementary divisors of an alternating form, one per symplectic pair.
pub fn alternating_type(form: &DMatrix<i64>) -> Result<Vec<u64>> {
    let diag = smith_normal_form(form)?.diagonal();
    if diag.contains(&0) {
        return Err(Error::NotAnIsogeny("pulled-back form is degenerate".into()));
    }
    let mut out = Vec::new();
    for pair in diag.chunks(2) {
        if pair.len() != 2 || pair[0] != pair[1] {
            return Err(Error::InvariantViolated(format!(
                "form is not alternating: divisors {diag:?}"
            )));
        }
        out.push(pair[0] as u64);
    }
    Ok(out)
}

/// Polarization type of the pullback of `[Z D]`'s polarization along `h`.
pub fn polarization_type_of_pullback(h: &AnalyticHom, d: &PolarizationType) -> Result<Vec<u64>> {
    alternating_type(&pullback_form(h, d)?)
}

/// `ker λ` of a polarization of type `D`, with its 2-torsion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarizationKernel {
    /// Invariant factors of `ker λ ≅ ⊕ (ℤ/dᵢ)²`, ones omitted.
    pub invariants: Vec<u64>,
    pub order: u64,
    pub two_torsion_order: u64,
    /// Generators of the 2-torsion of `ker λ`, in `[Z D]` lattice coordinates.
    pub two_torsion_generators: Vec<Vec<Rational64>>,
}

pub fn two_torsion_in_kernel_of_lambda(d: &PolarizationType) -> PolarizationKernel {
    let mut invariants = Vec::new();
    let mut gens = Vec::new();
    for (i, &di) in d.0.iter().enumerate() {
        if di > 1 {
            invariants.extend([di, di]);
        }
        if di % 2 == 0 {
            for slot in [i, 3 + i] {
                let mut x = vec![Rational64::from_integer(0); 6];
                x[slot] = Rational64::new(1, 2);
                gens.push(x);
            }
        }
    }
    invariants.sort();
    PolarizationKernel {
        order: d.0.iter().map(|x| x * x).product(),
        two_torsion_order: 1 << gens.len(),
        invariants,
        two_torsion_generators: gens,
    }
}
