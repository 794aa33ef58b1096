//! Prym period matrices of Klein coverings and their inverse.
//!
//! A non-isotropic configuration gives three Legendre curves `Eᵢ` with
//! period ratios `τᵢ`; the Prym is `(E₁×E₂×E₃)/K` with `|K| = 16`, with
//! period matrix in the locus `𝒵₄` and polarization `(1,1,4)`. An isotropic
//! configuration gives curves branched at the other two pairs, and a Prym
//! `(E₁×E₂×E₃)/{0, (x₁,x₂,x₃)}` with period matrix in `𝒵₂` and polarization
//! `(1,2,2)`.
//!
//! Embeddings `Eᵢ → A` are given by fixed analytic representations; all
//! claims about them (lattice images, restricted types, kernels) are
//! re-derived in exact arithmetic by [`verify_prym`].

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{modular_lambda, tau_from_branch_points, LevelTwoLabel};
use crate::error::{Error, Result};
use crate::lattice::{
    generated_subgroup, isogeny_kernel, polarization_type_of_pullback, reduce_mod_one,
    restricted_polarization_type, AnalyticHom, ComplexTorus, IsogenyKernelReport,
    PolarizationType, PolarizedPeriodMatrix,
};
use crate::projective::{
    normalize, MarkedConfiguration, MarkingKind, NormalizedConfiguration, ProjPoint,
};
use crate::serde_complex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrymCase {
    NonIsotropic,
    Isotropic,
}

impl PrymCase {
    pub fn polarization(self) -> PolarizationType {
        match self {
            PrymCase::NonIsotropic => PolarizationType::D4,
            PrymCase::Isotropic => PolarizationType::D2,
        }
    }

    pub fn from_kind(kind: MarkingKind) -> Self {
        match kind {
            MarkingKind::Triple => PrymCase::NonIsotropic,
            MarkingKind::PairPartition => PrymCase::Isotropic,
        }
    }

    pub fn kind(self) -> MarkingKind {
        match self {
            PrymCase::NonIsotropic => MarkingKind::Triple,
            PrymCase::Isotropic => MarkingKind::PairPartition,
        }
    }

    /// The case whose polarization type is `d`.
    pub fn from_polarization(d: PolarizationType) -> Option<Self> {
        [PrymCase::NonIsotropic, PrymCase::Isotropic]
            .into_iter()
            .find(|c| c.polarization() == d)
    }

    /// `det Im Z / ∏ Im zᵢ` on the locus.
    pub fn det_factor(self) -> f64 {
        match self {
            PrymCase::NonIsotropic => 0.0625,
            PrymCase::Isotropic => 0.5,
        }
    }

    /// Expected order of the kernel of the addition map.
    pub fn kernel_order(self) -> u64 {
        match self {
            PrymCase::NonIsotropic => 16,
            PrymCase::Isotropic => 2,
        }
    }

    pub fn kernel_divisors(self) -> Vec<u64> {
        match self {
            PrymCase::NonIsotropic => vec![1, 1, 2, 2, 2, 2],
            PrymCase::Isotropic => vec![1, 1, 1, 1, 1, 2],
        }
    }

    /// Type of the polarization restricted to each embedded curve.
    pub fn restricted_type(self) -> u64 {
        match self {
            PrymCase::NonIsotropic => 4,
            PrymCase::Isotropic => 2,
        }
    }

    /// Type of the polarization pulled back to `E₁×E₂×E₃`.
    pub fn pullback_type(self) -> Vec<u64> {
        let r = self.restricted_type();
        vec![r; 3]
    }
}

/// The triple `(z₁, z₂, z₃)` parametrizing a locus, each in the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 2]; 3]", into = "[[f64; 2]; 3]")]
pub struct HalfPeriodTriple([Complex64; 3]);

impl HalfPeriodTriple {
    pub fn new(z: [Complex64; 3]) -> Result<Self> {
        for (i, zi) in z.iter().enumerate() {
            if !(zi.im > 0.0 && zi.re.is_finite() && zi.im.is_finite()) {
                return Err(Error::NotInUpperHalfPlane(format!("z{} = {zi}", i + 1)));
            }
        }
        Ok(HalfPeriodTriple(z))
    }

    pub fn z(&self) -> [Complex64; 3] {
        self.0
    }

    pub fn im_product(&self) -> f64 {
        self.0.iter().map(|z| z.im).product()
    }
}

impl TryFrom<[[f64; 2]; 3]> for HalfPeriodTriple {
    type Error = Error;

    fn try_from(p: [[f64; 2]; 3]) -> Result<Self> {
        HalfPeriodTriple::new(p.map(serde_complex::from_pair))
    }
}

impl From<HalfPeriodTriple> for [[f64; 2]; 3] {
    fn from(z: HalfPeriodTriple) -> Self {
        z.0.map(serde_complex::to_pair)
    }
}

fn symmetric(e: [[Complex64; 3]; 3]) -> Matrix3<Complex64> {
    Matrix3::from_fn(|i, j| e[i][j])
}

/// The point of `𝒵₄` attached to `(z₁, z₂, z₃)`.
pub fn build_z4(z: &HalfPeriodTriple) -> Result<PolarizedPeriodMatrix> {
    let [z1, z2, z3] = z.0;
    let z11 = (z2 + z3) / 4.0;
    let z12 = z2 / 4.0;
    let z13 = -(z2 + z3) / 2.0;
    let z22 = (z1 + z2) / 4.0;
    let z23 = -(z1 + z2) / 2.0;
    let z33 = z1 + z2 + z3;
    let m = symmetric([[z11, z12, z13], [z12, z22, z23], [z13, z23, z33]]);
    PolarizedPeriodMatrix::new(m, PolarizationType::D4)
}

/// The point of `𝒵₂` attached to `(z₁, z₂, z₃)`.
pub fn build_z2(z: &HalfPeriodTriple) -> Result<PolarizedPeriodMatrix> {
    let [z1, z2, z3] = z.0;
    let zero = Complex64::new(0.0, 0.0);
    let z11 = (2.0 * z1 + z2 + z3) / 4.0;
    let m = symmetric([[z11, z2 / 2.0, z3 / 2.0], [z2 / 2.0, z2, zero], [z3 / 2.0, zero, z3]]);
    PolarizedPeriodMatrix::new(m, PolarizationType::D2)
}

pub fn build_period_matrix(case: PrymCase, z: &HalfPeriodTriple) -> Result<PolarizedPeriodMatrix> {
    match case {
        PrymCase::NonIsotropic => build_z4(z),
        PrymCase::Isotropic => build_z2(z),
    }
}

/// Residuals of the linear equations cutting out the locus.
pub fn locus_residuals(z: &Matrix3<Complex64>, case: PrymCase) -> [Complex64; 3] {
    let e = |i: usize, j: usize| z[(i, j)];
    match case {
        PrymCase::NonIsotropic => [
            -2.0 * e(0, 0) - e(2, 0),
            e(1, 0) - (e(0, 0) + e(1, 1) - e(2, 2) / 4.0),
            -2.0 * e(1, 1) - e(2, 1),
        ],
        PrymCase::Isotropic => [e(2, 2) - 2.0 * e(2, 0), e(2, 1), e(1, 1) - 2.0 * e(1, 0)],
    }
}

/// Largest residual, relative to the size of `Z`.
pub fn locus_defect(pm: &PolarizedPeriodMatrix, case: PrymCase) -> f64 {
    let scale = pm.z().iter().map(|e| e.norm()).fold(1.0, f64::max);
    locus_residuals(pm.z(), case)
        .iter()
        .map(|r| r.norm())
        .fold(0.0, f64::max)
        / scale
}

pub fn in_locus(pm: &PolarizedPeriodMatrix, case: PrymCase, tol: f64) -> bool {
    pm.polarization() == case.polarization() && locus_defect(pm, case) <= tol
}

/// Reads `(z₁, z₂, z₃)` back off a locus point.
pub fn recover_half_periods(pm: &PolarizedPeriodMatrix, case: PrymCase) -> Result<HalfPeriodTriple> {
    let e = |i: usize, j: usize| pm.z()[(i, j)];
    let z = match case {
        PrymCase::NonIsotropic => {
            let z2 = 4.0 * e(0, 1);
            [4.0 * e(1, 1) - z2, z2, 4.0 * e(0, 0) - z2]
        }
        PrymCase::Isotropic => {
            let (z2, z3) = (e(1, 1), e(2, 2));
            [(4.0 * e(0, 0) - z2 - z3) / 2.0, z2, z3]
        }
    };
    HalfPeriodTriple::new(z)
}

/// Period ratios `τᵢ` of the three embedded curves.
pub fn period_ratios(z: &HalfPeriodTriple, case: PrymCase) -> [Complex64; 3] {
    let [z1, z2, z3] = z.0;
    match case {
        PrymCase::NonIsotropic => [z1 / 4.0, z2 / 4.0, z3 / 4.0],
        PrymCase::Isotropic => [z1, z2 / 2.0, z3 / 2.0],
    }
}

fn half_periods_from_ratios(tau: [Complex64; 3], case: PrymCase) -> Result<HalfPeriodTriple> {
    HalfPeriodTriple::new(match case {
        PrymCase::NonIsotropic => tau.map(|t| 4.0 * t),
        PrymCase::Isotropic => [tau[0], 2.0 * tau[1], 2.0 * tau[2]],
    })
}

/// Source lattice `[gᵢ s]` of each embedded curve: `(gᵢ, s)`.
pub fn curve_lattices(z: &HalfPeriodTriple, case: PrymCase) -> [(Complex64, f64); 3] {
    let [z1, z2, z3] = z.0;
    match case {
        PrymCase::NonIsotropic => [(z1, 4.0), (z2, 4.0), (z3, 4.0)],
        PrymCase::Isotropic => [(2.0 * z1, 2.0), (z2, 2.0), (z3, 2.0)],
    }
}

/// Analytic representation `Fᵢ: ℂ → ℂ³` of each embedding, as a column.
pub fn embedding_columns(case: PrymCase) -> [[f64; 3]; 3] {
    match case {
        PrymCase::NonIsotropic => [[0.0, -0.5, 1.0], [0.5, 0.5, -1.0], [-0.5, 0.0, 1.0]],
        PrymCase::Isotropic => [[0.5, 0.0, 0.0], [0.5, 1.0, 0.0], [0.5, 0.0, 1.0]],
    }
}

fn column(c: [f64; 3]) -> DMatrix<Complex64> {
    DMatrix::from_iterator(3, 1, c.iter().map(|&x| Complex64::new(x, 0.0)))
}

/// The embeddings `Eᵢ → A_{Z,D}`.
pub fn embeddings(
    pm: &PolarizedPeriodMatrix,
    z: &HalfPeriodTriple,
    case: PrymCase,
) -> Result<[AnalyticHom; 3]> {
    let target = pm.torus();
    let cols = embedding_columns(case);
    let lattices = curve_lattices(z, case);
    let mk = |i: usize| {
        let (g, s) = lattices[i];
        AnalyticHom::new(column(cols[i]), ComplexTorus::elliptic(g, s)?, target.clone())
    };
    Ok([mk(0)?, mk(1)?, mk(2)?])
}

/// The addition map `E₁×E₂×E₃ → A_{Z,D}`, `(x₁,x₂,x₃) ↦ Σ Fᵢ(xᵢ)`.
pub fn addition_map(
    pm: &PolarizedPeriodMatrix,
    z: &HalfPeriodTriple,
    case: PrymCase,
) -> Result<AnalyticHom> {
    let cols = embedding_columns(case);
    let f = DMatrix::from_fn(3, 3, |i, j| Complex64::new(cols[j][i], 0.0));
    let lattices = curve_lattices(z, case);
    let mut periods = DMatrix::zeros(3, 6);
    for (i, (g, s)) in lattices.iter().enumerate() {
        periods[(i, i)] = *g;
        periods[(i, 3 + i)] = Complex64::new(*s, 0.0);
    }
    AnalyticHom::new(f, ComplexTorus::new(periods)?, pm.torus())
}

/// Generators of the expected kernel of the addition map, in source coordinates
/// `(g₁, g₂, g₃, s₁, s₂, s₃)`.
pub fn expected_kernel_generators(case: PrymCase) -> Vec<Vec<Rational64>> {
    let h = Rational64::new(1, 2);
    let o = Rational64::from_integer(0);
    match case {
        PrymCase::NonIsotropic => vec![
            vec![h, h, o, o, o, o],
            vec![o, h, h, o, o, o],
            vec![o, o, o, h, h, o],
            vec![o, o, o, o, h, h],
        ],
        PrymCase::Isotropic => vec![vec![h, h, h, o, o, o]],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrymResult {
    #[serde(flatten)]
    pub period_matrix: PolarizedPeriodMatrix,
    pub case: PrymCase,
    pub z: HalfPeriodTriple,
    pub kernel: IsogenyKernelReport,
    pub restricted_types: [u64; 3],
    pub pullback_type: Vec<u64>,
}

fn assemble(case: PrymCase, z: HalfPeriodTriple) -> Result<PrymResult> {
    let pm = build_period_matrix(case, &z)?;
    let h = addition_map(&pm, &z, case)?;
    let kernel = isogeny_kernel(&h)?;
    let emb = embeddings(&pm, &z, case)?;
    let mut restricted_types = [0; 3];
    for (r, f) in restricted_types.iter_mut().zip(&emb) {
        *r = restricted_polarization_type(f, &pm.polarization())?;
    }
    let pullback_type = polarization_type_of_pullback(&h, &pm.polarization())?;
    let result = PrymResult { period_matrix: pm, case, z, kernel, restricted_types, pullback_type };
    let report = verify_prym(&result.period_matrix, case, Some(&result.z), crate::DEFAULT_TOLERANCE);
    if let Some((name, c)) = report.checks.iter().find(|(_, c)| !c.pass) {
        return Err(Error::InvariantViolated(format!("{name}: {}", c.detail)));
    }
    Ok(result)
}

/// Prym of a non-isotropic Klein covering, from `(0, 1, ∞ | b₁, b₂, b₃)`.
pub fn prym_forward_non_isotropic(cfg: &NormalizedConfiguration) -> Result<PrymResult> {
    if cfg.kind() != MarkingKind::Triple {
        return Err(Error::MarkingKindMismatch);
    }
    let refs = [ProjPoint::ZERO, ProjPoint::ONE, ProjPoint::Infinity];
    let mut tau = [Complex64::new(0.0, 0.0); 3];
    for (t, b) in tau.iter_mut().zip(cfg.b()) {
        let branch = [refs[0], refs[1], refs[2], ProjPoint::Finite(b)];
        *t = tau_from_branch_points(branch, LevelTwoLabel::identity())?.tau();
    }
    assemble(PrymCase::NonIsotropic, half_periods_from_ratios(tau, PrymCase::NonIsotropic)?)
}

/// Branch points of `Eᵢ` for pairs `(0, b₁), (1, b₂), (∞, b₃)`: the other two
/// pairs in order, so the frame is `pⱼ ↦ 0, qⱼ ↦ 1, pₖ ↦ ∞, qₖ ↦ mᵢ`.
fn isotropic_branch_points(b: [Complex64; 3], i: usize) -> [ProjPoint; 4] {
    let pairs = [
        [ProjPoint::ZERO, ProjPoint::Finite(b[0])],
        [ProjPoint::ONE, ProjPoint::Finite(b[1])],
        [ProjPoint::Infinity, ProjPoint::Finite(b[2])],
    ];
    let mut others = (0..3).filter(|&k| k != i);
    let (j, k) = (others.next().unwrap(), others.next().unwrap());
    [pairs[j][0], pairs[j][1], pairs[k][0], pairs[k][1]]
}

/// Prym of an isotropic Klein covering, from pairs `(0, b₁), (1, b₂), (∞, b₃)`.
pub fn prym_forward_isotropic(cfg: &NormalizedConfiguration) -> Result<PrymResult> {
    if cfg.kind() != MarkingKind::PairPartition {
        return Err(Error::MarkingKindMismatch);
    }
    let mut tau = [Complex64::new(0.0, 0.0); 3];
    for (i, t) in tau.iter_mut().enumerate() {
        let branch = isotropic_branch_points(cfg.b(), i);
        *t = tau_from_branch_points(branch, LevelTwoLabel::identity())?.tau();
    }
    assemble(PrymCase::Isotropic, half_periods_from_ratios(tau, PrymCase::Isotropic)?)
}

pub fn prym_forward(cfg: &NormalizedConfiguration) -> Result<PrymResult> {
    match cfg.kind() {
        MarkingKind::Triple => prym_forward_non_isotropic(cfg),
        MarkingKind::PairPartition => prym_forward_isotropic(cfg),
    }
}

/// Normalizes a marked configuration, then applies the forward map.
pub fn prym_of_configuration(cfg: &MarkedConfiguration) -> Result<PrymResult> {
    prym_forward(&normalize(cfg)?)
}

fn boundary(msg: String) -> Error {
    Error::DegenerateBoundary(msg)
}

/// Configuration with the given cross-ratios `mᵢ` of the isotropic frames.
///
/// `b₃ = m₂b₁`, `b₂ = 1 + (b₃ − 1)/m₁`, and `b₁` solves
/// `m₂(m₃−1)·b₁² + (1+m₂−m₁−m₃)·b₁ + (m₁−1) = 0`. The two roots differ by
/// swapping every pair, so they give equivalent configurations.
fn isotropic_from_cross_ratios(m: [Complex64; 3]) -> Result<NormalizedConfiguration> {
    let [m1, m2, m3] = m;
    let a = m2 * (m3 - 1.0);
    let b = 1.0 + m2 - m1 - m3;
    let c = m1 - 1.0;
    if a.norm() < 1e-14 {
        return Err(boundary(format!("degenerate cross-ratios {m:?}")));
    }
    let disc = (b * b - 4.0 * a * c).sqrt();
    // the larger-magnitude denominator avoids cancellation
    let q = if (b.conj() * disc).re >= 0.0 { -(b + disc) / 2.0 } else { -(b - disc) / 2.0 };
    let mut roots = vec![q / a];
    if q.norm() > 0.0 {
        roots.push(c / q);
    }
    let mut last = None;
    for b1 in roots {
        let b3 = m2 * b1;
        let b2 = 1.0 + (b3 - 1.0) / m1;
        match NormalizedConfiguration::new(MarkingKind::PairPartition, [b1, b2, b3]) {
            Ok(cfg) => return cfg.canonical(),
            Err(e) => last = Some(e),
        }
    }
    Err(boundary(format!(
        "no admissible configuration for cross-ratios {m:?}: {}",
        last.map(|e| e.to_string()).unwrap_or_default()
    )))
}

/// The configuration whose Prym has period matrix `pm`.
pub fn prym_inverse(pm: &PolarizedPeriodMatrix, tol: f64) -> Result<NormalizedConfiguration> {
    let case = PrymCase::from_polarization(pm.polarization()).ok_or_else(|| {
        Error::NotInPrymLocus(format!("polarization type {} is neither (1,1,4) nor (1,2,2)", pm.polarization()))
    })?;
    prym_inverse_as(pm, case, tol)
}

/// As [`prym_inverse`], with the locus fixed by the caller.
pub fn prym_inverse_as(
    pm: &PolarizedPeriodMatrix,
    case: PrymCase,
    tol: f64,
) -> Result<NormalizedConfiguration> {
    if pm.polarization() != case.polarization() {
        return Err(Error::NotInPrymLocus(format!(
            "polarization type {} does not match the {case:?} locus",
            pm.polarization()
        )));
    }
    let defect = locus_defect(pm, case);
    if defect > tol {
        return Err(Error::NotInPrymLocus(format!("locus equations fail by {defect:e}")));
    }
    let z = recover_half_periods(pm, case)?;
    let tau = period_ratios(&z, case);
    let mut m = [Complex64::new(0.0, 0.0); 3];
    for (mi, t) in m.iter_mut().zip(tau) {
        *mi = modular_lambda(t)?;
    }
    match case {
        PrymCase::NonIsotropic => NormalizedConfiguration::new(MarkingKind::Triple, m)
            .map_err(|e| boundary(e.to_string()))?
            .canonical()
            .map_err(|e| boundary(e.to_string())),
        PrymCase::Isotropic => isotropic_from_cross_ratios(m),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VerificationReport {
    pub checks: BTreeMap<String, Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }

    fn record(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.insert(name.to_string(), Check { pass, detail: detail.into() });
    }

    fn record_result<T>(&mut self, name: &str, r: Result<T>, judge: impl FnOnce(&T) -> (bool, String)) -> Option<T> {
        match r {
            Ok(v) => {
                let (pass, detail) = judge(&v);
                self.record(name, pass, detail);
                Some(v)
            }
            Err(e) => {
                self.record(name, false, e.to_string());
                None
            }
        }
    }
}

/// Re-derives every structural claim about a locus point.
///
/// When `z` is absent it is read off `Z`. Failures are reported, not raised.
pub fn verify_prym(
    pm: &PolarizedPeriodMatrix,
    case: PrymCase,
    z: Option<&HalfPeriodTriple>,
    tol: f64,
) -> VerificationReport {
    let mut report = VerificationReport::default();
    let d = pm.polarization();
    report.record(
        "polarization_type",
        d == case.polarization(),
        format!("{d}, expected {}", case.polarization()),
    );
    let defect = locus_defect(pm, case);
    report.record("locus_membership", defect <= tol, format!("largest residual {defect:e}"));

    let recovered = recover_half_periods(pm, case);
    let z = match (z, recovered) {
        (Some(z), Ok(r)) => {
            let gap = z.0.iter().zip(r.0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            let scale = z.0.iter().map(|a| a.norm()).fold(1.0, f64::max);
            report.record("half_periods", gap <= tol * scale, format!("recovered to within {gap:e}"));
            *z
        }
        (Some(z), Err(e)) => {
            report.record("half_periods", false, e.to_string());
            *z
        }
        (None, Ok(r)) => r,
        (None, Err(e)) => {
            report.record("half_periods", false, e.to_string());
            return report;
        }
    };

    let expected = case.det_factor() * z.im_product();
    let det = pm.im_determinant();
    let rel = (det - expected).abs() / expected.abs();
    report.record("det_im_identity", rel <= tol, format!("det Im Z = {det}, expected {expected} (relative gap {rel:e})"));

    if let Some(emb) = report.record_result("embeddings", embeddings(pm, &z, case), |_| (true, "constructed".into())) {
        let mut types = Vec::new();
        let mut errors = Vec::new();
        let mut primitive = true;
        for (i, f) in emb.iter().enumerate() {
            match restricted_polarization_type(f, &d) {
                Ok(t) => types.push(t),
                Err(e) => {
                    primitive &= !matches!(e, Error::NonPrimitive(_) | Error::NotAHomomorphism(_));
                    errors.push(format!("E{}: {e}", i + 1));
                    types.push(0);
                }
            }
        }
        report.record(
            "embedding_primitivity",
            primitive && errors.is_empty(),
            if errors.is_empty() { "all generator images are primitive lattice vectors".into() } else { errors.join("; ") },
        );
        let want = case.restricted_type();
        report.record(
            "restricted_types",
            types.iter().all(|&t| t == want),
            format!("{types:?}, expected {:?}", [want; 3]),
        );
    }

    let Some(h) = report.record_result("addition_map", addition_map(pm, &z, case), |_| (true, "constructed".into())) else {
        return report;
    };
    let kernel = isogeny_kernel(&h);
    if let Some(k) = report.record_result("kernel_order", kernel, |k| {
        (k.order == case.kernel_order(), format!("{}, expected {}", k.order, case.kernel_order()))
    }) {
        report.record(
            "kernel_divisors",
            k.elementary_divisors == case.kernel_divisors(),
            format!("{:?}, expected {:?}", k.elementary_divisors, case.kernel_divisors()),
        );
        let computed = k.elements();
        let want = generated_subgroup(&expected_kernel_generators(case), 6);
        report.record(
            "kernel_generators",
            computed == want,
            format!("computed subgroup of order {}, expected subgroup of order {}", computed.len(), want.len()),
        );
        let sizes = kernel_projection_orders(&k);
        report.record(
            "kernel_projections",
            sizes.iter().all(|&s| s > 1),
            format!("projection orders {sizes:?}"),
        );
    }
    report.record_result("pullback_type", polarization_type_of_pullback(&h, &d), |t| {
        (*t == case.pullback_type(), format!("{t:?}, expected {:?}", case.pullback_type()))
    });
    report
}

/// Orders of the projections of the kernel to each factor `Eᵢ`.
pub fn kernel_projection_orders(k: &IsogenyKernelReport) -> [usize; 3] {
    let elements = k.elements();
    let mut out = [0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        let projected: std::collections::BTreeSet<Vec<Rational64>> = elements
            .iter()
            .map(|x| reduce_mod_one(&[x[i], x[3 + i]]))
            .collect();
        *o = projected.len();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::modular_lambda;
    use crate::projective::equivalent;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn triple(z: [Complex64; 3]) -> HalfPeriodTriple {
        HalfPeriodTriple::new(z).unwrap()
    }

    #[test]
    fn z4_at_i() {
        let i = c(0.0, 1.0);
        let pm = build_z4(&triple([i, i, i])).unwrap();
        let want = Matrix3::new(i / 2.0, i / 4.0, -i, i / 4.0, i / 2.0, -i, -i, -i, 3.0 * i);
        assert!((pm.z() - want).iter().all(|e| e.norm() < 1e-15));
        assert!((pm.im_determinant() - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn z2_at_i() {
        let i = c(0.0, 1.0);
        let pm = build_z2(&triple([i, i, i])).unwrap();
        let o = c(0.0, 0.0);
        let want = Matrix3::new(i, i / 2.0, i / 2.0, i / 2.0, i, o, i / 2.0, o, i);
        assert!((pm.z() - want).iter().all(|e| e.norm() < 1e-15));
        assert!((pm.im_determinant() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn half_periods_roundtrip_through_locus() {
        let z = triple([c(0.3, 1.1), c(-0.7, 0.4), c(1.9, 2.5)]);
        for case in [PrymCase::NonIsotropic, PrymCase::Isotropic] {
            let pm = build_period_matrix(case, &z).unwrap();
            assert!(in_locus(&pm, case, 1e-14));
            let back = recover_half_periods(&pm, case).unwrap();
            for (a, b) in z.z().iter().zip(back.z()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn forward_at_imaginary_axis() {
        let b = [1.0, 2.0, 3.0].map(|t| modular_lambda(c(0.0, t)).unwrap());
        let cfg = NormalizedConfiguration::new(MarkingKind::Triple, b).unwrap();
        let r = prym_forward_non_isotropic(&cfg).unwrap();
        for (z, want) in r.z.z().iter().zip([4.0, 8.0, 12.0]) {
            assert!((z - c(0.0, want)).norm() < 1e-9, "{z}");
        }
        assert_eq!(r.kernel.order, 16);
        assert_eq!(r.restricted_types, [4, 4, 4]);
        assert_eq!(r.pullback_type, vec![4, 4, 4]);
    }

    #[test]
    fn forward_isotropic_certificates() {
        let cfg = NormalizedConfiguration::new(MarkingKind::PairPartition, [c(2.0, 0.5), c(-1.0, 1.0), c(0.5, -2.0)]).unwrap();
        let r = prym_forward_isotropic(&cfg).unwrap();
        assert_eq!(r.kernel.order, 2);
        assert_eq!(r.restricted_types, [2, 2, 2]);
        assert_eq!(r.pullback_type, vec![2, 2, 2]);
        assert_eq!(kernel_projection_orders(&r.kernel), [2, 2, 2]);
        let gen = &r.kernel.generators[0].coordinates;
        let h = Rational64::new(1, 2);
        assert_eq!(gen[..3], [h, h, h]);
    }

    #[test]
    fn roundtrips() {
        let cases = [
            (MarkingKind::Triple, [c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]),
            (MarkingKind::Triple, [c(0.3, 0.8), c(-1.5, -0.2), c(2.2, 1.7)]),
            (MarkingKind::PairPartition, [c(2.0, 0.5), c(-1.0, 1.0), c(0.5, -2.0)]),
            (MarkingKind::PairPartition, [c(-2.0, 0.0), c(3.0, 0.0), c(0.25, 0.0)]),
        ];
        for (kind, b) in cases {
            let cfg = NormalizedConfiguration::new(kind, b).unwrap();
            let r = prym_forward(&cfg).unwrap();
            let back = prym_inverse(&r.period_matrix, 1e-9).unwrap();
            assert!(equivalent(&back.to_marked(), &cfg.to_marked()).unwrap(), "{kind:?} {b:?} -> {:?}", back.b());
        }
    }

    #[test]
    fn flip_symmetric_configuration_loses_half_the_digits() {
        // the flip of every pair fixes this configuration, so the quadratic has
        // a double root and the inverse is only √ε-accurate
        let cfg = NormalizedConfiguration::new(MarkingKind::PairPartition, [c(-2.0, 0.0), c(3.0, 0.0), c(0.5, 0.0)]).unwrap();
        let r = prym_forward(&cfg).unwrap();
        let back = prym_inverse(&r.period_matrix, 1e-9).unwrap();
        assert!(crate::projective::equivalent_within(&back.to_marked(), &cfg.to_marked(), 1e-6).unwrap());
    }

    #[test]
    fn perturbed_matrix_fails_membership() {
        let cfg = NormalizedConfiguration::new(MarkingKind::Triple, [c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]).unwrap();
        let r = prym_forward(&cfg).unwrap();
        let mut z = *r.period_matrix.z();
        z[(0, 2)] += c(1e-3, 0.0);
        z[(2, 0)] += c(1e-3, 0.0);
        let pm = PolarizedPeriodMatrix::new(z, PolarizationType::D4).unwrap();
        let report = verify_prym(&pm, PrymCase::NonIsotropic, Some(&r.z), 1e-9);
        assert!(!report.checks["locus_membership"].pass);
        assert!(matches!(prym_inverse(&pm, 1e-9), Err(Error::NotInPrymLocus(_))));
    }

    #[test]
    fn wrong_polarization_fails_type_checks() {
        let cfg = NormalizedConfiguration::new(MarkingKind::Triple, [c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]).unwrap();
        let r = prym_forward(&cfg).unwrap();
        let pm = r.period_matrix.with_polarization(PolarizationType::D2);
        let report = verify_prym(&pm, PrymCase::NonIsotropic, Some(&r.z), 1e-9);
        assert!(!report.passed());
        assert!(!report.checks["polarization_type"].pass);
        assert!(!report.checks["restricted_types"].pass);
    }

    #[test]
    fn result_json_parses_as_period_matrix() {
        let cfg = NormalizedConfiguration::new(MarkingKind::PairPartition, [c(2.0, 0.5), c(-1.0, 1.0), c(0.5, -2.0)]).unwrap();
        let r = prym_forward(&cfg).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: PrymResult = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        let pm: PolarizedPeriodMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(pm, r.period_matrix);
    }
}
