//! Six marked points on the projective line and their normal forms.
//!
//! A configuration carries either a marked triple of points or a partition
//! of the six points into three unordered pairs. Normalization sends three
//! reference points to `0, 1, ∞`; exhausting every admissible choice of
//! reference points and taking the lexicographically least result gives a
//! canonical form, so projective equivalence reduces to comparing normal
//! forms.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::serde_complex;

/// Points closer than this in the chordal metric are treated as coincident.
pub const DISTINCT_TOLERANCE: f64 = 1e-9;

/// Default tolerance when comparing normal forms.
pub const EQUIVALENCE_TOLERANCE: f64 = 1e-8;

/// A point of P¹ = ℂ ∪ {∞}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointRepr", into = "PointRepr")]
pub enum ProjPoint {
    Finite(Complex64),
    Infinity,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Finite([f64; 2]),
    Tag(String),
}

impl TryFrom<PointRepr> for ProjPoint {
    type Error = String;

    fn try_from(repr: PointRepr) -> std::result::Result<Self, String> {
        match repr {
            PointRepr::Finite(p) => {
                ProjPoint::finite(serde_complex::from_pair(p)).map_err(|e| e.to_string())
            }
            PointRepr::Tag(t) if t == "inf" => Ok(ProjPoint::Infinity),
            PointRepr::Tag(t) => Err(format!("expected [re, im] or \"inf\", got {t:?}")),
        }
    }
}

impl From<ProjPoint> for PointRepr {
    fn from(p: ProjPoint) -> Self {
        match p {
            ProjPoint::Finite(z) => PointRepr::Finite(serde_complex::to_pair(z)),
            ProjPoint::Infinity => PointRepr::Tag("inf".into()),
        }
    }
}

impl ProjPoint {
    pub const ZERO: ProjPoint = ProjPoint::Finite(Complex64::new(0.0, 0.0));
    pub const ONE: ProjPoint = ProjPoint::Finite(Complex64::new(1.0, 0.0));

    /// A finite point; NaN or infinite components are rejected.
    pub fn finite(z: Complex64) -> Result<Self> {
        if z.re.is_finite() && z.im.is_finite() {
            Ok(ProjPoint::Finite(z))
        } else {
            Err(Error::DegenerateConfiguration(format!(
                "non-finite coordinate {z}"
            )))
        }
    }

    pub fn real(x: f64) -> Self {
        ProjPoint::Finite(Complex64::new(x, 0.0))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ProjPoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<Complex64> {
        match *self {
            ProjPoint::Finite(z) => Some(z),
            ProjPoint::Infinity => None,
        }
    }

    /// Chordal distance on the Riemann sphere of diameter one.
    pub fn chordal_distance(&self, other: &ProjPoint) -> f64 {
        match (*self, *other) {
            (ProjPoint::Infinity, ProjPoint::Infinity) => 0.0,
            (ProjPoint::Finite(z), ProjPoint::Infinity)
            | (ProjPoint::Infinity, ProjPoint::Finite(z)) => 1.0 / (1.0 + z.norm_sqr()).sqrt(),
            (ProjPoint::Finite(z), ProjPoint::Finite(w)) => {
                (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
            }
        }
    }

    pub fn coincides_with(&self, other: &ProjPoint) -> bool {
        self.chordal_distance(other) < DISTINCT_TOLERANCE
    }

    fn homogeneous(&self) -> [Complex64; 2] {
        match *self {
            ProjPoint::Finite(z) => [z, Complex64::new(1.0, 0.0)],
            ProjPoint::Infinity => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        }
    }

    fn from_homogeneous(w: [Complex64; 2]) -> Self {
        if w[1] == Complex64::new(0.0, 0.0) {
            return ProjPoint::Infinity;
        }
        let z = w[0] / w[1];
        if z.re.is_finite() && z.im.is_finite() {
            ProjPoint::Finite(z)
        } else {
            ProjPoint::Infinity
        }
    }
}

impl From<Complex64> for ProjPoint {
    fn from(z: Complex64) -> Self {
        ProjPoint::Finite(z)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Finite(z) => write!(f, "{z}"),
            ProjPoint::Infinity => write!(f, "∞"),
        }
    }
}

fn det2(u: [Complex64; 2], v: [Complex64; 2]) -> Complex64 {
    u[0] * v[1] - u[1] * v[0]
}

/// A Möbius transformation `z ↦ (a z + b) / (c z + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl Mobius {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        if (a * d - b * c).norm() == 0.0 {
            return Err(Error::DegenerateFrame);
        }
        Ok(Mobius { a, b, c, d })
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Mobius { a: one, b: zero, c: zero, d: one }
    }

    /// The unique map sending `p0 → 0`, `p1 → 1`, `pinf → ∞`.
    pub fn to_standard_frame(p0: ProjPoint, p1: ProjPoint, pinf: ProjPoint) -> Result<Self> {
        if p0.coincides_with(&p1) || p0.coincides_with(&pinf) || p1.coincides_with(&pinf) {
            return Err(Error::DegenerateFrame);
        }
        let (h0, h1, hinf) = (p0.homogeneous(), p1.homogeneous(), pinf.homogeneous());
        // z ↦ [z, p0][p1, pinf] / ([z, pinf][p1, p0]) with [u, v] = det(u, v)
        let k_num = det2(h1, hinf);
        let k_den = det2(h1, h0);
        Mobius::new(
            h0[1] * k_num,
            -h0[0] * k_num,
            hinf[1] * k_den,
            -hinf[0] * k_den,
        )
    }

    pub fn apply(&self, p: ProjPoint) -> ProjPoint {
        let [z1, z2] = p.homogeneous();
        ProjPoint::from_homogeneous([self.a * z1 + self.b * z2, self.c * z1 + self.d * z2])
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> Mobius {
        Mobius { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }
}

/// Image of `p` under the Möbius map sending `a → 0`, `b → 1`, `c → ∞`.
pub fn cross_ratio(p: ProjPoint, a: ProjPoint, b: ProjPoint, c: ProjPoint) -> Result<ProjPoint> {
    Ok(Mobius::to_standard_frame(a, b, c)?.apply(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Marking {
    /// Three distinct indices into the point list.
    Triple([usize; 3]),
    /// Three disjoint index pairs covering `0..6`.
    Pairs([[usize; 2]; 3]),
}

impl Marking {
    pub fn kind(&self) -> MarkingKind {
        match self {
            Marking::Triple(_) => MarkingKind::Triple,
            Marking::Pairs(_) => MarkingKind::PairPartition,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Marking::Triple(t) => {
                if t.iter().any(|&i| i >= 6) {
                    return Err(Error::InvalidMarking(format!("index out of range in {t:?}")));
                }
                if t[0] == t[1] || t[0] == t[2] || t[1] == t[2] {
                    return Err(Error::InvalidMarking(format!("repeated index in {t:?}")));
                }
            }
            Marking::Pairs(pairs) => {
                let mut seen = [false; 6];
                for &i in pairs.iter().flatten() {
                    if i >= 6 {
                        return Err(Error::InvalidMarking(format!(
                            "index out of range in {pairs:?}"
                        )));
                    }
                    if seen[i] {
                        return Err(Error::InvalidMarking(format!(
                            "pairs {pairs:?} are not disjoint"
                        )));
                    }
                    seen[i] = true;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkingKind {
    Triple,
    PairPartition,
}

/// Six pairwise distinct points of P¹ with a marking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfiguration")]
pub struct MarkedConfiguration {
    points: [ProjPoint; 6],
    marking: Marking,
}

#[derive(Deserialize)]
struct RawConfiguration {
    points: [ProjPoint; 6],
    marking: Marking,
}

impl TryFrom<RawConfiguration> for MarkedConfiguration {
    type Error = Error;

    fn try_from(raw: RawConfiguration) -> Result<Self> {
        MarkedConfiguration::new(raw.points, raw.marking)
    }
}

impl MarkedConfiguration {
    pub fn new(points: [ProjPoint; 6], marking: Marking) -> Result<Self> {
        marking.validate()?;
        for i in 0..6 {
            for j in (i + 1)..6 {
                if points[i].coincides_with(&points[j]) {
                    return Err(Error::DegenerateConfiguration(format!(
                        "points {i} and {j} coincide ({} ≈ {})",
                        points[i], points[j]
                    )));
                }
            }
        }
        Ok(MarkedConfiguration { points, marking })
    }

    pub fn points(&self) -> &[ProjPoint; 6] {
        &self.points
    }

    pub fn marking(&self) -> Marking {
        self.marking
    }

    pub fn kind(&self) -> MarkingKind {
        self.marking.kind()
    }

    /// Moves every point by `g`, keeping the marking attached to the same indices.
    pub fn transport(&self, g: &Mobius) -> Result<Self> {
        MarkedConfiguration::new(self.points.map(|p| g.apply(p)), self.marking)
    }

    /// Normalized `b`-triples for every admissible choice of reference points.
    pub fn frame_candidates(&self) -> Result<Vec<[Complex64; 3]>> {
        let p = &self.points;
        let mut out = Vec::new();
        match self.marking {
            Marking::Triple(t) => {
                let free: Vec<usize> = (0..6).filter(|i| !t.contains(i)).collect();
                for [i, j, k] in PERMUTATIONS_3 {
                    let g = Mobius::to_standard_frame(p[t[i]], p[t[j]], p[t[k]])?;
                    let mut b = [0, 1, 2].map(|s| g.apply(p[free[s]]));
                    let mut vals = [Complex64::default(); 3];
                    for (v, q) in vals.iter_mut().zip(b.iter_mut()) {
                        *v = finite_or_degenerate(*q)?;
                    }
                    vals.sort_by(|x, y| cmp_complex(x, y, EQUIVALENCE_TOLERANCE));
                    out.push(vals);
                }
            }
            Marking::Pairs(pairs) => {
                for [i, j, k] in PERMUTATIONS_3 {
                    let order = [pairs[i], pairs[j], pairs[k]];
                    for flips in 0..8u8 {
                        let oriented = [0, 1, 2].map(|s| {
                            let pr = order[s];
                            if flips >> s & 1 == 1 {
                                [pr[1], pr[0]]
                            } else {
                                pr
                            }
                        });
                        let g = Mobius::to_standard_frame(
                            p[oriented[0][0]],
                            p[oriented[1][0]],
                            p[oriented[2][0]],
                        )?;
                        let mut vals = [Complex64::default(); 3];
                        for (s, v) in vals.iter_mut().enumerate() {
                            *v = finite_or_degenerate(g.apply(p[oriented[s][1]]))?;
                        }
                        out.push(vals);
                    }
                }
            }
        }
        Ok(out)
    }
}

fn finite_or_degenerate(p: ProjPoint) -> Result<Complex64> {
    p.as_finite().ok_or_else(|| {
        Error::DegenerateConfiguration("a free point was sent to ∞".into())
    })
}

pub(crate) const PERMUTATIONS_3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn cmp_real(x: f64, y: f64, tol: f64) -> Ordering {
    if (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())) {
        Ordering::Equal
    } else {
        x.total_cmp(&y)
    }
}

/// Lexicographic order on `(Re, Im)` that treats near-equal parts as ties.
pub fn cmp_complex(x: &Complex64, y: &Complex64, tol: f64) -> Ordering {
    cmp_real(x.re, y.re, tol).then_with(|| cmp_real(x.im, y.im, tol))
}

fn cmp_triple(x: &[Complex64; 3], y: &[Complex64; 3], tol: f64) -> Ordering {
    x.iter()
        .zip(y)
        .map(|(a, b)| cmp_complex(a, b, tol))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn close_triple(x: &[Complex64; 3], y: &[Complex64; 3], tol: f64) -> bool {
    x.iter().zip(y).all(|(a, b)| (a - b).norm() <= tol * (1.0 + b.norm()))
}

/// Three free points after sending the reference points to `0, 1, ∞`.
///
/// For a triple marking the marked points sit at `0, 1, ∞` and `b` holds the
/// unmarked points. For a pair partition the pairs are `(0, b₁)`, `(1, b₂)`
/// and `(∞, b₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNormalized")]
pub struct NormalizedConfiguration {
    #[serde(with = "serde_complex::array")]
    b: [Complex64; 3],
    kind: MarkingKind,
}

#[derive(Deserialize)]
struct RawNormalized {
    #[serde(with = "serde_complex::array")]
    b: [Complex64; 3],
    kind: MarkingKind,
}

impl TryFrom<RawNormalized> for NormalizedConfiguration {
    type Error = Error;

    fn try_from(raw: RawNormalized) -> Result<Self> {
        NormalizedConfiguration::new(raw.kind, raw.b)
    }
}

impl NormalizedConfiguration {
    pub fn new(kind: MarkingKind, b: [Complex64; 3]) -> Result<Self> {
        let refs = [ProjPoint::ZERO, ProjPoint::ONE, ProjPoint::Infinity];
        for (i, &bi) in b.iter().enumerate() {
            let p = ProjPoint::finite(bi)?;
            if refs.iter().any(|r| r.coincides_with(&p)) {
                return Err(Error::DegenerateConfiguration(format!(
                    "b{} = {bi} coincides with 0, 1 or ∞",
                    i + 1
                )));
            }
            for (j, &bj) in b.iter().enumerate().skip(i + 1) {
                if p.coincides_with(&ProjPoint::Finite(bj)) {
                    return Err(Error::DegenerateConfiguration(format!(
                        "b{} and b{} coincide",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        // adding +0 turns −0 into +0, so equal forms serialize identically
        let b = b.map(|z| Complex64::new(z.re + 0.0, z.im + 0.0));
        Ok(NormalizedConfiguration { b, kind })
    }

    pub fn b(&self) -> [Complex64; 3] {
        self.b
    }

    pub fn kind(&self) -> MarkingKind {
        self.kind
    }

    /// The six points `0, 1, ∞, b₁, b₂, b₃` with the marking this form encodes.
    pub fn to_marked(&self) -> MarkedConfiguration {
        let points = [
            ProjPoint::ZERO,
            ProjPoint::ONE,
            ProjPoint::Infinity,
            ProjPoint::Finite(self.b[0]),
            ProjPoint::Finite(self.b[1]),
            ProjPoint::Finite(self.b[2]),
        ];
        let marking = match self.kind {
            MarkingKind::Triple => Marking::Triple([0, 1, 2]),
            MarkingKind::PairPartition => Marking::Pairs([[0, 3], [1, 4], [2, 5]]),
        };
        MarkedConfiguration { points, marking }
    }

    /// The canonical representative of this configuration's equivalence class.
    pub fn canonical(&self) -> Result<Self> {
        normalize(&self.to_marked())
    }
}

/// Canonical normal form: the lexicographically least candidate over all frames.
pub fn normalize(cfg: &MarkedConfiguration) -> Result<NormalizedConfiguration> {
    let candidates = cfg.frame_candidates()?;
    let best = candidates
        .into_iter()
        .min_by(|x, y| cmp_triple(x, y, EQUIVALENCE_TOLERANCE))
        .expect("at least one frame");
    NormalizedConfiguration::new(cfg.kind(), best)
}

/// Whether a marking-respecting projective transformation maps `a` to `b`.
pub fn equivalent(a: &MarkedConfiguration, b: &MarkedConfiguration) -> Result<bool> {
    equivalent_within(a, b, EQUIVALENCE_TOLERANCE)
}

pub fn equivalent_within(a: &MarkedConfiguration, b: &MarkedConfiguration, tol: f64) -> Result<bool> {
    if a.kind() != b.kind() {
        return Err(Error::MarkingKindMismatch);
    }
    let target = normalize(b)?.b;
    Ok(a.frame_candidates()?
        .iter()
        .any(|c| close_triple(c, &target, tol)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(re: f64, im: f64) -> ProjPoint {
        ProjPoint::Finite(c(re, im))
    }

    fn approx(p: ProjPoint, z: Complex64, tol: f64) -> bool {
        p.as_finite().is_some_and(|w| (w - z).norm() < tol)
    }

    #[test]
    fn reference_point_goes_to_zero() {
        let (a, b, cc) = (pt(1.0, 2.0), pt(-3.0, 0.5), pt(0.25, -1.0));
        assert!(approx(cross_ratio(a, a, b, cc).unwrap(), c(0.0, 0.0), 1e-15));
        assert!(approx(cross_ratio(b, a, b, cc).unwrap(), c(1.0, 0.0), 1e-15));
        assert_eq!(cross_ratio(cc, a, b, cc).unwrap(), ProjPoint::Infinity);
    }

    #[test]
    fn standard_frame_is_identity() {
        let p = pt(5.0, 2.0);
        let r = cross_ratio(p, ProjPoint::ZERO, ProjPoint::ONE, ProjPoint::Infinity).unwrap();
        assert_eq!(r, p);
    }

    #[test]
    fn swapped_frame_with_infinity() {
        // oracle: 1 - z sends (1, 0, ∞) to (0, 1, ∞)
        let oracle = Mobius::new(c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let expected = oracle.apply(ProjPoint::real(2.0));
        let r = cross_ratio(ProjPoint::real(2.0), ProjPoint::ONE, ProjPoint::ZERO, ProjPoint::Infinity)
            .unwrap();
        assert!(approx(r, c(-1.0, 0.0), 1e-15));
        assert_eq!(r, expected);
    }

    #[test]
    fn infinity_in_each_frame_slot() {
        let z = pt(0.3, 0.7);
        let inf = ProjPoint::Infinity;
        // a = ∞: (b - c)/(z - c)
        let r = cross_ratio(z, inf, pt(2.0, 0.0), pt(-1.0, 0.0)).unwrap();
        assert!(approx(r, c(3.0, 0.0) / (c(0.3, 0.7) + 1.0), 1e-14));
        // b = ∞: (z - a)/(z - c)
        let r = cross_ratio(z, pt(2.0, 0.0), inf, pt(-1.0, 0.0)).unwrap();
        assert!(approx(r, (c(0.3, 0.7) - 2.0) / (c(0.3, 0.7) + 1.0), 1e-14));
        assert_eq!(cross_ratio(inf, pt(2.0, 0.0), pt(-1.0, 0.0), inf).unwrap(), inf);
        assert!(approx(cross_ratio(inf, pt(2.0, 0.0), inf, pt(-1.0, 0.0)).unwrap(), c(1.0, 0.0), 1e-15));
    }

    #[test]
    fn degenerate_frame() {
        let a = pt(1.0, 1.0);
        assert_eq!(cross_ratio(pt(0.0, 0.0), a, a, ProjPoint::Infinity), Err(Error::DegenerateFrame));
        assert_eq!(
            cross_ratio(pt(0.0, 0.0), ProjPoint::Infinity, a, ProjPoint::Infinity),
            Err(Error::DegenerateFrame)
        );
    }

    #[test]
    fn rejects_coincident_points_and_bad_markings() {
        let mut points = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0].map(ProjPoint::real);
        assert!(MarkedConfiguration::new(points, Marking::Triple([0, 1, 1])).is_err());
        assert!(MarkedConfiguration::new(points, Marking::Triple([0, 1, 6])).is_err());
        assert!(MarkedConfiguration::new(points, Marking::Pairs([[0, 1], [1, 2], [3, 4]])).is_err());
        points[5] = pt(4.0 + 1e-12, 0.0);
        assert!(matches!(
            MarkedConfiguration::new(points, Marking::Triple([0, 1, 2])),
            Err(Error::DegenerateConfiguration(_))
        ));
    }

    #[test]
    fn normalize_identity_frames() {
        let points = [
            ProjPoint::ZERO,
            ProjPoint::ONE,
            ProjPoint::Infinity,
            ProjPoint::real(2.0),
            ProjPoint::real(3.0),
            ProjPoint::real(4.0),
        ];
        let triple = MarkedConfiguration::new(points, Marking::Triple([0, 1, 2])).unwrap();
        let cand = triple.frame_candidates().unwrap();
        assert_eq!(cand.len(), 6);
        assert!(cand.contains(&[c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]));

        let pairs = MarkedConfiguration::new(points, Marking::Pairs([[0, 3], [1, 4], [2, 5]])).unwrap();
        let cand = pairs.frame_candidates().unwrap();
        assert_eq!(cand.len(), 48);
        assert_eq!(cand[0], [c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
    }

    #[test]
    fn normalize_is_idempotent() {
        let points = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0].map(ProjPoint::real);
        for marking in [Marking::Triple([0, 1, 2]), Marking::Pairs([[0, 3], [1, 5], [2, 4]])] {
            let cfg = MarkedConfiguration::new(points, marking).unwrap();
            let n = normalize(&cfg).unwrap();
            let again = n.canonical().unwrap();
            for (x, y) in n.b().iter().zip(again.b()) {
                assert!((x - y).norm() < 1e-12);
            }
            assert!(equivalent(&cfg, &n.to_marked()).unwrap());
        }
    }

    #[test]
    fn triple_normal_form_of_real_points() {
        // frame (1, 2, 3) -> (0, 1, ∞) is z ↦ (z - 1)/(3 - z): 4, 5, 6 land on -3, -2, -5/3
        let points = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0].map(ProjPoint::real);
        let cfg = MarkedConfiguration::new(points, Marking::Triple([0, 1, 2])).unwrap();
        let candidates = cfg.frame_candidates().unwrap();
        let expected = [c(-3.0, 0.0), c(-2.0, 0.0), c(-5.0 / 3.0, 0.0)];
        assert!(close_triple(&candidates[0], &expected, 1e-14));
        let n = normalize(&cfg).unwrap();
        for cand in &candidates {
            assert_ne!(cmp_triple(cand, &n.b(), 1e-9), Ordering::Less);
        }
        assert!(candidates.iter().any(|cand| close_triple(cand, &n.b(), 1e-14)));
    }

    #[test]
    fn equivalence_under_affine_map() {
        let points = [pt(0.1, 0.2), pt(1.5, -0.3), pt(-0.7, 0.9), pt(2.2, 1.1), pt(0.4, -1.6), pt(-1.3, -0.2)];
        let g = Mobius::new(c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        for marking in [Marking::Triple([1, 3, 5]), Marking::Pairs([[0, 4], [1, 2], [3, 5]])] {
            let cfg = MarkedConfiguration::new(points, marking).unwrap();
            assert!(equivalent(&cfg, &cfg).unwrap());
            let moved = cfg.transport(&g).unwrap();
            assert!(equivalent(&cfg, &moved).unwrap());
        }
    }

    #[test]
    fn inequivalent_triples() {
        let mk = |last: f64| {
            NormalizedConfiguration::new(MarkingKind::Triple, [c(2.0, 0.0), c(3.0, 0.0), c(last, 0.0)])
                .unwrap()
                .to_marked()
        };
        assert!(!equivalent(&mk(4.0), &mk(5.0)).unwrap());
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        let b = [c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)];
        let t = NormalizedConfiguration::new(MarkingKind::Triple, b).unwrap().to_marked();
        let p = NormalizedConfiguration::new(MarkingKind::PairPartition, b).unwrap().to_marked();
        assert_eq!(equivalent(&t, &p), Err(Error::MarkingKindMismatch));
    }

    #[test]
    fn normalized_rejects_reference_collisions() {
        assert!(NormalizedConfiguration::new(MarkingKind::Triple, [c(0.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]).is_err());
        assert!(NormalizedConfiguration::new(MarkingKind::Triple, [c(2.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]).is_err());
        assert!(NormalizedConfiguration::new(MarkingKind::Triple, [c(1e12, 0.0), c(2.0, 0.0), c(3.0, 0.0)]).is_err());
    }

    #[test]
    fn json_format() {
        let json = r#"{"points":[[0,0],[1,0],"inf",[2,0],[3,0],[4,0.5]],"marking":{"pairs":[[0,3],[1,4],[2,5]]}}"#;
        let cfg: MarkedConfiguration = serde_json::from_str(json).unwrap();
        assert_eq!(cfg.points()[2], ProjPoint::Infinity);
        assert_eq!(cfg.kind(), MarkingKind::PairPartition);
        let back = serde_json::to_string(&cfg).unwrap();
        assert_eq!(back, r#"{"points":[[0.0,0.0],[1.0,0.0],"inf",[2.0,0.0],[3.0,0.0],[4.0,0.5]],"marking":{"pairs":[[0,3],[1,4],[2,5]]}}"#);

        let bad = r#"{"points":[[0,0],[0,0],"inf",[2,0],[3,0],[4,0]],"marking":{"triple":[0,1,2]}}"#;
        assert!(serde_json::from_str::<MarkedConfiguration>(bad).is_err());
        let bad = r#"{"points":[[0,0],[1,0],"infinity",[2,0],[3,0],[4,0]],"marking":{"triple":[0,1,2]}}"#;
        assert!(serde_json::from_str::<MarkedConfiguration>(bad).is_err());
    }
}
