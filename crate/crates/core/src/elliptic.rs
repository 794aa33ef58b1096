//! Half-period ratios of elliptic curves from four branch points, and back.
//!
//! The curve branched at `0, 1, ∞, m` has period ratio
//! `τ = i·K(√(1−m)) / K(√m)` where `K` is the complete elliptic integral of
//! the first kind, evaluated through the arithmetic-geometric mean. The
//! inverse is the modular lambda function `λ(τ) = θ₂⁴(τ) / θ₃⁴(τ)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::projective::{cross_ratio, ProjPoint};
use crate::serde_complex;

pub const MAX_AGM_ITERATIONS: usize = 64;

/// Theta series are truncated once a term drops below this magnitude.
const SERIES_CUTOFF: f64 = 1e-18;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A point of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct HalfPeriodRatio(Complex64);

impl HalfPeriodRatio {
    pub fn new(tau: Complex64) -> Result<Self> {
        if tau.im > 0.0 && tau.re.is_finite() && tau.im.is_finite() {
            Ok(HalfPeriodRatio(tau))
        } else {
            Err(Error::NotInUpperHalfPlane(tau.to_string()))
        }
    }

    pub fn tau(&self) -> Complex64 {
        self.0
    }
}

impl TryFrom<[f64; 2]> for HalfPeriodRatio {
    type Error = Error;

    fn try_from(p: [f64; 2]) -> Result<Self> {
        HalfPeriodRatio::new(serde_complex::from_pair(p))
    }
}

impl From<HalfPeriodRatio> for [f64; 2] {
    fn from(h: HalfPeriodRatio) -> Self {
        serde_complex::to_pair(h.0)
    }
}

/// Which of four branch points plays the role of `0`, `1`, `∞` and the
/// moving point `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelTwoLabel {
    zero: usize,
    one: usize,
    infinity: usize,
    moving: usize,
}

impl LevelTwoLabel {
    pub fn new(zero: usize, one: usize, infinity: usize, moving: usize) -> Result<Self> {
        let mut seen = [false; 4];
        for i in [zero, one, infinity, moving] {
            if i >= 4 || seen[i] {
                return Err(Error::InvalidMarking(format!(
                    "level-2 label ({zero}, {one}, {infinity}, {moving}) is not a bijection"
                )));
            }
            seen[i] = true;
        }
        Ok(LevelTwoLabel { zero, one, infinity, moving })
    }

    /// Branch points given in the order `0, 1, ∞, b`.
    pub fn identity() -> Self {
        LevelTwoLabel { zero: 0, one: 1, infinity: 2, moving: 3 }
    }

    pub fn zero(&self) -> usize {
        self.zero
    }
    pub fn one(&self) -> usize {
        self.one
    }
    pub fn infinity(&self) -> usize {
        self.infinity
    }
    pub fn moving(&self) -> usize {
        self.moving
    }
}

/// Arithmetic-geometric mean with the right choice of square root at each step.
pub fn agm(a0: Complex64, b0: Complex64) -> Result<Complex64> {
    let (mut a, mut b) = (a0, b0);
    for _ in 0..MAX_AGM_ITERATIONS {
        if (a - b).norm() <= 4.0 * f64::EPSILON * a.norm() {
            return Ok(0.5 * (a + b));
        }
        let next_a = 0.5 * (a + b);
        let mut next_b = (a * b).sqrt();
        if (next_a - next_b).norm() > (next_a + next_b).norm() {
            next_b = -next_b;
        }
        a = next_a;
        b = next_b;
    }
    Err(Error::AgmNonConvergence(MAX_AGM_ITERATIONS))
}

/// `K` as a function of the parameter `m = k²`.
pub fn complete_k_parameter(m: Complex64) -> Result<Complex64> {
    Ok(Complex64::new(PI / 2.0, 0.0) / agm(ONE, (ONE - m).sqrt())?)
}

/// `K(k) = π / (2·AGM(1, √(1−k²)))`.
pub fn complete_k(k: Complex64) -> Result<Complex64> {
    complete_k_parameter(k * k)
}

/// Complete elliptic integral of the second kind as a function of `m = k²`,
/// from the same AGM sequence: `E = K·(1 − Σ 2ⁿ⁻¹ cₙ²)` with `c₀² = m`.
pub fn complete_e_parameter(m: Complex64) -> Result<Complex64> {
    let (mut a, mut b) = (ONE, (ONE - m).sqrt());
    let mut sum = 0.5 * m;
    let mut weight = 0.5;
    for _ in 0..MAX_AGM_ITERATIONS {
        if (a - b).norm() <= 4.0 * f64::EPSILON * a.norm() {
            let k = Complex64::new(PI / 2.0, 0.0) / (0.5 * (a + b));
            return Ok(k * (ONE - sum));
        }
        let c = 0.5 * (a - b);
        let next_a = 0.5 * (a + b);
        let mut next_b = (a * b).sqrt();
        if (next_a - next_b).norm() > (next_a + next_b).norm() {
            next_b = -next_b;
        }
        weight *= 2.0;
        sum += weight * c * c;
        a = next_a;
        b = next_b;
    }
    Err(Error::AgmNonConvergence(MAX_AGM_ITERATIONS))
}

/// The fourth powers `(θ₂⁴, θ₃⁴, θ₄⁴)` of the theta constants at `q = e^{iπτ}`.
fn theta_fourth_powers(tau: Complex64) -> [Complex64; 3] {
    let iptau = I * PI * tau;
    let q_pow = |k: u64| (iptau * k as f64).exp();
    let mut s2 = ONE;
    let mut s3 = Complex64::new(0.0, 0.0);
    let mut s4 = Complex64::new(0.0, 0.0);
    for n in 1u64..10_000 {
        let t2 = q_pow(n * (n + 1));
        let t = q_pow(n * n);
        s2 += t2;
        s3 += t;
        s4 += if n % 2 == 1 { -t } else { t };
        if t.norm() < SERIES_CUTOFF {
            break;
        }
    }
    let theta3 = ONE + 2.0 * s3;
    let theta4 = ONE + 2.0 * s4;
    [16.0 * iptau.exp() * s2.powi(4), theta3.powi(4), theta4.powi(4)]
}

/// Integer matrices `[[a, b], [c, d]]` acting on λ by `(aλ + b)/(cλ + d)`.
type Anharmonic = [[i32; 2]; 2];

const ANHARMONIC_IDENTITY: Anharmonic = [[1, 0], [0, 1]];
/// `λ(τ + 1) = λ/(λ − 1)`.
const ANHARMONIC_SHIFT: Anharmonic = [[1, 0], [1, -1]];
/// `λ(−1/τ) = 1 − λ`.
const ANHARMONIC_INVERT: Anharmonic = [[-1, 1], [0, 1]];

fn mul(x: &Anharmonic, y: &Anharmonic) -> Anharmonic {
    [
        [
            x[0][0] * y[0][0] + x[0][1] * y[1][0],
            x[0][0] * y[0][1] + x[0][1] * y[1][1],
        ],
        [
            x[1][0] * y[0][0] + x[1][1] * y[1][0],
            x[1][0] * y[0][1] + x[1][1] * y[1][1],
        ],
    ]
}

/// `x·θ₂⁴ + y·θ₃⁴`, using `θ₃⁴ − θ₂⁴ = θ₄⁴` to avoid cancellation.
fn combine(x: i32, y: i32, th: &[Complex64; 3]) -> Complex64 {
    if x == -y && x != 0 {
        -(x as f64) * th[2]
    } else {
        (x as f64) * th[0] + (y as f64) * th[1]
    }
}

/// The modular lambda function `θ₂⁴/θ₃⁴`.
///
/// `τ` is first moved into the standard SL₂(ℤ) fundamental domain so the
/// series converge fast; the reduction acts on λ through the anharmonic
/// group, which is applied exactly at the end.
pub fn modular_lambda(tau: Complex64) -> Result<Complex64> {
    let tau = HalfPeriodRatio::new(tau)?.tau();
    let mut t = tau;
    let mut action = ANHARMONIC_IDENTITY;
    for _ in 0..10_000 {
        let n = t.re.round();
        if n != 0.0 {
            t -= n;
            if n.rem_euclid(2.0) == 1.0 {
                action = mul(&action, &ANHARMONIC_SHIFT);
            }
        }
        if t.norm_sqr() < 1.0 - 1e-15 {
            t = -ONE / t;
            action = mul(&action, &ANHARMONIC_INVERT);
        } else {
            break;
        }
    }
    let th = theta_fourth_powers(t);
    let [[a, b], [c, d]] = action;
    Ok(combine(a, b, &th) / combine(c, d, &th))
}

/// Moves `τ` into the fundamental domain of Γ(2):
/// `−1 ≤ Re τ < 1`, `|τ − ½| ≥ ½`, `|τ + ½| ≥ ½`.
pub fn reduce_gamma2(tau: Complex64) -> Result<Complex64> {
    let mut t = HalfPeriodRatio::new(tau)?.tau();
    for _ in 0..10_000 {
        let shift = 2.0 * ((t.re + 1.0) / 2.0).floor();
        t -= shift;
        if (t - 0.5).norm() < 0.5 {
            t = t / (ONE - 2.0 * t);
        } else if (t + 0.5).norm() < 0.5 {
            t = t / (ONE + 2.0 * t);
        } else {
            return Ok(t);
        }
    }
    Err(Error::InvariantViolated(format!("Γ(2) reduction of {tau} did not terminate")))
}

/// The six coset representatives of Γ(2) in SL₂(ℤ), acting on τ.
fn coset_images(tau: Complex64) -> [Complex64; 6] {
    let s = |t: Complex64| -ONE / t;
    [tau, tau + 1.0, s(tau), s(tau) + 1.0, s(tau + 1.0), s(s(tau) + 1.0)]
}

/// Period ratio of the Legendre curve `y² = x(x−1)(x−m)`, reduced into the
/// Γ(2) fundamental domain.
pub fn tau_from_lambda(m: Complex64) -> Result<HalfPeriodRatio> {
    if !(m.re.is_finite() && m.im.is_finite()) {
        return Err(Error::CoincidentBranchPoints);
    }
    let pm = ProjPoint::Finite(m);
    if pm.coincides_with(&ProjPoint::ZERO) || pm.coincides_with(&ProjPoint::ONE) {
        return Err(Error::CoincidentBranchPoints);
    }
    // τ = i·K(√(1−m))/K(√m) = i·AGM(1, √(1−m))/AGM(1, √m)
    let mut tau = I * agm(ONE, (ONE - m).sqrt())? / agm(ONE, m.sqrt())?;
    if tau.im == 0.0 || !tau.im.is_finite() {
        return Err(Error::InvariantViolated(format!("degenerate period ratio for m = {m}")));
    }
    if tau.im < 0.0 {
        tau = -tau;
    }
    let tau = reduce_gamma2(tau)?;
    let scale = 1.0 + m.norm();
    let err = |t: Complex64| modular_lambda(t).map(|l| (l - m).norm() / scale);
    if err(tau)? <= 1e-9 {
        return HalfPeriodRatio::new(tau);
    }
    // On the cuts (−∞, 0] and [1, ∞) the principal AGM values give a period
    // ratio of the same curve with a different level-2 structure.
    let mut best = (f64::INFINITY, tau);
    for cand in coset_images(tau) {
        let e = err(cand)?;
        if e < best.0 {
            best = (e, cand);
        }
    }
    if best.0 > 1e-7 {
        return Err(Error::InvariantViolated(format!(
            "no period ratio reproduces m = {m} (residual {:e})",
            best.0
        )));
    }
    HalfPeriodRatio::new(reduce_gamma2(best.1)?)
}

/// Period ratio of the elliptic curve branched at four points of P¹.
pub fn tau_from_branch_points(
    branch: [ProjPoint; 4],
    label: LevelTwoLabel,
) -> Result<HalfPeriodRatio> {
    for i in 0..4 {
        for j in (i + 1)..4 {
            if branch[i].coincides_with(&branch[j]) {
                return Err(Error::CoincidentBranchPoints);
            }
        }
    }
    let m = cross_ratio(
        branch[label.moving],
        branch[label.zero],
        branch[label.one],
        branch[label.infinity],
    )
    .map_err(|_| Error::CoincidentBranchPoints)?;
    match m {
        ProjPoint::Finite(m) => tau_from_lambda(m),
        ProjPoint::Infinity => Err(Error::CoincidentBranchPoints),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::Mobius;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// λ = 16q ∏ ((1 + q²ⁿ)/(1 + q²ⁿ⁻¹))⁸, evaluated without any reduction.
    fn lambda_product(tau: Complex64) -> Complex64 {
        let q = (I * PI * tau).exp();
        let mut prod = ONE;
        for n in 1..2000 {
            let f = (ONE + q.powi(2 * n)) / (ONE + q.powi(2 * n - 1));
            prod *= f.powi(8);
            if q.powi(2 * n - 1).norm() < 1e-20 {
                break;
            }
        }
        16.0 * q * prod
    }

    /// Plain `θ₂⁴/θ₃⁴` at the given τ.
    fn lambda_series(tau: Complex64) -> Complex64 {
        let th = theta_fourth_powers(tau);
        th[0] / th[1]
    }

    /// Trapezoid rule on the periodic integrand; converges geometrically.
    fn k_quadrature(m: f64) -> f64 {
        let n = 400;
        let h = PI / (2.0 * n as f64);
        let mut s = 0.0;
        for j in 0..=n {
            let t = j as f64 * h;
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            s += w / (1.0 - m * t.sin().powi(2)).sqrt();
        }
        s * h
    }

    #[test]
    fn k_at_zero_is_half_pi() {
        assert_eq!(complete_k(c(0.0, 0.0)).unwrap(), c(PI / 2.0, 0.0));
    }

    #[test]
    fn k_matches_quadrature() {
        for m in [0.1, 0.3, 0.5, 0.77, 0.9] {
            let k = complete_k_parameter(c(m, 0.0)).unwrap();
            assert!((k.re - k_quadrature(m)).abs() < 1e-13, "m = {m}");
            assert!(k.im.abs() < 1e-15);
        }
    }

    #[test]
    fn legendre_relation() {
        for m in [c(0.2, 0.0), c(0.5, 0.0), c(0.3, 0.2), c(0.6, -0.4)] {
            let k = complete_k_parameter(m).unwrap();
            let kp = complete_k_parameter(ONE - m).unwrap();
            let e = complete_e_parameter(m).unwrap();
            let ep = complete_e_parameter(ONE - m).unwrap();
            let lhs = e * kp + ep * k - k * kp;
            assert!((lhs - PI / 2.0).norm() < 1e-12, "m = {m}: {lhs}");
        }
    }

    #[test]
    fn agm_fails_on_zero_argument() {
        assert_eq!(agm(ONE, c(0.0, 0.0)), Err(Error::AgmNonConvergence(64)));
    }

    #[test]
    fn lambda_at_i_is_one_half() {
        assert!((modular_lambda(I).unwrap() - 0.5).norm() < 1e-12);
        assert!((lambda_product(I) - 0.5).norm() < 1e-12);
    }

    #[test]
    fn lambda_rejects_lower_half_plane() {
        assert!(modular_lambda(c(0.3, 0.0)).is_err());
        assert!(modular_lambda(c(0.3, -1.0)).is_err());
    }

    #[test]
    fn lambda_has_period_two() {
        let t = c(0.3, 1.1);
        let a = modular_lambda(t).unwrap();
        let b = modular_lambda(t + 2.0).unwrap();
        assert!((a - b).norm() < 1e-13);
        assert!((lambda_series(t) - lambda_series(t + 2.0)).norm() < 1e-13);
    }

    #[test]
    fn lambda_inversion_identity_on_raw_series() {
        // checked with the unreduced series at both points
        let t = c(0.0, 1.7);
        let lhs = lambda_series(-ONE / t);
        let rhs = ONE - lambda_series(t);
        assert!((lhs - rhs).norm() < 1e-12);
        let t = c(0.2, 1.3);
        assert!((lambda_product(-ONE / t) - (ONE - lambda_product(t))).norm() < 1e-12);
    }

    #[test]
    fn reduced_evaluation_matches_product_formula() {
        for t in [c(0.1, 0.4), c(-0.7, 0.3), c(0.45, 0.6), c(1.3, 0.9), c(-0.2, 2.5), c(0.9, 0.25)] {
            let a = modular_lambda(t).unwrap();
            let b = lambda_product(t);
            assert!((a - b).norm() < 1e-9 * (1.0 + b.norm()), "τ = {t}: {a} vs {b}");
        }
    }

    #[test]
    fn lambda_near_cusp_keeps_relative_precision() {
        // λ(τ) for τ → i∞ is ~16q; at τ = 1 + 0.1i it is (λ−1)/λ evaluated at 10i
        let small = lambda_product(c(0.0, 10.0));
        let expected = (small - 1.0) / small;
        let got = modular_lambda(c(1.0, 0.1)).unwrap();
        assert!((got - expected).norm() < 1e-10 * expected.norm());
    }

    #[test]
    fn tau_for_harmonic_point() {
        let tau = tau_from_branch_points(
            [ProjPoint::ZERO, ProjPoint::ONE, ProjPoint::Infinity, ProjPoint::real(0.5)],
            LevelTwoLabel::identity(),
        )
        .unwrap();
        assert!((tau.tau() - I).norm() < 1e-12);
    }

    #[test]
    fn round_trip_for_complex_parameter() {
        let m = c(0.3, 0.1);
        let tau = tau_from_lambda(m).unwrap();
        assert!((modular_lambda(tau.tau()).unwrap() - m).norm() < 1e-10);
    }

    #[test]
    fn round_trip_on_the_cuts() {
        for m in [c(2.0, 0.0), c(-0.5, 0.0), c(-7.0, 0.0), c(1.5, 0.0), c(3.0, 0.0), c(-0.5, 1e-14)] {
            let tau = tau_from_lambda(m).unwrap();
            let back = modular_lambda(tau.tau()).unwrap();
            assert!((back - m).norm() < 1e-10 * (1.0 + m.norm()), "m = {m}: {back}");
        }
    }

    #[test]
    fn tau_is_invariant_under_moving_all_branch_points() {
        let m = c(0.3, 0.4);
        let branch = [ProjPoint::ZERO, ProjPoint::ONE, ProjPoint::Infinity, ProjPoint::Finite(m)];
        let g = Mobius::new(c(1.0, 2.0), c(0.5, 0.0), c(0.3, -1.0), c(2.0, 0.1)).unwrap();
        let moved = branch.map(|p| g.apply(p));
        let a = tau_from_branch_points(branch, LevelTwoLabel::identity()).unwrap();
        let b = tau_from_branch_points(moved, LevelTwoLabel::identity()).unwrap();
        assert!((a.tau() - b.tau()).norm() < 1e-12);
    }

    #[test]
    fn swapping_zero_and_infinity_inverts_m() {
        let m = c(0.35, -0.2);
        let branch = [ProjPoint::ZERO, ProjPoint::ONE, ProjPoint::Infinity, ProjPoint::Finite(m)];
        let swapped = LevelTwoLabel::new(2, 1, 0, 3).unwrap();
        let tau = tau_from_branch_points(branch, swapped).unwrap();
        let back = modular_lambda(tau.tau()).unwrap();
        assert!((back - ONE / m).norm() < 1e-10);
    }

    #[test]
    fn degenerate_branch_points() {
        let branch = [ProjPoint::ZERO, ProjPoint::ONE, ProjPoint::Infinity, ProjPoint::ONE];
        assert_eq!(
            tau_from_branch_points(branch, LevelTwoLabel::identity()),
            Err(Error::CoincidentBranchPoints)
        );
        assert_eq!(tau_from_lambda(c(0.0, 0.0)), Err(Error::CoincidentBranchPoints));
        assert!(LevelTwoLabel::new(0, 0, 1, 2).is_err());
    }

    #[test]
    fn gamma2_reduction_preserves_lambda() {
        for t in [c(3.3, 0.2), c(-5.1, 0.05), c(0.49, 0.01), c(0.0, 3.0)] {
            let r = reduce_gamma2(t).unwrap();
            assert!(r.re >= -1.0 && r.re < 1.0);
            assert!((r - 0.5).norm() >= 0.5 - 1e-12 && (r + 0.5).norm() >= 0.5 - 1e-12);
            let (a, b) = (modular_lambda(t).unwrap(), modular_lambda(r).unwrap());
            assert!((a - b).norm() < 1e-8 * (1.0 + a.norm()), "τ = {t}");
        }
    }
}
