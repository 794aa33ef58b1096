//! The 2-torsion of a genus-2 Jacobian as a symplectic F₂-space.
//!
//! A 2-torsion class is an even subset of the six Weierstrass points
//! `{1..6}` taken modulo complement. Addition is symmetric difference and
//! the Weil pairing is the parity of the number of shared points.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FULL: u8 = 0b11_1111;

/// An element of JH[2], stored as the subset representative of size 0 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct TwoTorsionClass(u8);

impl TwoTorsionClass {
    pub const ZERO: TwoTorsionClass = TwoTorsionClass(0);

    fn canonical(mask: u8) -> Self {
        let mask = mask & FULL;
        if mask.count_ones() > 2 {
            TwoTorsionClass(!mask & FULL)
        } else {
            TwoTorsionClass(mask)
        }
    }

    /// The class of the divisor `Σ_{i∈A} wᵢ` for an even set `A ⊆ {1..6}`.
    pub fn from_indices(indices: &[u8]) -> Result<Self> {
        let mut mask = 0u8;
        for &i in indices {
            if !(1..=6).contains(&i) {
                return Err(Error::InvalidTorsion(format!("index {i} outside 1..6")));
            }
            let bit = 1 << (i - 1);
            if mask & bit != 0 {
                return Err(Error::InvalidTorsion(format!("repeated index {i}")));
            }
            mask |= bit;
        }
        if mask.count_ones() % 2 == 1 {
            return Err(Error::InvalidTorsion(format!(
                "{indices:?} has odd cardinality"
            )));
        }
        Ok(Self::canonical(mask))
    }

    /// The class `wᵢ − wⱼ`.
    pub fn pair(i: u8, j: u8) -> Result<Self> {
        Self::from_indices(&[i, j])
    }

    /// All sixteen classes, zero first.
    pub fn all() -> Vec<TwoTorsionClass> {
        let mut v: Vec<_> = (0..=FULL)
            .filter(|m| m.count_ones() % 2 == 0)
            .map(Self::canonical)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        v.sort();
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0 == 0
    }

    /// Sorted indices of the canonical representative.
    pub fn indices(&self) -> Vec<u8> {
        (1..=6).filter(|i| self.0 >> (i - 1) & 1 == 1).collect()
    }


    /// `|A ∩ B| mod 2`.
    pub fn weil_pairing(self, other: TwoTorsionClass) -> u8 {
        ((self.0 & other.0).count_ones() % 2) as u8
    }
}

impl std::ops::Add for TwoTorsionClass {
    type Output = TwoTorsionClass;

    /// Symmetric difference of subsets.
    #[allow(clippy::suspicious_arithmetic_impl)] // addition in F₂⁶ is xor
    fn add(self, rhs: Self) -> Self {
        Self::canonical(self.0 ^ rhs.0)
    }
}

impl Ord for TwoTorsionClass {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .count_ones()
            .cmp(&other.0.count_ones())
            .then_with(|| self.indices().cmp(&other.indices()))
    }
}

impl PartialOrd for TwoTorsionClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Vec<u8>> for TwoTorsionClass {
    type Error = Error;

    fn try_from(v: Vec<u8>) -> Result<Self> {
        Self::from_indices(&v)
    }
}

impl From<TwoTorsionClass> for Vec<u8> {
    fn from(c: TwoTorsionClass) -> Self {
        c.indices()
    }
}

impl fmt::Display for TwoTorsionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx = self.indices();
        if idx.is_empty() {
            write!(f, "0")
        } else {
            let parts: Vec<String> = idx.iter().map(|i| format!("w{i}")).collect();
            write!(f, "{}", parts.join("-"))
        }
    }
}

/// A subgroup `{0, a, b, a+b}` of JH[2] isomorphic to the Klein four-group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KleinSubgroup {
    elements: [TwoTorsionClass; 4],
    isotropic: bool,
}

impl KleinSubgroup {
    pub fn generated_by(a: TwoTorsionClass, b: TwoTorsionClass) -> Result<Self> {
        if a.is_zero() || b.is_zero() || a == b {
            return Err(Error::InvalidTorsion(format!(
                "{a} and {b} do not generate a Klein subgroup"
            )));
        }
        let mut elements = [TwoTorsionClass::ZERO, a, b, a + b];
        elements.sort();
        Ok(KleinSubgroup {
            elements,
            isotropic: a.weil_pairing(b) == 0,
        })
    }

    /// Zero first, then the nonzero classes in canonical order.
    pub fn elements(&self) -> &[TwoTorsionClass; 4] {
        &self.elements
    }

    pub fn nonzero(&self) -> [TwoTorsionClass; 3] {
        [self.elements[1], self.elements[2], self.elements[3]]
    }

    pub fn is_isotropic(&self) -> bool {
        self.isotropic
    }

    pub fn contains(&self, c: TwoTorsionClass) -> bool {
        self.elements.contains(&c)
    }
}

/// The data a Klein subgroup corresponds to on the six branch points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubgroupLabel {
    Triple([u8; 3]),
    Pairs([[u8; 2]; 3]),
}

/// All 35 two-dimensional subspaces of JH[2].
pub fn enumerate_klein_subgroups() -> Vec<KleinSubgroup> {
    let nonzero: Vec<_> = TwoTorsionClass::all().into_iter().skip(1).collect();
    let mut set = BTreeSet::new();
    for (i, &a) in nonzero.iter().enumerate() {
        for &b in &nonzero[i + 1..] {
            set.insert(KleinSubgroup::generated_by(a, b).expect("distinct nonzero classes"));
        }
    }
    set.into_iter().collect()
}

/// The isotropic subgroup `{0, w₁−w₂, w₃−w₄, w₅−w₆}` of a pair partition.
pub fn subgroup_from_pairs(pairs: [[u8; 2]; 3]) -> Result<KleinSubgroup> {
    let flat: Vec<u8> = pairs.iter().flatten().copied().collect();
    let mut seen = 0u8;
    for &i in &flat {
        if !(1..=6).contains(&i) {
            return Err(Error::InvalidTorsion(format!("index {i} outside 1..6")));
        }
        if seen >> (i - 1) & 1 == 1 {
            return Err(Error::InvalidTorsion(format!(
                "pairs {pairs:?} are not disjoint"
            )));
        }
        seen |= 1 << (i - 1);
    }
    let g = KleinSubgroup::generated_by(
        TwoTorsionClass::pair(pairs[0][0], pairs[0][1])?,
        TwoTorsionClass::pair(pairs[1][0], pairs[1][1])?,
    )?;
    debug_assert!(g.contains(TwoTorsionClass::pair(pairs[2][0], pairs[2][1])?));
    if !g.is_isotropic() {
        return Err(Error::InvariantViolated("pair subgroup is not isotropic".into()));
    }
    Ok(g)
}

/// The non-isotropic subgroup `{0, wᵢ−wⱼ, wⱼ−wₖ, wᵢ−wₖ}` of a triple.
pub fn subgroup_from_triple(triple: [u8; 3]) -> Result<KleinSubgroup> {
    let [i, j, k] = triple;
    if i == j || j == k || i == k {
        return Err(Error::InvalidTorsion(format!("repeated index in {triple:?}")));
    }
    let g = KleinSubgroup::generated_by(TwoTorsionClass::pair(i, j)?, TwoTorsionClass::pair(j, k)?)?;
    if g.is_isotropic() {
        return Err(Error::InvariantViolated("triple subgroup is isotropic".into()));
    }
    Ok(g)
}

/// Inverse of [`subgroup_from_triple`] and [`subgroup_from_pairs`].
pub fn classify_subgroup(g: &KleinSubgroup) -> SubgroupLabel {
    let reps = g.nonzero().map(|c| c.indices());
    if g.is_isotropic() {
        let mut pairs = reps.map(|r| [r[0], r[1]]);
        pairs.sort();
        SubgroupLabel::Pairs(pairs)
    } else {
        let union: BTreeSet<u8> = reps.iter().flatten().copied().collect();
        let v: Vec<u8> = union.into_iter().collect();
        SubgroupLabel::Triple([v[0], v[1], v[2]])
    }
}

/// Every 3-subset of `{1..6}` in lexicographic order.
pub fn all_triples() -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    for i in 1..=6 {
        for j in (i + 1)..=6 {
            for k in (j + 1)..=6 {
                out.push([i, j, k]);
            }
        }
    }
    out
}

/// Every partition of `{1..6}` into three pairs, each pair and the list sorted.
pub fn all_pair_partitions() -> Vec<[[u8; 2]; 3]> {
    let mut out = Vec::new();
    for a in 2..=6u8 {
        let rest: Vec<u8> = (2..=6).filter(|&x| x != a).collect();
        for &b in &rest[1..] {
            let last: Vec<u8> = rest[1..].iter().copied().filter(|&x| x != b).collect();
            out.push([[1, a], [rest[0], b], [last[0], last[1]]]);
        }
    }
    out
}
