//! Exact half-integer arithmetic, weight tuples, interlacing patterns and the
//! Weyl dimension formula for the orthogonal groups appearing in the
//! restriction problem: K = Spin(m+1) ⊃ M = Spin(m) ⊃ M′ = Spin(m−1).
//!
//! All arithmetic in this module is exact: a [`HalfInt`] is stored as its
//! doubled value in an `i64`, so branching tables are bit-exact and can be
//! compared structurally.

use crate::{CoreError, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

// ---------------------------------------------------------------------------
// HalfInt
// ---------------------------------------------------------------------------

/// An element of ½ℤ, stored exactly as its doubled value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };

    /// The integer k as a half-integer.
    pub const fn new(k: i64) -> Self {
        HalfInt { twice: 2 * k }
    }

    /// Construct from the doubled value (`from_twice(3)` = 3/2).
    pub const fn from_twice(twice: i64) -> Self {
        HalfInt { twice }
    }

    pub const fn twice(self) -> i64 {
        self.twice
    }

    /// True iff the value lies in ℤ.
    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub const fn is_zero(self) -> bool {
        self.twice == 0
    }

    pub fn abs(self) -> Self {
        HalfInt { twice: self.twice.abs() }
    }

    pub fn signum(self) -> i64 {
        self.twice.signum()
    }

    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// True iff `self - other` is an integer (same coset of ℤ in ½ℤ).
    pub fn same_parity(self, other: HalfInt) -> bool {
        (self.twice - other.twice) % 2 == 0
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice + rhs.twice }
    }
}
impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice - rhs.twice }
    }
}
impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { twice: -self.twice }
    }
}
impl Mul<i64> for HalfInt {
    type Output = HalfInt;
    fn mul(self, rhs: i64) -> HalfInt {
        HalfInt { twice: self.twice * rhs }
    }
}
impl AddAssign for HalfInt {
    fn add_assign(&mut self, rhs: HalfInt) {
        self.twice += rhs.twice;
    }
}
impl SubAssign for HalfInt {
    fn sub_assign(&mut self, rhs: HalfInt) {
        self.twice -= rhs.twice;
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl fmt::Debug for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for HalfInt {
    type Err = CoreError;

    /// Accepts `"2"`, `"-3"`, `"3/2"`, `"-1/2"`, and decimal forms `"1.5"`.
    fn from_str(s: &str) -> Result<HalfInt> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let n: i64 = num
                .trim()
                .parse()
                .map_err(|_| CoreError::malformed(format!("bad half-integer {s:?}")))?;
            let d: i64 = den
                .trim()
                .parse()
                .map_err(|_| CoreError::malformed(format!("bad half-integer {s:?}")))?;
            match d {
                1 => Ok(HalfInt::new(n)),
                2 => Ok(HalfInt::from_twice(n)),
                _ => Err(CoreError::malformed(format!(
                    "half-integer denominator must be 1 or 2, got {s:?}"
                ))),
            }
        } else if let Some((int, frac)) = s.split_once('.') {
            let sign = if s.starts_with('-') { -1 } else { 1 };
            let i: i64 = if int.is_empty() || int == "-" {
                0
            } else {
                int.parse()
                    .map_err(|_| CoreError::malformed(format!("bad half-integer {s:?}")))?
            };
            match frac {
                "5" => Ok(HalfInt::from_twice(2 * i + sign)),
                "0" | "" => Ok(HalfInt::new(i)),
                _ => Err(CoreError::malformed(format!(
                    "not a half-integer: {s:?}"
                ))),
            }
        } else {
            let n: i64 = s
                .parse()
                .map_err(|_| CoreError::malformed(format!("bad half-integer {s:?}")))?;
            Ok(HalfInt::new(n))
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<HalfInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// GroupTag
// ---------------------------------------------------------------------------

/// The ambient group G = Spin(m+1,1), m > 1, with the derived bookkeeping
/// n = ⌊(m+2)/2⌋ and n′ = ⌊(m+1)/2⌋.
///
/// For odd m = 2n−1 the complexified Lie algebra is of type B_n; for even
/// m = 2n−2 it is of type D_n.  The compact chain is
/// K = Spin(m+1) ⊃ M = Spin(m) ⊃ M′ = Spin(m−1).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct GroupTag {
    m: usize,
}

impl GroupTag {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(CoreError::malformed(format!("m must be > 1, got {m}")));
        }
        Ok(GroupTag { m })
    }

    pub fn m(self) -> usize {
        self.m
    }

    /// n = ⌊(m+2)/2⌊: the rank of G.
    pub fn n(self) -> usize {
        (self.m + 2) / 2
    }

    /// n′ = ⌊(m+1)/2⌋: the rank of K = Spin(m+1).
    pub fn n_prime(self) -> usize {
        (self.m + 1) / 2
    }

    pub fn is_odd_m(self) -> bool {
        self.m % 2 == 1
    }

    /// Rank of M = Spin(m).
    pub fn rank_m(self) -> usize {
        self.m / 2
    }

    /// Rank of M′ = Spin(m−1); this is n′−1.
    pub fn rank_m_prime(self) -> usize {
        (self.m - 1) / 2
    }
}

/// Series of a (complexified) odd/even orthogonal algebra.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Series {
    /// so(2r+1): short roots present; dominance μ₁ ≥ … ≥ μ_r ≥ 0.
    B,
    /// so(2r): dominance μ₁ ≥ … ≥ μ_{r−1} ≥ |μ_r| (last entry may be negative).
    D,
}

/// Series of weights of Spin(k).
pub fn spin_series(k: usize) -> Series {
    if k % 2 == 1 {
        Series::B
    } else {
        Series::D
    }
}

// ---------------------------------------------------------------------------
// WeightTuple
// ---------------------------------------------------------------------------

/// A tuple of half-integers: a highest weight or an infinitesimal-character
/// parameter.  Comparison and ordering are lexicographic and exact.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightTuple {
    pub entries: Vec<HalfInt>,
}

impl WeightTuple {
    pub fn new(entries: Vec<HalfInt>) -> Self {
        WeightTuple { entries }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        WeightTuple { entries: v.iter().map(|&k| HalfInt::new(k)).collect() }
    }

    /// Parse a comma-separated list like `"3/2,1/2"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(WeightTuple::new(vec![]));
        }
        let entries = s
            .split(',')
            .map(|p| p.parse::<HalfInt>())
            .collect::<Result<Vec<_>>>()?;
        Ok(WeightTuple::new(entries))
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize) -> HalfInt {
        self.entries[i]
    }

    /// All entries in the same coset of ℤ (required of any single weight).
    pub fn uniform_parity(&self) -> bool {
        self.entries
            .windows(2)
            .all(|w| w[0].same_parity(w[1]))
    }

    /// Dominance for the given series:
    /// B: μ₁ ≥ … ≥ μ_r ≥ 0; D: μ₁ ≥ … ≥ μ_{r−1} ≥ |μ_r|.
    pub fn is_dominant(&self, series: Series) -> bool {
        let r = self.rank();
        if r == 0 {
            return true;
        }
        let desc = self.entries.windows(2).take(r.saturating_sub(2) + 1);
        // All consecutive pairs except possibly the last must be ≥; the last
        // comparison involves |·| in the D case.
        for (i, w) in desc.enumerate() {
            let rhs = if i + 2 == r && series == Series::D { w[1].abs() } else { w[1] };
            if w[0] < rhs {
                return false;
            }
        }
        if series == Series::B && self.entries[r - 1] < HalfInt::ZERO {
            return false;
        }
        self.uniform_parity()
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.to_f64()).collect()
    }
}

impl fmt::Display for WeightTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for WeightTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ---------------------------------------------------------------------------
// rho
// ---------------------------------------------------------------------------

/// Half-sum of positive roots of G as a rank-n tuple:
/// (n−1/2, …, 3/2, 1/2) for odd m and (n−1, …, 1, 0) for even m.
pub fn rho(g: GroupTag) -> WeightTuple {
    let n = g.n() as i64;
    let entries = if g.is_odd_m() {
        (1..=n).map(|i| HalfInt::from_twice(2 * (n - i) + 1)).collect()
    } else {
        (1..=n).map(|i| HalfInt::new(n - i)).collect()
    };
    WeightTuple::new(entries)
}

/// Half-sum of positive roots for a B/D series of the given rank, doubled
/// entries: B_r ↦ (r−1/2,…,1/2), D_r ↦ (r−1,…,0).
pub fn rho_series(series: Series, rank: usize) -> WeightTuple {
    let r = rank as i64;
    let entries = match series {
        Series::B => (1..=r).map(|i| HalfInt::from_twice(2 * (r - i) + 1)).collect(),
        Series::D => (1..=r).map(|i| HalfInt::new(r - i)).collect(),
    };
    WeightTuple::new(entries)
}

// ---------------------------------------------------------------------------
// Interlacing
// ---------------------------------------------------------------------------

/// The inequality patterns used by the branching rules.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum InterlaceStyle {
    /// Equal ranks k/k (odd orthogonal down to even orthogonal):
    /// c₁ ≥ d₁ ≥ c₂ ≥ d₂ ≥ … ≥ c_k ≥ |d_k|.
    BToD,
    /// Rank drop k/(k−1) (even orthogonal down to odd orthogonal):
    /// c₁ ≥ d₁ ≥ c₂ ≥ … ≥ c_{k−1} ≥ d_{k−1} ≥ |c_k|.
    DToB,
    /// The shifted chain of the discrete-family branching rules:
    /// c₁+1 ≥ d₁ ≥ c₂+1 ≥ … ≥ d_{r−1} ≥ c_r+1 (upper rank r, lower r−1).
    Shifted,
}

impl InterlaceStyle {
    /// Style of the restriction Spin(m) ↓ Spin(m−1).
    pub fn m_to_m_prime(g: GroupTag) -> InterlaceStyle {
        if g.is_odd_m() { InterlaceStyle::BToD } else { InterlaceStyle::DToB }
    }

    /// Style of the restriction Spin(m+1) ↓ Spin(m).
    pub fn k_to_m(g: GroupTag) -> InterlaceStyle {
        if g.is_odd_m() { InterlaceStyle::DToB } else { InterlaceStyle::BToD }
    }
}

/// Does `lower` interlace `upper` in the given style?  Includes the parity
/// requirement that each lower entry differ from `upper[0]` by an integer.
pub fn interlaces(upper: &WeightTuple, lower: &WeightTuple, style: InterlaceStyle) -> Result<bool> {
    let (ur, lr) = (upper.rank(), lower.rank());
    let rank_ok = match style {
        InterlaceStyle::BToD => lr == ur,
        InterlaceStyle::DToB | InterlaceStyle::Shifted => lr + 1 == ur,
    };
    if !rank_ok {
        return Err(CoreError::malformed(format!(
            "interlacing rank mismatch: upper rank {ur}, lower rank {lr}, style {style:?}"
        )));
    }
    if ur == 0 || lr == 0 {
        return Ok(true);
    }
    let anchor = upper.get(0);
    if !lower.entries.iter().all(|d| d.same_parity(anchor)) {
        return Ok(false);
    }
    let c = &upper.entries;
    let d = &lower.entries;
    let ok = match style {
        InterlaceStyle::BToD => {
            // c_i ≥ d_i ≥ c_{i+1} for i < k; c_k ≥ |d_k|.
            let k = ur;
            (0..k - 1).all(|i| c[i] >= d[i] && d[i] >= c[i + 1]) && c[k - 1] >= d[k - 1].abs()
        }
        InterlaceStyle::DToB => {
            // c_i ≥ d_i ≥ c_{i+1} for i < k−1; d_{k−1} ≥ |c_k|.
            let k = ur;
            (0..k - 1).all(|i| c[i] >= d[i])
                && (0..k.saturating_sub(2)).all(|i| d[i] >= c[i + 1])
                && d[k - 2] >= c[k - 1].abs()
        }
        InterlaceStyle::Shifted => {
            // c_i+1 ≥ d_i ≥ c_{i+1}+1.
            (0..lr).all(|i| c[i] + HalfInt::ONE >= d[i] && d[i] >= c[i + 1] + HalfInt::ONE)
        }
    };
    Ok(ok)
}

/// Which levels of the compact chain a branching table refers to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BranchLevel {
    /// Spin(m) ↓ Spin(m−1).
    MToMPrime,
    /// Spin(m+1) ↓ Spin(m).
    KToM,
}

/// The classical multiplicity-free branching law Spin(k) ↓ Spin(k−1):
/// all dominant `tau` interlacing `mu`, sorted lexicographically.
///
/// `level` selects k = m (M ↓ M′) or k = m+1 (K ↓ M).
pub fn gt_branch(mu: &WeightTuple, g: GroupTag, level: BranchLevel) -> Result<Vec<WeightTuple>> {
    let upper_spin = match level {
        BranchLevel::MToMPrime => g.m(),
        BranchLevel::KToM => g.m() + 1,
    };
    spin_restrict(mu, upper_spin)
}

/// Branch a dominant Spin(k)-weight to Spin(k−1); k ≥ 2.
pub fn spin_restrict(mu: &WeightTuple, k: usize) -> Result<Vec<WeightTuple>> {
    let series = spin_series(k);
    let upper_rank = k / 2;
    if mu.rank() != upper_rank {
        return Err(CoreError::malformed(format!(
            "weight rank {} does not match Spin({k}) (rank {upper_rank})",
            mu.rank()
        )));
    }
    if !mu.is_dominant(series) {
        return Err(CoreError::malformed(format!("non-dominant weight {mu} for Spin({k})")));
    }
    let lower_rank = (k - 1) / 2;
    if lower_rank == 0 {
        // Spin(1) (trivial) or Spin(2) lower rank 0 cannot happen (k−1 = 2 has
        // rank 1); the single empty tuple is the whole branching table.
        return Ok(vec![WeightTuple::new(vec![])]);
    }
    // Per-slot ranges; the Gelfand–Tsetlin constraints are independent.
    let c = &mu.entries;
    let mut slots: Vec<(HalfInt, HalfInt)> = Vec::with_capacity(lower_rank);
    match series {
        Series::B => {
            // B_k ↓ D_k: d_i ∈ [c_{i+1}, c_i] (i < k), d_k ∈ [−c_k, c_k].
            debug_assert_eq!(lower_rank, upper_rank);
            for i in 0..lower_rank - 1 {
                slots.push((c[i + 1], c[i]));
            }
            slots.push((-c[upper_rank - 1], c[upper_rank - 1]));
        }
        Series::D => {
            // D_k ↓ B_{k−1}: d_i ∈ [c_{i+1}, c_i] (i < k−1), d_{k−1} ∈ [|c_k|, c_{k−1}].
            debug_assert_eq!(lower_rank + 1, upper_rank);
            for i in 0..lower_rank - 1 {
                slots.push((c[i + 1], c[i]));
            }
            slots.push((c[upper_rank - 1].abs(), c[upper_rank - 2]));
        }
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(lower_rank);
    enumerate_slots(&slots, c[0], &mut current, &mut out);
    out.sort();
    Ok(out)
}

/// Enumerate all tuples with entry i in `slots[i]`, stepping by 1 within the
/// ℤ-coset of `anchor`.  Dominance is automatic from nested slot bounds.
fn enumerate_slots(
    slots: &[(HalfInt, HalfInt)],
    anchor: HalfInt,
    current: &mut Vec<HalfInt>,
    out: &mut Vec<WeightTuple>,
) {
    if current.len() == slots.len() {
        out.push(WeightTuple::new(current.clone()));
        return;
    }
    let (lo, hi) = slots[current.len()];
    // Smallest value ≥ lo in anchor's ℤ-coset.
    let mut t = lo.twice();
    if (t - anchor.twice()).rem_euclid(2) != 0 {
        t += 1;
    }
    while t <= hi.twice() {
        current.push(HalfInt::from_twice(t));
        enumerate_slots(slots, anchor, current, out);
        current.pop();
        t += 2;
    }
}

// ---------------------------------------------------------------------------
// Weyl dimension formula
// ---------------------------------------------------------------------------

/// Dimension of the irreducible representation of B_r / D_r with highest
/// weight `mu`, by the Weyl dimension formula in exact integer arithmetic.
///
/// Rank 0 and the degenerate D₁ (no positive roots) both give 1.
pub fn weyl_dim(mu: &WeightTuple, series: Series) -> Result<u128> {
    let r = mu.rank();
    if !mu.is_dominant(series) {
        return Err(CoreError::malformed(format!("non-dominant weight {mu}")));
    }
    if r == 0 {
        return Ok(1);
    }
    let rho = rho_series(series, r);
    // Doubled values of μ+ρ and ρ; only ratios of equal-index pairings enter,
    // so the doubling cancels.
    let t: Vec<i64> = (0..r).map(|i| mu.get(i).twice() + rho.get(i).twice()).collect();
    let s: Vec<i64> = (0..r).map(|i| rho.get(i).twice()).collect();
    let mut num: Vec<i64> = Vec::new();
    let mut den: Vec<i64> = Vec::new();
    for i in 0..r {
        for j in (i + 1)..r {
            num.push(t[i] - t[j]);
            den.push(s[i] - s[j]);
            num.push(t[i] + t[j]);
            den.push(s[i] + s[j]);
        }
        if series == Series::B {
            num.push(t[i]);
            den.push(s[i]);
        }
    }
    // Cancel denominators into the numerator factor list; the result is an
    // integer, so full cancellation always succeeds.
    for d in den {
        let mut d = d as i128;
        debug_assert!(d > 0);
        for nf in num.iter_mut() {
            if d == 1 {
                break;
            }
            let g = gcd(nf.unsigned_abs() as i128, d);
            if g > 1 {
                *nf /= g as i64;
                d /= g;
            }
        }
        if d != 1 {
            return Err(CoreError::numerical(
                "Weyl dimension cancellation failed (overflow-safe path)",
            ));
        }
    }
    let mut dim: u128 = 1;
    for nf in num {
        dim = dim
            .checked_mul(nf.unsigned_abs() as u128)
            .ok_or_else(|| CoreError::numerical("Weyl dimension overflow"))?;
    }
    Ok(dim)
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Dimension of the Spin(k)-representation with highest weight `mu`.
pub fn spin_dim(mu: &WeightTuple, k: usize) -> Result<u128> {
    weyl_dim(mu, spin_series(k))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: &str) -> HalfInt {
        s.parse().unwrap()
    }
    fn w(s: &str) -> WeightTuple {
        WeightTuple::parse(s).unwrap()
    }

    #[test]
    fn halfint_parse_display_roundtrip() {
        for s in ["0", "2", "-3", "3/2", "-1/2", "7/2"] {
            assert_eq!(h(s).to_string(), s);
        }
        assert_eq!(h("1.5"), HalfInt::from_twice(3));
        assert_eq!(h("-0.5"), HalfInt::from_twice(-1));
        assert_eq!(h("4/2"), HalfInt::new(2));
        assert!("1/3".parse::<HalfInt>().is_err());
        assert!("x".parse::<HalfInt>().is_err());
    }

    #[test]
    fn halfint_ordering_and_arith() {
        assert!(h("3/2") > h("1"));
        assert_eq!(h("3/2") + h("1/2"), HalfInt::new(2));
        assert_eq!(-h("1/2"), h("-1/2"));
        assert_eq!(h("3/2") * 2, HalfInt::new(3));
        assert!(h("3/2").same_parity(h("-1/2")));
        assert!(!h("3/2").same_parity(h("1")));
    }

    #[test]
    fn rho_values() {
        assert_eq!(rho(GroupTag::new(3).unwrap()), w("3/2,1/2"));
        assert_eq!(rho(GroupTag::new(4).unwrap()), w("2,1,0"));
        assert_eq!(rho(GroupTag::new(2).unwrap()), w("1,0"));
        assert_eq!(rho(GroupTag::new(9).unwrap()), w("9/2,7/2,5/2,3/2,1/2"));
    }

    #[test]
    fn group_tag_ranks() {
        let g = GroupTag::new(5).unwrap();
        assert_eq!((g.n(), g.n_prime(), g.rank_m(), g.rank_m_prime()), (3, 3, 2, 2));
        let g = GroupTag::new(4).unwrap();
        assert_eq!((g.n(), g.n_prime(), g.rank_m(), g.rank_m_prime()), (3, 2, 2, 1));
        assert!(GroupTag::new(1).is_err());
    }

    #[test]
    fn interlace_examples() {
        let g3 = GroupTag::new(3).unwrap();
        let g4 = GroupTag::new(4).unwrap();
        assert!(interlaces(&w("1"), &w("0"), InterlaceStyle::m_to_m_prime(g3)).unwrap());
        assert!(interlaces(&w("1,0"), &w("1"), InterlaceStyle::m_to_m_prime(g4)).unwrap());
        assert!(!interlaces(&w("0,0"), &w("1"), InterlaceStyle::DToB).unwrap());
        // Parity mismatch is false, not an error.
        assert!(!interlaces(&w("3/2"), &w("1"), InterlaceStyle::BToD).unwrap());
        // Rank mismatch is an error.
        assert!(interlaces(&w("1"), &w("1,0"), InterlaceStyle::BToD).is_err());
    }

    #[test]
    fn gt_branch_examples() {
        let g3 = GroupTag::new(3).unwrap();
        let g4 = GroupTag::new(4).unwrap();
        assert_eq!(gt_branch(&w("0"), g3, BranchLevel::MToMPrime).unwrap(), vec![w("0")]);
        assert_eq!(
            gt_branch(&w("1"), g3, BranchLevel::MToMPrime).unwrap(),
            vec![w("-1"), w("0"), w("1")]
        );
        assert_eq!(
            gt_branch(&w("1,0"), g4, BranchLevel::MToMPrime).unwrap(),
            vec![w("0"), w("1")]
        );
        // Half-integer (genuine spin) weights.
        assert_eq!(
            gt_branch(&w("1/2"), g3, BranchLevel::MToMPrime).unwrap(),
            vec![w("-1/2"), w("1/2")]
        );
        // m=2: M′ = Spin(1) has rank 0: single empty tuple.
        let g2 = GroupTag::new(2).unwrap();
        assert_eq!(
            gt_branch(&w("1"), g2, BranchLevel::MToMPrime).unwrap(),
            vec![WeightTuple::new(vec![])]
        );
    }

    #[test]
    fn weyl_dim_examples() {
        assert_eq!(weyl_dim(&w("0,0"), Series::B).unwrap(), 1);
        assert_eq!(weyl_dim(&w("1"), Series::B).unwrap(), 3); // Spin(3) vector
        assert_eq!(weyl_dim(&w("1,1"), Series::B).unwrap(), 10); // Λ² of 5-dim
        assert_eq!(weyl_dim(&w("1,0"), Series::D).unwrap(), 4); // Spin(4) vector
        assert_eq!(weyl_dim(&w("1/2"), Series::B).unwrap(), 2); // Spin(3) spinor
        assert_eq!(weyl_dim(&w("1/2,1/2"), Series::D).unwrap(), 2); // Spin(4) half-spinor
        assert_eq!(weyl_dim(&WeightTuple::new(vec![]), Series::B).unwrap(), 1);
        // D₁ is abelian: all dims 1.
        assert_eq!(weyl_dim(&w("5"), Series::D).unwrap(), 1);
    }

    #[test]
    fn dimension_consistency_small() {
        // dim V_{M,μ} = Σ_τ dim V_{M′,τ} across one restriction step.
        for (k, mu) in [
            (5usize, w("2,1")),
            (5, w("3/2,1/2")),
            (6, w("2,1,-1")),
            (7, w("2,1,0")),
            (4, w("3,-2")),
        ] {
            let lhs = spin_dim(&mu, k).unwrap();
            let rhs: u128 = spin_restrict(&mu, k)
                .unwrap()
                .iter()
                .map(|t| spin_dim(t, k - 1).unwrap())
                .sum();
            assert_eq!(lhs, rhs, "k={k} mu={mu}");
        }
    }

    #[test]
    fn branch_is_duplicate_free_and_interlaces() {
        let g5 = GroupTag::new(5).unwrap();
        let mu = w("2,1");
        let taus = gt_branch(&mu, g5, BranchLevel::MToMPrime).unwrap();
        let style = InterlaceStyle::m_to_m_prime(g5);
        for t in &taus {
            assert!(interlaces(&mu, t, style).unwrap());
        }
        let mut dedup = taus.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), taus.len());
    }
}
