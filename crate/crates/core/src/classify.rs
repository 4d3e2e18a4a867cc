//! Classification of infinitesimal characters of G = Spin(m+1,1) and the
//! Langlands-style labels of the irreducible unitary representations
//! attached to them, together with unitarizability and cohomological-induction
//! bookkeeping.
//!
//! An infinitesimal character is presented by a length-n tuple γ of
//! half-integers or, in the non-integral case, by a pair (μ, a) with μ a
//! dominant M-weight and a the continuous parameter along the split torus A.

use crate::weights::{rho, spin_series, GroupTag, HalfInt, WeightTuple};
use crate::{CoreError, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Coarse class of an integral-or-not infinitesimal character.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum CharClass {
    /// Regular integral: all entries distinct and nonzero in the dominant
    /// chamber, uniform lattice parity.
    Lambda0,
    /// Exactly one coincidence γ_j = γ_{j+1} (1 ≤ j ≤ n−1).
    LambdaJ(usize),
    /// Odd m only: γ_n = 0 with strictly half-integral remaining entries.
    LambdaN,
    /// One entry off the lattice of the others (or a genuinely complex
    /// continuous parameter).
    NonIntegral,
}

/// An infinitesimal character in dominant form, with derived data.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InflChar {
    pub g: GroupTag,
    pub gamma: WeightTuple,
    pub class: CharClass,
    /// For Lambda0: the parameters a_1 ≥ … ≥ a_n ≥ 0 with
    /// γ_i = a_i + n − i + 1/2 (odd m) resp. γ_i = a_i + n − i (even m).
    pub a_params: Option<WeightTuple>,
    /// For NonIntegral: the (μ, a) presentation with a ≥ 0 on the real axis.
    pub mu_a: Option<(WeightTuple, HalfInt)>,
}

/// Sorted-dominant form of a tuple under the Weyl group: entries replaced by
/// absolute values and sorted descending (B_n); for even m (D_n) sign flips
/// come in pairs so the last entry keeps a sign.
fn dominant_form(gamma: &WeightTuple, g: GroupTag) -> WeightTuple {
    let mut v: Vec<HalfInt> = gamma.entries.iter().map(|e| e.abs()).collect();
    v.sort();
    v.reverse();
    if !g.is_odd_m() {
        let n = g.n();
        let flips = gamma.entries.iter().filter(|e| **e < HalfInt::ZERO).count();
        if flips % 2 == 1 {
            v[n - 1] = -v[n - 1];
        }
    }
    WeightTuple::new(v)
}

/// Classify a length-n tuple γ presented in any Weyl chamber.
///
/// Odd m (type B_n): the integral classes require either all entries in
/// ℤ+1/2, or all in ℤ with γ_n ≥ 1 (Lambda0/LambdaJ), and LambdaN requires
/// γ_n = 0 with the rest strict half-integers.  A single minority-parity
/// entry yields NonIntegral with the (μ, a) presentation recovered by
/// removing the odd entry.  More than one coincidence is malformed.
pub fn classify_infl_char(g: GroupTag, gamma: &WeightTuple) -> Result<InflChar> {
    let n = g.n();
    if gamma.rank() != n {
        return Err(CoreError::malformed(format!(
            "infinitesimal character must have length n = {n}, got {}",
            gamma.rank()
        )));
    }
    let dom = dominant_form(gamma, g);
    let v = &dom.entries;

    // Count coincidences among |entries| (for even m compare absolute values).
    let mut abs_sorted: Vec<HalfInt> = v.iter().map(|e| e.abs()).collect();
    abs_sorted.sort();
    abs_sorted.reverse();
    let dup_count = abs_sorted.windows(2).filter(|w| w[0] == w[1]).count();

    let parity_split = split_by_parity(v);

    if let Some((_, minority_idx)) = parity_split {
        // Mixed parity: exactly one entry off-lattice ⇒ non-integral.
        let a = v[minority_idx].abs();
        let mut mu_entries: Vec<HalfInt> = Vec::with_capacity(n - 1);
        for (i, e) in v.iter().enumerate() {
            if i != minority_idx {
                mu_entries.push(*e);
            }
        }
        // Recover μ from the remaining entries: μ_i = entry_i − ρ_M shift.
        let mu = mu_from_chain(&mu_entries, g)?;
        return Ok(InflChar {
            g,
            gamma: dom,
            class: CharClass::NonIntegral,
            a_params: None,
            mu_a: Some((mu, a)),
        });
    }

    // Uniform parity from here on.
    if !dom.uniform_parity() {
        return Err(CoreError::malformed(format!(
            "more than one entry off the common lattice: {dom}"
        )));
    }
    let all_int = v.iter().all(|e| e.is_integer());
    let zeros = abs_sorted.iter().filter(|e| e.is_zero()).count();

    if g.is_odd_m() {
        if dup_count == 0 {
            // Distinct strict half-integers (automatically nonzero): regular.
            if !all_int {
                return Ok(lambda0(g, dom));
            }
            // Distinct integers with γ_n ≥ 1: also regular integral.
            if zeros == 0 && abs_sorted[n - 1] >= HalfInt::ONE {
                return Ok(lambda0(g, dom));
            }
            // Distinct integers with γ_n = 0: the limit class.
            if zeros == 1 {
                return Ok(InflChar {
                    g,
                    gamma: dom,
                    class: CharClass::LambdaN,
                    a_params: None,
                    mu_a: None,
                });
            }
            return Err(CoreError::malformed(format!(
                "too singular for the supported classes: {dom}"
            )));
        }
        if dup_count == 1 {
            // Exactly one coincidence; locate it.  LambdaJ requires a nonzero
            // repeated value and no zero entry.
            if zeros > 0 {
                return Err(CoreError::malformed(format!(
                    "coincidence together with a zero entry: {dom}"
                )));
            }
            let j = abs_sorted.windows(2).position(|w| w[0] == w[1]).unwrap() + 1;
            return Ok(InflChar {
                g,
                gamma: dom,
                class: CharClass::LambdaJ(j),
                a_params: None,
                mu_a: None,
            });
        }
        Err(CoreError::malformed(format!(
            "more than one coincidence: {dom}"
        )))
    } else {
        // Even m (type D_n): v_n carries a sign; regular integral means the
        // absolute values are distinct (a zero last entry is allowed since
        // ρ ends in 0).
        if dup_count == 0 {
            return Ok(lambda0(g, dom));
        }
        if dup_count == 1 && zeros <= 1 {
            let j = abs_sorted.windows(2).position(|w| w[0] == w[1]).unwrap() + 1;
            return Ok(InflChar {
                g,
                gamma: dom,
                class: CharClass::LambdaJ(j),
                a_params: None,
                mu_a: None,
            });
        }
        Err(CoreError::malformed(format!(
            "more than one coincidence: {dom}"
        )))
    }
}

fn lambda0(g: GroupTag, dom: WeightTuple) -> InflChar {
    let n = g.n();
    let rho_g = rho(g);
    let a: Vec<HalfInt> = (0..n).map(|i| dom.get(i) - rho_g.get(i)).collect();
    InflChar {
        g,
        gamma: dom,
        class: CharClass::Lambda0,
        a_params: Some(WeightTuple::new(a)),
        mu_a: None,
    }
}

/// If the entries split as (all but one on a common ℤ-coset, one off it),
/// return the index of the odd one out.  For n = 2 ties are broken by
/// requiring the recovered μ to be dominant for either split.
fn split_by_parity(v: &[HalfInt]) -> Option<((), usize)> {
    let n = v.len();
    if n < 2 {
        return None;
    }
    let ints: Vec<usize> = (0..n).filter(|&i| v[i].is_integer()).collect();
    let halves: Vec<usize> = (0..n).filter(|&i| !v[i].is_integer()).collect();
    match (ints.len(), halves.len()) {
        (1, _) if halves.len() >= 2 => Some(((), ints[0])),
        (_, 1) if ints.len() >= 2 => Some(((), halves[0])),
        (1, 1) => {
            // n = 2: either entry can be the continuous parameter; prefer the
            // split whose μ is closer to the natural chain (take the smaller
            // entry as continuous so μ stays as dominant as possible).
            if v[0].abs() >= v[1].abs() {
                Some(((), 1))
            } else {
                Some(((), 0))
            }
        }
        _ => None,
    }
}

/// Recover the M-weight μ from the discrete part of a non-integral character:
/// entries are μ_i + (m/2 − i), i = 1..n−1, in some order; we sort descending
/// and subtract the shift, then check dominance.
fn mu_from_chain(entries: &[HalfInt], g: GroupTag) -> Result<WeightTuple> {
    let m = g.m() as i64;
    let mut e: Vec<HalfInt> = entries.iter().map(|x| x.abs()).collect();
    e.sort();
    e.reverse();
    let mu: Vec<HalfInt> = e
        .iter()
        .enumerate()
        .map(|(i, x)| *x - HalfInt::from_twice(m - 2 * (i as i64 + 1)))
        .collect();
    let mu = WeightTuple::new(mu);
    if !mu.is_dominant(spin_series(g.m())) {
        return Err(CoreError::malformed(format!(
            "discrete part does not give a dominant M-weight: {mu}"
        )));
    }
    Ok(mu)
}

// ---------------------------------------------------------------------------
// Representation labels
// ---------------------------------------------------------------------------

/// Sign label for a discrete-series style pair.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum SignLabel {
    Plus,
    Minus,
}

impl SignLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SignLabel::Plus => "+",
            SignLabel::Minus => "-",
        }
    }
}

impl fmt::Display for SignLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SignLabel {
    type Err = CoreError;
    fn from_str(s: &str) -> Result<SignLabel> {
        match s {
            "+" | "plus" => Ok(SignLabel::Plus),
            "-" | "minus" => Ok(SignLabel::Minus),
            _ => Err(CoreError::malformed(format!("bad sign {s:?}"))),
        }
    }
}

/// The continuous induction parameter ν = (re + i·im)·λ₀ of a principal
/// series, canonicalized so that re ≥ 0 and, when re = 0, im ≥ 0
/// (I(μ,ν) ≅ I(μ,−ν)).
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct NuParam {
    pub re: f64,
    pub im: f64,
}

impl NuParam {
    pub fn new(re: f64, im: f64) -> Self {
        let (re, im) = if re < 0.0 || (re == 0.0 && im < 0.0) {
            (-re, -im)
        } else {
            (re, im)
        };
        NuParam { re, im }
    }

    pub fn real(re: f64) -> Self {
        NuParam::new(re, 0.0)
    }

    pub fn imaginary(im: f64) -> Self {
        NuParam::new(0.0, im)
    }

    pub fn is_real(&self) -> bool {
        self.im == 0.0
    }

    pub fn is_imaginary(&self) -> bool {
        self.re == 0.0
    }
}

/// Label of an irreducible admissible representation in the families treated
/// here.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub enum RepLabel {
    /// The finite-dimensional representation with the given infinitesimal
    /// character (= π₀ of the regular-integral family).
    FinDim { gamma: WeightTuple },
    /// π_j(γ), 1 ≤ j ≤ n−1 for even m, 1 ≤ j ≤ n−1 for odd m (the j = n slot
    /// splits into the two discrete summands below).
    PiJ { gamma: WeightTuple, j: usize },
    /// Discrete series (odd m) or their limits (`limit = true`, γ_n = 0 class).
    Ds { gamma: WeightTuple, sign: SignLabel, limit: bool },
    /// Irreducible (spherical-at-M) principal series I(μ, ν·λ₀).
    Ps { mu: WeightTuple, nu: NuParam },
}

impl fmt::Display for RepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepLabel::FinDim { gamma } => write!(f, "FinDim{gamma}"),
            RepLabel::PiJ { gamma, j } => write!(f, "Pi{j}{gamma}"),
            RepLabel::Ds { gamma, sign, limit } => {
                write!(f, "{}Ds{sign}{gamma}", if *limit { "Limit" } else { "" })
            }
            RepLabel::Ps { mu, nu } => {
                if nu.is_real() {
                    write!(f, "Ps(mu={mu}, nu={})", nu.re)
                } else if nu.is_imaginary() {
                    write!(f, "Ps(mu={mu}, nu={}i)", nu.im)
                } else {
                    write!(f, "Ps(mu={mu}, nu={}+{}i)", nu.re, nu.im)
                }
            }
        }
    }
}

/// The list of irreducible representations with the infinitesimal character
/// of `ic`, in the standard order.
///
/// Lambda0, odd m: π₀ (finite-dim), π₁, …, π_{n−1}, π_n^±  (n+2 items);
/// Lambda0, even m: π₀, …, π_{n−1}  (n items);
/// LambdaJ(j): the single irreducible principal series I(μ_j, ν_j);
/// LambdaN (odd m): the two limits of discrete series;
/// NonIntegral: the single irreducible I(μ, a·λ₀).
pub fn irreducibles_with_char(ic: &InflChar) -> Result<Vec<RepLabel>> {
    let g = ic.g;
    let n = g.n();
    match ic.class {
        CharClass::Lambda0 => {
            let mut out = vec![RepLabel::FinDim { gamma: ic.gamma.clone() }];
            for j in 1..=n - 1 {
                out.push(RepLabel::PiJ { gamma: ic.gamma.clone(), j });
            }
            if g.is_odd_m() {
                out.push(RepLabel::Ds { gamma: ic.gamma.clone(), sign: SignLabel::Plus, limit: false });
                out.push(RepLabel::Ds { gamma: ic.gamma.clone(), sign: SignLabel::Minus, limit: false });
            }
            Ok(out)
        }
        CharClass::LambdaJ(j) => {
            let (mu, nu) = lambda_j_ps(ic, j)?;
            Ok(vec![RepLabel::Ps { mu, nu }])
        }
        CharClass::LambdaN => Ok(vec![
            RepLabel::Ds { gamma: ic.gamma.clone(), sign: SignLabel::Plus, limit: true },
            RepLabel::Ds { gamma: ic.gamma.clone(), sign: SignLabel::Minus, limit: true },
        ]),
        CharClass::NonIntegral => {
            let (mu, a) = ic
                .mu_a
                .clone()
                .ok_or_else(|| CoreError::malformed("missing (mu, a) data"))?;
            Ok(vec![RepLabel::Ps { mu, nu: NuParam::real(a.to_f64()) }])
        }
    }
}

/// The (μ, ν) parameters of the irreducible principal series at a LambdaJ
/// character: drop the duplicated entry at sorted position j+1, subtract the
/// M-chain shift to get μ, and set ν = γ_j·λ₀ (the repeated value).
fn lambda_j_ps(ic: &InflChar, j: usize) -> Result<(WeightTuple, NuParam)> {
    let g = ic.g;
    let n = g.n();
    if j == 0 || j >= n {
        return Err(CoreError::malformed(format!("coincidence index {j} out of range")));
    }
    let v = &ic.gamma.entries;
    let repeated = v[j - 1];
    let mut rest: Vec<HalfInt> = Vec::with_capacity(n - 1);
    for (i, e) in v.iter().enumerate() {
        if i != j {
            rest.push(*e);
        }
    }
    // `rest` keeps one copy of the repeated value; even-m sign on the last
    // slot must be preserved.
    let mu = mu_from_chain_signed(&rest, g)?;
    Ok((mu, NuParam::real(repeated.abs().to_f64())))
}

/// Like [`mu_from_chain`] but the input is already sorted dominant and, for
/// even m, the final sign is carried through to μ.
fn mu_from_chain_signed(entries: &[HalfInt], g: GroupTag) -> Result<WeightTuple> {
    let m = g.m() as i64;
    let r = entries.len();
    let mu: Vec<HalfInt> = entries
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let shift = HalfInt::from_twice(m - 2 * (i as i64 + 1));
            if i + 1 == r && !g.is_odd_m() && *x < HalfInt::ZERO {
                // D-type M: the shift on the final slot is 0 anyway only when
                // r = m/2; in general subtract the shift from |x| and restore
                // the sign.
                -(x.abs() - shift)
            } else {
                *x - shift
            }
        })
        .collect();
    let mu = WeightTuple::new(mu);
    if !mu.is_dominant(spin_series(g.m())) {
        return Err(CoreError::malformed(format!(
            "discrete part does not give a dominant M-weight: {mu}"
        )));
    }
    Ok(mu)
}

// ---------------------------------------------------------------------------
// Unitarizability
// ---------------------------------------------------------------------------

/// Is the representation unitarizable?
///
/// Discrete series and their limits always are.  π_j(γ) is unitarizable iff
/// a_i = 0 for j < i ≤ n.  A spherical-type principal series I(μ, ν) is
/// unitarizable iff ν is purely imaginary, or ν = a·λ₀ real with
/// |a| < m/2, μ integral-chain compatible, and μ_i = 0 for
/// i > m/2 − |a| − 1 (complementary-series window with the tail condition).
pub fn is_unitarizable(g: GroupTag, rep: &RepLabel) -> Result<bool> {
    let n = g.n();
    match rep {
        RepLabel::FinDim { gamma } => {
            // Finite-dimensional: unitary only when trivial on the split part,
            // i.e. the trivial representation (γ = ρ).
            Ok(*gamma == rho(g))
        }
        RepLabel::Ds { .. } => Ok(true),
        RepLabel::PiJ { gamma, j } => {
            let ic = classify_infl_char(g, gamma)?;
            let a = ic
                .a_params
                .ok_or_else(|| CoreError::malformed(format!("{gamma} is not regular integral")))?;
            Ok((*j..n).all(|i| a.get(i).is_zero()))
        }
        RepLabel::Ps { mu, nu } => {
            if nu.is_imaginary() {
                return Ok(true);
            }
            if !nu.is_real() {
                return Ok(false);
            }
            let a = nu.re.abs();
            // Half the sum of restricted-root multiplicities: m/2.
            let bound = g.m() as f64 / 2.0;
            if a >= bound {
                return Ok(false);
            }
            if !mu.entries.iter().all(|e| e.is_integer()) {
                return Ok(false);
            }
            // Tail condition: μ_i = 0 for i > m/2 − |a| (1-based).
            let cutoff = bound - a;
            for (i0, e) in mu.entries.iter().enumerate() {
                let i = (i0 + 1) as f64;
                if i > cutoff && !e.is_zero() {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

// ---------------------------------------------------------------------------
// A_q(λ) bookkeeping
// ---------------------------------------------------------------------------

/// Position of an A_q(λ) parameter λ = (λ₁,…,λ_j,0,…,0) relative to the good
/// and weakly-fair ranges of the θ-stable parabolic q = q_j.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AqRange {
    pub good: bool,
    pub weakly_fair: bool,
    pub nonzero: bool,
}

/// An A_q(λ) datum: the parabolic index j (number of compact u(1) factors in
/// the Levi) and the weight λ, nonzero only in the first j slots.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AqParam {
    pub g: GroupTag,
    pub j: usize,
    pub lambda: WeightTuple,
}

impl AqParam {
    pub fn new(g: GroupTag, j: usize, lambda: WeightTuple) -> Result<Self> {
        let n = g.n();
        if j == 0 || j > n - 1 {
            return Err(CoreError::malformed(format!("Aq index j = {j} out of range 1..={}", n - 1)));
        }
        if lambda.rank() != n {
            return Err(CoreError::malformed(format!(
                "lambda must have length {n}, got {}",
                lambda.rank()
            )));
        }
        if lambda.entries[j..].iter().any(|e| !e.is_zero()) {
            return Err(CoreError::malformed(format!(
                "lambda must vanish beyond slot {j}: {lambda}"
            )));
        }
        if !lambda.entries.iter().all(|e| e.is_integer()) {
            return Err(CoreError::malformed(format!("lambda must be integral: {lambda}")));
        }
        if !lambda.entries[..j].windows(2).all(|w| w[0] >= w[1]) {
            return Err(CoreError::malformed(format!("lambda must be weakly decreasing: {lambda}")));
        }
        Ok(AqParam { g, j, lambda })
    }

    /// Good / weakly-fair / nonzero range tests:
    /// good ⇔ λ₁ ≥ … ≥ λ_j ≥ 0;
    /// weakly fair ⇔ λ_i + 1 ≥ λ_{i+1} (i < j) and λ_j ≥ −n + j;
    /// nonzero ⇔ weakly fair and λ_{j−1} ≥ −1.
    pub fn range(&self) -> AqRange {
        let j = self.j;
        let lam = &self.lambda.entries;
        let n = self.g.n() as i64;
        let good = lam[..j].windows(2).all(|w| w[0] >= w[1]) && lam[j - 1] >= HalfInt::ZERO;
        let weakly_fair = lam[..j].windows(2).all(|w| w[0] + HalfInt::ONE >= w[1])
            && lam[j - 1] >= HalfInt::new(-n + j as i64);
        let prev = if j >= 2 { lam[j - 2] } else { lam[j - 1] };
        let nonzero = weakly_fair && prev >= HalfInt::new(-1);
        AqRange { good, weakly_fair, nonzero }
    }

    /// Identify A_q(λ) in the weakly-fair range with a representation label.
    ///
    /// In the good range the result is π_j(γ) with γ = λ + ρ.  For λ_j < 0
    /// (still weakly fair and nonzero) the module is the unitarily induced
    /// I(μ, ν) with j′ = j − 1 − λ_j, a_k = λ_k + 1 for k < j and 0 after,
    /// μ = (a₁,…,a_{n−1}), ν = (n − j′ − 1/2)·λ₀ (odd m) resp.
    /// (n − j′ − 1)·λ₀ (even m).
    pub fn to_rep(&self) -> Result<RepLabel> {
        let range = self.range();
        if !range.weakly_fair {
            return Err(CoreError::domain(format!(
                "Aq parameter outside the weakly fair range: j={} lambda={}",
                self.j, self.lambda
            )));
        }
        if !range.nonzero {
            return Err(CoreError::domain(format!(
                "Aq module vanishes: j={} lambda={}",
                self.j, self.lambda
            )));
        }
        let g = self.g;
        let n = g.n();
        let j = self.j;
        let lam = &self.lambda.entries;
        if range.good {
            let rho_g = rho(g);
            let gamma: Vec<HalfInt> =
                (0..n).map(|i| lam[i] + rho_g.get(i)).collect();
            return Ok(RepLabel::PiJ { gamma: WeightTuple::new(gamma), j });
        }
        // λ_j < 0 branch.
        let lam_j = lam[j - 1];
        debug_assert!(lam_j < HalfInt::ZERO);
        let j_eff = (j as i64 - 1) - lam_j.twice() / 2;
        let mut a: Vec<HalfInt> = Vec::with_capacity(n - 1);
        for k in 0..j - 1 {
            a.push(lam[k] + HalfInt::ONE);
        }
        while a.len() < n - 1 {
            a.push(HalfInt::ZERO);
        }
        let mu = WeightTuple::new(a);
        let nu = if g.is_odd_m() {
            (n as i64 - j_eff) as f64 - 0.5
        } else {
            (n as i64 - j_eff - 1) as f64
        };
        Ok(RepLabel::Ps { mu, nu: NuParam::real(nu) })
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn g(m: usize) -> GroupTag {
        GroupTag::new(m).unwrap()
    }
    fn w(s: &str) -> WeightTuple {
        WeightTuple::parse(s).unwrap()
    }

    #[test]
    fn classify_regular() {
        let ic = classify_infl_char(g(3), &w("3/2,1/2")).unwrap();
        assert_eq!(ic.class, CharClass::Lambda0);
        assert_eq!(ic.a_params.unwrap(), w("0,0"));
        let ic = classify_infl_char(g(3), &w("7/2,3/2")).unwrap();
        assert_eq!(ic.a_params.unwrap(), w("2,1"));
        // All-integer with last entry ≥ 1 is also regular integral for odd m.
        let ic = classify_infl_char(g(3), &w("3,1")).unwrap();
        assert_eq!(ic.class, CharClass::Lambda0);
        // Even m.
        let ic = classify_infl_char(g(4), &w("2,1,0")).unwrap();
        assert_eq!(ic.class, CharClass::Lambda0);
        assert_eq!(ic.a_params.unwrap(), w("0,0,0"));
        // Even m: negative last entry preserved.
        let ic = classify_infl_char(g(4), &w("3,2,-1")).unwrap();
        assert_eq!(ic.class, CharClass::Lambda0);
        assert_eq!(ic.gamma, w("3,2,-1"));
    }

    #[test]
    fn classify_coincidence() {
        let ic = classify_infl_char(g(3), &w("3/2,3/2")).unwrap();
        assert_eq!(ic.class, CharClass::LambdaJ(1));
        let ic = classify_infl_char(g(5), &w("5/2,3/2,3/2")).unwrap();
        assert_eq!(ic.class, CharClass::LambdaJ(2));
        // Weyl-chamber normalization first.
        let ic = classify_infl_char(g(3), &w("-3/2,3/2")).unwrap();
        assert_eq!(ic.class, CharClass::LambdaJ(1));
        assert!(classify_infl_char(g(5), &w("3/2,3/2,3/2")).is_err());
    }

    #[test]
    fn classify_limits_and_nonintegral() {
        let ic = classify_infl_char(g(3), &w("1,0")).unwrap();
        assert_eq!(ic.class, CharClass::LambdaN);
        let ic = classify_infl_char(g(3), &w("2,0")).unwrap();
        assert_eq!(ic.class, CharClass::LambdaN);
        // Mixed parity: non-integral.
        let ic = classify_infl_char(g(3), &w("3/2,0")).unwrap();
        assert_eq!(ic.class, CharClass::NonIntegral);
        let (mu, a) = ic.mu_a.unwrap();
        assert_eq!(mu, w("1"));
        assert_eq!(a, HalfInt::ZERO);
        let ic = classify_infl_char(g(3), &w("3/2,1")).unwrap();
        assert_eq!(ic.class, CharClass::NonIntegral);
        let (mu, a) = ic.mu_a.unwrap();
        assert_eq!(mu, w("1"));
        assert_eq!(a, HalfInt::new(1));
    }

    #[test]
    fn irreducibles_lists() {
        let ic = classify_infl_char(g(3), &w("3/2,1/2")).unwrap();
        let reps = irreducibles_with_char(&ic).unwrap();
        assert_eq!(reps.len(), 4);
        assert!(matches!(reps[0], RepLabel::FinDim { .. }));
        assert!(matches!(reps[1], RepLabel::PiJ { j: 1, .. }));
        assert!(matches!(reps[2], RepLabel::Ds { sign: SignLabel::Plus, limit: false, .. }));
        assert!(matches!(reps[3], RepLabel::Ds { sign: SignLabel::Minus, limit: false, .. }));

        let ic = classify_infl_char(g(4), &w("2,1,0")).unwrap();
        let reps = irreducibles_with_char(&ic).unwrap();
        assert_eq!(reps.len(), 3);
        assert!(matches!(reps[2], RepLabel::PiJ { j: 2, .. }));

        let ic = classify_infl_char(g(3), &w("3/2,3/2")).unwrap();
        let reps = irreducibles_with_char(&ic).unwrap();
        assert_eq!(reps.len(), 1);
        match &reps[0] {
            RepLabel::Ps { mu, nu } => {
                assert_eq!(*mu, w("1"));
                assert_eq!(nu.re, 1.5);
                assert_eq!(nu.im, 0.0);
            }
            other => panic!("expected Ps, got {other:?}"),
        }

        let ic = classify_infl_char(g(3), &w("1,0")).unwrap();
        let reps = irreducibles_with_char(&ic).unwrap();
        assert_eq!(reps.len(), 2);
        assert!(matches!(reps[0], RepLabel::Ds { limit: true, sign: SignLabel::Plus, .. }));
    }

    #[test]
    fn unitarizability_examples() {
        // π₁((7/2,3/2,1/2)) on m=5: a = (1,0,0), zero tail past j=1 ⇒ unitary.
        let rep = RepLabel::PiJ { gamma: w("7/2,3/2,1/2"), j: 1 };
        assert!(is_unitarizable(g(5), &rep).unwrap());
        // π₁((7/2,5/2,1/2)): a = (1,1,0) has a "1" past slot 1 ⇒ not unitary.
        let rep = RepLabel::PiJ { gamma: w("7/2,5/2,1/2"), j: 1 };
        assert!(!is_unitarizable(g(5), &rep).unwrap());
        // Complementary series I((0), 1.2λ₀) on m=3: window |a| < 3/2.
        let rep = RepLabel::Ps { mu: w("0"), nu: NuParam::real(1.2) };
        assert!(is_unitarizable(g(3), &rep).unwrap());
        let rep = RepLabel::Ps { mu: w("0"), nu: NuParam::real(1.6) };
        assert!(!is_unitarizable(g(3), &rep).unwrap());
        // Unitary axis always works, including with nonzero μ.
        let rep = RepLabel::Ps { mu: w("2"), nu: NuParam::imaginary(0.7) };
        assert!(is_unitarizable(g(3), &rep).unwrap());
        // Tail condition: m=5, μ=(1,0), |a|=1 ⇒ cutoff 3/2 ⇒ μ₂ must vanish: ok.
        let rep = RepLabel::Ps { mu: w("1,0"), nu: NuParam::real(1.0) };
        assert!(is_unitarizable(g(5), &rep).unwrap());
        let rep = RepLabel::Ps { mu: w("1,1"), nu: NuParam::real(1.0) };
        assert!(!is_unitarizable(g(5), &rep).unwrap());
        // Half-integral μ never enters the complementary window.
        let rep = RepLabel::Ps { mu: w("1/2"), nu: NuParam::real(0.5) };
        assert!(!is_unitarizable(g(3), &rep).unwrap());
        // Discrete series always unitary.
        let rep = RepLabel::Ds { gamma: w("3/2,1/2"), sign: SignLabel::Plus, limit: false };
        assert!(is_unitarizable(g(3), &rep).unwrap());
    }

    #[test]
    fn aq_ranges() {
        let g5 = g(5);
        let p = AqParam::new(g5, 2, w("1,0,0")).unwrap();
        let r = p.range();
        assert!(r.good && r.weakly_fair && r.nonzero);
        let p = AqParam::new(g5, 2, w("0,-1,0")).unwrap();
        let r = p.range();
        assert!(!r.good && r.weakly_fair && r.nonzero);
        // Weakly fair boundary: λ_j = −n + j.
        let p = AqParam::new(g5, 1, w("-2,0,0")).unwrap();
        let r = p.range();
        assert!(!r.good && r.weakly_fair);
        let p = AqParam::new(g5, 1, w("-3,0,0")).unwrap();
        assert!(!p.range().weakly_fair);
    }

    #[test]
    fn aq_to_rep() {
        let g3 = g(3);
        // Good range: γ = λ + ρ.
        let p = AqParam::new(g3, 1, w("0,0")).unwrap();
        assert_eq!(p.to_rep().unwrap(), RepLabel::PiJ { gamma: w("3/2,1/2"), j: 1 });
        let p = AqParam::new(g3, 1, w("1,0")).unwrap();
        assert_eq!(p.to_rep().unwrap(), RepLabel::PiJ { gamma: w("5/2,1/2"), j: 1 });
        // λ_j < 0: unitarily induced principal series.
        let p = AqParam::new(g3, 1, w("-1,0")).unwrap();
        match p.to_rep().unwrap() {
            RepLabel::Ps { mu, nu } => {
                assert_eq!(mu, w("0"));
                assert_eq!(nu.re, 0.5); // n − j_eff − 1/2 with n=2, j_eff=1
                assert_eq!(nu.im, 0.0);
            }
            other => panic!("expected Ps, got {other:?}"),
        }
    }
}
