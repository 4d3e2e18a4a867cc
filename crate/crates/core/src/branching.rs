//! Branching laws for the restriction of irreducible unitary representations
//! of G = Spin(m+1,1) to the subgroup M′A N, described through the finite or
//! discretely-supported set Ψ(π) of M′-types that survive the restriction.
//!
//! All outputs are sorted, duplicate-free lists of exact weight tuples.

use crate::classify::{classify_infl_char, AqParam, CharClass, RepLabel, SignLabel};
use crate::weights::{
    gt_branch, interlaces, spin_series, BranchLevel, GroupTag, HalfInt, InterlaceStyle,
    WeightTuple,
};
use crate::{CoreError, Result};
use std::collections::BTreeMap;

/// A sorted, duplicate-free branching table of M′-types.
pub type BranchTable = Vec<WeightTuple>;

// ---------------------------------------------------------------------------
// Individual families
// ---------------------------------------------------------------------------

/// Restriction of the principal series I(μ, ν): Ψ = all M′-types interlacing μ.
pub fn branch_principal(g: GroupTag, mu: &WeightTuple) -> Result<BranchTable> {
    gt_branch(mu, g, BranchLevel::MToMPrime)
}

/// Restriction of π_j(γ) for a regular integral character with parameters
/// a₁ ≥ … ≥ a_n ≥ 0: the table is
/// { (b₁,…,b_{j−1},0,…,0) : a_k+1 ≥ b_k ≥ a_{k+1}+1 }.
///
/// The zero tail forces the a-parameters to be integral here (the half-odd
/// lattice has no π_j with a nonzero table of this shape).
pub fn branch_pi_j(g: GroupTag, j: usize, a: &WeightTuple) -> Result<BranchTable> {
    let n = g.n();
    if a.rank() != n {
        return Err(CoreError::malformed(format!(
            "expected {n} parameters, got {}",
            a.rank()
        )));
    }
    if j == 0 || j > n - 1 {
        return Err(CoreError::malformed(format!("index j = {j} out of range 1..={}", n - 1)));
    }
    if !a.entries.iter().all(|e| e.is_integer()) {
        return Err(CoreError::domain(format!("parameters must be integral: {a}")));
    }
    let rank = g.rank_m_prime();
    let mut out: Vec<WeightTuple> = vec![WeightTuple::new(vec![HalfInt::ZERO; rank])];
    for k in (0..j - 1).rev() {
        // slot k (0-based): b ∈ [a_{k+1}+1, a_k+1]
        let lo = a.get(k + 1) + HalfInt::ONE;
        let hi = a.get(k) + HalfInt::ONE;
        let mut next = Vec::new();
        for tau in &out {
            let mut b = lo;
            while b <= hi {
                let mut e = tau.entries.clone();
                e[k] = b;
                next.push(WeightTuple::new(e));
                b += HalfInt::ONE;
            }
        }
        out = next;
    }
    out.sort();
    Ok(out)
}

/// Restriction of a discrete series or limit of discrete series (odd m only).
///
/// With uniform parameters a_i = γ_i − (n−i) − 1/2, the table is the chain
/// a₁+1 ≥ b₁ ≥ a₂+1 ≥ … ≥ b_{n−2} ≥ a_{n−1}+1 ≥ ∓b_{n−1} ≥ a_n+1,
/// where the upper sign (−b_{n−1}) belongs to the `+` member of the pair.
pub fn branch_discrete(g: GroupTag, gamma: &WeightTuple, sign: SignLabel) -> Result<BranchTable> {
    if !g.is_odd_m() {
        return Err(CoreError::domain(
            "discrete-family branching requires odd m",
        ));
    }
    let n = g.n();
    let ic = classify_infl_char(g, gamma)?;
    match ic.class {
        CharClass::Lambda0 | CharClass::LambdaN => {}
        _ => {
            return Err(CoreError::domain(format!(
                "no discrete-family member at this character: {gamma}"
            )))
        }
    }
    let v = &ic.gamma;
    let a: Vec<HalfInt> = (0..n)
        .map(|i| v.get(i) - HalfInt::new((n - 1 - i) as i64) - HalfInt::HALF)
        .collect();
    let mut slots: Vec<(HalfInt, HalfInt)> = Vec::with_capacity(n - 1);
    for k in 0..n - 2 {
        slots.push((a[k + 1] + HalfInt::ONE, a[k] + HalfInt::ONE));
    }
    // Final slot: ∓b ∈ [a_n+1, a_{n−1}+1].
    let (lo, hi) = (a[n - 1] + HalfInt::ONE, a[n - 2] + HalfInt::ONE);
    match sign {
        SignLabel::Plus => slots.push((-hi, -lo)),
        SignLabel::Minus => slots.push((lo, hi)),
    }
    let mut out = Vec::new();
    cartesian_unit_steps(&slots, &mut Vec::new(), &mut out);
    out.sort();
    Ok(out)
}

fn cartesian_unit_steps(
    slots: &[(HalfInt, HalfInt)],
    current: &mut Vec<HalfInt>,
    out: &mut Vec<WeightTuple>,
) {
    if current.len() == slots.len() {
        out.push(WeightTuple::new(current.clone()));
        return;
    }
    let (lo, hi) = slots[current.len()];
    let mut b = lo;
    while b <= hi {
        current.push(b);
        cartesian_unit_steps(slots, current, out);
        current.pop();
        b += HalfInt::ONE;
    }
}

/// Restriction of a weakly-fair nonzero A_q(λ): the table is
/// { (b₁,…,b_{j−1},0,…,0) : λ_k+1 ≥ b_k ≥ max(λ_{k+1}+1, 0) }.
pub fn branch_aq(aq: &AqParam) -> Result<BranchTable> {
    let range = aq.range();
    if !range.weakly_fair || !range.nonzero {
        return Err(CoreError::domain(format!(
            "branching needs a weakly fair, nonzero parameter: j={} lambda={}",
            aq.j, aq.lambda
        )));
    }
    let g = aq.g;
    let j = aq.j;
    let rank = g.rank_m_prime();
    let mut out: Vec<WeightTuple> = vec![WeightTuple::new(vec![HalfInt::ZERO; rank])];
    for k in (0..j - 1).rev() {
        let lo_raw = aq.lambda.get(k + 1) + HalfInt::ONE;
        let lo = if lo_raw < HalfInt::ZERO { HalfInt::ZERO } else { lo_raw };
        let hi = aq.lambda.get(k) + HalfInt::ONE;
        let mut next = Vec::new();
        for tau in &out {
            let mut b = lo;
            while b <= hi {
                let mut e = tau.entries.clone();
                e[k] = b;
                next.push(WeightTuple::new(e));
                b += HalfInt::ONE;
            }
        }
        out = next;
    }
    out.sort();
    Ok(out)
}

// ---------------------------------------------------------------------------
// Ψ for an arbitrary labelled representation
// ---------------------------------------------------------------------------

/// The branching set Ψ(π) of M′-types of the restriction of π to M′AN.
///
/// π₀ (finite-dimensional) restricts without M′-discrete support, so
/// Ψ(π₀) = ∅.  For π_j the sets are generated by the telescoping identity
/// Ψ(π_i) ⊎ Ψ(π_{i+1}) = (interlacing set of μ_i), where
/// μ_i = (a₁+1,…,a_i+1, a_{i+2},…,a_n).  Discrete pairs and principal series
/// use their direct chain descriptions.
pub fn psi(g: GroupTag, rep: &RepLabel) -> Result<BranchTable> {
    match rep {
        RepLabel::FinDim { .. } => Ok(vec![]),
        RepLabel::Ps { mu, .. } => branch_principal(g, mu),
        RepLabel::Ds { gamma, sign, .. } => branch_discrete(g, gamma, *sign),
        RepLabel::PiJ { gamma, j } => {
            let a = regular_a_params(g, gamma)?;
            psi_pi_chain(g, &a, *j)
        }
    }
}

fn regular_a_params(g: GroupTag, gamma: &WeightTuple) -> Result<WeightTuple> {
    let ic = classify_infl_char(g, gamma)?;
    ic.a_params.ok_or_else(|| {
        CoreError::domain(format!("{gamma} is not a regular integral character"))
    })
}

/// The interlacing generator μ_i = (a₁+1,…,a_i+1, a_{i+2},…,a_n) of the
/// telescoping recursion (an M-weight of rank n−1).
pub fn psi_generator(g: GroupTag, a: &WeightTuple, i: usize) -> Result<WeightTuple> {
    let n = g.n();
    if a.rank() != n || i >= n {
        return Err(CoreError::malformed(format!("bad generator index {i} for {a}")));
    }
    let mut mu = Vec::with_capacity(n - 1);
    for k in 0..i {
        mu.push(a.get(k) + HalfInt::ONE);
    }
    for k in i + 1..n {
        mu.push(a.get(k));
    }
    Ok(WeightTuple::new(mu))
}

/// Run the telescoping recursion up to level j and return Ψ(π_j).
fn psi_pi_chain(g: GroupTag, a: &WeightTuple, j: usize) -> Result<BranchTable> {
    let n = g.n();
    if j == 0 || j > n - 1 {
        return Err(CoreError::malformed(format!("index j = {j} out of range 1..={}", n - 1)));
    }
    let mut s: BTreeMap<WeightTuple, i64> = BTreeMap::new();
    for i in 0..j {
        let mu_i = psi_generator(g, a, i)?;
        let full = gt_branch(&mu_i, g, BranchLevel::MToMPrime)?;
        // S_{i+1} = full − S_i as signed multisets.
        let mut next: BTreeMap<WeightTuple, i64> = BTreeMap::new();
        for t in full {
            *next.entry(t).or_insert(0) += 1;
        }
        for (t, c) in s {
            *next.entry(t).or_insert(0) -= c;
        }
        next.retain(|_, c| *c != 0);
        if next.values().any(|c| *c < 0 || *c > 1) {
            return Err(CoreError::numerical(format!(
                "telescoping recursion left a non-0/1 multiplicity at level {}",
                i + 1
            )));
        }
        s = next;
    }
    Ok(s.into_keys().collect())
}

// ---------------------------------------------------------------------------
// K-type comparison (the φ transfer check)
// ---------------------------------------------------------------------------

/// The transfer φ of an M′-type b to K-types: the ladder
/// (k+b₁, b₁, …, b_{n′−2}, ±b_{n′−1}) for k ≥ 0, with the last entry negated
/// for odd m.  Only members with first entry ≤ `cutoff` are produced.
fn phi_ladder(g: GroupTag, tau: &WeightTuple, cutoff: HalfInt) -> Vec<WeightTuple> {
    let b = &tau.entries;
    let b1 = if b.is_empty() { HalfInt::ZERO } else { b[0] };
    let mut tail: Vec<HalfInt> = b.clone();
    if g.is_odd_m() {
        if let Some(last) = tail.last_mut() {
            *last = -*last;
        }
    }
    let mut out = Vec::new();
    let mut top = b1;
    while top <= cutoff {
        if top >= HalfInt::ZERO {
            let mut e = Vec::with_capacity(tail.len() + 1);
            e.push(top);
            e.extend_from_slice(&tail);
            out.push(WeightTuple::new(e));
        }
        top += HalfInt::ONE;
    }
    out
}

/// Check, in the stable window cutoff/2 ≤ λ₁ ≤ cutoff, that the φ-transfer of
/// the branching set of I(μ,ν) reproduces its K-type support: every dominant
/// K-weight λ in the window appears in φ(Ψ) exactly when λ interlaces μ.
pub fn phi_ktype_check(g: GroupTag, mu: &WeightTuple, cutoff: i64) -> Result<bool> {
    let cutoff = HalfInt::new(cutoff);
    let half_cut = HalfInt::from_twice(cutoff.twice() / 2);
    let taus = branch_principal(g, mu)?;

    // Left side: accumulate φ(τ) over the branching set.
    let mut lhs: BTreeMap<WeightTuple, i64> = BTreeMap::new();
    for tau in &taus {
        for lam in phi_ladder(g, tau, cutoff) {
            if lam.get(0) >= half_cut {
                *lhs.entry(lam).or_insert(0) += 1;
            }
        }
    }

    // Right side: dominant K-weights in the window with multiplicity
    // 1 iff μ interlaces λ one level down the compact chain.
    let k_spin = g.m() + 1;
    let k_series = spin_series(k_spin);
    let style = InterlaceStyle::k_to_m(g);
    let mut rhs: BTreeMap<WeightTuple, i64> = BTreeMap::new();
    let anchor = if mu.rank() == 0 { HalfInt::ZERO } else { mu.get(0) };
    let mut lam1 = half_cut;
    if !lam1.same_parity(anchor) {
        lam1 += HalfInt::HALF;
    }
    while lam1 <= cutoff {
        let mut stack: Vec<Vec<HalfInt>> = vec![vec![lam1]];
        let rank = g.n_prime();
        for _ in 1..rank {
            let mut next = Vec::new();
            for partial in &stack {
                let hi = *partial.last().unwrap();
                let is_last = partial.len() + 1 == rank;
                let lo = if is_last && k_series == crate::weights::Series::D { -hi } else { HalfInt::ZERO };
                let mut v = lo;
                // Step within the anchor coset.
                if !v.same_parity(anchor) {
                    v += HalfInt::HALF;
                }
                while v <= hi {
                    let mut e = partial.clone();
                    e.push(v);
                    next.push(e);
                    v += HalfInt::ONE;
                }
            }
            stack = next;
        }
        for e in stack {
            let lam = WeightTuple::new(e);
            if lam.is_dominant(k_series) && interlaces(&lam, mu, style)? {
                rhs.insert(lam, 1);
            }
        }
        lam1 += HalfInt::ONE;
    }

    Ok(lhs == rhs)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
