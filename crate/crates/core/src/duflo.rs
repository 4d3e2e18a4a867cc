//! Orbit-method dictionaries: the coadjoint orbit attached to a unitary
//! representation, the P-orbit attached to a restriction constituent, and
//! the verification that branching matches the moment-map decomposition.
//!
//! For a tempered representation π the attached G-orbit is built from its
//! Harish-Chandra parameter; each constituent τ of π|_P is assigned the
//! depth-one P-orbit with
//!     x_k = b_k + ρ_{M',k}   (head slots),
//! and the claim checked here is that τ ↦ orbit is a bijection from the
//! constituent set onto the depth-one P-orbits inside the moment image of
//! the G-orbit.  All comparisons are exact: every endpoint and every x_k is
//! a half-integer, represented without rounding in an f64.

use serde::{Deserialize, Serialize};

use crate::branching::{branch_aq, branch_discrete, branch_principal, BranchTable};
use crate::classify::{AqParam, RepLabel, SignLabel};
use crate::error::CoreError;
use crate::orbits::{moment_image, MomentImage, OrbitParam, PfRule, PfSign, POrbitDescriptor};
use crate::weights::{GroupTag, HalfInt, WeightTuple};
use crate::Result;

/// Which dictionary a verification run exercises.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub enum DufloCase {
    /// A tempered unitary representation (discrete series or limit, or a
    /// unitary principal series with imaginary ν).
    Tempered(RepLabel),
    /// A cohomologically induced module A_q(λ).
    Aq(AqParam),
}

/// How a constituent label τ is turned into a P-orbit.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum PrepMode {
    /// The tempered dictionary: ρ_{M'}-shift on the head slots, the last
    /// slot (odd m) carrying |b| with the Pfaffian sign of b.
    Tempered,
    /// The A_q dictionary with parabolic index j: ρ_{M'}-shift on the first
    /// j−1 slots, zero tail, Pfaffian zero.
    Aq { j: usize },
}

/// The coadjoint G-orbit attached to a tempered representation.
///
/// Discrete series with parameter γ map to the elliptic orbit through
/// (γ₁,…,γ_{n−1}, σγ_n) with σ = (−1)^n for the `+` member and (−1)^{n−1}
/// for `−`; their limits map to the non-semisimple orbit over
/// (γ₁,…,γ_{n−1}) with the matching sign; a unitary principal series
/// I(μ, iν) maps to the split orbit with rotation part μ + ρ_M and boost ν.
pub fn orbit_of_tempered(g: GroupTag, rep: &RepLabel) -> Result<OrbitParam> {
    let n = g.n();
    match rep {
        RepLabel::Ds { gamma, sign, limit } => {
            if !g.is_odd_m() {
                return Err(CoreError::domain("discrete series need odd m"));
            }
            if gamma.rank() != n {
                return Err(CoreError::malformed(format!(
                    "gamma must have {n} entries, got {}",
                    gamma.rank()
                )));
            }
            let sigma_plus = n % 2 == 0;
            let plus_orbit = match sign {
                SignLabel::Plus => sigma_plus,
                SignLabel::Minus => !sigma_plus,
            };
            if *limit {
                let a: Vec<f64> = gamma.entries[..n - 1].iter().map(|e| e.to_f64()).collect();
                OrbitParam::new(
                    g,
                    crate::orbits::OrbitKind::NonSemisimple(plus_orbit),
                    a,
                )
            } else {
                let mut a: Vec<f64> = gamma.entries[..n - 1].iter().map(|e| e.to_f64()).collect();
                let last = gamma.entries[n - 1].to_f64();
                a.push(if plus_orbit { last } else { -last });
                OrbitParam::elliptic(g, a)
            }
        }
        RepLabel::Ps { mu, nu } => {
            if !nu.is_imaginary() {
                return Err(CoreError::domain(
                    "only the unitary principal series (imaginary nu) is tempered",
                ));
            }
            if mu.rank() != n - 1 {
                return Err(CoreError::malformed(format!(
                    "mu must have {} entries, got {}",
                    n - 1,
                    mu.rank()
                )));
            }
            let mut a: Vec<f64> = (0..n - 1)
                .map(|k| mu.entries[k].to_f64() + rho_m_shift(g, k))
                .collect();
            if !g.is_odd_m() {
                // The last M-slot is signed; the rotation entry keeps it.
                a[n - 2] = mu.entries[n - 2].to_f64()
                    + mu.entries[n - 2].signum() as f64 * rho_m_shift(g, n - 2);
            }
            a.push(nu.im.abs());
            OrbitParam::semisimple(g, a)
        }
        _ => Err(CoreError::domain(format!("{rep} is not tempered"))),
    }
}

/// The coadjoint G-orbit attached to A_q(λ): the singular elliptic-type
/// orbit with rotation entries λ_k + m/2 − k + 1 for k ≤ j, zero beyond,
/// and zero boost.
pub fn orbit_of_aq(aq: &AqParam) -> Result<OrbitParam> {
    let g = aq.g;
    let n = g.n();
    let half_m = g.m() as f64 / 2.0;
    let mut a: Vec<f64> = Vec::with_capacity(n);
    for k in 0..n - 1 {
        if k < aq.j {
            a.push(aq.lambda.entries[k].to_f64() + half_m - k as f64);
        } else {
            a.push(0.0);
        }
    }
    a.push(0.0);
    OrbitParam::semisimple(g, a)
}

/// k-th entry of ρ_M (0-based): n − k − 3/2 for odd m, n − k − 2 for even m.
fn rho_m_shift(g: GroupTag, k: usize) -> f64 {
    if g.is_odd_m() {
        g.n() as f64 - k as f64 - 1.5
    } else {
        g.n() as f64 - k as f64 - 2.0
    }
}

/// k-th entry of ρ_{M'} (0-based): n − k − 2 for odd m, n − k − 5/2 for
/// even m.
fn rho_m_prime_shift(g: GroupTag, k: usize) -> f64 {
    if g.is_odd_m() {
        g.n() as f64 - k as f64 - 2.0
    } else {
        g.n() as f64 - k as f64 - 2.5
    }
}

/// The depth-one P-orbit attached to a constituent label τ.
///
/// Tempered mode, odd m: x_k = b_k + n − 1 − k (k < r), x_r = |b_r|, with
/// Pfaffian sign sgn((−1)^{n−1} b_r); even m: x_k = b_k + n − k − 3/2 and
/// Pfaffian 0.  A_q mode: x_k = b_k + ρ_{M',k} on the first j−1 slots, zero
/// tail (τ must vanish there), Pfaffian 0.
pub fn orbit_of_prep(g: GroupTag, tau: &WeightTuple, mode: PrepMode) -> Result<POrbitDescriptor> {
    let r = g.rank_m_prime();
    if tau.rank() != r {
        return Err(CoreError::malformed(format!(
            "tau must have {r} entries, got {}",
            tau.rank()
        )));
    }
    let head = if g.is_odd_m() { r - 1 } else { r };
    if !tau.entries[..head].windows(2).all(|w| w[0] >= w[1])
        || tau.entries[..head].iter().any(|e| e.twice() < 0)
        || (g.is_odd_m() && r >= 2 && tau.entries[r - 2] < tau.entries[r - 1].abs())
    {
        return Err(CoreError::malformed(format!("tau is not dominant: {tau}")));
    }
    let b: Vec<f64> = tau.to_f64_vec();
    match mode {
        PrepMode::Tempered => {
            let mut x: Vec<f64> = (0..head).map(|k| b[k] + rho_m_prime_shift(g, k)).collect();
            let pf_sign = if g.is_odd_m() {
                let last = b[r - 1];
                x.push(last.abs());
                let signed = if g.n() % 2 == 1 { last } else { -last };
                PfSign::of(signed, 0.0)
            } else {
                PfSign::Zero
            };
            Ok(POrbitDescriptor { depth: 1, x, pf_sign, depth0_label: None, signed_last: None })
        }
        PrepMode::Aq { j } => {
            if tau.entries[j.saturating_sub(1)..].iter().any(|e| !e.is_zero()) {
                return Err(CoreError::domain(format!(
                    "tau must vanish from slot {j} in A_q mode: {tau}"
                )));
            }
            let x: Vec<f64> = (0..r)
                .map(|k| if k < j - 1 { b[k] + rho_m_prime_shift(g, k) } else { 0.0 })
                .collect();
            Ok(POrbitDescriptor {
                depth: 1,
                x,
                pf_sign: PfSign::Zero,
                depth0_label: None,
                signed_last: None,
            })
        }
    }
}

/// Exact membership of a depth-one descriptor in a moment image: closed or
/// half-open interval bounds and the Pfaffian rule, with no tolerance (all
/// quantities are half-integers, exact in f64).
fn in_image_exact(img: &MomentImage, d: &POrbitDescriptor) -> bool {
    if d.depth != 1 || d.x.len() != img.interval_product.len() {
        return false;
    }
    for (v, iv) in d.x.iter().zip(&img.interval_product) {
        let lo_ok = if iv.lo_open { *v > iv.lo } else { *v >= iv.lo };
        if !lo_ok || *v > iv.hi {
            return false;
        }
    }
    match img.pf_rule {
        PfRule::Both => true,
        PfRule::Fixed(s) => d.pf_sign == s,
    }
}

/// Outcome of one dictionary verification.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct DufloReport {
    pub case: DufloCase,
    /// The attached coadjoint G-orbit.
    pub orbit: OrbitParam,
    /// Constituents of the restriction to P, from the branching laws.
    pub branch_set: Vec<WeightTuple>,
    /// Labels whose attached P-orbit lies in the moment image.
    pub orbit_set: Vec<WeightTuple>,
    /// The P-orbit descriptors of `orbit_set`, in the same order.
    pub descriptors: Vec<POrbitDescriptor>,
    pub matched: bool,
    /// Symmetric difference of `branch_set` and `orbit_set`.
    pub mismatches: Vec<WeightTuple>,
}

/// Enumerate the dominant candidate labels with entries bounded by `bound`
/// and the parity of `frac` (twice-value parity); in A_q mode only the
/// first j−1 slots vary and the tail is zero.
fn enumerate_candidates(
    g: GroupTag,
    frac_twice: i64,
    bound: HalfInt,
    mode: PrepMode,
) -> Vec<WeightTuple> {
    let r = g.rank_m_prime();
    let signed_last = g.is_odd_m() && matches!(mode, PrepMode::Tempered);
    let free_upto = match mode {
        PrepMode::Tempered => r,
        PrepMode::Aq { j } => j - 1,
    };
    let aligned_below = |hi: i64| -> i64 { hi - (hi - frac_twice).rem_euclid(2) };
    let mut out = Vec::new();
    let mut cur: Vec<HalfInt> = Vec::with_capacity(r);
    fn rec(
        cur: &mut Vec<HalfInt>,
        out: &mut Vec<WeightTuple>,
        r: usize,
        free_upto: usize,
        signed_last: bool,
        frac_twice: i64,
        prev_twice: i64,
        aligned_below: &dyn Fn(i64) -> i64,
    ) {
        let i = cur.len();
        if i == r {
            out.push(WeightTuple::new(cur.clone()));
            return;
        }
        if i >= free_upto {
            // Fixed zero tail (and zero needs the right parity).
            if frac_twice.rem_euclid(2) == 0 && prev_twice >= 0 {
                cur.push(HalfInt::ZERO);
                rec(cur, out, r, free_upto, signed_last, frac_twice, 0, aligned_below);
                cur.pop();
            }
            return;
        }
        let hi = aligned_below(prev_twice);
        let lo = if signed_last && i == r - 1 { -hi } else { 0 };
        let mut t = hi;
        while t >= lo {
            cur.push(HalfInt::from_twice(t));
            rec(cur, out, r, free_upto, signed_last, frac_twice, t.abs(), aligned_below);
            cur.pop();
            t -= 2;
        }
    }
    rec(&mut cur, &mut out, r, free_upto, signed_last, frac_twice, bound.twice(), &aligned_below);
    out
}

/// Verify one instance of the orbit dictionary: compute the branching
/// constituents, attach a P-orbit to every admissible candidate label up to
/// `bound`, and compare the set landing in the moment image of the attached
/// G-orbit with the branching set.
pub fn verify_duflo(g: GroupTag, case: &DufloCase, bound: HalfInt) -> Result<DufloReport> {
    let (branch, orbit, mode): (BranchTable, OrbitParam, PrepMode) = match case {
        DufloCase::Tempered(rep) => {
            let table = match rep {
                RepLabel::Ds { gamma, sign, .. } => branch_discrete(g, gamma, *sign)?,
                RepLabel::Ps { mu, .. } => branch_principal(g, mu)?,
                _ => return Err(CoreError::domain(format!("{rep} is not tempered"))),
            };
            (table, orbit_of_tempered(g, rep)?, PrepMode::Tempered)
        }
        DufloCase::Aq(aq) => (branch_aq(aq)?, orbit_of_aq(aq)?, PrepMode::Aq { j: aq.j }),
    };
    let mut branch_set: Vec<WeightTuple> = branch.clone();
    branch_set.sort();
    branch_set.dedup();
    if branch_set.len() != branch.len() {
        return Err(CoreError::numerical("branching constituents are not multiplicity-free"));
    }
    if branch_set.is_empty() {
        return Err(CoreError::domain("empty branching set"));
    }
    let max_entry = branch_set
        .iter()
        .flat_map(|t| t.entries.iter())
        .map(|e| e.abs())
        .max()
        .unwrap_or(HalfInt::ZERO);
    if max_entry > bound {
        return Err(CoreError::domain(format!(
            "candidate bound {bound} is smaller than the largest branching entry {max_entry}"
        )));
    }
    let frac_twice = branch_set[0].entries.first().map_or(0, |e| e.twice().rem_euclid(2));
    let img = moment_image(&orbit)?;
    let mut members: Vec<(WeightTuple, POrbitDescriptor)> = Vec::new();
    for tau in enumerate_candidates(g, frac_twice, bound, mode) {
        let d = match orbit_of_prep(g, &tau, mode) {
            Ok(d) => d,
            Err(_) => continue,
        };
        if in_image_exact(&img, &d) {
            members.push((tau, d));
        }
    }
    members.sort_by(|a, b| a.0.cmp(&b.0));
    let (orbit_set, descriptors): (Vec<WeightTuple>, Vec<POrbitDescriptor>) =
        members.into_iter().unzip();
    let mut mismatches: Vec<WeightTuple> = Vec::new();
    for t in &branch_set {
        if !orbit_set.contains(t) {
            mismatches.push(t.clone());
        }
    }
    for t in &orbit_set {
        if !branch_set.contains(t) {
            mismatches.push(t.clone());
        }
    }
    let matched = mismatches.is_empty();
    Ok(DufloReport {
        case: case.clone(),
        orbit,
        branch_set,
        orbit_set,
        descriptors,
        matched,
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::NuParam;
    use crate::orbits::OrbitKind;
    use crate::weights::rho;

    fn wt(entries: &[i64]) -> WeightTuple {
        WeightTuple::new(entries.iter().map(|&k| HalfInt::new(k)).collect())
    }

    fn wt2(twices: &[i64]) -> WeightTuple {
        WeightTuple::new(twices.iter().map(|&t| HalfInt::from_twice(t)).collect())
    }

    #[test]
    fn tempered_orbits() {
        let g = GroupTag::new(3).unwrap();
        let gamma = rho(g);
        let plus = RepLabel::Ds { gamma: gamma.clone(), sign: SignLabel::Plus, limit: false };
        let o = orbit_of_tempered(g, &plus).unwrap();
        assert_eq!(o.kind, OrbitKind::EllipticRegular);
        assert_eq!(o.a, vec![1.5, 0.5]);
        let minus = RepLabel::Ds { gamma, sign: SignLabel::Minus, limit: false };
        let o = orbit_of_tempered(g, &minus).unwrap();
        assert_eq!(o.a, vec![1.5, -0.5]);

        let lim = RepLabel::Ds { gamma: wt(&[1, 0]), sign: SignLabel::Plus, limit: true };
        let o = orbit_of_tempered(g, &lim).unwrap();
        assert_eq!(o.kind, OrbitKind::NonSemisimple(true));
        assert_eq!(o.a, vec![1.0]);

        let ps = RepLabel::Ps { mu: wt(&[1]), nu: NuParam::imaginary(2.0) };
        let o = orbit_of_tempered(g, &ps).unwrap();
        assert_eq!(o.kind, OrbitKind::NonElliptic);
        assert_eq!(o.a, vec![1.5, 2.0]);

        // Non-tempered inputs are rejected.
        let fd = RepLabel::FinDim { gamma: rho(g) };
        assert!(orbit_of_tempered(g, &fd).is_err());
        let real_ps = RepLabel::Ps { mu: wt(&[1]), nu: NuParam::real(0.5) };
        assert!(orbit_of_tempered(g, &real_ps).is_err());
    }

    #[test]
    fn prep_orbits() {
        let g3 = GroupTag::new(3).unwrap();
        let d = orbit_of_prep(g3, &wt(&[1]), PrepMode::Tempered).unwrap();
        assert_eq!(d.x, vec![1.0]);
        assert_eq!(d.pf_sign, PfSign::Minus);

        let g5 = GroupTag::new(5).unwrap();
        let d = orbit_of_prep(g5, &wt(&[2, 1]), PrepMode::Tempered).unwrap();
        assert_eq!(d.x, vec![3.0, 1.0]);
        assert_eq!(d.pf_sign, PfSign::Plus);

        let d = orbit_of_prep(g5, &wt(&[0, 0]), PrepMode::Tempered).unwrap();
        assert_eq!(d.x, vec![1.0, 0.0]);
        assert_eq!(d.pf_sign, PfSign::Zero);

        let d = orbit_of_prep(g5, &wt(&[1, 0]), PrepMode::Aq { j: 2 }).unwrap();
        assert_eq!(d.x, vec![2.0, 0.0]);
        assert_eq!(d.pf_sign, PfSign::Zero);
        assert!(orbit_of_prep(g5, &wt(&[1, 1]), PrepMode::Aq { j: 2 }).is_err());
    }

    #[test]
    fn verify_discrete_series() {
        let g = GroupTag::new(3).unwrap();
        let rep = RepLabel::Ds { gamma: rho(g), sign: SignLabel::Minus, limit: false };
        let report =
            verify_duflo(g, &DufloCase::Tempered(rep), HalfInt::new(5)).unwrap();
        assert!(report.matched, "mismatches: {:?}", report.mismatches);
        assert_eq!(report.branch_set, vec![wt(&[1])]);
        assert_eq!(report.orbit_set, vec![wt(&[1])]);
    }

    #[test]
    fn verify_limits_of_discrete_series() {
        let g = GroupTag::new(3).unwrap();
        for sign in [SignLabel::Plus, SignLabel::Minus] {
            let rep = RepLabel::Ds { gamma: wt(&[1, 0]), sign, limit: true };
            let report =
                verify_duflo(g, &DufloCase::Tempered(rep), HalfInt::new(5)).unwrap();
            assert!(report.matched, "{sign:?} mismatches: {:?}", report.mismatches);
            let expected = if sign == SignLabel::Plus { wt2(&[-1]) } else { wt2(&[1]) };
            assert_eq!(report.branch_set, vec![expected]);
        }
    }

    #[test]
    fn verify_principal_series() {
        let g = GroupTag::new(3).unwrap();
        let rep = RepLabel::Ps { mu: wt(&[1]), nu: NuParam::imaginary(2.0) };
        let report =
            verify_duflo(g, &DufloCase::Tempered(rep), HalfInt::new(5)).unwrap();
        assert!(report.matched, "mismatches: {:?}", report.mismatches);
        assert_eq!(report.orbit_set, vec![wt(&[-1]), wt(&[0]), wt(&[1])]);

        // Even m.
        let g4 = GroupTag::new(4).unwrap();
        let rep = RepLabel::Ps { mu: wt(&[1, 0]), nu: NuParam::imaginary(1.0) };
        let report =
            verify_duflo(g4, &DufloCase::Tempered(rep), HalfInt::new(5)).unwrap();
        assert!(report.matched, "mismatches: {:?}", report.mismatches);
        assert_eq!(report.orbit_set, vec![wt(&[0]), wt(&[1])]);
    }

    #[test]
    fn verify_aq() {
        let g5 = GroupTag::new(5).unwrap();
        let aq = AqParam::new(g5, 2, wt(&[1, 0, 0])).unwrap();
        let report = verify_duflo(g5, &DufloCase::Aq(aq), HalfInt::new(5)).unwrap();
        assert!(report.matched, "mismatches: {:?}", report.mismatches);
        assert_eq!(report.orbit_set, vec![wt(&[1, 0]), wt(&[2, 0])]);
        assert_eq!(report.orbit.a, vec![3.5, 1.5, 0.0]);

        // Even m, and the j = 1 edge where only the zero label remains.
        let g4 = GroupTag::new(4).unwrap();
        let aq = AqParam::new(g4, 2, wt(&[1, 0, 0])).unwrap();
        let report = verify_duflo(g4, &DufloCase::Aq(aq), HalfInt::new(5)).unwrap();
        assert!(report.matched, "mismatches: {:?}", report.mismatches);
        assert_eq!(report.orbit_set, vec![wt(&[1]), wt(&[2])]);

        let aq = AqParam::new(g4, 1, wt(&[2, 0, 0])).unwrap();
        let report = verify_duflo(g4, &DufloCase::Aq(aq), HalfInt::new(5)).unwrap();
        assert!(report.matched, "mismatches: {:?}", report.mismatches);
        assert_eq!(report.orbit_set, vec![wt(&[0])]);
    }

    #[test]
    fn bound_too_small_is_an_error() {
        let g = GroupTag::new(3).unwrap();
        let rep = RepLabel::Ps { mu: wt(&[3]), nu: NuParam::imaginary(1.0) };
        assert!(verify_duflo(g, &DufloCase::Tempered(rep), HalfInt::new(2)).is_err());
    }
}
