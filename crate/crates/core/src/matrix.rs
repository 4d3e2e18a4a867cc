//! The (m+2)×(m+2) matrix model of so(m+1,1): builders for the standard
//! nilpotent and semisimple elements, the degree-two exponentials, the
//! projection onto the P-relevant block data (Y, β, a), canonical forms of
//! P-coadjoint functionals, Pfaffians, and singular values.
//!
//! This module is the independent numeric oracle for the closed-form orbit
//! machinery: everything here works with dense float matrices and generic
//! eigensolvers, never with the closed formulas being verified.

use crate::orbits::{PfSign, POrbitDescriptor};
use crate::{CoreError, Result};
use nalgebra::{DMatrix, DVector};

/// Structural validation tolerance.
pub const STRUCT_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// The standard split generator H₀: zeros except (m,m+1) = (m+1,m) = 1
/// (0-based), i.e. the symmetric unit pair in the last two coordinates.
pub fn h0(m: usize) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(m + 2, m + 2);
    h[(m, m + 1)] = 1.0;
    h[(m + 1, m)] = 1.0;
    h
}

/// The 2×2 rotation generator H′ = [[0,1],[−1,0]] placed at rows/cols
/// (i, i+1) of an N×N matrix, scaled by c.
fn place_hprime(mat: &mut DMatrix<f64>, i: usize, c: f64) {
    mat[(i, i + 1)] = c;
    mat[(i + 1, i)] = -c;
}

/// Nilpotent X_α: block pattern with −αᵗ / αᵗ in the last two columns and α
/// in each of the last two rows.
pub fn x_alpha(alpha: &DVector<f64>) -> DMatrix<f64> {
    let m = alpha.len();
    let mut x = DMatrix::zeros(m + 2, m + 2);
    for i in 0..m {
        x[(i, m)] = -alpha[i];
        x[(i, m + 1)] = alpha[i];
        x[(m, i)] = alpha[i];
        x[(m + 1, i)] = alpha[i];
    }
    x
}

/// Opposite nilpotent X̄_α: αᵗ in both of the last two columns, −α and α in
/// the last two rows.
pub fn xbar_alpha(alpha: &DVector<f64>) -> DMatrix<f64> {
    let m = alpha.len();
    let mut x = DMatrix::zeros(m + 2, m + 2);
    for i in 0..m {
        x[(i, m)] = alpha[i];
        x[(i, m + 1)] = alpha[i];
        x[(m, i)] = -alpha[i];
        x[(m + 1, i)] = alpha[i];
    }
    x
}

/// exp of a square-nilpotent element: I + X + ½X² (exact for X³ = 0).
fn exp_nilpotent(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    DMatrix::identity(n, n) + x + (x * x).scale(0.5)
}

/// n̄_α = exp X̄_α.
pub fn nbar(alpha: &DVector<f64>) -> DMatrix<f64> {
    exp_nilpotent(&xbar_alpha(alpha))
}

/// n_x = exp X_x.
pub fn n_exp(x: &DVector<f64>) -> DMatrix<f64> {
    exp_nilpotent(&x_alpha(x))
}

/// exp(tH₀) = I + sinh(t)·H₀ + (cosh(t)−1)·H₀².
pub fn exp_th0(t: f64, m: usize) -> DMatrix<f64> {
    let mut e = DMatrix::identity(m + 2, m + 2);
    e[(m, m)] = t.cosh();
    e[(m + 1, m + 1)] = t.cosh();
    e[(m, m + 1)] = t.sinh();
    e[(m + 1, m)] = t.sinh();
    e
}

/// The reflection s = diag{I_m, −1, 1}.
pub fn s_mat(m: usize) -> DMatrix<f64> {
    let mut s = DMatrix::identity(m + 2, m + 2);
    s[(m, m)] = -1.0;
    s
}

/// r_x = I_m − (2/|x|²) xᵗx  (an m×m reflection; x ≠ 0).
pub fn r_x(x: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n2 = x.norm_squared();
    if n2 == 0.0 {
        return Err(CoreError::domain("r_x needs x != 0"));
    }
    let m = x.len();
    Ok(DMatrix::identity(m, m) - (x * x.transpose()).scale(2.0 / n2))
}

/// Embed an m×m block as diag{A, 1, 1}.
pub fn embed_m_block(a: &DMatrix<f64>) -> DMatrix<f64> {
    let m = a.nrows();
    let mut e = DMatrix::identity(m + 2, m + 2);
    e.view_mut((0, 0), (m, m)).copy_from(a);
    e
}

/// r′_x = diag{I_{m+1} − 2yᵗy/|y|², 1} with y = (x, 1).
pub fn r_prime_x(x: &DVector<f64>) -> DMatrix<f64> {
    let m = x.len();
    let mut y = DVector::zeros(m + 1);
    y.rows_mut(0, m).copy_from(x);
    y[m] = 1.0;
    let n2 = y.norm_squared();
    let mut e = DMatrix::identity(m + 2, m + 2);
    e.view_mut((0, 0), (m + 1, m + 1))
        .copy_from(&(DMatrix::identity(m + 1, m + 1) - (&y * y.transpose()).scale(2.0 / n2)));
    e
}

/// s_x = s · r′_x, the compact factor in the opposite Iwasawa decomposition
/// of n_x.
pub fn s_x(x: &DVector<f64>) -> DMatrix<f64> {
    s_mat(x.len()) * r_prime_x(x)
}

/// Block-diagonal semisimple element diag{a₁H′, …, a_kH′, 0…} of the given
/// total size, with the remaining diagonal slots zero.
pub fn t_blocks(a: &[f64], size: usize) -> Result<DMatrix<f64>> {
    if 2 * a.len() > size {
        return Err(CoreError::malformed("too many rotation blocks for the size"));
    }
    let mut t = DMatrix::zeros(size, size);
    for (k, &c) in a.iter().enumerate() {
        place_hprime(&mut t, 2 * k, c);
    }
    Ok(t)
}

/// Elliptic element t_a = diag{a₁H′,…,a_nH′,0} (odd m, so m+2 = 2n+1).
pub fn t_vec(a: &[f64], m: usize) -> Result<DMatrix<f64>> {
    if m % 2 != 1 || a.len() != (m + 1) / 2 {
        return Err(CoreError::malformed(format!(
            "elliptic element needs odd m and {} entries",
            (m + 1) / 2
        )));
    }
    t_blocks(a, m + 2)
}

/// Semisimple element t′_a with a split last block:
/// odd m: diag{a₁H′,…,a_{n−1}H′,0} ⊕ a_n·H on the last two coordinates;
/// even m: diag{a₁H′,…,a_{n−1}H′} ⊕ a_n·H.
pub fn tprime_vec(a: &[f64], m: usize) -> Result<DMatrix<f64>> {
    let n = (m + 2) / 2;
    if a.len() != n {
        return Err(CoreError::malformed(format!("split element needs {n} entries")));
    }
    let mut t = t_blocks(&a[..n - 1], m + 2)?;
    t += h0(m).scale(a[n - 1]);
    Ok(t)
}

/// Non-semisimple element s_a = diag{a₁H′,…,a_{n−1}H′,0,0,0} ± X̄_{e_m}
/// (odd m).
pub fn s_a_vec(a: &[f64], sign_plus: bool, m: usize) -> Result<DMatrix<f64>> {
    if m % 2 != 1 || a.len() != (m + 1) / 2 - 1 {
        return Err(CoreError::malformed(format!(
            "non-semisimple element needs odd m and {} rotation entries",
            (m + 1) / 2 - 1
        )));
    }
    let mut t = t_blocks(a, m + 2)?;
    let mut e = DVector::zeros(m);
    e[m - 1] = if sign_plus { 1.0 } else { -1.0 };
    t += xbar_alpha(&e);
    Ok(t)
}

// ---------------------------------------------------------------------------
// PStdForm and the projection
// ---------------------------------------------------------------------------

/// The block data (Y, β, a) presenting a functional on 𝔭 ≅ 𝔤/𝔫: Y is a skew
/// m×m block, β a length-m vector, a a scalar.  The functional is canonical
/// iff a = 0 and Y·βᵗ = 0.
#[derive(Clone, Debug)]
pub struct PStdForm {
    pub y: DMatrix<f64>,
    pub beta: DVector<f64>,
    pub a: f64,
}

impl PStdForm {
    pub fn new(y: DMatrix<f64>, beta: DVector<f64>, a: f64) -> Result<Self> {
        let m = beta.len();
        if y.nrows() != m || y.ncols() != m {
            return Err(CoreError::malformed("Y must be m×m matching beta"));
        }
        if (&y + y.transpose()).norm() > STRUCT_TOL * (1.0 + y.norm()) {
            return Err(CoreError::malformed("Y must be skew-symmetric"));
        }
        Ok(PStdForm { y, beta, a })
    }

    pub fn m(&self) -> usize {
        self.beta.len()
    }

    /// The matrix X_{Y,β,a} = diag{Y,0,0} + X̄_β + a·H₀.
    pub fn embed(&self) -> DMatrix<f64> {
        let m = self.m();
        let mut x = DMatrix::zeros(m + 2, m + 2);
        x.view_mut((0, 0), (m, m)).copy_from(&self.y);
        x += xbar_alpha(&self.beta);
        x += h0(m).scale(self.a);
        x
    }

    pub fn is_canonical(&self, tol: f64) -> bool {
        let scale = 1.0 + self.y.norm() + self.beta.norm();
        self.a.abs() <= tol * scale && (&self.y * &self.beta).norm() <= tol * scale
    }
}

/// Project an element of 𝔤 onto its (Y, β, a) data: Y is the leading m×m
/// block, β averages the two bottom rows, a is the (m, m+1) entry.  The
/// nilpotent part X_α is exactly the kernel.
pub fn project_p(x: &DMatrix<f64>) -> Result<PStdForm> {
    let size = x.nrows();
    if size < 4 || x.ncols() != size {
        return Err(CoreError::malformed("expected a square matrix of size m+2 ≥ 4"));
    }
    let m = size - 2;
    // Validate membership in so(m+1,1): J·X skew for J = diag{1,…,1,−1}.
    let mut jx = x.clone();
    for c in 0..size {
        jx[(m + 1, c)] = -jx[(m + 1, c)];
    }
    if (&jx + jx.transpose()).norm() > STRUCT_TOL * (1.0 + x.norm()) {
        return Err(CoreError::domain("matrix is not in the Lie algebra (form-skewness fails)"));
    }
    let y = x.view((0, 0), (m, m)).into_owned();
    let beta = DVector::from_fn(m, |i, _| (x[(m + 1, i)] - x[(m, i)]) * 0.5);
    let a = x[(m, m + 1)];
    PStdForm::new(y, beta, a)
}

/// Canonicalize a functional with β ≠ 0: the unique γ with
/// γ = −(Yβᵗ + aβ)/(2|β|²) moves (Y, β, a) to (Y_b, β, 0) where
/// Y_b = Y − (Yβᵗ·β − β·(Yβᵗ)ᵗ... )/|β|², i.e. Y minus the rank-two
/// correction built from Yβᵗ.  Returns (γ, canonical form).
pub fn canonicalize(p: &PStdForm) -> Result<(DVector<f64>, PStdForm)> {
    let b2 = p.beta.norm_squared();
    if b2 == 0.0 {
        return Err(CoreError::domain("canonicalize needs beta != 0 (depth-zero functional)"));
    }
    let yb = &p.y * &p.beta;
    let gamma = -(&yb + p.beta.scale(p.a)).scale(1.0 / (2.0 * b2));
    let corr = (&yb * p.beta.transpose() - &p.beta * yb.transpose()).scale(1.0 / b2);
    let y_can = &p.y - corr;
    let canonical = PStdForm::new(y_can, p.beta.clone(), 0.0)?;
    Ok((gamma, canonical))
}

// ---------------------------------------------------------------------------
// Pfaffian and singular values
// ---------------------------------------------------------------------------

/// Pfaffian of a skew-symmetric matrix of even size, by Householder
/// tridiagonalization with reflection-parity tracking.  Convention:
/// Pf([[0,1],[−1,0]]) = +1.
pub fn pfaffian(s: &DMatrix<f64>) -> Result<f64> {
    let n = s.nrows();
    if n % 2 != 0 || s.ncols() != n {
        return Err(CoreError::malformed("Pfaffian needs an even-sized square matrix"));
    }
    if (s + s.transpose()).norm() > STRUCT_TOL * (1.0 + s.norm()) {
        return Err(CoreError::malformed("Pfaffian needs a skew-symmetric matrix"));
    }
    let mut a = s.clone();
    let mut sign = 1.0;
    for k in 0..n.saturating_sub(2) {
        // Zero out a[k+2.., k] with a Householder reflection on rows/cols k+1...
        let col: Vec<f64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let tail: f64 = col[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if tail <= STRUCT_TOL * norm {
            continue; // already tridiagonal in this column
        }
        let mut v = col;
        let alpha = if v[0] >= 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        // Apply P = I − 2vvᵗ/|v|² on rows and columns k+1..n.
        let len = n - (k + 1);
        // rows
        for c in 0..n {
            let mut dot = 0.0;
            for i in 0..len {
                dot += v[i] * a[(k + 1 + i, c)];
            }
            let f = 2.0 * dot / vnorm2;
            for i in 0..len {
                a[(k + 1 + i, c)] -= f * v[i];
            }
        }
        // cols
        for r in 0..n {
            let mut dot = 0.0;
            for i in 0..len {
                dot += v[i] * a[(r, k + 1 + i)];
            }
            let f = 2.0 * dot / vnorm2;
            for i in 0..len {
                a[(r, k + 1 + i)] -= f * v[i];
            }
        }
        sign = -sign; // det of a Householder reflection
    }
    let mut pf = sign;
    for i in 0..n / 2 {
        pf *= a[(2 * i, 2 * i + 1)];
    }
    Ok(pf)
}

/// Singular values of a real matrix, descending (square roots of the
/// eigenvalues of AᵗA via the symmetric eigensolver).
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let ata = a.transpose() * a;
    let eig = ata.symmetric_eigen();
    let mut sv: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// The augmented matrix Z_{Y,β} = [[Y, βᵗ/|β|], [−β/|β|, 0]] of a canonical
/// functional ((m+1)×(m+1)).
pub fn z_matrix(p: &PStdForm) -> Result<DMatrix<f64>> {
    let m = p.m();
    let bn = p.beta.norm();
    if bn == 0.0 {
        return Err(CoreError::domain("Z needs beta != 0"));
    }
    let mut z = DMatrix::zeros(m + 1, m + 1);
    z.view_mut((0, 0), (m, m)).copy_from(&p.y);
    for i in 0..m {
        z[(i, m)] = p.beta[i] / bn;
        z[(m, i)] = -p.beta[i] / bn;
    }
    Ok(z)
}

/// Read off the orbit invariants of a canonical depth-one functional: the
/// paired nonzero singular values x₁ ≥ … of Y (with the forced kernel
/// removed) and, for odd m, the sign of the Pfaffian of Z_{Y,β}.
pub fn p_orbit_invariants(p: &PStdForm) -> Result<POrbitDescriptor> {
    if !p.is_canonical(1e-8) {
        return Err(CoreError::domain("p_orbit_invariants needs a canonical functional"));
    }
    let m = p.m();
    let sv = singular_values(&p.y);
    // Pair structure: odd m = 2n−1 → (x₁,x₁,…,x_{n−1},x_{n−1},0);
    // even m = 2n−2 → (x₁,x₁,…,x_{n−2},x_{n−2},0,0).
    let pairs = (m - 1) / 2;
    let scale = 1.0 + sv.first().copied().unwrap_or(0.0);
    for k in 0..pairs {
        if (sv[2 * k] - sv[2 * k + 1]).abs() > 1e-7 * scale {
            return Err(CoreError::numerical(format!(
                "singular values not paired: {:?}",
                sv
            )));
        }
    }
    for v in &sv[2 * pairs..] {
        if *v > 1e-7 * scale {
            return Err(CoreError::numerical(format!(
                "expected trailing kernel in singular values: {:?}",
                sv
            )));
        }
    }
    let x: Vec<f64> = (0..pairs).map(|k| sv[2 * k]).collect();
    let pf_sign = if m % 2 == 1 {
        let z = z_matrix(p)?;
        let pf = pfaffian(&z)?;
        PfSign::of(pf, 1e-9 * (1.0 + z.norm().powi((m + 1) as i32 / 2)))
    } else {
        PfSign::Zero
    };
    Ok(POrbitDescriptor { depth: 1, x, pf_sign, depth0_label: None, signed_last: None })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
