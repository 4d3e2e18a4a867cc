//! Branching laws, coadjoint-orbit geometry and Fourier-analytic kernels for
//! the rank-one spin groups G = Spin(m+1,1) restricted to a minimal parabolic
//! subgroup P = MAN.
//!
//! The crate is organized in layers:
//!
//! * [`weights`] — exact half-integer arithmetic, Gelfand–Tsetlin interlacing
//!   and the Weyl dimension formula for the B/D-type subgroups involved
//!   (K = Spin(m+1), M = Spin(m), M′ = Spin(m−1)).
//! * [`classify`] — the Langlands-style classification of irreducible
//!   representations by infinitesimal character, unitarizability tests and
//!   the Vogan–Zuckerman A_q(λ) parameter ranges.
//! * [`branching`] — explicit branching tables π|_P = ⊕ I_{P,τ} for the
//!   unitary dual, the Grothendieck-group functor Ψ with its telescoping
//!   recursion, and a truncated K-type consistency check.
//! * [`matrix`] — the concrete (m+2)×(m+2) matrix model of so(m+1,1): Lie
//!   algebra builders, the projection to 𝔭*, canonical forms of P-coadjoint
//!   orbits, Pfaffians and singular values.  This module is the independent
//!   numeric oracle for everything the other modules compute in closed form.
//! * [`orbits`] — closed-form coadjoint-orbit engine: representatives
//!   n̄_b·f, characteristic polynomials h_b, the b ↔ x bijection, moment-map
//!   image descriptors, stabilizer types and reduced-space checks.
//! * [`duflo`] — the dictionaries between representations and coadjoint
//!   orbits on the G-side and the P-side, and the verification engine for
//!   the orbit-method prediction branch(π) ⇔ P-orbits inside q(𝒪_π).
//! * [`fourier`] — Γ and modified K-Bessel evaluation, Riesz constants,
//!   Knapp–Stein Fourier multipliers, closed-form Fourier pairs, the lowest
//!   K-type vector, and quadrature/DFT oracles validating all of them.

pub mod branching;
pub mod classify;
pub mod duflo;
pub mod error;
pub mod fourier;
pub mod matrix;
pub mod orbits;
pub mod weights;

pub use error::CoreError;
pub use fourier::{GridFn, KernelParams};
pub use weights::{GroupTag, HalfInt, WeightTuple};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CoreError>;
