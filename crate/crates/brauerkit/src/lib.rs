//! Exact-arithmetic verification toolkit for a family of local-global
//! constructions: Hilbert symbols and isotropy of quadratic forms over the
//! completions of Q and of real quadratic fields, tame residues of quaternion
//! symbol algebras over Q(x), cohomology of finite subgroups of GL2(Z/n),
//! and certificate-grade elliptic curve data (traces, twists, torsion,
//! Galois image witnesses, divisibility witnesses).
//!
//! Everything is computed with exact integers and rationals; no floating
//! point enters any verdict. All public operations are pure functions over
//! immutable values and are safe to call from concurrent workers.
//!
//! The `parallel` feature (on by default) routes the prime scans and search
//! loops through rayon; without it the same loops run sequentially.

pub mod arith;
pub mod cohomology;
pub mod ec;
pub mod funcfield;
pub mod howell;
pub mod local;
pub mod par;
pub mod pipelines;
pub mod quadfield;
pub mod rational;
pub mod report;

pub use arith::{factorize, legendre_symbol, padic_valuation, squarefree_part, Place};
pub use rational::Rational;
