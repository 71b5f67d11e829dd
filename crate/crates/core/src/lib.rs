//! Word-oriented linear transformation shift registers (TSRs) over GF(2).
//!
//! A TSR keeps its state in `n` processor words of `m` bits each and produces
//! a whole word per step: the words shift forward and the new last word is
//! `T(a_0 v_0 + ... + a_{n-1} v_{n-1})` for a linear transformation `T` of
//! GF(2)^m and a tap vector `S = <a_0, ..., a_{n-1}>`. With the right choice
//! of `T` and `S` the state sequence has the maximal period `2^(mn) - 1`.
//!
//! The crate provides:
//!
//! * [`poly2`] — exact polynomial arithmetic over GF(2), irreducibility and
//!   primitivity tests;
//! * [`mat2`] — bit-packed linear algebra over GF(2), including the `nm x nm`
//!   block transition matrix and a characteristic-polynomial oracle;
//! * [`extfield`] — the extension field `L = GF(2)[x]/<f_T>`, polynomials over
//!   it, norms, and the fast irreducibility route through `L`;
//! * [`intfactor`] — complete factorization of `2^d - 1` and the Euler-phi
//!   ratio estimates behind the search;
//! * [`tsr`] — the register itself: stepping engines, the closed-form
//!   characteristic polynomial, the candidate pipeline, brute-force period
//!   verification, and the full primitive-TSR generation algorithm.

pub mod error;
pub mod extfield;
pub mod intfactor;
pub mod mat2;
pub mod poly2;
pub mod tsr;

pub use error::{Error, Result};
