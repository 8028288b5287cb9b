//! Exact quadratic-form theory over Q and iterated Laurent series towers
//! K = Q((t1))...((tm)).
//!
//! The crate is organized bottom-up:
//!
//! - [`scalars`]: exact rationals, squarefree normalization, Legendre and
//!   Hilbert symbols, places of Q.
//! - [`forms`]: square classes of K^×/K^{×2}, diagonal forms, Pfister forms,
//!   and the Witt-ring constructors (orthogonal sum, scaling, tensor, pure
//!   subform).
//! - [`parse`]: the text grammar `<1, -2, 3*t1>` shared by the CLI, the
//!   certificate files, and test fixtures.
//! - [`base`]: complete invariants and deciders over Q (Hasse–Minkowski
//!   isotropy, hyperbolicity, Witt equivalence, isometry, anisotropic
//!   dimension).
//! - [`tower`]: residue maps and the componentwise deciders over towers
//!   (Springer's theorem, iterated), plus D(q)/G(q) membership and Pfister
//!   annihilation.
//! - [`construct`]: certificates for λ-annihilated Pfister decompositions,
//!   their verification reports, the tower-extension step that raises the
//!   fold level, the pipeline driver, and a greedy seed search over Q.
//!
//! Everything is a pure function on immutable values; all deciders are exact.
//!
//! # Example
//!
//! ```
//! use witt::{forms::TowerField, parse, tower};
//!
//! // ⟨1, t1⟩ is anisotropic over Q((t1)): both residue components are
//! // anisotropic over Q
//! let field = TowerField::new(["t1"]).unwrap();
//! let q = parse::form("<1, t1>", &field).unwrap();
//! assert!(tower::is_anisotropic(&q));
//!
//! // 5 = 2² + 1² is represented by ⟨1, 1⟩ over Q
//! let rationals = TowerField::rationals();
//! let sum_of_squares = parse::form("<1, 1>", &rationals).unwrap();
//! let five = parse::square_class("5", &rationals).unwrap();
//! assert!(tower::represents(&sum_of_squares, &five).unwrap());
//! ```

pub mod base;
pub mod construct;
mod error;
pub mod forms;
pub mod parse;
pub mod scalars;
pub mod tower;

pub use error::{Error, Result};
