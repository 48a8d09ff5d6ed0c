//! Exact deformation calculus for regular Poisson structures and symplectic
//! foliations on tori.
//!
//! ```
//! use poisfol::expr::{parse_multivector, print_ext};
//! use poisfol::linfty::l2;
//! use poisfol::{RegularPoissonStructure, Splitting};
//!
//! let pi = parse_multivector("d1^d2", 3)?;
//! let rp = RegularPoissonStructure::new(pi, Splitting::coordinate(3, &[0, 1])?)?;
//! let p = parse_multivector("sin(t3)*d1^d3 + cos(t3)*d2^d3", 3)?;
//! assert_eq!(print_ext(&l2(&rp, &p, &p)), "-2*d1^d2^d3");
//! # Ok::<(), poisfol::Error>(())
//! ```

pub mod cohomology;
pub mod dirac;
pub mod error;
pub mod expr;
pub mod foliation;
pub mod linfty;
pub mod matrix;
pub mod multivector;
pub mod splitting;
#[cfg(feature = "testkit")]
pub mod testkit;
pub mod trigring;

pub use cohomology::{Complex, ExactnessVerdict, FoliationVerdict, SolverOptions, WitnessCase, WitnessRecord};
pub use error::{Error, Result};
pub use expr::{ExprKind, Value};
pub use foliation::FoliatedFormNF;
pub use linfty::{DeformationPath, PathClaim, RegularPoissonStructure};
pub use multivector::{Blade, DifferentialForm, Multivector};
pub use splitting::{Bigrade, Splitting, SymplecticData};
pub use trigring::{Gauss, NonvanishingCertificate, TorusFunction, TrigPoly, Q};
