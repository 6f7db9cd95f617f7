//! Radial limits of the universal mock theta function g2 at roots of unity.
//!
//! The specialized series g2(zeta_b^a q^A; q^B) is bounded as q approaches a
//! rational point e(h/k) radially only after subtracting a matching modular
//! correction; the limiting constant is then a finite sum over exact roots
//! of unity. This crate computes all of it:
//!
//! - [`exact`]: reduced fractions, exact roots of unity, and stripped
//!   q-Pochhammer products with exact zero detection.
//! - [`modular`]: Dedekind eta, Jacobi theta, the Appell-type mu function,
//!   and theta quotients, stable near the real axis via lattice reduction.
//! - [`eta_quotient`]: eta quotients with exact cusp orders and a text
//!   format for the CLI.
//! - [`qseries`]: g2 and its companions, the Appell-Lerch sum, the
//!   bilateral-side functions L and M, the three-term theta expression T,
//!   and the shifted corrections t and m.
//! - [`radial`]: cusp classification into four cases, closed-form limit
//!   constants, numeric radial verification, sweeps, and the worked
//!   second-order example with its curious identities.
//! - [`identities`]: seeded residual suites for the identities everything
//!   rests on.
//! - [`report`]: serializable records with a stable schema.

mod dd;

pub mod error;
pub mod eta_quotient;
pub mod exact;
pub mod identities;
pub mod modular;
pub mod qseries;
pub mod radial;
pub mod report;

pub use error::{Error, Result};
pub use eta_quotient::EtaQuotient;
pub use exact::{Cusp, Fraction, RootOfUnity, SpecParams, StrippedProduct};
pub use modular::ModularPoint;
pub use qseries::{CorrectionId, SeriesAccuracy};
pub use radial::{CaseTag, RadialEstimate, RadialLimitResult, SweepTable, VerifyReport};
