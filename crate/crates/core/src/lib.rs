//! Exact computational toolkit for exceptional root systems and the
//! block-theoretic arithmetic built on top of them.
//!
//! The crate has five layers:
//!
//! * [`rootsys`] — root data, Weyl action, closed/Levi/pseudo-Levi
//!   subsystems, type classification and integer-lattice saturation tests;
//! * [`torsion`] — finite-order semisimple classes in the adjoint torus,
//!   centralizer data, component groups, quasi-isolated class inventories;
//! * [`generic_order`] — generic orders of finite reductive groups as
//!   cyclotomic products, ℓ-adic valuations and Φ_e-torus ranks;
//! * [`unipotent`] — unipotent character counts (partitions and symbols for
//!   classical types, a versioned data table for exceptional ones) and
//!   Lusztig series sizes;
//! * [`ledger`] — the inequality machinery: per-block upper bounds, the
//!   `l(B) ≤ c(B) ≤ ℓ^{s(B)}` checks and the E7 defect table, driven by
//!   structured data files.
//!
//! All arithmetic is exact: integer vectors for roots, reduced fractions for
//! torus points, big integers for specialized orders.

pub mod generic_order;
pub mod intmat;
pub mod ledger;
pub mod par;
pub mod rootsys;
pub mod torsion;
pub mod unipotent;

/// Schema tag stamped into every machine-readable report.
pub const REPORT_SCHEMA: &str = "exceptional-report/v1";
