//! Gauge integration over partitions of compact metric spaces.
//!
//! The crate builds the integral as a limit of Riemann sums
//! `Σ f(tag)·μ(cell)` over tagged partitions that are fine with respect to a
//! strictly positive gauge. Cells are *crescents* (a basic open set minus
//! another basic open set) drawn from one of three backends: the unit
//! interval, boxes in `R^n`, and the Cantor space `{0,1}^ω`.
//!
//! Layout:
//!
//! * [`space`] – points, crescents and the exact crescent algebra.
//! * [`partition`] – partitions, tagged partitions, joins, refinement, fineness.
//! * [`gauge`] – gauges and their combinators.
//! * [`measure`] – normalised Borel measures evaluated on crescents.
//! * [`partitioner`] – constructive fine partitions (Cousin subdivision),
//!   common refinements and PG pairs.
//! * [`integrator`] – the integration driver and its companions.
//! * [`valuation`] – simple valuations on the upper space and their order.
//! * [`bridge`] – the coding map between Cantor space and `[0,1]`.
//! * [`fixtures`] – named integrands with known integrals.
//! * [`exec`] – sequential/parallel execution switch.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bridge;
pub mod dense;
mod error;
pub mod exec;
pub mod fixtures;
pub mod gauge;
pub mod integrator;
pub mod measure;
pub mod partition;
pub mod partitioner;
pub mod space;
mod sum;
pub mod transport;
pub mod valuation;

pub use error::{Error, Result};
pub use exec::Execution;
pub use gauge::{Gauge, GaugeKind};
pub use integrator::{
    convergence_table, integrate, riemann_sum, IntegrateOptions, Integrand, IntegrationResult, LevelRecord, Schedule,
    Status,
};
pub use measure::Measure;
pub use partition::{Partition, TaggedCell, TaggedPartition};
pub use partitioner::{cousin_partition, SubdivisionPolicy};
pub use space::{
    Basis, BoxCell, CantorPoint, Crescent, CylinderSet, DenseSet, Interval, Point, SpaceDescriptor,
    Word,
};
pub use bridge::CodingMap;
pub use valuation::{Carrier, SimpleValuation, UpperElement};
