//! Descriptor algebra, space models, cover oracles, classification, and
//! cover transformations.
//!
//! Layering, bottom up: [`point`] and [`desc`] define the symbolic values;
//! [`sets`] the concrete per-factor set algebra; [`space`] binds descriptors
//! to a space model (membership, validation, enumeration); [`contain`]
//! answers containment questions; [`cover`] wraps families of opens as
//! intensional oracles and classifies them; [`transform`] builds new covers
//! from old (finite-union closure, rectangle/cube refinement, product and
//! basis subcovers); [`registry`] ships the named spaces.

pub mod contain;
pub mod cover;
pub mod desc;
pub mod point;
pub mod registry;
pub mod sets;
pub mod space;
pub mod transform;

pub use cover::{classify_cover, finite_omega_defeater, ClassifyOptions, CoverOracle};
pub use desc::{Atom, Challenge, CompactDesc, CoverClass, OpenDesc, Region};
pub use point::Point;
pub use registry::{default_registry, Registry, RegistryDoc};
pub use space::{Batteries, FamilyGen, SpaceFlags, SpaceKind, SpaceModel, WitnessKind, WitnessSpec};
