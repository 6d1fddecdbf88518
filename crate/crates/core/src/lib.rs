//! Volumes of representations of surface and 3-manifold groups.

pub mod complex;
pub mod developing;
pub mod engine;
pub mod hyperbolic;
mod quadrature;
pub mod simplex;
pub mod special;

pub use hyperbolic::{Boundary, Dimension, ExtendedPoint, HyperbolicError, Isometry, IsometryKind, KleinPoint};
pub use simplex::{GeodesicSimplex, MethodChoice, VolumeError, VolumeMethod, VolumeValue};
pub use complex::{
    barycentric_subdivide, parse, serialize, validate_cocycle, ComplexError, Input, PeripheralData, Slot,
    TransitionCocycle, Triangulation, VertexKind,
};
pub use developing::{develop, place_vertices, DevelopError, DevelopedChain, Placement, PlacementMode, PlacementPolicy};
pub use engine::{
    compute_volume, invariance_test, milnor_wood_report, subdivision_test, EngineError, InvarianceReport,
    MilnorWoodReport, SubdivisionReport, VolumeOptions, VolumeReport,
};
