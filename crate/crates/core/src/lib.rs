//! Set-based reachability analysis for discrete-time neural-network
//! controlled systems.
//!
//! Reachable sets are carried as symbolic zonotopes ([`SZonotope`]) or
//! symbolic polynotopes ([`SPolynotope`]): affine or polynomial functions of
//! uniquely identified unit-interval symbols. Because symbols are shared
//! between the plant state, the controller output and later time steps,
//! dependencies survive the whole closed loop instead of being forgotten at
//! every interface.

pub mod error;
pub mod nn;
pub mod partition;
pub mod plant;
pub mod reach;
pub mod symbols;
pub mod spoly;
pub mod szono;

pub use error::{Error, Result};
pub use symbols::{align, Alignment, SymbolId, SymbolProvider};
pub use nn::{
    activate_poly, activation_triplet, propagate_affine, propagate_poly, relu_quadratic,
    relu_triplet, sshape_triplet, ActivationKind, AffineTriplet, Layer, Network, PolyOptions,
    QuadCoeffs,
};
pub use partition::{
    run_open_loop, sym_select, Evaluation, PartitionNode, PartitionOptions, PartitionResult,
    SplitMode, SplitRecord,
};
pub use plant::{
    abstract_univariate, abstract_univariate_poly, disturbance_set, univariate_triplet,
    DisturbanceSpec, DynamicsExpr, Plant, Primitive, StepOutput,
};
pub use reach::{
    verify, verify_last_error, AffineMap, Controller, Engine, HoldMode, LastError, RAProblem,
    ReachResult, TimedSet, TraceSet, Violation, ViolationKind,
};
pub use spoly::{Monomial, SPolynotope};
pub use szono::{f_radius, Interval, Polyhedron, SZonotope};
