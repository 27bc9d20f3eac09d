//! Finite typed topological spaces: closures, tracks, connectivity,
//! surgeries, local indexing, branches and a DBSCAN bridge.
//!
//! Everything is computed from least neighborhoods, see [`space::TypedSpace`].

pub mod branches;
pub mod closure;
pub mod connectivity;
pub mod dbscan;
pub mod error;
pub mod indexing;
pub mod io;
pub mod space;
pub mod surgery;

pub use closure::{cl1, cln, tr, track_count, tracks, ClusterSet, TrackDecomposition};
pub use error::{Error, Result};
pub use space::{
    build_directed_2d_space, build_metric_space, build_relation_space, validate_space, Coord2,
    Point, PointId, PointSet, Radius, Shape, TypeLabel, TypePoset, TypedSpace,
};
