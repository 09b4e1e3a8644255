//! Elastic shape analysis of discrete curves.
pub mod corpus;
pub mod curve;
pub mod diff;
pub mod error;
pub mod cli;
pub mod homogeneous;
pub mod hurdat;
pub mod io;
pub mod plane;
pub mod registration;
pub mod so3;
pub mod srv;
pub mod surfaces;

pub use curve::{frenet_frame, plane_curvature, plane_curvature_masked, resample_uniform, speed, DiscreteCurve, FrameField};
pub use error::{Error, Result};
pub use srv::{l2_distance, srv_geodesic, srv_inverse, srv_transform, GeodesicStep, SrvCurve};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/curves.md")]
    mod curves {}
    #[doc = include_str!("../../../book/src/srv.md")]
    mod srv {}
    #[doc = include_str!("../../../book/src/plane.md")]
    mod plane {}
    #[doc = include_str!("../../../book/src/registration.md")]
    mod registration {}
    #[doc = include_str!("../../../book/src/sphere.md")]
    mod sphere {}
    #[doc = include_str!("../../../book/src/surfaces.md")]
    mod surfaces {}
    #[doc = include_str!("../../../book/src/hurricanes.md")]
    mod hurricanes {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
