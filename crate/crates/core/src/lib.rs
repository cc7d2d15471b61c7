//! Exact computations in the Farey graph, the curve complex of the torus.
//!
//! * [`slope`]: slopes as primitive lattice vectors, intersection numbers,
//!   mediants and continued fractions.
//! * [`metric`]: graph distance, geodesic witnesses, windowed balls and the
//!   breadth-first oracles used to cross-check them.
//! * [`cone`]: open sectors of directions, the cone cover of a ball around
//!   `1/0` and the search for a cone that avoids the ball.
//! * [`mcg`]: the `GL(2,Z)` action, trace classification, orbit growth and
//!   fixed directions of Anosov classes.
//! * [`surd`]: exact quadratic-surd arithmetic and periodic continued
//!   fractions.

mod arith;
pub mod cone;
pub mod error;
pub mod mcg;
pub mod metric;
pub mod rational;
pub mod slope;
pub mod surd;

pub use cone::{
    build_cover, cone_contains, find_safe_cone, verify_cover, verify_safe_cone, ConeSector,
    CoverReport, Direction, SafeConeCertificate,
};
pub use error::{FareyError, Result};
pub use mcg::{
    act, classify, eigen_directions, orbit_growth, Classification, EigenDirectionReport,
    MappingClass, OrbitReport,
};
pub use metric::{
    are_adjacent, ball, distance, geodesic_witness, neighbor_family, oracle_distance_bfs,
    oracle_distances, safety_window, windowed_distance, BallMember, BallReport, GeodesicWitness,
    Window,
};
pub use rational::Rational;
pub use slope::{
    canonicalize, continued_fraction, intersection_number, mediant, parse_slope, CFExpansion, Slope,
};
