//! Numerical tolerances shared by checks, tests and the CLI.
//!
//! Values are absolute unless noted. Matrix comparisons scale by the
//! largest entry of the reference matrix.

/// Projective identities between products of moves.
pub const PROJECTIVE: f64 = 1e-9;

/// Isometry contract `M* H(target) M = H(source)`, entrywise.
pub const ISOMETRY: f64 = 1e-9;

/// Hermitian symmetry of a form matrix.
pub const HERMITIAN: f64 = 1e-12;

/// Residual of a vertex in its defining line equations.
pub const INCIDENCE: f64 = 1e-10;

/// Printed vs computed vertex coordinates and argument cells.
pub const VERTEX: f64 = 1e-9;

/// A printed zero coordinate.
pub const ZERO_COORD: f64 = 1e-10;

/// Membership of closure points (vertices) in the domain.
pub const MEMBERSHIP: f64 = 1e-6;

/// Sign comparisons in sampled lemmas skip values closer to zero than this.
pub const NEUTRAL_ZONE: f64 = 1e-8;

/// Side modulus bounds.
pub const SIDE_BOUND: f64 = 1e-10;

/// Null vectors on the boundary of the ball.
pub const NULL_NORM: f64 = 1e-9;

/// Default bound on projective order searches.
pub const MAX_ORDER: usize = 200;

/// Default cap on the size of a BFS closure.
pub const MAX_GROUP: usize = 10_000;

/// Projective match of group elements in a BFS closure. Long products of
/// side pairings drift by a few 1e-9, far below the O(1) gap between
/// distinct elements.
pub const BFS_MATCH: f64 = 1e-7;
