//! Numeric layer: polynomial roots, critical data and fiber tracking.

pub mod bigfloat;
pub mod real;

pub use bigfloat::{BigFloat, F128, F256, F512};
pub use real::Real;
pub mod roots;

pub use roots::{roots, roots_squarefree, CoeffSource, ComplexApprox, Pencil, RootApprox, SAFETY};
pub mod critical;

pub use critical::{critical_data, CriticalDatum, MapData};
pub mod track;

pub use track::{fiber_at, track, track_all, FiberTrack, LoopSystem};
