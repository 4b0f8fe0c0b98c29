//! Zero counting and location for zeta determinants.

pub mod counts;
pub mod locate;
pub mod winding;
pub mod zeta;

pub use counts::{count_m, count_n, BoxCount, BoxOptions, CountOptions, CountReport};
pub use locate::{is_special, locate_zeros, LocateDiagnostics, LocateOptions, ResonanceReport, UnresolvedCell, Zero};
pub use winding::{circle_moments, winding_count, winding_count_strict, CircleMoments, Rect, Winding};
pub use zeta::{zeta_source, EulerZeta, TransferZeta, ZetaFunction, ZetaMethod, ZetaValue};
