//! Issues, outcome spaces, side and center utilities, and bilateral analytics.

mod bilateral;
mod center;
mod space;
mod utility;

pub use bilateral::{bilateral_points, nash_distance, nash_point, nash_point_of, pareto_frontier, BilateralPoint};
pub use center::{AgreementVector, CenterCombiner, CenterModel, Slot, Tally, ENUMERATION_CAP};
pub use space::{Issue, Level, Outcome, OutcomeSpace, Outcomes};
pub use utility::{SideUtility, WEIGHT_SUM_TOLERANCE};
