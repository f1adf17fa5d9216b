//! Batteries exercising the inequalities on named profile families.

mod battery;
mod families;
mod quotients;

pub use battery::{
    run_battery, BatterySpec, CaseMetrics, CaseRecord, GridMeta, PassFlags, ReferenceValues, ReportMeta,
    Residuals, Summary, Tolerances, VerificationReport,
};
pub use families::{optimizer_on, Family};
pub use quotients::{dual_quotient, dual_quotient_of, el_residual, gradient_sq, nash_quotient};
