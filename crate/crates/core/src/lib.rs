//! Wireless channel service delivered by trackside base stations to a moving
//! train, and base-station interval planning built on it.
//!
//! * [`channel_model`]: received SNR and AWGN capacity along the track.
//! * [`service_calculus`]: service integrals, total service, dominant ratio.
//! * [`planning`]: service distances from ratio or quantity requirements,
//!   track plans and transmission windows.
//! * [`ride_simulator`]: time-stepped ride under time-division scheduling.
//! * [`cli`]: the `trackside` command-line tool.

pub mod channel_model;
pub mod cli;
pub mod error;
pub mod planning;
pub mod quadrature;
pub mod ride_simulator;
pub mod roots;
pub mod service_calculus;

pub use channel_model::{
    capacity_at_position, capacity_at_time, rho_from_snr0, snr_at_position, ChannelParams, TrainProfile,
};
pub use error::{Error, Result};
pub use planning::{
    interval_for_dominant_ratio, interval_for_service, pairwise_interval, plan_track, speed_for_service_and_interval,
    speed_for_service_and_interval_alpha2, transmission_window, ServiceRequirement, StationSlot, TrackPlan,
    TransmissionWindow,
};
pub use ride_simulator::{estimate_dominant_ratio, simulate_ride, SimulationConfig, SimulationReport};
pub use service_calculus::{
    closed_form_half_integral_alpha2, closed_form_total_half_integral_alpha2, dominant_ratio, half_integral,
    service_curve, service_up_to_time, total_half_integral, total_service, ServiceCurvePoint, SolverSettings,
};
