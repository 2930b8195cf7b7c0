//! Base-station interval planning.
//!
//! Two ways to size a station's service distance `d_s`:
//!
//! * by dominant ratio, solving `G(d_s/2) = η G(∞)`. The train speed does
//!   not enter, so neither does it appear in the signature.
//! * by service quantity, solving `(2/v) G(d_s/2) = S`. Faster trains need
//!   longer service distances.
//!
//! Stations then tile a finite track with equal regions no wider than `d_s`.

use crate::channel_model::{ChannelParams, TrainProfile};
use crate::error::{invalid, Error, Result};
use crate::roots::solve_increasing_from_zero;
use crate::service_calculus::{
    closed_form_half_integral_alpha2, half_integral, total_half_integral, total_service, SolverSettings,
};

/// Quantity-form requests within this relative margin of `2 G(∞) / v` are
/// rejected; the supremum is only reached as `d_s → ∞`.
pub const FEASIBILITY_MARGIN: f64 = 1e-6;

// a track/d_s ratio this close to an integer is treated as that integer
const TILING_SNAP: f64 = 1e-9;

const MAX_STATIONS: f64 = 1e8;

/// What each station must deliver to a passing train.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ServiceRequirement {
    /// Fraction `eta ∈ (0, 1)` of the station's total service.
    DominantRatio(f64),
    /// Absolute amount in bits.
    ServiceQuantity(f64),
}

impl ServiceRequirement {
    pub fn dominant_ratio(eta: f64) -> Result<Self> {
        check_ratio(eta)?;
        Ok(Self::DominantRatio(eta))
    }

    pub fn service_quantity(s_bits: f64) -> Result<Self> {
        check_quantity(s_bits)?;
        Ok(Self::ServiceQuantity(s_bits))
    }

    /// Service distance meeting this requirement at speed `train`.
    pub fn service_distance(&self, train: TrainProfile, p: &ChannelParams, s: &SolverSettings) -> Result<f64> {
        match *self {
            Self::DominantRatio(eta) => interval_for_dominant_ratio(eta, p, s),
            Self::ServiceQuantity(bits) => interval_for_service(bits, train, p, s),
        }
    }
}

fn check_ratio(eta: f64) -> Result<()> {
    if eta > 0.0 && eta < 1.0 {
        Ok(())
    } else {
        Err(Error::InfeasibleRatio { eta })
    }
}

fn check_quantity(s_bits: f64) -> Result<()> {
    if s_bits.is_finite() && s_bits > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "service quantity must be finite and > 0, got {s_bits}"
        )))
    }
}

/// Service distance whose dominant ratio is `eta`.
pub fn interval_for_dominant_ratio(eta: f64, p: &ChannelParams, s: &SolverSettings) -> Result<f64> {
    check_ratio(eta)?;
    s.validate()?;
    let target = eta * total_half_integral(p, s)?;
    solve_increasing_from_zero(
        |d_s| Ok(half_integral(0.5 * d_s, p, s)? - target),
        p.d0(),
        s.root_rel_tol,
        s.max_root_iters,
    )
}

/// Service distance over which a train at `train.speed()` receives `s_bits`.
pub fn interval_for_service(s_bits: f64, train: TrainProfile, p: &ChannelParams, s: &SolverSettings) -> Result<f64> {
    check_quantity(s_bits)?;
    s.validate()?;
    let v = train.speed();
    let g_inf = total_half_integral(p, s)?;
    let target = 0.5 * s_bits * v;
    if target >= g_inf * (1.0 - FEASIBILITY_MARGIN) {
        return Err(Error::InfeasibleService {
            s_bits,
            speed: v,
            max_bits: 2.0 * g_inf / v,
        });
    }
    solve_increasing_from_zero(
        |d_s| Ok(half_integral(0.5 * d_s, p, s)? - target),
        p.d0(),
        s.root_rel_tol,
        s.max_root_iters,
    )
}

fn check_speed_inputs(s_bits: f64, d_s: f64) -> Result<()> {
    check_quantity(s_bits)?;
    if !(d_s.is_finite() && d_s > 0.0) {
        return Err(invalid(format!("service distance must be finite and > 0, got {d_s}")));
    }
    Ok(())
}

/// Train speed at which a service distance `d_s` delivers exactly `s_bits`.
pub fn speed_for_service_and_interval(s_bits: f64, d_s: f64, p: &ChannelParams, s: &SolverSettings) -> Result<f64> {
    check_speed_inputs(s_bits, d_s)?;
    Ok(2.0 * half_integral(0.5 * d_s, p, s)? / s_bits)
}

/// Same as [`speed_for_service_and_interval`], evaluated from the `alpha = 2`
/// antiderivative instead of quadrature.
pub fn speed_for_service_and_interval_alpha2(s_bits: f64, d_s: f64, p: &ChannelParams) -> Result<f64> {
    check_speed_inputs(s_bits, d_s)?;
    Ok(2.0 * closed_form_half_integral_alpha2(0.5 * d_s, p)? / s_bits)
}

/// Distance between two adjacent stations that split the track between them
/// at the boundary of their service regions.
pub fn pairwise_interval(d_s1: f64, d_s2: f64) -> Result<f64> {
    if !(d_s1 >= 0.0 && d_s2 >= 0.0) || !d_s1.is_finite() || !d_s2.is_finite() {
        return Err(invalid(format!(
            "service distances must be finite and >= 0, got {d_s1}, {d_s2}"
        )));
    }
    Ok(0.5 * (d_s1 + d_s2))
}

/// One station of a [`TrackPlan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationSlot {
    pub position: f64,
    pub service_distance: f64,
    pub region_start: f64,
    pub region_end: f64,
}

/// Station layout along `[0, track_length]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackPlan {
    pub track_length: f64,
    pub stations: Vec<StationSlot>,
    /// Distances between adjacent station positions; one fewer than stations.
    pub intervals: Vec<f64>,
}

impl TrackPlan {
    /// Tiles `[0, track_length]` with `ceil(track_length / d_s)` equal regions,
    /// one station at the centre of each.
    ///
    /// When the track is not a whole multiple of `d_s` the regions shrink
    /// below `d_s`. Each station then delivers slightly less than the
    /// requirement of its own total, while the service per meter of track
    /// exceeds that of an exact `d_s` tiling (`G(L)/L` falls with `L`).
    pub fn homogeneous(track_length: f64, d_s: f64) -> Result<Self> {
        if !(track_length.is_finite() && track_length > 0.0) {
            return Err(invalid(format!(
                "track length must be finite and > 0, got {track_length}"
            )));
        }
        if !(d_s.is_finite() && d_s > 0.0) {
            return Err(invalid(format!("service distance must be finite and > 0, got {d_s}")));
        }
        let ratio = track_length / d_s;
        if ratio > MAX_STATIONS {
            return Err(invalid(format!("plan would need {ratio:.3e} stations")));
        }
        let nearest = ratio.round();
        let count = if nearest >= 1.0 && (ratio - nearest).abs() <= TILING_SNAP * ratio {
            nearest
        } else {
            ratio.ceil()
        } as usize;

        let width = track_length / count as f64;
        let boundary = |i: usize| if i == count { track_length } else { i as f64 * width };
        let stations = (0..count)
            .map(|i| {
                let (start, end) = (boundary(i), boundary(i + 1));
                StationSlot {
                    position: 0.5 * (start + end),
                    service_distance: width,
                    region_start: start,
                    region_end: end,
                }
            })
            .collect();
        Self::from_stations(track_length, stations)
    }

    /// Builds a plan from explicit stations, sorted by position.
    pub fn from_stations(track_length: f64, mut stations: Vec<StationSlot>) -> Result<Self> {
        if stations.is_empty() {
            return Err(invalid("a plan needs at least one station"));
        }
        stations.sort_by(|a, b| a.position.total_cmp(&b.position));
        let intervals = stations.windows(2).map(|w| w[1].position - w[0].position).collect();
        Ok(Self {
            track_length,
            stations,
            intervals,
        })
    }

    /// Checks that the regions are contiguous and cover exactly `[0, track_length]`.
    pub fn check_tiling(&self) -> Result<()> {
        let eps = 1e-12 * self.track_length;
        let first = self
            .stations
            .first()
            .ok_or_else(|| Error::InvalidConfig("plan has no stations".into()))?;
        if first.region_start.abs() > eps {
            return Err(Error::InvalidConfig(format!(
                "first region starts at {}, not 0",
                first.region_start
            )));
        }
        for (i, w) in self.stations.windows(2).enumerate() {
            if (w[0].region_end - w[1].region_start).abs() > eps {
                return Err(Error::InvalidConfig(format!(
                    "regions {i} and {} do not meet ({} vs {})",
                    i + 1,
                    w[0].region_end,
                    w[1].region_start
                )));
            }
        }
        for (i, st) in self.stations.iter().enumerate() {
            if st.region_end <= st.region_start || st.region_end.is_nan() || st.region_start.is_nan() {
                return Err(Error::InvalidConfig(format!("region {i} is empty")));
            }
        }
        let last = self.stations.last().unwrap();
        if (last.region_end - self.track_length).abs() > eps {
            return Err(Error::InvalidConfig(format!(
                "last region ends at {}, track ends at {}",
                last.region_end, self.track_length
            )));
        }
        Ok(())
    }

    /// Index of the station owning `x` under half-open regions `[start, end)`.
    /// The track end belongs to the last station.
    pub fn owner_at(&self, x: f64) -> Option<usize> {
        if x < self.stations.first()?.region_start || x > self.track_length {
            return None;
        }
        let idx = self.stations.partition_point(|st| st.region_end <= x);
        Some(idx.min(self.stations.len() - 1))
    }

    pub fn min_region_width(&self) -> f64 {
        self.stations
            .iter()
            .map(|st| st.region_end - st.region_start)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Solves the service distance from `req` and lays stations along the track.
pub fn plan_track(
    track_length: f64,
    req: ServiceRequirement,
    train: TrainProfile,
    p: &ChannelParams,
    s: &SolverSettings,
) -> Result<TrackPlan> {
    let d_s = req.service_distance(train, p, s)?;
    TrackPlan::homogeneous(track_length, d_s)
}

/// When a station transmits to a passing train, in station-local coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionWindow {
    pub x_start: f64,
    pub x_end: f64,
    pub t_start: f64,
    pub t_end: f64,
    /// Data the station must hold for this train: its total service at speed v.
    pub buffer_bits: f64,
}

pub fn transmission_window(
    req: ServiceRequirement,
    train: TrainProfile,
    p: &ChannelParams,
    s: &SolverSettings,
) -> Result<TransmissionWindow> {
    let d_s = req.service_distance(train, p, s)?;
    let half = 0.5 * d_s;
    let t_half = half / train.speed();
    Ok(TransmissionWindow {
        x_start: -half,
        x_end: half,
        t_start: -t_half,
        t_end: t_half,
        buffer_bits: total_service(p, train, s)?,
    })
}

/// Largest quantity requirement feasible at speed `v`, in bits.
pub fn max_service_bits(train: TrainProfile, p: &ChannelParams, s: &SolverSettings) -> Result<f64> {
    total_service(p, train, s)
}
