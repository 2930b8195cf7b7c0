//! Time-stepped ride of a train along a [`TrackPlan`] under time-division
//! scheduling: at every instant exactly one station, the owner of the region
//! the train is in, transmits at its instantaneous capacity.
//!
//! The delivered bits are a midpoint Riemann sum of the capacity profile.
//! This path shares nothing with the adaptive quadrature in
//! [`crate::service_calculus`] except the capacity formula, which makes it
//! usable as an independent check of the planning results.

use crate::channel_model::{ChannelParams, TrainProfile};
use crate::error::{invalid, Error, Result};
use crate::planning::TrackPlan;
use crate::service_calculus::{total_service, SolverSettings};

const MIN_STEPS_PER_REGION: f64 = 100.0;

/// Spatial step of the default time step, in units of `d0`.
pub const DEFAULT_SPATIAL_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub dt: f64,
    pub plan: TrackPlan,
    pub train: TrainProfile,
    pub params: ChannelParams,
}

impl SimulationConfig {
    /// `dt = None` picks `1e-4 * d0 / v`, a spatial step of `1e-4 * d0`.
    pub fn new(plan: TrackPlan, train: TrainProfile, params: ChannelParams, dt: Option<f64>) -> Result<Self> {
        let dt = dt.unwrap_or(DEFAULT_SPATIAL_STEP * params.d0() / train.speed());
        let cfg = Self {
            dt,
            plan,
            train,
            params,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "dt must be finite and > 0, got {}",
                self.dt
            )));
        }
        self.plan.check_tiling()?;
        let step = self.dt * self.train.speed();
        let min_width = self.plan.min_region_width();
        if step > min_width / MIN_STEPS_PER_REGION {
            return Err(Error::InvalidConfig(format!(
                "spatial step {step:e} exceeds 1/100 of the narrowest region ({min_width:e})"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub per_station_bits: Vec<f64>,
    pub total_bits: f64,
    pub steps: usize,
    pub dt: f64,
    /// Delivered bits over the station's total service at this speed.
    pub per_station_ratio: Vec<f64>,
}

// Neumaier summation; millions of small increments otherwise lose digits
#[derive(Debug, Default, Clone, Copy)]
struct Accumulator {
    sum: f64,
    carry: f64,
}

impl Accumulator {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Rides the train from 0 to `track_length`.
///
/// Steps are `v * dt` long except where a region boundary or the track end
/// cuts one short; no step straddles two regions. Each step is charged to
/// the station owning its start point, at the capacity of its midpoint.
pub fn simulate_ride(cfg: &SimulationConfig) -> Result<SimulationReport> {
    cfg.validate()?;
    let plan = &cfg.plan;
    let v = cfg.train.speed();
    let dx = v * cfg.dt;

    let mut acc = vec![Accumulator::default(); plan.stations.len()];
    let mut steps = 0usize;

    for (idx, region) in plan.stations.iter().enumerate() {
        let (start, end) = (region.region_start, region.region_end);
        let mut k = 0u64;
        loop {
            let a = start + k as f64 * dx;
            if a >= end {
                break;
            }
            let b = (start + (k + 1) as f64 * dx).min(end);
            let owner = plan
                .owner_at(a)
                .ok_or_else(|| Error::InvalidConfig(format!("position {a} lies outside every region")))?;
            let rel = 0.5 * (a + b) - plan.stations[owner].position;
            acc[owner].add(cfg.params.capacity_at_position(rel) * (b - a) / v);
            debug_assert_eq!(owner, idx);
            steps += 1;
            k += 1;
        }
    }

    let per_station_bits: Vec<f64> = acc.iter().map(Accumulator::value).collect();
    let total_bits = per_station_bits.iter().sum();
    let station_total = total_service(&cfg.params, cfg.train, &SolverSettings::default())?;
    let per_station_ratio = per_station_bits.iter().map(|b| b / station_total).collect();

    Ok(SimulationReport {
        per_station_bits,
        total_bits,
        steps,
        dt: cfg.dt,
        per_station_ratio,
    })
}

/// Midpoint-sum estimate of the fraction of one station's total service
/// received while the train is within `d_s / 2` of the foot point.
pub fn estimate_dominant_ratio(d_s: f64, train: TrainProfile, p: &ChannelParams, dt: f64) -> Result<f64> {
    if !(d_s.is_finite() && d_s > 0.0) {
        return Err(invalid(format!("service distance must be finite and > 0, got {d_s}")));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(invalid(format!("dt must be finite and > 0, got {dt}")));
    }
    let v = train.speed();
    let t_s = 0.5 * d_s / v;
    let n = (2.0 * t_s / dt).ceil().max(1.0) as u64;
    let h = 2.0 * t_s / n as f64;
    let mut acc = Accumulator::default();
    for i in 0..n {
        let t = -t_s + (i as f64 + 0.5) * h;
        acc.add(p.capacity_at_time(t, train) * h);
    }
    let total = total_service(p, train, &SolverSettings::default())?;
    Ok(acc.value() / total)
}
