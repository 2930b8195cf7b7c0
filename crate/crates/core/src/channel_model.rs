//! Received SNR and instantaneous AWGN capacity seen by a train passing one
//! trackside base station.
//!
//! Positions are measured along the track from the station's foot point, so
//! the station-to-train distance is `sqrt(d0^2 + x^2)`. Capacity is in bits
//! per second per unit bandwidth.

use crate::error::{invalid, Result};

/// Path-loss model of a single base station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    rho: f64,
    d0: f64,
    alpha: f64,
}

impl ChannelParams {
    /// `rho` is the SNR scale (2 P_s / N0, units of distance^alpha), `d0` the
    /// perpendicular station-to-track offset and `alpha` the path-loss exponent.
    pub fn new(rho: f64, d0: f64, alpha: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(invalid(format!("rho must be finite and > 0, got {rho}")));
        }
        check_geometry(d0, alpha)?;
        Ok(Self { rho, d0, alpha })
    }

    /// Builds parameters from the linear SNR at the closest-approach point.
    pub fn from_snr0_db(snr0_db: f64, d0: f64, alpha: f64) -> Result<Self> {
        Self::new(rho_from_snr0(snr0_db, d0, alpha)?, d0, alpha)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn d0(&self) -> f64 {
        self.d0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(rho, self.d0, self.alpha)
    }

    /// Linear SNR at track position `x`.
    pub fn snr_at_position(&self, x: f64) -> f64 {
        self.rho / (self.d0 * self.d0 + x * x).powf(0.5 * self.alpha)
    }

    /// Capacity in nats, `ln(1 + snr)`. The service integrals work in nats.
    pub(crate) fn capacity_nats(&self, x: f64) -> f64 {
        self.snr_at_position(x).ln_1p()
    }

    /// Capacity `log2(1 + snr)` at track position `x`.
    pub fn capacity_at_position(&self, x: f64) -> f64 {
        self.capacity_nats(x) / std::f64::consts::LN_2
    }

    /// Capacity at time `t`, with `t = 0` the instant of closest approach.
    pub fn capacity_at_time(&self, t: f64, train: TrainProfile) -> f64 {
        self.capacity_at_position(train.speed() * t)
    }
}

fn check_geometry(d0: f64, alpha: f64) -> Result<()> {
    if !(d0.is_finite() && d0 > 0.0) {
        return Err(invalid(format!("d0 must be finite and > 0, got {d0}")));
    }
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(invalid(format!("alpha must be finite and > 1, got {alpha}")));
    }
    Ok(())
}

/// Constant-speed train.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainProfile {
    speed: f64,
}

impl TrainProfile {
    pub fn new(speed: f64) -> Result<Self> {
        if !(speed.is_finite() && speed > 0.0) {
            return Err(invalid(format!("speed must be finite and > 0, got {speed}")));
        }
        Ok(Self { speed })
    }

    /// Speed in m/s.
    pub fn speed(&self) -> f64 {
        self.speed
    }
}

/// SNR scale that puts `snr0_db` at the foot point: `10^(snr0_db/10) * d0^alpha`.
pub fn rho_from_snr0(snr0_db: f64, d0: f64, alpha: f64) -> Result<f64> {
    check_geometry(d0, alpha)?;
    if !snr0_db.is_finite() {
        return Err(invalid(format!("snr0_db must be finite, got {snr0_db}")));
    }
    Ok(10f64.powf(snr0_db / 10.0) * d0.powf(alpha))
}

pub fn snr_at_position(x: f64, p: &ChannelParams) -> f64 {
    p.snr_at_position(x)
}

pub fn capacity_at_position(x: f64, p: &ChannelParams) -> f64 {
    p.capacity_at_position(x)
}

pub fn capacity_at_time(t: f64, p: &ChannelParams, train: TrainProfile) -> f64 {
    p.capacity_at_time(t, train)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn rho_from_snr0_examples() {
        assert!(close(rho_from_snr0(10.0, 1.0, 2.0).unwrap(), 10.0, 1e-14));
        assert!(close(rho_from_snr0(0.0, 1.0, 2.0).unwrap(), 1.0, 1e-14));
        assert!(close(rho_from_snr0(10.0, 2.0, 2.0).unwrap(), 40.0, 1e-14));
        let p = ChannelParams::from_snr0_db(7.0, 3.0, 3.5).unwrap();
        assert!(close(p.snr_at_position(0.0), 10f64.powf(0.7), 1e-13));
    }

    #[test]
    fn rho_from_snr0_rejects_bad_geometry() {
        assert!(matches!(
            rho_from_snr0(10.0, 0.0, 2.0),
            Err(crate::Error::InvalidParameter(_))
        ));
        assert!(matches!(
            rho_from_snr0(10.0, 1.0, 1.0),
            Err(crate::Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn params_validation() {
        assert!(ChannelParams::new(0.0, 1.0, 2.0).is_err());
        assert!(ChannelParams::new(10.0, -1.0, 2.0).is_err());
        assert!(ChannelParams::new(10.0, 1.0, 0.5).is_err());
        assert!(ChannelParams::new(f64::NAN, 1.0, 2.0).is_err());
        assert!(TrainProfile::new(0.0).is_err());
        assert!(TrainProfile::new(-3.0).is_err());
    }

    #[test]
    fn snr_examples() {
        let p = ChannelParams::new(10.0, 1.0, 2.0).unwrap();
        assert!(close(snr_at_position(0.0, &p), 10.0, 1e-15));
        assert!(close(snr_at_position(1.0, &p), 5.0, 1e-15));
        let q = ChannelParams::new(40.0, 1.0, 4.0).unwrap();
        assert!(close(snr_at_position(3.0, &q), 0.4, 1e-14));
    }

    #[test]
    fn capacity_examples() {
        let p = ChannelParams::new(10.0, 1.0, 2.0).unwrap();
        assert!(close(capacity_at_position(0.0, &p), 11f64.log2(), 1e-14));
        assert!(close(capacity_at_position(1.0, &p), 6f64.log2(), 1e-14));
        assert!(close(
            capacity_at_position(10.0, &p),
            (1.0 + 10.0 / 101.0f64).log2(),
            1e-14
        ));
        assert!((capacity_at_position(0.0, &p) - 3.45943).abs() < 1e-5);
        assert!((capacity_at_position(10.0, &p) - 0.136_204_383_598).abs() < 1e-12);
    }

    #[test]
    fn capacity_at_time_examples() {
        let p = ChannelParams::new(10.0, 1.0, 2.0).unwrap();
        for v in [0.1, 1.0, 30.0] {
            let c = capacity_at_time(0.0, &p, TrainProfile::new(v).unwrap());
            assert!(close(c, 11f64.log2(), 1e-14));
        }
        let c1 = capacity_at_time(1.0, &p, TrainProfile::new(1.0).unwrap());
        let c2 = capacity_at_time(0.5, &p, TrainProfile::new(2.0).unwrap());
        assert!(close(c1, 6f64.log2(), 1e-14));
        assert_eq!(c2, capacity_at_position(1.0, &p));
    }
}
