//! Channel-service integrals for one base station.
//!
//! The central quantity is the half-line integral
//!
//! ```text
//! G(L) = ∫₀ᴸ log2(1 + ρ / (d0² + x²)^(α/2)) dx
//! ```
//!
//! from which the accumulated service `S(t)`, the total service `2 G(∞) / v`
//! and the dominant ratio `G(d_s/2) / G(∞)` all follow. Integration runs in
//! nats and converts to bits once at the end.
//!
//! On `[0, min(L, d0)]` the integrand is integrated in `x` directly. Beyond
//! `d0` the substitution `x = d0 cot(u)` maps `[d0, ∞)` onto `(0, π/4]`, so
//! the infinite upper limit needs no truncation point.

use std::f64::consts::{FRAC_PI_4, LN_2, PI};

use crate::channel_model::{ChannelParams, TrainProfile};
use crate::error::{invalid, Result};
use crate::quadrature;

/// Quadrature and root-finding controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub quad_rel_tol: f64,
    pub quad_abs_tol: f64,
    pub max_subdivisions: usize,
    pub root_rel_tol: f64,
    pub max_root_iters: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            quad_rel_tol: 1e-10,
            quad_abs_tol: 1e-12,
            max_subdivisions: 10_000,
            root_rel_tol: 1e-9,
            max_root_iters: 200,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        for (name, tol) in [
            ("quad_rel_tol", self.quad_rel_tol),
            ("quad_abs_tol", self.quad_abs_tol),
            ("root_rel_tol", self.root_rel_tol),
        ] {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(invalid(format!("{name} must be finite and > 0, got {tol}")));
            }
        }
        if self.max_subdivisions < 1 || self.max_root_iters < 1 {
            return Err(invalid("iteration caps must be >= 1"));
        }
        Ok(())
    }
}

/// One sample of the accumulated-service curve `S(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceCurvePoint {
    pub t: f64,
    pub s: f64,
}

fn integrate_x(a: f64, b: f64, p: &ChannelParams, s: &SolverSettings, abs_tol: f64) -> Result<f64> {
    let q = quadrature::integrate(
        |x| p.capacity_nats(x),
        a,
        b,
        s.quad_rel_tol,
        abs_tol,
        s.max_subdivisions,
    )?;
    Ok(q.value)
}

// ∫ over x ∈ [d0, d0 cot(u_lo)] after x = d0 cot(u)
fn integrate_cot(u_lo: f64, p: &ChannelParams, s: &SolverSettings, abs_tol: f64) -> Result<f64> {
    let d0 = p.d0();
    let alpha = p.alpha();
    let peak = p.rho() / d0.powf(alpha);
    let integrand = |u: f64| {
        let su = u.sin();
        (peak * su.powf(alpha)).ln_1p() * d0 / (su * su)
    };
    let q = quadrature::integrate(integrand, u_lo, FRAC_PI_4, s.quad_rel_tol, abs_tol, s.max_subdivisions)?;
    Ok(q.value)
}

fn half_integral_nats(length: f64, p: &ChannelParams, s: &SolverSettings) -> Result<f64> {
    if length.is_nan() || length < 0.0 {
        return Err(invalid(format!("integration length must be >= 0, got {length}")));
    }
    s.validate()?;
    let abs_tol = s.quad_abs_tol * LN_2;
    let d0 = p.d0();
    if length <= d0 {
        return integrate_x(0.0, length, p, s, abs_tol);
    }
    let near = integrate_x(0.0, d0, p, s, 0.5 * abs_tol)?;
    let u_lo = if length.is_infinite() { 0.0 } else { d0.atan2(length) };
    let far = integrate_cot(u_lo, p, s, 0.5 * abs_tol)?;
    Ok(near + far)
}

fn total_half_integral_nats(p: &ChannelParams, s: &SolverSettings) -> Result<f64> {
    half_integral_nats(f64::INFINITY, p, s)
}

/// `G(L)` in bit·m/s by adaptive quadrature.
pub fn half_integral(length: f64, p: &ChannelParams, s: &SolverSettings) -> Result<f64> {
    Ok(half_integral_nats(length, p, s)? / LN_2)
}

/// `G(∞)` in bit·m/s.
pub fn total_half_integral(p: &ChannelParams, s: &SolverSettings) -> Result<f64> {
    Ok(total_half_integral_nats(p, s)? / LN_2)
}

/// `G(L)` in nats for `alpha == 2`, from the antiderivative
/// `L ln(1 + ρ/(d0² + L²)) + 2A atan(L/A) − 2 d0 atan(L/d0)`, `A = sqrt(ρ + d0²)`.
fn closed_form_nats(length: f64, p: &ChannelParams) -> Result<f64> {
    if p.alpha() != 2.0 {
        return Err(invalid(format!("closed form requires alpha = 2, got {}", p.alpha())));
    }
    if length.is_nan() || length < 0.0 {
        return Err(invalid(format!("integration length must be >= 0, got {length}")));
    }
    let (rho, d0) = (p.rho(), p.d0());
    let a = (rho + d0 * d0).sqrt();
    if length.is_infinite() {
        return Ok(PI * (a - d0));
    }
    let b = d0 * d0 + length * length;
    Ok(length * (rho / b).ln_1p() + 2.0 * a * (length / a).atan() - 2.0 * d0 * (length / d0).atan())
}

/// Closed-form `G(L)` in bit·m/s, valid only for `alpha == 2`.
pub fn closed_form_half_integral_alpha2(length: f64, p: &ChannelParams) -> Result<f64> {
    Ok(closed_form_nats(length, p)? / LN_2)
}

/// Closed-form `G(∞) = π (sqrt(ρ + d0²) − d0) / ln 2` for `alpha == 2`.
pub fn closed_form_total_half_integral_alpha2(p: &ChannelParams) -> Result<f64> {
    closed_form_half_integral_alpha2(f64::INFINITY, p)
}

/// Bits delivered from `t = −∞` up to `t`.
pub fn service_up_to_time(t: f64, p: &ChannelParams, train: TrainProfile, s: &SolverSettings) -> Result<f64> {
    if t.is_nan() {
        return Err(invalid("time must not be NaN"));
    }
    let v = train.speed();
    let total = total_half_integral_nats(p, s)?;
    let partial = if t.is_infinite() {
        total
    } else {
        half_integral_nats((v * t).abs(), p, s)?
    };
    let nats = if t >= 0.0 { total + partial } else { total - partial };
    Ok(nats.max(0.0) / (v * LN_2))
}

/// Samples `S(t)` on the given times.
pub fn service_curve(
    times: &[f64],
    p: &ChannelParams,
    train: TrainProfile,
    s: &SolverSettings,
) -> Result<Vec<ServiceCurvePoint>> {
    times
        .iter()
        .map(|&t| service_up_to_time(t, p, train, s).map(|s| ServiceCurvePoint { t, s }))
        .collect()
}

/// Everything one station can deliver to a train at speed `v`: `2 G(∞) / v` bits.
pub fn total_service(p: &ChannelParams, train: TrainProfile, s: &SolverSettings) -> Result<f64> {
    Ok(2.0 * total_half_integral(p, s)? / train.speed())
}

/// Fraction of the total service delivered over a service distance `d_s`
/// centred on the foot point. Independent of train speed.
pub fn dominant_ratio(d_s: f64, p: &ChannelParams, s: &SolverSettings) -> Result<f64> {
    if d_s.is_nan() || d_s < 0.0 {
        return Err(invalid(format!("service distance must be >= 0, got {d_s}")));
    }
    let total = total_half_integral_nats(p, s)?;
    let part = half_integral_nats(0.5 * d_s, p, s)?;
    Ok((part / total).min(1.0))
}

/// Upper bound on the tail `∫_X^∞` in bits, used to cross-check `G(∞)`.
pub fn tail_bound(x: f64, p: &ChannelParams) -> f64 {
    let alpha = p.alpha();
    p.rho() * x.powf(1.0 - alpha) / ((alpha - 1.0) * LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;

    fn params(rho: f64, d0: f64, alpha: f64) -> ChannelParams {
        ChannelParams::new(rho, d0, alpha).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // mpmath, 30 digits
    const G1_RHO10_A2: f64 = 3.121_216_382_166_064;
    const GINF_RHO10_A2: f64 = 10.499_777_863_375_593;
    // composite Simpson, 10^7 panels, agrees with mpmath to 1e-15
    const G1_RHO10_A4: f64 = 2.803_650_390_823_248;
    const GINF_RHO10_A4: f64 = 4.252_437_941_466_366;
    const GINF_RHO10_A1_5: f64 = 21.347_368_255_686_875;

    #[test]
    fn half_integral_examples() {
        let s = SolverSettings::default();
        assert_eq!(half_integral(0.0, &params(10.0, 1.0, 2.0), &s).unwrap(), 0.0);
        let g = half_integral(1.0, &params(10.0, 1.0, 2.0), &s).unwrap();
        assert!(rel(g, G1_RHO10_A2) < 1e-10);
        assert!((g - 3.12124).abs() < 5e-5);
        let g4 = half_integral(1.0, &params(10.0, 1.0, 4.0), &s).unwrap();
        assert!(rel(g4, G1_RHO10_A4) < 1e-10);
    }

    #[test]
    fn half_integral_rejects_negative_length() {
        let s = SolverSettings::default();
        assert!(half_integral(-1.0, &params(10.0, 1.0, 2.0), &s).is_err());
    }

    #[test]
    fn total_half_integral_examples() {
        let s = SolverSettings::default();
        let g = total_half_integral(&params(10.0, 1.0, 2.0), &s).unwrap();
        assert!(rel(g, GINF_RHO10_A2) < 1e-10);
        assert!(rel(g, PI * (11f64.sqrt() - 1.0) / LN_2) < 1e-10);
        let g2 = total_half_integral(&params(10.0, 2.0, 2.0), &s).unwrap();
        assert!(rel(g2, PI * (14f64.sqrt() - 2.0) / LN_2) < 1e-10);
        assert!(total_half_integral(&params(1e-12, 1.0, 2.0), &s).unwrap() < 1e-6);
        assert!(rel(total_half_integral(&params(10.0, 1.0, 4.0), &s).unwrap(), GINF_RHO10_A4) < 1e-10);
        assert!(
            rel(
                total_half_integral(&params(10.0, 1.0, 1.5), &s).unwrap(),
                GINF_RHO10_A1_5
            ) < 1e-9
        );
    }

    #[test]
    fn total_agrees_with_truncation_plus_tail_bound() {
        let s = SolverSettings::default();
        for (rho, alpha) in [(10.0, 2.0), (10.0, 3.0), (100.0, 4.0)] {
            let p = params(rho, 1.0, alpha);
            let x = 1e3;
            let truncated = half_integral(x, &p, &s).unwrap();
            let total = total_half_integral(&p, &s).unwrap();
            let bound = tail_bound(x, &p);
            assert!(total >= truncated);
            assert!(total - truncated <= bound * (1.0 + 1e-6));
        }
    }

    #[test]
    fn closed_form_examples() {
        let p = params(10.0, 1.0, 2.0);
        assert_eq!(closed_form_half_integral_alpha2(0.0, &p).unwrap(), 0.0);
        let g = closed_form_half_integral_alpha2(1.0, &p).unwrap();
        assert!(rel(g, G1_RHO10_A2) < 1e-13);
        let far = closed_form_half_integral_alpha2(1e6, &p).unwrap();
        assert!(rel(far, GINF_RHO10_A2) < 1e-4);
        assert!(rel(closed_form_total_half_integral_alpha2(&p).unwrap(), GINF_RHO10_A2) < 1e-14);
    }

    #[test]
    fn closed_form_requires_alpha_two() {
        assert!(matches!(
            closed_form_half_integral_alpha2(1.0, &params(10.0, 1.0, 3.0)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn closed_form_matches_simpson() {
        // composite Simpson on the raw integrand, independent of both routes
        let p = params(10.0, 1.0, 2.0);
        let n = 200_000;
        let h = 1.0 / n as f64;
        let mut acc = p.capacity_at_position(0.0) + p.capacity_at_position(1.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * p.capacity_at_position(i as f64 * h);
        }
        let simpson = acc * h / 3.0;
        assert!(rel(closed_form_half_integral_alpha2(1.0, &p).unwrap(), simpson) < 1e-8);
    }

    #[test]
    fn service_up_to_time_examples() {
        let s = SolverSettings::default();
        let p = params(10.0, 1.0, 2.0);
        let v1 = TrainProfile::new(1.0).unwrap();
        assert!(rel(service_up_to_time(0.0, &p, v1, &s).unwrap(), GINF_RHO10_A2) < 1e-10);
        assert!(
            rel(
                service_up_to_time(f64::INFINITY, &p, v1, &s).unwrap(),
                2.0 * GINF_RHO10_A2
            ) < 1e-10
        );
        assert_eq!(service_up_to_time(f64::NEG_INFINITY, &p, v1, &s).unwrap(), 0.0);
        let s1 = service_up_to_time(1.0, &p, v1, &s).unwrap();
        assert!(rel(s1, GINF_RHO10_A2 + G1_RHO10_A2) < 1e-10);
        let sm1 = service_up_to_time(-1.0, &p, v1, &s).unwrap();
        assert!(rel(sm1, GINF_RHO10_A2 - G1_RHO10_A2) < 1e-10);
    }

    #[test]
    fn total_service_scales_as_inverse_speed() {
        let s = SolverSettings::default();
        let p = params(10.0, 1.0, 2.0);
        let at = |v: f64| total_service(&p, TrainProfile::new(v).unwrap(), &s).unwrap();
        assert!(rel(at(1.0), 2.0 * GINF_RHO10_A2) < 1e-10);
        assert!((at(1.0) - 20.99973).abs() < 5e-4);
        assert!(rel(at(2.0), GINF_RHO10_A2) < 1e-10);
        assert!(rel(at(4.0), 0.5 * GINF_RHO10_A2) < 1e-10);
    }

    #[test]
    fn dominant_ratio_examples() {
        let s = SolverSettings::default();
        let p = params(10.0, 1.0, 2.0);
        assert_eq!(dominant_ratio(0.0, &p, &s).unwrap(), 0.0);
        let eta = dominant_ratio(2.0, &p, &s).unwrap();
        assert!((eta - G1_RHO10_A2 / GINF_RHO10_A2).abs() < 1e-10);
        assert!((eta - 0.29727).abs() < 1e-5);
        assert!((dominant_ratio(1e6, &p, &s).unwrap() - 1.0).abs() < 1e-4);
        assert!(dominant_ratio(-1.0, &p, &s).is_err());
    }

    #[test]
    fn midpoint_riemann_sums_agree() {
        // 10^6-panel midpoint sums computed independently in numpy
        let s = SolverSettings::default();
        let cases = [
            ((1.0, 10.0, 1.0, 2.0), 3.121_216_382_166_114),
            ((5.0, 1.0, 10.0, 2.0), 0.066_580_644_210_472_54),
            ((3.0, 100.0, 1.0, 3.0), 12.933_647_577_694_746),
        ];
        for ((l, rho, d0, alpha), mid) in cases {
            let g = half_integral(l, &params(rho, d0, alpha), &s).unwrap();
            assert!(
                rel(g, mid) < 1e-6,
                "L={l} rho={rho} d0={d0} alpha={alpha}: {g} vs {mid}"
            );
        }
    }

    #[test]
    fn invalid_settings_rejected() {
        let s = SolverSettings {
            quad_rel_tol: 0.0,
            ..SolverSettings::default()
        };
        assert!(half_integral(1.0, &params(10.0, 1.0, 2.0), &s).is_err());
        let s = SolverSettings {
            max_root_iters: 0,
            ..SolverSettings::default()
        };
        assert!(s.validate().is_err());
    }
}
