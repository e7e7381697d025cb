//! Ego-only cost terms: goal progress, reference tracking, speed, comfort
//! and reversing.

use serde::{Deserialize, Serialize};

use crate::model::{wrap_angle, AgentState, Trajectory, Vec2};
use crate::scalar::Scalar;

/// Reference-speed parameters derived from the scene geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSpeed<S> {
    /// Target speed `0.8 · |goal − start| / reference duration`.
    pub eps_vr: S,
    /// Dead band `max(0.1 · eps_vr, 1)`.
    pub eps_r: S,
    /// Normalizer `max(30 − eps_vr, 10)`.
    pub eps_limit: S,
}

impl<S: Scalar> ReferenceSpeed<S> {
    pub fn new(goal: Vec2<S>, start: Vec2<S>, reference_duration: S) -> Self {
        let eps_vr = if reference_duration > S::zero() {
            S::lit(0.8) * (goal - start).norm() / reference_duration
        } else {
            S::zero()
        };
        Self {
            eps_vr,
            eps_r: (S::lit(0.1) * eps_vr).max(S::one()),
            eps_limit: (S::lit(30.0) - eps_vr).max(S::lit(10.0)),
        }
    }
}

/// `|goal − x| / |goal − x0|`, or 0 when the ego starts on the goal.
pub fn cost_d2g<S: Scalar>(position: Vec2<S>, goal: Vec2<S>, start: Vec2<S>) -> S {
    let denom = (goal - start).norm();
    if denom == S::zero() {
        return S::zero();
    }
    (goal - position).norm() / denom
}

/// Reference polyline with per-vertex headings.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePath<S> {
    points: Vec<Vec2<S>>,
    headings: Vec<S>,
}

impl<S: Scalar> ReferencePath<S> {
    pub fn from_trajectory(t: &Trajectory<S>) -> Self {
        Self {
            points: t.states.iter().map(|s| s.position).collect(),
            headings: t.states.iter().map(|s| s.heading).collect(),
        }
    }

    /// Closest point on the polyline and the heading interpolated there.
    pub fn nearest(&self, x: Vec2<S>) -> (Vec2<S>, S) {
        let mut best = (self.points[0], self.headings[0]);
        let mut best_d = (x - self.points[0]).norm_sq();
        for i in 0..self.points.len().saturating_sub(1) {
            let (p, q) = (self.points[i], self.points[i + 1]);
            let d = q - p;
            let len_sq = d.norm_sq();
            let t = if len_sq > S::zero() {
                ((x - p).dot(d) / len_sq).max(S::zero()).min(S::one())
            } else {
                S::zero()
            };
            let c = p + d * t;
            let dist = (x - c).norm_sq();
            if dist < best_d {
                best_d = dist;
                let dh = wrap_angle(self.headings[i + 1] - self.headings[i]);
                best = (c, wrap_angle(self.headings[i] + dh * t));
            }
        }
        best
    }
}

/// `¼|x*_r − x|⁴ + ½(θ*_r − θ)²` at the nearest reference point.
pub fn cost_d2r<S: Scalar>(ego: &AgentState<S>, reference: &ReferencePath<S>) -> S {
    let (p, h) = reference.nearest(ego.position);
    let d2 = (p - ego.position).norm_sq();
    let dh = wrap_angle(h - ego.heading);
    S::lit(0.25) * d2 * d2 + S::lit(0.5) * dh * dh
}

/// `max(|v − eps_vr| − eps_r, 0)² / eps_limit²`.
pub fn cost_velocity<S: Scalar>(speed: S, r: &ReferenceSpeed<S>) -> S {
    let excess = ((speed - r.eps_vr).abs() - r.eps_r).max(S::zero());
    excess * excess / (r.eps_limit * r.eps_limit)
}

/// Ego derivatives from backward finite differences. Quantities that need
/// more history than available are zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EgoDerivatives<S> {
    pub accel_long: S,
    pub accel_lat: S,
    pub jerk_long: S,
    pub jerk_norm: S,
    pub yaw_rate: S,
    pub yaw_accel: S,
}

impl<S: Scalar> EgoDerivatives<S> {
    /// `history` ends with the current state; only the last three are read.
    pub fn from_history(history: &[AgentState<S>], dt: S) -> Self {
        let n = history.len();
        let mut d = Self {
            accel_long: S::zero(),
            accel_lat: S::zero(),
            jerk_long: S::zero(),
            jerk_norm: S::zero(),
            yaw_rate: S::zero(),
            yaw_accel: S::zero(),
        };
        if n < 2 {
            return d;
        }
        let cur = &history[n - 1];
        let prev = &history[n - 2];
        let h = Vec2::from_angle(cur.heading);
        let a = (cur.velocity() - prev.velocity()) * (S::one() / dt);
        d.accel_long = a.dot(h);
        d.accel_lat = a.dot(h.perp());
        d.yaw_rate = wrap_angle(cur.heading - prev.heading) / dt;
        if n >= 3 {
            let pprev = &history[n - 3];
            let a_prev = (prev.velocity() - pprev.velocity()) * (S::one() / dt);
            let j = (a - a_prev) * (S::one() / dt);
            d.jerk_long = j.dot(h);
            d.jerk_norm = j.norm();
            let yaw_prev = wrap_angle(prev.heading - pprev.heading) / dt;
            d.yaw_accel = (d.yaw_rate - yaw_prev) / dt;
        }
        d
    }
}

/// Mean of the six comfort hinge terms.
pub fn cost_comfort<S: Scalar>(d: &EgoDerivatives<S>, eps: &[S; 6]) -> S {
    let vals = [
        d.accel_long.abs(),
        d.accel_lat.abs(),
        d.jerk_long.abs(),
        d.jerk_norm,
        d.yaw_rate.abs(),
        d.yaw_accel.abs(),
    ];
    let mut sum = S::zero();
    for (v, e) in vals.iter().zip(eps) {
        sum = sum + (*v / *e - S::one()).max(S::zero());
    }
    sum / S::lit(6.0)
}

/// Indicator of negative longitudinal speed.
pub fn cost_reverse<S: Scalar>(ego: &AgentState<S>) -> S {
    if ego.speed < S::zero() {
        S::one()
    } else {
        S::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AgentClass;

    fn veh(x: f64, y: f64, h: f64, v: f64) -> AgentState<f64> {
        AgentState::new(Vec2::new(x, y), h, v, AgentClass::Vehicle)
    }

    const COMFORT: [f64; 6] = [2.4, 4.89, 4.13, 8.37, 0.95, 1.93];

    #[test]
    fn d2g() {
        let g = Vec2::new(100.0, 0.0);
        assert_eq!(cost_d2g(g, g, Vec2::zero()), 0.0);
        assert_eq!(cost_d2g(Vec2::new(50.0, 0.0), g, Vec2::zero()), 0.5);
        assert_eq!(cost_d2g(Vec2::new(3.0, 4.0), g, g), 0.0);
    }

    #[test]
    fn reference_speed_params() {
        let r = ReferenceSpeed::<f64>::new(Vec2::new(100.0, 0.0), Vec2::zero(), 10.0);
        assert!((r.eps_vr - 8.0).abs() < 1e-12);
        assert_eq!(r.eps_r, 1.0);
        assert_eq!(r.eps_limit, 22.0);
        let fast = ReferenceSpeed::<f64>::new(Vec2::new(1000.0, 0.0), Vec2::zero(), 25.0);
        assert!((fast.eps_r - 3.2).abs() < 1e-12);
        assert_eq!(fast.eps_limit, 10.0);
    }

    #[test]
    fn velocity_dead_band() {
        let r = ReferenceSpeed::<f64> { eps_vr: 8.0, eps_r: 1.0, eps_limit: 22.0 };
        assert_eq!(cost_velocity(8.5, &r), 0.0);
        assert_eq!(cost_velocity(7.0, &r), 0.0);
        assert!((cost_velocity(11.0, &r) - 4.0 / 484.0).abs() < 1e-15);
    }

    #[test]
    fn reverse_indicator() {
        assert_eq!(cost_reverse(&veh(0.0, 0.0, 0.0, -0.1)), 1.0);
        assert_eq!(cost_reverse(&veh(0.0, 0.0, 0.0, 0.0)), 0.0);
    }

    #[test]
    fn comfort_zero_inside_thresholds() {
        let h = [veh(0.0, 0.0, 0.0, 10.0), veh(5.0, 0.0, 0.0, 10.5), veh(10.25, 0.0, 0.05, 11.0)];
        let d = EgoDerivatives::from_history(&h, 0.5);
        assert_eq!(cost_comfort(&d, &COMFORT), 0.0);
    }

    #[test]
    fn comfort_hinge_counts_excess() {
        // Braking at 4.8 m/s² on a straight line: accel term 1, jerk 0.
        let h = [veh(0.0, 0.0, 0.0, 10.0), veh(5.0, 0.0, 0.0, 7.6)];
        let d = EgoDerivatives::from_history(&h, 0.5);
        assert!((d.accel_long + 4.8).abs() < 1e-12);
        assert!((cost_comfort(&d, &COMFORT) - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn d2r_projection_on_segment() {
        let t = Trajectory::new(
            0,
            0.5,
            vec![veh(0.0, 0.0, 0.0, 10.0), veh(5.0, 0.0, 0.0, 10.0), veh(10.0, 0.0, 0.0, 10.0)],
            None,
        )
        .unwrap();
        let path = ReferencePath::from_trajectory(&t);
        assert!(cost_d2r(&veh(7.3, 0.0, 0.0, 10.0), &path) < 1e-30);
        let c = cost_d2r(&veh(7.3, 2.0, 0.5, 10.0), &path);
        assert!((c - (0.25 * 16.0 + 0.5 * 0.25)).abs() < 1e-12);
    }
}
