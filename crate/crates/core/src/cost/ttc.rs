use crate::model::{AgentState, Vec2};
use crate::scalar::Scalar;

/// Time until two constant-velocity circles touch.
///
/// Solves `|dx + t·dv|² = r²` and returns the smaller nonnegative root,
/// `0` if the circles already overlap and `+∞` if they never meet.
#[inline]
pub fn ttc_relative<S: Scalar>(dx: Vec2<S>, dv: Vec2<S>, r: S) -> S {
    let c = dx.norm_sq() - r * r;
    if c <= S::zero() {
        return S::zero();
    }
    let a = dv.norm_sq();
    let b = dx.dot(dv);
    if a == S::zero() || b >= S::zero() {
        // Not closing: with c > 0 both roots are negative or absent.
        return S::infinity();
    }
    let disc = b * b - a * c;
    if disc < S::zero() {
        return S::infinity();
    }
    // Smaller root c / (-b + sqrt(disc)), cancellation-free for b < 0.
    c / (-b + disc.sqrt())
}

/// Time to collision between two agents moving at constant velocity along
/// their current headings, modeled as circles of radii `radii.0` and `radii.1`.
pub fn time_to_collision<S: Scalar>(ego: &AgentState<S>, agent: &AgentState<S>, radii: (S, S)) -> S {
    ttc_relative(
        agent.position - ego.position,
        agent.velocity() - ego.velocity(),
        radii.0 + radii.1,
    )
}
