//! Phase conventions. Every phase handed out by this crate lies in (−π, π].

use std::f64::consts::{PI, TAU};

/// Wraps `phase` into (−π, π].
pub fn wrap(phase: f64) -> f64 {
    let r = phase.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Distance between two phases on the circle, in [0, π].
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap(a - b).abs()
}
