//! Shared fixtures for the criterion benchmarks.

use quasivar::ExponentConfig;

/// Coupled configuration with `p = 3/2`, `s = 1`, `q = 8`.
pub fn cfg_a() -> ExponentConfig {
    ExponentConfig {
        n: 2,
        p1: 1.5,
        p2: 1.5,
        s1: 1.0,
        s2: 1.0,
        q1: 8.0,
        q2: 8.0,
        gamma1: 4.0,
        gamma2: 4.0,
        theta1: 0.125,
        theta2: 0.125,
        c_star: 1.0,
    }
}

/// Decoupled cubic configuration with `p = 2`, `s = 0`, `q = 4`.
pub fn cfg_b() -> ExponentConfig {
    ExponentConfig {
        n: 2,
        p1: 2.0,
        p2: 2.0,
        s1: 0.0,
        s2: 0.0,
        q1: 4.0,
        q2: 4.0,
        gamma1: 2.0,
        gamma2: 2.0,
        theta1: 0.25,
        theta2: 0.25,
        c_star: 0.0,
    }
}
