//! Physical constants (SI).

use std::f64::consts::PI;

pub const HBAR: f64 = 1.054_571_817e-34;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Mass of a 171Yb+ ion.
pub const YB171_MASS: f64 = 170.936_331_5 * ATOMIC_MASS_UNIT;

/// Hyperfine qubit splitting of 171Yb+ (Hz).
pub const YB171_QUBIT_HZ: f64 = 12.642_812e9;

/// Net wavevector of two counter-propagating-at-90-degrees 355 nm Raman beams.
pub const RAMAN_355_WAVEVECTOR: f64 = std::f64::consts::SQRT_2 * 2.0 * PI / 355e-9;

/// e^2 / (4 pi eps0), in J m.
pub fn coulomb_constant() -> f64 {
    ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (4.0 * PI * VACUUM_PERMITTIVITY)
}

#[inline]
pub fn angular(freq_hz: f64) -> f64 {
    2.0 * PI * freq_hz
}
