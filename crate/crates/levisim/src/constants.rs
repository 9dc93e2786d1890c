//! Physical constants (SI) and unit conversions.

/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Speed of light in vacuum, m/s.
pub const C_LIGHT: f64 = 2.997_924_58e8;

/// Vacuum permittivity, F/m.
pub const EPS_0: f64 = 8.854_187_8128e-12;

/// Standard gravity, m/s^2.
pub const G_EARTH: f64 = 9.806_65;

/// One Torr in pascal.
pub const TORR: f64 = 133.322_368_421;

pub fn torr_to_pa(p_torr: f64) -> f64 {
    p_torr * TORR
}
