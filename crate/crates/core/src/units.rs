//! Unit conversions. Everything inside the crate is in Hartree atomic units.

/// CODATA 2018 Bohr radius in Ångström.
pub const BOHR_ANGSTROM: f64 = 0.529177210903;
pub const HARTREE_KCAL_MOL: f64 = 627.5094740631;

pub fn angstrom_to_bohr(x: f64) -> f64 {
    x / BOHR_ANGSTROM
}

pub fn bohr_to_angstrom(x: f64) -> f64 {
    x * BOHR_ANGSTROM
}

/// Rydberg to Hartree.
pub fn ry_to_ha(e: f64) -> f64 {
    0.5 * e
}

pub fn ha_to_kcal(e: f64) -> f64 {
    e * HARTREE_KCAL_MOL
}
