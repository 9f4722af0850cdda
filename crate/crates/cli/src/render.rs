//! Output formatting: human output prints bits with 6 decimals, machine
//! output with 12 significant digits in scientific form.

use crate::Format;

/// One value in bits under the given format.
pub fn bits(format: Format, x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x }; // fold -0.0
    match format {
        Format::Human => format!("{x:.6}"),
        Format::Machine => format!("{x:.11e}"),
    }
}

/// A comma-joined vector of values.
pub fn vector(format: Format, xs: &[f64]) -> String {
    xs.iter()
        .map(|&x| bits(format, x))
        .collect::<Vec<_>>()
        .join(",")
}
