//! The three-commodity reference market used by the reproduction run and
//! as an anchor for bound sweeps: a misreport raises agent 1's utility by
//! about 1.5, above the two-commodity ceiling `e^(1/e)`.

use crate::market::{Economy, UtilityFunction};

pub const ENDOWMENTS: [[f64; 3]; 2] = [[0.99, 0.01, 0.01], [0.01, 0.99, 0.99]];
pub const ALPHA: [[f64; 3]; 2] = [[0.2, 0.3, 0.5], [0.4, 0.6, 0.0]];
/// Agent 1's profitable report.
pub const MISREPORT: [f64; 3] = [0.85, 0.1, 0.05];

pub fn reference_economy() -> Economy {
    Economy::new(
        ENDOWMENTS.iter().map(|e| e.to_vec()).collect(),
        ALPHA
            .iter()
            .map(|a| UtilityFunction::cobb_douglas(a.to_vec()).expect("valid exponents"))
            .collect(),
    )
    .expect("valid shape")
}

pub fn reference_misreport() -> UtilityFunction {
    UtilityFunction::cobb_douglas(MISREPORT.to_vec()).expect("valid exponents")
}
