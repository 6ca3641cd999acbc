//! WebAssembly bindings for the demo page in `www/`.
//!
//! Each export wraps a plain function from [`curves`] that is tested
//! natively. Arrays cross the boundary as flat `Float64Array`s.

pub mod curves;

use wasm_bindgen::prelude::*;

fn to_js(e: String) -> JsError {
    JsError::new(&e)
}

/// Detection probability at `n` probe phases for a canonical which-way
/// detector with coherence factor `eps_modulus · e^{i delta}`.
#[wasm_bindgen]
pub fn fringe_curve(theta: f64, phi: f64, eps_modulus: f64, delta: f64, n: usize) -> Result<Vec<f64>, JsError> {
    curves::fringe_curve(theta, phi, eps_modulus, delta, n).map_err(to_js)
}

/// Unconditioned and per-outcome fringes after reading the detector in
/// `basis` ("eigen" or "computational"). Layout: see [`curves::Erasure::flatten`].
#[wasm_bindgen]
pub fn erasure_curves(theta: f64, eps_modulus: f64, basis: &str, n: usize) -> Result<Vec<f64>, JsError> {
    curves::erasure_curves(theta, eps_modulus, basis, n)
        .map(|e| e.flatten())
        .map_err(to_js)
}

/// Normalized histogram of `shots` sampled kicks over `bins` cells of
/// (−π, π], followed by the modulus of the weight's ε.
#[wasm_bindgen]
pub fn kick_histogram(kind: &str, param: f64, shots: u32, bins: usize, seed: u32) -> Result<Vec<f64>, JsError> {
    curves::kick_histogram(kind, param, shots, bins, seed as u64).map_err(to_js)
}
