//! Real spherical harmonics in the orthonormal convention without the
//! Condon-Shortley sign.
//!
//! With `S_l^m` the fully normalized associated Legendre function evaluated
//! at `cos(colat)`, the basis is
//!
//! ```text
//! Y_{l,0}  = S_l^0
//! Y_{l,m}  = √2 · S_l^m · cos(m·lon)   (m > 0)
//! Y_{l,-m} = √2 · S_l^m · sin(m·lon)   (m > 0)
//! ```
//!
//! The normalization is chosen so that the Y are orthonormal with respect to
//! the surface measure of the unit sphere (not its average), matching the
//! constant eigenfunction `(4π)^{-1/2}`.

/// Fully normalized associated Legendre `S_l^m(x)` with `s = sin(colat)`
/// passed separately for stability near the poles. Uses the standard stable
/// three-term recurrences; all factors stay O(1) so degrees in the hundreds
/// are safe.
fn normalized_legendre(l: u32, m: u32, x: f64, s: f64) -> f64 {
    debug_assert!(m <= l);
    // S_0^0 = (4π)^{-1/2}
    let mut p_mm = 0.28209479177387814;
    for k in 1..=m {
        let k = k as f64;
        p_mm *= s * ((2.0 * k + 1.0) / (2.0 * k)).sqrt();
    }
    if l == m {
        return p_mm;
    }
    let mut p_prev = p_mm;
    let mut p = x * ((2.0 * m as f64 + 3.0).sqrt()) * p_mm;
    for ll in (m + 2)..=l {
        let lf = ll as f64;
        let mf = m as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
            .sqrt();
        let next = a * (x * p - b * p_prev);
        p_prev = p;
        p = next;
    }
    p
}

pub(crate) fn real_harmonic(degree: u32, order: i32, colat: f64, lon: f64) -> f64 {
    let m = order.unsigned_abs();
    let s = normalized_legendre(degree, m, colat.cos(), colat.sin());
    match order.cmp(&0) {
        std::cmp::Ordering::Equal => s,
        std::cmp::Ordering::Greater => {
            std::f64::consts::SQRT_2 * s * (m as f64 * lon).cos()
        }
        std::cmp::Ordering::Less => std::f64::consts::SQRT_2 * s * (m as f64 * lon).sin(),
    }
}
