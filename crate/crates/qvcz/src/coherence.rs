//! Numerical assembly of the post-selected coherence elements g²_jklm(ν) by
//! quadrature over the grating aperture, the engine side of the
//! numeric-vs-analytic cross-check.
//!
//! With both detectors in coincidence (X₂ = X₁, X₄ = X₃) the four-point
//! correlation collapses to two contributions:
//!
//! * a direct term `∫A⁽¹⁾(u,u)[j,k] du · ∫A⁽²⁾(v,v)[l,m] dv`, independent of ν
//!   because the far-field phase cancels pairwise, and
//! * an exchange term `∫∫A⁽¹⁾(u,v)[j,k]·A⁽²⁾(v,u)[l,m]·e^{2πiν(u−v)} du dv`,
//!   which carries all the ν dependence (two-photon scattering).
//!
//! Each element is normalized by one per-source constant N, the direct term
//! of HHHH; this reproduces the constant baselines of the analytic forms and
//! leaves cross elements without spurious offsets.

use num_complex::Complex64;

use crate::grating::{element_integrand, GratingCoordinate, SourceModel, TermKind};
use crate::quadrature::{integrate1d, integrate2d, QuadratureSpec};
use crate::types::{ElementIndex, G2Matrix};
use crate::{Error, Result};

/// One evaluated coherence element: its raw direct and exchange integrals and
/// the normalized g² value (direct + exchange)/N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceResult {
    pub element: ElementIndex,
    pub nu: f64,
    pub direct: Complex64,
    pub exchange: Complex64,
    pub normalized: Complex64,
}

/// Direct-term integral of one element: ν-independent and real.
///
/// The integrand is separable, `A⁽¹⁾(u,u)[j,k]·A⁽²⁾(v,v)[l,m]`, so two 1D
/// passes replace the 2D quadrature.
pub fn direct_term(
    source: &SourceModel,
    element: ElementIndex,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let first = integrate1d(
        |u| {
            let u = GratingCoordinate::new(u).expect("quadrature node inside aperture");
            crate::grating::kernel(source, crate::grating::Mode::One, u, u)
                .get(element.j, element.k)
        },
        spec,
    )?;
    let second = integrate1d(
        |v| {
            let v = GratingCoordinate::new(v).expect("quadrature node inside aperture");
            crate::grating::kernel(source, crate::grating::Mode::Two, v, v)
                .get(element.l, element.m)
        },
        spec,
    )?;
    Ok(first * second)
}

/// Exchange-term integral of one element at ν, with the far-field phase
/// e^{2πiν(u−v)}. Errors for sources without an exchange delta.
pub fn exchange_term(
    source: &SourceModel,
    element: ElementIndex,
    nu: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    if !source.has_exchange_term() {
        return Err(Error::ExchangeUnsupported(source.kind.name()));
    }
    let two_pi_nu = 2.0 * std::f64::consts::PI * nu;
    integrate2d(
        |u, v| {
            let cu = GratingCoordinate::new(u).expect("quadrature node inside aperture");
            let cv = GratingCoordinate::new(v).expect("quadrature node inside aperture");
            let base = element_integrand(source, element, TermKind::Exchange, cu, cv)
                .expect("exchange support checked above");
            base * Complex64::from_polar(1.0, two_pi_nu * (u - v))
        },
        spec,
    )
}

/// Per-source normalization constant N = direct term of HHHH.
pub fn normalization(source: &SourceModel, spec: &QuadratureSpec) -> Result<f64> {
    let hhhh: ElementIndex = "HHHH".parse().expect("static element name");
    let n = direct_term(source, hhhh, spec)?.re;
    if n <= 0.0 {
        return Err(Error::DegenerateSource);
    }
    Ok(n)
}

/// One normalized coherence element by quadrature:
/// g² = (direct + exchange)/N, with exchange ≡ 0 for the classical source.
pub fn g2_numeric(
    source: &SourceModel,
    element: ElementIndex,
    nu: f64,
    spec: &QuadratureSpec,
) -> Result<CoherenceResult> {
    let n = normalization(source, spec)?;
    let direct = direct_term(source, element, spec)?;
    let exchange = if source.has_exchange_term() {
        exchange_term(source, element, nu, spec)?
    } else {
        Complex64::new(0.0, 0.0)
    };
    Ok(CoherenceResult {
        element,
        nu,
        direct,
        exchange,
        normalized: (direct + exchange) / n,
    })
}

/// The full 4×4 coherence matrix at one ν.
pub fn g2_matrix_numeric(source: &SourceModel, nu: f64, spec: &QuadratureSpec) -> Result<G2Matrix> {
    let n = normalization(source, spec)?;
    let mut error = None;
    let matrix = G2Matrix::from_fn(nu, |element| {
        let value = direct_term(source, element, spec).and_then(|direct| {
            let exchange = if source.has_exchange_term() {
                exchange_term(source, element, nu, spec)?
            } else {
                Complex64::new(0.0, 0.0)
            };
            Ok((direct + exchange) / n)
        });
        match value {
            Ok(v) => v,
            Err(e) => {
                error.get_or_insert(e);
                Complex64::new(f64::NAN, f64::NAN)
            }
        }
    });
    match error {
        Some(e) => Err(e),
        None => Ok(matrix),
    }
}
