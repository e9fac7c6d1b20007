//! Source models and the polarization-grating correlation kernels.
//!
//! The grating is a linear polarizer whose transmission axis rotates with
//! position, θ(x) = πx/L, acting on a spatially incoherent (delta-correlated)
//! source over the rect aperture |x| ≤ L/2. In the dimensionless coordinate
//! u = x/L the Jones projector is P(u) = n̂(u)n̂(u)ᵀ with
//! n̂(u) = (cos πu, sin πu)ᵀ, and every coherence integrand is built from the
//! pairwise kernel A(u,v) = P(u)·ρ·P(v), where ρ is the per-mode polarization
//! density matrix of the source.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::types::{ComplexMatrix2, ElementIndex};
use crate::{Error, Result};

/// Which incoherent source feeds the grating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourceKind {
    /// Two thermal modes, unpolarized: per-mode density matrix I/2. The
    /// four-point correlation keeps both delta terms (direct + exchange).
    UnpolarizedTwoMode,
    /// Indistinguishable horizontally polarized photons: per-mode matrix
    /// |H⟩⟨H|. Both delta terms.
    HorizontalIndistinguishable,
    /// Classical control: per-mode matrix I, and only the direct delta term
    /// δ(x₂−x₁)δ(x₃−x₄) survives; no two-photon exchange.
    ClassicalIncoherent,
}

impl SourceKind {
    pub const ALL: [SourceKind; 3] = [
        SourceKind::UnpolarizedTwoMode,
        SourceKind::HorizontalIndistinguishable,
        SourceKind::ClassicalIncoherent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SourceKind::UnpolarizedTwoMode => "unpolarized",
            SourceKind::HorizontalIndistinguishable => "horizontal",
            SourceKind::ClassicalIncoherent => "classical",
        }
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SourceKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "unpolarized" => Ok(SourceKind::UnpolarizedTwoMode),
            "horizontal" => Ok(SourceKind::HorizontalIndistinguishable),
            "classical" => Ok(SourceKind::ClassicalIncoherent),
            other => Err(format!(
                "unknown source {other:?}; expected unpolarized, horizontal, or classical"
            )),
        }
    }
}

/// A source selection plus its (physically irrelevant) overall intensity.
/// I₀ cancels in every normalized g²; it is kept so raw direct/exchange
/// values scale the way the propagation integrals say they should.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    pub kind: SourceKind,
    pub intensity_scale: f64,
}

impl SourceModel {
    pub fn new(kind: SourceKind) -> Self {
        SourceModel {
            kind,
            intensity_scale: 1.0,
        }
    }

    /// Per-mode 2×2 polarization density matrix (Hermitian, PSD).
    pub fn density_matrix(&self) -> ComplexMatrix2 {
        match self.kind {
            SourceKind::UnpolarizedTwoMode => ComplexMatrix2::identity().scale(0.5),
            SourceKind::HorizontalIndistinguishable => {
                ComplexMatrix2::from_real([[1.0, 0.0], [0.0, 0.0]])
            }
            SourceKind::ClassicalIncoherent => ComplexMatrix2::identity(),
        }
    }

    /// True iff the four-point correlation carries the exchange delta term
    /// δ(x₁−x₄)δ(x₃−x₂). The classical control keeps only the direct term.
    pub fn has_exchange_term(&self) -> bool {
        !matches!(self.kind, SourceKind::ClassicalIncoherent)
    }
}

/// Dimensionless grating position u = x/L, confined to the rect aperture
/// |u| ≤ 1/2. Constructing one is the only aperture check; downstream
/// operations take the coordinate as already validated.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GratingCoordinate(f64);

impl GratingCoordinate {
    pub fn new(u: f64) -> Result<Self> {
        if !u.is_finite() || u.abs() > 0.5 {
            return Err(Error::OutOfAperture(u));
        }
        Ok(GratingCoordinate(u))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Local polarizer angle θ = πu.
    pub fn theta(self) -> f64 {
        std::f64::consts::PI * self.0
    }
}

/// Jones matrix of the grating at u: the rank-1 projector onto the local
/// transmission axis, [[cos²θ, cosθ sinθ], [cosθ sinθ, sin²θ]] with θ = πu.
/// Real, symmetric, idempotent, trace 1.
pub fn jones_projector(u: GratingCoordinate) -> ComplexMatrix2 {
    let theta = u.theta();
    let (s, c) = theta.sin_cos();
    ComplexMatrix2::from_real([[c * c, c * s], [c * s, s * s]])
}

/// Source mode label. All shipped sources are mode-symmetric, but the
/// propagation law is mode-resolved, so the label is kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    One,
    Two,
}

/// Pairwise correlation kernel A(u,v) = P(u)·ρ_mode·P(v): the 2×2
/// polarization part of the post-grating two-point correlation with the
/// source delta already factored out. Real for all shipped sources.
pub fn kernel(source: &SourceModel, _mode: Mode, u: GratingCoordinate, v: GratingCoordinate) -> ComplexMatrix2 {
    let p_u = jones_projector(u);
    let p_v = jones_projector(v);
    p_u.mul(&source.density_matrix())
        .mul(&p_v)
        .scale(source.intensity_scale)
}

/// Which delta term of the four-point correlation an integrand belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermKind {
    /// δ(x₁−x₂)δ(x₃−x₄): photons self-correlate at each detector. Under the
    /// coincidence setting this term is ν-independent.
    Direct,
    /// δ(x₁−x₄)δ(x₃−x₂): two-photon exchange. Carries the e^{2πiν(u−v)}
    /// phase (applied by the caller, not here).
    Exchange,
}

/// Scalar integrand of one coherence element g²_jklm, per term:
///
/// * Direct:   `A⁽¹⁾(u,u)[j,k] · A⁽²⁾(v,v)[l,m]`
/// * Exchange: `A⁽¹⁾(u,v)[j,k] · A⁽²⁾(v,u)[l,m]`
///
/// The exchange phase factor is applied in `coherence`, which owns ν.
pub fn element_integrand(
    source: &SourceModel,
    element: ElementIndex,
    term: TermKind,
    u: GratingCoordinate,
    v: GratingCoordinate,
) -> Result<Complex64> {
    match term {
        TermKind::Direct => {
            let a1 = kernel(source, Mode::One, u, u);
            let a2 = kernel(source, Mode::Two, v, v);
            Ok(a1.get(element.j, element.k) * a2.get(element.l, element.m))
        }
        TermKind::Exchange => {
            if !source.has_exchange_term() {
                return Err(Error::ExchangeUnsupported(source.kind.name()));
            }
            let a1 = kernel(source, Mode::One, u, v);
            let a2 = kernel(source, Mode::Two, v, u);
            Ok(a1.get(element.j, element.k) * a2.get(element.l, element.m))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Polarization;
    use proptest::prelude::*;

    fn coord(u: f64) -> GratingCoordinate {
        GratingCoordinate::new(u).unwrap()
    }

    #[test]
    fn aperture_is_enforced() {
        assert!(GratingCoordinate::new(0.5).is_ok());
        assert!(GratingCoordinate::new(-0.5).is_ok());
        assert!(matches!(
            GratingCoordinate::new(0.5000001),
            Err(Error::OutOfAperture(_))
        ));
        assert!(GratingCoordinate::new(f64::NAN).is_err());
    }

    #[test]
    fn projector_landmarks() {
        // u=0 projects onto H.
        let p0 = jones_projector(coord(0.0));
        assert!(p0.approx_eq(&ComplexMatrix2::from_real([[1.0, 0.0], [0.0, 0.0]]), 1e-15));
        // u=1/4: projector onto the diagonal state, all entries 1/2.
        let p_quarter = jones_projector(coord(0.25));
        assert!(p_quarter.approx_eq(&ComplexMatrix2::from_real([[0.5, 0.5], [0.5, 0.5]]), 1e-15));
        // u=1/2 projects onto V.
        let p_half = jones_projector(coord(0.5));
        assert!(p_half.approx_eq(&ComplexMatrix2::from_real([[0.0, 0.0], [0.0, 1.0]]), 1e-15));
    }

    #[test]
    fn projector_is_idempotent_and_unit_trace() {
        for i in 0..=20 {
            let u = coord(-0.5 + i as f64 / 20.0);
            let p = jones_projector(u);
            assert!(p.mul(&p).approx_eq(&p, 1e-12), "P² = P at u = {}", u.value());
            assert!((p.trace().re - 1.0).abs() < 1e-12);
            assert!(p.trace().im.abs() < 1e-15);
        }
    }

    #[test]
    fn kernel_examples() {
        let unpol = SourceModel::new(SourceKind::UnpolarizedTwoMode);
        let horiz = SourceModel::new(SourceKind::HorizontalIndistinguishable);

        // Unpolarized at u=v=0: P(0)(I/2)P(0) = [[1/2,0],[0,0]].
        let a = kernel(&unpol, Mode::One, coord(0.0), coord(0.0));
        assert!(a.approx_eq(&ComplexMatrix2::from_real([[0.5, 0.0], [0.0, 0.0]]), 1e-15));

        // Horizontal at u=v=0: projector fixed point.
        let a = kernel(&horiz, Mode::One, coord(0.0), coord(0.0));
        assert!(a.approx_eq(&ComplexMatrix2::from_real([[1.0, 0.0], [0.0, 0.0]]), 1e-15));

        // Orthogonal projectors annihilate: u=0, v=1/2.
        let a = kernel(&unpol, Mode::One, coord(0.0), coord(0.5));
        assert!(a.approx_eq(&ComplexMatrix2::ZERO, 1e-15));
    }

    #[test]
    fn unpolarized_diagonal_kernel_is_half_projector() {
        let unpol = SourceModel::new(SourceKind::UnpolarizedTwoMode);
        for i in 0..=10 {
            let u = coord(-0.5 + i as f64 / 10.0);
            let a = kernel(&unpol, Mode::One, u, u);
            let half_p = jones_projector(u).scale(0.5);
            assert!(a.approx_eq(&half_p, 1e-14), "A(u,u) = P(u)/2 at u = {}", u.value());
            // Intensity profiles cos²(πu)/2 and sin²(πu)/2.
            let theta = u.theta();
            assert!((a.get(Polarization::H, Polarization::H).re - theta.cos().powi(2) / 2.0).abs() < 1e-14);
            assert!((a.get(Polarization::V, Polarization::V).re - theta.sin().powi(2) / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn integrand_examples() {
        let unpol = SourceModel::new(SourceKind::UnpolarizedTwoMode);
        let e = |s: &str| s.parse::<ElementIndex>().unwrap();

        // HHHH direct at u=v=0: (1/2)(1/2).
        let v = element_integrand(&unpol, e("HHHH"), TermKind::Direct, coord(0.0), coord(0.0)).unwrap();
        assert!((v.re - 0.25).abs() < 1e-15 && v.im == 0.0);

        // HHVV direct = (cos²(πu)/2)(sin²(πv)/2); at u=0, v=1/4 gives 1/8.
        let v = element_integrand(&unpol, e("HHVV"), TermKind::Direct, coord(0.0), coord(0.25)).unwrap();
        assert!((v.re - 0.125).abs() < 1e-15);

        // Classical source refuses the exchange term.
        let classical = SourceModel::new(SourceKind::ClassicalIncoherent);
        assert!(matches!(
            element_integrand(&classical, e("HHHH"), TermKind::Exchange, coord(0.1), coord(0.2)),
            Err(Error::ExchangeUnsupported(_))
        ));
    }

    proptest! {
        /// A(u,v) = A(v,u)ᵀ for every source (P symmetric, ρ real symmetric).
        #[test]
        fn kernel_transpose_symmetry(u in -0.5f64..0.5, v in -0.5f64..0.5, which in 0usize..3) {
            let source = SourceModel::new(SourceKind::ALL[which]);
            let a_uv = kernel(&source, Mode::One, coord(u), coord(v));
            let a_vu = kernel(&source, Mode::One, coord(v), coord(u));
            // Real matrices: transpose = adjoint.
            prop_assert!(a_uv.approx_eq(&a_vu.adjoint(), 1e-13));
        }

        /// Kernels are real for all shipped sources.
        #[test]
        fn kernel_is_real(u in -0.5f64..0.5, v in -0.5f64..0.5, which in 0usize..3) {
            let source = SourceModel::new(SourceKind::ALL[which]);
            let a = kernel(&source, Mode::One, coord(u), coord(v));
            for row in Polarization::ALL {
                for col in Polarization::ALL {
                    prop_assert!(a.get(row, col).im.abs() < 1e-15);
                }
            }
        }
    }
}
