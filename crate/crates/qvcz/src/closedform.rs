//! Analytic g² catalog: closed sinc-series expressions for every coherence
//! element of every source, the quadrature-free second path.
//!
//! The exchange integral factorizes over the aperture into products of
//! finite-window transforms of cos(πu)cos(πv) mode products, so each element
//! is a short combination of sinc terms. Two routes to the same curves are
//! kept in this module:
//!
//! * the catalog brackets in [`g2_closed_unpolarized`] and
//!   [`g2_closed_horizontal`], written as single expanded expressions, and
//! * a transform-product series (`unpolarized_series`) assembled from the
//!   aperture transforms of cos², sin², and cos·sin, used by the tests as an
//!   independent analytic oracle (agreement demanded to 1e-12).
//!
//! For the horizontally polarized indistinguishable source, the sinc
//! argument offsets are reconstructed as {ν, ν±1, ν±2} from the transform
//! algebra and gated on agreement with the quadrature engine; the comparison
//! report flags every such element. For the unpolarized source, four
//! elements (HVHH, VHHH, VVHV, VVVH) are paired with their value/conjugate
//! partner according to the detector-swap symmetry of the correlator, which
//! the quadrature engine confirms; those assignments are flagged as well.

use num_complex::Complex64;

use crate::grating::SourceKind;
use crate::types::{sinc, ElementIndex, G2Matrix, Polarization};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Aperture transforms of the three mode products; the series oracle. This
// route exists to check the expanded brackets below against an independent
// derivation, so outside test builds it is intentionally unused.
// ---------------------------------------------------------------------------

#[cfg_attr(not(test), allow(dead_code))]
/// ∫ cos²(πu) e^{2πiwu} du over the unit aperture. Even in w.
fn cos_pair_transform(w: f64) -> f64 {
    0.5 * sinc(w) + 0.25 * sinc(w + 1.0) + 0.25 * sinc(w - 1.0)
}

#[cfg_attr(not(test), allow(dead_code))]
/// ∫ sin²(πu) e^{2πiwu} du. Even in w.
fn sin_pair_transform(w: f64) -> f64 {
    0.5 * sinc(w) - 0.25 * sinc(w + 1.0) - 0.25 * sinc(w - 1.0)
}

#[cfg_attr(not(test), allow(dead_code))]
/// ∫ cos(πu) sin(πu) e^{2πiwu} du = i·x(w); returns the real factor x(w).
/// Odd in w, purely imaginary as a transform.
fn cross_pair_transform(w: f64) -> f64 {
    0.25 * (sinc(w - 1.0) - sinc(w + 1.0))
}

#[cfg_attr(not(test), allow(dead_code))]
/// Transform of the mode product n_a(u)·n_b(u) at frequency w.
fn mode_pair_transform(a: Polarization, b: Polarization, w: f64) -> Complex64 {
    use Polarization::{H, V};
    match (a, b) {
        (H, H) => Complex64::new(cos_pair_transform(w), 0.0),
        (V, V) => Complex64::new(sin_pair_transform(w), 0.0),
        _ => Complex64::new(0.0, cross_pair_transform(w)),
    }
}

#[cfg_attr(not(test), allow(dead_code))]
/// Series route for the unpolarized source: the cos²(π(u-v)) window of the
/// exchange kernel splits the far-field phase into offsets {ν, ν+1, ν-1}
/// with weights {2, 1, 1}, each a product of one detector-1 and one
/// detector-2 transform. Normalized so the HHHH direct term is 1.
pub(crate) fn unpolarized_series(element: ElementIndex, nu: f64) -> Complex64 {
    let f = |w: f64| mode_pair_transform(element.j, element.m, w);
    let g = |w: f64| mode_pair_transform(element.k, element.l, w);
    let exchange =
        2.0 * f(nu) * g(-nu) + f(1.0 + nu) * g(-1.0 - nu) + f(nu - 1.0) * g(1.0 - nu);
    let direct = if element.j == element.k && element.l == element.m {
        1.0
    } else {
        0.0
    };
    exchange + direct
}

// ---------------------------------------------------------------------------
// Unpolarized catalog.
// ---------------------------------------------------------------------------

/// One post-selected coherence element of the unpolarized two-mode source,
/// evaluated from its expanded sinc bracket. Total over all 16 elements.
pub fn g2_closed_unpolarized(element: ElementIndex, nu: f64) -> Complex64 {
    use Polarization::{H, V};
    let s0 = sinc(nu);
    let sp1 = sinc(nu + 1.0);
    let sp2 = sinc(nu + 2.0);
    let sm1 = sinc(1.0 - nu);
    let sm2 = sinc(2.0 - nu);

    // Shared sub-brackets. hv_core is the full HHVV/HVHV exchange bracket;
    // phi and psi are the imaginary-family brackets (value carried by the
    // first-listed element of each pair, conjugate by the second pair).
    let hv_core = 2.0 * s0 * s0 - 2.0 * (sp2 + sm2) * s0 + 2.0 * (sm1 - sp1) * (sm1 - sp1)
        + sp2 * sp2
        + sm2 * sm2;
    let phi = sm2 * sm2 + 2.0 * sm1 * sm2 - sp2 * sp2 - 2.0 * sp2 * sp1
        + 2.0 * (sm1 - sp1) * (s0 + sp1 + sm1);
    let psi = 2.0 * sp1 * sp1 - 2.0 * s0 * sp1 - 2.0 * sp2 * sp1 + sp2 * sp2
        - 2.0 * sm1 * sm1
        - sm2 * sm2
        + 2.0 * s0 * sm1
        + 2.0 * sm1 * sm2;

    let re = |bracket: f64| Complex64::new(bracket / 16.0, 0.0);
    let im = |bracket: f64| Complex64::new(0.0, bracket / 16.0);

    match (element.j, element.k, element.l, element.m) {
        (H, H, H, H) => re(10.0 * s0 * s0
            + 2.0 * (6.0 * sp1 + sp2 + 6.0 * sm1 + sm2) * s0
            + 6.0 * sp1 * sp1
            + sp2 * sp2
            + 6.0 * sm1 * sm1
            + sm2 * sm2
            + 4.0 * sp1 * sp2
            + 4.0 * (sp1 + sm2) * sm1
            + 16.0),
        (V, V, V, V) => re(10.0 * s0 * s0
            + 2.0 * (-6.0 * sp1 + sp2 - 6.0 * sm1 + sm2) * s0
            + 6.0 * sp1 * sp1
            + sp2 * sp2
            + 6.0 * sm1 * sm1
            + sm2 * sm2
            - 4.0 * sp1 * sp2
            + 4.0 * (sp1 - sm2) * sm1
            + 16.0),
        (H, H, V, V) | (V, V, H, H) => re(hv_core + 16.0),
        (H, V, H, V) | (V, H, V, H) => re(hv_core),
        (V, H, H, V) | (H, V, V, H) => re(6.0 * s0 * s0 - 2.0 * (sp2 + sm2) * s0
            + 2.0 * (sm1 - sp1) * (sm1 - sp1)
            - sp2 * sp2
            - sm2 * sm2),
        (H, H, V, H) | (H, V, H, H) => im(-phi),
        (H, H, H, V) | (V, H, H, H) => im(phi),
        (H, V, V, V) | (V, V, V, H) => im(psi),
        (V, H, V, V) | (V, V, H, V) => im(-psi),
    }
}

#[cfg_attr(not(test), allow(dead_code))]
/// The expanded main-curve arrangement of the HHHH series; algebraically the
/// same polynomial in the five sinc values as the catalog bracket, kept as
/// an independent transcription for the consistency tests.
pub(crate) fn g2_hhhh_expanded(nu: f64) -> f64 {
    let s0 = sinc(nu);
    let sp1 = sinc(nu + 1.0);
    let sp2 = sinc(nu + 2.0);
    let sm1 = sinc(1.0 - nu);
    let sm2 = sinc(2.0 - nu);
    1.0 + sm2 * sm2 / 16.0
        + 5.0 / 8.0 * s0 * s0
        + sp2 * sp2 / 16.0
        + 0.25 * sm2 * sm1
        + 3.0 / 8.0 * sm1 * sm1
        + 0.25 * sp1 * (sp2 + sm1)
        + 3.0 / 8.0 * sp1 * sp1
        + s0 / 8.0 * (sm2 + sp2 + 6.0 * sm1 + 6.0 * sp1)
}

// ---------------------------------------------------------------------------
// Horizontal catalog.
// ---------------------------------------------------------------------------

/// 16·∫ cos⁴(πu) e^{2πiwu} du. Even in w; 6 at w = 0.
fn bracket_quartic(w: f64) -> f64 {
    6.0 * sinc(w) + 4.0 * sinc(w + 1.0) + 4.0 * sinc(w - 1.0) + sinc(w + 2.0) + sinc(w - 2.0)
}

/// (16/i)·∫ cos³(πu) sin(πu) e^{2πiwu} du. Odd in w; 0 at w = 0.
fn bracket_cross(w: f64) -> f64 {
    2.0 * sinc(1.0 - w) - 2.0 * sinc(w + 1.0) + sinc(2.0 - w) - sinc(w + 2.0)
}

/// 16·∫ cos²(πu) sin²(πu) e^{2πiwu} du. Even in w; 2 at w = 0.
fn bracket_quadratic(w: f64) -> f64 {
    2.0 * sinc(w) - sinc(w + 2.0) - sinc(w - 2.0)
}

/// One coherence element of the horizontally polarized indistinguishable
/// source. The exchange factorizes into a single product of two aperture
/// transforms, so every curve is a product of two of the three brackets
/// above; offsets {ν, ν±1, ν±2} reconstructed (see module docs).
pub fn g2_closed_horizontal(element: ElementIndex, nu: f64) -> Complex64 {
    use Polarization::{H, V};
    let b1 = bracket_quartic(nu);
    let b2 = bracket_cross(nu);
    let b3 = bracket_quadratic(nu);
    let re = |x: f64| Complex64::new(x, 0.0);
    let im = |x: f64| Complex64::new(0.0, x);
    match (element.j, element.k, element.l, element.m) {
        (H, H, H, H) => re(1.0 + b1 * b1 / 36.0),
        (V, V, V, V) => re((b3 * b3 + 4.0) / 36.0),
        (H, H, V, V) | (V, V, H, H) => re(1.0 / 3.0 + b2 * b2 / 36.0),
        (H, V, H, V) | (V, H, V, H) => re(b2 * b2 / 36.0),
        (V, H, H, V) | (H, V, V, H) => re(b1 * b3 / 36.0),
        (H, H, V, H) | (H, V, H, H) => im(-b1 * b2 / 36.0),
        (H, H, H, V) | (V, H, H, H) => im(b1 * b2 / 36.0),
        (H, V, V, V) | (V, V, V, H) => im(b2 * b3 / 36.0),
        (V, H, V, V) | (V, V, H, V) => im(-b2 * b3 / 36.0),
    }
}

// ---------------------------------------------------------------------------
// Classical control.
// ---------------------------------------------------------------------------

/// Classical incoherent control: 1 when (j,k) = (l,m) pairs are both
/// diagonal, else 0, for every ν. The 4×4 matrix is the identity pattern.
pub fn g2_closed_classical(element: ElementIndex, _nu: f64) -> f64 {
    if element.j == element.k && element.l == element.m {
        1.0
    } else {
        0.0
    }
}

// ---------------------------------------------------------------------------
// Dispatch and catalog.
// ---------------------------------------------------------------------------

/// The closed form of one element for any source.
pub fn g2_closed(kind: SourceKind, element: ElementIndex, nu: f64) -> Complex64 {
    match kind {
        SourceKind::UnpolarizedTwoMode => g2_closed_unpolarized(element, nu),
        SourceKind::HorizontalIndistinguishable => g2_closed_horizontal(element, nu),
        SourceKind::ClassicalIncoherent => {
            Complex64::new(g2_closed_classical(element, nu), 0.0)
        }
    }
}

/// The full 4×4 closed-form coherence matrix at one ν.
pub fn g2_matrix_closed(kind: SourceKind, nu: f64) -> G2Matrix {
    G2Matrix::from_fn(nu, |element| g2_closed(kind, element, nu))
}

/// One source's complete analytic catalog, with per-element provenance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosedFormCatalog {
    kind: SourceKind,
}

impl ClosedFormCatalog {
    pub fn new(kind: SourceKind) -> Self {
        ClosedFormCatalog { kind }
    }

    pub fn kind(self) -> SourceKind {
        self.kind
    }

    pub fn evaluate(self, element: ElementIndex, nu: f64) -> Complex64 {
        g2_closed(self.kind, element, nu)
    }

    pub fn matrix(self, nu: f64) -> G2Matrix {
        g2_matrix_closed(self.kind, nu)
    }

    /// Whether this element's closed form was reconstructed rather than
    /// transcribed: every horizontal curve (rebuilt argument offsets), and
    /// the four unpolarized elements whose value/conjugate pairing follows
    /// the detector-swap symmetry instead of the inconsistent stated chains.
    pub fn is_reconstructed(self, element: ElementIndex) -> bool {
        match self.kind {
            SourceKind::HorizontalIndistinguishable => true,
            SourceKind::ClassicalIncoherent => false,
            SourceKind::UnpolarizedTwoMode => {
                matches!(element.to_string().as_str(), "HVHH" | "VHHH" | "VVHV" | "VVVH")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Revival search.
// ---------------------------------------------------------------------------

/// What the revival search located.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RevivalKind {
    /// An interior local maximum of |g²|.
    Peak,
    /// The collapse-and-revival turning point: an interior local minimum of
    /// |g²| after which the modulus grows again.
    Onset,
}

/// Result of [`find_resurrection`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resurrection {
    pub element: ElementIndex,
    pub nu_star: f64,
    /// g² at ν*.
    pub value: Complex64,
    pub kind: RevivalKind,
}

const SCAN_INTERVALS: usize = 800;
const NU_TOL: f64 = 1e-4;

/// Locate the revival of |g²(ν)| on [lo, hi] for one element's closed form:
/// the most prominent interior local maximum of the modulus when the
/// interval holds one, otherwise the deepest interior local minimum (the
/// point where the curve dies and turns around, which is where the VHHV
/// element "resurrects" near ν ≈ 1.65). Golden-section refinement to 1e-4
/// in ν. Errors with no-local-max when the curve is monotone or constant on
/// the interval, as every classical element is.
pub fn find_resurrection(
    kind: SourceKind,
    element: ElementIndex,
    lo: f64,
    hi: f64,
) -> Result<Resurrection> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidScenario(format!(
            "resurrection interval must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    let modulus = |nu: f64| g2_closed(kind, element, nu).norm();
    let step = (hi - lo) / SCAN_INTERVALS as f64;
    let xs: Vec<f64> = (0..=SCAN_INTERVALS).map(|i| lo + step * i as f64).collect();
    let ms: Vec<f64> = xs.iter().map(|&x| modulus(x)).collect();

    let mut best_max: Option<usize> = None;
    let mut best_min: Option<usize> = None;
    for i in 1..SCAN_INTERVALS {
        if ms[i] > ms[i - 1] && ms[i] > ms[i + 1] {
            if best_max.map_or(true, |b| ms[i] > ms[b]) {
                best_max = Some(i);
            }
        }
        if ms[i] < ms[i - 1] && ms[i] < ms[i + 1] {
            if best_min.map_or(true, |b| ms[i] < ms[b]) {
                best_min = Some(i);
            }
        }
    }

    let (nu_star, revival_kind) = if let Some(i) = best_max {
        (
            golden_section(&modulus, xs[i - 1], xs[i + 1], NU_TOL, true),
            RevivalKind::Peak,
        )
    } else if let Some(i) = best_min {
        (
            golden_section(&modulus, xs[i - 1], xs[i + 1], NU_TOL, false),
            RevivalKind::Onset,
        )
    } else {
        return Err(Error::NoLocalMax { lo, hi });
    };

    Ok(Resurrection {
        element,
        nu_star,
        value: g2_closed(kind, element, nu_star),
        kind: revival_kind,
    })
}

/// Golden-section extremum search on [a, b]; maximizes when `maximize`,
/// minimizes otherwise. Terminates on interval width, so it needs no
/// smoothness (the revival onset is a V-shaped kink of the modulus).
fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64, maximize: bool) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let signed = |x: f64| if maximize { x } else { -x };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = signed(f(c));
    let mut fd = signed(f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = signed(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = signed(f(d));
        }
    }
    0.5 * (a + b)
}
