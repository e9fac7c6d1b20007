//! Domain types shared by every module: polarization indexing, the 16-element
//! coherence matrix, 2×2 complex matrices, detector geometry, and sinc.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Linear polarization basis state. Total order H < V fixes all indexing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    /// Both values in basis order.
    pub const ALL: [Polarization; 2] = [Polarization::H, Polarization::V];

    /// Basis index: H → 0, V → 1.
    pub fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }

    /// Unit Jones vector component along this polarization for a linear
    /// polarizer at angle θ: H picks cos θ, V picks sin θ.
    pub fn component(self, theta: f64) -> f64 {
        match self {
            Polarization::H => theta.cos(),
            Polarization::V => theta.sin(),
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::H => write!(f, "H"),
            Polarization::V => write!(f, "V"),
        }
    }
}

/// Post-selected polarization 4-tuple (j,k,l,m) naming one coherence element
/// g²_jklm. The first pair (j,k) indexes detector 1's field correlation, the
/// second pair (l,m) detector 2's.
///
/// The element maps bijectively onto the 4×4 coherence matrix in basis
/// {HH, HV, VH, VV}: row = (j,l), column = (k,m): the Kronecker layout of
/// J⁽¹⁾ ⊗ J⁽²⁾.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ElementIndex {
    pub j: Polarization,
    pub k: Polarization,
    pub l: Polarization,
    pub m: Polarization,
}

impl ElementIndex {
    pub const fn new(
        j: Polarization,
        k: Polarization,
        l: Polarization,
        m: Polarization,
    ) -> Self {
        ElementIndex { j, k, l, m }
    }

    /// All 16 elements in lexicographic name order (H < V): HHHH, HHHV, …,
    /// VVVV. This is the canonical output ordering everywhere (CSV columns,
    /// matrix reports).
    pub fn all() -> [ElementIndex; 16] {
        let mut out = [ElementIndex::new(
            Polarization::H,
            Polarization::H,
            Polarization::H,
            Polarization::H,
        ); 16];
        let mut i = 0;
        for j in Polarization::ALL {
            for k in Polarization::ALL {
                for l in Polarization::ALL {
                    for m in Polarization::ALL {
                        out[i] = ElementIndex::new(j, k, l, m);
                        i += 1;
                    }
                }
            }
        }
        out
    }

    /// Matrix position: row = (j,l), column = (k,m) in basis {HH,HV,VH,VV}.
    pub fn matrix_position(self) -> (usize, usize) {
        let row = 2 * self.j.index() + self.l.index();
        let col = 2 * self.k.index() + self.m.index();
        (row, col)
    }

    /// Inverse of [`matrix_position`](Self::matrix_position).
    pub fn from_matrix_position(row: usize, col: usize) -> Self {
        assert!(row < 4 && col < 4, "matrix position out of range");
        let pick = |i: usize| Polarization::ALL[i];
        ElementIndex::new(
            pick(row / 2), // j
            pick(col / 2), // k
            pick(row % 2), // l
            pick(col % 2), // m
        )
    }

    /// Element with H and V swapped in all four slots. NOT a symmetry of
    /// the grating output: the H mode profile cos(πu) is single-signed over
    /// the aperture while the V profile sin(πu) changes sign, so relabeled
    /// elements differ away from ν = 0.
    pub fn swapped(self) -> Self {
        let flip = |p: Polarization| match p {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        };
        ElementIndex::new(flip(self.j), flip(self.k), flip(self.l), flip(self.m))
    }

    /// Element with the two detectors exchanged: (j,k | l,m) → (l,m | j,k).
    /// This IS a symmetry: swapping detectors reverses the sign of the
    /// exchange phase argument, so g² of the swapped element is the complex
    /// conjugate, for every source.
    pub fn detectors_swapped(self) -> Self {
        ElementIndex::new(self.l, self.m, self.j, self.k)
    }
}

impl fmt::Display for ElementIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}{}", self.j, self.k, self.l, self.m)
    }
}

impl FromStr for ElementIndex {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let chars: Vec<char> = s.trim().chars().collect();
        if chars.len() != 4 {
            return Err(format!(
                "element must be 4 letters of H/V, got {s:?}"
            ));
        }
        let mut p = [Polarization::H; 4];
        for (i, c) in chars.iter().enumerate() {
            p[i] = match c.to_ascii_uppercase() {
                'H' => Polarization::H,
                'V' => Polarization::V,
                other => return Err(format!("invalid polarization letter {other:?} in {s:?}")),
            };
        }
        Ok(ElementIndex::new(p[0], p[1], p[2], p[3]))
    }
}

/// 2×2 complex matrix over the {H, V} basis. Holds Jones projectors, source
/// density matrices, and the pairwise correlation kernels A(u,v).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix2 {
    entries: [[Complex64; 2]; 2],
}

impl ComplexMatrix2 {
    pub const ZERO: ComplexMatrix2 = ComplexMatrix2 {
        entries: [[Complex64::new(0.0, 0.0); 2]; 2],
    };

    pub fn new(entries: [[Complex64; 2]; 2]) -> Self {
        ComplexMatrix2 { entries }
    }

    /// Build from real entries (every shipped matrix is real).
    pub fn from_real(entries: [[f64; 2]; 2]) -> Self {
        ComplexMatrix2 {
            entries: entries.map(|row| row.map(|x| Complex64::new(x, 0.0))),
        }
    }

    /// Identity matrix.
    pub fn identity() -> Self {
        ComplexMatrix2::from_real([[1.0, 0.0], [0.0, 1.0]])
    }

    /// Entry indexed by polarization pair (row, column).
    pub fn get(&self, row: Polarization, col: Polarization) -> Complex64 {
        self.entries[row.index()][col.index()]
    }

    pub fn mul(&self, rhs: &ComplexMatrix2) -> ComplexMatrix2 {
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (r, out_row) in out.iter_mut().enumerate() {
            for (c, cell) in out_row.iter_mut().enumerate() {
                *cell = self.entries[r][0] * rhs.entries[0][c]
                    + self.entries[r][1] * rhs.entries[1][c];
            }
        }
        ComplexMatrix2 { entries: out }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix2 {
        let e = &self.entries;
        ComplexMatrix2::new([
            [e[0][0].conj(), e[1][0].conj()],
            [e[0][1].conj(), e[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn scale(&self, factor: f64) -> ComplexMatrix2 {
        ComplexMatrix2 {
            entries: self.entries.map(|row| row.map(|x| x * factor)),
        }
    }

    /// Entrywise comparison with an absolute per-component tolerance.
    pub fn approx_eq(&self, other: &ComplexMatrix2, tol: f64) -> bool {
        for r in 0..2 {
            for c in 0..2 {
                let d = self.entries[r][c] - other.entries[r][c];
                if d.re.abs() > tol || d.im.abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Default absolute tolerance for complex equality; closed forms are exact,
/// quadrature carries its own (looser) tolerance.
pub const COMPLEX_EQ_TOL: f64 = 1e-9;

/// 4×4 matrix of normalized post-selected coherences g²_jklm at one ν,
/// indexed by [`ElementIndex`] in basis {HH, HV, VH, VV}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct G2Matrix {
    pub nu: f64,
    entries: [[(f64, f64); 4]; 4],
}

impl G2Matrix {
    /// Assemble from a per-element evaluator.
    pub fn from_fn(nu: f64, mut f: impl FnMut(ElementIndex) -> Complex64) -> Self {
        let mut entries = [[(0.0, 0.0); 4]; 4];
        for element in ElementIndex::all() {
            let (r, c) = element.matrix_position();
            let value = f(element);
            entries[r][c] = (value.re, value.im);
        }
        G2Matrix { nu, entries }
    }

    pub fn entry(&self, element: ElementIndex) -> Complex64 {
        let (r, c) = element.matrix_position();
        let (re, im) = self.entries[r][c];
        Complex64::new(re, im)
    }

    /// Raw (row, col) access in basis {HH, HV, VH, VV}.
    pub fn at(&self, row: usize, col: usize) -> Complex64 {
        let (re, im) = self.entries[row][col];
        Complex64::new(re, im)
    }

    /// Verify the structural symmetries every produced matrix must satisfy:
    /// conjugate pairs HHVH/HHHV and HVVV/VHVV, equal pairs HHVV/VVHH,
    /// HVHV/VHVH, VHHV/HVVH, and real nonnegative HHHH/VVVV. Returns the
    /// list of violations (empty when all hold within `tol`).
    pub fn invariant_violations(&self, tol: f64) -> Vec<String> {
        let e = |name: &str| self.entry(name.parse().unwrap());
        let mut bad = Vec::new();

        let conj_pairs = [("HHVH", "HHHV"), ("HVVV", "VHVV")];
        for (a, b) in conj_pairs {
            let d = e(a) - e(b).conj();
            if d.norm() > tol {
                bad.push(format!("{a} != conj({b}): difference {:.3e}", d.norm()));
            }
        }

        let equal_pairs = [("HHVV", "VVHH"), ("HVHV", "VHVH"), ("VHHV", "HVVH")];
        for (a, b) in equal_pairs {
            let d = e(a) - e(b);
            if d.norm() > tol {
                bad.push(format!("{a} != {b}: difference {:.3e}", d.norm()));
            }
        }

        for name in ["HHHH", "VVVV"] {
            let v = e(name);
            if v.im.abs() > tol {
                bad.push(format!("{name} has imaginary part {:.3e}", v.im));
            }
            if v.re < -tol {
                bad.push(format!("{name} is negative: {:.3e}", v.re));
            }
        }

        bad
    }
}

/// Physical layout: grating length L, wavelength λ, propagation distance z,
/// detector separation ΔX = X₁ − X₃ (all in one consistent length unit).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub grating_length: f64,
    pub lambda: f64,
    pub z: f64,
    pub delta_x: f64,
}

/// Dimensionless detector separation ν = L·ΔX/(λz), the single argument of
/// every far-field coherence curve. Antisymmetric in ΔX.
pub fn nu_of(geometry: &Geometry) -> Result<f64> {
    let Geometry {
        grating_length: length,
        lambda,
        z,
        delta_x,
    } = *geometry;
    if !(length > 0.0) || !(lambda > 0.0) || !(z > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "require L > 0, lambda > 0, z > 0; got L={length}, lambda={lambda}, z={z}"
        )));
    }
    let nu = length * delta_x / (lambda * z);
    if !nu.is_finite() {
        return Err(Error::InvalidGeometry(format!("nu = {nu} is not finite")));
    }
    Ok(nu)
}

/// sinc(ν) = sin(πν)/(πν) with sinc(0) = 1.
///
/// Exact integer arguments short-circuit to their analytic values (1 at 0,
/// 0 elsewhere) so that curve landmarks like g²_HHHH(3) = 1 hold exactly;
/// |πν| < 1e-6 uses the series 1 − (πν)²/6 to avoid 0/0 noise.
pub fn sinc(nu: f64) -> f64 {
    if nu == nu.trunc() {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let x = std::f64::consts::PI * nu;
    if x.abs() < 1e-6 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn polarization_ordering_and_index() {
        assert!(Polarization::H < Polarization::V);
        assert_eq!(Polarization::H.index(), 0);
        assert_eq!(Polarization::V.index(), 1);
    }

    #[test]
    fn element_all_is_lexicographic_and_distinct() {
        let all = ElementIndex::all();
        assert_eq!(all.len(), 16);
        let names: Vec<String> = all.iter().map(|e| e.to_string()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(names, sorted, "all() must be lexicographic and distinct");
        assert_eq!(names[0], "HHHH");
        assert_eq!(names[15], "VVVV");
    }

    #[test]
    fn element_matrix_position_roundtrip() {
        for element in ElementIndex::all() {
            let (r, c) = element.matrix_position();
            assert_eq!(ElementIndex::from_matrix_position(r, c), element);
        }
    }

    #[test]
    fn element_matrix_position_is_kronecker_layout() {
        // HHHH sits at (0,0); HHVV has row (H,V)=1, col (H,V)=1: a diagonal
        // entry, as the classical identity pattern requires.
        let e = |s: &str| s.parse::<ElementIndex>().unwrap();
        assert_eq!(e("HHHH").matrix_position(), (0, 0));
        assert_eq!(e("HHVV").matrix_position(), (1, 1));
        assert_eq!(e("VVHH").matrix_position(), (2, 2));
        assert_eq!(e("VVVV").matrix_position(), (3, 3));
        // HVHV: row (H,H)=0, col (V,V)=3, off-diagonal.
        assert_eq!(e("HVHV").matrix_position(), (0, 3));
    }

    #[test]
    fn element_parse_display_roundtrip() {
        for element in ElementIndex::all() {
            let parsed: ElementIndex = element.to_string().parse().unwrap();
            assert_eq!(parsed, element);
        }
        assert!("HHH".parse::<ElementIndex>().is_err());
        assert!("HHXV".parse::<ElementIndex>().is_err());
        assert_eq!(
            "hvhv".parse::<ElementIndex>().unwrap().to_string(),
            "HVHV",
            "lowercase accepted"
        );
    }

    #[test]
    fn matrix2_algebra() {
        let p = ComplexMatrix2::from_real([[0.5, 0.5], [0.5, 0.5]]);
        let p2 = p.mul(&p);
        assert!(p2.approx_eq(&p, 1e-15), "projector is idempotent");
        assert!((p.trace().re - 1.0).abs() < 1e-15);

        let m = ComplexMatrix2::new([
            [Complex64::new(1.0, 2.0), Complex64::new(3.0, -1.0)],
            [Complex64::new(0.0, 4.0), Complex64::new(-2.0, 0.5)],
        ]);
        let a = m.adjoint();
        assert_eq!(a.get(Polarization::H, Polarization::V), Complex64::new(0.0, -4.0));
        assert_eq!(a.get(Polarization::V, Polarization::H), Complex64::new(3.0, 1.0));
        // (M†)† = M
        assert!(a.adjoint().approx_eq(&m, 0.0));
    }

    #[test]
    fn nu_of_examples() {
        let nu = |l, lambda, z, dx| {
            nu_of(&Geometry {
                grating_length: l,
                lambda,
                z,
                delta_x: dx,
            })
        };
        assert_eq!(nu(1.0, 1.0, 1.0, 0.0).unwrap(), 0.0);
        assert!((nu(2.0, 0.5, 100.0, 25.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((nu(1.0, 1.0, 1.0, -2.7).unwrap() + 2.7).abs() < 1e-15);
        assert!(nu(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(nu(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(nu(1.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn sinc_landmarks() {
        assert_eq!(sinc(0.0), 1.0);
        assert_eq!(sinc(1.0), 0.0);
        assert_eq!(sinc(-3.0), 0.0);
        let expected = 2.0 / std::f64::consts::PI;
        assert!((sinc(0.5) - expected).abs() < 1e-15);
        // Series branch agrees with the direct formula at the crossover.
        let x = 1e-6 / std::f64::consts::PI;
        assert!((sinc(x) - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn sinc_is_even(nu in -20.0f64..20.0) {
            prop_assert!((sinc(nu) - sinc(-nu)).abs() < 1e-15);
        }

        #[test]
        fn sinc_bounded_by_one(nu in -50.0f64..50.0) {
            prop_assert!(sinc(nu).abs() <= 1.0 + 1e-15);
        }

        #[test]
        fn nu_of_antisymmetric_in_delta_x(dx in -10.0f64..10.0) {
            let g = |delta_x| Geometry { grating_length: 1.3, lambda: 0.7, z: 5.0, delta_x };
            let plus = nu_of(&g(dx)).unwrap();
            let minus = nu_of(&g(-dx)).unwrap();
            prop_assert!((plus + minus).abs() < 1e-15);
        }
    }

    #[test]
    fn g2matrix_invariant_checker_flags_violations() {
        // A matrix of all ones violates nothing structural except nothing:
        // conj pairs hold (1 = conj(1)), equal pairs hold, diagonals real.
        let ones = G2Matrix::from_fn(0.0, |_| Complex64::new(1.0, 0.0));
        assert!(ones.invariant_violations(1e-12).is_empty());

        // Break the HHVV = VVHH pairing.
        let broken = G2Matrix::from_fn(0.0, |e| {
            if e.to_string() == "HHVV" {
                Complex64::new(2.0, 0.0)
            } else {
                Complex64::new(1.0, 0.0)
            }
        });
        let violations = broken.invariant_violations(1e-12);
        assert!(violations.iter().any(|v| v.contains("HHVV")));

        // Negative fully-diagonal entry is flagged.
        let negative = G2Matrix::from_fn(0.0, |e| {
            if e.to_string() == "HHHH" {
                Complex64::new(-1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        assert!(!negative.invariant_violations(1e-12).is_empty());
    }
}
