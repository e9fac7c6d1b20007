//! Photon-number statistics of the combined H+V field at one detector
//! point: thermal per-mode distributions, their convolution, and the
//! moment-based g²(τ=0).
//!
//! The grating splits a thermal beam into a cos(πx/L) horizontal and a
//! sin(πx/L) vertical amplitude profile. Both propagate coherently (signed
//! amplitudes, not intensities) to the measurement plane; a photon-number
//! resolving detector at (X, z) then sees two independent thermal modes with
//! means n̄_H, n̄_V proportional to the local intensities. Their convolution
//! fixes g² = 1 + (n̄_H² + n̄_V²)/(n̄_H + n̄_V)², which is pinned to [1.5, 2]
//! for any pair of positive means: 1.5 at equal means, 2 when either mode
//! vanishes. The z sweep moves the detector through the two evolving
//! diffraction patterns, so g² varies inside that band.

use crate::quadrature::{fresnel_propagate, source_grid_for, FieldProfile, DEFAULT_SOURCE_POINTS};
use crate::types::Geometry;
use crate::{Error, Result};
use num_complex::Complex64;

/// Default truncation order of the per-mode thermal distributions.
pub const DEFAULT_N_MAX: usize = 64;

/// A photon-number distribution p(0..=nMax).
///
/// Invariants: every probability is finite and nonnegative, and the total
/// mass is within 1e-10 of one (truncation may shave a tail that small).
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    probabilities: Vec<f64>,
}

impl PhotonDistribution {
    /// Validating constructor for externally supplied probabilities.
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidDistribution(
                "need at least p(0)".to_string(),
            ));
        }
        if let Some(p) = probabilities
            .iter()
            .find(|p| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "probability {p} is negative or non-finite"
            )));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDistribution(format!(
                "total mass {total} deviates from 1 by more than 1e-10"
            )));
        }
        Ok(PhotonDistribution { probabilities })
    }

    /// Internal constructor for outputs whose invariants hold by
    /// construction (thermal recurrence with tail check, convolution).
    fn from_raw(probabilities: Vec<f64>) -> Self {
        PhotonDistribution { probabilities }
    }

    /// The vacuum state: p(0) = 1.
    pub fn vacuum() -> Self {
        PhotonDistribution::from_raw(vec![1.0])
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Truncation order (highest stored photon number).
    pub fn n_max(&self) -> usize {
        self.probabilities.len() - 1
    }

    /// p(n), zero beyond the truncation.
    pub fn p(&self, n: usize) -> f64 {
        self.probabilities.get(n).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// ⟨n⟩ = Σ n·p(n).
    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// ⟨n²⟩ = Σ n²·p(n).
    pub fn second_moment(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(n, p)| (n as f64) * (n as f64) * p)
            .sum()
    }

    /// ⟨(Δn)²⟩ = ⟨n²⟩ − ⟨n⟩².
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.second_moment() - mean * mean
    }
}

/// Thermal (geometric) pmf p(n) = n̄ⁿ/(n̄+1)ⁿ⁺¹ truncated at `n_max`.
///
/// Built by the stable recurrence p(n+1) = p(n)·n̄/(n̄+1). The discarded
/// tail mass is exactly (n̄/(n̄+1))^{n_max+1}; if that exceeds 1e-10 the
/// truncation is rejected rather than silently under-normalized.
pub fn thermal_pmf(nbar: f64, n_max: usize) -> Result<PhotonDistribution> {
    if !nbar.is_finite() || nbar < 0.0 {
        return Err(Error::InvalidDistribution(format!(
            "mean photon number must be finite and nonnegative, got {nbar}"
        )));
    }
    let ratio = nbar / (nbar + 1.0);
    let tail = ratio.powi(n_max as i32 + 1);
    if tail > 1e-10 {
        return Err(Error::TruncationInsufficient { n_max, tail });
    }
    let mut probabilities = Vec::with_capacity(n_max + 1);
    let mut p = 1.0 / (nbar + 1.0);
    for _ in 0..=n_max {
        probabilities.push(p);
        p *= ratio;
    }
    Ok(PhotonDistribution::from_raw(probabilities))
}

/// Distribution of the total count from two independent modes:
/// p(n) = Σ_m p_H(n−m)·p_V(m), supported up to the sum of the truncations.
/// Means add exactly; total mass is the product of the input masses.
pub fn convolve(p_h: &PhotonDistribution, p_v: &PhotonDistribution) -> PhotonDistribution {
    let h = p_h.probabilities();
    let v = p_v.probabilities();
    let mut out = vec![0.0; h.len() + v.len() - 1];
    for (i, &a) in h.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (j, &b) in v.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    PhotonDistribution::from_raw(out)
}

/// g²(τ=0) = 1 + (⟨(Δn)²⟩ − ⟨n⟩)/⟨n⟩² = (⟨n²⟩ − ⟨n⟩)/⟨n⟩².
pub fn g2_from_distribution(p: &PhotonDistribution) -> Result<f64> {
    let mean = p.mean();
    if mean <= 0.0 {
        return Err(Error::ZeroMeanDistribution);
    }
    Ok((p.second_moment() - mean) / (mean * mean))
}

/// Mean photon numbers of the two modes at one detector position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorPoint {
    /// Transverse detector position (length units).
    pub x: f64,
    /// Plane distance from the grating (length units).
    pub z: f64,
    pub mean_h: f64,
    pub mean_v: f64,
}

/// Sampling control for the propagation inside [`detector_means`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Source-grid floor; the Nyquist rule may demand more points.
    pub source_points: usize,
    /// Multiplier on the Nyquist phase-step bound.
    pub safety_factor: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            source_points: DEFAULT_SOURCE_POINTS,
            safety_factor: 4.0,
        }
    }
}

/// Mean photon numbers n̄_H, n̄_V at the detector point (geometry.delta_x,
/// geometry.z).
///
/// At z = 0 the in-plane mode intensities cos²(πX/L), sin²(πX/L) apply
/// directly (X must sit inside the aperture). For z > 0 the signed
/// amplitude profiles cos(πρ/L), sin(πρ/L) on [−L/2, L/2] propagate through
/// [`fresnel_propagate`]. Either way the means are scaled so that
/// n̄_H + n̄_V integrated over the measurement plane equals
/// `total_mean_photons`; propagation is power conserving, so the scale is
/// `total_mean_photons / L` in both branches.
pub fn detector_means(
    total_mean_photons: f64,
    geometry: &Geometry,
    grid: &GridSpec,
) -> Result<DetectorPoint> {
    if !(total_mean_photons.is_finite() && total_mean_photons > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "total mean photon number must be positive, got {total_mean_photons}"
        )));
    }
    let l = geometry.grating_length;
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "grating length must be positive, got {l}"
        )));
    }
    if !(geometry.lambda.is_finite() && geometry.lambda > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "wavelength must be positive, got {}",
            geometry.lambda
        )));
    }
    let x = geometry.delta_x;
    if !x.is_finite() {
        return Err(Error::InvalidGeometry(format!(
            "detector position must be finite, got {x}"
        )));
    }
    let z = geometry.z;
    if !z.is_finite() || z < 0.0 {
        return Err(Error::ZNonPositive(z));
    }

    let scale = total_mean_photons / l;
    let (mean_h, mean_v) = if z == 0.0 {
        if x.abs() > l / 2.0 {
            return Err(Error::OutOfAperture(x / l));
        }
        let theta = std::f64::consts::PI * x / l;
        (
            scale * theta.cos().powi(2),
            scale * theta.sin().powi(2),
        )
    } else {
        let source = source_grid_for(
            l,
            geometry.lambda,
            z,
            &[x],
            grid.safety_factor,
            grid.source_points,
        );
        let propagated_intensity = |profile_of: fn(f64) -> f64| -> Result<f64> {
            let amplitude = source
                .iter()
                .map(|&rho| Complex64::new(profile_of(std::f64::consts::PI * rho / l), 0.0))
                .collect();
            let profile = FieldProfile {
                grid: source.clone(),
                amplitude,
                z: 0.0,
            };
            let out = fresnel_propagate(&profile, z, geometry.lambda, &[x])?;
            Ok(out.amplitude[0].norm_sqr())
        };
        (
            scale * propagated_intensity(f64::cos)?,
            scale * propagated_intensity(f64::sin)?,
        )
    };

    Ok(DetectorPoint {
        x,
        z,
        mean_h,
        mean_v,
    })
}

/// Full pipeline at one detector point: thermal pmf per mode, convolution,
/// and the combined g². For two positive means the result is confined to
/// [1.5, 2]; a vanished mode gives exactly the single-mode thermal g² = 2.
pub fn combined_statistics(
    point: &DetectorPoint,
    n_max: usize,
) -> Result<(PhotonDistribution, f64)> {
    let p_h = thermal_pmf(point.mean_h, n_max)?;
    let p_v = thermal_pmf(point.mean_v, n_max)?;
    let combined = convolve(&p_h, &p_v);
    let g2 = g2_from_distribution(&combined)?;
    Ok((combined, g2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Poisson pmf fixture: the g² = 1 waypoint between thermal and
    /// sub-Poissonian.
    fn poisson(lambda: f64, n_max: usize) -> PhotonDistribution {
        let mut probabilities = Vec::with_capacity(n_max + 1);
        let mut p = (-lambda).exp();
        for n in 0..=n_max {
            probabilities.push(p);
            p *= lambda / (n + 1) as f64;
        }
        PhotonDistribution::new(probabilities).unwrap()
    }

    fn geometry(x: f64, z: f64) -> Geometry {
        Geometry {
            grating_length: 1.0,
            lambda: 1e-3,
            z,
            delta_x: x,
        }
    }

    #[test]
    fn thermal_fixture_values() {
        let p = thermal_pmf(1.0, 64).unwrap();
        assert_relative_eq!(p.p(0), 0.5, epsilon = 1e-15);
        assert_relative_eq!(p.p(1), 0.25, epsilon = 1e-15);
        assert_relative_eq!(p.p(2), 0.125, epsilon = 1e-15);
        assert_relative_eq!(p.mean(), 1.0, epsilon = 1e-10);
        assert_relative_eq!(p.variance(), 2.0, epsilon = 1e-9);
    }

    #[test]
    fn thermal_vacuum_and_errors() {
        let p = thermal_pmf(0.0, 8).unwrap();
        assert_eq!(p.p(0), 1.0);
        assert_eq!(p.total_mass(), 1.0);
        assert!(p.probabilities()[1..].iter().all(|&x| x == 0.0));

        assert!(matches!(
            thermal_pmf(-0.5, 8),
            Err(Error::InvalidDistribution(_))
        ));
        // n̄ = 10 at n_max = 64 leaves ~2e-3 in the tail.
        assert!(matches!(
            thermal_pmf(10.0, 64),
            Err(Error::TruncationInsufficient { .. })
        ));
        assert!(thermal_pmf(10.0, 300).is_ok());
    }

    #[test]
    fn thermal_g2_is_two() {
        for nbar in [0.3, 1.0, 2.5] {
            let p = thermal_pmf(nbar, 128).unwrap();
            let g2 = g2_from_distribution(&p).unwrap();
            assert_relative_eq!(g2, 2.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn convolution_fixtures() {
        let vacuum = PhotonDistribution::vacuum();
        let p = thermal_pmf(1.3, 128).unwrap();
        assert_eq!(convolve(&vacuum, &p), p);

        let t1 = thermal_pmf(1.0, 64).unwrap();
        let c = convolve(&t1, &t1);
        assert_relative_eq!(c.p(0), 0.25, epsilon = 1e-15);
        assert_relative_eq!(c.p(1), 0.25, epsilon = 1e-15);
        assert_relative_eq!(c.p(2), 3.0 / 16.0, epsilon = 1e-15);
        assert_eq!(c.n_max(), 128);

        let a = thermal_pmf(0.7, 128).unwrap();
        let b = thermal_pmf(1.3, 128).unwrap();
        assert_relative_eq!(convolve(&a, &b).mean(), 2.0, epsilon = 1e-9);
    }

    #[test]
    fn g2_waypoints() {
        let poissonian = poisson(1.3, 64);
        assert_relative_eq!(g2_from_distribution(&poissonian).unwrap(), 1.0, epsilon = 1e-9);

        let t = thermal_pmf(0.8, 128).unwrap();
        let equal = convolve(&t, &t);
        assert_relative_eq!(g2_from_distribution(&equal).unwrap(), 1.5, epsilon = 1e-6);

        assert!(matches!(
            g2_from_distribution(&PhotonDistribution::vacuum()),
            Err(Error::ZeroMeanDistribution)
        ));
    }

    #[test]
    fn combined_statistics_examples() {
        // Single surviving mode: plain thermal bunching.
        let point = DetectorPoint {
            x: 0.0,
            z: 0.0,
            mean_h: 1.2,
            mean_v: 0.0,
        };
        let (_, g2) = combined_statistics(&point, 128).unwrap();
        assert_relative_eq!(g2, 2.0, epsilon = 1e-6);

        // Equal means.
        let point = DetectorPoint {
            x: 0.0,
            z: 0.0,
            mean_h: 0.9,
            mean_v: 0.9,
        };
        let (dist, g2) = combined_statistics(&point, 128).unwrap();
        assert_relative_eq!(g2, 1.5, epsilon = 1e-6);
        assert!((dist.total_mass() - 1.0).abs() < 1e-10);

        // 3:1 split: 1 + (9 + 1)/16.
        let point = DetectorPoint {
            x: 0.0,
            z: 0.0,
            mean_h: 1.5,
            mean_v: 0.5,
        };
        let (_, g2) = combined_statistics(&point, 128).unwrap();
        assert_relative_eq!(g2, 1.625, epsilon = 1e-6);
    }

    #[test]
    fn in_plane_detector_means() {
        let grid = GridSpec::default();

        let p = detector_means(2.0, &geometry(0.0, 0.0), &grid).unwrap();
        assert_eq!(p.mean_v, 0.0);
        assert_relative_eq!(p.mean_h, 2.0, epsilon = 1e-15);

        let p = detector_means(2.0, &geometry(0.25, 0.0), &grid).unwrap();
        assert_relative_eq!(p.mean_h, p.mean_v, epsilon = 1e-12);

        let p = detector_means(2.0, &geometry(0.4, 0.0), &grid).unwrap();
        let theta = 0.4 * std::f64::consts::PI;
        assert_relative_eq!(p.mean_h, 2.0 * theta.cos().powi(2), epsilon = 1e-12);
        assert_relative_eq!(p.mean_v, 2.0 * theta.sin().powi(2), epsilon = 1e-12);
        let (_, g2) = combined_statistics(&p, DEFAULT_N_MAX).unwrap();
        assert_relative_eq!(
            g2,
            1.0 + theta.cos().powi(4) + theta.sin().powi(4),
            epsilon = 1e-6
        );

        assert!(matches!(
            detector_means(2.0, &geometry(0.7, 0.0), &grid),
            Err(Error::OutOfAperture(_))
        ));
        assert!(matches!(
            detector_means(2.0, &geometry(0.4, -1.0), &grid),
            Err(Error::ZNonPositive(_))
        ));
        assert!(matches!(
            detector_means(0.0, &geometry(0.4, 0.0), &grid),
            Err(Error::InvalidGeometry(_))
        ));
    }

    #[test]
    fn propagated_means_match_independent_riemann_oracle() {
        // Brute-force midpoint Riemann propagation on a 10x denser grid:
        // different quadrature weights, different nodes, same physics.
        let g = geometry(0.4, 350.0);
        let point = detector_means(2.0, &g, &GridSpec::default()).unwrap();

        let oracle = |profile_of: fn(f64) -> f64| -> f64 {
            let n = 40_960;
            let l = g.grating_length;
            let k = 2.0 * std::f64::consts::PI / g.lambda;
            let dr = l / n as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let rho = -l / 2.0 + (i as f64 + 0.5) * dr;
                let d = g.delta_x - rho;
                let phase = Complex64::from_polar(1.0, k * d * d / (2.0 * g.z));
                acc += Complex64::new(profile_of(std::f64::consts::PI * rho / l), 0.0) * phase;
            }
            (acc * dr / (g.lambda * g.z).sqrt()).norm_sqr() * 2.0 / l
        };

        let mean_h_oracle = oracle(f64::cos);
        let mean_v_oracle = oracle(f64::sin);
        assert_relative_eq!(point.mean_h, mean_h_oracle, max_relative = 1e-6);
        assert_relative_eq!(point.mean_v, mean_v_oracle, max_relative = 1e-6);
        assert!(point.mean_h > 0.0 && point.mean_v > 0.0);
    }

    #[test]
    fn z_sweep_varies_inside_the_band() {
        let mut values = Vec::new();
        for i in 0..8 {
            let z = 50.0 * i as f64;
            let point = detector_means(2.0, &geometry(0.4, z), &GridSpec::default()).unwrap();
            let (dist, g2) = combined_statistics(&point, DEFAULT_N_MAX).unwrap();
            assert!((dist.total_mass() - 1.0).abs() < 1e-10, "z = {z}");
            assert!((1.5..=2.0).contains(&g2), "z = {z}: g² = {g2}");
            values.push(g2);
        }
        let spread = values.iter().cloned().fold(f64::MIN, f64::max)
            - values.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread > 1e-3, "z sweep is flat: {values:?}");
    }

    #[test]
    fn truncation_is_saturated_at_defaults() {
        let point = detector_means(2.0, &geometry(0.4, 0.0), &GridSpec::default()).unwrap();
        let (p64, g64) = combined_statistics(&point, DEFAULT_N_MAX).unwrap();
        let (p96, g96) = combined_statistics(&point, DEFAULT_N_MAX * 3 / 2).unwrap();
        assert!((p64.mean() - p96.mean()).abs() < 1e-8);
        assert!((p64.variance() - p96.variance()).abs() < 1e-8);
        assert!((g64 - g96).abs() < 1e-8);
    }

    #[test]
    fn distribution_validation() {
        assert!(PhotonDistribution::new(vec![]).is_err());
        assert!(PhotonDistribution::new(vec![0.5, 0.4]).is_err());
        assert!(PhotonDistribution::new(vec![1.1, -0.1]).is_err());
        assert!(PhotonDistribution::new(vec![0.5, f64::NAN]).is_err());
        assert!(PhotonDistribution::new(vec![0.5, 0.25, 0.25]).is_ok());
    }

    proptest! {
        #[test]
        fn convolution_mass_and_mean(nbar_h in 0.0_f64..10.0, nbar_v in 0.0_f64..10.0) {
            let p_h = thermal_pmf(nbar_h, 320).unwrap();
            let p_v = thermal_pmf(nbar_v, 320).unwrap();
            let combined = convolve(&p_h, &p_v);
            prop_assert!((combined.total_mass() - 1.0).abs() < 1e-9);
            prop_assert!(
                (combined.mean() - (p_h.mean() + p_v.mean())).abs() < 1e-9
            );
            prop_assert!(combined.probabilities().iter().all(|&p| p >= 0.0));
        }

        #[test]
        fn combined_g2_respects_the_band(mean_h in 1e-3_f64..3.0, mean_v in 1e-3_f64..3.0) {
            let point = DetectorPoint { x: 0.0, z: 0.0, mean_h, mean_v };
            let (_, g2) = combined_statistics(&point, 256).unwrap();
            let predicted = 1.0
                + (mean_h * mean_h + mean_v * mean_v)
                    / ((mean_h + mean_v) * (mean_h + mean_v));
            prop_assert!((g2 - predicted).abs() < 1e-6);
            prop_assert!((1.5 - 1e-9..=2.0 + 1e-9).contains(&g2));
        }
    }
}
