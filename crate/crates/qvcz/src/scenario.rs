//! Scenario files and the runs they drive: ν sweeps with convergence
//! checking, numeric-vs-closed-form comparison, and photon-statistics
//! tables.
//!
//! Scenario files are flat `key = value` text. `#` starts a comment, blank
//! lines are skipped, keys may appear at most once. Dimensional values take
//! an optional `L` suffix meaning multiples of the grating length, e.g.
//! `z = 350 L`. Keys:
//!
//! ```text
//! source = unpolarized            # unpolarized | horizontal | classical
//! nu_start = 0                    # sweep grid (dimensionless)
//! nu_stop = 4
//! nu_step = 0.05
//! elements = all                  # or a comma list: HHHH, VHHV
//! nodes = 64                      # quadrature nodes per axis
//! tol = 1e-9                      # quadrature convergence tolerance
//! length = 1                      # grating length (sets the unit for "L")
//! lambda = 0.001 L                # wavelength
//! z = 350 L                       # alternative to the nu grid: a single
//! delta_x = 0.4 L                 # geometry, swept at its own nu
//! stats_x = 0.4 L                 # detector position for `stats`
//! stats_z = 0 L, 50 L, 100 L      # propagation distances for `stats`
//! total_mean_photons = 2
//! n_max = 64
//! p_cutoff = 8                    # pmf display truncation
//! ```
//!
//! Either give `nu_start/nu_stop/nu_step` or the `z`/`delta_x` pair, not
//! both. Everything has a default; the empty file is a valid scenario.

use std::fmt::Write as _;

use crate::closedform::ClosedFormCatalog;
use crate::coherence::g2_numeric;
use crate::grating::{SourceKind, SourceModel};
use crate::photonstats::{combined_statistics, detector_means, GridSpec, DEFAULT_N_MAX};
use crate::quadrature::QuadratureSpec;
use crate::types::{nu_of, ElementIndex, Geometry};
use crate::{Error, Result};
use num_complex::Complex64;

/// Hard cap on sweep grid size; guards against a typo'd step.
const MAX_GRID_POINTS: usize = 100_001;

/// The ν grid of a sweep: an explicit range, or the single ν implied by a
/// physical geometry.
#[derive(Debug, Clone, PartialEq)]
pub enum NuGrid {
    Range { start: f64, stop: f64, step: f64 },
    FromGeometry(Geometry),
}

impl NuGrid {
    /// Materialized grid points, ascending. The range endpoint is included
    /// when it lands on the step lattice (within 1e-9 of a step).
    pub fn points(&self) -> Result<Vec<f64>> {
        match *self {
            NuGrid::Range { start, stop, step } => {
                let span = stop - start;
                if !(span.is_finite() && start.is_finite() && step > 0.0) {
                    return Err(Error::InvalidScenario(format!(
                        "nu range [{start}, {stop}] step {step} is not a finite ascending grid"
                    )));
                }
                if span < 0.0 {
                    return Err(Error::InvalidScenario(format!(
                        "nu_stop {stop} is below nu_start {start}"
                    )));
                }
                let count = (span / step + 1e-9).floor() as usize + 1;
                if count > MAX_GRID_POINTS {
                    return Err(Error::InvalidScenario(format!(
                        "nu grid has {count} points; the limit is {MAX_GRID_POINTS}"
                    )));
                }
                Ok((0..count).map(|i| start + i as f64 * step).collect())
            }
            NuGrid::FromGeometry(ref geometry) => Ok(vec![nu_of(geometry)?]),
        }
    }
}

/// Configuration of the photon-statistics run. Positions and distances are
/// absolute (same unit as the grating length).
#[derive(Debug, Clone, PartialEq)]
pub struct StatsConfig {
    pub x: f64,
    pub z_list: Vec<f64>,
    pub total_mean_photons: f64,
    pub n_max: usize,
    /// pmf display truncation: records carry p(0..=p_cutoff).
    pub p_cutoff: usize,
}

impl StatsConfig {
    fn default_for(length: f64) -> Self {
        StatsConfig {
            x: 0.4 * length,
            z_list: (0..8).map(|i| 50.0 * i as f64 * length).collect(),
            total_mean_photons: 2.0,
            n_max: DEFAULT_N_MAX,
            p_cutoff: 8,
        }
    }
}

/// One fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub source: SourceKind,
    pub grid: NuGrid,
    pub quadrature: QuadratureSpec,
    /// Elements to evaluate, in output order.
    pub elements: Vec<ElementIndex>,
    pub stats: StatsConfig,
    /// Grating length L; the unit behind every `L` suffix.
    pub length: f64,
    /// Wavelength. Default L/1000: Fresnel number L²/(λz) ≈ 2.9 at
    /// z = 350 L, inside the near-to-far transition the z sweeps probe.
    pub lambda: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            source: SourceKind::UnpolarizedTwoMode,
            grid: NuGrid::Range {
                start: 0.0,
                stop: 4.0,
                step: 0.05,
            },
            quadrature: QuadratureSpec::default(),
            elements: ElementIndex::all().to_vec(),
            stats: StatsConfig::default_for(1.0),
            length: 1.0,
            lambda: 1e-3,
        }
    }
}

/// A parsed dimensional value: resolved against the grating length only
/// after the whole file is read, so `length` may appear anywhere.
#[derive(Debug, Clone, Copy)]
struct Dim {
    value: f64,
    in_l: bool,
}

impl Dim {
    fn resolve(self, length: f64) -> f64 {
        if self.in_l {
            self.value * length
        } else {
            self.value
        }
    }
}

#[derive(Default)]
struct Builder {
    source: Option<SourceKind>,
    nu_start: Option<f64>,
    nu_stop: Option<f64>,
    nu_step: Option<f64>,
    length: Option<f64>,
    lambda: Option<Dim>,
    z: Option<Dim>,
    delta_x: Option<Dim>,
    elements: Option<Vec<ElementIndex>>,
    nodes: Option<usize>,
    tol: Option<f64>,
    stats_x: Option<Dim>,
    stats_z: Option<Vec<Dim>>,
    total_mean_photons: Option<f64>,
    n_max: Option<usize>,
    p_cutoff: Option<usize>,
}

fn config_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn parse_f64(value: &str, line: usize) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .map_err(|_| config_err(line, format!("expected a number, got {:?}", value.trim())))
}

fn parse_usize(value: &str, line: usize) -> Result<usize> {
    value
        .trim()
        .parse::<usize>()
        .map_err(|_| config_err(line, format!("expected an integer, got {:?}", value.trim())))
}

/// A number with an optional `L` suffix (multiples of the grating length).
fn parse_dim(value: &str, line: usize) -> Result<Dim> {
    let trimmed = value.trim();
    let (body, in_l) = match trimmed.strip_suffix('L') {
        Some(body) => (body, true),
        None => (trimmed, false),
    };
    Ok(Dim {
        value: parse_f64(body, line)?,
        in_l,
    })
}

fn parse_elements(value: &str, line: usize) -> Result<Vec<ElementIndex>> {
    if value.trim().eq_ignore_ascii_case("all") {
        return Ok(ElementIndex::all().to_vec());
    }
    let elements: Vec<ElementIndex> = value
        .split(',')
        .filter(|part| !part.trim().is_empty())
        .map(|part| part.parse::<ElementIndex>())
        .collect::<std::result::Result<_, String>>()
        .map_err(|message| config_err(line, message))?;
    if elements.is_empty() {
        return Err(config_err(line, "element list is empty"));
    }
    Ok(elements)
}

/// Parse a scenario file. Errors carry the 1-based line number of the
/// offending entry.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut b = Builder::default();
    let mut seen: Vec<String> = Vec::new();

    for (index, raw_line) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw_line.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| config_err(line, format!("expected 'key = value', got {:?}", content.trim())))?;
        let key = key.trim().to_ascii_lowercase();
        if seen.contains(&key) {
            return Err(config_err(line, format!("duplicate key {key:?}")));
        }
        seen.push(key.clone());

        match key.as_str() {
            "source" => {
                b.source = Some(
                    value
                        .parse::<SourceKind>()
                        .map_err(|message| config_err(line, message))?,
                )
            }
            "nu_start" => b.nu_start = Some(parse_f64(value, line)?),
            "nu_stop" => b.nu_stop = Some(parse_f64(value, line)?),
            "nu_step" => b.nu_step = Some(parse_f64(value, line)?),
            "length" => b.length = Some(parse_f64(value, line)?),
            "lambda" => b.lambda = Some(parse_dim(value, line)?),
            "z" => b.z = Some(parse_dim(value, line)?),
            "delta_x" => b.delta_x = Some(parse_dim(value, line)?),
            "elements" => b.elements = Some(parse_elements(value, line)?),
            "nodes" => b.nodes = Some(parse_usize(value, line)?),
            "tol" => b.tol = Some(parse_f64(value, line)?),
            "stats_x" => b.stats_x = Some(parse_dim(value, line)?),
            "stats_z" => {
                let list: Vec<Dim> = value
                    .split(',')
                    .filter(|part| !part.trim().is_empty())
                    .map(|part| parse_dim(part, line))
                    .collect::<Result<_>>()?;
                if list.is_empty() {
                    return Err(config_err(line, "stats_z list is empty"));
                }
                b.stats_z = Some(list);
            }
            "total_mean_photons" => b.total_mean_photons = Some(parse_f64(value, line)?),
            "n_max" => b.n_max = Some(parse_usize(value, line)?),
            "p_cutoff" => b.p_cutoff = Some(parse_usize(value, line)?),
            other => return Err(config_err(line, format!("unknown key {other:?}"))),
        }
    }

    finish(b)
}

fn finish(b: Builder) -> Result<Scenario> {
    let length = b.length.unwrap_or(1.0);
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::InvalidScenario(format!(
            "length must be positive, got {length}"
        )));
    }
    let lambda = b
        .lambda
        .map(|d| d.resolve(length))
        .unwrap_or(1e-3 * length);
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidScenario(format!(
            "lambda must be positive, got {lambda}"
        )));
    }

    let has_range = b.nu_start.is_some() || b.nu_stop.is_some() || b.nu_step.is_some();
    let has_geometry = b.z.is_some() || b.delta_x.is_some();
    let grid = match (has_range, has_geometry) {
        (true, true) => {
            return Err(Error::InvalidScenario(
                "give either a nu range or a z/delta_x geometry, not both".to_string(),
            ))
        }
        (_, false) => NuGrid::Range {
            start: b.nu_start.unwrap_or(0.0),
            stop: b.nu_stop.unwrap_or(4.0),
            step: b.nu_step.unwrap_or(0.05),
        },
        (false, true) => {
            let (Some(z), Some(delta_x)) = (b.z, b.delta_x) else {
                return Err(Error::InvalidScenario(
                    "a geometry-driven sweep needs both z and delta_x".to_string(),
                ));
            };
            NuGrid::FromGeometry(Geometry {
                grating_length: length,
                lambda,
                z: z.resolve(length),
                delta_x: delta_x.resolve(length),
            })
        }
    };
    // Surface bad ranges at parse time, not first use.
    grid.points()?;

    let quadrature = QuadratureSpec {
        nodes_per_axis: b.nodes.unwrap_or(QuadratureSpec::default().nodes_per_axis),
        target_abs_tol: b.tol.unwrap_or(QuadratureSpec::default().target_abs_tol),
    };
    quadrature.validate()?;

    let defaults = StatsConfig::default_for(length);
    let stats = StatsConfig {
        x: b.stats_x.map(|d| d.resolve(length)).unwrap_or(defaults.x),
        z_list: b
            .stats_z
            .map(|list| list.into_iter().map(|d| d.resolve(length)).collect())
            .unwrap_or(defaults.z_list),
        total_mean_photons: b
            .total_mean_photons
            .unwrap_or(defaults.total_mean_photons),
        n_max: b.n_max.unwrap_or(defaults.n_max),
        p_cutoff: b.p_cutoff.unwrap_or(defaults.p_cutoff),
    };
    if !(stats.total_mean_photons.is_finite() && stats.total_mean_photons > 0.0) {
        return Err(Error::InvalidScenario(format!(
            "total_mean_photons must be positive, got {}",
            stats.total_mean_photons
        )));
    }

    Ok(Scenario {
        source: b.source.unwrap_or(SourceKind::UnpolarizedTwoMode),
        grid,
        quadrature,
        elements: b.elements.unwrap_or_else(|| ElementIndex::all().to_vec()),
        stats,
        length,
        lambda,
    })
}

/// Canonical scenario text: every key explicit, floats in scientific
/// notation with shortest round-trip digits, dimensional values written in
/// units of L. Re-parsing reproduces the scenario exactly when the length
/// is 1 (the default unit system); other lengths round-trip to within one
/// floating-point division.
pub fn dump_config(scenario: &Scenario) -> String {
    let l = scenario.length;
    let mut out = String::new();
    let _ = writeln!(out, "source = {}", scenario.source);
    match scenario.grid {
        NuGrid::Range { start, stop, step } => {
            let _ = writeln!(out, "nu_start = {start:e}");
            let _ = writeln!(out, "nu_stop = {stop:e}");
            let _ = writeln!(out, "nu_step = {step:e}");
        }
        NuGrid::FromGeometry(ref g) => {
            let _ = writeln!(out, "z = {:e} L", g.z / l);
            let _ = writeln!(out, "delta_x = {:e} L", g.delta_x / l);
        }
    }
    let elements: Vec<String> = scenario.elements.iter().map(|e| e.to_string()).collect();
    if scenario.elements == ElementIndex::all() {
        let _ = writeln!(out, "elements = all");
    } else {
        let _ = writeln!(out, "elements = {}", elements.join(", "));
    }
    let _ = writeln!(out, "nodes = {}", scenario.quadrature.nodes_per_axis);
    let _ = writeln!(out, "tol = {:e}", scenario.quadrature.target_abs_tol);
    let _ = writeln!(out, "length = {l:e}");
    let _ = writeln!(out, "lambda = {:e} L", scenario.lambda / l);
    let _ = writeln!(out, "stats_x = {:e} L", scenario.stats.x / l);
    let stats_z: Vec<String> = scenario
        .stats
        .z_list
        .iter()
        .map(|z| format!("{:e} L", z / l))
        .collect();
    let _ = writeln!(out, "stats_z = {}", stats_z.join(", "));
    let _ = writeln!(
        out,
        "total_mean_photons = {:e}",
        scenario.stats.total_mean_photons
    );
    let _ = writeln!(out, "n_max = {}", scenario.stats.n_max);
    let _ = writeln!(out, "p_cutoff = {}", scenario.stats.p_cutoff);
    out
}

/// One element's pair of values at one ν.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementEntry {
    pub element: ElementIndex,
    pub numeric: Complex64,
    pub closed_form: Complex64,
}

impl ElementEntry {
    /// |numeric − closed|, always computed from the stored pair.
    pub fn abs_err(&self) -> f64 {
        (self.numeric - self.closed_form).norm()
    }
}

/// All requested elements at one ν grid point, in scenario element order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub nu: f64,
    pub entries: Vec<ElementEntry>,
}

/// Run the sweep: every element at every grid point, by quadrature and by
/// closed form.
///
/// Each quadrature value is certified by a node-doubling check before it
/// enters a record; a point that moves by more than the quadrature
/// tolerance under doubling aborts the sweep with [`Error::NotConverged`]
/// naming the element and ν. The certified (doubled) value is the one
/// reported.
pub fn run_sweep(scenario: &Scenario) -> Result<Vec<SweepRecord>> {
    scenario.quadrature.validate()?;
    if scenario.elements.is_empty() {
        return Err(Error::InvalidScenario("element list is empty".to_string()));
    }
    let source = SourceModel::new(scenario.source);
    let catalog = ClosedFormCatalog::new(scenario.source);
    let doubled = scenario.quadrature.doubled();
    let points = scenario.grid.points()?;

    let mut records = Vec::with_capacity(points.len());
    for nu in points {
        let mut entries = Vec::with_capacity(scenario.elements.len());
        for &element in &scenario.elements {
            let coarse = g2_numeric(&source, element, nu, &scenario.quadrature)?.normalized;
            let fine = g2_numeric(&source, element, nu, &doubled)?.normalized;
            let delta = (fine - coarse).norm();
            let tol = scenario.quadrature.target_abs_tol;
            if delta > tol {
                return Err(Error::NotConverged {
                    what: format!(
                        "element {element} at nu = {nu} with {} nodes per axis \
                         (need about {})",
                        scenario.quadrature.nodes_per_axis,
                        QuadratureSpec::nodes_for_oscillation(nu)
                    ),
                    delta,
                    tol,
                });
            }
            entries.push(ElementEntry {
                element,
                numeric: fine,
                closed_form: catalog.evaluate(element, nu),
            });
        }
        records.push(SweepRecord { nu, entries });
    }
    Ok(records)
}

/// Per-element outcome of a comparison run.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementComparison {
    pub element: ElementIndex,
    pub max_abs_err: f64,
    pub worst_nu: f64,
    /// True where the closed form rests on reconstructed argument offsets
    /// rather than printed expressions.
    pub reconstructed: bool,
}

/// Comparison of the quadrature engine against the closed-form catalog over
/// the whole grid, at the scenario's requested node count (single shot, no
/// refinement: under-resolution is the failure mode this run exists to
/// expose).
#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub source: SourceKind,
    pub tolerance: f64,
    pub grid_points: usize,
    pub nodes_used: usize,
    /// Node count the oscillation sizing rule asks for at the largest |ν|
    /// on the grid; the convergence diagnostic on failure.
    pub nodes_recommended: usize,
    pub elements: Vec<ElementComparison>,
}

impl CompareReport {
    pub fn passed(&self) -> bool {
        self.elements.iter().all(|e| e.max_abs_err <= self.tolerance)
    }

    /// The element with the largest discrepancy. Reports on at least one
    /// element exist by construction.
    pub fn worst(&self) -> &ElementComparison {
        self.elements
            .iter()
            .max_by(|a, b| a.max_abs_err.total_cmp(&b.max_abs_err))
            .expect("comparison covers at least one element")
    }

    /// Any element whose closed form is reconstructed.
    pub fn has_reconstructed(&self) -> bool {
        self.elements.iter().any(|e| e.reconstructed)
    }
}

/// Run the comparison. `tolerance` is the pass bound on |numeric − closed|.
pub fn run_compare(scenario: &Scenario, tolerance: f64) -> Result<CompareReport> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::InvalidScenario(format!(
            "comparison tolerance must be positive, got {tolerance}"
        )));
    }
    scenario.quadrature.validate()?;
    if scenario.elements.is_empty() {
        return Err(Error::InvalidScenario("element list is empty".to_string()));
    }
    let source = SourceModel::new(scenario.source);
    let catalog = ClosedFormCatalog::new(scenario.source);
    let points = scenario.grid.points()?;

    let mut comparisons: Vec<ElementComparison> = scenario
        .elements
        .iter()
        .map(|&element| ElementComparison {
            element,
            max_abs_err: 0.0,
            worst_nu: points[0],
            reconstructed: catalog.is_reconstructed(element),
        })
        .collect();
    let mut nodes_recommended = 0;

    for &nu in &points {
        nodes_recommended = nodes_recommended.max(QuadratureSpec::nodes_for_oscillation(nu));
        for comparison in comparisons.iter_mut() {
            let numeric =
                g2_numeric(&source, comparison.element, nu, &scenario.quadrature)?.normalized;
            let closed = catalog.evaluate(comparison.element, nu);
            let err = (numeric - closed).norm();
            if err > comparison.max_abs_err {
                comparison.max_abs_err = err;
                comparison.worst_nu = nu;
            }
        }
    }

    Ok(CompareReport {
        source: scenario.source,
        tolerance,
        grid_points: points.len(),
        nodes_used: scenario.quadrature.nodes_per_axis,
        nodes_recommended,
        elements: comparisons,
    })
}

/// Photon statistics at one propagation distance.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsRecord {
    pub z_over_l: f64,
    pub x_over_l: f64,
    pub mean_h: f64,
    pub mean_v: f64,
    pub g2: f64,
    /// p(0..=p_cutoff) of the combined distribution (display head; the g²
    /// above uses the full support).
    pub pmf_head: Vec<f64>,
    pub total_mass: f64,
}

/// Run the photon-statistics table over the scenario's z list.
pub fn run_stats(scenario: &Scenario) -> Result<Vec<StatsRecord>> {
    let stats = &scenario.stats;
    let grid = GridSpec::default();
    let mut records = Vec::with_capacity(stats.z_list.len());
    for &z in &stats.z_list {
        let geometry = Geometry {
            grating_length: scenario.length,
            lambda: scenario.lambda,
            z,
            delta_x: stats.x,
        };
        let point = detector_means(stats.total_mean_photons, &geometry, &grid)?;
        let (distribution, g2) = combined_statistics(&point, stats.n_max)?;
        let pmf_head = (0..=stats.p_cutoff.min(distribution.n_max()))
            .map(|n| distribution.p(n))
            .collect();
        records.push(StatsRecord {
            z_over_l: z / scenario.length,
            x_over_l: stats.x / scenario.length,
            mean_h: point.mean_h,
            mean_v: point.mean_v,
            g2,
            pmf_head,
            total_mass: distribution.total_mass(),
        });
    }
    Ok(records)
}
