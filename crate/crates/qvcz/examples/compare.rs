//! Cross-check the quadrature engine against the closed forms for both
//! quantum sources and report the worst disagreement.
//!
//!     cargo run --example compare

use qvcz::grating::SourceKind;
use qvcz::scenario::{run_compare, NuGrid, Scenario};

fn main() -> Result<(), qvcz::Error> {
    for source in [
        SourceKind::UnpolarizedTwoMode,
        SourceKind::HorizontalIndistinguishable,
    ] {
        let scenario = Scenario {
            source,
            grid: NuGrid::Range {
                start: 0.0,
                stop: 4.0,
                step: 0.25,
            },
            ..Scenario::default()
        };

        let report = run_compare(&scenario, 1e-6)?;
        let worst = report.worst();
        println!(
            "{}: {} elements x {} nu points, worst |quadrature - closed| = {:.3e} ({} at nu = {})",
            source, report.elements.len(), report.grid_points,
            worst.max_abs_err, worst.element, worst.worst_nu
        );
        if report.has_reconstructed() {
            let flagged: Vec<String> = report
                .elements
                .iter()
                .filter(|c| c.reconstructed)
                .map(|c| c.element.to_string())
                .collect();
            println!(
                "  {} closed forms are offset reconstructions checked against quadrature: {}",
                flagged.len(),
                flagged.join(" ")
            );
        }
        assert!(report.passed());
    }
    Ok(())
}
