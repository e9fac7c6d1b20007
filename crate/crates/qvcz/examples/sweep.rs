//! Sweep the coherence matrix over detector separation and print a few
//! elements side by side with their closed forms.
//!
//!     cargo run --example sweep

use qvcz::scenario::{run_sweep, NuGrid, Scenario};

fn main() -> Result<(), qvcz::Error> {
    // Coarse grid so the example finishes instantly; the defaults cover
    // [0, 4] in steps of 0.05.
    let scenario = Scenario {
        grid: NuGrid::Range {
            start: 0.0,
            stop: 2.0,
            step: 0.25,
        },
        elements: vec!["HHHH".parse().unwrap(), "VHHV".parse().unwrap()],
        ..Scenario::default()
    };

    let records = run_sweep(&scenario)?;

    println!("{:>5}  {:>12}  {:>12}  {:>9}", "nu", "g2_HHHH", "|g2_VHHV|", "|num-cf|");
    for record in &records {
        let hhhh = &record.entries[0];
        let vhhv = &record.entries[1];
        let worst = hhhh.abs_err().max(vhhv.abs_err());
        println!(
            "{:>5.2}  {:>12.8}  {:>12.8}  {:>9.1e}",
            record.nu,
            hhhh.numeric.re,
            vhhv.numeric.norm(),
            worst
        );
    }

    // The same records serialize to the CSV the `sweep` subcommand emits:
    // qvcz::report::sweep_csv(&records).
    Ok(())
}
