//! Locate coherence revivals: the collapse-and-revival onset of the VHHV
//! element and the interior peak of HHHH, then show why the classical
//! control has neither.
//!
//!     cargo run --example resurrection

use qvcz::closedform::{find_resurrection, RevivalKind};
use qvcz::grating::SourceKind;

fn main() {
    let vhhv = find_resurrection(
        SourceKind::UnpolarizedTwoMode,
        "VHHV".parse().unwrap(),
        1.2,
        2.0,
    )
    .expect("VHHV revival exists on [1.2, 2]");
    describe("VHHV", &vhhv);

    let hhhh = find_resurrection(
        SourceKind::UnpolarizedTwoMode,
        "HHHH".parse().unwrap(),
        2.5,
        3.5,
    )
    .expect("HHHH has an interior peak on [2.5, 3.5]");
    describe("HHHH", &hhhh);

    // Classical curves are constant in nu, so the search refuses.
    let classical = find_resurrection(
        SourceKind::ClassicalIncoherent,
        "VHHV".parse().unwrap(),
        1.2,
        2.0,
    );
    println!("classical VHHV: {}", classical.unwrap_err());
}

fn describe(name: &str, r: &qvcz::closedform::Resurrection) {
    let kind = match r.kind {
        RevivalKind::Peak => "peak",
        RevivalKind::Onset => "revival onset (collapse point)",
    };
    println!(
        "{name}: |g2| {kind} at nu* = {:.6}, |g2| = {:.6}",
        r.nu_star,
        r.value.norm()
    );
}
