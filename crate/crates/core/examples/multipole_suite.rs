//! Multipole identities in direct and Killing-Yano form.

use kyano::cli::phase_samples;
use kyano::dynamics::PhasePoint;
use kyano::multipole::{
    evaluate_multipoles, identity_suite, reconstruct_ky_from_generators, Expectations,
};

fn main() {
    let z = PhasePoint::new(vec![0.3, -0.5, 0.2], vec![0.6, 0.1, -0.4]).unwrap();
    let m = evaluate_multipoles(&z);
    println!("L         = {:+.6?}", m.l.as_slice());
    println!("mu (KY)   = {:+.6?}", m.mu_ky.as_slice());
    println!("A (Runge-Lenz) = {:+.6?}", m.a.as_slice());
    match reconstruct_ky_from_generators(&z) {
        Ok(r) => println!(
            "generators rebuild (f, f~) with the {:?} pairing",
            r.pairing
        ),
        Err(e) => println!("{e}"),
    }
    println!();

    let report = identity_suite(&phase_samples(42, 1000));
    print!("{}", report.to_table());
    if let Some(fit) = report.quadrupole_fit {
        println!("\nquadrupole fit: a = {:.12}, b = {:.12}", fit.a, fit.b);
    }
    let mismatches = Expectations::shipped().compare(&report);
    println!("expectation table mismatches: {}", mismatches.len());
}
