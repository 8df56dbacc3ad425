//! The Taub-NUT two-forms as symplectic structures.
//!
//! Each `f_i` is covariantly constant and non-degenerate, hence closed and
//! usable as a symplectic form. The alternate fiber normalization breaks
//! covariant constancy, which the validation reports.

use kyano::geometry::{ChartRole, MetricSpec, TaubNutNormalization};
use kyano::kysym::{symplectic_from_ky, taubnut_field, SymplecticError};
use kyano::sampling;

fn main() -> Result<(), SymplecticError> {
    let m = 1.0;
    let spec = MetricSpec::taub_nut(m).expect("m > 0");
    let pts = sampling::regular_points(&spec, &mut sampling::rng(1), 20);

    for i in 1..=3 {
        let f = taubnut_field(i, m, ChartRole::Position)?;
        let w = symplectic_from_ky(&spec, &f, &pts, 1e-8)?;
        let x = &pts[0];
        // Hamiltonian vector field of H = r: dH = (1, 0, 0, 0)
        let v = w.hamiltonian_vector(x, &[1.0, 0.0, 0.0, 0.0])?;
        println!("f_{i}: symplectic at {} points, X_r = {v:+.6?}", pts.len());
    }

    let alt = MetricSpec::taub_nut_with(m, TaubNutNormalization::SixteenMSquared).expect("m > 0");
    let f = taubnut_field(1, m, ChartRole::Position)?;
    match symplectic_from_ky(&alt, &f, &pts, 1e-8) {
        Ok(_) => println!("16m^2: accepted"),
        Err(e) => println!("16m^2: {e}"),
    }

    match symplectic_from_ky(
        &MetricSpec::flat(3),
        &taubnut_field(1, m, ChartRole::Position)?,
        &pts,
        1e-8,
    ) {
        Ok(_) => unreachable!(),
        Err(e) => println!("flat(3): {e}"),
    }
    Ok(())
}
