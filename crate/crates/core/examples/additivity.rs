//! Split random rectangles and boxes at panel lines and measure how far
//! each catalog function is from additive.

use figure_integral::fields::catalog;
use figure_integral::quadrature::QuadratureSpec;
use figure_integral::verify::additivity_study;

fn main() -> figure_integral::Result<()> {
    let fields: Vec<_> = catalog().into_iter().map(|(_, f)| f).collect();
    let q = QuadratureSpec::new(8, 1.0 / 16.0)?;
    for row in additivity_study(&fields, 1000, 42, &q)? {
        println!("{:<22} {:>5} samples  max defect {:e}", row.function, row.samples, row.max_defect);
    }
    Ok(())
}
