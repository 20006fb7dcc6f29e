//! Total perimeter of the Boundary cells against `16 L + 16 h`.

use figure_integral::geom2d::{DyadicGrid, Rect};
use figure_integral::region2d::{disk, lshape, square};
use figure_integral::verify::perimeter_bound_audit;

fn main() -> figure_integral::Result<()> {
    let world = Rect::new(-2.0, 2.0, -2.0, 2.0)?;
    let curves = [
        ("square", square(0.0, 0.0, 1.0)),
        ("disk:4096", disk(0.0, 0.0, 1.0, 4096)?),
        ("lshape", lshape()),
    ];
    for (name, c) in &curves {
        for level in 4..=9 {
            let a = perimeter_bound_audit(c, &DyadicGrid::new(world, level)?)?;
            println!(
                "{name:<10} level {level}: {:>5} cells, perimeter {:>8.3}, bound {:>8.3}, ratio {:.3}",
                a.boundary_cells, a.total_perimeter, a.bound, a.ratio
            );
        }
    }
    Ok(())
}
