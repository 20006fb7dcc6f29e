//! Inner and outer Jordan content of the unit disk on refining grids.
//!
//! ```text
//! cargo run --example jordan_disk
//! ```

use std::f64::consts::PI;

use figure_integral::geom2d::Rect;
use figure_integral::integral::{jordan_content, Levels};
use figure_integral::region2d::disk;

fn main() -> figure_integral::Result<()> {
    let d = disk(0.0, 0.0, 1.0, 4096)?;
    let bounds = Rect::new(-2.0, 2.0, -2.0, 2.0)?;
    let rep = jordan_content(&d, Levels::new(4, 10)?, Some(bounds))?;

    println!("level        h      inner      outer        gap  boundary");
    for r in &rep.rows {
        println!(
            "{:>5} {:>8.5} {:>10.6} {:>10.6} {:>10.6} {:>9}",
            r.level, r.h, r.inner, r.outer, r.gap, r.boundary_cells
        );
    }
    println!("estimate {:.6}, pi {:.6}, monotone {}", rep.estimate, PI, rep.is_monotone());
    Ok(())
}
