//! Green's theorem for smooth fields: the line integral, the circulation
//! figure integral and the classical curl integral side by side.

use figure_integral::fields::{grad, rot};
use figure_integral::geom2d::Rect;
use figure_integral::integral::Levels;
use figure_integral::region2d::{disk, lshape, square};
use figure_integral::verify::{divergence_oracle, green_verify, VerifyParams};

fn main() -> figure_integral::Result<()> {
    let params = VerifyParams::new(Levels::new(4, 9)?).with_bounds(Rect::new(-2.0, 2.0, -2.0, 2.0)?);
    let regions = [
        ("square", square(0.0, 0.0, 1.0)),
        ("disk:4096", disk(0.0, 0.0, 1.0, 4096)?),
        ("lshape", lshape()),
    ];
    for (name, c) in &regions {
        for v in [rot(), grad()] {
            let rep = green_verify(&v, c, name, &params)?;
            let curl = divergence_oracle(&v, c, &params)?;
            println!("{}", rep.verdict());
            println!("    curl integral {:.6}", curl.estimate);
        }
    }
    Ok(())
}
