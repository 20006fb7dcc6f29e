//! Write a curve to the text format, read it back and measure it.

use figure_integral::fields::rot;
use figure_integral::integral::Levels;
use figure_integral::region2d::{parse_curve, read_curve};
use figure_integral::verify::{green_verify, VerifyParams};

const PENTAGON: &str = "\
# a convex pentagon, listed clockwise
closed = true
orientation = cw
epsilon = 0
0.0 1.0
0.95, 0.31
0.59 -0.81
-0.59 -0.81
-0.95 0.31
";

fn main() -> figure_integral::Result<()> {
    let path = std::env::temp_dir().join("figint-pentagon.curve");
    std::fs::write(&path, PENTAGON).map_err(|source| figure_integral::Error::Io {
        path: path.clone(),
        source,
    })?;
    let c = read_curve(&path)?;
    assert_eq!(c.vertices(), parse_curve(PENTAGON, "inline")?.vertices());
    println!(
        "{} vertices, length {:.6}, signed area {:.6}, {:?}",
        c.len(),
        c.length(),
        c.signed_area(),
        c.orientation()
    );
    // Clockwise: the line integral is minus the enclosed area.
    let rep = green_verify(&rot(), &c, "pentagon", &VerifyParams::new(Levels::new(4, 8)?))?;
    println!("{}", rep.verdict());
    Ok(())
}
