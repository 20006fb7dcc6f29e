//! Green's theorem for a field with Weierstrass components, which has no
//! derivative anywhere.
//!
//! Over the centred disk the two sides vanish by symmetry. Moving the disk
//! off centre gives a nonzero value, and the line integral lands inside the
//! inner/outer bracket.

use figure_integral::fields::{weier, Weierstrass};
use figure_integral::geom2d::Rect;
use figure_integral::integral::Levels;
use figure_integral::region2d::disk;
use figure_integral::verify::{green_verify, VerifyParams};

fn main() -> figure_integral::Result<()> {
    let v = weier(Weierstrass::DEFAULT);
    let params = VerifyParams::new(Levels::new(4, 10)?).with_bounds(Rect::new(-2.0, 2.0, -2.0, 2.0)?);
    for (cx, cy) in [(0.0, 0.0), (0.3, 0.2), (0.1, -0.35)] {
        let c = disk(cx, cy, 1.0, 4096)?;
        let rep = green_verify(&v, &c, &format!("disk({cx},{cy})"), &params)?;
        println!("{}", rep.verdict());
        for r in &rep.rhs.rows {
            println!("    level {:>2}: inner {:>10.6} outer {:>10.6}", r.level, r.inner, r.outer);
        }
        println!(
            "    line integral {:.6}, halved segments {:.6}, oscillation bound {:.3}",
            rep.lhs,
            rep.lhs_refined,
            rep.oscillation_bound.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
