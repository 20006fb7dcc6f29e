//! The divergence theorem on an icosphere: surface flux against the voxel
//! figure integral of the box flux function.

use figure_integral::fields::{const3, radial, weier3, Weierstrass};
use figure_integral::gauss3d::{gauss_verify, icosphere, mesh_checks, surface_cover_audit, Box3, GaussParams, VoxelGrid};
use figure_integral::integral::Levels;

fn main() -> figure_integral::Result<()> {
    let m = icosphere(4);
    let checks = mesh_checks(&m);
    println!(
        "icosphere:4  triangles {}  area {:.6}  volume {:.6}  closed {}",
        m.len(),
        checks.area,
        checks.signed_volume,
        checks.closed
    );

    let world = Box3::cube([0.0; 3], 2.0)?;
    let mut params = GaussParams::new(Levels::new(3, 6)?).with_bounds(world);
    for v in [radial(), const3([1.0, -2.0, 0.5])] {
        println!("{}", gauss_verify(&v, &m, "icosphere:4", &params)?.verdict());
    }

    // The centroid rule settles slowly on a rough integrand.
    params.tol_line = 1e-2;
    println!(
        "{}",
        gauss_verify(&weier3(Weierstrass::DEFAULT), &m, "icosphere:4", &params)?.verdict()
    );

    for level in 3..=6 {
        let a = surface_cover_audit(&m, &VoxelGrid::new(world, level)?)?;
        println!(
            "level {level}: {} boundary voxels, face area {:.3} <= {:.3} (ratio {:.3})",
            a.boundary_voxels, a.total_face_area, a.bound, a.ratio
        );
    }
    Ok(())
}
