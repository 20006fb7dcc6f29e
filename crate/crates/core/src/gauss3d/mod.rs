//! Closed triangulated surfaces, voxel covers and the divergence theorem.
//!
//! The surface side is a centroid rule on the mesh triangles. The volume
//! side is the figure integral, over inner and outer voxel figures, of the
//! flux through box faces. Neither uses a derivative of the field.

mod flux;
mod mesh;
mod voxel;

pub use flux::{
    figure_integral_3d, flux_function, gauss_verify, surface_cover_audit, surface_flux, voxel_level, BoxFunction,
    FluxFunction, GaussParams, SurfaceCoverAudit, VolumeFunction,
};
pub use mesh::{cube, icosphere, mesh_checks, parse_mesh, read_mesh, write_mesh, MeshChecks, Point3, TriMesh};
pub use voxel::{
    classify_voxels, default_box, triangle_box_overlap, Box3, VoxelClassification, VoxelGrid, VoxelIndex,
};
