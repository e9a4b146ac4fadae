//! Polyhedral sets in inequality (H) and generator (V) form.

mod affine;
mod cone;
pub mod dd;
mod hrep;
pub mod ops;
mod vrep;

pub use affine::AffineMap;
pub use cone::Cone;
pub use dd::{dd_convert, dd_convert_back, dim_cap};
pub use hrep::{Constraint, HPolyhedron};
pub use ops::{
    affine_hull, convex_hull_union, implicit_equalities, intersect, intersect_v, is_subset, joint_ri_nonempty,
    joint_ri_point, linear_image, minimize_h, minimize_v, minkowski_diff, minkowski_sum, project_coords, project_h,
    ri_contains, ri_point, set_equal, PolyhedralSet, RiCertificate,
};
pub use vrep::VPolyhedron;
