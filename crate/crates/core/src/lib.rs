//! Solvers for scalar wave scattering by small particles: closed-form
//! asymptotic amplitudes for one body, effective-field linear systems for
//! many bodies, limiting-medium integral equations solved by collocation,
//! and an asymptotics-free boundary-element oracle that validates it all at
//! desk scale.

pub mod bem;
pub mod error;
pub mod geometry;
pub mod incident;
pub mod kernels;
pub mod linalg;
pub mod potential;
pub mod one_body;
pub mod shape;

pub use bem::{
    far_field, solve_dirichlet_bem, solve_impedance_bem, solve_impedance_bem_multi,
    solve_transmission_bem, BemBody, BemConfig, BemSolution,
};
pub use error::{Error, Result};
pub use geometry::{
    load_mesh, make_ellipsoid_mesh, make_sphere_mesh, make_volume_grid, mesh_area, mesh_volume,
    parse_mesh_str, Box3, Point, SurfaceMesh, Vector, VolumeGrid,
};
pub use incident::IncidentField;
pub use potential::{
    assemble_a, assemble_single_layer, kernel_g, normal_derivative_volume_potential, single_layer,
    volume_potential, BoundaryOperatorMatrix, PanelDensity,
};
pub use one_body::{
    amplitude_dirichlet, amplitude_impedance, amplitude_neumann, one_body_dirichlet,
    one_body_impedance, one_body_neumann, one_body_transmission, scattered_field_one_body,
    OneBodyResult,
};
pub use shape::{
    capacitance_bem, capacitance_zeroth, charge_q_sigma, polarizability_tensor, ShapeFunctionals,
};
