//! GMRES-driven solution of the boundary integral formulations, with
//! completion operators, force/torque bookkeeping and rigid-motion
//! extraction.

pub mod density;
pub mod gmres;
pub mod problems;
pub mod rigid;

pub use gmres::{gmres, GmresReport, LinearOperator};
pub use problems::{
    solve_mobility, solve_porous, solve_resistance, solve_squirmer, SolverOptions,
};
pub use rigid::{extract_rigid_motion, net_force_torque, rho_from_forces, BodyForce, RigidMotion};
