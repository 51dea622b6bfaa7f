use sphere_bie::coeffs::VectorCoeffsVWX;
use sphere_bie::evaluation::geometry::{Sphere, TargetBatch};
use sphere_bie::evaluation::near::{near_eval_direct_vector, EvalOptions};
use sphere_bie::evaluation::quadrature::smooth_quadrature_eval_vector;
use sphere_bie::grid::{GridSpec, SphGrid};
use sphere_bie::harmonics::{sph_to_cart, VectorChannel};
use sphere_bie::solver::rigid::cartesian_values;
use sphere_bie::spectra::OperatorKind;
use std::sync::Arc;

fn main() {
    let p = 16;
    let g = Arc::new(SphGrid::new(GridSpec::new(p).unwrap()));
    let s = Sphere::new(0, [0.0; 3], 1.0, g).unwrap();
    let x = [0.0, 3.0, 4.0]; // r = 5
    let nu_list: [[f64; 3]; 3] = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.6, 0.0, 0.8],
    ];
    for (ch, n, m) in [
        (VectorChannel::V, 2, 1i64),
        (VectorChannel::W, 1, 0),
        (VectorChannel::W, 3, -2),
        (VectorChannel::X, 2, 2),
    ] {
        let c = VectorCoeffsVWX::unit(p, ch, n, m);
        let vals = cartesian_values(&s, &c);
        for nu in nu_list {
            let nrm = sphere_bie::linalg::normalize(nu).unwrap();
            let t = TargetBatch::with_normals(vec![x], vec![nrm]).unwrap();
            let quad = smooth_quadrature_eval_vector(OperatorKind::StokesKplus, &s, &vals, &t).unwrap();
            let direct = near_eval_direct_vector(OperatorKind::StokesKplus, &c, &s, &t, EvalOptions::default()).unwrap();
            let dx = x;
            let r = 5.0f64;
            let th = (dx[2] / r).acos();
            let ph = dx[1].atan2(dx[0]);
            let d = sph_to_cart(th, ph, direct[0]);
            let mut worst: f64 = 0.0;
            let mut mag: f64 = 0.0;
            for k in 0..3 {
                worst = worst.max((d[k] - quad[0][k]).norm());
                mag = mag.max(quad[0][k].norm());
            }
            println!("{ch:?} ({n},{m}) nu={nu:?}: defect {worst:.3e} (scale {mag:.3e})");
        }
    }
}
