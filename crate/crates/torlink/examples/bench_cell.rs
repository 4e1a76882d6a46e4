use std::time::Instant;
use torlink::isotopy::TwistProfile;
use torlink::orbits::{recurrent_linking, ConvergenceConfig, ReturnDisk};
use torlink::*;

fn main() {
    let t = Torus::new(4.0).unwrap();
    let iso = Isotopy::twist(t, t.point(2.0, 2.0), TwistProfile::Linear).unwrap();
    let a = t.embed(t.point(2.0, 2.0));
    let b = PlanePoint::new(0.0, 0.0);
    let cfg = RefineConfig::default();
    let conv = ConvergenceConfig {
        window: 8,
        tol: 2.5e-4,
        periodic_eps: 1e-9,
        max_iterations: 1500,
    };
    for r in [0.15f64, 0.45, 0.75, 0.95] {
        let z = t.point(2.0 + r * 0.7071, 2.0 + r * 0.7072);
        let radius = (0.5f64).min(t.dist(z, t.point(2.0, 2.0)) / 2.0).min(t.dist(z, t.point(0.0, 0.0)) / 2.0);
        let disk = ReturnDisk::new(&t, z, radius).unwrap().with_cap(1500);
        let start = Instant::now();
        let mut est = None;
        for _ in 0..20 {
            est = Some(recurrent_linking(&iso, a, b, z, &disk, &conv, &cfg, 5, false).unwrap());
        }
        let est = est.unwrap();
        let per_iter = start.elapsed().as_nanos() as f64 / 20.0 / est.iterations as f64;
        println!(
            "r={r:.2}: value {:+.6} iters {} per-iter {:.0} ns",
            est.value, est.iterations, per_iter
        );
    }
}
