use std::time::Instant;
use torlink::action::{action_difference, Measure, QuadratureConfig};
use torlink::isotopy::TwistProfile;
use torlink::*;

fn main() {
    let t = Torus::new(4.0).unwrap();
    let iso = Isotopy::twist(t, t.point(2.0, 2.0), TwistProfile::Linear).unwrap();
    let a = t.embed(t.point(2.0, 2.0));
    let b = PlanePoint::new(0.0, 0.0);

    for n in [64usize, 128] {
        let mu = Measure::lebesgue(n).unwrap();
        let mut quad = QuadratureConfig::for_torus(&t);
        quad.richardson = false;
        let start = Instant::now();
        let est = action_difference(&iso, &mu, a, b, &quad).unwrap();
        println!(
            "n={n}: value {:.6} err {:.2e} target {:.6} wall {:?}",
            est.value,
            est.error,
            2.0 * std::f64::consts::PI / 3.0,
            start.elapsed()
        );
    }
}
