use num_complex::Complex64 as C64;
use rkg_core::analytic::AnalyticProfile;
use rkg_core::dynamics::{Stepper, SystemKind};
use rkg_core::grid::Grid;
use rkg_core::profiles::ScatteringData;
use std::time::Instant;

fn main() {
    for n in [192usize, 256] {
        let grid = Grid::<f64>::new(n, n as f64 * 1.5).unwrap();
        let data = ScatteringData::from_catalog(
            &grid, 1.0,
            Some(AnalyticProfile::gaussian(C64::new(1.0, 0.0), [0.0, 0.0], 6.0)),
            Some(AnalyticProfile::gaussian(C64::new(0.5, 0.0), [0.0, 0.0], 6.0)),
        );
        let stepper = Stepper::new(&grid, 1.0, SystemKind::A, 0.05);
        let mut a = data.state().clone();
        let t0 = Instant::now();
        let steps = 100;
        for i in 0..steps {
            a = stepper.step(&a, i as f64 * 0.05).unwrap();
        }
        let dt = t0.elapsed().as_secs_f64();
        println!("n={n}: {:.1} ms/step", dt / steps as f64 * 1e3);
    }
}
