use remwalk::remfield::RemField;
use remwalk::spectral::{self, Method};
use std::time::Instant;

fn main() {
    for seed in 0..5u64 {
        let t0 = Instant::now();
        let f = RemField::new(seed, 20).unwrap();
        let r = spectral::scgf_finite(&f, 1.0, 0.5, 0.0, Method::Krylov).unwrap();
        println!(
            "n=20 seed {seed}: theta_n {:.6} |gap| {:.6} kdim {} substeps {} ({:.1}s)",
            r.theta_n,
            r.theta_n.abs(),
            r.krylov_dim,
            r.substeps,
            t0.elapsed().as_secs_f64()
        );
    }
}
