use remwalk::remfield::RemField;
use remwalk::spectral::{self, Method, DenseSpectrum};
use remwalk::operator::GeneratorSpec;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 { v[k/2] } else { 0.5*(v[k/2-1]+v[k/2]) }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("all");

    if which == "trend5a" || which == "all" {
        // criterion 5 active point
        println!("== active point (t=1, lambda=0.5) ==");
        for n in [8u32, 12, 16, 20] {
            let gaps: Vec<f64> = (0..5u64).map(|seed| {
                let f = RemField::new(seed, n).unwrap();
                let r = spectral::scgf_finite(&f, 1.0, 0.5, 0.0, Method::Krylov).unwrap();
                r.theta_n.abs()
            }).collect();
            println!("n={n}: gaps {:?} median {:.6}", gaps.iter().map(|g| (g*1e6).round()/1e6).collect::<Vec<_>>(), median(gaps.clone()));
        }
    }
    if which == "trend5b" || which == "all" {
        println!("== glass point (t=2, lambda=2) ==");
        let limit = remwalk::analytic::rem_pressure(4.0)/2.0 - 1.0;
        println!("limit {limit}");
        for n in [8u32, 12, 16] {
            let gaps: Vec<f64> = (0..5u64).map(|seed| {
                let f = RemField::new(seed, n).unwrap();
                let r = spectral::scgf_finite(&f, 2.0, 2.0, 0.0, Method::Krylov).unwrap();
                (r.theta_n - limit).abs()
            }).collect();
            println!("n={n}: gaps {:?} median {:.6}", gaps.iter().map(|g| (g*1e6).round()/1e6).collect::<Vec<_>>(), median(gaps.clone()));
        }
    }
    if which == "proj8" || which == "all" {
        println!("== projector trend (gamma=0.3, lambda=1, delta=0.6) ==");
        for n in [8u32, 10, 12] {
            let rates: Vec<f64> = (0..5u64).map(|seed| {
                let f = RemField::new(seed, n).unwrap();
                let s = spectral::projector_overlap(&f, 0.3, 1.0, 0.6).unwrap();
                s.flat_decay_rate()
            }).collect();
            println!("n={n}: rates {:?} median {:.5} dist-to-0.18 {:.5}",
                rates.iter().map(|g| (g*1e5).round()/1e5).collect::<Vec<_>>(),
                median(rates.clone()), (median(rates.clone())-0.18));
        }
    }
    if which == "window8c" || which == "all" {
        println!("== trace window (n=12, gamma=0.3, lambda=1, delta=0.6, K=5) ==");
        let mut hits = 0;
        for seed in 0..20u64 {
            let f = RemField::new(seed, 12).unwrap();
            let spec = GeneratorSpec::qrem(12, 0.3, 1.0);
            let sp = DenseSpectrum::compute(&spec, &f).unwrap();
            let s = spectral::projector_overlap_from(&f, 0.3, 1.0, 0.6, &sp).unwrap();
            let w = 5.0 * 12.0f64.sqrt();
            let thr = 0.6 * 12.0;
            let (mut lo, mut hi) = (0usize, 0usize);
            for sigma in 0..(1usize<<12) {
                use remwalk::remfield::EnergyLandscape;
                let level = -1.0 * f.energy(sigma);
                if level > thr + w { lo += 1; }
                if level > thr - w { hi += 1; }
            }
            let ok = lo <= s.trace_above && s.trace_above <= hi;
            if ok { hits += 1; }
            println!("seed {seed}: trace {} in [{lo},{hi}] shift_sup {:.2} -> {}", s.trace_above, s.shift_sup, ok);
        }
        println!("hits {hits}/20");
    }
    if which == "shift12" || which == "all" {
        println!("== shift stat (n=12, gamma=0.2, lambda=1, delta=0.8), 20 seeds ==");
        let mut worst: f64 = 0.0;
        for seed in 0..20u64 {
            let f = RemField::new(seed, 12).unwrap();
            let r = spectral::shift_statistic(&f, 0.2, 1.0, 0.8).unwrap();
            worst = worst.max(r.shift_sup_normalized);
            println!("seed {seed}: levels {} shift_sup/sqrt(n) {:.3}", r.per_level.len(), r.shift_sup_normalized);
        }
        println!("worst normalized shift {worst:.3}");
    }
}
