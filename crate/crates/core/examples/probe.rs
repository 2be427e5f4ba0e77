use vi_solvers::bench::{run_bench, BenchConfig};

fn main() {
    for (radius, lcap) in [(1.0f64, 10.0f64), (1.0, 1.0), (2.0, 10.0)] {
        println!("== x_radius {radius}, lambda_cap {lcap}");
        for case in [1u8, 4u8] {
            let mut cfg = BenchConfig::new(case, 50, 5, 5);
            cfg.repetitions = 3;
            cfg.seed = 100;
            cfg.x_radius = Some(radius);
            cfg.lambda_cap = lcap;
            let t = std::time::Instant::now();
            let out = run_bench(&cfg).unwrap();
            print!("case {case} iters:");
            for r in &out.rows {
                print!(" {:.1}", r.iterations);
            }
            let ratio = out.rows[5].iterations / out.rows[0].iterations;
            println!(
                "  ratio {:.2}  f {:.3} g_out {:.3} ({:?})",
                ratio, out.rows[5].f_best, out.rows[5].g_out, t.elapsed()
            );
        }
    }
}
