//! The built-in test problems and their reference fronts.

use samoo::base::Problem;
use samoo::problems::{Benchmark, BenchmarkName};

fn main() -> samoo::Result<()> {
    for name in BenchmarkName::ALL {
        let p = Benchmark::new(name, None, None)?;
        let spec = p.spec();
        let mid: Vec<f64> = spec.lower.iter().zip(&spec.upper).map(|(l, u)| 0.5 * (l + u)).collect();
        let (f, g) = p.evaluate(&mid)?;
        print!("{:<10} n_var={:<3} f(mid)={:?}", name.as_str(), spec.n_var, f);
        if !g.is_empty() {
            print!(" g(mid)={g:?}");
        }
        match p.reference_front(5) {
            Ok(front) => println!("\n{:>10} front sample {:?}", "", front),
            Err(_) => println!(),
        }
    }
    let dtlz = Benchmark::new(BenchmarkName::Dtlz2, Some(7), Some(3))?;
    println!("dtlz2 (3 objectives) reference point {:?}", dtlz.default_ref_point());
    Ok(())
}
