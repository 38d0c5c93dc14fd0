//! Hypervolume, IGD and IGD+ on small hand-made fronts.

use samoo::metrics::{hypervolume, hypervolume_monte_carlo, igd, igd_plus};

fn main() -> samoo::Result<()> {
    let front = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
    println!("HV {{(1,2),(2,1)}} ref (3,3) = {}", hypervolume(&front, &[3.0, 3.0])?);
    println!("MC estimate             = {:.4}", hypervolume_monte_carlo(&front, &[3.0, 3.0], 100_000, 5));

    let cube = vec![vec![0.2, 0.8, 0.5], vec![0.8, 0.2, 0.5], vec![0.5, 0.5, 0.2]];
    println!("3-D HV (Monte Carlo)    = {:.4}", hypervolume(&cube, &[1.0, 1.0, 1.0])?);

    let reference = vec![vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]];
    let approx = vec![vec![0.1, 1.0], vec![0.6, 0.6]];
    println!("IGD  = {:.4}", igd(&reference, &approx)?);
    println!("IGD+ = {:.4}", igd_plus(&reference, &approx)?);
    Ok(())
}
