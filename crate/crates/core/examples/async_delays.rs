//! Spectral radius of delayed block iterations: the uniform-delay law and a
//! small sweep over the scaling constant.

use combwork::async_iter::{
    block_jacobi_matrix, fraction_below_bound, mean_effective_delay, run_experiment, sample_ensemble, verify_delay_laws, BlockMatrix,
    DelayMatrix, DelayPattern, Ensemble, ExperimentConfig, DEFAULT_TOL,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let partition = BlockMatrix::equal_partition(12, 4)?;
    let m = block_jacobi_matrix(&sample_ensemble(Ensemble::Goe, &partition, 3)?, false)?.scaled(0.5);
    for k in 1..=3 {
        let check = verify_delay_laws(&m, &DelayMatrix::uniform(4, k), k, k + 2, DEFAULT_TOL)?;
        let u = check.uniform.expect("uniform delays");
        println!(
            "k = {k}: rho(M) {:.4}, rho(companion) {:.6}, predicted {:.6}, extra history agrees {}",
            check.rho_m, check.rho_kappa, u.predicted, check.cospectral_ok
        );
    }

    let mut cfg = ExperimentConfig::new(Ensemble::Iid, true, DelayPattern::Single { delay: 4 }, 9);
    cfg.trials = 10;
    let rows = run_experiment(&cfg)?;
    println!("{} rows, mean effective delay {:.3}", rows.len(), mean_effective_delay(&m, &cfg.delays()?));
    for r in rows.iter().filter(|r| r.trial == 0) {
        println!("c = {:.2}: rho {:.4}, c^(1/(kappa+1)) {:.4}", r.c, r.rho, r.bound);
    }
    println!("fraction with rho <= bound: {:.2}", fraction_below_bound(&rows, 1e-9));
    Ok(())
}
