//! Exact match probabilities for binary coefficient matrices, brute force
//! against the closed forms.

use combwork::expressiveness::{
    circuit_phases, closed_form_identity, closed_form_star, match_probability_bruteforce, maximal_abelian_probability, BinaryMatrix,
    DEFAULT_BRUTE_FORCE_BITS,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in 2..=4 {
        for t in 1..=2 {
            let id = match_probability_bruteforce(&BinaryMatrix::identity(n)?, t, DEFAULT_BRUTE_FORCE_BITS)?;
            let star = match_probability_bruteforce(&BinaryMatrix::star(n)?, t, DEFAULT_BRUTE_FORCE_BITS)?;
            println!(
                "n = {n}, t = {t}: identity {id} (closed {}), star {star} (closed {}), maximal {}",
                closed_form_identity(n, t),
                closed_form_star(n, t)?,
                maximal_abelian_probability(n, t)?
            );
        }
    }

    let a = BinaryMatrix::from_bitstrings(&["1000", "0100", "0010", "0001", "1100", "1010", "1001"])?;
    let phases = circuit_phases(&a, &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7])?;
    println!("first phases: {:?}", &phases[..4]);
    Ok(())
}
