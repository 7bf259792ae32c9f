//! Generate a seeded knapsack instance and solve it exhaustively.
//!
//! ```text
//! cargo run --example knapsack_oracle -- [m] [seed]
//! ```

use qaoa_constraints::knapsack::{brute_force, generate, selection_bitstring, GeneratorParams};

fn main() -> qaoa_constraints::Result<()> {
    let mut args = std::env::args().skip(1);
    let m: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);

    let inst = generate(seed, m, GeneratorParams::default())?;
    println!("instance: {inst}");
    print!("{}", inst.to_text());

    let oracle = brute_force(&inst)?;
    println!(
        "{} of {} selections are feasible; optimum value {}",
        oracle.feasible_count(),
        oracle.n_selections(),
        oracle.best_value()
    );
    for x in oracle.best_solutions() {
        println!(
            "  best {}  weight {}  value {}",
            selection_bitstring(*x, m),
            oracle.weight_of(*x),
            oracle.value_of(*x)
        );
    }
    Ok(())
}
