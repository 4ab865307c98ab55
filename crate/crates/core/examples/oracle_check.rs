//! Cross-checks the logarithmic search against the conjugate-based reference and
//! the definition of an ε-subgradient on random functions.
//!
//! Run with `cargo run --release --example oracle_check`.

use plq_epssub::{
    eps_sub_reference, eps_subdifferential, is_eps_subgradient, random_convex_plq, rel_close,
    RandomShape,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> plq_epssub::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let shape = RandomShape::default();
    let (mut queries, mut mismatches, mut definition_failures) = (0, 0, 0);

    for _ in 0..500 {
        let f = random_convex_plq(&mut rng, &shape);
        let dom = f.domain();
        for eps in [1e-3, 0.1, 1.0, 10.0] {
            for _ in 0..10 {
                let x = rng.gen_range(dom.lo.max(-20.0)..=dom.hi.min(20.0));
                let fast = eps_subdifferential(&f, x, eps)?;
                let reference = eps_sub_reference(&f, x, eps)?;
                queries += 1;
                if !rel_close(fast.lo(), reference.lo(), 1e-8)
                    || !rel_close(fast.hi(), reference.hi(), 1e-8)
                {
                    mismatches += 1;
                }
                for s in [fast.lo(), fast.hi()].into_iter().filter(|s| s.is_finite()) {
                    if !is_eps_subgradient(&f, x, eps, s)? {
                        definition_failures += 1;
                    }
                }
            }
        }
    }
    println!("{queries} queries, {mismatches} mismatches, {definition_failures} endpoints failing the definition");
    Ok(())
}
