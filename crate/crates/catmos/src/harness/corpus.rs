//! Seeded generation of grammar-valid query workloads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::query_model::{Attribute, RangeQuery};

/// Generates `n` temperature range queries with integer bounds in [0, 60],
/// epochs in [1, 150] and lifetimes in [10, 200].
pub fn generate_queries(n: usize, seed: u64) -> Vec<RangeQuery> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let min = rng.gen_range(0..=55u32);
            let max = rng.gen_range(min..=60u32);
            let epoch = rng.gen_range(1..=150u32);
            let lifetime = rng.gen_range(10..=200u32);
            RangeQuery::new(
                i as u64 + 1,
                Attribute::Temp,
                min as f64,
                max as f64,
                epoch,
                lifetime,
            )
            .expect("generated bounds are ordered")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query_model::{parse_with_id, serialize};

    #[test]
    fn corpus_is_seed_deterministic() {
        assert_eq!(generate_queries(50, 7), generate_queries(50, 7));
        assert_ne!(generate_queries(50, 7), generate_queries(50, 8));
    }

    #[test]
    fn generated_queries_are_grammar_valid() {
        for q in generate_queries(100, 1) {
            let text = serialize(&q);
            assert_eq!(parse_with_id(text.as_str(), q.id).unwrap(), q);
        }
    }
}
