// Seeded random linear systems for cross-checking the solver.

use rand::Rng;
use ratlp::{ratio, LinearSystem, Rational, Relation};

pub fn small_rational<R: Rng>(rng: &mut R, span: i64) -> Rational {
    let d = rng.gen_range(1..=3);
    ratio(rng.gen_range(-span..=span), d)
}

pub fn random_system<R: Rng>(rng: &mut R, max_vars: usize, max_rows: usize, homogeneous: bool) -> LinearSystem {
    let n = rng.gen_range(1..=max_vars);
    let mut sys = LinearSystem::with_vars((0..n).map(|i| format!("x{i}")));
    let rows = rng.gen_range(0..=max_rows);
    for _ in 0..rows {
        let mut coeffs = Vec::new();
        for v in 0..n {
            if rng.gen_bool(0.6) {
                coeffs.push((v, small_rational(rng, 3)));
            }
        }
        let rel = match rng.gen_range(0..3) {
            0 => Relation::Eq,
            1 => Relation::Ge,
            _ => Relation::Le,
        };
        let rhs = if homogeneous { ratio(0, 1) } else { small_rational(rng, 4) };
        sys.add(coeffs, rel, rhs);
    }
    sys
}
