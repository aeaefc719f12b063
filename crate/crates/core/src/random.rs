//! Seeded generators for property runs and the CLI's randomized commands.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::admissible::{is_admissible_decomposition, Decomposition};
use crate::intmat::Row;
use crate::periods::PeriodHom;
use crate::symplattice::{Submodule, SymplecticBasis, LatticeVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random rational period; each value is zero with probability `zero_prob`.
pub fn random_rational_period<R: Rng>(rng: &mut R, genus: usize, max_den: i64, zero_prob: f64) -> PeriodHom {
    let vals: Vec<(i64, i64)> = (0..2 * genus)
        .map(|_| {
            if rng.gen_bool(zero_prob) {
                (0, 1)
            } else {
                let d = rng.gen_range(1..=max_den);
                (rng.gen_range(0..d), d)
            }
        })
        .collect();
    PeriodHom::rational(genus, &vals).expect("valid rational period")
}

/// Random rational period of degree at least three.
pub fn random_period_degree3<R: Rng>(rng: &mut R, genus: usize) -> PeriodHom {
    loop {
        let zero_prob = [0.0, 0.3, 0.6][rng.gen_range(0..3)];
        let p = random_rational_period(rng, genus, 12, zero_prob);
        if p.degree().at_least(3) {
            return p;
        }
    }
}

/// Random symplectic basis with entries bounded by `bound`, built from
/// elementary symplectic moves.
pub fn random_symplectic_basis<R: Rng>(rng: &mut R, genus: usize, bound: i64, steps: usize) -> SymplecticBasis {
    let n = 2 * genus;
    let mut v: Vec<Vec<i64>> = (0..n).map(|j| (0..n).map(|k| i64::from(j == k)).collect()).collect();
    let axpy = |v: &mut Vec<Vec<i64>>, dst: usize, src: usize, k: i64| {
        for c in 0..n {
            v[dst][c] += k * v[src][c];
        }
    };
    for _ in 0..steps {
        let k = *[-2i64, -1, 1, 2].choose(rng).unwrap();
        let snapshot = v.clone();
        let i = rng.gen_range(0..genus);
        let j = rng.gen_range(0..genus);
        match rng.gen_range(0..4) {
            0 => axpy(&mut v, 2 * i, 2 * i + 1, k),
            1 => axpy(&mut v, 2 * i + 1, 2 * i, k),
            2 if i != j => {
                // a_i += k a_j, b_j -= k b_i
                axpy(&mut v, 2 * i, 2 * j, k);
                axpy(&mut v, 2 * j + 1, 2 * i + 1, -k);
            }
            3 if i != j => {
                // a_i += k b_j, a_j += k b_i
                axpy(&mut v, 2 * i, 2 * j + 1, k);
                axpy(&mut v, 2 * j, 2 * i + 1, k);
            }
            _ => {}
        }
        if v.iter().flatten().any(|x| x.abs() > bound) {
            v = snapshot;
        }
    }
    let mut blocks: Vec<usize> = (0..genus).collect();
    blocks.shuffle(rng);
    let vectors = blocks
        .iter()
        .flat_map(|&b| [LatticeVector::from_i64s(&v[2 * b]), LatticeVector::from_i64s(&v[2 * b + 1])])
        .collect();
    SymplecticBasis { vectors }
}

/// Groups the blocks of `basis` into factors of the given genera.
pub fn decomposition_from_blocks(basis: &SymplecticBasis, genera: &[usize]) -> Decomposition {
    let dim = basis.vectors.len();
    let mut start = 0;
    let factors = genera
        .iter()
        .map(|&h| {
            let rows: Vec<Row> = basis.vectors[2 * start..2 * (start + h)].iter().map(|x| x.0.clone()).collect();
            start += h;
            Submodule::saturate(&rows, dim).expect("rows have lattice length")
        })
        .collect();
    Decomposition::new(factors)
}

/// A random `p`-admissible decomposition with 2 or 3 factors whose
/// generating basis has entries in `[-bound, bound]`.
pub fn random_admissible_decomposition<R: Rng>(rng: &mut R, p: &PeriodHom, bound: i64) -> Decomposition {
    let g = p.genus();
    loop {
        let basis = random_symplectic_basis(rng, g, bound, 12 * g);
        let mut genera = vec![];
        let mut left = g;
        let max_parts = if rng.gen_bool(0.5) { 3 } else { 2 };
        while left > 0 {
            let h = if genera.len() + 1 == max_parts { left } else { rng.gen_range(1..=left) };
            genera.push(h);
            left -= h;
        }
        if genera.len() < 2 {
            continue;
        }
        let d = decomposition_from_blocks(&basis, &genera);
        if is_admissible_decomposition(p, &d) {
            return d;
        }
    }
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize, bound: i64) -> LatticeVector {
    LatticeVector((0..n).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect())
}
