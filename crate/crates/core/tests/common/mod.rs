#![allow(dead_code)]

use ppt_bounds::linalg::{BipartiteOperator, ComplexMatrix, DensityMatrix, C64};
use ppt_bounds::states::NamedState;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_ket(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn normalize(v: &mut [C64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
}

/// `p|a⟩⟨a| + (1−p)|b⟩⟨b|` with `a ⊥ b` drawn at random on 3⊗3.
pub fn random_rank_two(rng: &mut impl Rng) -> NamedState {
    let mut a = random_ket(rng, 9);
    normalize(&mut a);
    let mut b = random_ket(rng, 9);
    let overlap: C64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
    for (bi, ai) in b.iter_mut().zip(&a) {
        *bi -= overlap * ai;
    }
    normalize(&mut b);
    let p = rng.gen_range(0.1..0.9);
    let m = &ComplexMatrix::outer(&a, &a).scale(p) + &ComplexMatrix::outer(&b, &b).scale(1.0 - p);
    let state = DensityMatrix::new(BipartiteOperator::new(3, 3, m.hermitian_part()).unwrap()).unwrap();
    NamedState::from_state("random", vec![], state, 1e-10).unwrap()
}

/// Full-rank random state `G G† / tr` on `d_a ⊗ d_b`.
pub fn random_full_rank(rng: &mut impl Rng, da: usize, db: usize) -> DensityMatrix {
    let n = da * db;
    let g = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let m = g.matmul(&g.adjoint()).unwrap();
    let tr = m.trace().re;
    DensityMatrix::new(BipartiteOperator::new(da, db, m.scale(1.0 / tr).hermitian_part()).unwrap()).unwrap()
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (&g + &g.adjoint()).scale(0.5)
}
