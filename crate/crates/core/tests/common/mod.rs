#![allow(dead_code)]

//! Random inputs shared by the integration tests.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use solvcoh::cecoh::build_complex;
use solvcoh::exactla::{kernel_basis, QVec};
use solvcoh::liealg::{LieAlgebra, LieModule};
use solvcoh::{int, RatMatrix, Rational, Subspace};

pub fn small(rng: &mut ChaCha8Rng) -> Rational {
    int(rng.gen_range(-2..=2))
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> QVec {
    (0..n).map(|_| small(rng)).collect()
}

/// Random nilpotent algebra: an abelian start extended by random central
/// extensions along 2-cocycles.
pub fn random_nilpotent(rng: &mut ChaCha8Rng) -> LieAlgebra {
    let target = rng.gen_range(1..=6);
    let mut g = LieAlgebra::abelian(rng.gen_range(1..=target.min(3)));
    while g.dim() < target {
        let n = g.dim();
        let c = build_complex(&g, &LieModule::trivial(&g)).unwrap();
        let z2 = kernel_basis(&c.differential(2));
        let mut omega = vec![int(0); c.cochain_dim(2)];
        for b in z2.basis() {
            let k = small(rng);
            for (o, x) in omega.iter_mut().zip(b) {
                *o += &k * x;
            }
        }
        let mut triples = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let mut v = g.bracket_basis(i, j);
                v.push(omega[c.basis().index(0, (1 << i) | (1 << j))].clone());
                triples.push((i, j, v));
            }
        }
        g = LieAlgebra::new((0..=n).map(|i| format!("e{i}")).collect(), triples).unwrap();
    }
    g
}

/// Module through the abelianization: `ρ(x) = λ(x) A + μ(x) B` with `B` a
/// polynomial in `A`.
pub fn random_module(rng: &mut ChaCha8Rng, g: &LieAlgebra) -> LieModule {
    let d = rng.gen_range(1..=3);
    let full = Subspace::full(g.dim());
    let derived = g.bracket_span(&full, &full);
    let ann = derived.annihilator();
    let functional = |rng: &mut ChaCha8Rng| -> QVec {
        let mut f = vec![int(0); g.dim()];
        for row in ann.to_rows() {
            let k = small(rng);
            for (o, x) in f.iter_mut().zip(&row) {
                *o += &k * x;
            }
        }
        f
    };
    let lam = functional(rng);
    let mu = functional(rng);
    let a = RatMatrix::from_rows((0..d).map(|_| random_vec(rng, d)).collect(), d).unwrap();
    let b = a.mul(&a).sub(&a);
    let acts = (0..g.dim()).map(|i| a.scale(&lam[i]).add(&b.scale(&mu[i]))).collect();
    LieModule::new(g, d, acts).unwrap()
}
