//! Seeded random instances: rationals, envelopes, networks and the
//! parameters of the equivalence-preserving transforms.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::arith::{Matrix, Rat};
use crate::network::{Architecture, Layer, Network};
use crate::pl::{Affine, PLFunc};

/// `p/q` with `|p| ≤ max_num` and `1 ≤ q ≤ max_den`.
pub fn rat<R: Rng + ?Sized>(rng: &mut R, max_num: i64, max_den: i64) -> Rat {
    Rat::new(rng.gen_range(-max_num..=max_num), rng.gen_range(1..=max_den))
}

pub fn positive_rat<R: Rng + ?Sized>(rng: &mut R, max_num: i64, max_den: i64) -> Rat {
    Rat::new(rng.gen_range(1..=max_num), rng.gen_range(1..=max_den))
}

pub fn point<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Rat> {
    (0..dim).map(|_| rat(rng, 20, 7)).collect()
}

/// Small integer coefficients make ties and parallel pieces common.
pub fn affine<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Affine {
    Affine::new((0..dim).map(|_| rat(rng, 3, 2)).collect(), rat(rng, 4, 2))
}

pub fn plfunc<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_pieces: usize) -> PLFunc {
    let n = rng.gen_range(1..=max_pieces);
    PLFunc::new(dim, (0..n).map(|_| affine(rng, dim)).collect()).expect("nonempty")
}

pub fn architecture<R: Rng + ?Sized>(
    rng: &mut R,
    max_input: usize,
    max_depth: usize,
    max_width: usize,
) -> Architecture {
    let depth = rng.gen_range(1..=max_depth);
    Architecture {
        input_dim: rng.gen_range(1..=max_input),
        widths: (0..depth).map(|_| rng.gen_range(1..=max_width)).collect(),
    }
}

pub fn network<R: Rng + ?Sized>(rng: &mut R, arch: &Architecture) -> Network {
    let layers = arch
        .layer_shapes()
        .map(|(inputs, outputs)| {
            let rows = (0..outputs)
                .map(|_| (0..inputs).map(|_| rat(rng, 4, 3)).collect())
                .collect();
            Layer::new(
                Matrix::from_rows(rows).expect("positive shape"),
                (0..outputs).map(|_| rat(rng, 3, 2)).collect(),
                (0..outputs).map(|_| rat(rng, 2, 2)).collect(),
            )
        })
        .collect();
    Network { layers }
}

pub fn permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

pub fn scales<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Rat> {
    (0..n).map(|_| positive_rat(rng, 5, 4)).collect()
}
