//! Reference implementations used as oracles. None of them calls into the
//! library's linear programming or envelope code.
#![allow(dead_code)]

use plnn::{Affine, Network, PLFunc, Rat};
use rand::Rng;

/// `a·x > h` when `strict`, `a·x ≥ h` otherwise.
#[derive(Clone, Debug)]
pub struct Ineq {
    pub a: Vec<Rat>,
    pub h: Rat,
    pub strict: bool,
}

/// Fourier–Motzkin elimination. Exact and exponential; fine for the handful
/// of rows and variables the tests use.
pub fn fm_feasible(dim: usize, rows: &[Ineq]) -> bool {
    let mut rows = rows.to_vec();
    for var in (0..dim).rev() {
        let (mut lower, mut upper, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            let c = r.a[var].clone();
            if c.is_positive() {
                lower.push(r);
            } else if c.is_negative() {
                upper.push(r);
            } else {
                rest.push(r);
            }
        }
        for lo in &lower {
            for up in &upper {
                // lo: c·x_v + … ≷ h_lo with c > 0;  up: −e·x_v + … ≷ h_up with e > 0.
                let c = lo.a[var].clone();
                let e = -up.a[var].clone();
                let a =
                    lo.a.iter()
                        .zip(&up.a)
                        .map(|(p, q)| &(p * &e) + &(q * &c))
                        .collect();
                rest.push(Ineq {
                    a,
                    h: &(&lo.h * &e) + &(&up.h * &c),
                    strict: lo.strict || up.strict,
                });
            }
        }
        rows = rest;
    }
    rows.iter().all(|r| {
        if r.strict {
            Rat::zero() > r.h
        } else {
            Rat::zero() >= r.h
        }
    })
}

pub fn eval_max(pieces: &[Affine], x: &[Rat]) -> Rat {
    pieces
        .iter()
        .map(|p| {
            p.coeffs
                .iter()
                .zip(x)
                .fold(p.constant.clone(), |acc, (a, xi)| acc + a * xi)
        })
        .max()
        .expect("nonempty")
}

/// `max{Wx + b, t}` layer by layer, written independently of the library.
pub fn forward(net: &Network, x: &[Rat]) -> Vec<Rat> {
    let mut v = x.to_vec();
    for layer in &net.layers {
        v = (0..layer.outputs())
            .map(|i| {
                let mut s = layer.bias[i].clone();
                for (j, vj) in v.iter().enumerate() {
                    s = s + layer.weights.get(i, j) * vj;
                }
                s.max(layer.threshold[i].clone())
            })
            .collect();
    }
    v
}

/// Points that decide any identity between one-dimensional envelopes built
/// from `pieces`: every pairwise crossing, midpoints between consecutive
/// crossings and one point beyond each end.
pub fn decisive_points_1d(pieces: &[Affine]) -> Vec<Rat> {
    let mut xs = vec![Rat::zero()];
    for (i, p) in pieces.iter().enumerate() {
        for q in &pieces[i + 1..] {
            let slope = &p.coeffs[0] - &q.coeffs[0];
            if !slope.is_zero() {
                xs.push((&q.constant - &p.constant) / slope);
            }
        }
    }
    xs.sort();
    xs.dedup();
    let mut out = vec![&xs[0] - &Rat::one()];
    for w in xs.windows(2) {
        out.push(w[0].clone());
        out.push((&w[0] + &w[1]) / Rat::from_int(2));
    }
    out.push(xs.last().unwrap().clone());
    out.push(xs.last().unwrap() + &Rat::one());
    out
}

/// Drop-one test on the decisive points: exact in one dimension.
pub fn grid_redundant_1d(f: &PLFunc, j: usize) -> bool {
    let pieces = f.pieces();
    let others: Vec<Affine> = pieces
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != j)
        .map(|(_, p)| p.clone())
        .collect();
    decisive_points_1d(pieces)
        .iter()
        .all(|x| eval_max(pieces, std::slice::from_ref(x)) == eval_max(&others, std::slice::from_ref(x)))
}

/// Redundancy through elimination in any dimension.
pub fn fm_redundant(f: &PLFunc, j: usize) -> bool {
    let pj = &f.pieces()[j];
    let rows: Vec<Ineq> = f
        .pieces()
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != j)
        .map(|(_, pk)| Ineq {
            a: pj.coeffs.iter().zip(&pk.coeffs).map(|(a, b)| a - b).collect(),
            h: &pk.constant - &pj.constant,
            strict: true,
        })
        .collect();
    !fm_feasible(f.dim(), &rows)
}

pub fn grid_2d(n: i64) -> Vec<Vec<Rat>> {
    let half = n / 2;
    let mut out = Vec::new();
    for i in -half..=half {
        for j in -half..=half {
            out.push(vec![Rat::new(i, 2), Rat::new(j, 3)]);
        }
    }
    out
}

pub fn random_rat<R: Rng>(rng: &mut R, num: i64, den: i64) -> Rat {
    Rat::new(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}
