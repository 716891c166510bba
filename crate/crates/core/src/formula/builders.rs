//! Membership conditions for coverage, redundancy, strata and equivalence.

use super::poly::Poly;
use super::symbolic::{input_vars, split_vars, symbolic_decompose, SymbolicAffine, SymbolicPieces};
use super::Formula;
use crate::error::{Error, Result};
use crate::network::{decompose, Architecture, DecomposeOptions, Network};

/// `∀x [Q_1(x) ≥ 0 ∨ … ∨ Q_k(x) ≥ 0]`.
pub fn coverage_formula(q: &SymbolicPieces) -> Result<Formula> {
    q.validate()?;
    let xs = q.input_names();
    let body = q.pieces.iter().map(|p| Formula::ge(p.as_poly(&xs))).collect();
    Ok(Formula::forall(xs, Formula::or(body)))
}

/// `∀x ∨_{k≠j} (P_k(x) − P_j(x) ≥ 0)`: piece `j` is redundant.
pub fn redundancy_formula(pieces: &SymbolicPieces, j: usize) -> Result<Formula> {
    pieces.validate()?;
    let n = pieces.pieces.len();
    if j >= n {
        return Err(Error::IndexOutOfRange { index: j, len: n });
    }
    if n == 1 {
        return Err(Error::SingletonEnvelope);
    }
    let xs = pieces.input_names();
    let pj = &pieces.pieces[j];
    let body = pieces
        .pieces
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != j)
        .map(|(_, pk)| Formula::ge(pk.sub(pj).as_poly(&xs)))
        .collect();
    Ok(Formula::forall(xs, Formula::or(body)))
}

/// `K` is exactly the set of relevant indices: every piece outside `K` is
/// redundant and every piece inside is not.
pub fn stratum_formula(pieces: &SymbolicPieces, relevant: &[usize]) -> Result<Formula> {
    pieces.validate()?;
    let n = pieces.pieces.len();
    if let Some(&bad) = relevant.iter().find(|&&k| k >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    if n == 1 {
        // A lone piece is always relevant.
        return Ok(if relevant.contains(&0) {
            Formula::True
        } else {
            Formula::False
        });
    }
    let parts = (0..n)
        .map(|k| {
            let redundant = redundancy_formula(pieces, k)?;
            Ok(if relevant.contains(&k) {
                Formula::not(redundant)
            } else {
                redundant
            })
        })
        .collect::<Result<_>>()?;
    Ok(Formula::and(parts))
}

fn cross_sum(a: &[SymbolicAffine], b: &[SymbolicAffine], cap: u64) -> Result<Vec<SymbolicAffine>> {
    let required = (a.len() as u64).saturating_mul(b.len() as u64);
    if required > cap {
        return Err(Error::PieceCap { required, cap });
    }
    Ok(a.iter().flat_map(|p| b.iter().map(move |q| p.add(q))).collect())
}

/// `max A = max B` written as mutual domination:
/// `∀x [∧_i ∨_j (B_j − A_i ≥ 0) ∧ ∧_j ∨_i (A_i − B_j ≥ 0)]` per output.
fn envelope_equality(a: &[SymbolicAffine], b: &[SymbolicAffine], xs: &[String]) -> Vec<Formula> {
    let a: Vec<Poly> = a.iter().map(|p| p.as_poly(xs)).collect();
    let b: Vec<Poly> = b.iter().map(|p| p.as_poly(xs)).collect();
    let dominated = |lower: &[Poly], upper: &[Poly]| {
        lower
            .iter()
            .map(|l| Formula::or(upper.iter().map(|u| Formula::ge(u - l)).collect()))
            .collect::<Vec<_>>()
    };
    let mut clauses = dominated(&a, &b);
    clauses.extend(dominated(&b, &a));
    clauses
}

/// `w = wplus − wminus, wplus ≥ 0, wminus ≥ 0, wplus·wminus = 0`.
fn bridge(arch: &Architecture, tag: &str, bound: &mut Vec<String>) -> Vec<Formula> {
    let mut out = Vec::new();
    for (w, plus, minus) in split_vars(arch, tag) {
        let (w, p, m) = (Poly::var(&w), Poly::var(&plus), Poly::var(&minus));
        out.push(Formula::eq(&(&w - &p) + &m));
        out.push(Formula::ge(p.clone()));
        out.push(Formula::ge(m.clone()));
        out.push(Formula::eq(&p * &m));
        bound.push(plus);
        bound.push(minus);
    }
    out
}

/// Parameters of a network `N` on `arch1` (variables `w_k_i_j`, `b_k_i`,
/// `t_k_i`) for which `N` is equivalent to `N0`. Without a concrete `N0`,
/// its parameters are free as well, under the prefix `n0_`.
pub fn equivalence_formula(
    arch1: &Architecture,
    arch2: &Architecture,
    n0: Option<&Network>,
    cap: u64,
) -> Result<Formula> {
    for (context, a, b) in [
        ("network input", arch1.input_dim, arch2.input_dim),
        ("network output", arch1.output_dim(), arch2.output_dim()),
    ] {
        if a != b {
            return Err(Error::DimensionMismatch {
                context,
                expected: a,
                found: b,
            });
        }
    }
    let xs = input_vars(arch1.input_dim);
    let mut split = Vec::new();
    let mut constraints = bridge(arch1, "", &mut split);
    let lhs = symbolic_decompose(arch1, "", cap)?;
    let rhs: Vec<(Vec<SymbolicAffine>, Vec<SymbolicAffine>)> = match n0 {
        Some(net) => {
            if &net.architecture() != arch2 {
                return Err(Error::Invalid(format!(
                    "N0 has architecture {} but {arch2} was requested",
                    net.architecture()
                )));
            }
            let opts = DecomposeOptions {
                prune: true,
                piece_cap: cap,
            };
            let pair = decompose(net, &opts)?;
            let lift = |f: &crate::pl::PLFunc| f.pieces().iter().map(SymbolicAffine::from).collect();
            pair.pos
                .components()
                .iter()
                .zip(pair.neg.components())
                .map(|(p, n)| (lift(p), lift(n)))
                .collect()
        }
        None => {
            constraints.extend(bridge(arch2, "n0_", &mut split));
            symbolic_decompose(arch2, "n0_", cap)?
                .into_iter()
                .map(|p| (p.pos, p.neg))
                .collect()
        }
    };
    let mut clauses = Vec::new();
    for (pair, (pos0, neg0)) in lhs.iter().zip(&rhs) {
        let a = cross_sum(&pair.pos, neg0, cap)?;
        let b = cross_sum(&pair.neg, pos0, cap)?;
        clauses.extend(envelope_equality(&a, &b, &xs));
    }
    constraints.push(Formula::forall(xs, Formula::and(clauses)));
    Ok(Formula::exists(split, Formula::and(constraints)))
}
