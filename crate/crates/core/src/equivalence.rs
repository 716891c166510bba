//! Network equivalence through the cross-sum identity.
//!
//! `ν₁ ≡ ν₂` iff `ν₁₊ + ν₂₋ ≡ ν₁₋ + ν₂₊`. Both sides are upper envelopes, so
//! they agree pointwise iff their minimal representations are the same set
//! of pieces.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::Rat;
use crate::envelope::{add_minimal, dominance_rows, minimize};
use crate::error::{Error, Result};
use crate::lp::{feasible, StrictRow};
use crate::network::{decompose, DecomposeOptions, Network};
use crate::pl::{Affine, PLFunc};

/// Minimal pieces of both sides of the identity for one output coordinate.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct OutputPieces {
    pub lhs_pieces: Vec<Affine>,
    pub rhs_pieces: Vec<Affine>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct EquivVerdict {
    pub equivalent: bool,
    /// A point where the two networks differ; present iff not equivalent.
    pub witness: Option<Vec<Rat>>,
    pub outputs: Vec<OutputPieces>,
}

pub fn equivalent(n1: &Network, n2: &Network) -> Result<EquivVerdict> {
    equivalent_with(n1, n2, &DecomposeOptions::default())
}

pub fn equivalent_with(n1: &Network, n2: &Network, opts: &DecomposeOptions) -> Result<EquivVerdict> {
    n1.validate()?;
    n2.validate()?;
    for (context, a, b) in [
        ("network input", n1.input_dim(), n2.input_dim()),
        ("network output", n1.output_dim(), n2.output_dim()),
    ] {
        if a != b {
            return Err(Error::DimensionMismatch {
                context,
                expected: a,
                found: b,
            });
        }
    }
    let opts = DecomposeOptions { prune: true, ..*opts };
    let p1 = decompose(n1, &opts)?;
    let p2 = decompose(n2, &opts)?;

    let sides: Vec<(PLFunc, PLFunc)> = (0..n1.output_dim())
        .into_par_iter()
        .map(|r| {
            Ok((
                add_minimal(p1.pos.get(r), p2.neg.get(r))?,
                add_minimal(p1.neg.get(r), p2.pos.get(r))?,
            ))
        })
        .collect::<Result<_>>()?;

    let witness = match sides.iter().find(|(l, r)| !l.same_pieces(r)) {
        Some((lhs, rhs)) => {
            let x = dominance_witness(lhs, rhs)?;
            assert_ne!(
                n1.forward_eval(&x)?,
                n2.forward_eval(&x)?,
                "witness does not separate the networks"
            );
            Some(x)
        }
        None => None,
    };
    Ok(EquivVerdict {
        equivalent: witness.is_none(),
        witness,
        outputs: sides
            .into_iter()
            .map(|(l, r)| OutputPieces {
                lhs_pieces: l.into_pieces(),
                rhs_pieces: r.into_pieces(),
            })
            .collect(),
    })
}

/// A point where two envelopes with different minimal representations take
/// different values.
///
/// Take a piece `A` present on one side only and a point of its open
/// dominance region `D`. If some piece `B` of the other side beats `A`
/// somewhere in `D`, that point separates. Otherwise the other side is `≤ A`
/// on `D` and every `B ≠ A` stays strictly below `A` off a hyperplane, so
/// `D ∩ {A > B ∀B}` is nonempty and separates.
pub fn dominance_witness(lhs: &PLFunc, rhs: &PLFunc) -> Result<Vec<Rat>> {
    if lhs.dim() != rhs.dim() {
        return Err(Error::DimensionMismatch {
            context: "piecewise-linear operands",
            expected: lhs.dim(),
            found: rhs.dim(),
        });
    }
    let (l, r) = (minimize(lhs), minimize(rhs));
    let (owner, other, a) = match l.pieces().iter().find(|p| !r.pieces().contains(p)) {
        Some(a) => (&l, &r, a),
        None => match r.pieces().iter().find(|p| !l.pieces().contains(p)) {
            Some(a) => (&r, &l, a),
            None => return Err(Error::EnvelopesEqual),
        },
    };
    let dim = lhs.dim();
    let region = dominance_rows(a, owner.pieces().iter().filter(|p| *p != a));
    let separates = |x: &[Rat]| lhs.eval_unchecked(x) != rhs.eval_unchecked(x);

    let centre = feasible(dim, &region, &[])
        .witness()
        .expect("a relevant piece has a nonempty dominance region")
        .to_vec();
    if separates(&centre) {
        return Ok(centre);
    }
    for b in other.pieces() {
        let mut rows = region.clone();
        rows.extend(dominance_rows(b, std::iter::once(a)));
        if let Some(x) = feasible(dim, &rows, &[]).witness() {
            debug_assert!(separates(x));
            return Ok(x.to_vec());
        }
    }
    let mut rows: Vec<StrictRow> = region;
    rows.extend(dominance_rows(a, other.pieces().iter()));
    let x = feasible(dim, &rows, &[])
        .witness()
        .expect("the other envelope stays strictly below the piece somewhere")
        .to_vec();
    debug_assert!(separates(&x));
    Ok(x)
}

fn hidden_layer(net: &Network, layer: usize) -> Result<()> {
    net.validate()?;
    if layer + 1 >= net.depth() {
        return Err(Error::LastLayer { layer: layer + 1 });
    }
    Ok(())
}

/// Relabels the units of `layer` (0-based): new unit `i` is old unit
/// `perm[i]`. The next layer's columns follow, so `ν` is unchanged.
pub fn gen_permuted(net: &Network, layer: usize, perm: &[usize]) -> Result<Network> {
    hidden_layer(net, layer)?;
    let width = net.layers[layer].outputs();
    let mut seen = vec![false; width];
    if perm.len() != width {
        return Err(Error::InvalidPermutation(format!(
            "expected {width} entries, found {}",
            perm.len()
        )));
    }
    for &p in perm {
        if p >= width || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(format!(
                "{perm:?} is not a permutation of 0..{width}"
            )));
        }
    }
    let mut out = net.clone();
    let (cur, next) = (&net.layers[layer], &net.layers[layer + 1]);
    let target = &mut out.layers[layer];
    for (i, &p) in perm.iter().enumerate() {
        for c in 0..cur.inputs() {
            target.weights.set(i, c, cur.weights.get(p, c).clone());
        }
        target.bias[i] = cur.bias[p].clone();
        target.threshold[i] = cur.threshold[p].clone();
    }
    let target = &mut out.layers[layer + 1];
    for r in 0..next.outputs() {
        for (i, &p) in perm.iter().enumerate() {
            target.weights.set(r, i, next.weights.get(r, p).clone());
        }
    }
    Ok(out)
}

/// Multiplies unit `i` of `layer` (0-based) by `scales[i] > 0` and divides
/// the matching column of the next layer, which leaves `ν` unchanged since
/// `max{cu, ct} = c·max{u, t}`.
pub fn gen_scaled(net: &Network, layer: usize, scales: &[Rat]) -> Result<Network> {
    hidden_layer(net, layer)?;
    let width = net.layers[layer].outputs();
    if scales.len() != width {
        return Err(Error::DimensionMismatch {
            context: "scale vector",
            expected: width,
            found: scales.len(),
        });
    }
    if let Some(c) = scales.iter().find(|c| !c.is_positive()) {
        return Err(Error::NonPositiveScale(c.clone()));
    }
    let mut out = net.clone();
    let cur = &mut out.layers[layer];
    for (i, c) in scales.iter().enumerate() {
        for col in 0..cur.inputs() {
            let v = cur.weights.get(i, col) * c;
            cur.weights.set(i, col, v);
        }
        cur.bias[i] = &cur.bias[i] * c;
        cur.threshold[i] = &cur.threshold[i] * c;
    }
    let next = &mut out.layers[layer + 1];
    for r in 0..next.outputs() {
        for (i, c) in scales.iter().enumerate() {
            let v = next.weights.get(r, i) / c;
            next.weights.set(r, i, v);
        }
    }
    Ok(out)
}
