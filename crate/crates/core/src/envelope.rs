//! Redundant and relevant pieces of an upper envelope.
//!
//! Piece `j` of `f = max_k P_k` is redundant iff `ℝ^d = ∪_{k≠j} {P_j ≤ P_k}`,
//! i.e. iff its dominance region `{x : P_j(x) > P_k(x) ∀k ≠ j}` is empty.
//! Every test below reduces to [`strict_feasible`] on such regions.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::lp::{feasible, strict_feasible, StrictRow, StrictSystem};
use crate::pl::{Affine, PLFunc};

/// Rows `P_j − P_k > 0` for every `k ≠ j` in `others`.
pub(crate) fn dominance_rows<'a>(piece: &Affine, others: impl Iterator<Item = &'a Affine>) -> Vec<StrictRow> {
    others
        .map(|other| {
            let diff = piece.sub(other);
            StrictRow::new(diff.coeffs, -diff.constant)
        })
        .collect()
}

/// Open region where piece `j` strictly beats every other piece, or `None`
/// for a singleton envelope (the region is all of `ℝ^d`).
pub fn dominance_region(f: &PLFunc, j: usize) -> Result<Option<StrictSystem>> {
    let pieces = f.pieces();
    let piece = pieces.get(j).ok_or(Error::IndexOutOfRange {
        index: j,
        len: pieces.len(),
    })?;
    if pieces.len() == 1 {
        return Ok(None);
    }
    let rows = dominance_rows(
        piece,
        pieces.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, p)| p),
    );
    StrictSystem::new(f.dim(), rows).map(Some)
}

pub fn is_redundant(f: &PLFunc, j: usize) -> Result<bool> {
    if j >= f.len() {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: f.len(),
        });
    }
    if f.len() == 1 {
        return Err(Error::SingletonEnvelope);
    }
    let region = dominance_region(f, j)?.expect("at least two pieces");
    Ok(!strict_feasible(&region).is_feasible())
}

/// Deterministic probe points: a small integer grid in low dimension, the
/// origin and scaled unit vectors otherwise.
fn probe_points(dim: usize) -> Vec<Vec<Rat>> {
    if dim <= 3 {
        let axis: Vec<Rat> = (-2..=2).map(Rat::from_int).collect();
        let mut points = vec![Vec::new()];
        for _ in 0..dim {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push(v.clone());
                        q
                    })
                })
                .collect();
        }
        points
    } else {
        let mut points = vec![vec![Rat::zero(); dim]];
        for i in 0..dim {
            for v in [-2, -1, 1, 2] {
                let mut p = vec![Rat::zero(); dim];
                p[i] = Rat::from_int(v);
                points.push(p);
            }
        }
        points
    }
}

/// Index of the unique strict maximizer at `x`, if there is one.
fn strict_argmax(pieces: &[Affine], x: &[Rat]) -> Option<usize> {
    let mut best: Option<(usize, Rat)> = None;
    let mut tied = false;
    for (k, p) in pieces.iter().enumerate() {
        let v = p.eval(x);
        match &best {
            Some((_, bv)) if v < *bv => {}
            Some((_, bv)) if v == *bv => tied = true,
            _ => {
                best = Some((k, v));
                tied = false;
            }
        }
    }
    if tied {
        None
    } else {
        best.map(|(k, _)| k)
    }
}

/// Pieces dominated everywhere by a parallel piece with a larger constant.
fn parallel_dominated(pieces: &[Affine]) -> Vec<bool> {
    let mut top: HashMap<&[Rat], usize> = HashMap::new();
    for (k, p) in pieces.iter().enumerate() {
        top.entry(p.coeffs.as_slice())
            .and_modify(|best| {
                if pieces[*best].constant < p.constant {
                    *best = k;
                }
            })
            .or_insert(k);
    }
    pieces
        .iter()
        .enumerate()
        .map(|(k, p)| top[p.coeffs.as_slice()] != k)
        .collect()
}

/// The full set of relevant indices of `f`, ascending.
pub fn relevant_indices(f: &PLFunc) -> Vec<usize> {
    let pieces = f.pieces();
    if pieces.len() == 1 {
        return vec![0];
    }
    let dominated = parallel_dominated(pieces);
    let mut certified = vec![false; pieces.len()];
    for x in probe_points(f.dim()) {
        if let Some(k) = strict_argmax(pieces, &x) {
            certified[k] = true;
        }
    }
    // A parallel-dominated piece is below its dominator everywhere, so its
    // row is implied by the dominator's row.
    let live: Vec<&Affine> = pieces
        .iter()
        .zip(&dominated)
        .filter_map(|(p, &d)| (!d).then_some(p))
        .collect();
    let undecided: Vec<usize> = (0..pieces.len())
        .filter(|&k| !dominated[k] && !certified[k])
        .collect();
    let decided: Vec<usize> = undecided
        .par_iter()
        .filter(|&&j| {
            let piece = &pieces[j];
            let rows = dominance_rows(piece, live.iter().copied().filter(|p| *p != piece));
            if rows.is_empty() {
                return true;
            }
            feasible(f.dim(), &rows, &[]).is_feasible()
        })
        .copied()
        .collect();
    for j in decided {
        certified[j] = true;
    }
    (0..pieces.len()).filter(|&k| certified[k]).collect()
}

/// Canonical minimal representation: exactly the relevant pieces, in
/// lexicographic coefficient order.
pub fn minimize(f: &PLFunc) -> PLFunc {
    let mut pieces: Vec<Affine> = relevant_indices(f)
        .into_iter()
        .map(|k| f.pieces()[k].clone())
        .collect();
    pieces.sort();
    PLFunc::from_distinct(f.dim(), pieces)
}

/// Minimal representation of `f + g`.
///
/// `P_i + N_j` is relevant in the sum iff the dominance regions of `P_i` in
/// `f` and `N_j` in `g` share an interior point, so the sum is never
/// materialized in full.
pub fn add_minimal(f: &PLFunc, g: &PLFunc) -> Result<PLFunc> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            context: "piecewise-linear operands",
            expected: f.dim(),
            found: g.dim(),
        });
    }
    let fm = minimize(f);
    let gm = minimize(g);
    let (fp, gp) = (fm.pieces(), gm.pieces());
    let dim = f.dim();

    let mut certified = vec![vec![false; gp.len()]; fp.len()];
    for x in probe_points(dim) {
        if let (Some(i), Some(j)) = (strict_argmax(fp, &x), strict_argmax(gp, &x)) {
            certified[i][j] = true;
        }
    }
    let region_rows = |pieces: &[Affine], k: usize| {
        dominance_rows(
            &pieces[k],
            pieces.iter().enumerate().filter(|&(l, _)| l != k).map(|(_, p)| p),
        )
    };
    let f_regions: Vec<Vec<StrictRow>> = (0..fp.len()).map(|i| region_rows(fp, i)).collect();
    let g_regions: Vec<Vec<StrictRow>> = (0..gp.len()).map(|j| region_rows(gp, j)).collect();

    let pairs: Vec<(usize, usize)> = (0..fp.len())
        .flat_map(|i| (0..gp.len()).map(move |j| (i, j)))
        .collect();
    let relevant: Vec<bool> = pairs
        .par_iter()
        .map(|&(i, j)| {
            if certified[i][j] {
                return true;
            }
            let rows: Vec<StrictRow> = f_regions[i].iter().chain(&g_regions[j]).cloned().collect();
            rows.is_empty() || feasible(dim, &rows, &[]).is_feasible()
        })
        .collect();

    let mut pieces: Vec<Affine> = pairs
        .iter()
        .zip(relevant)
        .filter(|&(_, keep)| keep)
        .map(|(&(i, j), _)| fp[i].add(&gp[j]))
        .collect();
    pieces.sort();
    pieces.dedup();
    Ok(PLFunc::from_distinct(dim, pieces))
}

/// True iff `ℝ^d = ∪_k {x : Q_k(x) ≥ 0}`.
pub fn covers_rn(q: &[Affine]) -> Result<bool> {
    let dim = q.first().ok_or(Error::EmptyPieces)?.dim();
    let rows = q
        .iter()
        .map(|p| {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    context: "coverage pieces",
                    expected: dim,
                    found: p.dim(),
                });
            }
            // −Q(x) > 0  ⟺  −a·x > a₀
            Ok(StrictRow::new(
                p.coeffs.iter().map(|a| -a).collect(),
                p.constant.clone(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let sys = StrictSystem::new(dim, rows)?;
    Ok(!strict_feasible(&sys).is_feasible())
}

/// True iff at least two distinct pieces attain the envelope value at `x0`.
pub fn is_corner(f: &PLFunc, x0: &[Rat]) -> Result<bool> {
    let value = f.eval(x0)?;
    Ok(f.pieces().iter().filter(|p| p.eval(x0) == value).take(2).count() == 2)
}

/// Sorted corner abscissas of a one-dimensional envelope.
pub fn corners_1d(f: &PLFunc) -> Result<Vec<Rat>> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch {
            context: "corners_1d",
            expected: 1,
            found: f.dim(),
        });
    }
    let relevant = minimize(f);
    let pieces = relevant.pieces();
    let mut corners = Vec::new();
    for (i, p) in pieces.iter().enumerate() {
        for q in &pieces[i + 1..] {
            let slope = &p.coeffs[0] - &q.coeffs[0];
            if slope.is_zero() {
                continue;
            }
            let x = vec![(&q.constant - &p.constant) / slope];
            if is_corner(f, &x)? {
                corners.extend(x);
            }
        }
    }
    corners.sort();
    corners.dedup();
    Ok(corners)
}
