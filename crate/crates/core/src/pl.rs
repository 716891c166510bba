//! Piecewise-linear functions as upper envelopes `max_k P_k(x)` of finitely
//! many affine pieces, and the max-plus operations used to push a network
//! through its layers.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::arith::{dot, Matrix, Rat};
use crate::error::{Error, Result};

/// One affine piece `coeffs · x + constant`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Affine {
    pub coeffs: Vec<Rat>,
    pub constant: Rat,
}

impl Affine {
    pub fn new(coeffs: Vec<Rat>, constant: Rat) -> Self {
        Affine { coeffs, constant }
    }

    pub fn constant_fn(dim: usize, constant: Rat) -> Self {
        Affine {
            coeffs: vec![Rat::zero(); dim],
            constant,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Affine::constant_fn(dim, Rat::zero())
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Value at `x`; the caller guarantees `x.len() == self.dim()`.
    pub fn eval(&self, x: &[Rat]) -> Rat {
        dot(&self.coeffs, x) + &self.constant
    }

    pub fn add(&self, other: &Affine) -> Affine {
        Affine {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            constant: &self.constant + &other.constant,
        }
    }

    pub fn sub(&self, other: &Affine) -> Affine {
        Affine {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
            constant: &self.constant - &other.constant,
        }
    }

    pub fn scale(&self, c: &Rat) -> Affine {
        Affine {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            constant: &self.constant * c,
        }
    }

    pub fn add_constant(&self, c: &Rat) -> Affine {
        Affine {
            coeffs: self.coeffs.clone(),
            constant: &self.constant + c,
        }
    }

    /// Same linear part, ignoring the constant.
    pub fn parallel_to(&self, other: &Affine) -> bool {
        self.coeffs == other.coeffs
    }
}

impl std::fmt::Debug for Affine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}·x + {:?}", self.coeffs, self.constant)
    }
}

/// Upper envelope of distinct affine pieces over `ℝ^dim`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PlFuncRepr")]
pub struct PLFunc {
    dim: usize,
    pieces: Vec<Affine>,
}

#[derive(Deserialize)]
struct PlFuncRepr {
    dim: usize,
    pieces: Vec<Affine>,
}

impl TryFrom<PlFuncRepr> for PLFunc {
    type Error = Error;

    fn try_from(repr: PlFuncRepr) -> Result<Self> {
        PLFunc::new(repr.dim, repr.pieces)
    }
}

fn dedup_pieces(pieces: Vec<Affine>) -> Vec<Affine> {
    let mut seen = HashSet::with_capacity(pieces.len());
    let keep: Vec<bool> = pieces.iter().map(|p| seen.insert(p)).collect();
    drop(seen);
    pieces
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect()
}

impl PLFunc {
    /// Builds an envelope, collapsing duplicate pieces (first occurrence wins).
    pub fn new(dim: usize, pieces: Vec<Affine>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::EmptyPieces);
        }
        if let Some(bad) = pieces.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                context: "piece dimension",
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(PLFunc {
            dim,
            pieces: dedup_pieces(pieces),
        })
    }

    /// Like [`PLFunc::new`] with the dimension taken from the first piece.
    pub fn from_pieces(pieces: Vec<Affine>) -> Result<Self> {
        let dim = pieces.first().ok_or(Error::EmptyPieces)?.dim();
        PLFunc::new(dim, pieces)
    }

    pub fn constant(dim: usize, c: Rat) -> Self {
        PLFunc {
            dim,
            pieces: vec![Affine::constant_fn(dim, c)],
        }
    }

    pub fn zero(dim: usize) -> Self {
        PLFunc::constant(dim, Rat::zero())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[Affine] {
        &self.pieces
    }

    pub fn into_pieces(self) -> Vec<Affine> {
        self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check_point(&self, x: &[Rat]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "evaluation point",
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    fn check_same_dim(&self, other: &PLFunc) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                context: "piecewise-linear operands",
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[Rat]) -> Result<Rat> {
        self.check_point(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[Rat]) -> Rat {
        self.pieces
            .iter()
            .map(|p| p.eval(x))
            .max()
            .expect("nonempty envelope")
    }

    /// Pointwise maximum: the union of both piece sets.
    pub fn max(&self, other: &PLFunc) -> Result<PLFunc> {
        self.check_same_dim(other)?;
        let pieces = self.pieces.iter().chain(&other.pieces).cloned().collect();
        Ok(PLFunc {
            dim: self.dim,
            pieces: dedup_pieces(pieces),
        })
    }

    /// Pointwise sum: all pairwise sums of pieces.
    pub fn add(&self, other: &PLFunc) -> Result<PLFunc> {
        self.check_same_dim(other)?;
        let mut pieces = Vec::with_capacity(self.len() * other.len());
        for p in &self.pieces {
            for q in &other.pieces {
                pieces.push(p.add(q));
            }
        }
        Ok(PLFunc {
            dim: self.dim,
            pieces: dedup_pieces(pieces),
        })
    }

    /// `c · f` for `c ≥ 0`; collapses to the zero piece when `c = 0`.
    pub fn scale_nonneg(&self, c: &Rat) -> Result<PLFunc> {
        if c.is_negative() {
            return Err(Error::NegativeScale(c.clone()));
        }
        if c.is_zero() {
            return Ok(PLFunc::zero(self.dim));
        }
        Ok(PLFunc {
            dim: self.dim,
            pieces: self.pieces.iter().map(|p| p.scale(c)).collect(),
        })
    }

    pub fn add_constant(&self, c: &Rat) -> PLFunc {
        PLFunc {
            dim: self.dim,
            pieces: self.pieces.iter().map(|p| p.add_constant(c)).collect(),
        }
    }

    /// Set equality of the piece lists, ignoring order.
    pub fn same_pieces(&self, other: &PLFunc) -> bool {
        if self.dim != other.dim || self.len() != other.len() {
            return false;
        }
        let mine: HashSet<&Affine> = self.pieces.iter().collect();
        other.pieces.iter().all(|p| mine.contains(p))
    }

    /// Pieces in lexicographic coefficient order.
    pub fn sorted(&self) -> PLFunc {
        let mut pieces = self.pieces.clone();
        pieces.sort();
        PLFunc {
            dim: self.dim,
            pieces,
        }
    }

    pub(crate) fn from_distinct(dim: usize, pieces: Vec<Affine>) -> PLFunc {
        debug_assert!(!pieces.is_empty());
        debug_assert_eq!(dedup_pieces(pieces.clone()).len(), pieces.len());
        PLFunc { dim, pieces }
    }
}

impl std::fmt::Debug for PLFunc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("max")?;
        f.debug_set().entries(&self.pieces).finish()
    }
}

pub fn pl_eval(f: &PLFunc, x: &[Rat]) -> Result<Rat> {
    f.eval(x)
}

pub fn pl_dedup(pieces: Vec<Affine>) -> Result<PLFunc> {
    PLFunc::from_pieces(pieces)
}

pub fn pl_max(f: &PLFunc, g: &PLFunc) -> Result<PLFunc> {
    f.max(g)
}

pub fn pl_add(f: &PLFunc, g: &PLFunc) -> Result<PLFunc> {
    f.add(g)
}

pub fn pl_scale_nonneg(c: &Rat, f: &PLFunc) -> Result<PLFunc> {
    f.scale_nonneg(c)
}

/// Vector of envelopes over a common input space (coordinatewise maxima).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<PLFunc>", into = "Vec<PLFunc>")]
pub struct PLVec {
    components: Vec<PLFunc>,
}

impl TryFrom<Vec<PLFunc>> for PLVec {
    type Error = Error;

    fn try_from(components: Vec<PLFunc>) -> Result<Self> {
        PLVec::new(components)
    }
}

impl From<PLVec> for Vec<PLFunc> {
    fn from(v: PLVec) -> Self {
        v.components
    }
}

impl PLVec {
    pub fn new(components: Vec<PLFunc>) -> Result<Self> {
        let dim = components.first().ok_or(Error::EmptyPieces)?.dim();
        if let Some(bad) = components.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch {
                context: "vector components",
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(PLVec { components })
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn components(&self) -> &[PLFunc] {
        &self.components
    }

    pub fn get(&self, i: usize) -> &PLFunc {
        &self.components[i]
    }

    pub fn eval(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }
}

/// `W · T(x) + b` for a nonnegative `W`, which commutes with the maxima in `T`.
pub fn matvec_nonneg(w: &Matrix, t: &PLVec, b: &[Rat]) -> Result<PLVec> {
    if w.cols() != t.len() {
        return Err(Error::DimensionMismatch {
            context: "matvec_nonneg columns",
            expected: w.cols(),
            found: t.len(),
        });
    }
    if b.len() != w.rows() {
        return Err(Error::DimensionMismatch {
            context: "matvec_nonneg bias",
            expected: w.rows(),
            found: b.len(),
        });
    }
    for r in 0..w.rows() {
        if let Some(c) = w.row(r).iter().position(Rat::is_negative) {
            return Err(Error::NegativeEntry { row: r, col: c });
        }
    }
    let components = (0..w.rows())
        .map(|r| {
            let mut acc = PLFunc::constant(t.dim(), b[r].clone());
            for (l, weight) in w.row(r).iter().enumerate() {
                if !weight.is_zero() {
                    acc = acc.add(&t.get(l).scale_nonneg(weight)?)?;
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    PLVec::new(components)
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;

    fn grid_1d() -> impl Iterator<Item = Vec<Rat>> {
        (-10..=10).map(|k| vec![Rat::new(k, 2)])
    }

    #[test]
    fn eval_examples() {
        let f = plf(&[(&[1], 0), (&[2], 0)]);
        assert_eq!(f.eval(&pt(&[-1])).unwrap(), Rat::from_int(-1));
        assert_eq!(f.eval(&pt(&[3])).unwrap(), Rat::from_int(6));
        let g = plf(&[(&[1, 1], 0), (&[-1, -1], 1)]);
        assert_eq!(g.eval(&pt(&[0, 0])).unwrap(), Rat::one());
        assert!(matches!(g.eval(&pt(&[0])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn dedup_keeps_first_occurrence() {
        let f = pl_dedup(vec![aff(&[1], 0), aff(&[1], 0), aff(&[0], 0)]).unwrap();
        assert_eq!(f.pieces(), &[aff(&[1], 0), aff(&[0], 0)]);
        let f = pl_dedup(vec![aff(&[1], 0)]).unwrap();
        assert_eq!(f.len(), 1);
        let f = pl_dedup(vec![aff(&[2], 1), aff(&[2], 1), aff(&[2], 0)]).unwrap();
        assert_eq!(f.pieces(), &[aff(&[2], 1), aff(&[2], 0)]);
        assert!(matches!(pl_dedup(vec![]), Err(Error::EmptyPieces)));
    }

    #[test]
    fn max_examples() {
        let x = plf(&[(&[1], 0)]);
        let zero = plf(&[(&[0], 0)]);
        assert!(pl_max(&x, &zero)
            .unwrap()
            .same_pieces(&plf(&[(&[1], 0), (&[0], 0)])));
        assert!(pl_max(&x, &x).unwrap().same_pieces(&x));
        let two_x = plf(&[(&[2], 0)]);
        assert_eq!(pl_max(&x, &two_x).unwrap().len(), 2);
        assert!(pl_max(&x, &plf(&[(&[1, 1], 0)])).is_err());
    }

    #[test]
    fn add_examples_against_pointwise_sum() {
        let relu = plf(&[(&[1], 0), (&[0], 0)]);
        let s = pl_add(&relu, &relu).unwrap();
        assert!(s.same_pieces(&plf(&[(&[2], 0), (&[1], 0), (&[0], 0)])));
        for x in grid_1d() {
            let direct = relu.eval(&x).unwrap() + relu.eval(&x).unwrap();
            assert_eq!(s.eval(&x).unwrap(), direct);
        }

        assert!(pl_add(&relu, &PLFunc::zero(1)).unwrap().same_pieces(&relu));

        let neg_relu = plf(&[(&[-1], 0), (&[0], 0)]);
        let abs = pl_add(&relu, &neg_relu).unwrap();
        assert!(abs.same_pieces(&plf(&[(&[0], 0), (&[1], 0), (&[-1], 0)])));
        for x in grid_1d() {
            assert_eq!(abs.eval(&x).unwrap(), x[0].abs());
        }
    }

    #[test]
    fn scale_examples() {
        let relu = plf(&[(&[1], 0), (&[0], 0)]);
        assert!(relu
            .scale_nonneg(&Rat::from_int(2))
            .unwrap()
            .same_pieces(&plf(&[(&[2], 0), (&[0], 0)])));
        assert_eq!(relu.scale_nonneg(&Rat::zero()).unwrap(), PLFunc::zero(1));
        let f = plf(&[(&[2], 2), (&[0], 0)]);
        assert!(f
            .scale_nonneg(&Rat::new(1, 2))
            .unwrap()
            .same_pieces(&plf(&[(&[1], 1), (&[0], 0)])));
        assert!(matches!(
            relu.scale_nonneg(&Rat::from_int(-1)),
            Err(Error::NegativeScale(_))
        ));
    }

    #[test]
    fn matvec_nonneg_examples() {
        let relu = plf(&[(&[1], 0), (&[0], 0)]);
        let neg_relu = plf(&[(&[-1], 0), (&[0], 0)]);
        let t = PLVec::new(vec![relu.clone(), neg_relu.clone()]).unwrap();
        let w = Matrix::from_rows(vec![vec![Rat::one(), Rat::one()]]).unwrap();
        let out = matvec_nonneg(&w, &t, &[Rat::zero()]).unwrap();
        assert!(out.get(0).same_pieces(&plf(&[(&[1], 0), (&[0], 0), (&[-1], 0)])));
        for x in grid_1d() {
            assert_eq!(out.get(0).eval(&x).unwrap(), x[0].abs());
        }

        let id = matvec_nonneg(&Matrix::identity(2), &t, &[Rat::zero(), Rat::zero()]).unwrap();
        assert!(id.get(0).same_pieces(&relu) && id.get(1).same_pieces(&neg_relu));

        let neg = Matrix::from_rows(vec![vec![Rat::one(), Rat::from_int(-1)]]).unwrap();
        assert!(matches!(
            matvec_nonneg(&neg, &t, &[Rat::zero()]),
            Err(Error::NegativeEntry { row: 0, col: 1 })
        ));
    }

    #[test]
    fn matvec_nonneg_two_by_two_indexes_pieces_by_pairs() {
        // W max_i a^(i) = max_{i,j} (w11 a1^(i) + w12 a2^(j), ...)
        let a1 = plf(&[(&[1, 0], 1), (&[0, 0], 0)]);
        let a2 = plf(&[(&[0, 1], 0), (&[0, 0], 2)]);
        let t = PLVec::new(vec![a1.clone(), a2.clone()]).unwrap();
        let w = Matrix::from_rows(vec![
            vec![Rat::from_int(2), Rat::from_int(3)],
            vec![Rat::new(1, 2), Rat::from_int(1)],
        ])
        .unwrap();
        let out = matvec_nonneg(&w, &t, &[Rat::zero(), Rat::zero()]).unwrap();
        for r in 0..2 {
            let mut expected = Vec::new();
            for p in a1.pieces() {
                for q in a2.pieces() {
                    expected.push(p.scale(w.get(r, 0)).add(&q.scale(w.get(r, 1))));
                }
            }
            let expected = PLFunc::from_pieces(expected).unwrap();
            assert_eq!(out.get(r).len(), 4);
            assert!(out.get(r).same_pieces(&expected));
        }
    }

    #[test]
    fn json_shape() {
        let f = plf(&[(&[1, 2], 3)]);
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(
            text,
            r#"{"dim":2,"pieces":[{"coeffs":["1","2"],"constant":"3"}]}"#
        );
        assert_eq!(serde_json::from_str::<PLFunc>(&text).unwrap(), f);
        assert!(serde_json::from_str::<PLFunc>(r#"{"dim":1,"pieces":[]}"#).is_err());
        assert!(serde_json::from_str::<PLFunc>(
            r#"{"dim":1,"pieces":[{"coeffs":["1","2"],"constant":"0"}]}"#
        )
        .is_err());
    }
}
