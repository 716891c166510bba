//! Layered networks `(W⁽ᵏ⁾, b⁽ᵏ⁾, t⁽ᵏ⁾)` with activation `max{Wx + b, t}`
//! and their decomposition `ν = ν₊ − ν₋` into two upper envelopes.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{Matrix, Rat};
use crate::envelope::{add_minimal, minimize};
use crate::error::{Error, Result};
use crate::pl::{Affine, PLFunc, PLVec};

pub const DEFAULT_PIECE_CAP: u64 = 1_000_000;

/// Layer numbers in shape reports are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("a network needs at least one layer")]
    NoLayers,
    #[error("layer {layer}: W has {rows} rows but {field} has {len} entries")]
    Layer {
        layer: usize,
        field: &'static str,
        rows: usize,
        len: usize,
    },
    #[error("layers ({first}, {second}): layer {first} outputs {outputs} values but layer {second} expects {inputs} inputs")]
    Adjacent {
        first: usize,
        second: usize,
        outputs: usize,
        inputs: usize,
    },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Layer {
    #[serde(rename = "W")]
    pub weights: Matrix,
    #[serde(rename = "b")]
    pub bias: Vec<Rat>,
    #[serde(rename = "t")]
    pub threshold: Vec<Rat>,
}

impl Layer {
    pub fn new(weights: Matrix, bias: Vec<Rat>, threshold: Vec<Rat>) -> Self {
        Layer {
            weights,
            bias,
            threshold,
        }
    }

    pub fn inputs(&self) -> usize {
        self.weights.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.rows()
    }
}

/// Network data; shapes are checked by [`Network::validate`], which every
/// operation calls first.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Network {
    pub layers: Vec<Layer>,
}

impl Network {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        let net = Network { layers };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<(), ShapeError> {
        if self.layers.is_empty() {
            return Err(ShapeError::NoLayers);
        }
        for (k, layer) in self.layers.iter().enumerate() {
            let rows = layer.outputs();
            for (field, len) in [("b", layer.bias.len()), ("t", layer.threshold.len())] {
                if len != rows {
                    return Err(ShapeError::Layer {
                        layer: k + 1,
                        field,
                        rows,
                        len,
                    });
                }
            }
            if let Some(next) = self.layers.get(k + 1) {
                if next.inputs() != rows {
                    return Err(ShapeError::Adjacent {
                        first: k + 1,
                        second: k + 2,
                        outputs: rows,
                        inputs: next.inputs(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("nonempty").outputs()
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn architecture(&self) -> Architecture {
        Architecture {
            input_dim: self.input_dim(),
            widths: self.layers.iter().map(Layer::outputs).collect(),
        }
    }

    /// `σ_L ∘ ρ_L ∘ … ∘ σ_1 ∘ ρ_1 (x)`, exactly.
    pub fn forward_eval(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        self.validate()?;
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                context: "network input",
                expected: self.input_dim(),
                found: x.len(),
            });
        }
        let mut v = x.to_vec();
        for layer in &self.layers {
            v = layer
                .weights
                .matvec(&v)?
                .into_iter()
                .zip(&layer.bias)
                .zip(&layer.threshold)
                .map(|((y, b), t)| (y + b).max(t.clone()))
                .collect();
        }
        Ok(v)
    }
}

pub fn validate(net: &Network) -> Result<(), ShapeError> {
    net.validate()
}

pub fn forward_eval(net: &Network, x: &[Rat]) -> Result<Vec<Rat>> {
    net.forward_eval(x)
}

/// Input dimension followed by the output width of every layer.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Architecture {
    pub input_dim: usize,
    pub widths: Vec<usize>,
}

impl Architecture {
    pub fn new(input_dim: usize, widths: Vec<usize>) -> Result<Self> {
        if input_dim == 0 || widths.is_empty() || widths.contains(&0) {
            return Err(Error::Invalid(
                "an architecture needs a positive input dimension and at least one nonempty layer".into(),
            ));
        }
        Ok(Architecture { input_dim, widths })
    }

    pub fn output_dim(&self) -> usize {
        *self.widths.last().expect("nonempty")
    }

    /// `(m_{k-1}, m_k)` per layer.
    pub fn layer_shapes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        std::iter::once(self.input_dim)
            .chain(self.widths.iter().copied())
            .zip(self.widths.iter().copied())
    }

    /// Sizes `(|S|, |T|)` of the index sets of `ν₊` and `ν₋` per output when
    /// the entries of `W₊` and `W₋` are treated as independent formal
    /// variables. They depend on the architecture alone. Saturates at
    /// `u64::MAX`.
    pub fn index_set_sizes(&self) -> (u64, u64) {
        let (mut s, mut t) = (2u64, 1u64);
        for &n in &self.widths[..self.widths.len() - 1] {
            let product = sat_pow(s.saturating_mul(t), n);
            s = product.saturating_mul(2);
            t = product;
        }
        (s, t)
    }

    /// Upper bound on the distinct pieces of any single component of a
    /// concrete unpruned decomposition. Each weight feeds either its `W₊`
    /// or its `W₋` term, never both.
    pub fn worst_case_pieces(&self) -> u64 {
        let (mut s, mut t) = (2u64, 1u64);
        for &n in &self.widths[..self.widths.len() - 1] {
            let branch = sat_pow(s.max(t), n);
            s = branch.saturating_mul(2);
            t = branch;
        }
        s.max(t)
    }
}

fn sat_pow(base: u64, exp: usize) -> u64 {
    (0..exp).fold(1u64, |acc, _| acc.saturating_mul(base))
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.input_dim)?;
        for w in &self.widths {
            write!(f, ",{w}")?;
        }
        Ok(())
    }
}

impl FromStr for Architecture {
    type Err = Error;

    /// Comma-separated widths, input dimension first: `"3,2,3"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Invalid(format!("bad architecture `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        match parts.split_first() {
            Some((&input, widths)) => Architecture::new(input, widths.to_vec()),
            None => Err(Error::Invalid(format!("bad architecture `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecomposeOptions {
    /// Replace every component by its minimal representation as it is built.
    pub prune: bool,
    pub piece_cap: u64,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            prune: true,
            piece_cap: DEFAULT_PIECE_CAP,
        }
    }
}

impl DecomposeOptions {
    pub fn pruned() -> Self {
        Self::default()
    }

    pub fn unpruned() -> Self {
        DecomposeOptions {
            prune: false,
            ..Self::default()
        }
    }
}

/// `ν(x) = pos(x) − neg(x)` componentwise.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TropicalPair {
    pub pos: PLVec,
    pub neg: PLVec,
}

impl TropicalPair {
    pub fn input_dim(&self) -> usize {
        self.pos.dim()
    }

    pub fn output_dim(&self) -> usize {
        self.pos.len()
    }

    pub fn eval(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        let p = self.pos.eval(x)?;
        let n = self.neg.eval(x)?;
        Ok(p.into_iter().zip(n).map(|(a, b)| a - b).collect())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PieceCounts {
    pub pos: usize,
    pub neg: usize,
}

pub fn piece_counts(pair: &TropicalPair) -> Vec<PieceCounts> {
    pair.pos
        .components()
        .iter()
        .zip(pair.neg.components())
        .map(|(p, n)| PieceCounts {
            pos: p.len(),
            neg: n.len(),
        })
        .collect()
}

/// `Σ_l w_l f_l` over nonnegative weights, optionally kept minimal.
fn weighted_sum(dim: usize, terms: &[(&Rat, &PLFunc)], opts: &DecomposeOptions) -> Result<PLFunc> {
    let mut acc = PLFunc::zero(dim);
    for &(w, f) in terms {
        if w.is_zero() {
            continue;
        }
        let term = f.scale_nonneg(w)?;
        let required = (acc.len() as u64).saturating_mul(term.len() as u64);
        if required > opts.piece_cap {
            return Err(Error::PieceCap {
                required,
                cap: opts.piece_cap,
            });
        }
        acc = if opts.prune {
            add_minimal(&acc, &term)?
        } else {
            acc.add(&term)?
        };
    }
    Ok(acc)
}

/// Runs the layer recursion
///
/// ```text
/// ν₊ ← max{ W₊ν₊ + W₋ν₋ + b,  t + W₋ν₊ + W₊ν₋ }
/// ν₋ ← W₋ν₊ + W₊ν₋
/// ```
///
/// from the base case `ν₊ = max{W⁽¹⁾x + b⁽¹⁾, t⁽¹⁾}`, `ν₋ = 0`.
pub fn decompose(net: &Network, opts: &DecomposeOptions) -> Result<TropicalPair> {
    net.validate()?;
    if !opts.prune {
        let bound = net.architecture().worst_case_pieces();
        if bound > opts.piece_cap {
            return Err(Error::PieceCap {
                required: bound,
                cap: opts.piece_cap,
            });
        }
    }
    let dim = net.input_dim();
    let first = &net.layers[0];
    let mut pos: Vec<PLFunc> = (0..first.outputs())
        .map(|i| {
            let f = PLFunc::new(
                dim,
                vec![
                    Affine::new(first.weights.row(i).to_vec(), first.bias[i].clone()),
                    Affine::constant_fn(dim, first.threshold[i].clone()),
                ],
            )?;
            Ok(if opts.prune { minimize(&f) } else { f })
        })
        .collect::<Result<_>>()?;
    let mut neg: Vec<PLFunc> = vec![PLFunc::zero(dim); first.outputs()];

    for layer in &net.layers[1..] {
        let (wp, wm) = layer.weights.split_pos_neg();
        let next: Vec<(PLFunc, PLFunc)> = (0..layer.outputs())
            .into_par_iter()
            .map(|r| {
                let mut up_terms = Vec::with_capacity(2 * pos.len());
                let mut down_terms = Vec::with_capacity(2 * pos.len());
                for l in 0..pos.len() {
                    up_terms.push((wp.get(r, l), &pos[l]));
                    up_terms.push((wm.get(r, l), &neg[l]));
                    down_terms.push((wm.get(r, l), &pos[l]));
                    down_terms.push((wp.get(r, l), &neg[l]));
                }
                let new_neg = weighted_sum(dim, &down_terms, opts)?;
                let up = weighted_sum(dim, &up_terms, opts)?.add_constant(&layer.bias[r]);
                let new_pos = up.max(&new_neg.add_constant(&layer.threshold[r]))?;
                let new_pos = if opts.prune { minimize(&new_pos) } else { new_pos };
                Ok((new_pos, new_neg))
            })
            .collect::<Result<_>>()?;
        (pos, neg) = next.into_iter().unzip();
    }

    Ok(TropicalPair {
        pos: PLVec::new(pos)?,
        neg: PLVec::new(neg)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pl::test_support::*;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    fn layer(w: &[&[&str]], b: &[&str], t: &[&str]) -> Layer {
        Layer::new(
            Matrix::from_rows(w.iter().map(|row| row.iter().map(|s| r(s)).collect()).collect()).unwrap(),
            b.iter().map(|s| r(s)).collect(),
            t.iter().map(|s| r(s)).collect(),
        )
    }

    fn single(w: &str, b: &str, t: &str) -> Network {
        Network::new(vec![layer(&[&[w]], &[b], &[t])]).unwrap()
    }

    #[test]
    fn validate_examples() {
        let ok = Network {
            layers: vec![
                layer(&[&["1"], &["2"]], &["0", "0"], &["0", "0"]),
                layer(&[&["1", "1"]], &["0"], &["0"]),
            ],
        };
        assert!(ok.validate().is_ok());
        let bad = Network {
            layers: vec![
                layer(&[&["1"], &["2"]], &["0", "0"], &["0", "0"]),
                layer(&[&["1", "1", "1"]], &["0"], &["0"]),
            ],
        };
        assert_eq!(
            bad.validate(),
            Err(ShapeError::Adjacent {
                first: 1,
                second: 2,
                outputs: 2,
                inputs: 3
            })
        );
        assert!(bad.validate().unwrap_err().to_string().contains("layers (1, 2)"));
        assert_eq!(Network { layers: vec![] }.validate(), Err(ShapeError::NoLayers));
        let short_bias = Network {
            layers: vec![layer(&[&["1"], &["2"]], &["0"], &["0", "0"])],
        };
        assert!(matches!(
            short_bias.validate(),
            Err(ShapeError::Layer {
                layer: 1,
                field: "b",
                ..
            })
        ));
    }

    #[test]
    fn forward_eval_examples() {
        let net = single("2", "1", "0");
        assert_eq!(net.forward_eval(&pt(&[1])).unwrap(), pt(&[3]));
        assert_eq!(net.forward_eval(&pt(&[-1])).unwrap(), pt(&[0]));
        assert!(net.forward_eval(&pt(&[1, 2])).is_err());
    }

    #[test]
    fn base_case_decomposition() {
        let pair = decompose(&single("2", "1", "0"), &DecomposeOptions::unpruned()).unwrap();
        assert!(pair.pos.get(0).same_pieces(&plf(&[(&[2], 1), (&[0], 0)])));
        assert_eq!(pair.neg.get(0), &PLFunc::zero(1));

        let relu = decompose(&single("1", "0", "0"), &DecomposeOptions::pruned()).unwrap();
        assert!(relu.pos.get(0).same_pieces(&plf(&[(&[1], 0), (&[0], 0)])));
        assert_eq!(relu.neg.get(0), &PLFunc::zero(1));
        assert_eq!(piece_counts(&relu), vec![PieceCounts { pos: 2, neg: 1 }]);
    }

    #[test]
    fn two_layer_by_hand() {
        // x ↦ max{−max{x, 0} + 1, 0}: the negative weight moves ν₊ into ν₋.
        let net = Network::new(vec![
            layer(&[&["1"]], &["0"], &["0"]),
            layer(&[&["-1"]], &["1"], &["0"]),
        ])
        .unwrap();
        let pair = decompose(&net, &DecomposeOptions::unpruned()).unwrap();
        // ν₋ = max{x, 0};  ν₊ = max{1, 0 + max{x, 0}} = max{1, x, 0}.
        assert!(pair.neg.get(0).same_pieces(&plf(&[(&[1], 0), (&[0], 0)])));
        assert!(pair
            .pos
            .get(0)
            .same_pieces(&plf(&[(&[0], 1), (&[1], 0), (&[0], 0)])));
        for k in -6..=6 {
            let x = vec![Rat::new(k, 2)];
            assert_eq!(pair.eval(&x).unwrap(), net.forward_eval(&x).unwrap());
        }
        let pruned = decompose(&net, &DecomposeOptions::pruned()).unwrap();
        assert!(pruned.pos.get(0).same_pieces(&plf(&[(&[0], 1), (&[1], 0)])));
    }

    #[test]
    fn architecture_sizes() {
        let a: Architecture = "1,1".parse().unwrap();
        assert_eq!(a.index_set_sizes(), (2, 1));
        let a: Architecture = "3,2,3".parse().unwrap();
        // (2·1)² = 4 → |S| = 8, |T| = 4.
        assert_eq!(a.index_set_sizes(), (8, 4));
        assert_eq!(a.worst_case_pieces(), 8);
        assert_eq!(a.to_string(), "3,2,3");
        assert!("3".parse::<Architecture>().is_err());
        assert!("3,0".parse::<Architecture>().is_err());
        assert!("".parse::<Architecture>().is_err());
    }

    #[test]
    fn cap_refuses_unpruned_blowup() {
        let wide = Network::new(vec![
            layer(&[&["1"], &["1"], &["1"]], &["0", "0", "0"], &["0", "0", "0"]),
            layer(&[&["1", "1", "1"]], &["0"], &["0"]),
        ])
        .unwrap();
        let opts = DecomposeOptions {
            prune: false,
            piece_cap: 4,
        };
        assert!(matches!(
            decompose(&wide, &opts),
            Err(Error::PieceCap { required: 16, cap: 4 })
        ));
    }

    #[test]
    fn network_json_shape() {
        let text = r#"{"layers":[{"W":[["1","-1/2"]],"b":["0"],"t":["-1"]}]}"#;
        let net: Network = serde_json::from_str(text).unwrap();
        assert_eq!(net.input_dim(), 2);
        assert_eq!(serde_json::to_string(&net).unwrap(), text);
    }
}
