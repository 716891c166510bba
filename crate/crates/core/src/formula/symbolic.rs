//! Affine pieces whose coefficients are polynomials in network parameters,
//! and the layer recursion run over them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::poly::{is_identifier, Assignment, Poly};
use crate::error::{Error, Result};
use crate::network::{Architecture, Network};
use crate::pl::Affine;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct SymbolicAffine {
    pub coeffs: Vec<Poly>,
    pub constant: Poly,
}

impl SymbolicAffine {
    pub fn new(coeffs: Vec<Poly>, constant: Poly) -> Self {
        SymbolicAffine { coeffs, constant }
    }

    pub fn zero(dim: usize) -> Self {
        SymbolicAffine::new(vec![Poly::zero(); dim], Poly::zero())
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn add(&self, other: &SymbolicAffine) -> SymbolicAffine {
        SymbolicAffine::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            &self.constant + &other.constant,
        )
    }

    pub fn sub(&self, other: &SymbolicAffine) -> SymbolicAffine {
        SymbolicAffine::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
            &self.constant - &other.constant,
        )
    }

    pub fn scale(&self, c: &Poly) -> SymbolicAffine {
        SymbolicAffine::new(self.coeffs.iter().map(|a| a * c).collect(), &self.constant * c)
    }

    pub fn add_constant(&self, c: &Poly) -> SymbolicAffine {
        SymbolicAffine::new(self.coeffs.clone(), &self.constant + c)
    }

    /// `Σ_i coeffs_i · inputs_i + constant` as one polynomial.
    pub fn as_poly(&self, inputs: &[String]) -> Poly {
        self.coeffs
            .iter()
            .zip(inputs)
            .fold(self.constant.clone(), |acc, (c, x)| acc + c * &Poly::var(x))
    }

    pub fn substitute(&self, assignment: &Assignment) -> SymbolicAffine {
        SymbolicAffine::new(
            self.coeffs.iter().map(|c| c.substitute(assignment)).collect(),
            self.constant.substitute(assignment),
        )
    }

    /// The concrete piece, if no parameter is left.
    pub fn to_affine(&self) -> Option<Affine> {
        Some(Affine::new(
            self.coeffs.iter().map(Poly::as_constant).collect::<Option<_>>()?,
            self.constant.as_constant()?,
        ))
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.coeffs
            .iter()
            .chain(std::iter::once(&self.constant))
            .flat_map(Poly::variables)
            .collect()
    }
}

impl From<&Affine> for SymbolicAffine {
    fn from(a: &Affine) -> Self {
        SymbolicAffine::new(
            a.coeffs.iter().cloned().map(Poly::constant).collect(),
            Poly::constant(a.constant.clone()),
        )
    }
}

/// `x_1, …, x_d`.
pub fn input_vars(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("x_{i}")).collect()
}

/// A list of symbolic pieces as read from a file. Input variables default to
/// `x_1, …, x_d`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SymbolicPieces {
    pub dim: usize,
    pub pieces: Vec<SymbolicAffine>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<Vec<String>>,
}

impl SymbolicPieces {
    pub fn new(dim: usize, pieces: Vec<SymbolicAffine>) -> Self {
        SymbolicPieces {
            dim,
            pieces,
            inputs: None,
        }
    }

    pub fn input_names(&self) -> Vec<String> {
        self.inputs.clone().unwrap_or_else(|| input_vars(self.dim))
    }

    pub fn validate(&self) -> Result<()> {
        if self.pieces.is_empty() {
            return Err(Error::EmptyPieces);
        }
        if let Some(p) = self.pieces.iter().find(|p| p.dim() != self.dim) {
            return Err(Error::DimensionMismatch {
                context: "symbolic piece",
                expected: self.dim,
                found: p.dim(),
            });
        }
        let inputs = self.input_names();
        if inputs.len() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "input variable names",
                expected: self.dim,
                found: inputs.len(),
            });
        }
        let distinct: BTreeSet<&String> = inputs.iter().collect();
        if distinct.len() != inputs.len() || !inputs.iter().all(|v| is_identifier(v)) {
            return Err(Error::Invalid(format!("bad input variable names {inputs:?}")));
        }
        let params: BTreeSet<String> = self.pieces.iter().flat_map(SymbolicAffine::variables).collect();
        if let Some(clash) = inputs.iter().find(|v| params.contains(*v)) {
            return Err(Error::Invalid(format!(
                "`{clash}` is used both as an input and as a coefficient variable"
            )));
        }
        Ok(())
    }
}

/// Indexed positive and negative families of one output coordinate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymbolicPair {
    pub pos: Vec<SymbolicAffine>,
    pub neg: Vec<SymbolicAffine>,
}

fn w(tag: &str, kind: &str, k: usize, i: usize, j: usize) -> String {
    format!("{tag}{kind}_{k}_{i}_{j}")
}

fn unit(tag: &str, kind: &str, k: usize, i: usize) -> String {
    format!("{tag}{kind}_{k}_{i}")
}

/// `(w, wplus, wminus)` names for every weight of layers 2 and up.
pub(crate) fn split_vars(arch: &Architecture, tag: &str) -> Vec<(String, String, String)> {
    let mut out = Vec::new();
    for (k, (inputs, outputs)) in arch.layer_shapes().enumerate().skip(1) {
        for i in 1..=outputs {
            for j in 1..=inputs {
                out.push((
                    w(tag, "w", k + 1, i, j),
                    w(tag, "wplus", k + 1, i, j),
                    w(tag, "wminus", k + 1, i, j),
                ));
            }
        }
    }
    out
}

/// Values of every parameter variable for a concrete network: raw `w`, `b`
/// and `t` for all layers, and the split `wplus`, `wminus` from layer 2 on.
pub fn network_assignment(net: &Network, tag: &str) -> Assignment {
    let mut out = Assignment::new();
    for (k, layer) in net.layers.iter().enumerate() {
        let k1 = k + 1;
        for i in 0..layer.outputs() {
            for j in 0..layer.inputs() {
                let v = layer.weights.get(i, j);
                out.insert(w(tag, "w", k1, i + 1, j + 1), v.clone());
                if k > 0 {
                    out.insert(w(tag, "wplus", k1, i + 1, j + 1), v.positive_part());
                    out.insert(w(tag, "wminus", k1, i + 1, j + 1), v.negative_part());
                }
            }
            out.insert(unit(tag, "b", k1, i + 1), layer.bias[i].clone());
            out.insert(unit(tag, "t", k1, i + 1), layer.threshold[i].clone());
        }
    }
    out
}

/// `{Σ_l w_l·p_l : p_l ∈ family_l}` in lexicographic index order.
fn minkowski(dim: usize, terms: &[(Poly, &[SymbolicAffine])]) -> Vec<SymbolicAffine> {
    let mut acc = vec![SymbolicAffine::zero(dim)];
    for (weight, family) in terms {
        acc = acc
            .iter()
            .flat_map(|a| family.iter().map(move |p| a.add(&p.scale(weight))))
            .collect();
    }
    acc
}

/// The layer recursion over parameter variables named `{tag}w_k_i_j` (layer
/// 1), `{tag}wplus_k_i_j` / `{tag}wminus_k_i_j` (later layers),
/// `{tag}b_k_i` and `{tag}t_k_i`, all 1-based.
///
/// Every family keeps its full index set, so its length depends on the
/// architecture only and equals [`Architecture::index_set_sizes`].
pub fn symbolic_decompose(arch: &Architecture, tag: &str, cap: u64) -> Result<Vec<SymbolicPair>> {
    let (s, t) = arch.index_set_sizes();
    if s.max(t) > cap {
        return Err(Error::PieceCap {
            required: s.max(t),
            cap,
        });
    }
    let dim = arch.input_dim;
    let first = arch.widths[0];
    let mut pos: Vec<Vec<SymbolicAffine>> = (1..=first)
        .map(|i| {
            vec![
                SymbolicAffine::new(
                    (1..=dim).map(|j| Poly::var(&w(tag, "w", 1, i, j))).collect(),
                    Poly::var(&unit(tag, "b", 1, i)),
                ),
                SymbolicAffine::new(vec![Poly::zero(); dim], Poly::var(&unit(tag, "t", 1, i))),
            ]
        })
        .collect();
    let mut neg: Vec<Vec<SymbolicAffine>> = vec![vec![SymbolicAffine::zero(dim)]; first];

    for (k, (inputs, outputs)) in arch.layer_shapes().enumerate().skip(1) {
        let k1 = k + 1;
        let mut next_pos = Vec::with_capacity(outputs);
        let mut next_neg = Vec::with_capacity(outputs);
        for r in 1..=outputs {
            let plus = |l: usize| Poly::var(&w(tag, "wplus", k1, r, l));
            let minus = |l: usize| Poly::var(&w(tag, "wminus", k1, r, l));
            let mut up = Vec::with_capacity(2 * inputs);
            let mut down = Vec::with_capacity(2 * inputs);
            for l in 1..=inputs {
                up.push((plus(l), pos[l - 1].as_slice()));
                up.push((minus(l), neg[l - 1].as_slice()));
                down.push((minus(l), pos[l - 1].as_slice()));
                down.push((plus(l), neg[l - 1].as_slice()));
            }
            let n = minkowski(dim, &down);
            let b = Poly::var(&unit(tag, "b", k1, r));
            let t = Poly::var(&unit(tag, "t", k1, r));
            let mut p: Vec<SymbolicAffine> = minkowski(dim, &up).iter().map(|a| a.add_constant(&b)).collect();
            p.extend(n.iter().map(|a| a.add_constant(&t)));
            next_pos.push(p);
            next_neg.push(n);
        }
        pos = next_pos;
        neg = next_neg;
    }
    Ok(pos
        .into_iter()
        .zip(neg)
        .map(|(pos, neg)| SymbolicPair { pos, neg })
        .collect())
}

/// Concrete pieces of an indexed family, or `None` if a parameter is left.
pub fn concretize(family: &[SymbolicAffine], assignment: &Assignment) -> Option<Vec<Affine>> {
    family
        .iter()
        .map(|p| p.substitute(assignment).to_affine())
        .collect()
}
