//! Exact rational linear programming for open-polyhedron emptiness.
//!
//! `{x : g_k·x > h_k}` is nonempty iff the margin program
//!
//! ```text
//! maximize δ   subject to   g_k·x − h_k ≥ δ,   δ ≤ 1,   (x, δ) free
//! ```
//!
//! has a positive optimum. The program is solved through its dual
//!
//! ```text
//! minimize −Σ λ_k h_k + μ   subject to   Σ λ_k g_k = 0,   Σ λ_k + μ = 1,   λ, μ ≥ 0
//! ```
//!
//! which has `d + 1` equality rows no matter how many inequalities there
//! are; `(x, δ)` is read back from the dual multipliers of the final basis.
//! Non-strict rows enter with a multiplier but without the margin, so the
//! same routine decides mixed strict/non-strict systems.

use serde::{Deserialize, Serialize};

use crate::arith::{dot, Rat};
use crate::error::{Error, Result};

/// `normal · x > offset` (or `≥` when used as a non-strict row).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct StrictRow {
    pub normal: Vec<Rat>,
    pub offset: Rat,
}

impl StrictRow {
    pub fn new(normal: Vec<Rat>, offset: Rat) -> Self {
        StrictRow { normal, offset }
    }

    /// `normal · x − offset`
    pub fn slack(&self, x: &[Rat]) -> Rat {
        dot(&self.normal, x) - &self.offset
    }
}

/// Conjunction of strict inequalities over `ℝ^dim`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StrictSystem {
    dim: usize,
    rows: Vec<StrictRow>,
}

impl StrictSystem {
    pub fn new(dim: usize, rows: Vec<StrictRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Invalid("a strict system needs at least one row".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.normal.len() != dim) {
            return Err(Error::DimensionMismatch {
                context: "strict system row",
                expected: dim,
                found: bad.normal.len(),
            });
        }
        Ok(StrictSystem { dim, rows })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[StrictRow] {
        &self.rows
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StrictOutcome {
    Feasible(Vec<Rat>),
    Infeasible,
}

impl StrictOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, StrictOutcome::Feasible(_))
    }

    pub fn witness(&self) -> Option<&[Rat]> {
        match self {
            StrictOutcome::Feasible(x) => Some(x),
            StrictOutcome::Infeasible => None,
        }
    }
}

/// Decides whether the open polyhedron of `sys` is nonempty; a feasible
/// answer carries an exact interior point.
pub fn strict_feasible(sys: &StrictSystem) -> StrictOutcome {
    feasible(sys.dim, &sys.rows, &[])
}

/// True iff `x` satisfies every row strictly.
pub fn verify_witness(sys: &StrictSystem, x: &[Rat]) -> Result<bool> {
    if x.len() != sys.dim {
        return Err(Error::DimensionMismatch {
            context: "witness",
            expected: sys.dim,
            found: x.len(),
        });
    }
    Ok(sys.rows.iter().all(|r| r.slack(x).is_positive()))
}

/// Mixed system: every `strict` row with `>` and every `nonstrict` row with `≥`.
pub fn feasible(dim: usize, strict: &[StrictRow], nonstrict: &[StrictRow]) -> StrictOutcome {
    debug_assert!(strict.iter().chain(nonstrict).all(|r| r.normal.len() == dim));
    let rows: Vec<&StrictRow> = strict.iter().chain(nonstrict).collect();
    let nvars = rows.len() + 1;
    let mu = rows.len();

    // Row l < dim:  Σ_k −g_{k,l} y_k = 0.   Row dim:  Σ_{strict} λ_k + μ = 1.
    let mut a = vec![vec![Rat::zero(); nvars]; dim + 1];
    for (k, row) in rows.iter().enumerate() {
        for (l, g) in row.normal.iter().enumerate() {
            a[l][k] = -g;
        }
    }
    for slot in &mut a[dim][..strict.len()] {
        *slot = Rat::one();
    }
    a[dim][mu] = Rat::one();
    let mut b = vec![Rat::zero(); dim + 1];
    b[dim] = Rat::one();
    let mut c: Vec<Rat> = rows.iter().map(|r| -&r.offset).collect();
    c.push(Rat::one());

    match minimize_standard(&a, &b, &c) {
        LpSolution::Unbounded => StrictOutcome::Infeasible,
        LpSolution::Infeasible => unreachable!("μ = 1 is always dual feasible"),
        LpSolution::Optimal { dual, value, .. } => {
            if !value.is_positive() {
                return StrictOutcome::Infeasible;
            }
            let x = dual[..dim].to_vec();
            assert!(
                strict.iter().all(|r| r.slack(&x).is_positive())
                    && nonstrict.iter().all(|r| !r.slack(&x).is_negative()),
                "simplex returned a point outside the polyhedron"
            );
            StrictOutcome::Feasible(x)
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) enum LpSolution {
    Optimal {
        primal: Vec<Rat>,
        /// Multipliers `π` with `Aᵀπ ≤ c` and `bᵀπ = value`.
        dual: Vec<Rat>,
        value: Rat,
    },
    Infeasible,
    Unbounded,
}

/// Dense two-phase tableau simplex with Bland's rule for
/// `minimize c·y subject to A y = b, y ≥ 0`.
pub(crate) fn minimize_standard(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> LpSolution {
    let m = a.len();
    let n = c.len();
    debug_assert!(a.iter().all(|row| row.len() == n) && b.len() == m);

    let mut flipped = vec![false; m];
    let mut t = Tableau::new(m, n + m);
    for i in 0..m {
        flipped[i] = b[i].is_negative();
        let sign = if flipped[i] { -Rat::one() } else { Rat::one() };
        for (j, v) in a[i].iter().enumerate() {
            if !v.is_zero() {
                *t.at(i, j) = v * &sign;
            }
        }
        *t.at(i, n + i) = Rat::one();
        *t.rhs(i) = &b[i] * &sign;
        t.basis[i] = n + i;
    }

    // Phase 1: minimize the sum of artificials.
    let mut phase1_cost = vec![Rat::zero(); n + m];
    for cost in &mut phase1_cost[n..] {
        *cost = Rat::one();
    }
    t.load_objective(&phase1_cost);
    if t.run(n + m) == Step::Unbounded {
        unreachable!("phase 1 is bounded below by zero");
    }
    if !t.objective_value().is_zero() {
        return LpSolution::Infeasible;
    }
    for i in 0..m {
        if t.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t.get(i, j).is_zero()) {
                t.pivot(i, j);
            }
            // Otherwise the row is redundant; its artificial stays basic at zero.
        }
    }

    // Phase 2 on the original costs; artificials may not re-enter.
    let mut cost = c.to_vec();
    cost.extend(std::iter::repeat_n(Rat::zero(), m));
    t.load_objective(&cost);
    if t.run(n) == Step::Unbounded {
        return LpSolution::Unbounded;
    }

    let mut primal = vec![Rat::zero(); n];
    for i in 0..m {
        if t.basis[i] < n {
            primal[t.basis[i]] = t.get(i, t.cols).clone();
        }
    }
    let dual = (0..m)
        .map(|i| {
            let pi = -t.get(m, n + i);
            if flipped[i] {
                -pi
            } else {
                pi
            }
        })
        .collect();
    LpSolution::Optimal {
        primal,
        dual,
        value: t.objective_value(),
    }
}

#[derive(PartialEq, Eq, Debug)]
enum Step {
    Optimal,
    Unbounded,
}

/// `(m + 1) × (cols + 1)` tableau; row `m` holds reduced costs and `−z`.
struct Tableau {
    m: usize,
    cols: usize,
    data: Vec<Rat>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(m: usize, cols: usize) -> Self {
        Tableau {
            m,
            cols,
            data: vec![Rat::zero(); (m + 1) * (cols + 1)],
            basis: vec![0; m],
        }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.cols + 1) + j
    }

    fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[self.idx(i, j)]
    }

    fn at(&mut self, i: usize, j: usize) -> &mut Rat {
        let k = self.idx(i, j);
        &mut self.data[k]
    }

    fn rhs(&mut self, i: usize) -> &mut Rat {
        let cols = self.cols;
        self.at(i, cols)
    }

    fn objective_value(&self) -> Rat {
        -self.get(self.m, self.cols)
    }

    fn load_objective(&mut self, cost: &[Rat]) {
        let m = self.m;
        for j in 0..=self.cols {
            let mut r = if j < self.cols {
                cost[j].clone()
            } else {
                Rat::zero()
            };
            for i in 0..m {
                let cb = &cost[self.basis[i]];
                if !cb.is_zero() {
                    let v = self.get(i, j);
                    if !v.is_zero() {
                        r -= &(cb * v);
                    }
                }
            }
            *self.at(m, j) = r;
        }
    }

    /// Pivots until optimal; only columns `< allowed` may enter.
    fn run(&mut self, allowed: usize) -> Step {
        loop {
            let Some(q) = (0..allowed).find(|&j| self.get(self.m, j).is_negative()) else {
                return Step::Optimal;
            };
            let mut best: Option<(usize, Rat)> = None;
            for i in 0..self.m {
                let coef = self.get(i, q);
                if coef.is_positive() {
                    let ratio = self.get(i, self.cols) / coef;
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((p, _)) => self.pivot(p, q),
                None => return Step::Unbounded,
            }
        }
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let width = self.cols + 1;
        let inv = self.get(p, q).recip();
        let start = self.idx(p, 0);
        for v in &mut self.data[start..start + width] {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        let pivot_row: Vec<Rat> = self.data[start..start + width].to_vec();
        for i in 0..=self.m {
            if i == p {
                continue;
            }
            let factor = self.get(i, q).clone();
            if factor.is_zero() {
                continue;
            }
            let base = self.idx(i, 0);
            for (j, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    self.data[base + j] -= &(&factor * pv);
                }
            }
        }
        self.basis[p] = q;
    }
}
