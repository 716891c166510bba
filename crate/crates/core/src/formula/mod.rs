//! First-order formulas over polynomial sign conditions, the semialgebraic
//! membership conditions built from them, and their SMT-LIB rendering.

mod builders;
mod ground;
pub mod poly;
mod smtlib;
mod symbolic;

use std::collections::BTreeSet;

pub use builders::{coverage_formula, equivalence_formula, redundancy_formula, stratum_formula};
pub use ground::eval_ground;
pub use poly::{Assignment, Monomial, Poly};
pub use smtlib::emit_smtlib;
pub use symbolic::{
    concretize, input_vars, network_assignment, symbolic_decompose, SymbolicAffine, SymbolicPair,
    SymbolicPieces,
};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Rel {
    /// `p = 0`
    Eq,
    /// `p > 0`
    Gt,
    /// `p ≥ 0`
    Ge,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    True,
    False,
    Atom(Poly, Rel),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    Forall(Vec<String>, Box<Formula>),
    Exists(Vec<String>, Box<Formula>),
}

impl Formula {
    pub fn ge(p: Poly) -> Formula {
        Formula::Atom(p, Rel::Ge)
    }

    pub fn gt(p: Poly) -> Formula {
        Formula::Atom(p, Rel::Gt)
    }

    pub fn eq(p: Poly) -> Formula {
        Formula::Atom(p, Rel::Eq)
    }

    pub fn and(parts: Vec<Formula>) -> Formula {
        Formula::And(parts)
    }

    pub fn or(parts: Vec<Formula>) -> Formula {
        Formula::Or(parts)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    /// `∀vars f`, or `f` itself when `vars` is empty.
    pub fn forall(vars: Vec<String>, f: Formula) -> Formula {
        if vars.is_empty() {
            f
        } else {
            Formula::Forall(vars, Box::new(f))
        }
    }

    pub fn exists(vars: Vec<String>, f: Formula) -> Formula {
        if vars.is_empty() {
            f
        } else {
            Formula::Exists(vars, Box::new(f))
        }
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(p, _) => {
                out.extend(p.variables().into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::And(parts) | Formula::Or(parts) => {
                for part in parts {
                    part.collect_free(bound, out);
                }
            }
            Formula::Not(inner) => inner.collect_free(bound, out),
            Formula::Forall(vars, inner) | Formula::Exists(vars, inner) => {
                let depth = bound.len();
                bound.extend(vars.iter().cloned());
                inner.collect_free(bound, out);
                bound.truncate(depth);
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(..) => true,
            Formula::And(parts) | Formula::Or(parts) => parts.iter().all(Formula::is_quantifier_free),
            Formula::Not(inner) => inner.is_quantifier_free(),
            Formula::Forall(..) | Formula::Exists(..) => false,
        }
    }

    pub fn atom_count(&self) -> usize {
        match self {
            Formula::True | Formula::False => 0,
            Formula::Atom(..) => 1,
            Formula::And(parts) | Formula::Or(parts) => parts.iter().map(Formula::atom_count).sum(),
            Formula::Not(inner) | Formula::Forall(_, inner) | Formula::Exists(_, inner) => inner.atom_count(),
        }
    }
}
