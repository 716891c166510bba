//! Decision procedure for the grounded fragment the builders emit.
//!
//! A quantifier block whose body is quantifier-free and affine in the bound
//! variables is decided by linear programming over the branches of the
//! body's disjunctive normal form. An existential block that does not fit
//! (the weight-split variables of the equivalence formula) is resolved by
//! propagating linear equalities and branching on monomial equalities
//! `u·v = 0` until every bound variable has a value.

use super::poly::{Assignment, Poly};
use super::{Formula, Rel};
use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::lp::{feasible, StrictRow};

const MAX_BRANCHES: usize = 1 << 16;

/// Truth value of a sentence once `assignment` fixes every free variable.
pub fn eval_ground(f: &Formula, assignment: &Assignment) -> Result<bool> {
    if let Some(v) = f
        .free_variables()
        .into_iter()
        .find(|v| !assignment.contains_key(v))
    {
        return Err(Error::Unassigned(v));
    }
    eval(f, assignment)
}

fn eval(f: &Formula, env: &Assignment) -> Result<bool> {
    match f {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Atom(p, rel) => Ok(holds(&p.eval(env)?, *rel)),
        Formula::And(parts) => {
            for part in parts {
                if !eval(part, env)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Or(parts) => {
            for part in parts {
                if eval(part, env)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Not(inner) => Ok(!eval(inner, env)?),
        Formula::Forall(vars, body) => Ok(!exists(vars, &Formula::not((**body).clone()), env)?),
        Formula::Exists(vars, body) => exists(vars, body, env),
    }
}

fn holds(value: &Rat, rel: Rel) -> bool {
    match rel {
        Rel::Eq => value.is_zero(),
        Rel::Gt => value.is_positive(),
        Rel::Ge => !value.is_negative(),
    }
}

fn exists(vars: &[String], body: &Formula, env: &Assignment) -> Result<bool> {
    let mut env = env.clone();
    for v in vars {
        env.remove(v);
    }
    if body.is_quantifier_free() {
        if let Some(branches) = linear_dnf(&substitute(body, &env), vars)? {
            let dim = vars.len();
            return Ok(branches
                .iter()
                .any(|rows| feasible(dim, &rows.strict, &rows.nonstrict).is_feasible()));
        }
    }
    propagate(vars, body, env)
}

fn substitute(f: &Formula, env: &Assignment) -> Formula {
    match f {
        Formula::Atom(p, rel) => Formula::Atom(p.substitute(env), *rel),
        Formula::And(parts) => Formula::And(parts.iter().map(|p| substitute(p, env)).collect()),
        Formula::Or(parts) => Formula::Or(parts.iter().map(|p| substitute(p, env)).collect()),
        Formula::Not(inner) => Formula::not(substitute(inner, env)),
        other => other.clone(),
    }
}

#[derive(Clone, Default)]
struct Rows {
    strict: Vec<StrictRow>,
    nonstrict: Vec<StrictRow>,
}

/// A literal `p rel 0` with `p` affine in `vars`.
#[derive(Clone)]
enum Lit {
    Const(bool),
    Row(StrictRow, bool),
}

fn literal(p: &Poly, rel: Rel, vars: &[String]) -> Option<Vec<Vec<Lit>>> {
    let (coeffs, constant) = p.affine_in(vars)?;
    let normal = coeffs.iter().map(Poly::as_constant).collect::<Option<Vec<_>>>()?;
    let constant = constant.as_constant()?;
    if normal.iter().all(Rat::is_zero) {
        return Some(vec![vec![Lit::Const(holds(&constant, rel))]]);
    }
    // a·x + c  rel 0   ⟺   a·x  rel  −c
    let row = |n: Vec<Rat>, c: &Rat| StrictRow::new(n, -c);
    let neg: Vec<Rat> = normal.iter().map(|a| -a).collect();
    Some(match rel {
        Rel::Gt => vec![vec![Lit::Row(row(normal, &constant), true)]],
        Rel::Ge => vec![vec![Lit::Row(row(normal, &constant), false)]],
        Rel::Eq => vec![vec![
            Lit::Row(row(normal, &constant), false),
            Lit::Row(row(neg, &-&constant), false),
        ]],
    })
}

/// Disjunctive normal form of a quantifier-free formula as row systems, or
/// `None` if some atom is not affine in `vars` with constant coefficients.
fn linear_dnf(f: &Formula, vars: &[String]) -> Result<Option<Vec<Rows>>> {
    let Some(branches) = dnf(f, false, vars)? else {
        return Ok(None);
    };
    Ok(Some(
        branches
            .into_iter()
            .filter_map(|lits| {
                let mut rows = Rows::default();
                for lit in lits {
                    match lit {
                        Lit::Const(true) => {}
                        Lit::Const(false) => return None,
                        Lit::Row(r, true) => rows.strict.push(r),
                        Lit::Row(r, false) => rows.nonstrict.push(r),
                    }
                }
                Some(rows)
            })
            .collect(),
    ))
}

fn dnf(f: &Formula, negated: bool, vars: &[String]) -> Result<Option<Vec<Vec<Lit>>>> {
    Ok(match (f, negated) {
        (Formula::True, false) | (Formula::False, true) => Some(vec![vec![]]),
        (Formula::True, true) | (Formula::False, false) => Some(vec![]),
        (Formula::Atom(p, rel), false) => literal(p, *rel, vars),
        (Formula::Atom(p, Rel::Ge), true) => literal(&-p, Rel::Gt, vars),
        (Formula::Atom(p, Rel::Gt), true) => literal(&-p, Rel::Ge, vars),
        (Formula::Atom(p, Rel::Eq), true) => {
            let (Some(mut a), Some(b)) = (literal(p, Rel::Gt, vars), literal(&-p, Rel::Gt, vars)) else {
                return Ok(None);
            };
            a.extend(b);
            Some(a)
        }
        (Formula::Not(inner), _) => dnf(inner, !negated, vars)?,
        (Formula::And(parts), false) | (Formula::Or(parts), true) => {
            let mut acc: Vec<Vec<Lit>> = vec![vec![]];
            for part in parts {
                let Some(branches) = dnf(part, negated, vars)? else {
                    return Ok(None);
                };
                if acc.len().saturating_mul(branches.len()) > MAX_BRANCHES {
                    return Err(Error::Fragment(format!(
                        "disjunctive normal form exceeds {MAX_BRANCHES} branches"
                    )));
                }
                acc = acc
                    .iter()
                    .flat_map(|a| {
                        branches
                            .iter()
                            .map(move |b| a.iter().chain(b).map(Lit::clone).collect())
                    })
                    .collect();
            }
            Some(acc)
        }
        (Formula::Or(parts), false) | (Formula::And(parts), true) => {
            let mut acc = Vec::new();
            for part in parts {
                let Some(branches) = dnf(part, negated, vars)? else {
                    return Ok(None);
                };
                acc.extend(branches);
                if acc.len() > MAX_BRANCHES {
                    return Err(Error::Fragment(format!(
                        "disjunctive normal form exceeds {MAX_BRANCHES} branches"
                    )));
                }
            }
            Some(acc)
        }
        (Formula::Forall(..) | Formula::Exists(..), _) => {
            return Err(Error::Fragment("quantifier inside a quantifier-free body".into()))
        }
    })
}

fn flatten<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(parts) => parts.iter().for_each(|p| flatten(p, out)),
        other => out.push(other),
    }
}

/// `∃vars body` for a conjunctive body whose equalities pin the bound
/// variables down, up to a finite case split.
fn propagate(vars: &[String], body: &Formula, env: Assignment) -> Result<bool> {
    let mut conjuncts = Vec::new();
    flatten(body, &mut conjuncts);
    let (atoms, rest): (Vec<&Formula>, Vec<&Formula>) = conjuncts
        .into_iter()
        .partition(|f| matches!(f, Formula::Atom(..)));
    let atoms: Vec<(&Poly, Rel)> = atoms
        .into_iter()
        .map(|f| match f {
            Formula::Atom(p, rel) => (p, *rel),
            _ => unreachable!(),
        })
        .collect();
    search(vars, &atoms, &rest, env, 0)
}

fn search(
    vars: &[String],
    atoms: &[(&Poly, Rel)],
    rest: &[&Formula],
    mut env: Assignment,
    depth: usize,
) -> Result<bool> {
    if depth > 2 * vars.len() + 1 {
        return Err(Error::Fragment("existential search did not converge".into()));
    }
    'propagate: loop {
        for (p, rel) in atoms {
            let q = p.substitute(&env);
            if let Some(value) = q.as_constant() {
                if !holds(&value, *rel) {
                    return Ok(false);
                }
                continue;
            }
            if *rel == Rel::Eq && q.degree() == 1 {
                let unknowns = q.variables();
                if unknowns.len() == 1 {
                    let v = unknowns.into_iter().next().expect("one variable");
                    let (coeffs, constant) = q.affine_in(std::slice::from_ref(&v)).expect("degree one");
                    let a = coeffs[0].as_constant().expect("single variable");
                    let c = constant.as_constant().expect("single variable");
                    env.insert(v, -c / a);
                    continue 'propagate;
                }
            }
        }
        break;
    }
    for (p, rel) in atoms {
        let q = p.substitute(&env);
        if *rel != Rel::Eq || q.num_terms() != 1 || q.as_constant().is_some() {
            continue;
        }
        // c·Π v_i^e_i = 0: one of the factors vanishes.
        let (monomial, _) = q.terms().next().expect("one term");
        for (v, _) in monomial.powers() {
            let mut branch = env.clone();
            branch.insert(v.to_string(), Rat::zero());
            if search(vars, atoms, rest, branch, depth + 1)? {
                return Ok(true);
            }
        }
        return Ok(false);
    }
    if let Some(v) = vars.iter().find(|v| !env.contains_key(*v)) {
        return Err(Error::Fragment(format!(
            "existential variable `{v}` is not determined by the equality constraints"
        )));
    }
    for f in rest {
        if !eval(f, &env)? {
            return Ok(false);
        }
    }
    Ok(true)
}
