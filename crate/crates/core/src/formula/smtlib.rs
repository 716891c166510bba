//! SMT-LIB 2 rendering.

use std::fmt::Write;

use super::poly::{Monomial, Poly};
use super::{Formula, Rel};
use crate::arith::Rat;

/// A complete script: logic, one `Real` declaration per free variable in
/// name order, the assertion and `(check-sat)`.
pub fn emit_smtlib(f: &Formula) -> String {
    let mut out = String::from("(set-logic NRA)\n");
    for v in f.free_variables() {
        writeln!(out, "(declare-fun {v} () Real)").expect("write to string");
    }
    out.push_str("(assert ");
    formula(f, &mut out);
    out.push_str(")\n(check-sat)\n");
    out
}

fn formula(f: &Formula, out: &mut String) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom(p, rel) => {
            let op = match rel {
                Rel::Eq => "=",
                Rel::Gt => ">",
                Rel::Ge => ">=",
            };
            write!(out, "({op} {} 0)", poly(p)).expect("write to string");
        }
        Formula::And(parts) | Formula::Or(parts) if parts.is_empty() => {
            out.push_str(if matches!(f, Formula::And(_)) {
                "true"
            } else {
                "false"
            });
        }
        Formula::And(parts) | Formula::Or(parts) if parts.len() == 1 => formula(&parts[0], out),
        Formula::And(parts) => nary("and", parts, out),
        Formula::Or(parts) => nary("or", parts, out),
        Formula::Not(inner) => {
            out.push_str("(not ");
            formula(inner, out);
            out.push(')');
        }
        Formula::Forall(vars, body) => quantifier("forall", vars, body, out),
        Formula::Exists(vars, body) => quantifier("exists", vars, body, out),
    }
}

fn nary(op: &str, parts: &[Formula], out: &mut String) {
    write!(out, "({op}").expect("write to string");
    for part in parts {
        out.push(' ');
        formula(part, out);
    }
    out.push(')');
}

fn quantifier(q: &str, vars: &[String], body: &Formula, out: &mut String) {
    write!(out, "({q} (").expect("write to string");
    let decls: Vec<String> = vars.iter().map(|v| format!("({v} Real)")).collect();
    out.push_str(&decls.join(" "));
    out.push_str(") ");
    formula(body, out);
    out.push(')');
}

fn rational(r: &Rat) -> String {
    let abs = r.abs();
    let text = if abs.is_integer() {
        abs.numer().to_string()
    } else {
        format!("(/ {} {})", abs.numer(), abs.denom())
    };
    if r.is_negative() {
        format!("(- {text})")
    } else {
        text
    }
}

/// `|c|·m` with the sign left to the caller.
fn term(m: &Monomial, c: &Rat) -> String {
    let mut factors: Vec<String> = Vec::new();
    if m.is_one() || c.abs() != Rat::one() {
        factors.push(rational(&c.abs()));
    }
    for (v, e) in m.powers() {
        factors.extend(std::iter::repeat_n(v.to_string(), e as usize));
    }
    if factors.len() == 1 {
        factors.pop().expect("one factor")
    } else {
        format!("(* {})", factors.join(" "))
    }
}

/// Positive terms first, then `(- pos neg1 neg2 …)`.
fn poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let (pos, neg): (Vec<_>, Vec<_>) = p.terms().partition(|(_, c)| c.is_positive());
    let pos: Vec<String> = pos.iter().map(|(m, c)| term(m, c)).collect();
    let neg: Vec<String> = neg.iter().map(|(m, c)| term(m, c)).collect();
    let sum = |ts: &[String]| match ts {
        [one] => one.clone(),
        many => format!("(+ {})", many.join(" ")),
    };
    match (pos.is_empty(), neg.is_empty()) {
        (false, true) => sum(&pos),
        (true, false) => format!("(- {})", sum(&neg)),
        _ => format!("(- {} {})", sum(&pos), neg.join(" ")),
    }
}
