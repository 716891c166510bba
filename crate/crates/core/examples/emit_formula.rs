//! Semialgebraic membership conditions, decided exactly and printed as SMT-LIB.

use plnn::formula::{
    coverage_formula, emit_smtlib, equivalence_formula, eval_ground, redundancy_formula, Assignment,
    SymbolicPieces,
};
use plnn::network::DEFAULT_PIECE_CAP;
use plnn::{Architecture, Network, Rat};

fn main() -> plnn::Result<()> {
    let cover: SymbolicPieces =
        serde_json::from_str(include_str!("../fixtures/halfplanes.json")).expect("pieces");
    let f = coverage_formula(&cover)?;
    print!("{}", emit_smtlib(&f));
    for (c, d) in [(0, 1), (1, 0)] {
        let env: Assignment = [("c".into(), Rat::from_int(c)), ("d".into(), Rat::from_int(d))].into();
        println!("; c = {c}, d = {d}: {}", eval_ground(&f, &env)?);
    }

    let family: SymbolicPieces =
        serde_json::from_str(include_str!("../fixtures/three_lines_symbolic.json")).expect("pieces");
    let r = redundancy_formula(&family, 2)?;
    for a in [Rat::new(3, 2), Rat::from_int(3)] {
        let env: Assignment = [("a".into(), a.clone())].into();
        println!("; a = {a}: ax redundant = {}", eval_ground(&r, &env)?);
    }

    let relu: Network = serde_json::from_str(include_str!("../fixtures/relu.json")).expect("network");
    let arch: Architecture = "1,1".parse()?;
    let e = equivalence_formula(&arch, &relu.architecture(), Some(&relu), DEFAULT_PIECE_CAP)?;
    print!("{}", emit_smtlib(&e));
    Ok(())
}
