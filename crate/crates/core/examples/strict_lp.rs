//! Nonemptiness of open polyhedra, with an exact interior point.

use plnn::lp::{feasible, strict_feasible, StrictRow, StrictSystem};
use plnn::Rat;

fn row(a: &[i64], h: i64) -> StrictRow {
    StrictRow::new(a.iter().map(|&v| Rat::from_int(v)).collect(), Rat::from_int(h))
}

fn main() -> plnn::Result<()> {
    // x > 0, y > 0, x + y < 1
    let triangle = StrictSystem::new(2, vec![row(&[1, 0], 0), row(&[0, 1], 0), row(&[-1, -1], -1)])?;
    let outcome = strict_feasible(&triangle);
    println!("open triangle: {:?}", outcome.witness());

    // x > 1 and x < 1 has no solution; x ≥ 1 and x ≤ 1 does.
    let gap = StrictSystem::new(1, vec![row(&[1], 1), row(&[-1], -1)])?;
    println!("x > 1, x < 1 feasible: {}", strict_feasible(&gap).is_feasible());
    let point = feasible(1, &[], &[row(&[1], 1), row(&[-1], -1)]);
    println!("x >= 1, x <= 1: {:?}", point.witness());
    Ok(())
}
