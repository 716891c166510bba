//! Whether a family of affine functions has a nonnegative maximum everywhere.

use plnn::envelope::covers_rn;
use plnn::{Affine, Rat};

fn main() -> plnn::Result<()> {
    for (c, d) in [(0, 1), (1, 1), (1, 0)] {
        let q = [
            Affine::new(vec![Rat::one(), Rat::one()], Rat::from_int(-c)),
            Affine::new(vec![-Rat::one(), -Rat::one()], Rat::from_int(d)),
        ];
        println!(
            "max{{x + y - {c}, -x - y + {d}}} >= 0 everywhere: {}",
            covers_rn(&q)?
        );
    }
    Ok(())
}
