//! Corner points of a one-dimensional envelope.

use plnn::envelope::{corners_1d, is_corner};
use plnn::{Affine, PLFunc, Rat};

fn main() -> plnn::Result<()> {
    let f = PLFunc::new(
        1,
        vec![
            Affine::new(vec![Rat::from_int(-1)], Rat::zero()),
            Affine::new(vec![Rat::zero()], Rat::one()),
            Affine::new(vec![Rat::from_int(2)], Rat::from_int(-3)),
            Affine::new(vec![Rat::new(1, 2)], Rat::zero()),
        ],
    )?;
    let corners = corners_1d(&f)?;
    println!("{f:?}");
    println!("corners: {corners:?}");
    for x in [Rat::from_int(-1), Rat::new(1, 2), Rat::from_int(2)] {
        println!("  is_corner({x}) = {}", is_corner(&f, std::slice::from_ref(&x))?);
    }
    Ok(())
}
