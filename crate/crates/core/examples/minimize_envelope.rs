//! Redundant pieces and the canonical minimal representation.

use plnn::envelope::{is_redundant, minimize, relevant_indices};
use plnn::{Affine, PLFunc, Rat};

fn main() -> plnn::Result<()> {
    let slopes = [
        Rat::from_int(1),
        Rat::from_int(2),
        Rat::new(3, 2),
        Rat::from_int(3),
    ];
    for a in &slopes[2..] {
        let f = PLFunc::new(
            1,
            vec![
                Affine::new(vec![slopes[0].clone()], Rat::zero()),
                Affine::new(vec![slopes[1].clone()], Rat::zero()),
                Affine::new(vec![a.clone()], Rat::zero()),
            ],
        )?;
        println!("max{{x, 2x, {a}x}}: ax redundant = {}", is_redundant(&f, 2)?);
        println!(
            "  relevant indices {:?}, minimal {:?}",
            relevant_indices(&f),
            minimize(&f)
        );
    }

    let text = r#"{"dim": 2, "pieces": [
        {"coeffs": ["1", "0"], "constant": "0"},
        {"coeffs": ["0", "1"], "constant": "0"},
        {"coeffs": ["1/2", "1/2"], "constant": "-1"},
        {"coeffs": ["0", "0"], "constant": "0"}
    ]}"#;
    let g: PLFunc = serde_json::from_str(text).expect("valid envelope");
    println!("{g:?}\n  -> {:?}", minimize(&g));
    Ok(())
}
