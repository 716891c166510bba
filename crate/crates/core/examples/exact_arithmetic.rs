//! Exact rationals, their text form and the split `W = W₊ − W₋`.

use plnn::{Matrix, Rat};

fn main() -> plnn::Result<()> {
    let third: Rat = "1/3".parse()?;
    let sum = &third + &third + &third;
    println!("1/3 + 1/3 + 1/3 = {sum}");
    println!("0.1 parses as {}", "0.1".parse::<Rat>()?);
    println!(
        "json: {}",
        serde_json::to_string(&Rat::new(-7, 4)).expect("serialize")
    );

    let w = Matrix::from_rows(vec![
        vec![Rat::from_int(3), Rat::new(-1, 2)],
        vec![Rat::new(-4, 3), Rat::zero()],
    ])?;
    let (plus, minus) = w.split_pos_neg();
    println!("W  = {w:?}\nW+ = {plus:?}\nW- = {minus:?}");
    let x = vec![Rat::from_int(2), Rat::from_int(-6)];
    let lhs = w.matvec(&x)?;
    let rhs: Vec<Rat> = plus
        .matvec(&x)?
        .iter()
        .zip(minus.matvec(&x)?)
        .map(|(p, m)| p - &m)
        .collect();
    assert_eq!(lhs, rhs);
    println!("Wx = W+x - W-x = {lhs:?}");
    Ok(())
}
