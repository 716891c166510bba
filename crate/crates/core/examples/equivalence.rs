//! Equivalent reparametrisations and an exact counterexample for a perturbed network.

use plnn::equivalence::{equivalent, gen_permuted, gen_scaled};
use plnn::{Network, Rat};

const NET: &str = include_str!("../fixtures/two_hidden.json");

fn main() -> plnn::Result<()> {
    let net: Network = serde_json::from_str(NET).expect("valid network");
    let scaled = gen_scaled(&net, 0, &[Rat::from_int(2), Rat::new(1, 3), Rat::from_int(5)])?;
    let moved = gen_permuted(&scaled, 0, &[2, 0, 1])?;
    println!(
        "rescaled and permuted: equivalent = {}",
        equivalent(&net, &moved)?.equivalent
    );

    let mut bumped = net.clone();
    bumped.layers[0].threshold[1] = Rat::new(1, 10);
    let verdict = equivalent(&net, &bumped)?;
    println!("threshold changed: equivalent = {}", verdict.equivalent);
    if let Some(x) = &verdict.witness {
        println!(
            "  at x = {x:?}: {:?} vs {:?}",
            net.forward_eval(x)?,
            bumped.forward_eval(x)?
        );
    }
    Ok(())
}
