//! Difference-of-envelopes form of a small autoencoder, pruned and unpruned.

use plnn::network::{decompose, piece_counts, DecomposeOptions};
use plnn::{Network, Rat};

const NET: &str = include_str!("../fixtures/autoencoder.json");

fn main() -> plnn::Result<()> {
    let net: Network = serde_json::from_str(NET).expect("valid network");
    let arch = net.architecture();
    println!(
        "architecture {arch}, index-set sizes {:?}",
        arch.index_set_sizes()
    );
    for (label, opts) in [
        ("pruned", DecomposeOptions::pruned()),
        ("unpruned", DecomposeOptions::unpruned()),
    ] {
        let pair = decompose(&net, &opts)?;
        let counts: Vec<_> = piece_counts(&pair).iter().map(|c| (c.pos, c.neg)).collect();
        println!("{label}: pieces per output (pos, neg) = {counts:?}");
        let x = vec![Rat::from_int(1), Rat::new(-1, 2), Rat::new(1, 7)];
        let diff: Vec<Rat> = pair
            .pos
            .eval(&x)?
            .iter()
            .zip(pair.neg.eval(&x)?)
            .map(|(p, n)| p - &n)
            .collect();
        assert_eq!(diff, net.forward_eval(&x)?);
    }
    let pair = decompose(&net, &DecomposeOptions::pruned())?;
    println!("first output, positive part: {:?}", pair.pos.get(0));
    println!("first output, negative part: {:?}", pair.neg.get(0));
    Ok(())
}
