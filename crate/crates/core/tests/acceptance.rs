//! The ten acceptance criteria. Each prints one PASS or FAIL line; the
//! process exits nonzero if any fails.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use common::{decisive_points_1d, eval_max, forward, grid_redundant_1d};
use plnn::envelope::{covers_rn, is_redundant, minimize, relevant_indices};
use plnn::equivalence::{equivalent, gen_permuted, gen_scaled};
use plnn::formula::{
    concretize, coverage_formula, equivalence_formula, eval_ground, network_assignment, redundancy_formula,
    stratum_formula, symbolic_decompose, Assignment, Poly, SymbolicAffine, SymbolicPieces,
};
use plnn::network::{decompose, piece_counts, DecomposeOptions, DEFAULT_PIECE_CAP};
use plnn::{sample, Affine, Architecture, Network, PLFunc, Rat};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x7a0c;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ criterion)
}

fn ri(n: i64) -> Rat {
    Rat::from_int(n)
}

fn line(a: i64, b: Rat) -> Affine {
    Affine::new(vec![ri(a)], b)
}

fn c1_coverage() -> Check {
    let mut rng = rng(1);
    let mut pairs: Vec<(Rat, Rat)> = (0..50)
        .map(|_| (sample::rat(&mut rng, 9, 5), sample::rat(&mut rng, 9, 5)))
        .collect();
    pairs.push((Rat::new(3, 7), Rat::new(3, 7)));
    let mut covered = 0;
    for (c, d) in &pairs {
        let q = [
            Affine::new(vec![ri(1), ri(1)], -c.clone()),
            Affine::new(vec![ri(-1), ri(-1)], d.clone()),
        ];
        let got = covers_rn(&q).map_err(|e| e.to_string())?;
        ensure(got == (d >= c), || format!("c = {c}, d = {d}: covers = {got}"))?;
        covered += got as usize;
    }
    Ok(format!("{} pairs incl. d = c, {covered} covering", pairs.len()))
}

fn c2_example_redundancy() -> Check {
    let with_a = |a: Rat| {
        PLFunc::new(
            1,
            vec![line(1, ri(0)), line(2, ri(0)), Affine::new(vec![a], ri(0))],
        )
    };
    for (a, expected) in [
        (Rat::new(5, 4), true),
        (Rat::new(3, 2), true),
        (Rat::new(7, 4), true),
        (Rat::new(1, 2), false),
        (ri(3), false),
        (ri(-1), false),
    ] {
        let f = with_a(a.clone()).map_err(|e| e.to_string())?;
        ensure(f.len() == 3, || format!("a = {a}: expected three pieces"))?;
        let j = f
            .pieces()
            .iter()
            .position(|p| p.coeffs[0] == a)
            .expect("piece ax");
        let got = is_redundant(&f, j).map_err(|e| e.to_string())?;
        ensure(got == expected, || format!("a = {a}: redundant = {got}"))?;
    }
    for a in [ri(1), ri(2)] {
        let f = with_a(a.clone()).map_err(|e| e.to_string())?;
        ensure(f.len() == 2, || format!("a = {a} should collapse to two pieces"))?;
    }
    Ok("6 values of a; a in {1, 2} collapse to two pieces".into())
}

fn c3_soundness() -> Check {
    let mut rng = rng(3);
    let mut checked = 0;
    for _ in 0..50 {
        let arch = sample::architecture(&mut rng, 3, 3, 3);
        let net = sample::network(&mut rng, &arch);
        let pruned = decompose(&net, &DecomposeOptions::pruned()).map_err(|e| e.to_string())?;
        let full = decompose(&net, &DecomposeOptions::unpruned()).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let x = sample::point(&mut rng, arch.input_dim);
            let y = net.forward_eval(&x).map_err(|e| e.to_string())?;
            ensure(y == forward(&net, &x), || {
                format!("forward_eval disagrees with oracle on {arch}")
            })?;
            for pair in [&pruned, &full] {
                let pos = pair.pos.eval(&x).map_err(|e| e.to_string())?;
                let neg = pair.neg.eval(&x).map_err(|e| e.to_string())?;
                let diff: Vec<Rat> = pos.iter().zip(&neg).map(|(p, n)| p - n).collect();
                ensure(diff == y, || format!("pos - neg != forward on {arch}"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("50 networks, {checked} points, pruned and unpruned"))
}

/// Intersection points of pairs of crossing lines `p_i = p_j` in the plane.
fn vertices_2d(pieces: &[Affine]) -> Vec<Vec<Rat>> {
    let mut lines = Vec::new();
    for (i, p) in pieces.iter().enumerate() {
        for q in &pieces[i + 1..] {
            lines.push(p.sub(q));
        }
    }
    let mut out = Vec::new();
    for (i, l) in lines.iter().enumerate() {
        for m in &lines[i + 1..] {
            let det = &l.coeffs[0] * &m.coeffs[1] - &l.coeffs[1] * &m.coeffs[0];
            if det.is_zero() {
                continue;
            }
            // l.c·x + l0 = 0, m.c·x + m0 = 0.
            let x = (&l.coeffs[1] * &m.constant - &m.coeffs[1] * &l.constant) / det.clone();
            let y = (&m.coeffs[0] * &l.constant - &l.coeffs[0] * &m.constant) / det;
            out.push(vec![x, y]);
        }
    }
    out
}

fn c4_canonicality() -> Check {
    let mut rng = rng(4);
    let mut points = 0;
    for k in 0..100 {
        let dim = 1 + k % 2;
        let f = sample::plfunc(&mut rng, dim, 6);
        let m = minimize(&f);
        ensure(minimize(&m) == m, || format!("not idempotent on {f:?}"))?;
        let mut shuffled = f.pieces().to_vec();
        shuffled.shuffle(&mut rng);
        let g = PLFunc::new(dim, shuffled).map_err(|e| e.to_string())?;
        ensure(minimize(&g) == m, || format!("order dependent on {f:?}"))?;
        let mut xs: Vec<Vec<Rat>> = Vec::new();
        if dim == 1 {
            xs.extend((-10..=10).map(|i| vec![Rat::new(i, 2)]));
            xs.extend(decisive_points_1d(f.pieces()).into_iter().map(|x| vec![x]));
        } else {
            for i in -10..=10 {
                for j in -10..=10 {
                    xs.push(vec![Rat::new(i, 2), Rat::new(j, 3)]);
                }
            }
            xs.extend(vertices_2d(f.pieces()));
        }
        for x in &xs {
            ensure(eval_max(f.pieces(), x) == eval_max(m.pieces(), x), || {
                format!("value changed at {x:?}")
            })?;
        }
        points += xs.len();
    }
    Ok(format!("100 envelopes, {points} evaluation points"))
}

fn c5_redundancy_oracle() -> Check {
    let mut rng = rng(5);
    let (mut pieces, mut redundant) = (0, 0);
    let mut drawn = 0;
    while drawn < 100 {
        let f = sample::plfunc(&mut rng, 1, 6);
        if f.len() < 2 {
            continue;
        }
        drawn += 1;
        for j in 0..f.len() {
            let got = is_redundant(&f, j).map_err(|e| e.to_string())?;
            let oracle = grid_redundant_1d(&f, j);
            ensure(got == oracle, || {
                format!("piece {j} of {f:?}: lp {got}, grid {oracle}")
            })?;
            pieces += 1;
            redundant += got as usize;
        }
    }
    Ok(format!("100 envelopes, {pieces} pieces, {redundant} redundant"))
}

fn nonzero_single_layer(rng: &mut ChaCha8Rng, arch: &Architecture) -> Network {
    loop {
        let net = sample::network(rng, arch);
        let l = &net.layers[0];
        if (0..l.outputs()).all(|i| (0..l.inputs()).any(|j| !l.weights.get(i, j).is_zero())) {
            return net;
        }
    }
}

fn c6_rigidity() -> Check {
    let mut rng = rng(6);
    let mut same = 0;
    for k in 0..50 {
        let arch =
            Architecture::new(rng.gen_range(1..=3), vec![rng.gen_range(1..=3)]).map_err(|e| e.to_string())?;
        let n1 = nonzero_single_layer(&mut rng, &arch);
        let n2 = match k % 3 {
            0 => n1.clone(),
            1 => {
                let mut n = n1.clone();
                let l = &mut n.layers[0];
                let i = rng.gen_range(0..l.outputs());
                match rng.gen_range(0..2) {
                    0 => l.bias[i] = &l.bias[i] + &sample::positive_rat(&mut rng, 3, 2),
                    _ => l.threshold[i] = &l.threshold[i] - &sample::positive_rat(&mut rng, 3, 2),
                }
                n
            }
            _ => nonzero_single_layer(&mut rng, &arch),
        };
        let got = equivalent(&n1, &n2).map_err(|e| e.to_string())?.equivalent;
        ensure(got == (n1 == n2), || {
            format!("pair {k}: equivalent = {got}, identical = {}", n1 == n2)
        })?;
        same += got as usize;
    }
    Ok(format!("50 pairs, {same} identical"))
}

fn transform(rng: &mut ChaCha8Rng, net: &Network) -> Network {
    let mut out = net.clone();
    for _ in 0..rng.gen_range(1..=3) {
        let layer = rng.gen_range(0..out.depth() - 1);
        let width = out.layers[layer].outputs();
        out = if rng.gen_bool(0.5) {
            gen_permuted(&out, layer, &sample::permutation(rng, width)).expect("hidden layer")
        } else {
            gen_scaled(&out, layer, &sample::scales(rng, width)).expect("hidden layer")
        };
    }
    out
}

fn perturb(rng: &mut ChaCha8Rng, net: &Network) -> Network {
    let mut out = net.clone();
    let layer = &mut out.layers[rng.gen_range(0..net.depth())];
    let i = rng.gen_range(0..layer.outputs());
    let delta = sample::positive_rat(rng, 3, 2);
    match rng.gen_range(0..3) {
        0 => {
            let j = rng.gen_range(0..layer.inputs());
            let w = layer.weights.get(i, j) + &delta;
            layer.weights.set(i, j, w);
        }
        1 => layer.bias[i] = &layer.bias[i] + &delta,
        _ => layer.threshold[i] = &layer.threshold[i] + &delta,
    }
    out
}

fn c7_generators() -> Check {
    let mut rng = rng(7);
    let mut nets = Vec::new();
    while nets.len() < 30 {
        let arch = sample::architecture(&mut rng, 2, 3, 3);
        if arch.widths.len() >= 2 {
            nets.push(sample::network(&mut rng, &arch));
        }
    }
    for (k, net) in nets.iter().enumerate() {
        let moved = transform(&mut rng, net);
        for _ in 0..500 {
            let x = sample::point(&mut rng, net.input_dim());
            ensure(forward(net, &x) == forward(&moved, &x), || {
                format!("network {k}: oracle found a difference")
            })?;
        }
        let v = equivalent(net, &moved).map_err(|e| e.to_string())?;
        ensure(v.equivalent, || {
            format!("network {k}: transform judged inequivalent")
        })?;
    }
    let (mut perturbed, mut invisible) = (0, 0);
    for (k, net) in nets.iter().enumerate() {
        // Keep drawing until the oracle itself sees the change.
        let (moved, x0) = loop {
            let moved = perturb(&mut rng, net);
            let hit = (0..500)
                .map(|_| sample::point(&mut rng, net.input_dim()))
                .find(|x| forward(net, x) != forward(&moved, x));
            match hit {
                Some(x) => break (moved, x),
                None => invisible += 1,
            }
        };
        let v = equivalent(net, &moved).map_err(|e| e.to_string())?;
        ensure(!v.equivalent, || {
            format!("perturbation {k} (differs at {x0:?}) judged equivalent")
        })?;
        let w = v.witness.ok_or_else(|| format!("perturbation {k}: no witness"))?;
        ensure(forward(net, &w) != forward(&moved, &w), || {
            format!("perturbation {k}: witness does not separate")
        })?;
        perturbed += 1;
    }
    Ok(format!(
        "30 transformed networks x 500 points; {perturbed} perturbations with verified witnesses ({invisible} redrawn)"
    ))
}

fn c8_architecture_invariance() -> Check {
    let mut rng = rng(8);
    let archs = ["1,2,1", "2,2,2", "3,2,3", "2,3,1", "1,1,1,1", "2,2,1,1"];
    let mut report = Vec::new();
    for text in archs {
        let arch: Architecture = text.parse().map_err(|e: plnn::Error| e.to_string())?;
        let sizes = arch.index_set_sizes();
        let families = symbolic_decompose(&arch, "", DEFAULT_PIECE_CAP).map_err(|e| e.to_string())?;
        let mut seen = None;
        let mut distinct = std::collections::BTreeSet::new();
        for _ in 0..10 {
            let net = sample::network(&mut rng, &arch);
            let env = network_assignment(&net, "");
            let full = decompose(&net, &DecomposeOptions::unpruned()).map_err(|e| e.to_string())?;
            let mut counts = Vec::new();
            for (o, fam) in families.iter().enumerate() {
                let pos = concretize(&fam.pos, &env).ok_or("unassigned parameter")?;
                let neg = concretize(&fam.neg, &env).ok_or("unassigned parameter")?;
                let as_set = |v: Vec<Affine>| PLFunc::new(arch.input_dim, v).map(|f| f.sorted());
                ensure(
                    as_set(pos.clone()).ok() == Some(full.pos.get(o).sorted())
                        && as_set(neg.clone()).ok() == Some(full.neg.get(o).sorted()),
                    || format!("{text}: indexed family disagrees with decomposition"),
                )?;
                counts.push((pos.len() as u64, neg.len() as u64));
            }
            ensure(counts.iter().all(|&c| c == sizes), || {
                format!("{text}: counts {counts:?} vs {sizes:?}")
            })?;
            match &seen {
                None => seen = Some(counts),
                Some(prev) => ensure(prev == &counts, || format!("{text}: counts changed across draws"))?,
            }
            distinct.extend(piece_counts(&full).iter().map(|c| (c.pos, c.neg)));
        }
        report.push(format!(
            "{text}->{sizes:?} (distinct after dedup: {})",
            distinct.len()
        ));
    }
    Ok(format!("10 draws each: {}", report.join(", ")))
}

fn parametric(f: &PLFunc) -> (SymbolicPieces, Assignment) {
    let mut env = Assignment::new();
    let pieces = f
        .pieces()
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let coeffs = a
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    env.insert(format!("a{k}_{i}"), c.clone());
                    Poly::var(&format!("a{k}_{i}"))
                })
                .collect();
            env.insert(format!("c{k}"), a.constant.clone());
            SymbolicAffine::new(coeffs, Poly::var(&format!("c{k}")))
        })
        .collect();
    (SymbolicPieces::new(f.dim(), pieces), env)
}

fn c9_formulas() -> Check {
    let mut rng = rng(9);
    let e = |e: plnn::Error| e.to_string();
    let (mut cov, mut red, mut strat, mut eqv) = (0, 0, 0, 0);
    for k in 0..40 {
        let f = sample::plfunc(&mut rng, 1 + k % 2, 4);
        let (sym, env) = parametric(&f);
        let got = eval_ground(&coverage_formula(&sym).map_err(e)?, &env).map_err(e)?;
        ensure(got == covers_rn(f.pieces()).map_err(e)?, || {
            format!("coverage disagrees on {f:?}")
        })?;
        cov += 1;
        if f.len() > 1 {
            for j in 0..f.len() {
                let got = eval_ground(&redundancy_formula(&sym, j).map_err(e)?, &env).map_err(e)?;
                ensure(got == is_redundant(&f, j).map_err(e)?, || {
                    format!("redundancy {j} disagrees on {f:?}")
                })?;
                red += 1;
            }
        }
        let relevant = relevant_indices(&f);
        let mut wrong = relevant.clone();
        if wrong.len() == f.len() {
            wrong.pop();
        } else {
            wrong = (0..f.len()).collect();
        }
        for (set, expected) in [(&relevant, true), (&wrong, false)] {
            let got = eval_ground(&stratum_formula(&sym, set).map_err(e)?, &env).map_err(e)?;
            ensure(got == expected, || format!("stratum {set:?} on {f:?}: {got}"))?;
            strat += 1;
        }
    }
    for k in 0..20 {
        let arch = Architecture::new(1, vec![1 + k % 2, 1]).map_err(e)?;
        let n0 = sample::network(&mut rng, &arch);
        let n = if k % 2 == 0 {
            gen_scaled(&n0, 0, &sample::scales(&mut rng, arch.widths[0])).map_err(e)?
        } else {
            sample::network(&mut rng, &arch)
        };
        let formula = equivalence_formula(&arch, &arch, Some(&n0), DEFAULT_PIECE_CAP).map_err(e)?;
        let mut env = network_assignment(&n, "");
        env.retain(|name, _| !name.contains("plus") && !name.contains("minus"));
        let got = eval_ground(&formula, &env).map_err(e)?;
        let expected = equivalent(&n, &n0).map_err(e)?.equivalent;
        ensure(got == expected, || {
            format!("equivalence instance {k}: formula {got}, checker {expected}")
        })?;
        eqv += 1;
    }
    let total = cov + red + strat + eqv;
    ensure(total >= 100, || format!("only {total} instances"))?;
    Ok(format!(
        "{total} instances: {cov} coverage, {red} redundancy, {strat} stratum, {eqv} equivalence"
    ))
}

fn c10_determinism() -> Check {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/");
    let commands: Vec<Vec<String>> = vec![
        vec!["minimize".into(), format!("{dir}three_lines_shuffled.json")],
        vec!["emit".into(), "coverage".into(), format!("{dir}halfplanes.json")],
        vec![
            "emit".into(),
            "redundancy".into(),
            format!("{dir}three_lines_symbolic.json"),
            "--index".into(),
            "2".into(),
        ],
        vec![
            "emit".into(),
            "equivalence".into(),
            "--arch1".into(),
            "1,2,1".into(),
        ],
    ];
    for args in &commands {
        let outputs: Vec<Vec<u8>> = (0..3)
            .map(|_| {
                let out = Command::new(env!("CARGO_BIN_EXE_plnn"))
                    .args(args)
                    .output()
                    .expect("binary runs");
                assert_eq!(out.status.code(), Some(0), "{args:?}");
                out.stdout
            })
            .collect();
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), || {
            format!("{args:?} output differs")
        })?;
    }
    Ok(format!("{} commands x 3 runs byte-identical", commands.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("coverage of two half-planes", Duration::from_secs(1), c1_coverage),
        (
            "redundancy in max{x, 2x, ax}",
            Duration::from_secs(1),
            c2_example_redundancy,
        ),
        ("decomposition soundness", Duration::from_secs(30), c3_soundness),
        (
            "canonical minimal representation",
            Duration::from_secs(60),
            c4_canonicality,
        ),
        (
            "redundancy vs drop-one oracle",
            Duration::from_secs(60),
            c5_redundancy_oracle,
        ),
        ("single-layer rigidity", Duration::from_secs(10), c6_rigidity),
        (
            "equivalence-class generators",
            Duration::from_secs(120),
            c7_generators,
        ),
        (
            "architecture invariance of index sets",
            Duration::from_secs(10),
            c8_architecture_invariance,
        ),
        ("formulas vs algorithms", Duration::from_secs(120), c9_formulas),
        (
            "deterministic CLI output",
            Duration::from_secs(5),
            c10_determinism,
        ),
    ];
    let mut failed = 0;
    for (n, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if elapsed < limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; took {elapsed:.2?}, limit {limit:?}")),
            Err(d) => ("FAIL", d),
        };
        failed += (status == "FAIL") as usize;
        println!(
            "{status} criterion {}: {name}: {detail} [{elapsed:.2?} < {limit:?}]",
            n + 1
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
