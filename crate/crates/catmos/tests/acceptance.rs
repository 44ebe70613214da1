//! Acceptance suite: one test per criterion, each printing a PASS line.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use catmos::codec::{self, compression_factor, CodecConfig, CodecId};
use catmos::harness::{self, tables, Scenario};
use catmos::netsim::{self, Mode, SimConfig, Topology};
use catmos::qmerge::{self, QuerySetState, SyntheticQuery};
use catmos::query_model::{serialize, RangeQuery};
use catmos::static_vars;

fn table1_queries_with_lifetime(lifetime: u32) -> Vec<RangeQuery> {
    tables::table1_queries()
        .into_iter()
        .map(|mut q| {
            q.lifetime_epochs = lifetime;
            q
        })
        .collect()
}

#[test]
fn criterion_1_factor_table_reproduction() {
    let started = Instant::now();
    let reproduced = harness::reproduce_tables();
    let mut checked = 0;
    for (row, reference) in reproduced.factors.iter().zip(tables::TABLE2_REFERENCE) {
        for (computed, printed) in [
            (row.huffman, reference[0]),
            (row.lzw, reference[1]),
            (row.deflate, reference[2]),
        ] {
            let expected: f64 = printed.parse().unwrap();
            let tolerance = tables::printed_tolerance(printed);
            assert!(
                (computed - expected).abs() <= tolerance,
                "cell {computed} vs reference {printed} (tolerance {tolerance})"
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 30);
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("criterion 1 (factor-table reproduction, 30 cells): PASS in {elapsed:?}");
}

#[test]
fn criterion_2_difference_table_arithmetic() {
    let reproduced = harness::reproduce_tables();
    for (i, (row, reference)) in reproduced.diffs.iter().zip(tables::TABLE3).enumerate() {
        let huffman_expected: f64 = reference.huffman_diff.parse().unwrap();
        let lzw_expected: f64 = reference.lzw_diff.parse().unwrap();
        assert!(
            (row.huffman_diff - huffman_expected).abs() <= 1e-6,
            "row {i} huffman: {} vs {}",
            row.huffman_diff,
            huffman_expected
        );
        assert!(
            (row.lzw_diff - lzw_expected).abs() <= 1e-6,
            "row {i} lzw: {} vs {}",
            row.lzw_diff,
            lzw_expected
        );
    }
    // Spot values quoted directly from the reference.
    assert!((reproduced.diffs[0].huffman_diff - 9.246088).abs() <= 1e-6);
    assert!((reproduced.diffs[1].huffman_diff - 11.806543).abs() <= 1e-6);
    println!("criterion 2 (difference-table arithmetic, 10 rows x 2 codecs): PASS");
}

/// Minimal weighted code length over all full binary code trees, by
/// exhaustive merge enumeration. Total cost equals the sum of every
/// internal node's weight.
fn optimal_prefix_code_bits(weights: &[u64]) -> u64 {
    fn solve(weights: &[u64]) -> u64 {
        if weights.len() <= 1 {
            return 0;
        }
        let mut best = u64::MAX;
        for i in 0..weights.len() {
            for j in (i + 1)..weights.len() {
                let merged = weights[i] + weights[j];
                let mut rest: Vec<u64> = weights
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i && k != j)
                    .map(|(_, &w)| w)
                    .collect();
                rest.push(merged);
                best = best.min(merged + solve(&rest));
            }
        }
        best
    }
    solve(weights)
}

fn empirical_entropy(input: &[u8]) -> (f64, usize) {
    let mut freq = [0u64; 256];
    for &b in input {
        freq[b as usize] += 1;
    }
    let n = input.len() as f64;
    let distinct = freq.iter().filter(|&&f| f > 0).count();
    let h = freq
        .iter()
        .filter(|&&f| f > 0)
        .map(|&f| {
            let p = f as f64 / n;
            -p * p.log2()
        })
        .sum();
    (h, distinct)
}

fn random_input(rng: &mut ChaCha8Rng) -> Vec<u8> {
    // Log-uniform lengths span 1 B to 64 KiB.
    let exponent: f64 = rng.gen_range(0.0..1.0);
    let len = (65536f64.powf(exponent)).round().max(1.0) as usize;
    let alphabet: u16 = *[2u16, 4, 16, 256].get(rng.gen_range(0..4)).unwrap();
    let repetitive = rng.gen_range(0..4) == 0;
    if repetitive {
        let unit: Vec<u8> = (0..rng.gen_range(1..=16))
            .map(|_| rng.gen_range(0..alphabet) as u8)
            .collect();
        unit.iter().copied().cycle().take(len).collect()
    } else {
        (0..len).map(|_| rng.gen_range(0..alphabet) as u8).collect()
    }
}

#[test]
fn criterion_3_codec_property_suite() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0dec);
    let cfg = CodecConfig::default();

    let mut cases: Vec<Vec<u8>> = (0..990).map(|_| random_input(&mut rng)).collect();
    cases.push(vec![b'x'; 1]);
    cases.push(vec![0u8; 65536]);
    cases.push((0..65536u32).map(|i| (i % 251) as u8).collect());
    for _ in 0..7 {
        let mut big = vec![0u8; 65536];
        rng.fill(&mut big[..]);
        cases.push(big);
    }
    assert_eq!(cases.len(), 1000);

    for input in &cases {
        for codec in CodecId::ALL {
            let blob = codec::encode(codec, input, &cfg).unwrap();
            assert_eq!(
                &codec::decode(&blob).unwrap(),
                input,
                "{} round trip failed on {} bytes",
                codec.name(),
                input.len()
            );
            if codec == CodecId::Huffman {
                let (h, distinct) = empirical_entropy(input);
                let n = input.len() as f64;
                let bits = blob.payload_bits() as f64;
                if distinct == 1 {
                    assert_eq!(blob.payload_bits(), input.len());
                } else {
                    assert!(bits >= n * h - 1e-6 * n, "below entropy bound");
                    assert!(bits < n * (h + 1.0), "above entropy+1 bound");
                }
            }
        }
    }

    // Exhaustive optimality oracle on alphabets of at most 5 symbols.
    for _ in 0..200 {
        let k = rng.gen_range(2..=5usize);
        let weights: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=200u64)).collect();
        let mut input = Vec::new();
        for (sym, &w) in weights.iter().enumerate() {
            input.extend(std::iter::repeat_n(b'A' + sym as u8, w as usize));
        }
        let blob = codec::encode(CodecId::Huffman, &input, &cfg).unwrap();
        assert_eq!(
            blob.payload_bits() as u64,
            optimal_prefix_code_bits(&weights),
            "not optimal for weights {weights:?}"
        );
    }

    // The code that references the dictionary entry being defined.
    for len in [2usize, 3, 4, 5, 257, 1000] {
        let input = vec![b'Z'; len];
        let blob = codec::encode(CodecId::Lzw, &input, &cfg).unwrap();
        assert_eq!(codec::decode(&blob).unwrap(), input);
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!("criterion 3 (codec properties, 1000 cases x 3 codecs): PASS in {elapsed:?}");
}

#[test]
fn criterion_4_corpus_factor_ordering() {
    let queries = harness::generate_queries(100, 42);
    let cfg = CodecConfig::default();
    let mut factors: BTreeMap<CodecId, Vec<f64>> = BTreeMap::new();
    for q in &queries {
        let text = serialize(&q.clone());
        for codec in CodecId::ALL {
            let blob = codec::encode(codec, text.as_bytes(), &cfg).unwrap();
            factors
                .entry(codec)
                .or_default()
                .push(compression_factor(text.size_bytes(), blob.total_bytes()).unwrap());
        }
    }
    let mean = |codec: CodecId| -> f64 {
        let v = &factors[&codec];
        v.iter().sum::<f64>() / v.len() as f64
    };
    let (huffman, lzw, deflate) = (
        mean(CodecId::Huffman),
        mean(CodecId::Lzw),
        mean(CodecId::Deflate),
    );
    assert!(
        huffman < lzw,
        "huffman mean {huffman:.2}% not below lzw mean {lzw:.2}%"
    );
    assert!(
        deflate > 100.0,
        "deflate mean {deflate:.2}% does not show expansion"
    );
    println!(
        "criterion 4 (corpus factor ordering): PASS \
         (huffman {huffman:.2}% < lzw {lzw:.2}%, deflate {deflate:.2}% > 100%)"
    );
}

#[test]
fn criterion_5_static_variable_direction() {
    let queries = harness::generate_queries(100, 42);
    let corpus: Vec<_> = queries.iter().map(serialize).collect();
    let dict = static_vars::build_dictionary(&corpus, 32).unwrap();
    let cfg = CodecConfig::default();

    let mut with_bytes = 0usize;
    let mut without_bytes = 0usize;
    for text in &corpus {
        let substituted = static_vars::substitute(text, &dict);
        assert_eq!(
            &static_vars::restore(&substituted, &dict).unwrap(),
            text,
            "substitution round trip failed"
        );
        without_bytes += codec::encode(CodecId::Huffman, text.as_bytes(), &cfg)
            .unwrap()
            .total_bytes();
        with_bytes += codec::encode(CodecId::Huffman, &substituted, &cfg)
            .unwrap()
            .total_bytes();
    }
    assert!(
        with_bytes <= without_bytes,
        "substitution grew the corpus: {with_bytes} > {without_bytes}"
    );
    println!(
        "criterion 5 (static variables): PASS \
         (huffman total {with_bytes} B with vs {without_bytes} B without; 100 round trips)"
    );
}

fn pair_runs(
    topo: &Topology,
    cfg: &SimConfig,
    a: &RangeQuery,
    b: &RangeQuery,
) -> (Vec<qmerge::Reading>, Vec<qmerge::Reading>, Vec<qmerge::Reading>, Vec<qmerge::Reading>) {
    let direct_a = netsim::run(topo, std::slice::from_ref(a), cfg, Mode::Baseline).unwrap();
    let direct_b = netsim::run(topo, std::slice::from_ref(b), cfg, Mode::Baseline).unwrap();

    let synthetic = SyntheticQuery::from_query(1, a.clone(), 0);
    let merged = qmerge::merge(&synthetic, b, 0).unwrap();
    let mut state = QuerySetState::new();
    state.active.push(merged);
    let merged_run = netsim::run_merged_state(topo, state, cfg).unwrap();

    (
        direct_a.delivered[&a.id].clone(),
        direct_b.delivered[&b.id].clone(),
        merged_run.delivered[&a.id].clone(),
        merged_run.delivered[&b.id].clone(),
    )
}

#[test]
fn criterion_6_merge_soundness_oracle() {
    let started = Instant::now();
    let topo = Topology::balanced_tree(10, 2, 0).unwrap();
    let cfg = SimConfig::default();
    let queries = table1_queries_with_lifetime(50);
    let mut pairs = 0;
    for i in 0..queries.len() {
        for j in (i + 1)..queries.len() {
            let (direct_a, direct_b, merged_a, merged_b) =
                pair_runs(&topo, &cfg, &queries[i], &queries[j]);
            assert_eq!(
                direct_a, merged_a,
                "pair ({i},{j}): member {} results diverge",
                queries[i].id
            );
            assert_eq!(
                direct_b, merged_b,
                "pair ({i},{j}): member {} results diverge",
                queries[j].id
            );
            pairs += 1;
        }
    }
    assert_eq!(pairs, 45);
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!("criterion 6 (merge soundness, 45 pairs): PASS in {elapsed:?}");
}

#[test]
fn criterion_7_gain_predicts_expected_energy_sign() {
    let topo = Topology::balanced_tree(10, 2, 0).unwrap();
    let cfg = SimConfig::default();
    let cost = cfg.cost_model(&topo);
    let queries = table1_queries_with_lifetime(50);

    let mut agree = 0;
    let mut total = 0;
    for i in 0..queries.len() {
        for j in (i + 1)..queries.len() {
            let a = &queries[i];
            let b = &queries[j];
            let mut state = QuerySetState::new();
            state.active.push(SyntheticQuery::from_query(1, a.clone(), 0));
            let gain = qmerge::gain(&state, b, &cost);

            let merged = qmerge::merge(&state.active[0], b, 0).unwrap();
            let unmerged =
                netsim::expected_energy(&topo, &[a.clone(), b.clone()], &cost);
            let merged_energy =
                netsim::expected_energy(&topo, std::slice::from_ref(&merged.query), &cost);

            if (gain > 0.0) == (unmerged - merged_energy > 0.0) {
                agree += 1;
            }
            total += 1;
        }
    }
    assert_eq!(total, 45);
    let rate = agree as f64 / total as f64;
    assert!(
        rate >= 0.95,
        "sign agreement {agree}/{total} below 95%"
    );
    println!(
        "criterion 7 (gain vs expected-energy sign): PASS ({agree}/{total} agree)"
    );
}

#[test]
fn criterion_8_end_to_end_energy_reduction() {
    let mut reductions = Vec::new();
    for seed in 1..=10u64 {
        let scenario = Scenario {
            seed,
            ..Scenario::table1_default()
        };
        let experiment = harness::run_experiment(&scenario).unwrap();
        let baseline = experiment.baseline.total_j();
        let catmos = experiment.catmos.total_j();
        assert!(
            catmos < baseline,
            "seed {seed}: catmos {catmos} J not below baseline {baseline} J"
        );
        reductions.push(experiment.reduction_pct(Mode::Catmos));
    }
    let mean = reductions.iter().sum::<f64>() / reductions.len() as f64;
    assert!(mean >= 5.0, "mean reduction {mean:.2}% below 5%");
    println!(
        "criterion 8 (end-to-end reduction): PASS \
         (mean over seeds 1-10: {mean:.2}%; reference figure: {}%)",
        harness::REFERENCE_REDUCTION_PCT
    );
}

#[test]
fn criterion_9_cli_determinism() {
    use std::process::Command;

    let bin = env!("CARGO_BIN_EXE_catmos");
    let scenario = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/table1.scn");
    let work = tempfile::tempdir().unwrap();

    let run_cli = |args: &[&str]| -> (String, Vec<(String, Vec<u8>)>) {
        let out_dir = tempfile::tempdir_in(work.path()).unwrap();
        let mut full_args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let takes_out = matches!(args[0], "run" | "tables" | "merge-demo");
        if takes_out {
            full_args.push("--out".into());
            full_args.push(out_dir.path().to_string_lossy().into_owned());
        }
        let output = Command::new(bin).args(&full_args).output().unwrap();
        assert!(
            output.status.success(),
            "command {args:?} failed: {}",
            String::from_utf8_lossy(&output.stderr)
        );
        let mut files = Vec::new();
        if takes_out {
            let mut paths: Vec<_> = std::fs::read_dir(out_dir.path())
                .unwrap()
                .map(|e| e.unwrap().path())
                .collect();
            paths.sort();
            for path in paths {
                files.push((
                    path.file_name().unwrap().to_string_lossy().into_owned(),
                    std::fs::read(&path).unwrap(),
                ));
            }
            assert!(!files.is_empty(), "command {args:?} wrote no CSVs");
        }
        // Output paths differ per temp dir; compare only non-path lines.
        let stdout = String::from_utf8(output.stdout)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with("wrote "))
            .collect::<Vec<_>>()
            .join("\n");
        (stdout, files)
    };

    let input = work.path().join("query.txt");
    std::fs::write(&input, b"SELECT temp FROM sensors WHERE temp >= 10 AND temp <= 50 SAMPLE PERIOD 5 FOR 100 EPOCHS").unwrap();
    let input = input.to_string_lossy().into_owned();

    let commands: Vec<Vec<&str>> = vec![
        vec!["run", "--scenario", scenario, "--seed", "5"],
        vec!["tables"],
        vec!["merge-demo", "--scenario", scenario],
        vec!["compress", "--codec", "huffman", "--in", &input],
        vec!["compress", "--codec", "lzw", "--in", &input],
        vec!["compress", "--codec", "deflate", "--in", &input],
    ];
    for args in &commands {
        let first = run_cli(args);
        let second = run_cli(args);
        assert_eq!(first.0, second.0, "stdout differs for {args:?}");
        assert_eq!(
            first.1.len(),
            second.1.len(),
            "file sets differ for {args:?}"
        );
        for ((name_a, bytes_a), (name_b, bytes_b)) in first.1.iter().zip(&second.1) {
            assert_eq!(name_a, name_b);
            assert_eq!(bytes_a, bytes_b, "{name_a} differs between runs of {args:?}");
        }
    }
    println!("criterion 9 (CLI determinism): PASS ({} commands, byte-identical)", commands.len());
}
