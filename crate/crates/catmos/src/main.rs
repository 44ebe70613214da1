use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use catmos::codec::{self, CodecConfig, CodecId, SizeMode};
use catmos::harness::{
    decisions_csv, query_sizes_csv, reproduce_tables, run_experiment, static_var_csv, Scenario,
};
use catmos::netsim::Mode;
use catmos::query_model::serialize;
use catmos::static_vars;

/// Sensor-network energy optimization: in-network compression,
/// static-variable query substitution and base-station query merging.
#[derive(Parser)]
#[command(name = "catmos", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario in baseline, compress-only and catmos modes and
    /// write comparison and plot-data CSVs.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Overrides the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "catmos_out")]
        out: PathBuf,
    },
    /// Write the reference compression tables and their reproduction.
    Tables {
        #[arg(long, default_value = "catmos_out")]
        out: PathBuf,
    },
    /// Compress a file and print original bytes, compressed bytes and the
    /// compression factor.
    Compress {
        #[arg(long)]
        codec: String,
        #[arg(long = "in")]
        input: PathBuf,
        /// Size accounting: payload or self-contained.
        #[arg(long, default_value = "payload")]
        mode: String,
        #[arg(long, default_value_t = 64)]
        envelope_bytes: usize,
    },
    /// Print the base-station admission log for a scenario.
    MergeDemo {
        #[arg(long)]
        scenario: PathBuf,
        /// Also write the log as CSV into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            scenario,
            seed,
            out,
        } => cmd_run(&scenario, seed, &out),
        Command::Tables { out } => cmd_tables(&out),
        Command::Compress {
            codec,
            input,
            mode,
            envelope_bytes,
        } => cmd_compress(&codec, &input, &mode, envelope_bytes),
        Command::MergeDemo { scenario, out } => cmd_merge_demo(&scenario, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

type CliResult = Result<(), Box<dyn std::error::Error>>;

fn write(out_dir: &Path, name: &str, contents: &str) -> CliResult {
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    std::fs::write(&path, contents)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_run(scenario_path: &Path, seed: Option<u64>, out: &Path) -> CliResult {
    let mut scenario = Scenario::load(scenario_path)?;
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    let experiment = run_experiment(&scenario)?;

    for mode in Mode::ALL {
        let report = experiment.report(mode);
        write(
            out,
            &format!("ledger_{}.csv", mode.name()),
            &report.ledger.to_csv(),
        )?;
        write(
            out,
            &format!("bits_{}.csv", mode.name()),
            &report.bits_series_csv(),
        )?;
    }
    write(out, "comparison.csv", &experiment.comparison_csv())?;

    let codec_cfg = scenario.sim_config().codec_cfg;
    write(
        out,
        "fig4_query_sizes.csv",
        &query_sizes_csv(&scenario.queries, &codec_cfg)?,
    )?;
    let corpus: Vec<_> = scenario.queries.iter().map(serialize).collect();
    let dict = static_vars::build_dictionary(&corpus, scenario.static_max_entries)?;
    write(out, "static_vars.tsv", &dict.serialized())?;
    write(
        out,
        "fig5_static_vars.csv",
        &static_var_csv(&scenario.queries, &dict, &codec_cfg)?,
    )?;
    write(out, "fig6_energy_gain.csv", &experiment.energy_gain_csv())?;
    write(
        out,
        "decisions.csv",
        &decisions_csv(&experiment.catmos.decisions),
    )?;

    print!("{}", experiment.summary_text());
    Ok(())
}

fn cmd_tables(out: &Path) -> CliResult {
    let tables = reproduce_tables();
    write(out, "table1.csv", &tables.table1_csv())?;
    write(out, "table2.csv", &tables.table2_csv())?;
    write(out, "table3.csv", &tables.table3_csv())?;
    println!("reproduced 10 factor rows and 10 difference rows");
    Ok(())
}

fn cmd_compress(codec: &str, input: &Path, mode: &str, envelope_bytes: usize) -> CliResult {
    let codec = CodecId::from_name(codec)?;
    let cfg = CodecConfig {
        mode: SizeMode::from_name(mode)?,
        deflate_envelope_bytes: envelope_bytes,
    };
    let data = std::fs::read(input)?;
    let blob = codec::encode(codec, &data, &cfg)?;
    let factor = codec::compression_factor(data.len(), blob.total_bytes())?;
    println!("codec: {}", codec.name());
    println!("original_bytes: {}", data.len());
    println!("compressed_bytes: {}", blob.total_bytes());
    println!("factor: {factor:.6}");
    Ok(())
}

fn cmd_merge_demo(scenario_path: &Path, out: Option<&Path>) -> CliResult {
    let scenario = Scenario::load(scenario_path)?;
    let topo = scenario.topology()?;
    let report = catmos::netsim::run(&topo, &scenario.queries, &scenario.sim_config(), Mode::Catmos)?;
    let csv = decisions_csv(&report.decisions);
    print!("{csv}");
    if let Some(out) = out {
        write(out, "decisions.csv", &csv)?;
    }
    Ok(())
}
