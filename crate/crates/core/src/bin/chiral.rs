use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chiral_duality::charts::{ChartInvolution, Cohomology};
use chiral_duality::report::{
    characters, pairing_table, render_characters, render_cohomology, render_pairing_table, render_report, verify,
    Format, RunConfig, Suite,
};

#[derive(Parser)]
#[command(name = "chiral", about = "Exact checks for the chiral de Rham complex of the projective line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites; exit 1 if any check fails.
    Verify(Common),
    /// Table of h0, h1 by weight and fermion number.
    Characters(Common),
    /// Gram matrices of the cohomology pairing.
    PairingTable(Common),
    /// Cohomology dimensions with bases and representatives.
    Cohomology(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 3)]
    max_weight: i64,
    #[arg(long, default_value_t = 4)]
    degree_pad: i64,
    #[arg(long, default_value = "plain", value_parser = ["plain", "json", "csv"])]
    format: String,
    /// Comma-separated subset of algebra,module,fields,pairing,cohomology,sl2.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Allow max weight above the soft cap.
    #[arg(long)]
    force_large: bool,
    /// Write output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<RunConfig, String> {
        let suites: BTreeSet<Suite> = if self.suite.is_empty() {
            Suite::ALL.into_iter().collect()
        } else {
            self.suite.iter().map(|s| s.parse::<Suite>()).collect::<Result<_, _>>().map_err(|e| e.to_string())?
        };
        let config = RunConfig {
            max_weight: self.max_weight,
            degree_pad: self.degree_pad,
            format: self.format.parse::<Format>().map_err(|e| e.to_string())?,
            suites,
            seed: self.seed,
            force_large: self.force_large,
        };
        config.validate().map_err(|e| e.to_string())?;
        Ok(config)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Verify(c) | Command::Characters(c) | Command::PairingTable(c) | Command::Cohomology(c) => c,
    };
    let config = match common.config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cohomology = || {
        Cohomology::compute(ChartInvolution::shared(), config.max_weight, config.degree_pad)
            .expect("sigma preserves charge pieces")
    };
    let (text, ok) = match cli.command {
        Command::Verify(_) => {
            let report = verify(&config);
            (render_report(&report, config.format), report.passed)
        }
        Command::Characters(_) => {
            let h = cohomology();
            (render_characters(&characters(&h), config.format), h.duality_failures().is_empty())
        }
        Command::PairingTable(_) => {
            let blocks = pairing_table(&cohomology());
            let ok = blocks.iter().all(|b| b.rows == b.cols && b.rank == b.rows);
            (render_pairing_table(&blocks, config.format), ok)
        }
        Command::Cohomology(_) => {
            let h = cohomology();
            let ok = h.duality_failures().is_empty() && h.entries.iter().all(|e| e.stable);
            (render_cohomology(&h, config.format), ok)
        }
    };
    match &common_out(&text, common.out.as_ref()) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn common_out(text: &str, out: Option<&PathBuf>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
