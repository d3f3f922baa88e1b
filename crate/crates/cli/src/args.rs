use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Parser)]
#[command(
    name = "crcconv",
    version,
    about = "Design and evaluate CRC-aided convolutional codes"
)]
pub struct Cli {
    /// Code configuration JSON: {k, m, nu, omega, gens_octal, crc_hex, mode}.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory. Without it, CSV goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for searches and simulations.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// DSO CRC search, one row per CRC degree.
    CrcSearch(CrcSearchArgs),
    /// Distance spectra B_d and C_d.
    Spectrum(SpectrumArgs),
    /// Monte Carlo decoding.
    Simulate(SimulateArgs),
    /// Union-type and saddlepoint bounds over an SNR grid.
    Bounds(BoundsArgs),
    /// Expected list rank models over a normalized-norm grid.
    Listrank(ListrankArgs),
    /// Complexity model rows, optionally joined with simulation counters.
    Complexity(ComplexityArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CrcSearch(_) => "crc_search",
            Command::Spectrum(_) => "spectrum",
            Command::Simulate(_) => "simulate",
            Command::Bounds(_) => "bounds",
            Command::Listrank(_) => "listrank",
            Command::Complexity(_) => "complexity",
        }
    }
}

/// Inline code flags; each overrides the matching field of `--config`.
#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct CodeArgs {
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub nu: Option<usize>,
    /// Octal generators, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub gens: Option<Vec<String>>,
    /// CRC polynomial in hex.
    #[arg(long)]
    pub crc: Option<String>,
    /// ZT or TB.
    #[arg(long)]
    pub mode: Option<String>,
    /// Octal digit order: low-first (default) or high-first.
    #[arg(long)]
    pub gen_order: Option<String>,
}

/// A list of reals: `a,b,c` or `start:stop:step` (inclusive).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number {t:?}: {e}"))
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.len() {
            1 => s
                .split(',')
                .map(num)
                .collect::<Result<Vec<_>, _>>()
                .map(Grid),
            3 => {
                let (a, b, h) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
                if h.is_nan() || h <= 0.0 || b < a {
                    return Err(format!("grid {s:?} needs start <= stop and step > 0"));
                }
                let count = ((b - a) / h + 1e-9).floor() as usize;
                Ok(Grid((0..=count).map(|i| a + i as f64 * h).collect()))
            }
            _ => Err(format!("grid {s:?} is neither a list nor start:stop:step")),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CrcSearchArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// CRC degrees to search, comma separated. Defaults to the code's m.
    #[arg(long, value_delimiter = ',')]
    pub m_values: Option<Vec<usize>>,
    /// Truncation distance; defaults to 2w*+1 per degree.
    #[arg(long)]
    pub dtilde: Option<u32>,
    /// IEE cache file, read if it matches and written otherwise.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumMethod {
    /// IEE reconstruction.
    Iee,
    /// Dynamic programming over (state, CRC remainder).
    Dp,
    /// Both, failing if they disagree.
    Both,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long, default_value_t = 16)]
    pub dtilde: u32,
    #[arg(long, value_enum, default_value_t = SpectrumMethod::Both)]
    pub method: SpectrumMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimModeArg {
    Channel,
    FixedNorm,
    Origin,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long, value_enum, default_value_t = SimModeArg::Channel)]
    pub sim_mode: SimModeArg,
    /// SNR grid in dB (channel mode).
    #[arg(long)]
    pub snr: Option<Grid>,
    /// Normalized noise norms (fixed-norm mode).
    #[arg(long)]
    pub eta: Option<Grid>,
    /// Maximum list size; defaults to 1024, or 10^6 (at most 2^{k+m}) for origin runs.
    #[arg(long)]
    pub psi: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub min_ue: u64,
    #[arg(long, default_value_t = 100_000_000)]
    pub max_trials: u64,
    #[arg(long, default_value_t = 4096)]
    pub batch: u64,
    /// Draw a random message per trial instead of the all-zero one.
    #[arg(long)]
    pub random_message: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long, default_value = "0:6:0.5")]
    pub snr: Grid,
    /// Truncation of the TUB and NACK estimates.
    #[arg(long, default_value_t = 24)]
    pub dtilde: u32,
    /// Spectrum length for the union column; defaults to 2·dtilde.
    #[arg(long)]
    pub union_dtilde: Option<u32>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ListrankArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Normalized norms η; defaults to 21 points over [0.5√n, 1.5√n].
    #[arg(long)]
    pub eta: Option<Grid>,
    /// Onion orders μ, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    pub mu: Vec<usize>,
    /// E[L | X = O]. Without it, it is simulated when --origin-trials > 0,
    /// and otherwise taken as 2^m for ZT codes.
    #[arg(long)]
    pub lbar: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub origin_trials: u64,
    /// Fixed-norm trials per η for the simulated and parametric columns; 0 skips them.
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// List cap for the simulations; defaults to 10^6 (at most 2^{k+m}).
    #[arg(long)]
    pub psi: Option<usize>,
    /// SNRs (dB) at which to integrate each rank table over the noise norm.
    #[arg(long)]
    pub snr: Option<Grid>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ComplexityArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Model-only row at this E[L].
    #[arg(long)]
    pub el: Option<f64>,
    /// E[I] for the model-only row; defaults to its bound.
    #[arg(long)]
    pub ei: Option<f64>,
    /// Simulate at these SNRs and join the measured counters.
    #[arg(long)]
    pub snr: Option<Grid>,
    #[arg(long, default_value_t = 1 << 14)]
    pub psi: usize,
    #[arg(long, default_value_t = 100)]
    pub min_ue: u64,
    #[arg(long, default_value_t = 100_000)]
    pub max_trials: u64,
    #[arg(long, default_value_t = crcconv::complexity::C1_DEFAULT)]
    pub c1: f64,
    #[arg(long, default_value_t = crcconv::complexity::C2_DEFAULT)]
    pub c2: f64,
    /// Memories for WAVA comparison rows, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub wava_nu: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub wava_iterations: u32,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn grids() {
        assert_eq!("1,2.5".parse::<Grid>().unwrap().0, vec![1.0, 2.5]);
        assert_eq!(
            "0:1:0.25".parse::<Grid>().unwrap().0,
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        assert_eq!("2:4:0.5".parse::<Grid>().unwrap().0.len(), 5);
        assert!("1:0:1".parse::<Grid>().is_err());
        assert!("a".parse::<Grid>().is_err());
    }
}
