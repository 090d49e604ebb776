//! Command-line front end. Exit codes: 0 ok, 1 usage, 2 data, 3 internal.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lc5w::container::{self, export::export_planes, DecisionMode, EncoderConfig};
use lc5w::report::{analyze_frame, format_analysis, RateReport};
use lc5w::resort::Thresholds;
use lc5w::volume::{generate_phantom, read_volume, write_volume, PhantomSpec, VolumeFormat};
use lc5w::{Error, Result};

#[derive(Parser)]
#[command(name = "lc5w", version, about = "Lossless 5/3 wavelet volume codec with highpass re-sorting")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Coding {
    /// Decision mode: none, lc or opt
    #[arg(long, default_value = "opt")]
    mode: DecisionMode,
    /// Motion compensation block size
    #[arg(long, default_value_t = 16)]
    bs: usize,
    /// Full-search range in pixels
    #[arg(long, default_value_t = 15)]
    search: u32,
    #[arg(long, default_value_t = 7)]
    levels_spatial: usize,
    #[arg(long, default_value_t = 1)]
    levels_temporal: usize,
    #[arg(long, default_value_t = 64)]
    cb_size: usize,
    /// Text file with lines like `HL1 = 0.5`
    #[arg(long)]
    thresholds: Option<PathBuf>,
}

impl Coding {
    fn config(&self) -> Result<EncoderConfig> {
        let thresholds = match &self.thresholds {
            Some(p) => Thresholds::parse(&fs::read_to_string(p)?)?,
            None => Thresholds::default(),
        };
        let c = EncoderConfig {
            block_size: self.bs,
            search_range: self.search,
            temporal_levels: self.levels_temporal,
            spatial_levels: self.levels_spatial,
            cb_size: self.cb_size,
            mode: self.mode,
            thresholds,
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Encode a volume into an LC5W container
    Encode {
        #[arg(long)]
        input: PathBuf,
        /// raw (16-bit LE + .hdr sidecar) or pgm (numbered stack)
        #[arg(long, default_value = "raw")]
        format: VolumeFormat,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        coding: Coding,
    },
    /// Decode a container back to a volume
    Decode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value = "raw")]
        format: VolumeFormat,
    },
    /// Compare HP rates without re-sorting, with OPT and with LC
    Report {
        #[arg(long, required_unless_present = "phantom", conflicts_with = "phantom")]
        input: Option<PathBuf>,
        /// e.g. blocky:64x64x8,bs=16,seed=0
        #[arg(long)]
        phantom: Option<PhantomSpec>,
        #[arg(long, default_value = "raw")]
        format: VolumeFormat,
        #[command(flatten)]
        coding: Coding,
    },
    /// Per-band quotient, threshold, rates and decisions of one HP frame
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "raw")]
        format: VolumeFormat,
        #[arg(long)]
        frame: usize,
        #[command(flatten)]
        coding: Coding,
    },
    /// Write a synthetic phantom volume
    Phantom {
        #[arg(long)]
        spec: PhantomSpec,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value = "raw")]
        format: VolumeFormat,
    },
    /// Export sorted and unsorted HP coefficient planes as 16-bit PGM
    Export {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "raw")]
        format: VolumeFormat,
        /// Output directory
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        coding: Coding,
    },
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Encode { input, format, output, coding } => {
            let config = coding.config()?;
            let v = read_volume(&input, format)?;
            let (bytes, s) = container::encode_with_stats(&v, &config)?;
            fs::write(&output, &bytes)?;
            println!(
                "{}x{}x{} -> {} bytes (hp payload {}, lp payload {}, motion {}, signaling {}, {} bands re-sorted)",
                v.width(),
                v.height(),
                v.frame_count(),
                s.total_bytes,
                s.hp_payload_bytes,
                s.lp_payload_bytes,
                s.motion_bytes,
                s.signaling_bytes,
                s.resorted_bands()
            );
        }
        Cmd::Decode { input, output, format } => {
            let v = container::decode(&fs::read(&input)?)?;
            write_volume(&v, &output, format)?;
            println!("decoded {}x{}x{}", v.width(), v.height(), v.frame_count());
        }
        Cmd::Report { input, phantom, format, coding } => {
            let config = coding.config()?;
            let v = match (input, phantom) {
                (Some(p), _) => read_volume(p, format)?,
                (None, Some(spec)) => generate_phantom(&spec)?,
                (None, None) => return Err(Error::InvalidParam("--input or --phantom is required".into())),
            };
            let r = RateReport::build(&v, &config)?;
            print!("{}", r.table());
            println!();
            print!("{}", r.key_values());
            if !r.dominance_holds() {
                return Err(Error::Internal("OPT payload exceeds LC or none".into()));
            }
        }
        Cmd::Analyze { input, format, frame, coding } => {
            let v = read_volume(&input, format)?;
            print!("{}", format_analysis(&analyze_frame(&v, &coding.config()?, frame)?));
        }
        Cmd::Phantom { spec, output, format } => {
            let v = generate_phantom(&spec)?;
            write_volume(&v, &output, format)?;
            println!("wrote {}x{}x{} phantom", v.width(), v.height(), v.frame_count());
        }
        Cmd::Export { input, format, output, coding } => {
            let v = read_volume(&input, format)?;
            let frames = export_planes(&v, &coding.config()?, &output)?;
            for f in &frames {
                println!("{} re-sorted bands -> {}", f.plan.resorted_count(), f.sorted.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
