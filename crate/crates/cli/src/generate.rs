use std::path::PathBuf;

use clap::ValueEnum;
use confex_core::synth::{generate, training_files, write_corpus, write_training, Profile};

use crate::config::Settings;
use crate::output::{usage, Outcome};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    /// 20 instances with decoys and non-standard paths.
    Default,
    /// 200 instances: the discovery benchmark.
    Discovery,
    /// Configuration files only, no decoys.
    Analysis,
}

#[derive(Debug, clap::Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "default")]
    preset: Preset,
    /// Overrides as `key=value,...` (instances, files, nonstandard, decoys, filtered, passive, inject).
    #[arg(long, default_value = "")]
    profile: String,
    /// Known-good training files written per configuration family (0 to skip).
    #[arg(long, default_value_t = 10)]
    training_per_family: usize,
    /// Output directory; must be empty or absent.
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: GenerateArgs, settings: &Settings) -> anyhow::Result<Outcome> {
    let base = match args.preset {
        Preset::Default => Profile::default(),
        Preset::Discovery => Profile::discovery(),
        Preset::Analysis => Profile::analysis(Profile::default().instances),
    };
    let profile = base.with_overrides(&args.profile).map_err(|e| usage(e.to_string()))?;
    if args.out.exists() && std::fs::read_dir(&args.out)?.next().is_some() {
        return Err(usage(format!("{} is not empty", args.out.display())));
    }

    let corpus = generate(args.seed, &profile, settings.exec());
    write_corpus(&corpus, &args.out)?;
    if args.training_per_family > 0 {
        write_training(
            &training_files(args.seed, args.training_per_family),
            &args.out.join("training"),
        )?;
    }
    let planted = corpus.manifest.planted().count();
    let injected = corpus
        .manifest
        .instances
        .iter()
        .filter(|i| i.injection.is_some())
        .count();
    println!(
        "generated {} instance(s) with {planted} planted file(s), {injected} injection(s) -> {}",
        corpus.snapshots.len(),
        args.out.display()
    );
    Ok(Outcome::Success)
}
