//! Command-line front end. Exit codes: 0 success, 1 invalid input or
//! configuration, 2 failure while running.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{PipelineConfig, Settings};
use crate::corpus::clean_text;
use crate::error::{Error, Result};
use crate::kb::{build_kb, KbSources};
use crate::lexicon::{Dictionary, Language};
use crate::pipeline::{self as pl, CLEANED, TAGGED, TRANSFORMED};
use crate::rescue::RescueConfig;

#[derive(Debug, Parser)]
#[command(
    name = "moh",
    version,
    about = "Normalize Hindi-English code-switched text"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a knowledge base from pair, sentence and profanity files.
    BuildKb(BuildKbArgs),
    /// Clean a raw corpus into OUT/cleaned.csv.
    Clean(StageArgs),
    /// Tag (and rescue) OUT/cleaned.csv into OUT/tagged.jsonl.
    Tag(TagArgs),
    /// Transform OUT/tagged.jsonl into OUT/transformed.csv.
    Transform(StageArgs),
    /// Export feature matrices for OUT/transformed.csv.
    Featurize(StageArgs),
    /// Split, train and evaluate on OUT/transformed.csv.
    TrainEval(StageArgs),
    /// Print the transformed text for a sentence or a corpus.
    Simulate(SimulateArgs),
    /// Run every stage and write a manifest.
    Pipeline(StageArgs),
}

#[derive(Debug, Args)]
struct BuildKbArgs {
    #[arg(long = "pairs", value_name = "TSV")]
    pairs: Vec<PathBuf>,
    #[arg(long = "sentences", value_name = "TSV")]
    sentences: Vec<PathBuf>,
    #[arg(long)]
    profanity: Option<PathBuf>,
    #[arg(long)]
    en_dict: PathBuf,
    #[arg(long)]
    hi_dict: PathBuf,
    /// Output knowledge-base file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Default)]
struct Common {
    /// `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<String>,
    /// Stage input; defaults to the previous stage's file under --out.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    kb: Option<String>,
    #[arg(long)]
    en_dict: Option<String>,
    #[arg(long)]
    hi_dict: Option<String>,
    #[arg(long)]
    freq_en: Option<String>,
    #[arg(long)]
    freq_hi: Option<String>,
    #[arg(long)]
    profanity: Option<String>,
    #[arg(long)]
    rules: Option<String>,
    #[arg(long)]
    threshold: Option<String>,
    #[arg(long)]
    variant: Option<String>,
    /// Comma-separated list.
    #[arg(long)]
    scheme: Option<String>,
    /// Comma-separated list.
    #[arg(long)]
    classifier: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    test_fraction: Option<String>,
    #[arg(long)]
    text_column: Option<String>,
    #[arg(long)]
    label_column: Option<String>,
    #[arg(long)]
    id_column: Option<String>,
    #[arg(long)]
    delimiter: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Debug, Args)]
struct StageArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct TagArgs {
    #[command(flatten)]
    common: Common,
    /// Leave OOV tokens as they are.
    #[arg(long)]
    no_rescue: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    /// A single raw sentence.
    #[arg(long, conflicts_with = "corpus")]
    text: Option<String>,
}

impl Common {
    fn settings(&self) -> Result<PipelineConfig> {
        // Checked before any file is opened.
        if let Some(t) = &self.threshold {
            let t: f64 = t
                .parse()
                .map_err(|_| Error::Config(format!("bad value `{t}` for `threshold`")))?;
            RescueConfig::new(t)?;
        }
        let mut flags = Settings::default();
        let pairs = [
            ("corpus", &self.corpus),
            ("kb", &self.kb),
            ("en_dict", &self.en_dict),
            ("hi_dict", &self.hi_dict),
            ("freq_en", &self.freq_en),
            ("freq_hi", &self.freq_hi),
            ("profanity", &self.profanity),
            ("rules", &self.rules),
            ("threshold", &self.threshold),
            ("variant", &self.variant),
            ("scheme", &self.scheme),
            ("classifier", &self.classifier),
            ("seed", &self.seed),
            ("test_fraction", &self.test_fraction),
            ("text_column", &self.text_column),
            ("label_column", &self.label_column),
            ("id_column", &self.id_column),
            ("delimiter", &self.delimiter),
            ("out", &self.out),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                flags.set(k, v.clone());
            }
        }
        let base = match &self.config {
            Some(p) => Settings::from_file(p)?,
            None => Settings::default(),
        };
        PipelineConfig::from_settings(&base.merge(flags))
    }

    fn out_dir(cfg: &PipelineConfig) -> Result<PathBuf> {
        cfg.out
            .clone()
            .ok_or_else(|| Error::Config("`out` is required".into()))
    }

    fn input_or(&self, out: &Path, default: &str) -> Result<PathBuf> {
        let p = self.input.clone().unwrap_or_else(|| out.join(default));
        if !p.exists() {
            return Err(Error::Config(format!(
                "input {} does not exist",
                p.display()
            )));
        }
        Ok(p)
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::BuildKb(a) => {
            for p in a.pairs.iter().chain(&a.sentences).chain(&a.profanity) {
                if !p.exists() {
                    return Err(Error::Config(format!("{} does not exist", p.display())));
                }
            }
            let en = Dictionary::load(Language::English, &a.en_dict)?;
            let hi = Dictionary::load(Language::DevanagariHindi, &a.hi_dict)?;
            let sources = KbSources {
                pair_files: a.pairs,
                sentence_pair_files: a.sentences,
                profanity_file: a.profanity,
            };
            let (kb, report) = build_kb(&sources, &en, &hi)?;
            kb.save(&a.out)?;
            println!("{}", serde_json::to_string(&report)?);
            Ok(())
        }
        Command::Clean(a) => {
            let cfg = a.common.settings()?;
            cfg.require(&[("corpus", &cfg.corpus)])?;
            let out = Common::out_dir(&cfg)?;
            let summary = pl::stage_clean(&cfg, &out)?;
            eprintln!("{}", serde_json::to_string(&summary)?);
            Ok(())
        }
        Command::Tag(a) => {
            let cfg = a.common.settings()?;
            cfg.require(&[
                ("kb", &cfg.kb),
                ("en_dict", &cfg.en_dict),
                ("hi_dict", &cfg.hi_dict),
            ])?;
            let out = Common::out_dir(&cfg)?;
            let input = a.common.input_or(&out, CLEANED)?;
            let res = pl::load_resources(&cfg)?;
            pl::stage_tag(&cfg, &input, &out, &res, !a.no_rescue)?;
            Ok(())
        }
        Command::Transform(a) => {
            let cfg = a.common.settings()?;
            cfg.require(&[])?;
            let out = Common::out_dir(&cfg)?;
            let input = a.common.input_or(&out, TAGGED)?;
            pl::stage_transform(&cfg, &input, &out)?;
            Ok(())
        }
        Command::Featurize(a) => {
            let cfg = a.common.settings()?;
            let out = Common::out_dir(&cfg)?;
            let input = a.common.input_or(&out, TRANSFORMED)?;
            pl::stage_featurize(&cfg, &input, &out)
        }
        Command::TrainEval(a) => {
            let cfg = a.common.settings()?;
            let out = Common::out_dir(&cfg)?;
            let input = a.common.input_or(&out, TRANSFORMED)?;
            let reports = pl::stage_train_eval(&cfg, &input, &out)?;
            for r in &reports {
                println!(
                    "{}\t{}\tmacro-F1 {:.4}",
                    r.classifier, r.scheme, r.report.macro_avg.f1
                );
            }
            Ok(())
        }
        Command::Simulate(a) => {
            let cfg = a.common.settings()?;
            cfg.require(&[
                ("kb", &cfg.kb),
                ("en_dict", &cfg.en_dict),
                ("hi_dict", &cfg.hi_dict),
            ])?;
            let posts = match (&a.text, &cfg.corpus) {
                (Some(t), _) => vec![crate::corpus::Post::new("1", clean_text(t), None)],
                (None, Some(_)) => pl::clean_posts_from(&cfg)?.0,
                (None, None) => return Err(Error::Config("give --text or --corpus".into())),
            };
            let res = pl::load_resources(&cfg)?;
            let (tagged, _) = pl::rescue_posts(pl::tag_posts(&posts, &res), &res.kb, &cfg);
            let single = a.text.is_some();
            for (p, line) in tagged.iter().zip(pl::transform_posts(&tagged, &cfg)?) {
                if single {
                    println!("{}", line.text);
                } else {
                    println!("{}\t{}", p.id, line.text);
                }
            }
            Ok(())
        }
        Command::Pipeline(a) => {
            let cfg = a.common.settings()?;
            cfg.require(&[
                ("corpus", &cfg.corpus),
                ("kb", &cfg.kb),
                ("en_dict", &cfg.en_dict),
                ("hi_dict", &cfg.hi_dict),
            ])?;
            let out = Common::out_dir(&cfg)?;
            let manifest = pl::run_pipeline(&cfg, &out)?;
            eprintln!(
                "{} stages ok, {} artifacts in {}",
                manifest.stages.len(),
                manifest.artifacts.len(),
                out.display()
            );
            Ok(())
        }
    }
}
