//! Run configuration: a `key = value` file merged with command-line
//! overrides.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::classify::{ClassifierKind, LogRegConfig};
use crate::corpus::CorpusSchema;
use crate::error::{Error, Result};
use crate::features::{FeatureConfig, Scheme};
use crate::rescue::{RescueConfig, DEFAULT_THRESHOLD};
use crate::translit::TransformVariant;

const PATH_KEYS: &[&str] = &[
    "corpus",
    "kb",
    "en_dict",
    "hi_dict",
    "freq_en",
    "freq_hi",
    "profanity",
    "rules",
    "out",
    "input",
];

const KNOWN_KEYS: &[&str] = &[
    "corpus",
    "kb",
    "en_dict",
    "hi_dict",
    "freq_en",
    "freq_hi",
    "profanity",
    "rules",
    "out",
    "input",
    "threshold",
    "variant",
    "scheme",
    "classifier",
    "seed",
    "test_fraction",
    "stratified",
    "text_column",
    "label_column",
    "id_column",
    "delimiter",
    "word_ngram",
    "char_ngram",
    "min_df",
    "alpha",
    "l2",
    "epochs",
    "lr",
    "suggest_distance",
];

/// Raw settings before validation. Keys use underscores; dashes are
/// accepted and converted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Settings(BTreeMap<String, String>);

fn canonical_key(k: &str) -> String {
    k.trim().replace('-', "_")
}

impl Settings {
    /// Parses a config file. Relative paths are resolved against the file's
    /// directory.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "{}:{}: expected `key = value`",
                    path.display(),
                    i + 1
                ))
            })?;
            let key = canonical_key(k);
            let mut value = v.trim().to_string();
            if PATH_KEYS.contains(&key.as_str()) && Path::new(&value).is_relative() {
                value = base.join(&value).to_string_lossy().into_owned();
            }
            map.insert(key, value);
        }
        let settings = Settings(map);
        settings.check_keys()?;
        Ok(settings)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.0.insert(canonical_key(key), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    /// Later settings win.
    pub fn merge(mut self, overrides: Settings) -> Settings {
        self.0.extend(overrides.0);
        self
    }

    fn check_keys(&self) -> Result<()> {
        match self.0.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            Some(k) => Err(Error::Config(format!("unknown setting `{k}`"))),
            None => Ok(()),
        }
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::Config(format!("bad value `{v}` for `{key}`")))
            })
            .transpose()
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).filter(|s| !s.is_empty()).map(PathBuf::from)
    }
}

fn parse_range(s: &str) -> Option<(usize, usize)> {
    match s.split_once(['-', ',', ':']) {
        Some((a, b)) => Some((a.trim().parse().ok()?, b.trim().parse().ok()?)),
        None => {
            let n = s.trim().parse().ok()?;
            Some((n, n))
        }
    }
}

fn parse_list<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<Vec<T>> {
    let items: Vec<T> = s
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    let mut seen = Vec::new();
    for x in items {
        if !seen
            .iter()
            .any(|y: &T| std::mem::discriminant(y) == std::mem::discriminant(&x))
        {
            seen.push(x);
        }
    }
    Ok(seen)
}

/// Validated settings for every stage.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub schema: CorpusSchema,
    pub kb: Option<PathBuf>,
    pub en_dict: Option<PathBuf>,
    pub hi_dict: Option<PathBuf>,
    pub freq_en: Option<PathBuf>,
    pub freq_hi: Option<PathBuf>,
    pub profanity: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub rescue: RescueConfig,
    pub variant: TransformVariant,
    pub schemes: Vec<Scheme>,
    pub classifiers: Vec<ClassifierKind>,
    pub seed: u64,
    pub test_fraction: f64,
    pub stratified: bool,
    pub features: FeatureConfig,
    pub alpha: f64,
    pub logreg: LogRegConfig,
    pub suggest_distance: usize,
    pub out: Option<PathBuf>,
}

impl PipelineConfig {
    /// Checks values only; no file is touched.
    pub fn from_settings(s: &Settings) -> Result<Self> {
        s.check_keys()?;
        let threshold = s.parse::<f64>("threshold")?.unwrap_or(DEFAULT_THRESHOLD);
        let rescue = RescueConfig::new(threshold)?;

        let test_fraction = s.parse::<f64>("test_fraction")?.unwrap_or(0.2);
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            return Err(Error::Config(format!(
                "test_fraction must be in (0, 1), got {test_fraction}"
            )));
        }

        let defaults = FeatureConfig::default();
        let range = |key: &str, default| -> Result<(usize, usize)> {
            match s.get(key) {
                None => Ok(default),
                Some(v) => parse_range(v)
                    .ok_or_else(|| Error::Config(format!("bad range `{v}` for `{key}`"))),
            }
        };
        let features = FeatureConfig {
            word_ngram: range("word_ngram", defaults.word_ngram)?,
            char_ngram: range("char_ngram", defaults.char_ngram)?,
            min_df: s.parse("min_df")?.unwrap_or(defaults.min_df),
        };
        features.validate()?;

        let lr_defaults = LogRegConfig::default();
        let logreg = LogRegConfig {
            l2: s.parse("l2")?.unwrap_or(lr_defaults.l2),
            epochs: s.parse("epochs")?.unwrap_or(lr_defaults.epochs),
            lr: s.parse("lr")?.unwrap_or(lr_defaults.lr),
        };
        if !(logreg.lr > 0.0 && logreg.l2 >= 0.0) {
            return Err(Error::Config(
                "lr must be positive and l2 non-negative".into(),
            ));
        }
        let alpha = s.parse::<f64>("alpha")?.unwrap_or(1.0);
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Config(format!(
                "alpha must be positive, got {alpha}"
            )));
        }

        let delimiter = match s.get("delimiter") {
            None => b',',
            Some("tab") | Some("\\t") => b'\t',
            Some(d) if d.len() == 1 => d.as_bytes()[0],
            Some(d) => {
                return Err(Error::Config(format!(
                    "delimiter must be one byte, got `{d}`"
                )))
            }
        };
        let schema = CorpusSchema {
            text_column: s.get("text_column").unwrap_or("text").to_string(),
            label_column: match s.get("label_column") {
                None => Some("label".into()),
                Some("") | Some("none") => None,
                Some(l) => Some(l.to_string()),
            },
            id_column: match s.get("id_column") {
                None => Some("id".into()),
                Some("") | Some("none") => None,
                Some(l) => Some(l.to_string()),
            },
            delimiter,
        };

        Ok(PipelineConfig {
            corpus: s.path("corpus"),
            input: s.path("input"),
            schema,
            kb: s.path("kb"),
            en_dict: s.path("en_dict"),
            hi_dict: s.path("hi_dict"),
            freq_en: s.path("freq_en"),
            freq_hi: s.path("freq_hi"),
            profanity: s.path("profanity"),
            rules: s.path("rules"),
            rescue,
            variant: s.parse("variant")?.unwrap_or(TransformVariant::Moh),
            schemes: match s.get("scheme") {
                Some(v) => parse_list(v)?,
                None => vec![Scheme::Count, Scheme::TfidfWord],
            },
            classifiers: match s.get("classifier") {
                Some(v) => parse_list(v)?,
                None => ClassifierKind::ALL.to_vec(),
            },
            seed: s.parse("seed")?.unwrap_or(42),
            test_fraction,
            stratified: s.parse("stratified")?.unwrap_or(true),
            features,
            alpha,
            logreg,
            suggest_distance: s.parse("suggest_distance")?.unwrap_or(1),
            out: s.path("out"),
        })
    }

    /// Fails unless every named path is set and exists.
    pub fn require(&self, paths: &[(&str, &Option<PathBuf>)]) -> Result<()> {
        for (name, p) in paths {
            match p {
                None => return Err(Error::Config(format!("`{name}` is required"))),
                Some(p) if !p.exists() => {
                    return Err(Error::Config(format!(
                        "`{name}`: {} does not exist",
                        p.display()
                    )))
                }
                _ => {}
            }
        }
        // Optional inputs must exist when given.
        for (name, p) in [
            ("freq_en", &self.freq_en),
            ("freq_hi", &self.freq_hi),
            ("profanity", &self.profanity),
            ("rules", &self.rules),
        ] {
            if let Some(p) = p {
                if !p.exists() {
                    return Err(Error::Config(format!(
                        "`{name}`: {} does not exist",
                        p.display()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Stable rendering of every setting that affects results. The output
    /// location is excluded.
    pub fn canonical(&self) -> String {
        let p = |x: &Option<PathBuf>| {
            x.as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default()
        };
        let join = |v: Vec<&str>| v.join(",");
        let lines = [
            ("corpus", p(&self.corpus)),
            ("text_column", self.schema.text_column.clone()),
            (
                "label_column",
                self.schema.label_column.clone().unwrap_or_default(),
            ),
            (
                "id_column",
                self.schema.id_column.clone().unwrap_or_default(),
            ),
            ("delimiter", (self.schema.delimiter as char).to_string()),
            ("kb", p(&self.kb)),
            ("en_dict", p(&self.en_dict)),
            ("hi_dict", p(&self.hi_dict)),
            ("freq_en", p(&self.freq_en)),
            ("freq_hi", p(&self.freq_hi)),
            ("profanity", p(&self.profanity)),
            ("rules", p(&self.rules)),
            ("threshold", self.rescue.threshold().to_string()),
            ("variant", self.variant.to_string()),
            (
                "scheme",
                join(self.schemes.iter().map(|s| s.as_str()).collect()),
            ),
            (
                "classifier",
                join(self.classifiers.iter().map(|c| c.as_str()).collect()),
            ),
            ("seed", self.seed.to_string()),
            ("test_fraction", self.test_fraction.to_string()),
            ("stratified", self.stratified.to_string()),
            (
                "word_ngram",
                format!(
                    "{}-{}",
                    self.features.word_ngram.0, self.features.word_ngram.1
                ),
            ),
            (
                "char_ngram",
                format!(
                    "{}-{}",
                    self.features.char_ngram.0, self.features.char_ngram.1
                ),
            ),
            ("min_df", self.features.min_df.to_string()),
            ("alpha", self.alpha.to_string()),
            ("l2", self.logreg.l2.to_string()),
            ("epochs", self.logreg.epochs.to_string()),
            ("lr", self.logreg.lr.to_string()),
            ("suggest_distance", self.suggest_distance.to_string()),
        ];
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}
