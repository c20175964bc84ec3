//! File-level stages and the end-to-end run.
//!
//! Every stage reads and writes files under one output directory with
//! fixed names, so running the stages one by one leaves the same bytes on
//! disk as [`run_pipeline`].

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classify::{
    evaluate, make_split, train_logreg, train_nb, Classifier, ClassifierKind, Split,
};
use crate::config::PipelineConfig;
use crate::corpus::{clean_posts, load_canonical, load_posts, write_posts_to, Post};
use crate::error::{Error, Result};
use crate::features::{fit_vocabulary, transform, Scheme};
use crate::kb::KnowledgeBase;
use crate::langid::{Resources, TaggedToken};
use crate::lexicon::{Dictionary, FrequencyModel, Language};
use crate::metrics::{render_per_class, render_table, EvalReport, TableRow};
use crate::rescue::{rescue_all, RescueTrace};
use crate::translit::{simulate, CharRuleTable};

pub const CLEANED: &str = "cleaned.csv";
pub const TAGGED: &str = "tagged.jsonl";
pub const RESCUE_TRACE: &str = "rescue_trace.jsonl";
pub const TRANSFORMED: &str = "transformed.csv";
pub const FEATURES_DIR: &str = "features";
pub const SPLIT: &str = "split.json";
pub const REPORTS_DIR: &str = "reports";
pub const MANIFEST: &str = "manifest.json";

pub const STAGES: [&str; 8] = [
    "clean",
    "tag",
    "rescue",
    "transform",
    "featurize",
    "split",
    "train",
    "evaluate",
];

/// One line of the tagged JSONL file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggedPost {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub tokens: Vec<TaggedToken>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut w = create(path)?;
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_string(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_tagged(path: &Path) -> Result<Vec<TaggedPost>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let post = serde_json::from_str(&line)
            .map_err(|e| Error::parse(path, i as u64 + 1, e.to_string()))?;
        out.push(post);
    }
    Ok(out)
}

pub fn write_tagged(path: &Path, posts: &[TaggedPost]) -> Result<()> {
    write_jsonl(path, posts)
}

/// Loads the tagger resources named in the config. Frequency tables are
/// optional and default to empty.
pub fn load_resources(cfg: &PipelineConfig) -> Result<Resources> {
    let need = |name: &str, p: &Option<PathBuf>| -> Result<PathBuf> {
        p.clone()
            .ok_or_else(|| Error::Config(format!("`{name}` is required")))
    };
    let kb = KnowledgeBase::load(need("kb", &cfg.kb)?)?;
    let freq = |p: &Option<PathBuf>| {
        p.as_ref()
            .map_or(Ok(FrequencyModel::default()), FrequencyModel::load)
    };
    let freq_en = freq(&cfg.freq_en)?;
    let freq_hi = freq(&cfg.freq_hi)?;
    let en_dict = Dictionary::load(Language::English, need("en_dict", &cfg.en_dict)?)?
        .with_max_suggest_distance(cfg.suggest_distance)
        .with_ranking(freq_en.clone());
    let hi_dict = Dictionary::load(Language::DevanagariHindi, need("hi_dict", &cfg.hi_dict)?)?
        .with_max_suggest_distance(cfg.suggest_distance);
    Ok(Resources {
        kb,
        en_dict,
        hi_dict,
        freq_en,
        freq_hi,
    })
}

fn load_profanity(cfg: &PipelineConfig) -> Result<KnowledgeBase> {
    match &cfg.profanity {
        Some(p) => KnowledgeBase::load(p),
        None => Ok(KnowledgeBase::default()),
    }
}

fn load_rules(cfg: &PipelineConfig) -> Result<CharRuleTable> {
    match &cfg.rules {
        Some(p) => CharRuleTable::load(p),
        None => Ok(CharRuleTable::default()),
    }
}

// ---- clean ----

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CleanSummary {
    pub rows: usize,
    pub loaded: usize,
    pub malformed: usize,
    pub dropped_after_cleaning: usize,
    pub kept: usize,
}

pub fn clean_posts_from(cfg: &PipelineConfig) -> Result<(Vec<Post>, CleanSummary)> {
    let corpus = cfg
        .corpus
        .as_ref()
        .ok_or_else(|| Error::Config("`corpus` is required".into()))?;
    let loaded = load_posts(corpus, &cfg.schema)?;
    let (posts, dropped) = clean_posts(loaded.posts);
    let summary = CleanSummary {
        rows: loaded.report.rows,
        loaded: loaded.report.loaded,
        malformed: loaded.report.errors.len(),
        dropped_after_cleaning: dropped,
        kept: posts.len(),
    };
    Ok((posts, summary))
}

/// Raw corpus to `cleaned.csv`.
pub fn stage_clean(cfg: &PipelineConfig, out: &Path) -> Result<CleanSummary> {
    let (posts, summary) = clean_posts_from(cfg)?;
    write_posts_to(out.join(CLEANED), &posts)?;
    Ok(summary)
}

// ---- tag / rescue ----

pub fn tag_posts(posts: &[Post], res: &Resources) -> Vec<TaggedPost> {
    posts
        .par_iter()
        .map(|p| TaggedPost {
            id: p.id.clone(),
            label: p.label.clone(),
            tokens: res.tag_post(p),
        })
        .collect()
}

pub fn rescue_posts(
    posts: Vec<TaggedPost>,
    kb: &KnowledgeBase,
    cfg: &PipelineConfig,
) -> (Vec<TaggedPost>, Vec<RescueTrace>) {
    let (heads, tokens): (Vec<_>, Vec<_>) = posts
        .into_iter()
        .map(|p| ((p.id, p.label), p.tokens))
        .unzip();
    let (tokens, trace) = rescue_all(tokens, kb, &cfg.rescue);
    let posts = heads
        .into_iter()
        .zip(tokens)
        .map(|((id, label), tokens)| TaggedPost { id, label, tokens })
        .collect();
    (posts, trace)
}

/// Canonical corpus to `tagged.jsonl`. With `rescue` set, OOV tokens are
/// rescued and `rescue_trace.jsonl` is written alongside.
pub fn stage_tag(
    cfg: &PipelineConfig,
    input: &Path,
    out: &Path,
    res: &Resources,
    rescue: bool,
) -> Result<Vec<TaggedPost>> {
    let posts = load_canonical(input)?.posts;
    let mut tagged = tag_posts(&posts, res);
    if rescue {
        let (rescued, trace) = rescue_posts(tagged, &res.kb, cfg);
        tagged = rescued;
        write_jsonl(&out.join(RESCUE_TRACE), &trace)?;
    }
    write_tagged(&out.join(TAGGED), &tagged)?;
    Ok(tagged)
}

// ---- transform ----

pub fn transform_posts(tagged: &[TaggedPost], cfg: &PipelineConfig) -> Result<Vec<Post>> {
    let profanity = load_profanity(cfg)?;
    let rules = load_rules(cfg)?;
    tagged
        .iter()
        .map(|p| {
            let text = simulate(cfg.variant, &p.tokens, &profanity, &rules)?;
            Ok(Post::new(p.id.clone(), text, p.label.clone()))
        })
        .collect()
}

/// `tagged.jsonl` to `transformed.csv` under the configured variant.
pub fn stage_transform(cfg: &PipelineConfig, input: &Path, out: &Path) -> Result<Vec<Post>> {
    let tagged = read_tagged(input)?;
    let posts = transform_posts(&tagged, cfg)?;
    write_posts_to(out.join(TRANSFORMED), &posts)?;
    Ok(posts)
}

// ---- featurize ----

/// Fits each scheme on the whole corpus and exports vocabulary, sparse
/// triples and the document labels.
pub fn write_features(cfg: &PipelineConfig, posts: &[Post], out: &Path) -> Result<()> {
    let dir = out.join(FEATURES_DIR);
    let docs: Vec<&str> = posts.iter().map(|p| p.text.as_str()).collect();
    let exports: Vec<(Scheme, Vec<u8>, Vec<u8>)> = cfg
        .schemes
        .par_iter()
        .map(|&scheme| {
            let vocab = fit_vocabulary(&docs, scheme, &cfg.features)?;
            let x = transform(&docs, &vocab);
            let (mut v, mut t) = (Vec::new(), Vec::new());
            vocab
                .write_tsv(&mut v)
                .map_err(|e| Error::io("<memory>", e))?;
            x.write_tsv(&mut t).map_err(|e| Error::io("<memory>", e))?;
            Ok((scheme, v, t))
        })
        .collect::<Result<_>>()?;
    for (scheme, vocab, triples) in exports {
        let write = |name: String, bytes: &[u8]| -> Result<()> {
            let path = dir.join(name);
            let mut w = create(&path)?;
            w.write_all(bytes)
                .and_then(|_| w.flush())
                .map_err(|e| Error::io(&path, e))
        };
        write(format!("{scheme}.vocab.tsv"), &vocab)?;
        write(format!("{scheme}.triples.tsv"), &triples)?;
    }
    let labels: String = posts
        .iter()
        .enumerate()
        .map(|(i, p)| format!("{i}\t{}\t{}\n", p.id, p.label.as_deref().unwrap_or("")))
        .collect();
    write_string(&dir.join("labels.tsv"), &labels)
}

pub fn stage_featurize(cfg: &PipelineConfig, input: &Path, out: &Path) -> Result<()> {
    let posts = load_canonical(input)?.posts;
    write_features(cfg, &posts, out)
}

// ---- split / train / evaluate ----

fn labels_of(posts: &[Post]) -> Result<Vec<String>> {
    posts
        .iter()
        .map(|p| {
            p.label
                .clone()
                .filter(|l| !l.is_empty())
                .ok_or_else(|| Error::Schema(format!("post `{}` has no label", p.id)))
        })
        .collect()
}

pub fn compute_split(cfg: &PipelineConfig, posts: &[Post]) -> Result<Split> {
    let labels = labels_of(posts)?;
    make_split(&labels, cfg.seed, cfg.test_fraction, cfg.stratified)
}

pub fn write_split(out: &Path, split: &Split) -> Result<()> {
    write_string(
        &out.join(SPLIT),
        &(serde_json::to_string_pretty(split)? + "\n"),
    )
}

/// A fitted grid cell, kept with the test matrix it is scored on.
pub struct TrainedCell {
    pub scheme: Scheme,
    pub classifier: ClassifierKind,
    model: Box<dyn Classifier + Send + Sync>,
    x_test: crate::features::FeatureMatrix,
}

impl TrainedCell {
    pub fn model(&self) -> &dyn Classifier {
        self.model.as_ref()
    }
}

/// Trains every (scheme, classifier) pair in parallel. Vocabularies are fit
/// on the training documents only.
pub fn train_grid(cfg: &PipelineConfig, posts: &[Post], split: &Split) -> Result<Vec<TrainedCell>> {
    let labels = labels_of(posts)?;
    let pick = |idx: &[usize]| -> (Vec<&str>, Vec<&str>) {
        idx.iter()
            .map(|&i| (posts[i].text.as_str(), labels[i].as_str()))
            .unzip()
    };
    let (train_docs, train_y) = pick(&split.train);
    let (test_docs, _) = pick(&split.test);
    let cells: Vec<(Scheme, ClassifierKind)> = cfg
        .schemes
        .iter()
        .flat_map(|&s| cfg.classifiers.iter().map(move |&c| (s, c)))
        .collect();
    cells
        .into_par_iter()
        .map(|(scheme, classifier)| {
            let vocab = fit_vocabulary(&train_docs, scheme, &cfg.features)?;
            let x_train = transform(&train_docs, &vocab);
            let x_test = transform(&test_docs, &vocab);
            let model: Box<dyn Classifier + Send + Sync> = match classifier {
                ClassifierKind::NaiveBayes => Box::new(train_nb(&x_train, &train_y, cfg.alpha)?),
                ClassifierKind::LogReg => Box::new(train_logreg(&x_train, &train_y, &cfg.logreg)?),
            };
            Ok(TrainedCell {
                scheme,
                classifier,
                model,
                x_test,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub scheme: Scheme,
    pub classifier: ClassifierKind,
    pub report: EvalReport,
}

pub fn evaluate_grid(
    cells: &[TrainedCell],
    posts: &[Post],
    split: &Split,
) -> Result<Vec<CellReport>> {
    let labels = labels_of(posts)?;
    let y_test: Vec<&str> = split.test.iter().map(|&i| labels[i].as_str()).collect();
    cells
        .par_iter()
        .map(|c| {
            Ok(CellReport {
                scheme: c.scheme,
                classifier: c.classifier,
                report: evaluate(c.model(), &c.x_test, &y_test)?,
            })
        })
        .collect()
}

pub fn report_name(scheme: Scheme, classifier: ClassifierKind) -> String {
    format!("{scheme}__{classifier}.json")
}

/// Writes one JSON report per cell plus `summary.txt`.
pub fn write_reports(out: &Path, reports: &[CellReport]) -> Result<()> {
    let dir = out.join(REPORTS_DIR);
    for r in reports {
        write_string(
            &dir.join(report_name(r.scheme, r.classifier)),
            &(r.report.to_json() + "\n"),
        )?;
    }
    let mut ordered: Vec<&CellReport> = reports.iter().collect();
    ordered.sort_by_key(|r| (r.classifier, r.scheme));
    let rows: Vec<TableRow> = ordered
        .iter()
        .map(|r| TableRow {
            classifier: r.classifier.title(),
            features: r.scheme.title(),
            report: &r.report,
        })
        .collect();
    let mut text = render_table(&rows);
    for r in &ordered {
        text.push_str(&format!(
            "\n{} / {}\n",
            r.classifier.title(),
            r.scheme.title()
        ));
        text.push_str(&render_per_class(&r.report));
    }
    write_string(&dir.join("summary.txt"), &text)
}

/// Split, train and evaluate in one go; used by the `train-eval` command.
pub fn stage_train_eval(cfg: &PipelineConfig, input: &Path, out: &Path) -> Result<Vec<CellReport>> {
    let posts = load_canonical(input)?.posts;
    let split = compute_split(cfg, &posts)?;
    write_split(out, &split)?;
    let cells = train_grid(cfg, &posts, &split)?;
    let reports = evaluate_grid(&cells, &posts, &split)?;
    write_reports(out, &reports)?;
    Ok(reports)
}

// ---- manifest ----

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub status: String,
    pub millis: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub variant: String,
    pub status: String,
    pub failed_stage: Option<String>,
    pub error: Option<String>,
    pub stages: Vec<StageRecord>,
    pub artifacts: Vec<Artifact>,
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else if path != root.join(MANIFEST) {
            out.push(path);
        }
    }
    Ok(())
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Every file under `out` except the manifest itself, with `/`-separated
/// relative paths in sorted order.
pub fn list_artifacts(out: &Path) -> Result<Vec<Artifact>> {
    let mut files = Vec::new();
    if out.is_dir() {
        collect_files(out, out, &mut files)?;
    }
    let mut artifacts = files
        .iter()
        .map(|p| {
            let rel = p.strip_prefix(out).unwrap_or(p);
            let path = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            Ok(Artifact {
                path,
                sha256: sha256_file(p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    artifacts.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(artifacts)
}

pub fn read_manifest(out: &Path) -> Result<Manifest> {
    let path = out.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(serde_json::from_str(&text)?)
}

struct Run<'a> {
    out: &'a Path,
    manifest: Manifest,
}

impl Run<'_> {
    fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let result = f();
        let millis = start.elapsed().as_millis() as u64;
        let status = if result.is_ok() { "ok" } else { "failed" };
        self.manifest.stages.push(StageRecord {
            name: name.into(),
            status: status.into(),
            millis,
        });
        if let Err(e) = &result {
            self.manifest.status = "failed".into();
            self.manifest.failed_stage = Some(name.into());
            self.manifest.error = Some(e.to_string());
        }
        result
    }

    fn finish(&mut self) -> Result<()> {
        self.manifest.artifacts = list_artifacts(self.out)?;
        let json = serde_json::to_string_pretty(&self.manifest)? + "\n";
        write_string(&self.out.join(MANIFEST), &json)
    }
}

/// Runs all eight stages into `out`. A manifest is written whether or not
/// the run succeeds; on failure it names the stage that failed and the
/// artifacts written so far are left in place.
pub fn run_pipeline(cfg: &PipelineConfig, out: &Path) -> Result<Manifest> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut run = Run {
        out,
        manifest: Manifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: cfg.hash(),
            seed: cfg.seed,
            variant: cfg.variant.to_string(),
            status: "ok".into(),
            failed_stage: None,
            error: None,
            stages: Vec::new(),
            artifacts: Vec::new(),
        },
    };
    let result = run_stages(cfg, out, &mut run);
    run.finish()?;
    result.map(|_| run.manifest)
}

fn run_stages(cfg: &PipelineConfig, out: &Path, run: &mut Run) -> Result<()> {
    let cleaned = run.stage("clean", || {
        let (posts, _) = clean_posts_from(cfg)?;
        write_posts_to(out.join(CLEANED), &posts)?;
        // Re-read so every later stage sees exactly what is on disk.
        Ok(load_canonical(out.join(CLEANED))?.posts)
    })?;
    let (res, tagged) = run.stage("tag", || {
        let res = load_resources(cfg)?;
        let tagged = tag_posts(&cleaned, &res);
        Ok((res, tagged))
    })?;
    let tagged = run.stage("rescue", || {
        let (tagged, trace) = rescue_posts(tagged, &res.kb, cfg);
        write_jsonl(&out.join(RESCUE_TRACE), &trace)?;
        write_tagged(&out.join(TAGGED), &tagged)?;
        Ok(tagged)
    })?;
    let posts = run.stage("transform", || {
        let posts = transform_posts(&tagged, cfg)?;
        write_posts_to(out.join(TRANSFORMED), &posts)?;
        Ok(load_canonical(out.join(TRANSFORMED))?.posts)
    })?;
    run.stage("featurize", || write_features(cfg, &posts, out))?;
    let split = run.stage("split", || {
        let split = compute_split(cfg, &posts)?;
        write_split(out, &split)?;
        Ok(split)
    })?;
    let cells = run.stage("train", || train_grid(cfg, &posts, &split))?;
    run.stage("evaluate", || {
        let reports = evaluate_grid(&cells, &posts, &split)?;
        write_reports(out, &reports)
    })
}
