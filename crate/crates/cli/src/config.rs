//! Experiment configuration: a JSON file merged with command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use profilekit::corpus::{parse_corpus, SplitKind};
use profilekit::eval::{ExperimentConfig, Learner, LearnerParams, Resources, DEFAULT_N_KEYWORDS};
use profilekit::features::{CategoryCorrelations, Gazetteer, Lexicon};
use profilekit::hierarchy::load_hierarchy;
use profilekit::resources::{correlations_for, lexicon_for};
use profilekit::{Corpus, FeatureSet, GeneralizationHierarchy, SplitPlan, Tokenizer};

/// Gazetteer list files; missing entries fall back to the bundled lists.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GazetteerPaths {
    pub persons: Option<PathBuf>,
    pub organizations: Option<PathBuf>,
    pub locations: Option<PathBuf>,
    pub honorifics: Option<PathBuf>,
    pub corporate_cues: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitFile {
    pub kind: Option<SplitKind>,
    pub k: Option<usize>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub stratified: Option<bool>,
}

/// Everything an experiment can be configured with. Relative paths resolve
/// against the config file's directory.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub corpus: Option<PathBuf>,
    pub hierarchy: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub correlations: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    #[serde(default)]
    pub gazetteer: GazetteerPaths,
    pub features: Option<String>,
    pub learner: Option<String>,
    #[serde(default)]
    pub split: SplitFile,
    pub n_keywords: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub params: Option<LearnerParams>,
    pub out: Option<PathBuf>,
}

/// Flags shared by the experiment commands; each overrides the config key
/// of the same name.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// JSON experiment config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub hierarchy: Option<PathBuf>,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub correlations: Option<PathBuf>,
    /// tfidf, sfc, pol or all; evaluate also takes a comma-separated list.
    #[arg(long)]
    pub features: Option<String>,
    /// aq, tree or rocchio.
    #[arg(long)]
    pub learner: Option<String>,
    /// 70-30 or kfold.
    #[arg(long)]
    pub split: Option<String>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "n-keywords")]
    pub n_keywords: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub stratified: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Resolved settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub corpus: Option<PathBuf>,
    pub hierarchy: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub correlations: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub gazetteer: GazetteerPaths,
    pub features: Vec<FeatureSet>,
    pub learner: Learner,
    pub split: SplitPlan,
    pub n_keywords: usize,
    pub params: LearnerParams,
    pub out: Option<PathBuf>,
}

fn resolve(base: &Path, p: Option<PathBuf>) -> Option<PathBuf> {
    p.map(|p| if p.is_absolute() { p } else { base.join(p) })
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn parse_sets(text: &str) -> Result<Vec<FeatureSet>> {
    if text.eq_ignore_ascii_case("every") {
        return Ok(FeatureSet::ALL_SETS.to_vec());
    }
    text.split(',').map(|s| s.trim().parse::<FeatureSet>().map_err(anyhow::Error::from)).collect()
}

impl Settings {
    pub fn load(o: &Overrides) -> Result<Self> {
        let (file, base) = match &o.config {
            Some(path) => {
                let text = read_text(path)?;
                let file: ConfigFile =
                    serde_json::from_str(&text).with_context(|| format!("bad config {}", path.display()))?;
                (file, path.parent().unwrap_or(Path::new(".")).to_path_buf())
            }
            None => (ConfigFile::default(), PathBuf::from(".")),
        };
        let features = parse_sets(o.features.as_deref().or(file.features.as_deref()).unwrap_or("all"))?;
        let learner: Learner = o.learner.as_deref().or(file.learner.as_deref()).unwrap_or("aq").parse()?;
        let kind = match o.split.as_deref() {
            Some("70-30") | Some("70/30") => SplitKind::SeventyThirty,
            Some("kfold") => SplitKind::KFold,
            Some(other) => bail!("unknown split `{other}` (expected 70-30 or kfold)"),
            None => file.split.kind.unwrap_or(SplitKind::KFold),
        };
        let k = o.k.or(file.split.k).unwrap_or(10);
        let seed = o.seed.or(file.split.seed).or(file.seed).unwrap_or(0);
        let runs = match kind {
            SplitKind::KFold => k,
            SplitKind::SeventyThirty => o.runs.or(file.split.runs).unwrap_or(10),
        };
        if kind == SplitKind::KFold && o.runs.or(file.split.runs).is_some_and(|r| r != k) {
            bail!("k-fold runs equal k; got runs={} with k={k}", o.runs.or(file.split.runs).unwrap_or(k));
        }
        let split = SplitPlan { kind, k, runs, seed, stratified: o.stratified || file.split.stratified.unwrap_or(false) };
        let n_keywords = o.n_keywords.or(file.n_keywords).unwrap_or(DEFAULT_N_KEYWORDS);
        if n_keywords == 0 {
            bail!("n-keywords must be at least 1");
        }
        let mut params = file.params.unwrap_or_default();
        params.lef.seed_rng = seed;
        let g = file.gazetteer;
        Ok(Settings {
            corpus: o.corpus.clone().or(resolve(&base, file.corpus)),
            hierarchy: o.hierarchy.clone().or(resolve(&base, file.hierarchy)),
            lexicon: o.lexicon.clone().or(resolve(&base, file.lexicon)),
            correlations: o.correlations.clone().or(resolve(&base, file.correlations)),
            stopwords: resolve(&base, file.stopwords),
            gazetteer: GazetteerPaths {
                persons: resolve(&base, g.persons),
                organizations: resolve(&base, g.organizations),
                locations: resolve(&base, g.locations),
                honorifics: resolve(&base, g.honorifics),
                corporate_cues: resolve(&base, g.corporate_cues),
            },
            features,
            learner,
            split,
            n_keywords,
            params,
            out: o.out.clone().or(resolve(&base, file.out)),
        })
    }

    pub fn experiment(&self, set: FeatureSet) -> ExperimentConfig {
        ExperimentConfig {
            feature_set: set,
            learner: self.learner,
            split: self.split,
            n_keywords: self.n_keywords,
            params: self.params.clone(),
        }
    }

    pub fn corpus_path(&self) -> Result<&Path> {
        self.corpus.as_deref().context("no corpus given (use --corpus or the config's `corpus`)")
    }

    pub fn load_corpus(&self) -> Result<Corpus> {
        let path = self.corpus_path()?;
        let file = fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        parse_corpus(std::io::BufReader::new(file)).with_context(|| format!("bad corpus {}", path.display()))
    }

    pub fn resources(&self) -> Result<Resources> {
        let hierarchy = match &self.hierarchy {
            Some(p) => load_hierarchy(read_text(p)?.as_bytes()).with_context(|| format!("bad hierarchy {}", p.display()))?,
            None => GeneralizationHierarchy::reference(),
        };
        let lexicon = match &self.lexicon {
            Some(p) => Lexicon::parse(&read_text(p)?).with_context(|| format!("bad lexicon {}", p.display()))?,
            None => lexicon_for(&hierarchy),
        };
        lexicon.validate(&hierarchy).context("lexicon does not fit the hierarchy")?;
        let correlations = match &self.correlations {
            Some(p) => CategoryCorrelations::parse(&read_text(p)?)
                .with_context(|| format!("bad correlations {}", p.display()))?,
            None => correlations_for(&hierarchy),
        };
        let tokenizer = match &self.stopwords {
            Some(p) => Tokenizer::from_stopword_list(&read_text(p)?),
            None => Tokenizer::default(),
        };
        let gazetteer = if [
            &self.gazetteer.persons,
            &self.gazetteer.organizations,
            &self.gazetteer.locations,
            &self.gazetteer.honorifics,
            &self.gazetteer.corporate_cues,
        ]
        .iter()
        .all(|p| p.is_none())
        {
            Gazetteer::reference()
        } else {
            let files: Vec<(String, &'static str)> = profilekit::resources::reference_files()
                .into_iter()
                .map(|(name, text)| (text, name))
                .collect();
            let bundled = |name: &str| {
                files.iter().find(|(_, n)| *n == name).map(|(t, _)| t.clone()).expect("bundled file")
            };
            let pick = |p: &Option<PathBuf>, name: &str| -> Result<String> {
                match p {
                    Some(p) => read_text(p),
                    None => Ok(bundled(name)),
                }
            };
            Gazetteer::from_lists(
                &pick(&self.gazetteer.persons, "persons.txt")?,
                &pick(&self.gazetteer.organizations, "organizations.txt")?,
                &pick(&self.gazetteer.locations, "locations.tsv")?,
                &pick(&self.gazetteer.honorifics, "honorifics.txt")?,
                &pick(&self.gazetteer.corporate_cues, "corporate_cues.txt")?,
            )
            .context("bad gazetteer lists")?
        };
        Ok(Resources { hierarchy, lexicon, correlations, gazetteer, tokenizer })
    }

    pub fn out_dir(&self) -> Result<&Path> {
        self.out.as_deref().context("no output location given (use --out or the config's `out`)")
    }
}
