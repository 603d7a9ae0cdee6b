//! Statistical learning over genotype sequences.
//!
//! Decision tables map genotype n-grams (n = 1, 2, 3) to the tag sequences
//! observed for them in a hand-tagged corpus. Estimation never looks at
//! the words themselves: two words with the same genotype share one row,
//! which is what lets an unseen word inherit the behaviour of its genotype
//! supercategory. Each decision carries a strength score: the smoothed
//! frequency estimate minus one standard deviation, scaled to [0, 100).

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::morphology::{analyze, AnalyzedToken, AnalyzerOptions, Lexicon, ProperNounDict};
use crate::preprocess::{RawToken, MARKER_BEGIN_TAG, MARKER_END_TAG};
use crate::tag::{Genotype, Tag};

pub const MODEL_HEADER: &str = "genotag-model v1";

/// Binomial strength of a decision seen `f` times among `n` observations:
/// `(p̂ - sqrt(p̂(1-p̂)/n)) * 100` with `p̂ = (f + 0.5)/(n + 1)`, so that
/// neither `p̂` nor `1 - p̂` is ever zero. Strictly below 100 for any
/// finite `n`, and lower for the same `f/n` the smaller `n` is.
pub fn strength_formula(f: u64, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidCounts {
            f,
            n,
            reason: "n must be at least 1",
        });
    }
    if f > n {
        return Err(Error::InvalidCounts {
            f,
            n,
            reason: "f cannot exceed n",
        });
    }
    let nf = n as f64;
    let p_hat = (f as f64 + 0.5) / (nf + 1.0);
    Ok((p_hat - (p_hat * (1.0 - p_hat) / nf).sqrt()) * 100.0)
}

/// One observed resolution of a genotype n-gram.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub key: Vec<Genotype>,
    pub choice: Vec<Tag>,
    /// Occurrences of this choice for this key.
    pub f: u64,
    /// Total observations of the key (shared by all its decisions).
    pub n: u64,
    pub strength: f64,
}

impl Decision {
    /// Raw percentage `f/n`, the figure shown in reports.
    pub fn relative_frequency(&self) -> f64 {
        self.f as f64 / self.n as f64 * 100.0
    }
}

/// Decisions for every genotype n-gram of one order, each row sorted by
/// descending `f` (ties broken by lexicographically smallest choice).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DecisionTable {
    pub order: usize,
    rows: BTreeMap<Vec<Genotype>, Vec<Decision>>,
}

impl DecisionTable {
    pub fn new(order: usize) -> DecisionTable {
        DecisionTable {
            order,
            rows: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, key: &[Genotype]) -> Option<&[Decision]> {
        self.rows.get(key).map(|v| v.as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<Genotype>, &[Decision])> {
        self.rows.iter().map(|(k, v)| (k, v.as_slice()))
    }

    fn insert_row(&mut self, key: Vec<Genotype>, mut decisions: Vec<Decision>) {
        sort_decisions(&mut decisions);
        self.rows.insert(key, decisions);
    }

    /// The top decision for the key (highest `f`, deterministic tie-break)
    /// when its strength reaches the threshold.
    pub fn decide(&self, key: &[Genotype], threshold: f64) -> Option<&Decision> {
        self.rows
            .get(key)?
            .first()
            .filter(|d| d.strength >= threshold)
    }
}

fn sort_decisions(decisions: &mut [Decision]) {
    decisions.sort_by(|a, b| b.f.cmp(&a.f).then_with(|| a.choice.cmp(&b.choice)));
}

pub fn decide<'a>(
    table: &'a DecisionTable,
    key: &[Genotype],
    threshold: f64,
) -> Option<&'a Decision> {
    table.decide(key, threshold)
}

/// Unigram, bigram and trigram tables trained together.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Model {
    pub unigram: DecisionTable,
    pub bigram: DecisionTable,
    pub trigram: DecisionTable,
}

impl Model {
    pub fn table(&self, order: usize) -> &DecisionTable {
        match order {
            1 => &self.unigram,
            2 => &self.bigram,
            3 => &self.trigram,
            _ => panic!("order must be 1, 2 or 3"),
        }
    }
}

/// One token of a hand-tagged training or evaluation corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldToken {
    pub surface: String,
    pub gold: Tag,
}

pub type GoldSentence = Vec<GoldToken>;

/// Reads a gold corpus: `surface<TAB>TAG` per line, blank line between
/// sentences, `#` comments. Marker pseudo-tokens are skipped when present;
/// training re-inserts its own.
pub fn parse_gold_corpus(text: &str, source_name: &str) -> Result<Vec<GoldSentence>> {
    let mut sentences = Vec::new();
    let mut current: GoldSentence = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        if line.trim_start().starts_with('#') {
            continue;
        }
        let (surface, tag) = line.split_once('\t').ok_or_else(|| Error::TrainingData {
            source_name: source_name.to_string(),
            line: line_no,
            message: "expected surface<TAB>TAG".to_string(),
        })?;
        let surface = surface.trim();
        if surface == crate::preprocess::MARKER_BEGIN || surface == crate::preprocess::MARKER_END {
            continue;
        }
        let gold = Tag::parse(tag.trim()).map_err(|e| Error::TrainingData {
            source_name: source_name.to_string(),
            line: line_no,
            message: e.to_string(),
        })?;
        current.push(GoldToken {
            surface: surface.to_string(),
            gold,
        });
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    Ok(sentences)
}

pub fn read_gold_corpus(path: &Path) -> Result<Vec<GoldSentence>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_gold_corpus(&text, &path.display().to_string())
}

/// A token whose gold tag is not in its genotype; it is reported and left
/// out of every count.
#[derive(Debug, Clone)]
pub struct TrainWarning {
    pub sentence_index: usize,
    pub token_index: usize,
    pub surface: String,
    pub gold: Tag,
    pub genotype: Genotype,
}

#[derive(Debug)]
pub struct TrainOutcome {
    pub model: Model,
    /// Proper nouns discovered in the training corpus.
    pub proper_nouns: ProperNounDict,
    pub warnings: Vec<TrainWarning>,
}

/// Trains the three decision tables. For every position the unigram table
/// counts (genotype -> gold tag); adjacent pairs and triples feed the
/// bigram and trigram tables with full tag sequences. Boundary markers
/// participate as unambiguous single-tag genotypes. Unambiguous genotypes
/// are kept inside n-gram keys but make no unigram rows (nothing to
/// decide). Tokens whose gold tag is outside their genotype are skipped
/// with a warning.
pub fn train(
    corpus: &[GoldSentence],
    lexicon: &Lexicon,
    opts: &AnalyzerOptions,
) -> TrainOutcome {
    let mut counters: [HashMap<Vec<Genotype>, HashMap<Vec<Tag>, u64>>; 3] =
        [HashMap::new(), HashMap::new(), HashMap::new()];
    let mut warnings = Vec::new();
    let mut proper_nouns = ProperNounDict::new();
    let empty = ProperNounDict::new();

    let begin = (
        Genotype::single(Tag::parse(MARKER_BEGIN_TAG).unwrap()),
        Tag::parse(MARKER_BEGIN_TAG).unwrap(),
    );
    let end = (
        Genotype::single(Tag::parse(MARKER_END_TAG).unwrap()),
        Tag::parse(MARKER_END_TAG).unwrap(),
    );

    for (sentence_index, sentence) in corpus.iter().enumerate() {
        let mut items: Vec<Option<(Genotype, Tag)>> = Vec::with_capacity(sentence.len() + 2);
        items.push(Some(begin.clone()));
        for (token_index, gold_token) in sentence.iter().enumerate() {
            let mut raw = RawToken::new(gold_token.surface.clone());
            raw.position = token_index + 1;
            raw.sentence_initial = token_index == 0;
            let analyzed = analyze(&raw, lexicon, opts, &empty, &mut proper_nouns);
            if analyzed.genotype.contains(&gold_token.gold) {
                items.push(Some((analyzed.genotype, gold_token.gold.clone())));
            } else {
                warnings.push(TrainWarning {
                    sentence_index,
                    token_index,
                    surface: gold_token.surface.clone(),
                    gold: gold_token.gold.clone(),
                    genotype: analyzed.genotype,
                });
                items.push(None);
            }
        }
        items.push(Some(end.clone()));

        for order in 1..=3usize {
            for window in items.windows(order) {
                if window.iter().any(Option::is_none) {
                    continue;
                }
                if order == 1 {
                    let (genotype, _) = window[0].as_ref().unwrap();
                    if genotype.is_single() {
                        continue;
                    }
                }
                let key: Vec<Genotype> = window
                    .iter()
                    .map(|i| i.as_ref().unwrap().0.clone())
                    .collect();
                let choice: Vec<Tag> = window
                    .iter()
                    .map(|i| i.as_ref().unwrap().1.clone())
                    .collect();
                *counters[order - 1]
                    .entry(key)
                    .or_default()
                    .entry(choice)
                    .or_insert(0) += 1;
            }
        }
    }

    let mut model = Model::default();
    for (order, counter) in counters.into_iter().enumerate() {
        let table = match order {
            0 => &mut model.unigram,
            1 => &mut model.bigram,
            _ => &mut model.trigram,
        };
        table.order = order + 1;
        for (key, choices) in counter {
            let n: u64 = choices.values().sum();
            let decisions: Vec<Decision> = choices
                .into_iter()
                .map(|(choice, f)| Decision {
                    key: key.clone(),
                    choice,
                    f,
                    n,
                    strength: strength_formula(f, n).expect("valid counts"),
                })
                .collect();
            table.insert_row(key, decisions);
        }
    }

    TrainOutcome {
        model,
        proper_nouns,
        warnings,
    }
}

/// Convenience for tests and property checks: trains from already-analyzed
/// (genotype, gold) sequences instead of surfaces.
pub fn train_from_genotypes(corpus: &[Vec<(Genotype, Tag)>]) -> Model {
    let mut lexicon = Lexicon::new();
    let mut surfaces: HashMap<Genotype, String> = HashMap::new();
    let mut next = 0usize;
    let mut gold: Vec<GoldSentence> = Vec::new();
    for sentence in corpus {
        let mut out = GoldSentence::new();
        for (genotype, tag) in sentence {
            let surface = surfaces.entry(genotype.clone()).or_insert_with(|| {
                next += 1;
                let s = format!("w{next}");
                lexicon.insert(&s, genotype.clone());
                s
            });
            out.push(GoldToken {
                surface: surface.clone(),
                gold: tag.clone(),
            });
        }
        gold.push(out);
    }
    train(&gold, &lexicon, &AnalyzerOptions::default()).model
}

fn genotype_to_key_part(genotype: &Genotype) -> String {
    genotype
        .tags()
        .iter()
        .map(Tag::as_str)
        .collect::<Vec<_>>()
        .join("+")
}

fn key_to_string(key: &[Genotype]) -> String {
    key.iter()
        .map(genotype_to_key_part)
        .collect::<Vec<_>>()
        .join("|")
}

impl Model {
    /// Text form: a header line, then `[UNIGRAM]`, `[BIGRAM]`, `[TRIGRAM]`
    /// sections with rows `key<TAB>choice<TAB>f<TAB>n<TAB>strength`.
    /// Genotypes join their tags with `+`, keys join genotypes with `|`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str(MODEL_HEADER);
        out.push('\n');
        for (name, table) in [
            ("[UNIGRAM]", &self.unigram),
            ("[BIGRAM]", &self.bigram),
            ("[TRIGRAM]", &self.trigram),
        ] {
            out.push_str(name);
            out.push('\n');
            for (key, decisions) in table.iter() {
                for d in decisions {
                    let choice = d
                        .choice
                        .iter()
                        .map(Tag::as_str)
                        .collect::<Vec<_>>()
                        .join(" ");
                    writeln!(
                        out,
                        "{}\t{}\t{}\t{}\t{}",
                        key_to_string(key),
                        choice,
                        d.f,
                        d.n,
                        d.strength
                    )
                    .expect("write to string");
                }
            }
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.serialize()).map_err(|e| Error::io(path, e))
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Model> {
        let err = |line: usize, message: String| Error::ModelFormat {
            source_name: source_name.to_string(),
            line,
            message,
        };

        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.trim_end() == MODEL_HEADER => {}
            Some((_, header)) => {
                return Err(err(1, format!("expected {MODEL_HEADER:?}, found {header:?}")))
            }
            None => return Err(err(1, "empty file".to_string())),
        }

        let mut model = Model {
            unigram: DecisionTable::new(1),
            bigram: DecisionTable::new(2),
            trigram: DecisionTable::new(3),
        };
        let mut pending: BTreeMap<(usize, Vec<Genotype>), Vec<Decision>> = BTreeMap::new();
        let mut seen_sections = Vec::new();
        let mut current_order: Option<usize> = None;

        for (idx, raw) in lines {
            let line_no = idx + 1;
            let line = raw.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            if let Some(order) = match line {
                "[UNIGRAM]" => Some(1),
                "[BIGRAM]" => Some(2),
                "[TRIGRAM]" => Some(3),
                _ => None,
            } {
                if seen_sections.contains(&order) {
                    return Err(err(line_no, format!("duplicate section {line}")));
                }
                seen_sections.push(order);
                current_order = Some(order);
                continue;
            }
            let Some(order) = current_order else {
                return Err(err(line_no, "row before any section header".to_string()));
            };

            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 5 {
                return Err(err(
                    line_no,
                    format!("expected 5 tab-separated fields, found {}", fields.len()),
                ));
            }
            let key = fields[0]
                .split('|')
                .map(|part| {
                    let tags = part
                        .split('+')
                        .map(Tag::parse)
                        .collect::<Result<Vec<_>>>()?;
                    Genotype::new(tags)
                })
                .collect::<Result<Vec<_>>>()
                .map_err(|e| err(line_no, e.to_string()))?;
            if key.len() != order {
                return Err(err(
                    line_no,
                    format!("key of length {} in an order-{order} section", key.len()),
                ));
            }
            let choice = fields[1]
                .split_whitespace()
                .map(Tag::parse)
                .collect::<Result<Vec<_>>>()
                .map_err(|e| err(line_no, e.to_string()))?;
            if choice.len() != order {
                return Err(err(
                    line_no,
                    format!("choice of length {} in an order-{order} section", choice.len()),
                ));
            }
            for (tag, genotype) in choice.iter().zip(&key) {
                if !genotype.contains(tag) {
                    return Err(err(
                        line_no,
                        format!("choice tag {tag} is not in its genotype {genotype}"),
                    ));
                }
            }
            let f: u64 = fields[2]
                .parse()
                .map_err(|_| err(line_no, format!("bad count f {:?}", fields[2])))?;
            let n: u64 = fields[3]
                .parse()
                .map_err(|_| err(line_no, format!("bad count n {:?}", fields[3])))?;
            let stored: f64 = fields[4]
                .parse()
                .map_err(|_| err(line_no, format!("bad strength {:?}", fields[4])))?;
            let strength =
                strength_formula(f, n).map_err(|e| err(line_no, e.to_string()))?;
            if (strength - stored).abs() > 1e-9 {
                return Err(err(
                    line_no,
                    format!("stored strength {stored} does not match recomputed {strength}"),
                ));
            }
            let row = pending.entry((order, key.clone())).or_default();
            if row.iter().any(|d| d.choice == choice) {
                return Err(err(line_no, "duplicate decision for this key".to_string()));
            }
            row.push(Decision {
                key,
                choice,
                f,
                n,
                strength,
            });
        }

        for ((order, key), decisions) in pending {
            let n = decisions[0].n;
            let f_sum: u64 = decisions.iter().map(|d| d.f).sum();
            if decisions.iter().any(|d| d.n != n) || f_sum != n {
                return Err(Error::ModelFormat {
                    source_name: source_name.to_string(),
                    line: 0,
                    message: format!(
                        "decisions for key {} do not share a consistent n (sum f = {f_sum})",
                        key_to_string(&key)
                    ),
                });
            }
            match order {
                1 => model.unigram.insert_row(key, decisions),
                2 => model.bigram.insert_row(key, decisions),
                _ => model.trigram.insert_row(key, decisions),
            }
        }
        Ok(model)
    }

    pub fn load(path: &Path) -> Result<Model> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Model::parse(&text, &path.display().to_string())
    }
}

/// Builds the key of current candidate genotypes for a token window.
pub fn window_key(tokens: &[AnalyzedToken]) -> Vec<Genotype> {
    tokens.iter().map(|t| t.candidates.clone()).collect()
}
