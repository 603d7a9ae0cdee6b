//! Scoring against gold corpora and corpus-profiling measurements.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::morphology::AnalyzedToken;
use crate::stats::GoldSentence;
use crate::tag::Genotype;

/// Three-way tagging score: every non-marker token is either resolved
/// correctly, resolved incorrectly, or still ambiguous. A token left
/// ambiguous is never credited as correct, even when the gold tag is among
/// its candidates; the share of tokens whose candidate set still contains
/// the gold tag is reported separately as oracle recall.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreReport {
    pub total: u64,
    pub correct: u64,
    pub incorrect: u64,
    pub ambiguous: u64,
    /// Tokens whose candidate set contains the gold tag.
    pub oracle: u64,
}

impl ScoreReport {
    fn pct(&self, count: u64) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            count as f64 / self.total as f64 * 100.0
        }
    }

    pub fn correct_pct(&self) -> f64 {
        self.pct(self.correct)
    }

    pub fn incorrect_pct(&self) -> f64 {
        self.pct(self.incorrect)
    }

    pub fn ambiguous_pct(&self) -> f64 {
        self.pct(self.ambiguous)
    }

    pub fn oracle_pct(&self) -> f64 {
        self.pct(self.oracle)
    }

    pub fn to_tsv(&self) -> String {
        format!(
            "total\tcorrect\tincorrect\tambiguous\tcorrect_pct\tincorrect_pct\tambiguous_pct\toracle_recall_pct\n{}\t{}\t{}\t{}\t{:.2}\t{:.2}\t{:.2}\t{:.2}\n",
            self.total,
            self.correct,
            self.incorrect,
            self.ambiguous,
            self.correct_pct(),
            self.incorrect_pct(),
            self.ambiguous_pct(),
            self.oracle_pct()
        )
    }
}

impl fmt::Display for ScoreReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "total        {:>8}", self.total)?;
        writeln!(
            f,
            "correct      {:>8}  {:>6.2}%",
            self.correct,
            self.correct_pct()
        )?;
        writeln!(
            f,
            "incorrect    {:>8}  {:>6.2}%",
            self.incorrect,
            self.incorrect_pct()
        )?;
        writeln!(
            f,
            "ambiguous    {:>8}  {:>6.2}%",
            self.ambiguous,
            self.ambiguous_pct()
        )?;
        write!(
            f,
            "oracle       {:>8}  {:>6.2}%",
            self.oracle,
            self.oracle_pct()
        )
    }
}

/// Scores system output against a gold corpus. The two token streams must
/// carry the same surfaces in the same order (markers are skipped);
/// otherwise scoring stops at the first mismatch.
pub fn score(system: &[Vec<AnalyzedToken>], gold: &[GoldSentence]) -> Result<ScoreReport> {
    let sys_tokens: Vec<&AnalyzedToken> = system
        .iter()
        .flatten()
        .filter(|t| !t.is_marker())
        .collect();
    let gold_tokens: Vec<_> = gold.iter().flatten().collect();

    let mut report = ScoreReport {
        total: 0,
        correct: 0,
        incorrect: 0,
        ambiguous: 0,
        oracle: 0,
    };
    for (index, (sys, gold)) in sys_tokens.iter().zip(&gold_tokens).enumerate() {
        if sys.surface != gold.surface {
            return Err(Error::Alignment {
                index,
                gold: gold.surface.clone(),
                system: sys.surface.clone(),
            });
        }
        report.total += 1;
        if sys.candidates.contains(&gold.gold) {
            report.oracle += 1;
        }
        match sys.resolved_tag() {
            Some(tag) if *tag == gold.gold => report.correct += 1,
            Some(_) => report.incorrect += 1,
            None => report.ambiguous += 1,
        }
    }
    if sys_tokens.len() != gold_tokens.len() {
        let index = sys_tokens.len().min(gold_tokens.len());
        return Err(Error::Alignment {
            index,
            gold: gold_tokens
                .get(index)
                .map(|t| t.surface.clone())
                .unwrap_or_else(|| "<end of stream>".to_string()),
            system: sys_tokens
                .get(index)
                .map(|t| t.surface.clone())
                .unwrap_or_else(|| "<end of stream>".to_string()),
        });
    }
    Ok(report)
}

/// Distribution of genotype sizes over a morphologically analyzed corpus.
/// Marker and punctuation tokens stay out of the word-level figures.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AmbiguityProfile {
    /// genotype size -> token count
    pub histogram: BTreeMap<usize, u64>,
    pub total_tokens: u64,
    pub total_tags: u64,
}

impl AmbiguityProfile {
    /// Average number of candidate tags per token.
    pub fn ambiguity_factor(&self) -> f64 {
        if self.total_tokens == 0 {
            0.0
        } else {
            self.total_tags as f64 / self.total_tokens as f64
        }
    }

    pub fn percentage(&self, size: usize) -> f64 {
        if self.total_tokens == 0 {
            return 0.0;
        }
        let count = self.histogram.get(&size).copied().unwrap_or(0);
        count as f64 / self.total_tokens as f64 * 100.0
    }
}

impl fmt::Display for AmbiguityProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (size, count) in &self.histogram {
            writeln!(
                f,
                "{size} tag(s)  {count:>8}  {:>6.2}%",
                self.percentage(*size)
            )?;
        }
        writeln!(f, "tokens     {:>8}", self.total_tokens)?;
        writeln!(f, "tags       {:>8}", self.total_tags)?;
        write!(f, "ambiguity factor {:.4}", self.ambiguity_factor())
    }
}

fn is_word_token(token: &AnalyzedToken) -> bool {
    !token.is_marker() && token.surface.chars().any(|c| c.is_alphanumeric())
}

/// Histogram of genotype sizes plus the ambiguity factor for a corpus that
/// has been through morphology.
pub fn ambiguity_profile(analyzed: &[Vec<AnalyzedToken>]) -> AmbiguityProfile {
    let mut profile = AmbiguityProfile::default();
    for token in analyzed.iter().flatten() {
        if !is_word_token(token) {
            continue;
        }
        let size = token.genotype.len();
        *profile.histogram.entry(size).or_insert(0) += 1;
        profile.total_tokens += 1;
        profile.total_tags += size as u64;
    }
    profile
}

/// Reads tagged output back in: `surface<TAB>tag1 [tag2 ...]` per line,
/// blank line between sentences, marker lines skipped when present. The
/// listed tags become both the genotype and the candidate set.
pub fn parse_tagged(text: &str, source_name: &str) -> Result<Vec<Vec<AnalyzedToken>>> {
    let mut sentences = Vec::new();
    let mut current: Vec<AnalyzedToken> = Vec::new();
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
        let (surface, tags) = line.split_once('\t').ok_or_else(|| Error::TrainingData {
            source_name: source_name.to_string(),
            line: line_no,
            message: "expected surface<TAB>tag1 [tag2 ...]".to_string(),
        })?;
        let surface = surface.trim();
        if surface == crate::preprocess::MARKER_BEGIN || surface == crate::preprocess::MARKER_END {
            continue;
        }
        let genotype = Genotype::parse_list(tags).map_err(|e| Error::TrainingData {
            source_name: source_name.to_string(),
            line: line_no,
            message: e.to_string(),
        })?;
        current.push(AnalyzedToken::new(surface, genotype));
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    Ok(sentences)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GrowthPoint {
    pub tokens: usize,
    pub distinct_words: usize,
    pub distinct_genotypes: usize,
}

/// Counts distinct surfaces and distinct genotypes over growing prefixes
/// of the corpus (markers excluded). Checkpoints beyond the corpus length
/// report the final state.
pub fn genotype_growth(analyzed: &[Vec<AnalyzedToken>], checkpoints: &[usize]) -> Vec<GrowthPoint> {
    let mut checkpoints: Vec<usize> = checkpoints.to_vec();
    checkpoints.sort_unstable();
    checkpoints.dedup();

    let mut words: HashSet<&str> = HashSet::new();
    let mut genotypes: HashSet<&Genotype> = HashSet::new();
    let mut seen = 0usize;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut remaining = checkpoints.into_iter().peekable();

    while remaining.peek() == Some(&0) {
        out.push(GrowthPoint {
            tokens: 0,
            distinct_words: 0,
            distinct_genotypes: 0,
        });
        remaining.next();
    }
    for token in analyzed.iter().flatten() {
        if token.is_marker() {
            continue;
        }
        words.insert(token.surface.as_str());
        genotypes.insert(&token.genotype);
        seen += 1;
        while remaining.peek() == Some(&seen) {
            out.push(GrowthPoint {
                tokens: seen,
                distinct_words: words.len(),
                distinct_genotypes: genotypes.len(),
            });
            remaining.next();
        }
    }
    // checkpoints past the end of the corpus report the final state
    for _ in remaining {
        out.push(GrowthPoint {
            tokens: seen,
            distinct_words: words.len(),
            distinct_genotypes: genotypes.len(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::GoldToken;
    use crate::tag::Tag;

    fn t(tag: &str) -> Tag {
        Tag::parse(tag).unwrap()
    }

    fn g(tags: &str) -> Genotype {
        Genotype::parse_list(tags).unwrap()
    }

    fn sys_token(surface: &str, candidates: &str) -> AnalyzedToken {
        let mut tok = AnalyzedToken::new(surface, g(candidates));
        tok.genotype = tok.candidates.clone();
        tok
    }

    fn gold_token(surface: &str, tag: &str) -> GoldToken {
        GoldToken {
            surface: surface.to_string(),
            gold: t(tag),
        }
    }

    #[test]
    fn scores_three_way_classification() {
        let mut system: Vec<AnalyzedToken> = (0..9)
            .map(|i| sys_token(&format!("w{i}"), "A"))
            .collect();
        system.push(sys_token("w9", "A B"));
        let gold: GoldSentence = (0..10).map(|i| gold_token(&format!("w{i}"), "A")).collect();
        let report = score(&[system], &[gold]).unwrap();
        assert_eq!(report.total, 10);
        assert_eq!(report.correct, 9);
        assert_eq!(report.incorrect, 0);
        assert_eq!(report.ambiguous, 1);
        assert!((report.correct_pct() - 90.0).abs() < 1e-9);
        assert!((report.ambiguous_pct() - 10.0).abs() < 1e-9);
        assert_eq!(report.oracle, 10); // the ambiguous token still holds gold
    }

    #[test]
    fn identical_streams_score_perfectly() {
        let system = vec![sys_token("a", "X"), sys_token("b", "Y")];
        let gold = vec![gold_token("a", "X"), gold_token("b", "Y")];
        let report = score(&[system], &[gold]).unwrap();
        assert_eq!(report.correct, 2);
        assert!((report.correct_pct() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn misaligned_streams_are_rejected() {
        let system = vec![sys_token("a", "X"), sys_token("c", "Y")];
        let gold = vec![gold_token("a", "X"), gold_token("b", "Y")];
        let err = score(&[system], &[gold]).unwrap_err();
        match err {
            Error::Alignment { index, .. } => assert_eq!(index, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn length_mismatch_is_an_alignment_error() {
        let system = vec![sys_token("a", "X")];
        let gold = vec![gold_token("a", "X"), gold_token("b", "Y")];
        assert!(score(&[system], &[gold]).is_err());
    }

    #[test]
    fn profile_of_single_unambiguous_token() {
        let profile = ambiguity_profile(&[vec![sys_token("a", "X")]]);
        assert_eq!(profile.total_tokens, 1);
        assert!((profile.ambiguity_factor() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn profile_averages_genotype_sizes() {
        let profile = ambiguity_profile(&[vec![
            sys_token("a", "X"),
            sys_token("b", "X Y Z"),
        ]]);
        assert_eq!(profile.total_tokens, 2);
        assert_eq!(profile.total_tags, 4);
        assert!((profile.ambiguity_factor() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn profile_skips_markers_and_punctuation() {
        let mut marker = sys_token("<S>", "^");
        marker.surface = "<S>".to_string();
        let profile = ambiguity_profile(&[vec![
            marker,
            sys_token("a", "X"),
            sys_token(".", "x"),
        ]]);
        assert_eq!(profile.total_tokens, 1);
    }

    #[test]
    fn growth_of_empty_prefix_is_zero() {
        let points = genotype_growth(&[], &[0]);
        assert_eq!(
            points,
            vec![GrowthPoint {
                tokens: 0,
                distinct_words: 0,
                distinct_genotypes: 0
            }]
        );
    }

    #[test]
    fn growth_of_repeated_word_stays_flat() {
        let sentence: Vec<AnalyzedToken> = (0..5).map(|_| sys_token("a", "X Y")).collect();
        let points = genotype_growth(&[sentence], &[5]);
        assert_eq!(
            points,
            vec![GrowthPoint {
                tokens: 5,
                distinct_words: 1,
                distinct_genotypes: 1
            }]
        );
    }

    #[test]
    fn growth_is_monotone_and_bounded() {
        let sentence = vec![
            sys_token("a", "X"),
            sys_token("b", "X"),
            sys_token("c", "X Y"),
            sys_token("a", "X"),
        ];
        let points = genotype_growth(&[sentence], &[1, 2, 3, 4]);
        for pair in points.windows(2) {
            assert!(pair[1].distinct_words >= pair[0].distinct_words);
            assert!(pair[1].distinct_genotypes >= pair[0].distinct_genotypes);
        }
        for p in &points {
            assert!(p.distinct_genotypes <= p.distinct_words);
            assert!(p.distinct_words <= p.tokens);
        }
    }
}
