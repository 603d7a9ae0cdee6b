//! Morphological analysis: assigns a genotype to every token.
//!
//! Analysis is an exact-match dictionary lookup on the transliterated
//! surface form, augmented by dynamic proper-noun dictionaries and an
//! open-class guess for unknown lowercase words. Inflected forms are
//! enumerated in the lexicon file, so lookup behaves like a full
//! morphological analyzer over the shipped vocabulary.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::preprocess::{
    detransliterate, restore_accents, transliterate, RawToken, Sentence, MARKER_BEGIN,
    MARKER_BEGIN_TAG, MARKER_END, MARKER_END_TAG,
};
use crate::tag::{Genotype, Tag, TagsetMap};

/// Surface form -> genotype dictionary, keyed on the 7-bit transliterated
/// form. Lookup is case-sensitive; capitalization handling happens in
/// [`analyze`].
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, Genotype>,
    compound_keys: BTreeSet<String>,
}

impl Lexicon {
    pub fn new() -> Lexicon {
        Lexicon::default()
    }

    /// Merges the tags into any existing entry for the surface.
    pub fn insert(&mut self, surface: &str, genotype: Genotype) {
        if surface.contains('_') {
            self.compound_keys.insert(surface.to_string());
        }
        match self.entries.get_mut(surface) {
            Some(existing) => {
                let mut tags = existing.tags().to_vec();
                tags.extend(genotype.tags().iter().cloned());
                *existing = Genotype::new(tags).expect("merged entry non-empty");
            }
            None => {
                self.entries.insert(surface.to_string(), genotype);
            }
        }
    }

    pub fn get(&self, surface: &str) -> Option<&Genotype> {
        self.entries.get(surface)
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.entries.contains_key(surface)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Multiword keys (containing `_`), used for compound joining.
    pub fn compound_keys(&self) -> &BTreeSet<String> {
        &self.compound_keys
    }

    /// One entry per line: `surface<TAB>TAG1 TAG2 ...`, `#` comments,
    /// duplicate surfaces merge their tag sets.
    pub fn parse(text: &str, source_name: &str) -> Result<Lexicon> {
        let mut lexicon = Lexicon::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (surface, tags) = line.split_once('\t').ok_or_else(|| Error::LexiconParse {
                source_name: source_name.to_string(),
                line: line_no,
                message: "expected surface<TAB>TAG1 TAG2 ...".to_string(),
            })?;
            let surface = surface.trim();
            if surface.is_empty() {
                return Err(Error::LexiconParse {
                    source_name: source_name.to_string(),
                    line: line_no,
                    message: "empty surface form".to_string(),
                });
            }
            validate_surface(surface).map_err(|message| Error::LexiconParse {
                source_name: source_name.to_string(),
                line: line_no,
                message,
            })?;
            let genotype = Genotype::parse_list(tags).map_err(|e| Error::LexiconParse {
                source_name: source_name.to_string(),
                line: line_no,
                message: e.to_string(),
            })?;
            lexicon.insert(surface, genotype);
        }
        Ok(lexicon)
    }

    pub fn load(path: &Path) -> Result<Lexicon> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Lexicon::parse(&text, &path.display().to_string())
    }
}

/// Checks that a surface form is in stable 7-bit transliterated form:
/// detransliterating and re-transliterating must reproduce it exactly.
/// Stability is what keeps diacritic markers unambiguous with real
/// apostrophes: a marker that survives detransliteration never forms an
/// accent pair with the letter before it (elision apostrophes follow
/// consonants or `u`, and `u'` is not an accent).
fn validate_surface(surface: &str) -> std::result::Result<(), String> {
    let plain = detransliterate(surface);
    if transliterate(&plain) != surface {
        return Err(format!(
            "surface {surface:?} is not in stable transliterated form (expected {:?})",
            transliterate(&plain)
        ));
    }
    Ok(())
}

/// Growable set of surfaces treated as proper nouns. Insertion-only during
/// a run; membership queries never mutate.
#[derive(Debug, Clone, Default)]
pub struct ProperNounDict {
    names: BTreeSet<String>,
}

impl ProperNounDict {
    pub fn new() -> ProperNounDict {
        ProperNounDict::default()
    }

    /// Idempotent; returns true when the word was new.
    pub fn insert(&mut self, word: &str) -> bool {
        self.names.insert(word.to_string())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.names.contains(word)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &String> {
        self.names.iter()
    }

    /// One surface per line.
    pub fn load(path: &Path) -> Result<ProperNounDict> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut dict = ProperNounDict::new();
        for line in text.lines() {
            let line = line.trim();
            if !line.is_empty() && !line.starts_with('#') {
                dict.insert(line);
            }
        }
        Ok(dict)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for name in &self.names {
            out.push_str(name);
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

pub fn learn_proper_noun(word: &str, dict: &mut ProperNounDict) {
    dict.insert(word);
}

/// A token with its genotype and the current state of disambiguation.
/// `candidates` is always a non-empty subset of `genotype`; the token is
/// resolved when exactly one candidate remains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyzedToken {
    pub surface: String,
    pub genotype: Genotype,
    pub candidates: Genotype,
    pub gold: Option<Tag>,
}

impl AnalyzedToken {
    pub fn new(surface: impl Into<String>, genotype: Genotype) -> AnalyzedToken {
        AnalyzedToken {
            surface: surface.into(),
            candidates: genotype.clone(),
            genotype,
            gold: None,
        }
    }

    pub fn with_gold(mut self, gold: Tag) -> AnalyzedToken {
        self.gold = Some(gold);
        self
    }

    pub fn is_marker(&self) -> bool {
        self.surface == MARKER_BEGIN || self.surface == MARKER_END
    }

    pub fn resolved(&self) -> bool {
        self.candidates.is_single()
    }

    pub fn resolved_tag(&self) -> Option<&Tag> {
        if self.resolved() {
            self.candidates.tags().first()
        } else {
            None
        }
    }

    /// Resolves the token to a single candidate; the tag must already be a
    /// candidate, keeping disambiguation monotone.
    pub fn resolve_to(&mut self, tag: &Tag) {
        debug_assert!(self.candidates.contains(tag), "tag not among candidates");
        self.candidates = Genotype::single(tag.clone());
    }

    /// Applies a tagset mapping to both the genotype and the candidates;
    /// collapsing candidates may resolve the token.
    pub fn reduce(&mut self, map: &TagsetMap) {
        self.genotype = map.reduce_genotype(&self.genotype);
        self.candidates = map.reduce_genotype(&self.candidates);
        if let Some(gold) = &self.gold {
            self.gold = Some(map.reduce_tag(gold));
        }
    }
}

impl fmt::Display for AnalyzedToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}", self.surface, self.candidates)
    }
}

/// Suffix-based guesses for unknown words, longest suffix first.
/// Optional and off by default.
#[derive(Debug, Clone, Default)]
pub struct SuffixRules {
    rules: Vec<(String, Genotype)>,
}

impl SuffixRules {
    pub fn parse(text: &str, source_name: &str) -> Result<SuffixRules> {
        let mut rules: Vec<(String, Genotype)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (suffix, tags) = line.split_once('\t').ok_or_else(|| Error::LexiconParse {
                source_name: source_name.to_string(),
                line: idx + 1,
                message: "expected SUFFIX<TAB>TAG1 TAG2 ...".to_string(),
            })?;
            let genotype = Genotype::parse_list(tags).map_err(|e| Error::LexiconParse {
                source_name: source_name.to_string(),
                line: idx + 1,
                message: e.to_string(),
            })?;
            rules.push((suffix.trim().to_string(), genotype));
        }
        rules.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
        Ok(SuffixRules { rules })
    }

    pub fn load(path: &Path) -> Result<SuffixRules> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SuffixRules::parse(&text, &path.display().to_string())
    }

    pub fn guess(&self, surface: &str) -> Option<&Genotype> {
        self.rules
            .iter()
            .find(|(suffix, _)| surface.ends_with(suffix))
            .map(|(_, g)| g)
    }
}

#[derive(Debug, Clone)]
pub struct AnalyzerOptions {
    /// Tag given to proper nouns and acronyms.
    pub proper_noun_tag: Tag,
    /// Tag given to punctuation tokens absent from the lexicon.
    pub punctuation_tag: Tag,
    /// Open-class genotype for unknown lowercase words.
    pub guess_genotype: Genotype,
    pub suffix_rules: Option<SuffixRules>,
}

impl Default for AnalyzerOptions {
    fn default() -> Self {
        AnalyzerOptions {
            proper_noun_tag: Tag::parse("U").unwrap(),
            punctuation_tag: Tag::parse(".").unwrap(),
            guess_genotype: Genotype::parse_list("NFS NMS JFS JMS V").unwrap(),
            suffix_rules: None,
        }
    }
}

fn is_all_caps(surface: &str) -> bool {
    let letters: Vec<char> = surface.chars().filter(|c| c.is_alphabetic()).collect();
    letters.len() >= 2 && letters.iter().all(|c| c.is_uppercase())
}

fn is_punctuation_surface(surface: &str) -> bool {
    !surface.is_empty() && !surface.chars().any(|c| c.is_alphanumeric())
}

fn lowercase_first(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_lowercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Accent-restituted lookup key: the surface is taken back to 8-bit form,
/// run through restitution, and transliterated again.
fn restituted(surface: &str) -> String {
    transliterate(&restore_accents(&detransliterate(surface)))
}

/// Assigns a genotype to one preprocessed token. Analysis is total: every
/// token receives a non-empty genotype.
///
/// - known lowercase words get their lexicon genotype;
/// - capitalized words get the lexicon genotype (trying accent restitution,
///   and for sentence-initial tokens the lowercased form too) plus the
///   proper-noun tag; unknown ones become proper nouns and are learned;
/// - all-caps words are lowercased after the first letter before lookup;
/// - unknown lowercase words receive the open-class guess genotype.
pub fn analyze(
    token: &RawToken,
    lexicon: &Lexicon,
    opts: &AnalyzerOptions,
    learned: &ProperNounDict,
    run: &mut ProperNounDict,
) -> AnalyzedToken {
    if token.surface == MARKER_BEGIN {
        let tag = Tag::parse(MARKER_BEGIN_TAG).unwrap();
        return AnalyzedToken::new(MARKER_BEGIN, Genotype::single(tag));
    }
    if token.surface == MARKER_END {
        let tag = Tag::parse(MARKER_END_TAG).unwrap();
        return AnalyzedToken::new(MARKER_END, Genotype::single(tag));
    }

    let surface = token.surface.as_str();
    let norm = if is_all_caps(surface) {
        let mut chars = surface.chars();
        match chars.next() {
            Some(first) => first.to_string() + &chars.as_str().to_lowercase(),
            None => String::new(),
        }
    } else {
        surface.to_string()
    };

    if !token.capitalized {
        if let Some(genotype) = lexicon.get(&norm) {
            return AnalyzedToken::new(surface, genotype.clone());
        }
        if is_punctuation_surface(surface) {
            return AnalyzedToken::new(surface, Genotype::single(opts.punctuation_tag.clone()));
        }
        if let Some(rules) = &opts.suffix_rules {
            if let Some(genotype) = rules.guess(&norm) {
                return AnalyzedToken::new(surface, genotype.clone());
            }
        }
        return AnalyzedToken::new(surface, opts.guess_genotype.clone());
    }

    // Capitalized: candidate lookup keys in preference order.
    let keys: Vec<String> = if token.sentence_initial {
        vec![
            norm.clone(),
            restituted(&norm),
            lowercase_first(&norm),
            lowercase_first(&restituted(&norm)),
        ]
    } else {
        vec![norm.clone(), restituted(&norm)]
    };
    for key in keys {
        if let Some(genotype) = lexicon.get(&key) {
            let genotype = genotype.with_tag(opts.proper_noun_tag.clone());
            return AnalyzedToken::new(surface, genotype);
        }
    }

    // Unknown capitalized word or acronym: proper noun, learned on the fly.
    if !learned.contains(surface) {
        run.insert(surface);
    }
    AnalyzedToken::new(surface, Genotype::single(opts.proper_noun_tag.clone()))
}

/// Analyzes every token of a sentence.
pub fn analyze_sentence(
    sentence: &Sentence,
    lexicon: &Lexicon,
    opts: &AnalyzerOptions,
    learned: &ProperNounDict,
    run: &mut ProperNounDict,
) -> Vec<AnalyzedToken> {
    sentence
        .tokens
        .iter()
        .map(|t| analyze(t, lexicon, opts, learned, run))
        .collect()
}

/// First pass of the deterministic two-pass mode: collects the proper
/// nouns a full analysis would learn, without keeping the analyses.
pub fn collect_proper_nouns(
    sentences: &[Sentence],
    lexicon: &Lexicon,
    opts: &AnalyzerOptions,
    learned: &ProperNounDict,
) -> ProperNounDict {
    let mut run = ProperNounDict::new();
    for sentence in sentences {
        for token in &sentence.tokens {
            analyze(token, lexicon, opts, learned, &mut run);
        }
    }
    run
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::{preprocess, PreprocessOptions};

    const SAMPLE: &str = "\
le\tBD3S RDM
la\tBD3S NMS RDF
moyenne\tJFS NFS V1SPI V1SPS V2SPM V3SPI V3SPS
e'cole\tNFS
uranium\tNMS
Jean\tNMS
.\t.
";

    fn lexicon() -> Lexicon {
        Lexicon::parse(SAMPLE, "sample").unwrap()
    }

    fn analyze_one(token: RawToken, lex: &Lexicon) -> AnalyzedToken {
        let mut run = ProperNounDict::new();
        analyze(
            &token,
            lex,
            &AnalyzerOptions::default(),
            &ProperNounDict::new(),
            &mut run,
        )
    }

    fn word(surface: &str) -> RawToken {
        let mut t = RawToken::new(surface);
        t.position = 2; // mid-sentence
        t
    }

    fn initial(surface: &str) -> RawToken {
        let mut t = RawToken::new(surface);
        t.position = 1;
        t.sentence_initial = true;
        t
    }

    #[test]
    fn lexicon_parses_and_merges_duplicates() {
        let lex = Lexicon::parse("x\tA\nx\tP\n", "dup").unwrap();
        assert_eq!(lex.get("x").unwrap(), &Genotype::parse_list("A P").unwrap());
    }

    #[test]
    fn lexicon_rejects_line_without_tab() {
        let err = Lexicon::parse("le BD3S RDM\n", "bad").unwrap_err();
        assert!(err.to_string().contains("bad:1"));
    }

    #[test]
    fn lexicon_rejects_untransliterated_surfaces() {
        let err = Lexicon::parse("école\tNFS\n", "bad").unwrap_err();
        assert!(err.to_string().contains("transliterated"));
    }

    #[test]
    fn lexicon_rejects_raw_accented_surfaces() {
        // "mé" must be written as "me'"; the raw form is not stable
        let err = Lexicon::parse("mé\tNFS\n", "bad").unwrap_err();
        assert!(err.to_string().contains("transliterated"));
    }

    #[test]
    fn lexicon_accepts_elision_apostrophes_and_accent_markers() {
        // l' and qu' carry real apostrophes; co^te's carries accent markers
        let lex = Lexicon::parse("l'\tBD3S RDM\nqu'\tCS E\nco^te's\tNMP\n", "ok").unwrap();
        assert_eq!(lex.len(), 3);
    }

    #[test]
    fn known_word_gets_lexicon_genotype() {
        let tok = analyze_one(word("moyenne"), &lexicon());
        assert_eq!(
            tok.genotype,
            Genotype::parse_list("JFS NFS V1SPI V1SPS V2SPM V3SPI V3SPS").unwrap()
        );
        assert!(!tok.resolved());
    }

    #[test]
    fn unknown_capitalized_word_becomes_proper_noun() {
        let lex = lexicon();
        let mut run = ProperNounDict::new();
        let tok = analyze(
            &word("Dupont"),
            &lex,
            &AnalyzerOptions::default(),
            &ProperNounDict::new(),
            &mut run,
        );
        assert_eq!(tok.genotype, Genotype::parse_list("U").unwrap());
        assert!(run.contains("Dupont"));
    }

    #[test]
    fn proper_noun_learning_is_idempotent() {
        let mut dict = ProperNounDict::new();
        learn_proper_noun("Dupont", &mut dict);
        learn_proper_noun("Dupont", &mut dict);
        assert_eq!(dict.len(), 1);
    }

    #[test]
    fn all_caps_acronym_becomes_proper_noun() {
        let lex = lexicon();
        let mut run = ProperNounDict::new();
        let tok = analyze(
            &word("SNCF"),
            &lex,
            &AnalyzerOptions::default(),
            &ProperNounDict::new(),
            &mut run,
        );
        assert_eq!(tok.genotype, Genotype::parse_list("U").unwrap());
        assert!(run.contains("SNCF"));
    }

    #[test]
    fn sentence_initial_capitalized_word_takes_lowercase_lookup_plus_u() {
        let tok = analyze_one(initial("La"), &lexicon());
        assert_eq!(tok.genotype, Genotype::parse_list("BD3S NMS RDF U").unwrap());
    }

    #[test]
    fn sentence_initial_lookup_tries_accent_restitution() {
        let tok = analyze_one(initial("Ecole"), &lexicon());
        assert_eq!(tok.genotype, Genotype::parse_list("NFS U").unwrap());
    }

    #[test]
    fn capitalized_known_word_mid_sentence_adds_u() {
        // "Jean" is listed capitalized in the lexicon
        let tok = analyze_one(word("Jean"), &lexicon());
        assert_eq!(tok.genotype, Genotype::parse_list("NMS U").unwrap());
    }

    #[test]
    fn capitalized_unknown_mid_sentence_ignores_lowercase_entry() {
        // mid-sentence capitalization signals a proper noun even though the
        // lowercase form is a known word
        let tok = analyze_one(word("Moyenne"), &lexicon());
        assert_eq!(tok.genotype, Genotype::parse_list("U").unwrap());
    }

    #[test]
    fn unknown_lowercase_word_gets_open_class_guess() {
        let tok = analyze_one(word("zorgluber"), &lexicon());
        assert_eq!(tok.genotype, AnalyzerOptions::default().guess_genotype);
    }

    #[test]
    fn unknown_punctuation_falls_back_to_punctuation_tag() {
        let tok = analyze_one(word(";"), &lexicon());
        assert_eq!(tok.genotype, Genotype::parse_list(".").unwrap());
    }

    #[test]
    fn markers_carry_their_own_tags() {
        let lex = lexicon();
        let sentences = preprocess("Il dort.", &PreprocessOptions::default(), &BTreeSet::new());
        let mut run = ProperNounDict::new();
        let analyzed = analyze_sentence(
            &sentences[0],
            &lex,
            &AnalyzerOptions::default(),
            &ProperNounDict::new(),
            &mut run,
        );
        assert_eq!(analyzed[0].candidates, Genotype::parse_list("^").unwrap());
        assert_eq!(
            analyzed.last().unwrap().candidates,
            Genotype::parse_list("$").unwrap()
        );
    }

    #[test]
    fn suffix_rules_apply_before_generic_guess() {
        let rules = SuffixRules::parse("ment\tA\n", "suffixes").unwrap();
        let opts = AnalyzerOptions {
            suffix_rules: Some(rules),
            ..AnalyzerOptions::default()
        };
        let mut run = ProperNounDict::new();
        let tok = analyze(
            &word("rapidement"),
            &lexicon(),
            &opts,
            &ProperNounDict::new(),
            &mut run,
        );
        assert_eq!(tok.genotype, Genotype::parse_list("A").unwrap());
    }
}
