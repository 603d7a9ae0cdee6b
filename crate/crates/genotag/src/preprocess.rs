//! Text preprocessing: sentence segmentation, compound joining, clitic
//! splitting, accent restitution, and reversible 7-bit transliteration.
//!
//! Downstream modules operate on the transliterated form, where each
//! accented letter is written as its base letter followed by a diacritic
//! marker (`côtés` -> `co^te's`). The marking is unambiguous with respect
//! to the French apostrophe: accent markers follow vowels (the cedilla
//! marker follows `c`), apostrophes follow consonants.

use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};

/// Surface of the sentence-begin pseudo-token (tag `^`).
pub const MARKER_BEGIN: &str = "<S>";
/// Surface of the sentence-end pseudo-token (tag `$`).
pub const MARKER_END: &str = "</S>";
/// Tag carried by the begin marker.
pub const MARKER_BEGIN_TAG: &str = "^";
/// Tag carried by the end marker.
pub const MARKER_END_TAG: &str = "$";

/// Diacritic markers used by the 7-bit transliteration.
pub const DIACRITIC_MARKERS: [char; 5] = ['\'', '`', '^', '"', ','];

/// accented letter -> (base letter, marker)
const TRANSLITERATION: &[(char, char, char)] = &[
    ('à', 'a', '`'),
    ('â', 'a', '^'),
    ('ç', 'c', ','),
    ('é', 'e', '\''),
    ('è', 'e', '`'),
    ('ê', 'e', '^'),
    ('ë', 'e', '"'),
    ('î', 'i', '^'),
    ('ï', 'i', '"'),
    ('ô', 'o', '^'),
    ('ù', 'u', '`'),
    ('û', 'u', '^'),
    ('ü', 'u', '"'),
    ('ÿ', 'y', '"'),
    ('À', 'A', '`'),
    ('Â', 'A', '^'),
    ('Ç', 'C', ','),
    ('É', 'E', '\''),
    ('È', 'E', '`'),
    ('Ê', 'E', '^'),
    ('Ë', 'E', '"'),
    ('Î', 'I', '^'),
    ('Ï', 'I', '"'),
    ('Ô', 'O', '^'),
    ('Ù', 'U', '`'),
    ('Û', 'U', '^'),
    ('Ü', 'U', '"'),
    ('Ÿ', 'Y', '"'),
];

/// Consonants and consonant clusters of the sentence-initial `ECV` accent
/// restitution pattern. Two-letter clusters are tried before single letters.
const ECV_CLUSTERS: &[&str] = &[
    "bl", "br", "ch", "cl", "cr", "dl", "dr", "fl", "fr", "gl", "gr", "ph", "pl", "pr", "sl",
    "sr", "tl", "tr", "vl", "vr",
];
const ECV_CONSONANTS: &[&str] = &[
    "b", "c", "d", "f", "g", "h", "j", "l", "m", "n", "p", "q", "r", "s", "t", "v", "z",
];
const ECV_VOWELS: [char; 6] = ['a', 'e', 'i', 'o', 'u', 'y'];

/// Word prefixes that take an elision apostrophe (l'appelle -> l' appelle).
/// "aujourd'hui" stays whole because "aujourd" is not among them.
const ELISION_PREFIXES: &[&str] = &[
    "c", "d", "j", "l", "m", "n", "s", "t", "qu", "jusqu", "lorsqu", "puisqu", "quoiqu",
];

/// Dash-attached personal pronouns split off during tokenization.
pub const DEFAULT_CLITIC_PRONOUNS: &[&str] = &[
    "je", "tu", "il", "elle", "on", "nous", "vous", "ils", "elles", "ce", "t", "moi", "toi",
    "le", "la", "lui", "y", "en",
];

/// Abbreviations whose trailing period does not end a sentence.
pub const DEFAULT_ABBREVIATIONS: &[&str] = &[
    "M.", "MM.", "Mme.", "Mmes.", "Mlle.", "Mlles.", "Dr.", "Me.", "Mgr.", "St.", "Ste.",
    "cf.", "etc.", "ex.", "chap.", "vol.", "art.", "p.",
];

#[derive(Debug, Clone)]
pub struct PreprocessOptions {
    pub abbreviations: Vec<String>,
    pub clitic_pronouns: BTreeSet<String>,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions {
            abbreviations: DEFAULT_ABBREVIATIONS.iter().map(|s| s.to_string()).collect(),
            clitic_pronouns: DEFAULT_CLITIC_PRONOUNS
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

/// One lexical token of a sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawToken {
    pub surface: String,
    /// Index within the sentence, marker tokens included.
    pub position: usize,
    /// True for the first real token of the sentence.
    pub sentence_initial: bool,
    /// True when the surface starts with an uppercase letter.
    pub capitalized: bool,
}

impl RawToken {
    pub fn new(surface: impl Into<String>) -> RawToken {
        let surface = surface.into();
        let capitalized = surface.chars().next().is_some_and(|c| c.is_uppercase());
        RawToken {
            surface,
            position: 0,
            sentence_initial: false,
            capitalized,
        }
    }

    pub fn is_marker(&self) -> bool {
        self.surface == MARKER_BEGIN || self.surface == MARKER_END
    }
}

/// A sentence bracketed by exactly one begin marker at index 0 and one end
/// marker at the last index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<RawToken>,
}

impl Sentence {
    /// Wraps real tokens with the boundary markers and indexes everything.
    pub fn from_words<I, S>(words: I) -> Sentence
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut tokens = vec![RawToken::new(MARKER_BEGIN)];
        tokens.extend(words.into_iter().map(|w| RawToken::new(w)));
        tokens.push(RawToken::new(MARKER_END));
        reindex(&mut tokens);
        Sentence { tokens }
    }

    /// Tokens without the boundary markers.
    pub fn real_tokens(&self) -> impl Iterator<Item = &RawToken> {
        self.tokens.iter().filter(|t| !t.is_marker())
    }

    pub fn real_token_count(&self) -> usize {
        self.real_tokens().count()
    }
}

fn reindex(tokens: &mut [RawToken]) {
    let mut seen_real = false;
    for (i, tok) in tokens.iter_mut().enumerate() {
        tok.position = i;
        let marker = tok.surface == MARKER_BEGIN || tok.surface == MARKER_END;
        tok.sentence_initial = !marker && !seen_real;
        if !marker {
            seen_real = true;
            tok.capitalized = tok.surface.chars().next().is_some_and(|c| c.is_uppercase());
        } else {
            tok.capitalized = false;
        }
    }
}

fn is_splittable_punct(c: char) -> bool {
    matches!(
        c,
        '.' | ','
            | ';'
            | ':'
            | '!'
            | '?'
            | '('
            | ')'
            | '['
            | ']'
            | '{'
            | '}'
            | '«'
            | '»'
            | '"'
            | '“'
            | '”'
            | '…'
            | '—'
            | '–'
    )
}

fn is_abbreviation(s: &str, opts: &PreprocessOptions) -> bool {
    if opts.abbreviations.iter().any(|a| a == s) {
        return true;
    }
    // single-letter initials: "J." in "J. Dupont"
    let mut chars = s.chars();
    matches!((chars.next(), chars.next(), chars.next()),
        (Some(first), Some('.'), None) if first.is_uppercase() && first.is_alphabetic())
}

fn is_terminal_punct(tok: &str, opts: &PreprocessOptions) -> bool {
    !tok.is_empty()
        && !is_abbreviation(tok, opts)
        && tok.chars().all(|c| matches!(c, '.' | '!' | '?' | '…'))
}

fn split_elisions(core: &str, out: &mut Vec<String>) {
    if let Some(apos) = core.find('\'') {
        let prefix = &core[..apos];
        let rest = &core[apos + 1..];
        let rest_starts_letter = rest.chars().next().is_some_and(|c| c.is_alphabetic());
        if rest_starts_letter && ELISION_PREFIXES.contains(&prefix.to_lowercase().as_str()) {
            out.push(core[..apos + 1].to_string());
            split_elisions(rest, out);
            return;
        }
    }
    if !core.is_empty() {
        out.push(core.to_string());
    }
}

/// Splits one whitespace-delimited chunk into tokens: leading and trailing
/// punctuation runs become their own tokens, elision apostrophes split the
/// core, abbreviations keep their period.
fn split_chunk(chunk: &str, opts: &PreprocessOptions) -> Vec<String> {
    let mut lead: Vec<String> = Vec::new();
    let mut trail_rev: Vec<String> = Vec::new();
    let mut core = chunk;

    loop {
        if core.is_empty() || is_abbreviation(core, opts) {
            break;
        }
        let first = core.chars().next().unwrap();
        if !is_splittable_punct(first) {
            break;
        }
        let run: usize = core
            .chars()
            .take_while(|&c| c == first)
            .map(char::len_utf8)
            .sum();
        lead.push(core[..run].to_string());
        core = &core[run..];
    }
    loop {
        if core.is_empty() || is_abbreviation(core, opts) {
            break;
        }
        let last = core.chars().last().unwrap();
        if !is_splittable_punct(last) {
            break;
        }
        let run_chars = core.chars().rev().take_while(|&c| c == last).count();
        let cut = core
            .char_indices()
            .rev()
            .take(run_chars)
            .last()
            .map(|(i, _)| i)
            .unwrap();
        trail_rev.push(core[cut..].to_string());
        core = &core[..cut];
    }

    let mut out = lead;
    split_elisions(core, &mut out);
    out.extend(trail_rev.into_iter().rev());
    out
}

/// Splits raw text into marker-bracketed sentences. Terminal punctuation
/// (`.` `!` `?` and ellipses) and paragraph breaks close a sentence;
/// punctuation marks come out as their own tokens. Empty input yields no
/// sentences.
pub fn segment_sentences(text: &str, opts: &PreprocessOptions) -> Vec<Sentence> {
    let text = text.replace('\u{2019}', "'");
    let mut sentences = Vec::new();
    let mut current: Vec<String> = Vec::new();

    let close = |sentences: &mut Vec<Sentence>, current: &mut Vec<String>| {
        if !current.is_empty() {
            sentences.push(Sentence::from_words(current.drain(..)));
        }
    };

    for line in text.lines() {
        if line.trim().is_empty() {
            close(&mut sentences, &mut current);
            continue;
        }
        for chunk in line.split_whitespace() {
            for tok in split_chunk(chunk, opts) {
                let terminal = is_terminal_punct(&tok, opts);
                current.push(tok);
                if terminal {
                    close(&mut sentences, &mut current);
                }
            }
        }
    }
    close(&mut sentences, &mut current);
    sentences
}

fn lowercase_first(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_lowercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Joins adjacent tokens that form a multiword lexicon entry, longest match
/// first. Joined surfaces use `_` between the parts. `compounds` holds the
/// `_`-joined transliterated keys.
pub fn join_compounds(tokens: Vec<RawToken>, compounds: &BTreeSet<String>) -> Vec<RawToken> {
    if compounds.is_empty() {
        return tokens;
    }
    let max_parts = compounds
        .iter()
        .map(|c| c.split('_').count())
        .max()
        .unwrap_or(1);
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        let mut joined: Option<(RawToken, usize)> = None;
        if !tokens[i].is_marker() {
            let avail = tokens.len() - i;
            for len in (2..=max_parts.min(avail)).rev() {
                let window = &tokens[i..i + len];
                if window.iter().any(|t| t.is_marker()) {
                    continue;
                }
                let key = window
                    .iter()
                    .map(|t| transliterate(&t.surface))
                    .collect::<Vec<_>>()
                    .join("_");
                let hit = compounds.contains(&key)
                    || (window[0].capitalized && compounds.contains(&lowercase_first(&key)));
                if hit {
                    let surface = window
                        .iter()
                        .map(|t| t.surface.as_str())
                        .collect::<Vec<_>>()
                        .join("_");
                    joined = Some((RawToken::new(surface), len));
                    break;
                }
            }
        }
        match joined {
            Some((tok, len)) => {
                out.push(tok);
                i += len;
            }
            None => {
                out.push(tokens[i].clone());
                i += 1;
            }
        }
    }
    out
}

/// Splits a dash-joined token when the right part is a personal pronoun
/// (`dit-elle` -> `dit` + `elle`); anything else stays whole, so derived
/// forms like `arrière-grand-père` survive.
pub fn split_clitics(token: &RawToken, pronouns: &BTreeSet<String>) -> Vec<RawToken> {
    fn rec(surface: &str, pronouns: &BTreeSet<String>, out: &mut Vec<RawToken>) {
        if let Some(dash) = surface.rfind('-') {
            let left = &surface[..dash];
            let right = &surface[dash + 1..];
            if !left.is_empty() && !right.is_empty() && pronouns.contains(&right.to_lowercase()) {
                rec(left, pronouns, out);
                out.push(RawToken::new(right));
                return;
            }
        }
        out.push(RawToken::new(surface));
    }
    let mut out = Vec::new();
    rec(&token.surface, pronouns, &mut out);
    out
}

/// Recovers the accent a capitalized word lost: `A` -> `À`, `Etre` ->
/// `Être`, and the `ECV` pattern (`E` + consonant or cluster + vowel) gains
/// an acute accent: `Ecole` -> `École`. The special cases are checked
/// before the general pattern; anything else is returned unchanged.
pub fn restore_accents(word: &str) -> String {
    if word == "A" {
        return "À".to_string();
    }
    if word == "Etre" {
        return "Être".to_string();
    }
    let chars: Vec<char> = word.chars().collect();
    if chars.first() != Some(&'E') {
        return word.to_string();
    }
    let lower: Vec<char> = chars
        .iter()
        .map(|c| c.to_lowercase().next().unwrap_or(*c))
        .collect();
    let consonant_len = if chars.len() >= 3 && ECV_CLUSTERS.contains(&tail_str(&lower, 1, 2).as_str())
    {
        2
    } else if chars.len() >= 2 && ECV_CONSONANTS.contains(&tail_str(&lower, 1, 1).as_str()) {
        1
    } else {
        return word.to_string();
    };
    let vowel_index = 1 + consonant_len;
    if lower.get(vowel_index).is_some_and(|c| ECV_VOWELS.contains(c)) {
        let mut out = String::from('É');
        out.extend(&chars[1..]);
        return out;
    }
    word.to_string()
}

fn tail_str(chars: &[char], start: usize, len: usize) -> String {
    chars.iter().skip(start).take(len).collect()
}

/// 8-bit to 7-bit: every accented letter becomes base letter + marker
/// (acute `'`, grave `` ` ``, circumflex `^`, diaeresis `"`, cedilla `,`).
pub fn transliterate(word: &str) -> String {
    let mut out = String::with_capacity(word.len());
    for c in word.chars() {
        match TRANSLITERATION.iter().find(|(acc, _, _)| *acc == c) {
            Some((_, base, marker)) => {
                out.push(*base);
                out.push(*marker);
            }
            None => out.push(c),
        }
    }
    out
}

/// Exact inverse of [`transliterate`]: a letter followed by a marker that
/// the table knows becomes the accented letter again; everything else is
/// untouched, apostrophes after consonants in particular.
pub fn detransliterate(word: &str) -> String {
    let chars: Vec<char> = word.chars().collect();
    let mut out = String::with_capacity(word.len());
    let mut i = 0;
    while i < chars.len() {
        if i + 1 < chars.len() {
            let pair = TRANSLITERATION
                .iter()
                .find(|(_, base, marker)| *base == chars[i] && *marker == chars[i + 1]);
            if let Some((acc, _, _)) = pair {
                out.push(*acc);
                i += 2;
                continue;
            }
        }
        out.push(chars[i]);
        i += 1;
    }
    out
}

/// Full preprocessing chain: segmentation, compound joining, clitic
/// splitting, then transliteration to the 7-bit working form.
pub fn preprocess(
    text: &str,
    opts: &PreprocessOptions,
    compounds: &BTreeSet<String>,
) -> Vec<Sentence> {
    let mut sentences = segment_sentences(text, opts);
    for sentence in &mut sentences {
        let tokens = std::mem::take(&mut sentence.tokens);
        let tokens = join_compounds(tokens, compounds);
        let mut split: Vec<RawToken> = Vec::with_capacity(tokens.len());
        for tok in &tokens {
            if tok.is_marker() {
                split.push(tok.clone());
            } else {
                split.extend(split_clitics(tok, &opts.clitic_pronouns));
            }
        }
        for tok in &mut split {
            if !tok.is_marker() {
                tok.surface = transliterate(&tok.surface);
            }
        }
        reindex(&mut split);
        sentence.tokens = split;
    }
    sentences
}

/// One token per line, `<S>`/`</S>` emitted explicitly, blank line between
/// sentences.
pub fn to_token_stream(sentences: &[Sentence]) -> String {
    let mut out = String::new();
    for (i, sentence) in sentences.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for tok in &sentence.tokens {
            out.push_str(&tok.surface);
            out.push('\n');
        }
    }
    out
}

/// Plain word list: one entry per line, `#` comments.
pub fn load_word_list(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> PreprocessOptions {
        PreprocessOptions::default()
    }

    fn surfaces(sentence: &Sentence) -> Vec<&str> {
        sentence.tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    #[test]
    fn segments_on_terminal_punctuation() {
        let sentences = segment_sentences("Il dort. Elle lit.", &opts());
        assert_eq!(sentences.len(), 2);
        assert_eq!(surfaces(&sentences[0]), ["<S>", "Il", "dort", ".", "</S>"]);
        assert_eq!(surfaces(&sentences[1]), ["<S>", "Elle", "lit", ".", "</S>"]);
        assert_eq!(sentences[0].real_token_count(), 3);
    }

    #[test]
    fn empty_input_has_no_sentences() {
        assert!(segment_sentences("", &opts()).is_empty());
        assert!(segment_sentences("  \n\n ", &opts()).is_empty());
    }

    #[test]
    fn abbreviation_does_not_split() {
        let sentences = segment_sentences("M. Dupont dort.", &opts());
        assert_eq!(sentences.len(), 1);
        assert_eq!(
            surfaces(&sentences[0]),
            ["<S>", "M.", "Dupont", "dort", ".", "</S>"]
        );
    }

    #[test]
    fn paragraph_break_closes_a_sentence() {
        let sentences = segment_sentences("sans ponctuation\n\nsuite", &opts());
        assert_eq!(sentences.len(), 2);
        assert_eq!(surfaces(&sentences[0]), ["<S>", "sans", "ponctuation", "</S>"]);
    }

    #[test]
    fn question_and_exclamation_close_sentences() {
        let sentences = segment_sentences("Il dort ? Elle lit !", &opts());
        assert_eq!(sentences.len(), 2);
    }

    #[test]
    fn elision_apostrophe_splits_the_token() {
        let sentences = segment_sentences("elle l'appelle.", &opts());
        assert_eq!(
            surfaces(&sentences[0]),
            ["<S>", "elle", "l'", "appelle", ".", "</S>"]
        );
    }

    #[test]
    fn aujourdhui_stays_whole() {
        let sentences = segment_sentences("aujourd'hui", &opts());
        assert_eq!(surfaces(&sentences[0]), ["<S>", "aujourd'hui", "</S>"]);
    }

    #[test]
    fn marker_flags_and_positions() {
        let sentences = segment_sentences("Il dort.", &opts());
        let toks = &sentences[0].tokens;
        assert_eq!(toks[0].position, 0);
        assert!(!toks[0].sentence_initial);
        assert!(toks[1].sentence_initial);
        assert!(toks[1].capitalized);
        assert!(!toks[2].sentence_initial);
    }

    #[test]
    fn join_compounds_uses_longest_match() {
        let compounds: BTreeSet<String> =
            ["bien_que", "a_priori"].iter().map(|s| s.to_string()).collect();
        let toks = vec![RawToken::new("bien"), RawToken::new("que")];
        let joined = join_compounds(toks, &compounds);
        assert_eq!(joined.len(), 1);
        assert_eq!(joined[0].surface, "bien_que");

        let toks = vec![RawToken::new("a"), RawToken::new("priori")];
        assert_eq!(join_compounds(toks, &compounds)[0].surface, "a_priori");

        let toks = vec![RawToken::new("bien"), RawToken::new("dormir")];
        assert_eq!(join_compounds(toks, &compounds).len(), 2);
    }

    #[test]
    fn clitic_split_only_before_pronouns() {
        let pronouns = opts().clitic_pronouns;
        let split = split_clitics(&RawToken::new("dit-elle"), &pronouns);
        let got: Vec<&str> = split.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(got, ["dit", "elle"]);

        let kept = split_clitics(&RawToken::new("arrière-grand-père"), &pronouns);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].surface, "arrière-grand-père");

        // "avions" reads as a noun; it is not in the pronoun list.
        let kept = split_clitics(&RawToken::new("porte-avions"), &pronouns);
        assert_eq!(kept.len(), 1);
    }

    #[test]
    fn clitic_split_recurses_through_euphonic_t() {
        let pronouns = opts().clitic_pronouns;
        let split = split_clitics(&RawToken::new("a-t-elle"), &pronouns);
        let got: Vec<&str> = split.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(got, ["a", "t", "elle"]);
    }

    #[test]
    fn restores_special_case_accents() {
        assert_eq!(restore_accents("A"), "À");
        assert_eq!(restore_accents("Etre"), "Être");
    }

    #[test]
    fn restores_ecv_acute_accent() {
        assert_eq!(restore_accents("Ecole"), "École");
        assert_eq!(restore_accents("Eglise"), "Église");
        assert_eq!(restore_accents("Etat"), "État");
    }

    #[test]
    fn leaves_non_matching_words_alone() {
        assert_eq!(restore_accents("Paris"), "Paris");
        assert_eq!(restore_accents("Et"), "Et"); // no vowel after the consonant
        assert_eq!(restore_accents("Eau"), "Eau"); // vowel, not a consonant
    }

    #[test]
    fn transliterates_the_paper_example() {
        assert_eq!(transliterate("côtés"), "co^te's");
        assert_eq!(transliterate("paris"), "paris");
        assert_eq!(detransliterate("co^te's"), "côtés");
        assert_eq!(detransliterate("e`ve"), "ève");
    }

    #[test]
    fn apostrophe_after_consonant_is_not_an_accent() {
        assert_eq!(detransliterate("l'appelle"), "l'appelle");
        assert_eq!(transliterate("l'appelle"), "l'appelle");
    }

    #[test]
    fn preprocess_emits_seven_bit_tokens() {
        let sentences = preprocess("Les côtés délicats.", &opts(), &BTreeSet::new());
        assert_eq!(
            surfaces(&sentences[0]),
            ["<S>", "Les", "co^te's", "de'licats", ".", "</S>"]
        );
    }

    #[test]
    fn token_stream_format_is_line_oriented() {
        let sentences = segment_sentences("Il dort. Elle lit.", &opts());
        let stream = to_token_stream(&sentences);
        assert_eq!(
            stream,
            "<S>\nIl\ndort\n.\n</S>\n\n<S>\nElle\nlit\n.\n</S>\n"
        );
    }
}
