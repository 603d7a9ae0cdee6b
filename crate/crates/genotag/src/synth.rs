//! Synthetic corpus generation from a known tag-transition process.
//!
//! Developer tooling for property tests: sentences are drawn from a
//! first-order Markov chain over gold tags, and each tag emits a word
//! whose genotype contains it, preferring ambiguous words. Because the
//! generating process is known, the matching lexicon and the negative
//! rules (the zero-probability transitions) come for free.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::morphology::Lexicon;
use crate::preprocess::{Sentence, MARKER_BEGIN_TAG, MARKER_END_TAG};
use crate::stats::{GoldSentence, GoldToken};
use crate::tag::{Genotype, Tag};

#[derive(Debug, Clone)]
pub struct SynthProcess {
    /// Transition rows, including one for the sentence-begin tag `^`;
    /// the end tag `$` may appear as a target.
    transitions: Vec<(Tag, Vec<(Tag, f64)>)>,
    words: Vec<(String, Genotype)>,
    min_len: usize,
    max_len: usize,
    /// Probability of emitting an ambiguous word when one exists for the tag.
    ambiguous_bias: f64,
}

impl SynthProcess {
    /// A small six-tag process with determiner/noun/verb/adjective/
    /// preposition/adverb structure and heavily ambiguous noun-verb and
    /// adjective-noun word classes.
    pub fn toy() -> SynthProcess {
        let t = |s: &str| Tag::parse(s).unwrap();
        let g = |s: &str| Genotype::parse_list(s).unwrap();
        let row = |from: &str, pairs: &[(&str, f64)]| {
            (
                t(from),
                pairs.iter().map(|(to, w)| (t(to), *w)).collect::<Vec<_>>(),
            )
        };
        SynthProcess {
            transitions: vec![
                row("^", &[("d", 0.50), ("n", 0.20), ("p", 0.20), ("j", 0.10)]),
                row("d", &[("n", 0.75), ("j", 0.25)]),
                row("j", &[("n", 0.80), ("j", 0.10), ("$", 0.10)]),
                row("n", &[("v", 0.40), ("p", 0.25), ("$", 0.30), ("n", 0.05)]),
                row(
                    "v",
                    &[("d", 0.35), ("p", 0.25), ("a", 0.15), ("n", 0.10), ("$", 0.15)],
                ),
                row("p", &[("d", 0.55), ("n", 0.40), ("j", 0.05)]),
                row("a", &[("v", 0.25), ("p", 0.25), ("$", 0.50)]),
            ],
            words: vec![
                ("d0".into(), g("d")),
                ("d1".into(), g("d")),
                ("r0".into(), g("d p")),
                ("n0".into(), g("n")),
                ("n1".into(), g("n")),
                ("m0".into(), g("n v")),
                ("m1".into(), g("n v")),
                ("m2".into(), g("n v")),
                ("q0".into(), g("j n")),
                ("s0".into(), g("j n v")),
                ("v0".into(), g("v")),
                ("j0".into(), g("j")),
                ("p0".into(), g("p")),
                ("p1".into(), g("p")),
                ("a0".into(), g("a")),
            ],
            min_len: 3,
            max_len: 14,
            ambiguous_bias: 0.6,
        }
    }

    /// The toy vocabulary with its genotypes.
    pub fn words(&self) -> &[(String, Genotype)] {
        &self.words
    }

    /// All tags of the process, boundary markers excluded.
    pub fn tags(&self) -> Vec<Tag> {
        self.transitions
            .iter()
            .map(|(from, _)| from.clone())
            .filter(|t| t.as_str() != MARKER_BEGIN_TAG)
            .collect()
    }

    pub fn lexicon(&self) -> Lexicon {
        let mut lexicon = Lexicon::new();
        for (surface, genotype) in &self.words {
            lexicon.insert(surface, genotype.clone());
        }
        lexicon
    }

    /// Rule-file text declaring every zero-probability transition illegal,
    /// one bigram rule per line. Sound by construction: generated corpora
    /// never contain these tag sequences.
    pub fn negative_rules_text(&self) -> String {
        let mut targets: Vec<Tag> = self.tags();
        targets.push(Tag::parse(MARKER_END_TAG).unwrap());
        let mut out = String::new();
        for (from, row) in &self.transitions {
            for target in &targets {
                let weight = row
                    .iter()
                    .find(|(to, _)| to == target)
                    .map(|(_, w)| *w)
                    .unwrap_or(0.0);
                if weight == 0.0 {
                    out.push_str(&format!("{from} {target}\n"));
                }
            }
        }
        out
    }

    fn row(&self, from: &Tag) -> &[(Tag, f64)] {
        self.transitions
            .iter()
            .find(|(f, _)| f == from)
            .map(|(_, row)| row.as_slice())
            .expect("every non-final tag has a transition row")
    }

    fn sample_next(&self, from: &Tag, rng: &mut ChaCha8Rng, allow_end: bool) -> Tag {
        let row = self.row(from);
        loop {
            let total: f64 = row.iter().map(|(_, w)| w).sum();
            let mut x = rng.gen::<f64>() * total;
            let mut picked = &row[row.len() - 1].0;
            for (tag, weight) in row {
                if x < *weight {
                    picked = tag;
                    break;
                }
                x -= weight;
            }
            if allow_end || picked.as_str() != MARKER_END_TAG {
                return picked.clone();
            }
        }
    }

    fn emit_word(&self, tag: &Tag, rng: &mut ChaCha8Rng) -> String {
        let containing: Vec<&(String, Genotype)> = self
            .words
            .iter()
            .filter(|(_, g)| g.contains(tag))
            .collect();
        assert!(!containing.is_empty(), "no word carries tag {tag}");
        let ambiguous: Vec<&&(String, Genotype)> =
            containing.iter().filter(|(_, g)| g.len() > 1).collect();
        if !ambiguous.is_empty() && rng.gen::<f64>() < self.ambiguous_bias {
            ambiguous[rng.gen_range(0..ambiguous.len())].0.clone()
        } else {
            let unambiguous: Vec<&&(String, Genotype)> =
                containing.iter().filter(|(_, g)| g.len() == 1).collect();
            if unambiguous.is_empty() {
                containing[rng.gen_range(0..containing.len())].0.clone()
            } else {
                unambiguous[rng.gen_range(0..unambiguous.len())].0.clone()
            }
        }
    }

    fn can_end(&self, state: &Tag) -> bool {
        self.row(state)
            .iter()
            .any(|(to, w)| to.as_str() == MARKER_END_TAG && *w > 0.0)
    }

    /// Draws a gold-tagged corpus; identical seeds give identical corpora.
    pub fn generate(&self, n_sentences: usize, seed: u64) -> Vec<GoldSentence> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let begin = Tag::parse(MARKER_BEGIN_TAG).unwrap();
        let mut corpus = Vec::with_capacity(n_sentences);
        for _ in 0..n_sentences {
            let mut sentence = GoldSentence::new();
            let mut state = begin.clone();
            loop {
                // Over-length sentences end at the first state from which
                // ending is legal, so no forbidden pair is ever realized.
                if sentence.len() >= self.max_len && self.can_end(&state) {
                    break;
                }
                let allow_end = sentence.len() >= self.min_len;
                let next = self.sample_next(&state, &mut rng, allow_end);
                if next.as_str() == MARKER_END_TAG {
                    break;
                }
                let surface = self.emit_word(&next, &mut rng);
                sentence.push(GoldToken {
                    surface,
                    gold: next.clone(),
                });
                state = next;
            }
            corpus.push(sentence);
        }
        corpus
    }
}

/// Wraps gold sentences as preprocessed sentences, ready for the pipeline.
pub fn sentences_from_gold(corpus: &[GoldSentence]) -> Vec<Sentence> {
    corpus
        .iter()
        .map(|sentence| Sentence::from_words(sentence.iter().map(|t| t.surface.clone())))
        .collect()
}

/// Gold corpus in the token-per-line text format.
pub fn gold_to_text(corpus: &[GoldSentence]) -> String {
    let mut out = String::new();
    for (i, sentence) in corpus.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for token in sentence {
            out.push_str(&token.surface);
            out.push('\t');
            out.push_str(token.gold.as_str());
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic_per_seed() {
        let process = SynthProcess::toy();
        let a = process.generate(20, 7);
        let b = process.generate(20, 7);
        let c = process.generate(20, 8);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn every_gold_tag_is_in_its_words_genotype() {
        let process = SynthProcess::toy();
        let lexicon = process.lexicon();
        for sentence in process.generate(50, 1) {
            for token in sentence {
                let genotype = lexicon.get(&token.surface).expect("toy word in lexicon");
                assert!(genotype.contains(&token.gold));
            }
        }
    }

    #[test]
    fn corpus_never_realizes_a_forbidden_transition() {
        let process = SynthProcess::toy();
        let rules = process.negative_rules_text();
        let forbidden: Vec<(String, String)> = rules
            .lines()
            .map(|l| {
                let mut it = l.split_whitespace();
                (it.next().unwrap().to_string(), it.next().unwrap().to_string())
            })
            .collect();
        for sentence in process.generate(100, 3) {
            let mut tags = vec![MARKER_BEGIN_TAG.to_string()];
            tags.extend(sentence.iter().map(|t| t.gold.as_str().to_string()));
            tags.push(MARKER_END_TAG.to_string());
            for pair in tags.windows(2) {
                assert!(
                    !forbidden.contains(&(pair[0].clone(), pair[1].clone())),
                    "generated forbidden pair {pair:?}"
                );
            }
        }
    }
}
