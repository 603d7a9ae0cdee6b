//! Composes the disambiguation operators in a user-chosen order.
//!
//! A schedule is a comma-separated list of step codes: `M` morphology
//! (always first), `D:k` negative constraints with `k` sweeps, `T3`
//! trigram, `B` bigram, `U:θ` unigram at strength threshold `θ`, `R`
//! tagset reduction. Statistical steps only ever shrink the candidate
//! sets of still-ambiguous tokens; a token never loses its last candidate.

use std::fmt;

use crate::constraints::{propagate, ConstraintLog, NegativeRule, RuleEvent};
use crate::error::{Error, Result};
use crate::morphology::{
    analyze_sentence, collect_proper_nouns, AnalyzedToken, AnalyzerOptions, Lexicon,
    ProperNounDict,
};
use crate::preprocess::Sentence;
use crate::stats::{window_key, Decision, DecisionTable, Model};
use crate::tag::TagsetMap;

pub const DEFAULT_UNIGRAM_THRESHOLD: f64 = 90.0;
pub const DEFAULT_BIGRAM_THRESHOLD: f64 = 75.0;
pub const DEFAULT_TRIGRAM_THRESHOLD: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Morphology,
    Constraints { iterations: usize },
    Trigram,
    Bigram,
    Unigram { threshold: f64 },
    Reduce,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Morphology => f.write_str("M"),
            Step::Constraints { iterations } => write!(f, "D:{iterations}"),
            Step::Trigram => f.write_str("T3"),
            Step::Bigram => f.write_str("B"),
            Step::Unigram { threshold } => write!(f, "U:{}", fmt_threshold(*threshold)),
            Step::Reduce => f.write_str("R"),
        }
    }
}

fn fmt_threshold(t: f64) -> String {
    if t.fract() == 0.0 && t.abs() < 1e9 {
        format!("{}", t as i64)
    } else {
        format!("{t}")
    }
}

/// An ordered, validated sequence of steps: `M` first and exactly once,
/// `R` at most once.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    steps: Vec<Step>,
}

impl Schedule {
    pub fn new(steps: Vec<Step>) -> Result<Schedule> {
        let text = steps
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let invalid = |message: &str| Error::Schedule {
            text: text.clone(),
            message: message.to_string(),
        };
        if steps.first() != Some(&Step::Morphology) {
            return Err(invalid("M (morphology) must come first"));
        }
        if steps.iter().filter(|s| **s == Step::Morphology).count() > 1 {
            return Err(invalid("M may appear only once"));
        }
        if steps.iter().filter(|s| **s == Step::Reduce).count() > 1 {
            return Err(invalid("R may appear at most once"));
        }
        Ok(Schedule { steps })
    }

    pub fn parse(text: &str) -> Result<Schedule> {
        let invalid = |message: String| Error::Schedule {
            text: text.to_string(),
            message,
        };
        let mut steps = Vec::new();
        for code in text.split(',') {
            let code = code.trim();
            let (head, param) = match code.split_once(':') {
                Some((h, p)) => (h, Some(p)),
                None => (code, None),
            };
            let step = match (head, param) {
                ("M", None) => Step::Morphology,
                ("D", None) => Step::Constraints {
                    iterations: crate::constraints::DEFAULT_MAX_ITERATIONS,
                },
                ("D", Some(p)) => {
                    let iterations: usize = p
                        .parse()
                        .map_err(|_| invalid(format!("bad iteration count {p:?}")))?;
                    if iterations == 0 {
                        return Err(invalid("D needs at least one iteration".to_string()));
                    }
                    Step::Constraints { iterations }
                }
                ("T3", None) => Step::Trigram,
                ("B", None) => Step::Bigram,
                ("U", None) => Step::Unigram {
                    threshold: DEFAULT_UNIGRAM_THRESHOLD,
                },
                ("U", Some(p)) => {
                    let threshold: f64 = p
                        .parse()
                        .map_err(|_| invalid(format!("bad threshold {p:?}")))?;
                    if !(0.0..=100.0).contains(&threshold) {
                        return Err(invalid(format!("threshold {p} outside 0..=100")));
                    }
                    Step::Unigram { threshold }
                }
                ("R", None) => Step::Reduce,
                _ => return Err(invalid(format!("unknown step code {code:?}"))),
            };
            steps.push(step);
        }
        Schedule::new(steps).map_err(|e| match e {
            Error::Schedule { message, .. } => invalid(message),
            other => other,
        })
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{step}")?;
        }
        Ok(())
    }
}

pub fn parse_schedule(text: &str) -> Result<Schedule> {
    Schedule::parse(text)
}

/// Everything a schedule may need. The lexicon is always required; the
/// rest only when the matching step appears.
#[derive(Debug, Clone, Copy)]
pub struct Resources<'a> {
    pub lexicon: &'a Lexicon,
    pub rules: Option<&'a [NegativeRule]>,
    pub model: Option<&'a Model>,
    pub tagset_map: Option<&'a TagsetMap>,
    pub learned_proper_nouns: Option<&'a ProperNounDict>,
}

impl<'a> Resources<'a> {
    pub fn new(lexicon: &'a Lexicon) -> Resources<'a> {
        Resources {
            lexicon,
            rules: None,
            model: None,
            tagset_map: None,
            learned_proper_nouns: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub analyzer: AnalyzerOptions,
    pub bigram_threshold: f64,
    pub trigram_threshold: f64,
    /// Worker threads for per-sentence processing; 1 keeps everything on
    /// the calling thread.
    pub jobs: usize,
    /// Collect proper nouns in a first pass even when running serially.
    pub two_pass_proper_nouns: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            analyzer: AnalyzerOptions::default(),
            bigram_threshold: DEFAULT_BIGRAM_THRESHOLD,
            trigram_threshold: DEFAULT_TRIGRAM_THRESHOLD,
            jobs: 1,
            two_pass_proper_nouns: false,
        }
    }
}

/// Side products of a run: constraint firings (sentence index attached)
/// and the proper nouns discovered while analyzing.
#[derive(Debug, Default)]
pub struct RunLog {
    pub constraint_events: Vec<(usize, RuleEvent)>,
    pub discovered_proper_nouns: ProperNounDict,
}

fn validate(schedule: &Schedule, resources: &Resources<'_>) -> Result<()> {
    for step in schedule.steps() {
        let missing = match step {
            Step::Constraints { .. } if resources.rules.is_none() => Some(("D", "rule file")),
            Step::Trigram if resources.model.is_none() => Some(("T3", "model")),
            Step::Bigram if resources.model.is_none() => Some(("B", "model")),
            Step::Unigram { .. } if resources.model.is_none() => Some(("U", "model")),
            Step::Reduce if resources.tagset_map.is_none() => Some(("R", "tagset map")),
            _ => None,
        };
        if let Some((step, resource)) = missing {
            return Err(Error::MissingResource {
                step: step.to_string(),
                resource,
            });
        }
    }
    Ok(())
}

/// Picks a non-conflicting subset of applicable decisions: higher order
/// beats lower order, then higher strength, then leftmost position. The
/// chosen decisions never overlap; the sweep recomputes applicability
/// after applying them.
pub fn resolve_conflicts(applicable: Vec<(usize, &Decision)>) -> Vec<(usize, &Decision)> {
    let mut applicable = applicable;
    applicable.sort_by(|(pa, da), (pb, db)| {
        db.key
            .len()
            .cmp(&da.key.len())
            .then_with(|| {
                db.strength
                    .partial_cmp(&da.strength)
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .then_with(|| pa.cmp(pb))
            .then_with(|| da.choice.cmp(&db.choice))
    });
    let mut chosen: Vec<(usize, &Decision)> = Vec::new();
    for (pos, decision) in applicable {
        let span = (pos, pos + decision.key.len());
        let overlaps = chosen
            .iter()
            .any(|(p, d)| span.0 < p + d.key.len() && *p < span.1);
        if !overlaps {
            chosen.push((pos, decision));
        }
    }
    chosen
}

/// One statistical step: sweeps windows of the table's order left to
/// right, gathers the applicable decisions (key matches the tokens'
/// current candidate genotypes, strength meets the threshold, something is
/// still ambiguous), applies a non-conflicting batch, and repeats to a
/// fixpoint so that newly resolved tokens refine their neighbours' keys.
fn statistical_step(tokens: &mut [AnalyzedToken], table: &DecisionTable, threshold: f64) {
    let order = table.order;
    if order == 0 || tokens.len() < order {
        return;
    }
    loop {
        let mut applicable: Vec<(usize, &Decision)> = Vec::new();
        for i in 0..=tokens.len() - order {
            let window = &tokens[i..i + order];
            if window.iter().all(AnalyzedToken::resolved) {
                continue;
            }
            let key = window_key(window);
            if let Some(decision) = table.decide(&key, threshold) {
                applicable.push((i, decision));
            }
        }
        if applicable.is_empty() {
            return;
        }
        let mut changed = false;
        for (pos, decision) in resolve_conflicts(applicable) {
            let window = &mut tokens[pos..pos + order];
            // a decision whose key no longer matches is discarded whole
            if window_key(window) != decision.key {
                continue;
            }
            for (tok, tag) in window.iter_mut().zip(&decision.choice) {
                if !tok.resolved() {
                    tok.resolve_to(tag);
                    changed = true;
                }
            }
        }
        if !changed {
            return;
        }
    }
}

/// Applies the tagset mapping to every token of every sentence; candidate
/// sets may merge, possibly resolving tokens whose fine-grained candidates
/// collapse onto one coarse tag.
pub fn reduce_output(sentences: &mut [Vec<AnalyzedToken>], map: &TagsetMap) {
    for sentence in sentences {
        for token in sentence {
            token.reduce(map);
        }
    }
}

fn process_sentence(
    tokens: &mut Vec<AnalyzedToken>,
    steps: &[Step],
    resources: &Resources<'_>,
    options: &PipelineOptions,
    log: Option<&mut ConstraintLog>,
) {
    let mut log = log;
    for step in steps {
        match step {
            Step::Morphology => {}
            Step::Constraints { iterations } => {
                let rules = resources.rules.expect("validated");
                propagate(tokens, rules, *iterations, log.as_deref_mut());
            }
            Step::Trigram => {
                let model = resources.model.expect("validated");
                statistical_step(tokens, &model.trigram, options.trigram_threshold);
            }
            Step::Bigram => {
                let model = resources.model.expect("validated");
                statistical_step(tokens, &model.bigram, options.bigram_threshold);
            }
            Step::Unigram { threshold } => {
                let model = resources.model.expect("validated");
                statistical_step(tokens, &model.unigram, *threshold);
            }
            Step::Reduce => {
                let map = resources.tagset_map.expect("validated");
                for token in tokens.iter_mut() {
                    token.reduce(map);
                }
            }
        }
    }
}

/// Runs the schedule over preprocessed sentences. Every step only shrinks
/// candidate sets; the output classifies each token as resolved (one
/// candidate) or still ambiguous.
pub fn run(
    sentences: &[Sentence],
    schedule: &Schedule,
    resources: &Resources<'_>,
    options: &PipelineOptions,
) -> Result<Vec<Vec<AnalyzedToken>>> {
    run_with_log(sentences, schedule, resources, options).map(|(tagged, _)| tagged)
}

pub fn run_with_log(
    sentences: &[Sentence],
    schedule: &Schedule,
    resources: &Resources<'_>,
    options: &PipelineOptions,
) -> Result<(Vec<Vec<AnalyzedToken>>, RunLog)> {
    validate(schedule, resources)?;
    let empty = ProperNounDict::new();
    let learned = resources.learned_proper_nouns.unwrap_or(&empty);
    let steps_after_m = &schedule.steps()[1..];
    let mut log = RunLog::default();

    if options.jobs > 1 {
        // Deterministic two-pass mode: collect proper nouns serially, then
        // process sentences in parallel with immutable shared resources.
        log.discovered_proper_nouns =
            collect_proper_nouns(sentences, resources.lexicon, &options.analyzer, learned);
        let chunk =
            (sentences.len() + options.jobs - 1) / options.jobs.max(1);
        let mut tagged: Vec<Vec<AnalyzedToken>> = Vec::with_capacity(sentences.len());
        if chunk == 0 {
            return Ok((tagged, log));
        }
        let results: Vec<(Vec<Vec<AnalyzedToken>>, Vec<(usize, RuleEvent)>)> =
            std::thread::scope(|scope| {
                let mut handles = Vec::new();
                for (chunk_index, batch) in sentences.chunks(chunk).enumerate() {
                    let analyzer = &options.analyzer;
                    let learned_ref: &ProperNounDict = learned;
                    handles.push(scope.spawn(move || {
                        let base = chunk_index * chunk;
                        let mut out = Vec::with_capacity(batch.len());
                        let mut events = Vec::new();
                        for (offset, sentence) in batch.iter().enumerate() {
                            let mut scratch = ProperNounDict::new();
                            let mut tokens = analyze_sentence(
                                sentence,
                                resources.lexicon,
                                analyzer,
                                learned_ref,
                                &mut scratch,
                            );
                            let mut clog = ConstraintLog::new();
                            process_sentence(
                                &mut tokens,
                                steps_after_m,
                                resources,
                                options,
                                Some(&mut clog),
                            );
                            events.extend(
                                clog.events.into_iter().map(|e| (base + offset, e)),
                            );
                            out.push(tokens);
                        }
                        (out, events)
                    }));
                }
                handles.into_iter().map(|h| h.join().unwrap()).collect()
            });
        for (batch, events) in results {
            tagged.extend(batch);
            log.constraint_events.extend(events);
        }
        log.constraint_events.sort_by_key(|(s, _)| *s);
        return Ok((tagged, log));
    }

    let mut run_dict = ProperNounDict::new();
    if options.two_pass_proper_nouns {
        run_dict = collect_proper_nouns(sentences, resources.lexicon, &options.analyzer, learned);
    }
    let mut tagged = Vec::with_capacity(sentences.len());
    for (index, sentence) in sentences.iter().enumerate() {
        let mut tokens = analyze_sentence(
            sentence,
            resources.lexicon,
            &options.analyzer,
            learned,
            &mut run_dict,
        );
        let mut clog = ConstraintLog::new();
        process_sentence(
            &mut tokens,
            steps_after_m,
            resources,
            options,
            Some(&mut clog),
        );
        log.constraint_events
            .extend(clog.events.into_iter().map(|e| (index, e)));
        tagged.push(tokens);
    }
    log.discovered_proper_nouns = run_dict;
    Ok((tagged, log))
}

/// Output format: `surface<TAB>tag` for resolved tokens, `surface<TAB>tag1
/// tag2 ...` for still-ambiguous ones; blank line between sentences;
/// marker pseudo-tokens are not emitted.
pub fn write_tagged(sentences: &[Vec<AnalyzedToken>]) -> String {
    let mut out = String::new();
    for (i, sentence) in sentences.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for token in sentence {
            if token.is_marker() {
                continue;
            }
            out.push_str(&token.surface);
            out.push('\t');
            out.push_str(&token.candidates.to_string());
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::parse_rules;
    use crate::preprocess::{preprocess, PreprocessOptions};
    use crate::stats::{strength_formula, train_from_genotypes};
    use crate::tag::{Genotype, Tag, TagPattern};

    fn g(tags: &str) -> Genotype {
        Genotype::parse_list(tags).unwrap()
    }

    fn t(tag: &str) -> Tag {
        Tag::parse(tag).unwrap()
    }

    #[test]
    fn schedule_round_trips() {
        let schedule = Schedule::parse("M,D:3,B,U:90,R").unwrap();
        assert_eq!(schedule.steps().len(), 5);
        assert_eq!(schedule.to_string(), "M,D:3,B,U:90,R");
        assert_eq!(Schedule::parse(&schedule.to_string()).unwrap(), schedule);
    }

    #[test]
    fn schedule_defaults_for_bare_codes() {
        let schedule = Schedule::parse("M,D,U").unwrap();
        assert_eq!(schedule.to_string(), "M,D:3,U:90");
    }

    #[test]
    fn schedule_requires_m_first() {
        assert!(Schedule::parse("D:3,M").is_err());
        assert!(Schedule::parse("B").is_err());
        assert!(Schedule::parse("M,M").is_err());
        assert!(Schedule::parse("M,R,R").is_err());
        assert!(Schedule::parse("M,X").is_err());
        assert!(Schedule::parse("M,U:101").is_err());
        assert!(Schedule::parse("M,D:0").is_err());
    }

    fn small_lexicon() -> Lexicon {
        let mut lex = Lexicon::new();
        lex.insert("la", g("b nms rf"));
        lex.insert("teneur", g("nfs nms"));
        lex.insert("moyenne", g("jfs nfs v1s v2s v3s"));
        lex.insert("en", g("a b p"));
        lex.insert("uranium", g("nms"));
        lex.insert(".", g("x"));
        lex
    }

    fn small_analyzer() -> AnalyzerOptions {
        AnalyzerOptions {
            proper_noun_tag: t("u"),
            punctuation_tag: t("x"),
            ..AnalyzerOptions::default()
        }
    }

    #[test]
    fn morphology_only_schedule_reports_ambiguity() {
        let lex = small_lexicon();
        let sentences = preprocess(
            "La teneur moyenne en uranium.",
            &PreprocessOptions::default(),
            &Default::default(),
        );
        let schedule = Schedule::parse("M").unwrap();
        let options = PipelineOptions {
            analyzer: small_analyzer(),
            ..PipelineOptions::default()
        };
        let tagged = run(&sentences, &schedule, &Resources::new(&lex), &options).unwrap();
        let la = &tagged[0][1];
        assert_eq!(la.surface, "La");
        assert_eq!(la.candidates, g("b nms rf u"));
        assert!(!la.resolved());
        let uranium = &tagged[0][5];
        assert_eq!(uranium.surface, "uranium");
        assert!(uranium.resolved());
        assert_eq!(uranium.resolved_tag().unwrap(), &t("nms"));
    }

    #[test]
    fn missing_resources_are_reported_per_step() {
        let lex = small_lexicon();
        let sentences = preprocess("uranium.", &PreprocessOptions::default(), &Default::default());
        let options = PipelineOptions::default();
        for (schedule, resource) in [("M,D:3", "rule file"), ("M,B", "model"), ("M,R", "tagset map")]
        {
            let schedule = Schedule::parse(schedule).unwrap();
            let err = run(&sentences, &schedule, &Resources::new(&lex), &options).unwrap_err();
            match err {
                Error::MissingResource { resource: r, .. } => assert_eq!(r, resource),
                other => panic!("unexpected error {other:?}"),
            }
        }
    }

    #[test]
    fn bigram_step_uses_left_context() {
        // train: [nms] [n v] pairs always resolve to (nms, v)
        let corpus = vec![
            vec![(g("nms"), t("nms")), (g("n v"), t("v"))];
            20
        ];
        let model = train_from_genotypes(&corpus);
        let mut tokens = vec![
            AnalyzedToken::new("ctx", g("nms")),
            AnalyzedToken::new("amb", g("n v")),
        ];
        statistical_step(&mut tokens, &model.bigram, 75.0);
        assert_eq!(tokens[1].resolved_tag().unwrap(), &t("v"));
    }

    #[test]
    fn statistical_step_iterates_to_fixpoint() {
        // resolving the middle token refines the key of the right-hand
        // pair: ([v], [j n]) only becomes applicable once "b" is resolved
        let mut corpus = vec![
            vec![(g("nms"), t("nms")), (g("n v"), t("v")), (g("j n"), t("n"))];
            20
        ];
        corpus.extend(vec![vec![(g("v"), t("v")), (g("j n"), t("n"))]; 20]);
        let model = train_from_genotypes(&corpus);
        let mut tokens = vec![
            AnalyzedToken::new("a", g("nms")),
            AnalyzedToken::new("b", g("n v")),
            AnalyzedToken::new("c", g("j n")),
        ];
        statistical_step(&mut tokens, &model.bigram, 75.0);
        assert!(tokens[1].resolved() && tokens[2].resolved());
        assert_eq!(tokens[1].resolved_tag().unwrap(), &t("v"));
        assert_eq!(tokens[2].resolved_tag().unwrap(), &t("n"));
    }

    fn decision(order: usize, strength_counts: (u64, u64), pos_tag: &str) -> Decision {
        let key = vec![g(&format!("{pos_tag} zz")); order];
        Decision {
            key,
            choice: vec![t(pos_tag); order],
            f: strength_counts.0,
            n: strength_counts.1,
            strength: strength_formula(strength_counts.0, strength_counts.1).unwrap(),
        }
    }

    #[test]
    fn conflict_resolution_prefers_higher_order_then_strength() {
        let trigram = decision(3, (1, 2), "A"); // strength ≈ 16.9
        let bigram = decision(2, (82, 82), "B"); // strength ≈ 98.5
        let chosen = resolve_conflicts(vec![(2, &bigram), (1, &trigram)]);
        assert_eq!(chosen.len(), 1);
        assert_eq!(chosen[0].0, 1);
        assert_eq!(chosen[0].1.key.len(), 3);
    }

    #[test]
    fn conflict_resolution_prefers_strength_within_order() {
        let strong = decision(2, (768, 793), "A"); // 96.16
        let weak = decision(2, (90, 92), "B"); // 95.63
        let chosen = resolve_conflicts(vec![(0, &weak), (1, &strong)]);
        assert_eq!(chosen.len(), 1);
        assert_eq!(chosen[0].1.choice[0], t("A"));
    }

    #[test]
    fn conflict_resolution_keeps_non_overlapping_decisions() {
        let a = decision(2, (10, 10), "A");
        let b = decision(2, (10, 10), "B");
        let chosen = resolve_conflicts(vec![(0, &a), (2, &b)]);
        assert_eq!(chosen.len(), 2);
    }

    #[test]
    fn single_applicable_decision_is_applied() {
        let a = decision(2, (10, 10), "A");
        let chosen = resolve_conflicts(vec![(4, &a)]);
        assert_eq!(chosen.len(), 1);
        assert_eq!(chosen[0].0, 4);
    }

    #[test]
    fn reduce_step_merges_candidates() {
        let map = TagsetMap::new(vec![
            (TagPattern::parse("V3S**").unwrap(), t("v3s")),
            (TagPattern::parse("JFS").unwrap(), t("jfs")),
        ]);
        let mut sentences = vec![vec![
            AnalyzedToken::new("w", g("V3SPI V3SPS")),
            AnalyzedToken::new("x", g("JFS")),
        ]];
        reduce_output(&mut sentences, &map);
        assert!(sentences[0][0].resolved());
        assert_eq!(sentences[0][0].resolved_tag().unwrap(), &t("v3s"));
        assert_eq!(sentences[0][1].resolved_tag().unwrap(), &t("jfs"));
    }

    #[test]
    fn constraints_step_feeds_statistics() {
        // "l' appelle": the R V rule removes the article reading
        let mut lex = Lexicon::new();
        lex.insert("l'", g("BD3S RDM"));
        lex.insert("appelle", g("V3SPI"));
        lex.insert("elle", g("BS3FS"));
        lex.insert(".", g("."));
        let rules = parse_rules("R** V****\n", "rules").unwrap();
        let sentences = preprocess(
            "elle l'appelle.",
            &PreprocessOptions::default(),
            &Default::default(),
        );
        let schedule = Schedule::parse("M,D:3").unwrap();
        let mut resources = Resources::new(&lex);
        resources.rules = Some(&rules);
        let tagged = run(
            &sentences,
            &schedule,
            &resources,
            &PipelineOptions::default(),
        )
        .unwrap();
        let l = tagged[0]
            .iter()
            .find(|tok| tok.surface == "l'")
            .expect("l' token");
        assert!(l.resolved());
        assert_eq!(l.resolved_tag().unwrap(), &t("BD3S"));
    }

    #[test]
    fn parallel_run_matches_serial_run() {
        let lex = small_lexicon();
        let sentences = preprocess(
            "La teneur moyenne en uranium. La teneur. Uranium en moyenne.",
            &PreprocessOptions::default(),
            &Default::default(),
        );
        let schedule = Schedule::parse("M").unwrap();
        let serial = PipelineOptions {
            analyzer: small_analyzer(),
            ..PipelineOptions::default()
        };
        let parallel = PipelineOptions {
            analyzer: small_analyzer(),
            jobs: 3,
            ..PipelineOptions::default()
        };
        let resources = Resources::new(&lex);
        let a = run(&sentences, &schedule, &resources, &serial).unwrap();
        let b = run(&sentences, &schedule, &resources, &parallel).unwrap();
        assert_eq!(write_tagged(&a), write_tagged(&b));
    }

    #[test]
    fn runs_are_deterministic() {
        let lex = small_lexicon();
        let sentences = preprocess(
            "La teneur moyenne en uranium.",
            &PreprocessOptions::default(),
            &Default::default(),
        );
        let schedule = Schedule::parse("M").unwrap();
        let options = PipelineOptions {
            analyzer: small_analyzer(),
            ..PipelineOptions::default()
        };
        let resources = Resources::new(&lex);
        let a = run(&sentences, &schedule, &resources, &options).unwrap();
        let b = run(&sentences, &schedule, &resources, &options).unwrap();
        assert_eq!(write_tagged(&a), write_tagged(&b));
    }
}
