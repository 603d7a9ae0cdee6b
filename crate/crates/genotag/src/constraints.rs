//! Negative n-gram constraints applied around unambiguous anchor words.
//!
//! A rule declares an illegal tag sequence. It fires on a window where all
//! positions but one are anchored (resolved) and match their patterns: the
//! candidates matching the remaining pattern are removed from the free
//! position. Anchors created this way license further firings, enlarging
//! the islands of disambiguated words sweep by sweep.

use std::path::Path;

use crate::error::{Error, Result};
use crate::morphology::AnalyzedToken;
use crate::tag::{Genotype, Tag, TagPattern};

/// Sweeps after which anchor growth has stopped on ordinary text.
pub const DEFAULT_MAX_ITERATIONS: usize = 3;

/// An illegal sequence of two or three tag patterns.
#[derive(Debug, Clone)]
pub struct NegativeRule {
    pub id: String,
    pub patterns: Vec<TagPattern>,
}

impl NegativeRule {
    pub fn new(id: impl Into<String>, patterns: Vec<TagPattern>) -> Result<NegativeRule> {
        let id = id.into();
        if patterns.len() < 2 || patterns.len() > 3 {
            return Err(Error::RuleParse {
                source_name: id,
                line: 0,
                message: format!("rules take 2 or 3 patterns, got {}", patterns.len()),
            });
        }
        if patterns.iter().any(|p| p.is_all_wildcards()) {
            return Err(Error::RuleParse {
                source_name: id,
                line: 0,
                message: "a pattern of only wildcards would match every tag".to_string(),
            });
        }
        Ok(NegativeRule { id, patterns })
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// One rule per line, space-separated patterns, `#` comments.
pub fn parse_rules(text: &str, source_name: &str) -> Result<Vec<NegativeRule>> {
    let mut rules = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let patterns = line
            .split_whitespace()
            .map(TagPattern::parse)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::RuleParse {
                source_name: source_name.to_string(),
                line: line_no,
                message: e.to_string(),
            })?;
        let rule = NegativeRule::new(line.split_whitespace().collect::<Vec<_>>().join(" "), patterns)
            .map_err(|e| match e {
                Error::RuleParse { message, .. } => Error::RuleParse {
                    source_name: source_name.to_string(),
                    line: line_no,
                    message,
                },
                other => other,
            })?;
        rules.push(rule);
    }
    Ok(rules)
}

pub fn parse_rule_file(path: &Path) -> Result<Vec<NegativeRule>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_rules(&text, &path.display().to_string())
}

/// A single firing (or blocked firing) of a rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleEvent {
    pub rule_id: String,
    pub token_index: usize,
    /// `None` when the never-empty guard blocked the removal.
    pub removed: Option<Tag>,
}

/// Collects firings for the `--rule-log` diagnostics.
#[derive(Debug, Clone, Default)]
pub struct ConstraintLog {
    pub events: Vec<RuleEvent>,
}

impl ConstraintLog {
    pub fn new() -> ConstraintLog {
        ConstraintLog::default()
    }
}

/// Applies one rule to one window. The rule fires only when exactly one
/// position is still ambiguous and every anchored position matches its
/// pattern; candidates matching the free pattern are then removed. Removal
/// that would empty the candidate set is blocked and only logged. Returns
/// whether any candidate was removed.
pub fn apply_rule_window(window: &mut [AnalyzedToken], rule: &NegativeRule) -> bool {
    apply_window(window, rule, 0, &mut None)
}

fn apply_window(
    window: &mut [AnalyzedToken],
    rule: &NegativeRule,
    base_index: usize,
    log: &mut Option<&mut ConstraintLog>,
) -> bool {
    debug_assert_eq!(window.len(), rule.patterns.len());

    let mut free_idx = None;
    for (i, tok) in window.iter().enumerate() {
        if !tok.resolved() {
            if free_idx.is_some() {
                return false; // more than one ambiguous position: no anchor island
            }
            free_idx = Some(i);
        }
    }
    let Some(free_idx) = free_idx else {
        return false; // fully resolved window, nothing to filter
    };
    for (i, tok) in window.iter().enumerate() {
        if i == free_idx {
            continue;
        }
        let anchored = tok.resolved_tag().expect("anchored position");
        if !rule.patterns[i].matches(anchored) {
            return false;
        }
    }

    let pattern = &rule.patterns[free_idx];
    let tok = &mut window[free_idx];
    let (matching, keeping): (Vec<Tag>, Vec<Tag>) = tok
        .candidates
        .tags()
        .iter()
        .cloned()
        .partition(|t| pattern.matches(t));
    if matching.is_empty() {
        return false;
    }
    if keeping.is_empty() {
        if let Some(log) = log {
            log.events.push(RuleEvent {
                rule_id: rule.id.clone(),
                token_index: base_index + free_idx,
                removed: None,
            });
        }
        return false;
    }
    tok.candidates = Genotype::new(keeping).expect("non-empty remainder");
    if let Some(log) = log {
        for tag in matching {
            log.events.push(RuleEvent {
                rule_id: rule.id.clone(),
                token_index: base_index + free_idx,
                removed: Some(tag),
            });
        }
    }
    true
}

/// Repeats full left-to-right sweeps of all rules over all windows until no
/// candidate changes or `max_iterations` sweeps ran. Tokens resolved during
/// a sweep anchor later windows of the same sweep. Returns the number of
/// sweeps executed.
pub fn propagate(
    tokens: &mut [AnalyzedToken],
    rules: &[NegativeRule],
    max_iterations: usize,
    mut log: Option<&mut ConstraintLog>,
) -> usize {
    for sweep in 0..max_iterations.max(1) {
        let mut changed = false;
        for i in 0..tokens.len() {
            for rule in rules {
                let n = rule.patterns.len();
                if i + n <= tokens.len() {
                    changed |= apply_window(&mut tokens[i..i + n], rule, i, &mut log);
                }
            }
        }
        if !changed {
            return sweep + 1;
        }
    }
    max_iterations.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tag::Genotype;

    fn token(surface: &str, tags: &str) -> AnalyzedToken {
        AnalyzedToken::new(surface, Genotype::parse_list(tags).unwrap())
    }

    fn rule(line: &str) -> NegativeRule {
        parse_rules(line, "test").unwrap().remove(0)
    }

    #[test]
    fn parses_the_published_rules() {
        let rules = parse_rules("# comment\nBS3* BI1*\nN** K\nR* V*\n", "rules").unwrap();
        assert_eq!(rules.len(), 3);
        assert_eq!(rules[0].len(), 2);
        assert_eq!(rules[1].id, "N** K");
    }

    #[test]
    fn rejects_rules_of_wrong_arity() {
        assert!(parse_rules("N**\n", "rules").is_err());
        assert!(parse_rules("A B C D\n", "rules").is_err());
    }

    #[test]
    fn rejects_all_wildcard_patterns() {
        let err = parse_rules("** N\n", "rules").unwrap_err();
        assert!(err.to_string().contains("wildcards"));
    }

    #[test]
    fn il_nous_window_drops_indirect_pronoun() {
        // "il nous faut": il BS3MS anchored, nous keeps 4 of 5 candidates.
        let mut window = vec![
            token("il", "BS3MS"),
            token("nous", "BD1P BI1P BJ1P BR1P BS1P"),
        ];
        let changed = apply_rule_window(&mut window, &rule("BS3** BI1*"));
        assert!(changed);
        assert_eq!(
            window[1].candidates,
            Genotype::parse_list("BD1P BJ1P BR1P BS1P").unwrap()
        );
    }

    #[test]
    fn noun_interrogative_window_resolves_qui() {
        let mut window = vec![token("fleuve", "NMS"), token("qui", "E K")];
        let changed = apply_rule_window(&mut window, &rule("N** K"));
        assert!(changed);
        assert!(window[1].resolved());
        assert_eq!(window[1].resolved_tag().unwrap().as_str(), "E");
    }

    #[test]
    fn rule_needs_an_anchor() {
        let mut window = vec![token("a", "NMS NFS"), token("b", "E K")];
        assert!(!apply_rule_window(&mut window, &rule("N** K")));
        assert_eq!(window[0].candidates.len(), 2);
        assert_eq!(window[1].candidates.len(), 2);
    }

    #[test]
    fn never_empty_guard_blocks_total_removal() {
        // every candidate of the free position matches the pattern
        let mut window = vec![token("fleuve", "NMS"), token("k", "KA KB")];
        let mut log = ConstraintLog::new();
        let changed = apply_window(&mut window, &rule("N** K*"), 0, &mut Some(&mut log));
        assert!(!changed);
        assert_eq!(window[1].candidates.len(), 2);
        assert_eq!(log.events.len(), 1);
        assert!(log.events[0].removed.is_none());
    }

    #[test]
    fn propagate_reaches_fixpoint_on_unambiguous_sentence() {
        let mut tokens = vec![token("a", "P"), token("b", "NMS"), token("c", ".")];
        let rules = parse_rules("N** K\n", "rules").unwrap();
        let sweeps = propagate(&mut tokens, &rules, 3, None);
        assert_eq!(sweeps, 1);
    }

    #[test]
    fn anchors_cascade_within_two_sweeps() {
        // Resolving "b" via (a, b) anchors it for (b, c) in the same pass.
        let mut tokens = vec![
            token("a", "X1"),
            token("b", "Y1 Y2"),
            token("c", "Z1 Z2"),
        ];
        let rules = parse_rules("X1 Y2\nY1 Z2\n", "rules").unwrap();
        let sweeps = propagate(&mut tokens, &rules, 3, None);
        assert!(tokens[1].resolved());
        assert_eq!(tokens[1].resolved_tag().unwrap().as_str(), "Y1");
        assert!(tokens[2].resolved());
        assert_eq!(tokens[2].resolved_tag().unwrap().as_str(), "Z1");
        assert!(sweeps <= 2);
    }

    #[test]
    fn propagate_logs_firings_with_token_indices() {
        let mut tokens = vec![token("fleuve", "NMS"), token("qui", "E K")];
        let rules = parse_rules("N** K\n", "rules").unwrap();
        let mut log = ConstraintLog::new();
        propagate(&mut tokens, &rules, 3, Some(&mut log));
        assert_eq!(log.events.len(), 1);
        assert_eq!(log.events[0].token_index, 1);
        assert_eq!(log.events[0].removed.as_ref().unwrap().as_str(), "K");
    }
}
