//! Tags, genotypes, tag patterns, and tagset reduction.
//!
//! A tag is a compact feature string: position 0 is the syntactic category
//! code, later positions encode person, number, tense, mood, gender and so
//! on (`V3SPI` = verb, 3rd person, singular, present, indicative). A
//! genotype is the canonical set of tags a surface form can bear. Every
//! other module speaks in these two types.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Character that stands for exactly one arbitrary character in a pattern.
pub const WILDCARD: char = '*';

fn valid_tag_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '^' | '$' | '&' | '.')
}

/// A single part-of-speech tag.
///
/// Equality is exact string equality; ordering is byte-wise lexicographic,
/// which keeps genotype canonicalization locale-independent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tag(String);

impl Tag {
    pub fn parse(s: &str) -> Result<Tag> {
        if s.is_empty() {
            return Err(Error::MalformedTag {
                text: s.to_string(),
                reason: "empty",
            });
        }
        for c in s.chars() {
            if c.is_whitespace() {
                return Err(Error::MalformedTag {
                    text: s.to_string(),
                    reason: "contains whitespace",
                });
            }
            if c == WILDCARD {
                return Err(Error::MalformedTag {
                    text: s.to_string(),
                    reason: "'*' is reserved for patterns",
                });
            }
            if !valid_tag_char(c) {
                return Err(Error::MalformedTag {
                    text: s.to_string(),
                    reason: "tag characters are letters, digits, ^ $ & .",
                });
            }
        }
        Ok(Tag(s.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Tag> {
        Tag::parse(s)
    }
}

/// A tag with optional `*` positions, each matching exactly one character.
///
/// A pattern without `*` matches exactly one tag: itself.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TagPattern(String);

impl TagPattern {
    pub fn parse(s: &str) -> Result<TagPattern> {
        if s.is_empty() {
            return Err(Error::MalformedPattern {
                text: s.to_string(),
                reason: "empty",
            });
        }
        for c in s.chars() {
            if c.is_whitespace() {
                return Err(Error::MalformedPattern {
                    text: s.to_string(),
                    reason: "contains whitespace",
                });
            }
            if c != WILDCARD && !valid_tag_char(c) {
                return Err(Error::MalformedPattern {
                    text: s.to_string(),
                    reason: "pattern characters are letters, digits, ^ $ & . *",
                });
            }
        }
        Ok(TagPattern(s.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_all_wildcards(&self) -> bool {
        self.0.chars().all(|c| c == WILDCARD)
    }

    /// True iff the tag and pattern have equal length and every non-`*`
    /// position matches exactly.
    pub fn matches(&self, tag: &Tag) -> bool {
        let p = self.0.as_bytes();
        let t = tag.as_str().as_bytes();
        p.len() == t.len()
            && p.iter()
                .zip(t)
                .all(|(pc, tc)| *pc == WILDCARD as u8 || pc == tc)
    }
}

impl fmt::Display for TagPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for TagPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<TagPattern> {
        TagPattern::parse(s)
    }
}

pub fn tag_matches_pattern(tag: &Tag, pattern: &TagPattern) -> bool {
    pattern.matches(tag)
}

/// The canonical set of tags a word inherits from morphological analysis:
/// sorted ascending, duplicate-free, never empty.
///
/// Two genotypes built from the same multiset of tags compare equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Genotype(Vec<Tag>);

impl Genotype {
    /// Canonicalizes: input order and duplicates are irrelevant.
    pub fn new(tags: Vec<Tag>) -> Result<Genotype> {
        if tags.is_empty() {
            return Err(Error::EmptyGenotype);
        }
        let mut tags = tags;
        tags.sort();
        tags.dedup();
        Ok(Genotype(tags))
    }

    pub fn single(tag: Tag) -> Genotype {
        Genotype(vec![tag])
    }

    pub fn parse_list(s: &str) -> Result<Genotype> {
        let tags = s
            .split_whitespace()
            .map(Tag::parse)
            .collect::<Result<Vec<_>>>()?;
        Genotype::new(tags)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_single(&self) -> bool {
        self.0.len() == 1
    }

    pub fn tags(&self) -> &[Tag] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Tag> {
        self.0.iter()
    }

    pub fn contains(&self, tag: &Tag) -> bool {
        self.0.binary_search(tag).is_ok()
    }

    pub fn is_subset_of(&self, other: &Genotype) -> bool {
        self.0.iter().all(|t| other.contains(t))
    }

    /// This genotype plus one more tag.
    pub fn with_tag(&self, tag: Tag) -> Genotype {
        let mut tags = self.0.clone();
        tags.push(tag);
        tags.sort();
        tags.dedup();
        Genotype(tags)
    }

    /// Removes `tag`; `None` if that would leave the genotype empty.
    pub fn without_tag(&self, tag: &Tag) -> Option<Genotype> {
        if !self.contains(tag) || self.0.len() == 1 {
            return None;
        }
        Some(Genotype(
            self.0.iter().filter(|t| *t != tag).cloned().collect(),
        ))
    }
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, tag) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{tag}")?;
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a Genotype {
    type Item = &'a Tag;
    type IntoIter = std::slice::Iter<'a, Tag>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

pub fn parse_tag(s: &str) -> Result<Tag> {
    Tag::parse(s)
}

pub fn make_genotype(tags: Vec<Tag>) -> Result<Genotype> {
    Genotype::new(tags)
}

/// Ordered many-to-one mapping from a fine tagset to a coarse one.
///
/// Lookup walks the entries in order; the first matching pattern wins and
/// a tag no pattern matches maps to itself, so the mapping is total.
#[derive(Debug, Clone, Default)]
pub struct TagsetMap {
    entries: Vec<(TagPattern, Tag)>,
}

impl TagsetMap {
    pub fn new(entries: Vec<(TagPattern, Tag)>) -> TagsetMap {
        TagsetMap { entries }
    }

    pub fn empty() -> TagsetMap {
        TagsetMap::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(TagPattern, Tag)] {
        &self.entries
    }

    /// One entry per line: `PATTERN<TAB>target_tag`. `#` starts a comment.
    /// Entries apply in file order.
    pub fn parse(text: &str, source_name: &str) -> Result<TagsetMap> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (pat, target) = line.split_once('\t').ok_or_else(|| Error::TagsetParse {
                source_name: source_name.to_string(),
                line: line_no,
                message: "expected PATTERN<TAB>target_tag".to_string(),
            })?;
            let pattern = TagPattern::parse(pat.trim()).map_err(|e| Error::TagsetParse {
                source_name: source_name.to_string(),
                line: line_no,
                message: e.to_string(),
            })?;
            let tag = Tag::parse(target.trim()).map_err(|e| Error::TagsetParse {
                source_name: source_name.to_string(),
                line: line_no,
                message: e.to_string(),
            })?;
            entries.push((pattern, tag));
        }
        Ok(TagsetMap { entries })
    }

    pub fn load(path: &Path) -> Result<TagsetMap> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        TagsetMap::parse(&text, &path.display().to_string())
    }

    /// Target of the first matching pattern; the tag itself if none matches.
    pub fn reduce_tag(&self, tag: &Tag) -> Tag {
        for (pattern, target) in &self.entries {
            if pattern.matches(tag) {
                return target.clone();
            }
        }
        tag.clone()
    }

    /// Maps every tag and re-canonicalizes; the result is never larger than
    /// the input (distinct source tags may collapse onto one target).
    pub fn reduce_genotype(&self, genotype: &Genotype) -> Genotype {
        let reduced: BTreeSet<Tag> = genotype.iter().map(|t| self.reduce_tag(t)).collect();
        Genotype(reduced.into_iter().collect())
    }
}
