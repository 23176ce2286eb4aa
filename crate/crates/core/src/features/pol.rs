//! People / organization / location slot features and the gazetteer-based
//! baseline tagger used when a document carries no entity annotations.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::FeatureError;
use crate::corpus::{Document, PolEntity, PolKind};

pub const PERSON_SLOTS: usize = 54;
pub const ORGANIZATION_SLOTS: usize = 45;
pub const LOCATION_SLOTS: usize = 36;
pub const POL_SLOTS: usize = PERSON_SLOTS + ORGANIZATION_SLOTS + LOCATION_SLOTS;

/// Sub-slots per entity, in slot order. The first entry is the entity name.
pub fn sub_slots(kind: PolKind) -> [&'static str; 3] {
    match kind {
        PolKind::Person => ["name", "honorific", "title"],
        PolKind::Organization => ["organization", "business", "type"],
        PolKind::Location => ["location", "country", "region"],
    }
}

/// (first slot offset within x6..x140, block length) for a kind.
pub fn block(kind: PolKind) -> (usize, usize) {
    match kind {
        PolKind::Person => (0, PERSON_SLOTS),
        PolKind::Organization => (PERSON_SLOTS, ORGANIZATION_SLOTS),
        PolKind::Location => (PERSON_SLOTS + ORGANIZATION_SLOTS, LOCATION_SLOTS),
    }
}

pub fn kind_of_slot(slot: usize) -> PolKind {
    if slot < PERSON_SLOTS {
        PolKind::Person
    } else if slot < PERSON_SLOTS + ORGANIZATION_SLOTS {
        PolKind::Organization
    } else {
        PolKind::Location
    }
}

/// Reporting name of a slot, e.g. `POLtag1_honorific` or `POLtag5_location`.
/// The entity number counts within its kind.
pub fn slot_name(slot: usize) -> String {
    let kind = kind_of_slot(slot);
    let rel = slot - block(kind).0;
    format!("POLtag{}_{}", rel / 3 + 1, sub_slots(kind)[rel % 3])
}

/// Inverse of [`slot_name`].
pub fn slot_index(name: &str) -> Option<usize> {
    let rest = name.strip_prefix("POLtag")?;
    let (num, sub) = rest.split_once('_')?;
    let entity: usize = num.parse().ok()?;
    if entity == 0 {
        return None;
    }
    for kind in [PolKind::Person, PolKind::Organization, PolKind::Location] {
        if let Some(pos) = sub_slots(kind).iter().position(|s| *s == sub) {
            let (start, len) = block(kind);
            let rel = (entity - 1) * 3 + pos;
            return (rel < len).then_some(start + rel);
        }
    }
    None
}

/// Fills x6..x140 from entities in document order. Overflow is dropped.
pub fn pol_slots(entities: &[PolEntity]) -> Vec<Option<String>> {
    let mut slots = vec![None; POL_SLOTS];
    let mut used: HashMap<PolKind, usize> = HashMap::new();
    for entity in entities {
        let (start, len) = block(entity.kind);
        let n = used.entry(entity.kind).or_insert(0);
        if (*n + 1) * 3 > len {
            continue;
        }
        let base = start + *n * 3;
        let subs = sub_slots(entity.kind);
        slots[base] = Some(entity.name.clone());
        for (i, key) in subs.iter().enumerate().skip(1) {
            slots[base + i] = entity.attrs.get(*key).cloned();
        }
        *n += 1;
    }
    slots
}

/// Name lists driving the baseline tagger.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    pub persons: HashSet<String>,
    pub organizations: HashSet<String>,
    /// location name → country (may be empty).
    pub locations: BTreeMap<String, Option<String>>,
    pub honorifics: Vec<String>,
    pub corporate_cues: HashSet<String>,
}

fn name_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'))
}

impl Gazetteer {
    pub fn reference() -> Self {
        Gazetteer::from_lists(
            include_str!("../../data/persons.txt"),
            include_str!("../../data/organizations.txt"),
            include_str!("../../data/locations.tsv"),
            include_str!("../../data/honorifics.txt"),
            include_str!("../../data/corporate_cues.txt"),
        )
        .expect("bundled gazetteer is valid")
    }

    /// Builds a gazetteer from file contents: one name per line; the
    /// location list optionally carries `name<TAB>country`.
    pub fn from_lists(
        persons: &str,
        organizations: &str,
        locations: &str,
        honorifics: &str,
        corporate_cues: &str,
    ) -> Result<Self, FeatureError> {
        let mut locs = BTreeMap::new();
        for line in name_lines(locations) {
            let mut parts = line.split('\t');
            let name = parts.next().unwrap_or_default().trim().to_string();
            let country = parts.next().map(|c| c.trim().to_string()).filter(|c| !c.is_empty());
            if parts.next().is_some() {
                return Err(FeatureError::Format(format!("location gazetteer line `{line}`")));
            }
            locs.insert(name, country);
        }
        Ok(Gazetteer {
            persons: name_lines(persons).map(str::to_string).collect(),
            organizations: name_lines(organizations).map(str::to_string).collect(),
            locations: locs,
            honorifics: name_lines(honorifics).map(str::to_string).collect(),
            corporate_cues: name_lines(corporate_cues).map(str::to_string).collect(),
        })
    }
}

#[derive(Debug)]
struct Word<'a> {
    text: &'a str,
    end: usize,
    start: usize,
}

fn words(text: &str) -> Vec<Word<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_alphanumeric(), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push(Word { text: &text[s..i], start: s, end: i });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Word { text: &text[s..], start: s, end: text.len() });
    }
    out
}

fn capitalized(w: &str) -> bool {
    w.chars().next().is_some_and(char::is_uppercase)
}

/// Returns entity annotations when present, otherwise runs the baseline
/// heuristic: maximal runs of capitalized words, classified by honorific
/// cue, organization gazetteer or corporate cue word, location gazetteer,
/// then person gazetteer. Unmatched runs are dropped.
pub fn pol_tag(doc: &Document, gazetteer: &Gazetteer) -> Vec<PolEntity> {
    if let Some(annotations) = &doc.pol_annotations {
        return annotations.clone();
    }
    tag_text(&doc.text, gazetteer)
}

pub fn tag_text(text: &str, gazetteer: &Gazetteer) -> Vec<PolEntity> {
    let words = words(text);
    let mut out = Vec::new();
    let mut pending_honorific: Option<String> = None;
    let mut i = 0;
    while i < words.len() {
        let w = &words[i];
        if let Some((cue, end)) = match_honorific(text, w, gazetteer) {
            // A cue binds to an immediately following run.
            let next_adjacent = words
                .get(i + 1)
                .is_some_and(|n| capitalized(n.text) && text[end..n.start].chars().all(char::is_whitespace));
            if next_adjacent {
                pending_honorific = Some(cue);
                i += 1;
                continue;
            }
        }
        if !capitalized(w.text) {
            pending_honorific = None;
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < words.len()
            && capitalized(words[j].text)
            && text[words[j - 1].end..words[j].start].chars().all(char::is_whitespace)
            && match_honorific(text, &words[j], gazetteer).is_none()
        {
            j += 1;
        }
        let run_text = words[i..j].iter().map(|w| w.text).collect::<Vec<_>>().join(" ");
        let last = words[j - 1].text;
        if let Some(h) = pending_honorific.take() {
            out.push(PolEntity::new(PolKind::Person, run_text).with_attr("honorific", h));
        } else if gazetteer.organizations.contains(&run_text) || (j - i > 1 && gazetteer.corporate_cues.contains(last)) {
            out.push(PolEntity::new(PolKind::Organization, run_text));
        } else if let Some(country) = gazetteer.locations.get(&run_text) {
            let mut e = PolEntity::new(PolKind::Location, run_text);
            if let Some(c) = country {
                e = e.with_attr("country", c.clone());
            }
            out.push(e);
        } else if gazetteer.persons.contains(&run_text) {
            out.push(PolEntity::new(PolKind::Person, run_text));
        }
        i = j;
    }
    out
}

/// Matches a cue such as `Dr.` against a word plus its trailing period.
/// Returns the cue and the byte offset just past it.
fn match_honorific(text: &str, w: &Word<'_>, gazetteer: &Gazetteer) -> Option<(String, usize)> {
    let dotted = text[w.end..].starts_with('.');
    gazetteer.honorifics.iter().find_map(|cue| match cue.strip_suffix('.') {
        Some(stem) if dotted && stem == w.text => Some((cue.clone(), w.end + 1)),
        None if cue == w.text => Some((cue.clone(), w.end)),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Label;

    #[test]
    fn partition_sizes() {
        assert_eq!(POL_SLOTS, 135);
        assert_eq!(slot_name(0), "POLtag1_name");
        assert_eq!(slot_name(1), "POLtag1_honorific");
        assert_eq!(slot_name(53), "POLtag18_title");
        assert_eq!(slot_name(54), "POLtag1_organization");
        assert_eq!(slot_name(99), "POLtag1_location");
        assert_eq!(slot_name(99 + 12), "POLtag5_location");
        assert_eq!(slot_name(134), "POLtag12_region");
        for i in 0..POL_SLOTS {
            assert_eq!(slot_index(&slot_name(i)), Some(i));
        }
        assert_eq!(slot_index("POLtag19_name"), None);
        assert_eq!(slot_index("POLtag0_name"), None);
    }

    #[test]
    fn empty_entities_all_null() {
        assert!(pol_slots(&[]).iter().all(Option::is_none));
    }

    #[test]
    fn person_with_honorific() {
        let slots = pol_slots(&[PolEntity::new(PolKind::Person, "Smith").with_attr("honorific", "Dr.")]);
        assert_eq!(slots[slot_index("POLtag1_name").unwrap()].as_deref(), Some("Smith"));
        assert_eq!(slots[slot_index("POLtag1_honorific").unwrap()].as_deref(), Some("Dr."));
        assert_eq!(slots.iter().flatten().count(), 2);
    }

    #[test]
    fn organizations_fill_their_block_only() {
        let slots = pol_slots(&[
            PolEntity::new(PolKind::Organization, "Red Cross"),
            PolEntity::new(PolKind::Organization, "Boeing"),
        ]);
        assert_eq!(slots[54].as_deref(), Some("Red Cross"));
        assert_eq!(slots[57].as_deref(), Some("Boeing"));
        assert!(slots[..54].iter().all(Option::is_none));
        assert!(slots[99..].iter().all(Option::is_none));
    }

    #[test]
    fn overflow_dropped() {
        let many: Vec<_> = (0..20).map(|i| PolEntity::new(PolKind::Location, format!("L{i}"))).collect();
        let slots = pol_slots(&many);
        assert_eq!(slots[99..].iter().flatten().count(), 12);
        assert!(slots[..99].iter().all(Option::is_none));
    }

    #[test]
    fn heuristic_tagger_trace() {
        let g = Gazetteer::reference();
        let doc = Document::new("d", "Dr. Smith visited Boston", Label::Unlabeled);
        let tags = pol_tag(&doc, &g);
        assert_eq!(
            tags,
            vec![
                PolEntity::new(PolKind::Person, "Smith").with_attr("honorific", "Dr."),
                PolEntity::new(PolKind::Location, "Boston").with_attr("country", "US"),
            ]
        );
    }

    #[test]
    fn heuristic_tagger_orgs_and_empty() {
        let g = Gazetteer::reference();
        let tags = tag_text("officials at Acme Widget Corp met the Red Cross in New York.", &g);
        assert_eq!(tags[0], PolEntity::new(PolKind::Organization, "Acme Widget Corp"));
        assert_eq!(tags[1], PolEntity::new(PolKind::Organization, "Red Cross"));
        assert_eq!(tags[2], PolEntity::new(PolKind::Location, "New York").with_attr("country", "US"));
        assert!(tag_text("nothing capitalized here.", &g).is_empty());
        assert!(tag_text("Unknown Words Only", &g).is_empty());
    }

    #[test]
    fn annotations_pass_through() {
        let g = Gazetteer::reference();
        let mut doc = Document::new("d", "Dr. Smith visited Boston", Label::Unlabeled);
        let ann = vec![PolEntity::new(PolKind::Organization, "Whatever").with_attr("business", "x")];
        doc.pol_annotations = Some(ann.clone());
        assert_eq!(pol_tag(&doc, &g), ann);
    }
}
