use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Document, Span};

const MALE: &[&str] = &["John", "Peter", "Mark", "David", "Paul", "Tom", "James", "Henry"];
const FEMALE: &[&str] = &["Mary", "Anna", "Lucy", "Emma", "Sarah", "Kate", "Julia", "Laura"];
const SURNAMES: &[&str] = &["Smith", "Brown", "Miller", "Davis", "Clark", "Lewis", "Walker", "Young"];
const NOUNS: &[&str] = &["cat", "dog", "car", "book", "lamp", "box", "horse", "bike"];
const ADJECTIVES: &[&str] = &["red", "old", "small", "new", "heavy", "quiet"];
const PLACES: &[&str] = &[
    "park", "river", "market", "station", "garden", "school", "bridge", "hotel", "museum", "harbor", "library",
    "church",
];

/// Sentence templates. `{Ns}`, `{No}`, `{Np}` are subject, object and
/// possessive references to entity slot N; `{L}` is a place that is never
/// annotated. The second field constrains slot kinds: `P` person, `A` any.
const TEMPLATES: &[(&str, &str)] = &[
    ("{0s} walked to the {L} .", "P"),
    ("{0s} was tired after the long day .", "P"),
    ("Everyone at the {L} liked {0o} .", "A"),
    ("{0p} friend waited near the {L} .", "P"),
    ("{0s} looked at {0p} watch and sighed .", "P"),
    ("Nobody noticed {0o} at first .", "A"),
    ("{0s} was near the {L} .", "A"),
    ("{0s} saw {1o} near the {L} .", "PA"),
    ("{0s} talked about {1o} for hours .", "PA"),
    ("{0s} said that {1s} was important .", "PA"),
    ("{0s} met {1o} and {0s} smiled .", "PP"),
    ("{0s} gave {1o} a present .", "PP"),
    ("{0s} and {1s} went to the {L} together .", "PP"),
    ("Later {0s} called {1o} from the {L} .", "PP"),
];

const FILLERS: &[&str] = &[
    "The weather was cold .",
    "Nothing happened for a while .",
    "Time passed slowly .",
    "The news came in the evening .",
    "Rain fell all night .",
];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Male,
    Female,
    Object,
}

struct Entity {
    kind: Kind,
    first: &'static str,
    second: &'static str,
    mentions: Vec<Span>,
}

impl Entity {
    fn is_person(&self) -> bool {
        self.kind != Kind::Object
    }

    /// Tokens for a reference in `role` (b's', b'o', b'p') and the number of
    /// leading tokens that form the mention.
    fn realize(&self, role: u8, rng: &mut ChaCha8Rng) -> (Vec<&'static str>, usize) {
        let first_mention = self.mentions.is_empty();
        let pronoun = !first_mention && rng.gen_bool(0.5);
        let mut tokens = if pronoun {
            let p = match (self.kind, role) {
                (Kind::Male, b's') => "he",
                (Kind::Male, b'o') => "him",
                (Kind::Male, _) => "his",
                (Kind::Female, b's') => "she",
                (Kind::Female, _) => "her",
                (Kind::Object, b'p') => "its",
                (Kind::Object, _) => "it",
            };
            vec![p]
        } else {
            match (self.kind, first_mention) {
                (Kind::Object, true) => vec!["the", self.second, self.first],
                (Kind::Object, false) => vec!["the", self.first],
                (_, true) => vec![self.first, self.second],
                (_, false) => vec![self.first],
            }
        };
        let width = tokens.len();
        if role == b'p' && !pronoun {
            tokens.push("'s");
        }
        (tokens, width)
    }
}

/// Deterministic templated documents with person and object coreference
/// chains. Each document has one male person, one female person and usually
/// one object, so every pronoun has a unique antecedent type; chains span
/// the same sentence, adjacent sentences and longer gaps across fillers.
pub fn generate_toy_corpus(n_docs: usize, seed: u64) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_docs).map(|i| generate_document(format!("toy_{seed}_{i}"), &mut rng)).collect()
}

fn generate_document(doc_key: String, rng: &mut ChaCha8Rng) -> Document {
    let mut entities = vec![
        Entity { kind: Kind::Male, first: pick(rng, MALE), second: pick(rng, SURNAMES), mentions: vec![] },
        Entity { kind: Kind::Female, first: pick(rng, FEMALE), second: pick(rng, SURNAMES), mentions: vec![] },
    ];
    if rng.gen_bool(0.7) {
        entities.push(Entity { kind: Kind::Object, first: pick(rng, NOUNS), second: pick(rng, ADJECTIVES), mentions: vec![] });
    }

    let mut templates: Vec<usize> = (0..TEMPLATES.len()).collect();
    templates.shuffle(rng);
    let mut fillers: Vec<usize> = (0..FILLERS.len()).collect();
    fillers.shuffle(rng);
    let mut places: Vec<&'static str> = PLACES.to_vec();
    places.shuffle(rng);

    let n_sentences = rng.gen_range(6..=9);
    // A run of fillers somewhere in the middle stretches some chains over
    // three or more sentences.
    let gap_at = if rng.gen_bool(0.5) { Some(rng.gen_range(2..n_sentences - 1)) } else { None };

    let mut sentences: Vec<Vec<String>> = Vec::new();
    let mut offset = 0;
    let mut s = 0;
    while s < n_sentences {
        if gap_at == Some(s) {
            for _ in 0..rng.gen_range(2..=3) {
                if let Some(f) = fillers.pop() {
                    push_plain(&mut sentences, &mut offset, FILLERS[f]);
                }
            }
        }
        let use_filler = rng.gen_bool(0.15) && !fillers.is_empty();
        if use_filler {
            let f = fillers.pop().expect("checked non-empty");
            push_plain(&mut sentences, &mut offset, FILLERS[f]);
        } else if let Some(t) = templates.pop() {
            let slots = choose_slots(TEMPLATES[t].1, &entities, rng);
            let sent = fill_template(TEMPLATES[t].0, &slots, &mut entities, &mut places, offset, rng);
            offset += sent.len();
            sentences.push(sent);
        }
        s += 1;
    }

    // Guarantee at least one chain.
    while entities.iter().all(|e| e.mentions.len() < 2) {
        let e = entities.iter().position(|e| !e.mentions.is_empty()).unwrap_or(0);
        let sent = fill_template("{0s} was ready .", &[e], &mut entities, &mut places, offset, rng);
        offset += sent.len();
        sentences.push(sent);
    }

    let clusters = entities
        .into_iter()
        .filter(|e| e.mentions.len() >= 2)
        .map(|e| e.mentions)
        .collect();
    Document::new(doc_key, sentences, clusters).expect("toy documents are valid by construction")
}

fn pick(rng: &mut ChaCha8Rng, items: &[&'static str]) -> &'static str {
    items[rng.gen_range(0..items.len())]
}

fn push_plain(sentences: &mut Vec<Vec<String>>, offset: &mut usize, text: &str) {
    let sent: Vec<String> = text.split(' ').map(String::from).collect();
    *offset += sent.len();
    sentences.push(sent);
}

fn choose_slots(kinds: &str, entities: &[Entity], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for k in kinds.bytes() {
        let options: Vec<usize> = (0..entities.len())
            .filter(|i| !chosen.contains(i))
            .filter(|&i| k == b'A' || entities[i].is_person())
            .collect();
        chosen.push(options[rng.gen_range(0..options.len())]);
    }
    chosen
}

fn fill_template(
    template: &str,
    slots: &[usize],
    entities: &mut [Entity],
    places: &mut Vec<&'static str>,
    offset: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for piece in template.split(' ') {
        let b = piece.as_bytes();
        if piece == "{L}" {
            out.push(String::from(places.pop().unwrap_or("town")));
        } else if b.len() == 4 && b[0] == b'{' && b[3] == b'}' {
            let entity = &mut entities[slots[(b[1] - b'0') as usize]];
            let (tokens, width) = entity.realize(b[2], rng);
            let start = offset + out.len();
            entity.mentions.push(Span::new(start, start + width - 1));
            out.extend(tokens.into_iter().map(String::from));
        } else {
            out.push(String::from(piece));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    #[test]
    fn single_document_has_a_chain() {
        let docs = generate_toy_corpus(1, 0);
        assert_eq!(docs.len(), 1);
        assert!(!docs[0].clusters.is_empty());
        docs[0].validate().unwrap();
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(generate_toy_corpus(20, 0), generate_toy_corpus(20, 0));
        assert_ne!(generate_toy_corpus(20, 0), generate_toy_corpus(20, 1));
    }

    #[test]
    fn vocabulary_is_small() {
        let docs = generate_toy_corpus(200, 3);
        let types: BTreeSet<&str> = docs.iter().flat_map(Document::tokens).collect();
        assert!(types.len() <= 500, "{} types", types.len());
    }

    #[test]
    fn chains_cover_several_distances() {
        let docs = generate_toy_corpus(40, 0);
        let mut same = false;
        let mut adjacent = false;
        let mut far = false;
        for d in &docs {
            let sent = d.sentence_map();
            for c in &d.clusters {
                for w in c.windows(2) {
                    match sent[w[1].start] - sent[w[0].start] {
                        0 => same = true,
                        1 => adjacent = true,
                        k if k >= 3 => far = true,
                        _ => {}
                    }
                }
            }
        }
        assert!(same && adjacent && far);
    }
}
