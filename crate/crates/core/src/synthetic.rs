//! Seeded synthetic corpora and resources for demos and tests.
//!
//! The ADR corpus is built from paired templates: an adverse-reaction
//! template and a non-reaction template that use the same words in a
//! different order (`<MED> makes me <ADR>` against `<ADR> makes me <MED>`),
//! so only word order tells them apart. Other non-reaction tweets mention a
//! medication or a symptom alone. Individual medication and reaction terms
//! are rare, so features generalized over the lexicons help on held-out
//! data. Labels are flipped with a small probability.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{ClassId, Dataset, Tweet};
use crate::resources::{ClusterMap, EmbeddingTable, Resources, ScoredLexicon, TermLexicon};

pub const MEDICATIONS: &[&str] = &[
    "advil", "tylenol", "prozac", "xanax", "zoloft", "lexapro", "seroquel", "humira", "lipitor",
    "metformin", "rivaroxaban", "xarelto", "ibuprofen", "paxil", "cymbalta", "abilify", "effexor",
    "vyvanse", "adderall", "ambien", "lyrica", "synthroid", "warfarin", "trazodone", "wellbutrin",
    "celexa", "klonopin", "levaquin", "cipro", "prednisone", "tamiflu", "vicodin", "naproxen",
    "nicotine lozenges", "nicotine patch",
];

pub const REACTIONS: &[&str] = &[
    "headache", "nausea", "dizziness", "insomnia", "drowsiness", "fatigue", "weight gain",
    "hair loss", "dry mouth", "rash", "itching", "vomiting", "diarrhea", "constipation",
    "anxiety", "panic attacks", "nightmares", "tremors", "blurred vision", "heart palpitations",
    "night sweats", "muscle pain", "joint pain", "stomach ache", "cramps", "numbness", "tingling",
    "brain fog", "memory loss", "mood swings", "irritability", "restless legs", "chest pain",
    "shortness of breath", "swelling", "bruising", "nosebleeds", "hives", "acne", "hot flashes",
    "chills", "fever", "sore throat", "back pain", "loss of appetite", "jaw clenching",
    "yawning", "twitching", "vertigo", "ringing ears", "heartburn", "bloating", "sweating",
    "shaking", "migraine", "spasms", "tinnitus", "lethargy", "grogginess", "hallucinations",
];

pub const PRONOUNS: &[&str] = &["i", "me", "my", "mine", "myself", "im"];

const FILLER: &[&str] = &[
    "lol", "ugh", "omg", "today", "tonight", "again", "seriously", "honestly", "literally",
    "smh", "rn", "wow", "damn", "yay", "help", "sigh", "fml", "tbh", "idk", "ok",
];

const CHATTER: &[&str] = &[
    "watching the game tonight with friends",
    "this weather is so nice today",
    "cannot wait for the weekend",
    "just finished my coffee",
    "traffic was terrible this morning",
    "new episode comes out tomorrow",
    "my cat knocked over my plant",
    "going to the gym later",
    "best pizza in town honestly",
    "work was long but fine",
];

const POSITIVE: &[&str] = &["great", "love", "happy", "better", "good", "fixing", "thanks", "yay", "nice", "best"];
const NEGATIVE: &[&str] = &["awful", "worst", "hell", "bad", "terrible", "ugh", "hate", "unreal", "sick", "damn"];

/// (reaction template, non-reaction template) over the same bag of words.
/// `{m}` is a medication, `{a}` a reaction term.
const PAIRED: &[(&str, &str)] = &[
    ("{m} is giving me {a} so bad", "{a} is so bad giving me {m}"),
    ("started {m} and now {a}", "started {a} and now {m}"),
    ("{a} after taking {m}", "taking {m} after {a}"),
    ("{m} makes me {a}", "{a} makes me {m}"),
    ("stopped {m} because of {a}", "stopped {a} because of {m}"),
    ("{m} side effects : {a}", "{a} side effects : {m}"),
    ("thanks {m} for the {a}", "thanks for the {m} {a}"),
    ("woke up with {a} from {m}", "woke up from {a} with {m}"),
];

/// Non-reaction templates without a paired counterpart.
const MED_ONLY: &[&str] = &[
    "picked up my {m} prescription today",
    "is {m} covered by insurance",
    "ran out of {m} again",
    "doctor switched me to {m}",
    "generic {m} is way cheaper",
    "that {m} commercial is so annoying",
];

const SYMPTOM_ONLY: &[&str] = &[
    "my {a} is killing me today",
    "this {a} will not go away",
    "anyone else get {a} when it rains",
];

const INTAKE_1: &[&str] = &[
    "just took my {m}",
    "{m} kicking in now",
    "took two {m} and feel better",
    "i need more {m}",
    "finally took {m} for my {a}",
    "my {m} is working great today",
];
const INTAKE_2: &[&str] = &[
    "might need some {m} tonight",
    "should i take {m} for this {a}",
    "gonna take {m} later probably",
    "maybe {m} will help my {a}",
    "thinking about taking {m}",
];
const INTAKE_3: &[&str] = &[
    "i need {m}",
    "my mom takes {m}",
    "never taking {m} again",
    "that {m} commercial is so annoying",
    "is {m} covered by insurance",
    "ran out of {m} and cannot get more",
];

fn fill(template: &str, rng: &mut ChaCha8Rng, meds: &[&str], reactions: &[&str]) -> String {
    let mut out = template.to_owned();
    while let Some(pos) = out.find("{m}") {
        out.replace_range(pos..pos + 3, meds.choose(rng).expect("non-empty"));
    }
    while let Some(pos) = out.find("{a}") {
        out.replace_range(pos..pos + 3, reactions.choose(rng).expect("non-empty"));
    }
    out
}

/// Surface noise: filler words at the edges, casing, mentions, hashtags,
/// emoticons, URLs and trailing punctuation.
fn decorate(text: &str, rng: &mut ChaCha8Rng) -> String {
    let mut words: Vec<String> = text.split(' ').map(str::to_owned).collect();
    if rng.gen_bool(0.3) {
        words.insert(0, FILLER.choose(rng).expect("non-empty").to_string());
    }
    if rng.gen_bool(0.3) {
        words.push(FILLER.choose(rng).expect("non-empty").to_string());
    }
    if rng.gen_bool(0.15) {
        words.insert(0, format!("@user{}", rng.gen_range(0..500)));
    }
    if rng.gen_bool(0.1) {
        let i = rng.gen_range(0..words.len());
        words[i] = words[i].to_uppercase();
    }
    if rng.gen_bool(0.1) {
        words.push(format!("#{}", FILLER.choose(rng).expect("non-empty")));
    }
    let mut s = words.join(" ");
    match rng.gen_range(0..10) {
        0 => s.push_str(" :("),
        1 => s.push_str(" :)"),
        2 => s.push_str("!!"),
        3 => s.push('?'),
        4 => s.push_str(" http://t.co/abc123"),
        _ => {}
    }
    s
}

/// A binary ADR corpus of `n` tweets with `majority_per_minority` non-ADR
/// tweets per ADR tweet and label noise probability `noise`.
pub fn adr_corpus(n: usize, majority_per_minority: usize, noise: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positives = ((n as f64) / (majority_per_minority as f64 + 1.0)).round() as usize;
    let mut tweets = Vec::with_capacity(n);
    for i in 0..n {
        let adr = i < positives;
        let text = if adr {
            let (t, _) = PAIRED.choose(&mut rng).expect("non-empty");
            fill(t, &mut rng, MEDICATIONS, REACTIONS)
        } else {
            match rng.gen_range(0..100) {
                0..=19 => {
                    let (_, t) = PAIRED.choose(&mut rng).expect("non-empty");
                    fill(t, &mut rng, MEDICATIONS, REACTIONS)
                }
                20..=54 => fill(MED_ONLY.choose(&mut rng).expect("non-empty"), &mut rng, MEDICATIONS, REACTIONS),
                55..=79 => fill(SYMPTOM_ONLY.choose(&mut rng).expect("non-empty"), &mut rng, MEDICATIONS, REACTIONS),
                _ => CHATTER.choose(&mut rng).expect("non-empty").to_string(),
            }
        };
        let mut label = ClassId::from(adr);
        if rng.gen_bool(noise) {
            label = 1 - label;
        }
        tweets.push((label, decorate(&text, &mut rng)));
    }
    tweets.shuffle(&mut rng);
    let tweets = tweets
        .into_iter()
        .enumerate()
        .map(|(i, (label, text))| Tweet::labeled(format!("syn{seed}-{i}"), label, text))
        .collect();
    Dataset::new(tweets, [0, 1]).expect("generated labels are in the domain")
}

/// A three-class medication-intake corpus with roughly a 1:1.6:2.5 class
/// distribution.
pub fn intake_corpus(n: usize, noise: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tweets = Vec::with_capacity(n);
    for i in 0..n {
        let (mut label, templates): (ClassId, &[&str]) = match rng.gen_range(0..100) {
            0..=19 => (1, INTAKE_1),
            20..=50 => (2, INTAKE_2),
            _ => (3, INTAKE_3),
        };
        let text = fill(templates.choose(&mut rng).expect("non-empty"), &mut rng, MEDICATIONS, REACTIONS);
        if rng.gen_bool(noise) {
            label = rng.gen_range(1..=3);
        }
        tweets.push(Tweet::labeled(
            format!("int{seed}-{i}"),
            label,
            decorate(&text, &mut rng),
        ));
    }
    Dataset::new(tweets, [1, 2, 3]).expect("generated labels are in the domain")
}

fn words_of(terms: &[&str]) -> Vec<String> {
    let mut w: Vec<String> = terms
        .iter()
        .flat_map(|t| t.split(' '))
        .map(str::to_owned)
        .collect();
    w.sort();
    w.dedup();
    w
}

fn vocabulary() -> Vec<String> {
    let mut v = words_of(MEDICATIONS);
    v.extend(words_of(REACTIONS));
    for group in [FILLER, POSITIVE, NEGATIVE, PRONOUNS] {
        v.extend(group.iter().map(|s| s.to_string()));
    }
    for t in PAIRED.iter().flat_map(|(a, b)| [*a, *b]).chain(MED_ONLY.iter().copied()).chain(CHATTER.iter().copied()) {
        v.extend(t.split(' ').filter(|w| !w.starts_with('{')).map(str::to_owned));
    }
    v.sort();
    v.dedup();
    v
}

/// Embeddings in which medication words and reaction words each sit near
/// their own direction; other words get small random vectors.
fn embeddings(name: &str, dim: usize, spread: f64, rng: &mut ChaCha8Rng) -> EmbeddingTable {
    let meds = words_of(MEDICATIONS);
    let reactions = words_of(REACTIONS);
    let rows: Vec<(String, Vec<f64>)> = vocabulary()
        .into_iter()
        .map(|w| {
            let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-spread..spread)).collect();
            if meds.contains(&w) {
                v[0] += 1.0;
            }
            if reactions.contains(&w) {
                v[1] += 1.0;
            }
            (w, v)
        })
        .collect();
    EmbeddingTable::new(name, dim, rows).expect("rows have the declared dimension")
}

fn clusters(name: &str, buckets: usize, rng: &mut ChaCha8Rng, domain: bool) -> ClusterMap {
    let meds = words_of(MEDICATIONS);
    let reactions = words_of(REACTIONS);
    let entries: Vec<(String, String)> = vocabulary()
        .into_iter()
        .map(|w| {
            let id = if domain && meds.contains(&w) {
                "med".to_owned()
            } else if domain && reactions.contains(&w) {
                format!("adr{}", rng.gen_range(0..3))
            } else {
                format!("{:0>4b}", rng.gen_range(0..buckets))
            };
            (w, id)
        })
        .collect();
    ClusterMap::new(name, entries).expect("one cluster per word")
}

fn sentiment(name: &str, scale: f64, offset: f64) -> ScoredLexicon {
    let mut entries: Vec<(String, f64)> = Vec::new();
    for w in POSITIVE {
        entries.push((w.to_string(), offset + scale));
    }
    for w in NEGATIVE {
        entries.push((w.to_string(), offset - scale));
    }
    for w in words_of(REACTIONS).into_iter().step_by(2) {
        entries.push((w, offset - 0.5 * scale));
    }
    ScoredLexicon::new(name, entries)
}

/// A resource bundle with every table and lexicon the shipped presets name.
pub fn resources(seed: u64) -> Resources {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut res = Resources::new()
        .with_medications(TermLexicon::new("medications", MEDICATIONS.iter().copied()))
        .with_adr(TermLexicon::new("adr", REACTIONS.iter().copied()))
        .with_pronouns(TermLexicon::new("pronouns", PRONOUNS.iter().copied()));
    res.add_embeddings(embeddings("word2vec_general", 8, 0.6, &mut rng));
    res.add_embeddings(embeddings("conceptnet", 6, 0.8, &mut rng));
    res.add_embeddings(embeddings("word2vec_domain", 8, 0.3, &mut rng));
    res.add_clusters(clusters("brown_general", 16, &mut rng, false));
    res.add_clusters(clusters("kmeans_domain", 8, &mut rng, true));
    res.add_sentiment(sentiment("hu_liu", 1.0, 0.0));
    res.add_sentiment(sentiment("nrc_vad", 0.4, 0.5));
    res.add_sentiment(sentiment("labmt", 2.0, 0.0));
    res.add_sentiment(sentiment("nrc_emoticon", 0.8, 0.0));
    res
}
