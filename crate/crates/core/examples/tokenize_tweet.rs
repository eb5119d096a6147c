// Normalization, tokenization, negation marking and Porter stemming.
//
//     cargo run --example tokenize_tweet

use medtweet::textprep::{mark_negation, normalize, porter_stem, tokenize, Negators};

fn main() {
    let raw = "@doc this seroquel is NOT helping me sleeeep at all :( http://t.co/x #insomnia";
    let text = normalize(raw);
    println!("normalized: {text}");

    let tokens = tokenize(&text);
    println!("tokens:     {:?}", tokens.texts());

    let marked = mark_negation(&tokens, &Negators::default());
    println!("negation:   {:?}", marked.rendered());

    let stems: Vec<String> = tokens.iter().map(|t| porter_stem(&t.lower())).collect();
    println!("stems:      {stems:?}");
}
