use super::{Emoticons, Token, TokenSequence, URL_PLACEHOLDER, USER_PLACEHOLDER};

/// Tokenizes normalized text with the default emoticon list.
pub fn tokenize(text: &str) -> TokenSequence {
    tokenize_with(text, &Emoticons::default())
}

/// Whitespace split, then leading and trailing punctuation runs are detached as
/// separate tokens. Emoticons, hashtags, `@username` and `http://someurl` stay whole.
pub fn tokenize_with(text: &str, emoticons: &Emoticons) -> TokenSequence {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        split_chunk(chunk, emoticons, &mut tokens);
    }
    TokenSequence::new(tokens.into_iter().map(Token::new).collect())
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric() && c != '_'
}

fn is_hashtag(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next() == Some('#')
        && s.len() > 1
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn is_protected(s: &str, emoticons: &Emoticons) -> bool {
    s == USER_PLACEHOLDER || s == URL_PLACEHOLDER || is_hashtag(s) || emoticons.contains(s)
}

fn split_chunk<'a>(chunk: &'a str, emoticons: &Emoticons, out: &mut Vec<&'a str>) {
    if is_protected(chunk, emoticons) {
        out.push(chunk);
        return;
    }
    let core_start = chunk
        .char_indices()
        .find(|&(_, c)| !is_punct(c))
        .map(|(i, _)| i);
    let Some(mut start) = core_start else {
        // all punctuation
        out.push(chunk);
        return;
    };
    let end = chunk
        .char_indices()
        .rev()
        .find(|&(_, c)| !is_punct(c))
        .map(|(i, c)| i + c.len_utf8())
        .unwrap_or(chunk.len());

    // keep a '#' or '@' attached to the word it introduces
    if start > 0 {
        let prev = chunk[..start].chars().next_back().unwrap();
        if prev == '#' || prev == '@' {
            start -= 1;
        }
    }
    // the placeholders carry interior punctuation of their own
    let mut core = &chunk[start..end];
    let mut end = end;
    for special in [URL_PLACEHOLDER, USER_PLACEHOLDER] {
        let Some(after) = chunk[start..].strip_prefix(special) else {
            continue;
        };
        if after.starts_with(|c: char| c.is_alphanumeric() || c == '_') {
            continue;
        }
        core = special;
        end = start + special.len();
    }
    if start > 0 {
        out.push(&chunk[..start]);
    }
    out.push(core);
    if end < chunk.len() {
        out.push(&chunk[end..]);
    }
}
