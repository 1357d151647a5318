use unicode_segmentation::UnicodeSegmentation;

fn is_pictographic(c: char) -> bool {
    matches!(c as u32,
        0x1F000..=0x1FAFF | 0x2600..=0x27BF | 0x2B00..=0x2BFF | 0x2300..=0x23FF | 0x3030 | 0x303D | 0x3297 | 0x3299)
}

fn is_url(chunk: &str) -> bool {
    let lower = chunk.to_ascii_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

fn is_tag_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Word tokenizer for message text.
///
/// URLs are dropped, `#hashtag` and `@mention` stay single tokens, emoji are
/// kept as tokens and punctuation is discarded. Other text is split on
/// Unicode word boundaries; everything is lowercased.
pub fn tokenize(text: &str) -> Vec<String> {
    tokenize_cased(text, true)
}

pub(crate) fn tokenize_cased(text: &str, lowercase: bool) -> Vec<String> {
    let case = |s: &str| if lowercase { s.to_lowercase() } else { s.to_string() };
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        if is_url(chunk) {
            continue;
        }
        let mut rest = chunk;
        while let Some(start) = rest.find(['#', '@']) {
            let (before, tagged) = rest.split_at(start);
            let sigil_len = 1;
            let body_len: usize = tagged[sigil_len..]
                .chars()
                .take_while(|c| is_tag_char(*c))
                .map(char::len_utf8)
                .sum();
            if body_len == 0 {
                push_words(&rest[..start + sigil_len], lowercase, &mut out);
                rest = &rest[start + sigil_len..];
                continue;
            }
            push_words(before, lowercase, &mut out);
            out.push(case(&tagged[..sigil_len + body_len]));
            rest = &tagged[sigil_len + body_len..];
        }
        push_words(rest, lowercase, &mut out);
    }
    out
}

fn push_words(s: &str, lowercase: bool, out: &mut Vec<String>) {
    for seg in s.split_word_bounds() {
        if seg.chars().any(char::is_alphanumeric) {
            out.push(if lowercase { seg.to_lowercase() } else { seg.to_string() });
        } else if seg.chars().any(is_pictographic) {
            let emoji: String = seg.chars().filter(|c| *c != '\u{FE0F}').collect();
            out.push(emoji);
        }
    }
}
