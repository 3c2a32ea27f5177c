//! The classic Porter stemming algorithm (Porter, 1980), steps 1a through 5b
//! exactly as published: no short-word cutoff, longest matching suffix per
//! step, condition tested once with no fallback to shorter suffixes.

use alloc::borrow::Cow;
use alloc::vec::Vec;

/// Stems a lowercase alphabetic token. Tokens containing anything other than
/// ASCII lowercase letters pass through unchanged.
pub fn stem(token: &str) -> Cow<'_, str> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_lowercase()) {
        return Cow::Borrowed(token);
    }
    let mut w: Vec<u8> = token.bytes().collect();
    step1a(&mut w);
    step1b(&mut w);
    step1c(&mut w);
    step2(&mut w);
    step3(&mut w);
    step4(&mut w);
    step5a(&mut w);
    step5b(&mut w);
    if w.as_slice() == token.as_bytes() {
        Cow::Borrowed(token)
    } else {
        // Only ASCII bytes are ever produced.
        Cow::Owned(alloc::string::String::from_utf8(w).expect("ascii"))
    }
}

fn is_cons(w: &[u8], i: usize) -> bool {
    match w[i] {
        b'a' | b'e' | b'i' | b'o' | b'u' => false,
        b'y' => i == 0 || !is_cons(w, i - 1),
        _ => true,
    }
}

/// m in the [C](VC){m}[V] decomposition of w.
fn measure(w: &[u8]) -> usize {
    let n = w.len();
    let mut i = 0;
    while i < n && is_cons(w, i) {
        i += 1;
    }
    let mut m = 0;
    loop {
        while i < n && !is_cons(w, i) {
            i += 1;
        }
        if i >= n {
            return m;
        }
        while i < n && is_cons(w, i) {
            i += 1;
        }
        m += 1;
    }
}

fn has_vowel(w: &[u8]) -> bool {
    (0..w.len()).any(|i| !is_cons(w, i))
}

/// *d: ends with a double consonant.
fn ends_double_cons(w: &[u8]) -> bool {
    let n = w.len();
    n >= 2 && w[n - 1] == w[n - 2] && is_cons(w, n - 1)
}

/// *o: ends cvc where the final consonant is not w, x or y.
fn ends_cvc(w: &[u8]) -> bool {
    let n = w.len();
    n >= 3
        && is_cons(w, n - 3)
        && !is_cons(w, n - 2)
        && is_cons(w, n - 1)
        && !matches!(w[n - 1], b'w' | b'x' | b'y')
}

fn ends_with(w: &[u8], suf: &[u8]) -> bool {
    w.len() >= suf.len() && &w[w.len() - suf.len()..] == suf
}

/// Applies at most one (suffix, replacement) rule: the longest matching
/// suffix wins and its m(stem) > min_measure condition decides, with no
/// fallback to shorter suffixes.
fn rule_list(w: &mut Vec<u8>, rules: &[(&[u8], &[u8])], min_measure: usize) {
    let mut best: Option<(&[u8], &[u8])> = None;
    for &(suf, rep) in rules {
        if ends_with(w, suf) && best.is_none_or(|(b, _)| suf.len() > b.len()) {
            best = Some((suf, rep));
        }
    }
    if let Some((suf, rep)) = best {
        let stem_len = w.len() - suf.len();
        if measure(&w[..stem_len]) > min_measure {
            w.truncate(stem_len);
            w.extend_from_slice(rep);
        }
    }
}

fn step1a(w: &mut Vec<u8>) {
    if ends_with(w, b"sses") || ends_with(w, b"ies") {
        w.truncate(w.len() - 2);
    } else if !ends_with(w, b"ss") && ends_with(w, b"s") {
        w.truncate(w.len() - 1);
    }
}

fn step1b(w: &mut Vec<u8>) {
    if ends_with(w, b"eed") {
        if measure(&w[..w.len() - 3]) > 0 {
            w.truncate(w.len() - 1);
        }
        return;
    }
    let removed = if ends_with(w, b"ed") && has_vowel(&w[..w.len() - 2]) {
        w.truncate(w.len() - 2);
        true
    } else if ends_with(w, b"ing") && has_vowel(&w[..w.len() - 3]) {
        w.truncate(w.len() - 3);
        true
    } else {
        false
    };
    if removed {
        if ends_with(w, b"at") || ends_with(w, b"bl") || ends_with(w, b"iz") {
            w.push(b'e');
        } else if ends_double_cons(w) && !matches!(w[w.len() - 1], b'l' | b's' | b'z') {
            w.truncate(w.len() - 1);
        } else if measure(w) == 1 && ends_cvc(w) {
            w.push(b'e');
        }
    }
}

fn step1c(w: &mut [u8]) {
    if ends_with(w, b"y") && has_vowel(&w[..w.len() - 1]) {
        let n = w.len();
        w[n - 1] = b'i';
    }
}

fn step2(w: &mut Vec<u8>) {
    const RULES: &[(&[u8], &[u8])] = &[
        (b"ational", b"ate"),
        (b"tional", b"tion"),
        (b"enci", b"ence"),
        (b"anci", b"ance"),
        (b"izer", b"ize"),
        (b"abli", b"able"),
        (b"alli", b"al"),
        (b"entli", b"ent"),
        (b"eli", b"e"),
        (b"ousli", b"ous"),
        (b"ization", b"ize"),
        (b"ation", b"ate"),
        (b"ator", b"ate"),
        (b"alism", b"al"),
        (b"iveness", b"ive"),
        (b"fulness", b"ful"),
        (b"ousness", b"ous"),
        (b"aliti", b"al"),
        (b"iviti", b"ive"),
        (b"biliti", b"ble"),
    ];
    rule_list(w, RULES, 0);
}

fn step3(w: &mut Vec<u8>) {
    const RULES: &[(&[u8], &[u8])] = &[
        (b"icate", b"ic"),
        (b"ative", b""),
        (b"alize", b"al"),
        (b"iciti", b"ic"),
        (b"ical", b"ic"),
        (b"ful", b""),
        (b"ness", b""),
    ];
    rule_list(w, RULES, 0);
}

fn step4(w: &mut Vec<u8>) {
    const SUFFIXES: &[&[u8]] = &[
        b"al", b"ance", b"ence", b"er", b"ic", b"able", b"ible", b"ant", b"ement", b"ment",
        b"ent", b"ion", b"ou", b"ism", b"ate", b"iti", b"ous", b"ive", b"ize",
    ];
    let mut best: Option<&[u8]> = None;
    for &suf in SUFFIXES {
        if ends_with(w, suf) && best.is_none_or(|b| suf.len() > b.len()) {
            best = Some(suf);
        }
    }
    if let Some(suf) = best {
        let stem_len = w.len() - suf.len();
        let stem = &w[..stem_len];
        if measure(stem) > 1
            && (suf != b"ion" || matches!(stem.last(), Some(b's') | Some(b't')))
        {
            w.truncate(stem_len);
        }
    }
}

fn step5a(w: &mut Vec<u8>) {
    if ends_with(w, b"e") {
        let stem = &w[..w.len() - 1];
        let m = measure(stem);
        if m > 1 || (m == 1 && !ends_cvc(stem)) {
            w.truncate(w.len() - 1);
        }
    }
}

fn step5b(w: &mut Vec<u8>) {
    if measure(w) > 1 && ends_double_cons(w) && ends_with(w, b"l") {
        w.truncate(w.len() - 1);
    }
}

#[cfg(test)]
mod tests {
    use super::stem;

    #[test]
    fn paper_worked_examples() {
        let cases = [
            ("caresses", "caress"),
            ("ponies", "poni"),
            ("ties", "ti"),
            ("caress", "caress"),
            ("cats", "cat"),
            ("feed", "feed"),
            ("agreed", "agre"),
            ("plastered", "plaster"),
            ("bled", "bled"),
            ("motoring", "motor"),
            ("sing", "sing"),
            ("conflated", "conflat"),
            ("sized", "size"),
            ("hopping", "hop"),
            ("hissing", "hiss"),
            ("fizzed", "fizz"),
            ("filing", "file"),
            ("happy", "happi"),
            ("sky", "sky"),
            ("dying", "dy"),
            ("relational", "relat"),
            ("conditional", "condit"),
            ("revival", "reviv"),
            ("cease", "ceas"),
            ("controll", "control"),
            ("roll", "roll"),
            ("studies", "studi"),
            ("drugs", "drug"),
        ];
        for (word, want) in cases {
            assert_eq!(stem(word), want, "stem({word})");
        }
    }

    #[test]
    fn non_alphabetic_tokens_pass_through() {
        assert_eq!(stem("50mg"), "50mg");
        assert_eq!(stem("anti-viral"), "anti-viral");
        assert_eq!(stem("Upper"), "Upper");
        assert_eq!(stem(""), "");
    }

    #[test]
    fn short_words_are_still_stemmed() {
        // No length cutoff in the published algorithm.
        assert_eq!(stem("as"), "a");
        assert_eq!(stem("is"), "i");
    }
}
