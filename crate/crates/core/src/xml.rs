//! Text output helpers around `xmlwriter`, and an element-depth guard for
//! input handed to `roxmltree`, whose tokenizer recurses per element.

use xmlwriter::XmlWriter;

/// Element nesting accepted in SLD and GetMap documents.
pub const MAX_XML_DEPTH: usize = 256;

/// Deepest element nesting in `xml`, stopping early once `limit` is passed.
/// Comments, CDATA, processing instructions and quoted attribute values
/// are skipped; malformed input is left for the real parser to report.
pub(crate) fn nesting_exceeds(xml: &str, limit: usize) -> bool {
    let b = xml.as_bytes();
    let find = |from: usize, pat: &[u8]| -> usize {
        b[from.min(b.len())..]
            .windows(pat.len())
            .position(|w| w == pat)
            .map_or(b.len(), |p| from + p + pat.len())
    };
    let mut depth = 0usize;
    let mut i = 0;
    while i < b.len() {
        if b[i] != b'<' {
            i += 1;
            continue;
        }
        let rest = &b[i..];
        if rest.starts_with(b"<!--") {
            i = find(i + 4, b"-->");
        } else if rest.starts_with(b"<![CDATA[") {
            i = find(i + 9, b"]]>");
        } else if rest.starts_with(b"<?") {
            i = find(i + 2, b"?>");
        } else if rest.starts_with(b"<!") {
            i = find(i + 2, b">");
        } else if rest.starts_with(b"</") {
            depth = depth.saturating_sub(1);
            i = find(i + 2, b">");
        } else {
            let mut j = i + 1;
            let mut quote = None;
            while j < b.len() {
                match (quote, b[j]) {
                    (Some(q), c) if c == q => quote = None,
                    (None, c @ (b'"' | b'\'')) => quote = Some(c),
                    (None, b'>') => break,
                    _ => {}
                }
                j += 1;
            }
            if j >= b.len() || b[j - 1] != b'/' {
                depth += 1;
                if depth > limit {
                    return true;
                }
            }
            i = j + 1;
        }
    }
    false
}

fn is_xml_char(c: char) -> bool {
    matches!(c, '\t' | '\n' | '\r' | '\u{20}'..='\u{D7FF}' | '\u{E000}'..='\u{FFFD}' | '\u{10000}'..)
}

/// Escapes `&` and `>` (xmlwriter handles `<`) and replaces characters that
/// XML 1.0 cannot carry with U+FFFD.
pub(crate) fn escape_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '>' => out.push_str("&gt;"),
            c if is_xml_char(c) => out.push(c),
            _ => out.push('\u{FFFD}'),
        }
    }
    out
}

// xmlwriter indents text nodes onto their own line; this keeps
// `<Name>x</Name>` on one line and closes the element.
pub(crate) fn inline_text(w: &mut XmlWriter, text: &str) {
    w.set_preserve_whitespaces(true);
    w.write_text(&escape_text(text));
    w.end_element();
    w.set_preserve_whitespaces(false);
}
