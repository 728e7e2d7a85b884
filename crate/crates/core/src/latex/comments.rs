/// Removes `%` comments through end of line, keeping escaped `\%`.
///
/// Newlines are kept, so the line count does not change. A `%` preceded by an
/// odd number of backslashes is escaped; `\\%` starts a comment.
pub fn strip_comments(tex: &str) -> String {
    let mut out = String::with_capacity(tex.len());
    for line in tex.split_inclusive('\n') {
        let (body, newline) = match line.strip_suffix('\n') {
            Some(b) => (b, "\n"),
            None => (line, ""),
        };
        out.push_str(&body[..comment_start(body)]);
        out.push_str(newline);
    }
    out
}

fn comment_start(line: &str) -> usize {
    let mut backslashes = 0usize;
    for (i, b) in line.bytes().enumerate() {
        if b == b'\\' {
            backslashes += 1;
            continue;
        }
        if b == b'%' && backslashes.is_multiple_of(2) {
            return i;
        }
        backslashes = 0;
    }
    line.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn removes_to_end_of_line() {
        assert_eq!(strip_comments("a % b\nc"), "a \nc");
    }

    #[test]
    fn keeps_escaped_percent() {
        assert_eq!(strip_comments("100\\% done"), "100\\% done");
        assert_eq!(strip_comments("a\\\\% gone\nb"), "a\\\\\nb");
    }

    #[test]
    fn preserves_line_count() {
        let src = "% full\n%\nx % y\n\n";
        let out = strip_comments(src);
        assert_eq!(out.lines().count(), src.lines().count());
        assert_eq!(out, "\n\nx \n\n");
    }
}
