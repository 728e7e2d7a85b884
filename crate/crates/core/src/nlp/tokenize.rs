/// Token emitted for every sentence period.
pub const PERIOD: &str = ".";

/// Splits text into lowercase word tokens.
///
/// Runs of alphanumeric characters form words. Every `.` becomes a
/// standalone `"."` token; all other punctuation and whitespace only
/// separate words. Apostrophes are separators too, so `"SN1006's"` yields
/// `["sn1006", "s"]`.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            current.extend(ch.to_lowercase());
            continue;
        }
        if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
        if ch == '.' {
            tokens.push(PERIOD.to_string());
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_periods_drops_other_punctuation() {
        assert_eq!(
            tokenize("Stars explode. Gas cools,"),
            vec!["stars", "explode", ".", "gas", "cools"]
        );
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  ,;: ").is_empty());
    }

    #[test]
    fn apostrophe_splits() {
        assert_eq!(tokenize("SN1006's remnant"), vec!["sn1006", "s", "remnant"]);
    }

    #[test]
    fn hyphens_and_decimals() {
        assert_eq!(tokenize("X-ray 3.5"), vec!["x", "ray", "3", ".", "5"]);
    }
}
