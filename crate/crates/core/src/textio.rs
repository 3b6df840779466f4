//! `# key = value` header blocks in front of CSV bodies.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::{Error, Result};

pub(crate) struct HeaderBlock {
    pub(crate) fields: BTreeMap<String, String>,
    format: &'static str,
}

impl HeaderBlock {
    /// Splits leading `#` lines off `text`; returns the header and the remaining CSV body.
    pub(crate) fn split<'a>(text: &'a str, format: &'static str) -> Result<(Self, &'a str)> {
        let mut fields = BTreeMap::new();
        let mut rest = text;
        loop {
            let trimmed = rest.trim_start_matches(['\n', '\r']);
            if trimmed.is_empty() {
                rest = trimmed;
                break;
            }
            let line_end = trimmed.find('\n').unwrap_or(trimmed.len());
            let line = trimmed[..line_end].trim();
            if !line.starts_with('#') {
                rest = trimmed;
                break;
            }
            let body = line.trim_start_matches('#').trim();
            if !body.is_empty() {
                let (k, v) = body
                    .split_once('=')
                    .ok_or_else(|| Error::format(format, format!("header line without '=': {line}")))?;
                fields.insert(k.trim().to_string(), v.trim().to_string());
            }
            rest = &trimmed[line_end..];
        }
        Ok((Self { fields, format }, rest))
    }

    pub(crate) fn get<T: FromStr>(&self, key: &str) -> Result<T> {
        let raw = self
            .fields
            .get(key)
            .ok_or_else(|| Error::format(self.format, format!("missing header field `{key}`")))?;
        raw.parse()
            .map_err(|_| Error::format(self.format, format!("cannot parse `{key}` = {raw}")))
    }

    pub(crate) fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        if self.fields.contains_key(key) {
            self.get(key)
        } else {
            Ok(default)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_header_and_body() {
        let text = "# a = 1\n#b=two\n\nid,x\n1,2\n";
        let (h, body) = HeaderBlock::split(text, "test").unwrap();
        assert_eq!(h.get::<u32>("a").unwrap(), 1);
        assert_eq!(h.get::<String>("b").unwrap(), "two");
        assert_eq!(body, "id,x\n1,2\n");
        assert!(h.get::<u32>("c").is_err());
        assert_eq!(h.get_or("c", 7u32).unwrap(), 7);
    }
}
