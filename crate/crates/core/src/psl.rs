//! Public suffix list parsing and effective second-level domain
//! extraction.
//!
//! The rule file uses the standard `effective_tld_names.dat` layout:
//! one rule per line, `//` comments, `!` marks exception rules, and a
//! leading `*` label is a wildcard. Labels are matched as opaque byte
//! strings; punycode and raw-Unicode labels are never decoded.

use std::collections::HashSet;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PslError {
    #[error("line {line}: malformed rule {rule:?}: {reason}")]
    MalformedRule {
        line: usize,
        rule: String,
        reason: String,
    },
    #[error("no host component in {0:?}")]
    NoHost(String),
    #[error("{0:?} is a public suffix; no registrable domain")]
    NoRegistrableDomain(String),
    #[error("invalid hostname {0:?}: {1}")]
    InvalidHostname(String, String),
    #[error("core label {0:?} contains characters outside a-z, 0-9, and hyphen")]
    InvalidCore(String),
}

/// Options controlling which sections of the rule file are loaded.
#[derive(Debug, Clone, Copy)]
pub struct PslOptions {
    /// Load rules from the `PRIVATE DOMAINS` section (default true).
    pub include_private: bool,
}

impl Default for PslOptions {
    fn default() -> Self {
        PslOptions {
            include_private: true,
        }
    }
}

/// A parsed public suffix list.
///
/// Rules are stored as lowercase dotted strings without the `!` / `*.`
/// markers; a wildcard rule `*.ck` is stored as `ck` in
/// `wildcard_rules`. Immutable after parse; lookups are pure.
#[derive(Debug, Clone, Default)]
pub struct SuffixRuleSet {
    exact_rules: HashSet<String>,
    wildcard_rules: HashSet<String>,
    exception_rules: HashSet<String>,
    source_version: String,
}

impl SuffixRuleSet {
    pub fn parse(text: &str) -> Result<Self, PslError> {
        Self::parse_with(text, PslOptions::default())
    }

    pub fn parse_with(text: &str, opts: PslOptions) -> Result<Self, PslError> {
        let mut rules = SuffixRuleSet::default();
        let mut in_private = false;
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with("//") {
                if line.contains("BEGIN PRIVATE DOMAINS") {
                    in_private = true;
                } else if line.contains("END PRIVATE DOMAINS") {
                    in_private = false;
                }
                continue;
            }
            if in_private && !opts.include_private {
                continue;
            }
            rules.add_rule(line, line_no)?;
        }
        Ok(rules)
    }

    fn add_rule(&mut self, line: &str, line_no: usize) -> Result<(), PslError> {
        let malformed = |reason: &str| PslError::MalformedRule {
            line: line_no,
            rule: line.to_string(),
            reason: reason.to_string(),
        };
        if line.chars().any(char::is_whitespace) {
            return Err(malformed("embedded whitespace"));
        }
        let (is_exception, body) = match line.strip_prefix('!') {
            Some(rest) => (true, rest),
            None => (false, line),
        };
        let body = body.to_lowercase();
        if body.is_empty() || body.starts_with('.') || body.ends_with('.') {
            return Err(malformed("empty label"));
        }
        if body.split('.').any(str::is_empty) {
            return Err(malformed("empty label"));
        }
        if is_exception {
            if body.contains('*') {
                return Err(malformed("wildcard in exception rule"));
            }
            if self.exact_rules.contains(&body) {
                return Err(malformed("exception duplicates an exact rule"));
            }
            self.exception_rules.insert(body);
        } else if let Some(rest) = body.strip_prefix("*.") {
            if rest.contains('*') {
                return Err(malformed("wildcard label not leading"));
            }
            self.wildcard_rules.insert(rest.to_string());
        } else if body.contains('*') {
            return Err(malformed("wildcard label not leading"));
        } else {
            if self.exception_rules.contains(&body) {
                return Err(malformed("exact rule duplicates an exception"));
            }
            self.exact_rules.insert(body);
        }
        Ok(())
    }

    pub fn set_source_version(&mut self, version: impl Into<String>) {
        self.source_version = version.into();
    }

    pub fn source_version(&self) -> &str {
        &self.source_version
    }

    pub fn rule_count(&self) -> usize {
        self.exact_rules.len() + self.wildcard_rules.len() + self.exception_rules.len()
    }

    /// Number of labels in the public suffix of `host`, per the
    /// standard algorithm: exceptions beat wildcards, longest match
    /// wins, and an unmatched name falls back to the implicit `*` rule
    /// (its last label is the suffix). Returns `None` for invalid
    /// hostnames (empty, or containing an empty label).
    fn suffix_label_count(&self, host: &str) -> Option<usize> {
        if host.is_empty() {
            return None;
        }
        let labels: Vec<&str> = host.split('.').collect();
        if labels.iter().any(|l| l.is_empty()) {
            return None;
        }
        let n = labels.len();
        // Exceptions override everything: the suffix is the exception
        // rule with its leftmost label removed.
        for start in 0..n {
            let candidate = labels[start..].join(".");
            if self.exception_rules.contains(&candidate) {
                return Some(n - start - 1);
            }
        }
        let mut best = 1; // implicit "*" rule
        for start in 0..n {
            let len = n - start;
            let candidate = labels[start..].join(".");
            if self.exact_rules.contains(&candidate) && len > best {
                best = len;
            }
            // "*.rest" matches when the labels after this one equal
            // `rest`; the wildcard itself consumes labels[start].
            if start + 1 <= n {
                let rest = labels[start + 1..].join(".");
                if self.wildcard_rules.contains(&rest) && len > best {
                    best = len;
                }
            }
        }
        Some(best)
    }

    /// The public suffix of `host`, if `host` is a valid lowercase
    /// dotted name.
    pub fn public_suffix<'a>(&self, host: &'a str) -> Option<&'a str> {
        let suffix_labels = self.suffix_label_count(host)?;
        Some(last_labels(host, suffix_labels))
    }

    /// The registrable domain (public suffix plus one label), or `None`
    /// when the host is invalid or is itself a public suffix.
    pub fn registrable_domain<'a>(&self, host: &'a str) -> Option<&'a str> {
        let suffix_labels = self.suffix_label_count(host)?;
        let total = host.split('.').count();
        if total <= suffix_labels {
            return None;
        }
        Some(last_labels(host, suffix_labels + 1))
    }
}

fn last_labels(host: &str, count: usize) -> &str {
    let mut boundary = host.len();
    let mut seen = 0;
    for (i, b) in host.bytes().enumerate().rev() {
        if b == b'.' {
            seen += 1;
            if seen == count {
                boundary = i + 1;
                return &host[boundary..];
            }
        }
    }
    let _ = boundary;
    host
}

/// An effective second-level domain name: the public suffix plus the
/// single label to its left.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct DomainName {
    core: String,
    tld: String,
}

impl DomainName {
    /// The label immediately left of the TLD; lowercase a-z, 0-9, and
    /// hyphens only.
    pub fn core(&self) -> &str {
        &self.core
    }

    /// The matched public suffix (one or more dot-joined labels).
    pub fn tld(&self) -> &str {
        &self.tld
    }

    pub fn e2ld(&self) -> String {
        format!("{}.{}", self.core, self.tld)
    }
}

impl std::fmt::Display for DomainName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}.{}", self.core, self.tld)
    }
}

/// Extract the host component of a URL or bare hostname: strips the
/// scheme, userinfo, port, path, query, and fragment, lowercases, and
/// drops a single trailing dot. Idempotent on bare hostnames.
pub fn extract_hostname(url_or_host: &str) -> Result<String, PslError> {
    let input = url_or_host.trim();
    if input.is_empty() {
        return Err(PslError::NoHost(url_or_host.to_string()));
    }
    let after_scheme = match input.find("://") {
        Some(pos) => &input[pos + 3..],
        None => input,
    };
    let authority_end = after_scheme
        .find(|c| c == '/' || c == '?' || c == '#')
        .unwrap_or(after_scheme.len());
    let authority = &after_scheme[..authority_end];
    let host_port = match authority.rfind('@') {
        Some(pos) => &authority[pos + 1..],
        None => authority,
    };
    let host = if host_port.starts_with('[') {
        // bracketed IPv6 literal; keep the inside so the caller gets a
        // clear downstream error rather than a mangled name
        match host_port.find(']') {
            Some(end) => &host_port[1..end],
            None => host_port,
        }
    } else {
        match host_port.rfind(':') {
            Some(pos) if host_port[pos + 1..].bytes().all(|b| b.is_ascii_digit()) => {
                &host_port[..pos]
            }
            _ => host_port,
        }
    };
    let host = host.strip_suffix('.').unwrap_or(host);
    if host.is_empty() {
        return Err(PslError::NoHost(url_or_host.to_string()));
    }
    Ok(host.to_lowercase())
}

/// Reduce a lowercase hostname to its effective second-level domain.
///
/// The TLD is the longest matching public suffix; the core is the label
/// immediately to its left and must consist of a-z, 0-9, and hyphens.
pub fn effective_2ld(hostname: &str, rules: &SuffixRuleSet) -> Result<DomainName, PslError> {
    let host = hostname.to_lowercase();
    let registrable = rules.registrable_domain(&host).ok_or_else(|| {
        if host.is_empty() || host.split('.').any(str::is_empty) {
            PslError::InvalidHostname(hostname.to_string(), "empty label".to_string())
        } else {
            PslError::NoRegistrableDomain(hostname.to_string())
        }
    })?;
    let (core, tld) = registrable
        .split_once('.')
        .ok_or_else(|| PslError::NoRegistrableDomain(hostname.to_string()))?;
    if core.is_empty() {
        return Err(PslError::InvalidHostname(
            hostname.to_string(),
            "empty core".to_string(),
        ));
    }
    if !core
        .bytes()
        .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-')
    {
        return Err(PslError::InvalidCore(core.to_string()));
    }
    Ok(DomainName {
        core: core.to_string(),
        tld: tld.to_string(),
    })
}
