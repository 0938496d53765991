//! Run manifest: resolved settings plus a content hash of every output.

use sha2::{Digest, Sha256};

use crate::config::Resolved;
use crate::run::SeedOutcome;

pub const MANIFEST_HEADER: &str = "section,key,value";

/// Git-style object hash of a blob: SHA-256 over `blob <len>\0<bytes>`.
pub fn blob_hash(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("blob {}\0", bytes.len()).as_bytes());
    hasher.update(bytes);
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Renders the manifest. Seeds appear in the order they were requested.
pub fn write_manifest(resolved: &Resolved, outcomes: &[SeedOutcome]) -> Vec<u8> {
    let mut lines = vec![MANIFEST_HEADER.to_string(), format!("config,preset,{}", resolved.preset)];
    for (key, value) in resolved.experiment.settings() {
        lines.push(format!("config,{key},{value}"));
    }
    let times: Vec<String> = resolved.snapshot_times.iter().map(u64::to_string).collect();
    lines.push(format!("config,snapshot_times,{}", times.join(" ")));
    lines.push(format!("config,warmup,{}", resolved.warmup));
    lines.push(format!("config,min_size,{}", resolved.binning.min_size));
    lines.push(format!("config,bins_per_decade,{}", resolved.binning.bins_per_decade));
    lines.push(format!("config,metric,{}", resolved.metric.as_str()));
    for outcome in outcomes {
        lines.push(format!("seed,{},", outcome.seed));
        for (path, hash) in &outcome.files {
            lines.push(format!("file,{path},{hash}"));
        }
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_git_blob_format() {
        // printf 'hello\n' | git hash-object --object-format=sha256 --stdin
        assert_eq!(
            blob_hash(b"hello\n"),
            "2cf8d83d9ee29543b34a87727421fdecb7e3f3a183d337639025de576db9ebb4"
        );
    }
}
