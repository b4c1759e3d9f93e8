//! Normalizes per-language scores by a reference system and correlates them
//! with log Wikipedia size.

use std::collections::BTreeMap;
use std::path::Path;

use lexmatch::eval::{load_language_stats, normalize_scores, size_correlations};

fn main() -> lexmatch::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/experiment/language_stats.tsv");
    let stats = load_language_stats(path)?;
    // One language lacks an analyzer run, so it is normalized by whitespace.
    let overrides = BTreeMap::from([("xsw".to_string(), "whitespace".to_string())]);
    let table = normalize_scores(&stats, &overrides, "analyzer")?;

    for (language, row) in &table {
        let cells: Vec<String> = row.iter().map(|(s, v)| format!("{s}={v:.3}")).collect();
        println!("{language}  {}", cells.join("  "));
    }
    for c in size_correlations(&stats, &table, &["xsw".to_string()]) {
        let r = c.r.map_or("NA".to_string(), |r| format!("{r:+.4}"));
        println!("{:<12} r = {r} over {}", c.system, c.languages.join(","));
    }
    Ok(())
}
