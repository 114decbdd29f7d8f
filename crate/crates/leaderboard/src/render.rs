//! Static leaderboard rendering: one delimited table per category plus
//! overall, each with score-vs-cost frontier marks.

use std::collections::{BTreeMap, BTreeSet};

use metric_kernel::{pareto_frontier_indices, ScoreCost};

use crate::entry::classify_submission;
use crate::store::{Store, StoreError, StoredEntry};

pub const TABLE_HEADER: &str = "agent\tscore\tcost_per_task\tfrontier\topenness\ttooling\tmodels";

#[derive(Debug, Clone, PartialEq)]
pub struct RenderBundle {
    /// Keyed by table name: every category that any entry covers, plus
    /// "overall".
    pub tables: BTreeMap<String, String>,
    pub html: String,
}

impl RenderBundle {
    /// Write `leaderboard.html` and one `table-<name>.tsv` per table.
    pub fn write_to(&self, dir: &std::path::Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("leaderboard.html"), self.html.as_bytes())?;
        for (name, table) in &self.tables {
            std::fs::write(dir.join(format!("table-{name}.tsv")), table.as_bytes())?;
        }
        Ok(())
    }
}

struct Row<'a> {
    entry: &'a StoredEntry,
    score: f64,
    cost: f64,
    frontier: bool,
}

/// Build one table's rows: entries that carry a score for `column`, with
/// frontier membership computed on the (score, mean-cost-per-task) pair.
fn table_rows<'a>(entries: &'a [StoredEntry], column: &str) -> Vec<Row<'a>> {
    let mut rows: Vec<Row<'a>> = entries
        .iter()
        .filter_map(|entry| {
            let score = match column {
                "overall" => entry.report.overall?,
                category => *entry.report.categories.get(category)?,
            };
            Some(Row { entry, score, cost: entry.report.mean_cost_per_task.as_f64(), frontier: false })
        })
        .collect();
    let points: Vec<ScoreCost> =
        rows.iter().map(|r| ScoreCost { score: r.score, cost: r.cost }).collect();
    for i in pareto_frontier_indices(&points) {
        rows[i].frontier = true;
    }
    rows.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap()
            .then_with(|| a.entry.meta.agent.cmp(&b.entry.meta.agent))
    });
    rows
}

fn format_table(rows: &[Row<'_>]) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for row in rows {
        // Tags were validated on submit; fall back to raw text defensively.
        let (openness, tooling) = match classify_submission(&row.entry.meta) {
            Ok((o, t)) => (o.label().to_string(), t.label().to_string()),
            Err(_) => (
                row.entry.meta.openness.clone().unwrap_or_default(),
                row.entry.meta.tooling.clone().unwrap_or_default(),
            ),
        };
        out.push_str(&format!(
            "{}\t{:.4}\t{:.6}\t{}\t{}\t{}\t{}\n",
            row.entry.meta.agent,
            row.score,
            row.cost,
            if row.frontier { "*" } else { "" },
            openness,
            tooling,
            row.entry.meta.models.join(","),
        ));
    }
    out
}

fn html_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn html_table(name: &str, table: &str) -> String {
    let mut out = format!("<h2>{}</h2>\n<table>\n", html_escape(name));
    for (i, line) in table.lines().enumerate() {
        let tag = if i == 0 { "th" } else { "td" };
        out.push_str("<tr>");
        for cell in line.split('\t') {
            out.push_str(&format!("<{tag}>{}</{tag}>", html_escape(cell)));
        }
        out.push_str("</tr>\n");
    }
    out.push_str("</table>\n");
    out
}

/// Render the whole store. Pure in the store contents: same entries, same
/// bytes. An empty store yields header-only tables.
pub fn render(store: &Store) -> Result<RenderBundle, StoreError> {
    let entries = store.entries()?;

    let mut names: BTreeSet<String> = entries
        .iter()
        .flat_map(|e| e.report.categories.keys().cloned())
        .collect();
    names.insert("overall".to_string());

    let mut tables = BTreeMap::new();
    for name in &names {
        let rows = table_rows(&entries, name);
        tables.insert(name.clone(), format_table(&rows));
    }

    let mut html = String::from("<!doctype html>\n<html><head><meta charset=\"utf-8\">");
    html.push_str("<title>score vs cost leaderboard</title></head>\n<body>\n");
    html.push_str("<p>frontier column marks submissions on the Pareto frontier \
of (score, mean cost per task): no other submission scores at least as high \
at lower or equal cost.</p>\n");
    for (name, table) in &tables {
        html.push_str(&html_table(name, table));
    }
    html.push_str("</body></html>\n");

    Ok(RenderBundle { tables, html })
}
