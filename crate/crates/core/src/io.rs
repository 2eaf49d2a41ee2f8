//! TSV ingestion and emission.
//!
//! Formats (UTF-8, `#` starts a comment line, blank lines skipped):
//!
//! * links:    `source<TAB>target<TAB>sign` with sign `1` or `-1`
//! * emotions: `source<TAB>target<TAB>value` with value a 1–6 helpfulness
//!   score or a `P`/`N` polarity label
//! * ratings:  `user<TAB>item<TAB>score` with score 1–5
//!
//! External ids are arbitrary strings, mapped to dense indices in order of
//! first appearance. Persisting the id map and handing it back at ingest
//! makes re-ingestion reproduce the exact same frozen dataset.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emotion::{Expression, Polarity, UserEmotionEvent, build_emotion_matrices};
use crate::graph::{EmotionMatrices, NetworkBuilder, Sign, SignedNetwork, UserId};
use crate::personality::RatingTable;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{file}:{line}: {reason}")]
    Malformed {
        file: String,
        line: usize,
        reason: String,
    },
    #[error("{file}:{line}: unknown sign token `{token}` (must be -1 or 1)")]
    UnknownSign {
        file: String,
        line: usize,
        token: String,
    },
    #[error("{file}: ids not present in the fixed id map: {}", .ids.join(", "))]
    UnknownIds { file: String, ids: Vec<String> },
}

/// Bijective mapping between external string ids and dense indices.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct IdMap {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl IdMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Index for `name`, inserting it at the end if new.
    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len() as u32;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn name(&self, index: u32) -> Option<&str> {
        self.names.get(index as usize).map(|s| s.as_str())
    }

    /// Synthetic map u0, u1, ... for data that never had external ids.
    pub fn numbered(prefix: &str, len: usize) -> Self {
        let mut map = Self::new();
        for i in 0..len {
            map.intern(&format!("{prefix}{i}"));
        }
        map
    }
}

impl From<Vec<String>> for IdMap {
    fn from(names: Vec<String>) -> Self {
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i as u32))
            .collect();
        Self { names, index }
    }
}

impl From<IdMap> for Vec<String> {
    fn from(map: IdMap) -> Vec<String> {
        map.names
    }
}

/// Validation tallies from one ingest pass.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub link_records: u64,
    pub emotion_records: u64,
    pub rating_records: u64,
    pub link_conflicts: u64,
    pub link_duplicates: u64,
    pub neutral_dropped: u64,
    pub rating_duplicates: u64,
    pub num_users: usize,
    pub num_items: usize,
    pub warnings: Vec<String>,
}

/// A frozen, analysis-ready dataset with its id maps and validation report.
#[derive(Debug, Clone)]
pub struct FrozenDataset {
    pub network: SignedNetwork,
    pub emotions: EmotionMatrices,
    pub ratings: Option<RatingTable>,
    pub users: IdMap,
    pub items: IdMap,
    pub report: IngestReport,
}

/// Optional fixed id maps; ids outside a fixed map become errors instead of
/// fresh indices.
#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    pub fixed_users: Option<IdMap>,
    pub fixed_items: Option<IdMap>,
}

struct LineReader<'a, R: BufRead> {
    file: &'a str,
    inner: std::io::Lines<R>,
    line_no: usize,
}

impl<'a, R: BufRead> LineReader<'a, R> {
    fn new(file: &'a str, reader: R) -> Self {
        Self {
            file,
            inner: reader.lines(),
            line_no: 0,
        }
    }

    /// Next data line as three tab-separated fields.
    fn next_fields(&mut self) -> Result<Option<(usize, [String; 3])>, IngestError> {
        loop {
            let Some(line) = self.inner.next() else {
                return Ok(None);
            };
            self.line_no += 1;
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('\t');
            let fields = [parts.next(), parts.next(), parts.next()];
            if fields.iter().any(|f| f.is_none_or(str::is_empty)) || parts.next().is_some() {
                return Err(IngestError::Malformed {
                    file: self.file.to_string(),
                    line: self.line_no,
                    reason: format!("expected 3 tab-separated fields, got `{line}`"),
                });
            }
            let [a, b, c] = fields.map(|f| f.unwrap().to_string());
            return Ok(Some((self.line_no, [a, b, c])));
        }
    }
}

/// Interns against a growable map, or resolves against a fixed one while
/// collecting unknown ids.
struct Resolver {
    map: IdMap,
    fixed: bool,
    unknown: Vec<String>,
}

impl Resolver {
    fn new(fixed: Option<IdMap>) -> Self {
        match fixed {
            Some(map) => Self {
                map,
                fixed: true,
                unknown: Vec::new(),
            },
            None => Self {
                map: IdMap::new(),
                fixed: false,
                unknown: Vec::new(),
            },
        }
    }

    fn resolve(&mut self, name: &str) -> Option<u32> {
        if self.fixed {
            let got = self.map.get(name);
            if got.is_none() && !self.unknown.iter().any(|u| u == name) {
                self.unknown.push(name.to_string());
            }
            got
        } else {
            Some(self.map.intern(name))
        }
    }

    fn check_unknown(&mut self, file: &str) -> Result<(), IngestError> {
        if self.unknown.is_empty() {
            return Ok(());
        }
        self.unknown.truncate(20);
        Err(IngestError::UnknownIds {
            file: file.to_string(),
            ids: std::mem::take(&mut self.unknown),
        })
    }
}

/// Ingest from readers; labels name each source in errors.
pub fn ingest_readers<L, E, T>(
    links: (L, &str),
    emotions: Option<(E, &str)>,
    ratings: Option<(T, &str)>,
    options: IngestOptions,
) -> Result<FrozenDataset, IngestError>
where
    L: BufRead,
    E: BufRead,
    T: BufRead,
{
    let mut users = Resolver::new(options.fixed_users);
    let mut report = IngestReport::default();

    // links
    let (reader, link_label) = links;
    let mut lines = LineReader::new(link_label, reader);
    let mut link_records: Vec<(u32, u32, Sign)> = Vec::new();
    while let Some((line, [src, dst, tok])) = lines.next_fields()? {
        let sign = match tok.as_str() {
            "1" => Sign::Positive,
            "-1" => Sign::Negative,
            _ => {
                return Err(IngestError::UnknownSign {
                    file: link_label.to_string(),
                    line,
                    token: tok,
                });
            }
        };
        if src == dst {
            return Err(IngestError::Malformed {
                file: link_label.to_string(),
                line,
                reason: format!("self-loop on `{src}`"),
            });
        }
        let (s, d) = (users.resolve(&src), users.resolve(&dst));
        if let (Some(s), Some(d)) = (s, d) {
            link_records.push((s, d, sign));
        }
    }
    users.check_unknown(link_label)?;
    report.link_records = link_records.len() as u64;
    if link_records.is_empty() {
        report
            .warnings
            .push(format!("{link_label}: no links ingested"));
    }

    // emotions
    let mut emotion_records: Vec<(u32, u32, Expression)> = Vec::new();
    if let Some((reader, label)) = emotions {
        let mut lines = LineReader::new(label, reader);
        while let Some((line, [src, dst, tok])) = lines.next_fields()? {
            let expression = match tok.as_str() {
                "P" => Expression::Polarity(Polarity::Positive),
                "N" => Expression::Polarity(Polarity::Negative),
                other => match other.parse::<u8>() {
                    Ok(score @ 1..=6) => Expression::Score(score),
                    _ => {
                        return Err(IngestError::Malformed {
                            file: label.to_string(),
                            line,
                            reason: format!("emotion value must be 1..6 or P|N, got `{other}`"),
                        });
                    }
                },
            };
            if src == dst {
                return Err(IngestError::Malformed {
                    file: label.to_string(),
                    line,
                    reason: format!("self-directed emotion on `{src}`"),
                });
            }
            let (s, d) = (users.resolve(&src), users.resolve(&dst));
            if let (Some(s), Some(d)) = (s, d) {
                emotion_records.push((s, d, expression));
            }
        }
        users.check_unknown(label)?;
        report.emotion_records = emotion_records.len() as u64;
    }

    // ratings
    let mut items = Resolver::new(options.fixed_items);
    let mut rating_records: Vec<(u32, u32, u8)> = Vec::new();
    let mut have_ratings = false;
    if let Some((reader, label)) = ratings {
        have_ratings = true;
        let mut lines = LineReader::new(label, reader);
        while let Some((line, [user, item, tok])) = lines.next_fields()? {
            let score = match tok.parse::<u8>() {
                Ok(score @ 1..=5) => score,
                _ => {
                    return Err(IngestError::Malformed {
                        file: label.to_string(),
                        line,
                        reason: format!("rating score must be 1..5, got `{tok}`"),
                    });
                }
            };
            let (u, k) = (users.resolve(&user), items.resolve(&item));
            if let (Some(u), Some(k)) = (u, k) {
                rating_records.push((u, k, score));
            }
        }
        users.check_unknown(label)?;
        items.check_unknown(label)?;
        report.rating_records = rating_records.len() as u64;
    }

    // build frozen structures against the final user universe
    let num_users = users.map.len();
    let mut builder = NetworkBuilder::new(num_users);
    for (s, d, sign) in link_records {
        builder
            .add_link(UserId(s), UserId(d), sign)
            .expect("records validated at parse time");
    }
    report.link_conflicts = builder.conflicts();
    report.link_duplicates = builder.duplicates();
    let network = builder.freeze();

    let events: Vec<UserEmotionEvent> = emotion_records
        .into_iter()
        .map(|(s, d, expression)| UserEmotionEvent {
            rater: UserId(s),
            ratee: UserId(d),
            expression,
        })
        .collect();
    let (emotions, emotion_summary) =
        build_emotion_matrices(&events, num_users).expect("events validated at parse time");
    report.neutral_dropped = emotion_summary.neutral_dropped;

    let ratings = if have_ratings {
        let table = RatingTable::from_entries(num_users, items.map.len(), rating_records)
            .expect("entries validated at parse time");
        report.rating_duplicates = table.duplicates();
        Some(table)
    } else {
        None
    };

    report.num_users = num_users;
    report.num_items = items.map.len();
    Ok(FrozenDataset {
        network,
        emotions,
        ratings,
        users: users.map,
        items: items.map,
        report,
    })
}

/// Ingest from files on disk.
pub fn ingest_paths(
    links: &Path,
    emotions: Option<&Path>,
    ratings: Option<&Path>,
    options: IngestOptions,
) -> Result<FrozenDataset, IngestError> {
    let open = |p: &Path| -> Result<BufReader<File>, IngestError> {
        Ok(BufReader::new(File::open(p)?))
    };
    let links_label = links.display().to_string();
    let emotions_label = emotions.map(|p| p.display().to_string());
    let ratings_label = ratings.map(|p| p.display().to_string());

    let mut emotions_pair = None;
    if let (Some(p), Some(label)) = (emotions, emotions_label.as_deref()) {
        emotions_pair = Some((open(p)?, label));
    }
    let mut ratings_pair = None;
    if let (Some(p), Some(label)) = (ratings, ratings_label.as_deref()) {
        ratings_pair = Some((open(p)?, label));
    }
    ingest_readers(
        (open(links)?, links_label.as_str()),
        emotions_pair,
        ratings_pair,
        options,
    )
}

/// Convenience `None` for an absent optional input to [`ingest_readers`].
pub fn no_input() -> Option<(std::io::Empty, &'static str)> {
    None
}

/// Write links in canonical order using external ids.
pub fn write_links<W: Write>(
    net: &SignedNetwork,
    users: &IdMap,
    mut w: W,
) -> std::io::Result<()> {
    for (i, j, sign) in net.iter_links() {
        writeln!(
            w,
            "{}\t{}\t{}",
            users.name(i.0).unwrap_or("?"),
            users.name(j.0).unwrap_or("?"),
            sign
        )?;
    }
    Ok(())
}

/// Write emotions as polarity events, one line per counted emotion.
pub fn write_emotions<W: Write>(
    emotions: &EmotionMatrices,
    users: &IdMap,
    mut w: W,
) -> std::io::Result<()> {
    for (side, tag) in [(emotions.positive(), "P"), (emotions.negative(), "N")] {
        for (i, j, count) in side.iter() {
            for _ in 0..count {
                writeln!(
                    w,
                    "{}\t{}\t{}",
                    users.name(i.0).unwrap_or("?"),
                    users.name(j.0).unwrap_or("?"),
                    tag
                )?;
            }
        }
    }
    Ok(())
}

pub fn write_ratings<W: Write>(
    table: &RatingTable,
    users: &IdMap,
    items: &IdMap,
    mut w: W,
) -> std::io::Result<()> {
    for (u, k, score) in table.iter() {
        writeln!(
            w,
            "{}\t{}\t{}",
            users.name(u.0).unwrap_or("?"),
            items.name(k).unwrap_or("?"),
            score
        )?;
    }
    Ok(())
}
