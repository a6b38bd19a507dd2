//! Adoption event logs: parsing, per-meme grouping, early windows,
//! interaction tallies, and the new-meme filter.
//!
//! An event log is UTF-8 text with one event per line:
//! `meme_id<TAB>timestamp<TAB>user<TAB>kind<TAB>[target]` where kind is `T`
//! (plain tweet), `RT` (retweet), or `AT` (mention). The target field is
//! mandatory for `RT`/`AT` and forbidden for `T`. Blank lines and lines
//! starting with `#` are skipped.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use crate::community::{CommunityAssignment, CommunityId};
use crate::error::{Error, Result};
use crate::graph::Network;

/// Seconds per day, used by the horizon-based reference models.
pub const SECONDS_PER_DAY: i64 = 86_400;

/// What a single adoption event did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Plain,
    Retweet,
    Mention,
}

impl EventKind {
    /// The event-file token for this kind.
    pub fn token(self) -> &'static str {
        match self {
            EventKind::Plain => "T",
            EventKind::Retweet => "RT",
            EventKind::Mention => "AT",
        }
    }
}

/// One tweet of a meme. The meme id lives on the owning [`Meme`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdoptionEvent {
    /// Seconds since the epoch.
    pub timestamp: i64,
    /// Node label of the tweeting user.
    pub user: String,
    pub kind: EventKind,
    /// Retweeted/mentioned user; present iff kind is Retweet/Mention.
    pub target: Option<String>,
}

/// A meme's full recorded history: its tweets in time order and its
/// distinct adopters in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Meme {
    pub id: String,
    /// Non-decreasing by timestamp; input order breaks ties.
    pub events: Vec<AdoptionEvent>,
    /// Distinct users, ordered by their first tweet.
    pub adopters: Vec<String>,
}

impl Meme {
    /// Total tweet count |T|.
    pub fn popularity(&self) -> usize {
        self.events.len()
    }

    /// Distinct adopter count |A|.
    pub fn adopter_count(&self) -> usize {
        self.adopters.len()
    }

    /// Timestamp of the first tweet.
    pub fn first_timestamp(&self) -> i64 {
        self.events[0].timestamp
    }

    /// Tweets within `horizon` seconds of the first tweet (half-open:
    /// an event counts iff its offset from the first tweet is < horizon).
    pub fn tweet_count_within(&self, horizon: i64) -> usize {
        let t1 = self.first_timestamp();
        self.events
            .iter()
            .take_while(|e| e.timestamp - t1 < horizon)
            .count()
    }

    /// Distinct adopters among the tweets within `horizon` seconds.
    pub fn adopter_count_within(&self, horizon: i64) -> usize {
        let t1 = self.first_timestamp();
        let mut seen = HashSet::new();
        for e in self.events.iter().take_while(|e| e.timestamp - t1 < horizon) {
            seen.insert(e.user.as_str());
        }
        seen.len()
    }

    /// Tweets per day for days 1..=days, day d covering offsets
    /// [(d−1)·86400, d·86400) from the first tweet.
    pub fn daily_tweet_counts(&self, days: usize) -> Vec<usize> {
        let t1 = self.first_timestamp();
        let mut counts = vec![0usize; days];
        for e in &self.events {
            let offset = e.timestamp - t1;
            let day = (offset / SECONDS_PER_DAY) as usize;
            if offset < days as i64 * SECONDS_PER_DAY {
                counts[day] += 1;
            } else {
                break;
            }
        }
        counts
    }

    /// Newly appearing adopters per day for days 1..=days.
    pub fn daily_new_adopter_counts(&self, days: usize) -> Vec<usize> {
        let t1 = self.first_timestamp();
        let mut counts = vec![0usize; days];
        let mut seen = HashSet::new();
        for e in &self.events {
            let offset = e.timestamp - t1;
            if offset >= days as i64 * SECONDS_PER_DAY {
                break;
            }
            if seen.insert(e.user.as_str()) {
                counts[(offset / SECONDS_PER_DAY) as usize] += 1;
            }
        }
        counts
    }
}

/// The first n tweets of a meme — everything a predictor may look at.
#[derive(Debug, Clone)]
pub struct EarlyWindow<'a> {
    pub meme_id: &'a str,
    /// Exactly the first n events.
    pub events: &'a [AdoptionEvent],
    /// Distinct users within the window, ordered by first tweet.
    pub adopters: Vec<&'a str>,
}

impl<'a> EarlyWindow<'a> {
    /// Window length n.
    pub fn n(&self) -> usize {
        self.events.len()
    }

    /// Communities with at least one tweet in the window (sorted, distinct).
    /// A tweet by a user in several communities touches all of them; tweets
    /// by unassigned users touch none.
    pub fn infected_communities(
        &self,
        net: &Network,
        ca: &CommunityAssignment,
    ) -> Vec<CommunityId> {
        let mut touched: Vec<CommunityId> = self
            .events
            .iter()
            .filter_map(|e| net.resolve(&e.user))
            .flat_map(|node| ca.communities_of(node).iter().copied())
            .collect();
        touched.sort_unstable();
        touched.dedup();
        touched
    }
}

/// Takes the first n events of a meme; fails when the meme is too short
/// (such memes are excluded from an experiment at that n).
pub fn early_window(m: &Meme, n: usize) -> Result<EarlyWindow<'_>> {
    if n < 1 {
        return Err(Error::InvalidParameter("window length must be >= 1".into()));
    }
    if m.events.len() < n {
        return Err(Error::InsufficientEvents {
            meme_id: m.id.clone(),
            have: m.events.len(),
            need: n,
        });
    }
    let events = &m.events[..n];
    let mut adopters = Vec::new();
    let mut seen = HashSet::new();
    for e in events {
        if seen.insert(e.user.as_str()) {
            adopters.push(e.user.as_str());
        }
    }
    Ok(EarlyWindow {
        meme_id: &m.id,
        events,
        adopters,
    })
}

/// Parses an event log into one [`Meme`] per distinct meme id, in order of
/// first appearance. Events are stably sorted by timestamp within each meme,
/// so equal timestamps keep their input order.
pub fn parse_events(reader: impl BufRead) -> Result<Vec<Meme>> {
    let mut memes: Vec<Meme> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line_number = lineno + 1;
        let trimmed = line.trim_end_matches(['\n', '\r']);
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        let parse_err = |message: String| Error::Parse {
            line: line_number,
            message,
        };
        if fields.len() < 4 || fields.len() > 5 {
            return Err(parse_err(format!(
                "expected 4 or 5 tab-separated fields, got {}",
                fields.len()
            )));
        }
        let meme_id = fields[0];
        let timestamp: i64 = fields[1]
            .parse()
            .map_err(|_| parse_err(format!("bad timestamp {:?}", fields[1])))?;
        let user = fields[2];
        if meme_id.is_empty() || user.is_empty() {
            return Err(parse_err("empty meme id or user".into()));
        }
        let kind = match fields[3] {
            "T" => EventKind::Plain,
            "RT" => EventKind::Retweet,
            "AT" => EventKind::Mention,
            other => return Err(parse_err(format!("unknown event kind {other:?}"))),
        };
        let target = fields.get(4).copied().filter(|t| !t.is_empty());
        let target = match (kind, target) {
            (EventKind::Plain, None) => None,
            (EventKind::Plain, Some(t)) => {
                return Err(parse_err(format!("plain tweet must not carry target {t:?}")))
            }
            (_, None) => {
                return Err(parse_err(format!(
                    "{} event requires a target",
                    fields[3]
                )))
            }
            (_, Some(t)) if t == user => {
                return Err(parse_err(format!(
                    "{} target must differ from user {user:?}",
                    fields[3]
                )))
            }
            (_, Some(t)) => Some(t.to_string()),
        };
        let event = AdoptionEvent {
            timestamp,
            user: user.to_string(),
            kind,
            target,
        };
        match index.get(meme_id) {
            Some(&i) => memes[i].events.push(event),
            None => {
                index.insert(meme_id.to_string(), memes.len());
                memes.push(Meme {
                    id: meme_id.to_string(),
                    events: vec![event],
                    adopters: Vec::new(),
                });
            }
        }
    }
    for m in &mut memes {
        m.events.sort_by_key(|e| e.timestamp);
        let mut seen = HashSet::new();
        for e in &m.events {
            if seen.insert(e.user.clone()) {
                m.adopters.push(e.user.clone());
            }
        }
    }
    Ok(memes)
}

/// Serializes memes back to the event-file format, one meme at a time in
/// the given order. Re-parsing the output reproduces the same memes.
pub fn write_events(memes: &[Meme], mut w: impl Write) -> Result<()> {
    for m in memes {
        for e in &m.events {
            match &e.target {
                Some(t) => writeln!(
                    w,
                    "{}\t{}\t{}\t{}\t{}",
                    m.id,
                    e.timestamp,
                    e.user,
                    e.kind.token(),
                    t
                )?,
                None => writeln!(
                    w,
                    "{}\t{}\t{}\t{}",
                    m.id,
                    e.timestamp,
                    e.user,
                    e.kind.token()
                )?,
            }
        }
    }
    Ok(())
}

/// Keeps memes that are genuinely new: fewer than `x_max` tweets in the
/// prior observation period (absent from `history` means zero) and, when an
/// inclusion window is given, first tweet inside `[start, end)`.
pub fn filter_new_memes(
    memes: Vec<Meme>,
    history: &HashMap<String, u64>,
    x_max: u64,
    include_range: Option<(i64, i64)>,
) -> Vec<Meme> {
    memes
        .into_iter()
        .filter(|m| {
            let prior = history.get(&m.id).copied().unwrap_or(0);
            if prior >= x_max {
                return false;
            }
            match include_range {
                Some((start, end)) => {
                    let t1 = m.first_timestamp();
                    start <= t1 && t1 < end
                }
                None => true,
            }
        })
        .collect()
}

/// Splits one interaction kind within the window into (intra, inter)
/// counts. An interaction is intra iff its two endpoints share at least one
/// community; a pair with either endpoint unassigned (or unresolvable)
/// counts as inter. intra + inter equals the number of events of that kind
/// carrying a target.
pub fn interaction_split(
    w: &EarlyWindow<'_>,
    net: &Network,
    ca: &CommunityAssignment,
    kind: EventKind,
) -> (usize, usize) {
    let mut intra = 0;
    let mut inter = 0;
    for e in w.events.iter().filter(|e| e.kind == kind) {
        let Some(target) = &e.target else { continue };
        let shared = match (net.resolve(&e.user), net.resolve(target)) {
            (Some(a), Some(b)) => ca.shares_community(a, b),
            _ => false,
        };
        if shared {
            intra += 1;
        } else {
            inter += 1;
        }
    }
    (intra, inter)
}
