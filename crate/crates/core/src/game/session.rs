use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::levels::{Level, LevelSet, DEFINITION_NAME};
use crate::diff::{signature_diff, DiffReport};
use crate::infer::{generalize, infer, parse_definition, subsumes, InferError};
use crate::syntax::Scheme;

pub const SKIP_BUDGET: u8 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Group {
    One,
    Two,
}

impl TryFrom<u8> for Group {
    type Error = String;

    fn try_from(n: u8) -> Result<Self, Self::Error> {
        match n {
            1 => Ok(Group::One),
            2 => Ok(Group::Two),
            _ => Err(format!("group must be 1 or 2, got {n}")),
        }
    }
}

impl From<Group> for u8 {
    fn from(g: Group) -> u8 {
        match g {
            Group::One => 1,
            Group::Two => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experience {
    Beginner,
    Familiar,
    Knowledgeable,
    Expert,
}

/// Whether graphical renderings accompany the text signatures.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeckoMode {
    /// Alternate by group and level parity.
    #[default]
    Study,
    AlwaysOn,
    Off,
}

/// Group one sees renderings on even levels, group two on odd levels.
pub fn treatment(group: Group, level: u32, mode: GeckoMode) -> bool {
    match mode {
        GeckoMode::AlwaysOn => true,
        GeckoMode::Off => false,
        GeckoMode::Study => match group {
            Group::One => level % 2 == 0,
            Group::Two => level % 2 == 1,
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    InProgress,
    Success,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: u32,
    pub outcome: Outcome,
    /// Seconds from the level's start to its latest event.
    pub elapsed: f64,
    pub attempts: u32,
    pub gecko_shown: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub group: Group,
    pub experience: Experience,
    pub mode: GeckoMode,
    /// Index into the level set; equals its length once the game is over.
    pub level_index: usize,
    pub skips_remaining: u8,
    pub per_level: Vec<LevelRecord>,
    pub created_at: DateTime<Utc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level_started_at: Option<DateTime<Utc>>,
}

impl Session {
    pub fn is_complete(&self) -> bool {
        self.level_started_at.is_none() && !self.per_level.is_empty()
    }

    pub fn current(&self) -> Option<&LevelRecord> {
        self.per_level.last().filter(|r| r.outcome == Outcome::InProgress)
    }

    fn current_mut(&mut self) -> Option<&mut LevelRecord> {
        self.per_level.last_mut().filter(|r| r.outcome == Outcome::InProgress)
    }

    fn touch(&mut self, at: DateTime<Utc>) {
        let start = self.level_started_at;
        if let (Some(start), Some(rec)) = (start, self.current_mut()) {
            rec.elapsed = ((at - start).num_milliseconds().max(0) as f64) / 1000.0;
        }
    }

    pub fn count(&self, outcome: Outcome) -> usize {
        self.per_level.iter().filter(|r| r.outcome == outcome).count()
    }

    /// Folds one event into the session. Replaying a log through this is
    /// the only way sessions are restored, so it must stay deterministic.
    pub fn apply(&mut self, event: &Event) {
        match event {
            Event::SessionCreated { .. } => {}
            Event::LevelStarted { at, level, gecko_shown, .. } => {
                self.level_started_at = Some(*at);
                self.per_level.push(LevelRecord {
                    level: *level,
                    outcome: Outcome::InProgress,
                    elapsed: 0.0,
                    attempts: 0,
                    gecko_shown: *gecko_shown,
                });
            }
            Event::Attempt { at, .. } => {
                self.touch(*at);
                if let Some(rec) = self.current_mut() {
                    rec.attempts += 1;
                }
            }
            Event::Skip { at, .. } => {
                self.touch(*at);
                self.skips_remaining = self.skips_remaining.saturating_sub(1);
            }
            Event::LevelCompleted { at, outcome, .. } => {
                self.touch(*at);
                if let Some(rec) = self.current_mut() {
                    rec.outcome = *outcome;
                }
                self.level_index += 1;
                self.level_started_at = None;
            }
        }
    }

    fn from_created(event: &Event) -> Option<Session> {
        match event {
            Event::SessionCreated { session_id, at, group, experience, mode } => Some(Session {
                id: session_id.clone(),
                group: *group,
                experience: *experience,
                mode: *mode,
                level_index: 0,
                skips_remaining: SKIP_BUDGET,
                per_level: Vec::new(),
                created_at: *at,
                level_started_at: None,
            }),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    SessionCreated { session_id: String, at: DateTime<Utc>, group: Group, experience: Experience, mode: GeckoMode },
    LevelStarted { session_id: String, at: DateTime<Utc>, level: u32, gecko_shown: bool },
    Attempt { session_id: String, at: DateTime<Utc>, level: u32, code: String, status: AttemptStatus },
    Skip { session_id: String, at: DateTime<Utc>, level: u32 },
    LevelCompleted { session_id: String, at: DateTime<Utc>, level: u32, outcome: Outcome },
}

impl Event {
    pub fn session_id(&self) -> &str {
        match self {
            Event::SessionCreated { session_id, .. }
            | Event::LevelStarted { session_id, .. }
            | Event::Attempt { session_id, .. }
            | Event::Skip { session_id, .. }
            | Event::LevelCompleted { session_id, .. } => session_id,
        }
    }

    pub fn to_jsonl(&self) -> String {
        let mut line = serde_json::to_string(self).expect("events serialize");
        line.push('\n');
        line
    }
}

#[derive(Debug, Error)]
#[error("event log line {line}: {message}")]
pub struct LogError {
    pub line: usize,
    pub message: String,
}

pub fn parse_jsonl(text: &str) -> Result<Vec<Event>, LogError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| LogError { line: i + 1, message: e.to_string() }))
        .collect()
}

/// Rebuilds every session mentioned in `events`, in log order.
pub fn replay(events: &[Event]) -> BTreeMap<String, Session> {
    let mut out: BTreeMap<String, Session> = BTreeMap::new();
    for e in events {
        if let Some(s) = Session::from_created(e) {
            out.insert(s.id.clone(), s);
        } else if let Some(s) = out.get_mut(e.session_id()) {
            s.apply(e);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttemptStatus {
    Success,
    TypeError,
    SyntaxError,
    WrongSignature,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AttemptResult {
    pub status: AttemptStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inferred: Option<Scheme>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<serde_json::Value>,
    /// Shape comparison of the conflicting types, for side-by-side rendering.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diff: Option<DiffReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("the session has already finished every level")]
    SessionComplete,
    #[error("no skips remaining")]
    NoSkipsRemaining,
}

/// Checks `code` against `level` under the closed-world rule: only the
/// level's own functions (and operators) are in scope.
pub fn evaluate(level: &Level, code: &str) -> AttemptResult {
    let fail = |status, diagnostics, inferred, diff| AttemptResult { status, inferred, diagnostics: Some(diagnostics), diff };
    let def = match parse_definition(code, &level.fixities()) {
        Ok(d) => d,
        Err(e) => {
            let diag = serde_json::json!({"kind": "syntax_error", "offset": e.offset(), "message": e.to_string()});
            return fail(AttemptStatus::SyntaxError, diag, None, None);
        }
    };
    if def.name != DEFINITION_NAME {
        let diag = serde_json::json!({
            "kind": "wrong_name",
            "offset": 0,
            "message": format!("the definition must be named `{DEFINITION_NAME}`, not `{}`", def.name),
        });
        return fail(AttemptStatus::SyntaxError, diag, None, None);
    }
    match infer(&def, &level.env()) {
        Err(e @ InferError::UnboundName { .. }) => fail(AttemptStatus::SyntaxError, e.to_json(), None, None),
        Err(e @ InferError::Type { .. }) => {
            let InferError::Type { expected, actual, .. } = &e else { unreachable!() };
            let d = signature_diff(&generalize(actual.clone()), &generalize(expected.clone()));
            fail(AttemptStatus::TypeError, e.to_json(), None, Some(d))
        }
        Ok(inferred) if subsumes(&inferred, &level.target) => AttemptResult {
            status: AttemptStatus::Success,
            inferred: Some(inferred),
            diagnostics: None,
            diff: None,
        },
        Ok(inferred) => {
            let d = signature_diff(&inferred, &level.target);
            let diag = serde_json::json!({
                "kind": "wrong_signature",
                "message": format!("inferred `{inferred}` does not match the target `{}`", level.target),
            });
            fail(AttemptStatus::WrongSignature, diag, Some(inferred), Some(d))
        }
    }
}

/// Session operations. Each returns the events it produced, already applied.
#[derive(Clone, Debug)]
pub struct Game {
    pub levels: LevelSet,
    pub mode: GeckoMode,
}

impl Game {
    pub fn new(levels: LevelSet, mode: GeckoMode) -> Self {
        Game { levels, mode }
    }

    fn start_level(&self, s: &Session, at: DateTime<Utc>) -> Option<Event> {
        let level = self.levels.by_index(s.level_index)?;
        Some(Event::LevelStarted {
            session_id: s.id.clone(),
            at,
            level: level.number,
            gecko_shown: treatment(s.group, level.number, s.mode),
        })
    }

    fn commit(s: &mut Session, events: &[Event]) {
        for e in events {
            s.apply(e);
        }
    }

    pub fn create_session(
        &self,
        id: impl Into<String>,
        group: Group,
        experience: Experience,
        at: DateTime<Utc>,
    ) -> (Session, Vec<Event>) {
        let created = Event::SessionCreated { session_id: id.into(), at, group, experience, mode: self.mode };
        let mut s = Session::from_created(&created).expect("created event");
        let mut events = vec![created];
        events.extend(self.start_level(&s, at));
        Self::commit(&mut s, &events[1..]);
        (s, events)
    }

    pub fn current_level(&self, s: &Session) -> Option<&Level> {
        s.current().and_then(|r| self.levels.get(r.level))
    }

    pub fn attempt(&self, s: &mut Session, code: &str, at: DateTime<Utc>) -> Result<(AttemptResult, Vec<Event>), GameError> {
        let level = self.current_level(s).ok_or(GameError::SessionComplete)?;
        let result = evaluate(level, code);
        let id = s.id.clone();
        let mut events =
            vec![Event::Attempt { session_id: id.clone(), at, level: level.number, code: code.into(), status: result.status }];
        if result.status == AttemptStatus::Success {
            events.push(Event::LevelCompleted { session_id: id, at, level: level.number, outcome: Outcome::Success });
        }
        Self::commit(s, &events);
        if result.status == AttemptStatus::Success {
            if let Some(next) = self.start_level(s, at) {
                s.apply(&next);
                events.push(next);
            }
        }
        Ok((result, events))
    }

    pub fn skip(&self, s: &mut Session, at: DateTime<Utc>) -> Result<Vec<Event>, GameError> {
        let level = self.current_level(s).ok_or(GameError::SessionComplete)?.number;
        if s.skips_remaining == 0 {
            return Err(GameError::NoSkipsRemaining);
        }
        let id = s.id.clone();
        let mut events = vec![
            Event::Skip { session_id: id.clone(), at, level },
            Event::LevelCompleted { session_id: id, at, level, outcome: Outcome::Skipped },
        ];
        Self::commit(s, &events);
        if let Some(next) = self.start_level(s, at) {
            s.apply(&next);
            events.push(next);
        }
        Ok(events)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::default_levels;
    use chrono::TimeZone;

    fn t(secs: i64) -> DateTime<Utc> {
        Utc.timestamp_opt(1_700_000_000 + secs, 0).unwrap()
    }

    fn game() -> Game {
        Game::new(default_levels(), GeckoMode::Study)
    }

    #[test]
    fn schedules_are_complements() {
        for n in 1..=10 {
            assert_ne!(treatment(Group::One, n, GeckoMode::Study), treatment(Group::Two, n, GeckoMode::Study));
            assert!(treatment(Group::Two, n, GeckoMode::AlwaysOn));
        }
        assert!(treatment(Group::One, 4, GeckoMode::Study));
        assert!(!treatment(Group::Two, 4, GeckoMode::Study));
    }

    #[test]
    fn evaluate_statuses() {
        let set = default_levels();
        assert_eq!(evaluate(set.get(1).unwrap(), "zeroToHero z = f z").status, AttemptStatus::Success);
        let r = evaluate(set.get(2).unwrap(), "zeroToHero z = undefinedFn z");
        assert_eq!(r.status, AttemptStatus::SyntaxError);
        assert_eq!(r.diagnostics.unwrap()["kind"], "unbound_name");
        let r = evaluate(set.get(4).unwrap(), "zeroToHero z = f1 z");
        assert_eq!(r.status, AttemptStatus::WrongSignature);
        assert_eq!(r.diff.unwrap().regions[0].detail, "`Hero b a` vs `Hero b b`");
        assert_eq!(evaluate(set.get(4).unwrap(), "zeroToHero z = f1 (f1 z)").status, AttemptStatus::TypeError);
        assert_eq!(evaluate(set.get(4).unwrap(), "zeroToHero z = f1 (").status, AttemptStatus::SyntaxError);
    }

    #[test]
    fn skip_budget() {
        let g = game();
        let (mut s, _) = g.create_session("s", Group::One, Experience::Beginner, t(0));
        for i in 0..4 {
            g.skip(&mut s, t(i + 1)).unwrap();
        }
        assert_eq!(g.skip(&mut s, t(9)), Err(GameError::NoSkipsRemaining));
        assert_eq!(s.per_level[2], LevelRecord {
            level: 3,
            outcome: Outcome::Skipped,
            elapsed: 1.0,
            attempts: 0,
            gecko_shown: false
        });
    }

    #[test]
    fn play_through_and_replay() {
        let g = game();
        let (mut s, mut log) = g.create_session("s", Group::Two, Experience::Expert, t(0));
        let mut clock = 0;
        for level in g.levels.levels.clone() {
            clock += 5;
            match &level.reference_solution {
                Some(code) if level.solution_verified => {
                    let (r, ev) = g.attempt(&mut s, "zeroToHero z = nope", t(clock)).unwrap();
                    assert_eq!(r.status, AttemptStatus::SyntaxError);
                    log.extend(ev);
                    clock += 3;
                    let (r, ev) = g.attempt(&mut s, code, t(clock)).unwrap();
                    assert_eq!(r.status, AttemptStatus::Success, "level {}", level.number);
                    log.extend(ev);
                }
                _ => log.extend(g.skip(&mut s, t(clock)).unwrap()),
            }
        }
        assert!(s.is_complete());
        assert_eq!(s.count(Outcome::Success) + s.count(Outcome::Skipped), 10);
        assert_eq!(s.count(Outcome::Skipped), 2);
        assert_eq!(g.skip(&mut s, t(999)), Err(GameError::SessionComplete));
        assert!(matches!(g.attempt(&mut s, "x", t(999)), Err(GameError::SessionComplete)));
        assert_eq!(s.per_level[0].attempts, 2);
        assert_eq!(s.per_level[0].elapsed, 8.0);

        let text: String = log.iter().map(Event::to_jsonl).collect();
        let replayed = replay(&parse_jsonl(&text).unwrap());
        assert_eq!(replayed["s"], s);
    }

    #[test]
    fn events_are_tagged_json() {
        let e = Event::Skip { session_id: "s".into(), at: t(0), level: 3 };
        let line = e.to_jsonl();
        assert!(line.starts_with(r#"{"event":"skip","session_id":"s","at":"2023-11-14T22:13:20Z""#), "{line}");
        assert!(parse_jsonl("not json\n").is_err());
    }
}
