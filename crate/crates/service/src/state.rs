use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use chrono::Utc;
use geckograph::game::{
    default_levels, load_levels, parse_jsonl, replay, treatment, AttemptResult, Event, Experience, Game, GeckoMode,
    Group, Level, Session,
};
use geckograph::layout::{layout, LayoutOptions};
use geckograph::palette::Palette;
use geckograph::render::{to_svg, RenderOptions};
use geckograph::syntax::Scheme;

use crate::{ApiConfig, ApiError, ServiceError};

type Shared<T> = Arc<Mutex<T>>;

/// Everything the handlers share. Sessions are locked one at a time, so
/// requests for different sessions proceed in parallel.
pub struct AppState {
    pub game: Game,
    pub layout: LayoutOptions,
    sessions: Mutex<HashMap<String, Shared<Session>>>,
    log: Option<Mutex<File>>,
    created: AtomicUsize,
}

fn io(path: &std::path::Path, e: std::io::Error) -> ServiceError {
    ServiceError::Io(path.to_path_buf(), e.to_string())
}

impl AppState {
    /// Loads levels and palette, replays the event log, and opens it for
    /// appending.
    pub fn new(config: &ApiConfig) -> Result<Self, ServiceError> {
        let levels = match &config.levels {
            Some(p) => load_levels(&std::fs::read_to_string(p).map_err(|e| io(p, e))?)
                .map_err(|e| ServiceError::Levels(e.to_string()))?,
            None => default_levels(),
        };
        let mut layout = config.layout.clone();
        if let Some(p) = &config.palette {
            let text = std::fs::read_to_string(p).map_err(|e| io(p, e))?;
            layout.palette = Palette::from_json(&text).map_err(|e| ServiceError::Palette(e.to_string()))?;
        }
        let mode = if config.always_on_gecko { GeckoMode::AlwaysOn } else { GeckoMode::Study };

        let mut sessions = HashMap::new();
        let log = match &config.log {
            Some(p) => {
                if p.exists() {
                    let text = std::fs::read_to_string(p).map_err(|e| io(p, e))?;
                    let events = parse_jsonl(&text).map_err(|e| ServiceError::Log(e.to_string()))?;
                    for (id, s) in replay(&events) {
                        sessions.insert(id, Arc::new(Mutex::new(s)));
                    }
                }
                Some(Mutex::new(OpenOptions::new().create(true).append(true).open(p).map_err(|e| io(p, e))?))
            }
            None => None,
        };
        let created = AtomicUsize::new(sessions.len());
        Ok(AppState { game: Game::new(levels, mode), layout, sessions: Mutex::new(sessions), log, created })
    }

    fn record(&self, events: &[Event]) -> Result<(), ApiError> {
        let Some(log) = &self.log else { return Ok(()) };
        let mut f = log.lock().map_err(|_| ApiError::Internal("log lock poisoned".into()))?;
        for e in events {
            writeln!(f, "{}", e.to_jsonl()).map_err(|e| ApiError::Internal(e.to_string()))?;
        }
        f.flush().map_err(|e| ApiError::Internal(e.to_string()))
    }

    fn session(&self, id: &str) -> Result<Shared<Session>, ApiError> {
        let map = self.sessions.lock().map_err(|_| ApiError::Internal("session table poisoned".into()))?;
        map.get(id).cloned().ok_or_else(|| ApiError::NotFound(format!("session `{id}`")))
    }

    /// Without an explicit group, players alternate between the two.
    pub fn create_session(&self, group: Option<Group>, experience: Experience) -> Result<Session, ApiError> {
        let n = self.created.fetch_add(1, Ordering::SeqCst);
        let group = group.unwrap_or(if n % 2 == 0 { Group::One } else { Group::Two });
        let id = uuid::Uuid::new_v4().to_string();
        let (s, events) = self.game.create_session(id.clone(), group, experience, Utc::now());
        self.record(&events)?;
        self.sessions
            .lock()
            .map_err(|_| ApiError::Internal("session table poisoned".into()))?
            .insert(id, Arc::new(Mutex::new(s.clone())));
        Ok(s)
    }

    pub fn get_session(&self, id: &str) -> Result<Session, ApiError> {
        let s = self.session(id)?;
        let s = s.lock().map_err(|_| ApiError::Internal("session poisoned".into()))?;
        Ok(s.clone())
    }

    /// Runs an attempt; returns the level it was made on, the result, and
    /// the session afterwards.
    pub fn attempt(&self, id: &str, code: &str) -> Result<(u32, AttemptResult, Session), ApiError> {
        let s = self.session(id)?;
        let mut s = s.lock().map_err(|_| ApiError::Internal("session poisoned".into()))?;
        let level = self.game.current_level(&s).map(|l| l.number);
        let (result, events) = self.game.attempt(&mut s, code, Utc::now())?;
        self.record(&events)?;
        Ok((level.unwrap_or_default(), result, s.clone()))
    }

    pub fn skip(&self, id: &str) -> Result<Session, ApiError> {
        let s = self.session(id)?;
        let mut s = s.lock().map_err(|_| ApiError::Internal("session poisoned".into()))?;
        let events = self.game.skip(&mut s, Utc::now())?;
        self.record(&events)?;
        Ok(s.clone())
    }

    pub fn level(&self, number: u32) -> Result<&Level, ApiError> {
        self.game.levels.get(number).ok_or_else(|| ApiError::NotFound(format!("level {number}")))
    }

    pub fn shown(&self, s: &Session, level: u32) -> bool {
        treatment(s.group, level, s.mode)
    }

    pub fn svg(&self, scheme: &Scheme, legend: Option<&str>) -> String {
        let opts = RenderOptions { legend: legend.map(str::to_string), ..RenderOptions::default() };
        to_svg(&layout(scheme, &self.layout), &opts)
    }
}
