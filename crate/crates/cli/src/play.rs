//! The terminal game loop.

use std::fs::OpenOptions;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use chrono::Utc;
use geckograph::diff::annotate_with;
use geckograph::game::{
    treatment, AttemptStatus, Event, Experience, Game, GeckoMode, Group, LevelSet, Outcome, DEFINITION_NAME,
};
use geckograph::layout::{layout, LayoutNode, LayoutOptions};
use geckograph::render::{ansi_columns, to_ansi, Mode};
use geckograph::syntax::Scheme;

use crate::{ExperienceArg, Fallible, GeckoArg, Look};

pub struct Setup {
    pub gecko: GeckoArg,
    pub group: u8,
    pub experience: ExperienceArg,
    pub log: Option<PathBuf>,
    pub look: Look,
}

/// `^` under every highlighted column of an ANSI rendering; empty when
/// nothing is highlighted.
pub fn marker_row(n: &LayoutNode) -> String {
    let mut row = vec![' '; ansi_columns(n)];
    for m in n.walk().into_iter().filter(|m| m.highlight) {
        let from = (m.rect.x * 2.0).floor() as usize;
        let to = ((m.rect.right() * 2.0).ceil() as usize).min(row.len());
        row[from.min(to)..to].iter_mut().for_each(|c| *c = '^');
    }
    let line: String = row.into_iter().collect();
    if line.trim().is_empty() {
        String::new()
    } else {
        format!("{}\n", line.trim_end())
    }
}

struct Screen<'a, W: Write> {
    out: &'a mut W,
    opts: LayoutOptions,
    look: &'a Look,
}

impl<W: Write> Screen<'_, W> {
    fn line(&mut self, text: &str) -> Fallible<()> {
        writeln!(self.out, "{text}").map_err(|e| e.to_string())
    }

    fn diagram(&mut self, n: &LayoutNode) -> Fallible<()> {
        match to_ansi(n, &self.look.render(Mode::Full, None), self.look.width) {
            Ok(text) => write!(self.out, "{text}").map_err(|e| e.to_string()),
            // too wide for the terminal: the text signature is already shown
            Err(e) => self.line(&format!("  ({e})")),
        }
    }

    fn signature(&mut self, name: &str, s: &Scheme, shown: bool) -> Fallible<()> {
        self.line(&format!("{name} :: {s}"))?;
        if shown {
            let n = layout(s, &self.opts);
            self.diagram(&n)?;
        }
        Ok(())
    }
}

pub fn play(levels: LevelSet, setup: &Setup, input: &mut impl BufRead, out: &mut impl Write) -> Fallible<()> {
    let mode = match setup.gecko {
        GeckoArg::On => GeckoMode::AlwaysOn,
        GeckoArg::Off => GeckoMode::Off,
        GeckoArg::Study => GeckoMode::Study,
    };
    let group = if setup.group == 2 { Group::Two } else { Group::One };
    let experience = match setup.experience {
        ExperienceArg::Beginner => Experience::Beginner,
        ExperienceArg::Familiar => Experience::Familiar,
        ExperienceArg::Knowledgeable => Experience::Knowledgeable,
        ExperienceArg::Expert => Experience::Expert,
    };
    let mut log = match &setup.log {
        Some(p) => Some(OpenOptions::new().create(true).append(true).open(p).map_err(|e| format!("{}: {e}", p.display()))?),
        None => None,
    };
    let mut record = |events: &[Event]| -> Fallible<()> {
        if let Some(f) = &mut log {
            for e in events {
                writeln!(f, "{}", e.to_jsonl()).map_err(|e| e.to_string())?;
            }
        }
        Ok(())
    };

    let game = Game::new(levels, mode);
    let id = format!("local-{}", Utc::now().format("%Y%m%dT%H%M%S"));
    let (mut s, events) = game.create_session(id, group, experience, Utc::now());
    record(&events)?;
    let mut sc = Screen { out, opts: setup.look.options()?, look: &setup.look };
    let mut announced = None;

    while let Some(level) = game.current_level(&s) {
        let shown = treatment(s.group, level.number, s.mode);
        if announced != Some(level.number) {
            announced = Some(level.number);
            sc.line(&format!("\n== Level {}: {} ({} skips left) ==", level.number, level.title, s.skips_remaining))?;
            sc.signature(DEFINITION_NAME, &level.target, shown)?;
            sc.line("available:")?;
            for (name, ty) in &level.available {
                let name = if name.chars().all(char::is_alphanumeric) { name.clone() } else { format!("({name})") };
                sc.signature(&format!("  {name}"), ty, shown)?;
            }
        }
        write!(sc.out, "> ").and_then(|_| sc.out.flush()).map_err(|e| e.to_string())?;
        let mut buf = String::new();
        if input.read_line(&mut buf).map_err(|e| e.to_string())? == 0 {
            sc.line("")?;
            break;
        }
        let code = buf.trim();
        match code {
            "" => continue,
            ":quit" | ":q" => break,
            ":skip" => match game.skip(&mut s, Utc::now()) {
                Ok(events) => {
                    record(&events)?;
                    sc.line("skipped")?;
                }
                Err(e) => sc.line(&format!("cannot skip: {e}"))?,
            },
            _ => {
                let (result, events) = game.attempt(&mut s, code, Utc::now()).map_err(|e| e.to_string())?;
                record(&events)?;
                match result.status {
                    AttemptStatus::Success => sc.line("solved!")?,
                    status => {
                        let message = result
                            .diagnostics
                            .as_ref()
                            .and_then(|d| d["message"].as_str().map(str::to_string))
                            .unwrap_or_default();
                        sc.line(&format!("{}: {message}", serde_json::to_value(status).unwrap().as_str().unwrap()))?;
                        if let Some(report) = &result.diff {
                            if shown {
                                let (l, r) = annotate_with(report, &sc.opts);
                                sc.line(&format!("yours:  {}", report.left))?;
                                sc.diagram(&l)?;
                                write!(sc.out, "{}", marker_row(&l)).map_err(|e| e.to_string())?;
                                sc.line(&format!("wanted: {}", report.right))?;
                                sc.diagram(&r)?;
                                write!(sc.out, "{}", marker_row(&r)).map_err(|e| e.to_string())?;
                            } else {
                                sc.line(&format!("yours:  {}\nwanted: {}", report.left, report.right))?;
                            }
                        }
                    }
                }
            }
        }
    }

    let time: f64 = s.per_level.iter().map(|r| r.elapsed).sum();
    sc.line(&format!(
        "solved {}, skipped {}, {:.1}s in total",
        s.count(Outcome::Success),
        s.count(Outcome::Skipped),
        time
    ))
}
