//! `gecko`: render and diff type signatures, play the game in a terminal,
//! run the HTTP service, and audit level files.
//!
//! Exit status: 0 on success, 1 on domain errors (bad types, unreadable
//! files, failed verification under `--strict`), 2 on usage errors.

mod play;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use geckograph::diff::{annotate_with, diff};
use geckograph::game::{default_levels, load_levels, search, solution_depth, LevelSet, DEFAULT_BUDGET};
use geckograph::infer::parse_definition;
use geckograph::layout::{layout, LayoutNode, LayoutOptions};
use geckograph::palette::Palette;
use geckograph::render::{to_ansi, to_svg, Mode, RenderOptions};
use geckograph::syntax::parse_scheme;
use geckograph_service::ApiConfig;

#[derive(Parser)]
#[command(name = "gecko", version, about = "Graphical type signatures and the ZeroToHero game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a type signature.
    Render {
        #[arg(value_name = "TYPE")]
        ty: String,
        #[arg(long, value_enum, default_value_t = Format::Svg)]
        format: Format,
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Text under the diagram.
        #[arg(long)]
        legend: Option<String>,
        #[command(flatten)]
        look: Look,
    },
    /// Compare the shapes of two signatures.
    Diff {
        left: String,
        right: String,
        #[arg(long, value_enum, default_value_t = DiffFormat::Json)]
        format: DiffFormat,
        #[command(flatten)]
        look: Look,
    },
    /// Play the game; reads one definition per line, `:skip` or `:quit`.
    Play {
        #[arg(long, env = "GECKO_LEVELS")]
        levels: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = GeckoArg::On)]
        gecko: GeckoArg,
        /// Study group (decides which levels show renderings in study mode).
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        group: u8,
        #[arg(long, value_enum, default_value_t = ExperienceArg::Beginner)]
        experience: ExperienceArg,
        /// Append the session's events to this JSONL file.
        #[arg(long)]
        log: Option<PathBuf>,
        #[command(flatten)]
        look: Look,
    },
    /// Run the HTTP service.
    Serve {
        /// JSON file with the service configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, env = "GECKO_BIND")]
        bind: Option<String>,
        #[arg(long, env = "GECKO_LEVELS")]
        levels: Option<PathBuf>,
    },
    /// Search every level for a solution and check its reference solution.
    VerifyLevels {
        #[arg(long, env = "GECKO_LEVELS")]
        levels: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        max_depth: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        /// Exit 1 when any level is flagged.
        #[arg(long)]
        strict: bool,
        /// One JSON object per level instead of text.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Svg,
    Ansi,
}

#[derive(Clone, Copy, ValueEnum)]
enum DiffFormat {
    Svg,
    Ansi,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Compact,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ExperienceArg {
    Beginner,
    Familiar,
    Knowledgeable,
    Expert,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum GeckoArg {
    On,
    Off,
    Study,
}

/// Layout and output tuning shared by the drawing commands.
#[derive(Args, Clone)]
pub struct Look {
    /// JSON file of layout unit sizes (missing fields keep defaults).
    #[arg(long)]
    layout: Option<PathBuf>,
    /// JSON array of hex colors replacing the default palette.
    #[arg(long)]
    palette: Option<PathBuf>,
    #[arg(long)]
    gap: Option<f64>,
    #[arg(long)]
    column_width: Option<f64>,
    #[arg(long)]
    badge_row: Option<f64>,
    /// Pixels per layout unit in SVG output.
    #[arg(long, default_value_t = 28.0)]
    scale: f64,
    /// Terminal columns available to ANSI output.
    #[arg(long, env = "COLUMNS", default_value_t = 120)]
    width: usize,
}

pub type Fallible<T> = Result<T, String>;

fn read(path: &PathBuf) -> Fallible<String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

impl Look {
    pub fn options(&self) -> Fallible<LayoutOptions> {
        let mut o = match &self.layout {
            Some(p) => serde_json::from_str(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))?,
            None => LayoutOptions::default(),
        };
        if let Some(p) = &self.palette {
            o.palette = Palette::from_json(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))?;
        }
        o.gap = self.gap.unwrap_or(o.gap);
        o.column_width = self.column_width.unwrap_or(o.column_width);
        o.badge_row = self.badge_row.unwrap_or(o.badge_row);
        Ok(o)
    }

    pub fn render(&self, mode: Mode, legend: Option<String>) -> RenderOptions {
        RenderOptions { scale: self.scale, mode, legend, ..RenderOptions::default() }
    }
}

pub fn levels_from(path: &Option<PathBuf>) -> Fallible<LevelSet> {
    match path {
        Some(p) => load_levels(&read(p)?).map_err(|e| format!("{}: {e}", p.display())),
        None => Ok(default_levels()),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Fallible<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| e.to_string())
        }
    }
}

/// Two diagrams side by side in one document.
fn side_by_side(l: &LayoutNode, r: &LayoutNode, o: &RenderOptions) -> String {
    let gap = 1.0 * o.scale;
    let (lw, rw) = (l.rect.width * o.scale, r.rect.width * o.scale);
    let lh = (l.extended_bottom() * o.scale).ceil();
    let rh = (r.extended_bottom() * o.scale).ceil();
    let (w, h) = (lw + gap + rw, lh.max(rh) + if o.legend.is_some() { o.scale } else { 0.0 });
    let inner = |n: &LayoutNode, x: f64| {
        let svg = to_svg(n, o);
        svg.replacen("<svg ", &format!(r#"<svg x="{x:.2}" "#), 1)
    };
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w:.2}\" height=\"{h:.2}\" viewBox=\"0 0 {w:.2} {h:.2}\">\n{}{}</svg>\n",
        inner(l, 0.0),
        inner(r, lw + gap)
    )
}

fn run(cmd: Command) -> Fallible<()> {
    match cmd {
        Command::Render { ty, format, mode, out, legend, look } => {
            let s = parse_scheme(&ty).map_err(|e| e.to_string())?;
            let node = layout(&s, &look.options()?);
            let mode = match mode {
                ModeArg::Full => Mode::Full,
                ModeArg::Compact => Mode::Compact,
            };
            let o = look.render(mode, legend);
            let text = match format {
                Format::Svg => to_svg(&node, &o),
                Format::Ansi => to_ansi(&node, &o, look.width).map_err(|e| e.to_string())?,
            };
            emit(&out, &text)
        }
        Command::Diff { left, right, format, look } => {
            let l = parse_scheme(&left).map_err(|e| format!("left: {e}"))?;
            let r = parse_scheme(&right).map_err(|e| format!("right: {e}"))?;
            let report = diff(&l, &r);
            let (ln, rn) = annotate_with(&report, &look.options()?);
            let o = look.render(Mode::Full, None);
            let text = match format {
                DiffFormat::Json => format!("{:#}\n", report.to_json()),
                DiffFormat::Svg => side_by_side(&ln, &rn, &o),
                DiffFormat::Ansi => {
                    let mut t = String::new();
                    for (label, n) in [("left", &ln), ("right", &rn)] {
                        t.push_str(&format!("{label}:\n"));
                        t.push_str(&to_ansi(n, &o, look.width).map_err(|e| e.to_string())?);
                        t.push_str(&play::marker_row(n));
                        t.push('\n');
                    }
                    for region in &report.regions {
                        t.push_str(&format!("{}: {}\n", region.kind.name(), region.detail));
                    }
                    t
                }
            };
            emit(&None, &text)
        }
        Command::Play { levels, gecko, group, experience, log, look } => {
            let set = levels_from(&levels)?;
            let setup = play::Setup { gecko, group, experience, log, look };
            play::play(set, &setup, &mut std::io::stdin().lock(), &mut std::io::stdout().lock())
        }
        Command::Serve { config, bind, levels } => {
            let base = match &config {
                Some(p) => ApiConfig::load(p).map_err(|e| e.to_string())?,
                None => ApiConfig::default(),
            };
            // flags and their environment variables both go through clap
            let config = base.with_overrides(bind, levels);
            eprintln!("listening on http://{}", config.bind);
            geckograph_service::serve(&config).map_err(|e| e.to_string())
        }
        Command::VerifyLevels { levels, max_depth, budget, strict, json } => {
            let set = levels_from(&levels)?;
            let mut flagged = Vec::new();
            for i in 0..set.len() {
                let level = set.by_index(i).expect("index in range");
                let report = search(level, max_depth, budget).map_err(|e| format!("level {}: {e}", level.number))?;
                let reference_depth = level
                    .reference_solution
                    .as_deref()
                    .and_then(|c| parse_definition(c, &level.fixities()).ok())
                    .map(|d| solution_depth(&d.body));
                let ok = level.solution_verified && report.witness.is_some();
                if !ok {
                    flagged.push(level.number);
                }
                if json {
                    let v = serde_json::json!({
                        "level": level.number,
                        "verified": ok,
                        "reference_solution_checks": level.solution_verified,
                        "reference_depth": reference_depth,
                        "witness": report.witness,
                        "explored": report.explored,
                    });
                    println!("{v}");
                    continue;
                }
                let verdict = if ok { "verified" } else { "FLAGGED" };
                let mut notes = Vec::new();
                if !level.solution_verified {
                    notes.push("reference solution does not check".to_string());
                }
                match &report.witness {
                    Some(w) => notes.push(format!("witness at depth {}: {}", w.depth, w.definition)),
                    None => notes.push(format!("no solution within depth {max_depth} ({} candidates)", report.explored)),
                }
                println!("level {:>2}  {verdict:<8}  {}", level.number, notes.join("; "));
            }
            if !json {
                let list = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(", ");
                println!("flagged: {}", if flagged.is_empty() { "none".into() } else { list(&flagged) });
            }
            if strict && !flagged.is_empty() {
                return Err(format!("{} level(s) flagged", flagged.len()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
