//! Pipeline stages behind each subcommand.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use nalgebra::DVector;
use normvar_core::corpus::{aggregate_with, count_table, AggregateOptions, MentionSeries};
use normvar_core::index::{build_index_opts, normalize_mean100, resample_mean, IndexOptions, IndexSeries, Window};
use normvar_core::io;
use normvar_core::normgame::{GameConfig, SteadyState};
use normvar_core::var::{format_table, render_csv, render_latex, render_text, significance_summary, FitJson};
use normvar_core::{Document, Execution, Granularity, GroupGame, Panel, Period, PhraseSet, ShareSeries, VarFit};

use crate::config::{Normalize, RunConfig, SimulateConfig, VarConfig};
use crate::error::{CliError, Result};

pub const TOOL: &str = concat!("normvar ", env!("CARGO_PKG_VERSION"));

/// Shared state for one invocation: effective config, output root and metadata.
pub struct Ctx {
    pub cfg: RunConfig,
    pub out: PathBuf,
    hash: String,
}

impl Ctx {
    pub fn new(cfg: RunConfig, out: PathBuf) -> Self {
        let hash = cfg.hash();
        Ctx { cfg, out, hash }
    }

    fn meta(&self) -> Vec<(&'static str, String)> {
        vec![
            ("tool", TOOL.to_string()),
            ("config", format!("sha256:{}", self.hash)),
            ("window", self.cfg.window_label()),
        ]
    }

    fn write(&self, rel: &str, body: &str) -> Result<()> {
        let mut text = io::meta_header(&self.meta());
        text.push_str(body);
        self.write_raw(rel, &text)
    }

    fn write_raw(&self, rel: &str, text: &str) -> Result<()> {
        let path = self.out.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))?;
        }
        fs::write(&path, text).map_err(|e| CliError::write(&path, e))
    }
}

/// Replaces characters that are unsafe in file names.
pub fn file_stem(name: &str) -> String {
    let s: String =
        name.chars().map(|c| if c.is_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' }).collect();
    if s.is_empty() || s.starts_with('.') {
        format!("_{s}")
    } else {
        s
    }
}

fn stems<'a>(names: impl Iterator<Item = &'a String>) -> Result<Vec<(&'a String, String)>> {
    let mut seen: BTreeMap<String, &String> = BTreeMap::new();
    let mut out = Vec::new();
    for n in names {
        let stem = file_stem(n);
        if let Some(prev) = seen.insert(stem.clone(), n) {
            return Err(CliError::input(format!("`{prev}` and `{n}` map to the same output file `{stem}.csv`")));
        }
        out.push((n, stem));
    }
    Ok(out)
}

struct Corpus {
    docs: Vec<Document>,
    sets: Vec<PhraseSet>,
    primary: usize,
}

fn load_corpus(cfg: &RunConfig) -> Result<Corpus> {
    let c = cfg.corpus.as_ref().ok_or_else(|| CliError::input("config has no [corpus] section"))?;
    let doc_path = cfg.resolve(&c.documents);
    let file = fs::File::open(&doc_path).map_err(|e| CliError::read(&doc_path, e))?;
    let docs = io::read_documents(file).map_err(|e| CliError::from(e).in_file(&doc_path))?;

    let set_path = cfg.resolve(&c.phrase_sets);
    let text = fs::read_to_string(&set_path).map_err(|e| CliError::read(&set_path, e))?;
    let sets: Vec<PhraseSet> =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", set_path.display())))?;
    if sets.is_empty() {
        return Err(CliError::input(format!("{}: no phrase sets", set_path.display())));
    }
    for s in &sets {
        s.validate().map_err(|e| CliError::from(e).in_file(&set_path))?;
    }
    let primary = match &c.primary {
        Some(name) => sets
            .iter()
            .position(|s| &s.name == name)
            .ok_or_else(|| CliError::input(format!("primary phrase set `{name}` is not defined")))?,
        None => 0,
    };
    cfg.date_window()?.check(&docs)?;
    Ok(Corpus { docs, sets, primary })
}

fn mentions(cfg: &RunConfig, corpus: &Corpus) -> Result<BTreeMap<String, MentionSeries>> {
    let opts = AggregateOptions { date_window: cfg.date_window()?, execution: Execution::default() };
    Ok(aggregate_with(&corpus.docs, &corpus.sets[corpus.primary], cfg.granularity(), &opts)?)
}

fn span_at(cfg: &RunConfig, g: Granularity) -> Result<Option<(Period, Period)>> {
    Ok(cfg.window_at(g)?.map(|w| (w.start, w.end)))
}

pub fn count(ctx: &Ctx) -> Result<String> {
    let corpus = load_corpus(&ctx.cfg)?;
    let series = mentions(&ctx.cfg, &corpus)?;
    for (outlet, stem) in stems(series.keys())? {
        ctx.write(&format!("counts/{stem}.csv"), &io::write_mentions(&series[outlet]))?;
    }
    let c = ctx.cfg.corpus.as_ref().expect("checked by load_corpus");
    let tg = c.table_granularity.unwrap_or(Granularity::Yearly);
    let table = count_table(&corpus.docs, &corpus.sets, tg, span_at(&ctx.cfg, tg)?, Execution::default());
    ctx.write("count_table.csv", &io::write_count_table(&table))?;
    let pg = c.period_granularity.unwrap_or(Granularity::Quarterly);
    let by_period = count_table(&corpus.docs, &corpus.sets, pg, span_at(&ctx.cfg, pg)?, Execution::default());
    ctx.write("period_table.csv", &io::write_period_table(&by_period))?;
    Ok(format!("counted {} documents from {} outlets\n", corpus.docs.len(), series.len()))
}

/// Outlet → group, rejecting outlets that report under more than one group.
fn outlet_groups(docs: &[Document]) -> Result<BTreeMap<&str, &str>> {
    let mut map: BTreeMap<&str, &str> = BTreeMap::new();
    for d in docs {
        match map.insert(&d.outlet, &d.group) {
            Some(g) if g != d.group => {
                return Err(CliError::input(format!(
                    "outlet `{}` appears under groups `{g}` and `{}`",
                    d.outlet, d.group
                )))
            }
            _ => {}
        }
    }
    Ok(map)
}

/// Pooled index plus one per named group.
pub struct Indices {
    pub pooled: IndexSeries,
    pub groups: BTreeMap<String, IndexSeries>,
}

fn build_indices(cfg: &RunConfig) -> Result<Indices> {
    let corpus = load_corpus(cfg)?;
    let series = mentions(cfg, &corpus)?;
    let groups = outlet_groups(&corpus.docs)?;
    let shares: Vec<(&str, ShareSeries)> =
        series.iter().map(|(outlet, m)| (groups[outlet.as_str()], m.to_share_series())).collect();
    let all: Vec<ShareSeries> = shares.iter().map(|(_, s)| s.clone()).collect();
    let window = match cfg.window_at(cfg.granularity())? {
        Some(w) => w,
        None => Window::spanning(&all).ok_or(normvar_core::index::IndexError::NoSeries)?,
    };
    let opts = IndexOptions {
        rescale_sd: cfg.index.as_ref().is_some_and(|i| i.rescale_sd),
        execution: Execution::default(),
    };
    let pooled = build_index_opts(&all, &window, "pooled", &opts)?;
    let mut by_group: BTreeMap<String, Vec<ShareSeries>> = BTreeMap::new();
    for (g, s) in shares {
        if !g.is_empty() {
            by_group.entry(g.to_string()).or_default().push(s);
        }
    }
    let mut out = BTreeMap::new();
    for (g, members) in by_group {
        let idx = build_index_opts(&members, &window, &g, &opts)?;
        out.insert(g, idx);
    }
    Ok(Indices { pooled, groups: out })
}

fn write_indices(ctx: &Ctx, idx: &Indices) -> Result<()> {
    for (g, stem) in stems(idx.groups.keys())? {
        if stem == "pooled" {
            return Err(CliError::input("group name `pooled` is reserved"));
        }
        ctx.write(&format!("index/{stem}.csv"), &io::write_index(&idx.groups[g]))?;
    }
    ctx.write("index/pooled.csv", &io::write_index(&idx.pooled))
}

pub fn index(ctx: &Ctx) -> Result<String> {
    let idx = build_indices(&ctx.cfg)?;
    write_indices(ctx, &idx)?;
    let mut msg = format!("pooled index: {} periods, window mean {}\n", idx.pooled.rows.len(), idx.pooled.window_mean());
    for (g, s) in &idx.groups {
        let _ = writeln!(msg, "{g} index: {} periods", s.rows.len());
    }
    Ok(msg)
}

fn build_panel(cfg: &RunConfig) -> Result<Panel> {
    let pc = cfg.panel.as_ref().ok_or_else(|| CliError::input("config has no [panel] section"))?;
    if pc.variables.is_empty() {
        return Err(CliError::input("[panel] lists no variables"));
    }
    let needs_index = pc.variables.iter().any(|v| v.source.starts_with("index:"));
    let indices = if needs_index { Some(build_indices(cfg)?) } else { None };
    let pw = cfg.window_at(pc.granularity)?;
    let mut series = Vec::with_capacity(pc.variables.len());
    for v in &pc.variables {
        let raw = match v.source.split_once(':') {
            Some(("index", "pooled")) => indices.as_ref().expect("built above").pooled.as_share_series(),
            Some(("index", g)) => indices
                .as_ref()
                .expect("built above")
                .groups
                .get(g)
                .ok_or_else(|| CliError::input(format!("variable `{}`: no index for group `{g}`", v.name)))?
                .as_share_series(),
            Some(("file", p)) => {
                let path = cfg.resolve(p);
                let file = fs::File::open(&path).map_err(|e| CliError::read(&path, e))?;
                io::read_series(&v.name, file).map_err(|e| CliError::from(e).in_file(&path))?
            }
            _ => return Err(CliError::input(format!("variable `{}`: unknown source `{}`", v.name, v.source))),
        };
        let mut s = if raw.granularity == pc.granularity {
            raw
        } else {
            resample_mean(&raw, pc.granularity)
                .map_err(|e| CliError::input(format!("variable `{}`: {e}", v.name)))?
        };
        s.label = v.name.clone();
        if v.normalize == Some(Normalize::Mean100) {
            let w = match pw {
                Some(w) => w,
                None => Window::spanning(std::slice::from_ref(&s)).ok_or(normvar_core::index::IndexError::NoSeries)?,
            };
            let mut n = normalize_mean100(&s, &w)?.as_share_series();
            n.label = v.name.clone();
            s = n;
        }
        series.push(s);
    }
    Panel::from_series(&series, pw.as_ref()).map_err(|e| CliError::input(e.to_string()))
}

pub fn panel(ctx: &Ctx) -> Result<String> {
    let panel = build_panel(&ctx.cfg)?;
    ctx.write("panel/panel.csv", &io::write_panel(&panel))?;
    Ok(format!("panel: {} variables, {} periods\n", panel.k(), panel.len()))
}

fn load_panel(cfg: &RunConfig, vc: &VarConfig) -> Result<Panel> {
    match &vc.panel {
        Some(p) => {
            let path = cfg.resolve(p);
            let file = fs::File::open(&path).map_err(|e| CliError::read(&path, e))?;
            let panel = io::read_panel(file).map_err(|e| CliError::from(e).in_file(&path))?;
            match cfg.window_at(panel.granularity)? {
                Some(w) => Ok(panel.restrict(&w)?),
                None => Ok(panel),
            }
        }
        None => build_panel(cfg),
    }
}

pub fn estimate(ctx: &Ctx) -> Result<String> {
    let vc = ctx.cfg.var.clone().unwrap_or_default();
    let panel = load_panel(&ctx.cfg, &vc)?;
    let fit = VarFit::estimate(&panel, vc.lags, vc.with_constant)?;
    write_fit(ctx, &fit)?;
    let rows = format_table(&fit);
    let radius = fit.stability_radius();
    let mut msg = format!(
        "stability radius: {radius:.6} ({})\n",
        if fit.is_stable() { "stable" } else { "not stable" }
    );
    for (lag, terms) in significance_summary(&rows, fit.spec.p, 0.05) {
        let _ = writeln!(msg, "lag {lag}: {}", if terms.is_empty() { "-".to_string() } else { terms.join(" ") });
    }
    Ok(msg)
}

fn write_fit(ctx: &Ctx, fit: &VarFit) -> Result<()> {
    let rows = format_table(fit);
    #[derive(serde::Serialize)]
    struct Out {
        meta: BTreeMap<&'static str, String>,
        #[serde(flatten)]
        fit: FitJson,
    }
    let out = Out { meta: ctx.meta().into_iter().collect(), fit: fit.to_json() };
    let mut text = serde_json::to_string_pretty(&out).expect("fit serializes");
    text.push('\n');
    ctx.write_raw("var/fit.json", &text)?;
    ctx.write("var/table.csv", &render_csv(&rows))?;
    ctx.write("var/table.txt", &render_text(&rows))?;
    ctx.write("var/table.tex", &render_latex(&rows))
}

fn load_game(cfg: &RunConfig, sc: &SimulateConfig) -> Result<GroupGame> {
    match (&sc.game, &sc.fit) {
        (Some(g), _) => {
            let path = cfg.resolve(g);
            let text = fs::read_to_string(&path).map_err(|e| CliError::read(&path, e))?;
            let gc: GameConfig =
                serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            Ok(GroupGame::from_config(&gc).map_err(|e| CliError::from(e).in_file(&path))?)
        }
        (None, Some(f)) => {
            let path = cfg.resolve(f);
            let text = fs::read_to_string(&path).map_err(|e| CliError::read(&path, e))?;
            let fj: FitJson =
                serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            if fj.p != 1 {
                return Err(CliError::input(format!("{}: a fit converts to a game only with one lag, found {}", path.display(), fj.p)));
            }
            let coef = fj.value.to_coefficients()?;
            let mut game = GroupGame::from_var_params(&coef.constants, &coef.lags[0])?;
            game.group_names = fj.variables;
            Ok(game)
        }
        (None, None) => Err(CliError::input("simulate needs a game file or a one-lag fit")),
    }
}

pub fn simulate(ctx: &Ctx) -> Result<String> {
    let sc = ctx.cfg.simulate.clone().ok_or_else(|| CliError::input("config has no [simulate] section"))?;
    let game = load_game(&ctx.cfg, &sc)?;
    let n = game.groups();
    let a0 = match &sc.a0 {
        Some(v) if v.len() == n => DVector::from_vec(v.clone()),
        Some(v) => return Err(CliError::input(format!("a0 has {} entries, game has {n} groups", v.len()))),
        None => DVector::zeros(n),
    };
    let traj = game.simulate(&a0, sc.steps);

    let mut csv = String::from("t");
    for g in &game.group_names {
        let _ = write!(csv, ",{g}");
    }
    csv.push('\n');
    for (t, a) in traj.actions.iter().enumerate() {
        let _ = write!(csv, "{t}");
        for x in a.iter() {
            let _ = write!(csv, ",{x}");
        }
        csv.push('\n');
    }
    ctx.write("sim/trajectory.csv", &csv)?;

    let mut report = String::new();
    let radius = game.spectral_radius();
    let _ = writeln!(report, "spectral radius: {radius}");
    match game.steady_state()? {
        SteadyState::Stable { point, .. } => {
            let _ = writeln!(report, "steady state:");
            for (g, x) in game.group_names.iter().zip(point.iter()) {
                let _ = writeln!(report, "  {g}: {x}");
            }
        }
        SteadyState::Divergent { .. } => {
            let _ = writeln!(report, "steady state: divergent");
        }
    }
    if traj.diverged {
        let _ = writeln!(report, "trajectory stopped after {} steps: values left the finite range", traj.actions.len() - 1);
    }
    ctx.write("sim/report.txt", &report)?;
    Ok(report)
}

pub fn report(ctx: &Ctx) -> Result<String> {
    let mut msg = String::new();
    if ctx.cfg.corpus.is_some() {
        msg += &count(ctx)?;
        msg += &index(ctx)?;
    }
    if ctx.cfg.panel.is_some() {
        msg += &panel(ctx)?;
    }
    if ctx.cfg.var.as_ref().is_some_and(|v| v.panel.is_some()) || ctx.cfg.panel.is_some() {
        msg += &estimate(ctx)?;
    }
    if ctx.cfg.simulate.is_some() {
        msg += &simulate(ctx)?;
    }
    if msg.is_empty() {
        return Err(CliError::input("config enables no stage"));
    }
    Ok(msg)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stems_are_safe() {
        assert_eq!(file_stem("Le Monde"), "Le_Monde");
        assert_eq!(file_stem("El País"), "El_País");
        assert_eq!(file_stem("a/b"), "a_b");
        assert_eq!(file_stem(".."), "_..");
        assert_eq!(file_stem(""), "_");
    }

    #[test]
    fn colliding_stems_rejected() {
        let names = ["a b".to_string(), "a/b".to_string()];
        assert!(stems(names.iter()).is_err());
    }
}
