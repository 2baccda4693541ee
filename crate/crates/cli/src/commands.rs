//! The four commands: analyze, npt, mst, synth. Each takes a resolved
//! [`RunConfig`], writes its files under the output directory and
//! returns the paths written.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use plcsnet::{
    build_graph, gamma_recovery, load_panel, mst, npt, plcs_matrix, robustness_experiment,
    ud_matrix, AnalysisWindow, Channel, FitResult, PairMatrix, PlcsConfig, SeriesPanel,
    SynthKind, SynthSpec, RECOVERY_TARGETS,
};

use crate::config::{OutputFormat, RunConfig};
use crate::output;
use crate::CliError;

fn open_panel(cfg: &RunConfig) -> Result<SeriesPanel, CliError> {
    let path = cfg.input_path()?;
    let file = File::open(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    load_panel(BufReader::new(file)).map_err(|source| CliError::InFile {
        path: path.to_owned(),
        source,
    })
}

fn resolve_window(cfg: &RunConfig, panel: &SeriesPanel) -> Result<AnalysisWindow, CliError> {
    let (start, end) = match cfg.window {
        Some(w) => w,
        None => (panel.periods()[0], *panel.periods().last().unwrap()),
    };
    Ok(AnalysisWindow::new(start, end)?)
}

fn plcs_config(cfg: &RunConfig) -> PlcsConfig {
    PlcsConfig {
        tail: cfg.tail,
        ..PlcsConfig::default()
    }
}

fn ensure_out_dir(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out_dir).map_err(|source| CliError::Io {
        path: cfg.out_dir.clone(),
        source,
    })
}

fn window_tag(w: AnalysisWindow) -> String {
    format!("{}-{}", w.start(), w.end())
}

fn write(path: PathBuf, content: &str, written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    output::write_atomic(&path, content.as_bytes())?;
    written.push(path);
    Ok(())
}

/// Classify every pair and emit matrices and fit diagnostics.
pub fn cmd_analyze(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let panel = open_panel(cfg)?;
    let window = resolve_window(cfg, &panel)?;
    let sub = panel.window(window)?;
    let pcfg = plcs_config(cfg);
    let fits = plcs_matrix(&sub, &pcfg)?;
    let dists = ud_matrix(&sub, cfg.ud_variant)?;

    ensure_out_dir(cfg)?;
    let tag = window_tag(window);
    let dir = &cfg.out_dir;
    let mut written = Vec::new();

    if cfg.formats.contains(&OutputFormat::MatrixCsv) {
        let gamma = fits.map(|f| f.gamma);
        let beta = fits.map(|f| f.beta);
        write(
            dir.join(format!("gamma-{tag}.csv")),
            &output::matrix_csv(&gamma),
            &mut written,
        )?;
        write(
            dir.join(format!("beta-{tag}.csv")),
            &output::matrix_csv(&beta),
            &mut written,
        )?;
        write(
            dir.join(format!("ud-{}-{tag}.csv", cfg.ud_variant.label())),
            &output::matrix_csv(&dists),
            &mut written,
        )?;
    }
    if cfg.formats.contains(&OutputFormat::PairsJson) {
        write(
            dir.join(format!("pairs-{tag}.json")),
            &output::pairs_json(&fits, &dists, window, &pcfg, cfg.ud_variant),
            &mut written,
        )?;
    }
    if cfg.formats.contains(&OutputFormat::LoglogCsv) {
        write(
            dir.join(format!("loglog-{tag}.csv")),
            &output::loglog_csv(&sub, &pcfg)?,
            &mut written,
        )?;
    }
    if written.is_empty() {
        return Err(CliError::Usage(
            "analyze writes none of the requested formats; \
             pick from matrix-csv, pairs-json, loglog-csv"
                .into(),
        ));
    }
    Ok(written)
}

fn channel_graph(
    channel: Channel,
    fits: Option<&PairMatrix<FitResult>>,
    dists: &PairMatrix<f64>,
) -> Result<plcsnet::WeightedGraph, CliError> {
    let g = match channel {
        Channel::Gamma => build_graph(fits.expect("fit matrix computed"), |f| f.gamma)?,
        Channel::Beta => build_graph(fits.expect("fit matrix computed"), |f| f.beta)?,
        Channel::Ud => build_graph(dists, |&d| d)?,
    };
    Ok(g)
}

fn write_graph_files(
    g: &plcsnet::WeightedGraph,
    stem: &str,
    attrs: &[(&str, String)],
    cfg: &RunConfig,
    dir: &Path,
    written: &mut Vec<PathBuf>,
) -> Result<(), CliError> {
    if cfg.formats.contains(&OutputFormat::Dot) {
        write(
            dir.join(format!("{stem}.dot")),
            &output::dot_string(g, attrs),
            written,
        )?;
    }
    if cfg.formats.contains(&OutputFormat::Graphml) {
        write(
            dir.join(format!("{stem}.graphml")),
            &output::graphml_string(g, stem),
            written,
        )?;
    }
    Ok(())
}

/// One percolation-threshold network per requested preference.
pub fn cmd_npt(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let panel = open_panel(cfg)?;
    let window = resolve_window(cfg, &panel)?;
    let sub = panel.window(window)?;
    let pcfg = plcs_config(cfg);

    let need_fits = cfg
        .preferences
        .iter()
        .any(|p| p.channel() != Channel::Ud);
    let fits = if need_fits {
        Some(plcs_matrix(&sub, &pcfg)?)
    } else {
        None
    };
    let dists = ud_matrix(&sub, cfg.ud_variant)?;

    ensure_out_dir(cfg)?;
    let tag = window_tag(window);
    let mut written = Vec::new();
    for &pref in &cfg.preferences {
        let g = match pref.channel() {
            Channel::Ud => channel_graph(Channel::Ud, None, &dists)?,
            ch => channel_graph(ch, fits.as_ref(), &dists)?,
        };
        let net = npt(&g, pref)?;
        let stem = format!("{}-{tag}", pref.label());
        let attrs = [
            ("analysis", "npt".to_string()),
            ("preference", pref.label().to_string()),
            ("channel", output::channel_label(pref.channel()).to_string()),
            ("window", tag.clone()),
        ];
        write_graph_files(&net.graph, &stem, &attrs, cfg, &cfg.out_dir, &mut written)?;
        write(
            cfg.out_dir.join(format!("{stem}.json")),
            &output::summary_json(&output::npt_summary(&net, window)),
            &mut written,
        )?;
    }
    Ok(written)
}

/// Minimum spanning tree on the distance channel.
pub fn cmd_mst(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let panel = open_panel(cfg)?;
    let window = resolve_window(cfg, &panel)?;
    let sub = panel.window(window)?;
    let dists = ud_matrix(&sub, cfg.ud_variant)?;
    let g = build_graph(&dists, |&d| d)?;
    let tree = mst(&g)?;

    ensure_out_dir(cfg)?;
    let tag = window_tag(window);
    let stem = format!("mst-{tag}");
    let attrs = [
        ("analysis", "mst".to_string()),
        ("channel", format!("ud-{}", cfg.ud_variant.label())),
        ("window", tag.clone()),
    ];
    let mut written = Vec::new();
    write_graph_files(&tree, &stem, &attrs, cfg, &cfg.out_dir, &mut written)?;
    write(
        cfg.out_dir.join(format!("{stem}.json")),
        &output::summary_json(&output::mst_summary(&tree, window)),
        &mut written,
    )?;
    Ok(written)
}

/// Robustness report and class-recovery fixture.
pub fn cmd_synth(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let base = SynthSpec {
        kind: SynthKind::NoisyLinear,
        scale: cfg.scale,
        len: cfg.len,
        noise_sigma: 0.0,
        seed: cfg.seed,
    };
    let report = robustness_experiment(&cfg.sigmas, cfg.trials, &base)?;
    let recovery = gamma_recovery(&RECOVERY_TARGETS, cfg.len, &plcs_config(cfg))?;

    ensure_out_dir(cfg)?;
    let mut written = Vec::new();
    write(
        cfg.out_dir.join("robustness.csv"),
        &output::robustness_csv(&report),
        &mut written,
    )?;
    write(
        cfg.out_dir.join("recovery.csv"),
        &output::recovery_csv(&recovery),
        &mut written,
    )?;
    Ok(written)
}

/// Dispatch a parsed command line.
pub fn run(cli: &crate::config::Cli) -> Result<Vec<PathBuf>, CliError> {
    let cfg = cli.command.args().resolve()?;
    match cli.command {
        crate::config::Command::Analyze(_) => cmd_analyze(&cfg),
        crate::config::Command::Npt(_) => cmd_npt(&cfg),
        crate::config::Command::Mst(_) => cmd_mst(&cfg),
        crate::config::Command::Synth(_) => cmd_synth(&cfg),
    }
}
