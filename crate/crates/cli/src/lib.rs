//! The `contourwms` command line: contour extraction, ramp SLD generation,
//! one-shot rendering and the HTTP server.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;
use tracing::info;

use contourwms::contour::{
    compute_levels, extract_contours, format_level, generate_ramp_sld_for, parse_ascii_grid, ContourSpec, GridError,
    LabelMode, LevelError, RampError, DEFAULT_RAMP_LAYER,
};
use contourwms::geojson::to_geojson;
use contourwms::model::ColorError;
use contourwms::sld::serialize_sld;
use contourwms::wms::{load_config, ConfigError, Service};
use contourwms::Color;

pub mod server;

pub const CONFIG_ENV: &str = "CONTOUR_WMS_CONFIG";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Level(#[from] LevelError),
    #[error(transparent)]
    Ramp(#[from] RampError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid color: {0}")]
    Color(#[from] ColorError),
    #[error("invalid level {0:?}")]
    InvalidLevel(String),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("request failed with status {status}:\n{body}")]
    Wms { status: u16, body: String },
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: String, source: std::io::Error },
    #[error("server error: {0}")]
    Serve(std::io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "contourwms", version, about = "Multicolor elevation contour maps over WMS")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract contour lines from an ESRI ASCII grid into GeoJSON.
    Contour {
        dem: PathBuf,
        #[arg(long)]
        base: f64,
        #[arg(long)]
        interval: f64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Generate a color-ramp SLD with one rule per contour level.
    GenSld(GenSldArgs),
    /// Answer one WMS KVP request locally and write the response body.
    Render {
        #[command(flatten)]
        config: ConfigArg,
        /// KVP query string, e.g. `REQUEST=GetMap&LAYERS=contours&...`.
        query: String,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Run the HTTP server.
    Serve {
        #[command(flatten)]
        config: ConfigArg,
        /// Overrides the port from the config.
        #[arg(long)]
        port: Option<u16>,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    #[arg(long = "config", env = CONFIG_ENV, default_value = "config.json")]
    pub path: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct GenSldArgs {
    /// Comma-separated ascending levels.
    #[arg(long)]
    pub levels: String,
    #[arg(long, default_value = "#0000FF")]
    pub start: String,
    #[arg(long, default_value = "#FF0000")]
    pub end: String,
    /// `index-only` or `all`.
    #[arg(long, default_value = "index-only")]
    pub label_mode: String,
    #[arg(long, default_value = DEFAULT_RAMP_LAYER)]
    pub layer: String,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_levels(csv: &str) -> Result<Vec<f64>, CliError> {
    csv.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| CliError::InvalidLevel(s.to_string())))
        .collect()
}

fn parse_color(s: &str) -> Result<Color, CliError> {
    Ok(Color::parse_wms(s)?)
}

/// The ramp SLD as XML text. Shared by `gen-sld` and the `/gen-sld` endpoint.
pub fn gen_sld_xml(levels: &str, start: &str, end: &str, label_mode: &str, layer: &str) -> Result<String, CliError> {
    let levels = parse_levels(levels)?;
    let mode: LabelMode = label_mode.parse()?;
    let doc = generate_ramp_sld_for(layer, &levels, parse_color(start)?, parse_color(end)?, mode)?;
    Ok(serialize_sld(&doc))
}

/// Extracts contours and writes GeoJSON. Returns the levels and feature count.
pub fn cmd_contour(dem: &Path, base: f64, interval: f64, out: &Path) -> Result<(Vec<f64>, usize), CliError> {
    let grid = parse_ascii_grid(dem)?;
    let spec = ContourSpec::new(base, interval)?;
    let levels = match grid.value_range() {
        Some((lo, hi)) => compute_levels(lo, hi, spec),
        None => Vec::new(),
    };
    let fc = extract_contours(&grid, &levels);
    write_file(out, to_geojson(&fc).as_bytes())?;
    info!(features = fc.len(), out = %out.display(), "wrote contours");
    Ok((levels, fc.len()))
}

/// Runs one KVP request through the same service code as the HTTP server.
pub fn cmd_render(config: &Path, query: &str, out: &Path) -> Result<(), CliError> {
    let loaded = load_config(config)?;
    let service = Service::from_config(&loaded);
    let resp = service.handle_get(query.trim_start_matches('?'));
    if !(resp.status == 200 && resp.is_png()) && resp.content_type != contourwms::wms::CAPABILITIES_CONTENT_TYPE {
        return Err(CliError::Wms {
            status: resp.status,
            body: String::from_utf8_lossy(&resp.body).into_owned(),
        });
    }
    write_file(out, &resp.body)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Contour {
            dem,
            base,
            interval,
            out,
        } => {
            let (levels, n) = cmd_contour(&dem, base, interval, &out)?;
            let joined: Vec<String> = levels.iter().map(|l| format_level(*l)).collect();
            println!("levels: {}", joined.join(" "));
            println!("features: {n}");
            Ok(())
        }
        Command::GenSld(a) => {
            let xml = gen_sld_xml(&a.levels, &a.start, &a.end, &a.label_mode, &a.layer)?;
            match &a.out {
                Some(path) => write_file(path, xml.as_bytes()),
                None => {
                    println!("{xml}");
                    Ok(())
                }
            }
        }
        Command::Render { config, query, out } => cmd_render(&config.path, &query, &out),
        Command::Serve { config, port, host } => server::serve(&config.path, &host, port),
    }
}
