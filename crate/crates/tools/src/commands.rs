//! One function per subcommand. Each reads its inputs, writes its outputs
//! (standard output when no path is given) and reports failures as
//! [`ToolError`] for the binary to turn into an exit code.

use std::io::Write;
use std::path::Path;

use mss_core::Config;

use crate::error::{Result, ToolError};
use crate::oracle::oracle_csv;
use crate::report::{AnalysisReport, EventReport};
use crate::settings::{resolve, ConfigFile, GridTarget, Overrides};
use crate::spec::CurveSpec;
use crate::svg::render;

pub fn load_config(path: Option<&Path>, overrides: &Overrides, target: GridTarget) -> Result<Config> {
    let file = path.map(ConfigFile::load).transpose()?;
    resolve(file.as_ref(), overrides, target)
}

pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| ToolError::Write { path: p.into(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                // a closed pipe (e.g. `| head`) is the reader's choice
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => r.map_err(|source| ToolError::Write { path: "<stdout>".into(), source }),
            }
        }
    }
}

pub fn analyze(curve: &Path, u: f64, cfg: &Config, out: Option<&Path>, svg: Option<&Path>) -> Result<()> {
    let spec = CurveSpec::load(curve)?;
    let report = AnalysisReport::build(&spec, u, cfg)?;
    write_output(out, &report.to_json())?;
    if let Some(p) = svg {
        write_output(Some(p), &render(&report))?;
    }
    Ok(())
}

pub fn scan(curve: &Path, u_min: f64, u_max: f64, cfg: &Config, out: Option<&Path>) -> Result<()> {
    if !(u_min < u_max) {
        return Err(ToolError::Input(format!("u_min ({u_min}) must be below u_max ({u_max})")));
    }
    let spec = CurveSpec::load(curve)?;
    let report = EventReport::build(&spec, u_min, u_max, cfg)?;
    write_output(out, &report.to_json())
}

pub fn oracle(curve: &Path, u: f64, cfg: &Config, out: Option<&Path>) -> Result<()> {
    let spec = CurveSpec::load(curve)?;
    let family = spec.to_family()?;
    write_output(out, &oracle_csv(&family.at(u), cfg.grid_n)?)
}

pub fn render_report(report: &Path, out: Option<&Path>) -> Result<()> {
    let text = std::fs::read_to_string(report).map_err(|source| ToolError::Read { path: report.into(), source })?;
    let report = AnalysisReport::parse(&text)?;
    write_output(out, &render(&report))
}
