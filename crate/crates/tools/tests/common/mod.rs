#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mss_core::CurveFamily;
use mss_tools::CurveSpec;

pub fn mss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mss")).args(args).output().expect("run mss")
}

pub fn repo_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

pub fn write_spec(dir: &Path, name: &str, family: &CurveFamily) -> PathBuf {
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, CurveSpec::from_family(name, family).to_json()).unwrap();
    path
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
