//! Dense dump of the bitangency residual, used to check traced symmetry
//! sets against brute force.

use std::f64::consts::TAU;
use std::fmt::Write;

use mss_core::mss::bitangency_residual;
use mss_core::ParamCurve;

use crate::error::{Result, ToolError};

pub const HEADER: &str = "t1,t2,g";

/// `g(t1, t2)` on the nodes of a `grid_n × grid_n` grid with `t1 < t2`, row
/// by row. Nodes where the normals are parallel are written as `nan`.
pub fn oracle_csv<C: ParamCurve>(curve: &C, grid_n: usize) -> Result<String> {
    if grid_n < 2 {
        return Err(ToolError::Input(format!("oracle grid must have at least 2 nodes, got {grid_n}")));
    }
    let h = TAU / grid_n as f64;
    let mut out = String::with_capacity(grid_n * grid_n * 24);
    out.push_str(HEADER);
    out.push('\n');
    for i in 0..grid_n {
        for j in i + 1..grid_n {
            let (t1, t2) = (i as f64 * h, j as f64 * h);
            match bitangency_residual(curve, t1, t2) {
                Ok(g) if g.is_finite() => writeln!(out, "{t1},{t2},{g}"),
                _ => writeln!(out, "{t1},{t2},nan"),
            }
            .expect("writing to a String");
        }
    }
    Ok(out)
}
