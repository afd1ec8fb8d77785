//! Trajectory CSV.
//!
//! Header `t,x,x_dot,theta,theta_dot,u,F_net`, then one row per update with
//! every value in scientific notation with 17 significant digits, each row
//! terminated by `\n`. Values parse back to the identical `f64`.

use std::fmt::Write as _;

use crate::dynamics::State;
use crate::simulate::Sample;

pub const HEADER: &str = "t,x,x_dot,theta,theta_dot,u,F_net";

pub fn write_trajectory(samples: &[Sample]) -> String {
    let mut out = String::with_capacity(samples.len() * 7 * 24 + HEADER.len() + 1);
    out.push_str(HEADER);
    out.push('\n');
    for s in samples {
        let fields = [
            s.t,
            s.state.x,
            s.state.x_dot,
            s.state.theta,
            s.state.theta_dot,
            s.command,
            s.net_force,
        ];
        for (i, v) in fields.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v:.16e}");
        }
        out.push('\n');
    }
    out
}

/// Parse a trajectory CSV. Errors name the first offending line (1-based,
/// header is line 1).
pub fn parse_trajectory(text: &str) -> Result<Vec<Sample>, String> {
    let mut lines = text.lines();
    match lines.next() {
        None => return Err("empty file: missing header".into()),
        Some(h) if h.trim_end_matches('\r') != HEADER => {
            return Err(format!("line 1: expected header `{HEADER}`, found `{h}`"))
        }
        Some(_) => {}
    }
    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line.trim_end_matches('\r');
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(format!(
                "line {lineno}: expected 7 fields, found {}",
                fields.len()
            ));
        }
        let mut v = [0.0; 7];
        for (slot, field) in v.iter_mut().zip(&fields) {
            *slot = field
                .trim()
                .parse()
                .map_err(|_| format!("line {lineno}: `{field}` is not a number"))?;
        }
        samples.push(Sample {
            t: v[0],
            state: State::new(v[1], v[2], v[3], v[4]),
            command: v[5],
            net_force: v[6],
        });
    }
    if samples.is_empty() {
        return Err("no data rows".into());
    }
    Ok(samples)
}
