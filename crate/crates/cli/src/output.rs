//! CSV and JSON writers. Floats go out as `{:.16e}`, enough to round-trip.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use wentzell::solver::{EnergyLedger, Trajectory};
use wentzell::{AssembledOperators, Envelope};

use crate::commands::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt_float(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(&path, e))
}

/// Wraps `body` (an object) with the schema version and command name.
pub fn json_report(command: &str, body: impl Serialize) -> String {
    let mut v = serde_json::to_value(body).expect("reports serialize");
    if let Value::Object(map) = &mut v {
        map.insert("schema_version".into(), SCHEMA_VERSION.into());
        map.insert("command".into(), command.into());
    }
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

/// One row per (step, vertex).
pub fn trajectory_csv(ops: &AssembledOperators, traj: &Trajectory) -> String {
    let mut s = String::from("step,time,node,x,y,boundary,u,xi1,xi2\n");
    let bpos: Vec<Option<usize>> = {
        let mut v = vec![None; ops.dim()];
        for (k, &i) in traj.boundary_vertices.iter().enumerate() {
            v[i] = Some(k);
        }
        v
    };
    let verts = ops.mesh.vertices();
    for (n, (state, react)) in traj.states.iter().zip(&traj.reactions).enumerate() {
        for (i, &u) in state.coeffs.iter().enumerate() {
            let xi2 = bpos[i].map(|k| react.xi2[k]);
            let _ = writeln!(
                s,
                "{n},{},{i},{},{},{},{},{},{}",
                float(traj.times[n]),
                float(verts[i][0]),
                float(verts[i][1]),
                u8::from(bpos[i].is_some()),
                float(u),
                float(react.xi1[i]),
                opt_float(xi2),
            );
        }
    }
    s
}

pub fn ledger_csv(ledger: &EnergyLedger, traj: &Trajectory) -> String {
    let mut s = String::from(
        "step,time,dt,h_norm_sq,v_norm_sq,f_dual,pairing_omega,pairing_gamma,rho,newton_iterations,error\n",
    );
    for (k, r) in ledger.rows.iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            k + 1,
            float(r.time),
            float(r.dt),
            float(r.h_norm_sq),
            float(r.v_norm_sq),
            float(r.f_dual),
            float(r.pairing_omega),
            float(r.pairing_gamma),
            float(r.rho),
            traj.newton_iterations.get(k + 1).copied().unwrap_or(0),
            opt_float(r.error),
        );
    }
    s
}

pub struct EnvelopeRow {
    pub t: f64,
    pub left: f64,
    pub right: f64,
    pub envelope: Envelope,
    pub mollified: Vec<f64>,
}

pub fn envelope_csv(eps: &[f64], rows: &[EnvelopeRow]) -> String {
    let mut s = String::from("t,left,right,lower,upper");
    for e in eps {
        let _ = write!(s, ",mollified_{e}");
    }
    s.push('\n');
    for r in rows {
        let _ = write!(
            s,
            "{},{},{},{},{}",
            float(r.t),
            float(r.left),
            float(r.right),
            float(r.envelope.lo),
            float(r.envelope.hi)
        );
        for m in &r.mollified {
            let _ = write!(s, ",{}", float(*m));
        }
        s.push('\n');
    }
    s
}
