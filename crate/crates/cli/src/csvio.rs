//! CSV emission for iteration traces and batch summaries. Floats are written
//! with 17 significant digits so files round-trip f64 exactly and stay
//! byte-identical across re-runs.

use std::io::{self, Write};

use nsmo_core::{RunRecord, RunStatus};

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// `iter,f1..fm,direction_norm,step_size,pdd_inner,pns_calls`
pub fn trace_header(m: usize) -> String {
    let mut cols = vec!["iter".to_string()];
    cols.extend((1..=m).map(|i| format!("f{i}")));
    cols.extend(["direction_norm", "step_size", "pdd_inner", "pns_calls"].map(String::from));
    cols.join(",")
}

/// One row per outer iteration; the final row carries the terminal direction
/// norm with a zero step size.
pub fn write_trace<W: Write>(w: &mut W, record: &RunRecord) -> io::Result<()> {
    writeln!(w, "{}", trace_header(record.num_objectives()))?;
    for k in 0..record.rows() {
        let mut row = vec![k.to_string()];
        row.extend(record.objective_values[k].iter().map(|&v| format_float(v)));
        row.push(format_float(record.direction_norms[k]));
        row.push(format_float(record.step_sizes[k]));
        row.push(record.pdd_inner_counts[k].to_string());
        row.push(record.pns_call_counts[k].to_string());
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn trace_to_string(record: &RunRecord) -> String {
    let mut buf = Vec::new();
    write_trace(&mut buf, record).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

/// Per-run line of a batch summary.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub start: usize,
    pub seed: u64,
    pub status: RunStatus,
    pub iterations: usize,
    pub final_objectives: Vec<f64>,
}

/// `start,seed,status,iterations,f1..fm`
pub fn summary_header(m: usize) -> String {
    let mut cols = ["start", "seed", "status", "iterations"]
        .map(String::from)
        .to_vec();
    cols.extend((1..=m).map(|i| format!("f{i}")));
    cols.join(",")
}

pub fn write_summary<W: Write>(w: &mut W, m: usize, rows: &[SummaryRow]) -> io::Result<()> {
    writeln!(w, "{}", summary_header(m))?;
    for r in rows {
        let mut cols = vec![
            r.start.to_string(),
            r.seed.to_string(),
            r.status.to_string(),
            r.iterations.to_string(),
        ];
        cols.extend(r.final_objectives.iter().map(|&v| format_float(v)));
        writeln!(w, "{}", cols.join(","))?;
    }
    Ok(())
}
