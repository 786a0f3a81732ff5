//! CSV emission. Fixed formatting: probabilities carry six decimals,
//! percentages two; byte-identical across reruns with the same seed.

use std::fmt::Write as _;

use crate::resource::ResourceRow;
use crate::yield_engine::YieldReport;

pub const YIELD_HEADER: &str = "qec_distance,num_logical,num_spares,error_rate,chips_per_rep,reps,yield_mean_pct,yield_std_pct,analytic_pct,seed";

pub const RESOURCE_HEADER: &str = "qec_distance,num_logical,num_spares,mem_qubits,peri_qubits,total_qubits,mem_overhead_pct,peri_overhead_pct";

pub fn yield_csv(rows: &[YieldReport]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(YIELD_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{:.6},{},{},{:.2},{:.2},{:.2},{}",
            r.distance,
            r.num_logical,
            r.num_spares,
            r.error_rate,
            r.chips_per_rep,
            r.reps,
            r.yield_mean_pct,
            r.yield_std_pct,
            r.analytic_pct,
            r.master_seed
        )
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn resource_csv(rows: &[ResourceRow]) -> String {
    let mut out = String::with_capacity(48 * (rows.len() + 1));
    out.push_str(RESOURCE_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{:.2},{:.2}",
            r.distance,
            r.num_logical,
            r.num_spares,
            r.breakdown.mem_qubits,
            r.breakdown.peri_qubits,
            r.breakdown.total_qubits,
            r.breakdown.mem_overhead_pct,
            r.breakdown.peri_overhead_pct
        )
        .expect("writing to a String cannot fail");
    }
    out
}
