use std::io::Write;

use hcrevenue::algos::{Algorithm, MubSolver};
use hcrevenue::Weight;

use crate::error::CliResult;

pub const HEADER: [&str; 9] = ["instance", "n", "algo", "solver", "seed", "revenue", "opt", "ratio", "ms"];

/// One trial of one algorithm on one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub instance: String,
    pub n: usize,
    pub algo: Algorithm,
    pub solver: Option<MubSolver>,
    /// Per-trial seed; `None` for deterministic algorithms.
    pub seed: Option<u64>,
    pub revenue: Weight,
    pub opt: Option<Weight>,
    pub ms: f64,
}

impl ExperimentRecord {
    /// `revenue / opt`, present exactly when the optimum is. A zero optimum
    /// (no edges) counts as ratio 1.
    pub fn ratio(&self) -> Option<f64> {
        self.opt.map(|opt| self.revenue.ratio(opt).unwrap_or(1.0))
    }

    fn fields(&self) -> [String; 9] {
        [
            self.instance.clone(),
            self.n.to_string(),
            self.algo.name().to_string(),
            self.solver.map(|s| s.name().to_string()).unwrap_or_default(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.revenue.to_string(),
            self.opt.map(|o| o.to_string()).unwrap_or_default(),
            self.ratio().map(|r| format!("{r:.6}")).unwrap_or_default(),
            format!("{:.3}", self.ms),
        ]
    }
}

/// Writes the header and then every record, in the given order.
pub fn write_records<W: Write>(out: W, records: &[ExperimentRecord]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
