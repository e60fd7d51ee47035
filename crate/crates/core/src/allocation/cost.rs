use crate::allocation::{offload_energy, rank_sensors, rank_servers, Server, Task};
use crate::error::{Error, Result};

/// Square energy matrix over Gas-ranked sensors (rows) and compute-ranked
/// servers (columns). `None` marks a forbidden pair (+∞): either outside
/// the dissatisfaction band or an upload that cannot happen.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    entries: Vec<Option<f64>>,
    row_order: Vec<usize>,
    col_order: Vec<usize>,
}

impl CostMatrix {
    /// Builds from row-major entries; non-finite values become `None`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::domain("cost matrix must be square"));
        }
        let entries: Vec<Option<f64>> = rows
            .into_iter()
            .flatten()
            .map(|v| v.is_finite().then_some(v))
            .collect();
        if entries.iter().flatten().any(|v| !(*v > 0.0)) {
            return Err(Error::domain("finite costs must be strictly positive"));
        }
        Ok(Self {
            n,
            entries,
            row_order: (0..n).collect(),
            col_order: (0..n).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.entries[row * self.n + col]
    }

    /// Original sensor index of each ranked row.
    pub fn row_order(&self) -> &[usize] {
        &self.row_order
    }

    /// Original server index of each ranked column.
    pub fn col_order(&self) -> &[usize] {
        &self.col_order
    }

    pub fn finite_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_some()).count()
    }

    /// Copy with every pair `|row − col| > epsilon` forbidden.
    pub fn masked(&self, epsilon: usize) -> CostMatrix {
        let mut out = self.clone();
        for row in 0..self.n {
            for col in 0..self.n {
                if row.abs_diff(col) > epsilon {
                    out.entries[row * self.n + col] = None;
                }
            }
        }
        out
    }

    /// Square block on rows and columns `range`, keeping original orders.
    pub fn block(&self, range: std::ops::Range<usize>) -> CostMatrix {
        let n = range.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in range.clone() {
            for col in range.clone() {
                entries.push(self.get(row, col));
            }
        }
        CostMatrix {
            n,
            entries,
            row_order: self.row_order[range.clone()].to_vec(),
            col_order: self.col_order[range].to_vec(),
        }
    }
}

/// Sensors and servers sorted into rank order, weaker surplus servers
/// dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedInstance {
    pub tasks: Vec<Task>,
    pub servers: Vec<Server>,
    pub sensor_order: Vec<usize>,
    pub server_order: Vec<usize>,
    pub bandwidth_hz: f64,
}

impl RankedInstance {
    pub fn new(tasks: &[Task], servers: &[Server], bandwidth_hz: f64) -> Result<Self> {
        if tasks.is_empty() {
            return Err(Error::Config("at least one sensor is required".into()));
        }
        if !(bandwidth_hz > 0.0) {
            return Err(Error::domain(format!("bandwidth must be > 0, got {bandwidth_hz}")));
        }
        let sensor_order = rank_sensors(tasks);
        let server_order = rank_servers(servers, tasks.len())?;
        Ok(Self {
            tasks: sensor_order.iter().map(|&i| tasks[i]).collect(),
            servers: server_order.iter().map(|&k| servers[k]).collect(),
            sensor_order,
            server_order,
            bandwidth_hz,
        })
    }

    pub fn n(&self) -> usize {
        self.tasks.len()
    }

    /// Unmasked ranked energy matrix.
    pub fn costs(&self) -> CostMatrix {
        let n = self.n();
        let mut entries = Vec::with_capacity(n * n);
        for task in &self.tasks {
            for server in &self.servers {
                let q = offload_energy(task, server, self.bandwidth_hz);
                entries.push(q.is_finite().then_some(q));
            }
        }
        CostMatrix {
            n,
            entries,
            row_order: self.sensor_order.clone(),
            col_order: self.server_order.clone(),
        }
    }
}

/// Ranked energy matrix with pairs beyond dissatisfaction `epsilon` masked.
pub fn build_cost_matrix(tasks: &[Task], servers: &[Server], bandwidth_hz: f64, epsilon: usize) -> Result<CostMatrix> {
    if epsilon >= tasks.len().max(1) {
        return Err(Error::domain(format!(
            "dissatisfaction threshold {epsilon} outside [0, {}]",
            tasks.len().saturating_sub(1)
        )));
    }
    Ok(RankedInstance::new(tasks, servers, bandwidth_hz)?.costs().masked(epsilon))
}
