use serde::{Deserialize, Serialize};

/// A sensor's offloading task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub data_bits: f64,
    /// Gas attached to the task-publishing contract.
    pub gas: f64,
    pub power_w: f64,
    /// Ergodic secrecy rate of the uplink, bit/s/Hz.
    pub ergodic_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Server {
    /// CPU cycles per second `f_k`.
    pub cycles_per_sec: f64,
    /// CPU cycles per processed bit `c_k`.
    pub cycles_per_bit: f64,
    /// Energy efficiency coefficient `η_k` (J·s²/cycle³).
    pub energy_coeff: f64,
}

impl Server {
    /// Computing power `f_k / c_k` (bits per second), the ranking key.
    pub fn computing_power(&self) -> f64 {
        self.cycles_per_sec / self.cycles_per_bit
    }
}

/// Energy to upload and compute `task` on `server`:
/// `η c D f² + D P / (R̄ B)`.
///
/// Computing takes `cD/f` seconds at `ηf³` watts; uploading takes
/// `D/(R̄B)` seconds at `P` watts. A zero ergodic rate makes the upload
/// impossible and the cost infinite.
pub fn offload_energy(task: &Task, server: &Server, bandwidth_hz: f64) -> f64 {
    if task.data_bits == 0.0 {
        return 0.0;
    }
    let compute = server.energy_coeff * server.cycles_per_bit * task.data_bits * server.cycles_per_sec.powi(2);
    if task.ergodic_rate <= 0.0 {
        return f64::INFINITY;
    }
    compute + task.data_bits * task.power_w / (task.ergodic_rate * bandwidth_hz)
}
