use crate::allocation::{Server, Task};
use crate::error::{Error, Result};

/// Sensor indices by descending Gas; ties keep their original order.
pub fn rank_sensors(tasks: &[Task]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..tasks.len()).collect();
    order.sort_by(|&a, &b| tasks[b].gas.total_cmp(&tasks[a].gas));
    order
}

/// The `keep` strongest servers by descending `f/c`; ties keep their
/// original order.
pub fn rank_servers(servers: &[Server], keep: usize) -> Result<Vec<usize>> {
    if servers.len() < keep {
        return Err(Error::Config(format!(
            "need at least as many servers as sensors ({} < {keep})",
            servers.len()
        )));
    }
    let mut order: Vec<usize> = (0..servers.len()).collect();
    order.sort_by(|&a, &b| servers[b].computing_power().total_cmp(&servers[a].computing_power()));
    order.truncate(keep);
    Ok(order)
}

/// `|r(V_i) − r(f_k/c_k)|` when the pair is assigned, else 0. Ranks are
/// 1-based.
pub fn dissatisfaction(sensor_rank: usize, server_rank: usize, assigned: bool) -> usize {
    if assigned {
        sensor_rank.abs_diff(server_rank)
    } else {
        0
    }
}
