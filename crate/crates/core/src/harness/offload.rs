use rayon::prelude::*;

use crate::allocation::{
    bidding_allocate, ecm_allocate, group_allocate, max_dissatisfaction, proposed_allocate, Matching, RankedInstance,
    Scheme, Server, Task,
};
use crate::channel::{path_loss, Dimensions, LinkBudget};
use crate::error::{Error, Result};
use crate::harness::{Cell, ExperimentConfig, Table, RB_BANDWIDTH_HZ};
use crate::ledger::{digest, Ledger, RecordKind};
use crate::manifold::OptimizerSettings;
use crate::rng::{domain, SeedStream, StreamRng};
use crate::secrecy::{ergodic_secrecy_rate, gamma_fit, GainPool, GammaFit};

const TAG_OFFLOAD: u64 = 0x6f66_666c;
const TAG_POOL: u64 = 0x706f_6f6c;

/// Population draws per trial before giving up on finding every sensor a
/// positive secrecy rate.
const MAX_REDRAWS: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sweep {
    RbCount,
    NIrs,
    CPerBit,
    Epsilon,
}

impl Sweep {
    pub const ALL: [Sweep; 4] = [Sweep::RbCount, Sweep::NIrs, Sweep::CPerBit, Sweep::Epsilon];

    pub fn name(self) -> &'static str {
        match self {
            Sweep::RbCount => "rb_count",
            Sweep::NIrs => "n_irs",
            Sweep::CPerBit => "c_per_bit",
            Sweep::Epsilon => "epsilon",
        }
    }

    fn values(self, cfg: &ExperimentConfig) -> Vec<f64> {
        match self {
            Sweep::RbCount => cfg.rb_values.iter().map(|&v| v as f64).collect(),
            Sweep::NIrs => cfg.n_irs_values.iter().map(|&v| v as f64).collect(),
            Sweep::CPerBit => cfg.c_values.clone(),
            Sweep::Epsilon => match &cfg.epsilon_values {
                Some(v) => v.iter().map(|&e| e as f64).collect(),
                None => (0..cfg.n_sensors).map(|e| e as f64).collect(),
            },
        }
    }

    fn cell(self, value: f64) -> Cell {
        match self {
            Sweep::CPerBit => Cell::Real(value),
            _ => Cell::Int(value as i64),
        }
    }
}

/// One trial at one sweep value; arrays follow [`Scheme::ALL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffloadInstance {
    pub value_index: usize,
    pub run: usize,
    pub energy: [f64; 4],
    pub max_dissatisfaction: [usize; 4],
}

impl OffloadInstance {
    pub fn energy_of(&self, scheme: Scheme) -> f64 {
        self.energy[scheme_index(scheme)]
    }

    pub fn dissatisfaction_of(&self, scheme: Scheme) -> usize {
        self.max_dissatisfaction[scheme_index(scheme)]
    }
}

fn scheme_index(scheme: Scheme) -> usize {
    Scheme::ALL.iter().position(|&s| s == scheme).expect("scheme listed")
}

#[derive(Debug, Clone, PartialEq)]
pub struct OffloadReport {
    pub sweep: Sweep,
    pub values: Vec<f64>,
    /// Means over trials per `(value, scheme)`.
    pub table: Table,
    pub instances: Vec<OffloadInstance>,
    /// Populations discarded because some sensor had zero secrecy rate.
    pub redraws: usize,
    pub ledgers_verified: usize,
    pub ledger_records: usize,
    /// Ledger of the first trial at the first sweep value.
    pub sample_ledger: Ledger,
}

impl OffloadReport {
    /// Mean total energy per sweep value for one scheme.
    pub fn mean_energy(&self, scheme: Scheme) -> Vec<f64> {
        let mut sums = vec![0.0; self.values.len()];
        let mut counts = vec![0usize; self.values.len()];
        for inst in &self.instances {
            sums[inst.value_index] += inst.energy_of(scheme);
            counts[inst.value_index] += 1;
        }
        sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect()
    }
}

struct Population {
    distance: Vec<f64>,
    eve_distance: Vec<f64>,
    data_bits: Vec<f64>,
    gas: Vec<f64>,
    cycles_per_sec: Vec<f64>,
}

impl Population {
    fn draw(cfg: &ExperimentConfig, rng: &mut StreamRng) -> Self {
        let n = cfg.n_sensors;
        let distance: Vec<f64> = (0..n).map(|_| cfg.distances_m.sample(rng)).collect();
        let eve_distance = match &cfg.eve_distances_m {
            Some(r) => (0..n).map(|_| r.sample(rng)).collect(),
            None => distance.clone(),
        };
        Self {
            distance,
            eve_distance,
            data_bits: (0..n).map(|_| cfg.d_range.sample(rng)).collect(),
            gas: (0..n).map(|_| cfg.gas_range.sample(rng)).collect(),
            cycles_per_sec: (0..cfg.n_servers).map(|_| cfg.f_range_hz.sample(rng)).collect(),
        }
    }
}

/// Shared `C̄_m` pool and Gamma fit for one IRS size.
struct SecrecyModel {
    n_irs: usize,
    pool: GainPool,
    fit: GammaFit,
}

impl SecrecyModel {
    fn rates(&self, cfg: &ExperimentConfig, pop: &Population) -> Result<Vec<f64>> {
        pop.distance
            .iter()
            .zip(&pop.eve_distance)
            .map(|(&d, &d_e)| {
                let budget = LinkBudget {
                    alpha: path_loss(d, cfg.carrier_hz)?,
                    alpha_e: path_loss(d_e, cfg.carrier_hz)?,
                    power_w: cfg.power_w(),
                    noise_w: cfg.noise_w(),
                    noise_e_w: cfg.noise_w(),
                    bandwidth_hz: cfg.bandwidth_hz(),
                };
                let c_m = self.pool.ergodic_capacity(budget.main_snr());
                ergodic_secrecy_rate(c_m, &self.fit, &budget)
            })
            .collect()
    }
}

struct TrialOutcome {
    instances: Vec<OffloadInstance>,
    redraws: usize,
    ledger_records: usize,
    first_ledger: Option<Ledger>,
}

/// Averages every allocation scheme over `runs` random populations at each
/// value of `sweep`.
///
/// Trial `r` draws its population from stream `r` and reuses it at every
/// sweep value, so differences between values are not masked by
/// population noise. Populations with a zero secrecy rate anywhere are
/// redrawn and counted. The proposed scheme's contracts are written to a
/// fresh ledger per trial and value, which must verify.
pub fn run_offload_experiments(cfg: &ExperimentConfig, sweep: Sweep) -> Result<OffloadReport> {
    cfg.validate()?;
    let values = sweep.values(cfg);
    if values.is_empty() {
        return Err(Error::Config(format!("no values to sweep for {}", sweep.name())));
    }
    let runs = if sweep == Sweep::Epsilon { cfg.epsilon_runs } else { cfg.runs };
    let root = SeedStream::new(cfg.master_seed);
    let seeds = root.child(TAG_OFFLOAD);

    let n_irs_list: Vec<usize> = if sweep == Sweep::NIrs {
        cfg.n_irs_values.clone()
    } else {
        vec![cfg.dims.n_irs]
    };
    let models = n_irs_list
        .iter()
        .map(|&n_irs| {
            let dims = Dimensions::new(n_irs, cfg.dims.n_bs, cfg.dims.n_eve)?;
            let pool_seeds = root.child(TAG_POOL).child(((n_irs as u64) << 32) | cfg.dims.n_bs as u64);
            Ok(SecrecyModel {
                n_irs,
                pool: GainPool::rayleigh(pool_seeds, dims, &OptimizerSettings::for_elements(n_irs), cfg.capacity_draws)?,
                fit: gamma_fit(cfg.dims.n_eve, n_irs)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let outcomes: Vec<TrialOutcome> = (0..runs)
        .into_par_iter()
        .map(|run| run_trial(cfg, sweep, &values, &models, &seeds, run))
        .collect::<Result<_>>()?;

    let mut instances = Vec::with_capacity(runs * values.len());
    let mut redraws = 0;
    let mut ledger_records = 0;
    let mut sample_ledger = None;
    for outcome in outcomes {
        instances.extend(outcome.instances);
        redraws += outcome.redraws;
        ledger_records += outcome.ledger_records;
        if sample_ledger.is_none() {
            sample_ledger = outcome.first_ledger;
        }
    }

    let mut table = Table::new(&[
        "sweep",
        "value",
        "scheme",
        "runs",
        "mean_total_energy_j",
        "mean_max_dissatisfaction",
        "worst_max_dissatisfaction",
    ]);
    for (v, &value) in values.iter().enumerate() {
        for (s, scheme) in Scheme::ALL.iter().enumerate() {
            let rows: Vec<&OffloadInstance> = instances.iter().filter(|i| i.value_index == v).collect();
            let m = rows.len() as f64;
            table.push(vec![
                sweep.name().into(),
                sweep.cell(value),
                scheme.name().into(),
                rows.len().into(),
                (rows.iter().map(|i| i.energy[s]).sum::<f64>() / m).into(),
                (rows.iter().map(|i| i.max_dissatisfaction[s] as f64).sum::<f64>() / m).into(),
                rows.iter().map(|i| i.max_dissatisfaction[s]).max().unwrap_or(0).into(),
            ]);
        }
    }

    Ok(OffloadReport {
        sweep,
        values,
        table,
        ledgers_verified: instances.len(),
        instances,
        redraws,
        ledger_records,
        sample_ledger: sample_ledger.expect("at least one trial"),
    })
}

fn run_trial(
    cfg: &ExperimentConfig,
    sweep: Sweep,
    values: &[f64],
    models: &[SecrecyModel],
    seeds: &SeedStream,
    run: usize,
) -> Result<TrialOutcome> {
    // Population and rates per IRS size, drawn on first use.
    let mut cache: Vec<Option<(Population, Vec<f64>)>> = (0..models.len()).map(|_| None).collect();
    let mut redraws = 0;
    let mut instances = Vec::with_capacity(values.len());
    let mut ledger_records = 0;
    let mut first_ledger = None;

    for (v, &value) in values.iter().enumerate() {
        let n_irs = if sweep == Sweep::NIrs { value as usize } else { cfg.dims.n_irs };
        let m = models.iter().position(|m| m.n_irs == n_irs).expect("model per IRS size");
        if cache[m].is_none() {
            let mut rng = seeds.rng(domain::POPULATION, run as u64);
            let mut attempts = 0;
            let drawn = loop {
                let pop = Population::draw(cfg, &mut rng);
                let rates = models[m].rates(cfg, &pop)?;
                if rates.iter().all(|&r| r > 0.0) {
                    break (pop, rates);
                }
                attempts += 1;
                if attempts >= MAX_REDRAWS {
                    return Err(Error::Degenerate(format!(
                        "no population with positive secrecy rates after {MAX_REDRAWS} draws (trial {run})"
                    )));
                }
            };
            redraws += attempts;
            cache[m] = Some(drawn);
        }
        let (pop, rates) = cache[m].as_ref().expect("filled above");

        let rb = if sweep == Sweep::RbCount { value } else { cfg.rb_count as f64 };
        let c = if sweep == Sweep::CPerBit { value } else { cfg.c_per_bit };
        let epsilon = if sweep == Sweep::Epsilon { value as usize } else { cfg.epsilon_dissat };

        let power_w = cfg.power_w();
        let tasks: Vec<Task> = (0..cfg.n_sensors)
            .map(|i| Task {
                data_bits: pop.data_bits[i],
                gas: pop.gas[i],
                power_w,
                ergodic_rate: rates[i],
            })
            .collect();
        let servers: Vec<Server> = pop
            .cycles_per_sec
            .iter()
            .map(|&f| Server {
                cycles_per_sec: f,
                cycles_per_bit: c,
                energy_coeff: cfg.eta,
            })
            .collect();
        let ranked = RankedInstance::new(&tasks, &servers, rb * RB_BANDWIDTH_HZ)?;
        let costs = ranked.costs();

        let mut energy = [0.0; 4];
        let mut dissat = [0usize; 4];
        let mut proposed = None;
        for (s, scheme) in Scheme::ALL.iter().enumerate() {
            let matching = match scheme {
                Scheme::Proposed => proposed_allocate(&costs, epsilon)?,
                Scheme::Ecm => ecm_allocate(&costs)?,
                Scheme::Bidding => bidding_allocate(&costs)?,
                Scheme::Group => group_allocate(&costs, cfg.n_groups)?,
            };
            energy[s] = matching.total_energy;
            dissat[s] = max_dissatisfaction(&matching);
            if *scheme == Scheme::Proposed {
                proposed = Some(matching);
            }
        }

        let ledger = record_contracts(&tasks, &costs, &proposed.expect("proposed scheme runs"))?;
        ledger_records += ledger.len();
        if first_ledger.is_none() {
            first_ledger = Some(ledger);
        }
        instances.push(OffloadInstance {
            value_index: v,
            run,
            energy,
            max_dissatisfaction: dissat,
        });
    }
    Ok(TrialOutcome {
        instances,
        redraws,
        ledger_records,
        first_ledger,
    })
}

/// One task-publish record per sensor, then one result-upload record per
/// matched pair, each carrying the sensor's Gas.
fn record_contracts(tasks: &[Task], costs: &crate::allocation::CostMatrix, matching: &Matching) -> Result<Ledger> {
    let mut ledger = Ledger::new();
    for (i, task) in tasks.iter().enumerate() {
        let mut meta = Vec::with_capacity(24);
        meta.extend((i as u64).to_le_bytes());
        meta.extend(task.data_bits.to_bits().to_le_bytes());
        meta.extend(task.gas.to_bits().to_le_bytes());
        ledger.append(RecordKind::TaskPublish, digest(&meta), format!("sensor-{i}"), task.gas)?;
    }
    for (row, &col) in matching.assignment.iter().enumerate() {
        let sensor = costs.row_order()[row];
        let server = costs.col_order()[col];
        let energy = costs.get(row, col).ok_or(Error::Infeasible)?;
        let mut meta = Vec::with_capacity(24);
        meta.extend((sensor as u64).to_le_bytes());
        meta.extend((server as u64).to_le_bytes());
        meta.extend(energy.to_bits().to_le_bytes());
        ledger.append(RecordKind::ResultUpload, digest(&meta), format!("server-{server}"), tasks[sensor].gas)?;
    }
    if !ledger.verify() {
        return Err(Error::Degenerate("contract ledger failed verification".into()));
    }
    Ok(ledger)
}
