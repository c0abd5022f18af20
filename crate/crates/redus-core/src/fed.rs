//! Deterministic in-process federated learning simulation.
//!
//! One round = broadcast the global model, train locally on every client,
//! average the client models (plain FedAvg, coefficient `1/K`), evaluate on
//! the server-side test set. Clients run sequentially in client-id order;
//! each client's seed derives from (master seed, client id, round), so a
//! parallel scheduler would produce the same result.

use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::nn::{init_model, LayerSpec, MlpModel};
use crate::resample::SampleWeightTable;
use crate::rng::{self, RngStream};
use crate::train::{
    evaluate, train_redus_resumable, train_vanilla, EvalMetrics, TrainConfig, TrainMode,
    TrainingReport,
};
use crate::util::strip_wall_time_fields;

/// Disjoint near-equal shards of a dataset, one per client.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionPlan {
    shards: Vec<Vec<usize>>,
}

impl PartitionPlan {
    pub fn client_count(&self) -> usize {
        self.shards.len()
    }

    pub fn shard(&self, client: usize) -> &[usize] {
        &self.shards[client]
    }

    pub fn shards(&self) -> &[Vec<usize>] {
        &self.shards
    }
}

/// Shuffle all row indices with the seeded stream and deal them into
/// `clients` near-equal shards (sizes differ by at most 1). Random
/// assignment makes each shard's label mix approximate the global one.
/// Shard indices are sorted ascending, so a single shard is the identity
/// view of the dataset.
pub fn partition_iid(data: &Dataset, clients: usize, stream: &RngStream) -> Result<PartitionPlan> {
    if clients == 0 {
        return Err(Error::config("need at least one client"));
    }
    if clients > data.len() {
        return Err(Error::config(format!(
            "cannot partition {} rows across {clients} clients",
            data.len()
        )));
    }
    let mut indices: Vec<usize> = (0..data.len()).collect();
    use rand::seq::SliceRandom;
    indices.shuffle(&mut stream.rng());

    let base = data.len() / clients;
    let remainder = data.len() % clients;
    let mut shards = Vec::with_capacity(clients);
    let mut cursor = 0;
    for k in 0..clients {
        let size = base + usize::from(k < remainder);
        let mut shard: Vec<usize> = indices[cursor..cursor + size].to_vec();
        shard.sort_unstable();
        shards.push(shard);
        cursor += size;
    }
    Ok(PartitionPlan { shards })
}

/// One simulated client: its data shard and whatever it trained last.
#[derive(Debug, Clone)]
pub struct ClientState {
    pub client_id: usize,
    pub data: Dataset,
    pub cfg: TrainConfig,
    pub model: Option<MlpModel>,
    pub reports: Vec<TrainingReport>,
    /// Carried sample-weight table when weights persist across rounds.
    pub table: Option<SampleWeightTable>,
}

impl ClientState {
    pub fn new(client_id: usize, data: Dataset, cfg: TrainConfig) -> Self {
        ClientState {
            client_id,
            data,
            cfg,
            model: None,
            reports: Vec::new(),
            table: None,
        }
    }
}

/// Copy the global model into the client and run local training. With
/// `reset_weights` the sample-weight table restarts uniform at `1/n_i`;
/// otherwise the table carried from the previous round continues updating.
pub fn local_train(state: &mut ClientState, global: &MlpModel, reset_weights: bool) -> Result<()> {
    if global.specs() != state.model.as_ref().map_or(global.specs(), |m| m.specs()) {
        return Err(Error::config("global model shape differs from client model"));
    }
    let model = global.clone();
    match state.cfg.mode {
        TrainMode::Vanilla => {
            let (model, report) = train_vanilla(model, &state.data, &state.cfg)?;
            state.model = Some(model);
            state.reports.push(report);
        }
        TrainMode::Redus => {
            let carried = if reset_weights {
                None
            } else {
                state.table.take()
            };
            let (model, report, table) =
                train_redus_resumable(model, &state.data, &state.cfg, carried)?;
            state.model = Some(model);
            state.reports.push(report);
            state.table = Some(table);
        }
    }
    Ok(())
}

/// Unweighted FedAvg: every output parameter is the arithmetic mean of the
/// client parameters, coefficient `1/K` regardless of shard sizes.
///
/// The mean is computed as `m0 + mean(mk - m0)`, anchored at the first
/// model, so aggregating identical models returns them bit for bit.
pub fn fedavg_aggregate(models: &[MlpModel]) -> Result<MlpModel> {
    let first = models
        .first()
        .ok_or_else(|| Error::config("cannot aggregate zero models"))?;
    for m in &models[1..] {
        if m.specs() != first.specs() {
            return Err(Error::Internal("aggregation shape mismatch".into()));
        }
    }
    if models.len() == 1 {
        return Ok(first.clone());
    }

    let mut flat_first = Vec::with_capacity(first.parameter_count());
    first.for_each_parameter(|p| flat_first.push(p));
    let mut deltas = vec![0.0; flat_first.len()];
    for m in &models[1..] {
        let mut i = 0;
        m.for_each_parameter(|p| {
            deltas[i] += p - flat_first[i];
            i += 1;
        });
    }
    let k = models.len() as f64;
    let mut out = first.clone();
    let mut i = 0;
    out.for_each_parameter_mut(|p| {
        *p = flat_first[i] + deltas[i] / k;
        i += 1;
    });
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundClientMetrics {
    pub client_id: usize,
    pub included_samples_per_epoch: Vec<usize>,
    pub backprops: u64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundMetrics {
    pub round: u32,
    #[serde(rename = "global_acc")]
    pub global_accuracy: f64,
    pub global_loss: f64,
    pub per_client: Vec<RoundClientMetrics>,
    /// Sum of the clients' local training wall times for this round.
    pub summed_client_wall_time_s: f64,
}

#[derive(Debug, Clone)]
pub struct FederatedRun {
    pub rounds: u32,
    /// Global model after each round's aggregation.
    pub snapshots: Vec<MlpModel>,
    pub metrics: Vec<RoundMetrics>,
}

impl FederatedRun {
    pub fn final_model(&self) -> &MlpModel {
        self.snapshots.last().expect("at least one round")
    }

    pub fn final_metrics(&self) -> &RoundMetrics {
        self.metrics.last().expect("at least one round")
    }

    /// JSON serialization with every wall-clock-derived field removed.
    /// Two runs with the same master seed produce identical strings.
    pub fn deterministic_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct View<'a> {
            rounds: u32,
            snapshots: &'a [MlpModel],
            metrics: &'a [RoundMetrics],
        }
        let mut value = serde_json::to_value(View {
            rounds: self.rounds,
            snapshots: &self.snapshots,
            metrics: &self.metrics,
        })
        .map_err(|e| Error::internal(format!("serialize federated run: {e}")))?;
        strip_wall_time_fields(&mut value);
        serde_json::to_string(&value).map_err(|e| Error::internal(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FederatedConfig {
    pub clients: usize,
    pub rounds: u32,
    /// Restart every client's sample weights uniform at each round
    /// (default). When false, weight tables persist across rounds.
    pub reset_weights: bool,
    pub train: TrainConfig,
}

/// Derived seed for one client's local training in one round.
pub fn client_round_seed(master: &RngStream, client_id: usize, round: u32) -> u64 {
    master
        .child_idx("client", client_id as u64)
        .child_idx("round", u64::from(round))
        .seed()
}

/// Full federated simulation: IID-partition the training data, then per
/// round broadcast / locally train all clients / aggregate / evaluate.
pub fn run_rounds(
    data: &Dataset,
    test: &Dataset,
    specs: &[LayerSpec],
    cfg: &FederatedConfig,
    master: &RngStream,
) -> Result<FederatedRun> {
    if cfg.rounds == 0 {
        return Err(Error::config("need at least one round"));
    }
    let plan = partition_iid(data, cfg.clients, &master.child(rng::PARTITION))?;
    let mut clients: Vec<ClientState> = plan
        .shards()
        .iter()
        .enumerate()
        .map(|(id, shard)| Ok(ClientState::new(id, data.subset(shard)?, cfg.train)))
        .collect::<Result<_>>()?;

    let mut global = init_model(specs, &master.child(rng::INIT))?;
    let mut snapshots = Vec::with_capacity(cfg.rounds as usize);
    let mut metrics = Vec::with_capacity(cfg.rounds as usize);

    for round in 0..cfg.rounds {
        let mut per_client = Vec::with_capacity(clients.len());
        for state in clients.iter_mut() {
            state.cfg.seed = client_round_seed(master, state.client_id, round);
            local_train(state, &global, cfg.reset_weights)?;
            let report = state.reports.last().expect("local_train appends");
            per_client.push(RoundClientMetrics {
                client_id: state.client_id,
                included_samples_per_epoch: report
                    .epochs
                    .iter()
                    .map(|e| e.included_samples)
                    .collect(),
                backprops: report.total_backprops,
                wall_time_s: report.total_wall_time_s,
            });
        }
        let local_models: Vec<MlpModel> = clients
            .iter()
            .map(|c| c.model.clone().expect("trained this round"))
            .collect();
        global = fedavg_aggregate(&local_models)?;
        let eval: EvalMetrics = evaluate(&global, test)?;
        let summed_time = per_client.iter().map(|c| c.wall_time_s).sum();
        metrics.push(RoundMetrics {
            round: round + 1,
            global_accuracy: eval.accuracy,
            global_loss: eval.mean_loss,
            per_client,
            summed_client_wall_time_s: summed_time,
        });
        snapshots.push(global.clone());
    }

    Ok(FederatedRun {
        rounds: cfg.rounds,
        snapshots,
        metrics,
    })
}
