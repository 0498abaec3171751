//! Genie-aided decoder-state analysis and Monte-Carlo density evolution.
//!
//! The analysis layer reads the true signal support to classify nodes — the
//! decoder itself never sees it. At the start of iteration `ell` the variable
//! nodes split into three disjoint sets: `K` (unverified non-zero), `Delta`
//! (unverified zero) and `R` (recovered). Check nodes split by the pair
//! `(i, j)` of their `K`- and `Delta`-neighbor counts into sets `N_{i,j}`;
//! `N_1` collects the checks with exactly one `K` neighbor. Within `K`, `K_i`
//! holds the variables with `i` neighbors in `N_1`, and `K1_hat` the members
//! of `K_1` whose single `N_1` neighbor is in `N_{1,0}`.
//!
//! Tracking the expected fractions of these sets across iterations is the
//! density-evolution view of the decoder. Here the evolution is estimated
//! empirically from large single realizations, which concentration of the
//! unverified fraction justifies; the closed-form recursion is a possible
//! extension point behind the same [`DeResult`] shape.

use serde::{Deserialize, Serialize};

use crate::decoder::{
    self, run_iteration_with, AlgorithmKind, ComparisonPolicy, DecoderState, EcnCompare,
};
use crate::ensembles::{
    encode, sample_graph, sample_signal, GraphConfig, SensingGraph, Signal, SignalConfig,
    ValueMode,
};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream};

/// Integer magnitude range used for internal density-evolution signals.
///
/// Large enough that residual equalities across unrelated checks are
/// vanishingly rare even at n = 10^6, small enough that every sum of up to
/// d_c values stays exactly representable in f64 (d_c * 2^49 < 2^53 for
/// d_c <= 16).
pub const DE_INTEGER_RANGE: u64 = 1 << 49;

/// Fractional state parameters at the start of iteration `ell`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub ell: u32,
    /// Fraction of variables in `K` (unverified non-zero).
    pub alpha: f64,
    /// Fraction of variables in `Delta` (unverified zero).
    pub delta: f64,
    /// Fraction of variables recovered.
    pub recovered: f64,
    /// Check fractions by `(K, Delta)`-neighbor counts, row-major
    /// `(d_c+1) x (d_c+1)`: entry `i*(d_c+1) + j` is the fraction in `N_{i,j}`.
    pub n_ij: Vec<f64>,
    /// Variable fractions `K_i` by number of `N_1` neighbors, length `d_v+1`.
    pub k_i: Vec<f64>,
    /// Fraction in `K1_hat`.
    pub k1_hat: f64,
}

impl StateSnapshot {
    pub fn n_ij_at(&self, i: usize, j: usize) -> f64 {
        let row = self.k_row_len();
        self.n_ij[i * row + j]
    }

    fn k_row_len(&self) -> usize {
        (self.n_ij.len() as f64).sqrt().round() as usize
    }
}

/// Index-level classification backing a [`StateSnapshot`].
#[derive(Debug, Clone)]
pub struct NodeClassification {
    pub snapshot: StateSnapshot,
    /// Unverified non-zero variable indices, ascending.
    pub k_vars: Vec<u32>,
    /// Per variable: unverified with true value zero.
    pub delta_mask: Vec<bool>,
    /// Per check: number of neighbors in `K`.
    pub chk_k_count: Vec<u32>,
    /// Per check: number of neighbors in `Delta`.
    pub chk_delta_count: Vec<u32>,
}

/// Classifies all nodes of a decoder state against the true signal.
pub fn classify_nodes(state: &DecoderState, g: &SensingGraph, v: &Signal) -> Result<StateSnapshot> {
    Ok(classify_nodes_full(state, g, v)?.snapshot)
}

/// Full classification with index-level sets, as needed by the round-one
/// verification predictor.
pub fn classify_nodes_full(
    state: &DecoderState,
    g: &SensingGraph,
    v: &Signal,
) -> Result<NodeClassification> {
    if state.n() != g.n() || state.m() != g.m() || v.len() != g.n() {
        return Err(Error::Dimension(
            "state, graph and signal sizes disagree".into(),
        ));
    }
    let (n, m, d_v, d_c) = (g.n(), g.m(), g.d_v(), g.d_c());

    let mut k_vars = Vec::new();
    let mut delta_mask = vec![false; n];
    let mut recovered = 0usize;
    for i in 0..n {
        if state.is_verified(i) {
            recovered += 1;
        } else if v.is_nonzero(i) {
            k_vars.push(i as u32);
        } else {
            delta_mask[i] = true;
        }
    }

    let mut chk_k_count = vec![0u32; m];
    let mut chk_delta_count = vec![0u32; m];
    let row = d_c + 1;
    let mut n_ij = vec![0.0f64; row * row];
    for c in 0..m {
        let mut i = 0u32;
        let mut j = 0u32;
        for (var, _) in g.chk_vars(c) {
            if state.is_verified(var) {
                continue;
            }
            if v.is_nonzero(var) {
                i += 1;
            } else {
                j += 1;
            }
        }
        chk_k_count[c] = i;
        chk_delta_count[c] = j;
        n_ij[i as usize * row + j as usize] += 1.0;
    }
    for x in &mut n_ij {
        *x /= m as f64;
    }

    let mut k_i = vec![0.0f64; d_v + 1];
    let mut k1_hat = 0usize;
    for &var in &k_vars {
        let mut in_n1 = 0usize;
        let mut sole_n1_is_pure = false;
        for (c, _) in g.var_checks(var as usize) {
            if chk_k_count[c] == 1 {
                in_n1 += 1;
                sole_n1_is_pure = chk_delta_count[c] == 0;
            }
        }
        k_i[in_n1] += 1.0;
        if in_n1 == 1 && sole_n1_is_pure {
            k1_hat += 1;
        }
    }
    for x in &mut k_i {
        *x /= n as f64;
    }

    let snapshot = StateSnapshot {
        ell: state.iteration(),
        alpha: k_vars.len() as f64 / n as f64,
        delta: delta_mask.iter().filter(|&&d| d).count() as f64 / n as f64,
        recovered: recovered as f64 / n as f64,
        n_ij,
        k_i,
        k1_hat: k1_hat as f64 / n as f64,
    };
    Ok(NodeClassification {
        snapshot,
        k_vars,
        delta_mask,
        chk_k_count,
        chk_delta_count,
    })
}

/// Predicts the exact set of non-zero variables SBB verifies in the next
/// round one, from the classification at the start of the iteration.
///
/// A variable in `K` is verified when it has a neighbor in `N_{1,0}` (the
/// degree-one rule), or when its `N_1` neighbors number at least two and no
/// other unverified variable is adjacent to all of them (the equal-checks
/// rule, whose common-neighbor uniqueness can only fail through a short
/// cycle; the blocking configuration vanishes as n grows, which is why the
/// asymptotic characterization reads simply `union of K_i for i >= 2, plus
/// K1_hat`).
pub fn theorem2_predicted_set(cls: &NodeClassification, g: &SensingGraph) -> Vec<u32> {
    let mut predicted = Vec::new();
    let mut n1_checks: Vec<usize> = Vec::with_capacity(g.d_v());
    for &var in &cls.k_vars {
        n1_checks.clear();
        let mut docn = false;
        for (c, _) in g.var_checks(var as usize) {
            if cls.chk_k_count[c] == 1 {
                n1_checks.push(c);
                if cls.chk_delta_count[c] == 0 {
                    docn = true;
                }
            }
        }
        if docn {
            predicted.push(var);
            continue;
        }
        if n1_checks.len() < 2 {
            continue;
        }
        // Equal-checks clause: blocked only if some unverified zero variable
        // is adjacent to every equal-valued check of this variable.
        let c0 = n1_checks[0];
        let mut blocked = false;
        'outer: for (u, _) in g.chk_vars(c0) {
            if u == var as usize || !cls.delta_mask[u] {
                continue;
            }
            for &c in &n1_checks[1..] {
                if !g.var_checks(u).any(|(cu, _)| cu == c) {
                    continue 'outer;
                }
            }
            blocked = true;
            break;
        }
        if !blocked {
            predicted.push(var);
        }
    }
    predicted
}

/// Runs SBB (unit weights, exact comparisons) on an instance and compares
/// every iteration's round-one newly verified non-zero set against
/// [`theorem2_predicted_set`]. Returns the mismatches as
/// `(iteration, predicted, actual)` triples; equivalence means none.
pub fn round1_prediction_mismatches(
    g: &SensingGraph,
    v: &Signal,
    max_iter: u32,
) -> Result<Vec<(u32, Vec<u32>, Vec<u32>)>> {
    let c = encode(g, v)?;
    let mut state = decoder::init_state(g, &c)?;
    let policy = ComparisonPolicy::Exact;
    let mut mismatches = Vec::new();
    for _ in 0..max_iter {
        let cls = classify_nodes_full(&state, g, v)?;
        let predicted = theorem2_predicted_set(&cls, g);
        let mark = state.event_log().len();
        let rep = run_iteration_with(&mut state, g, AlgorithmKind::Sbb, &policy, EcnCompare::Grouped)?;
        let mut actual: Vec<u32> = state.event_log()[mark..]
            .iter()
            .filter(|e| e.round == 1 && v.is_nonzero(e.variable as usize))
            .map(|e| e.variable)
            .collect();
        actual.sort_unstable();
        if actual != predicted {
            mismatches.push((state.iteration(), predicted, actual));
        }
        if rep.total() == 0 || state.all_verified() {
            break;
        }
    }
    Ok(mismatches)
}

/// Stopping rules for the evolution of the unverified non-zero fraction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StoppingCriteria {
    /// Success when `alpha <= success_eps`.
    pub success_eps: f64,
    /// Failure when the decrease over `window` iterations falls below
    /// `max(stall_eps, 2/n)` while `alpha` is still above `success_eps`.
    pub stall_eps: f64,
    pub window: usize,
}

impl Default for StoppingCriteria {
    fn default() -> Self {
        Self {
            success_eps: 1e-7,
            stall_eps: 1e-8,
            window: 3,
        }
    }
}

impl StoppingCriteria {
    pub fn validate(&self) -> Result<()> {
        if !(self.success_eps > self.stall_eps && self.stall_eps > 0.0) {
            return Err(Error::Config(
                "stopping requires success_eps > stall_eps > 0".into(),
            ));
        }
        if self.window == 0 {
            return Err(Error::Config("stopping window must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Success,
    Failure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    Stalled,
    IterationCap,
}

/// Evolution of one seeded realization.
#[derive(Debug, Clone, Serialize)]
pub struct DeRun {
    pub seed: u64,
    pub verdict: Verdict,
    pub reason: StopReason,
    /// `alpha` at `ell = 0, 1, ...` until the run stopped.
    pub alpha_trace: Vec<f64>,
}

/// Monte-Carlo density-evolution outcome across seeds.
#[derive(Debug, Clone)]
pub struct DeResult {
    /// Seed-averaged snapshots (shorter runs padded with their final state).
    pub snapshots: Vec<StateSnapshot>,
    pub per_seed: Vec<DeRun>,
    /// Majority verdict over seeds.
    pub verdict: Verdict,
}

impl DeResult {
    /// Seed-averaged `alpha` at the time the runs stopped.
    pub fn alpha_stop(&self) -> f64 {
        let s: f64 = self
            .per_seed
            .iter()
            .map(|r| *r.alpha_trace.last().unwrap())
            .sum();
        s / self.per_seed.len() as f64
    }

    pub fn alpha_trace(&self) -> Vec<f64> {
        average_padded(self.per_seed.iter().map(|r| r.alpha_trace.as_slice()))
    }
}

fn average_padded<'a>(traces: impl Iterator<Item = &'a [f64]> + Clone) -> Vec<f64> {
    let count = traces.clone().count();
    let len = traces.clone().map(|t| t.len()).max().unwrap_or(0);
    let mut out = vec![0.0f64; len];
    for t in traces {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot += *t.get(i).unwrap_or_else(|| t.last().unwrap());
        }
    }
    for x in &mut out {
        *x /= count as f64;
    }
    out
}

fn majority(per_seed: &[DeRun]) -> Verdict {
    let successes = per_seed
        .iter()
        .filter(|r| r.verdict == Verdict::Success)
        .count();
    if 2 * successes > per_seed.len() {
        Verdict::Success
    } else {
        Verdict::Failure
    }
}

fn de_max_iter(n: usize, d_v: usize) -> u32 {
    (10.0 * d_v as f64 * (n as f64).log2()).ceil() as u32 + 100
}

/// One seeded decoder run under the density-evolution protocol: unit-weight
/// graph, exact-arithmetic integer signal, SBB via grouped ECN. Collects
/// full snapshots only when `snapshots` is provided.
fn de_run_single(
    d_v: usize,
    d_c: usize,
    alpha0: f64,
    alg: AlgorithmKind,
    n: usize,
    seed: u64,
    stopping: &StoppingCriteria,
    mut snapshots: Option<&mut Vec<StateSnapshot>>,
) -> Result<DeRun> {
    let g = sample_graph(&GraphConfig::all_ones(n, d_v, d_c, seed))?;
    let v = sample_signal(&SignalConfig {
        n,
        alpha: alpha0,
        value_mode: ValueMode::UniformInteger {
            range: DE_INTEGER_RANGE,
        },
        seed,
    })?;
    let c = encode(&g, &v)?;
    let mut state = decoder::init_state(&g, &c)?;
    let policy = ComparisonPolicy::Exact;

    let mut k_left = v.support.len();
    let mut alpha_trace = vec![k_left as f64 / n as f64];
    if let Some(s) = snapshots.as_deref_mut() {
        s.push(classify_nodes(&state, &g, &v)?);
    }

    let stall_floor = stopping.stall_eps.max(2.0 / n as f64);
    let max_iter = de_max_iter(n, d_v);
    let (verdict, reason) = loop {
        let ell = state.iteration() as usize;
        let alpha = alpha_trace[ell];
        if alpha <= stopping.success_eps {
            break (Verdict::Success, StopReason::Converged);
        }
        if ell >= stopping.window && alpha_trace[ell - stopping.window] - alpha < stall_floor {
            break (Verdict::Failure, StopReason::Stalled);
        }
        if state.iteration() >= max_iter {
            break (Verdict::Failure, StopReason::IterationCap);
        }

        let mark = state.event_log().len();
        let rep = run_iteration_with(&mut state, &g, alg, &policy, EcnCompare::Grouped)?;
        for ev in &state.event_log()[mark..] {
            if v.is_nonzero(ev.variable as usize) {
                k_left -= 1;
            }
        }
        alpha_trace.push(k_left as f64 / n as f64);
        if let Some(s) = snapshots.as_deref_mut() {
            s.push(classify_nodes(&state, &g, &v)?);
        }
        if rep.total() == 0 {
            // No rule fires again: settle the verdict immediately.
            let alpha = *alpha_trace.last().unwrap();
            if alpha <= stopping.success_eps {
                break (Verdict::Success, StopReason::Converged);
            }
            break (Verdict::Failure, StopReason::Stalled);
        }
    };
    Ok(DeRun {
        seed,
        verdict,
        reason,
        alpha_trace,
    })
}

fn average_snapshots(per_seed: &[Vec<StateSnapshot>]) -> Vec<StateSnapshot> {
    let len = per_seed.iter().map(|s| s.len()).max().unwrap_or(0);
    let count = per_seed.len() as f64;
    let mut out = Vec::with_capacity(len);
    for ell in 0..len {
        let mut acc: Option<StateSnapshot> = None;
        for run in per_seed {
            let snap = run.get(ell).unwrap_or_else(|| run.last().unwrap());
            match &mut acc {
                None => {
                    let mut first = snap.clone();
                    first.ell = ell as u32;
                    acc = Some(first);
                }
                Some(a) => {
                    a.alpha += snap.alpha;
                    a.delta += snap.delta;
                    a.recovered += snap.recovered;
                    a.k1_hat += snap.k1_hat;
                    for (x, y) in a.n_ij.iter_mut().zip(&snap.n_ij) {
                        *x += y;
                    }
                    for (x, y) in a.k_i.iter_mut().zip(&snap.k_i) {
                        *x += y;
                    }
                }
            }
        }
        let mut a = acc.unwrap();
        a.alpha /= count;
        a.delta /= count;
        a.recovered /= count;
        a.k1_hat /= count;
        for x in &mut a.n_ij {
            *x /= count;
        }
        for x in &mut a.k_i {
            *x /= count;
        }
        out.push(a);
    }
    out
}

/// Monte-Carlo density evolution: runs the node-based decoder on one
/// realization of size `n_mc` per seed, records per-iteration snapshots, and
/// averages them across seeds. The verdict is the seed majority under the
/// stopping criteria.
pub fn mc_density_evolution(
    d_v: usize,
    d_c: usize,
    alpha0: f64,
    alg: AlgorithmKind,
    n_mc: usize,
    seeds: &[u64],
    stopping: &StoppingCriteria,
) -> Result<DeResult> {
    mc_density_evolution_impl(d_v, d_c, alpha0, alg, n_mc, seeds, stopping, true)
}

/// Same as [`mc_density_evolution`] but skips the O(edges)-per-iteration
/// snapshot classification; only the alpha traces and verdicts are produced.
pub fn mc_density_evolution_alpha_only(
    d_v: usize,
    d_c: usize,
    alpha0: f64,
    alg: AlgorithmKind,
    n_mc: usize,
    seeds: &[u64],
    stopping: &StoppingCriteria,
) -> Result<DeResult> {
    mc_density_evolution_impl(d_v, d_c, alpha0, alg, n_mc, seeds, stopping, false)
}

#[allow(clippy::too_many_arguments)]
fn mc_density_evolution_impl(
    d_v: usize,
    d_c: usize,
    alpha0: f64,
    alg: AlgorithmKind,
    n_mc: usize,
    seeds: &[u64],
    stopping: &StoppingCriteria,
    full_snapshots: bool,
) -> Result<DeResult> {
    if seeds.is_empty() {
        return Err(Error::Config("at least one seed is required".into()));
    }
    if !(0.0..=1.0).contains(&alpha0) {
        return Err(Error::Config(format!("alpha0 = {alpha0} outside [0, 1]")));
    }
    stopping.validate()?;
    GraphConfig::all_ones(n_mc, d_v, d_c, 0).validate()?;

    let mut per_seed = Vec::with_capacity(seeds.len());
    let mut snapshot_runs: Vec<Vec<StateSnapshot>> = Vec::new();
    for &seed in seeds {
        let mut snaps = Vec::new();
        let run = de_run_single(
            d_v,
            d_c,
            alpha0,
            alg,
            n_mc,
            seed,
            stopping,
            full_snapshots.then_some(&mut snaps),
        )?;
        per_seed.push(run);
        if full_snapshots {
            snapshot_runs.push(snaps);
        }
    }
    let verdict = majority(&per_seed);
    Ok(DeResult {
        snapshots: average_snapshots(&snapshot_runs),
        per_seed,
        verdict,
    })
}

/// One probe of the bisection.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeRecord {
    pub alpha0: f64,
    pub verdict: Verdict,
    /// Seed-averaged alpha trace of the probe.
    pub alpha_trace: Vec<f64>,
}

/// Bracketing interval for the success threshold.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdResult {
    /// Largest probed density with a success verdict.
    pub lo: f64,
    /// Smallest probed density with a failure verdict.
    pub hi: f64,
    pub resolution: f64,
    pub probes: Vec<ProbeRecord>,
}

impl ThresholdResult {
    pub fn estimate(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Estimates the success threshold by bisecting `alpha0` on
/// `[0, min(1, d_v/d_c)]` with majority voting over `num_seeds` seeded
/// realizations per probe, until the bracket is narrower than `resolution`.
pub fn threshold_search(
    d_v: usize,
    d_c: usize,
    alg: AlgorithmKind,
    n_mc: usize,
    master_seed: u64,
    num_seeds: usize,
    resolution: f64,
    stopping: &StoppingCriteria,
) -> Result<ThresholdResult> {
    if resolution <= 0.0 {
        return Err(Error::Config("resolution must be positive".into()));
    }
    if num_seeds == 0 {
        return Err(Error::Config("num_seeds must be >= 1".into()));
    }

    let mut probes = Vec::new();
    let probe = |alpha0: f64, idx: u64, probes: &mut Vec<ProbeRecord>| -> Result<Verdict> {
        let seeds: Vec<u64> = (0..num_seeds as u64)
            .map(|s| derive_seed(master_seed, &[stream::PROBE, idx, s]))
            .collect();
        let res =
            mc_density_evolution_alpha_only(d_v, d_c, alpha0, alg, n_mc, &seeds, stopping)?;
        probes.push(ProbeRecord {
            alpha0,
            verdict: res.verdict,
            alpha_trace: res.alpha_trace(),
        });
        Ok(res.verdict)
    };

    let mut lo = 0.0f64; // alpha0 = 0 succeeds trivially
    let mut hi = (d_v as f64 / d_c as f64).min(1.0);
    let mut idx = 0u64;
    if probe(hi, idx, &mut probes)? == Verdict::Success {
        return Err(Error::NonMonotoneVerdicts(format!(
            "upper endpoint alpha0 = {hi} succeeded; widen the search region \
             or increase n_mc"
        )));
    }
    while hi - lo > resolution {
        idx += 1;
        let mid = 0.5 * (lo + hi);
        match probe(mid, idx, &mut probes)? {
            Verdict::Success => lo = mid,
            Verdict::Failure => hi = mid,
        }
    }

    // Bisection keeps success probes below failure probes by construction;
    // this guards the aggregation logic itself.
    let max_success = probes
        .iter()
        .filter(|p| p.verdict == Verdict::Success)
        .map(|p| p.alpha0)
        .fold(0.0f64, f64::max);
    let min_failure = probes
        .iter()
        .filter(|p| p.verdict == Verdict::Failure)
        .map(|p| p.alpha0)
        .fold(f64::INFINITY, f64::min);
    if max_success >= min_failure {
        return Err(Error::NonMonotoneVerdicts(format!(
            "success at {max_success} above failure at {min_failure}"
        )));
    }

    Ok(ThresholdResult {
        lo,
        hi,
        resolution,
        probes,
    })
}

/// Oversampling ratio `r_o = d_v / (alpha * d_c)` at density `alpha`.
pub fn oversampling_ratio(d_v: usize, d_c: usize, alpha: f64) -> Result<f64> {
    if alpha <= 0.0 {
        return Err(Error::Config("alpha must be positive".into()));
    }
    Ok(d_v as f64 / (alpha * d_c as f64))
}

/// Spread of the unverified-message fraction across realizations at a fixed
/// iteration and size.
#[derive(Debug, Clone, Serialize)]
pub struct ConcentrationRecord {
    pub n: usize,
    pub ell: u32,
    pub beta_samples: Vec<f64>,
    pub mean: f64,
    pub stddev: f64,
}

/// For each size in `n_list`, runs `trials` seeded instances for `ell`
/// iterations and records the fraction of variable-to-check messages with
/// unverified status.
pub fn concentration_experiment(
    d_v: usize,
    d_c: usize,
    alpha0: f64,
    alg: AlgorithmKind,
    n_list: &[usize],
    trials: usize,
    ell: u32,
    master_seed: u64,
) -> Result<Vec<ConcentrationRecord>> {
    if trials < 30 {
        return Err(Error::Config("concentration requires at least 30 trials".into()));
    }
    let policy = ComparisonPolicy::Exact;
    let mut out = Vec::with_capacity(n_list.len());
    for (ni, &n) in n_list.iter().enumerate() {
        let mut beta_samples = Vec::with_capacity(trials);
        for t in 0..trials {
            let seed = derive_seed(master_seed, &[stream::TRIAL, ni as u64, t as u64]);
            let g = sample_graph(&GraphConfig::all_ones(n, d_v, d_c, seed))?;
            let v = sample_signal(&SignalConfig {
                n,
                alpha: alpha0,
                value_mode: ValueMode::UniformInteger {
                    range: DE_INTEGER_RANGE,
                },
                seed,
            })?;
            let c = encode(&g, &v)?;
            let mut state = decoder::init_state(&g, &c)?;
            for _ in 0..ell {
                let rep = run_iteration_with(&mut state, &g, alg, &policy, EcnCompare::Grouped)?;
                if rep.total() == 0 || state.all_verified() {
                    break;
                }
            }
            // Message-level count, and its node-level shortcut: all d_v
            // outgoing messages of a variable share its status.
            let unverified_edges: usize = (0..n)
                .filter(|&i| !state.is_verified(i))
                .map(|_| d_v)
                .sum();
            let beta = unverified_edges as f64 / (n * d_v) as f64;
            let beta_nodes = state.unverified_count() as f64 / n as f64;
            assert_eq!(beta, beta_nodes);
            beta_samples.push(beta);
        }
        let mean = beta_samples.iter().sum::<f64>() / trials as f64;
        let var = beta_samples
            .iter()
            .map(|b| (b - mean) * (b - mean))
            .sum::<f64>()
            / (trials as f64 - 1.0);
        out.push(ConcentrationRecord {
            n,
            ell,
            beta_samples,
            mean,
            stddev: var.sqrt(),
        });
    }
    Ok(out)
}
