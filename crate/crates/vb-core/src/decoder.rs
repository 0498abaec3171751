//! Node-based LM and SBB verification decoders.
//!
//! A decoder run proceeds in iterations of two rounds. Round one applies the
//! degree-one rule (DOCN) and, for SBB, the equal-checks rule (ECN) against a
//! frozen snapshot of the check residuals; round two applies the zero-check
//! rule (ZCN) to the updated state. Verifications are irreversible: a
//! verified value is subtracted from all neighboring check residuals and the
//! variable is effectively removed from the graph.
//!
//! The node-based engine here is the reference semantics; [`mp`] provides an
//! equivalence-checked message-passing formulation.

pub mod mp;

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::ensembles::{Measurements, SensingGraph};
use crate::error::{Error, Result};

/// Which verification rules a run applies: LM uses ZCN and DOCN only, SBB
/// additionally uses ECN.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Lm,
    Sbb,
}

impl AlgorithmKind {
    pub fn uses_ecn(&self) -> bool {
        matches!(self, AlgorithmKind::Sbb)
    }
}

/// Residual comparison policy.
///
/// `Exact` is bit equality and is only sound for integer-valued signals with
/// unit (or integer) weights; `Tolerance` is meant for Gaussian signals where
/// the rules' real-arithmetic equalities must absorb floating-point rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ComparisonPolicy {
    Exact,
    Tolerance { abs: f64, rel: f64 },
}

impl ComparisonPolicy {
    /// Default tolerance policy for continuous measurements:
    /// `abs = 1e-9 * max(1, |c|_max)`, `rel = 1e-9`.
    pub fn tolerance_for(c: &Measurements) -> Self {
        let c_max = c.values.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        ComparisonPolicy::Tolerance {
            abs: 1e-9 * c_max.max(1.0),
            rel: 1e-9,
        }
    }

    #[inline]
    pub fn is_zero(&self, x: f64) -> bool {
        match *self {
            ComparisonPolicy::Exact => x == 0.0,
            ComparisonPolicy::Tolerance { abs, .. } => x.abs() <= abs,
        }
    }

    #[inline]
    pub fn eq(&self, x: f64, y: f64) -> bool {
        match *self {
            ComparisonPolicy::Exact => x == y,
            ComparisonPolicy::Tolerance { abs, rel } => {
                (x - y).abs() <= abs.max(rel * x.abs().max(y.abs()))
            }
        }
    }
}

/// How SBB's equal-checks comparisons are carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EcnCompare {
    /// Group checks by raw residual value; only meaningful with unit weights.
    Grouped,
    /// Compare weight-divided residuals per variable, matching the
    /// message-passing formulation; required for general weights.
    WeightDivided,
}

impl EcnCompare {
    pub fn auto(g: &SensingGraph) -> Self {
        if g.is_all_ones() {
            EcnCompare::Grouped
        } else {
            EcnCompare::WeightDivided
        }
    }
}

/// Which rule produced a verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Zcn,
    Docn,
    EcnCommon,
    EcnZero,
}

/// One irreversible verification, as recorded in the event log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationEvent {
    pub variable: u32,
    pub value: f64,
    pub rule: Rule,
    pub iteration: u32,
    pub round: u8,
}

/// The evolving decoder: per-variable status and per-check residual state.
#[derive(Debug, Clone)]
pub struct DecoderState {
    verified: Vec<bool>,
    value: Vec<f64>,
    chk_residual: Vec<f64>,
    chk_unverified_deg: Vec<u32>,
    iteration: u32,
    event_log: Vec<VerificationEvent>,
    unverified: usize,
}

impl DecoderState {
    pub fn n(&self) -> usize {
        self.verified.len()
    }

    pub fn m(&self) -> usize {
        self.chk_residual.len()
    }

    pub fn iteration(&self) -> u32 {
        self.iteration
    }

    pub fn is_verified(&self, v: usize) -> bool {
        self.verified[v]
    }

    /// Verified value of `v`, if any.
    pub fn value_of(&self, v: usize) -> Option<f64> {
        self.verified[v].then(|| self.value[v])
    }

    pub fn unverified_count(&self) -> usize {
        self.unverified
    }

    pub fn all_verified(&self) -> bool {
        self.unverified == 0
    }

    pub fn residual(&self, c: usize) -> f64 {
        self.chk_residual[c]
    }

    pub fn unverified_deg(&self, c: usize) -> u32 {
        self.chk_unverified_deg[c]
    }

    pub fn event_log(&self) -> &[VerificationEvent] {
        &self.event_log
    }

    /// Current estimate of the signal: verified values, zero elsewhere.
    pub fn verified_signal(&self) -> Vec<f64> {
        self.verified
            .iter()
            .zip(&self.value)
            .map(|(&ok, &x)| if ok { x } else { 0.0 })
            .collect()
    }
}

/// Initializes the decoder: nothing verified, residuals equal to the
/// measurements, every check at full unverified degree.
pub fn init_state(g: &SensingGraph, c: &Measurements) -> Result<DecoderState> {
    if c.len() != g.m() {
        return Err(Error::Dimension(format!(
            "measurement length {} != m = {}",
            c.len(),
            g.m()
        )));
    }
    Ok(DecoderState {
        verified: vec![false; g.n()],
        value: vec![0.0; g.n()],
        chk_residual: c.values.clone(),
        chk_unverified_deg: vec![g.d_c() as u32; g.m()],
        iteration: 0,
        event_log: Vec::new(),
        unverified: g.n(),
    })
}

/// Fast deterministic hasher for u64 keys (residual bits, node indices).
#[derive(Default)]
struct U64Hasher(u64);

impl Hasher for U64Hasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 ^ u64::from(b)).wrapping_mul(0x100_0000_01b3);
        }
    }

    fn write_u64(&mut self, x: u64) {
        let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        self.0 = z ^ (z >> 31);
    }

    fn write_u32(&mut self, x: u32) {
        self.write_u64(u64::from(x));
    }
}

type U64Map<V> = HashMap<u64, V, BuildHasherDefault<U64Hasher>>;

#[derive(Debug, Clone, Copy)]
struct Candidate {
    variable: u32,
    value: f64,
    rule: Rule,
}

fn zcn_candidates(state: &DecoderState, g: &SensingGraph, policy: &ComparisonPolicy, out: &mut Vec<Candidate>) {
    for c in 0..g.m() {
        if state.chk_unverified_deg[c] == 0 || !policy.is_zero(state.chk_residual[c]) {
            continue;
        }
        for (v, _) in g.chk_vars(c) {
            if !state.verified[v] {
                out.push(Candidate {
                    variable: v as u32,
                    value: 0.0,
                    rule: Rule::Zcn,
                });
            }
        }
    }
}

fn docn_candidates(state: &DecoderState, g: &SensingGraph, out: &mut Vec<Candidate>) {
    for c in 0..g.m() {
        if state.chk_unverified_deg[c] != 1 {
            continue;
        }
        let (v, w) = g
            .chk_vars(c)
            .find(|&(v, _)| !state.verified[v])
            .expect("degree bookkeeping guarantees one unverified neighbor");
        out.push(Candidate {
            variable: v as u32,
            value: state.chk_residual[c] / w,
            rule: Rule::Docn,
        });
    }
}

/// ECN with raw-residual grouping (unit weights): checks with equal non-zero
/// residuals form a group; unverified variables adjacent to a proper
/// non-empty subset of the group are verified to zero, and if exactly one
/// unverified variable is adjacent to every member it is verified to the
/// common value.
fn ecn_candidates_grouped(
    state: &DecoderState,
    g: &SensingGraph,
    policy: &ComparisonPolicy,
    out: &mut Vec<Candidate>,
) -> Result<()> {
    if !g.is_all_ones() {
        return Err(Error::Config(
            "grouped ECN compares raw check values and requires unit weights; \
             use the weight-divided comparison for general weights"
                .into(),
        ));
    }

    // Groups in first-member check order, for deterministic event order.
    let mut groups: Vec<Vec<u32>> = Vec::new();
    match *policy {
        ComparisonPolicy::Exact => {
            let mut index: U64Map<u32> = U64Map::default();
            for c in 0..g.m() {
                if state.chk_unverified_deg[c] == 0 {
                    continue;
                }
                let r = state.chk_residual[c];
                if r == 0.0 {
                    continue;
                }
                match index.entry(r.to_bits()) {
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(groups.len() as u32);
                        groups.push(vec![c as u32]);
                    }
                    std::collections::hash_map::Entry::Occupied(e) => {
                        groups[*e.get() as usize].push(c as u32);
                    }
                }
            }
        }
        ComparisonPolicy::Tolerance { .. } => {
            let mut live: Vec<(f64, u32)> = (0..g.m())
                .filter(|&c| state.chk_unverified_deg[c] > 0 && !policy.is_zero(state.chk_residual[c]))
                .map(|c| (state.chk_residual[c], c as u32))
                .collect();
            live.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for &(r, c) in &live {
                match groups.last_mut() {
                    Some(grp) if policy.eq(state.chk_residual[grp[grp.len() - 1] as usize], r) => {
                        grp.push(c)
                    }
                    _ => groups.push(vec![c]),
                }
            }
        }
    }

    let mut counts: U64Map<u32> = U64Map::default();
    for grp in &groups {
        if grp.len() < 2 {
            continue;
        }
        counts.clear();
        for &c in grp {
            for (v, _) in g.chk_vars(c as usize) {
                if !state.verified[v] {
                    *counts.entry(v as u64).or_insert(0) += 1;
                }
            }
        }
        let full = grp.len() as u32;
        let mut common: Option<u32> = None;
        let mut common_unique = true;
        // Deterministic order: walk the group's neighbors again rather than
        // iterating the count map.
        let mut seen: Vec<u32> = Vec::with_capacity(counts.len());
        for &c in grp {
            for (v, _) in g.chk_vars(c as usize) {
                if state.verified[v] || seen.contains(&(v as u32)) {
                    continue;
                }
                seen.push(v as u32);
                let cnt = counts[&(v as u64)];
                if cnt < full {
                    out.push(Candidate {
                        variable: v as u32,
                        value: 0.0,
                        rule: Rule::EcnZero,
                    });
                } else if common.is_none() {
                    common = Some(v as u32);
                } else {
                    common_unique = false;
                }
            }
        }
        if let (Some(v), true) = (common, common_unique) {
            out.push(Candidate {
                variable: v,
                value: state.chk_residual[grp[0] as usize],
                rule: Rule::EcnCommon,
            });
        }
    }
    Ok(())
}

/// ECN with per-variable weight-divided comparisons: an unverified variable
/// receiving two equal non-zero weight-divided residuals from live checks is
/// verified to that value. This matches the message-passing equal-pair clause
/// and is the form used with general weights.
fn ecn_candidates_weight_divided(
    state: &DecoderState,
    g: &SensingGraph,
    policy: &ComparisonPolicy,
    out: &mut Vec<Candidate>,
) {
    let mut vals: Vec<f64> = Vec::with_capacity(g.d_v());
    for v in 0..g.n() {
        if state.verified[v] {
            continue;
        }
        vals.clear();
        for (c, w) in g.var_checks(v) {
            if state.chk_unverified_deg[c] > 0 {
                vals.push(state.chk_residual[c] / w);
            }
        }
        'pairs: for i in 0..vals.len() {
            if policy.is_zero(vals[i]) {
                continue;
            }
            for j in i + 1..vals.len() {
                if policy.eq(vals[i], vals[j]) {
                    out.push(Candidate {
                        variable: v as u32,
                        value: vals[i],
                        rule: Rule::EcnCommon,
                    });
                    break 'pairs;
                }
            }
        }
    }
}

/// Commits a batch of candidates computed against a frozen snapshot.
/// Duplicate proposals for one variable must agree per `policy`; the first
/// occurrence determines the logged rule. Returns the number of variables
/// newly verified.
fn commit(
    state: &mut DecoderState,
    g: &SensingGraph,
    policy: &ComparisonPolicy,
    cands: &[Candidate],
    iteration: u32,
    round: u8,
) -> Result<usize> {
    let mut newly = 0usize;
    let mut chosen: U64Map<f64> = U64Map::default();
    for cand in cands {
        let v = cand.variable as usize;
        match chosen.entry(u64::from(cand.variable)) {
            std::collections::hash_map::Entry::Occupied(e) => {
                if !policy.eq(*e.get(), cand.value) {
                    return Err(Error::FalseVerificationConflict {
                        variable: v,
                        first: *e.get(),
                        second: cand.value,
                    });
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(cand.value);
                state.verified[v] = true;
                state.value[v] = cand.value;
                state.unverified -= 1;
                newly += 1;
                state.event_log.push(VerificationEvent {
                    variable: cand.variable,
                    value: cand.value,
                    rule: cand.rule,
                    iteration,
                    round,
                });
                if cand.value == 0.0 {
                    for (c, _) in g.var_checks(v) {
                        state.chk_unverified_deg[c] -= 1;
                    }
                } else {
                    for (c, w) in g.var_checks(v) {
                        state.chk_residual[c] -= w * cand.value;
                        state.chk_unverified_deg[c] -= 1;
                    }
                }
            }
        }
    }
    Ok(newly)
}

/// Applies ZCN once: every zero-residual check verifies all its unverified
/// neighbors to zero. Returns the committed events.
pub fn apply_zcn(
    state: &mut DecoderState,
    g: &SensingGraph,
    policy: &ComparisonPolicy,
) -> Result<Vec<VerificationEvent>> {
    let mut cands = Vec::new();
    zcn_candidates(state, g, policy, &mut cands);
    let mark = state.event_log.len();
    commit(state, g, policy, &cands, state.iteration + 1, 2)?;
    Ok(state.event_log[mark..].to_vec())
}

/// Applies DOCN once: every check with a single unverified neighbor verifies
/// it to `residual / weight`.
pub fn apply_docn(
    state: &mut DecoderState,
    g: &SensingGraph,
    policy: &ComparisonPolicy,
) -> Result<Vec<VerificationEvent>> {
    let mut cands = Vec::new();
    docn_candidates(state, g, &mut cands);
    let mark = state.event_log.len();
    commit(state, g, policy, &cands, state.iteration + 1, 1)?;
    Ok(state.event_log[mark..].to_vec())
}

/// Applies grouped ECN once (SBB, unit weights).
pub fn apply_ecn(
    state: &mut DecoderState,
    g: &SensingGraph,
    policy: &ComparisonPolicy,
) -> Result<Vec<VerificationEvent>> {
    let mut cands = Vec::new();
    ecn_candidates_grouped(state, g, policy, &mut cands)?;
    let mark = state.event_log.len();
    commit(state, g, policy, &cands, state.iteration + 1, 1)?;
    Ok(state.event_log[mark..].to_vec())
}

/// Per-iteration progress report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IterationReport {
    pub newly_verified_round1: usize,
    pub newly_verified_round2: usize,
}

impl IterationReport {
    pub fn total(&self) -> usize {
        self.newly_verified_round1 + self.newly_verified_round2
    }
}

/// Runs one two-round iteration with the ECN comparison chosen by
/// [`EcnCompare::auto`].
pub fn run_iteration(
    state: &mut DecoderState,
    g: &SensingGraph,
    alg: AlgorithmKind,
    policy: &ComparisonPolicy,
) -> Result<IterationReport> {
    run_iteration_with(state, g, alg, policy, EcnCompare::auto(g))
}

/// Runs one iteration: round one commits DOCN (and ECN for SBB) candidates
/// computed against the frozen residual snapshot, round two commits ZCN on
/// the updated state.
pub fn run_iteration_with(
    state: &mut DecoderState,
    g: &SensingGraph,
    alg: AlgorithmKind,
    policy: &ComparisonPolicy,
    ecn: EcnCompare,
) -> Result<IterationReport> {
    let iter = state.iteration + 1;

    let mut cands = Vec::new();
    docn_candidates(state, g, &mut cands);
    if alg.uses_ecn() {
        match ecn {
            EcnCompare::Grouped => ecn_candidates_grouped(state, g, policy, &mut cands)?,
            EcnCompare::WeightDivided => ecn_candidates_weight_divided(state, g, policy, &mut cands),
        }
    }
    let round1 = commit(state, g, policy, &cands, iter, 1)?;

    cands.clear();
    zcn_candidates(state, g, policy, &mut cands);
    let round2 = commit(state, g, policy, &cands, iter, 2)?;

    state.iteration = iter;
    Ok(IterationReport {
        newly_verified_round1: round1,
        newly_verified_round2: round2,
    })
}

/// Outcome of a full decoder run.
#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub success: bool,
    pub iterations: u32,
    pub trace: Vec<IterationReport>,
    pub state: DecoderState,
}

impl RecoveryResult {
    pub fn verified_signal(&self) -> Vec<f64> {
        self.state.verified_signal()
    }

    /// Unverified variable count after each iteration, starting at `n`.
    pub fn unverified_counts(&self) -> Vec<usize> {
        let mut left = self.state.n();
        let mut out = vec![left];
        for rep in &self.trace {
            left -= rep.total();
            out.push(left);
        }
        out
    }

    /// One-object JSON summary of the run.
    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "success": self.success,
            "iterations": self.iterations,
            "unverified_per_iteration": self.unverified_counts(),
        })
    }
}

/// Generous default iteration cap; termination is normally by no-progress.
pub fn default_max_iter(g: &SensingGraph) -> u32 {
    (10.0 * g.d_v() as f64 * (g.n() as f64).log2()).ceil() as u32 + 100
}

/// Runs the node-based decoder to completion: until every variable is
/// verified, a full iteration makes no progress, or `max_iter` is reached.
pub fn recover(
    g: &SensingGraph,
    c: &Measurements,
    alg: AlgorithmKind,
    policy: &ComparisonPolicy,
    max_iter: u32,
) -> Result<RecoveryResult> {
    recover_with(g, c, alg, policy, max_iter, EcnCompare::auto(g))
}

pub fn recover_with(
    g: &SensingGraph,
    c: &Measurements,
    alg: AlgorithmKind,
    policy: &ComparisonPolicy,
    max_iter: u32,
    ecn: EcnCompare,
) -> Result<RecoveryResult> {
    if max_iter == 0 {
        return Err(Error::Config("max_iter must be at least 1".into()));
    }
    let mut state = init_state(g, c)?;
    let mut trace = Vec::new();
    while state.iteration < max_iter {
        let rep = run_iteration_with(&mut state, g, alg, policy, ecn)?;
        trace.push(rep);
        if rep.total() == 0 || state.all_verified() {
            break;
        }
    }
    Ok(RecoveryResult {
        success: state.all_verified(),
        iterations: state.iteration,
        trace,
        state,
    })
}

/// Recomputes every check residual from scratch (`c` minus verified
/// contributions). Test oracle for the incrementally maintained values.
pub fn recompute_residuals(state: &DecoderState, g: &SensingGraph, c: &Measurements) -> Vec<f64> {
    (0..g.m())
        .map(|i| {
            c.values[i]
                - g.chk_vars(i)
                    .filter(|&(v, _)| state.is_verified(v))
                    .map(|(v, w)| w * state.value_of(v).unwrap())
                    .sum::<f64>()
        })
        .collect()
}

/// Writes the event log as JSON lines, one record per verification.
pub fn write_event_log_jsonl<W: Write>(events: &[VerificationEvent], mut out: W) -> Result<()> {
    for ev in events {
        serde_json::to_writer(&mut out, ev).map_err(|e| Error::Parse(e.to_string()))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{
        encode, sample_graph, sample_signal, GraphConfig, Measurements, SensingGraph, Signal,
        SignalConfig, ValueMode,
    };

    /// Hand-built (n=6, d_v=2, d_c=3) graph:
    ///   c0: v0 v1 v2 | c1: v0 v3 v4 | c2: v1 v3 v5 | c3: v2 v4 v5
    fn micro_graph() -> SensingGraph {
        SensingGraph::from_check_view(6, 2, 3, vec![0, 1, 2, 0, 3, 4, 1, 3, 5, 2, 4, 5], None)
            .unwrap()
    }

    fn micro_graph_weighted(w: Vec<f64>) -> SensingGraph {
        SensingGraph::from_check_view(6, 2, 3, vec![0, 1, 2, 0, 3, 4, 1, 3, 5, 2, 4, 5], Some(w))
            .unwrap()
    }

    fn meas(values: Vec<f64>) -> Measurements {
        Measurements { values }
    }

    #[test]
    fn init_state_contract() {
        let g = micro_graph();
        let c = meas(vec![0.0; 4]);
        let s = init_state(&g, &c).unwrap();
        assert!(s.event_log().is_empty());
        assert_eq!(s.iteration(), 0);
        assert!((0..4).all(|i| s.residual(i) == 0.0 && s.unverified_deg(i) == 3));

        let c2 = meas(vec![1.5, -2.0, 0.25, 7.0]);
        let s2 = init_state(&g, &c2).unwrap();
        assert_eq!(
            (0..4).map(|i| s2.residual(i)).collect::<Vec<_>>(),
            c2.values
        );

        assert!(init_state(&g, &meas(vec![0.0; 5])).is_err());
    }

    #[test]
    fn zcn_verifies_neighbors_of_zero_checks() {
        let g = micro_graph();
        // v0 = 7: c0 and c1 are 7, c2 and c3 are 0.
        let c = meas(vec![7.0, 7.0, 0.0, 0.0]);
        let mut s = init_state(&g, &c).unwrap();
        let events = apply_zcn(&mut s, &g, &ComparisonPolicy::Exact).unwrap();
        let mut verified: Vec<u32> = events.iter().map(|e| e.variable).collect();
        verified.sort_unstable();
        assert_eq!(verified, vec![1, 2, 3, 4, 5]);
        assert!(events.iter().all(|e| e.rule == Rule::Zcn && e.value == 0.0));
        assert!(!s.is_verified(0));

        // Zero check with no unverified neighbors: no further events.
        let again = apply_zcn(&mut s, &g, &ComparisonPolicy::Exact).unwrap();
        assert!(again.is_empty());
    }

    #[test]
    fn docn_divides_by_edge_weight() {
        // All weights 2 on c0's window, ones elsewhere.
        let g = micro_graph_weighted(vec![2.0, 2.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        let c = meas(vec![6.0, 3.0, 0.0, 0.0]);
        let mut s = init_state(&g, &c).unwrap();
        // Verify v1 and v2 by hand so c0 has a single unverified neighbor.
        let pre = vec![
            Candidate { variable: 1, value: 0.0, rule: Rule::Zcn },
            Candidate { variable: 2, value: 0.0, rule: Rule::Zcn },
        ];
        commit(&mut s, &g, &ComparisonPolicy::Exact, &pre, 0, 2).unwrap();
        let events = apply_docn(&mut s, &g, &ComparisonPolicy::Exact).unwrap();
        let ev0 = events.iter().find(|e| e.variable == 0).unwrap();
        assert_eq!(ev0.rule, Rule::Docn);
        assert_eq!(ev0.value, 3.0); // residual 6 over weight 2
    }

    #[test]
    fn docn_ignores_higher_degree_checks() {
        let g = micro_graph();
        let c = meas(vec![7.0, 7.0, 0.0, 0.0]);
        let mut s = init_state(&g, &c).unwrap();
        let events = apply_docn(&mut s, &g, &ComparisonPolicy::Exact).unwrap();
        assert!(events.is_empty()); // every check still has 3 unverified neighbors
    }

    #[test]
    fn ecn_common_and_zero_clauses() {
        let g = micro_graph();
        // v0 = 7.3 gives c0 = c1 = 7.3; v0 is the unique common neighbor,
        // v1, v2, v3, v4 each touch a proper subset.
        let c = meas(vec![7.3, 7.3, 0.0, 0.0]);
        let mut s = init_state(&g, &c).unwrap();
        let events = apply_ecn(&mut s, &g, &ComparisonPolicy::Exact).unwrap();
        let common: Vec<_> = events.iter().filter(|e| e.rule == Rule::EcnCommon).collect();
        assert_eq!(common.len(), 1);
        assert_eq!(common[0].variable, 0);
        assert_eq!(common[0].value, 7.3);
        let mut zeros: Vec<u32> = events
            .iter()
            .filter(|e| e.rule == Rule::EcnZero)
            .map(|e| e.variable)
            .collect();
        zeros.sort_unstable();
        assert_eq!(zeros, vec![1, 2, 3, 4]);
    }

    #[test]
    fn ecn_requires_unique_common_neighbor() {
        // c2 and c3 share v5... and no other variable; build equal values on
        // c0/c1 which share only v0, then equal values on a pair sharing two
        // unverified variables must not fire the common clause.
        // Graph where c0: v0 v1 v2 and c1: v0 v1 v3 share {v0, v1}.
        let g = SensingGraph::from_check_view(
            6,
            2,
            3,
            vec![0, 1, 2, 0, 1, 3, 2, 4, 5, 3, 4, 5],
            None,
        )
        .unwrap();
        let c = meas(vec![9.0, 9.0, 1.0, 2.0]);
        let mut s = init_state(&g, &c).unwrap();
        let events = apply_ecn(&mut s, &g, &ComparisonPolicy::Exact).unwrap();
        assert!(events.iter().all(|e| e.rule != Rule::EcnCommon));
        // v2 and v3 touch one check of the pair each: zero-verified.
        let mut zeros: Vec<u32> = events.iter().map(|e| e.variable).collect();
        zeros.sort_unstable();
        assert_eq!(zeros, vec![2, 3]);
    }

    #[test]
    fn ecn_distinct_residuals_do_nothing() {
        let g = micro_graph();
        let c = meas(vec![1.0, 2.0, 3.0, 4.0]);
        let mut s = init_state(&g, &c).unwrap();
        let events = apply_ecn(&mut s, &g, &ComparisonPolicy::Exact).unwrap();
        assert!(events.is_empty());
    }

    #[test]
    fn grouped_ecn_rejects_weighted_graphs() {
        let g = micro_graph_weighted(vec![2.0; 12]);
        let c = meas(vec![0.0; 4]);
        let mut s = init_state(&g, &c).unwrap();
        assert!(apply_ecn(&mut s, &g, &ComparisonPolicy::Exact).is_err());
    }

    #[test]
    fn sbb_micro_trace_matches_hand_simulation() {
        // v0 = 7, everything else zero. Hand trace:
        // iter 1 round 1: ECN group {c0, c1} at value 7 verifies v0 = 7
        //   (common) and v1..v4 = 0 (subset); round 2: ZCN on c2/c3 verifies
        //   v5 = 0.
        let g = micro_graph();
        let v = Signal {
            values: vec![7.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            support: vec![0],
        };
        let c = encode(&g, &v).unwrap();
        let res = recover(&g, &c, AlgorithmKind::Sbb, &ComparisonPolicy::Exact, 10).unwrap();
        assert!(res.success);
        assert_eq!(res.iterations, 1);
        assert_eq!(res.trace[0].newly_verified_round1, 5);
        assert_eq!(res.trace[0].newly_verified_round2, 1);
        assert_eq!(res.verified_signal(), v.values);
        let ev0 = res
            .state
            .event_log()
            .iter()
            .find(|e| e.variable == 0)
            .unwrap();
        assert_eq!((ev0.rule, ev0.round, ev0.value), (Rule::EcnCommon, 1, 7.0));
        let ev5 = res
            .state
            .event_log()
            .iter()
            .find(|e| e.variable == 5)
            .unwrap();
        assert_eq!((ev5.rule, ev5.round), (Rule::Zcn, 2));
    }

    #[test]
    fn lm_micro_trace_matches_hand_simulation() {
        // LM has no ECN: iter 1 round 2 zero-verifies v1..v5 via c2/c3, then
        // iter 2 round 1 DOCN on c0 (degree one) recovers v0 = 7.
        let g = micro_graph();
        let v = Signal {
            values: vec![7.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            support: vec![0],
        };
        let c = encode(&g, &v).unwrap();
        let res = recover(&g, &c, AlgorithmKind::Lm, &ComparisonPolicy::Exact, 10).unwrap();
        assert!(res.success);
        assert_eq!(res.iterations, 2);
        assert_eq!(res.trace[0].newly_verified_round1, 0);
        assert_eq!(res.trace[0].newly_verified_round2, 5);
        assert_eq!(res.trace[1].newly_verified_round1, 1);
        let ev0 = res
            .state
            .event_log()
            .iter()
            .find(|e| e.variable == 0)
            .unwrap();
        assert_eq!((ev0.rule, ev0.iteration, ev0.round), (Rule::Docn, 2, 1));
        assert!(res
            .state
            .event_log()
            .iter()
            .all(|e| e.rule != Rule::EcnCommon && e.rule != Rule::EcnZero));
    }

    #[test]
    fn all_zero_signal_finishes_in_round_two_of_iteration_one() {
        let g = sample_graph(&GraphConfig::all_ones(60, 3, 6, 4)).unwrap();
        let c = meas(vec![0.0; g.m()]);
        let res = recover(&g, &c, AlgorithmKind::Sbb, &ComparisonPolicy::Exact, 10).unwrap();
        assert!(res.success);
        assert_eq!(res.iterations, 1);
        assert_eq!(res.trace[0].newly_verified_round2, 60);
        assert!(res
            .state
            .event_log()
            .iter()
            .all(|e| e.rule == Rule::Zcn && e.iteration == 1 && e.round == 2));
    }

    #[test]
    fn stalled_state_stops_without_progress() {
        // alpha = 1 style instance where nothing is verifiable: every check
        // has several non-zero unverified neighbors with distinct residuals.
        let g = micro_graph();
        let v = Signal {
            values: vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0],
            support: vec![0, 1, 2, 3, 4, 5],
        };
        let c = encode(&g, &v).unwrap();
        let res = recover(&g, &c, AlgorithmKind::Sbb, &ComparisonPolicy::Exact, 10).unwrap();
        assert!(!res.success);
        assert_eq!(res.trace.last().unwrap().total(), 0);
        assert_eq!(res.state.unverified_count(), 6);
    }

    #[test]
    fn event_log_variables_are_unique_and_residuals_consistent() {
        for seed in 0..50 {
            let g = sample_graph(&GraphConfig::all_ones(120, 3, 6, seed)).unwrap();
            let v = sample_signal(&SignalConfig {
                n: 120,
                alpha: 0.22,
                value_mode: ValueMode::UniformInteger { range: 1 << 40 },
                seed,
            })
            .unwrap();
            let c = encode(&g, &v).unwrap();
            let res = recover(&g, &c, AlgorithmKind::Sbb, &ComparisonPolicy::Exact, 200).unwrap();
            let mut vars: Vec<u32> = res.state.event_log().iter().map(|e| e.variable).collect();
            vars.sort_unstable();
            let before = vars.len();
            vars.dedup();
            assert_eq!(before, vars.len());
            let fresh = recompute_residuals(&res.state, &g, &c);
            for (i, &r) in fresh.iter().enumerate() {
                assert_eq!(r, res.state.residual(i)); // exact mode: bit equal
            }
        }
    }

    #[test]
    fn jsonl_export_shape() {
        let g = micro_graph();
        let v = Signal {
            values: vec![7.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            support: vec![0],
        };
        let c = encode(&g, &v).unwrap();
        let res = recover(&g, &c, AlgorithmKind::Sbb, &ComparisonPolicy::Exact, 10).unwrap();
        let mut buf = Vec::new();
        write_event_log_jsonl(res.state.event_log(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 6);
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        for key in ["iteration", "round", "rule", "variable", "value"] {
            assert!(first.get(key).is_some(), "missing {key}");
        }
    }
}
