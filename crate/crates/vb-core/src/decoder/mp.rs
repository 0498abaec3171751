//! Message-passing formulation of the LM and SBB decoders.
//!
//! Nodes exchange messages in two rounds per iteration. A variable message
//! carries a status flag and the verified value; a check message carries the
//! number of unverified neighbors and the residual linear combination. Edges
//! multiply the second coordinate by their weight when it leaves a variable
//! node and divide when it arrives at one. The engine is non-extrinsic: a
//! node sends the same message along all of its edges, so messages are stored
//! per node.
//!
//! Round one applies the degree-one clause and, for SBB, the equal-pair
//! clause; round two applies the zero clause. The equal-pair clause here
//! requires a non-zero common value: the zero case belongs to round two
//! (otherwise a variable adjacent to two equal zero-residual checks would be
//! claimed by both rounds). A regression test below pins that split.
//!
//! With unit weights the equal-pair clause can fire on four-cycle
//! coincidences that the node-based grouped ECN rejects, so the node-based
//! engine remains the reference for SBB on unit-weight graphs; SBB here is
//! intended for continuously weighted graphs.

use serde::{Deserialize, Serialize};

use super::{
    init_state, AlgorithmKind, ComparisonPolicy, IterationReport, RecoveryResult, Rule,
    VerificationEvent,
};
use crate::ensembles::{Measurements, SensingGraph};
use crate::error::{Error, Result};

/// Variable-to-check message: status flag plus verified value. The value is
/// meaningful only when `verified` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpMessageV {
    pub verified: bool,
    pub value: f64,
}

/// Check-to-variable message: unverified-neighbor count plus the residual
/// linear combination of unverified neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MpMessageC {
    pub unverified: u32,
    pub value: f64,
}

/// Check mapping: `(d_c - sum s_i, c_i - sum s_i * v_i)` over the incoming,
/// already weight-multiplied, variable messages. With no verified inputs this
/// reduces to the iteration-zero message `(d_c, c_i)`.
pub fn mp_phi_c(c_i: f64, messages: &[MpMessageV]) -> MpMessageC {
    let mut unverified = messages.len() as u32;
    let mut value = c_i;
    for m in messages {
        if m.verified {
            unverified -= 1;
            value -= m.value;
        }
    }
    MpMessageC { unverified, value }
}

/// Round-one variable mapping (SBB form): a degree-one input verifies
/// directly; otherwise two equal non-zero inputs verify to the common value.
/// Inputs must already be weight-divided.
pub fn mp_phi_v1(messages: &[MpMessageC], policy: &ComparisonPolicy) -> MpMessageV {
    for m in messages {
        if m.unverified == 1 {
            return MpMessageV {
                verified: true,
                value: m.value,
            };
        }
    }
    for (i, a) in messages.iter().enumerate() {
        if policy.is_zero(a.value) {
            continue;
        }
        for b in &messages[i + 1..] {
            if policy.eq(a.value, b.value) {
                return MpMessageV {
                    verified: true,
                    value: a.value,
                };
            }
        }
    }
    MpMessageV {
        verified: false,
        value: 0.0,
    }
}

/// Round-two variable mapping: any zero-valued input verifies the variable
/// to zero.
pub fn mp_phi_v2(messages: &[MpMessageC], policy: &ComparisonPolicy) -> MpMessageV {
    for m in messages {
        if policy.is_zero(m.value) {
            return MpMessageV {
                verified: true,
                value: 0.0,
            };
        }
    }
    MpMessageV {
        verified: false,
        value: 0.0,
    }
}

/// Recomputes every check's outgoing message from the current variable
/// messages; stored in the state's residual/degree arrays, which carry
/// exactly the check-message contents.
fn update_check_messages(state: &mut super::DecoderState, g: &SensingGraph, c: &Measurements) {
    for i in 0..g.m() {
        let mut d = g.d_c() as u32;
        let mut y = c.values[i];
        for (v, w) in g.chk_vars(i) {
            if state.verified[v] {
                d -= 1;
                y -= w * state.value[v];
            }
        }
        state.chk_unverified_deg[i] = d;
        state.chk_residual[i] = y;
    }
}

/// Runs the message-passing decoder. Same contract as [`super::recover`];
/// for SBB the graph should carry continuous weights (see module docs).
pub fn recover_mp(
    g: &SensingGraph,
    c: &Measurements,
    alg: AlgorithmKind,
    policy: &ComparisonPolicy,
    max_iter: u32,
) -> Result<RecoveryResult> {
    if max_iter == 0 {
        return Err(Error::Config("max_iter must be at least 1".into()));
    }
    let mut state = init_state(g, c)?;
    let mut trace = Vec::new();
    let mut incoming: Vec<(u32, f64)> = Vec::with_capacity(g.d_v());

    'outer: for iter in 1..=max_iter {
        let mut newly = [0usize; 2];
        for round in [1u8, 2u8] {
            update_check_messages(&mut state, g, c);

            // Variables process simultaneously: collect, then commit.
            let mut verdicts: Vec<(u32, f64, Rule)> = Vec::new();
            for v in 0..g.n() {
                if state.verified[v] {
                    continue;
                }
                incoming.clear();
                for (i, w) in g.var_checks(v) {
                    incoming.push((state.chk_unverified_deg[i], state.chk_residual[i] / w));
                }
                let mut chosen: Option<(f64, Rule)> = None;
                let mut consider = |val: f64, rule: Rule| -> Result<()> {
                    match chosen {
                        None => {
                            chosen = Some((val, rule));
                            Ok(())
                        }
                        Some((prev, _)) if policy.eq(prev, val) => Ok(()),
                        Some((prev, _)) => Err(Error::FalseVerificationConflict {
                            variable: v,
                            first: prev,
                            second: val,
                        }),
                    }
                };
                if round == 1 {
                    for &(d, y) in &incoming {
                        if d == 1 {
                            consider(y, Rule::Docn)?;
                        }
                    }
                    if alg.uses_ecn() {
                        for (i, &(_, a)) in incoming.iter().enumerate() {
                            if policy.is_zero(a) {
                                continue;
                            }
                            for &(_, b) in &incoming[i + 1..] {
                                if policy.eq(a, b) {
                                    consider(a, Rule::EcnCommon)?;
                                }
                            }
                        }
                    }
                } else if incoming.iter().any(|&(_, y)| policy.is_zero(y)) {
                    consider(0.0, Rule::Zcn)?;
                }
                if let Some((val, rule)) = chosen {
                    verdicts.push((v as u32, val, rule));
                }
            }

            newly[round as usize - 1] = verdicts.len();
            for (v, val, rule) in verdicts {
                state.verified[v as usize] = true;
                state.value[v as usize] = val;
                state.unverified -= 1;
                state.event_log.push(VerificationEvent {
                    variable: v,
                    value: val,
                    rule,
                    iteration: iter,
                    round,
                });
            }
        }

        state.iteration = iter;
        trace.push(IterationReport {
            newly_verified_round1: newly[0],
            newly_verified_round2: newly[1],
        });
        if newly[0] + newly[1] == 0 || state.all_verified() {
            break 'outer;
        }
    }

    // Leave the residual/degree view consistent with the final commits.
    update_check_messages(&mut state, g, c);
    let iterations = state.iteration;
    Ok(RecoveryResult {
        success: state.all_verified(),
        iterations,
        trace,
        state,
    })
}
