//! Ensembles of sensing graphs and input signals, and the linear encoder.
//!
//! A sensing graph is a weighted `(d_v, d_c)`-biregular bipartite graph with
//! `n` variable nodes (signal elements) and `m = n*d_v/d_c` check nodes
//! (measurements). Graphs are sampled configuration-model style with
//! swap-repair of parallel edges, so every realization is simple. Signals are
//! i.i.d. mixtures: zero with probability `1 - alpha`, otherwise drawn from a
//! value distribution.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream, stream_rng};

/// Default magnitude range for [`ValueMode::UniformInteger`]: values are
/// drawn uniformly from `±[1, 2^31]`.
pub const DEFAULT_INTEGER_RANGE: u64 = 1 << 31;

/// Edge-weight distribution of the sensing graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WeightMode {
    /// Every weight equals one.
    AllOnes,
    /// Weights drawn i.i.d. uniformly from `(lo, hi)`. The interval must not
    /// contain zero, so weights are strictly non-zero.
    ContinuousUniform { lo: f64, hi: f64 },
}

/// Parameters of the biregular sensing-graph ensemble.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GraphConfig {
    /// Number of variable nodes.
    pub n: usize,
    /// Degree of every variable node.
    pub d_v: usize,
    /// Degree of every check node.
    pub d_c: usize,
    pub weight_mode: WeightMode,
    pub seed: u64,
}

impl GraphConfig {
    pub fn all_ones(n: usize, d_v: usize, d_c: usize, seed: u64) -> Self {
        Self {
            n,
            d_v,
            d_c,
            weight_mode: WeightMode::AllOnes,
            seed,
        }
    }

    /// Number of check nodes, `n * d_v / d_c`.
    pub fn m(&self) -> usize {
        self.n * self.d_v / self.d_c
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d_v == 0 || self.d_c == 0 {
            return Err(Error::Config("n, d_v and d_c must be positive".into()));
        }
        if (self.n * self.d_v) % self.d_c != 0 {
            return Err(Error::Config(format!(
                "n*d_v = {} is not divisible by d_c = {}",
                self.n * self.d_v,
                self.d_c
            )));
        }
        if self.d_c > self.n {
            return Err(Error::Config(format!(
                "d_c = {} exceeds n = {} (parallel edges unavoidable)",
                self.d_c, self.n
            )));
        }
        if self.d_v > self.m() {
            return Err(Error::Config(format!(
                "d_v = {} exceeds m = {}",
                self.d_v,
                self.m()
            )));
        }
        if let WeightMode::ContinuousUniform { lo, hi } = self.weight_mode {
            if !(lo < hi) || (lo <= 0.0 && hi >= 0.0) {
                return Err(Error::Config(format!(
                    "weight interval ({lo}, {hi}) must be non-empty and exclude zero"
                )));
            }
        }
        Ok(())
    }
}

/// A simple weighted `(d_v, d_c)`-biregular bipartite graph in adjacency
/// form, immutable after construction.
///
/// Both adjacency views describe the same edge multiset: the check view is
/// the ground truth laid out as `m` windows of `d_c` slots, and the variable
/// view is derived from it as `n` windows of `d_v` slots.
#[derive(Debug, Clone)]
pub struct SensingGraph {
    n: usize,
    m: usize,
    d_v: usize,
    d_c: usize,
    /// Variable index per check slot; check `c` owns slots `c*d_c .. (c+1)*d_c`.
    chk_nbr: Vec<u32>,
    /// Check index per variable slot; variable `v` owns slots `v*d_v .. (v+1)*d_v`.
    var_nbr: Vec<u32>,
    /// For each variable slot, the check slot holding the same edge.
    var_edge_pos: Vec<u32>,
    /// Per-check-slot weights; `None` means all weights are one.
    weights: Option<Vec<f64>>,
}

impl SensingGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d_v(&self) -> usize {
        self.d_v
    }

    pub fn d_c(&self) -> usize {
        self.d_c
    }

    pub fn is_all_ones(&self) -> bool {
        self.weights.is_none()
    }

    fn chk_slot_weight(&self, slot: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[slot])
    }

    /// Checks adjacent to variable `v`, with edge weights.
    pub fn var_checks(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = v * self.d_v;
        (lo..lo + self.d_v).map(move |s| {
            (
                self.var_nbr[s] as usize,
                self.chk_slot_weight(self.var_edge_pos[s] as usize),
            )
        })
    }

    /// Variables adjacent to check `c`, with edge weights.
    pub fn chk_vars(&self, c: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = c * self.d_c;
        (lo..lo + self.d_c).map(move |s| (self.chk_nbr[s] as usize, self.chk_slot_weight(s)))
    }

    /// Check slot (edge position) of the `k`-th edge of variable `v`.
    pub fn var_edge_slot(&self, v: usize, k: usize) -> usize {
        self.var_edge_pos[v * self.d_v + k] as usize
    }

    /// Builds a graph directly from a flat check-view adjacency (variable
    /// index per check slot) and optional per-slot weights. Validates
    /// biregularity, simplicity and non-zero weights.
    pub fn from_check_view(
        n: usize,
        d_v: usize,
        d_c: usize,
        chk_nbr: Vec<u32>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        if d_c == 0 || d_v == 0 || n == 0 {
            return Err(Error::Config("degrees and n must be positive".into()));
        }
        if (n * d_v) % d_c != 0 || chk_nbr.len() != n * d_v {
            return Err(Error::Dimension(format!(
                "check view has {} slots, expected n*d_v = {}",
                chk_nbr.len(),
                n * d_v
            )));
        }
        let m = n * d_v / d_c;
        if let Some(w) = &weights {
            if w.len() != chk_nbr.len() {
                return Err(Error::Dimension("weight/edge count mismatch".into()));
            }
            if w.iter().any(|&x| x == 0.0 || !x.is_finite()) {
                return Err(Error::Config("edge weights must be finite and non-zero".into()));
            }
        }

        let mut var_deg = vec![0u32; n];
        for c in 0..m {
            let win = &chk_nbr[c * d_c..(c + 1) * d_c];
            for (i, &v) in win.iter().enumerate() {
                if v as usize >= n {
                    return Err(Error::Parse(format!("variable index {v} out of range")));
                }
                if win[..i].contains(&v) {
                    return Err(Error::Generation(format!(
                        "parallel edge: variable {v} appears twice at check {c}"
                    )));
                }
                var_deg[v as usize] += 1;
            }
        }
        if let Some(v) = var_deg.iter().position(|&d| d as usize != d_v) {
            return Err(Error::Generation(format!(
                "variable {v} has degree {}, expected {d_v}",
                var_deg[v]
            )));
        }

        // Derive the variable view by a single pass over check slots.
        let mut var_nbr = vec![0u32; n * d_v];
        let mut var_edge_pos = vec![0u32; n * d_v];
        let mut fill = vec![0usize; n];
        for (slot, &v) in chk_nbr.iter().enumerate() {
            let c = slot / d_c;
            let v = v as usize;
            let at = v * d_v + fill[v];
            var_nbr[at] = c as u32;
            var_edge_pos[at] = slot as u32;
            fill[v] += 1;
        }

        let weights = match weights {
            Some(w) if w.iter().all(|&x| x == 1.0) => None,
            other => other,
        };
        Ok(Self {
            n,
            m,
            d_v,
            d_c,
            chk_nbr,
            var_nbr,
            var_edge_pos,
            weights,
        })
    }

    /// Writes the plain-text edge-list form: header `n m d_v d_c`, then one
    /// `check_index variable_index weight` line per edge in check-slot order.
    pub fn save<W: Write>(&self, out: W) -> Result<()> {
        let mut out = BufWriter::new(out);
        writeln!(out, "{} {} {} {}", self.n, self.m, self.d_v, self.d_c)?;
        for c in 0..self.m {
            for (v, w) in self.chk_vars(c) {
                writeln!(out, "{c} {v} {w:?}")?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the format written by [`SensingGraph::save`]. Edge order within
    /// a check window is preserved, so save/load round-trips bit-exactly.
    pub fn load<R: Read>(input: R) -> Result<Self> {
        let mut lines = BufReader::new(input).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph file".into()))??;
        let head: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header: {header}"))))
            .collect::<Result<_>>()?;
        let [n, m, d_v, d_c] = head[..] else {
            return Err(Error::Parse(format!("bad header: {header}")));
        };
        if m * d_c != n * d_v {
            return Err(Error::Parse("header violates m*d_c = n*d_v".into()));
        }

        let mut chk_nbr = vec![u32::MAX; m * d_c];
        let mut weights = vec![0.0f64; m * d_c];
        let mut fill = vec![0usize; m];
        let mut edges = 0usize;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let (Some(c), Some(v), Some(w)) = (it.next(), it.next(), it.next()) else {
                return Err(Error::Parse(format!("bad edge line: {line}")));
            };
            let c: usize = c.parse().map_err(|_| Error::Parse(format!("bad check index: {line}")))?;
            let v: u32 = v.parse().map_err(|_| Error::Parse(format!("bad variable index: {line}")))?;
            let w: f64 = w.parse().map_err(|_| Error::Parse(format!("bad weight: {line}")))?;
            if c >= m || fill[c] >= d_c {
                return Err(Error::Parse(format!("check {c} overfull or out of range")));
            }
            let slot = c * d_c + fill[c];
            chk_nbr[slot] = v;
            weights[slot] = w;
            fill[c] += 1;
            edges += 1;
        }
        if edges != m * d_c {
            return Err(Error::Parse(format!(
                "expected {} edges, found {edges}",
                m * d_c
            )));
        }
        Self::from_check_view(n, d_v, d_c, chk_nbr, Some(weights))
    }
}

/// Samples a simple biregular graph from the configuration-model ensemble.
///
/// Variable stubs are shuffled into check slots; parallel edges are then
/// repaired by random degree-preserving slot swaps that never introduce new
/// parallel edges. Deterministic given `cfg.seed`.
pub fn sample_graph(cfg: &GraphConfig) -> Result<SensingGraph> {
    cfg.validate()?;
    let (n, d_v, d_c, m) = (cfg.n, cfg.d_v, cfg.d_c, cfg.m());
    let mut rng = stream_rng(cfg.seed, &[stream::GRAPH]);

    let mut chk_nbr: Vec<u32> = Vec::with_capacity(n * d_v);
    for _ in 0..20 {
        chk_nbr.clear();
        for v in 0..n as u32 {
            chk_nbr.extend(std::iter::repeat(v).take(d_v));
        }
        // Fisher-Yates; ChaCha stream keeps this reproducible.
        for i in (1..chk_nbr.len()).rev() {
            let j = rng.random_range(0..=i);
            chk_nbr.swap(i, j);
        }
        if repair_parallel_edges(&mut chk_nbr, m, d_c, &mut rng) {
            let weights = match cfg.weight_mode {
                WeightMode::AllOnes => None,
                WeightMode::ContinuousUniform { lo, hi } => {
                    let mut w = Vec::with_capacity(n * d_v);
                    for _ in 0..n * d_v {
                        let mut x = rng.random_range(lo..hi);
                        while x == 0.0 {
                            x = rng.random_range(lo..hi);
                        }
                        w.push(x);
                    }
                    Some(w)
                }
            };
            return SensingGraph::from_check_view(n, d_v, d_c, chk_nbr, weights);
        }
    }
    Err(Error::Generation(format!(
        "could not remove parallel edges for (n={n}, d_v={d_v}, d_c={d_c})"
    )))
}

/// Returns true once every check window holds distinct variables.
fn repair_parallel_edges(
    chk_nbr: &mut [u32],
    m: usize,
    d_c: usize,
    rng: &mut crate::rng::StreamRng,
) -> bool {
    let len = chk_nbr.len();
    let window_has = |buf: &[u32], c: usize, x: u32, skip: usize| -> bool {
        (c * d_c..(c + 1) * d_c).any(|s| s != skip && buf[s] == x)
    };
    for _pass in 0..200 {
        let mut dirty = false;
        for c in 0..m {
            for s in c * d_c..(c + 1) * d_c {
                let a = chk_nbr[s];
                if !window_has(chk_nbr, c, a, s) {
                    continue;
                }
                dirty = true;
                // Swap with a random slot elsewhere, only if neither window
                // gains a duplicate.
                for _try in 0..64 {
                    let t = rng.random_range(0..len);
                    let ct = t / d_c;
                    if ct == c {
                        continue;
                    }
                    let b = chk_nbr[t];
                    if a != b
                        && !window_has(chk_nbr, c, b, s)
                        && !window_has(chk_nbr, ct, a, t)
                    {
                        chk_nbr.swap(s, t);
                        break;
                    }
                }
            }
        }
        if !dirty {
            return true;
        }
    }
    false
}

/// Distribution of non-zero signal values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ValueMode {
    StandardGaussian,
    /// Non-zero integers uniform on `±[1, range]`, stored exactly in f64.
    /// Gives an exact-arithmetic regime where equality comparisons are exact
    /// and value collisions are overwhelmingly improbable.
    UniformInteger { range: u64 },
}

/// Parameters of the sparse-signal ensemble.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SignalConfig {
    pub n: usize,
    /// Probability that an element is non-zero.
    pub alpha: f64,
    pub value_mode: ValueMode,
    pub seed: u64,
}

impl SignalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!(
                "alpha = {} outside [0, 1]",
                self.alpha
            )));
        }
        if let ValueMode::UniformInteger { range } = self.value_mode {
            if range == 0 || range > 1 << 52 {
                return Err(Error::Config(format!(
                    "integer range {range} outside [1, 2^52]"
                )));
            }
        }
        Ok(())
    }
}

/// A sparse input vector with its exact support.
#[derive(Debug, Clone)]
pub struct Signal {
    pub values: Vec<f64>,
    /// Sorted indices of the non-zero entries; always `{ i : values[i] != 0 }`.
    pub support: Vec<u32>,
}

impl Signal {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_nonzero(&self, i: usize) -> bool {
        self.values[i] != 0.0
    }

    /// Density ratio `k/n` of this realization.
    pub fn density_ratio(&self) -> f64 {
        self.support.len() as f64 / self.len() as f64
    }
}

/// Samples a signal: each entry independently zero w.p. `1 - alpha`, else
/// drawn from the value mode. Deterministic given `cfg.seed`.
pub fn sample_signal(cfg: &SignalConfig) -> Result<Signal> {
    cfg.validate()?;
    let mut rng = stream_rng(cfg.seed, &[stream::SIGNAL]);
    let mut values = vec![0.0f64; cfg.n];
    let mut support = Vec::new();
    for (i, slot) in values.iter_mut().enumerate() {
        if rng.random::<f64>() >= cfg.alpha {
            continue;
        }
        let mut x = match cfg.value_mode {
            ValueMode::StandardGaussian => StandardNormal.sample(&mut rng),
            ValueMode::UniformInteger { range } => {
                let mag = rng.random_range(1..=range) as f64;
                if rng.random::<bool>() {
                    mag
                } else {
                    -mag
                }
            }
        };
        while x == 0.0 {
            x = StandardNormal.sample(&mut rng);
        }
        *slot = x;
        support.push(i as u32);
    }
    Ok(Signal { values, support })
}

/// A measurement vector `c = Gv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurements {
    pub values: Vec<f64>,
}

impl Measurements {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Encodes a signal: `c_i = sum over edges (j, w) of check i of w * v_j`.
pub fn encode(g: &SensingGraph, v: &Signal) -> Result<Measurements> {
    if v.len() != g.n() {
        return Err(Error::Dimension(format!(
            "signal length {} != n = {}",
            v.len(),
            g.n()
        )));
    }
    let values = (0..g.m())
        .map(|c| g.chk_vars(c).map(|(j, w)| w * v.values[j]).sum())
        .collect();
    Ok(Measurements { values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_dimensions_and_regularity() {
        let g = sample_graph(&GraphConfig::all_ones(6, 2, 3, 1)).unwrap();
        assert_eq!(g.m(), 4);
        for v in 0..6 {
            assert_eq!(g.var_checks(v).count(), 2);
        }
        for c in 0..4 {
            assert_eq!(g.chk_vars(c).count(), 3);
        }
    }

    #[test]
    fn divisibility_is_checked() {
        let cfg = GraphConfig::all_ones(100_000, 5, 6, 1);
        assert!(matches!(sample_graph(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn same_seed_same_graph() {
        let cfg = GraphConfig::all_ones(12, 3, 6, 99);
        let a = sample_graph(&cfg).unwrap();
        let b = sample_graph(&cfg).unwrap();
        assert_eq!(a.chk_nbr, b.chk_nbr);
        let c = sample_graph(&GraphConfig::all_ones(12, 3, 6, 100)).unwrap();
        assert_ne!(a.chk_nbr, c.chk_nbr);
    }

    #[test]
    fn no_parallel_edges_and_views_consistent() {
        for seed in 0..20 {
            let g = sample_graph(&GraphConfig::all_ones(60, 3, 6, seed)).unwrap();
            let mut from_chk: Vec<(usize, usize)> = (0..g.m())
                .flat_map(|c| g.chk_vars(c).map(move |(v, _)| (c, v)))
                .collect();
            let mut from_var: Vec<(usize, usize)> = (0..g.n())
                .flat_map(|v| g.var_checks(v).map(move |(c, _)| (c, v)))
                .collect();
            from_chk.sort_unstable();
            from_var.sort_unstable();
            assert_eq!(from_chk, from_var);
            // Simplicity: every (check, var) pair distinct.
            let before = from_chk.len();
            from_chk.dedup();
            assert_eq!(before, from_chk.len());
        }
    }

    #[test]
    fn degree_sums_match() {
        let g = sample_graph(&GraphConfig::all_ones(120, 5, 10, 3)).unwrap();
        let var_sum: usize = (0..g.n()).map(|v| g.var_checks(v).count()).sum();
        let chk_sum: usize = (0..g.m()).map(|c| g.chk_vars(c).count()).sum();
        assert_eq!(var_sum, g.n() * g.d_v());
        assert_eq!(chk_sum, var_sum);
    }

    #[test]
    fn continuous_weights_are_nonzero_and_consistent() {
        let cfg = GraphConfig {
            n: 30,
            d_v: 3,
            d_c: 6,
            weight_mode: WeightMode::ContinuousUniform { lo: 0.5, hi: 1.5 },
            seed: 5,
        };
        let g = sample_graph(&cfg).unwrap();
        assert!(!g.is_all_ones());
        let mut chk_edges: Vec<(usize, usize, u64)> = (0..g.m())
            .flat_map(|c| g.chk_vars(c).map(move |(v, w)| (c, v, w.to_bits())))
            .collect();
        let mut var_edges: Vec<(usize, usize, u64)> = (0..g.n())
            .flat_map(|v| g.var_checks(v).map(move |(c, w)| (c, v, w.to_bits())))
            .collect();
        chk_edges.sort_unstable();
        var_edges.sort_unstable();
        assert_eq!(chk_edges, var_edges);
        assert!(chk_edges.iter().all(|&(_, _, w)| f64::from_bits(w) != 0.0));
    }

    #[test]
    fn weight_interval_must_exclude_zero() {
        let cfg = GraphConfig {
            n: 12,
            d_v: 2,
            d_c: 4,
            weight_mode: WeightMode::ContinuousUniform { lo: -1.0, hi: 1.0 },
            seed: 0,
        };
        assert!(matches!(sample_graph(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn signal_degenerate_mixtures() {
        let zero = sample_signal(&SignalConfig {
            n: 50,
            alpha: 0.0,
            value_mode: ValueMode::StandardGaussian,
            seed: 1,
        })
        .unwrap();
        assert!(zero.support.is_empty());
        assert!(zero.values.iter().all(|&x| x == 0.0));

        let full = sample_signal(&SignalConfig {
            n: 50,
            alpha: 1.0,
            value_mode: ValueMode::StandardGaussian,
            seed: 1,
        })
        .unwrap();
        assert_eq!(full.support.len(), 50);
    }

    #[test]
    fn support_size_within_binomial_bound() {
        // Oracle: |support| should lie within 0.25n ± 4*sqrt(n*0.25*0.75).
        let n = 1_000_000usize;
        let cfg = SignalConfig {
            n,
            alpha: 0.25,
            value_mode: ValueMode::StandardGaussian,
            seed: 7,
        };
        let s = sample_signal(&cfg).unwrap();
        let mean = 0.25 * n as f64;
        let dev = 4.0 * (n as f64 * 0.25 * 0.75).sqrt();
        let k = s.support.len() as f64;
        assert!((k - mean).abs() <= dev, "k = {k} outside {mean} ± {dev}");
        // Repeated seed gives the identical draw.
        let s2 = sample_signal(&cfg).unwrap();
        assert_eq!(s.values, s2.values);
    }

    #[test]
    fn integer_mode_values_are_integral() {
        let s = sample_signal(&SignalConfig {
            n: 1000,
            alpha: 0.5,
            value_mode: ValueMode::UniformInteger { range: 1 << 31 },
            seed: 11,
        })
        .unwrap();
        for &i in &s.support {
            let x = s.values[i as usize];
            assert_eq!(x, x.trunc());
            assert!(x.abs() >= 1.0 && x.abs() <= (1u64 << 31) as f64);
        }
    }

    #[test]
    fn encode_matches_dense_oracle() {
        // Independent oracle: dense biadjacency matrix-vector product.
        let cfg = GraphConfig {
            n: 20,
            d_v: 3,
            d_c: 4,
            weight_mode: WeightMode::ContinuousUniform { lo: 0.25, hi: 2.0 },
            seed: 13,
        };
        let g = sample_graph(&cfg).unwrap();
        let v = sample_signal(&SignalConfig {
            n: 20,
            alpha: 0.4,
            value_mode: ValueMode::StandardGaussian,
            seed: 13,
        })
        .unwrap();

        let mut dense = vec![vec![0.0f64; g.n()]; g.m()];
        for c in 0..g.m() {
            for (j, w) in g.chk_vars(c) {
                dense[c][j] = w;
            }
        }
        let expect: Vec<f64> = dense
            .iter()
            .map(|row| row.iter().zip(&v.values).map(|(a, b)| a * b).sum())
            .collect();

        let c = encode(&g, &v).unwrap();
        for (got, want) in c.values.iter().zip(&expect) {
            assert!((got - want).abs() <= 1e-10 * want.abs().max(1.0));
        }
    }

    #[test]
    fn encode_trivial_cases() {
        let g = sample_graph(&GraphConfig::all_ones(6, 2, 3, 2)).unwrap();
        let zero = Signal {
            values: vec![0.0; 6],
            support: vec![],
        };
        assert!(encode(&g, &zero).unwrap().values.iter().all(|&x| x == 0.0));

        let mut one = zero.clone();
        one.values[3] = 2.5;
        one.support.push(3);
        let c = encode(&g, &one).unwrap();
        let neighbors: Vec<usize> = g.var_checks(3).map(|(c, _)| c).collect();
        for (i, &x) in c.values.iter().enumerate() {
            if neighbors.contains(&i) {
                assert_eq!(x, 2.5);
            } else {
                assert_eq!(x, 0.0);
            }
        }
    }

    #[test]
    fn save_load_round_trip() {
        let cfg = GraphConfig {
            n: 24,
            d_v: 3,
            d_c: 4,
            weight_mode: WeightMode::ContinuousUniform { lo: 0.1, hi: 3.0 },
            seed: 21,
        };
        let g = sample_graph(&cfg).unwrap();
        let mut buf = Vec::new();
        g.save(&mut buf).unwrap();
        let h = SensingGraph::load(&buf[..]).unwrap();
        assert_eq!(g.chk_nbr, h.chk_nbr);
        assert_eq!(g.var_nbr, h.var_nbr);
        let gw: Vec<u64> = (0..g.m())
            .flat_map(|c| g.chk_vars(c).map(|(_, w)| w.to_bits()))
            .collect();
        let hw: Vec<u64> = (0..h.m())
            .flat_map(|c| h.chk_vars(c).map(|(_, w)| w.to_bits()))
            .collect();
        assert_eq!(gw, hw);
    }
}
