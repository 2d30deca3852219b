//! Invasion percolation on the σ-ary tree, grown edge by edge.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::SimRng;
use crate::trees::PlaneTree;

#[derive(Debug, Clone, Copy)]
struct FrontierEdge {
    weight: f64,
    parent: u32,
    slot: u32,
}

impl PartialEq for FrontierEdge {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for FrontierEdge {}

impl PartialOrd for FrontierEdge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FrontierEdge {
    // reversed so that the max-heap pops the lightest edge
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .weight
            .total_cmp(&self.weight)
            .then_with(|| other.parent.cmp(&self.parent))
            .then_with(|| other.slot.cmp(&self.slot))
    }
}

/// The invaded cluster after a number of steps.
///
/// Vertices are numbered in invasion order (the root is 0). Every invaded
/// vertex has all of its σ outgoing edge weights drawn; `child_weights`
/// stores them, `σ` per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct IpcRun {
    pub sigma: u32,
    /// Parent of each vertex; `u32::MAX` for the root.
    pub parent: Vec<u32>,
    /// Slot (0-based child position) of each vertex under its parent.
    pub slot: Vec<u32>,
    /// Weight of the edge invaded at each step.
    pub accepted: Vec<f64>,
    pub child_weights: Vec<f64>,
}

impl IpcRun {
    pub fn n_steps(&self) -> usize {
        self.accepted.len()
    }

    /// Weight of the edge from `v` to its child in `slot`.
    pub fn edge_weight(&self, v: u32, slot: u32) -> f64 {
        self.child_weights[v as usize * self.sigma as usize + slot as usize]
    }

    /// Running maximum of the accepted weights.
    pub fn running_max(&self) -> Vec<f64> {
        let mut m = f64::NEG_INFINITY;
        self.accepted
            .iter()
            .map(|&w| {
                m = m.max(w);
                m
            })
            .collect()
    }

    /// The invaded cluster as a plane tree, children ordered by slot.
    pub fn to_plane_tree(&self) -> PlaneTree {
        let n = self.parent.len();
        let mut children: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        for v in 1..n {
            children[self.parent[v] as usize].push((self.slot[v], v as u32));
        }
        let mut counts = Vec::with_capacity(n);
        let mut stack = vec![0u32];
        while let Some(v) = stack.pop() {
            let ch = &mut children[v as usize];
            ch.sort_unstable();
            counts.push(ch.len() as u32);
            stack.extend(ch.iter().rev().map(|c| c.1));
        }
        PlaneTree::from_counts_unchecked(counts)
    }
}

/// Runs `n_steps` of invasion percolation from the root: each step invades
/// the boundary edge of least weight. Weights are i.i.d. uniform on `[0, 1]`
/// and drawn when their parent vertex is invaded.
pub fn sample_ipc_direct(sigma: u32, n_steps: usize, rng: &mut SimRng) -> Result<IpcRun> {
    if sigma < 2 {
        return Err(Error::invalid("sigma must be at least 2"));
    }
    if n_steps < 1 {
        return Err(Error::invalid("n_steps must be at least 1"));
    }
    let s = sigma as usize;
    let mut run = IpcRun {
        sigma,
        parent: Vec::with_capacity(n_steps + 1),
        slot: Vec::with_capacity(n_steps + 1),
        accepted: Vec::with_capacity(n_steps),
        child_weights: Vec::with_capacity((n_steps + 1) * s),
    };
    let mut frontier = BinaryHeap::with_capacity(n_steps * (s - 1) + s);
    let mut invade = |run: &mut IpcRun, frontier: &mut BinaryHeap<FrontierEdge>, parent: u32, slot: u32| {
        let v = run.parent.len() as u32;
        run.parent.push(parent);
        run.slot.push(slot);
        for j in 0..sigma {
            let weight: f64 = rng.random();
            run.child_weights.push(weight);
            frontier.push(FrontierEdge {
                weight,
                parent: v,
                slot: j,
            });
        }
    };
    invade(&mut run, &mut frontier, u32::MAX, 0);
    for _ in 0..n_steps {
        let e = frontier.pop().expect("the frontier of a σ-ary tree is never empty");
        run.accepted.push(e.weight);
        invade(&mut run, &mut frontier, e.parent, e.slot);
    }
    Ok(run)
}
