use alloc::vec::Vec;

#[allow(unused_imports)] // float math in no_std builds; std shadows it when linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

/// Floor used for zero gains (dB) and absent interference (dBm).
pub const DB_FLOOR: f64 = -160.0;

/// `10·log10(x)` floored at [`DB_FLOOR`].
pub fn to_db_floored(linear: f64) -> f64 {
    if linear > 0.0 {
        (10.0 * linear.log10()).max(DB_FLOOR)
    } else {
        DB_FLOOR
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    V2v,
    V2i,
    Ris,
    Sense,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::V2v => "v2v",
            EdgeKind::V2i => "v2i",
            EdgeKind::Ris => "ris",
            EdgeKind::Sense => "sense",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleNode {
    pub x: f64,
    pub y: f64,
    /// `|g_{v,n}|²` in dB toward every vehicle `n`; floored off-link.
    pub link_gain_db: Vec<f64>,
    /// Remaining bits `K_{v,n}`; 0 off-link.
    pub remaining_bits: Vec<f64>,
    /// Previous-slot interference at the V2V receiver, dBm; floored off-link.
    pub interference_dbm: Vec<f64>,
    pub is_target: bool,
    /// `|g_j|²` in dB for targets, floored otherwise.
    pub sensing_gain_db: f64,
}

impl VehicleNode {
    /// `[x, y, gains.., remaining.., interference.., O, g_j]`, length `3V + 4`.
    pub fn features(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(3 * self.link_gain_db.len() + 5);
        out.push(self.x);
        out.push(self.y);
        out.extend_from_slice(&self.link_gain_db);
        out.extend_from_slice(&self.remaining_bits);
        out.extend_from_slice(&self.interference_dbm);
        out.push(if self.is_target { 1.0 } else { 0.0 });
        out.push(self.sensing_gain_db);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BsNode {
    pub x: f64,
    pub y: f64,
    /// `|g_v|²` in dB per vehicle.
    pub v2i_gain_db: Vec<f64>,
}

impl BsNode {
    pub fn features(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.v2i_gain_db.len() + 2);
        out.push(self.x);
        out.push(self.y);
        out.extend_from_slice(&self.v2i_gain_db);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RisNode {
    pub x: f64,
    pub y: f64,
    pub phases: Vec<usize>,
}

impl RisNode {
    pub fn features(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.phases.len() + 2);
        out.push(self.x);
        out.push(self.y);
        out.extend(self.phases.iter().map(|&q| q as f64));
        out
    }
}

/// Heterogeneous state graph. Vehicles are nodes `0..V`, the BS is node `V`
/// and the RIS node `V + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    /// Slots already played in this episode.
    pub slot: usize,
    pub vehicles: Vec<VehicleNode>,
    pub bs: BsNode,
    pub ris: RisNode,
    pub edges: Vec<Edge>,
}

impl Observation {
    pub fn node_count(&self) -> usize {
        self.vehicles.len() + 2
    }

    pub fn bs_index(&self) -> usize {
        self.vehicles.len()
    }

    pub fn ris_index(&self) -> usize {
        self.vehicles.len() + 1
    }
}

/// V2V links, every vehicle to the BS, every node to the RIS, and targets to the BS.
pub(crate) fn build_edges(n_vehicles: usize, pairs: &[(usize, usize)], targets: &[usize]) -> Vec<Edge> {
    let bs = n_vehicles;
    let ris = n_vehicles + 1;
    let mut edges = Vec::with_capacity(pairs.len() + 2 * n_vehicles + 1 + targets.len());
    edges.extend(pairs.iter().map(|&(src, dst)| Edge { src, dst, kind: EdgeKind::V2v }));
    edges.extend((0..n_vehicles).map(|v| Edge { src: v, dst: bs, kind: EdgeKind::V2i }));
    edges.extend((0..n_vehicles).map(|v| Edge { src: v, dst: ris, kind: EdgeKind::Ris }));
    edges.push(Edge { src: bs, dst: ris, kind: EdgeKind::Ris });
    edges.extend(targets.iter().map(|&j| Edge { src: j, dst: bs, kind: EdgeKind::Sense }));
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_floor() {
        assert_eq!(to_db_floored(0.0), DB_FLOOR);
        assert_eq!(to_db_floored(1e-30), DB_FLOOR);
        assert!((to_db_floored(1e-3) + 30.0).abs() < 1e-12);
    }

    #[test]
    fn edge_topology() {
        let edges = build_edges(3, &[(0, 1), (1, 0), (2, 1)], &[2]);
        assert_eq!(edges.len(), 3 + 3 + 3 + 1 + 1);
        assert_eq!(edges.iter().filter(|e| e.kind == EdgeKind::Sense).count(), 1);
        assert!(edges.iter().all(|e| e.src < 5 && e.dst < 5 && e.src != e.dst));
    }
}
