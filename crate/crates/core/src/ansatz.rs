use serde::{Deserialize, Serialize};

use crate::pools::Excitation;

/// Ordered excitations with one rotation angle each, applied left to right
/// on the reference determinant.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Ansatz {
    ops: Vec<Excitation>,
    angles: Vec<f64>,
}

impl Ansatz {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_parts(ops: Vec<Excitation>, angles: Vec<f64>) -> Self {
        assert_eq!(ops.len(), angles.len(), "one angle per excitation");
        Ansatz { ops, angles }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[Excitation] {
        &self.ops
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn angle(&self, k: usize) -> f64 {
        self.angles[k]
    }

    pub fn set_angle(&mut self, k: usize, theta: f64) {
        self.angles[k] = theta;
    }

    pub fn set_angles(&mut self, angles: &[f64]) {
        assert_eq!(angles.len(), self.angles.len());
        self.angles.copy_from_slice(angles);
    }

    pub fn push(&mut self, op: Excitation, theta: f64) {
        self.ops.push(op);
        self.angles.push(theta);
    }

    pub fn insert(&mut self, k: usize, op: Excitation, theta: f64) {
        self.ops.insert(k, op);
        self.angles.insert(k, theta);
    }

    pub fn remove(&mut self, k: usize) -> (Excitation, f64) {
        (self.ops.remove(k), self.angles.remove(k))
    }

    /// Copy with `op` appended at `theta`.
    pub fn with(&self, op: Excitation, theta: f64) -> Ansatz {
        let mut a = self.clone();
        a.push(op, theta);
        a
    }

    /// Copy with angle `k` replaced.
    pub fn with_angle(&self, k: usize, theta: f64) -> Ansatz {
        let mut a = self.clone();
        a.angles[k] = theta;
        a
    }

    pub fn contains(&self, op: &Excitation) -> bool {
        self.ops.contains(op)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Excitation, f64)> {
        self.ops.iter().zip(self.angles.iter().copied())
    }
}
