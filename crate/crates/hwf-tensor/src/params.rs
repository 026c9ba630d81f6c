//! Named parameter storage with deterministic ordering.

use std::collections::HashMap;
use std::fmt;

use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, Var};

#[derive(Debug)]
pub enum TensorError {
    UnknownParam(String),
    DuplicateParam(String),
    Checkpoint(String),
    Io(std::io::Error),
}

impl fmt::Display for TensorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnknownParam(name) => write!(f, "unknown parameter `{name}`"),
            Self::DuplicateParam(name) => write!(f, "parameter `{name}` registered twice"),
            Self::Checkpoint(msg) => write!(f, "bad checkpoint: {msg}"),
            Self::Io(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for TensorError {}

impl From<std::io::Error> for TensorError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

/// Insertion-ordered map of named parameter tensors. Iteration, checkpoint
/// layout, and optimizer state all follow registration order.
#[derive(Debug, Clone, Default)]
pub struct ParamStore {
    entries: Vec<(String, Array2<f64>)>,
    index: HashMap<String, usize>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: &str, value: Array2<f64>) -> Result<(), TensorError> {
        if self.index.contains_key(name) {
            return Err(TensorError::DuplicateParam(name.to_string()));
        }
        self.index.insert(name.to_string(), self.entries.len());
        self.entries.push((name.to_string(), value));
        Ok(())
    }

    /// Registers a matrix with symmetric uniform init scaled by fan-in and
    /// fan-out.
    pub fn register_xavier(
        &mut self,
        name: &str,
        rows: usize,
        cols: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<(), TensorError> {
        let bound = (6.0 / (rows + cols) as f64).sqrt();
        let value = Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-bound..bound));
        self.register(name, value)
    }

    pub fn register_zeros(&mut self, name: &str, rows: usize, cols: usize) -> Result<(), TensorError> {
        self.register(name, Array2::zeros((rows, cols)))
    }

    pub fn register_value(&mut self, name: &str, v: Array2<f64>) -> Result<(), TensorError> {
        self.register(name, v)
    }

    pub fn get(&self, name: &str) -> Result<&Array2<f64>, TensorError> {
        self.index
            .get(name)
            .map(|&i| &self.entries[i].1)
            .ok_or_else(|| TensorError::UnknownParam(name.to_string()))
    }

    pub fn get_mut(&mut self, name: &str) -> Result<&mut Array2<f64>, TensorError> {
        match self.index.get(name) {
            Some(&i) => Ok(&mut self.entries[i].1),
            None => Err(TensorError::UnknownParam(name.to_string())),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Array2<f64>)> {
        self.entries.iter().map(|(n, v)| (n.as_str(), v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn value_count(&self) -> usize {
        self.entries.iter().map(|(_, v)| v.len()).sum()
    }

    /// Inserts every parameter into `graph` as a gradient-tracked leaf,
    /// in registration order. The returned binding maps names to vars and
    /// collects gradients after backprop.
    pub fn bind(&self, graph: &mut Graph) -> Binding {
        let mut vars = Vec::with_capacity(self.entries.len());
        for (_, v) in &self.entries {
            vars.push(graph.param(v.clone()));
        }
        Binding { vars, index: self.index.clone() }
    }
}

/// Parameter vars for one forward pass.
pub struct Binding {
    vars: Vec<Var>,
    index: HashMap<String, usize>,
}

impl Binding {
    pub fn var(&self, name: &str) -> Var {
        self.vars[*self
            .index
            .get(name)
            .unwrap_or_else(|| panic!("unknown parameter `{name}`"))]
    }

    pub fn vars_in_order(&self) -> &[Var] {
        &self.vars
    }
}
