//! Network weight files.
//!
//! ```json
//! {"layers": [{"activation": "relu", "bias": [0.0], "weights": [[1.0, -1.0]]}]}
//! ```
//!
//! `weights` is row-major, one row per output neuron.

use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use symreach::{ActivationKind, Layer, Network};

use crate::error::{CliError, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerFile {
    activation: String,
    bias: Vec<f64>,
    weights: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    layers: Vec<LayerFile>,
}

pub fn parse_network(text: &str) -> Result<Network> {
    let file: NetworkFile = serde_json::from_str(text)?;
    let mut layers = Vec::with_capacity(file.layers.len());
    for (k, l) in file.layers.into_iter().enumerate() {
        let activation: ActivationKind = l
            .activation
            .parse()
            .map_err(|e: symreach::Error| CliError::config(format!("layer {k}: {e}")))?;
        let cols = l.weights.first().map_or(0, Vec::len);
        if l.weights.iter().any(|r| r.len() != cols) {
            return Err(CliError::config(format!("layer {k}: ragged weight matrix")));
        }
        let w = Array2::from_shape_vec((l.weights.len(), cols), l.weights.concat())
            .map_err(|e| CliError::config(format!("layer {k}: {e}")))?;
        layers.push(Layer::new(w, Array1::from(l.bias), activation)?);
    }
    Ok(Network::new(layers)?)
}

pub fn load_network(path: &Path) -> Result<Network> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    parse_network(&text)
}

pub fn network_to_json(net: &Network) -> String {
    let file = NetworkFile {
        layers: net
            .layers()
            .iter()
            .map(|l| LayerFile {
                activation: l.activation().name().to_owned(),
                bias: l.bias().to_vec(),
                weights: l.weights().rows().into_iter().map(|r| r.to_vec()).collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("network serializes")
}
