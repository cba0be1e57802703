//! JSON documents for node sets, rules and function values.
//!
//! Floats are written in the shortest decimal form that parses back to the
//! same bits, so files reload exactly and content hashes stay stable.

use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::kernels::{GaussianKernel, MeasureKind, SymmetricMeasure};
use crate::node_selection::RandomKind;
use crate::symmetry::{cardinality, GeneratorVector};
use crate::weights::{FsQuadratureRule, SymmetricNodeSet};

/// How a node set was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NodeSource {
    SparseGrid {
        /// `cc` or `gh`.
        basis: String,
        q: usize,
    },
    Random {
        kind: RandomKind,
        count: usize,
        seed: u64,
        truncate_below: Option<f64>,
    },
    Custom,
}

/// SHA-256 over the dimension and the bit patterns of the generators.
pub fn node_hash(dim: usize, generators: &[Vec<f64>]) -> String {
    let mut h = Sha256::new();
    h.update(b"fskq-nodes-v1");
    h.update((dim as u64).to_le_bytes());
    h.update((generators.len() as u64).to_le_bytes());
    for g in generators {
        for v in g {
            h.update(v.to_bits().to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSetFile {
    pub dim: usize,
    pub source: NodeSource,
    pub generators: Vec<Vec<f64>>,
    pub sizes: Vec<u64>,
    pub total_nodes: u64,
    pub hash: String,
}

impl NodeSetFile {
    pub fn new(dim: usize, source: NodeSource, generators: &[GeneratorVector]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(g) = generators.iter().find(|g| g.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: g.dim(),
            });
        }
        let sizes = generators.iter().map(cardinality).collect::<Result<Vec<_>>>()?;
        let total_nodes = sizes
            .iter()
            .try_fold(0u64, |a, &b| a.checked_add(b))
            .ok_or(Error::CardinalityOverflow)?;
        let raw: Vec<Vec<f64>> = generators.iter().map(|g| g.values().to_vec()).collect();
        Ok(Self {
            dim,
            source,
            hash: node_hash(dim, &raw),
            generators: raw,
            sizes,
            total_nodes,
        })
    }

    /// Checks the hash, canonical form and recorded sizes, and returns the
    /// generators.
    pub fn generators(&self) -> Result<Vec<GeneratorVector>> {
        let expected = node_hash(self.dim, &self.generators);
        if expected != self.hash {
            return Err(Error::HashMismatch {
                expected,
                got: self.hash.clone(),
            });
        }
        let mut out = Vec::with_capacity(self.generators.len());
        for raw in &self.generators {
            if raw.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: raw.len(),
                });
            }
            let g = GeneratorVector::new(raw)?;
            if g.values().iter().zip(raw).any(|(a, b)| a.to_bits() != b.to_bits()) {
                return Err(invalid("generators", "stored generator is not in canonical form"));
            }
            out.push(g);
        }
        let sizes = out.iter().map(cardinality).collect::<Result<Vec<_>>>()?;
        if sizes != self.sizes || sizes.iter().sum::<u64>() != self.total_nodes {
            return Err(invalid("sizes", "recorded set sizes do not match the generators"));
        }
        Ok(out)
    }

    pub fn node_set(&self) -> Result<SymmetricNodeSet> {
        let generators = self.generators()?;
        if generators.is_empty() {
            return Ok(SymmetricNodeSet::empty(self.dim));
        }
        SymmetricNodeSet::from_generators_default(&generators)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: String,
    pub length_scale: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub kind: MeasureKind,
    pub dim: usize,
}

/// A solved rule: node-set fields plus kernel, measure and weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleFile {
    pub dim: usize,
    pub source: NodeSource,
    pub generators: Vec<Vec<f64>>,
    pub sizes: Vec<u64>,
    pub total_nodes: u64,
    /// Node-set hash; values files must carry the same one.
    pub hash: String,
    pub kernel: KernelSpec,
    pub measure: MeasureSpec,
    /// One weight per fully symmetric set.
    pub weights: Vec<f64>,
    pub wce: f64,
    pub wce_unstable: bool,
    pub cond_estimate: f64,
    /// Smallest LU pivot of the weight system fell below the flagging threshold.
    #[serde(default)]
    pub ill_conditioned: bool,
    /// Hash over the node hash, kernel, measure and weights.
    pub rule_hash: String,
}

impl RuleFile {
    pub fn new(rule: &FsQuadratureRule, source: NodeSource) -> Result<Self> {
        let generators: Vec<GeneratorVector> = rule.node_set().generators().cloned().collect();
        let nodes = NodeSetFile::new(rule.measure().dim, source, &generators)?;
        let mut file = Self {
            dim: nodes.dim,
            source: nodes.source,
            generators: nodes.generators,
            sizes: nodes.sizes,
            total_nodes: nodes.total_nodes,
            hash: nodes.hash,
            kernel: KernelSpec {
                family: "gaussian".into(),
                length_scale: rule.kernel().length_scale(),
                scale: rule.kernel().scale(),
            },
            measure: MeasureSpec {
                kind: rule.measure().kind,
                dim: rule.measure().dim,
            },
            weights: rule.weights().to_vec(),
            wce: rule.wce(),
            wce_unstable: rule.wce_unstable(),
            cond_estimate: rule.cond_estimate(),
            ill_conditioned: rule.small_pivot().is_some(),
            rule_hash: String::new(),
        };
        file.rule_hash = file.compute_rule_hash();
        Ok(file)
    }

    fn compute_rule_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"fskq-rule-v1");
        h.update(self.hash.as_bytes());
        h.update(self.kernel.family.as_bytes());
        h.update(self.kernel.length_scale.to_bits().to_le_bytes());
        h.update(self.kernel.scale.to_bits().to_le_bytes());
        h.update(self.measure.kind.as_str().as_bytes());
        h.update((self.measure.dim as u64).to_le_bytes());
        for w in &self.weights {
            h.update(w.to_bits().to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn node_set_file(&self) -> NodeSetFile {
        NodeSetFile {
            dim: self.dim,
            source: self.source.clone(),
            generators: self.generators.clone(),
            sizes: self.sizes.clone(),
            total_nodes: self.total_nodes,
            hash: self.hash.clone(),
        }
    }

    /// Checks both hashes and the weight count.
    pub fn verify(&self) -> Result<()> {
        self.node_set_file().generators()?;
        let expected = self.compute_rule_hash();
        if expected != self.rule_hash {
            return Err(Error::HashMismatch {
                expected,
                got: self.rule_hash.clone(),
            });
        }
        if self.weights.len() != self.generators.len() {
            return Err(Error::DimensionMismatch {
                expected: self.generators.len(),
                got: self.weights.len(),
            });
        }
        Ok(())
    }

    pub fn kernel(&self) -> Result<GaussianKernel> {
        if self.kernel.family != "gaussian" {
            return Err(Error::NoClosedForm(format!("kernel family '{}'", self.kernel.family)));
        }
        GaussianKernel::with_scale(self.kernel.length_scale, self.kernel.scale)
    }

    pub fn measure(&self) -> Result<SymmetricMeasure> {
        SymmetricMeasure::new(self.measure.kind, self.measure.dim)
    }

    /// `Σ_j w_j Σ_{x ∈ set j} f(x)` with values given in canonical node order.
    pub fn apply(&self, values: &[f64]) -> Result<f64> {
        if values.len() as u64 != self.total_nodes {
            return Err(Error::DimensionMismatch {
                expected: self.total_nodes as usize,
                got: values.len(),
            });
        }
        let mut acc = 0.0;
        let mut offset = 0usize;
        for (&size, &w) in self.sizes.iter().zip(&self.weights) {
            let block = &values[offset..offset + size as usize];
            if let Some(&bad) = block.iter().find(|v| !v.is_finite()) {
                return Err(invalid("values", format!("non-finite value {bad}")));
            }
            acc += w * block.iter().sum::<f64>();
            offset += size as usize;
        }
        Ok(acc)
    }

    /// Like [`RuleFile::apply`], after checking that the values belong to
    /// this rule's nodes.
    pub fn apply_values_file(&self, values: &ValuesFile) -> Result<f64> {
        if values.hash != self.hash {
            return Err(Error::HashMismatch {
                expected: self.hash.clone(),
                got: values.hash.clone(),
            });
        }
        self.apply(&values.values)
    }
}

/// Integrand values at the nodes of the node set with hash `hash`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValuesFile {
    pub hash: String,
    pub values: Vec<f64>,
}

impl ValuesFile {
    pub fn evaluate<F>(nodes: &NodeSetFile, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        let set = nodes.node_set()?;
        Ok(Self {
            hash: nodes.hash.clone(),
            values: set.points().map(f).collect(),
        })
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Serialization(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn read_json_file<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    from_json(&text)
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

/// Every node as one CSV line, in canonical node order.
pub fn points_csv(set: &SymmetricNodeSet) -> String {
    let mut out = String::new();
    for p in set.points() {
        for (i, v) in p.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}
