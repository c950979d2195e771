//! Versioned self-describing checkpoint container.
//!
//! Byte layout (all integers little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "PHNN"
//! 4       4     u32 format version (currently 1)
//! 8       8     u64 header length H in bytes
//! 16      H     UTF-8 JSON header
//! 16+H    ..    payload: f64 little-endian values for each tensor,
//!               concatenated in header order, row-major
//! ```
//!
//! The JSON header carries `{"meta": <caller JSON>, "tensors":
//! [{"name": .., "shape": [..]}, ..]}`. `meta` is where callers store
//! the architecture tag, window length and the feature configuration
//! (bin count, layout, normalizer) the parameters were trained with.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::network::{Layer, Network};
use crate::tensor::Tensor;
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"PHNN";
const VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct HeaderTensor {
    name: String,
    shape: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    meta: Value,
    tensors: Vec<HeaderTensor>,
}

/// In-memory form of a checkpoint file: caller metadata plus named
/// tensors.
#[derive(Debug, Clone)]
pub struct Container {
    pub meta: Value,
    pub tensors: Vec<(String, Tensor)>,
}

impl Container {
    pub fn new(meta: Value) -> Self {
        Container {
            meta,
            tensors: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, t: Tensor) {
        self.tensors.push((name.into(), t));
    }

    pub fn tensor(&self, name: &str) -> Option<&Tensor> {
        self.tensors.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let header = Header {
            meta: self.meta.clone(),
            tensors: self
                .tensors
                .iter()
                .map(|(n, t)| HeaderTensor {
                    name: n.clone(),
                    shape: t.shape().to_vec(),
                })
                .collect(),
        };
        let header_bytes = serde_json::to_vec(&header)?;
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(header_bytes.len() as u64).to_le_bytes())?;
        w.write_all(&header_bytes)?;
        for (_, t) in &self.tensors {
            for v in t.data() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::BadCheckpoint(format!(
                "bad magic {magic:?} in {}",
                path.display()
            )));
        }
        let mut v4 = [0u8; 4];
        r.read_exact(&mut v4)?;
        let version = u32::from_le_bytes(v4);
        if version != VERSION {
            return Err(Error::BadCheckpoint(format!(
                "unsupported version {version}"
            )));
        }
        let mut l8 = [0u8; 8];
        r.read_exact(&mut l8)?;
        let hlen = u64::from_le_bytes(l8) as usize;
        let mut hbytes = vec![0u8; hlen];
        r.read_exact(&mut hbytes)?;
        let header: Header = serde_json::from_slice(&hbytes)?;
        let mut tensors = Vec::with_capacity(header.tensors.len());
        for ht in header.tensors {
            let count: usize = ht.shape.iter().product();
            let mut data = vec![0.0f64; count];
            let mut buf = [0u8; 8];
            for v in &mut data {
                r.read_exact(&mut buf)?;
                *v = f64::from_le_bytes(buf);
            }
            let t = Tensor::from_vec(&ht.shape, data)
                .map_err(|_| Error::BadCheckpoint(format!("bad shape {:?}", ht.shape)))?;
            tensors.push((ht.name, t));
        }
        Ok(Container {
            meta: header.meta,
            tensors,
        })
    }
}

/// Serializable description of a network's layer stack (shapes and
/// hyper-structure; the parameter payload travels separately).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub layers: Vec<Value>,
}

impl Network {
    /// Pack structure + parameters into a container. `meta` keys the
    /// caller wants to keep travel alongside under `"meta"`.
    pub fn to_container(&self, mut meta: Value) -> Container {
        let structure: Vec<Value> = self
            .layers
            .iter()
            .map(|l| serde_json::to_value(LayerDescr::of(l)).unwrap())
            .collect();
        if !meta.is_object() {
            meta = serde_json::json!({});
        }
        meta["layer_structure"] = Value::Array(structure);
        let mut c = Container::new(meta);
        for (i, layer) in self.layers.iter().enumerate() {
            for (j, p) in layer.params().into_iter().enumerate() {
                c.push(format!("layer{i}.p{j}"), p.clone());
            }
        }
        c
    }

    pub fn from_container(c: &Container) -> Result<Network> {
        let structure = c
            .meta
            .get("layer_structure")
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::BadCheckpoint("missing layer_structure".into()))?;
        let mut layers = Vec::with_capacity(structure.len());
        for (i, lv) in structure.iter().enumerate() {
            let descr: LayerDescr = serde_json::from_value(lv.clone())?;
            let fetch = |j: usize| -> Result<Tensor> {
                c.tensor(&format!("layer{i}.p{j}"))
                    .cloned()
                    .ok_or_else(|| Error::BadCheckpoint(format!("missing tensor layer{i}.p{j}")))
            };
            layers.push(descr.build(&fetch)?);
        }
        Ok(Network::new(layers))
    }
}

/// Minimal structural facts needed to rebuild each layer around its
/// parameter payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum LayerDescr {
    Dense { act: crate::Activation },
    Conv1d { act: crate::Activation, stride: usize },
    Maxpool1d { pool: usize },
    Flatten,
    Lstm,
    Blstm,
    Softmax,
}

impl LayerDescr {
    fn of(layer: &Layer) -> LayerDescr {
        match layer {
            Layer::Dense(l) => LayerDescr::Dense { act: l.act },
            Layer::Conv1d(l) => LayerDescr::Conv1d {
                act: l.act,
                stride: l.stride,
            },
            Layer::MaxPool1d(l) => LayerDescr::Maxpool1d { pool: l.pool },
            Layer::Flatten => LayerDescr::Flatten,
            Layer::Lstm(_) => LayerDescr::Lstm,
            Layer::Blstm(_) => LayerDescr::Blstm,
            Layer::Softmax => LayerDescr::Softmax,
        }
    }

    fn build(&self, fetch: &dyn Fn(usize) -> Result<Tensor>) -> Result<Layer> {
        use crate::conv1d::Conv1d;
        use crate::dense::Dense;
        use crate::lstm::{Blstm, Lstm, LstmParams};
        use crate::pool::MaxPool1d;
        Ok(match self {
            LayerDescr::Dense { act } => Layer::Dense(Dense {
                w: fetch(0)?,
                b: fetch(1)?,
                act: *act,
            }),
            LayerDescr::Conv1d { act, stride } => Layer::Conv1d(Conv1d {
                w: fetch(0)?,
                b: fetch(1)?,
                act: *act,
                stride: *stride,
            }),
            LayerDescr::Maxpool1d { pool } => Layer::MaxPool1d(MaxPool1d { pool: *pool }),
            LayerDescr::Flatten => Layer::Flatten,
            LayerDescr::Lstm => Layer::Lstm(Lstm {
                params: LstmParams {
                    wx: fetch(0)?,
                    wh: fetch(1)?,
                    b: fetch(2)?,
                },
            }),
            LayerDescr::Blstm => Layer::Blstm(Blstm {
                fwd: Lstm {
                    params: LstmParams {
                        wx: fetch(0)?,
                        wh: fetch(1)?,
                        b: fetch(2)?,
                    },
                },
                bwd: Lstm {
                    params: LstmParams {
                        wx: fetch(3)?,
                        wh: fetch(4)?,
                        b: fetch(5)?,
                    },
                },
            }),
            LayerDescr::Softmax => Layer::Softmax,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::Activation;
    use crate::dense::Dense;
    use crate::lstm::Blstm;

    #[test]
    fn container_roundtrips_bytes_exactly() {
        let dir = std::env::temp_dir().join(format!("ckpt-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("net.ckpt");

        let net = Network::new(vec![
            Layer::Blstm(Blstm::new(4, 3, 7)),
            Layer::Dense(Dense::new(6, 2, Activation::Identity, 8)),
            Layer::Softmax,
        ]);
        let meta = serde_json::json!({"arch": "test", "window": 5, "bins": 8});
        let c = net.to_container(meta);
        c.save(&path).unwrap();

        let c2 = Container::load(&path).unwrap();
        assert_eq!(c2.meta["arch"], "test");
        assert_eq!(c2.meta["window"], 5);
        let net2 = Network::from_container(&c2).unwrap();
        assert_eq!(net.param_count(), net2.param_count());
        for (a, b) in net.params().iter().zip(net2.params()) {
            assert_eq!(a.data(), b.data());
            assert_eq!(a.shape(), b.shape());
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn bad_magic_is_rejected() {
        let dir = std::env::temp_dir().join(format!("ckpt-bad-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("junk.ckpt");
        std::fs::write(&path, b"NOPE0000000000000000").unwrap();
        assert!(matches!(
            Container::load(&path),
            Err(Error::BadCheckpoint(_))
        ));
        std::fs::remove_dir_all(&dir).ok();
    }
}
