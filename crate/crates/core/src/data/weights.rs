//! Portable binary weights.
//!
//! ```text
//! offset  size         field
//! 0       4            magic "MLPW"
//! 4       1            version (1)
//! 5       1            L, number of weight layers
//! 6       2(L+1)       widths H^0..H^L, u16 LE
//! ..      4            codec target range lo, f32 LE
//! ..      4            codec target range hi, f32 LE  (lo == hi == 0: identity)
//! ..      4·Σ H^k(H^{k-1}+1)  weights per layer, row-major, f32 LE
//! ..      4            CRC-32 of every preceding byte, u32 LE
//! ```
//!
//! All layers are sigmoid; the format carries no activation tags.

use std::fs;
use std::path::Path;

use crate::data::write_atomic;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::mlp::{Activation, MlpNetwork, TargetCodec};

pub const MAGIC: [u8; 4] = *b"MLPW";
pub const VERSION: u8 = 1;

const TRAILER: usize = 4;
const MIN_LEN: usize = 4 + 1 + 1 + 2 * 2 + 8 + TRAILER;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightsFile {
    pub widths: Vec<usize>,
    pub codec: TargetCodec,
    pub weights: Vec<Matrix>,
}

impl WeightsFile {
    pub fn from_network(net: &MlpNetwork, codec: TargetCodec) -> Result<Self> {
        if net.activations().iter().any(|a| *a != Activation::Sigmoid) {
            return Err(Error::Config("weights file only stores all-sigmoid networks".into()));
        }
        if net.depth() > u8::MAX as usize {
            return Err(Error::Config(format!("{} layers exceed the format limit of 255", net.depth())));
        }
        if let Some(w) = net.widths().iter().find(|&&w| w > u16::MAX as usize) {
            return Err(Error::Config(format!("layer width {w} exceeds the format limit of 65535")));
        }
        Ok(Self {
            widths: net.widths().to_vec(),
            codec,
            weights: net.weights().to_vec(),
        })
    }

    pub fn into_network(self) -> Result<(MlpNetwork, TargetCodec)> {
        let depth = self.weights.len();
        let net = MlpNetwork::from_parts(self.widths, self.weights, vec![Activation::Sigmoid; depth])?;
        Ok((net, self.codec))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.weights.len() as u8);
        for &w in &self.widths {
            out.extend_from_slice(&(w as u16).to_le_bytes());
        }
        let (lo, hi) = self.codec.range();
        out.extend_from_slice(&lo.to_le_bytes());
        out.extend_from_slice(&hi.to_le_bytes());
        for m in &self.weights {
            for v in m.as_slice() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MIN_LEN {
            return Err(Error::Integrity(format!("weights file truncated ({} bytes)", bytes.len())));
        }
        let (body, trailer) = bytes.split_at(bytes.len() - TRAILER);
        let stored = u32::from_le_bytes(trailer.try_into().unwrap());
        let actual = crc32fast::hash(body);
        if stored != actual {
            return Err(Error::Integrity(format!(
                "weights checksum {actual:08x} != stored {stored:08x}"
            )));
        }
        if body[..4] != MAGIC {
            return Err(Error::Integrity("bad magic, not a weights file".into()));
        }
        if body[4] != VERSION {
            return Err(Error::Integrity(format!("unsupported weights version {}", body[4])));
        }

        let mut cursor = Reader { buf: body, pos: 6 };
        let depth = body[5] as usize;
        let mut widths = Vec::with_capacity(depth + 1);
        for _ in 0..=depth {
            widths.push(u16::from_le_bytes(cursor.take()?) as usize);
        }
        if depth == 0 || widths.contains(&0) {
            return Err(Error::Integrity(format!("invalid layer widths {widths:?}")));
        }
        let lo = f32::from_le_bytes(cursor.take()?);
        let hi = f32::from_le_bytes(cursor.take()?);
        let codec = TargetCodec::new(lo, hi).map_err(|e| Error::Integrity(e.to_string()))?;

        let mut weights = Vec::with_capacity(depth);
        for pair in widths.windows(2) {
            let (rows, cols) = (pair[1], pair[0] + 1);
            let values = (0..rows * cols)
                .map(|_| cursor.take().map(f32::from_le_bytes))
                .collect::<Result<Vec<_>>>()?;
            weights.push(Matrix::new(rows, cols, values)?);
        }
        if cursor.pos != body.len() {
            return Err(Error::Integrity(format!(
                "{} trailing bytes after payload",
                body.len() - cursor.pos
            )));
        }
        Ok(Self { widths, codec, weights })
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let slice = self
            .buf
            .get(self.pos..end)
            .ok_or_else(|| Error::Integrity("payload shorter than the layer widths require".into()))?;
        self.pos = end;
        Ok(slice.try_into().unwrap())
    }
}

pub fn write_weights(path: &Path, net: &MlpNetwork, codec: TargetCodec) -> Result<()> {
    let bytes = WeightsFile::from_network(net, codec)?.to_bytes();
    write_atomic(path, &bytes)?;
    Ok(())
}

pub fn read_weights(path: &Path) -> Result<(MlpNetwork, TargetCodec)> {
    WeightsFile::from_bytes(&fs::read(path)?)?.into_network()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_of_small_file() {
        let net = MlpNetwork::init(&[2, 2, 1], 1).unwrap();
        let bytes = WeightsFile::from_network(&net, TargetCodec::IDENTITY).unwrap().to_bytes();
        assert_eq!(&bytes[..4], b"MLPW");
        assert_eq!(bytes[4], 1);
        assert_eq!(bytes[5], 2);
        assert_eq!(&bytes[6..12], &[2, 0, 2, 0, 1, 0]);
        assert_eq!(&bytes[12..20], &[0; 8]);
        assert_eq!(bytes.len(), 20 + 4 * (6 + 3) + 4);
        let w0 = net.weights()[0].get(0, 0).to_le_bytes();
        assert_eq!(&bytes[20..24], &w0);
    }

    #[test]
    fn round_trip_keeps_codec_and_weights() {
        let net = MlpNetwork::init(&[3, 10, 2], 5).unwrap();
        let codec = TargetCodec::new(-0.3, 0.3).unwrap();
        let file = WeightsFile::from_network(&net, codec).unwrap();
        let back = WeightsFile::from_bytes(&file.to_bytes()).unwrap();
        assert_eq!(back, file);
        let (net2, codec2) = back.into_network().unwrap();
        assert_eq!(net2.weights(), net.weights());
        assert_eq!(codec2, codec);
    }

    #[test]
    fn corruption_and_truncation_detected() {
        let net = MlpNetwork::init(&[2, 3, 1], 2).unwrap();
        let bytes = WeightsFile::from_network(&net, TargetCodec::IDENTITY).unwrap().to_bytes();
        for i in 0..bytes.len() {
            let mut bad = bytes.clone();
            bad[i] ^= 0x40;
            assert!(matches!(WeightsFile::from_bytes(&bad), Err(Error::Integrity(_))), "byte {i}");
        }
        assert!(WeightsFile::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        assert!(WeightsFile::from_bytes(&[]).is_err());
    }

    #[test]
    fn inconsistent_header_with_valid_crc_rejected() {
        let net = MlpNetwork::init(&[2, 3, 1], 2).unwrap();
        let mut body = WeightsFile::from_network(&net, TargetCodec::IDENTITY).unwrap().to_bytes();
        body.truncate(body.len() - 4);
        body[6] = 9; // claims 9 inputs
        let crc = crc32fast::hash(&body);
        body.extend_from_slice(&crc.to_le_bytes());
        assert!(matches!(WeightsFile::from_bytes(&body), Err(Error::Integrity(_))));
    }

    #[test]
    fn linear_layers_not_serialisable() {
        let net = MlpNetwork::init(&[2, 1], 0).unwrap().with_activation(0, Activation::Linear);
        assert!(matches!(WeightsFile::from_network(&net, TargetCodec::IDENTITY), Err(Error::Config(_))));
    }
}
