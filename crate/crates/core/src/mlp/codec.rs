use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Lower end of the sigmoid band targets are mapped into.
pub const OUT_LO: f64 = 0.1;
/// Upper end of the sigmoid band targets are mapped into.
pub const OUT_HI: f64 = 0.9;

/// Affine map between physical targets in `[lo, hi]` and `[0.1, 0.9]`.
///
/// `lo == hi == 0` denotes the identity codec, which is what the weights file
/// stores for networks trained on raw targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetCodec {
    lo: f32,
    hi: f32,
}

impl TargetCodec {
    pub const IDENTITY: TargetCodec = TargetCodec { lo: 0.0, hi: 0.0 };

    pub fn new(lo: f32, hi: f32) -> Result<Self> {
        if lo == 0.0 && hi == 0.0 {
            return Ok(Self::IDENTITY);
        }
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::Codec(format!("degenerate target range [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// Codec spanning the smallest and largest target value.
    pub fn fit(targets: &Matrix) -> Result<Self> {
        let (lo, hi) = targets
            .as_slice()
            .iter()
            .fold((f32::INFINITY, f32::NEG_INFINITY), |(lo, hi), &t| (lo.min(t), hi.max(t)));
        if lo == hi {
            return Err(Error::Codec(format!("all targets equal {lo}")));
        }
        Self::new(lo, hi)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    pub fn range(&self) -> (f32, f32) {
        (self.lo, self.hi)
    }

    pub fn encode_value(&self, t: f32) -> f32 {
        if self.is_identity() {
            return t;
        }
        let (lo, hi) = (self.lo as f64, self.hi as f64);
        (OUT_LO + (OUT_HI - OUT_LO) * (t as f64 - lo) / (hi - lo)) as f32
    }

    pub fn decode_value(&self, y: f32) -> f32 {
        if self.is_identity() {
            return y;
        }
        let (lo, hi) = (self.lo as f64, self.hi as f64);
        (lo + (y as f64 - OUT_LO) * (hi - lo) / (OUT_HI - OUT_LO)) as f32
    }

    pub fn encode(&self, targets: &Matrix) -> Matrix {
        targets.map(|t| self.encode_value(t))
    }

    pub fn decode(&self, outputs: &Matrix) -> Matrix {
        outputs.map(|y| self.decode_value(y))
    }
}

impl Default for TargetCodec {
    fn default() -> Self {
        Self::IDENTITY
    }
}
