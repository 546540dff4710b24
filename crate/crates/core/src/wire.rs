//! Binary motor frame encoding.
//!
//! Layout, all integers big-endian:
//!
//! | bytes | field                                   |
//! |-------|-----------------------------------------|
//! | 4     | magic `SBOT`                            |
//! | 1     | version, currently `0x01`               |
//! | 4     | frame index (`u32`)                     |
//! | 1     | actuator count `d`                      |
//! | 2·d   | values, `floor(value * 65535)` as `u16` |

use crate::error::{Error, Result};
use crate::types::ActuatorVector;

pub const MAGIC: [u8; 4] = *b"SBOT";
pub const VERSION: u8 = 0x01;
pub const HEADER_LEN: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct MotorFrame {
    pub frame_index: u32,
    pub values: ActuatorVector,
}

impl MotorFrame {
    pub fn new(frame_index: u32, values: ActuatorVector) -> Self {
        Self {
            frame_index,
            values,
        }
    }

    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + 2 * self.values.len()
    }
}

/// Number the vectors of a sequence from 0.
pub fn number_frames(seq: Vec<ActuatorVector>) -> Vec<MotorFrame> {
    seq.into_iter()
        .enumerate()
        .map(|(i, v)| MotorFrame::new(i as u32, v))
        .collect()
}

pub fn quantize(value: f64) -> u16 {
    (value * 65535.0).floor() as u16
}

pub fn encode_motor_frame(f: &MotorFrame) -> Result<Vec<u8>> {
    let count = u8::try_from(f.values.len())
        .map_err(|_| Error::Wire(format!("{} actuators exceed the 255 limit", f.values.len())))?;
    let mut out = Vec::with_capacity(f.encoded_len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&f.frame_index.to_be_bytes());
    out.push(count);
    for &v in f.values.values() {
        out.extend_from_slice(&quantize(v).to_be_bytes());
    }
    Ok(out)
}

/// Decode one frame from the start of `bytes`, returning it and the number of
/// bytes consumed.
pub fn decode_motor_frame(bytes: &[u8]) -> Result<(MotorFrame, usize)> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Wire(format!(
            "{} bytes is shorter than the header",
            bytes.len()
        )));
    }
    if bytes[..4] != MAGIC {
        return Err(Error::Wire("bad magic".into()));
    }
    if bytes[4] != VERSION {
        return Err(Error::Wire(format!("unsupported version {}", bytes[4])));
    }
    let frame_index = u32::from_be_bytes(bytes[5..9].try_into().unwrap());
    let count = bytes[9] as usize;
    let end = HEADER_LEN + 2 * count;
    if bytes.len() < end {
        return Err(Error::Wire(format!(
            "truncated payload: need {end} bytes, have {}",
            bytes.len()
        )));
    }
    let values = bytes[HEADER_LEN..end]
        .chunks_exact(2)
        .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / 65535.0)
        .collect();
    Ok((
        MotorFrame::new(frame_index, ActuatorVector::new(values)?),
        end,
    ))
}

/// Decode a concatenation of frames, as written by a file sink.
pub fn decode_stream(mut bytes: &[u8]) -> Result<Vec<MotorFrame>> {
    let mut out = Vec::new();
    while !bytes.is_empty() {
        let (f, n) = decode_motor_frame(bytes)?;
        out.push(f);
        bytes = &bytes[n..];
    }
    Ok(out)
}
