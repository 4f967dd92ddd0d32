//! Parameter checkpoints: one JSON header line listing layer shapes, then
//! every value as a little-endian f64 (per layer: weights row-major, then
//! bias). When the header sets `velocity`, the optimizer buffers follow in
//! the same layout.

use std::io::{BufRead, Read, Write};

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::{Layer, MlpParams, OptimizerState};
use crate::{Error, Result};

#[derive(Serialize, Deserialize)]
struct Header {
    layers: Vec<[usize; 2]>,
    velocity: bool,
}

fn write_values<W: Write>(params: &MlpParams, out: &mut W) -> Result<()> {
    for v in params.flat_values() {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_checkpoint<W: Write>(params: &MlpParams, state: Option<&OptimizerState>, mut out: W) -> Result<()> {
    let header = Header {
        layers: params.layers.iter().map(|l| [l.weights.nrows(), l.weights.ncols()]).collect(),
        velocity: state.is_some(),
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    write_values(params, &mut out)?;
    if let Some(state) = state {
        if !state.velocity.same_shape(params) {
            return Err(Error::Shape("velocity does not match parameters".into()));
        }
        write_values(&state.velocity, &mut out)?;
    }
    Ok(())
}

fn read_values<R: Read>(shapes: &[[usize; 2]], input: &mut R) -> Result<MlpParams> {
    let mut buf = [0u8; 8];
    let mut next = |input: &mut R| -> Result<f64> {
        input
            .read_exact(&mut buf)
            .map_err(|_| Error::format("payload", "checkpoint truncated"))?;
        Ok(f64::from_le_bytes(buf))
    };
    let mut layers = Vec::with_capacity(shapes.len());
    for &[rows, cols] in shapes {
        let mut weights = Array2::zeros((rows, cols));
        for w in weights.iter_mut() {
            *w = next(input)?;
        }
        let mut bias = Array1::zeros(rows);
        for b in bias.iter_mut() {
            *b = next(input)?;
        }
        layers.push(Layer { weights, bias });
    }
    MlpParams::new(layers)
}

pub fn read_checkpoint<R: BufRead>(mut input: R) -> Result<(MlpParams, Option<OptimizerState>)> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    let header: Header =
        serde_json::from_str(line.trim_end()).map_err(|e| Error::format("header", e.to_string()))?;
    let params = read_values(&header.layers, &mut input)?;
    let state = if header.velocity {
        Some(OptimizerState {
            velocity: read_values(&header.layers, &mut input)?,
        })
    } else {
        None
    };
    if input.read(&mut [0u8; 1])? != 0 {
        return Err(Error::format("payload", "trailing bytes after checkpoint"));
    }
    Ok((params, state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neuralnet::init_mlp;

    #[test]
    fn roundtrip_with_and_without_velocity() {
        let p = init_mlp(&[5, 4, 3], 1).unwrap();
        let mut s = OptimizerState::new(&p);
        s.velocity.flat_values_mut().enumerate().for_each(|(k, v)| *v = k as f64 * 0.5);

        let mut buf = Vec::new();
        write_checkpoint(&p, Some(&s), &mut buf).unwrap();
        let header_end = buf.iter().position(|&b| b == b'\n').unwrap();
        assert_eq!(&buf[..header_end], br#"{"layers":[[4,5],[3,4]],"velocity":true}"#);
        assert_eq!(buf.len() - header_end - 1, 2 * 8 * p.num_params());
        let (p2, s2) = read_checkpoint(&buf[..]).unwrap();
        assert_eq!(p2, p);
        assert_eq!(s2.unwrap(), s);

        let mut buf = Vec::new();
        write_checkpoint(&p, None, &mut buf).unwrap();
        let (p3, s3) = read_checkpoint(&buf[..]).unwrap();
        assert_eq!(p3, p);
        assert!(s3.is_none());
        assert!(read_checkpoint(&buf[..buf.len() - 3]).is_err());
    }
}
