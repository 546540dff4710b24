//! Fixed-rate playback of motor frames to a datagram endpoint or a file.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::net::{SocketAddr, ToSocketAddrs, UdpSocket};
use std::path::Path;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::wire::{encode_motor_frame, MotorFrame};

/// Where encoded frames go. Datagram sinks are paced at the requested frame
/// rate, one frame per datagram; writer sinks receive the concatenated
/// frames immediately.
pub enum Sink {
    Datagram(UdpSocket),
    Writer(Box<dyn Write + Send>),
}

impl Sink {
    /// Connect a datagram socket to `addr` (`host:port`).
    pub fn udp(addr: &str) -> Result<Self> {
        let target: SocketAddr = addr
            .to_socket_addrs()?
            .next()
            .ok_or_else(|| Error::Io(std::io::Error::other(format!("cannot resolve {addr}"))))?;
        let local: SocketAddr = if target.is_ipv4() {
            "0.0.0.0:0".parse().unwrap()
        } else {
            "[::]:0".parse().unwrap()
        };
        let socket = UdpSocket::bind(local)?;
        socket.connect(target)?;
        Ok(Sink::Datagram(socket))
    }

    pub fn file(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Sink::Writer(Box::new(BufWriter::new(File::create(path)?))))
    }

    pub fn writer(w: impl Write + Send + 'static) -> Self {
        Sink::Writer(Box::new(w))
    }

    fn is_paced(&self) -> bool {
        matches!(self, Sink::Datagram(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameTiming {
    pub frame_index: u32,
    pub scheduled_ms: f64,
    pub actual_ms: f64,
}

impl FrameTiming {
    /// Actual minus scheduled send time.
    pub fn jitter_ms(&self) -> f64 {
        self.actual_ms - self.scheduled_ms
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StreamReport {
    pub frames_sent: usize,
    pub bytes_sent: usize,
    /// Wall time from the first slot to the end of the last slot.
    pub duration_ms: f64,
    pub paced: bool,
    pub timings: Vec<FrameTiming>,
}

impl StreamReport {
    pub fn mean_abs_jitter_ms(&self) -> f64 {
        if self.timings.is_empty() {
            return 0.0;
        }
        self.timings
            .iter()
            .map(|t| t.jitter_ms().abs())
            .sum::<f64>()
            / self.timings.len() as f64
    }

    pub fn max_abs_jitter_ms(&self) -> f64 {
        self.timings
            .iter()
            .map(|t| t.jitter_ms().abs())
            .fold(0.0, f64::max)
    }
}

// sleep coarsely, then spin for the last stretch
fn wait_until(deadline: Instant) {
    const SPIN: Duration = Duration::from_micros(1500);
    loop {
        let now = Instant::now();
        if now >= deadline {
            return;
        }
        let left = deadline - now;
        if left > SPIN {
            std::thread::sleep(left - SPIN);
        } else {
            std::hint::spin_loop();
        }
    }
}

/// Emit `seq` at `fps`. Frame `i` is scheduled at `i / fps` seconds after
/// start and each frame holds its slot, so `n` frames take `n / fps` seconds
/// on a paced sink.
pub fn stream_sequence(seq: &[MotorFrame], fps: f64, sink: &mut Sink) -> Result<StreamReport> {
    if !(fps.is_finite() && fps > 0.0) {
        return Err(Error::out_of_range(
            "fps",
            fps,
            f64::MIN_POSITIVE,
            f64::INFINITY,
        ));
    }
    if let Some(w) = seq
        .windows(2)
        .find(|w| w[1].frame_index <= w[0].frame_index)
    {
        return Err(Error::Wire(format!(
            "frame indices must increase ({} after {})",
            w[1].frame_index, w[0].frame_index
        )));
    }
    let paced = sink.is_paced();
    if seq.is_empty() {
        return Ok(StreamReport {
            paced,
            ..Default::default()
        });
    }
    // encode everything before the timing loop starts
    let encoded = seq
        .iter()
        .map(encode_motor_frame)
        .collect::<Result<Vec<_>>>()?;

    let period = Duration::from_secs_f64(1.0 / fps);
    let mut timings = Vec::with_capacity(seq.len());
    let mut bytes_sent = 0;
    let start = Instant::now();
    for (i, (frame, bytes)) in seq.iter().zip(&encoded).enumerate() {
        let scheduled = period * i as u32;
        if paced {
            wait_until(start + scheduled);
        }
        let sent_at = start.elapsed();
        match sink {
            Sink::Datagram(sock) => {
                sock.send(bytes)?;
            }
            Sink::Writer(w) => w.write_all(bytes)?,
        }
        bytes_sent += bytes.len();
        timings.push(FrameTiming {
            frame_index: frame.frame_index,
            scheduled_ms: if paced {
                scheduled.as_secs_f64() * 1e3
            } else {
                0.0
            },
            actual_ms: sent_at.as_secs_f64() * 1e3,
        });
    }
    if paced {
        wait_until(start + period * seq.len() as u32);
    }
    if let Sink::Writer(w) = sink {
        w.flush()?;
    }
    Ok(StreamReport {
        frames_sent: seq.len(),
        bytes_sent,
        duration_ms: start.elapsed().as_secs_f64() * 1e3,
        paced,
        timings,
    })
}
