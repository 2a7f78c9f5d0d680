use std::collections::VecDeque;
use std::io::{self, Read, Write};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    EvToAgt,
    AgtToEv,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscriptEntry {
    /// Position in delivery order; strictly increasing.
    pub index: u64,
    /// Protocol message number, 1 to 3.
    pub message: u8,
    pub direction: Direction,
    pub frame: Vec<u8>,
}

/// Frames as delivered to their receiver, in order. Append-only.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, message: u8, direction: Direction, frame: Vec<u8>) {
        let index = self.entries.last().map_or(0, |e| e.index + 1);
        self.entries.push(TranscriptEntry {
            index,
            message,
            direction,
            frame,
        });
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The delivered frame for protocol message `message` (1-based), if any.
    pub fn frame(&self, message: u8) -> Option<&[u8]> {
        self.entries
            .iter()
            .find(|e| e.message == message)
            .map(|e| e.frame.as_slice())
    }

    /// Concatenation of every frame, for byte-for-byte comparisons.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.entries
            .iter()
            .flat_map(|e| e.frame.iter().copied())
            .collect()
    }
}

/// Moves frames from one party to the other.
pub trait Transport {
    fn send(&mut self, frame: &[u8]) -> io::Result<()>;
    fn recv(&mut self) -> io::Result<Vec<u8>>;
}

/// Whole frames in a queue.
#[derive(Debug, Default)]
pub struct MemoryTransport {
    queue: VecDeque<Vec<u8>>,
}

impl MemoryTransport {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Transport for MemoryTransport {
    fn send(&mut self, frame: &[u8]) -> io::Result<()> {
        self.queue.push_back(frame.to_vec());
        Ok(())
    }

    fn recv(&mut self) -> io::Result<Vec<u8>> {
        self.queue
            .pop_front()
            .ok_or_else(|| io::Error::new(io::ErrorKind::WouldBlock, "no frame queued"))
    }
}

/// A byte stream carrying frames behind a 2-byte big-endian length prefix.
#[derive(Debug, Default)]
pub struct LoopbackTransport {
    stream: VecDeque<u8>,
}

impl LoopbackTransport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Bytes written but not yet read.
    pub fn buffered(&self) -> usize {
        self.stream.len()
    }
}

impl Transport for LoopbackTransport {
    fn send(&mut self, frame: &[u8]) -> io::Result<()> {
        let len = u16::try_from(frame.len()).map_err(|_| {
            io::Error::new(io::ErrorKind::InvalidInput, "frame longer than 65535 bytes")
        })?;
        self.stream.write_all(&len.to_be_bytes())?;
        self.stream.write_all(frame)
    }

    fn recv(&mut self) -> io::Result<Vec<u8>> {
        let mut len = [0u8; 2];
        self.stream.read_exact(&mut len)?;
        let mut frame = vec![0u8; u16::from_be_bytes(len) as usize];
        self.stream.read_exact(&mut frame)?;
        Ok(frame)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transcript_indices_increase() {
        let mut t = Transcript::new();
        t.push(1, Direction::EvToAgt, vec![1]);
        t.push(3, Direction::EvToAgt, vec![3, 3]);
        let idx: Vec<u64> = t.entries().iter().map(|e| e.index).collect();
        assert_eq!(idx, vec![0, 1]);
        assert_eq!(t.frame(3), Some(&[3u8, 3][..]));
        assert_eq!(t.frame(2), None);
        assert_eq!(t.to_bytes(), vec![1, 3, 3]);
    }

    #[test]
    fn transports_preserve_frames() {
        let frames = [vec![1u8, 2, 3], vec![], vec![9; 300]];
        let mut mem = MemoryTransport::new();
        let mut lo = LoopbackTransport::new();
        for f in &frames {
            mem.send(f).unwrap();
            lo.send(f).unwrap();
        }
        assert_eq!(lo.buffered(), 3 * 2 + 303);
        for f in &frames {
            assert_eq!(&mem.recv().unwrap(), f);
            assert_eq!(&lo.recv().unwrap(), f);
        }
        assert!(mem.recv().is_err());
        assert!(lo.recv().is_err());
    }
}
