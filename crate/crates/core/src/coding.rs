//! Convolutional coding baseline: constraint-length-7 rate-1/2 mother code
//! (generators 133/171 octal) punctured to rate 2/3, terminated trellis,
//! and hard-decision Viterbi decoding with erasures at punctured
//! positions.

use crate::error::{Error, Result};

const MEMORY: usize = 6;
const STATES: usize = 1 << MEMORY;

/// Coding parameters. The defaults mirror the standard K=7 pair with the
/// `[1, 1, 0, 1]` puncture pattern.
#[derive(Debug, Clone)]
pub struct CodingConfig {
    pub constraint_length: usize,
    /// Generator polynomials (octal 133, 171), constraint length bits.
    pub generators: [u32; 2],
    /// Puncture pattern applied cyclically to the serialized mother
    /// stream; `true` keeps the bit.
    pub puncture: [bool; 4],
}

impl Default for CodingConfig {
    fn default() -> Self {
        CodingConfig {
            constraint_length: 7,
            generators: [0o133, 0o171],
            puncture: [true, true, false, true],
        }
    }
}

impl CodingConfig {
    /// Punctured codeword length for a `k`-bit message (termination tail
    /// included).
    pub fn coded_len(&self, k: usize) -> usize {
        let mother = 2 * (k + MEMORY);
        (0..mother).filter(|i| self.puncture[i % 4]).count()
    }

    /// Largest message length whose punctured codeword fits `capacity`
    /// bits.
    pub fn message_len_for(&self, capacity: usize) -> usize {
        let mut k = capacity * 2 / 3 + 2;
        while k > 0 && self.coded_len(k) > capacity {
            k -= 1;
        }
        k
    }
}

fn parity(v: u32) -> u8 {
    (v.count_ones() & 1) as u8
}

/// Mother-code branch outputs for one input bit from a given state.
fn branch_bits(cfg: &CodingConfig, state: usize, bit: u8) -> (u8, u8) {
    let full = ((bit as u32) << MEMORY) | state as u32;
    (parity(full & cfg.generators[0]), parity(full & cfg.generators[1]))
}

/// Encodes a message with six zero tail bits, then punctures.
pub fn conv_encode(bits: &[u8], cfg: &CodingConfig) -> Vec<u8> {
    let mut state = 0usize;
    let mut mother = Vec::with_capacity(2 * (bits.len() + MEMORY));
    for &b in bits.iter().chain([0u8; MEMORY].iter()) {
        let (o1, o2) = branch_bits(cfg, state, b & 1);
        mother.push(o1);
        mother.push(o2);
        state = ((state << 1) | (b & 1) as usize) & (STATES - 1);
    }
    mother
        .into_iter()
        .enumerate()
        .filter(|(i, _)| cfg.puncture[i % 4])
        .map(|(_, v)| v)
        .collect()
}

/// Hard-decision Viterbi decoding of a punctured codeword.
///
/// Punctured positions are treated as erasures (zero branch cost); the
/// trellis starts and ends in the all-zero state thanks to termination.
pub fn viterbi_decode(coded: &[u8], msg_len: usize, cfg: &CodingConfig) -> Result<Vec<u8>> {
    if coded.len() != cfg.coded_len(msg_len) {
        return Err(Error::dim(format!(
            "codeword length {} does not match message length {} (expected {})",
            coded.len(),
            msg_len,
            cfg.coded_len(msg_len)
        )));
    }
    let steps = msg_len + MEMORY;
    // de-puncture into (bit, known) pairs
    let mut stream = Vec::with_capacity(2 * steps);
    let mut src = coded.iter();
    for i in 0..2 * steps {
        if cfg.puncture[i % 4] {
            stream.push(Some(*src.next().expect("length checked") & 1));
        } else {
            stream.push(None);
        }
    }

    const INF: u32 = u32::MAX / 2;
    let mut metric = vec![INF; STATES];
    metric[0] = 0;
    // survivors[t][ns] = (previous state << 1) | input bit
    let mut survivors: Vec<Vec<u16>> = Vec::with_capacity(steps);
    for t in 0..steps {
        let r = (stream[2 * t], stream[2 * t + 1]);
        let mut next = vec![INF; STATES];
        let mut surv = vec![0u16; STATES];
        for state in 0..STATES {
            if metric[state] >= INF {
                continue;
            }
            let max_bit = if t < msg_len { 1 } else { 0 };
            for bit in 0..=max_bit {
                let (o1, o2) = branch_bits(cfg, state, bit);
                let mut cost = metric[state];
                if let Some(b) = r.0 {
                    cost += (b != o1) as u32;
                }
                if let Some(b) = r.1 {
                    cost += (b != o2) as u32;
                }
                let ns = ((state << 1) | bit as usize) & (STATES - 1);
                if cost < next[ns] {
                    next[ns] = cost;
                    surv[ns] = ((state as u16) << 1) | bit as u16;
                }
            }
        }
        metric = next;
        survivors.push(surv);
    }
    // traceback from the terminated zero state
    let mut state = 0usize;
    let mut bits = vec![0u8; steps];
    for t in (0..steps).rev() {
        let entry = survivors[t][state];
        bits[t] = (entry & 1) as u8;
        state = (entry >> 1) as usize;
    }
    bits.truncate(msg_len);
    Ok(bits)
}
