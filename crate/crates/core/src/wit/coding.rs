//! K=7 (133, 171) convolutional code punctured to rate 3/4, with a
//! hard-decision Viterbi decoder.

use super::bits::BitStream;
use crate::error::{Error, Result};

const CONSTRAINT: usize = 7;
const MEMORY: usize = CONSTRAINT - 1;
const N_STATES: usize = 1 << MEMORY;
/// Generator taps, bit 6 = current input, bit 0 = input six steps back.
const G0: u32 = 0o133;
const G1: u32 = 0o171;

/// Which of each 6 mother-code bits (A0 B0 A1 B1 A2 B2) survive puncturing.
const PUNCTURE_3_4: [bool; 6] = [true, true, true, false, false, true];

/// Number of zero tail bits appended to flush the encoder.
pub const TAIL_BITS: usize = MEMORY;

fn parity(x: u32) -> u8 {
    (x.count_ones() & 1) as u8
}

/// Encoder outputs (A, B) for every 7-bit register value.
fn output_table() -> [(u8, u8); 1 << CONSTRAINT] {
    std::array::from_fn(|reg| (parity(reg as u32 & G0), parity(reg as u32 & G1)))
}

/// Coded length after rate-3/4 puncturing of `n` encoder input bits.
pub fn punctured_len(n: usize) -> usize {
    (4 * n).div_ceil(3)
}

/// Encoder input length (payload plus tail) implied by a punctured length.
fn input_len_for(coded_len: usize) -> Option<usize> {
    let n = 3 * coded_len / 4;
    (punctured_len(n) == coded_len).then_some(n)
}

/// Coded length for a payload of `n_payload` bits, tail included.
pub fn coded_len_for_payload(n_payload: usize) -> usize {
    punctured_len(n_payload + TAIL_BITS)
}

/// Rate-1/2 mother code output, zero-tailed: A0 B0 A1 B1 ...
pub fn encode_mother(bits: &BitStream) -> BitStream {
    let table = output_table();
    let mut state = 0u32;
    let mut out = Vec::with_capacity(2 * (bits.len() + TAIL_BITS));
    for &b in bits.0.iter().chain(std::iter::repeat_n(&0u8, TAIL_BITS)) {
        let reg = ((b as u32) << MEMORY) | state;
        let (a, bb) = table[reg as usize];
        out.push(a);
        out.push(bb);
        state = reg >> 1;
    }
    BitStream(out)
}

/// Zero-tailed rate-1/2 encoding punctured to rate 3/4.
pub fn conv_encode(bits: &BitStream) -> BitStream {
    let mother = encode_mother(bits);
    BitStream(
        mother
            .0
            .iter()
            .enumerate()
            .filter(|(i, _)| PUNCTURE_3_4[i % 6])
            .map(|(_, &b)| b)
            .collect(),
    )
}

/// Received mother-code symbol: `None` marks a punctured position.
type Soft = Option<u8>;

fn depuncture(coded: &[u8], n_input: usize) -> Vec<Soft> {
    let mut out = Vec::with_capacity(2 * n_input);
    let mut it = coded.iter();
    for i in 0..2 * n_input {
        if PUNCTURE_3_4[i % 6] {
            out.push(it.next().copied());
        } else {
            out.push(None);
        }
    }
    out
}

/// Hard-decision maximum-likelihood decoding of a punctured, zero-tailed
/// codeword. Returns the payload with the tail stripped.
pub fn viterbi_decode(coded: &BitStream) -> Result<BitStream> {
    if coded.is_empty() {
        return Ok(BitStream::default());
    }
    let n_input = input_len_for(coded.len())
        .filter(|&n| n >= TAIL_BITS)
        .ok_or_else(|| {
            Error::invalid(format!(
                "coded length {} does not match the rate-3/4 puncturing pattern",
                coded.len()
            ))
        })?;
    let received = depuncture(&coded.0, n_input);
    let mut payload = viterbi_mother(&received, n_input);
    payload.truncate(n_input - TAIL_BITS);
    Ok(BitStream(payload))
}

/// Decode an unpunctured rate-1/2 stream (erasures allowed).
fn viterbi_mother(received: &[Soft], n_input: usize) -> Vec<u8> {
    const UNREACHABLE: u32 = u32::MAX / 4;
    let table = output_table();
    let mut metric = [UNREACHABLE; N_STATES];
    metric[0] = 0;
    let mut next = [0u32; N_STATES];
    let mut decisions: Vec<u64> = Vec::with_capacity(n_input);

    let mismatch = |expected: u8, got: Soft| -> u32 {
        match got {
            Some(g) => (g != expected) as u32,
            None => 0,
        }
    };

    for t in 0..n_input {
        let ra = received[2 * t];
        let rb = received[2 * t + 1];
        // branch metric per register value
        let bm: [u32; 1 << CONSTRAINT] = std::array::from_fn(|reg| {
            let (a, b) = table[reg];
            mismatch(a, ra) + mismatch(b, rb)
        });
        let mut dec = 0u64;
        for ns in 0..N_STATES {
            let u = ns >> (MEMORY - 1);
            let base = (ns & (N_STATES / 2 - 1)) << 1;
            let reg0 = (u << MEMORY) | base;
            let reg1 = reg0 | 1;
            let m0 = metric[base] + bm[reg0];
            let m1 = metric[base | 1] + bm[reg1];
            if m1 < m0 {
                next[ns] = m1;
                dec |= 1 << ns;
            } else {
                next[ns] = m0;
            }
        }
        // keep metrics bounded on long frames
        let floor = *next.iter().min().unwrap();
        for (m, n) in metric.iter_mut().zip(&next) {
            *m = (n - floor).min(UNREACHABLE);
        }
        decisions.push(dec);
    }

    // zero-tailed: the trellis terminates in state 0
    let mut state = 0usize;
    let mut out = vec![0u8; n_input];
    for t in (0..n_input).rev() {
        out[t] = (state >> (MEMORY - 1)) as u8;
        let x = ((decisions[t] >> state) & 1) as usize;
        state = ((state & (N_STATES / 2 - 1)) << 1) | x;
    }
    out
}
