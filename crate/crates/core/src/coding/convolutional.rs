use crate::{Error, Result};

pub const CONSTRAINT_LENGTH: usize = 7;
/// Octal 133 and 171.
pub const GENERATORS: [u32; 2] = [0o133, 0o171];
pub const TAIL_BITS: usize = CONSTRAINT_LENGTH - 1;
const STATES: usize = 1 << TAIL_BITS;

#[inline]
fn outputs(state: usize, bit: u8) -> [u8; 2] {
    let reg = ((bit as u32) << TAIL_BITS) | state as u32;
    GENERATORS.map(|g| ((reg & g).count_ones() & 1) as u8)
}

#[inline]
fn next_state(state: usize, bit: u8) -> usize {
    ((bit as usize) << (TAIL_BITS - 1)) | (state >> 1)
}

/// Rate-1/2 feedforward encoding terminated with `TAIL_BITS` zeros.
/// Output length is `2 (bits.len() + TAIL_BITS)`.
pub fn conv_encode(bits: &[u8]) -> Vec<u8> {
    let mut state = 0;
    let mut out = Vec::with_capacity(2 * (bits.len() + TAIL_BITS));
    for &b in bits.iter().chain(&[0; TAIL_BITS]) {
        out.extend_from_slice(&outputs(state, b & 1));
        state = next_state(state, b & 1);
    }
    out
}

/// Viterbi decoding of a terminated codeword from coded-bit LLRs
/// (positive favors bit 0). Returns the message without the tail.
pub fn soft_decode(llrs: &[f64]) -> Result<Vec<u8>> {
    if !llrs.len().is_multiple_of(2) || llrs.len() < 2 * TAIL_BITS {
        return Err(Error::LengthMismatch {
            expected: 2 * (llrs.len() / 2).max(TAIL_BITS),
            actual: llrs.len(),
        });
    }
    let steps = llrs.len() / 2;
    let mut metric = [f64::NEG_INFINITY; STATES];
    metric[0] = 0.0;
    let mut survivors: Vec<[u8; STATES]> = Vec::with_capacity(steps);
    for k in 0..steps {
        let (l0, l1) = (0.5 * llrs[2 * k], 0.5 * llrs[2 * k + 1]);
        let bm = |c: [u8; 2]| (if c[0] == 0 { l0 } else { -l0 }) + (if c[1] == 0 { l1 } else { -l1 });
        let mut next = [f64::NEG_INFINITY; STATES];
        let mut from = [0u8; STATES];
        let inputs: &[u8] = if k + TAIL_BITS >= steps { &[0] } else { &[0, 1] };
        for (s, &m) in metric.iter().enumerate() {
            if m == f64::NEG_INFINITY {
                continue;
            }
            for &b in inputs {
                let t = next_state(s, b);
                let cand = m + bm(outputs(s, b));
                if cand > next[t] {
                    next[t] = cand;
                    from[t] = s as u8;
                }
            }
        }
        metric = next;
        survivors.push(from);
    }
    let mut bits = vec![0u8; steps];
    let mut state = 0usize;
    for k in (0..steps).rev() {
        bits[k] = (state >> (TAIL_BITS - 1)) as u8 & 1;
        state = survivors[k][state] as usize;
    }
    bits.truncate(steps - TAIL_BITS);
    Ok(bits)
}

/// Hamming-metric Viterbi decoding of `+1`/`-1` coded-bit decisions.
pub fn hard_decode(decisions: &[i8]) -> Result<Vec<u8>> {
    let llrs: Vec<f64> = decisions.iter().map(|&d| if d > 0 { 1.0 } else { -1.0 }).collect();
    soft_decode(&llrs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn to_llr(code: &[u8], mag: f64) -> Vec<f64> {
        code.iter().map(|&c| if c == 0 { mag } else { -mag }).collect()
    }

    #[test]
    fn all_zero() {
        assert_eq!(conv_encode(&[0; 20]), vec![0; 52]);
        assert_eq!(soft_decode(&[1.0; 52]).unwrap(), vec![0; 20]);
    }

    #[test]
    fn impulse_response_matches_generators() {
        let code = conv_encode(&[1]);
        let g0: Vec<u8> = code.iter().step_by(2).copied().collect();
        let g1: Vec<u8> = code.iter().skip(1).step_by(2).copied().collect();
        let taps = |g: u32| (0..7).map(|k| ((g >> (6 - k)) & 1) as u8).collect::<Vec<_>>();
        assert_eq!(g0, taps(GENERATORS[0]));
        assert_eq!(g1, taps(GENERATORS[1]));
    }

    #[test]
    fn round_trip_random_messages() {
        let mut rng = rng::seeded(11);
        for _ in 0..1000 {
            let msg: Vec<u8> = (0..64).map(|_| rng.random_range(0..2)).collect();
            let code = conv_encode(&msg);
            assert_eq!(soft_decode(&to_llr(&code, 20.0)).unwrap(), msg);
        }
    }

    #[test]
    fn corrects_scattered_errors() {
        let mut rng = rng::seeded(12);
        let msg: Vec<u8> = (0..200).map(|_| rng.random_range(0..2)).collect();
        let code = conv_encode(&msg);
        let mut hard: Vec<i8> = code.iter().map(|&c| if c == 0 { 1 } else { -1 }).collect();
        for k in (5..hard.len()).step_by(37) {
            hard[k] = -hard[k];
        }
        assert_eq!(hard_decode(&hard).unwrap(), msg);
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(soft_decode(&[1.0; 13]).is_err());
        assert!(soft_decode(&[1.0; 10]).is_err());
        assert_eq!(soft_decode(&[1.0; 12]).unwrap(), Vec::<u8>::new());
    }
}
