//! Symbol generators behind prefix-stream points.

use crate::systems::spec::StreamSource;

/// Length of the marker word `1 0^10 1`.
pub const MARKER_LEN: u128 = 12;

/// Positions of 1s in the newprop point for base `B` that fit in `u128`.
///
/// The point is `W 0^{a_1} W 0^{a_2} W …` with `W = 1 0^10 1`,
/// `b_0 = 11`, `a_n = B^{b_{n-1} + 12}` and `b_n = b_{n-1} + a_n + 12`.
pub fn newprop_ones(base: u32) -> Vec<u128> {
    let mut ones = vec![0, MARKER_LEN - 1];
    let mut b: u128 = MARKER_LEN - 1;
    loop {
        let Ok(exp) = u32::try_from(b + MARKER_LEN) else {
            break;
        };
        let Some(a) = (base as u128).checked_pow(exp) else {
            break;
        };
        let Some(v) = a.checked_add(b + 1) else {
            break;
        };
        ones.push(v);
        ones.push(v + MARKER_LEN - 1);
        b = v + MARKER_LEN - 1;
    }
    ones
}

/// Symbol at absolute position `i` of a stream.
pub fn stream_symbol(source: &StreamSource, i: u64) -> u8 {
    match source {
        StreamSource::Word { symbols } => symbols.as_slice().get(i as usize).copied().unwrap_or(0),
        StreamSource::Newprop { base } => {
            let i = i as u128;
            u8::from(
                i == 0
                    || i == MARKER_LEN - 1
                    || newprop_ones(*base).binary_search(&i).is_ok(),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_two_layout() {
        let ones = newprop_ones(2);
        assert_eq!(ones, vec![0, 11, (1 << 23) + 12, (1 << 23) + 23]);
    }

    #[test]
    fn base_ten_layout() {
        let ones = newprop_ones(10);
        assert_eq!(ones[2], 10u128.pow(23) + 12);
        assert_eq!(ones.len(), 4);
    }

    #[test]
    fn symbols() {
        let s = StreamSource::Newprop { base: 10 };
        let head: Vec<u8> = (0..14).map(|i| stream_symbol(&s, i)).collect();
        assert_eq!(head, vec![1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0]);
    }
}
