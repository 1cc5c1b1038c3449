//! Deterministic, partitioned random streams.
//!
//! Work is cut into fixed-size chunks and chunk `k` always draws from ChaCha
//! stream `k` of the key, so results are bit-identical for a given key no
//! matter how many worker threads rayon uses.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Rows generated per stream.
pub const CHUNK_ROWS: usize = 1 << 14;

/// Identifies a family of random streams: a master seed plus a domain tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey {
    seed: u64,
    domain: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        StreamKey { seed, domain: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derives a disjoint key for a named sub-experiment.
    pub fn with_domain(self, label: &str) -> Self {
        StreamKey {
            seed: self.seed,
            domain: splitmix64(self.domain ^ fnv1a(label)),
        }
    }

    /// Derives a disjoint key for the `index`-th repetition of an experiment.
    pub fn substream(self, index: u64) -> Self {
        StreamKey {
            seed: self.seed,
            domain: splitmix64(self.domain.wrapping_add(splitmix64(index ^ 0x5851_f42d_4c95_7f2d))),
        }
    }

    /// Generator for stream `stream` of this key.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(self.seed) ^ self.domain);
        rng.set_stream(stream);
        rng
    }
}

/// Splits `rows` into chunks and maps each chunk with its own stream, in
/// chunk order.
pub fn map_chunks<T, F>(rows: usize, key: StreamKey, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    let chunks = rows.div_ceil(CHUNK_ROWS);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK_ROWS.min(rows - c * CHUNK_ROWS);
            let mut rng = key.rng(c as u64);
            f(&mut rng, len)
        })
        .collect()
}

/// Draws `rows` rows of `width` values each into a row-major buffer.
pub fn fill_rows<F>(rows: usize, width: usize, key: StreamKey, draw: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) + Sync,
{
    let parts = map_chunks(rows, key, |rng, len| {
        let mut buf = vec![0.0; len * width];
        for row in buf.chunks_exact_mut(width.max(1)) {
            draw(rng, row);
        }
        buf
    });
    parts.concat()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_key_same_values() {
        let key = StreamKey::new(7).with_domain("x");
        let a = fill_rows(40_000, 2, key, |rng, row| {
            row[0] = rng.random();
            row[1] = rng.random();
        });
        let b = fill_rows(40_000, 2, key, |rng, row| {
            row[0] = rng.random();
            row[1] = rng.random();
        });
        assert_eq!(a, b);
        assert_eq!(a.len(), 80_000);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let key = StreamKey::new(11);
        let draw = |rng: &mut ChaCha8Rng, row: &mut [f64]| row[0] = rng.random();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| fill_rows(50_000, 1, key, draw));
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| fill_rows(50_000, 1, key, draw));
        assert_eq!(one, four);
    }

    #[test]
    fn domains_and_substreams_differ() {
        let base = StreamKey::new(3);
        let mut a = base.with_domain("a").rng(0);
        let mut b = base.with_domain("b").rng(0);
        let mut c = base.substream(1).rng(0);
        let (x, y, z): (u64, u64, u64) = (a.random(), b.random(), c.random());
        assert_ne!(x, y);
        assert_ne!(x, z);
        assert_ne!(y, z);
    }
}
