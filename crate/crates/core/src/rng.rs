//! Counter-based random numbers.
//!
//! Every variate is a pure function of a `(seed, a, b)` key: the key is
//! hashed with the SplitMix64 finalizer, the top 52 bits become a uniform
//! in the open interval (0, 1), and a standard normal is obtained by the
//! inverse normal CDF (Acklam's rational approximation, relative error
//! below 1.2e-9). Nothing is stateful, so matrix entries, trials and
//! sample streams can be produced in any order or in parallel and still
//! agree bit-for-bit.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash of a three-part key.
#[inline]
pub fn counter_hash(seed: u64, a: u64, b: u64) -> u64 {
    let h = mix64(seed.wrapping_add(GOLDEN));
    let h = mix64(h ^ a.wrapping_mul(GOLDEN).wrapping_add(0x632B_E59B_D9B4_E019));
    mix64(h ^ b.wrapping_mul(0xD1B5_4A32_D192_ED03).wrapping_add(0x8CB9_2BA7_2F3D_8DD7))
}

/// Seed for sub-stream `index` of `master`, e.g. the layer seed of trial `index`.
#[inline]
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master ^ 0xA076_1D64_78BD_642F).wrapping_add(index.wrapping_mul(GOLDEN)))
}

/// Uniform in (0, 1); never returns 0 or 1.
#[inline]
pub fn unit_open(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Inverse of the standard normal CDF for `p` in (0, 1).
pub fn inverse_normal_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Standard normal variate keyed on `(seed, a, b)`.
#[inline]
pub fn normal_at(seed: u64, a: u64, b: u64) -> f64 {
    inverse_normal_cdf(unit_open(counter_hash(seed, a, b)))
}

/// Uniform variate in (0, 1) keyed on `(seed, a, b)`.
#[inline]
pub fn uniform_at(seed: u64, a: u64, b: u64) -> f64 {
    unit_open(counter_hash(seed, a, b))
}

/// Sequential view over one keyed stream, for code that just wants
/// "the next number". Draw `k` of stream `s` is `normal_at(seed, s, k)`.
#[derive(Debug, Clone)]
pub struct Stream {
    seed: u64,
    stream: u64,
    counter: u64,
}

impl Stream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self {
            seed,
            stream,
            counter: 0,
        }
    }

    pub fn normal(&mut self) -> f64 {
        let v = normal_at(self.seed, self.stream, self.counter);
        self.counter += 1;
        v
    }

    pub fn uniform(&mut self) -> f64 {
        let v = uniform_at(self.seed, self.stream, self.counter);
        self.counter += 1;
        v
    }

    pub fn normal_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }
}
