// SPDX-License-Identifier: Apache-2.0

//! Workload generators: small CGGI gate circuits, textbook adders and
//! multipliers, the operator mix of the 8-bit multiply regression workload,
//! and CKKS rotate/add kernels.
//!
//! Boolean arithmetic circuits take their operands least significant bit
//! first (`a0..a{n-1}`, then `b0..b{n-1}`) and return result bits in the same
//! order.

use std::fmt;
use std::str::FromStr;

use crate::ir::{CircuitGraph, GraphBuilder, OpKind, ValueId, ValueType};

/// And/Nand/XNor/Xor counts of the 8-bit multiply regression workload.
pub const TABLE3_MULT8_MIX: [(OpKind, usize); 4] = [
    (OpKind::And, 44),
    (OpKind::Nand, 44),
    (OpKind::XNor, 18),
    (OpKind::Xor, 35),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    AndGate,
    HalfAdder,
    FullAdder,
    RippleAdder(usize),
    ArrayMult(usize),
    LutCanonicalize,
    Table3Mult8,
    CkksDotProduct(usize),
    CkksBoxBlur(usize),
    CkksSimpleSum(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FixtureError {
    #[error("unknown fixture '{0}'")]
    Unknown(String),
    #[error("invalid parameter for fixture '{name}': {reason}")]
    InvalidParam { name: String, reason: String },
}

impl Fixture {
    /// Every fixture with its default parameter.
    pub const ALL: [Fixture; 10] = [
        Fixture::AndGate,
        Fixture::HalfAdder,
        Fixture::FullAdder,
        Fixture::RippleAdder(8),
        Fixture::ArrayMult(8),
        Fixture::LutCanonicalize,
        Fixture::Table3Mult8,
        Fixture::CkksDotProduct(8),
        Fixture::CkksBoxBlur(4),
        Fixture::CkksSimpleSum(8),
    ];

    pub fn base_name(self) -> &'static str {
        match self {
            Fixture::AndGate => "and-gate",
            Fixture::HalfAdder => "half-adder",
            Fixture::FullAdder => "full-adder",
            Fixture::RippleAdder(_) => "ripple-adder",
            Fixture::ArrayMult(_) => "array-mult",
            Fixture::LutCanonicalize => "lut-canonicalize",
            Fixture::Table3Mult8 => "table3-mult8",
            Fixture::CkksDotProduct(_) => "ckks-dot-product",
            Fixture::CkksBoxBlur(_) => "ckks-box-blur",
            Fixture::CkksSimpleSum(_) => "ckks-simple-sum",
        }
    }

    pub fn param(self) -> Option<usize> {
        match self {
            Fixture::RippleAdder(n)
            | Fixture::ArrayMult(n)
            | Fixture::CkksDotProduct(n)
            | Fixture::CkksBoxBlur(n)
            | Fixture::CkksSimpleSum(n) => Some(n),
            _ => None,
        }
    }

    /// Function name used in the generated IR, e.g. `array_mult8`.
    pub fn function_name(self) -> String {
        let base = self.base_name().replace('-', "_");
        match self.param() {
            Some(n) => format!("{base}{n}"),
            None => base,
        }
    }

    pub fn generate(self) -> Result<CircuitGraph, FixtureError> {
        if let Some(n) = self.param() {
            let invalid = |reason: &str| FixtureError::InvalidParam {
                name: self.to_string(),
                reason: reason.to_string(),
            };
            if n < 1 {
                return Err(invalid("n must be at least 1"));
            }
            if matches!(self, Fixture::CkksSimpleSum(_)) && !n.is_power_of_two() {
                return Err(invalid("n must be a power of two"));
            }
            if matches!(self, Fixture::CkksBoxBlur(_)) && n < 2 {
                return Err(invalid("image width must be at least 2"));
            }
        }
        let name = self.function_name();
        Ok(match self {
            Fixture::AndGate => and_gate(&name),
            Fixture::HalfAdder => half_adder(&name),
            Fixture::FullAdder => full_adder(&name),
            Fixture::RippleAdder(n) => ripple_adder(&name, n),
            Fixture::ArrayMult(n) => array_mult(&name, n),
            Fixture::LutCanonicalize => lut_canonicalize(&name),
            Fixture::Table3Mult8 => table3_mult8(&name),
            Fixture::CkksDotProduct(n) => ckks_dot_product(&name, n),
            Fixture::CkksBoxBlur(w) => ckks_box_blur(&name, w),
            Fixture::CkksSimpleSum(n) => ckks_simple_sum(&name, n),
        })
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.param() {
            Some(n) => write!(f, "{}({n})", self.base_name()),
            None => f.write_str(self.base_name()),
        }
    }
}

impl FromStr for Fixture {
    type Err = FixtureError;

    /// Accepts `name`, `name(N)` and `name:N`; parameterized fixtures fall
    /// back to their default parameter when none is given.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (name, param) = if let Some(open) = s.find('(') {
            let inner = s[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| FixtureError::Unknown(s.to_string()))?;
            (&s[..open], Some(inner))
        } else if let Some((name, p)) = s.split_once(':') {
            (name, Some(p))
        } else {
            (s, None)
        };
        let template = Fixture::ALL
            .into_iter()
            .find(|f| f.base_name() == name)
            .ok_or_else(|| FixtureError::Unknown(name.to_string()))?;
        let Some(param) = param else {
            return Ok(template);
        };
        let n: usize = param
            .trim()
            .parse()
            .map_err(|_| FixtureError::InvalidParam {
                name: name.to_string(),
                reason: format!("'{param}' is not a non-negative integer"),
            })?;
        Ok(match template {
            Fixture::RippleAdder(_) => Fixture::RippleAdder(n),
            Fixture::ArrayMult(_) => Fixture::ArrayMult(n),
            Fixture::CkksDotProduct(_) => Fixture::CkksDotProduct(n),
            Fixture::CkksBoxBlur(_) => Fixture::CkksBoxBlur(n),
            Fixture::CkksSimpleSum(_) => Fixture::CkksSimpleSum(n),
            other => {
                return Err(FixtureError::InvalidParam {
                    name: name.to_string(),
                    reason: format!("{other} takes no parameter"),
                })
            }
        })
    }
}

const LWE: ValueType = ValueType::LweCiphertext;

fn bit_args(b: &mut GraphBuilder, prefix: &str, n: usize) -> Vec<ValueId> {
    (0..n)
        .map(|i| b.arg(&format!("{prefix}{i}"), LWE))
        .collect()
}

fn and_gate(name: &str) -> CircuitGraph {
    let mut b = GraphBuilder::new(name);
    let a = bit_args(&mut b, "a", 4);
    let c = bit_args(&mut b, "b", 4);
    let outs: Vec<_> = (0..4).map(|i| b.op(OpKind::And, &[a[i], c[i]])).collect();
    b.ret(&outs);
    b.finish()
}

fn half_adder(name: &str) -> CircuitGraph {
    let mut b = GraphBuilder::new(name);
    let x = b.arg("a", LWE);
    let y = b.arg("b", LWE);
    let sum = b.op(OpKind::Xor, &[x, y]);
    let carry = b.op(OpKind::And, &[x, y]);
    b.ret(&[sum, carry]);
    b.finish()
}

/// `(sum, carry)` of three bits.
fn add3(b: &mut GraphBuilder, x: ValueId, y: ValueId, cin: ValueId) -> (ValueId, ValueId) {
    let t = b.op(OpKind::Xor, &[x, y]);
    let sum = b.op(OpKind::Xor, &[t, cin]);
    let c1 = b.op(OpKind::And, &[x, y]);
    let c2 = b.op(OpKind::And, &[t, cin]);
    let carry = b.op(OpKind::Or, &[c1, c2]);
    (sum, carry)
}

fn add2(b: &mut GraphBuilder, x: ValueId, y: ValueId) -> (ValueId, ValueId) {
    let sum = b.op(OpKind::Xor, &[x, y]);
    let carry = b.op(OpKind::And, &[x, y]);
    (sum, carry)
}

/// Sum of up to three optional bits; `None` stands for a constant zero.
fn add_opt(b: &mut GraphBuilder, bits: [Option<ValueId>; 3]) -> (Option<ValueId>, Option<ValueId>) {
    let present: Vec<ValueId> = bits.into_iter().flatten().collect();
    match present[..] {
        [] => (None, None),
        [x] => (Some(x), None),
        [x, y] => {
            let (s, c) = add2(b, x, y);
            (Some(s), Some(c))
        }
        [x, y, z] => {
            let (s, c) = add3(b, x, y, z);
            (Some(s), Some(c))
        }
        _ => unreachable!(),
    }
}

fn full_adder(name: &str) -> CircuitGraph {
    let mut b = GraphBuilder::new(name);
    let x = b.arg("a", LWE);
    let y = b.arg("b", LWE);
    let cin = b.arg("cin", LWE);
    let (sum, carry) = add3(&mut b, x, y, cin);
    b.ret(&[sum, carry]);
    b.finish()
}

fn ripple_adder(name: &str, n: usize) -> CircuitGraph {
    let mut b = GraphBuilder::new(name);
    let a = bit_args(&mut b, "a", n);
    let c = bit_args(&mut b, "b", n);
    let (s0, mut carry) = add2(&mut b, a[0], c[0]);
    let mut outs = vec![s0];
    for i in 1..n {
        let (s, cout) = add3(&mut b, a[i], c[i], carry);
        outs.push(s);
        carry = cout;
    }
    outs.push(carry);
    b.ret(&outs);
    b.finish()
}

/// Array multiplier: AND partial products accumulated row by row with
/// ripple-carry adders. Returns all `2n` product bits.
fn array_mult(name: &str, n: usize) -> CircuitGraph {
    let mut b = GraphBuilder::new(name);
    let a = bit_args(&mut b, "a", n);
    let c = bit_args(&mut b, "b", n);
    let mut acc: Vec<Option<ValueId>> = vec![None; 2 * n];
    for j in 0..n {
        acc[j] = Some(b.op(OpKind::And, &[a[j], c[0]]));
    }
    for i in 1..n {
        let mut carry = None;
        for j in 0..n {
            let pp = b.op(OpKind::And, &[a[j], c[i]]);
            let (s, cout) = add_opt(&mut b, [acc[i + j], Some(pp), carry]);
            acc[i + j] = s;
            carry = cout;
        }
        acc[i + n] = carry;
    }
    // Only the top bit of a 1x1 product can be absent; it is constant zero.
    let mut zero = None;
    let outs: Vec<ValueId> = acc
        .into_iter()
        .map(|bit| {
            bit.unwrap_or_else(|| *zero.get_or_insert_with(|| b.op(OpKind::Xor, &[a[0], a[0]])))
        })
        .collect();
    b.ret(&outs);
    b.finish()
}

fn lut_canonicalize(name: &str) -> CircuitGraph {
    let mut b = GraphBuilder::new(name);
    let x = bit_args(&mut b, "x", 4);
    // x0 ^ x1, then a 3-input majority.
    let t = b.op(OpKind::Lut2 { lut: 0b0110 }, &[x[0], x[1]]);
    let m = b.op(OpKind::Lut3 { lut: 0b1110_1000 }, &[t, x[2], x[3]]);
    b.ret(&[m]);
    b.finish()
}

/// A layered chain carrying exactly the regression operator mix; each
/// operator consumes the previous result and one input bit.
fn table3_mult8(name: &str) -> CircuitGraph {
    let mut b = GraphBuilder::new(name);
    let a = bit_args(&mut b, "a", 8);
    let c = bit_args(&mut b, "b", 8);
    let inputs: Vec<ValueId> = a.into_iter().chain(c).collect();

    // Round-robin over the mix so every kind is spread along the chain.
    let mut remaining: Vec<(OpKind, usize)> = TABLE3_MULT8_MIX.to_vec();
    let mut kinds = Vec::new();
    while remaining.iter().any(|(_, n)| *n > 0) {
        for (kind, n) in remaining.iter_mut() {
            if *n > 0 {
                kinds.push(kind.clone());
                *n -= 1;
            }
        }
    }
    let mut prev = inputs[0];
    for (k, kind) in kinds.into_iter().enumerate() {
        prev = b.op(kind, &[prev, inputs[(k + 1) % inputs.len()]]);
    }
    b.ret(&[prev]);
    b.finish()
}

const CT: ValueType = ValueType::CkksCiphertext;
const PT: ValueType = ValueType::CkksPlaintext;

/// Slot 0 (then broadcast to every slot) holds `sum(x[i] * w[i], i < n)`.
/// Exact when `n` does not exceed the slot count.
fn ckks_dot_product(name: &str, n: usize) -> CircuitGraph {
    let mut b = GraphBuilder::new(name);
    let x = b.arg("x", CT);
    let w = b.arg("w", PT);
    let prod = b.op(OpKind::MulPlain, &[x, w]);
    let prod = b.op(OpKind::Rescale, &[prod]);
    let mut acc = prod;
    for i in 1..n {
        let shifted = b.op(OpKind::Rotate { offset: i as i64 }, &[prod]);
        acc = b.op(OpKind::Add, &[acc, shifted]);
    }
    let out = b.op(OpKind::Extract { index: 0 }, &[acc]);
    b.ret(&[out]);
    b.finish()
}

/// 3x3 box blur over a `width`-wide row-major image packed into the slots
/// (cyclic borders), scaled slot-wise by the `scale` plaintext.
fn ckks_box_blur(name: &str, width: usize) -> CircuitGraph {
    let mut b = GraphBuilder::new(name);
    let img = b.arg("img", CT);
    let scale = b.arg("scale", PT);
    let w = width as i64;
    let mut acc = img;
    for dy in -1..=1i64 {
        for dx in -1..=1i64 {
            if dy == 0 && dx == 0 {
                continue;
            }
            let shifted = b.op(
                OpKind::Rotate {
                    offset: dy * w + dx,
                },
                &[img],
            );
            acc = b.op(OpKind::Add, &[acc, shifted]);
        }
    }
    let out = b.op(OpKind::MulPlain, &[acc, scale]);
    let out = b.op(OpKind::Rescale, &[out]);
    b.ret(&[out]);
    b.finish()
}

/// Log-depth rotate-and-add reduction; every slot ends up holding the sum
/// of `n` consecutive slots, extracted from slot 0.
fn ckks_simple_sum(name: &str, n: usize) -> CircuitGraph {
    let mut b = GraphBuilder::new(name);
    let x = b.arg("x", CT);
    let mut acc = x;
    let mut step = 1;
    while step < n {
        let shifted = b.op(
            OpKind::Rotate {
                offset: step as i64,
            },
            &[acc],
        );
        acc = b.op(OpKind::Add, &[acc, shifted]);
        step *= 2;
    }
    let out = b.op(OpKind::Extract { index: 0 }, &[acc]);
    b.ret(&[out]);
    b.finish()
}
