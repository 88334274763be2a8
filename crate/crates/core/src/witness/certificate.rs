use serde::{Deserialize, Serialize};

use super::pattern::PatternSpec;
use crate::numerics::interval::RationalInterval;
use crate::numerics::rational::{bigint_str, rational_str, Rational};
use num_bigint::BigInt;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub m: u64,
    pub owner: usize,
    #[serde(with = "bigint_str")]
    pub grid_index: BigInt,
    #[serde(rename = "C")]
    pub c: RationalInterval,
    #[serde(rename = "X")]
    pub x: RationalInterval,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tolerances {
    /// preimage endpoints are multiples of `2^-grid_bits`
    pub grid_bits: u32,
    #[serde(with = "rational_str")]
    pub initial: Rational,
    #[serde(with = "rational_str")]
    pub used: Rational,
    pub retries: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub spec: PatternSpec,
    pub steps: Vec<Step>,
    #[serde(rename = "final")]
    pub final_interval: RationalInterval,
    #[serde(with = "rational_str")]
    pub witness: Rational,
    pub tolerances: Tolerances,
}
