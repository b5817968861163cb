//! JSON form of a [`TaylorletSpec`]. Coefficients are written as `"num/den"`
//! strings so files round-trip exactly.

use serde::{Deserialize, Serialize};

use super::construct::TaylorletSpec;
use super::gauss_poly::{format_rational, parse_rational, GaussExpPoly};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyRecord {
    #[serde(rename = "W")]
    pub weight_power: u32,
    pub coeffs: Vec<(u32, String)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaylorletRecord {
    pub order_n: u32,
    pub moments_r: u32,
    pub g: PolyRecord,
    pub h: PolyRecord,
    pub antider: Vec<PolyRecord>,
}

impl From<&GaussExpPoly> for PolyRecord {
    fn from(f: &GaussExpPoly) -> Self {
        Self {
            weight_power: f.weight_power(),
            coeffs: f
                .coeffs()
                .iter()
                .map(|(&p, c)| (p, format_rational(c)))
                .collect(),
        }
    }
}

impl TryFrom<&PolyRecord> for GaussExpPoly {
    type Error = Error;

    fn try_from(rec: &PolyRecord) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        let mut coeffs = Vec::with_capacity(rec.coeffs.len());
        for (p, c) in &rec.coeffs {
            if !seen.insert(*p) {
                return Err(Error::InvalidInput(format!("duplicate power {p}")));
            }
            coeffs.push((*p, parse_rational(c)?));
        }
        GaussExpPoly::new(rec.weight_power, coeffs)
    }
}

impl From<&TaylorletSpec> for TaylorletRecord {
    fn from(spec: &TaylorletSpec) -> Self {
        Self {
            order_n: spec.order_n,
            moments_r: spec.moments_r,
            g: (&spec.g).into(),
            h: (&spec.h).into(),
            antider: spec.antider.iter().map(PolyRecord::from).collect(),
        }
    }
}

impl TryFrom<&TaylorletRecord> for TaylorletSpec {
    type Error = Error;

    /// Takes the stored antiderivatives at face value; use
    /// [`antiderivative_consistency`] to check them against `g`.
    fn try_from(rec: &TaylorletRecord) -> Result<Self> {
        if rec.order_n == 0 || rec.moments_r == 0 {
            return Err(Error::InvalidInput(
                "order_n and moments_r must be positive".into(),
            ));
        }
        if rec.antider.len() + 1 != rec.moments_r as usize {
            return Err(Error::InvalidInput(format!(
                "expected {} antiderivatives, found {}",
                rec.moments_r - 1,
                rec.antider.len()
            )));
        }
        let g = GaussExpPoly::try_from(&rec.g)?;
        let h = GaussExpPoly::try_from(&rec.h)?;
        if g.weight_power() != 2 || h.weight_power() != 2 {
            return Err(Error::InvalidInput("g and h must have W = 2".into()));
        }
        let antider = rec
            .antider
            .iter()
            .map(GaussExpPoly::try_from)
            .collect::<Result<Vec<_>>>()?;
        Ok(TaylorletSpec {
            g,
            h,
            order_n: rec.order_n,
            moments_r: rec.moments_r,
            antider,
        })
    }
}

pub fn to_json(spec: &TaylorletSpec) -> String {
    serde_json::to_string_pretty(&TaylorletRecord::from(spec))
        .expect("record is always serializable")
}

pub fn from_json(text: &str) -> Result<TaylorletSpec> {
    let rec: TaylorletRecord = serde_json::from_str(text)?;
    TaylorletSpec::try_from(&rec)
}

/// For each cached `I_+^j g`, whether its derivative equals `I_+^{j-1} g`.
pub fn antiderivative_consistency(spec: &TaylorletSpec) -> Vec<bool> {
    let mut prev = &spec.g;
    spec.antider
        .iter()
        .map(|a| {
            let ok = a.differentiate() == *prev;
            prev = a;
            ok
        })
        .collect()
}
