//! JSON documents: `{schema_version, config, fields, checks}`.
//!
//! Bivectors are 6-arrays in the order e12, e13, e14, e23, e24, e34; fields
//! are `{nu, nv, data}` with `data` row-major in `u` (index `i·nv + j`).

use serde::{Deserialize, Serialize};

use crate::bonnet::{BonnetPairPatch, PairDifferentials};
use crate::catalog::QuadraticForm;
use crate::charts::{Field, GridChart, OneForm};
use crate::error::{Error, Result};
use crate::exterior4::Bivector4;
use crate::report::{Report, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<C, F> {
    pub schema_version: u32,
    pub config: C,
    pub fields: Option<F>,
    pub checks: Report,
}

impl<C, F> Document<C, F> {
    pub fn new(config: C, fields: Option<F>, checks: Report) -> Self {
        Document { schema_version: SCHEMA_VERSION, config, fields, checks }
    }
}

/// Sampled Bonnet pair. Only the normals and either the differentials or the
/// positions `F±` are required on input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFields {
    pub chart: GridChart,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Field<Bivector4>>,
    #[serde(rename = "Fp", default, skip_serializing_if = "Option::is_none")]
    pub fp: Option<Field<Bivector4>>,
    #[serde(rename = "Fm", default, skip_serializing_if = "Option::is_none")]
    pub fm: Option<Field<Bivector4>>,
    pub np: Field<Bivector4>,
    pub nm: Field<Bivector4>,
    #[serde(rename = "dFp", default, skip_serializing_if = "Option::is_none")]
    pub dfp: Option<OneForm<Bivector4>>,
    #[serde(rename = "dFm", default, skip_serializing_if = "Option::is_none")]
    pub dfm: Option<OneForm<Bivector4>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dnp: Option<OneForm<Bivector4>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dnm: Option<OneForm<Bivector4>>,
    #[serde(rename = "Ip", default, skip_serializing_if = "Option::is_none")]
    pub ip: Option<Field<QuadraticForm>>,
    #[serde(rename = "Im", default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Field<QuadraticForm>>,
    #[serde(rename = "IIp", default, skip_serializing_if = "Option::is_none")]
    pub iip: Option<Field<QuadraticForm>>,
    #[serde(rename = "IIm", default, skip_serializing_if = "Option::is_none")]
    pub iim: Option<Field<QuadraticForm>>,
    #[serde(rename = "Hp", default, skip_serializing_if = "Option::is_none")]
    pub hp: Option<Field<f64>>,
    #[serde(rename = "Hm", default, skip_serializing_if = "Option::is_none")]
    pub hm: Option<Field<f64>>,
}

impl PairFields {
    pub fn from_pair(pair: &BonnetPairPatch) -> PairFields {
        let d = &pair.diff;
        let forms = &pair.forms;
        PairFields {
            chart: d.chart,
            f: Some(pair.f.clone()),
            fp: Some(pair.fp.clone()),
            fm: Some(pair.fm.clone()),
            np: d.np.clone(),
            nm: d.nm.clone(),
            dfp: Some(d.dfp.clone()),
            dfm: Some(d.dfm.clone()),
            dnp: Some(d.dnp.clone()),
            dnm: Some(d.dnm.clone()),
            ip: Some(forms.ip.clone()),
            im: Some(forms.im.clone()),
            iip: Some(forms.iip.clone()),
            iim: Some(forms.iim.clone()),
            hp: Some(forms.hp.clone()),
            hm: Some(forms.hm.clone()),
        }
    }

    /// Stored differentials when complete, otherwise finite differences of
    /// `F±` and `n±`.
    pub fn differentials(&self) -> Result<PairDifferentials> {
        let chart = self.chart;
        if let (Some(dfp), Some(dfm), Some(dnp), Some(dnm)) = (&self.dfp, &self.dfm, &self.dnp, &self.dnm) {
            for f in [&self.np, &self.nm, &dfp.du, &dfp.dv, &dfm.du, &dfm.dv, &dnp.du, &dnp.dv, &dnm.du, &dnm.dv] {
                f.check_shape(&chart)?;
            }
            return Ok(PairDifferentials {
                chart,
                np: self.np.clone(),
                nm: self.nm.clone(),
                dfp: dfp.clone(),
                dfm: dfm.clone(),
                dnp: dnp.clone(),
                dnm: dnm.clone(),
            });
        }
        match (&self.fp, &self.fm) {
            (Some(fp), Some(fm)) => PairDifferentials::from_positions(&chart, fp, fm, &self.np, &self.nm),
            _ => Err(Error::InvalidParameter(
                "pair needs either dFp, dFm, dnp, dnm or the positions Fp, Fm".into(),
            )),
        }
    }
}
