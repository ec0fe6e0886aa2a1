use std::fmt::Display;
use std::io::{self, Write};

use super::SweepRow;

pub const CSV_HEADER: &str =
    "family,alpha,n,rate,channel,param,decoder,L,max_iter,trials,errors,pe,ci_lo,ci_hi,seed";

/// One output line. Absent fields are written empty.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub family: String,
    pub alpha: Option<f64>,
    pub n: Option<u32>,
    pub rate: f64,
    pub channel: String,
    pub param: f64,
    pub decoder: String,
    pub list: Option<usize>,
    pub max_iter: Option<usize>,
    pub trials: Option<u64>,
    pub errors: Option<u64>,
    pub pe: f64,
    pub ci: Option<(f64, f64)>,
    pub seed: Option<u64>,
}

impl From<&SweepRow> for Record {
    fn from(r: &SweepRow) -> Self {
        let e = &r.estimate;
        Self {
            family: "interp".into(),
            alpha: Some(r.alpha),
            n: Some(r.spec.n()),
            rate: r.spec.rate(),
            channel: r.channel.to_string(),
            param: r.param,
            decoder: r.decoder.name().into(),
            list: r.decoder.list_size(),
            max_iter: r.decoder.max_iter(),
            trials: Some(e.trials),
            errors: Some(e.errors),
            pe: e.pe,
            ci: Some((e.ci_lo, e.ci_hi)),
            seed: Some(e.seed),
        }
    }
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt<T: Display>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl Record {
    pub fn to_line(&self) -> String {
        let (lo, hi) = match self.ci {
            Some((lo, hi)) => (float(lo), float(hi)),
            None => Default::default(),
        };
        [
            self.family.clone(),
            self.alpha.map(float).unwrap_or_default(),
            opt(self.n),
            float(self.rate),
            self.channel.clone(),
            float(self.param),
            self.decoder.clone(),
            opt(self.list),
            opt(self.max_iter),
            opt(self.trials),
            opt(self.errors),
            float(self.pe),
            lo,
            hi,
            opt(self.seed),
        ]
        .join(",")
    }
}

pub fn write_csv<'a, W: Write>(out: &mut W, records: impl IntoIterator<Item = &'a Record>) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.to_line())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_layout() {
        let r = Record {
            family: "random".into(),
            alpha: None,
            n: Some(4),
            rate: 0.5,
            channel: "bec:0.1".into(),
            param: 0.1,
            decoder: "random-map".into(),
            list: None,
            max_iter: None,
            trials: None,
            errors: None,
            pe: 1.0 / 3.0,
            ci: None,
            seed: None,
        };
        let line = r.to_line();
        assert_eq!(line.split(',').count(), CSV_HEADER.split(',').count());
        assert_eq!(
            line,
            "random,,4,5.0000000000000000e-1,bec:0.1,1.0000000000000001e-1,random-map,,,,,3.3333333333333331e-1,,,"
        );
        let pe: f64 = line.split(',').nth(11).unwrap().parse().unwrap();
        assert_eq!(pe, 1.0 / 3.0);
    }
}
